//! Lattices as rational basis matrices inside a fixed ambient space.
//!
//! A lattice is the set of integer combinations of its basis rows. Bases are
//! kept in a canonical form (denominator-cleared Hermite normal form), so
//! structural equality coincides with equality of lattices.

use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::linalg::{
    hermite_normal_form, int_determinant, int_row_kernel, nullspace, rat_rank,
    rows_to_int_matrix, express_in_rows, IntMatrix,
};
use crate::rat::{rat_to_string, QVec, Rat};
use crate::invalid;

/// Index of a sublattice in a superlattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeIndex {
    Finite(BigInt),
    Infinite,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Lattice {
    ambient_dim: usize,
    /// Canonical basis: HNF rows divided by the common denominator.
    basis: Vec<QVec>,
}

impl core::fmt::Debug for Lattice {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Lattice[dim {} rank {}: ", self.ambient_dim, self.rank())?;
        for (i, b) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{b:?}")?;
        }
        write!(f, "]")
    }
}

impl Lattice {
    /// Builds a lattice from a (possibly redundant) generating set.
    pub fn from_generators(ambient_dim: usize, generators: &[QVec]) -> Self {
        for g in generators {
            assert_eq!(g.dim(), ambient_dim, "generator dimension mismatch");
        }
        let nonzero: Vec<QVec> = generators.iter().filter(|g| !g.is_zero()).cloned().collect();
        if nonzero.is_empty() {
            return Lattice { ambient_dim, basis: Vec::new() };
        }
        let (m, denom) = rows_to_int_matrix(&nonzero);
        let (h, _) = hermite_normal_form(&m);
        let denom_rat = Rat::from_integer(denom);
        let mut basis = Vec::new();
        for r in 0..h.rows() {
            if h.row(r).iter().all(|x| x.is_zero()) {
                continue;
            }
            basis.push(QVec(
                h.row(r)
                    .iter()
                    .map(|x| Rat::from_integer(x.clone()) / &denom_rat)
                    .collect(),
            ));
        }
        Lattice { ambient_dim, basis }
    }

    /// The standard integer lattice of the ambient space.
    pub fn standard(dim: usize) -> Self {
        let mut basis = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut v = QVec::zero(dim);
            v.0[i] = Rat::one();
            basis.push(v);
        }
        Lattice { ambient_dim: dim, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[QVec] {
        &self.basis
    }

    /// Rational coordinates of `v` with respect to the basis, if `v` lies in
    /// the rational span of the lattice.
    pub fn span_coords(&self, v: &QVec) -> Option<Vec<Rat>> {
        express_in_rows(&self.basis, v)
    }

    pub fn in_span(&self, v: &QVec) -> bool {
        self.span_coords(v).is_some()
    }

    /// Lattice membership: integer coordinates with respect to the basis.
    pub fn contains(&self, v: &QVec) -> bool {
        match self.span_coords(v) {
            None => false,
            Some(c) => c.iter().all(|x| x.denom().is_one()),
        }
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    /// The first lattice point along the ray through `v`.
    pub fn primitive_on_ray(&self, v: &QVec) -> Result<QVec> {
        if v.is_zero() {
            return Err(invalid!("primitive point of the zero vector"));
        }
        let coords = self
            .span_coords(v)
            .ok_or_else(|| invalid!("vector {v:?} not in the span of the lattice"))?;
        let mut denom = BigInt::one();
        for c in &coords {
            denom = denom.lcm(c.denom());
        }
        let mut gcd = BigInt::zero();
        for c in &coords {
            gcd = gcd.gcd(&(c.numer() * (&denom / c.denom())));
        }
        let t = Rat::new(denom, gcd);
        Ok(v.scale(&t))
    }

    /// Integer coordinate matrix of `sub`'s basis in `self`'s basis, if `sub`
    /// is contained in `self`.
    fn coord_matrix_of(&self, sub: &Lattice) -> Option<IntMatrix> {
        let mut m = IntMatrix::zero(sub.rank(), self.rank());
        for (i, b) in sub.basis.iter().enumerate() {
            let coords = self.span_coords(b)?;
            for (j, c) in coords.iter().enumerate() {
                if !c.denom().is_one() {
                    return None;
                }
                *m.at_mut(i, j) = c.numer().clone();
            }
        }
        Some(m)
    }

    /// The group index `[self : sub]`.
    pub fn index_of(&self, sub: &Lattice) -> Result<LatticeIndex> {
        let m = self
            .coord_matrix_of(sub)
            .ok_or_else(|| invalid!("sublattice not contained in superlattice"))?;
        if sub.rank() < self.rank() {
            return Ok(LatticeIndex::Infinite);
        }
        Ok(LatticeIndex::Finite(int_determinant(&m).abs()))
    }

    /// Restriction to a rational subspace: the sublattice of points lying in
    /// the span of `span_vectors`.
    pub fn restrict_to_span(&self, span_vectors: &[QVec]) -> Lattice {
        if self.basis.is_empty() {
            return self.clone();
        }
        // equations cutting out the subspace
        let eqs = nullspace(span_vectors, self.ambient_dim);
        if eqs.is_empty() {
            return self.clone();
        }
        // rows = conditions on basis coordinates
        let cond: Vec<QVec> = self
            .basis
            .iter()
            .map(|b| QVec(eqs.iter().map(|e| b.dot(e)).collect()))
            .collect();
        let (m, _) = rows_to_int_matrix(&cond);
        let kernel = int_row_kernel(&m);
        let mut gens = Vec::new();
        for k in kernel {
            let mut acc = QVec::zero(self.ambient_dim);
            for (c, b) in k.iter().zip(self.basis.iter()) {
                acc = &acc + &b.scale(&Rat::from_integer(c.clone()));
            }
            gens.push(acc);
        }
        Lattice::from_generators(self.ambient_dim, &gens)
    }

    /// Image lattice under an integer linear map.
    pub fn image(&self, map: &IntMatrix) -> Lattice {
        assert_eq!(map.cols(), self.ambient_dim);
        let gens: Vec<QVec> = self.basis.iter().map(|b| map.apply(b)).collect();
        Lattice::from_generators(map.rows(), &gens)
    }

    /// Canonical text form used for digests.
    pub fn canonical_string(&self) -> String {
        use alloc::format;
        let mut s = format!("L{}:", self.ambient_dim);
        for b in &self.basis {
            s.push('[');
            for (i, c) in b.0.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(&rat_to_string(c));
            }
            s.push(']');
        }
        s
    }
}

/// The preimage lattice `{ x in source_sup : map(x) in target }`.
pub fn preimage_lattice(
    map: &IntMatrix,
    target: &Lattice,
    source_sup: &Lattice,
) -> Result<Lattice> {
    if map.cols() != source_sup.ambient_dim() || map.rows() != target.ambient_dim() {
        return Err(invalid!(
            "dimension mismatch: map is {}x{}, source ambient {}, target ambient {}",
            map.rows(),
            map.cols(),
            source_sup.ambient_dim(),
            target.ambient_dim()
        ));
    }
    let r = source_sup.rank();
    let m = target.rank();
    if r == 0 {
        return Ok(source_sup.clone());
    }
    // kernel of (c, y) |-> c * V - y * T, where V = images of the source basis
    let mut rows: Vec<QVec> = Vec::with_capacity(r + m);
    for b in source_sup.basis() {
        rows.push(map.apply(b));
    }
    for t in target.basis() {
        rows.push(-t);
    }
    let (int_rows, _) = rows_to_int_matrix(&rows);
    let kernel = int_row_kernel(&int_rows);
    let mut gens = Vec::new();
    for k in kernel {
        let mut acc = QVec::zero(source_sup.ambient_dim());
        for (c, b) in k.iter().take(r).zip(source_sup.basis().iter()) {
            acc = &acc + &b.scale(&Rat::from_integer(c.clone()));
        }
        gens.push(acc);
    }
    Ok(Lattice::from_generators(source_sup.ambient_dim(), &gens))
}

/// Rank of a set of vectors (dimension of their span).
pub fn span_rank(vectors: &[QVec]) -> usize {
    rat_rank(vectors)
}
