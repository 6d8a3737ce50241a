//! Exact polyhedral geometry for pointed rational cones at desk scale:
//! facet enumeration, extreme rays, face lattices, hyperplane cuts and
//! lower facets of lifted cones. All conversions are brute force over
//! generator subsets, which is exact and fast enough for the input sizes
//! this crate targets.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::Result;
use crate::internal;
use crate::linalg::{nullspace, rat_rank, rref};
use crate::rat::{QVec, Rat};

/// Sign of a rational.
fn sign(r: &Rat) -> i8 {
    if r.is_zero() {
        0
    } else if r > &Rat::zero() {
        1
    } else {
        -1
    }
}

/// Geometry of a cone spanned by a fixed generator list.
#[derive(Clone, Debug)]
pub struct ConeGeom {
    pub ambient_dim: usize,
    pub gens: Vec<QVec>,
    /// Dimension of the linear span of the generators.
    pub dim: usize,
    /// Equations cutting out the span: `x . e = 0`.
    pub span_eqs: Vec<QVec>,
    /// Inner facet normals (canonical directions): `x . n >= 0` on the cone.
    pub facets: Vec<QVec>,
}

impl ConeGeom {
    pub fn new(ambient_dim: usize, gens: &[QVec]) -> ConeGeom {
        debug_assert!(gens.iter().all(|g| g.dim() == ambient_dim));
        let dim = rat_rank(gens);
        let span_eqs = nullspace(gens, ambient_dim);
        let facets = enumerate_facets(ambient_dim, gens, dim);
        ConeGeom {
            ambient_dim,
            gens: gens.to_vec(),
            dim,
            span_eqs,
            facets,
        }
    }

    /// No line is contained in the cone.
    pub fn is_pointed(&self) -> bool {
        if self.dim == 0 {
            return true;
        }
        let mut all = self.span_eqs.clone();
        all.extend(self.facets.iter().cloned());
        rat_rank(&all) == self.ambient_dim
    }

    pub fn contains(&self, v: &QVec) -> bool {
        self.span_eqs.iter().all(|e| v.dot(e).is_zero())
            && self.facets.iter().all(|n| sign(&v.dot(n)) >= 0)
    }

    /// Membership in the relative interior.
    pub fn contains_relint(&self, v: &QVec) -> bool {
        if self.dim == 0 {
            return v.is_zero();
        }
        self.span_eqs.iter().all(|e| v.dot(e).is_zero())
            && self.facets.iter().all(|n| sign(&v.dot(n)) > 0)
    }

    /// A point in the relative interior (the sum of the generators).
    pub fn relint_point(&self) -> QVec {
        let mut acc = QVec::zero(self.ambient_dim);
        for g in &self.gens {
            acc = &acc + g;
        }
        acc
    }

    /// All nonzero faces as sets of generator indices (the cone itself
    /// included), via meet closure of facet zero sets.
    pub fn face_index_sets(&self) -> BTreeSet<Vec<usize>> {
        let full: Vec<usize> = (0..self.gens.len()).collect();
        let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
        if self.gens.is_empty() {
            return out;
        }
        out.insert(full.clone());
        let zero_sets: Vec<Vec<usize>> = self
            .facets
            .iter()
            .map(|n| {
                (0..self.gens.len())
                    .filter(|&i| self.gens[i].dot(n).is_zero())
                    .collect()
            })
            .collect();
        let mut frontier: Vec<Vec<usize>> = alloc::vec![full];
        while let Some(face) = frontier.pop() {
            for z in &zero_sets {
                let inter: Vec<usize> =
                    face.iter().copied().filter(|i| z.contains(i)).collect();
                if inter.is_empty() || out.contains(&inter) {
                    continue;
                }
                out.insert(inter.clone());
                frontier.push(inter);
            }
        }
        out
    }

    /// Extreme rays of the cone, as canonical directions.
    pub fn extreme_rays(&self) -> Result<Vec<QVec>> {
        extreme_rays(self.ambient_dim, &self.span_eqs, &self.facets)
    }
}

/// Facet inner normals of `cone(gens)`; `dim` is the span dimension.
fn enumerate_facets(ambient_dim: usize, gens: &[QVec], dim: usize) -> Vec<QVec> {
    if dim == 0 {
        return Vec::new();
    }
    let (span_basis, _) = rref(gens);
    let mut found: BTreeSet<QVec> = BTreeSet::new();
    let idx: Vec<usize> = (0..gens.len()).collect();
    for subset in subsets_of_size(&idx, dim - 1) {
        let sel: Vec<QVec> = subset.iter().map(|&i| gens[i].clone()).collect();
        if rat_rank(&sel) + 1 != dim {
            continue;
        }
        // normals within the span vanishing on the subset: n = y . span_basis
        // with (y . span_basis) . g = 0 for g in subset
        let cond: Vec<QVec> = sel
            .iter()
            .map(|g| QVec(span_basis.iter().map(|b| b.dot(g)).collect()))
            .collect();
        let ys = nullspace(&cond, dim);
        if ys.len() != 1 {
            continue;
        }
        let mut n = QVec::zero(ambient_dim);
        for (c, b) in ys[0].0.iter().zip(span_basis.iter()) {
            n = &n + &b.scale(c);
        }
        let mut pos = false;
        let mut neg = false;
        for g in gens {
            match sign(&g.dot(&n)) {
                1 => pos = true,
                -1 => neg = true,
                _ => {}
            }
        }
        let oriented = if !neg {
            n
        } else if !pos {
            -&n
        } else {
            continue;
        };
        if let Some(c) = oriented.canonical_direction() {
            found.insert(c);
        }
    }
    found.into_iter().collect()
}

/// Extreme rays of `{ x : x.e = 0, x.n >= 0 }`, as canonical directions.
/// Errors if the region contains a line.
pub fn extreme_rays(
    ambient_dim: usize,
    equations: &[QVec],
    inequalities: &[QVec],
) -> Result<Vec<QVec>> {
    let span_dim = ambient_dim - rat_rank(equations);
    if span_dim == 0 {
        return Ok(Vec::new());
    }
    let mut out: BTreeSet<QVec> = BTreeSet::new();
    let idx: Vec<usize> = (0..inequalities.len()).collect();
    for subset in subsets_of_size(&idx, span_dim - 1) {
        let mut sys: Vec<QVec> = equations.to_vec();
        for &i in &subset {
            sys.push(inequalities[i].clone());
        }
        let ns = nullspace(&sys, ambient_dim);
        if ns.len() != 1 {
            continue;
        }
        let cand = &ns[0];
        let mut ok_pos = true;
        let mut ok_neg = true;
        for n in inequalities {
            match sign(&cand.dot(n)) {
                1 => ok_neg = false,
                -1 => ok_pos = false,
                _ => {}
            }
        }
        match (ok_pos, ok_neg) {
            (true, true) => {
                return Err(internal!("extreme ray search hit a non-pointed cone"));
            }
            (true, false) => {
                out.insert(cand.canonical_direction().unwrap());
            }
            (false, true) => {
                out.insert((-cand).canonical_direction().unwrap());
            }
            (false, false) => {}
        }
    }
    Ok(out.into_iter().collect())
}

/// Splits `cone(gens)` by the hyperplane `x . ell = 0`. Returns the
/// generator sets of the two closed sides, each `Some` only when the side is
/// full-dimensional in the cone's span (a proper cut has both).
pub fn cut_by_hyperplane(
    geom: &ConeGeom,
    ell: &QVec,
) -> Result<(Option<Vec<QVec>>, Option<Vec<QVec>>)> {
    let signs: Vec<i8> = geom.gens.iter().map(|g| sign(&g.dot(ell))).collect();
    if signs.iter().all(|&s| s >= 0) {
        return Ok((Some(geom.gens.clone()), None));
    }
    if signs.iter().all(|&s| s <= 0) {
        return Ok((None, Some(geom.gens.clone())));
    }
    let side = |positive: bool| -> Result<Option<Vec<QVec>>> {
        let mut ineqs = geom.facets.clone();
        ineqs.push(if positive { ell.clone() } else { -ell });
        let rays = extreme_rays(geom.ambient_dim, &geom.span_eqs, &ineqs)?;
        if rat_rank(&rays) == geom.dim {
            Ok(Some(rays))
        } else {
            Ok(None)
        }
    };
    Ok((side(true)?, side(false)?))
}

/// Lower facets of the cone over lifted points `(p_i, h_i)`: index sets of
/// the cells of the regular subdivision induced by the heights. An empty
/// result means the lift is flat (the subdivision is trivial).
pub fn lower_facet_cells(points: &[QVec], heights: &[Rat]) -> Result<Vec<Vec<usize>>> {
    assert_eq!(points.len(), heights.len());
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let ambient = points[0].dim();
    let lifted: Vec<QVec> = points
        .iter()
        .zip(heights.iter())
        .map(|(p, h)| {
            let mut v = p.0.clone();
            v.push(h.clone());
            QVec(v)
        })
        .collect();
    let base_dim = rat_rank(points);
    let lift_dim = rat_rank(&lifted);
    if lift_dim == base_dim {
        return Ok(Vec::new());
    }
    debug_assert_eq!(lift_dim, base_dim + 1);
    let geom = ConeGeom::new(ambient + 1, &lifted);
    let mut cells: BTreeSet<Vec<usize>> = BTreeSet::new();
    for n in &geom.facets {
        // inner normal with positive last coordinate supports a lower facet
        if sign(&n.0[ambient]) <= 0 {
            continue;
        }
        let cell: Vec<usize> = (0..lifted.len())
            .filter(|&i| lifted[i].dot(n).is_zero())
            .collect();
        if !cell.is_empty() {
            cells.insert(cell);
        }
    }
    if cells.is_empty() {
        return Err(internal!("lifted cone has no lower facets"));
    }
    Ok(cells.into_iter().collect())
}

/// All subsets of `items` of the given size, in deterministic order.
pub fn subsets_of_size<T: Clone>(items: &[T], size: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    if size > items.len() {
        return out;
    }
    let mut stack: Vec<(usize, Vec<T>)> = alloc::vec![(0, Vec::new())];
    while let Some((start, cur)) = stack.pop() {
        if cur.len() == size {
            out.push(cur);
            continue;
        }
        let need = size - cur.len();
        // iterate in reverse so that the popped order is lexicographic
        for i in (start..=items.len() - need).rev() {
            let mut next = cur.clone();
            next.push(items[i].clone());
            stack.push((i + 1, next));
        }
    }
    out
}
