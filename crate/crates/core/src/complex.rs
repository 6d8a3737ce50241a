//! Embedded rational conical polyhedral complexes with per-cone lattices.
//!
//! A complex lives in one ambient rational space. Every cone is recorded by
//! its sorted list of extreme rays together with a full-rank lattice on its
//! span; all faces of every cone are themselves cones of the complex. The
//! zero cone is implicit. Rays and cones are kept in a canonical order so
//! that equal complexes are structurally equal.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::digest::{fnv1a64, hex64};
use crate::error::Result;
use crate::geometry::ConeGeom;
use crate::invalid;
use crate::lattice::{Lattice, LatticeIndex};
use crate::linalg::{smith_normal_form, unimodular_inverse, IntMatrix};
use crate::rat::{rat_to_string, QVec, Rat};

pub type RayId = usize;
pub type ConeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ray {
    /// Canonical primitive integer direction; identifies the ray geometrically.
    pub direction: QVec,
    /// First point of the ray's own lattice along the ray.
    pub point: QVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    /// Sorted ids of the extreme rays.
    pub rays: Vec<RayId>,
    /// Full-rank lattice on the span of the cone.
    pub lattice: Lattice,
    pub dim: usize,
}

impl Cone {
    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim
    }
}

/// Input for assembling a complex: one cone with explicit ray directions.
#[derive(Clone, Debug)]
pub struct ConeSpec {
    pub ray_dirs: Vec<QVec>,
    pub lattice: Lattice,
}

/// A lattice point of a simplicial cone written in the half-open box of its
/// primitive generators: `point = sum coefficients_i * v_i`, `0 <= c_i < 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WatermanPoint {
    pub carrier: ConeId,
    pub coefficients: Vec<Rat>,
    pub point: QVec,
}

#[derive(Clone)]
pub struct Complex {
    ambient_dim: usize,
    rays: Vec<Ray>,
    cones: Vec<Cone>,
    geoms: Vec<ConeGeom>,
    index: BTreeMap<Vec<RayId>, ConeId>,
}

impl core::fmt::Debug for Complex {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        writeln!(
            f,
            "Complex(dim {}, {} rays, {} cones)",
            self.ambient_dim,
            self.rays.len(),
            self.cones.len()
        )?;
        for (i, r) in self.rays.iter().enumerate() {
            writeln!(f, "  ray {i}: {:?} point {:?}", r.direction, r.point)?;
        }
        for c in &self.cones {
            writeln!(f, "  cone {:?} dim {}", c.rays, c.dim)?;
        }
        Ok(())
    }
}

impl PartialEq for Complex {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.rays == other.rays
            && self.cones == other.cones
    }
}
impl Eq for Complex {}

impl Complex {
    /// Assembles a complex from cone specs, closing under faces. Face
    /// lattices are restrictions of their parents'; pre-existing entries are
    /// cross-checked for consistency.
    pub fn assemble(ambient_dim: usize, specs: &[ConeSpec]) -> Result<Complex> {
        // canonical ray table
        let mut dir_set: BTreeSet<QVec> = BTreeSet::new();
        let mut canon_specs: Vec<(Vec<QVec>, Lattice)> = Vec::new();
        for spec in specs {
            let mut dirs = Vec::with_capacity(spec.ray_dirs.len());
            for d in &spec.ray_dirs {
                let c = d
                    .canonical_direction()
                    .ok_or_else(|| invalid!("zero vector listed as a ray"))?;
                if c.dim() != ambient_dim {
                    return Err(invalid!("ray dimension differs from ambient dimension"));
                }
                dirs.push(c);
            }
            for d in &dirs {
                dir_set.insert(d.clone());
            }
            canon_specs.push((dirs, spec.lattice.clone()));
        }
        let ray_dirs: Vec<QVec> = dir_set.into_iter().collect();
        let ray_id: BTreeMap<QVec, RayId> = ray_dirs
            .iter()
            .enumerate()
            .map(|(i, d)| (d.clone(), i))
            .collect();

        // seed cones, then close under faces
        let mut cone_map: BTreeMap<Vec<RayId>, Lattice> = BTreeMap::new();
        let mut queue: Vec<(Vec<RayId>, Lattice)> = Vec::new();
        for (dirs, lattice) in &canon_specs {
            let mut ids: Vec<RayId> = dirs.iter().map(|d| ray_id[d]).collect();
            ids.sort_unstable();
            ids.dedup();
            if lattice.ambient_dim() != ambient_dim {
                return Err(invalid!("lattice ambient dimension mismatch"));
            }
            match cone_map.get(&ids) {
                Some(existing) if existing != lattice => {
                    return Err(invalid!(
                        "cone {ids:?} listed twice with different lattices"
                    ));
                }
                Some(_) => {}
                None => {
                    cone_map.insert(ids.clone(), lattice.clone());
                    queue.push((ids, lattice.clone()));
                }
            }
        }
        while let Some((ids, lattice)) = queue.pop() {
            let dirs: Vec<QVec> = ids.iter().map(|&i| ray_dirs[i].clone()).collect();
            let geom = ConeGeom::new(ambient_dim, &dirs);
            for subset in geom.face_index_sets() {
                if subset.len() == ids.len() {
                    continue;
                }
                let face_ids: Vec<RayId> = subset.iter().map(|&i| ids[i]).collect();
                let face_dirs: Vec<QVec> =
                    face_ids.iter().map(|&i| ray_dirs[i].clone()).collect();
                let face_lattice = lattice.restrict_to_span(&face_dirs);
                match cone_map.get(&face_ids) {
                    Some(existing) if *existing != face_lattice => {
                        return Err(invalid!(
                            "face {face_ids:?} inherits inconsistent lattices"
                        ));
                    }
                    Some(_) => {}
                    None => {
                        cone_map.insert(face_ids.clone(), face_lattice.clone());
                        queue.push((face_ids, face_lattice));
                    }
                }
            }
        }

        // every ray must occur in some cone
        let mut used = alloc::vec![false; ray_dirs.len()];
        for ids in cone_map.keys() {
            for &i in ids {
                used[i] = true;
            }
        }
        if let Some(i) = used.iter().position(|&u| !u) {
            return Err(invalid!("ray {:?} not used by any cone", ray_dirs[i]));
        }

        // ray points from the 1-cone lattices
        let mut rays = Vec::with_capacity(ray_dirs.len());
        for (i, d) in ray_dirs.iter().enumerate() {
            let one_cone = cone_map
                .get(&alloc::vec![i])
                .ok_or_else(|| invalid!("missing one-dimensional cone for ray {d:?}"))?;
            let point = one_cone.primitive_on_ray(d)?;
            rays.push(Ray {
                direction: d.clone(),
                point,
            });
        }

        // canonical cone order: (dim, ray ids)
        let mut cones: Vec<Cone> = Vec::with_capacity(cone_map.len());
        let mut geoms: Vec<ConeGeom> = Vec::with_capacity(cone_map.len());
        let mut entries: Vec<(Vec<RayId>, Lattice)> = cone_map.into_iter().collect();
        entries.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
        for (ids, lattice) in entries {
            let dirs: Vec<QVec> = ids.iter().map(|&i| rays[i].direction.clone()).collect();
            let geom = ConeGeom::new(ambient_dim, &dirs);
            cones.push(Cone {
                rays: ids,
                dim: geom.dim,
                lattice,
            });
            geoms.push(geom);
        }
        let index = cones
            .iter()
            .enumerate()
            .map(|(i, c)| (c.rays.clone(), i))
            .collect();
        Ok(Complex {
            ambient_dim,
            rays,
            cones,
            geoms,
            index,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cone(&self, id: ConeId) -> &Cone {
        &self.cones[id]
    }

    pub fn geom(&self, id: ConeId) -> &ConeGeom {
        &self.geoms[id]
    }

    pub fn find_cone(&self, sorted_rays: &[RayId]) -> Option<ConeId> {
        self.index.get(sorted_rays).copied()
    }

    pub fn ray_id(&self, direction: &QVec) -> Option<RayId> {
        let c = direction.canonical_direction()?;
        self.rays.iter().position(|r| r.direction == c)
    }

    /// Primitive generators of a cone in its own lattice (one per ray).
    pub fn generators(&self, id: ConeId) -> Vec<QVec> {
        self.cones[id]
            .rays
            .iter()
            .map(|&r| self.rays[r].point.clone())
            .collect()
    }

    /// Ids of cones that are not proper faces of any other cone.
    pub fn maximal_cone_ids(&self) -> Vec<ConeId> {
        let mut out = Vec::new();
        'outer: for (i, c) in self.cones.iter().enumerate() {
            for other in &self.cones {
                if other.rays.len() > c.rays.len()
                    && c.rays.iter().all(|r| other.rays.binary_search(r).is_ok())
                {
                    continue 'outer;
                }
            }
            out.push(i);
        }
        out
    }

    /// Face ids of a cone (including itself), derived from ray subsets.
    pub fn face_ids(&self, id: ConeId) -> Vec<ConeId> {
        let ids = &self.cones[id].rays;
        self.geoms[id]
            .face_index_sets()
            .into_iter()
            .filter_map(|subset| {
                let face: Vec<RayId> = subset.iter().map(|&i| ids[i]).collect();
                self.find_cone(&face)
            })
            .collect()
    }

    /// `a` is a face of `b` (or equal).
    pub fn is_face_of(&self, a: ConeId, b: ConeId) -> bool {
        let (ra, rb) = (&self.cones[a].rays, &self.cones[b].rays);
        ra.iter().all(|r| rb.binary_search(r).is_ok())
    }

    /// The unique cone with `v` in its relative interior; `None` for zero or
    /// points outside the support.
    pub fn carrier_of(&self, v: &QVec) -> Option<ConeId> {
        if v.is_zero() {
            return None;
        }
        (0..self.cones.len()).find(|&i| self.geoms[i].contains_relint(v))
    }

    pub fn supports(&self, v: &QVec) -> bool {
        v.is_zero() || (0..self.cones.len()).any(|i| self.geoms[i].contains(v))
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones.iter().all(Cone::is_simplicial)
    }

    /// Sum of the primitive generators.
    pub fn barycenter(&self, id: ConeId) -> QVec {
        let mut acc = QVec::zero(self.ambient_dim);
        for &r in &self.cones[id].rays {
            acc = &acc + &self.rays[r].point;
        }
        acc
    }

    /// Lattice index of the group generated by the primitive generators.
    pub fn multiplicity(&self, id: ConeId) -> Result<BigInt> {
        let cone = &self.cones[id];
        if !cone.is_simplicial() {
            return Err(invalid!("multiplicity of a non-simplicial cone"));
        }
        let gens = self.generators(id);
        let sub = Lattice::from_generators(self.ambient_dim, &gens);
        match cone.lattice.index_of(&sub)? {
            LatticeIndex::Finite(n) => Ok(n),
            LatticeIndex::Infinite => Err(invalid!("generators do not span the cone lattice")),
        }
    }

    /// Maximum multiplicity over maximal cones; errors on non-simplicial ones.
    pub fn max_multiplicity(&self) -> Result<BigInt> {
        let mut max = BigInt::one();
        for id in self.maximal_cone_ids() {
            let m = self.multiplicity(id)?;
            if m > max {
                max = m;
            }
        }
        Ok(max)
    }

    pub fn is_nonsingular(&self) -> bool {
        if !self.is_simplicial() {
            return false;
        }
        self.maximal_cone_ids()
            .into_iter()
            .all(|id| self.multiplicity(id).map(|m| m.is_one()).unwrap_or(false))
    }

    /// One representative per class of `N_sigma` modulo the group generated
    /// by the primitive generators, each written in the half-open box
    /// `0 <= alpha_i < 1`. Includes the zero point, so the count equals the
    /// multiplicity.
    pub fn waterman_points(&self, id: ConeId) -> Result<Vec<WatermanPoint>> {
        let cone = &self.cones[id];
        if !cone.is_simplicial() {
            return Err(invalid!("Waterman points of a non-simplicial cone"));
        }
        let gens = self.generators(id);
        let k = gens.len();
        // integer coordinates of the generators in the cone lattice basis
        let mut m = IntMatrix::zero(k, k);
        for (i, g) in gens.iter().enumerate() {
            let coords = cone
                .lattice
                .span_coords(g)
                .ok_or_else(|| invalid!("generator outside its cone lattice span"))?;
            for (j, c) in coords.iter().enumerate() {
                if !c.denom().is_one() {
                    return Err(invalid!("generator not a lattice point"));
                }
                *m.at_mut(i, j) = c.numer().clone();
            }
        }
        let (s, _u, v) = smith_normal_form(&m);
        let v_inv = unimodular_inverse(&v);
        let diag: Vec<BigInt> = (0..k).map(|i| s.at(i, i).clone()).collect();
        if diag.iter().any(|d| d.is_zero()) {
            return Err(invalid!("degenerate generator matrix"));
        }
        let mut points = Vec::new();
        let mut t = alloc::vec![BigInt::zero(); k];
        loop {
            // class representative in lattice-basis coordinates: t * v^{-1}
            let mut x = alloc::vec![BigInt::zero(); k];
            for j in 0..k {
                for i in 0..k {
                    x[j] += &t[i] * v_inv.at(i, j);
                }
            }
            let mut p = QVec::zero(self.ambient_dim);
            for (xi, b) in x.iter().zip(cone.lattice.basis().iter()) {
                p = &p + &b.scale(&Rat::from_integer(xi.clone()));
            }
            // reduce into the half-open box of the generators
            let alpha = crate::linalg::express_in_rows(&gens, &p)
                .ok_or_else(|| invalid!("lattice point outside generator span"))?;
            let frac: Vec<Rat> = alpha
                .iter()
                .map(|a| a - Rat::from_integer(a.floor().to_integer()))
                .collect();
            let mut w = QVec::zero(self.ambient_dim);
            for (f, g) in frac.iter().zip(gens.iter()) {
                w = &w + &g.scale(f);
            }
            points.push(WatermanPoint {
                carrier: id,
                coefficients: frac,
                point: w,
            });
            // odometer over the diagonal bounds
            let mut i = 0;
            loop {
                if i == k {
                    points.sort_by(|a, b| a.point.cmp(&b.point));
                    let mult = self.multiplicity(id)?;
                    if BigInt::from(points.len()) != mult {
                        return Err(crate::internal!(
                            "Waterman count {} differs from multiplicity {}",
                            points.len(),
                            mult
                        ));
                    }
                    return Ok(points);
                }
                t[i] += 1;
                if t[i] < diag[i] {
                    break;
                }
                t[i] = BigInt::zero();
                i += 1;
            }
        }
    }

    /// The subcomplex consisting of the given cones (must be face closed).
    pub fn subcomplex(&self, cone_ids: &[ConeId]) -> Result<Complex> {
        let specs: Vec<ConeSpec> = cone_ids
            .iter()
            .map(|&id| ConeSpec {
                ray_dirs: self.cones[id]
                    .rays
                    .iter()
                    .map(|&r| self.rays[r].direction.clone())
                    .collect(),
                lattice: self.cones[id].lattice.clone(),
            })
            .collect();
        Complex::assemble(self.ambient_dim, &specs)
    }

    pub fn canonical_string(&self) -> String {
        use alloc::format;
        let mut s = format!("X|{}|", self.ambient_dim);
        for r in &self.rays {
            s.push_str("r");
            for c in &r.direction.0 {
                s.push_str(&rat_to_string(c));
                s.push(',');
            }
            s.push(':');
            for c in &r.point.0 {
                s.push_str(&rat_to_string(c));
                s.push(',');
            }
        }
        for c in &self.cones {
            s.push_str(&format!("k{:?}|", c.rays));
            s.push_str(&c.lattice.canonical_string());
        }
        s
    }

    pub fn digest(&self) -> String {
        hex64(fnv1a64(self.canonical_string().as_bytes()))
    }
}

/// Structural validation of the polyhedral-complex axioms. Returns the list
/// of violations; empty means valid.
pub fn validate_complex(c: &Complex) -> Vec<String> {
    use alloc::format;
    let mut issues = Vec::new();
    let n = c.cones.len();
    for (id, cone) in c.cones.iter().enumerate() {
        let geom = &c.geoms[id];
        if cone.rays.is_empty() {
            issues.push(format!("cone {id} has no rays"));
            continue;
        }
        if cone.lattice.rank() != cone.dim {
            issues.push(format!(
                "cone {:?}: lattice rank {} differs from dimension {}",
                cone.rays,
                cone.lattice.rank(),
                cone.dim
            ));
            continue;
        }
        if !geom.is_pointed() {
            issues.push(format!("cone {:?} contains a line", cone.rays));
            continue;
        }
        // listed rays must be exactly the extreme rays
        match geom.extreme_rays() {
            Ok(ext) => {
                let listed: BTreeSet<QVec> = cone
                    .rays
                    .iter()
                    .map(|&r| c.rays[r].direction.clone())
                    .collect();
                let ext_set: BTreeSet<QVec> = ext.into_iter().collect();
                if listed != ext_set {
                    issues.push(format!(
                        "cone {:?}: listed rays are not its extreme rays",
                        cone.rays
                    ));
                    continue;
                }
            }
            Err(e) => {
                issues.push(format!("cone {:?}: {e}", cone.rays));
                continue;
            }
        }
        // generators lie in the lattice and are primitive in it
        for &r in &cone.rays {
            let ray = &c.rays[r];
            if !cone.lattice.contains(&ray.point) {
                issues.push(format!(
                    "cone {:?}: generator {:?} not in its lattice",
                    cone.rays, ray.point
                ));
                continue;
            }
            match cone.lattice.primitive_on_ray(&ray.direction) {
                Ok(p) if p == ray.point => {}
                _ => issues.push(format!(
                    "cone {:?}: generator {:?} not primitive in the cone lattice",
                    cone.rays, ray.point
                )),
            }
        }
        // axiom (1): faces present with restricted lattices
        let ids = &cone.rays;
        for subset in geom.face_index_sets() {
            let face_ids: Vec<RayId> = subset.iter().map(|&i| ids[i]).collect();
            match c.find_cone(&face_ids) {
                None => issues.push(format!(
                    "face {face_ids:?} of cone {:?} missing from the complex",
                    cone.rays
                )),
                Some(fid) => {
                    let face_dirs: Vec<QVec> = face_ids
                        .iter()
                        .map(|&r| c.rays[r].direction.clone())
                        .collect();
                    let expect = cone.lattice.restrict_to_span(&face_dirs);
                    if c.cones[fid].lattice != expect {
                        issues.push(format!(
                            "face {face_ids:?} of cone {:?} has lattice differing from the restriction",
                            cone.rays
                        ));
                    }
                }
            }
        }
    }
    if !issues.is_empty() {
        return issues;
    }
    // axiom (2): pairwise intersections are common faces
    for a in 0..n {
        'pair: for b in a + 1..n {
            if c.is_face_of(a, b) || c.is_face_of(b, a) {
                continue;
            }
            let ga = &c.geoms[a];
            let gb = &c.geoms[b];
            let mut eqs = ga.span_eqs.clone();
            eqs.extend(gb.span_eqs.iter().cloned());
            let mut ineqs = ga.facets.clone();
            ineqs.extend(gb.facets.iter().cloned());
            let rays = match crate::geometry::extreme_rays(c.ambient_dim, &eqs, &ineqs) {
                Ok(r) => r,
                Err(e) => {
                    issues.push(alloc::format!(
                        "intersection of cones {:?} and {:?}: {e}",
                        c.cones[a].rays,
                        c.cones[b].rays
                    ));
                    continue;
                }
            };
            if rays.is_empty() {
                continue; // common face is the zero cone
            }
            let mut ray_ids = Vec::new();
            for d in &rays {
                match c.ray_id(d) {
                    Some(i) => ray_ids.push(i),
                    None => {
                        issues.push(alloc::format!(
                            "cones {:?} and {:?} intersect outside the ray set",
                            c.cones[a].rays,
                            c.cones[b].rays
                        ));
                        continue 'pair;
                    }
                }
            }
            ray_ids.sort_unstable();
            let ok = c.find_cone(&ray_ids).is_some()
                && ray_ids.iter().all(|r| c.cones[a].rays.binary_search(r).is_ok())
                && ray_ids.iter().all(|r| c.cones[b].rays.binary_search(r).is_ok());
            if !ok {
                issues.push(alloc::format!(
                    "intersection of cones {:?} and {:?} is not a common face",
                    c.cones[a].rays,
                    c.cones[b].rays
                ));
            }
        }
    }
    issues
}

/// Convenience: build a complex from maximal cones over the restricted
/// standard integer lattice of the ambient space.
pub fn complex_from_integer_cones(ambient_dim: usize, max_cones: &[Vec<QVec>]) -> Result<Complex> {
    let std = Lattice::standard(ambient_dim);
    let specs: Vec<ConeSpec> = max_cones
        .iter()
        .map(|gens| ConeSpec {
            ray_dirs: gens.clone(),
            lattice: std.restrict_to_span(gens),
        })
        .collect();
    Complex::assemble(ambient_dim, &specs)
}
