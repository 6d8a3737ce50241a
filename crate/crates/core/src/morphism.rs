//! Morphisms of polyhedral complexes: one ambient linear map restricting
//! compatibly to every cone, with the kernel meeting every cone trivially.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::complex::{validate_complex, Complex, ConeId};
use crate::digest::{fnv1a64, hex64};
use crate::error::Result;
use crate::geometry::{cut_by_hyperplane, extreme_rays, ConeGeom};
use crate::invalid;
use crate::lattice::Lattice;
use crate::linalg::{rat_rank, IntMatrix};
use crate::rat::QVec;

#[derive(Clone, Debug)]
pub struct Morphism {
    pub source: Complex,
    pub target: Complex,
    /// Ambient linear map, target_dim x source_dim, acting on column vectors.
    pub matrix: IntMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Semistability {
    Semistable,
    WeaklySemistable,
    Neither,
}

#[derive(Clone, Debug)]
pub struct SemistabilityReport {
    pub status: Semistability,
    pub reasons: Vec<String>,
}

impl Morphism {
    pub fn new(source: Complex, target: Complex, matrix: IntMatrix) -> Result<Morphism> {
        if matrix.cols() != source.ambient_dim() || matrix.rows() != target.ambient_dim() {
            return Err(invalid!(
                "matrix is {}x{} but source ambient is {} and target ambient is {}",
                matrix.rows(),
                matrix.cols(),
                source.ambient_dim(),
                target.ambient_dim()
            ));
        }
        Ok(Morphism {
            source,
            target,
            matrix,
        })
    }

    pub fn apply(&self, v: &QVec) -> QVec {
        self.matrix.apply(v)
    }

    /// Images of the primitive generators of a source cone.
    pub fn image_generators(&self, id: ConeId) -> Vec<QVec> {
        self.source
            .generators(id)
            .iter()
            .map(|g| self.apply(g))
            .collect()
    }

    /// The minimal target cone containing the image of a source cone.
    pub fn target_carrier(&self, id: ConeId) -> Result<ConeId> {
        let imgs = self.image_generators(id);
        let mut relint = QVec::zero(self.target.ambient_dim());
        for v in &imgs {
            relint = &relint + v;
        }
        if relint.is_zero() {
            return Err(invalid!(
                "cone {:?} maps to zero (kernel condition violated)",
                self.source.cone(id).rays
            ));
        }
        let carrier = self
            .target
            .carrier_of(&relint)
            .ok_or_else(|| invalid!("image of cone {:?} leaves the target support", self.source.cone(id).rays))?;
        let geom = self.target.geom(carrier);
        if imgs.iter().all(|v| geom.contains(v)) {
            Ok(carrier)
        } else {
            Err(invalid!(
                "image of cone {:?} is not contained in a single target cone",
                self.source.cone(id).rays
            ))
        }
    }

    /// The image cone of a source cone as a target cone id, when the image
    /// is itself a cone of the target (simplicial-map condition).
    pub fn image_cone(&self, id: ConeId) -> Option<ConeId> {
        let imgs = self.image_generators(id);
        let geom = ConeGeom::new(self.target.ambient_dim(), &imgs);
        let ext = geom.extreme_rays().ok()?;
        let mut ids = Vec::with_capacity(ext.len());
        for d in &ext {
            ids.push(self.target.ray_id(d)?);
        }
        ids.sort_unstable();
        self.target.find_cone(&ids)
    }

    /// Dimension of the image of a source cone.
    pub fn image_dim(&self, id: ConeId) -> usize {
        rat_rank(&self.image_generators(id))
    }

    /// Every source cone maps onto a cone of the target.
    pub fn is_simplicial_map(&self) -> bool {
        (0..self.source.cones().len()).all(|id| self.image_cone(id).is_some())
    }

    /// max over cones of dim(cone) - dim(image).
    pub fn relative_dimension(&self) -> usize {
        self.source
            .maximal_cone_ids()
            .into_iter()
            .map(|id| self.source.cone(id).dim - self.image_dim(id))
            .max()
            .unwrap_or(0)
    }

    pub fn digest(&self) -> String {
        use alloc::format;
        let mut s = String::new();
        s.push_str(&self.source.canonical_string());
        s.push('~');
        for r in 0..self.matrix.rows() {
            s.push_str(&format!("{:?}", self.matrix.row(r)));
        }
        s.push('~');
        s.push_str(&self.target.canonical_string());
        hex64(fnv1a64(s.as_bytes()))
    }
}

/// Validates the compatible-collection and kernel conditions. The source and
/// target must individually validate first; their issues are reported too.
pub fn validate_morphism(f: &Morphism) -> Vec<String> {
    use alloc::format;
    let mut issues = validate_complex(&f.source);
    issues.extend(validate_complex(&f.target));
    if !issues.is_empty() {
        return issues;
    }
    for id in 0..f.source.cones().len() {
        let cone = f.source.cone(id);
        // kernel condition: the map kills no nonzero point of the cone
        let geom = f.source.geom(id);
        let mut eqs = geom.span_eqs.clone();
        for r in 0..f.matrix.rows() {
            eqs.push(f.matrix.row_qvec(r));
        }
        match extreme_rays(f.source.ambient_dim(), &eqs, &geom.facets) {
            Ok(rays) if rays.is_empty() => {}
            Ok(_) => {
                issues.push(format!(
                    "kernel of the map meets cone {:?} nontrivially",
                    cone.rays
                ));
                continue;
            }
            Err(e) => {
                issues.push(format!("cone {:?}: {e}", cone.rays));
                continue;
            }
        }
        // image lands in a single target cone, lattices map into lattices
        match f.target_carrier(id) {
            Err(e) => issues.push(format!("{e}")),
            Ok(tau) => {
                let t_lat = &f.target.cone(tau).lattice;
                for b in cone.lattice.basis() {
                    if !t_lat.contains(&f.apply(b)) {
                        issues.push(format!(
                            "lattice of cone {:?} does not map into the lattice of its target cone",
                            cone.rays
                        ));
                        break;
                    }
                }
            }
        }
    }
    issues
}

/// Exact support-covering check: the image of the source fills the target.
pub fn is_surjective(f: &Morphism) -> Result<bool> {
    // images of maximal source cones, grouped per maximal target cone
    let mut images: Vec<(ConeId, ConeGeom)> = Vec::new();
    for id in f.source.maximal_cone_ids() {
        let imgs = f.image_generators(id);
        let geom = ConeGeom::new(f.target.ambient_dim(), &imgs);
        let tau = f.target_carrier(id)?;
        images.push((tau, geom));
    }
    for tau in f.target.maximal_cone_ids() {
        let tau_geom = f.target.geom(tau);
        let dim = f.target.cone(tau).dim;
        // full-dimensional images inside tau (or inside cones having tau as
        // a face would only touch the boundary)
        let covering: Vec<&ConeGeom> = images
            .iter()
            .filter(|(t, g)| *t == tau && g.dim == dim)
            .map(|(_, g)| g)
            .collect();
        if covering.iter().any(|g| {
            tau_geom
                .gens
                .iter()
                .all(|v| g.contains(v))
        }) {
            continue; // some image contains the whole cone
        }
        // cut tau by all facet hyperplanes of the images and test each piece
        let mut hyperplanes: BTreeSet<QVec> = BTreeSet::new();
        for g in &covering {
            for n in &g.facets {
                hyperplanes.insert(n.clone());
            }
        }
        let mut pieces: Vec<ConeGeom> = alloc::vec![tau_geom.clone()];
        for h in &hyperplanes {
            let mut next = Vec::new();
            for piece in &pieces {
                let (pos, neg) = cut_by_hyperplane(piece, h)?;
                match (pos, neg) {
                    (Some(p), Some(n)) => {
                        next.push(ConeGeom::new(f.target.ambient_dim(), &p));
                        next.push(ConeGeom::new(f.target.ambient_dim(), &n));
                    }
                    _ => next.push(piece.clone()),
                }
            }
            pieces = next;
        }
        for piece in &pieces {
            let sample = piece.relint_point();
            if !covering.iter().any(|g| g.contains(&sample)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The combinatorial semistability check. Expects a morphism that validates;
/// surjectivity and the global kernel condition are verified and reported.
pub fn check_semistable(f: &Morphism) -> Result<SemistabilityReport> {
    use alloc::format;
    let issues = validate_morphism(f);
    if !issues.is_empty() {
        return Err(invalid!("morphism does not validate: {}", issues.join("; ")));
    }
    let mut reasons = Vec::new();
    if !is_surjective(f)? {
        reasons.push(String::from("the morphism is not surjective"));
    }
    // simplicial images with surjective lattice maps
    for id in 0..f.source.cones().len() {
        let cone = f.source.cone(id);
        match f.image_cone(id) {
            None => reasons.push(format!(
                "image of cone {:?} is not a cone of the target",
                cone.rays
            )),
            Some(tau) => {
                let image_lattice = cone.lattice.image(&f.matrix);
                if image_lattice != f.target.cone(tau).lattice {
                    reasons.push(format!(
                        "lattice of cone {:?} does not map onto the lattice of its image cone",
                        cone.rays
                    ));
                }
            }
        }
    }
    if !f.target.is_nonsingular() {
        reasons.push(String::from("the target complex is singular"));
    }
    let weakly = reasons.is_empty();
    let mut source_singular = false;
    if !f.source.is_nonsingular() {
        source_singular = true;
        reasons.push(String::from("the source complex is singular"));
    }
    let status = if weakly && !source_singular {
        Semistability::Semistable
    } else if weakly {
        Semistability::WeaklySemistable
    } else {
        Semistability::Neither
    };
    Ok(SemistabilityReport { status, reasons })
}

/// Checks that both complexes are simplicial, the map is simplicial, and
/// every source ray maps onto a target ray (primitive points not required
/// to match). This is the shape the pipeline's fiber machinery expects.
pub fn is_prepared(f: &Morphism) -> bool {
    f.source.is_simplicial()
        && f.target.is_simplicial()
        && f.target.is_nonsingular()
        && f.is_simplicial_map()
        && source_ray_targets(f).is_ok()
}

/// For each source ray, the id of the target ray its image lies on.
pub fn source_ray_targets(f: &Morphism) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(f.source.rays().len());
    for ray in f.source.rays() {
        let img = f.apply(&ray.point);
        let dir = img
            .canonical_direction()
            .ok_or_else(|| invalid!("source ray {:?} maps to zero", ray.direction))?;
        let rid = f
            .target
            .ray_id(&dir)
            .ok_or_else(|| invalid!("source ray {:?} does not map into a target ray", ray.direction))?;
        out.push(rid);
    }
    Ok(out)
}

/// Every source ray's primitive point maps exactly onto the primitive point
/// of a target ray (weak semistability implies this on rays).
pub fn rays_map_primitively(f: &Morphism) -> bool {
    match source_ray_targets(f) {
        Err(_) => false,
        Ok(assign) => assign.iter().enumerate().all(|(s, &t)| {
            f.apply(&f.source.rays()[s].point) == f.target.rays()[t].point
        }),
    }
}

/// Verifies the morphism and the preconditions shared by the pipeline
/// entry points: surjectivity and the kernel condition.
pub fn validate_pipeline_input(f: &Morphism) -> Result<()> {
    let issues = validate_morphism(f);
    if !issues.is_empty() {
        return Err(invalid!("{}", issues.join("; ")));
    }
    if !is_surjective(f)? {
        return Err(invalid!("the morphism is not surjective"));
    }
    Ok(())
}

/// Lattice of a target cone after restricting to the span of a sub-cone of
/// the image (used when comparing image lattices on faces).
pub fn restricted_target_lattice(f: &Morphism, target_cone: ConeId, span: &[QVec]) -> Lattice {
    f.target.cone(target_cone).lattice.restrict_to_span(span)
}
