//! Projectivity certificates: homogeneous piecewise-linear functions whose
//! maximal linear pieces are exactly the maximal cones of a subdivision.
//!
//! A certificate stores rational values on the rays of the subdivision and
//! is extended linearly on each cone. Verification checks the subdivision
//! relation itself, per-cone linearity, and a strict break of linearity
//! across every wall interior to a base cone.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::complex::{Complex, ConeId, RayId};
use crate::error::Result;
use crate::invalid;
use crate::rat::{QVec, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodFunction {
    /// Digest of the complex being subdivided.
    pub base_digest: String,
    /// Values on the rays of the subdivision, keyed by ray id.
    pub values: BTreeMap<RayId, Rat>,
}

impl GoodFunction {
    /// The zero function: certificate of the trivial subdivision.
    pub fn zero(base: &Complex) -> GoodFunction {
        GoodFunction {
            base_digest: base.digest(),
            values: (0..base.rays().len()).map(|r| (r, Rat::zero())).collect(),
        }
    }

    /// An ambient covector representing the linear extension on a cone, if
    /// the ray values are consistent with a single linear function there.
    pub fn linear_functional_on(&self, sub: &Complex, cone: ConeId) -> Option<QVec> {
        let gens: Vec<QVec> = sub
            .cone(cone)
            .rays
            .iter()
            .map(|&r| sub.rays()[r].point.clone())
            .collect();
        let vals: Vec<Rat> = sub
            .cone(cone)
            .rays
            .iter()
            .map(|&r| self.values.get(&r).cloned())
            .collect::<Option<Vec<_>>>()?;
        let basis = &crate::linalg::rref(&gens).0;
        // solve sum_j y_j (b_j . g_i) = v_i
        let rows: Vec<QVec> = basis
            .iter()
            .map(|b| QVec(gens.iter().map(|g| b.dot(g)).collect()))
            .collect();
        let y = crate::linalg::express_in_rows(&rows, &QVec(vals))?;
        let mut ell = QVec::zero(sub.ambient_dim());
        for (c, b) in y.iter().zip(basis.iter()) {
            ell = &ell + &b.scale(c);
        }
        Some(ell)
    }

    /// Piecewise-linear evaluation at a point of the support.
    pub fn value_at(&self, sub: &Complex, v: &QVec) -> Result<Rat> {
        if v.is_zero() {
            return Ok(Rat::zero());
        }
        let carrier = sub
            .carrier_of(v)
            .ok_or_else(|| invalid!("point {v:?} outside the support"))?;
        let ell = self
            .linear_functional_on(sub, carrier)
            .ok_or_else(|| invalid!("certificate not linear on carrier cone"))?;
        Ok(ell.dot(v))
    }
}

/// The carrier assignment and interior-wall structure of a subdivision.
#[derive(Clone, Debug)]
pub struct SubdivisionStructure {
    /// Maximal sub-cone -> minimal base cone containing it.
    pub carriers: BTreeMap<ConeId, ConeId>,
    /// Interior walls: two adjacent maximal sub-cones and the base cone
    /// whose interior contains their shared facet.
    pub walls: Vec<(ConeId, ConeId, ConeId)>,
}

/// Checks that `sub` subdivides `base` (same support, cone-wise refinement)
/// and extracts the wall structure used by certificate verification.
pub fn subdivision_structure(sub: &Complex, base: &Complex) -> Result<SubdivisionStructure> {
    if sub.ambient_dim() != base.ambient_dim() {
        return Err(invalid!("ambient dimension mismatch"));
    }
    let sub_max = sub.maximal_cone_ids();
    let mut carriers = BTreeMap::new();
    for &nu in &sub_max {
        let sample = sub.geom(nu).relint_point();
        let beta = base
            .carrier_of(&sample)
            .ok_or_else(|| invalid!("sub-cone {:?} leaves the base support", sub.cone(nu).rays))?;
        let bgeom = base.geom(beta);
        let contained = sub
            .cone(nu)
            .rays
            .iter()
            .all(|&r| bgeom.contains(&sub.rays()[r].direction));
        if !contained {
            return Err(invalid!(
                "sub-cone {:?} crosses walls of the base",
                sub.cone(nu).rays
            ));
        }
        if sub.cone(nu).dim != base.cone(beta).dim {
            return Err(invalid!(
                "maximal sub-cone {:?} does not fill its base cone",
                sub.cone(nu).rays
            ));
        }
        carriers.insert(nu, beta);
    }
    // every maximal base cone must be covered, with matched interior walls
    let mut walls = Vec::new();
    for beta in base.maximal_cone_ids() {
        let members: Vec<ConeId> = sub_max
            .iter()
            .copied()
            .filter(|nu| carriers.get(nu) == Some(&beta))
            .collect();
        if members.is_empty() {
            return Err(invalid!(
                "base cone {:?} is not covered by the subdivision",
                base.cone(beta).rays
            ));
        }
        let beta_geom = base.geom(beta);
        let mut seen_facets: BTreeMap<Vec<RayId>, Vec<ConeId>> = BTreeMap::new();
        for &nu in &members {
            for fid in sub.face_ids(nu) {
                if sub.cone(fid).dim + 1 != sub.cone(nu).dim {
                    continue;
                }
                seen_facets
                    .entry(sub.cone(fid).rays.clone())
                    .or_default()
                    .push(nu);
            }
        }
        for (facet_rays, mut owners) in seen_facets {
            owners.sort_unstable();
            owners.dedup();
            // a facet on the boundary of the base cone needs no partner
            let on_boundary = beta_geom.facets.iter().any(|n| {
                facet_rays
                    .iter()
                    .all(|&r| sub.rays()[r].direction.dot(n).is_zero())
            });
            if on_boundary {
                continue;
            }
            match owners.len() {
                2 => walls.push((owners[0], owners[1], beta)),
                _ => {
                    return Err(invalid!(
                        "interior facet {facet_rays:?} of base cone {:?} shared by {} maximal sub-cones",
                        base.cone(beta).rays,
                        owners.len()
                    ));
                }
            }
        }
    }
    Ok(SubdivisionStructure { carriers, walls })
}

#[derive(Clone, Debug)]
pub struct ProjectivityReport {
    pub ok: bool,
    pub issues: Vec<String>,
}

/// Verifies that `cert` certifies `sub` as a projective subdivision of
/// `base`: linear on each maximal cone of `sub`, and strictly breaking
/// linearity across every wall interior to a base cone.
pub fn verify_projectivity(
    sub: &Complex,
    base: &Complex,
    cert: &GoodFunction,
) -> Result<ProjectivityReport> {
    use alloc::format;
    let structure = subdivision_structure(sub, base)?;
    let mut issues = Vec::new();
    if cert.base_digest != base.digest() {
        issues.push(String::from("certificate names a different base complex"));
    }
    for r in 0..sub.rays().len() {
        if !cert.values.contains_key(&r) {
            issues.push(format!("no value for ray {r}"));
        }
    }
    if !issues.is_empty() {
        return Ok(ProjectivityReport { ok: false, issues });
    }
    let mut functionals: BTreeMap<ConeId, QVec> = BTreeMap::new();
    for &nu in structure.carriers.keys() {
        match cert.linear_functional_on(sub, nu) {
            Some(ell) => {
                functionals.insert(nu, ell);
            }
            None => issues.push(format!(
                "certificate is not linear on cone {:?}",
                sub.cone(nu).rays
            )),
        }
    }
    if !issues.is_empty() {
        return Ok(ProjectivityReport { ok: false, issues });
    }
    for (a, b, beta) in &structure.walls {
        let ea = &functionals[a];
        let eb = &functionals[b];
        let breaks = sub.cone(*b).rays.iter().any(|&r| {
            let p = &sub.rays()[r].point;
            ea.dot(p) != eb.dot(p)
        }) || sub.cone(*a).rays.iter().any(|&r| {
            let p = &sub.rays()[r].point;
            ea.dot(p) != eb.dot(p)
        });
        if !breaks {
            issues.push(format!(
                "certificate stays linear across the wall between {:?} and {:?} inside base cone {:?}",
                sub.cone(*a).rays,
                sub.cone(*b).rays,
                base.cone(*beta).rays
            ));
        }
    }
    Ok(ProjectivityReport {
        ok: issues.is_empty(),
        issues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::complex_from_integer_cones;
    use crate::rat::rat_from_int;
    use alloc::vec;

    fn quadrant() -> Complex {
        complex_from_integer_cones(
            2,
            &[vec![QVec::from_ints(&[1, 0]), QVec::from_ints(&[0, 1])]],
        )
        .unwrap()
    }

    fn split_quadrant() -> Complex {
        complex_from_integer_cones(
            2,
            &[
                vec![QVec::from_ints(&[1, 0]), QVec::from_ints(&[1, 1])],
                vec![QVec::from_ints(&[1, 1]), QVec::from_ints(&[0, 1])],
            ],
        )
        .unwrap()
    }

    #[test]
    fn trivial_subdivision_with_zero_certificate() {
        let c = quadrant();
        let cert = GoodFunction::zero(&c);
        let rep = verify_projectivity(&c, &c, &cert).unwrap();
        assert!(rep.ok, "{:?}", rep.issues);
    }

    #[test]
    fn zero_function_fails_on_proper_subdivision() {
        let base = quadrant();
        let sub = split_quadrant();
        let mut cert = GoodFunction::zero(&base);
        cert.values = (0..sub.rays().len()).map(|r| (r, Rat::zero())).collect();
        let rep = verify_projectivity(&sub, &base, &cert).unwrap();
        assert!(!rep.ok);
        assert!(rep.issues.iter().any(|i| i.contains("linear across")));
    }

    #[test]
    fn dipped_value_certifies_the_split() {
        let base = quadrant();
        let sub = split_quadrant();
        let mid = sub.ray_id(&QVec::from_ints(&[1, 1])).unwrap();
        let mut values: BTreeMap<usize, Rat> =
            (0..sub.rays().len()).map(|r| (r, Rat::zero())).collect();
        values.insert(mid, rat_from_int(-1));
        let cert = GoodFunction {
            base_digest: base.digest(),
            values,
        };
        let rep = verify_projectivity(&sub, &base, &cert).unwrap();
        assert!(rep.ok, "{:?}", rep.issues);
    }

    #[test]
    fn support_mismatch_is_an_error() {
        let base = quadrant();
        let half = complex_from_integer_cones(
            2,
            &[vec![QVec::from_ints(&[1, 0]), QVec::from_ints(&[1, 1])]],
        )
        .unwrap();
        assert!(subdivision_structure(&half, &base).is_err());
        // and the other way: sub escaping the base support
        let bigger = complex_from_integer_cones(
            2,
            &[
                vec![QVec::from_ints(&[1, 0]), QVec::from_ints(&[0, 1])],
                vec![QVec::from_ints(&[0, 1]), QVec::from_ints(&[-1, 0])],
            ],
        )
        .unwrap();
        assert!(subdivision_structure(&bigger, &base).is_err());
    }

    #[test]
    fn evaluation_is_piecewise_linear() {
        let base = quadrant();
        let sub = split_quadrant();
        let mid = sub.ray_id(&QVec::from_ints(&[1, 1])).unwrap();
        let mut values: BTreeMap<usize, Rat> =
            (0..sub.rays().len()).map(|r| (r, Rat::zero())).collect();
        values.insert(mid, rat_from_int(-2));
        let cert = GoodFunction {
            base_digest: base.digest(),
            values,
        };
        assert_eq!(
            cert.value_at(&sub, &QVec::from_ints(&[1, 1])).unwrap(),
            rat_from_int(-2)
        );
        assert_eq!(
            cert.value_at(&sub, &QVec::from_ints(&[2, 1])).unwrap(),
            rat_from_int(-2)
        );
        assert_eq!(
            cert.value_at(&sub, &QVec::from_ints(&[1, 0])).unwrap(),
            Rat::zero()
        );
    }
}
