//! Semistabilization over a single base ray: the base case of the pipeline.
//!
//! The fiber over a base ray is subdivided by a regular triangulation of its
//! cross-section at the dilated primitive level, using all lattice points of
//! the cross-section as vertices. Heights are squared norms with a
//! deterministic staircase perturbation, shrunk until the triangulation is
//! simplicial and uses every point; the dilation `m` grows until every cell
//! is unimodular in the altered lattice.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::complex::{Complex, ConeId, RayId};
use crate::error::{Error, Result};
use crate::goodfn::GoodFunction;
use crate::lattice::{preimage_lattice, Lattice, LatticeIndex};
use crate::morphism::Morphism;
use crate::rat::{rat_from_int, QVec, Rat};
use crate::subdivide::regular_subdivide;
use crate::{internal, invalid};

/// The subcomplex of the source mapping into a single base ray.
#[derive(Clone, Debug)]
pub struct FiberSubcomplex {
    /// Target ray id this fiber sits over.
    pub ray: RayId,
    /// The fiber as a complex in the source ambient space.
    pub complex: Complex,
    /// Ids of the fiber cones in the parent source complex.
    pub cone_ids: Vec<ConeId>,
}

/// A certified subdivision of one fiber together with its dilation.
#[derive(Clone, Debug)]
pub struct FiberSubdivision {
    pub ray: RayId,
    pub subdivision: Complex,
    pub cert: GoodFunction,
    pub m: u64,
    /// Cross-section points and heights, for replayable traces. Empty when
    /// the fiber was already semistable.
    pub points: Vec<QVec>,
    pub heights: Vec<Rat>,
}

/// All source cones whose image lies on the ray through the given target
/// ray, closed under faces.
pub fn fiber_subcomplex(f: &Morphism, target_ray: RayId) -> Result<FiberSubcomplex> {
    if !f.is_simplicial_map() {
        return Err(invalid!("fiber extraction requires a simplicial morphism"));
    }
    let assignment = crate::morphism::source_ray_targets(f)?;
    let mut ids = Vec::new();
    for (id, cone) in f.source.cones().iter().enumerate() {
        if cone.rays.iter().all(|&r| assignment[r] == target_ray) {
            ids.push(id);
        }
    }
    if ids.is_empty() {
        return Err(invalid!("no source cone maps into target ray {target_ray}"));
    }
    let complex = f.source.subcomplex(&ids)?;
    Ok(FiberSubcomplex {
        ray: target_ray,
        complex,
        cone_ids: ids,
    })
}

/// Whether the restriction of `f` over the given target ray is semistable:
/// every fiber cone is unimodular and its lattice maps onto the ray lattice.
pub fn restrict_semistable_check(f: &Morphism, target_ray: RayId) -> Result<bool> {
    let fiber = fiber_subcomplex(f, target_ray)?;
    let ray_cone = f
        .target
        .find_cone(&[target_ray])
        .ok_or_else(|| invalid!("target ray {target_ray} has no cone entry"))?;
    let ray_lattice = &f.target.cone(ray_cone).lattice;
    for &id in &fiber.cone_ids {
        let cone = f.source.cone(id);
        if !cone.is_simplicial() {
            return Ok(false);
        }
        match f.source.multiplicity(id) {
            Ok(m) if m == BigInt::one() => {}
            _ => return Ok(false),
        }
        if cone.lattice.image(&f.matrix) != *ray_lattice {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Lattice points of the cross-section `{ x in sigma : f(x) = level }` of a
/// simplicial source cone, enumerated exactly.
fn cross_section_points(
    f: &Morphism,
    cone_id: ConeId,
    level: &QVec,
) -> Result<Vec<QVec>> {
    let cone = f.source.cone(cone_id);
    let gens = f.source.generators(cone_id);
    let basis = cone.lattice.basis();
    let d = basis.len();
    // vertices of the section in lattice coordinates give the search box
    let mut lo = alloc::vec![Rat::zero(); d];
    let mut hi = alloc::vec![Rat::zero(); d];
    let mut first = true;
    for g in &gens {
        let img = f.apply(g);
        // f(g) = c * level for a positive rational c
        let c = crate::subdivide::collinear_scale(&img, level)
            .ok_or_else(|| invalid!("generator image not on the base ray"))?;
        let vertex = g.scale(&(Rat::one() / c));
        let coords = cone
            .lattice
            .span_coords(&vertex)
            .ok_or_else(|| internal!("vertex outside cone lattice span"))?;
        for (j, x) in coords.iter().enumerate() {
            if first || *x < lo[j] {
                lo[j] = x.clone();
            }
            if first || *x > hi[j] {
                hi[j] = x.clone();
            }
        }
        first = false;
    }
    let lo: Vec<BigInt> = lo.iter().map(|r| r.ceil().to_integer()).collect();
    let hi: Vec<BigInt> = hi.iter().map(|r| r.floor().to_integer()).collect();
    if lo.iter().zip(hi.iter()).any(|(l, h)| l > h) {
        return Ok(Vec::new());
    }
    let geom = f.source.geom(cone_id);
    let mut out = Vec::new();
    let mut z = lo.clone();
    loop {
        let mut p = QVec::zero(f.source.ambient_dim());
        for (zi, b) in z.iter().zip(basis.iter()) {
            p = &p + &b.scale(&Rat::from_integer(zi.clone()));
        }
        if f.apply(&p) == *level && geom.contains(&p) {
            out.push(p);
        }
        let mut i = 0;
        loop {
            if i == d {
                return Ok(out);
            }
            z[i] += 1;
            if z[i] <= hi[i] {
                break;
            }
            z[i] = lo[i].clone();
            i += 1;
        }
    }
}

/// Semistable reduction of the fiber over one base ray: searches dilations
/// `m = 1..max_dilation` for a regular cross-section triangulation that is
/// unimodular in the `m`-altered lattice.
pub fn semistabilize_over_ray(
    f: &Morphism,
    target_ray: RayId,
    max_dilation: u64,
) -> Result<FiberSubdivision> {
    let fiber = fiber_subcomplex(f, target_ray)?;
    let rel = fiber
        .cone_ids
        .iter()
        .map(|&id| f.source.cone(id).dim - 1)
        .max()
        .unwrap_or(0);
    if rel > 3 {
        return Err(Error::RelativeDimension(rel));
    }
    if restrict_semistable_check(f, target_ray)? {
        return Ok(FiberSubdivision {
            ray: target_ray,
            subdivision: fiber.complex.clone(),
            cert: GoodFunction::zero(&fiber.complex),
            m: 1,
            points: Vec::new(),
            heights: Vec::new(),
        });
    }
    let u_prim = f.target.rays()[target_ray].point.clone();
    'dilation: for m in 1..=max_dilation {
        let level = u_prim.scale(&rat_from_int(m as i64));
        // collect cross-section lattice points over the maximal fiber cones
        let mut points: BTreeSet<QVec> = BTreeSet::new();
        let max_ids: Vec<ConeId> = fiber
            .cone_ids
            .iter()
            .copied()
            .filter(|&id| {
                let rays = &f.source.cone(id).rays;
                !fiber.cone_ids.iter().any(|&other| {
                    f.source.cone(other).rays.len() > rays.len()
                        && rays
                            .iter()
                            .all(|r| f.source.cone(other).rays.binary_search(r).is_ok())
                })
            })
            .collect();
        for &id in &max_ids {
            let pts = cross_section_points(f, id, &level)?;
            // the section must span the cone, or this dilation cannot work
            if crate::linalg::rat_rank(&pts) != f.source.cone(id).dim {
                continue 'dilation;
            }
            points.extend(pts);
        }
        let points: Vec<QVec> = points.into_iter().collect();
        match triangulate_section(&fiber.complex, &points) {
            Ok(Some((sub, cert, heights))) => {
                if all_cells_unimodular(f, &fiber, &sub, m)? {
                    let out = FiberSubdivision {
                        ray: target_ray,
                        subdivision: sub,
                        cert,
                        m,
                        points,
                        heights,
                    };
                    debug_assert!(fiber_output_semistable(f, &fiber, &out)?);
                    return Ok(out);
                }
            }
            Ok(None) => {}
            Err(e) => return Err(e),
        }
    }
    Err(Error::BoundExhausted(alloc::format!(
        "no dilation up to {max_dilation} semistabilizes the fiber over target ray {target_ray}"
    )))
}

/// Deterministic heights: squared norm minus a staircase perturbation, with
/// ray-point multiples ordered before the remaining points. The perturbation
/// shrinks until the subdivision is simplicial and uses every point.
fn triangulate_section(
    fiber: &Complex,
    points: &[QVec],
) -> Result<Option<(Complex, GoodFunction, Vec<Rat>)>> {
    if points.is_empty() {
        return Ok(None);
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    let on_ray = |p: &QVec| -> bool {
        let dir = p.canonical_direction().unwrap();
        fiber.rays().iter().any(|r| r.direction == dir)
    };
    order.sort_by_key(|&i| (!on_ray(&points[i]), points[i].clone()));
    let mut shift = 1u32;
    for _ in 0..20 {
        let mut denom = BigInt::one();
        for _ in 0..shift {
            denom *= 2;
        }
        let delta = Rat::new(BigInt::one(), denom);
        let mut heights = alloc::vec![Rat::zero(); points.len()];
        let mut bump = delta.clone();
        for &i in &order {
            heights[i] = points[i].dot(&points[i]) - bump.clone();
            bump = &bump * &delta;
        }
        let (sub, cert) = regular_subdivide(fiber, points, &heights)?;
        if sub.is_simplicial() && sub.rays().len() == points.len() {
            return Ok(Some((sub, cert, heights)));
        }
        shift *= 2;
    }
    Err(internal!("section heights never became generic"))
}

/// Every maximal cell of the fiber subdivision is unimodular with respect to
/// the `m`-altered lattice of its carrier cone.
fn all_cells_unimodular(
    f: &Morphism,
    fiber: &FiberSubcomplex,
    sub: &Complex,
    m: u64,
) -> Result<bool> {
    let u_prim = f.target.rays()[fiber.ray].point.clone();
    let altered_ray = Lattice::from_generators(
        f.target.ambient_dim(),
        &[u_prim.scale(&rat_from_int(m as i64))],
    );
    for id in sub.maximal_cone_ids() {
        let sample = sub.geom(id).relint_point();
        let carrier = fiber
            .complex
            .carrier_of(&sample)
            .ok_or_else(|| internal!("fiber cell escaped the fiber"))?;
        let altered = preimage_lattice(
            &f.matrix,
            &altered_ray,
            &fiber.complex.cone(carrier).lattice,
        )?;
        let gens: Vec<QVec> = sub
            .cone(id)
            .rays
            .iter()
            .map(|&r| {
                altered
                    .primitive_on_ray(&sub.rays()[r].direction)
                    .expect("cell ray in altered lattice span")
            })
            .collect();
        let span_lattice = altered.restrict_to_span(&gens);
        let cell = Lattice::from_generators(sub.ambient_dim(), &gens);
        match span_lattice.index_of(&cell)? {
            LatticeIndex::Finite(ix) if ix == BigInt::one() => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Cross-check used in debug builds: after applying the dilation, the
/// restricted morphism over the ray is semistable on the subdivided fiber.
fn fiber_output_semistable(
    f: &Morphism,
    fiber: &FiberSubcomplex,
    out: &FiberSubdivision,
) -> Result<bool> {
    let u_prim = f.target.rays()[fiber.ray].point.clone();
    let level = u_prim.scale(&rat_from_int(out.m as i64));
    for id in out.subdivision.maximal_cone_ids() {
        for &r in &out.subdivision.cone(id).rays {
            let img = f.apply(&out.subdivision.rays()[r].point);
            // in the altered lattice every new primitive point maps to zero
            // or to the new primitive point of the ray
            let dir = img.canonical_direction();
            if dir != level.canonical_direction() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::complex_from_integer_cones;
    use crate::goodfn::verify_projectivity;
    use crate::linalg::IntMatrix;
    use crate::sample;
    use alloc::vec;

    #[test]
    fn fiber_subcomplexes_of_e1() {
        let f = sample::e1();
        let u1 = f.target.ray_id(&QVec::from_ints(&[1, 0])).unwrap();
        let u2 = f.target.ray_id(&QVec::from_ints(&[0, 1])).unwrap();
        let f1 = fiber_subcomplex(&f, u1).unwrap();
        // rays v11, v12 and the cone they span, plus nothing else
        assert_eq!(f1.complex.rays().len(), 2);
        assert_eq!(f1.complex.cones().len(), 3);
        let f2 = fiber_subcomplex(&f, u2).unwrap();
        assert_eq!(f2.complex.rays().len(), 2);
        assert_eq!(f2.complex.cones().len(), 3);
    }

    #[test]
    fn fiber_of_e3_is_whole_source() {
        let f = sample::e3();
        let fib = fiber_subcomplex(&f, 0).unwrap();
        assert_eq!(fib.complex, f.source);
    }

    #[test]
    fn e1_fibers_already_semistable() {
        let f = sample::e1();
        for ray in 0..2 {
            assert!(restrict_semistable_check(&f, ray).unwrap());
            let out = semistabilize_over_ray(&f, ray, 4).unwrap();
            assert_eq!(out.m, 1);
            assert!(out.points.is_empty());
        }
    }

    #[test]
    fn e3_fiber_needs_reduction() {
        let f = sample::e3();
        assert!(!restrict_semistable_check(&f, 0).unwrap());
        let out = semistabilize_over_ray(&f, 0, 4).unwrap();
        assert_eq!(out.m, 1);
        let ids = out.subdivision.maximal_cone_ids();
        assert_eq!(ids.len(), 2);
        for id in ids {
            assert_eq!(
                out.subdivision.multiplicity(id).unwrap(),
                BigInt::from(1)
            );
        }
        // the interior lattice point (1,1) became a ray
        assert!(out.subdivision.ray_id(&QVec::from_ints(&[1, 1])).is_some());
        let fib = fiber_subcomplex(&f, 0).unwrap();
        assert!(verify_projectivity(&out.subdivision, &fib.complex, &out.cert)
            .unwrap()
            .ok);
        assert!(crate::subdivide::same_support(&out.subdivision, &fib.complex));
    }

    #[test]
    fn two_interior_points_fiber() {
        // cone <(1,0),(1,3)> over f(a,b) = a: section has two interior points
        let source = complex_from_integer_cones(
            2,
            &[vec![QVec::from_ints(&[1, 0]), QVec::from_ints(&[1, 3])]],
        )
        .unwrap();
        let target = complex_from_integer_cones(1, &[vec![QVec::from_ints(&[1])]]).unwrap();
        let f = Morphism::new(source, target, IntMatrix::from_i64_rows(&[&[1, 0]])).unwrap();
        let out = semistabilize_over_ray(&f, 0, 4).unwrap();
        assert_eq!(out.m, 1);
        let ids = out.subdivision.maximal_cone_ids();
        assert_eq!(ids.len(), 3);
        for id in ids {
            assert_eq!(out.subdivision.multiplicity(id).unwrap(), BigInt::from(1));
        }
    }

    #[test]
    fn reeve_fiber_exhausts_dilation_one() {
        let f = sample::reeve_fiber(2);
        let err = semistabilize_over_ray(&f, 0, 1).unwrap_err();
        assert!(matches!(err, Error::BoundExhausted(_)));
        // with more dilation allowed the search succeeds
        let out = semistabilize_over_ray(&f, 0, 8).unwrap();
        assert!(out.m > 1);
        assert!(out.subdivision.is_simplicial());
    }

    #[test]
    fn rel_dim_above_three_rejected() {
        let f = sample::rel_dim_4();
        let err = semistabilize_over_ray(&f, 0, 4).unwrap_err();
        assert!(matches!(err, Error::RelativeDimension(4)));
    }
}
