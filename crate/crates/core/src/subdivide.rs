//! Subdivision operations: star subdivisions with composed certificates,
//! regular subdivisions from height functions, pulling triangulations,
//! hyperplane-arrangement cuts, pullback refinements, and barycentric /
//! modified barycentric subdivisions with the chain characterization.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::complex::{Complex, ConeId, ConeSpec, RayId};
use crate::error::{Error, Result};
use crate::goodfn::{verify_projectivity, GoodFunction};
use crate::lattice::Lattice;
use crate::linalg::IntMatrix;
use crate::morphism::Morphism;
use crate::rat::{rat_from_int, QVec, Rat};
use crate::{internal, invalid};

/// How many scaling factors a certificate composition may try before giving
/// up: each wall rules out at most one factor, so this is ample.
const LAMBDA_TRIES: i64 = 64;

/// One star subdivision step together with the scale factor chosen for the
/// accumulated certificate (recorded so traces can replay cheaply).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarStep {
    pub point: QVec,
    pub lambda: Rat,
}

/// Star subdivision of `current` at the lattice point `b`, extending the
/// accumulated certificate `cert` of `current` as a subdivision of `base`.
/// Starring at a point on an existing ray is a no-op.
pub fn star_subdivide(
    current: &Complex,
    base: &Complex,
    b: &QVec,
    cert: &GoodFunction,
) -> Result<(Complex, GoodFunction, StarStep)> {
    let (next, _carrier) = star_complex(current, b)?;
    if next == *current {
        return Ok((
            next,
            cert.clone(),
            StarStep {
                point: b.clone(),
                lambda: rat_from_int(1),
            },
        ));
    }
    let (cert, step) = compose_star_cert(current, &next, base, b, cert, None)?;
    Ok((next, cert, step))
}

/// Replays a star subdivision with a recorded scale factor, verifying that
/// the certificate still certifies the result.
pub fn replay_star(
    current: &Complex,
    base: &Complex,
    step: &StarStep,
    cert: &GoodFunction,
) -> Result<(Complex, GoodFunction)> {
    let (next, _) = star_complex(current, &step.point)?;
    if next == *current {
        return Ok((next, cert.clone()));
    }
    let (cert, _) = compose_star_cert(current, &next, base, &step.point, cert, Some(&step.lambda))?;
    Ok((next, cert))
}

/// The combinatorial part of a star subdivision (no certificate).
fn star_complex(current: &Complex, b: &QVec) -> Result<(Complex, ConeId)> {
    if b.is_zero() {
        return Err(invalid!("cannot star at the origin"));
    }
    let carrier = current
        .carrier_of(b)
        .ok_or_else(|| invalid!("star point {b:?} is not interior to a unique cone"))?;
    if !current.cone(carrier).lattice.contains(b) {
        return Err(invalid!("star point {b:?} is not a lattice point of its carrier"));
    }
    if current.cone(carrier).dim == 1 {
        return Ok((current.clone(), carrier));
    }
    let carrier_rays = current.cone(carrier).rays.clone();
    let mut specs: Vec<ConeSpec> = Vec::new();
    let ray_dirs =
        |ids: &[RayId]| -> Vec<QVec> { ids.iter().map(|&r| current.rays()[r].direction.clone()).collect() };
    let b_dir = b.canonical_direction().unwrap();
    let mut emitted: BTreeSet<Vec<RayId>> = BTreeSet::new();
    for (id, cone) in current.cones().iter().enumerate() {
        let contains_carrier = carrier_rays
            .iter()
            .all(|r| cone.rays.binary_search(r).is_ok());
        if !contains_carrier {
            specs.push(ConeSpec {
                ray_dirs: ray_dirs(&cone.rays),
                lattice: cone.lattice.clone(),
            });
            continue;
        }
        // replace by joins of b with the faces not containing the carrier
        for fid in current.face_ids(id) {
            let face = current.cone(fid);
            let face_has_carrier = carrier_rays
                .iter()
                .all(|r| face.rays.binary_search(r).is_ok());
            if face_has_carrier {
                continue;
            }
            if !emitted.insert(face.rays.clone()) {
                continue;
            }
            let mut dirs = ray_dirs(&face.rays);
            dirs.push(b_dir.clone());
            let lattice = cone.lattice.restrict_to_span(&dirs);
            specs.push(ConeSpec { ray_dirs: dirs, lattice });
        }
        // the new ray itself
        if emitted.insert(Vec::new()) {
            specs.push(ConeSpec {
                ray_dirs: alloc::vec![b_dir.clone()],
                lattice: cone.lattice.restrict_to_span(&[b_dir.clone()]),
            });
        }
    }
    let next = Complex::assemble(current.ambient_dim(), &specs)?;
    Ok((next, carrier))
}

/// Composes the accumulated certificate with a dip at the new star point:
/// `psi' = lambda * psi - dip_b`. Searches deterministically for the
/// smallest positive integer scale preserving all strict breaks, unless a
/// recorded value is supplied.
fn compose_star_cert(
    current: &Complex,
    next: &Complex,
    base: &Complex,
    b: &QVec,
    cert: &GoodFunction,
    fixed_lambda: Option<&Rat>,
) -> Result<(GoodFunction, StarStep)> {
    let value_at_b = cert.value_at(current, b)?;
    let b_dir = b.canonical_direction().unwrap();
    let b_point = next.rays()[next
        .ray_id(&b_dir)
        .ok_or_else(|| internal!("star point ray missing after subdivision"))?]
    .point
    .clone();
    // the dip is expressed at the new primitive point; rescale psi(b) along the ray
    let scale = ray_scale(&b_point, b);
    let value_at_prim = &value_at_b * &scale;
    let try_lambda = |lambda: &Rat| -> Result<Option<GoodFunction>> {
        let mut values: BTreeMap<RayId, Rat> = BTreeMap::new();
        for (rid, ray) in next.rays().iter().enumerate() {
            if ray.direction == b_dir {
                values.insert(rid, lambda * &value_at_prim - rat_from_int(1));
            } else {
                let old = cert
                    .values
                    .get(
                        &current
                            .ray_id(&ray.direction)
                            .ok_or_else(|| internal!("ray vanished during star subdivision"))?,
                    )
                    .ok_or_else(|| internal!("certificate missing a ray value"))?;
                values.insert(rid, lambda * old);
            }
        }
        let cand = GoodFunction {
            base_digest: cert.base_digest.clone(),
            values,
        };
        let report = verify_projectivity(next, base, &cand)?;
        Ok(report.ok.then_some(cand))
    };
    if let Some(l) = fixed_lambda {
        return match try_lambda(l)? {
            Some(c) => Ok((c, StarStep { point: b.clone(), lambda: l.clone() })),
            None => Err(internal!("recorded certificate scale no longer verifies")),
        };
    }
    for l in 1..=LAMBDA_TRIES {
        let lambda = rat_from_int(l);
        if let Some(c) = try_lambda(&lambda)? {
            return Ok((c, StarStep { point: b.clone(), lambda }));
        }
    }
    Err(internal!("no certificate scale preserved strict breaks"))
}

/// Factor `t` with `reference = t * v` for collinear vectors.
fn ray_scale(reference: &QVec, v: &QVec) -> Rat {
    let i = v.0.iter().position(|c| !c.is_zero()).expect("zero vector");
    &reference.0[i] / &v.0[i]
}

/// `Some(t)` when `a = t * b` exactly.
pub fn collinear_scale(a: &QVec, b: &QVec) -> Option<Rat> {
    let i = b.0.iter().position(|c| !c.is_zero())?;
    let t = &a.0[i] / &b.0[i];
    if *a == b.scale(&t) {
        Some(t)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// regular subdivisions from heights
// ---------------------------------------------------------------------------

/// Regular subdivision of `c` induced by heights on a global point set: each
/// maximal cone is replaced by the projections of the lower facets of its
/// lifted cone. Points must include representatives of all rays of `c`; the
/// returned certificate is the lower envelope.
pub fn regular_subdivide(
    c: &Complex,
    points: &[QVec],
    heights: &[Rat],
) -> Result<(Complex, GoodFunction)> {
    if points.len() != heights.len() {
        return Err(invalid!("points and heights differ in length"));
    }
    let mut specs: Vec<ConeSpec> = Vec::new();
    // cells as (point index set, owning cone) for the certificate
    let mut cells: Vec<(Vec<usize>, ConeId)> = Vec::new();
    for id in c.maximal_cone_ids() {
        let geom = c.geom(id);
        let members: Vec<usize> = (0..points.len())
            .filter(|&i| geom.contains(&points[i]))
            .collect();
        if members.is_empty() {
            return Err(invalid!("no points on cone {:?}", c.cone(id).rays));
        }
        let pts: Vec<QVec> = members.iter().map(|&i| points[i].clone()).collect();
        let hts: Vec<Rat> = members.iter().map(|&i| heights[i].clone()).collect();
        let local_cells = crate::geometry::lower_facet_cells(&pts, &hts)?;
        if local_cells.is_empty() {
            // flat lift: the cone stays
            specs.push(ConeSpec {
                ray_dirs: c.cone(id).rays.iter().map(|&r| c.rays()[r].direction.clone()).collect(),
                lattice: c.cone(id).lattice.clone(),
            });
            cells.push((members, id));
            continue;
        }
        for cell in local_cells {
            let cell_points: Vec<QVec> = cell.iter().map(|&i| pts[i].clone()).collect();
            let cgeom = crate::geometry::ConeGeom::new(c.ambient_dim(), &cell_points);
            let dirs = cgeom.extreme_rays()?;
            let lattice = c.cone(id).lattice.restrict_to_span(&dirs);
            specs.push(ConeSpec { ray_dirs: dirs, lattice });
            cells.push((cell.iter().map(|&i| members[i]).collect(), id));
        }
    }
    let next = Complex::assemble(c.ambient_dim(), &specs)?;
    // envelope values on the rays of the result
    let mut values: BTreeMap<RayId, Rat> = BTreeMap::new();
    for (cell, _) in &cells {
        let cell_points: Vec<QVec> = cell.iter().map(|&i| points[i].clone()).collect();
        let cell_heights = QVec(cell.iter().map(|&i| heights[i].clone()).collect());
        let basis = crate::linalg::rref(&cell_points).0;
        let rows: Vec<QVec> = basis
            .iter()
            .map(|b| QVec(cell_points.iter().map(|p| b.dot(p)).collect()))
            .collect();
        let y = crate::linalg::express_in_rows(&rows, &cell_heights)
            .ok_or_else(|| internal!("heights not linear on a lower facet"))?;
        let mut ell = QVec::zero(c.ambient_dim());
        for (cy, b) in y.iter().zip(basis.iter()) {
            ell = &ell + &b.scale(cy);
        }
        let cgeom = crate::geometry::ConeGeom::new(c.ambient_dim(), &cell_points);
        for (rid, ray) in next.rays().iter().enumerate() {
            if values.contains_key(&rid) {
                continue;
            }
            if cgeom.contains(&ray.direction) {
                values.insert(rid, ell.dot(&ray.point));
            }
        }
    }
    if values.len() != next.rays().len() {
        return Err(internal!("envelope certificate missed a ray"));
    }
    let cert = GoodFunction {
        base_digest: c.digest(),
        values,
    };
    let report = verify_projectivity(&next, c, &cert)?;
    if !report.ok {
        return Err(internal!(
            "envelope certificate failed verification: {}",
            report.issues.join("; ")
        ));
    }
    Ok((next, cert))
}

/// Heights for a pulling-style triangulation: the ray at position `i` of the
/// order gets height `-M^(n-i)`, so earlier rays are pulled first.
pub fn pulling_heights(n: usize, magnitude: &num_bigint::BigInt) -> Vec<Rat> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut m = num_bigint::BigInt::from(-1);
        for _ in 0..(n - i) {
            m *= magnitude;
        }
        out.push(Rat::from_integer(m));
    }
    out
}

/// A projective simplicial subdivision using only existing rays: regular
/// subdivision for pulling heights along `ray_order`, with the height base
/// grown until every cell is simplicial.
pub fn triangulate_pulling(
    c: &Complex,
    ray_order: &[RayId],
) -> Result<(Complex, GoodFunction, Vec<Rat>)> {
    if c.is_simplicial() {
        return Ok((c.clone(), GoodFunction::zero(c), Vec::new()));
    }
    if ray_order.len() != c.rays().len() {
        return Err(invalid!("ray order must cover all rays"));
    }
    let points: Vec<QVec> = ray_order.iter().map(|&r| c.rays()[r].point.clone()).collect();
    let mut magnitude = num_bigint::BigInt::from(2);
    for _ in 0..12 {
        let heights = pulling_heights(points.len(), &magnitude);
        let (next, cert) = regular_subdivide(c, &points, &heights)?;
        if next.is_simplicial() {
            // report heights in ray-id order for the trace
            let mut by_ray = alloc::vec![Rat::zero(); points.len()];
            for (pos, &r) in ray_order.iter().enumerate() {
                by_ray[r] = heights[pos].clone();
            }
            return Ok((next, cert, by_ray));
        }
        magnitude = &magnitude * &magnitude;
    }
    Err(internal!("pulling heights never became generic"))
}

// ---------------------------------------------------------------------------
// hyperplane arrangement refinement
// ---------------------------------------------------------------------------

/// Cuts every cone by the given hyperplanes (as covectors) and certifies the
/// refinement with the sum of their absolute values.
pub fn arrangement_cut(
    c: &Complex,
    hyperplanes: &[QVec],
) -> Result<(Complex, GoodFunction)> {
    let mut specs: Vec<ConeSpec> = Vec::new();
    for id in c.maximal_cone_ids() {
        let cone = c.cone(id);
        let mut pieces: Vec<Vec<QVec>> = alloc::vec![
            cone.rays.iter().map(|&r| c.rays()[r].direction.clone()).collect()
        ];
        for h in hyperplanes {
            let mut next_pieces = Vec::new();
            for piece in &pieces {
                let geom = crate::geometry::ConeGeom::new(c.ambient_dim(), piece);
                let (pos, neg) = crate::geometry::cut_by_hyperplane(&geom, h)?;
                match (pos, neg) {
                    (Some(p), Some(n)) => {
                        next_pieces.push(p);
                        next_pieces.push(n);
                    }
                    _ => next_pieces.push(piece.clone()),
                }
            }
            pieces = next_pieces;
        }
        for piece in pieces {
            let lattice = cone.lattice.restrict_to_span(&piece);
            specs.push(ConeSpec { ray_dirs: piece, lattice });
        }
    }
    let next = Complex::assemble(c.ambient_dim(), &specs)?;
    let mut values: BTreeMap<RayId, Rat> = BTreeMap::new();
    for (rid, ray) in next.rays().iter().enumerate() {
        let mut acc = Rat::zero();
        for h in hyperplanes {
            acc += ray.point.dot(h).abs();
        }
        values.insert(rid, acc);
    }
    let cert = GoodFunction {
        base_digest: c.digest(),
        values,
    };
    let report = verify_projectivity(&next, c, &cert)?;
    if !report.ok {
        return Err(internal!(
            "arrangement certificate failed verification: {}",
            report.issues.join("; ")
        ));
    }
    Ok((next, cert))
}

// ---------------------------------------------------------------------------
// pullback refinement
// ---------------------------------------------------------------------------

/// Pulls a covector on the target back along the matrix: `ell . (M x)`.
pub fn pull_covector(matrix: &IntMatrix, ell: &QVec) -> QVec {
    let mut out = Vec::with_capacity(matrix.cols());
    for j in 0..matrix.cols() {
        let mut acc = Rat::zero();
        for i in 0..matrix.rows() {
            if !matrix.at(i, j).is_zero() {
                acc += Rat::from_integer(matrix.at(i, j).clone()) * &ell.0[i];
            }
        }
        out.push(acc);
    }
    QVec(out)
}

/// Refines the source of `f` by the preimages of a subdivision of its
/// target: the cones `sigma meet f^{-1}(tau')`. The certificate is the
/// pullback of the target certificate.
pub fn pullback_refine(
    f: &Morphism,
    target_sub: &Complex,
    target_cert: &GoodFunction,
) -> Result<(Complex, GoodFunction)> {
    crate::goodfn::subdivision_structure(target_sub, &f.target)?;
    let mut specs: Vec<ConeSpec> = Vec::new();
    let mut seen: BTreeSet<Vec<QVec>> = BTreeSet::new();
    for sid in f.source.maximal_cone_ids() {
        let sgeom = f.source.geom(sid);
        let sdim = f.source.cone(sid).dim;
        for tid in target_sub.maximal_cone_ids() {
            let tgeom = target_sub.geom(tid);
            let mut eqs = sgeom.span_eqs.clone();
            for e in &tgeom.span_eqs {
                eqs.push(pull_covector(&f.matrix, e));
            }
            let mut ineqs = sgeom.facets.clone();
            for n in &tgeom.facets {
                ineqs.push(pull_covector(&f.matrix, n));
            }
            let rays = crate::geometry::extreme_rays(f.source.ambient_dim(), &eqs, &ineqs)?;
            if crate::linalg::rat_rank(&rays) != sdim {
                continue;
            }
            if !seen.insert(rays.clone()) {
                continue;
            }
            let lattice = f.source.cone(sid).lattice.restrict_to_span(&rays);
            specs.push(ConeSpec { ray_dirs: rays, lattice });
        }
    }
    let next = Complex::assemble(f.source.ambient_dim(), &specs)?;
    let mut values: BTreeMap<RayId, Rat> = BTreeMap::new();
    for (rid, ray) in next.rays().iter().enumerate() {
        values.insert(rid, target_cert.value_at(target_sub, &f.apply(&ray.point))?);
    }
    let cert = GoodFunction {
        base_digest: f.source.digest(),
        values,
    };
    let report = verify_projectivity(&next, &f.source, &cert)?;
    if !report.ok {
        return Err(internal!(
            "pullback certificate failed verification: {}",
            report.issues.join("; ")
        ));
    }
    Ok((next, cert))
}

// ---------------------------------------------------------------------------
// barycentric and modified barycentric subdivisions
// ---------------------------------------------------------------------------

/// Modified-barycenter data: marked cones with chosen interior lattice
/// points and a total order on all cones refining the face order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MbsData {
    pub marked: BTreeMap<Vec<RayId>, QVec>,
    /// All cones of the complex, ascending.
    pub order: Vec<Vec<RayId>>,
}

impl MbsData {
    /// Barycentric data: every cone marked at its barycenter.
    pub fn barycentric(c: &Complex, order: Vec<Vec<RayId>>) -> MbsData {
        let marked = c
            .cones()
            .iter()
            .enumerate()
            .map(|(id, cone)| (cone.rays.clone(), c.barycenter(id)))
            .collect();
        MbsData { marked, order }
    }

    /// Augments with the primitive points of all unmarked rays.
    pub fn augment_rays(&mut self, c: &Complex) {
        for cone in c.cones() {
            if cone.rays.len() == 1 && !self.marked.contains_key(&cone.rays) {
                self.marked
                    .insert(cone.rays.clone(), c.rays()[cone.rays[0]].point.clone());
            }
        }
    }

    fn position(&self, rays: &[RayId]) -> Option<usize> {
        self.order.iter().position(|k| k == rays)
    }

    /// Validates marked points and the order against the complex.
    pub fn validate(&self, c: &Complex) -> Result<()> {
        if self.order.len() != c.cones().len() {
            return Err(invalid!("order must list every cone exactly once"));
        }
        for key in &self.order {
            if c.find_cone(key).is_none() {
                return Err(invalid!("order lists unknown cone {key:?}"));
            }
        }
        for (a_pos, a) in self.order.iter().enumerate() {
            for (b_pos, b) in self.order.iter().enumerate() {
                if a.len() < b.len()
                    && a.iter().all(|r| b.contains(r))
                    && a_pos > b_pos
                {
                    return Err(invalid!("order does not refine the face order"));
                }
                let _ = b_pos;
            }
            let _ = a_pos;
        }
        for (key, point) in &self.marked {
            let id = c
                .find_cone(key)
                .ok_or_else(|| invalid!("marked cone {key:?} not in the complex"))?;
            if !c.geom(id).contains_relint(point) {
                return Err(invalid!("marked point {point:?} not interior to {key:?}"));
            }
            if !c.cone(id).lattice.contains(point) {
                return Err(invalid!("marked point {point:?} not a lattice point of {key:?}"));
            }
        }
        Ok(())
    }

    /// The marked point of the order-maximal marked face of a cone.
    pub fn tilde(&self, c: &Complex, id: ConeId) -> Result<(Vec<RayId>, QVec)> {
        let mut best: Option<(usize, Vec<RayId>)> = None;
        for fid in c.face_ids(id) {
            let key = c.cone(fid).rays.clone();
            if !self.marked.contains_key(&key) {
                continue;
            }
            let pos = self
                .position(&key)
                .ok_or_else(|| invalid!("marked cone missing from the order"))?;
            if best.as_ref().map(|(p, _)| pos > *p).unwrap_or(true) {
                best = Some((pos, key));
            }
        }
        let (_, key) = best.ok_or_else(|| internal!("cone has no marked face"))?;
        let point = self.marked[&key].clone();
        Ok((key, point))
    }
}

/// The default total order: ascending dimension, then lexicographic ray ids
/// (the canonical cone order of the complex).
pub fn default_order(c: &Complex) -> Vec<Vec<RayId>> {
    c.cones().iter().map(|cone| cone.rays.clone()).collect()
}

/// Modified barycentric subdivision: star subdivisions at the marked points
/// in descending order. Asserts the chain characterization: the result
/// equals the complex of cones spanned by the marked points of maximal
/// marked faces along chains.
pub fn mbs_subdivide(
    c: &Complex,
    data: &MbsData,
) -> Result<(Complex, GoodFunction, Vec<StarStep>)> {
    let mut data = data.clone();
    data.augment_rays(c);
    data.validate(c)?;
    let mut current = c.clone();
    let mut cert = GoodFunction::zero(c);
    let mut steps = Vec::new();
    for key in data.order.iter().rev() {
        let Some(point) = data.marked.get(key) else {
            continue;
        };
        let (next, next_cert, step) = star_subdivide(&current, c, point, &cert)?;
        current = next;
        cert = next_cert;
        steps.push(step);
    }
    let chains = chain_complex(c, &data)?;
    let got: BTreeSet<(Vec<RayId>, Lattice)> = current
        .cones()
        .iter()
        .map(|cone| (cone.rays.clone(), cone.lattice.clone()))
        .collect();
    if chains != got {
        return Err(internal!(
            "chain characterization disagrees with the star sequence ({} chain cones vs {} cones)",
            chains.len(),
            got.len()
        ));
    }
    Ok((current, cert, steps))
}

/// The set of cones spanned by marked points of order-maximal marked faces
/// along chains of cones, with their lattices, keyed in the coordinates of
/// the subdivided complex (ray ids of `mbs_subdivide`'s output).
fn chain_complex(c: &Complex, data: &MbsData) -> Result<BTreeSet<(Vec<RayId>, Lattice)>> {
    // b(tilde(sigma)) for every cone
    let mut b_of: Vec<QVec> = Vec::with_capacity(c.cones().len());
    for id in 0..c.cones().len() {
        b_of.push(data.tilde(c, id)?.1);
    }
    // collect the ray table of the would-be subdivision: canonical directions
    let mut dirs: BTreeSet<QVec> = BTreeSet::new();
    for b in &b_of {
        dirs.insert(b.canonical_direction().unwrap());
    }
    let dir_ids: BTreeMap<QVec, RayId> = dirs
        .into_iter()
        .enumerate()
        .map(|(i, d)| (d, i))
        .collect();
    // chains by depth-first extension: faces strictly below, by ray subsets
    let n = c.cones().len();
    let mut below: Vec<Vec<ConeId>> = alloc::vec![Vec::new(); n];
    for a in 0..n {
        for b in 0..n {
            if a != b && c.is_face_of(a, b) {
                below[b].push(a);
            }
        }
    }
    let mut out: BTreeSet<(Vec<RayId>, Lattice)> = BTreeSet::new();
    let mut stack: Vec<(ConeId, Vec<ConeId>)> = (0..n).map(|i| (i, alloc::vec![i])).collect();
    while let Some((top, chain)) = stack.pop() {
        // the cone spanned by the marked points of the chain
        let mut points: Vec<QVec> = chain.iter().map(|&i| b_of[i].clone()).collect();
        points.sort();
        points.dedup();
        if crate::linalg::rat_rank(&points) != points.len() {
            return Err(internal!("chain cone generators are dependent"));
        }
        let mut rays: Vec<RayId> = points
            .iter()
            .map(|p| dir_ids[&p.canonical_direction().unwrap()])
            .collect();
        rays.sort_unstable();
        rays.dedup();
        let lattice = c
            .cone(*chain.last().expect("nonempty chain"))
            .lattice
            .restrict_to_span(&points);
        out.insert((rays, lattice));
        for &next in &below[top] {
            // chains are built downward: next < top
            let mut longer = alloc::vec![next];
            longer.extend(chain.iter().copied());
            stack.push((next, longer));
        }
    }
    Ok(out)
}

/// Ordinary barycentric subdivision for a total order refining the face
/// order (every cone starred at its barycenter, descending).
pub fn barycentric_subdivide(
    c: &Complex,
    order: &[Vec<RayId>],
) -> Result<(Complex, GoodFunction, Vec<StarStep>)> {
    if !c.is_simplicial() {
        return Err(invalid!("barycentric subdivision of a non-simplicial complex"));
    }
    let data = MbsData::barycentric(c, order.to_vec());
    mbs_subdivide(c, &data)
}

/// The simplicial map induced on modified barycentric subdivisions: checks
/// the image condition `f(tilde(sigma)) = f(sigma)` for every source cone,
/// then maps `MBS(source) -> BS(target)`.
pub fn induced_simplicial_map(
    f: &Morphism,
    data: &MbsData,
) -> Result<InducedMap> {
    let mut data = data.clone();
    data.augment_rays(&f.source);
    data.validate(&f.source)?;
    // marked points must map onto rays through barycenters
    for (key, point) in &data.marked {
        let img = f.apply(point);
        let ok = (0..f.target.cones().len()).any(|t| {
            let bc = f.target.barycenter(t);
            img.canonical_direction() == bc.canonical_direction()
        });
        if !ok {
            return Err(invalid!(
                "marked point of {key:?} does not map onto a barycenter ray"
            ));
        }
    }
    // hypothesis of the induced-map corollary
    for id in 0..f.source.cones().len() {
        let (tkey, _) = data.tilde(&f.source, id)?;
        let tid = f
            .source
            .find_cone(&tkey)
            .ok_or_else(|| internal!("marked face disappeared"))?;
        let img_sigma = image_dir_set(f, id);
        let img_tilde = image_dir_set(f, tid);
        if img_sigma != img_tilde {
            return Err(invalid!(
                "induced map hypothesis fails at cone {:?}: its maximal marked face {:?} has a smaller image",
                f.source.cone(id).rays,
                tkey
            ));
        }
    }
    let (mbs, source_cert, source_steps) = mbs_subdivide(&f.source, &data)?;
    let (bs, target_cert, target_steps) =
        barycentric_subdivide(&f.target, &default_order(&f.target))?;
    let morphism = Morphism::new(mbs, bs, f.matrix.clone())?;
    if !morphism.is_simplicial_map() {
        return Err(internal!(
            "induced map is not simplicial despite the image condition"
        ));
    }
    Ok(InducedMap {
        morphism,
        source_cert,
        source_steps,
        target_cert,
        target_steps,
    })
}

/// Result of `induced_simplicial_map`: the new morphism plus both
/// subdivision certificates and their replayable star sequences.
#[derive(Clone, Debug)]
pub struct InducedMap {
    pub morphism: Morphism,
    pub source_cert: GoodFunction,
    pub source_steps: Vec<StarStep>,
    pub target_cert: GoodFunction,
    pub target_steps: Vec<StarStep>,
}

/// Canonical direction set of the image of a source cone.
fn image_dir_set(f: &Morphism, id: ConeId) -> BTreeSet<QVec> {
    let geom = crate::geometry::ConeGeom::new(f.target.ambient_dim(), &f.image_generators(id));
    geom.extreme_rays()
        .map(|rays| rays.into_iter().collect())
        .unwrap_or_default()
}

/// Support preservation check used by property tests: representative points
/// of each side lie in the other.
pub fn same_support(a: &Complex, b: &Complex) -> bool {
    let reps = |c: &Complex| -> Vec<QVec> {
        c.maximal_cone_ids()
            .into_iter()
            .map(|id| c.geom(id).relint_point())
            .collect()
    };
    reps(a).iter().all(|p| b.supports(p)) && reps(b).iter().all(|p| a.supports(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::complex_from_integer_cones;
    use crate::sample;
    use num_bigint::BigInt;

    fn quadrant() -> Complex {
        complex_from_integer_cones(
            2,
            &[alloc::vec![QVec::from_ints(&[1, 0]), QVec::from_ints(&[0, 1])]],
        )
        .unwrap()
    }

    fn assert_valid(c: &Complex) {
        let issues = crate::complex::validate_complex(c);
        assert!(issues.is_empty(), "{issues:?}");
    }

    #[test]
    fn star_quadrant_at_diagonal() {
        let c = quadrant();
        let cert = GoodFunction::zero(&c);
        let (next, cert, _) = star_subdivide(&c, &c, &QVec::from_ints(&[1, 1]), &cert).unwrap();
        assert_valid(&next);
        let max = next.maximal_cone_ids();
        assert_eq!(max.len(), 2);
        for id in max {
            assert_eq!(next.multiplicity(id).unwrap(), BigInt::from(1));
        }
        assert!(verify_projectivity(&next, &c, &cert).unwrap().ok);
        assert!(same_support(&c, &next));
    }

    #[test]
    fn star_e3_at_waterman() {
        let f = sample::e3();
        let c = f.source;
        let cert = GoodFunction::zero(&c);
        let (next, cert, _) = star_subdivide(&c, &c, &QVec::from_ints(&[1, 1]), &cert).unwrap();
        assert_valid(&next);
        let max = next.maximal_cone_ids();
        assert_eq!(max.len(), 2);
        for id in &max {
            assert_eq!(next.multiplicity(*id).unwrap(), BigInt::from(1));
        }
        let dirs: alloc::collections::BTreeSet<QVec> =
            next.rays().iter().map(|r| r.direction.clone()).collect();
        assert!(dirs.contains(&QVec::from_ints(&[1, 1])));
        assert!(verify_projectivity(&next, &c, &cert).unwrap().ok);
    }

    #[test]
    fn star_e1_at_waterman_gives_four_unimodular_cones() {
        let f = sample::e1();
        let c = f.source;
        let cert = GoodFunction::zero(&c);
        let w = QVec::from_ints(&[1, 1, 1, 1]);
        let (next, cert, _) = star_subdivide(&c, &c, &w, &cert).unwrap();
        assert_valid(&next);
        let max = next.maximal_cone_ids();
        assert_eq!(max.len(), 4);
        for id in max {
            assert_eq!(next.cone(id).dim, 4);
            assert_eq!(next.multiplicity(id).unwrap(), BigInt::from(1));
        }
        assert!(verify_projectivity(&next, &c, &cert).unwrap().ok);
    }

    #[test]
    fn star_error_paths() {
        let c = quadrant();
        let cert = GoodFunction::zero(&c);
        assert!(star_subdivide(&c, &c, &QVec::zero(2), &cert).is_err());
        assert!(star_subdivide(&c, &c, &QVec::from_ints(&[-1, 0]), &cert).is_err());
        // half-integer point is not a lattice point of the carrier
        let half = QVec(alloc::vec![
            crate::rat::rat_from_str("1/2").unwrap(),
            crate::rat::rat_from_str("1/2").unwrap()
        ]);
        assert!(star_subdivide(&c, &c, &half, &cert).is_err());
        // star on an existing ray is a no-op
        let (same, _, _) =
            star_subdivide(&c, &c, &QVec::from_ints(&[2, 0]), &cert).unwrap();
        assert_eq!(same, c);
    }

    #[test]
    fn star_at_waterman_strictly_drops_multiplicity() {
        let mut rng = sample::Rng::new(41);
        let mut done = 0;
        while done < 12 {
            let dim = 2 + rng.below(2) as usize;
            let c = sample::random_simplicial_cone(&mut rng, dim);
            let max = c.maximal_cone_ids()[0];
            let mult = c.multiplicity(max).unwrap();
            if mult == BigInt::from(1) {
                continue;
            }
            let w = c
                .waterman_points(max)
                .unwrap()
                .into_iter()
                .find(|w| !w.point.is_zero())
                .unwrap();
            let cert = GoodFunction::zero(&c);
            let (next, _, _) = star_subdivide(&c, &c, &w.point, &cert).unwrap();
            // every new cone inside the old one has strictly smaller multiplicity
            for id in next.maximal_cone_ids() {
                assert!(next.multiplicity(id).unwrap() < mult);
            }
            assert!(same_support(&c, &next));
            done += 1;
        }
    }

    #[test]
    fn barycentric_of_quadrant() {
        let c = quadrant();
        let (bs, cert, _) = barycentric_subdivide(&c, &default_order(&c)).unwrap();
        assert_valid(&bs);
        assert_eq!(bs.maximal_cone_ids().len(), 2);
        assert!(bs.ray_id(&QVec::from_ints(&[1, 1])).is_some());
        assert!(verify_projectivity(&bs, &c, &cert).unwrap().ok);
    }

    #[test]
    fn barycentric_of_three_cone() {
        let c = complex_from_integer_cones(
            3,
            &[alloc::vec![
                QVec::from_ints(&[1, 0, 0]),
                QVec::from_ints(&[0, 1, 0]),
                QVec::from_ints(&[0, 0, 1]),
            ]],
        )
        .unwrap();
        let (bs, cert, _) = barycentric_subdivide(&c, &default_order(&c)).unwrap();
        assert_valid(&bs);
        let max = bs.maximal_cone_ids();
        assert_eq!(max.len(), 6);
        for id in max {
            assert_eq!(bs.multiplicity(id).unwrap(), BigInt::from(1));
        }
        assert!(bs.is_nonsingular());
        assert!(verify_projectivity(&bs, &c, &cert).unwrap().ok);
    }

    #[test]
    fn barycentric_of_e1_target() {
        let f = sample::e1();
        let (bs, _, _) = barycentric_subdivide(&f.target, &default_order(&f.target)).unwrap();
        let max = bs.maximal_cone_ids();
        assert_eq!(max.len(), 2);
        assert!(bs.is_nonsingular());
    }

    #[test]
    fn barycentric_order_independent() {
        let mut rng = sample::Rng::new(5);
        for _ in 0..6 {
            let dim = 2 + rng.below(2) as usize;
            let c = sample::random_simplicial_complex(&mut rng, dim, 1).unwrap();
            if !c.is_simplicial() {
                continue;
            }
            let (a, _, _) = barycentric_subdivide(&c, &default_order(&c)).unwrap();
            // another valid order: same dimensions, reversed ties
            let mut order = default_order(&c);
            order.sort_by(|x, y| (x.len(), core::cmp::Reverse(x.clone())).cmp(&(y.len(), core::cmp::Reverse(y.clone()))));
            let (b, _, _) = barycentric_subdivide(&c, &order).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn mbs_with_barycenters_is_bs() {
        let c = quadrant();
        let data = MbsData::barycentric(&c, default_order(&c));
        let (mbs, _, _) = mbs_subdivide(&c, &data).unwrap();
        let (bs, _, _) = barycentric_subdivide(&c, &default_order(&c)).unwrap();
        assert_eq!(mbs, bs);
    }

    #[test]
    fn mbs_e3_with_waterman_mark() {
        let f = sample::e3();
        let c = f.source;
        let max = c.maximal_cone_ids()[0];
        let mut data = MbsData {
            marked: BTreeMap::new(),
            order: default_order(&c),
        };
        data.marked
            .insert(c.cone(max).rays.clone(), QVec::from_ints(&[1, 1]));
        let (mbs, cert, _) = mbs_subdivide(&c, &data).unwrap();
        assert_valid(&mbs);
        let ids = mbs.maximal_cone_ids();
        assert_eq!(ids.len(), 2);
        for id in ids {
            assert_eq!(mbs.multiplicity(id).unwrap(), BigInt::from(1));
        }
        assert!(verify_projectivity(&mbs, &c, &cert).unwrap().ok);
    }

    #[test]
    fn mbs_e1_waterman_mark_and_barycenters_elsewhere_gives_24_cones() {
        let f = sample::e1();
        let c = f.source.clone();
        let max = c.maximal_cone_ids()[0];
        // every cone marked: barycenters everywhere except the singular top
        // cone, which uses its Waterman point
        let mut data = MbsData::barycentric(&c, default_order(&c));
        data.marked
            .insert(c.cone(max).rays.clone(), QVec::from_ints(&[1, 1, 1, 1]));
        let (mbs, cert, _) = mbs_subdivide(&c, &data).unwrap();
        assert_valid(&mbs);
        let ids = mbs.maximal_cone_ids();
        assert_eq!(ids.len(), 24);
        for id in ids {
            assert_eq!(mbs.multiplicity(id).unwrap(), BigInt::from(1));
        }
        assert!(verify_projectivity(&mbs, &c, &cert).unwrap().ok);
        assert!(same_support(&c, &mbs));
    }

    #[test]
    fn mbs_e1_with_section_four_marking_gives_12_unimodular_cones() {
        // the marking the reduction engine actually builds: injective-image
        // cones at barycenters plus the Waterman carrier
        let f = sample::e1();
        let c = f.source.clone();
        let max = c.maximal_cone_ids()[0];
        let mut marked: BTreeMap<Vec<RayId>, QVec> = BTreeMap::new();
        for (id, cone) in c.cones().iter().enumerate() {
            if f.image_dim(id) == cone.dim {
                marked.insert(cone.rays.clone(), c.barycenter(id));
            }
        }
        marked.insert(c.cone(max).rays.clone(), QVec::from_ints(&[1, 1, 1, 1]));
        let data = MbsData {
            marked,
            order: default_order(&c),
        };
        let (mbs, cert, _) = mbs_subdivide(&c, &data).unwrap();
        assert_valid(&mbs);
        let ids = mbs.maximal_cone_ids();
        assert_eq!(ids.len(), 12);
        for id in ids {
            assert_eq!(mbs.multiplicity(id).unwrap(), BigInt::from(1));
        }
        assert!(verify_projectivity(&mbs, &c, &cert).unwrap().ok);
        assert!(same_support(&c, &mbs));
    }

    #[test]
    fn induced_map_identity_barycentric() {
        let c = quadrant();
        let f = Morphism::new(c.clone(), c.clone(), IntMatrix::identity(2)).unwrap();
        let data = MbsData::barycentric(&c, default_order(&c));
        let induced = induced_simplicial_map(&f, &data).unwrap();
        assert!(induced.morphism.is_simplicial_map());
        assert_eq!(induced.morphism.source, induced.morphism.target);
    }

    #[test]
    fn induced_map_e1() {
        let f = sample::e1();
        let c = f.source.clone();
        let max = c.maximal_cone_ids()[0];
        let mut marked: BTreeMap<Vec<RayId>, QVec> = BTreeMap::new();
        for (id, cone) in c.cones().iter().enumerate() {
            if f.image_dim(id) == cone.dim {
                marked.insert(cone.rays.clone(), c.barycenter(id));
            }
        }
        marked.insert(c.cone(max).rays.clone(), QVec::from_ints(&[1, 1, 1, 1]));
        let data = MbsData {
            marked,
            order: default_order(&c),
        };
        let induced = induced_simplicial_map(&f, &data).unwrap();
        assert_eq!(induced.morphism.source.maximal_cone_ids().len(), 12);
        assert_eq!(induced.morphism.target.maximal_cone_ids().len(), 2);
        assert!(crate::morphism::validate_morphism(&induced.morphism).is_empty());
    }

    #[test]
    fn induced_map_hypothesis_violation_reports_witness() {
        let f = sample::e1();
        // marking only rays forces the maximal marked face of the top cone
        // to be a ray, whose image is smaller
        let data = MbsData {
            marked: BTreeMap::new(),
            order: default_order(&f.source),
        };
        let err = induced_simplicial_map(&f, &data).unwrap_err();
        match err {
            Error::InvalidInput(msg) => assert!(msg.contains("hypothesis"), "{msg}"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn pullback_with_trivial_subdivision_is_identity() {
        let f = sample::e1();
        let cert = GoodFunction::zero(&f.target);
        let (next, _) = pullback_refine(&f, &f.target, &cert).unwrap();
        assert_eq!(next, f.source);
    }

    #[test]
    fn pullback_e1_by_target_barycentric() {
        let f = sample::e1();
        let (bs, bs_cert, _) =
            barycentric_subdivide(&f.target, &default_order(&f.target)).unwrap();
        let (next, cert) = pullback_refine(&f, &bs, &bs_cert).unwrap();
        assert_valid(&next);
        // the source cone is cut by the preimage of the diagonal into two
        // four-dimensional non-simplicial pieces
        let max = next.maximal_cone_ids();
        assert_eq!(max.len(), 2);
        for id in max {
            assert_eq!(next.cone(id).dim, 4);
            assert!(!next.cone(id).is_simplicial());
        }
        assert!(verify_projectivity(&next, &f.source, &cert).unwrap().ok);
        // and the refined source maps into the subdivided target cone-wise
        let g = Morphism::new(next, bs, f.matrix.clone()).unwrap();
        assert!(crate::morphism::validate_morphism(&g).is_empty());
    }

    #[test]
    fn triangulate_square_cone() {
        let c = complex_from_integer_cones(
            3,
            &[alloc::vec![
                QVec::from_ints(&[0, 0, 1]),
                QVec::from_ints(&[1, 0, 1]),
                QVec::from_ints(&[0, 1, 1]),
                QVec::from_ints(&[1, 1, 1]),
            ]],
        )
        .unwrap();
        let order: Vec<RayId> = (0..c.rays().len()).collect();
        let (tri, cert, heights) = triangulate_pulling(&c, &order).unwrap();
        assert_valid(&tri);
        assert!(tri.is_simplicial());
        assert_eq!(tri.maximal_cone_ids().len(), 2);
        assert_eq!(tri.rays().len(), 4);
        assert!(!heights.is_empty());
        assert!(verify_projectivity(&tri, &c, &cert).unwrap().ok);
        // simplicial input is untouched
        let q = quadrant();
        let (same, _, _) = triangulate_pulling(&q, &[0, 1]).unwrap();
        assert_eq!(same, q);
    }

    #[test]
    fn arrangement_cut_splits_and_certifies() {
        let c = quadrant();
        let cuts = alloc::vec![QVec::from_ints(&[1, -1]), QVec::from_ints(&[2, -1])];
        let (next, cert) = arrangement_cut(&c, &cuts).unwrap();
        assert_valid(&next);
        assert_eq!(next.maximal_cone_ids().len(), 3);
        assert!(verify_projectivity(&next, &c, &cert).unwrap().ok);
        assert!(same_support(&c, &next));
    }

    #[test]
    fn regular_subdivision_with_interior_point() {
        let f = sample::e3();
        let c = f.source;
        let points = alloc::vec![
            QVec::from_ints(&[1, 0]),
            QVec::from_ints(&[1, 2]),
            QVec::from_ints(&[1, 1]),
        ];
        let heights = alloc::vec![rat_from_int(1), rat_from_int(2), rat_from_int(-3)];
        let (next, cert) = regular_subdivide(&c, &points, &heights).unwrap();
        assert_eq!(next.maximal_cone_ids().len(), 2);
        assert!(next.is_simplicial());
        assert!(verify_projectivity(&next, &c, &cert).unwrap().ok);
    }

    #[test]
    fn mbs_chain_count_on_random_complexes() {
        // the chain characterization is asserted inside mbs_subdivide; run
        // it over random complexes with random valid marked data
        let mut rng = sample::Rng::new(23);
        for _ in 0..6 {
            let dim = 2 + rng.below(2) as usize;
            let c = sample::random_simplicial_complex(&mut rng, dim, 1).unwrap();
            let mut marked: BTreeMap<Vec<RayId>, QVec> = BTreeMap::new();
            for (id, cone) in c.cones().iter().enumerate() {
                if rng.below(2) == 0 {
                    let gens = c.generators(id);
                    let mut p = QVec::zero(c.ambient_dim());
                    for g in &gens {
                        p = &p + &g.scale(&rat_from_int(rng.int_in(1, 3)));
                    }
                    marked.insert(cone.rays.clone(), p);
                }
            }
            let data = MbsData {
                marked,
                order: default_order(&c),
            };
            let (mbs, cert, _) = mbs_subdivide(&c, &data).unwrap();
            assert_valid(&mbs);
            assert!(verify_projectivity(&mbs, &c, &cert).unwrap().ok);
            assert!(same_support(&c, &mbs));
        }
    }

    #[test]
    fn bs_preserves_nonsingularity_randomly() {
        let mut rng = sample::Rng::new(31);
        let mut done = 0;
        while done < 6 {
            let dim = 2 + rng.below(3) as usize;
            // start from the standard cone and star at barycenters to stay
            // nonsingular
            let mut gens = Vec::new();
            for i in 0..dim {
                let mut v = alloc::vec![0i64; dim];
                v[i] = 1;
                gens.push(QVec::from_ints(&v));
            }
            let c = complex_from_integer_cones(dim, &[gens]).unwrap();
            assert!(c.is_nonsingular());
            let (bs, _, _) = barycentric_subdivide(&c, &default_order(&c)).unwrap();
            assert!(bs.is_nonsingular());
            done += 1;
        }
    }
}
