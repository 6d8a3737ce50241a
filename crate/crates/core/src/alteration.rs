//! Lattice alterations: replace base-cone lattices by the sublattice
//! generated by multiples of their primitive points, and source lattices by
//! the induced preimage intersections.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::complex::{Complex, ConeSpec, RayId};
use crate::error::Result;
use crate::invalid;
use crate::lattice::{preimage_lattice, Lattice};
use crate::morphism::Morphism;
use crate::rat::{QVec, Rat};

/// Positive multiplier per target ray; missing rays default to one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlterationSpec {
    pub multipliers: BTreeMap<RayId, u64>,
}

impl AlterationSpec {
    pub fn identity() -> AlterationSpec {
        AlterationSpec::default()
    }

    pub fn of(&self, ray: RayId) -> u64 {
        self.multipliers.get(&ray).copied().unwrap_or(1)
    }

    pub fn is_identity(&self) -> bool {
        self.multipliers.values().all(|&m| m == 1)
    }

    pub fn validate(&self, target: &Complex) -> Result<()> {
        for (&ray, &m) in &self.multipliers {
            if ray >= target.rays().len() {
                return Err(invalid!("alteration names unknown ray {ray}"));
            }
            if m == 0 {
                return Err(invalid!("alteration multiplier must be positive"));
            }
        }
        Ok(())
    }
}

/// Applies the sublattice alteration: target cone lattices become the groups
/// generated by the scaled primitive points, and each source cone gets the
/// preimage of its target cone's new lattice intersected with its old one.
/// Generators are re-primitivized by reassembly.
pub fn alter_lattices(f: &Morphism, spec: &AlterationSpec) -> Result<Morphism> {
    if !f.target.is_simplicial() {
        return Err(invalid!("lattice alteration requires a simplicial base"));
    }
    spec.validate(&f.target)?;
    if spec.is_identity() {
        return Ok(f.clone());
    }
    // new target: same cones, lattices Z[m_i u_i]
    let mut target_specs = Vec::new();
    for cone in f.target.cones() {
        let gens: Vec<QVec> = cone
            .rays
            .iter()
            .map(|&r| {
                f.target.rays()[r]
                    .point
                    .scale(&Rat::from_integer(BigInt::from(spec.of(r))))
            })
            .collect();
        target_specs.push(ConeSpec {
            ray_dirs: cone
                .rays
                .iter()
                .map(|&r| f.target.rays()[r].direction.clone())
                .collect(),
            lattice: Lattice::from_generators(f.target.ambient_dim(), &gens),
        });
    }
    let new_target = Complex::assemble(f.target.ambient_dim(), &target_specs)?;
    // new source: preimage lattices through the minimal target carriers
    let mut source_specs = Vec::new();
    for id in 0..f.source.cones().len() {
        let cone = f.source.cone(id);
        let tau = f.target_carrier(id)?;
        let tau_key = f.target.cone(tau).rays.clone();
        let new_tau = new_target
            .find_cone(&tau_key)
            .ok_or_else(|| crate::internal!("target cone lost during alteration"))?;
        let lattice = preimage_lattice(
            &f.matrix,
            &new_target.cone(new_tau).lattice,
            &cone.lattice,
        )?;
        source_specs.push(ConeSpec {
            ray_dirs: cone
                .rays
                .iter()
                .map(|&r| f.source.rays()[r].direction.clone())
                .collect(),
            lattice,
        });
    }
    let new_source = Complex::assemble(f.source.ambient_dim(), &source_specs)?;
    let out = Morphism::new(new_source, new_target, f.matrix.clone())?;
    let issues = crate::morphism::validate_morphism(&out);
    if !issues.is_empty() {
        return Err(crate::internal!(
            "alteration produced an invalid morphism: {}",
            issues.join("; ")
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::complex_from_integer_cones;
    use crate::lattice::LatticeIndex;
    use crate::linalg::IntMatrix;
    use crate::morphism::{check_semistable, Semistability};
    use crate::sample;
    use alloc::vec;

    #[test]
    fn identity_alteration_is_noop() {
        let f = sample::e3();
        let out = alter_lattices(&f, &AlterationSpec::identity()).unwrap();
        assert_eq!(out.source, f.source);
        assert_eq!(out.target, f.target);
        let mut spec = AlterationSpec::identity();
        spec.multipliers.insert(0, 1);
        let out = alter_lattices(&f, &spec).unwrap();
        assert_eq!(out.source, f.source);
    }

    #[test]
    fn doubling_map_becomes_semistable_with_m_two() {
        // f: Z -> Z, x -> 2x on the positive ray
        let line = complex_from_integer_cones(1, &[vec![QVec::from_ints(&[1])]]).unwrap();
        let f = Morphism::new(line.clone(), line, IntMatrix::from_i64_rows(&[&[2]])).unwrap();
        let before = check_semistable(&f).unwrap();
        assert_eq!(before.status, Semistability::Neither);
        let mut spec = AlterationSpec::identity();
        spec.multipliers.insert(0, 2);
        let out = alter_lattices(&f, &spec).unwrap();
        // base lattice is 2Z with primitive point 2; the source generator
        // now maps onto the new primitive point
        assert_eq!(out.target.rays()[0].point, QVec::from_ints(&[2]));
        assert_eq!(out.source.rays()[0].point, QVec::from_ints(&[1]));
        let rep = check_semistable(&out).unwrap();
        assert_eq!(rep.status, Semistability::Semistable);
    }

    #[test]
    fn altered_base_index_is_product_of_multipliers() {
        let f = sample::e1();
        let mut spec = AlterationSpec::identity();
        spec.multipliers.insert(0, 2);
        spec.multipliers.insert(1, 3);
        let out = alter_lattices(&f, &spec).unwrap();
        let tau = out.target.maximal_cone_ids()[0];
        let old_tau = f.target.maximal_cone_ids()[0];
        let idx = f.target.cone(old_tau)
            .lattice
            .index_of(&out.target.cone(tau).lattice)
            .unwrap();
        assert_eq!(idx, LatticeIndex::Finite(BigInt::from(6)));
        // induced source lattices: f(N') inside N'_tau and N' inside N
        for id in 0..out.source.cones().len() {
            let new_lat = &out.source.cone(id).lattice;
            let old_lat = &f.source.cone(id).lattice;
            assert!(old_lat.contains_lattice(new_lat));
            let tau_id = out.target_carrier(id).unwrap();
            for b in new_lat.basis() {
                assert!(out.target.cone(tau_id).lattice.contains(&out.apply(b)));
            }
        }
    }

    #[test]
    fn alteration_commutes_with_faces() {
        let f = sample::e1();
        let mut spec = AlterationSpec::identity();
        spec.multipliers.insert(0, 2);
        let out = alter_lattices(&f, &spec).unwrap();
        for id in 0..out.source.cones().len() {
            for fid in out.source.face_ids(id) {
                let dirs: Vec<QVec> = out
                    .source
                    .cone(fid)
                    .rays
                    .iter()
                    .map(|&r| out.source.rays()[r].direction.clone())
                    .collect();
                let restricted = out.source.cone(id).lattice.restrict_to_span(&dirs);
                assert_eq!(restricted, out.source.cone(fid).lattice);
            }
        }
    }
}
