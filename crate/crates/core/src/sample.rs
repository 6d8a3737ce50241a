//! Reference morphisms and deterministic random corpora used by the test
//! and acceptance suites, and handy for generating example inputs.

use alloc::vec;
use alloc::vec::Vec;

use crate::complex::{complex_from_integer_cones, Complex};
use crate::error::Result;
use crate::linalg::IntMatrix;
use crate::morphism::Morphism;
use crate::rat::QVec;

/// SplitMix64: tiny deterministic generator for reproducible corpora.
#[derive(Clone, Debug)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }
}

/// Morphism over the two-dimensional standard cone: the four-dimensional
/// simplicial source cone of multiplicity two whose unique nonzero Waterman
/// point maps to the barycenter of the target.
pub fn e1() -> Morphism {
    let source = complex_from_integer_cones(
        4,
        &[vec![
            QVec::from_ints(&[1, 0, 0, 0]),
            QVec::from_ints(&[1, 0, 1, 0]),
            QVec::from_ints(&[0, 1, 0, 0]),
            QVec::from_ints(&[0, 1, 1, 2]),
        ]],
    )
    .unwrap();
    let target = complex_from_integer_cones(
        2,
        &[vec![QVec::from_ints(&[1, 0]), QVec::from_ints(&[0, 1])]],
    )
    .unwrap();
    Morphism::new(
        source,
        target,
        IntMatrix::from_i64_rows(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]),
    )
    .unwrap()
}

/// Morphism over a single ray: a two-dimensional source cone of
/// multiplicity two, semistabilized by one star at (1,1).
pub fn e3() -> Morphism {
    let source = complex_from_integer_cones(
        2,
        &[vec![QVec::from_ints(&[1, 0]), QVec::from_ints(&[1, 2])]],
    )
    .unwrap();
    let target = complex_from_integer_cones(1, &[vec![QVec::from_ints(&[1])]]).unwrap();
    Morphism::new(source, target, IntMatrix::from_i64_rows(&[&[1, 0]])).unwrap()
}

/// Two five-dimensional singular cones sharing the singular four-dimensional
/// face; both searches land the same marked point in the shared face, so
/// pruning keeps a single marked entry.
pub fn shared_carrier() -> Morphism {
    let v11 = QVec::from_ints(&[1, 0, 0, 0, 0]);
    let v12 = QVec::from_ints(&[1, 0, 1, 0, 0]);
    let v21 = QVec::from_ints(&[0, 1, 0, 0, 0]);
    let v22 = QVec::from_ints(&[0, 1, 1, 2, 0]);
    let x1 = QVec::from_ints(&[1, 0, 0, 0, 1]);
    let x2 = QVec::from_ints(&[1, 0, 0, 0, -1]);
    let source = complex_from_integer_cones(
        5,
        &[
            vec![v11.clone(), v12.clone(), v21.clone(), v22.clone(), x1],
            vec![v11, v12, v21, v22, x2],
        ],
    )
    .unwrap();
    let target = complex_from_integer_cones(
        2,
        &[vec![QVec::from_ints(&[1, 0]), QVec::from_ints(&[0, 1])]],
    )
    .unwrap();
    Morphism::new(
        source,
        target,
        IntMatrix::from_i64_rows(&[&[1, 0, 0, 0, 0], &[0, 1, 0, 0, 0]]),
    )
    .unwrap()
}

/// Relative dimension 3 over a two-dimensional base with fiber shape (3, 2)
/// and multiplicity 3: the Waterman point with coefficient sums (2, 1) maps
/// off the barycenters, and the search finds its reflection instead.
pub fn reflected_case() -> Morphism {
    let source = complex_from_integer_cones(
        5,
        &[vec![
            QVec::from_ints(&[1, 0, 0, 0, 0]),
            QVec::from_ints(&[1, 0, 1, 0, 0]),
            QVec::from_ints(&[1, 0, 0, 1, 0]),
            QVec::from_ints(&[0, 1, 0, 0, 0]),
            QVec::from_ints(&[0, 1, 1, 1, 3]),
        ]],
    )
    .unwrap();
    let target = complex_from_integer_cones(
        2,
        &[vec![QVec::from_ints(&[1, 0]), QVec::from_ints(&[0, 1])]],
    )
    .unwrap();
    Morphism::new(
        source,
        target,
        IntMatrix::from_i64_rows(&[&[1, 0, 0, 0, 0], &[0, 1, 0, 0, 0]]),
    )
    .unwrap()
}

/// A single fiber of relative dimension four; rejected before any work.
pub fn rel_dim_4() -> Morphism {
    let source = complex_from_integer_cones(
        5,
        &[vec![
            QVec::from_ints(&[1, 0, 0, 0, 0]),
            QVec::from_ints(&[1, 1, 0, 0, 0]),
            QVec::from_ints(&[1, 0, 1, 0, 0]),
            QVec::from_ints(&[1, 0, 0, 1, 0]),
            QVec::from_ints(&[1, 0, 0, 0, 1]),
        ]],
    )
    .unwrap();
    let target = complex_from_integer_cones(1, &[vec![QVec::from_ints(&[1])]]).unwrap();
    Morphism::new(source, target, IntMatrix::from_i64_rows(&[&[1, 0, 0, 0, 0]])).unwrap()
}

/// Fiber whose level-one cross-section is an empty lattice tetrahedron of
/// volume `q`: no interior points to star at, so dilation is required and a
/// dilation bound of one is exhausted.
pub fn reeve_fiber(q: i64) -> Morphism {
    let source = complex_from_integer_cones(
        4,
        &[vec![
            QVec::from_ints(&[1, 0, 0, 0]),
            QVec::from_ints(&[1, 1, 0, 0]),
            QVec::from_ints(&[1, 0, 1, 0]),
            QVec::from_ints(&[1, 1, 1, q]),
        ]],
    )
    .unwrap();
    let target = complex_from_integer_cones(1, &[vec![QVec::from_ints(&[1])]]).unwrap();
    Morphism::new(source, target, IntMatrix::from_i64_rows(&[&[1, 0, 0, 0]])).unwrap()
}

/// Identity on a singular two-dimensional fan; preparation must resolve
/// both sides at (1,1).
pub fn singular_identity() -> Morphism {
    let c = complex_from_integer_cones(
        2,
        &[vec![QVec::from_ints(&[1, 0]), QVec::from_ints(&[1, 2])]],
    )
    .unwrap();
    Morphism::new(c.clone(), c, IntMatrix::identity(2)).unwrap()
}

/// A random simplicial cone of the requested dimension, full-dimensional in
/// its ambient space, generators with entries in `[0, 5]` over the standard
/// lattice.
pub fn random_simplicial_cone(rng: &mut Rng, dim: usize) -> Complex {
    loop {
        let mut gens = Vec::with_capacity(dim);
        for _ in 0..dim {
            let mut v: Vec<i64> = (0..dim).map(|_| rng.int_in(0, 5)).collect();
            if v.iter().all(|&x| x == 0) {
                v[rng.below(dim as u64) as usize] = 1;
            }
            gens.push(QVec::from_ints(&v).canonical_direction().unwrap());
        }
        if crate::linalg::rat_rank(&gens) != dim {
            continue;
        }
        let mut unique = gens.clone();
        unique.sort();
        unique.dedup();
        if unique.len() != dim {
            continue;
        }
        if let Ok(c) = complex_from_integer_cones(dim, &[gens]) {
            return c;
        }
    }
}

/// A random simplicial complex: one random cone, optionally star subdivided
/// at random interior lattice points to add more maximal cones.
pub fn random_simplicial_complex(rng: &mut Rng, dim: usize, stars: usize) -> Result<Complex> {
    let mut c = random_simplicial_cone(rng, dim);
    for _ in 0..stars {
        let max_ids = c.maximal_cone_ids();
        let id = max_ids[rng.below(max_ids.len() as u64) as usize];
        // a random interior lattice point: positive combination of generators
        let gens = c.generators(id);
        let mut p = QVec::zero(c.ambient_dim());
        for g in &gens {
            p = &p + &g.scale(&crate::rat::rat_from_int(rng.int_in(1, 2)));
        }
        let cert = crate::goodfn::GoodFunction::zero(&c);
        let (next, _, _) = crate::subdivide::star_subdivide(&c, &c.clone(), &p, &cert)?;
        c = next;
    }
    Ok(c)
}

/// A random prepared morphism: standard nonsingular target of dimension
/// `base_dim`, one simplicial source cone with `fiber_sizes[i]` rays over
/// the i-th base ray. Kernel entries in `[0, bound]`.
pub fn random_prepared_morphism(
    rng: &mut Rng,
    base_dim: usize,
    fiber_sizes: &[usize],
    bound: i64,
) -> Morphism {
    assert_eq!(fiber_sizes.len(), base_dim);
    let rel: usize = fiber_sizes.iter().map(|j| j - 1).sum();
    let ambient = base_dim + rel;
    'retry: loop {
        let mut gens: Vec<QVec> = Vec::new();
        for (i, &j_count) in fiber_sizes.iter().enumerate() {
            for _ in 0..j_count {
                let mut v = vec![0i64; ambient];
                v[i] = 1;
                for k in base_dim..ambient {
                    v[k] = rng.int_in(0, bound);
                }
                gens.push(QVec::from_ints(&v));
            }
        }
        if crate::linalg::rat_rank(&gens) != ambient {
            continue 'retry;
        }
        let mut unique = gens.clone();
        unique.sort();
        unique.dedup();
        if unique.len() != gens.len() {
            continue 'retry;
        }
        let Ok(source) = complex_from_integer_cones(ambient, &[gens]) else {
            continue 'retry;
        };
        let mut target_gens = Vec::new();
        for i in 0..base_dim {
            let mut v = vec![0i64; base_dim];
            v[i] = 1;
            target_gens.push(QVec::from_ints(&v));
        }
        let target = complex_from_integer_cones(base_dim, &[target_gens]).unwrap();
        let mut rows = Vec::new();
        for i in 0..base_dim {
            let mut row = vec![0i64; ambient];
            row[i] = 1;
            rows.push(row);
        }
        let matrix = IntMatrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(num_bigint::BigInt::from).collect())
                .collect(),
        );
        return Morphism::new(source, target, matrix).unwrap();
    }
}

/// Random fiber shapes with total relative dimension at most 3.
pub fn random_fiber_shape(rng: &mut Rng) -> Vec<usize> {
    let choices: [&[usize]; 8] = [
        &[2],
        &[3],
        &[4],
        &[2, 2],
        &[2, 3],
        &[2, 2, 2],
        &[1, 3],
        &[2, 1, 2],
    ];
    choices[rng.below(choices.len() as u64) as usize].to_vec()
}
