//! Arbitrary-precision rational scalars and coordinate vectors.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Exact rational scalar. Always kept reduced with a positive denominator.
pub type Rat = num_rational::BigRational;

pub fn rat_zero() -> Rat {
    Rat::zero()
}

pub fn rat_one() -> Rat {
    Rat::one()
}

pub fn rat_from_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Canonical text form: `p` when the denominator is one, `p/q` otherwise.
pub fn rat_to_string(r: &Rat) -> String {
    use alloc::format;
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses the canonical `p` / `p/q` form.
pub fn rat_from_str(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Rat::from_integer(n))
        }
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rat::new(p, q))
        }
    }
}

/// A vector of exact rationals in a fixed ambient space.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QVec(pub Vec<Rat>);

impl QVec {
    pub fn zero(dim: usize) -> Self {
        QVec(vec![Rat::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        QVec(coords.iter().map(|&c| rat_from_int(c)).collect())
    }

    pub fn dot(&self, other: &QVec) -> Rat {
        debug_assert_eq!(self.dim(), other.dim());
        let mut acc = Rat::zero();
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            acc += a * b;
        }
        acc
    }

    pub fn scale(&self, s: &Rat) -> QVec {
        QVec(self.0.iter().map(|c| c * s).collect())
    }

    /// The primitive integer vector spanning the same ray: denominators are
    /// cleared and the content divided out. Identifies a ray geometrically,
    /// independent of any lattice. Returns `None` for the zero vector.
    pub fn canonical_direction(&self) -> Option<QVec> {
        if self.is_zero() {
            return None;
        }
        let mut lcm = BigInt::one();
        for c in &self.0 {
            lcm = lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let mut gcd = BigInt::zero();
        for n in &ints {
            gcd = gcd.gcd(n);
        }
        Some(QVec(
            ints.into_iter()
                .map(|n| Rat::from_integer(n / &gcd))
                .collect(),
        ))
    }

    /// All coordinates integral.
    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.denom().is_one())
    }
}

impl fmt::Debug for QVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", rat_to_string(c))?;
        }
        write!(f, ")")
    }
}

impl Add for &QVec {
    type Output = QVec;
    fn add(self, other: &QVec) -> QVec {
        debug_assert_eq!(self.dim(), other.dim());
        QVec(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &QVec {
    type Output = QVec;
    fn sub(self, other: &QVec) -> QVec {
        debug_assert_eq!(self.dim(), other.dim());
        QVec(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Neg for &QVec {
    type Output = QVec;
    fn neg(self) -> QVec {
        QVec(self.0.iter().map(|c| -c).collect())
    }
}

impl Mul<&Rat> for &QVec {
    type Output = QVec;
    fn mul(self, s: &Rat) -> QVec {
        self.scale(s)
    }
}

/// Sum of a slice of vectors of common dimension.
pub fn qvec_sum(dim: usize, vs: &[QVec]) -> QVec {
    let mut acc = QVec::zero(dim);
    for v in vs {
        acc = &acc + v;
    }
    acc
}
