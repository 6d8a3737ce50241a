//! Exact integer and rational linear algebra: Hermite and Smith normal
//! forms, determinants, kernels and rational elimination.
//!
//! Conventions: vectors are rows, lattices are row spans, and `h = u * m`
//! style transformations act on rows from the left.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rat::{QVec, Rat};

/// Dense matrix of arbitrary-precision integers, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl core::fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  [")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(r, c))?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_qvec(&self, r: usize) -> QVec {
        QVec(self.row(r).iter().map(|x| Rat::from_integer(x.clone())).collect())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * other.at(k, j);
                    *out.at_mut(i, j) += prod;
                }
            }
        }
        out
    }

    /// Applies the matrix to a column vector: `self * v`.
    pub fn apply(&self, v: &QVec) -> QVec {
        assert_eq!(self.cols, v.dim());
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = Rat::zero();
            for j in 0..self.cols {
                if !self.at(i, j).is_zero() {
                    acc += Rat::from_integer(self.at(i, j).clone()) * &v.0[j];
                }
            }
            out.push(acc);
        }
        QVec(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.at(r, c).clone();
            *self.at_mut(r, c) = v;
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_mul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let add = q * self.at(src, c);
            *self.at_mut(dst, c) += add;
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    fn add_col_mul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let add = q * self.at(r, src);
            *self.at_mut(r, dst) += add;
        }
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *out.at_mut(c, r) = self.at(r, c).clone();
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for r in 0..self.rows {
            for c in 0..self.cols {
                let want = if r == c { BigInt::one() } else { BigInt::zero() };
                if *self.at(r, c) != want {
                    return false;
                }
            }
        }
        true
    }
}

/// Row-style Hermite normal form: returns `(h, u)` with `u` unimodular and
/// `h = u * m` in row echelon form, pivots positive, entries above each pivot
/// reduced into `[0, pivot)`. Pivot rows are chosen by minimal absolute value
/// to limit coefficient growth.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        loop {
            // minimal nonzero |entry| in this column at or below pivot_row
            let mut best: Option<usize> = None;
            for r in pivot_row..rows {
                if h.at(r, col).is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(r),
                    Some(b) => {
                        if h.at(r, col).abs() < h.at(b, col).abs() {
                            best = Some(r);
                        }
                    }
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(pivot_row, b);
            u.swap_rows(pivot_row, b);
            if h.at(pivot_row, col).is_negative() {
                h.negate_row(pivot_row);
                u.negate_row(pivot_row);
            }
            let p = h.at(pivot_row, col).clone();
            let mut done = true;
            for r in pivot_row + 1..rows {
                if h.at(r, col).is_zero() {
                    continue;
                }
                let q = -h.at(r, col).div_floor(&p);
                h.add_row_mul(r, pivot_row, &q);
                u.add_row_mul(r, pivot_row, &q);
                if !h.at(r, col).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !h.at(pivot_row, col).is_zero() {
            // reduce entries above the pivot into [0, pivot)
            let p = h.at(pivot_row, col).clone();
            for r in 0..pivot_row {
                let q = -h.at(r, col).div_floor(&p);
                h.add_row_mul(r, pivot_row, &q);
                u.add_row_mul(r, pivot_row, &q);
            }
            pivot_row += 1;
        }
    }
    (h, u)
}

/// Smith normal form: `(s, u, v)` with `u`, `v` unimodular and
/// `s = u * m * v` diagonal with each entry dividing the next.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut s = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut v = IntMatrix::identity(m.cols());
    let n = m.rows().min(m.cols());
    let mut k = 0;
    while k < n {
        // move a minimal-|value| nonzero entry of the trailing block to (k, k)
        let mut best: Option<(usize, usize)> = None;
        for r in k..s.rows() {
            for c in k..s.cols() {
                if s.at(r, c).is_zero() {
                    continue;
                }
                match best {
                    None => best = Some((r, c)),
                    Some((br, bc)) => {
                        if s.at(r, c).abs() < s.at(br, bc).abs() {
                            best = Some((r, c));
                        }
                    }
                }
            }
        }
        let Some((br, bc)) = best else { break };
        s.swap_rows(k, br);
        u.swap_rows(k, br);
        s.swap_cols(k, bc);
        v.swap_cols(k, bc);
        if s.at(k, k).is_negative() {
            s.negate_row(k);
            u.negate_row(k);
        }
        let mut clean = true;
        let p = s.at(k, k).clone();
        for r in k + 1..s.rows() {
            let q = -s.at(r, k).div_floor(&p);
            s.add_row_mul(r, k, &q);
            u.add_row_mul(r, k, &q);
            if !s.at(r, k).is_zero() {
                clean = false;
            }
        }
        for c in k + 1..s.cols() {
            let q = -s.at(k, c).div_floor(&p);
            s.add_col_mul(c, k, &q);
            v.add_col_mul(c, k, &q);
            if !s.at(k, c).is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // force divisibility of the trailing block by the pivot
        let mut divides_all = true;
        'scan: for r in k + 1..s.rows() {
            for c in k + 1..s.cols() {
                if !s.at(r, c).mod_floor(&p).is_zero() {
                    s.add_row_mul(k, r, &BigInt::one());
                    u.add_row_mul(k, r, &BigInt::one());
                    divides_all = false;
                    break 'scan;
                }
            }
        }
        if divides_all {
            k += 1;
        }
    }
    (s, u, v)
}

/// Determinant of a square integer matrix via HNF with sign tracking.
pub fn int_determinant(m: &IntMatrix) -> BigInt {
    assert_eq!(m.rows(), m.cols());
    let (h, u) = hermite_normal_form(m);
    let mut det = BigInt::one();
    for i in 0..h.rows() {
        det *= h.at(i, i);
    }
    if det.is_zero() {
        return det;
    }
    // det(u) is +-1; det(m) = det(h) / det(u)
    det * unimodular_det(&u)
}

fn unimodular_det(u: &IntMatrix) -> BigInt {
    let rows: Vec<QVec> = (0..u.rows()).map(|r| u.row_qvec(r)).collect();
    rat_det_sign(&rows)
}

/// Sign (+-1) of the determinant of a nonsingular rational matrix given by rows.
fn rat_det_sign(rows: &[QVec]) -> BigInt {
    let n = rows.len();
    let mut m: Vec<Vec<Rat>> = rows.iter().map(|r| r.0.clone()).collect();
    let mut sign = BigInt::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let Some(p) = pivot else { return BigInt::zero() };
        if p != col {
            m.swap(p, col);
            sign = -sign;
        }
        if m[col][col].is_negative() {
            sign = -sign;
        }
        let pv = m[col][col].clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pv;
            for c in col..n {
                let sub = &f * &m[col][c];
                m[r][c] = &m[r][c] - &sub;
            }
        }
    }
    sign
}

/// Inverse of a unimodular integer matrix (asserts integrality).
pub fn unimodular_inverse(u: &IntMatrix) -> IntMatrix {
    let n = u.rows();
    assert_eq!(n, u.cols());
    let rows: Vec<QVec> = (0..n).map(|r| u.row_qvec(r)).collect();
    let inv = rat_inverse(&rows).expect("matrix not invertible");
    let mut out = IntMatrix::zero(n, n);
    for r in 0..n {
        for c in 0..n {
            let x = &inv[r].0[c];
            assert!(x.denom().is_one(), "inverse not integral");
            *out.at_mut(r, c) = x.numer().clone();
        }
    }
    out
}

/// Basis of the integer row kernel `{ c : c * m = 0 }` of an integer matrix.
/// The kernel of an integer matrix is saturated, so this is a full basis.
pub fn int_row_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let (h, u) = hermite_normal_form(m);
    let mut out = Vec::new();
    for r in 0..h.rows() {
        if h.row(r).iter().all(|x| x.is_zero()) {
            out.push(u.row(r).to_vec());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// rational elimination
// ---------------------------------------------------------------------------

/// Reduced row echelon form; returns (rref rows, pivot column per pivot row).
pub fn rref(rows: &[QVec]) -> (Vec<QVec>, Vec<usize>) {
    let mut m: Vec<Vec<Rat>> = rows.iter().map(|r| r.0.clone()).collect();
    let nrows = m.len();
    let ncols = m.first().map(Vec::len).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pv = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &pv;
        }
        for i in 0..nrows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for cc in 0..ncols {
                    let sub = &f * &m[r][cc];
                    m[i][cc] = &m[i][cc] - &sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m.into_iter().map(QVec).collect(), pivots)
}

pub fn rat_rank(rows: &[QVec]) -> usize {
    rref(rows).0.len()
}

/// Coefficients `c` with `sum c_i rows_i = target`, if the system is solvable.
pub fn express_in_rows(rows: &[QVec], target: &QVec) -> Option<Vec<Rat>> {
    let k = rows.len();
    if k == 0 {
        return if target.is_zero() { Some(Vec::new()) } else { None };
    }
    let dim = rows[0].dim();
    assert_eq!(target.dim(), dim);
    // augmented system over the transpose: columns are the rows, then target
    let mut aug: Vec<Vec<Rat>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut row: Vec<Rat> = rows.iter().map(|r| r.0[j].clone()).collect();
        row.push(target.0[j].clone());
        aug.push(row);
    }
    let (reduced, pivots) = rref(&aug.into_iter().map(QVec).collect::<Vec<_>>());
    // inconsistent if a pivot lands in the augmented column
    if pivots.contains(&k) {
        return None;
    }
    // underdetermined systems get free variables set to zero
    let mut c = vec![Rat::zero(); k];
    for (i, &p) in pivots.iter().enumerate() {
        c[p] = reduced[i].0[k].clone();
    }
    // verify (free-variable choice must actually solve the system)
    let mut acc = QVec::zero(dim);
    for (ci, row) in c.iter().zip(rows.iter()) {
        acc = &acc + &row.scale(ci);
    }
    if &acc == target {
        Some(c)
    } else {
        None
    }
}

/// Basis of `{ x : rows_i . x = 0 }` (right nullspace of the matrix).
pub fn nullspace(rows: &[QVec], dim: usize) -> Vec<QVec> {
    let (reduced, pivots) = rref(rows);
    let mut out = Vec::new();
    let pivot_set: alloc::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    for free in 0..dim {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); dim];
        v[free] = Rat::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -reduced[i].0[free].clone();
        }
        out.push(QVec(v));
    }
    out
}

/// Inverse of a square rational matrix given by rows, as rows.
pub fn rat_inverse(rows: &[QVec]) -> Option<Vec<QVec>> {
    let n = rows.len();
    if n == 0 {
        return Some(Vec::new());
    }
    assert_eq!(rows[0].dim(), n);
    let mut aug: Vec<QVec> = Vec::with_capacity(n);
    for (i, r) in rows.iter().enumerate() {
        let mut row = r.0.clone();
        let mut id = vec![Rat::zero(); n];
        id[i] = Rat::one();
        row.extend(id);
        aug.push(QVec(row));
    }
    let (reduced, pivots) = rref(&aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| i != p) {
        return None;
    }
    Some(
        reduced
            .into_iter()
            .map(|r| QVec(r.0[n..].to_vec()))
            .collect(),
    )
}

/// Clears denominators row-wise: each row scaled to integers (content kept).
pub fn rows_to_int_matrix_row_scaled(rows: &[QVec]) -> IntMatrix {
    let cols = rows.first().map(QVec::dim).unwrap_or(0);
    let mut data = Vec::with_capacity(rows.len());
    for r in rows {
        let mut lcm = BigInt::one();
        for c in &r.0 {
            lcm = lcm.lcm(c.denom());
        }
        data.push(
            r.0.iter()
                .map(|c| c.numer() * (&lcm / c.denom()))
                .collect::<Vec<_>>(),
        );
    }
    let mut m = IntMatrix::zero(rows.len(), cols);
    for (i, row) in data.into_iter().enumerate() {
        for (j, x) in row.into_iter().enumerate() {
            *m.at_mut(i, j) = x;
        }
    }
    m
}

/// Clears denominators with one common factor for the whole matrix,
/// returning the integer matrix and the common denominator.
pub fn rows_to_int_matrix(rows: &[QVec]) -> (IntMatrix, BigInt) {
    let cols = rows.first().map(QVec::dim).unwrap_or(0);
    let mut lcm = BigInt::one();
    for r in rows {
        for c in &r.0 {
            lcm = lcm.lcm(c.denom());
        }
    }
    let mut m = IntMatrix::zero(rows.len(), cols);
    for (i, r) in rows.iter().enumerate() {
        for (j, c) in r.0.iter().enumerate() {
            *m.at_mut(i, j) = c.numer() * (&lcm / c.denom());
        }
    }
    (m, lcm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_from_int;

    fn is_unimodular(u: &IntMatrix) -> bool {
        let sign = unimodular_det(u);
        if (sign.clone() * &sign) != BigInt::one() {
            return false;
        }
        let (h, _) = hermite_normal_form(u);
        let mut prod = BigInt::one();
        for i in 0..h.rows() {
            prod *= h.at(i, i);
        }
        prod == BigInt::one()
    }

    fn in_row_hnf(h: &IntMatrix) -> bool {
        // echelon, positive pivots, entries above reduced
        let mut last = None::<usize>;
        for r in 0..h.rows() {
            let lead = (0..h.cols()).find(|&c| !h.at(r, c).is_zero());
            match (lead, last) {
                (Some(c), Some(lc)) if c <= lc => return false,
                _ => {}
            }
            if let Some(c) = lead {
                if h.at(r, c).is_negative() {
                    return false;
                }
                for rr in 0..r {
                    let x = h.at(rr, c);
                    if x.is_negative() || x >= h.at(r, c) {
                        return false;
                    }
                }
                last = Some(c);
            } else {
                // zero rows must be at the bottom
                for rr in r..h.rows() {
                    if (0..h.cols()).any(|c| !h.at(rr, c).is_zero()) {
                        return false;
                    }
                }
                break;
            }
        }
        true
    }

    #[test]
    fn hnf_identity_case() {
        let m = IntMatrix::identity(2);
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(h, m);
        assert!(u.is_identity());
    }

    #[test]
    fn hnf_already_in_form() {
        let m = IntMatrix::from_i64_rows(&[&[2, 4], &[0, 6]]);
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(h, m);
        assert!(u.is_identity());
        assert_eq!(u.mul(&m), h);
    }

    #[test]
    fn hnf_row_swap() {
        let m = IntMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(h, IntMatrix::identity(2));
        assert_eq!(u.mul(&m), h);
        assert!(is_unimodular(&u));
    }

    #[test]
    fn hnf_reconstruction_random() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..60 {
            let rows = 1 + (next() % 4) as usize;
            let cols = 1 + (next() % 4) as usize;
            let mut m = IntMatrix::zero(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    *m.at_mut(r, c) = BigInt::from((next() % 11) as i64 - 5);
                }
            }
            let (h, u) = hermite_normal_form(&m);
            assert_eq!(u.mul(&m), h);
            assert!(is_unimodular(&u));
            assert!(in_row_hnf(&h));
        }
    }

    #[test]
    fn snf_identity_and_diagonal() {
        let m = IntMatrix::identity(3);
        let (s, u, v) = smith_normal_form(&m);
        assert_eq!(s, m);
        assert_eq!(u.mul(&m).mul(&v), s);

        let d = IntMatrix::from_i64_rows(&[&[2, 0], &[0, 2]]);
        let (s, u, v) = smith_normal_form(&d);
        assert_eq!(s, d);
        assert_eq!(u.mul(&d).mul(&v), s);
    }

    #[test]
    fn snf_e1_generators() {
        // generators of the four-dimensional reference cone
        let m = IntMatrix::from_i64_rows(&[
            &[1, 0, 0, 0],
            &[1, 0, 1, 0],
            &[0, 1, 0, 0],
            &[0, 1, 1, 2],
        ]);
        let (s, u, v) = smith_normal_form(&m);
        assert_eq!(u.mul(&m).mul(&v), s);
        let diag: Vec<BigInt> = (0..4).map(|i| s.at(i, i).clone()).collect();
        assert_eq!(
            diag,
            vec![BigInt::from(1), BigInt::from(1), BigInt::from(1), BigInt::from(2)]
        );
        assert!(is_unimodular(&u));
        assert!(is_unimodular(&v));
    }

    #[test]
    fn snf_divisibility_random() {
        let mut state = 0xdeadbeef12345678u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..40 {
            let n = 2 + (next() % 3) as usize;
            let mut m = IntMatrix::zero(n, n);
            for r in 0..n {
                for c in 0..n {
                    *m.at_mut(r, c) = BigInt::from((next() % 13) as i64 - 6);
                }
            }
            let (s, u, v) = smith_normal_form(&m);
            assert_eq!(u.mul(&m).mul(&v), s);
            for r in 0..n {
                for c in 0..n {
                    if r != c {
                        assert!(s.at(r, c).is_zero());
                    }
                }
            }
            for i in 0..n - 1 {
                if !s.at(i + 1, i + 1).is_zero() {
                    assert!(
                        !s.at(i, i).is_zero() && s.at(i + 1, i + 1).mod_floor(s.at(i, i)).is_zero()
                    );
                }
            }
        }
    }

    #[test]
    fn determinant_matches_cofactor_cases() {
        let m = IntMatrix::from_i64_rows(&[&[1, 0], &[1, 2]]);
        assert_eq!(int_determinant(&m), BigInt::from(2));
        let m = IntMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(int_determinant(&m), BigInt::from(-1));
        let m = IntMatrix::from_i64_rows(&[
            &[1, 0, 0, 0],
            &[1, 0, 1, 0],
            &[0, 1, 0, 0],
            &[0, 1, 1, 2],
        ]);
        assert_eq!(int_determinant(&m).abs(), BigInt::from(2));
    }

    #[test]
    fn kernel_of_projection() {
        // rows (1,0),(0,1),(1,1): kernel generated by (1,1,-1)
        let m = IntMatrix::from_i64_rows(&[&[1, 0], &[0, 1], &[1, 1]]);
        let k = int_row_kernel(&m);
        assert_eq!(k.len(), 1);
        let kv = &k[0];
        let r0 = kv[0].clone() + &kv[2];
        let r1 = kv[1].clone() + &kv[2];
        assert!(r0.is_zero() && r1.is_zero());
    }

    #[test]
    fn express_and_nullspace() {
        let rows = vec![QVec::from_ints(&[1, 0, 1]), QVec::from_ints(&[0, 1, 1])];
        let t = QVec::from_ints(&[2, 3, 5]);
        let c = express_in_rows(&rows, &t).unwrap();
        assert_eq!(c, vec![rat_from_int(2), rat_from_int(3)]);
        assert!(express_in_rows(&rows, &QVec::from_ints(&[0, 0, 1])).is_none());

        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 1);
        for r in &rows {
            assert!(r.dot(&ns[0]).is_zero());
        }
    }

    #[test]
    fn inverse_round_trip() {
        let rows = vec![QVec::from_ints(&[2, 1]), QVec::from_ints(&[1, 1])];
        let inv = rat_inverse(&rows).unwrap();
        // rows * inv = identity (as matrices of rows)
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Rat::zero();
                for k in 0..2 {
                    acc += &rows[i].0[k] * &inv[k].0[j];
                }
                assert_eq!(acc, if i == j { rat_from_int(1) } else { rat_from_int(0) });
            }
        }
        assert!(rat_inverse(&vec![QVec::from_ints(&[1, 1]), QVec::from_ints(&[2, 2])]).is_none());
    }
}
