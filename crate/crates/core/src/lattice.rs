//! Small-dimension exact linear algebra and lattice tools: rational
//! Gaussian elimination, Hermite normal form, LLL on Gram matrices and
//! Fincke-Pohst enumeration of short vectors.
//!
//! All lattices in this crate have rank at most 9, so the algorithms favour
//! exactness and simplicity over asymptotic behaviour. LLL runs with
//! delta = 0.99 on the exact Gram matrix.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeError {
    /// Short-vector enumeration exceeded the configured node budget.
    NodeCapExceeded { cap: u64 },
    /// Numerical Cholesky failed (Gram matrix not positive definite).
    NotPositiveDefinite,
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::NodeCapExceeded { cap } => {
                write!(f, "short-vector enumeration exceeded {cap} nodes")
            }
            LatticeError::NotPositiveDefinite => write!(f, "Gram matrix is not positive definite"),
        }
    }
}

pub type RatMat = Vec<Vec<BigRational>>;
pub type IntMat = Vec<Vec<BigInt>>;

pub fn rat_from_int(m: &IntMat) -> RatMat {
    m.iter()
        .map(|row| row.iter().map(|x| BigRational::from(x.clone())).collect())
        .collect()
}

pub fn identity_int(n: usize) -> IntMat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

/// Determinant by fraction-exact Gaussian elimination.
pub fn rat_det(m: &RatMat) -> BigRational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero());
        let Some(p) = pivot else {
            return BigRational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col].clone();
        let inv = a[col][col].clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &inv;
            for c in col..n {
                let t = &factor * &a[col][c];
                a[r][c] -= t;
            }
        }
    }
    det
}

/// Solves `A x = rhs` for square nonsingular `A`.
pub fn rat_solve(a: &RatMat, rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(p, col);
        let inv = m[col][col].clone();
        for c in col..=n {
            m[col][c] = &m[col][c] / &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=n {
                    let t = &factor * &m[col][c];
                    m[r][c] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

pub fn rat_inverse(a: &RatMat) -> Option<RatMat> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let rhs: Vec<BigRational> = (0..n)
            .map(|i| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            })
            .collect();
        cols.push(rat_solve(a, &rhs)?);
    }
    // cols[j] is the j-th column of the inverse
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

pub fn rat_mat_mul(a: &RatMat, b: &RatMat) -> RatMat {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    let mut out = vec![vec![BigRational::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                let t = &a[i][l] * &b[l][j];
                out[i][j] += t;
            }
        }
    }
    out
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = num_integer::Integer::div_mod_floor(a, b);
    // floor remainder carries the divisor's sign; |r| < |b| either way
    debug_assert!(r.is_zero() || (r.is_negative() == b.is_negative()));
    q
}

/// Row-style Hermite normal form: upper triangular (echelon), positive
/// pivots, entries above a pivot reduced into `[0, pivot)`. Zero rows are
/// dropped, so the result is canonical for the row lattice.
pub fn hnf(rows_in: IntMat) -> IntMat {
    let mut rows = rows_in;
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    if rows.is_empty() {
        return rows;
    }
    let ncols = rows[0].len();
    let mut pivot_row = 0usize;
    for col in 0..ncols {
        if pivot_row >= rows.len() {
            break;
        }
        loop {
            // pick the row (>= pivot_row) with smallest nonzero |entry| in col
            let mut best: Option<usize> = None;
            for r in pivot_row..rows.len() {
                if rows[r][col].is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(r),
                    Some(b) => {
                        if rows[r][col].abs() < rows[b][col].abs() {
                            best = Some(r)
                        }
                    }
                }
            }
            let Some(b) = best else {
                break;
            };
            rows.swap(pivot_row, b);
            let mut others = false;
            let pivot_val = rows[pivot_row][col].clone();
            for r in pivot_row + 1..rows.len() {
                if rows[r][col].is_zero() {
                    continue;
                }
                let k = floor_div(&rows[r][col], &pivot_val);
                if !k.is_zero() {
                    for c in 0..ncols {
                        let t = &k * &rows[pivot_row][c];
                        rows[r][c] -= t;
                    }
                }
                if !rows[r][col].is_zero() {
                    others = true;
                }
            }
            if !others {
                break;
            }
        }
        if rows[pivot_row][col].is_zero() {
            continue;
        }
        if rows[pivot_row][col].is_negative() {
            for c in 0..ncols {
                rows[pivot_row][c] = -rows[pivot_row][c].clone();
            }
        }
        let pivot_val = rows[pivot_row][col].clone();
        for r in 0..pivot_row {
            let k = floor_div(&rows[r][col], &pivot_val);
            if !k.is_zero() {
                for c in 0..ncols {
                    let t = &k * &rows[pivot_row][c];
                    rows[r][c] -= t;
                }
            }
        }
        pivot_row += 1;
    }
    rows.truncate(pivot_row);
    rows
}

fn gso(gram: &RatMat) -> (RatMat, Vec<BigRational>) {
    let n = gram.len();
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut b = vec![BigRational::zero(); n];
    for i in 0..n {
        // <b_i, b*_j> = g_ij - sum_{k<j} mu_jk * <b_i, b*_k>
        let mut proj = vec![BigRational::zero(); i];
        for j in 0..i {
            let mut dot = gram[i][j].clone();
            for k in 0..j {
                let t = &mu[j][k] * &proj[k];
                dot -= t;
            }
            proj[j] = dot.clone();
            mu[i][j] = dot / b[j].clone();
        }
        let mut norm = gram[i][i].clone();
        for k in 0..i {
            let t = &mu[i][k] * &proj[k];
            norm -= t;
        }
        b[i] = norm;
    }
    (mu, b)
}

fn gram_row_op(gram: &mut RatMat, k: usize, j: usize, r: &BigInt) {
    // basis row op b_k -= r * b_j, reflected on the Gram matrix
    let n = gram.len();
    let rr = BigRational::from(r.clone());
    let gkk = gram[k][k].clone();
    let gkj = gram[k][j].clone();
    let gjj = gram[j][j].clone();
    for i in 0..n {
        if i == k {
            continue;
        }
        let t = &rr * &gram[j][i];
        gram[k][i] -= t;
        gram[i][k] = gram[k][i].clone();
    }
    gram[k][k] = gkk - BigRational::from(BigInt::from(2)) * &rr * gkj + &rr * &rr * gjj;
}

fn gram_swap(gram: &mut RatMat, k: usize, j: usize) {
    let n = gram.len();
    gram.swap(k, j);
    for row in gram.iter_mut().take(n) {
        row.swap(k, j);
    }
}

/// LLL reduction given only the Gram matrix; returns nothing but mutates
/// `gram` and accumulates the unimodular transform in `u` (rows of `u`
/// express the reduced basis over the original one).
pub fn lll_gram(gram: &mut RatMat, u: &mut IntMat) {
    let n = gram.len();
    if n <= 1 {
        return;
    }
    let delta = BigRational::new(BigInt::from(99), BigInt::from(100));
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let mut k = 1usize;
    let mut guard = 0u32;
    while k < n {
        guard += 1;
        assert!(guard < 100_000, "LLL failed to terminate");
        // size-reduce row k against rows k-1 .. 0
        loop {
            let (mu, _) = gso(gram);
            let mut changed = false;
            for j in (0..k).rev() {
                if mu[k][j].abs() > half {
                    let r = (&mu[k][j] + &half).floor().to_integer();
                    gram_row_op(gram, k, j, &r);
                    for c in 0..u[0].len() {
                        let t = &r * &u[j][c];
                        u[k][c] -= t;
                    }
                    changed = true;
                    break;
                }
            }
            if !changed {
                break;
            }
        }
        let (mu, b) = gso(gram);
        let lhs = &b[k] + &mu[k][k - 1] * &mu[k][k - 1] * &b[k - 1];
        if lhs >= &delta * &b[k - 1] {
            k += 1;
        } else {
            gram_swap(gram, k, k - 1);
            u.swap(k, k - 1);
            k = k.max(2) - 1;
        }
    }
}

/// All nonzero lattice vectors `x` (integer coordinate rows w.r.t. the Gram
/// basis) with `x G x^T <= bound`, one representative per `{x, -x}` pair.
///
/// Candidates come from a floating-point Fincke-Pohst search with a small
/// inflation margin; each one is confirmed against the exact Gram matrix, so
/// the returned set is exact as long as f64 headroom (~1e-9 relative) covers
/// the rounding of the Cholesky data. Bound magnitudes in this crate stay
/// below 1e12, far inside that margin.
pub fn enumerate_short(
    gram: &RatMat,
    bound: &BigRational,
    node_cap: u64,
) -> Result<Vec<Vec<i64>>, LatticeError> {
    let n = gram.len();
    let bound_f = bound.to_f64().ok_or(LatticeError::NotPositiveDefinite)?;
    if bound_f < 0.0 {
        return Ok(Vec::new());
    }
    // f64 Cholesky-style decomposition (Cohen alg. 2.7.5 preprocessing)
    let mut q = vec![vec![0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            q[i][j] = gram[i][j].to_f64().ok_or(LatticeError::NotPositiveDefinite)?;
        }
    }
    for i in 0..n {
        if q[i][i] <= 0.0 {
            return Err(LatticeError::NotPositiveDefinite);
        }
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
                if k != l {
                    // keep symmetry source intact for the next rows
                }
            }
        }
    }
    // now Q(x) = sum_i q[i][i] * (x_i + sum_{j>i} q[i][j] x_j)^2
    let inflated = bound_f * (1.0 + 1e-9) + 1e-6;
    let mut results = Vec::new();
    let mut x = vec![0i64; n];
    let mut nodes = 0u64;

    // iterative DFS over coordinates n-1 .. 0
    struct Frame {
        i: usize,
        hi: i64,
        cur: i64,
        center: f64,
        remaining: f64,
    }
    let center_of = |q: &Vec<Vec<f64>>, x: &Vec<i64>, i: usize| -> f64 {
        let mut c = 0f64;
        for j in i + 1..q.len() {
            c += q[i][j] * x[j] as f64;
        }
        c
    };
    let mut stack: Vec<Frame> = Vec::new();
    {
        let i = n - 1;
        let r = libm::sqrt(inflated / q[i][i]);
        let lo = libm::ceil(-r) as i64;
        let hi = libm::floor(r) as i64;
        stack.push(Frame {
            i,
            hi,
            cur: lo - 1,
            center: 0.0,
            remaining: inflated,
        });
    }
    while let Some(frame) = stack.last_mut() {
        frame.cur += 1;
        if frame.cur > frame.hi {
            stack.pop();
            continue;
        }
        nodes += 1;
        if nodes > node_cap {
            return Err(LatticeError::NodeCapExceeded { cap: node_cap });
        }
        let i = frame.i;
        x[i] = frame.cur;
        let t = frame.cur as f64 + frame.center;
        let used = q[i][i] * t * t;
        if used > frame.remaining + 1e-9 {
            continue;
        }
        if i == 0 {
            if x.iter().any(|&v| v != 0) {
                // canonical sign: highest-index nonzero coordinate positive
                let lead = x.iter().rposition(|&v| v != 0).unwrap();
                if x[lead] > 0 {
                    // exact confirmation
                    if exact_form_leq(gram, &x, bound) {
                        results.push(x.clone());
                    }
                }
            }
            continue;
        }
        let rem = frame.remaining - used;
        let ni = i - 1;
        let c = center_of(&q, &x, ni);
        let r = libm::sqrt(rem.max(0.0) / q[ni][ni]);
        let lo = libm::ceil(-r - c) as i64 - 1;
        let hi = libm::floor(r - c) as i64 + 1;
        stack.push(Frame {
            i: ni,
            hi,
            cur: lo - 1,
            center: c,
            remaining: rem,
        });
    }
    results.sort();
    Ok(results)
}

fn exact_form_leq(gram: &RatMat, x: &[i64], bound: &BigRational) -> bool {
    exact_form(gram, x) <= *bound
}

/// Exact value of the quadratic form at integer coordinates.
pub fn exact_form(gram: &RatMat, x: &[i64]) -> BigRational {
    let n = gram.len();
    let mut acc = BigRational::zero();
    for i in 0..n {
        if x[i] == 0 {
            continue;
        }
        for j in 0..n {
            if x[j] == 0 {
                continue;
            }
            let t = &gram[i][j] * BigRational::from(BigInt::from(x[i] as i128 * x[j] as i128));
            acc += t;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(x: i64) -> BigRational {
        BigRational::from(BigInt::from(x))
    }

    #[test]
    fn det_and_solve() {
        let m = vec![vec![rat(2), rat(1)], vec![rat(1), rat(3)]];
        assert_eq!(rat_det(&m), rat(5));
        let sol = rat_solve(&m, &[rat(4), rat(7)]).unwrap();
        assert_eq!(sol, vec![rat(1), rat(2)]);
        let inv = rat_inverse(&m).unwrap();
        let prod = rat_mat_mul(&m, &inv);
        assert_eq!(prod[0][0], rat(1));
        assert_eq!(prod[0][1], rat(0));
    }

    #[test]
    fn hnf_canonical() {
        let rows = vec![
            vec![BigInt::from(4), BigInt::from(6)],
            vec![BigInt::from(2), BigInt::from(2)],
        ];
        let h = hnf(rows);
        assert_eq!(
            h,
            vec![
                vec![BigInt::from(2), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(2)]
            ]
        );
        // permuted generating set gives the same HNF
        let rows2 = vec![
            vec![BigInt::from(2), BigInt::from(2)],
            vec![BigInt::from(4), BigInt::from(6)],
            vec![BigInt::from(6), BigInt::from(8)],
        ];
        assert_eq!(hnf(rows2), h);
    }

    #[test]
    fn lll_reduces_skewed_basis() {
        // basis (1, 0), (1000, 1): Gram [[1, 1000], [1000, 1000001]]
        let mut gram = vec![
            vec![rat(1), rat(1000)],
            vec![rat(1000), rat(1_000_001)],
        ];
        let mut u = identity_int(2);
        lll_gram(&mut gram, &mut u);
        assert_eq!(gram[0][0], rat(1));
        assert_eq!(gram[1][1], rat(1));
        assert_eq!(gram[0][1], rat(0));
    }

    #[test]
    fn enumeration_matches_brute_force() {
        // lattice with Gram of basis (2,0),(1,2)
        let gram = vec![vec![rat(4), rat(2)], vec![rat(2), rat(5)]];
        let got = enumerate_short(&gram, &rat(30), 1 << 20).unwrap();
        // brute force
        let mut expected = Vec::new();
        for a in -10i64..=10 {
            for b in -10i64..=10 {
                if (a, b) == (0, 0) {
                    continue;
                }
                let v = 4 * a * a + 4 * a * b + 5 * b * b;
                let lead_positive = if b != 0 { b > 0 } else { a > 0 };
                if v <= 30 && lead_positive {
                    expected.push(vec![a, b]);
                }
            }
        }
        expected.sort();
        assert_eq!(got, expected);
    }
}
