//! Rings of integers of totally real fields given by a monic integral
//! polynomial, with exact ideal arithmetic.
//!
//! The maximal order is found by the round-2 enlargement loop at every
//! prime whose square divides the polynomial discriminant. Elements are
//! integer coordinate vectors over the order basis; the trace form, norms
//! and ideal lattices are all exact. Rational primes are decomposed by
//! splitting the finite algebra `O/qO` (radical, then idempotents), which
//! works uniformly — including at primes dividing the index of the
//! equation order.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::lattice::{hnf, rat_det, rat_from_int, rat_solve, IntMat};
use crate::polyarith::poly_disc;
use crate::zmod::{factorize, pow_mod, splitmix64};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderError {
    NotMonic,
    /// Zero discriminant: the polynomial has repeated roots.
    SingularPolynomial,
    /// The discriminant does not fit in the supported factoring range.
    DiscriminantTooLarge,
    /// An exact-division or integrality check failed (corrupt input).
    NonIntegralStructure,
    /// The finite-algebra splitting search gave up (not expected in scope).
    SplittingFailed,
}

impl fmt::Display for OrderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderError::NotMonic => write!(f, "defining polynomial must be monic"),
            OrderError::SingularPolynomial => write!(f, "defining polynomial is not squarefree"),
            OrderError::DiscriminantTooLarge => write!(f, "discriminant out of factoring range"),
            OrderError::NonIntegralStructure => write!(f, "integrality check failed"),
            OrderError::SplittingFailed => write!(f, "residue algebra splitting failed"),
        }
    }
}

/// Element of the order: integer coordinates over the order basis.
pub type Elem = Vec<BigInt>;

#[derive(Debug, Clone)]
pub struct MaximalOrder {
    /// Monic defining polynomial, constant term first.
    pub poly: Vec<BigInt>,
    pub degree: usize,
    /// Basis denominators: row i of `basis` divided by `den` gives the
    /// power-basis coordinates of the i-th integral basis element.
    pub den: BigInt,
    pub basis: IntMat,
    pub disc: BigInt,
    /// Index of the equation order Z[theta] in this order.
    pub index: BigInt,
    /// mul_table[i][j] = coordinates of w_i * w_j.
    pub mul_table: Vec<IntMat>,
    /// Exact Gram matrix Tr(w_i w_j); for totally real fields this is the
    /// square-of-embeddings form.
    pub trace_form: IntMat,
}

// ---------------------------------------------------------------------------
// small F_q linear algebra (row-vector convention)

fn fq_inv(a: u64, q: u64) -> u64 {
    pow_mod(a % q, q - 2, q)
}

/// Reduced row echelon form in place; returns pivot column per row.
fn fq_rref(m: &mut Vec<Vec<u64>>, q: u64) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        if let Some(p) = (r..rows).find(|&i| m[i][c] % q != 0) {
            m.swap(r, p);
            let inv = fq_inv(m[r][c], q);
            for x in m[r].iter_mut() {
                *x = *x % q * inv % q;
            }
            for i in 0..rows {
                if i != r && m[i][c] % q != 0 {
                    let f = m[i][c] % q;
                    for c2 in 0..cols {
                        m[i][c2] = (m[i][c2] + (q - f) * m[r][c2]) % q;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
    }
    m.truncate(r);
    pivots
}

/// Basis of `{ v : A v = 0 }` (column vectors returned as rows).
fn fq_nullspace(a: &[Vec<u64>], q: u64, cols: usize) -> Vec<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|&x| x % q).collect()).collect();
    let pivots = fq_rref(&mut m, q);
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![0u64; cols];
        v[free] = 1;
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = (q - row[free] % q) % q;
        }
        basis.push(v);
    }
    basis
}

/// Basis of `{ x : x M = 0 }` for M given as rows.
fn fq_left_kernel(m: &[Vec<u64>], q: u64) -> Vec<Vec<u64>> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let t: Vec<Vec<u64>> = (0..cols).map(|c| (0..rows).map(|r| m[r][c]).collect()).collect();
    fq_nullspace(&t, q, rows)
}

fn fq_mat_mul(a: &[Vec<u64>], b: &[Vec<u64>], q: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![0u64; m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l] % q == 0 {
                continue;
            }
            let f = a[i][l] % q;
            for j in 0..m {
                out[i][j] = (out[i][j] + mulq(f, b[l][j], q)) % q;
            }
        }
    }
    out
}

#[inline]
fn mulq(a: u64, b: u64, q: u64) -> u64 {
    (a as u128 * b as u128 % q as u128) as u64
}

fn fq_identity(n: usize) -> Vec<Vec<u64>> {
    (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect()
}

/// Minimal polynomial (monic, constant first) of a square matrix over F_q,
/// found as the first linear dependence among the flattened powers.
fn fq_matrix_minpoly(m: &[Vec<u64>], q: u64) -> Vec<u64> {
    let d = m.len();
    let mut powers: Vec<Vec<u64>> = Vec::new(); // flattened M^k
    let mut cur = fq_identity(d);
    for _ in 0..=d {
        powers.push(cur.iter().flatten().copied().collect());
        cur = fq_mat_mul(&cur, m, q);
    }
    // find smallest k with M^k dependent on earlier powers
    for k in 1..=d {
        let mut sys: Vec<Vec<u64>> = (0..k).map(|i| powers[i].clone()).collect();
        sys.push(powers[k].clone());
        let kernel = fq_left_kernel(&sys, q);
        if let Some(rel) = kernel.iter().find(|v| v[k] != 0) {
            let inv = fq_inv(rel[k], q);
            let mut p: Vec<u64> = rel[..=k].iter().map(|&c| mulq(c, inv, q)).collect();
            let lead = p[k];
            debug_assert_eq!(lead, 1);
            // normalize sign convention: monic already
            p.truncate(k + 1);
            return p;
        }
    }
    // full degree: characteristic = minimal; solve with all powers
    let mut sys: Vec<Vec<u64>> = powers[..d].to_vec();
    sys.push(powers[d].clone());
    let kernel = fq_left_kernel(&sys, q);
    let rel = kernel.iter().find(|v| v[d] != 0).expect("Cayley-Hamilton");
    let inv = fq_inv(rel[d], q);
    rel[..=d].iter().map(|&c| mulq(c, inv, q)).collect()
}

// ---------------------------------------------------------------------------

fn bmod(x: &BigInt, q: u64) -> u64 {
    let r = x % BigInt::from(q);
    let r = if r.is_negative() { r + BigInt::from(q) } else { r };
    r.to_u64().unwrap()
}

/// Multiply two polynomials with BigInt coefficients and reduce modulo the
/// monic polynomial `f` (exact, no denominators introduced).
fn polymulmod(a: &[BigInt], b: &[BigInt], f: &[BigInt]) -> Vec<BigInt> {
    let n = f.len() - 1;
    let mut prod = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                prod[i + j] += x * y;
            }
        }
    }
    // reduce: theta^n = -(f_0 + ... + f_{n-1} theta^{n-1})
    for k in (n..prod.len()).rev() {
        let c = prod[k].clone();
        if c.is_zero() {
            continue;
        }
        prod[k] = BigInt::zero();
        for j in 0..n {
            let t = &c * &f[j];
            prod[k - n + j] -= t;
        }
    }
    prod.truncate(n);
    prod.resize(n, BigInt::zero());
    prod
}

struct WorkOrder {
    poly: Vec<BigInt>,
    n: usize,
    den: BigInt,
    basis: IntMat,
}

impl WorkOrder {
    /// mul_table over the current basis; errors if products are not in the
    /// basis span with integer coordinates.
    fn mul_table(&self) -> Result<Vec<IntMat>, OrderError> {
        let n = self.n;
        let bt: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| BigRational::from(self.basis[j][i].clone()))
                    .collect()
            })
            .collect();
        let mut table = Vec::with_capacity(n);
        for i in 0..n {
            let mut row_i = Vec::with_capacity(n);
            for j in 0..n {
                let prod = polymulmod(&self.basis[i], &self.basis[j], &self.poly);
                // coords x with x * basis = prod / den
                let rhs: Vec<BigRational> = prod
                    .iter()
                    .map(|c| BigRational::new(c.clone(), self.den.clone()))
                    .collect();
                let sol = rat_solve(&bt, &rhs).ok_or(OrderError::NonIntegralStructure)?;
                let mut coords = Vec::with_capacity(n);
                for s in sol {
                    if !s.is_integer() {
                        return Err(OrderError::NonIntegralStructure);
                    }
                    coords.push(s.to_integer());
                }
                row_i.push(coords);
            }
            table.push(row_i);
        }
        Ok(table)
    }

    /// One round-2 step at q. Returns true if the order grew.
    fn enlarge_at(&mut self, q: u64) -> Result<bool, OrderError> {
        let n = self.n;
        let table = self.mul_table()?;
        let amul = |x: &[u64], y: &[u64]| -> Vec<u64> {
            let mut out = vec![0u64; n];
            for i in 0..n {
                if x[i] == 0 {
                    continue;
                }
                for j in 0..n {
                    if y[j] == 0 {
                        continue;
                    }
                    let f = mulq(x[i], y[j], q);
                    for k in 0..n {
                        out[k] = (out[k] + mulq(f, bmod(&table[i][j][k], q), q)) % q;
                    }
                }
            }
            out
        };
        // Frobenius matrix and radical
        let mut frob = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![0u64; n];
            e[i] = 1;
            // e^q by square and multiply
            let mut acc = {
                let mut one = vec![0u64; n];
                one[0] = 0; // identity is w_0? not necessarily; build from coords of 1
                one
            };
            // coordinates of 1 in the basis
            let bt: Vec<Vec<BigRational>> = (0..n)
                .map(|r| {
                    (0..n)
                        .map(|c| BigRational::from(self.basis[c][r].clone()))
                        .collect()
                })
                .collect();
            let mut rhs = vec![BigRational::zero(); n];
            rhs[0] = BigRational::from(self.den.clone());
            let one_coords = rat_solve(&bt, &rhs).ok_or(OrderError::NonIntegralStructure)?;
            for (k, s) in one_coords.iter().enumerate() {
                if !s.is_integer() {
                    return Err(OrderError::NonIntegralStructure);
                }
                acc[k] = bmod(&s.to_integer(), q);
            }
            let mut base = e;
            let mut exp = q;
            while exp > 0 {
                if exp & 1 == 1 {
                    acc = amul(&acc, &base);
                }
                base = amul(&base, &base);
                exp >>= 1;
            }
            frob.push(acc);
        }
        let mut power = frob.clone();
        let mut qm = q;
        while qm < n as u64 {
            power = fq_mat_mul(&power, &frob, q);
            qm *= q;
        }
        let radical = fq_left_kernel(&power, q);
        if radical.is_empty() {
            return Ok(false);
        }
        // ideal I = qO + radical lifts, as integer rows in O-coords
        let mut i_rows: IntMat = Vec::new();
        for i in 0..n {
            let mut r = vec![BigInt::zero(); n];
            r[i] = BigInt::from(q);
            i_rows.push(r);
        }
        for v in &radical {
            i_rows.push(v.iter().map(|&x| BigInt::from(x)).collect());
        }
        let hi = hnf(i_rows);
        // ring of multipliers: kernel over F_q of x -> (coords of x*g_j wrt hi, mod q)
        let mut sys: Vec<Vec<u64>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n * n);
            for g in &hi {
                // w_i * g in O-coords
                let mut prod = vec![BigInt::zero(); n];
                for (j, gj) in g.iter().enumerate() {
                    if gj.is_zero() {
                        continue;
                    }
                    for k in 0..n {
                        prod[k] += gj * &table[i][j][k];
                    }
                }
                let coords = solve_upper_triangular(&hi, &prod)
                    .ok_or(OrderError::NonIntegralStructure)?;
                for c in coords {
                    row.push(bmod(&c, q));
                }
            }
            sys.push(row);
        }
        let kernel = fq_left_kernel(&sys, q);
        if kernel.is_empty() {
            return Ok(false);
        }
        // new order: old basis rows scaled by q, plus kernel lifts, over den*q
        let mut rows: IntMat = self
            .basis
            .iter()
            .map(|r| r.iter().map(|x| x * BigInt::from(q)).collect())
            .collect();
        for v in &kernel {
            // x = sum v_i w_i; x/q has power-basis numerator sum v_i basis_i over den*q
            let mut r = vec![BigInt::zero(); n];
            for (i, &vi) in v.iter().enumerate() {
                if vi != 0 {
                    for k in 0..n {
                        r[k] += BigInt::from(vi) * &self.basis[i][k];
                    }
                }
            }
            rows.push(r);
        }
        let mut h = hnf(rows);
        let mut new_den = &self.den * BigInt::from(q);
        // normalize common content
        let mut g = new_den.clone();
        for row in &h {
            for x in row {
                g = gcd_big(&g, x);
            }
        }
        if g > BigInt::one() {
            for row in h.iter_mut() {
                for x in row.iter_mut() {
                    *x = &*x / &g;
                }
            }
            new_den = new_den / &g;
        }
        let grew = h != self.basis || new_den != self.den;
        self.basis = h;
        self.den = new_den;
        Ok(grew)
    }
}

fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

/// Solve `x * H = v` for integer x with H a full-rank HNF (row echelon,
/// pivot of row i in column i). Returns None if not solvable over Z.
fn solve_upper_triangular(h: &IntMat, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = h.len();
    let mut v = v.to_vec();
    let mut x = vec![BigInt::zero(); n];
    for i in 0..n {
        if h[i][i].is_zero() {
            return None;
        }
        let (quo, rem) = num_integer::Integer::div_rem(&v[i], &h[i][i]);
        if !rem.is_zero() {
            return None;
        }
        for k in i..n {
            let t = &quo * &h[i][k];
            v[k] -= t;
        }
        x[i] = quo;
    }
    if v.iter().all(|c| c.is_zero()) {
        Some(x)
    } else {
        None
    }
}

pub fn maximal_order(poly: &[BigInt]) -> Result<MaximalOrder, OrderError> {
    let n = crate::polyarith::degree(poly);
    if poly[n] != BigInt::one() {
        return Err(OrderError::NotMonic);
    }
    let disc0 = poly_disc(poly);
    if disc0.is_zero() {
        return Err(OrderError::SingularPolynomial);
    }
    let disc_u = disc0.abs().to_u64().ok_or(OrderError::DiscriminantTooLarge)?;
    let mut work = WorkOrder {
        poly: poly.to_vec(),
        n,
        den: BigInt::one(),
        basis: crate::lattice::identity_int(n),
    };
    for (q, e) in factorize(disc_u).factors.iter().copied() {
        if e < 2 {
            continue;
        }
        loop {
            if !work.enlarge_at(q)? {
                break;
            }
        }
    }
    // index = den^n / det(basis)
    let det = rat_det(&rat_from_int(&work.basis)).to_integer().abs();
    let denn = num_traits::pow::pow(work.den.clone(), n);
    if (&denn % &det) != BigInt::zero() {
        return Err(OrderError::NonIntegralStructure);
    }
    let index = denn / &det;
    let disc = &disc0 / (&index * &index);
    let mul_table = work.mul_table()?;
    // traces of basis elements, then the Gram of the trace form
    let trace_w: Vec<BigInt> = (0..n)
        .map(|k| {
            let mut t = BigInt::zero();
            for j in 0..n {
                t += &mul_table[k][j][j];
            }
            t
        })
        .collect();
    let trace_form: IntMat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut t = BigInt::zero();
                    for k in 0..n {
                        t += &mul_table[i][j][k] * &trace_w[k];
                    }
                    t
                })
                .collect()
        })
        .collect();
    Ok(MaximalOrder {
        poly: poly.to_vec(),
        degree: n,
        den: work.den,
        basis: work.basis,
        disc,
        index,
        mul_table,
        trace_form,
    })
}

impl MaximalOrder {
    pub fn zero(&self) -> Elem {
        vec![BigInt::zero(); self.degree]
    }

    /// Coordinates of the rational integer m.
    pub fn from_integer(&self, m: i64) -> Elem {
        let one = self.one();
        one.iter().map(|c| c * BigInt::from(m)).collect()
    }

    pub fn one(&self) -> Elem {
        let n = self.degree;
        let bt: Vec<Vec<BigRational>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| BigRational::from(self.basis[c][r].clone()))
                    .collect()
            })
            .collect();
        let mut rhs = vec![BigRational::zero(); n];
        rhs[0] = BigRational::from(self.den.clone());
        rat_solve(&bt, &rhs)
            .expect("basis spans 1")
            .into_iter()
            .map(|s| s.to_integer())
            .collect()
    }

    /// Coordinates of theta, the root of the defining polynomial.
    pub fn theta(&self) -> Elem {
        let n = self.degree;
        let bt: Vec<Vec<BigRational>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| BigRational::from(self.basis[c][r].clone()))
                    .collect()
            })
            .collect();
        let mut rhs = vec![BigRational::zero(); n];
        rhs[1] = BigRational::from(self.den.clone());
        rat_solve(&bt, &rhs)
            .expect("basis spans theta")
            .into_iter()
            .map(|s| s.to_integer())
            .collect()
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let n = self.degree;
        let mut out = vec![BigInt::zero(); n];
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[j].is_zero() {
                    continue;
                }
                let f = &a[i] * &b[j];
                for k in 0..n {
                    out[k] += &f * &self.mul_table[i][j][k];
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &Elem, mut e: u64) -> Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Matrix of multiplication by a: row j = coordinates of a * w_j.
    pub fn mult_matrix(&self, a: &Elem) -> IntMat {
        let n = self.degree;
        (0..n)
            .map(|j| {
                let mut e = self.zero();
                e[j] = BigInt::one();
                self.mul(a, &e)
            })
            .collect()
    }

    pub fn trace(&self, a: &Elem) -> BigInt {
        let m = self.mult_matrix(a);
        (0..self.degree).map(|j| m[j][j].clone()).sum()
    }

    pub fn norm(&self, a: &Elem) -> BigInt {
        rat_det(&rat_from_int(&self.mult_matrix(a))).to_integer()
    }

    /// Tr(a*b); equals the sum over embeddings of sigma(a) sigma(b).
    pub fn trace_pairing(&self, a: &Elem, b: &Elem) -> BigInt {
        let n = self.degree;
        let mut t = BigInt::zero();
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[j].is_zero() {
                    t += &a[i] * &b[j] * &self.trace_form[i][j];
                }
            }
        }
        t
    }

    /// The real roots of the defining polynomial, isolated exactly by a
    /// Sturm chain, then polished to f64 by bisection; ascending order.
    /// The fields in scope are totally real, so all roots are returned.
    pub fn real_embeddings(&self) -> Vec<f64> {
        real_roots(&self.poly)
    }

    /// sigma(a) at the embedding sending theta to `root`.
    pub fn embed(&self, a: &Elem, root: f64) -> f64 {
        let n = self.degree;
        let den = big_to_f64(&self.den);
        let mut val = 0.0f64;
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            // basis element i at the root
            let mut b = 0.0f64;
            for k in (0..n).rev() {
                b = b * root + big_to_f64(&self.basis[i][k]);
            }
            val += big_to_f64(&a[i]) * b / den;
        }
        val
    }
}

pub fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

fn eval_rat(f: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in f.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// All real roots of a squarefree integer polynomial, via Sturm-chain
/// isolation with exact rational arithmetic and final bisection to f64.
pub fn real_roots(poly: &[BigInt]) -> Vec<f64> {
    let f: Vec<BigRational> = poly.iter().map(|c| BigRational::from(c.clone())).collect();
    let mut chain: Vec<Vec<BigRational>> = Vec::new();
    chain.push(f.clone());
    let fp: Vec<BigRational> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from(BigInt::from(i)))
        .collect();
    chain.push(fp);
    loop {
        let k = chain.len();
        let rem = rat_poly_rem(&chain[k - 2], &chain[k - 1]);
        if rem.iter().all(|c| c.is_zero()) {
            break;
        }
        chain.push(rem.iter().map(|c| -c).collect());
    }
    let variations = |x: &BigRational| -> usize {
        let mut count = 0;
        let mut last = 0i32;
        for p in &chain {
            let v = eval_rat(p, x);
            let s = if v.is_zero() {
                0
            } else if v > BigRational::zero() {
                1
            } else {
                -1
            };
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    };
    // Cauchy bound
    let n = crate::polyarith::degree(poly);
    let lead = poly[n].clone();
    let mut m = BigInt::one();
    for c in &poly[..n] {
        let t = c.abs() / lead.abs() + 1;
        if t > m {
            m = t;
        }
    }
    let m = BigRational::from(m + 1);
    let mut stack = vec![(-m.clone(), m.clone())];
    let mut isolated: Vec<(BigRational, BigRational)> = Vec::new();
    while let Some((a, b)) = stack.pop() {
        let roots = variations(&a) as i64 - variations(&b) as i64;
        if roots <= 0 {
            continue;
        }
        if roots == 1 {
            isolated.push((a, b));
            continue;
        }
        let mid = (&a + &b) / BigRational::from(BigInt::from(2));
        if eval_rat(&f, &mid).is_zero() {
            // nudge the split point off the root
            let eps = (&b - &a) / BigRational::from(BigInt::from(1024));
            let mid2 = &mid + &eps;
            stack.push((a, mid2.clone()));
            stack.push((mid2, b));
        } else {
            stack.push((a, mid.clone()));
            stack.push((mid, b));
        }
    }
    let mut out: Vec<f64> = isolated
        .into_iter()
        .map(|(mut a, mut b)| {
            let two = BigRational::from(BigInt::from(2));
            for _ in 0..200 {
                let mid = (&a + &b) / &two;
                let v = eval_rat(&f, &mid);
                if v.is_zero() {
                    a = mid.clone();
                    b = mid;
                    break;
                }
                let va = eval_rat(&f, &a);
                if (va > BigRational::zero()) == (v > BigRational::zero()) {
                    a = mid;
                } else {
                    b = mid;
                }
                // stop once f64 can no longer tell the endpoints apart
                let fa = rat_to_f64(&a);
                let fb = rat_to_f64(&b);
                if fa == fb {
                    break;
                }
            }
            rat_to_f64(&((&a + &b) / BigRational::from(BigInt::from(2))))
        })
        .collect();
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out
}

pub fn rat_to_f64(x: &BigRational) -> f64 {
    big_to_f64(x.numer()) / big_to_f64(x.denom())
}

fn rat_poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let db = b.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
    let mut r = a.to_vec();
    loop {
        let dr = match r.iter().rposition(|c| !c.is_zero()) {
            Some(d) => d,
            None => return vec![BigRational::zero()],
        };
        if dr < db {
            r.truncate(dr + 1);
            return r;
        }
        let factor = &r[dr] / &b[db];
        for i in 0..=db {
            let t = &factor * &b[i];
            r[dr - db + i] -= t;
        }
        r[dr] = BigRational::zero();
    }
}

// ---------------------------------------------------------------------------
// ideals

/// Full-rank integral ideal as a canonical HNF lattice in order coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    pub hnf: IntMat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeFactor {
    pub q: u64,
    pub ideal: Ideal,
    pub e: u32,
    pub f: u32,
}

impl Ideal {
    /// Lattice closure of the given element rows under the order action is
    /// NOT taken; callers pass rows already closed under multiplication
    /// (products with all basis elements).
    pub fn from_rows(rows: IntMat) -> Ideal {
        Ideal { hnf: hnf(rows) }
    }

    pub fn norm(&self) -> BigInt {
        let mut n = BigInt::one();
        for (i, r) in self.hnf.iter().enumerate() {
            n *= r[i].abs();
        }
        n
    }

    pub fn contains(&self, v: &Elem) -> bool {
        solve_upper_triangular(&self.hnf, v).is_some()
    }

    pub fn unit_ideal(o: &MaximalOrder) -> Ideal {
        Ideal {
            hnf: crate::lattice::identity_int(o.degree),
        }
    }
}

/// The O-ideal generated by one element.
pub fn principal_ideal(o: &MaximalOrder, a: &Elem) -> Ideal {
    Ideal::from_rows(o.mult_matrix(a))
}

/// The O-ideal generated by a list of elements.
pub fn generated_ideal(o: &MaximalOrder, gens: &[Elem]) -> Ideal {
    let mut rows = Vec::new();
    for g in gens {
        rows.extend(o.mult_matrix(g));
    }
    Ideal::from_rows(rows)
}

pub fn ideal_mul(o: &MaximalOrder, a: &Ideal, b: &Ideal) -> Ideal {
    let mut rows = Vec::new();
    for x in &a.hnf {
        for y in &b.hnf {
            rows.push(o.mul(x, y));
        }
    }
    Ideal::from_rows(rows)
}

pub fn ideal_pow(o: &MaximalOrder, a: &Ideal, e: u32) -> Ideal {
    let mut acc = Ideal::unit_ideal(o);
    for _ in 0..e {
        acc = ideal_mul(o, &acc, a);
    }
    acc
}

/// `{ x in O : x * J contained in N(J) * O }`, which represents the inverse
/// ideal class of J: J * inverse_mod_norm(J) = N(J) * O.
pub fn inverse_mod_norm(o: &MaximalOrder, j: &Ideal) -> Ideal {
    let n = o.degree;
    let nj = j.norm();
    // rows (coords of w_i*g_1 .. w_i*g_n | e_i), plus (N e_jk | 0);
    // HNF rows supported on the trailing block give the solution lattice
    let cols = n * n;
    let mut rows: IntMat = Vec::new();
    for i in 0..n {
        let mut row = Vec::with_capacity(cols + n);
        let mut e = o.zero();
        e[i] = BigInt::one();
        for g in &j.hnf {
            let prod = o.mul(&e, g);
            row.extend(prod);
        }
        let mut tail = vec![BigInt::zero(); n];
        tail[i] = BigInt::one();
        row.extend(tail);
        rows.push(row);
    }
    for c in 0..cols {
        let mut row = vec![BigInt::zero(); cols + n];
        row[c] = nj.clone();
        rows.push(row);
    }
    let h = hnf(rows);
    let sol: IntMat = h
        .iter()
        .filter(|r| r[..cols].iter().all(|x| x.is_zero()))
        .map(|r| r[cols..].to_vec())
        .collect();
    Ideal::from_rows(sol)
}

// ---------------------------------------------------------------------------
// prime decomposition

struct ResidueAlgebra<'a> {
    o: &'a MaximalOrder,
    q: u64,
    table: Vec<Vec<Vec<u64>>>,
    one: Vec<u64>,
}

impl<'a> ResidueAlgebra<'a> {
    fn new(o: &'a MaximalOrder, q: u64) -> Self {
        let n = o.degree;
        let table = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| bmod(&o.mul_table[i][j][k], q)).collect())
                    .collect()
            })
            .collect();
        let one = o.one().iter().map(|c| bmod(c, q)).collect();
        ResidueAlgebra { o, q, table, one }
    }

    fn mul(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let n = self.o.degree;
        let q = self.q;
        let mut out = vec![0u64; n];
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0 {
                    continue;
                }
                let f = mulq(x[i], y[j], q);
                for k in 0..n {
                    out[k] = (out[k] + mulq(f, self.table[i][j][k], q)) % q;
                }
            }
        }
        out
    }

    fn pow(&self, x: &[u64], mut e: u64) -> Vec<u64> {
        let mut acc = self.one.clone();
        let mut base = x.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn radical(&self) -> Vec<Vec<u64>> {
        let n = self.o.degree;
        let mut qm = 1u64;
        let mut m = 0u32;
        while qm < n as u64 {
            qm *= self.q;
            m += 1;
        }
        let power: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                let mut e = vec![0u64; n];
                e[i] = 1;
                let mut x = e;
                for _ in 0..m.max(1) {
                    x = self.pow(&x, self.q);
                }
                x
            })
            .collect();
        fq_left_kernel(&power, self.q)
    }

    /// Multiplication-by-b matrix restricted to the span of `space`
    /// (rows in algebra coordinates); requires b*space within the span.
    fn mult_on_subspace(&self, b: &[u64], space: &[Vec<u64>]) -> Option<Vec<Vec<u64>>> {
        let d = space.len();
        let mut reduced = space.to_vec();
        let pivots = fq_rref(&mut reduced, self.q);
        let mut m = Vec::with_capacity(d);
        for s in space {
            let img = self.mul(b, s);
            let coords = express(&img, &reduced, &pivots, space, self.q)?;
            m.push(coords);
        }
        Some(m)
    }
}

/// Coordinates of v in terms of the original (unreduced) space rows, using
/// the rref of the space. Returns None if v is outside the span.
fn express(
    v: &[u64],
    rref: &[Vec<u64>],
    pivots: &[usize],
    _space: &[Vec<u64>],
    q: u64,
) -> Option<Vec<u64>> {
    // rref rows are a basis of the same span; coordinates over rref
    let mut v = v.to_vec();
    let mut coords = vec![0u64; rref.len()];
    for (i, (row, &pc)) in rref.iter().zip(pivots).enumerate() {
        let c = v[pc] % q;
        coords[i] = c;
        if c != 0 {
            for k in 0..v.len() {
                v[k] = (v[k] % q + q - mulq(c, row[k], q)) % q;
            }
        }
    }
    if v.iter().all(|&x| x % q == 0) {
        Some(coords)
    } else {
        None
    }
}

/// Splits a (unital, commutative) etale subspace of the residue algebra
/// into its field components; returns bases in algebra coordinates.
fn split_etale(
    alg: &ResidueAlgebra,
    space: Vec<Vec<u64>>,
    seed: u64,
) -> Result<Vec<Vec<Vec<u64>>>, OrderError> {
    let q = alg.q;
    // normalize to the rref basis so that operator matrices, kernel
    // coordinates and the span all refer to the same row basis
    let mut space = space;
    fq_rref(&mut space, q);
    let d = space.len();
    if d == 1 {
        return Ok(vec![space]);
    }
    // candidate separating elements: basis rows, sums of pairs, then
    // seeded pseudo-random combinations
    let mut state = seed | 1;
    let mut candidates: Vec<Vec<u64>> = space.clone();
    for i in 0..d {
        for j in (i + 1)..d {
            let s: Vec<u64> = space[i]
                .iter()
                .zip(&space[j])
                .map(|(a, b)| (a + b) % q)
                .collect();
            candidates.push(s);
        }
    }
    for _ in 0..200 {
        let mut v = vec![0u64; space[0].len()];
        for row in &space {
            let c = splitmix64(&mut state) % q;
            for (k, x) in row.iter().enumerate() {
                v[k] = (v[k] + mulq(c, *x, q)) % q;
            }
        }
        candidates.push(v);
    }
    for b in &candidates {
        let m = match alg.mult_on_subspace(b, &space) {
            Some(m) => m,
            None => continue,
        };
        let minpoly = fq_matrix_minpoly(&m, q);
        let factors = crate::polyarith::fq_factor(&minpoly, q, seed ^ 0xabcd);
        if factors.len() == 1 && factors[0].1 == 1 {
            if factors[0].0.len() - 1 == d {
                return Ok(vec![space]); // field
            }
            continue; // not separating
        }
        // split along the coprime factors
        let mut out = Vec::new();
        for (fi, _) in &factors {
            // evaluate fi at the matrix m
            let dd = m.len();
            let mut acc = vec![vec![0u64; dd]; dd];
            let mut powm = fq_identity(dd);
            for &c in fi.iter() {
                if c != 0 {
                    for r in 0..dd {
                        for cidx in 0..dd {
                            acc[r][cidx] = (acc[r][cidx] + mulq(c, powm[r][cidx], q)) % q;
                        }
                    }
                }
                powm = fq_mat_mul(&powm, &m, q);
            }
            let ker = fq_left_kernel(&acc, q);
            // kernel coords are over the subspace basis; map to algebra coords
            let comp: Vec<Vec<u64>> = ker
                .iter()
                .map(|kv| {
                    let mut v = vec![0u64; space[0].len()];
                    for (i, &c) in kv.iter().enumerate() {
                        for (k, x) in space[i].iter().enumerate() {
                            v[k] = (v[k] + mulq(c, *x, q)) % q;
                        }
                    }
                    v
                })
                .collect();
            out.extend(split_etale(alg, comp, seed.wrapping_mul(6364136223846793005).wrapping_add(1))?);
        }
        return Ok(out);
    }
    Err(OrderError::SplittingFailed)
}

/// Decomposes qO into prime ideals with ramification and residue degrees,
/// including at primes dividing the index of the equation order. The
/// factorization is verified: the product of `P^e` equals `qO`.
pub fn factor_rational_prime(o: &MaximalOrder, q: u64) -> Result<Vec<PrimeFactor>, OrderError> {
    let n = o.degree;
    let alg = ResidueAlgebra::new(o, q);
    let radical = alg.radical();
    // quotient by the radical: complement coordinates via rref pivots
    let (components, lift_rows): (Vec<Vec<Vec<u64>>>, Vec<Vec<u64>>) = if radical.is_empty() {
        let full: Vec<Vec<u64>> = fq_identity(n);
        (split_etale(&alg, full, 0x9e37)?, Vec::new())
    } else {
        let mut rref_rad = radical.clone();
        let rad_pivots = fq_rref(&mut rref_rad, q);
        let comp_cols: Vec<usize> = (0..n).filter(|c| !rad_pivots.contains(c)).collect();
        // quotient algebra basis = images of the complement columns;
        // multiplication follows from the algebra after reduction by R
        let reduce = |v: &[u64]| -> Vec<u64> {
            let mut v = v.to_vec();
            for (row, &pc) in rref_rad.iter().zip(&rad_pivots) {
                let c = v[pc] % q;
                if c != 0 {
                    for k in 0..n {
                        v[k] = (v[k] % q + q - mulq(c, row[k], q)) % q;
                    }
                }
            }
            v
        };
        let dim = comp_cols.len();
        let qalg_mul = |x: &[u64], y: &[u64]| -> Vec<u64> {
            // x, y in quotient coords
            let lift = |z: &[u64]| -> Vec<u64> {
                let mut v = vec![0u64; n];
                for (i, &c) in comp_cols.iter().enumerate() {
                    v[c] = z[i];
                }
                v
            };
            let prod = reduce(&alg.mul(&lift(x), &lift(y)));
            comp_cols.iter().map(|&c| prod[c]).collect()
        };
        // build a tiny wrapped algebra for the quotient by materializing a
        // mult table over the quotient basis
        let mut qtable = vec![vec![vec![0u64; dim]; dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let mut x = vec![0u64; dim];
                x[i] = 1;
                let mut y = vec![0u64; dim];
                y[j] = 1;
                qtable[i][j] = qalg_mul(&x, &y);
            }
        }
        let qone: Vec<u64> = {
            let r = reduce(&alg.one);
            comp_cols.iter().map(|&c| r[c]).collect()
        };
        let qorder_stub = MaximalOrder {
            poly: Vec::new(),
            degree: dim,
            den: BigInt::one(),
            basis: Vec::new(),
            disc: BigInt::zero(),
            index: BigInt::one(),
            mul_table: qtable
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
                        .collect()
                })
                .collect(),
            trace_form: Vec::new(),
        };
        let qalg = ResidueAlgebra {
            o: &qorder_stub,
            q,
            table: qtable,
            one: qone,
        };
        let comps = split_etale(&qalg, fq_identity(dim), 0x517e)?;
        // map quotient components back to algebra coordinates (coset reps)
        let mapped: Vec<Vec<Vec<u64>>> = comps
            .iter()
            .map(|comp| {
                comp.iter()
                    .map(|z| {
                        let mut v = vec![0u64; n];
                        for (i, &c) in comp_cols.iter().enumerate() {
                            v[c] = z[i];
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        (mapped, radical)
    };
    // maximal ideal for component i: radical + all other components
    let g = components.len();
    let mut factors = Vec::with_capacity(g);
    for i in 0..g {
        let mut rows: IntMat = Vec::new();
        for k in 0..n {
            let mut r = vec![BigInt::zero(); n];
            r[k] = BigInt::from(q);
            rows.push(r);
        }
        for lr in &lift_rows {
            rows.push(lr.iter().map(|&x| BigInt::from(x)).collect());
        }
        for (j, comp) in components.iter().enumerate() {
            if j != i {
                for v in comp {
                    rows.push(v.iter().map(|&x| BigInt::from(x)).collect());
                }
            }
        }
        let ideal = Ideal::from_rows(rows);
        let f = components[i].len() as u32;
        factors.push(PrimeFactor {
            q,
            ideal,
            e: 0,
            f,
        });
    }
    // ramification exponents by valuation of qO, then verify the product
    let q_ideal = {
        let mut rows: IntMat = Vec::new();
        for k in 0..n {
            let mut r = vec![BigInt::zero(); n];
            r[k] = BigInt::from(q);
            rows.push(r);
        }
        Ideal::from_rows(rows)
    };
    let mut product = Ideal::unit_ideal(o);
    let mut ef_sum = 0u32;
    for pf in factors.iter_mut() {
        let mut e = 0u32;
        let mut pk = Ideal::unit_ideal(o);
        loop {
            let next = ideal_mul(o, &pk, &pf.ideal);
            // qO subset of P^(e+1)?
            let ok = q_ideal.hnf.iter().all(|r| next.contains(r));
            if !ok {
                break;
            }
            pk = next;
            e += 1;
            if e > n as u32 {
                return Err(OrderError::NonIntegralStructure);
            }
        }
        pf.e = e;
        ef_sum += e * pf.f;
        product = ideal_mul(o, &product, &ideal_pow(o, &pf.ideal, e));
    }
    if ef_sum as usize != n || product != q_ideal {
        return Err(OrderError::NonIntegralStructure);
    }
    factors.sort_by(|a, b| a.ideal.hnf.cmp(&b.ideal.hnf));
    Ok(factors)
}
