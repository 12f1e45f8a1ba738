//! Dense univariate polynomial helpers: integer discriminants via Sylvester
//! determinants, and factorization over prime fields F_q.
//!
//! Polynomials are coefficient vectors with the constant term first.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::lattice::rat_det;
use crate::zmod::{mul_mod, pow_mod};

pub fn degree(f: &[BigInt]) -> usize {
    f.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

pub fn eval_bigint(f: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in f.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub fn derivative(f: &[BigInt]) -> Vec<BigInt> {
    if f.len() <= 1 {
        return vec![BigInt::zero()];
    }
    f.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

/// Resultant of two integer polynomials via the Sylvester matrix.
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let n = degree(f);
    let m = degree(g);
    if n == 0 {
        return f[0].clone().pow(m as u32);
    }
    if m == 0 {
        return g[0].clone().pow(n as u32);
    }
    let size = n + m;
    let mut s = vec![vec![BigRational::zero(); size]; size];
    for row in 0..m {
        for (k, c) in f.iter().take(n + 1).enumerate() {
            s[row][row + n - k] = BigRational::from(c.clone());
        }
    }
    for row in 0..n {
        for (k, c) in g.iter().take(m + 1).enumerate() {
            s[m + row][row + m - k] = BigRational::from(c.clone());
        }
    }
    let d = rat_det(&s);
    debug_assert!(d.is_integer());
    d.to_integer()
}

/// Discriminant of an integer polynomial: `(-1)^(n(n-1)/2) Res(f, f') / lc(f)`.
pub fn poly_disc(f: &[BigInt]) -> BigInt {
    let n = degree(f);
    let res = resultant(f, &derivative(f));
    let lc = &f[n];
    let signed = if (n * (n - 1) / 2) % 2 == 1 { -res } else { res };
    &signed / lc
}

// ---- arithmetic in F_q[x] ----
// Coefficients are u64 residues; q is an odd prime below 2^31.

fn trim(f: &mut Vec<u64>) {
    while f.len() > 1 && *f.last().unwrap() == 0 {
        f.pop();
    }
}

pub fn poly_mod_q(f: &[BigInt], q: u64) -> Vec<u64> {
    let qq = BigInt::from(q);
    let mut out: Vec<u64> = f
        .iter()
        .map(|c| {
            let r = ((c % &qq) + &qq) % &qq;
            let (_, digits) = r.to_u64_digits();
            digits.first().copied().unwrap_or(0)
        })
        .collect();
    trim(&mut out);
    out
}

pub fn fq_mul(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, q)) % q;
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo `b` (b nonzero).
pub fn fq_rem(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    if db == 0 {
        return vec![0];
    }
    let lc_inv = pow_mod(b[db], q - 2, q);
    while r.len() - 1 >= db && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let factor = mul_mod(r[dr], lc_inv, q);
        for k in 0..=db {
            let idx = dr - db + k;
            r[idx] = (r[idx] + q - mul_mod(factor, b[k], q)) % q;
        }
        trim(&mut r);
        if r.len() - 1 < db || (r.len() == 1 && r[0] == 0) {
            break;
        }
    }
    r
}

pub fn fq_gcd(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        let r = fq_rem(&a, &b, q);
        a = b;
        b = r;
    }
    // monic normalization
    let d = a.len() - 1;
    if a[d] != 0 && a[d] != 1 {
        let inv = pow_mod(a[d], q - 2, q);
        for c in a.iter_mut() {
            *c = mul_mod(*c, inv, q);
        }
    }
    a
}

/// `base^e mod (f, q)` for a polynomial base.
pub fn fq_powmod(base: &[u64], mut e: u64, f: &[u64], q: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = fq_rem(base, f, q);
    while e > 0 {
        if e & 1 == 1 {
            acc = fq_rem(&fq_mul(&acc, &b, q), f, q);
        }
        b = fq_rem(&fq_mul(&b, &b, q), f, q);
        e >>= 1;
    }
    acc
}

fn fq_derivative(f: &[u64], q: u64) -> Vec<u64> {
    if f.len() <= 1 {
        return vec![0];
    }
    let mut out: Vec<u64> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| mul_mod(i as u64 % q, c, q))
        .collect();
    trim(&mut out);
    out
}

fn fq_div_exact(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    // long division, remainder known to vanish
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let mut quot = vec![0u64; r.len().saturating_sub(db)];
    let lc_inv = pow_mod(b[db], q - 2, q);
    while r.len() - 1 >= db && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let factor = mul_mod(r[dr], lc_inv, q);
        quot[dr - db] = factor;
        for k in 0..=db {
            let idx = dr - db + k;
            r[idx] = (r[idx] + q - mul_mod(factor, b[k], q)) % q;
        }
        trim(&mut r);
        if r.len() == 1 && r[0] == 0 {
            break;
        }
        if r.len() - 1 < db {
            break;
        }
    }
    trim(&mut quot);
    quot
}

/// All distinct roots of `f` in F_q (Cantor-Zassenhaus on the split part).
pub fn fq_distinct_roots(f: &[u64], q: u64, seed: u64) -> Vec<u64> {
    let mut f = f.to_vec();
    trim(&mut f);
    if f.len() == 1 {
        return Vec::new();
    }
    // x^q - x restricted to f
    let x = vec![0u64, 1];
    let xq = fq_powmod(&x, q, &f, q);
    let mut diff = xq.clone();
    while diff.len() < 2 {
        diff.push(0);
    }
    diff[1] = (diff[1] + q - 1) % q;
    let mut split = fq_gcd(&f, &diff, q);
    let mut roots = Vec::new();
    if q <= 64 {
        // brute force is cheaper than splitting for tiny q
        for r in 0..q {
            let mut acc = 0u64;
            for &c in split.iter().rev() {
                acc = (mul_mod(acc, r, q) + c) % q;
            }
            if acc == 0 {
                roots.push(r);
            }
        }
        roots.sort_unstable();
        return roots;
    }
    let mut state = seed ^ q;
    let mut stack = Vec::new();
    if split.len() > 1 {
        stack.push(core::mem::take(&mut split));
    }
    while let Some(g) = stack.pop() {
        let d = g.len() - 1;
        if d == 0 {
            continue;
        }
        if d == 1 {
            // root of c0 + c1 x
            let r = mul_mod((q - g[0]) % q, pow_mod(g[1], q - 2, q), q);
            roots.push(r);
            continue;
        }
        // random split: gcd(g, (x+a)^((q-1)/2) - 1)
        loop {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let a = state % q;
            let shifted = vec![a, 1];
            let mut h = fq_powmod(&shifted, (q - 1) / 2, &g, q);
            h[0] = (h[0] + q - 1) % q;
            trim(&mut h);
            let g1 = fq_gcd(&g, &h, q);
            let d1 = g1.len() - 1;
            if d1 > 0 && d1 < d {
                let g2 = fq_div_exact(&g, &g1, q);
                stack.push(g1);
                stack.push(g2);
                break;
            }
        }
    }
    roots.sort_unstable();
    roots
}

/// Full factorization of a monic `f` over F_q as `(factor, multiplicity)`
/// pairs, factors monic and sorted by (degree, coefficients).
pub fn fq_factor(f: &[u64], q: u64, seed: u64) -> Vec<(Vec<u64>, u32)> {
    let mut f = f.to_vec();
    trim(&mut f);
    let d = f.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    // make monic
    if f[d] != 1 {
        let inv = pow_mod(f[d], q - 2, q);
        for c in f.iter_mut() {
            *c = mul_mod(*c, inv, q);
        }
    }
    let fp = fq_derivative(&f, q);
    if fp.len() == 1 && fp[0] == 0 {
        // f = g(x^q); over F_q the coefficients are their own q-th roots
        let mut g = Vec::new();
        for (i, &c) in f.iter().enumerate() {
            if i % q as usize == 0 {
                g.push(c);
            } else {
                debug_assert_eq!(c, 0);
            }
        }
        let inner = fq_factor(&g, q, seed);
        return inner
            .into_iter()
            .map(|(p, m)| (p, m * q as u32))
            .collect();
    }
    let sf = fq_gcd(&f, &fp, q);
    if sf.len() > 1 {
        // not squarefree: factor the squarefree part, read multiplicities off f
        let part = fq_div_exact(&f, &sf, q);
        let base = fq_factor(&part, q, seed);
        let mut out = Vec::new();
        let mut rem = f.clone();
        for (p, _) in base {
            let mut m = 0u32;
            loop {
                let r = fq_rem(&rem, &p, q);
                if r.len() == 1 && r[0] == 0 {
                    m += 1;
                    rem = fq_div_exact(&rem, &p, q);
                } else {
                    break;
                }
            }
            out.push((p, m));
        }
        // factors whose multiplicity is divisible by q do not show in f/gcd(f,f')
        if rem.len() > 1 {
            for (p, m) in fq_factor(&rem, q, seed ^ 0x9e37) {
                out.push((p, m));
            }
        }
        out.sort();
        out.sort_by_key(|(p, _)| p.len());
        return out;
    }
    // squarefree: distinct-degree then equal-degree splitting
    let mut out: Vec<(Vec<u64>, u32)> = Vec::new();
    let mut rem = f.clone();
    let x = vec![0u64, 1];
    let mut xqi = x.clone();
    let mut deg = 1u32;
    while rem.len() - 1 >= 1 {
        if (rem.len() - 1) < 2 * deg as usize {
            out.push((rem.clone(), 1));
            break;
        }
        xqi = fq_powmod(&xqi, q, &rem, q);
        let mut diff = xqi.clone();
        while diff.len() < 2 {
            diff.push(0);
        }
        diff[1] = (diff[1] + q - 1) % q;
        let g = fq_gcd(&rem, &diff, q);
        if g.len() > 1 {
            for p in equal_degree_split(&g, deg as usize, q, seed) {
                out.push((p, 1));
            }
            rem = fq_div_exact(&rem, &g, q);
            xqi = fq_rem(&xqi, &rem, q);
        }
        deg += 1;
    }
    out.sort();
    out.sort_by_key(|(p, _)| p.len());
    out
}

fn equal_degree_split(g: &[u64], d: usize, q: u64, seed: u64) -> Vec<Vec<u64>> {
    let mut done = Vec::new();
    let mut stack = vec![g.to_vec()];
    let mut state = seed ^ q ^ d as u64;
    while let Some(h) = stack.pop() {
        let dh = h.len() - 1;
        if dh == d {
            done.push(h);
            continue;
        }
        loop {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            // random polynomial of degree < dh
            let mut r: Vec<u64> = (0..dh)
                .map(|_| {
                    state = state
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    state % q
                })
                .collect();
            trim(&mut r);
            let mut t2;
            if q == 2 {
                // characteristic 2: split along the trace map
                // T(r) = r + r^2 + ... + r^(2^(d-1)) mod h
                let mut acc = fq_rem(&r, &h, q);
                let mut t = acc.clone();
                for _ in 1..d {
                    acc = fq_rem(&fq_mul(&acc, &acc, q), &h, q);
                    if t.len() < acc.len() {
                        t.resize(acc.len(), 0);
                    }
                    for (i, &c) in acc.iter().enumerate() {
                        t[i] ^= c;
                    }
                }
                t2 = t;
                trim(&mut t2);
            } else {
                let e = (pow_mod_u128(q, d as u32) - 1) / 2;
                let mut t = fq_powmod_u128(&r, e, &h, q);
                t[0] = (t[0] + q - 1) % q;
                t2 = t;
                trim(&mut t2);
            }
            let h1 = fq_gcd(&h, &t2, q);
            let d1 = h1.len() - 1;
            if d1 > 0 && d1 < dh {
                let h2 = fq_div_exact(&h, &h1, q);
                stack.push(h1);
                stack.push(h2);
                break;
            }
        }
    }
    done
}

fn pow_mod_u128(q: u64, d: u32) -> u128 {
    (0..d).fold(1u128, |acc, _| acc * q as u128)
}

fn fq_powmod_u128(base: &[u64], mut e: u128, f: &[u64], q: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = fq_rem(base, f, q);
    while e > 0 {
        if e & 1 == 1 {
            acc = fq_rem(&fq_mul(&acc, &b, q), f, q);
        }
        b = fq_rem(&fq_mul(&b, &b, q), f, q);
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(coeffs: &[i64]) -> Vec<BigInt> {
        coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn disc_of_table_polynomials() {
        // x^3 - x^2 - 2x + 1: conductor 7 field, disc 49
        assert_eq!(poly_disc(&bp(&[1, -2, -1, 1])), BigInt::from(49));
        // x^3 - x^2 - 30x - 27: disc 9 * 91^2
        assert_eq!(poly_disc(&bp(&[-27, -30, -1, 1])), BigInt::from(74529));
        // x^3 - x^2 - 4x - 1: conductor 13, disc 169
        assert_eq!(poly_disc(&bp(&[-1, -4, -1, 1])), BigInt::from(169));
    }

    #[test]
    fn roots_mod_q() {
        // x^3 - x^2 - 2x + 1 splits mod 13 (13 = 6 mod 7 is in {1,6})
        let f = poly_mod_q(&bp(&[1, -2, -1, 1]), 13);
        assert_eq!(fq_distinct_roots(&f, 13, 1).len(), 3);
        // irreducible mod 3
        let f3 = poly_mod_q(&bp(&[1, -2, -1, 1]), 3);
        assert!(fq_distinct_roots(&f3, 3, 1).is_empty());
        // large prime path
        let f10009 = poly_mod_q(&bp(&[1, -2, -1, 1]), 10009);
        let roots = fq_distinct_roots(&f10009, 10009, 1);
        // 10009 mod 7 = 6, so the polynomial splits completely
        assert_eq!(roots.len(), 3);
        for &r in &roots {
            let v = (mul_mod(mul_mod(r, r, 10009), r, 10009) + 10009
                - mul_mod(r, r, 10009)
                + 10009
                - mul_mod(2, r, 10009)
                + 1)
                % 10009;
            assert_eq!(v % 10009, 0);
        }
    }

    #[test]
    fn factor_mod_q_patterns() {
        // totally ramified: mod 7 the conductor-7 polynomial is a cube
        let f = poly_mod_q(&bp(&[1, -2, -1, 1]), 7);
        let fac = fq_factor(&f, 7, 1);
        assert_eq!(fac.len(), 1);
        assert_eq!(fac[0].0.len() - 1, 1);
        assert_eq!(fac[0].1, 3);
        // inert: one cubic factor mod 3
        let f3 = poly_mod_q(&bp(&[1, -2, -1, 1]), 3);
        let fac3 = fq_factor(&f3, 3, 1);
        assert_eq!(fac3.len(), 1);
        assert_eq!(fac3[0].0.len() - 1, 3);
        assert_eq!(fac3[0].1, 1);
        // split: three linear factors mod 13
        let f13 = poly_mod_q(&bp(&[1, -2, -1, 1]), 13);
        let fac13 = fq_factor(&f13, 13, 1);
        assert_eq!(fac13.len(), 3);
        assert!(fac13.iter().all(|(p, m)| p.len() == 2 && *m == 1));
    }

    #[test]
    fn resultant_matches_known() {
        // Res(x^2 - 1, x - 2) = f(2) for monic f up to sign conventions
        let f = bp(&[-1, 0, 1]);
        let g = bp(&[-2, 1]);
        let r = resultant(&f, &g);
        assert_eq!(r.magnitude().to_u64_digits(), vec![3]);
    }
}
