//! Finite-height sieves over a residue progression.
//!
//! Given a residue u1 mod f from a pair certificate, this module collects
//! the primes p = u1 mod f in the window (X^(1-eps), X) whose half (p-1)/2
//! is prime or a balanced semiprime, reduces fundamental units modulo a
//! degree-1 prime above p, partitions the set by the three quadratic-residue
//! symbols, and scans each cell for unit primitive roots. Densities are
//! reported against X/log^2 X; nothing asymptotic is asserted.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_traits::Signed;

use crate::cyclo::AbelianFieldSpec;
use crate::order::{Elem, MaximalOrder};
use crate::polyarith::{fq_distinct_roots, poly_mod_q};
use crate::zmod::{self, mul_mod, pow_mod};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SieveError {
    BadParams(String),
    /// A unit reduced to zero modulo the chosen prime — impossible for a
    /// true unit; signals inconsistent inputs.
    ZeroSymbol { p: u64 },
    /// The defining polynomial has no root modulo p although p was expected
    /// to split completely.
    NoRoot { p: u64 },
}

impl fmt::Display for SieveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SieveError::BadParams(s) => write!(f, "bad sieve parameters: {s}"),
            SieveError::ZeroSymbol { p } => write!(f, "unit reduced to zero mod {p}"),
            SieveError::NoRoot { p } => write!(f, "no polynomial root mod {p}"),
        }
    }
}

/// Progression and window parameters. `a`, `b` bound the smaller factor of
/// a semiprime half; `epsilon` sets the window floor X^(1-epsilon).
#[derive(Debug, Clone, PartialEq)]
pub struct SieveParams {
    pub u1: u64,
    pub f: u64,
    pub epsilon: f64,
    pub a: f64,
    pub b: f64,
    pub x: u64,
}

impl SieveParams {
    /// Defaults: a = 0.30, b = 0.45, epsilon maximal with
    /// a < b/(1-epsilon) < 1/2 minus a safety margin of 1e-3.
    pub fn new(u1: u64, f: u64, x: u64) -> Result<SieveParams, SieveError> {
        let b = 0.45;
        let p = SieveParams {
            u1,
            f,
            epsilon: 1.0 - 2.0 * b - 1e-3,
            a: 0.30,
            b,
            x,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with(
        u1: u64,
        f: u64,
        x: u64,
        a: f64,
        b: f64,
        epsilon: f64,
    ) -> Result<SieveParams, SieveError> {
        let p = SieveParams { u1, f, epsilon, a, b, x };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), SieveError> {
        let err = |s: String| Err(SieveError::BadParams(s));
        if self.f % 16 != 0 {
            return err(format!("modulus {} is not divisible by 16", self.f));
        }
        if zmod::gcd(self.u1, self.f) != 1 {
            return err(format!("u1 {} shares a factor with {}", self.u1, self.f));
        }
        if self.u1 % 2 == 0 || zmod::gcd((self.u1 % self.f + self.f - 1) / 2 % self.f, self.f) != 1
        {
            return err(format!("(u1-1)/2 shares a factor with {}", self.f));
        }
        if !(self.a > 0.25 && self.a < self.b && self.b < 0.5) {
            return err(format!("need 1/4 < a < b < 1/2, got a={} b={}", self.a, self.b));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return err(format!("epsilon {} outside (0,1)", self.epsilon));
        }
        let stretched = self.b / (1.0 - self.epsilon);
        if !(self.a < stretched && stretched < 0.5) {
            return err(format!("need a < b/(1-eps) < 1/2, got {stretched}"));
        }
        if self.x < 100 {
            return err(format!("height bound {} below 100", self.x));
        }
        Ok(())
    }
}

/// Factorization shape of (p-1)/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfType {
    Prime,
    /// q1 <= q2, both prime.
    Semiprime { q1: u64, q2: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeRecord {
    pub p: u64,
    pub half: HalfType,
    /// Three quadratic-residue symbols, each -1 or +1.
    pub signature: [i32; 3],
    /// A unit candidate of full order p-1, when one exists.
    pub winner: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SieveReport {
    pub params: SieveParams,
    pub j_count: u64,
    pub m_count: u64,
    pub records: Vec<PrimeRecord>,
    pub m_n_counts: [u64; 8],
    pub dominant_n0: usize,
    pub winner_count: u64,
    pub density_ratio: f64,
}

fn window(params: &SieveParams) -> (u64, u64) {
    let lo = libm::pow(params.x as f64, 1.0 - params.epsilon);
    (libm::ceil(lo) as u64, params.x)
}

/// Primes p = u1 mod f in (X^(1-eps), X], stepping the progression and
/// testing each candidate deterministically.
fn progression_primes(params: &SieveParams) -> Vec<u64> {
    let (lo, hi) = window(params);
    let f = params.f;
    let mut p = lo - lo % f + params.u1 % f;
    if p <= lo {
        p += f;
    }
    let mut out = Vec::new();
    while p <= hi {
        if zmod::is_prime(p) {
            out.push(p);
        }
        p += f;
    }
    out
}

/// Classifies (p-1)/2 against the window: prime, or q1*q2 with both prime
/// and lo_q <= q1 <= hi_q (q1 <= q2). `None` when neither holds.
fn classify_half(half: u64, lo_q: f64, hi_q: f64) -> Option<HalfType> {
    if zmod::is_prime(half) {
        return Some(HalfType::Prime);
    }
    let fac = zmod::factorize(half);
    if fac.factors.len() == 2 && fac.factors.iter().all(|&(_, e)| e == 1) {
        let q1 = fac.factors[0].0.min(fac.factors[1].0);
        let q2 = fac.factors[0].0.max(fac.factors[1].0);
        if (q1 as f64) >= lo_q && (q1 as f64) <= hi_q {
            return Some(HalfType::Semiprime { q1, q2 });
        }
    }
    if fac.factors.len() == 1 && fac.factors[0].1 == 2 {
        let q = fac.factors[0].0;
        if (q as f64) >= lo_q && (q as f64) <= hi_q {
            return Some(HalfType::Semiprime { q1: q, q2: q });
        }
    }
    None
}

/// The progression set with X-relative semiprime window
/// X^a <= q1 <= X^b.
pub fn heath_brown_set(params: &SieveParams) -> Result<Vec<(u64, HalfType)>, SieveError> {
    params.validate()?;
    let xf = params.x as f64;
    let lo_q = libm::pow(xf, params.a);
    let hi_q = libm::pow(xf, params.b);
    Ok(progression_primes(params)
        .into_iter()
        .filter_map(|p| classify_half((p - 1) / 2, lo_q, hi_q).map(|h| (p, h)))
        .collect())
}

/// The split-prime set: progression primes that split completely in `k`
/// whose half is prime or a semiprime in the p-relative window
/// p^a < q1 < p^(b/(1-eps)).
pub fn m_epsilon_set(
    k: &AbelianFieldSpec,
    params: &SieveParams,
) -> Result<Vec<(u64, HalfType)>, SieveError> {
    params.validate()?;
    let mut out = Vec::new();
    for p in progression_primes(params) {
        if k.conductor() % p == 0 {
            continue;
        }
        if !k.splits_completely(p).unwrap_or(false) {
            continue;
        }
        let pf = p as f64;
        let lo_q = libm::pow(pf, params.a);
        let hi_q = libm::pow(pf, params.b / (1.0 - params.epsilon));
        if let Some(h) = classify_half((p - 1) / 2, lo_q, hi_q) {
            out.push((p, h));
        }
    }
    Ok(out)
}

/// Reduction of a unit modulo the degree-1 prime above p given by the
/// smallest root of the defining polynomial mod p.
pub fn unit_residue(o: &MaximalOrder, u: &Elem, p: u64) -> Result<u64, SieveError> {
    let fp = poly_mod_q(&o.poly, p);
    let roots = fq_distinct_roots(&fp, p, 1);
    let &r = roots.first().ok_or(SieveError::NoRoot { p })?;
    // u = sum_i c_i w_i with den * w_i integral rows in the power basis
    let den = bigint_mod(&o.den, p);
    let den_inv = pow_mod(den, p - 2, p);
    let mut acc = 0u64;
    let mut rpow = 1u64;
    let n = o.degree;
    let mut basis_at_r = alloc::vec![0u64; n];
    for j in 0..n {
        for (i, b) in basis_at_r.iter_mut().enumerate() {
            *b = (*b + mul_mod(bigint_mod(&o.basis[i][j], p), rpow, p)) % p;
        }
        rpow = mul_mod(rpow, r, p);
    }
    for (c, b) in u.iter().zip(&basis_at_r) {
        acc = (acc + mul_mod(bigint_mod(c, p), *b, p)) % p;
    }
    Ok(mul_mod(acc, den_inv, p))
}

fn bigint_mod(x: &BigInt, p: u64) -> u64 {
    let m = x % BigInt::from(p);
    let m = if m.is_negative() { m + BigInt::from(p) } else { m };
    u64::try_from(&m).expect("reduced residue")
}

/// Legendre symbols of three unit residues; zero is an inconsistency.
pub fn residue_signature(residues: &[u64; 3], p: u64) -> Result<[i32; 3], SieveError> {
    let mut sig = [0i32; 3];
    for (s, &r) in sig.iter_mut().zip(residues) {
        let j = zmod::jacobi_symbol(r as i64, p).expect("odd prime");
        if j == 0 {
            return Err(SieveError::ZeroSymbol { p });
        }
        *s = j;
    }
    Ok(sig)
}

/// Cell index in 0..8 from the sign tuple: bit i set when sig[i] = -1.
pub fn cell_index(sig: &[i32; 3]) -> usize {
    sig.iter()
        .enumerate()
        .map(|(i, &s)| if s == -1 { 1 << i } else { 0 })
        .sum()
}

/// Direct order test: x has order exactly p-1 mod p, using the known
/// factorization of p-1.
pub fn is_primitive_root(x: u64, p: u64, half: HalfType) -> bool {
    if x % p == 0 {
        return false;
    }
    let mut prime_divisors = alloc::vec![2u64];
    match half {
        HalfType::Prime => prime_divisors.push((p - 1) / 2),
        HalfType::Semiprime { q1, q2 } => {
            prime_divisors.push(q1);
            if q2 != q1 {
                prime_divisors.push(q2);
            }
        }
    }
    prime_divisors.iter().all(|&ell| pow_mod(x, (p - 1) / ell, p) != 1)
}

/// Scans the sign-adjusted unit residues for one of full order p-1: each
/// candidate is the unit or its negative, whichever is a quadratic
/// non-residue mod p (p = 3 mod 4 makes -1 a non-residue).
pub fn primitive_root_scan(
    residues: &[u64; 3],
    sig: &[i32; 3],
    p: u64,
    half: HalfType,
) -> Option<u64> {
    for (&r, &s) in residues.iter().zip(sig) {
        let candidate = if s == -1 { r } else { p - r };
        if is_primitive_root(candidate, p, half) {
            return Some(candidate);
        }
    }
    None
}

/// Count divided by X/log^2 X.
pub fn density_ratio(count: u64, x: u64) -> f64 {
    let l = libm::log(x as f64);
    count as f64 / (x as f64 / (l * l))
}

/// Unit data for the signature: two units from the first field, one from
/// the second.
pub struct SieveUnits<'a> {
    pub o1: &'a MaximalOrder,
    pub u1a: &'a Elem,
    pub u1b: &'a Elem,
    pub o2: &'a MaximalOrder,
    pub u2a: &'a Elem,
}

/// Full pipeline: progression set, split-prime subset, signatures,
/// partition, primitive-root scan, densities.
pub fn run_sieve(
    params: &SieveParams,
    k: &AbelianFieldSpec,
    units: &SieveUnits<'_>,
) -> Result<SieveReport, SieveError> {
    params.validate()?;
    let j = heath_brown_set(params)?;
    let m = m_epsilon_set(k, params)?;
    let mut records = Vec::with_capacity(m.len());
    let mut m_n_counts = [0u64; 8];
    let mut winner_count = 0u64;
    for &(p, half) in &m {
        let residues = [
            unit_residue(units.o1, units.u1a, p)?,
            unit_residue(units.o1, units.u1b, p)?,
            unit_residue(units.o2, units.u2a, p)?,
        ];
        let signature = residue_signature(&residues, p)?;
        m_n_counts[cell_index(&signature)] += 1;
        let winner = primitive_root_scan(&residues, &signature, p, half);
        if winner.is_some() {
            winner_count += 1;
        }
        records.push(PrimeRecord { p, half, signature, winner });
    }
    let m_count = records.len() as u64;
    let dominant_n0 = m_n_counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(SieveReport {
        params: params.clone(),
        j_count: j.len() as u64,
        m_count,
        records,
        m_n_counts,
        dominant_n0,
        winner_count,
        density_ratio: density_ratio(m_count, params.x),
    })
}

/// Geometric ladder of density ratios for trend inspection: X doubling from
/// x_start to x_end, progression-set counts only.
pub fn density_ladder(
    params: &SieveParams,
    x_start: u64,
    x_end: u64,
) -> Result<Vec<(u64, u64, f64)>, SieveError> {
    let mut out = Vec::new();
    let mut x = x_start;
    while x <= x_end {
        let mut q = params.clone();
        q.x = x;
        q.validate()?;
        let count = heath_brown_set(&q)?.len() as u64;
        out.push((x, count, density_ratio(count, x)));
        x *= 2;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_validation() {
        assert!(SieveParams::new(1455, 1456, 1_000_000).is_ok());
        // even u1
        assert!(SieveParams::new(2, 1456, 1_000_000).is_err());
        // modulus not divisible by 16
        assert!(SieveParams::new(3, 7, 1_000_000).is_err());
        // (u1-1)/2 sharing a factor: u1 = 15, f = 16 -> (u1-1)/2 = 7 ok;
        // u1 = 33, f = 16 -> 16 | f, (33-1)/2 = 16 shares 2
        assert!(SieveParams::with(33, 16, 10_000, 0.30, 0.45, 0.09).is_err());
        // window constraint violation
        assert!(SieveParams::with(3, 16, 10_000, 0.30, 0.45, 0.2).is_err());
    }

    #[test]
    fn safe_prime_analog() {
        // primes p = 3 mod 4, p <= 100, (p-1)/2 prime
        let got: Vec<u64> = (3..=100u64)
            .filter(|&p| p % 4 == 3 && zmod::is_prime(p) && zmod::is_prime((p - 1) / 2))
            .collect();
        assert_eq!(got, vec![7, 11, 23, 47, 59, 83]);
    }

    #[test]
    fn heath_brown_labels_recheck() {
        let params = SieveParams::new(1455, 1456, 1_000_000).unwrap();
        let set = heath_brown_set(&params).unwrap();
        assert!(!set.is_empty());
        let (lo, hi) = window(&params);
        for &(p, half) in &set {
            assert!(p > lo && p <= hi);
            assert_eq!(p % params.f, params.u1);
            assert!(zmod::is_prime(p));
            match half {
                HalfType::Prime => assert!(zmod::is_prime((p - 1) / 2)),
                HalfType::Semiprime { q1, q2 } => {
                    assert_eq!(q1 * q2, (p - 1) / 2);
                    assert!(zmod::is_prime(q1) && zmod::is_prime(q2));
                    assert!(q1 <= q2);
                    let xf = params.x as f64;
                    assert!((q1 as f64) >= libm::pow(xf, params.a));
                    assert!((q1 as f64) <= libm::pow(xf, params.b));
                }
            }
        }
    }

    #[test]
    fn primitive_root_examples() {
        assert!(is_primitive_root(3, 7, HalfType::Prime));
        assert!(!is_primitive_root(2, 7, HalfType::Prime));
        // legendre(-1, p) = -1 for p = 3 mod 4
        assert_eq!(zmod::jacobi_symbol(-1, 7).unwrap(), -1);
    }

    #[test]
    fn full_run_modulus_1456() {
        use crate::cyclo::{compositum, enumerate_prime_degree_subfields};
        use crate::order::maximal_order;
        use crate::units::find_units;
        let k7 = &enumerate_prime_degree_subfields(7, 3)[0];
        let k13 = &enumerate_prime_degree_subfields(13, 3)[0];
        let o1 = maximal_order(&k7.defining_polynomial().unwrap().coefficients).unwrap();
        let o2 = maximal_order(&k13.defining_polynomial().unwrap().coefficients).unwrap();
        let s1 = find_units(&o1, None, 2_000_000).unwrap();
        let s2 = find_units(&o2, None, 2_000_000).unwrap();
        let k = compositum(k7, k13).at_conductor();
        let params = SieveParams::new(1455, 1456, 1_000_000).unwrap();
        let units = SieveUnits {
            o1: &o1,
            u1a: &s1.units[0],
            u1b: &s1.units[1],
            o2: &o2,
            u2a: &s2.units[0],
        };
        let rep = run_sieve(&params, &k, &units).unwrap();
        assert!(rep.m_count > 0);
        assert_eq!(rep.m_n_counts.iter().sum::<u64>(), rep.m_count);
        assert!(rep.winner_count > 0);
        for rec in &rep.records {
            assert_eq!(rec.p % 1456, 1455);
            // -1 is a non-residue (p = 3 mod 4) and every winner passes the
            // direct order test
            assert_eq!(zmod::jacobi_symbol(-1, rec.p).unwrap(), -1);
            assert!(k.splits_completely(rec.p).unwrap());
            if let Some(w) = rec.winner {
                assert!(is_primitive_root(w, rec.p, rec.half));
            }
        }
    }

    #[test]
    fn cell_partition_is_exhaustive() {
        let mut seen = [false; 8];
        for s1 in [-1, 1] {
            for s2 in [-1, 1] {
                for s3 in [-1, 1] {
                    seen[cell_index(&[s1, s2, s3])] = true;
                }
            }
        }
        assert!(seen.iter().all(|&b| b));
    }
}
