//! Ideal class groups with principality witnesses, genus numbers, and the
//! abelian-Hilbert-class-field certificate.
//!
//! Principality is decided exactly: an ideal J is principal iff it contains
//! an element of norm +-N(J), and every element can be unit-scaled until its
//! log-embedding vector lies in a fundamental cell of the log-unit lattice.
//! That cell is tiled by a grid of targets t; around each target the
//! weighted square-sum `sum_k (x_k e^{-t_k})^2` of a generator is at most
//! `n * exp(2r)` with r the grid half-diagonal, so a short enumeration per
//! tile is a decision procedure, not a heuristic. The analytic class number
//! formula serves as an independent cross-check of the algebraic result.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cyclo::{compositum, AbelianFieldSpec};
use crate::lattice::{enumerate_short, lll_gram};
use crate::order::{
    big_to_f64, factor_rational_prime, ideal_mul, inverse_mod_norm, Elem, Ideal,
    MaximalOrder, OrderError,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassGroupError {
    Units(crate::units::UnitsError),
    Order(OrderError),
    /// Short-vector enumeration exceeded the node budget.
    EnumerationBudget,
    /// The analytic cross-check failed to land on an integer.
    AnalyticMismatch,
    /// The closure walk exceeded the Minkowski-bound class population.
    ClosureOverflow,
}

impl fmt::Display for ClassGroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassGroupError::Units(e) => write!(f, "unit computation failed: {e}"),
            ClassGroupError::Order(e) => write!(f, "order computation failed: {e}"),
            ClassGroupError::EnumerationBudget => write!(f, "ideal enumeration exceeded budget"),
            ClassGroupError::AnalyticMismatch => {
                write!(f, "analytic class number did not round to an integer")
            }
            ClassGroupError::ClosureOverflow => write!(f, "class closure failed to stabilize"),
        }
    }
}

impl From<crate::units::UnitsError> for ClassGroupError {
    fn from(e: crate::units::UnitsError) -> Self {
        ClassGroupError::Units(e)
    }
}

impl From<OrderError> for ClassGroupError {
    fn from(e: OrderError) -> Self {
        ClassGroupError::Order(e)
    }
}

/// Exact principality decision with witness: Some(alpha) with alpha
/// generating J, or None if no generator exists.
///
/// A generator has |N(alpha)| = N(J), so its log vector lies on the plane
/// `sum_k log|alpha_k| = log N(J)`; unit scaling moves it into the
/// fundamental cell of the log-unit lattice. Tiling that cell with targets
/// of half-diagonal r, some unit multiple of the generator satisfies
/// `sum_k (alpha_k e^{-t_k})^2 <= n e^{2r}` at one of the targets, so one
/// short weighted enumeration per tile decides principality.
pub fn is_principal(
    o: &MaximalOrder,
    units: &crate::units::UnitSystem,
    j: &Ideal,
    node_cap: u64,
) -> Result<Option<Elem>, ClassGroupError> {
    let n = o.degree;
    let nj = j.norm();
    if nj == BigInt::one() {
        return Ok(Some(o.one()));
    }
    let roots = o.real_embeddings();
    let logs: Vec<Vec<f64>> = units
        .units
        .iter()
        .map(|u| crate::units::unit_logs(o, &roots, u))
        .collect();
    // grid steps per log-unit basis vector, ~1.0 apart
    let steps: Vec<usize> = logs
        .iter()
        .map(|v| {
            let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
            libm::ceil(norm).max(1.0) as usize
        })
        .collect();
    let r = 0.5
        * logs
            .iter()
            .zip(&steps)
            .map(|(v, &m)| libm::sqrt(v.iter().map(|x| x * x).sum::<f64>()) / m as f64)
            .sum::<f64>()
        + 0.05;
    let bound_f = n as f64 * libm::exp(2.0 * r);
    let centroid = libm::log(big_to_f64(&nj)) / n as f64;
    let bound: BigRational =
        BigRational::from_float(bound_f * (1.0 + 1e-9)).ok_or(ClassGroupError::EnumerationBudget)?;
    // working precision: transforming the skew basis back to reduced form
    // cancels about 2 sum |v_i| + ln N(J) nats of leading bits
    let sum_norms: f64 = logs
        .iter()
        .map(|v| libm::sqrt(v.iter().map(|x| x * x).sum::<f64>()))
        .sum();
    let prec = 160
        + ((2.0 * sum_norms + libm::log(big_to_f64(&nj)).max(0.0))
            / core::f64::consts::LN_2) as u64;
    let hroots: Vec<BigRational> = roots
        .iter()
        .map(|&rt| hp_root(&o.poly, rt, prec))
        .collect();
    let emb: Vec<Vec<BigRational>> = j
        .hnf
        .iter()
        .map(|row| hroots.iter().map(|hr| hp_embed(o, row, hr, prec)).collect())
        .collect();
    // walk the grid in snake order so consecutive tiles are adjacent, and
    // carry the reduction transform: each tile then starts nearly reduced.
    // the weight vector moves by one precomputed per-axis factor per step
    let mut idx = vec![0usize; steps.len()];
    let mut dirs = vec![1i8; steps.len()];
    let mut u = crate::lattice::identity_int(n);
    let axis_fac: Vec<Vec<(BigRational, BigRational)>> = logs
        .iter()
        .zip(&steps)
        .map(|(v, &m)| {
            v.iter()
                .map(|&vk| {
                    let f = hp_exp_neg(vk / m as f64, prec);
                    let inv = dyadic_trunc(&f.recip(), prec);
                    (f, inv)
                })
                .collect()
        })
        .collect();
    let mut wt: Vec<BigRational> = {
        // starting tile: centroid plus half a step along every axis
        let mut t = vec![centroid; n];
        for (&m, v) in steps.iter().zip(&logs) {
            for (tk, vk) in t.iter_mut().zip(v) {
                *tk += 0.5 / m as f64 * vk;
            }
        }
        t.iter().map(|&tk| hp_exp_neg(tk, prec)).collect()
    };
    let mut emb_cur = emb;
    let mut rows_cur: Vec<Elem> = j.hnf.clone();
    loop {
        let w: Vec<Vec<BigRational>> = emb_cur
            .iter()
            .map(|er| {
                er.iter()
                    .zip(&wt)
                    .map(|(e, q)| dyadic_trunc(&(e * q), prec))
                    .collect()
            })
            .collect();
        let mut gram: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| {
                        let dot = w[i]
                            .iter()
                            .zip(&w[k])
                            .map(|(a, b)| a * b)
                            .fold(BigRational::zero(), |acc, x| acc + x);
                        dyadic_trunc(&dot, prec)
                    })
                    .collect()
            })
            .collect();
        let mut u2 = crate::lattice::identity_int(n);
        lll_gram(&mut gram, &mut u2);
        // fold this tile's reduction into the carried rows and embeddings
        let ident = u2 == crate::lattice::identity_int(n);
        if !ident {
            rows_cur = u2
                .iter()
                .map(|urow| {
                    let mut acc = o.zero();
                    for (c, row) in urow.iter().zip(&rows_cur) {
                        for (a, b) in acc.iter_mut().zip(row) {
                            *a += c * b;
                        }
                    }
                    acc
                })
                .collect();
            emb_cur = u2
                .iter()
                .map(|urow| {
                    (0..n)
                        .map(|k| {
                            let mut acc = BigRational::zero();
                            for (c, er) in urow.iter().zip(&emb_cur) {
                                if !c.is_zero() {
                                    acc += BigRational::from(c.clone()) * &er[k];
                                }
                            }
                            dyadic_trunc(&acc, prec)
                        })
                        .collect()
                })
                .collect();
        }
        let vecs = enumerate_short(&gram, &bound, node_cap)
            .map_err(|_| ClassGroupError::EnumerationBudget)?;
        for v in vecs {
            let mut alpha = o.zero();
            for (i, &vi) in v.iter().enumerate() {
                if vi != 0 {
                    for (a, b) in alpha.iter_mut().zip(&rows_cur[i]) {
                        *a += BigInt::from(vi) * b;
                    }
                }
            }
            if o.norm(&alpha).abs() == nj {
                return Ok(Some(alpha));
            }
        }
        // snake step: advance the first axis that can move, flipping the
        // direction of every axis that was stuck at its end
        let mut moved = false;
        for (a, &m) in steps.iter().enumerate() {
            let next = idx[a] as i64 + dirs[a] as i64;
            if next >= 0 && (next as usize) < m {
                idx[a] = next as usize;
                for (wk, fac) in wt.iter_mut().zip(&axis_fac[a]) {
                    let f = if dirs[a] > 0 { &fac.0 } else { &fac.1 };
                    *wk = dyadic_trunc(&(&*wk * f), prec);
                }
                moved = true;
                break;
            }
            dirs[a] = -dirs[a];
        }
        if !moved {
            break;
        }
    }
    Ok(None)
}

/// Rounds to the nearest dyadic rational keeping about `bits` significant
/// bits; relative error at most 2^-bits.
fn dyadic_trunc(x: &BigRational, bits: u64) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    let nb = x.numer().magnitude().bits() as i64;
    let db = x.denom().magnitude().bits() as i64;
    let shift = bits as i64 - (nb - db);
    if shift <= 0 {
        let s = (-shift) as usize;
        let q = round_div(x.numer(), &(x.denom().clone() << s));
        BigRational::from(q << s)
    } else {
        let s = shift as usize;
        let q = round_div(&(x.numer().clone() << s), x.denom());
        BigRational::new(q, BigInt::one() << s)
    }
}

/// Nearest-integer division for b > 0.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    BigInt::div_floor(&(a * 2 + b), &(b * 2))
}

fn hp_horner(coeffs: &[BigRational], x: &BigRational, bits: u64) -> BigRational {
    let mut acc = BigRational::zero();
    for c in coeffs.iter().rev() {
        acc = dyadic_trunc(&(acc * x + c), bits);
    }
    acc
}

/// Real root of a squarefree integer polynomial to about `bits` bits,
/// refined from an f64 seed by Newton iteration.
fn hp_root(poly: &[BigInt], seed: f64, bits: u64) -> BigRational {
    let p: Vec<BigRational> = poly.iter().map(|c| BigRational::from(c.clone())).collect();
    let dp: Vec<BigRational> = poly
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| BigRational::from(BigInt::from(i) * c))
        .collect();
    let mut x = BigRational::from_float(seed).expect("finite root seed");
    // precision doubles per step from ~50 correct bits
    let mut have = 40u64;
    while have < bits + 64 {
        let f = hp_horner(&p, &x, bits + 64);
        let df = hp_horner(&dp, &x, bits + 64);
        x = dyadic_trunc(&(&x - f / df), bits + 64);
        have *= 2;
    }
    x
}

/// e^{-t} to about `bits` bits for f64 `t`.
fn hp_exp_neg(t: f64, bits: u64) -> BigRational {
    let m = libm::round(t) as i64;
    let f = BigRational::from_float(t).expect("finite tile target")
        - BigRational::from(BigInt::from(m));
    // series for e^{-f}, |f| <= 0.5
    let mut sum = BigRational::one();
    let mut term = BigRational::one();
    let negf = -f;
    let mut k = 1u64;
    loop {
        term = dyadic_trunc(
            &(&term * &negf / BigRational::from(BigInt::from(k))),
            bits + 64,
        );
        if term.is_zero() {
            break;
        }
        sum += &term;
        let nb = term.numer().magnitude().bits() as i64;
        let db = term.denom().magnitude().bits() as i64;
        if db - nb > (bits + 32) as i64 {
            break;
        }
        k += 1;
    }
    // e^{-1} by its alternating series, then the integer power
    let mut einv = BigRational::one();
    let mut t1 = BigRational::one();
    let mut i = 1u64;
    while t1.denom().magnitude().bits() < (bits + 64) as u64 {
        t1 = &t1 / BigRational::from(BigInt::from(i));
        if i % 2 == 1 {
            einv -= &t1;
        } else {
            einv += &t1;
        }
        i += 1;
    }
    let scale = if m >= 0 {
        hp_pow(&einv, m as u64, bits + 64)
    } else {
        hp_pow(&dyadic_trunc(&einv.recip(), bits + 64), (-m) as u64, bits + 64)
    };
    dyadic_trunc(&(sum * scale), bits)
}

fn hp_pow(base: &BigRational, mut e: u64, bits: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = dyadic_trunc(&(&acc * &b), bits);
        }
        b = dyadic_trunc(&(&b * &b), bits);
        e >>= 1;
    }
    acc
}

/// sigma(a) at the high-precision root, over the integral basis.
fn hp_embed(o: &MaximalOrder, a: &Elem, root: &BigRational, bits: u64) -> BigRational {
    let n = o.degree;
    let mut val = BigRational::zero();
    for i in 0..n {
        if a[i].is_zero() {
            continue;
        }
        let mut b = BigRational::zero();
        for k in (0..n).rev() {
            b = dyadic_trunc(&(b * root + BigRational::from(o.basis[i][k].clone())), bits + 64);
        }
        val += BigRational::from(a[i].clone()) * b;
    }
    dyadic_trunc(&(val / BigRational::from(o.den.clone())), bits)
}

#[derive(Debug, Clone)]
pub struct ClassGroup {
    pub order: u64,
    pub exponent: u64,
    pub is_cyclic: bool,
    /// A class-group generator (class of full order) when the group is
    /// nontrivial and cyclic.
    pub generator: Option<Ideal>,
    /// One ideal per class, the unit class first, with each class order.
    pub representatives: Vec<(Ideal, u64)>,
    /// Verified principality witnesses: (representative^order, generator
    /// element); each witness element generates exactly the stated ideal.
    pub relation_log: Vec<(Ideal, Elem)>,
}

fn same_class(
    o: &MaximalOrder,
    units: &crate::units::UnitSystem,
    a: &Ideal,
    b: &Ideal,
    node_cap: u64,
) -> Result<bool, ClassGroupError> {
    if a == b {
        return Ok(true);
    }
    let t = ideal_mul(o, a, &inverse_mod_norm(o, b));
    Ok(is_principal(o, units, &t, node_cap)?.is_some())
}

/// Full ideal class group: classes of all prime ideals below the Minkowski
/// bound, closed under multiplication, each with its exact order.
pub fn class_group(
    o: &MaximalOrder,
    units: &crate::units::UnitSystem,
    node_cap: u64,
) -> Result<ClassGroup, ClassGroupError> {
    let n = o.degree;
    // totally real Minkowski bound: n!/n^n * sqrt(disc)
    let mut fact = 1.0f64;
    for k in 2..=n {
        fact *= k as f64;
    }
    let bound = fact / libm::pow(n as f64, n as f64) * libm::sqrt(big_to_f64(&o.disc));
    let bound_u = libm::floor(bound) as u64;
    let mut reps: Vec<Ideal> = vec![Ideal::unit_ideal(o)];
    let mut frontier: Vec<Ideal> = Vec::new();
    let mut q = 1u64;
    while q < bound_u {
        q += 1;
        if !crate::zmod::is_prime(q) {
            continue;
        }
        for pf in factor_rational_prime(o, q)? {
            if pf.ideal.norm().to_u64().map(|m| m <= bound_u) == Some(true) {
                frontier.push(pf.ideal);
            }
        }
    }
    // classify the frontier, then close under products
    let cap = 4096usize;
    let mut pending = frontier;
    while let Some(j) = pending.pop() {
        let mut known = false;
        for r in &reps {
            if same_class(o, units, &j, r, node_cap)? {
                known = true;
                break;
            }
        }
        if known {
            continue;
        }
        // new class: extend closure by products with every rep, including
        // the new class itself (j^2 may lie in a class with no small prime)
        reps.push(j.clone());
        for r in reps.clone() {
            pending.push(ideal_mul(o, &j, &r));
        }
        if reps.len() > cap {
            return Err(ClassGroupError::ClosureOverflow);
        }
    }
    // class orders, with a verified principality witness at each order
    let mut representatives = Vec::with_capacity(reps.len());
    let mut relation_log = Vec::with_capacity(reps.len());
    let mut exponent = 1u64;
    let order = reps.len() as u64;
    for r in reps {
        let mut k = 1u64;
        let mut acc = r.clone();
        loop {
            if let Some(w) = is_principal(o, units, &acc, node_cap)? {
                debug_assert_eq!(crate::order::principal_ideal(o, &w), acc);
                relation_log.push((acc.clone(), w));
                break;
            }
            acc = ideal_mul(o, &acc, &r);
            k += 1;
            if k > order {
                return Err(ClassGroupError::ClosureOverflow);
            }
        }
        exponent = crate::zmod::lcm(exponent, k);
        representatives.push((r, k));
    }
    representatives.sort_by_key(|(_, k)| *k);
    let is_cyclic = exponent == order;
    let generator = if order > 1 && is_cyclic {
        representatives
            .iter()
            .find(|(_, k)| *k == order)
            .map(|(r, _)| r.clone())
    } else {
        None
    };
    Ok(ClassGroup {
        order,
        exponent,
        is_cyclic,
        generator,
        representatives,
        relation_log,
    })
}

/// Genus number of an abelian field: product of the ramification indices of
/// all ramified primes, divided by the degree.
pub fn genus_number(spec: &AbelianFieldSpec) -> u64 {
    let canon = spec.at_conductor();
    let c = canon.conductor();
    if c <= 1 {
        return 1;
    }
    let mut prod = 1u64;
    for q in crate::zmod::factorize(c).primes() {
        prod *= canon.ramification_index(q);
    }
    prod / canon.degree()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcfStatus {
    /// h = 1: the Hilbert class field is K itself.
    Trivial,
    /// h = g and the genus field realizes H(K), abelian over Q.
    Certified,
    /// No abelian-ness conclusion; such fields are excluded from pairing.
    Unknown,
}

#[derive(Debug, Clone)]
pub struct GenusCertificate {
    pub genus_number: u64,
    /// (q, e(q)) for every ramified rational prime.
    pub ramified_primes: Vec<(u64, u64)>,
    pub hcf_abelian: HcfStatus,
    /// Concrete Hilbert class field inside the cyclotomic lattice, present
    /// when the status is Trivial (K itself) or Certified (the genus field).
    pub hilbert_class_field: Option<AbelianFieldSpec>,
}

/// Genus data only: g and the ramified primes, no abelian-ness claim.
pub fn genus_certificate(spec: &AbelianFieldSpec) -> GenusCertificate {
    let canon = spec.at_conductor();
    let c = canon.conductor();
    let mut ramified = Vec::new();
    let mut prod = 1u64;
    if c > 1 {
        for q in crate::zmod::factorize(c).primes() {
            let e = canon.ramification_index(q);
            ramified.push((q, e));
            prod *= e;
        }
    }
    let deg = canon.degree();
    assert!(prod % deg == 0, "genus product not divisible by degree");
    GenusCertificate {
        genus_number: prod / deg,
        ramified_primes: ramified,
        hcf_abelian: HcfStatus::Unknown,
        hilbert_class_field: None,
    }
}

/// Certificate that the Hilbert class field is abelian over Q. Trivial when
/// h = 1; Certified when h = g and the genus field — the compositum of K
/// with the degree-p subfields of the prime conductors dividing c — has
/// degree h*[K:Q], contains K, is totally real, and is unramified over K.
/// When the status is decisive, h must divide g and be a power of p.
pub fn hcf_abelian_certificate(
    spec: &AbelianFieldSpec,
    class_number: u64,
) -> Result<GenusCertificate, ClassGroupError> {
    let canon = spec.at_conductor();
    let mut cert = genus_certificate(&canon);
    let g = cert.genus_number;
    let p = canon.degree();
    // a decisive status needs h | g (abelian HCF lies in the genus field)
    // and h a power of p (the class group is an elementary p-module here)
    let decisive_consistency = |h: u64| -> bool {
        if g % h != 0 {
            return false;
        }
        let mut t = h;
        while t % p == 0 {
            t /= p;
        }
        t == 1
    };
    if class_number == 1 {
        // the genus field is unramified abelian over K, so g | h forces g = 1
        if g == 1 {
            cert.hcf_abelian = HcfStatus::Trivial;
            cert.hilbert_class_field = Some(canon);
        } else {
            cert.hcf_abelian = HcfStatus::Unknown;
        }
        return Ok(cert);
    }
    if class_number != g {
        cert.hcf_abelian = HcfStatus::Unknown;
        return Ok(cert);
    }
    // genus field construction inside the cyclotomic lattice
    let c = canon.conductor();
    let mut m = canon.clone();
    for q in crate::zmod::factorize(c).primes() {
        for sub in crate::cyclo::enumerate_prime_degree_subfields(q, p) {
            m = compositum(&m, &sub).at_conductor();
        }
    }
    let degree_ok = m.degree() == g * p;
    let contains_k = compositum(&m, &canon).same_field(&m);
    let totally_real = m.is_totally_real();
    let mut unram = true;
    for q in crate::zmod::factorize(crate::zmod::lcm(m.conductor(), c)).primes() {
        if m.ramification_index(q) != canon.ramification_index(q) {
            unram = false;
        }
    }
    if degree_ok && contains_k && totally_real && unram {
        if !decisive_consistency(class_number) {
            return Err(ClassGroupError::ClosureOverflow);
        }
        cert.hcf_abelian = HcfStatus::Certified;
        cert.hilbert_class_field = Some(m);
    } else {
        cert.hcf_abelian = HcfStatus::Unknown;
    }
    Ok(cert)
}

/// Analytic class number of a totally real abelian field of prime degree:
/// `h = sqrt(disc) * prod |L(1,chi)| / (2^(n-1) * R)`, with each L-value
/// evaluated by the finite conductor sum over `ln(2 sin(pi a / c))`.
/// Returns the rounded integer and the rounding residue.
pub fn analytic_class_number(
    spec: &AbelianFieldSpec,
    regulator: f64,
) -> Result<(u64, f64), ClassGroupError> {
    let h = analytic_value(spec, regulator);
    let rounded = libm::round(h);
    let residue = libm::fabs(h - rounded);
    if rounded < 0.5 || residue > 1e-4 {
        return Err(ClassGroupError::AnalyticMismatch);
    }
    Ok((rounded as u64, residue))
}

/// The raw analytic value h*R_true/R for the supplied regulator R; equals
/// the class number when R is the fundamental regulator, and exposes the
/// unit-lattice index otherwise.
pub fn analytic_value(spec: &AbelianFieldSpec, regulator: f64) -> f64 {
    let canon = spec.at_conductor();
    let c = canon.conductor();
    let p = canon.degree();
    let cosets = canon.cyclic_cosets();
    // coset index per residue
    let mut idx = vec![usize::MAX; c as usize];
    for (j, coset) in cosets.iter().enumerate() {
        for &a in coset {
            idx[a as usize] = j;
        }
    }
    let pi = core::f64::consts::PI;
    let mut l_product = 1.0f64;
    for k in 1..p {
        let mut re = 0.0f64;
        let mut im = 0.0f64;
        for a in 1..c {
            let j = idx[a as usize];
            if j == usize::MAX {
                continue;
            }
            let phase = -2.0 * pi * (k as f64) * (j as f64) / (p as f64);
            let w = libm::log(2.0 * libm::sin(pi * a as f64 / c as f64));
            re += libm::cos(phase) * w;
            im += libm::sin(phase) * w;
        }
        let l = libm::sqrt(re * re + im * im) / libm::sqrt(c as f64);
        l_product *= l;
    }
    let disc = libm::pow(c as f64, (p - 1) as f64);
    libm::sqrt(disc) * l_product / (libm::pow(2.0, (p - 1) as f64) * regulator)
}

/// Unit system whose sublattice index (against the analytic class number
/// formula) has been driven to 1: the raw analytic value is h*k with k the
/// index of the found unit lattice, so the smallest k making v/k an integer
/// pins the index down, and saturation at the prime factors of k removes
/// it. Errors when a detected index cannot be saturated away.
pub fn analytically_complete_units(
    o: &MaximalOrder,
    spec: &AbelianFieldSpec,
    node_cap: u64,
) -> Result<crate::units::UnitSystem, ClassGroupError> {
    let mut sys = crate::units::find_units(o, Some(spec), node_cap)?;
    for _round in 0..8 {
        let v = analytic_value(spec, sys.regulator);
        // smallest k with v / k an integer h >= 1 within tolerance
        let mut detected: Option<u64> = None;
        for k in 1u64..=24 {
            let hf = v / k as f64;
            let h = libm::round(hf);
            if h >= 1.0 && libm::fabs(hf - h) < 0.02 {
                detected = Some(k);
                break;
            }
        }
        let Some(k) = detected else {
            return Err(ClassGroupError::AnalyticMismatch);
        };
        if k == 1 {
            return Ok(sys);
        }
        let mut grew = false;
        for ell in crate::zmod::factorize(k).primes() {
            if crate::units::saturate_at(o, &mut sys, ell)? {
                grew = true;
                break;
            }
        }
        if !grew {
            return Err(ClassGroupError::AnalyticMismatch);
        }
    }
    Err(ClassGroupError::AnalyticMismatch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::enumerate_prime_degree_subfields;
    use crate::order::maximal_order;
    use crate::units::find_units;

    fn bp(coeffs: &[i64]) -> Vec<BigInt> {
        coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }

    const CAP: u64 = 20_000_000;

    #[test]
    fn class_number_one_conductor_7() {
        let o = maximal_order(&bp(&[1, -2, -1, 1])).unwrap();
        let units = find_units(&o, None, CAP).unwrap();
        let cg = class_group(&o, &units, CAP).unwrap();
        assert_eq!(cg.order, 1);
        assert_eq!(cg.exponent, 1);
    }

    #[test]
    fn class_number_three_conductor_91() {
        let subs = enumerate_prime_degree_subfields(91, 3);
        for spec in subs.iter().filter(|s| s.conductor() == 91) {
            let poly = spec.defining_polynomial().unwrap();
            let o = maximal_order(&poly.coefficients).unwrap();
            let units = find_units(&o, Some(spec), CAP).unwrap();
            let cg = class_group(&o, &units, CAP).unwrap();
            assert_eq!(cg.order, 3, "conductor 91 field {:?}", poly.coefficients);
            assert_eq!(cg.exponent, 3);
            // analytic cross-check
            let (h, _res) = analytic_class_number(spec, units.regulator).unwrap();
            assert_eq!(h, 3);
        }
    }

    #[test]
    fn analytic_matches_algebraic_h1() {
        let subs = enumerate_prime_degree_subfields(91, 3);
        let spec = subs.iter().find(|s| s.conductor() == 7).unwrap();
        let o = maximal_order(&bp(&[1, -2, -1, 1])).unwrap();
        let units = find_units(&o, None, CAP).unwrap();
        let (h, res) = analytic_class_number(spec, units.regulator).unwrap();
        assert_eq!(h, 1);
        assert!(res < 1e-6);
    }

    #[test]
    fn genus_numbers() {
        let subs = enumerate_prime_degree_subfields(91, 3);
        for s in &subs {
            let g = genus_number(s);
            if s.conductor() == 91 {
                assert_eq!(g, 3);
            } else {
                assert_eq!(g, 1);
            }
        }
    }

    #[test]
    fn hcf_certificate_conductor_91() {
        let subs = enumerate_prime_degree_subfields(91, 3);
        let spec = subs.iter().find(|s| s.conductor() == 91).unwrap();
        let cert = hcf_abelian_certificate(spec, 3).unwrap();
        assert_eq!(cert.hcf_abelian, HcfStatus::Certified);
        assert_eq!(cert.genus_number, 3);
        let mut rp = cert.ramified_primes.clone();
        rp.sort();
        assert_eq!(rp, vec![(7, 3), (13, 3)]);
        let hcf = cert.hilbert_class_field.unwrap();
        assert_eq!(hcf.degree(), 9);
        assert_eq!(hcf.conductor(), 91);
        // and the trivial case
        let k7 = subs.iter().find(|s| s.conductor() == 7).unwrap();
        let cert7 = hcf_abelian_certificate(k7, 1).unwrap();
        assert_eq!(cert7.hcf_abelian, HcfStatus::Trivial);
        assert!(cert7.hilbert_class_field.unwrap().same_field(k7));
        // mismatched class number must not certify
        let bad = hcf_abelian_certificate(spec, 1).unwrap();
        assert_eq!(bad.hcf_abelian, HcfStatus::Unknown);
    }

    #[test]
    fn principality_witnesses_generate() {
        let o = maximal_order(&bp(&[1, -2, -1, 1])).unwrap();
        let units = find_units(&o, None, CAP).unwrap();
        // the ideal (2) is principal with generator of norm 8
        let two = o.from_integer(2);
        let j = crate::order::principal_ideal(&o, &two);
        let w = is_principal(&o, &units, &j, CAP).unwrap().unwrap();
        assert_eq!(o.norm(&w).abs(), BigInt::from(8));
        assert_eq!(crate::order::principal_ideal(&o, &w), j);
    }
}
