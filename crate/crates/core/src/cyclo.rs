//! Subfields of cyclotomic fields through the Galois correspondence.
//!
//! An abelian number field is encoded as a cyclotomic level `n` together
//! with the subgroup of `(Z/nZ)^×` fixing it. Conductors, ramification
//! indices, composita, Frobenius classes and Gaussian-period defining
//! polynomials are all read off from this data, exactly.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_traits::Zero;

use crate::polyarith::{fq_distinct_roots, fq_factor, poly_disc, poly_mod_q};
use crate::zmod::{
    euler_phi, factorize, gcd, is_prime, lcm, unit_group, SubgroupModN,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycloError {
    /// Frobenius is undefined at primes dividing the level.
    PrimeDividesLevel { q: u64 },
    /// A Gaussian-period symmetric function failed to reduce to an integer.
    NonIntegralCoefficient,
    /// The period polynomial failed its irreducibility certificate.
    NotIrreducible,
    /// disc(period polynomial) != conductor^(p-1).
    DiscriminantMismatch,
    /// identify_field input must be squarefree.
    NotSquarefree,
    /// Two candidates still match after raising the prime bound to its cap.
    AmbiguousIdentification,
    /// Spec construction data is inconsistent.
    InvalidSpec(&'static str),
}

impl fmt::Display for CycloError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CycloError::PrimeDividesLevel { q } => write!(f, "prime {q} divides the level"),
            CycloError::NonIntegralCoefficient => {
                write!(f, "period symmetric function is not a rational integer")
            }
            CycloError::NotIrreducible => write!(f, "period polynomial is not irreducible"),
            CycloError::DiscriminantMismatch => {
                write!(f, "period polynomial discriminant does not equal conductor^(p-1)")
            }
            CycloError::NotSquarefree => write!(f, "polynomial is not squarefree"),
            CycloError::AmbiguousIdentification => {
                write!(f, "two candidate fields match the split-prime fingerprint")
            }
            CycloError::InvalidSpec(msg) => write!(f, "invalid field spec: {msg}"),
        }
    }
}

/// An abelian number field: subfield of `Q(zeta_level)` fixed by
/// `fixing_subgroup`. Two specs denote the same field iff they agree after
/// re-expression at their conductors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianFieldSpec {
    level: u64,
    fixing: SubgroupModN,
    degree: u64,
}

impl AbelianFieldSpec {
    pub fn new(level: u64, fixing: SubgroupModN) -> Result<Self, CycloError> {
        if fixing.modulus != level {
            return Err(CycloError::InvalidSpec("fixing subgroup modulus != level"));
        }
        let phi = euler_phi(level);
        let h = fixing.order();
        if h == 0 || phi % h != 0 {
            return Err(CycloError::InvalidSpec("subgroup order does not divide phi(level)"));
        }
        Ok(AbelianFieldSpec {
            level,
            fixing,
            degree: phi / h,
        })
    }

    /// The rational field Q presented at a given level.
    pub fn rational(level: u64) -> Self {
        AbelianFieldSpec {
            level,
            fixing: SubgroupModN::full(level),
            degree: 1,
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn fixing_subgroup(&self) -> &SubgroupModN {
        &self.fixing
    }

    /// Smallest divisor `m` of the level such that the kernel of
    /// `(Z/level)^× -> (Z/mZ)^×` lies inside the fixing subgroup.
    pub fn conductor(&self) -> u64 {
        let fac = factorize(self.level);
        let mut divisors = vec![1u64];
        for &(p, e) in &fac.factors {
            let mut next = Vec::new();
            for d in &divisors {
                let mut pk = 1u64;
                for _ in 0..=e {
                    next.push(d * pk);
                    pk *= p;
                }
            }
            divisors = next;
        }
        divisors.sort_unstable();
        for m in divisors {
            if self.reduction_kernel_inside_fixing(m) {
                return m.max(1);
            }
        }
        self.level
    }

    fn reduction_kernel_inside_fixing(&self, m: u64) -> bool {
        // kernel = { x coprime to level : x = 1 mod m }
        let mut x = 1u64;
        while x < self.level.max(2) {
            if gcd(x, self.level) == 1 && !self.fixing.contains(x) {
                return false;
            }
            x += m;
            if m == 0 {
                break;
            }
        }
        true
    }

    /// Canonical presentation at the conductor.
    pub fn at_conductor(&self) -> AbelianFieldSpec {
        let c = self.conductor();
        if c == self.level {
            return self.clone();
        }
        let mut elems: Vec<u64> = self.fixing.elements.iter().map(|&x| x % c.max(1)).collect();
        elems.sort_unstable();
        elems.dedup();
        if c == 1 {
            return AbelianFieldSpec {
                level: 1,
                fixing: SubgroupModN::from_sorted_elements(1, vec![0]),
                degree: 1,
            };
        }
        let fixing = SubgroupModN::from_sorted_elements(c, elems);
        let phi = euler_phi(c);
        AbelianFieldSpec {
            level: c,
            degree: phi / fixing.order(),
            fixing,
        }
    }

    /// Same field test (compare canonical presentations).
    pub fn same_field(&self, other: &AbelianFieldSpec) -> bool {
        self.at_conductor() == other.at_conductor()
    }

    /// Re-express at a multiple `m` of the current level.
    pub fn lift_to_level(&self, m: u64) -> AbelianFieldSpec {
        assert!(m % self.level == 0, "lift target must be a multiple of the level");
        if m == self.level {
            return self.clone();
        }
        let elems: Vec<u64> = (1..m)
            .filter(|&x| gcd(x, m) == 1 && self.fixing.contains(x % self.level))
            .collect();
        let fixing = SubgroupModN::from_sorted_elements(m, elems);
        AbelianFieldSpec {
            level: m,
            degree: self.degree,
            fixing,
        }
    }

    /// True iff complex conjugation (`-1 mod level`) fixes the field.
    pub fn is_totally_real(&self) -> bool {
        self.level <= 2 || self.fixing.contains(self.level - 1)
    }

    /// Ramification index of the rational prime `q`, via the inertia
    /// subgroup `I_q` = kernel of reduction to the prime-to-q part of the
    /// level (this is also the standard dictionary at q = 2).
    pub fn ramification_index(&self, q: u64) -> u64 {
        let mut v = 0u32;
        let mut n = self.level;
        while n % q == 0 {
            n /= q;
            v += 1;
        }
        if v == 0 {
            return 1;
        }
        let m = n; // prime-to-q part
        let mut inertia_size = 0u64;
        let mut inertia_in_fixing = 0u64;
        let mut x = 1u64;
        loop {
            if gcd(x, self.level) == 1 {
                inertia_size += 1;
                if self.fixing.contains(x) {
                    inertia_in_fixing += 1;
                }
            }
            x += m.max(1);
            if x >= self.level.max(2) {
                break;
            }
        }
        inertia_size / inertia_in_fixing.max(1)
    }

    /// The coset `(q mod level) * H`; `q` splits completely iff this is the
    /// identity coset.
    pub fn frobenius_class(&self, q: u64) -> Result<Vec<u64>, CycloError> {
        if self.level > 1 && self.level % q == 0 {
            return Err(CycloError::PrimeDividesLevel { q });
        }
        Ok(self.fixing.coset(q % self.level.max(1)))
    }

    pub fn splits_completely(&self, q: u64) -> Result<bool, CycloError> {
        if self.level > 1 && self.level % q == 0 {
            return Err(CycloError::PrimeDividesLevel { q });
        }
        Ok(self.fixing.contains(q % self.level.max(1)))
    }

    /// Coset decomposition of `(Z/level)^×` by the fixing subgroup, in
    /// cyclic order `H, gH, g^2 H, ...` for prime-degree specs (the
    /// quotient is cyclic); `g` is the smallest non-member.
    pub fn cyclic_cosets(&self) -> Vec<Vec<u64>> {
        let mut cosets = vec![self.fixing.elements.clone()];
        if self.degree == 1 {
            return cosets;
        }
        let g = (2..self.level)
            .find(|&x| gcd(x, self.level) == 1 && !self.fixing.contains(x))
            .expect("nontrivial quotient has a non-member");
        let mut rep = g;
        for _ in 1..self.degree {
            cosets.push(self.fixing.coset(rep));
            rep = (rep as u128 * g as u128 % self.level as u128) as u64;
        }
        debug_assert_eq!(
            cosets.iter().map(|c| c.len() as u64).sum::<u64>(),
            euler_phi(self.level)
        );
        cosets
    }
}

/// Compositum: both fields lifted to the lcm level, fixing subgroups
/// intersected.
pub fn compositum(a: &AbelianFieldSpec, b: &AbelianFieldSpec) -> AbelianFieldSpec {
    let m = lcm(a.level(), b.level());
    let la = a.lift_to_level(m);
    let lb = b.lift_to_level(m);
    let fixing = la.fixing.intersect(&lb.fixing);
    let phi = euler_phi(m);
    AbelianFieldSpec {
        level: m,
        degree: phi / fixing.order(),
        fixing,
    }
}

/// Exactly the index-p subgroups of `(Z/nZ)^×`, i.e. the degree-p subfields
/// of `Q(zeta_n)`, each returned at its conductor. Complete and
/// duplicate-free; empty when `p` does not divide `phi(n)`.
pub fn enumerate_prime_degree_subfields(n: u64, p: u64) -> Vec<AbelianFieldSpec> {
    assert!(p >= 3 && is_prime(p), "degree must be an odd prime");
    if n < 3 {
        return Vec::new();
    }
    let g = unit_group(n);
    let orders = &g.generator_orders;
    let p_indices: Vec<usize> = orders
        .iter()
        .enumerate()
        .filter(|(_, &d)| d % p == 0)
        .map(|(i, _)| i)
        .collect();
    if p_indices.is_empty() {
        return Vec::new();
    }
    // enumerate all elements with exponent vectors
    let mut elems: Vec<(u64, Vec<u64>)> = vec![(1 % n, vec![0; orders.len()])];
    for (i, (&gen, &d)) in g.generators.iter().zip(orders).enumerate() {
        let mut next = Vec::with_capacity(elems.len() * d as usize);
        let mut power = 1u64;
        for e in 0..d {
            for (x, exps) in &elems {
                let mut v = exps.clone();
                v[i] = e;
                next.push(((*x as u128 * power as u128 % n as u128) as u64, v));
            }
            power = (power as u128 * gen as u128 % n as u128) as u64;
        }
        elems = next;
    }
    // homs G -> Z/p up to scalar: images a_i over the p-divisible generators,
    // first nonzero normalized to 1
    let k = p_indices.len();
    let mut homs: Vec<Vec<u64>> = Vec::new();
    let mut counters = vec![0u64; k];
    loop {
        if let Some(first) = counters.iter().position(|&a| a != 0) {
            if counters[first] == 1 {
                homs.push(counters.clone());
            }
        }
        // increment base-p counter
        let mut i = 0;
        loop {
            if i == k {
                break;
            }
            counters[i] += 1;
            if counters[i] < p {
                break;
            }
            counters[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    let mut out: Vec<AbelianFieldSpec> = Vec::new();
    for hom in homs {
        let mut kernel: Vec<u64> = elems
            .iter()
            .filter(|(_, exps)| {
                let s: u64 = p_indices
                    .iter()
                    .zip(&hom)
                    .map(|(&i, &a)| exps[i] % p * a % p)
                    .sum();
                s % p == 0
            })
            .map(|(x, _)| *x)
            .collect();
        kernel.sort_unstable();
        kernel.dedup();
        let fixing = SubgroupModN::from_sorted_elements(n, kernel);
        let spec = AbelianFieldSpec {
            level: n,
            degree: p,
            fixing,
        };
        let canon = spec.at_conductor();
        if !out.iter().any(|s| *s == canon) {
            out.push(canon);
        }
    }
    out.sort_by(|a, b| {
        a.level
            .cmp(&b.level)
            .then_with(|| a.fixing.elements.cmp(&b.fixing.elements))
    });
    out
}

/// Monic integer polynomial whose roots are the Gaussian periods of the
/// field; for prime degree p and conductor c in scope its discriminant is
/// `c^(p-1)` times the squared index of `Z[eta]` in the maximal order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianPeriodPolynomial {
    /// Coefficients, constant term first; monic of degree p.
    pub coefficients: Vec<BigInt>,
    pub level: u64,
}

impl GaussianPeriodPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }
}

/// An element of `Z[x]/(x^c - 1)`, the exact home of sums and products of
/// c-th roots of unity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycEl {
    pub c: u64,
    pub coeffs: Vec<BigInt>,
}

impl CycEl {
    pub fn zero(c: u64) -> Self {
        CycEl {
            c,
            coeffs: vec![BigInt::zero(); c as usize],
        }
    }

    pub fn from_integer(c: u64, n: BigInt) -> Self {
        let mut z = CycEl::zero(c);
        z.coeffs[0] = n;
        z
    }

    /// The sum of `zeta^a` over the given exponents.
    pub fn from_exponents(c: u64, exps: &[u64]) -> Self {
        let mut z = CycEl::zero(c);
        for &a in exps {
            z.coeffs[(a % c) as usize] += 1;
        }
        z
    }

    pub fn add(&self, other: &CycEl) -> CycEl {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        CycEl { c: self.c, coeffs }
    }

    pub fn sub(&self, other: &CycEl) -> CycEl {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        CycEl { c: self.c, coeffs }
    }

    pub fn neg(&self) -> CycEl {
        CycEl {
            c: self.c,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    /// Cyclic convolution.
    pub fn mul(&self, other: &CycEl) -> CycEl {
        let n = self.c as usize;
        let mut out = vec![BigInt::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[(i + j) % n] += a * b;
            }
        }
        CycEl {
            c: self.c,
            coeffs: out,
        }
    }

    /// Galois action `zeta -> zeta^s` for `s` coprime to `c`.
    pub fn galois(&self, s: u64) -> CycEl {
        let n = self.c as usize;
        let mut out = vec![BigInt::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            out[(i as u128 * s as u128 % self.c as u128) as usize] += a;
        }
        CycEl {
            c: self.c,
            coeffs: out,
        }
    }
}

fn moebius(n: u64) -> i64 {
    let f = factorize(n);
    if f.factors.iter().any(|&(_, e)| e > 1) {
        return 0;
    }
    if f.factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `Tr_{Q(zeta_c)/Q}(zeta_c^a)` for all residues a, as a lookup table.
pub fn trace_table(c: u64) -> Vec<BigInt> {
    let phi = euler_phi(c);
    (0..c)
        .map(|a| {
            let g = gcd(a, c);
            let cg = c / g;
            let t = moebius(cg) * (phi / euler_phi(cg)) as i64;
            BigInt::from(t)
        })
        .collect()
}

/// Exact absolute trace of a cyclotomic element.
pub fn trace_to_q(v: &CycEl, table: &[BigInt]) -> BigInt {
    v.coeffs
        .iter()
        .zip(table)
        .map(|(a, t)| a * t)
        .fold(BigInt::zero(), |acc, x| acc + x)
}

impl AbelianFieldSpec {
    /// The monic degree-p polynomial of the Gaussian periods, computed by
    /// exact symmetric-function arithmetic in `Z[x]/(x^c - 1)`; integer
    /// coefficients are recovered through the exact cyclotomic trace, so no
    /// floating-point certification step is involved.
    pub fn defining_polynomial(&self) -> Result<GaussianPeriodPolynomial, CycloError> {
        let spec = self.at_conductor();
        let c = spec.level;
        let p = spec.degree;
        if !is_prime(p) || p % 2 == 0 || c < 7 {
            return Err(CycloError::InvalidSpec(
                "defining polynomial requires odd prime degree and conductor >= 7",
            ));
        }
        let cosets = spec.cyclic_cosets();
        let periods: Vec<CycEl> = cosets
            .iter()
            .map(|cs| CycEl::from_exponents(c, cs))
            .collect();
        // expand prod_j (T - eta_j) over Z[zeta][T]
        let mut poly_t: Vec<CycEl> = vec![CycEl::from_integer(c, BigInt::from(1))];
        for eta in &periods {
            let mut next = vec![CycEl::zero(c); poly_t.len() + 1];
            for (k, coef) in poly_t.iter().enumerate() {
                next[k + 1] = next[k + 1].add(coef);
                next[k] = next[k].sub(&eta.mul(coef));
            }
            poly_t = next;
        }
        let table = trace_table(c);
        let phi = BigInt::from(euler_phi(c));
        let mut coefficients = Vec::with_capacity(poly_t.len());
        for coef in &poly_t {
            let tr = trace_to_q(coef, &table);
            if (&tr % &phi) != BigInt::zero() {
                return Err(CycloError::NonIntegralCoefficient);
            }
            coefficients.push(tr / &phi);
        }
        let poly = GaussianPeriodPolynomial {
            coefficients,
            level: c,
        };
        // conductor-discriminant check: disc = (k * c^((p-1)/2))^2 with k
        // the index of Z[eta] in the maximal order (k > 1 does occur, e.g.
        // k = 2 at conductor 31; the maximal-order machinery absorbs it)
        let disc = poly_disc(&poly.coefficients);
        let expected = BigInt::from(c).pow((p - 1) as u32);
        if disc.is_zero() || (&disc % &expected) != BigInt::zero() {
            return Err(CycloError::DiscriminantMismatch);
        }
        let ratio = &disc / &expected;
        let root = ratio.sqrt();
        if &root * &root != ratio {
            return Err(CycloError::DiscriminantMismatch);
        }
        // irreducibility certificate: an inert prime exists because the
        // Galois group is cyclic of prime order
        let mut q = 2u64;
        let mut certified = false;
        for _ in 0..10_000 {
            while !is_prime(q) || c % q == 0 {
                q += 1;
            }
            if spec.fixing.quotient_element_order(q % c) == p {
                let fq = poly_mod_q(&poly.coefficients, q);
                let fac = fq_factor(&fq, q, 0x1dea);
                if fac.len() == 1 && fac[0].1 == 1 && fac[0].0.len() as u64 - 1 == p {
                    certified = true;
                    break;
                } else {
                    return Err(CycloError::NotIrreducible);
                }
            }
            q += 1;
        }
        if !certified {
            return Err(CycloError::NotIrreducible);
        }
        Ok(poly)
    }
}

/// Finds the unique candidate whose split-prime fingerprint matches the
/// polynomial: for test primes q, `poly` splits completely mod q iff q is
/// an identity Frobenius for the candidate. The default bound is the first
/// 200 usable primes; an ambiguous match doubles the bound (twice) before
/// giving up.
pub fn identify_field<'a>(
    poly: &[BigInt],
    candidates: &'a [AbelianFieldSpec],
) -> Result<Option<&'a AbelianFieldSpec>, CycloError> {
    let deg = crate::polyarith::degree(poly) as u64;
    let disc = poly_disc(poly);
    if disc.is_zero() {
        return Err(CycloError::NotSquarefree);
    }
    let viable: Vec<&AbelianFieldSpec> = candidates.iter().filter(|s| s.degree() == deg).collect();
    if viable.is_empty() {
        return Ok(None);
    }
    let mut n_primes = 200usize;
    for _attempt in 0..3 {
        let mut alive: Vec<bool> = vec![true; viable.len()];
        let mut q = 2u64;
        let mut used = 0usize;
        while used < n_primes {
            q += 1;
            if !is_prime(q) {
                continue;
            }
            if (&disc % BigInt::from(q)).is_zero() {
                continue;
            }
            if viable.iter().any(|s| s.level() % q == 0) {
                continue;
            }
            used += 1;
            let fq = poly_mod_q(poly, q);
            let splits = fq_distinct_roots(&fq, q, q ^ 0x5eed).len() as u64 == deg;
            for (i, s) in viable.iter().enumerate() {
                if alive[i] && s.splits_completely(q).unwrap_or(false) != splits {
                    alive[i] = false;
                }
            }
        }
        let matches: Vec<usize> = (0..viable.len()).filter(|&i| alive[i]).collect();
        match matches.len() {
            0 => return Ok(None),
            1 => return Ok(Some(viable[matches[0]])),
            _ => n_primes *= 2,
        }
    }
    Err(CycloError::AmbiguousIdentification)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zmod::subgroup_closure;

    fn cubic_at_7() -> AbelianFieldSpec {
        AbelianFieldSpec::new(7, subgroup_closure(&[6], 7).unwrap()).unwrap()
    }

    fn bp(coeffs: &[i64]) -> Vec<BigInt> {
        coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn conductor_examples() {
        assert_eq!(cubic_at_7().conductor(), 7);
        assert_eq!(AbelianFieldSpec::rational(91).conductor(), 1);
        let lifted = cubic_at_7().lift_to_level(1456);
        assert_eq!(lifted.conductor(), 7);
        assert_eq!(lifted.degree(), 3);
        assert!(lifted.same_field(&cubic_at_7()));
        // conductor-91 cubic re-expressed at 1456
        let subs = enumerate_prime_degree_subfields(91, 3);
        let c91 = subs.iter().find(|s| s.conductor() == 91).unwrap();
        assert_eq!(c91.lift_to_level(1456).conductor(), 91);
    }

    #[test]
    fn subfield_enumeration() {
        let subs = enumerate_prime_degree_subfields(91, 3);
        assert_eq!(subs.len(), 4);
        let mut conductors: Vec<u64> = subs.iter().map(|s| s.conductor()).collect();
        conductors.sort_unstable();
        assert_eq!(conductors, vec![7, 13, 91, 91]);

        assert_eq!(enumerate_prime_degree_subfields(7, 3).len(), 1);
        assert!(enumerate_prime_degree_subfields(16, 3).is_empty());
    }

    #[test]
    fn ramification_examples() {
        let subs = enumerate_prime_degree_subfields(91, 3);
        let c91 = subs.iter().find(|s| s.conductor() == 91).unwrap();
        assert_eq!(c91.ramification_index(7), 3);
        assert_eq!(c91.ramification_index(13), 3);
        assert_eq!(c91.ramification_index(3), 1);
        assert_eq!(cubic_at_7().ramification_index(13), 1);
        assert_eq!(cubic_at_7().ramification_index(7), 3);
    }

    #[test]
    fn compositum_examples() {
        let subs = enumerate_prime_degree_subfields(91, 3);
        let k7 = subs.iter().find(|s| s.conductor() == 7).unwrap();
        let k13 = subs.iter().find(|s| s.conductor() == 13).unwrap();
        let comp = compositum(k7, k13);
        assert_eq!(comp.degree(), 9);
        assert_eq!(comp.conductor(), 91);
        // idempotent and identity laws
        assert!(compositum(k7, k7).same_field(k7));
        assert!(compositum(k7, &AbelianFieldSpec::rational(7)).same_field(k7));
        // commutative/associative over the four cubic subfields
        for a in &subs {
            for b in &subs {
                assert!(compositum(a, b).same_field(&compositum(b, a)));
                for c in &subs {
                    assert!(compositum(&compositum(a, b), c)
                        .same_field(&compositum(a, &compositum(b, c))));
                }
            }
        }
    }

    #[test]
    fn totally_real_examples() {
        assert!(cubic_at_7().is_totally_real());
        let full_zeta7 =
            AbelianFieldSpec::new(7, SubgroupModN::trivial(7)).unwrap();
        assert!(!full_zeta7.is_totally_real());
        for s in enumerate_prime_degree_subfields(91, 3) {
            assert!(s.is_totally_real());
        }
    }

    #[test]
    fn frobenius_examples() {
        let k7 = cubic_at_7();
        assert!(k7.splits_completely(13).unwrap());
        assert!(!k7.splits_completely(3).unwrap());
        assert!(k7.splits_completely(29).unwrap()); // 29 = 1 mod 7
        assert!(k7.frobenius_class(7).is_err());
    }

    #[test]
    fn period_polynomial_conductor_7() {
        let poly = cubic_at_7().defining_polynomial().unwrap();
        // x^3 + x^2 - 2x - 1 is the classical period polynomial for 7;
        // it defines the same field as x^3 - x^2 - 2x + 1
        assert_eq!(poly_disc(&poly.coefficients), BigInt::from(49));
        let subs = enumerate_prime_degree_subfields(91, 3);
        let m = identify_field(&poly.coefficients, &subs).unwrap().unwrap();
        assert_eq!(m.conductor(), 7);
    }

    #[test]
    fn identify_table_rows() {
        let subs = enumerate_prime_degree_subfields(91, 3);
        let t1 = identify_field(&bp(&[1, -2, -1, 1]), &subs).unwrap().unwrap();
        assert_eq!(t1.conductor(), 7);
        let t2 = identify_field(&bp(&[-27, -30, -1, 1]), &subs).unwrap().unwrap();
        assert_eq!(t2.conductor(), 91);
        let t3 = identify_field(&bp(&[64, -30, -1, 1]), &subs).unwrap().unwrap();
        assert_eq!(t3.conductor(), 91);
        assert!(!t2.same_field(t3));
        let t4 = identify_field(&bp(&[-1, -4, -1, 1]), &subs).unwrap().unwrap();
        assert_eq!(t4.conductor(), 13);
    }

    #[test]
    fn period_polynomials_match_discriminant_invariant() {
        for (n, expect_conductors) in [(91u64, vec![7, 13, 91, 91]), (133, vec![7, 19, 133, 133])] {
            let subs = enumerate_prime_degree_subfields(n, 3);
            let mut conds: Vec<u64> = subs.iter().map(|s| s.conductor()).collect();
            conds.sort_unstable();
            assert_eq!(conds, expect_conductors);
            for s in &subs {
                let poly = s.defining_polynomial().unwrap();
                let c = s.conductor();
                // disc = (index * c)^2; index is 1 for prime conductor
                let disc = poly_disc(&poly.coefficients);
                assert!((&disc % BigInt::from(c * c)) == BigInt::from(0));
                if is_prime(c) {
                    assert_eq!(disc, BigInt::from(c * c));
                }
                // the period polynomial is the canonical table representative
                let back = identify_field(&poly.coefficients, &subs).unwrap().unwrap();
                assert!(back.same_field(s));
            }
        }
    }
}
