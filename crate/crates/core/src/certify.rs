//! Pair qualification and residue-class certificates.
//!
//! For a pair of distinct totally real abelian fields of odd prime degree
//! with cyclic class groups and abelian Hilbert class fields, this module
//! builds the Galois-theoretic context inside Q(zeta_f) for
//! f = lcm(16, f1, f2), constructs a residue class d mod f whose Artin
//! symbol restricts to simultaneous generators of both class groups, and
//! verifies the certificate independently. Qualified pairs carry the
//! conclusion that at least one field of the pair has a Euclidean ideal
//! class.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::classgrp::{
    class_group, hcf_abelian_certificate, ClassGroup, ClassGroupError, GenusCertificate, HcfStatus,
};
use crate::cyclo::{compositum, enumerate_prime_degree_subfields, AbelianFieldSpec, CycloError};
use crate::order::maximal_order;
use crate::zmod::{self, SubgroupModN};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertifyError {
    /// One of the fields lacks a decisive Hilbert-class-field status.
    HcfNotDecisive { which: usize },
    /// A class group is not cyclic.
    NotCyclic { which: usize },
    /// The quotient orders at level f disagree with the class numbers.
    QuotientMismatch { which: usize, expected: u64, got: u64 },
    /// Exhaustive scan of G found no simultaneous generator.
    NoSimultaneousGenerator,
    /// Prime arguments failed the distinctness/congruence preconditions.
    BadPrimes(String),
    ClassGroup(ClassGroupError),
    Cyclo(CycloError),
}

impl fmt::Display for CertifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifyError::HcfNotDecisive { which } => {
                write!(f, "field {which}: Hilbert class field status not decisive")
            }
            CertifyError::NotCyclic { which } => write!(f, "field {which}: class group not cyclic"),
            CertifyError::QuotientMismatch { which, expected, got } => write!(
                f,
                "field {which}: quotient order {got} does not match class number {expected}"
            ),
            CertifyError::NoSimultaneousGenerator => {
                write!(f, "no simultaneous generator")
            }
            CertifyError::BadPrimes(s) => write!(f, "bad prime arguments: {s}"),
            CertifyError::ClassGroup(e) => write!(f, "class group: {e}"),
            CertifyError::Cyclo(e) => write!(f, "cyclotomic arithmetic: {e}"),
        }
    }
}

impl From<ClassGroupError> for CertifyError {
    fn from(e: ClassGroupError) -> Self {
        CertifyError::ClassGroup(e)
    }
}

impl From<CycloError> for CertifyError {
    fn from(e: CycloError) -> Self {
        CertifyError::Cyclo(e)
    }
}

/// Galois data of the pair at modulus f = lcm(16, f1, f2): G fixes the
/// compositum K1K2, H1/H2 fix the Hilbert class fields, and the quotients
/// G/Hprime, G/Hdoubleprime are the two class groups.
#[derive(Debug, Clone)]
pub struct PairContext {
    pub k1: AbelianFieldSpec,
    pub k2: AbelianFieldSpec,
    pub hcf1: AbelianFieldSpec,
    pub hcf2: AbelianFieldSpec,
    pub h1: u64,
    pub h2: u64,
    pub f1: u64,
    pub f2: u64,
    pub f: u64,
    pub g: SubgroupModN,
    pub sub_h1: SubgroupModN,
    pub sub_h2: SubgroupModN,
    pub hprime: SubgroupModN,
    pub hdoubleprime: SubgroupModN,
}

/// Residue class d mod f with the four checks of the construction, plus the
/// positive lift u1 used downstream by the sieve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueClassCertificate {
    pub d: u64,
    pub f: u64,
    pub u1: u64,
    pub in_g: bool,
    pub generates_c1: bool,
    pub generates_c2: bool,
    pub half_coprime: bool,
}

impl ResidueClassCertificate {
    pub fn all_pass(&self) -> bool {
        self.in_g && self.generates_c1 && self.generates_c2 && self.half_coprime
    }
}

/// Independent re-verification record; `cross_check` restates the gcd
/// condition as d !== 1 mod 4 and d !== 1 mod ell for every odd prime
/// ell | f.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateChecks {
    pub in_g: bool,
    pub generates_c1: bool,
    pub generates_c2: bool,
    pub half_coprime: bool,
    pub cross_check: bool,
}

impl CertificateChecks {
    pub fn all_pass(&self) -> bool {
        self.in_g && self.generates_c1 && self.generates_c2 && self.half_coprime && self.cross_check
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conclusion {
    /// All hypotheses verified: at least one field of the pair has a
    /// Euclidean ideal class.
    Qualified,
    /// A hypothesis failed mathematically.
    Rejected,
    /// A resource limit prevented a verdict; not a rejection.
    Undecided,
}

#[derive(Debug, Clone)]
pub struct QualificationReport {
    pub distinct: bool,
    pub degrees_odd_prime: bool,
    pub class_groups_cyclic: [bool; 2],
    pub class_numbers: [u64; 2],
    pub hcf_abelian: [HcfStatus; 2],
    pub relatively_ramified: [bool; 2],
    pub conclusion: Conclusion,
    pub reasons: Vec<String>,
    pub certificate: Option<ResidueClassCertificate>,
    pub fields: [AbelianFieldSpec; 2],
}

/// Per-field computation bundle reused across pairs.
#[derive(Debug, Clone)]
pub struct FieldData {
    pub spec: AbelianFieldSpec,
    pub class_group: ClassGroup,
    pub certificate: GenusCertificate,
    pub regulator: f64,
}

/// Runs the per-field pipeline: maximal order, units, class group, genus
/// certificate with Hilbert-class-field status.
pub fn field_data(spec: &AbelianFieldSpec, node_cap: u64) -> Result<FieldData, CertifyError> {
    let canon = spec.at_conductor();
    let poly = canon.defining_polynomial()?;
    let o = maximal_order(&poly.coefficients).map_err(ClassGroupError::from)?;
    let units = crate::classgrp::analytically_complete_units(&o, &canon, node_cap)?;
    let cg = class_group(&o, &units, node_cap)?;
    let cert = hcf_abelian_certificate(&canon, cg.order)?;
    Ok(FieldData {
        spec: canon,
        class_group: cg,
        certificate: cert,
        regulator: units.regulator,
    })
}

/// True when the compositum K1K2 is ramified over K_i (i = 0 or 1): some
/// rational prime has a larger ramification index in the compositum. The
/// infinite places need no check — every field here is totally real.
pub fn is_relatively_ramified(k1: &AbelianFieldSpec, k2: &AbelianFieldSpec, i: usize) -> bool {
    let m = compositum(k1, k2).at_conductor();
    let ki = if i == 0 { k1 } else { k2 }.at_conductor();
    let c = zmod::lcm(m.conductor(), ki.conductor());
    if c <= 1 {
        return false;
    }
    zmod::factorize(c)
        .primes()
        .any(|q| m.ramification_index(q) != ki.ramification_index(q))
}

/// Assembles the level-f subgroup lattice for a pair whose class groups are
/// cyclic and whose Hilbert class fields carry decisive certificates.
pub fn build_pair_context(
    d1: &FieldData,
    d2: &FieldData,
) -> Result<PairContext, CertifyError> {
    for (which, d) in [d1, d2].into_iter().enumerate() {
        if d.certificate.hcf_abelian == HcfStatus::Unknown {
            return Err(CertifyError::HcfNotDecisive { which });
        }
        if !d.class_group.is_cyclic {
            return Err(CertifyError::NotCyclic { which });
        }
    }
    let hcf1 = d1.certificate.hilbert_class_field.clone().expect("decisive");
    let hcf2 = d2.certificate.hilbert_class_field.clone().expect("decisive");
    let f1 = hcf1.conductor();
    let f2 = hcf2.conductor();
    let f = zmod::lcm(16, zmod::lcm(f1, f2));
    let k1f = d1.spec.lift_to_level(f);
    let k2f = d2.spec.lift_to_level(f);
    let g = k1f.fixing_subgroup().intersect(k2f.fixing_subgroup());
    let sub_h1 = hcf1.lift_to_level(f).fixing_subgroup().clone();
    let sub_h2 = hcf2.lift_to_level(f).fixing_subgroup().clone();
    let hprime = g.intersect(&sub_h1);
    let hdoubleprime = g.intersect(&sub_h2);
    let h1 = d1.class_group.order;
    let h2 = d2.class_group.order;
    // the quotients G/H', G/H'' must realize the class groups
    let q1 = g.order() / hprime.order();
    if q1 != h1 {
        return Err(CertifyError::QuotientMismatch { which: 0, expected: h1, got: q1 });
    }
    let q2 = g.order() / hdoubleprime.order();
    if q2 != h2 {
        return Err(CertifyError::QuotientMismatch { which: 1, expected: h2, got: q2 });
    }
    Ok(PairContext {
        k1: d1.spec.clone(),
        k2: d2.spec.clone(),
        hcf1,
        hcf2,
        h1,
        h2,
        f1,
        f2,
        f,
        g,
        sub_h1,
        sub_h2,
        hprime,
        hdoubleprime,
    })
}

fn certificate_for(ctx: &PairContext, d: u64) -> ResidueClassCertificate {
    let f = ctx.f;
    let in_g = ctx.g.contains(d);
    let generates_c1 = in_g && ctx.hprime.quotient_element_order(d) == ctx.h1;
    let generates_c2 = in_g && ctx.hdoubleprime.quotient_element_order(d) == ctx.h2;
    let half_coprime = d % 2 == 1 && zmod::gcd((d - 1) / 2, f) == 1;
    ResidueClassCertificate {
        d,
        f,
        u1: d,
        in_g,
        generates_c1,
        generates_c2,
        half_coprime,
    }
}

/// Constructs the residue class: d = f - 1 when both class groups are
/// trivial; otherwise scan G in increasing order for a simultaneous
/// generator c of both quotients, strip c to odd order, and take d = -c.
/// The emitted certificate always has all four checks recomputed and true.
pub fn choose_residue_class(ctx: &PairContext) -> Result<ResidueClassCertificate, CertifyError> {
    if ctx.h1 == 1 && ctx.h2 == 1 {
        let cert = certificate_for(ctx, ctx.f - 1);
        if cert.all_pass() {
            return Ok(cert);
        }
        return Err(CertifyError::NoSimultaneousGenerator);
    }
    for &c in &ctx.g.elements {
        if ctx.hprime.quotient_element_order(c) != ctx.h1 {
            continue;
        }
        if ctx.hdoubleprime.quotient_element_order(c) != ctx.h2 {
            continue;
        }
        // odd order: the 2-part is stripped by squaring; the image in each
        // quotient is unchanged as a generator since h1, h2 are odd
        let stripped = zmod::strip_two_part(c, ctx.f).expect("element of G");
        let cert = certificate_for(ctx, ctx.f - stripped);
        if cert.all_pass() {
            return Ok(cert);
        }
    }
    Err(CertifyError::NoSimultaneousGenerator)
}

/// Re-derives every condition from scratch; the gcd condition is also
/// cross-checked in its congruence form.
pub fn verify_certificate(ctx: &PairContext, cert: &ResidueClassCertificate) -> CertificateChecks {
    let d = cert.d % ctx.f;
    let in_g = ctx.g.contains(d);
    let generates_c1 = in_g && ctx.hprime.quotient_element_order(d) == ctx.h1;
    let generates_c2 = in_g && ctx.hdoubleprime.quotient_element_order(d) == ctx.h2;
    let half_coprime = d % 2 == 1 && zmod::gcd((d - 1) / 2, ctx.f) == 1;
    // equivalent form: d is not 1 modulo 4 nor modulo any odd prime of f
    let mut cross = d % 4 != 1;
    for ell in zmod::factorize(ctx.f).primes().filter(|&q| q % 2 == 1) {
        if d % ell == 1 {
            cross = false;
        }
    }
    CertificateChecks {
        in_g,
        generates_c1,
        generates_c2,
        half_coprime,
        cross_check: cross,
    }
}

fn report_skeleton(k1: &AbelianFieldSpec, k2: &AbelianFieldSpec) -> QualificationReport {
    QualificationReport {
        distinct: false,
        degrees_odd_prime: false,
        class_groups_cyclic: [false, false],
        class_numbers: [0, 0],
        hcf_abelian: [HcfStatus::Unknown, HcfStatus::Unknown],
        relatively_ramified: [false, false],
        conclusion: Conclusion::Rejected,
        reasons: Vec::new(),
        certificate: None,
        fields: [k1.at_conductor(), k2.at_conductor()],
    }
}

fn is_odd_prime(n: u64) -> bool {
    n % 2 == 1 && zmod::is_prime(n)
}

/// Full pipeline from field specs; resource failures surface as Undecided,
/// never as Rejected.
pub fn qualify_pair(
    k1: &AbelianFieldSpec,
    k2: &AbelianFieldSpec,
    node_cap: u64,
) -> QualificationReport {
    let mut rep = report_skeleton(k1, k2);
    rep.distinct = !k1.same_field(k2);
    if !rep.distinct {
        rep.reasons.push(String::from("fields are not distinct"));
        return rep;
    }
    rep.degrees_odd_prime = is_odd_prime(k1.degree()) && is_odd_prime(k2.degree());
    if !rep.degrees_odd_prime {
        rep.reasons.push(String::from("degree is not an odd prime"));
        return rep;
    }
    let mut data = Vec::with_capacity(2);
    for (which, k) in [k1, k2].into_iter().enumerate() {
        match field_data(k, node_cap) {
            Ok(d) => data.push(d),
            Err(e) => {
                rep.conclusion = if resource_limited(&e) {
                    Conclusion::Undecided
                } else {
                    Conclusion::Rejected
                };
                rep.reasons.push(format!("field {which}: {e}"));
                return rep;
            }
        }
    }
    qualify_with_data(&data[0], &data[1])
}

fn resource_limited(e: &CertifyError) -> bool {
    matches!(
        e,
        CertifyError::ClassGroup(ClassGroupError::EnumerationBudget)
            | CertifyError::ClassGroup(ClassGroupError::ClosureOverflow)
            | CertifyError::ClassGroup(ClassGroupError::Units(
                crate::units::UnitsError::EnumerationBudget
            ))
    )
}

/// Pair qualification over precomputed per-field data.
pub fn qualify_with_data(d1: &FieldData, d2: &FieldData) -> QualificationReport {
    let mut rep = report_skeleton(&d1.spec, &d2.spec);
    rep.distinct = !d1.spec.same_field(&d2.spec);
    rep.degrees_odd_prime = is_odd_prime(d1.spec.degree()) && is_odd_prime(d2.spec.degree());
    rep.class_groups_cyclic = [d1.class_group.is_cyclic, d2.class_group.is_cyclic];
    rep.class_numbers = [d1.class_group.order, d2.class_group.order];
    rep.hcf_abelian = [d1.certificate.hcf_abelian, d2.certificate.hcf_abelian];
    rep.relatively_ramified = [
        is_relatively_ramified(&d1.spec, &d2.spec, 0),
        is_relatively_ramified(&d1.spec, &d2.spec, 1),
    ];
    if !rep.distinct {
        rep.reasons.push(String::from("fields are not distinct"));
        return rep;
    }
    if !rep.degrees_odd_prime {
        rep.reasons.push(String::from("degree is not an odd prime"));
        return rep;
    }
    for which in 0..2 {
        if !rep.class_groups_cyclic[which] {
            rep.reasons.push(format!("field {which}: class group not cyclic"));
        }
        if rep.hcf_abelian[which] == HcfStatus::Unknown {
            rep.reasons
                .push(format!("field {which}: Hilbert class field not certified abelian"));
        }
        if !rep.relatively_ramified[which] {
            rep.reasons.push(String::from("not relatively ramified"));
        }
    }
    if !rep.reasons.is_empty() {
        return rep;
    }
    let ctx = match build_pair_context(d1, d2) {
        Ok(c) => c,
        Err(e) => {
            rep.conclusion = Conclusion::Rejected;
            rep.reasons.push(format!("{e}"));
            return rep;
        }
    };
    match choose_residue_class(&ctx) {
        Ok(cert) => {
            let checks = verify_certificate(&ctx, &cert);
            if checks.all_pass() {
                rep.conclusion = Conclusion::Qualified;
                rep.certificate = Some(cert);
            } else {
                rep.conclusion = Conclusion::Rejected;
                rep.reasons.push(String::from("certificate failed re-verification"));
            }
        }
        Err(e) => {
            rep.conclusion = Conclusion::Rejected;
            rep.reasons.push(format!("{e}"));
        }
    }
    rep
}

/// Four primes p1, q1, p2, q2, all distinct and congruent to 1 mod 3:
/// enumerate the cubic subfields of Q(zeta_{p1 q1}) and Q(zeta_{p2 q2}),
/// keep those with class number 1 or 3 and decisive certificates, and
/// qualify every cross pair.
pub fn corollary_driver(
    p1: u64,
    q1: u64,
    p2: u64,
    q2: u64,
    node_cap: u64,
) -> Result<Vec<QualificationReport>, CertifyError> {
    let ps = [p1, q1, p2, q2];
    for &p in &ps {
        if !zmod::is_prime(p) {
            return Err(CertifyError::BadPrimes(format!("{p} is not prime")));
        }
        if p % 3 != 1 {
            return Err(CertifyError::BadPrimes(format!("{p} is not 1 mod 3")));
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if ps[i] == ps[j] {
                return Err(CertifyError::BadPrimes(format!("repeated prime {}", ps[i])));
            }
        }
    }
    let gather = |n: u64| -> Vec<FieldData> {
        enumerate_prime_degree_subfields(n, 3)
            .iter()
            .filter_map(|s| field_data(s, node_cap).ok())
            .filter(|d| {
                (d.class_group.order == 1 || d.class_group.order == 3)
                    && d.certificate.hcf_abelian != HcfStatus::Unknown
            })
            .collect()
    };
    let side1 = gather(p1 * q1);
    let side2 = gather(p2 * q2);
    let mut out = Vec::new();
    for a in &side1 {
        for b in &side2 {
            out.push(qualify_with_data(a, b));
        }
    }
    Ok(out)
}

/// One row of the table reproduction: a cubic subfield of Q(zeta_pq) with
/// its conductor, defining polynomial, genus number and class number.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub p: u64,
    pub q: u64,
    pub spec: AbelianFieldSpec,
    pub conductor: u64,
    pub polynomial: Vec<num_bigint::BigInt>,
    pub genus_number: u64,
    pub class_number: u64,
}

/// For each prime pair (p, q), p, q = 1 mod 3, emits the four cubic
/// subfields of Q(zeta_pq) with their invariants.
pub fn reproduce_tables(
    prime_pairs: &[(u64, u64)],
    node_cap: u64,
) -> Result<Vec<TableRow>, CertifyError> {
    let mut out = Vec::new();
    for &(p, q) in prime_pairs {
        for &t in &[p, q] {
            if !zmod::is_prime(t) || t % 3 != 1 {
                return Err(CertifyError::BadPrimes(format!("{t} is not a prime 1 mod 3")));
            }
        }
        if p == q {
            return Err(CertifyError::BadPrimes(format!("repeated prime {p}")));
        }
        for spec in enumerate_prime_degree_subfields(p * q, 3) {
            let d = field_data(&spec, node_cap)?;
            let poly = d.spec.defining_polynomial()?;
            out.push(TableRow {
                p,
                q,
                conductor: d.spec.conductor(),
                polynomial: poly.coefficients,
                genus_number: d.certificate.genus_number,
                class_number: d.class_group.order,
                spec: d.spec,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic_by_conductor(n: u64, c: u64) -> Vec<AbelianFieldSpec> {
        enumerate_prime_degree_subfields(n, 3)
            .into_iter()
            .filter(|s| s.conductor() == c)
            .collect()
    }

    const CAP: u64 = 20_000_000;

    #[test]
    fn class_number_one_pair_certificate() {
        let k1 = &cubic_by_conductor(7, 7)[0];
        let k2 = &cubic_by_conductor(13, 13)[0];
        let d1 = field_data(k1, CAP).unwrap();
        let d2 = field_data(k2, CAP).unwrap();
        let ctx = build_pair_context(&d1, &d2).unwrap();
        assert_eq!(ctx.f, 1456);
        assert_eq!(ctx.g.order() / ctx.hprime.order(), 1);
        let cert = choose_residue_class(&ctx).unwrap();
        assert_eq!(cert.d, 1455);
        assert_eq!(zmod::gcd((cert.d - 1) / 2, ctx.f), 1);
        let checks = verify_certificate(&ctx, &cert);
        assert!(checks.all_pass());
        // a broken residue fails verification
        let mut bad = cert.clone();
        bad.d = 1;
        let chk = verify_certificate(&ctx, &bad);
        assert!(!chk.half_coprime && !chk.cross_check);
    }

    #[test]
    fn relative_ramification_examples() {
        let k91: Vec<_> = cubic_by_conductor(91, 91);
        let k7 = &cubic_by_conductor(7, 7)[0];
        // compositum of the conductor-91 cubic with the conductor-7 cubic is
        // the unramified degree-9 field: not relatively ramified over K1
        assert!(!is_relatively_ramified(&k91[0], k7, 0));
        assert!(is_relatively_ramified(&k91[0], k7, 1));
        // the two conductor-91 cubics: unramified both ways
        assert!(!is_relatively_ramified(&k91[0], &k91[1], 0));
        assert!(!is_relatively_ramified(&k91[0], &k91[1], 1));
        // coprime conductors: ramified both ways
        let k13 = &cubic_by_conductor(13, 13)[0];
        assert!(is_relatively_ramified(k7, k13, 0));
        assert!(is_relatively_ramified(k7, k13, 1));
    }

    #[test]
    fn rejection_not_relatively_ramified() {
        let k91 = &cubic_by_conductor(91, 91)[0];
        let k7 = &cubic_by_conductor(7, 7)[0];
        let rep = qualify_pair(k91, k7, CAP);
        assert_eq!(rep.conclusion, Conclusion::Rejected);
        assert!(rep.reasons.iter().any(|r| r == "not relatively ramified"));
        assert!(!rep.relatively_ramified[0]);
        // symmetric orientation reaches the same conclusion
        let rep2 = qualify_pair(k7, k91, CAP);
        assert_eq!(rep2.conclusion, Conclusion::Rejected);
    }

    #[test]
    fn qualified_h1_pair() {
        let k7 = &cubic_by_conductor(7, 7)[0];
        let k13 = &cubic_by_conductor(13, 13)[0];
        let rep = qualify_pair(k7, k13, CAP);
        assert_eq!(rep.conclusion, Conclusion::Qualified);
        let cert = rep.certificate.unwrap();
        assert_eq!(cert.d, 1455);
        assert_eq!(cert.u1, 1455);
        assert_eq!(cert.d % 4, 3);
    }

    #[test]
    fn qualified_h3_pair() {
        // the two class-number-3 cubics of conductors 217 and 247
        let k217: Vec<_> = cubic_by_conductor(217, 217);
        let k247: Vec<_> = cubic_by_conductor(247, 247);
        let d217 = k217.iter().map(|s| field_data(s, CAP).unwrap()).find(|d| d.class_group.order == 3).unwrap();
        let d247 = k247.iter().map(|s| field_data(s, CAP).unwrap()).find(|d| d.class_group.order == 3).unwrap();
        let ctx = build_pair_context(&d217, &d247).unwrap();
        assert_eq!(ctx.f, 857584);
        let cert = choose_residue_class(&ctx).unwrap();
        assert!(cert.all_pass());
        let checks = verify_certificate(&ctx, &cert);
        assert!(checks.all_pass());
        assert_eq!(cert.d % 4, 3);
        let rep = qualify_with_data(&d217, &d247);
        assert_eq!(rep.conclusion, Conclusion::Qualified);
    }

    #[test]
    fn corollary_driver_validation() {
        assert!(matches!(
            corollary_driver(7, 13, 7, 19, CAP),
            Err(CertifyError::BadPrimes(_))
        ));
        assert!(matches!(
            corollary_driver(7, 13, 19, 23, CAP),
            Err(CertifyError::BadPrimes(_))
        ));
    }
}
