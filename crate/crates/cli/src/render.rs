//! Stable JSON and CSV rendering. JSON carries a top-level "schema": 1 and
//! represents residues as decimal strings; key order is alphabetical, so a
//! fixed seed yields byte-identical output.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};
use std::fmt::Write as _;

use euclass_core::certify::{
    CertificateChecks, Conclusion, PairContext, QualificationReport, ResidueClassCertificate,
    TableRow,
};
use euclass_core::classgrp::{genus_certificate, HcfStatus};
use euclass_core::cyclo::{enumerate_prime_degree_subfields, AbelianFieldSpec};
use euclass_core::sieve::{HalfType, SieveReport};
use euclass_core::zmod::subgroup_closure;

/// Minimal generator list of the fixing subgroup, for a compact round-trip
/// descriptor "conductor:g1,g2".
fn subgroup_generators(spec: &AbelianFieldSpec) -> Vec<u64> {
    let canon = spec.at_conductor();
    let sub = canon.fixing_subgroup();
    let mut gens: Vec<u64> = Vec::new();
    let mut closure = subgroup_closure(&[], canon.level()).expect("valid level");
    for &x in &sub.elements {
        if !closure.contains(x) {
            gens.push(x);
            closure = subgroup_closure(&gens, canon.level()).expect("valid gens");
            if closure.order() == sub.order() {
                break;
            }
        }
    }
    gens
}

pub fn field_descriptor(spec: &AbelianFieldSpec) -> String {
    let canon = spec.at_conductor();
    let gens: Vec<String> = subgroup_generators(&canon).iter().map(|g| g.to_string()).collect();
    format!("{}:{}", canon.conductor(), gens.join(","))
}

pub fn poly_string(coeffs: &[BigInt]) -> String {
    let deg = coeffs.len() - 1;
    let mut out = String::new();
    for (e, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else if c.is_negative() {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let show_coef = e == 0 || mag != BigInt::from(1);
        if show_coef {
            let _ = write!(out, "{mag}");
        }
        if e >= 1 {
            out.push('x');
            if e >= 2 {
                let _ = write!(out, "^{e}");
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    let _ = deg;
    out
}

fn hcf_str(s: HcfStatus) -> &'static str {
    match s {
        HcfStatus::Trivial => "trivial",
        HcfStatus::Certified => "certified",
        HcfStatus::Unknown => "unknown",
    }
}

fn conclusion_str(c: Conclusion) -> &'static str {
    match c {
        Conclusion::Qualified => "qualified",
        Conclusion::Rejected => "rejected",
        Conclusion::Undecided => "undecided",
    }
}

// ---- fields ----

pub struct FieldRow {
    pub descriptor: String,
    pub conductor: u64,
    pub degree: u64,
    pub genus_number: u64,
    pub ramified_primes: Vec<(u64, u64)>,
    pub polynomial: Option<String>,
}

pub fn field_rows(n: u64, p: u64) -> Vec<FieldRow> {
    enumerate_prime_degree_subfields(n, p)
        .iter()
        .map(|s| {
            let cert = genus_certificate(s);
            FieldRow {
                descriptor: field_descriptor(s),
                conductor: s.conductor(),
                degree: s.degree(),
                genus_number: cert.genus_number,
                ramified_primes: cert.ramified_primes,
                polynomial: s.defining_polynomial().ok().map(|g| poly_string(&g.coefficients)),
            }
        })
        .collect()
}

pub fn fields_json(seed: u64, n: u64, p: u64, rows: &[FieldRow]) -> Value {
    json!({
        "schema": 1,
        "seed": seed.to_string(),
        "command": "fields",
        "level": n,
        "degree": p,
        "fields": rows.iter().map(|r| json!({
            "descriptor": r.descriptor,
            "conductor": r.conductor,
            "degree": r.degree,
            "genus_number": r.genus_number,
            "ramified_primes": r.ramified_primes.iter().map(|&(q, e)| json!({
                "prime": q, "e": e
            })).collect::<Vec<_>>(),
            "polynomial": r.polynomial,
        })).collect::<Vec<_>>(),
    })
}

pub fn fields_csv(rows: &[FieldRow]) -> String {
    let mut out = String::from("descriptor,conductor,degree,genus_number,polynomial\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.descriptor,
            r.conductor,
            r.degree,
            r.genus_number,
            r.polynomial.as_deref().unwrap_or("")
        );
    }
    out
}

// ---- qualification ----

fn certificate_value(cert: &ResidueClassCertificate) -> Value {
    json!({
        "d": cert.d.to_string(),
        "f": cert.f.to_string(),
        "u1": cert.u1.to_string(),
        "checks": {
            "in_g": cert.in_g,
            "generates_c1": cert.generates_c1,
            "generates_c2": cert.generates_c2,
            "half_coprime": cert.half_coprime,
        },
    })
}

fn report_value(rep: &QualificationReport) -> Value {
    json!({
        "fields": [field_descriptor(&rep.fields[0]), field_descriptor(&rep.fields[1])],
        "distinct": rep.distinct,
        "degrees_odd_prime": rep.degrees_odd_prime,
        "class_groups_cyclic": rep.class_groups_cyclic,
        "class_numbers": rep.class_numbers,
        "hcf_abelian": [hcf_str(rep.hcf_abelian[0]), hcf_str(rep.hcf_abelian[1])],
        "relatively_ramified": rep.relatively_ramified,
        "conclusion": conclusion_str(rep.conclusion),
        "reasons": rep.reasons,
        "certificate": rep.certificate.as_ref().map(certificate_value),
    })
}

pub fn qualification_json(seed: u64, rep: &QualificationReport) -> Value {
    json!({
        "schema": 1,
        "seed": seed.to_string(),
        "command": "qualify",
        "report": report_value(rep),
    })
}

fn report_csv_row(rep: &QualificationReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}\n",
        field_descriptor(&rep.fields[0]),
        field_descriptor(&rep.fields[1]),
        rep.class_numbers[0],
        rep.class_numbers[1],
        hcf_str(rep.hcf_abelian[0]),
        hcf_str(rep.hcf_abelian[1]),
        rep.relatively_ramified[0],
        rep.relatively_ramified[1],
        conclusion_str(rep.conclusion),
        rep.certificate.as_ref().map(|c| c.d.to_string()).unwrap_or_default(),
    )
}

const REPORT_CSV_HEADER: &str =
    "field1,field2,h1,h2,hcf1,hcf2,ram1,ram2,conclusion,d\n";

pub fn qualification_csv(rep: &QualificationReport) -> String {
    let mut out = String::from(REPORT_CSV_HEADER);
    out.push_str(&report_csv_row(rep));
    out
}

pub fn corollary_json(seed: u64, reps: &[QualificationReport]) -> Value {
    json!({
        "schema": 1,
        "seed": seed.to_string(),
        "command": "corollary",
        "reports": reps.iter().map(report_value).collect::<Vec<_>>(),
    })
}

pub fn corollary_csv(reps: &[QualificationReport]) -> String {
    let mut out = String::from(REPORT_CSV_HEADER);
    for r in reps {
        out.push_str(&report_csv_row(r));
    }
    out
}

// ---- tables ----

pub fn tables_json(seed: u64, rows: &[TableRow]) -> Value {
    json!({
        "schema": 1,
        "seed": seed.to_string(),
        "command": "tables",
        "rows": rows.iter().map(|r| json!({
            "p": r.p,
            "q": r.q,
            "conductor": r.conductor,
            "descriptor": field_descriptor(&r.spec),
            "polynomial": poly_string(&r.polynomial),
            "genus_number": r.genus_number,
            "class_number": r.class_number,
        })).collect::<Vec<_>>(),
    })
}

pub fn tables_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("p,q,conductor,polynomial,genus_number,class_number\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.p,
            r.q,
            r.conductor,
            poly_string(&r.polynomial),
            r.genus_number,
            r.class_number
        );
    }
    out
}

// ---- certificate ----

pub fn certificate_json(
    seed: u64,
    ctx: &PairContext,
    cert: &ResidueClassCertificate,
    checks: &CertificateChecks,
) -> Value {
    json!({
        "schema": 1,
        "seed": seed.to_string(),
        "command": "certificate-verify",
        "context": {
            "k1": field_descriptor(&ctx.k1),
            "k2": field_descriptor(&ctx.k2),
            "f1": ctx.f1.to_string(),
            "f2": ctx.f2.to_string(),
            "f": ctx.f.to_string(),
            "h1": ctx.h1,
            "h2": ctx.h2,
        },
        "certificate": certificate_value(cert),
        "verification": {
            "in_g": checks.in_g,
            "generates_c1": checks.generates_c1,
            "generates_c2": checks.generates_c2,
            "half_coprime": checks.half_coprime,
            "cross_check": checks.cross_check,
        },
    })
}

pub fn certificate_csv(cert: &ResidueClassCertificate, checks: &CertificateChecks) -> String {
    format!(
        "d,f,u1,in_g,generates_c1,generates_c2,half_coprime,cross_check\n{},{},{},{},{},{},{},{}\n",
        cert.d,
        cert.f,
        cert.u1,
        checks.in_g,
        checks.generates_c1,
        checks.generates_c2,
        checks.half_coprime,
        checks.cross_check
    )
}

// ---- sieve ----

fn half_type_str(h: HalfType) -> &'static str {
    match h {
        HalfType::Prime => "prime",
        HalfType::Semiprime { .. } => "semiprime",
    }
}

fn half_q1(h: HalfType) -> Option<u64> {
    match h {
        HalfType::Prime => None,
        HalfType::Semiprime { q1, .. } => Some(q1),
    }
}

pub fn sieve_json(seed: u64, rep: &SieveReport) -> Value {
    json!({
        "schema": 1,
        "seed": seed.to_string(),
        "command": "sieve",
        "params": {
            "u1": rep.params.u1.to_string(),
            "f": rep.params.f.to_string(),
            "X": rep.params.x,
            "a": rep.params.a,
            "b": rep.params.b,
            "epsilon": rep.params.epsilon,
        },
        "j_count": rep.j_count,
        "m_count": rep.m_count,
        "m_n_counts": rep.m_n_counts,
        "dominant_n0": rep.dominant_n0,
        "winner_count": rep.winner_count,
        "density_ratio": rep.density_ratio,
        "records": rep.records.iter().map(|r| json!({
            "p": r.p.to_string(),
            "half_type": half_type_str(r.half),
            "q1": half_q1(r.half).map(|q| q.to_string()),
            "signature": r.signature,
            "winner": r.winner.map(|w| w.to_string()),
        })).collect::<Vec<_>>(),
    })
}

pub fn sieve_csv(rep: &SieveReport) -> String {
    let mut out = String::from("p,half_type,q1,sig1,sig2,sig3,winner\n");
    for r in &rep.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.p,
            half_type_str(r.half),
            half_q1(r.half).map(|q| q.to_string()).unwrap_or_default(),
            r.signature[0],
            r.signature[1],
            r.signature[2],
            r.winner.map(|w| w.to_string()).unwrap_or_default(),
        );
    }
    out
}
