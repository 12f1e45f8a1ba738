//! End-to-end acceptance checks. Every test prints a single
//! "criterion N ...: pass" line on success (run with --nocapture to see
//! them); a failed criterion fails its test.

use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::BigInt;

use euclass_core::certify::{
    build_pair_context, choose_residue_class, field_data, qualify_pair, verify_certificate,
    Conclusion, FieldData,
};
use euclass_core::classgrp::{analytic_class_number, HcfStatus};
use euclass_core::cyclo::{
    compositum, enumerate_prime_degree_subfields, identify_field, AbelianFieldSpec,
};
use euclass_core::order::maximal_order;
use euclass_core::sieve::{run_sieve, HalfType, SieveParams, SieveReport, SieveUnits};
use euclass_core::units::{find_units, multiplicatively_independent, regulator};
use euclass_core::zmod::{element_order, gcd, is_prime, jacobi_symbol};

const CAP: u64 = 20_000_000;

// (p, q, [c0, c1, c2]) for the monic cubic x^3 + c2 x^2 + c1 x + c0
const CLASS_NUMBER_ONE_ROWS: &[(u64, u64, [i64; 3])] = &[
    (7, 13, [1, -2, -1]),
    (7, 13, [-1, -4, -1]),
    (7, 19, [1, -2, -1]),
    (7, 19, [7, -6, -1]),
    (7, 31, [1, -2, -1]),
    (7, 31, [8, -10, -1]),
    (7, 37, [1, -2, -1]),
    (7, 37, [-11, -12, -1]),
    (7, 43, [1, -2, -1]),
    (7, 43, [-8, -14, -1]),
    (7, 61, [1, -2, -1]),
    (7, 61, [9, -20, -1]),
    (7, 67, [1, -2, -1]),
    (7, 67, [-5, -22, -1]),
    (13, 19, [7, -6, -1]),
];

const CLASS_NUMBER_THREE_ROWS: &[(u64, u64, [i64; 3])] = &[
    (7, 13, [-27, -30, -1]),
    (7, 13, [64, -30, -1]),
    (7, 19, [-69, -44, -1]),
    (7, 19, [64, -44, -1]),
    (7, 31, [-209, -72, -1]),
    (7, 31, [225, -72, -1]),
    (7, 37, [211, -86, -1]),
    (7, 37, [-48, -86, -1]),
    (7, 43, [379, -100, -1]),
    (7, 43, [-223, -100, -1]),
    (7, 61, [680, -142, -1]),
    (7, 61, [-601, -142, -1]),
    (7, 67, [-608, -156, -1]),
    (7, 67, [799, -156, -1]),
    (13, 19, [64, -82, -1]),
];

fn poly(c: &[i64; 3]) -> Vec<BigInt> {
    vec![c[0].into(), c[1].into(), c[2].into(), 1.into()]
}

struct Row {
    p: u64,
    q: u64,
    data: FieldData,
}

fn resolve_rows(table: &[(u64, u64, [i64; 3])]) -> Vec<Row> {
    let mut cache: Vec<(AbelianFieldSpec, FieldData)> = Vec::new();
    table
        .iter()
        .map(|&(p, q, c)| {
            let candidates = enumerate_prime_degree_subfields(p * q, 3);
            let spec = identify_field(&poly(&c), &candidates)
                .unwrap()
                .expect("row identifies a cyclotomic subfield")
                .at_conductor();
            let data = match cache.iter().find(|(s, _)| s.same_field(&spec)) {
                Some((_, d)) => d.clone(),
                None => {
                    let d = field_data(&spec, CAP).unwrap();
                    cache.push((spec.clone(), d.clone()));
                    d
                }
            };
            Row { p, q, data }
        })
        .collect()
}

fn table_one() -> &'static (Vec<Row>, f64) {
    static T: OnceLock<(Vec<Row>, f64)> = OnceLock::new();
    T.get_or_init(|| {
        let t0 = Instant::now();
        let rows = resolve_rows(CLASS_NUMBER_ONE_ROWS);
        (rows, t0.elapsed().as_secs_f64())
    })
}

fn table_two() -> &'static (Vec<Row>, f64) {
    static T: OnceLock<(Vec<Row>, f64)> = OnceLock::new();
    T.get_or_init(|| {
        let t0 = Instant::now();
        let rows = resolve_rows(CLASS_NUMBER_THREE_ROWS);
        (rows, t0.elapsed().as_secs_f64())
    })
}

#[test]
fn criterion_01_class_number_one_table() {
    let (rows, secs) = table_one();
    assert_eq!(rows.len(), 15);
    for r in rows {
        assert_eq!(
            r.data.class_group.order, 1,
            "pair ({}, {}) row has h != 1",
            r.p, r.q
        );
    }
    assert!(*secs <= 300.0, "took {secs:.1}s, limit 300s");
    println!("criterion 1 (class-number-one table, {secs:.1}s): pass");
}

#[test]
fn criterion_02_class_number_three_table() {
    let (rows, secs) = table_two();
    assert_eq!(rows.len(), 15);
    for r in rows {
        assert_eq!(r.data.spec.conductor(), r.p * r.q);
        assert_eq!(
            r.data.class_group.order, 3,
            "pair ({}, {}) row has h != 3",
            r.p, r.q
        );
    }
    assert!(*secs <= 900.0, "took {secs:.1}s, limit 900s");
    println!("criterion 2 (class-number-three table, 15 rows, {secs:.1}s): pass");
}

#[test]
fn criterion_03_genus_and_hilbert_certification() {
    let (t1, _) = table_one();
    let (t2, _) = table_two();
    for r in t1 {
        assert_eq!(r.data.certificate.genus_number, 1);
        assert_eq!(r.data.certificate.hcf_abelian, HcfStatus::Trivial);
    }
    for r in t2 {
        let g = r.data.certificate.genus_number;
        let h = r.data.class_group.order;
        assert_eq!(g, 3);
        assert_eq!(h, 3);
        assert_eq!(r.data.certificate.hcf_abelian, HcfStatus::Certified);
    }
    for r in t1.iter().chain(t2.iter()) {
        let g = r.data.certificate.genus_number;
        let h = r.data.class_group.order;
        assert_eq!(g % h, 0, "h must divide g");
        assert_eq!(h % g, 0, "g must divide h");
        let mut t = h;
        while t % 3 == 0 {
            t /= 3;
        }
        assert_eq!(t, 1, "h must be a power of 3");
    }
    println!("criterion 3 (genus numbers and Hilbert-class-field statuses): pass");
}

#[test]
fn criterion_04_analytic_oracle_agreement() {
    let mut checked = 0usize;
    for n in 7u64..=250 {
        for spec in enumerate_prime_degree_subfields(n, 3) {
            if spec.conductor() != n {
                continue;
            }
            let d = field_data(&spec, CAP).unwrap();
            let (ha, residue) = analytic_class_number(&spec, d.regulator).unwrap();
            assert_eq!(
                d.class_group.order, ha,
                "conductor {n}: enumerated {} vs analytic {ha}",
                d.class_group.order
            );
            assert!(residue < 1e-4, "conductor {n}: residue {residue}");
            checked += 1;
        }
    }
    assert!(checked >= 30, "only {checked} cubic fields checked");
    println!("criterion 4 (analytic agreement for {checked} cubics of conductor <= 250): pass");
}

#[test]
fn criterion_05_residue_class_certificates() {
    // h = 3 pair: conductor 217 with conductor 247
    let (t2, _) = table_two();
    let d217 = &t2.iter().find(|r| r.data.spec.conductor() == 217).unwrap().data;
    let d247 = &t2.iter().find(|r| r.data.spec.conductor() == 247).unwrap().data;
    let ctx = build_pair_context(d217, d247).unwrap();
    let cert = choose_residue_class(&ctx).unwrap();
    let checks = verify_certificate(&ctx, &cert);
    assert!(cert.all_pass() && checks.all_pass(), "h=3 pair certificate failed");
    // h = 1 pair: conductor 7 with conductor 13
    let k7 = enumerate_prime_degree_subfields(7, 3).remove(0);
    let k13 = enumerate_prime_degree_subfields(13, 3).remove(0);
    let d7 = field_data(&k7, CAP).unwrap();
    let d13 = field_data(&k13, CAP).unwrap();
    let ctx1 = build_pair_context(&d7, &d13).unwrap();
    let cert1 = choose_residue_class(&ctx1).unwrap();
    assert_eq!(cert1.f, 1456);
    assert_eq!(cert1.d, 1455);
    assert_eq!(gcd((cert1.d - 1) / 2, cert1.f), 1);
    assert_eq!(gcd(727, 1456), 1);
    assert!(verify_certificate(&ctx1, &cert1).all_pass());
    println!("criterion 5 (residue-class certificates for the h=3 and h=1 pairs): pass");
}

#[test]
fn criterion_06_relative_ramification_rejection() {
    let k91 = enumerate_prime_degree_subfields(91, 3)
        .into_iter()
        .find(|s| s.conductor() == 91)
        .unwrap();
    let k7 = enumerate_prime_degree_subfields(7, 3).remove(0);
    let rep = qualify_pair(&k91, &k7, CAP);
    assert_eq!(rep.conclusion, Conclusion::Rejected);
    assert!(
        rep.reasons.iter().any(|r| r.contains("not relatively ramified")),
        "reasons: {:?}",
        rep.reasons
    );
    println!("criterion 6 (genus-field pair rejected as not relatively ramified): pass");
}

struct SieveRun {
    report: SieveReport,
    k: AbelianFieldSpec,
    secs: f64,
}

fn sieve_run() -> &'static SieveRun {
    static S: OnceLock<SieveRun> = OnceLock::new();
    S.get_or_init(|| {
        let t0 = Instant::now();
        let k7 = enumerate_prime_degree_subfields(7, 3).remove(0);
        let k13 = enumerate_prime_degree_subfields(13, 3).remove(0);
        let rep = qualify_pair(&k7, &k13, CAP);
        assert_eq!(rep.conclusion, Conclusion::Qualified);
        let cert = rep.certificate.expect("qualified pair certificate");
        assert_eq!(cert.u1 % cert.f, 1455);
        let params = SieveParams::new(cert.u1 % cert.f, cert.f, 1_000_000).unwrap();
        let o1 = maximal_order(&k7.defining_polynomial().unwrap().coefficients).unwrap();
        let o2 = maximal_order(&k13.defining_polynomial().unwrap().coefficients).unwrap();
        let s1 = find_units(&o1, Some(&k7), CAP).unwrap();
        let s2 = find_units(&o2, Some(&k13), CAP).unwrap();
        let k = compositum(&k7, &k13).at_conductor();
        let units = SieveUnits {
            o1: &o1,
            u1a: &s1.units[0],
            u1b: &s1.units[1],
            o2: &o2,
            u2a: &s2.units[0],
        };
        let report = run_sieve(&params, &k, &units).unwrap();
        SieveRun { report, k, secs: t0.elapsed().as_secs_f64() }
    })
}

#[test]
fn criterion_07_sieve_soundness() {
    let run = sieve_run();
    let report = &run.report;
    let p = &report.params;
    assert_eq!(p.f, 1456);
    assert_eq!(p.u1, 1455);
    let lo = (p.x as f64).powf(1.0 - p.epsilon).ceil() as u64;
    for rec in &report.records {
        assert!(is_prime(rec.p), "{} not prime", rec.p);
        assert_eq!(rec.p % p.f, p.u1, "{} outside the progression", rec.p);
        assert!(rec.p > lo && rec.p <= p.x, "{} outside the window", rec.p);
        let half = (rec.p - 1) / 2;
        match rec.half {
            HalfType::Prime => assert!(is_prime(half)),
            HalfType::Semiprime { q1, q2 } => {
                assert!(is_prime(q1) && is_prime(q2) && q1 <= q2);
                assert_eq!(q1 * q2, half);
                let pf = rec.p as f64;
                let lo_q = pf.powf(p.a);
                let hi_q = pf.powf(p.b / (1.0 - p.epsilon));
                assert!(q1 as f64 >= lo_q && q1 as f64 <= hi_q);
            }
        }
        assert!(run.k.splits_completely(rec.p).unwrap(), "{} does not split", rec.p);
        assert_eq!(jacobi_symbol(-1, rec.p).unwrap(), -1, "-1 is a square mod {}", rec.p);
    }
    let total: u64 = report.m_n_counts.iter().sum();
    assert_eq!(total, report.m_count, "partition is not exact");
    assert_eq!(report.m_count, report.records.len() as u64);
    assert!(run.secs <= 600.0, "took {:.1}s, limit 600s", run.secs);
    println!(
        "criterion 7 (sieve soundness at X=10^6, {} records, {:.1}s): pass",
        report.m_count, run.secs
    );
}

#[test]
fn criterion_08_primitive_root_verification() {
    let run = sieve_run();
    let report = &run.report;
    let mut winners = 0u64;
    for rec in &report.records {
        if let Some(w) = rec.winner {
            assert_eq!(
                element_order(w, rec.p).unwrap(),
                rec.p - 1,
                "winner {w} is not primitive mod {}",
                rec.p
            );
            winners += 1;
        }
    }
    assert_eq!(winners, report.winner_count);
    assert!(winners > 0, "no primitive-root winners at X=10^6");
    println!("criterion 8 (direct order test for {winners} winners): pass");
}

#[test]
fn criterion_09_unit_system_validity() {
    let mut lcg = 0x2545F4914F6CDD1Du64;
    let mut next = move || {
        lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (lcg >> 33) as u64
    };
    for conductor in [7u64, 13, 19] {
        let spec = enumerate_prime_degree_subfields(conductor, 3)
            .into_iter()
            .find(|s| s.conductor() == conductor)
            .unwrap();
        let o = maximal_order(&spec.defining_polynomial().unwrap().coefficients).unwrap();
        let sys = find_units(&o, Some(&spec), CAP).unwrap();
        for u in &sys.units {
            let nu = o.norm(u);
            assert!(nu == BigInt::from(1) || nu == BigInt::from(-1), "unit norm not +-1");
        }
        let base = regulator(&o, &sys.units).unwrap();
        for _ in 0..20 {
            // random composition of two integer shears: always unimodular
            let (a, c) = (1 + next() % 2, 1 + next() % 2);
            let mut v0 = o.mul(&sys.units[0], &o.pow(&sys.units[1], a));
            let v1 = o.mul(&o.pow(&v0, c), &sys.units[1]);
            if next() % 2 == 0 {
                v0 = o.mul(&v0, &v1);
            }
            let r2 = regulator(&o, &[v0, v1]).unwrap();
            assert!(
                (r2 - base).abs() < 1e-9 * base.max(1.0),
                "regulator moved: {base} -> {r2}"
            );
        }
        // independence verdicts against exact relations
        assert!(multiplicatively_independent(&o, &sys.units).unwrap());
        let w = o.mul(&o.pow(&sys.units[0], 2), &sys.units[1]);
        let dep = vec![sys.units[0].clone(), sys.units[1].clone(), w.clone()];
        assert!(!multiplicatively_independent(&o, &dep).unwrap());
        // the claimed relation holds exactly
        assert_eq!(o.mul(&o.pow(&sys.units[0], 2), &sys.units[1]), w);
    }
    println!("criterion 9 (unit norms, regulator invariance, independence): pass");
}

#[test]
fn criterion_10_byte_identical_reruns() {
    let bin = env!("CARGO_BIN_EXE_euclass");
    let cases: &[&[&str]] = &[
        &["--seed", "42", "--output", "json", "fields", "91"],
        &["--seed", "42", "--output", "csv", "fields", "91"],
        &["--seed", "42", "--output", "json", "qualify", "7:6", "13:5"],
        &["--seed", "42", "--output", "csv", "qualify", "7:6", "13:5"],
    ];
    for args in cases {
        let run = |_: usize| {
            let out = Command::new(bin).args(*args).output().expect("spawn euclass");
            assert!(out.status.success(), "euclass {args:?} failed");
            out.stdout
        };
        let first = run(0);
        let second = run(1);
        assert_eq!(first, second, "outputs differ for {args:?}");
        assert!(!first.is_empty());
    }
    println!("criterion 10 (byte-identical JSON/CSV across reruns): pass");
}
