use euclass_core::certify::field_data;
use euclass_core::cyclo::{enumerate_prime_degree_subfields, identify_field, AbelianFieldSpec};
use num_bigint::BigInt;

const ROWS: &[(u64, u64, [i64; 3])] = &[
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

#[test]
fn dbg_all() {
    let mut cache: Vec<AbelianFieldSpec> = Vec::new();
    for &(p, q, c) in ROWS {
        let poly: Vec<BigInt> = vec![c[0].into(), c[1].into(), c[2].into(), 1.into()];
        let cands = enumerate_prime_degree_subfields(p * q, 3);
        let spec = identify_field(&poly, &cands).unwrap().unwrap().at_conductor();
        if cache.iter().any(|s| s.same_field(&spec)) {
            continue;
        }
        cache.push(spec.clone());
        let t0 = std::time::Instant::now();
        match field_data(&spec, 20_000_000) {
            Ok(d) => eprintln!("({p},{q}) cond {} h={} [{:.1}s]", spec.conductor(), d.class_group.order, t0.elapsed().as_secs_f64()),
            Err(e) => eprintln!("({p},{q}) cond {} ERR {e:?} [{:.1}s]", spec.conductor(), t0.elapsed().as_secs_f64()),
        }
    }
}
