use euclass_core::classgrp::{analytically_complete_units, class_group};
use euclass_core::cyclo::{enumerate_prime_degree_subfields, identify_field};
use euclass_core::order::maximal_order;
use euclass_core::units::find_units;
use num_bigint::BigInt;

#[test]
fn dbg() {
    let poly: Vec<BigInt> = vec![64.into(), (-82).into(), (-1).into(), 1.into()];
    let cands = enumerate_prime_degree_subfields(247, 3);
    let spec = identify_field(&poly, &cands).unwrap().unwrap().at_conductor();
    let dp = spec.defining_polynomial().unwrap();
    let o = maximal_order(&dp.coefficients).unwrap();
    let u1 = find_units(&o, Some(&spec), 20_000_000).unwrap();
    eprintln!("find_units reg {}", u1.regulator);
    let u2 = analytically_complete_units(&o, &spec, 20_000_000).unwrap();
    eprintln!("acu reg {}", u2.regulator);
    eprintln!("same units: {}", u1.units == u2.units);
    let cg1 = class_group(&o, &u1, 20_000_000);
    eprintln!("cg with find_units: {:?}", cg1.map(|c| c.order));
    let cg2 = class_group(&o, &u2, 20_000_000);
    eprintln!("cg with acu: {:?}", cg2.map(|c| c.order));
}
