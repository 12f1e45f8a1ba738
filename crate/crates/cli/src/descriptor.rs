//! Field and pair descriptors from the command line: either
//! "level:g1,g2,..." (generators of the fixing subgroup) or a monic integer
//! polynomial like "x^3-x^2-30x-27" resolved against the cyclotomic
//! subfield lattice.

use anyhow::{anyhow, bail, Result};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use euclass_core::cyclo::{enumerate_prime_degree_subfields, identify_field, AbelianFieldSpec};
use euclass_core::polyarith::{degree, poly_disc};
use euclass_core::zmod::{is_prime, subgroup_closure};

pub fn parse_field(s: &str) -> Result<AbelianFieldSpec> {
    if let Some((level, gens)) = s.split_once(':') {
        let level: u64 = level.trim().parse().map_err(|_| anyhow!("bad level in {s:?}"))?;
        let gens: Vec<u64> = gens
            .split(',')
            .map(|g| g.trim().parse().map_err(|_| anyhow!("bad generator in {s:?}")))
            .collect::<Result<_>>()?;
        let sub = subgroup_closure(&gens, level).map_err(|e| anyhow!("{e}"))?;
        return AbelianFieldSpec::new(level, sub).map_err(|e| anyhow!("{e}"));
    }
    let poly = parse_poly(s)?;
    let deg = degree(&poly) as u64;
    if deg < 3 || deg % 2 == 0 || !is_prime(deg) {
        bail!("polynomial degree must be an odd prime: {s:?}");
    }
    let disc = poly_disc(&poly);
    if disc.is_zero() || disc.is_negative() {
        bail!("polynomial must have positive nonzero discriminant: {s:?}");
    }
    let s_root = disc.sqrt();
    if &s_root * &s_root != disc {
        bail!("discriminant is not a perfect square; the field is not abelian: {s:?}");
    }
    // disc = (index * conductor)^2 with a small index; try the divisors
    for idx in 1u64..=12 {
        let idx_b = BigInt::from(idx);
        if (&s_root % &idx_b).is_zero() {
            let c = &s_root / &idx_b;
            let Ok(c) = u64::try_from(&c) else { continue };
            if c < 7 {
                continue;
            }
            let candidates: Vec<AbelianFieldSpec> = enumerate_prime_degree_subfields(c, deg)
                .into_iter()
                .filter(|f| f.conductor() == c)
                .collect();
            if let Some(found) = identify_field(&poly, &candidates).map_err(|e| anyhow!("{e}"))? {
                return Ok(found.clone());
            }
        }
    }
    bail!("no cyclotomic subfield matches {s:?}")
}

pub fn parse_prime_pair(s: &str) -> Result<(u64, u64)> {
    let (p, q) = s
        .split_once(',')
        .ok_or_else(|| anyhow!("expected \"p,q\", got {s:?}"))?;
    Ok((
        p.trim().parse().map_err(|_| anyhow!("bad prime in {s:?}"))?,
        q.trim().parse().map_err(|_| anyhow!("bad prime in {s:?}"))?,
    ))
}

/// Monic integer polynomial in x, e.g. "x^3-x^2-30x-27" or "x^3 - 2x + 1".
/// Returns coefficients, constant term first.
pub fn parse_poly(s: &str) -> Result<Vec<BigInt>> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        bail!("empty polynomial");
    }
    let mut terms: Vec<(BigInt, usize)> = Vec::new();
    let bytes = cleaned.as_bytes();
    let mut i = 0usize;
    while i < bytes.len() {
        let sign = match bytes[i] {
            b'+' => {
                i += 1;
                1
            }
            b'-' => {
                i += 1;
                -1
            }
            _ => 1,
        };
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let coef: BigInt = if start == i {
            BigInt::from(1)
        } else {
            cleaned[start..i].parse().map_err(|_| anyhow!("bad coefficient in {s:?}"))?
        };
        let coef = coef * sign;
        let exp = if i < bytes.len() && bytes[i] == b'x' {
            i += 1;
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                let e_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if e_start == i {
                    bail!("missing exponent in {s:?}");
                }
                cleaned[e_start..i].parse().map_err(|_| anyhow!("bad exponent in {s:?}"))?
            } else {
                1
            }
        } else {
            if start == i {
                bail!("unexpected character in {s:?}");
            }
            0
        };
        terms.push((coef, exp));
    }
    let deg = terms.iter().map(|&(_, e)| e).max().unwrap_or(0);
    let mut out = vec![BigInt::zero(); deg + 1];
    for (c, e) in terms {
        out[e] += c;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_parsing() {
        let p = parse_poly("x^3-x^2-30x-27").unwrap();
        let want: Vec<BigInt> =
            [-27, -30, -1, 1].iter().map(|&c| BigInt::from(c)).collect();
        assert_eq!(p, want);
        let q = parse_poly("x^3 - 2x + 1").unwrap();
        let wq: Vec<BigInt> = [1, -2, 0, 1].iter().map(|&c| BigInt::from(c)).collect();
        assert_eq!(q, wq);
        assert!(parse_poly("x^").is_err());
    }

    #[test]
    fn field_descriptors() {
        let by_poly = parse_field("x^3-x^2-2x+1").unwrap();
        assert_eq!(by_poly.conductor(), 7);
        let by_poly91 = parse_field("x^3-x^2-30x-27").unwrap();
        assert_eq!(by_poly91.conductor(), 91);
        let by_gens = parse_field("7:6").unwrap();
        assert!(by_poly.same_field(&by_gens));
        assert!(parse_field("x^2-2").is_err());
    }
}
