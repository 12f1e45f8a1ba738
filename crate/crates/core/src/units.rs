//! Fundamental unit systems and regulators for totally real fields.
//!
//! Units are harvested from two exact sources: a Fincke-Pohst search for
//! elements of small square-sum whose norm is a unit, and — for abelian
//! fields of composite conductor — circular units built from `1 - zeta^a`
//! products over fixing-subgroup cosets, converted to the integral basis by
//! exact trace pairing. The multiplicative structure (basis extraction,
//! membership, saturation at small primes) is certified with exact integer
//! arithmetic; floating point is used only to propose exponents and roots,
//! never to accept them.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cyclo::{trace_table, trace_to_q, AbelianFieldSpec, CycEl};
use crate::lattice::{enumerate_short, hnf, lll_gram, rat_from_int, rat_solve, IntMat};
use crate::order::{big_to_f64, Elem, MaximalOrder};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnitsError {
    /// Fewer than degree-1 independent units were found.
    RankDeficient { found: usize, need: usize },
    /// Short-vector enumeration ran out of its node budget.
    EnumerationBudget,
    /// An exactness check failed (proposed relation did not verify).
    VerificationFailed,
    /// Circular-unit conversion produced non-integral coordinates.
    NonIntegralCircularUnit,
}

impl fmt::Display for UnitsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitsError::RankDeficient { found, need } => {
                write!(f, "found only {found} of {need} independent units")
            }
            UnitsError::EnumerationBudget => write!(f, "unit enumeration exceeded node budget"),
            UnitsError::VerificationFailed => write!(f, "unit relation failed exact verification"),
            UnitsError::NonIntegralCircularUnit => {
                write!(f, "circular unit is not integral in the order basis")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct UnitSystem {
    /// Fundamental system modulo torsion {+-1}; length degree-1.
    pub units: Vec<Elem>,
    pub regulator: f64,
    /// The system is ell-saturated for every prime ell up to this bound.
    pub saturated_through: u64,
}

/// Unit inverse by exact division: solve x * M_u = coords(1).
pub fn unit_inverse(o: &MaximalOrder, u: &Elem) -> Option<Elem> {
    let n = o.degree;
    let m = o.mult_matrix(u);
    // x * M = e  <=>  M^T x^T = e^T
    let mt: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| BigRational::from(m[j][i].clone())).collect())
        .collect();
    let rhs: Vec<BigRational> = o.one().iter().map(|c| BigRational::from(c.clone())).collect();
    let sol = rat_solve(&mt, &rhs)?;
    let mut out = Vec::with_capacity(n);
    for s in sol {
        if !s.is_integer() {
            return None;
        }
        out.push(s.to_integer());
    }
    Some(out)
}

fn is_pm_one(o: &MaximalOrder, u: &Elem) -> bool {
    let one = o.one();
    u == &one || u.iter().zip(&one).all(|(a, b)| *a == -b)
}

/// Product of signed powers, exact.
fn power_product(o: &MaximalOrder, gens: &[Elem], exps: &[i64]) -> Option<Elem> {
    let mut acc = o.one();
    for (g, &e) in gens.iter().zip(exps) {
        if e == 0 {
            continue;
        }
        let base = if e > 0 {
            g.clone()
        } else {
            unit_inverse(o, g)?
        };
        let p = o.pow(&base, e.unsigned_abs());
        acc = o.mul(&acc, &p);
    }
    Some(acc)
}

fn log_vector(o: &MaximalOrder, roots: &[f64], u: &Elem) -> Vec<f64> {
    roots
        .iter()
        .map(|&r| libm::log(libm::fabs(o.embed(u, r))))
        .collect()
}

/// Logarithmic embeddings of a unit over all real places. The embedding of
/// smallest magnitude is recovered from the identity sum(logs) = 0 rather
/// than direct evaluation, which loses everything to cancellation for units
/// of large height.
pub(crate) fn unit_logs(o: &MaximalOrder, roots: &[f64], u: &Elem) -> Vec<f64> {
    let embeds: Vec<f64> = roots.iter().map(|&r| o.embed(u, r)).collect();
    let mut logs: Vec<f64> = embeds.iter().map(|&x| libm::log(libm::fabs(x))).collect();
    let mut i_min = 0usize;
    for (i, &e) in embeds.iter().enumerate() {
        if libm::fabs(e) < libm::fabs(embeds[i_min]) {
            i_min = i;
        }
    }
    let others: f64 = logs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != i_min)
        .map(|(_, &l)| l)
        .sum();
    if others.is_finite() {
        logs[i_min] = -others;
    }
    logs
}

/// Solves the square system over the first `r` coordinates.
fn solve_f64(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).map(|j| a[j][i]).collect();
            row.push(b[i]);
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| m[x][c].abs().partial_cmp(&m[y][c].abs()).unwrap())?;
        if m[p][c].abs() < 1e-12 {
            return None;
        }
        m.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = m[r][c] / m[c][c];
                for k in c..=n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Integer HNF with transform tracking over the generator list: returns
/// (basis exponent rows over gens) for the subgroup generated.
fn subgroup_basis_exponents(rows: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let k = rows.len();
    let cols = rows[0].len();
    // [G | I] then HNF by the shared routine, reading the transform off the
    // right block; rows whose left block is nonzero form the basis
    let mut aug: IntMat = Vec::with_capacity(k);
    for (i, r) in rows.iter().enumerate() {
        let mut row: Vec<BigInt> = r.iter().map(|&x| BigInt::from(x)).collect();
        for j in 0..k {
            row.push(if j == i { BigInt::one() } else { BigInt::zero() });
        }
        aug.push(row);
    }
    let h = hnf(aug);
    let mut out = Vec::new();
    for row in &h {
        if row[..cols].iter().any(|x| !x.is_zero()) {
            let exps: Vec<i64> = row[cols..]
                .iter()
                .map(|x| i64::try_from(x).expect("small exponent"))
                .collect();
            out.push(exps);
        }
    }
    out
}

/// Collects candidate units by short-element enumeration under the exact
/// trace form: bound 3 * disc^(1/3), doubled up to six times.
fn short_units(o: &MaximalOrder, node_cap: u64) -> Result<Vec<Elem>, UnitsError> {
    let n = o.degree;
    let mut gram: Vec<Vec<BigRational>> = rat_from_int(&o.trace_form);
    let mut u = crate::lattice::identity_int(n);
    lll_gram(&mut gram, &mut u);
    let disc_f = big_to_f64(&o.disc).abs();
    let mut bound_f = 3.0 * libm::cbrt(disc_f);
    let mut found: Vec<Elem> = Vec::new();
    for _ in 0..=6 {
        let bound = BigRational::from(BigInt::from(libm::ceil(bound_f) as i64));
        let vecs = enumerate_short(&gram, &bound, node_cap)
            .map_err(|_| UnitsError::EnumerationBudget)?;
        found.clear();
        for v in vecs {
            // back to order coordinates through the LLL transform
            let mut coords = vec![BigInt::zero(); n];
            for (i, &vi) in v.iter().enumerate() {
                if vi != 0 {
                    for j in 0..n {
                        coords[j] += BigInt::from(vi) * &u[i][j];
                    }
                }
            }
            if o.norm(&coords).abs() == BigInt::one() && !is_pm_one(o, &coords) {
                found.push(coords);
            }
        }
        // enough independent material? rank check happens upstream; a crude
        // count gate keeps the cheap bound when it already suffices
        if found.len() >= 2 * (n - 1) {
            break;
        }
        bound_f *= 2.0;
    }
    Ok(found)
}

/// Circular units of an abelian field with composite conductor: for each
/// fixing-subgroup coset, prod (1 - zeta^a) is a unit of the field (the
/// cyclotomic norm of 1 - zeta is 1 away from prime-power conductors).
/// Coordinates are recovered exactly through the trace pairing against the
/// period power basis.
pub fn circular_units(o: &MaximalOrder, spec: &AbelianFieldSpec) -> Result<Vec<Elem>, UnitsError> {
    let canon = spec.at_conductor();
    let c = canon.level();
    if crate::zmod::factorize(c).factors.len() < 2 {
        return Ok(Vec::new());
    }
    let n = o.degree;
    let cosets = canon.cyclic_cosets();
    let theta = CycEl::from_exponents(c, &cosets[0]);
    // period power basis 1, theta, .., theta^(n-1) and its trace Gram
    let mut powers = vec![CycEl::from_integer(c, BigInt::one())];
    for _ in 1..n {
        let last = powers.last().unwrap().mul(&theta);
        powers.push(last);
    }
    let table = trace_table(c);
    let gram: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigRational::from(trace_to_q(&powers[i].mul(&powers[j]), &table)))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for coset in &cosets {
        // prod (1 - zeta^a) over the coset
        let mut xi = CycEl::from_integer(c, BigInt::one());
        for &a in coset {
            let term = CycEl::from_integer(c, BigInt::one())
                .sub(&CycEl::from_exponents(c, &[a]));
            xi = xi.mul(&term);
        }
        let rhs: Vec<BigRational> = (0..n)
            .map(|i| BigRational::from(trace_to_q(&xi.mul(&powers[i]), &table)))
            .collect();
        let x = solve_gram(&gram, &rhs).ok_or(UnitsError::NonIntegralCircularUnit)?;
        // x = rational coords over the power basis of theta; convert to the
        // order basis (theta is the root of the defining polynomial)
        let bt: Vec<Vec<BigRational>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|col| BigRational::from(o.basis[col][r].clone()))
                    .collect()
            })
            .collect();
        let rhs2: Vec<BigRational> = x
            .iter()
            .map(|xi| xi * BigRational::from(o.den.clone()))
            .collect();
        let sol = rat_solve(&bt, &rhs2).ok_or(UnitsError::NonIntegralCircularUnit)?;
        let mut coords = Vec::with_capacity(n);
        for s in sol {
            if !s.is_integer() {
                return Err(UnitsError::NonIntegralCircularUnit);
            }
            coords.push(s.to_integer());
        }
        if o.norm(&coords).abs() != BigInt::one() {
            return Err(UnitsError::NonIntegralCircularUnit);
        }
        if !is_pm_one(o, &coords) {
            out.push(coords);
        }
    }
    Ok(out)
}

fn solve_gram(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    rat_solve(&a.to_vec(), b)
}

/// Fundamental system of units modulo {+-1}, with regulator, saturated at
/// the primes 2, 3, 5 and 7. `spec` enables the circular-unit source.
pub fn find_units(
    o: &MaximalOrder,
    spec: Option<&AbelianFieldSpec>,
    node_cap: u64,
) -> Result<UnitSystem, UnitsError> {
    let n = o.degree;
    let rank = n - 1;
    let roots = o.real_embeddings();
    let mut candidates = short_units(o, node_cap)?;
    if let Some(s) = spec {
        candidates.extend(circular_units(o, s)?);
    }
    // independent seed system, smallest units first
    candidates.sort_by(|a, b| o.trace_pairing(a, a).cmp(&o.trace_pairing(b, b)));
    let mut basis: Vec<Elem> = Vec::new();
    let mut basis_logs: Vec<Vec<f64>> = Vec::new();
    for u in &candidates {
        if basis.len() == rank {
            break;
        }
        let lv = unit_logs(o, &roots, u)[..rank].to_vec();
        if gram_schmidt_rank(&basis_logs, &lv) {
            basis.push(u.clone());
            basis_logs.push(lv);
        }
    }
    if basis.len() < rank {
        return Err(UnitsError::RankDeficient {
            found: basis.len(),
            need: rank,
        });
    }
    // close the subgroup over every candidate: express each candidate over
    // the basis; non-integer (rational) exponents enlarge the basis
    for _pass in 0..8 {
        let mut changed = false;
        let logs: Vec<Vec<f64>> =
            basis.iter().map(|b| unit_logs(o, &roots, b)[..rank].to_vec()).collect();
        for u in &candidates {
            let lv = unit_logs(o, &roots, u)[..rank].to_vec();
            let c = match solve_f64(&logs, &lv) {
                Some(c) => c,
                None => continue,
            };
            let rounded: Vec<i64> = c.iter().map(|&x| libm::round(x) as i64).collect();
            let near = c
                .iter()
                .zip(&rounded)
                .all(|(&x, &r)| (x - r as f64).abs() < 1e-6);
            if near {
                // membership must verify exactly (up to sign)
                let w = power_product(o, &basis, &rounded).ok_or(UnitsError::VerificationFailed)?;
                let diff_ok = w == *u || w.iter().zip(u).all(|(a, b)| *a == -b);
                if !diff_ok {
                    // the float solve lied; drop the candidate, saturation
                    // and the analytic index check absorb any lost index
                    continue;
                }
                continue;
            }
            // find a denominator and refine the subgroup
            let m = (2..=64u32).find(|&m| {
                c.iter()
                    .all(|&x| (x * m as f64 - libm::round(x * m as f64)).abs() < 1e-5)
            });
            let Some(m) = m else {
                // coordinates fit no small denominator: noisy logs or a
                // huge-index candidate; skip it rather than abort
                continue;
            };
            // generators: basis (coords m*e_i) and u (coords round(m*c))
            let mut rows: Vec<Vec<i64>> = (0..rank)
                .map(|i| {
                    let mut r = vec![0i64; rank];
                    r[i] = m as i64;
                    r
                })
                .collect();
            rows.push(c.iter().map(|&x| libm::round(x * m as f64) as i64).collect());
            let exps = subgroup_basis_exponents(rows);
            if exps.len() != rank {
                return Err(UnitsError::VerificationFailed);
            }
            let mut gens = basis.clone();
            gens.push(u.clone());
            let mut new_basis = Vec::with_capacity(rank);
            for e in &exps {
                let w = power_product(o, &gens, e).ok_or(UnitsError::VerificationFailed)?;
                if o.norm(&w).abs() != BigInt::one() {
                    return Err(UnitsError::VerificationFailed);
                }
                new_basis.push(w);
            }
            basis = new_basis;
            changed = true;
            break;
        }
        if !changed {
            break;
        }
    }
    // saturation at small primes
    let mut sys = UnitSystem {
        units: basis,
        regulator: 0.0,
        saturated_through: 7,
    };
    for ell in [2u64, 3, 5, 7] {
        saturate_at(o, &mut sys, ell)?;
    }
    let logs: Vec<Vec<f64>> =
        sys.units.iter().map(|b| unit_logs(o, &roots, b)[..rank].to_vec()).collect();
    sys.regulator = det_f64(&logs).abs();
    Ok(sys)
}

/// In-place ell-saturation: while some nontrivial power product of the
/// basis (exponents in 0..ell) has an exact ell-th root in the order, the
/// root replaces a basis unit. Returns whether the lattice grew; the
/// regulator is updated.
pub fn saturate_at(
    o: &MaximalOrder,
    sys: &mut UnitSystem,
    ell: u64,
) -> Result<bool, UnitsError> {
    let rank = o.degree - 1;
    let roots = o.real_embeddings();
    let mut changed = false;
    'restart: loop {
        let exps = nonzero_classes(rank, ell);
        for e in &exps {
            let ie: Vec<i64> = e.iter().map(|&x| x as i64).collect();
            let w = power_product(o, &sys.units, &ie).ok_or(UnitsError::VerificationFailed)?;
            if let Some(v) = exact_ell_root(o, &roots, &w, ell) {
                // replace one basis unit carrying a nonzero exponent
                let j = e.iter().position(|&x| x != 0).unwrap();
                sys.units[j] = v;
                changed = true;
                continue 'restart;
            }
        }
        break;
    }
    if changed {
        let logs: Vec<Vec<f64>> = sys
            .units
            .iter()
            .map(|b| unit_logs(o, &roots, b)[..rank].to_vec())
            .collect();
        sys.regulator = det_f64(&logs).abs();
    }
    Ok(changed)
}

/// Regulator of a full-rank unit system: |det| of the (degree-1)-square
/// matrix of logarithmic embeddings. Errors when the system has the wrong
/// size or the log lattice is rank deficient.
pub fn regulator(o: &MaximalOrder, units: &[Elem]) -> Result<f64, UnitsError> {
    let rank = o.degree - 1;
    if units.len() != rank {
        return Err(UnitsError::RankDeficient {
            found: units.len(),
            need: rank,
        });
    }
    let roots = o.real_embeddings();
    let logs: Vec<Vec<f64>> = units
        .iter()
        .map(|u| unit_logs(o, &roots, u)[..rank].to_vec())
        .collect();
    let det = det_f64(&logs).abs();
    if det < 1e-9 {
        let mut found = 0usize;
        let mut acc: Vec<Vec<f64>> = Vec::new();
        for l in &logs {
            if gram_schmidt_rank(&acc, l) {
                acc.push(l.clone());
                found += 1;
            }
        }
        return Err(UnitsError::RankDeficient { found, need: rank });
    }
    Ok(det)
}

/// Whether the elements admit no multiplicative relation modulo {+-1}.
/// Candidate relations are proposed from the scaled log lattice by LLL and
/// accepted only after an exact product comparison; a proposal that fails
/// the exact check is discarded.
pub fn multiplicatively_independent(
    o: &MaximalOrder,
    elems: &[Elem],
) -> Result<bool, UnitsError> {
    if elems.is_empty() {
        return Ok(true);
    }
    for x in elems {
        if x.iter().all(|c| c.is_zero()) {
            return Err(UnitsError::VerificationFailed);
        }
        if is_pm_one(o, x) {
            return Ok(false);
        }
    }
    let k = elems.len();
    let n = o.degree;
    let roots = o.real_embeddings();
    // full log vectors so non-unit norms count as an extra coordinate;
    // units get the norm-identity-corrected logs
    let vecs: Vec<Vec<f64>> = elems
        .iter()
        .map(|x| {
            if o.norm(x).abs() == BigInt::one() {
                unit_logs(o, &roots, x)
            } else {
                log_vector(o, &roots, x)
            }
        })
        .collect();
    // lattice rows [round(C * v_i) | e_i]; short rows with tiny log part
    // are relation candidates, exponents read off the identity block
    let scale = 1e8f64;
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(k);
    for (i, v) in vecs.iter().enumerate() {
        let mut r: Vec<BigInt> = v
            .iter()
            .map(|&x| BigInt::from(libm::round(x * scale) as i128))
            .collect();
        for j in 0..k {
            r.push(if j == i { BigInt::one() } else { BigInt::zero() });
        }
        rows.push(r);
    }
    let mut gram: Vec<Vec<BigRational>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let dot: BigInt = rows[i]
                        .iter()
                        .zip(&rows[j])
                        .map(|(a, b)| a * b)
                        .sum();
                    BigRational::from(dot)
                })
                .collect()
        })
        .collect();
    let mut u = crate::lattice::identity_int(k);
    lll_gram(&mut gram, &mut u);
    for t in &u {
        let exps: Vec<i64> = t
            .iter()
            .map(|x| i64::try_from(x).map_err(|_| UnitsError::VerificationFailed))
            .collect::<Result<_, _>>()?;
        if exps.iter().all(|&e| e == 0) {
            continue;
        }
        // residual log norm of the proposed relation
        let mut res = 0.0f64;
        for j in 0..n {
            let s: f64 = exps
                .iter()
                .zip(&vecs)
                .map(|(&e, v)| e as f64 * v[j])
                .sum();
            res += s * s;
        }
        if libm::sqrt(res) > 1e-4 {
            continue;
        }
        // exact check: split into positive and negative exponent products
        let mut pos = o.one();
        let mut neg = o.one();
        for (x, &e) in elems.iter().zip(&exps) {
            if e > 0 {
                pos = o.mul(&pos, &o.pow(x, e as u64));
            } else if e < 0 {
                neg = o.mul(&neg, &o.pow(x, (-e) as u64));
            }
        }
        let negated: Elem = neg.iter().map(|c| -c).collect();
        if pos == neg || pos == negated {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Representatives of the nonzero classes of `F_ell^rank` up to scalar.
fn nonzero_classes(rank: usize, ell: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let total = (0..rank).fold(1u64, |a, _| a * ell);
    for code in 1..total {
        let mut v = Vec::with_capacity(rank);
        let mut c = code;
        for _ in 0..rank {
            v.push(c % ell);
            c /= ell;
        }
        // normalize: first nonzero equals 1
        if v.iter().find(|&&x| x != 0) == Some(&1) {
            out.push(v);
        }
    }
    out
}

/// If `w` (or `-w` for odd ell) is an exact ell-th power in the order,
/// returns a root; the root candidate comes from embeddings and rounding,
/// the acceptance from exact integer arithmetic.
fn exact_ell_root(o: &MaximalOrder, roots: &[f64], w: &Elem, ell: u64) -> Option<Elem> {
    let n = o.degree;
    // magnitudes from the norm-identity logs: robust against the
    // cancellation that makes direct embedding of tall units evaluate to 0
    let logs = unit_logs(o, roots, w);
    let magnitudes: Vec<f64> = logs.iter().map(|&l| libm::exp(l / ell as f64)).collect();
    // every per-embedding sign combination is tried (the signs of the base
    // are unreliable exactly where cancellation struck); acceptance below
    // is exact, so spurious patterns cost only a small solve each
    let emb_matrix: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = o.zero();
            e[i] = BigInt::one();
            roots.iter().map(|&r| o.embed(&e, r)).collect()
        })
        .collect();
    for code in 0..(1u32 << n) {
        let pattern: Vec<f64> = (0..n)
            .map(|b| if code >> b & 1 == 1 { -1.0 } else { 1.0 })
            .collect();
        let vals: Vec<f64> = magnitudes.iter().zip(&pattern).map(|(m, s)| m * s).collect();
        let Some(x) = solve_f64(&emb_matrix, &vals) else {
            continue;
        };
        let coords: Vec<BigInt> = x.iter().map(|&c| BigInt::from(libm::round(c) as i64)).collect();
        if coords.iter().zip(&x).any(|(c, &xf)| (big_to_f64(c) - xf).abs() > 0.3) {
            continue;
        }
        let p = o.pow(&coords, ell);
        if &p == w {
            return Some(coords);
        }
        let neg: Elem = p.iter().map(|c| -c).collect();
        if ell % 2 == 1 && &neg == w {
            return Some(coords.iter().map(|c| -c).collect());
        }
    }
    None
}

fn gram_schmidt_rank(existing: &[Vec<f64>], v: &[f64]) -> bool {
    let mut w = v.to_vec();
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    for e in existing {
        ortho.push(e.clone());
    }
    // orthogonalize the existing set first
    for i in 0..ortho.len() {
        for j in 0..i {
            let d: f64 = ortho[i].iter().zip(&ortho[j]).map(|(a, b)| a * b).sum();
            let n2: f64 = ortho[j].iter().map(|a| a * a).sum();
            if n2 > 1e-18 {
                let f = d / n2;
                for k in 0..ortho[i].len() {
                    ortho[i][k] -= f * ortho[j][k];
                }
            }
        }
    }
    for e in &ortho {
        let d: f64 = w.iter().zip(e).map(|(a, b)| a * b).sum();
        let n2: f64 = e.iter().map(|a| a * a).sum();
        if n2 > 1e-18 {
            let f = d / n2;
            for k in 0..w.len() {
                w[k] -= f * e[k];
            }
        }
    }
    let res: f64 = w.iter().map(|a| a * a).sum();
    res > 1e-12
}

fn det_f64(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut det = 1.0f64;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| a[x][c].abs().partial_cmp(&a[y][c].abs()).unwrap())
            .unwrap();
        if a[p][c].abs() < 1e-15 {
            return 0.0;
        }
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::enumerate_prime_degree_subfields;
    use crate::order::maximal_order;

    fn bp(coeffs: &[i64]) -> Vec<BigInt> {
        coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn units_conductor_7() {
        let o = maximal_order(&bp(&[1, -2, -1, 1])).unwrap();
        let sys = find_units(&o, None, 2_000_000).unwrap();
        assert_eq!(sys.units.len(), 2);
        // classical regulator of the conductor-7 cubic
        assert!((sys.regulator - 0.5255).abs() < 1e-3, "{}", sys.regulator);
        for u in &sys.units {
            assert_eq!(o.norm(u).abs(), BigInt::one());
        }
    }

    #[test]
    fn circular_units_are_units() {
        let subs = enumerate_prime_degree_subfields(91, 3);
        let spec = subs.iter().find(|s| s.conductor() == 91).unwrap();
        let poly = spec.defining_polynomial().unwrap();
        let o = maximal_order(&poly.coefficients).unwrap();
        let cu = circular_units(&o, spec).unwrap();
        assert!(cu.len() >= 2);
        for u in &cu {
            assert_eq!(o.norm(u).abs(), BigInt::one());
        }
    }

    #[test]
    fn units_with_circular_support() {
        for n in [91u64, 133] {
            let subs = enumerate_prime_degree_subfields(n, 3);
            for spec in subs.iter().filter(|s| s.conductor() == n) {
                let poly = spec.defining_polynomial().unwrap();
                let o = maximal_order(&poly.coefficients).unwrap();
                let sys = find_units(&o, Some(spec), 2_000_000).unwrap();
                assert_eq!(sys.units.len(), 2);
                assert!(sys.regulator > 0.1);
                // inverses are exact
                for u in &sys.units {
                    let inv = unit_inverse(&o, u).unwrap();
                    assert_eq!(o.mul(u, &inv), o.one());
                }
            }
        }
    }

    #[test]
    fn saturation_detects_forced_powers() {
        // hand the algorithm squares of fundamental units; saturation at 2
        // must recover a system with the fundamental regulator
        let o = maximal_order(&bp(&[1, -2, -1, 1])).unwrap();
        let sys = find_units(&o, None, 2_000_000).unwrap();
        let sq: Vec<Elem> = sys.units.iter().map(|u| o.mul(u, u)).collect();
        let roots = o.real_embeddings();
        let w = &sq[0];
        let got = exact_ell_root(&o, &roots, w, 2);
        assert!(got.is_some());
        let r = got.unwrap();
        assert_eq!(o.mul(&r, &r), *w);
    }

    #[test]
    fn units_large_index_conductor_247() {
        let subs = enumerate_prime_degree_subfields(247, 3);
        for spec in subs.iter().filter(|s| s.conductor() == 247) {
            let poly = spec.defining_polynomial().unwrap();
            let o = maximal_order(&poly.coefficients).unwrap();
            if o.index != BigInt::from(6) { continue; }
            let sys = find_units(&o, Some(spec), 20_000_000).unwrap();
            assert_eq!(sys.units.len(), 2);
            assert!(sys.regulator > 0.1);
        }
    }

    #[test]
    fn regulator_and_independence() {
        let o = maximal_order(&bp(&[1, -2, -1, 1])).unwrap();
        let sys = find_units(&o, None, 2_000_000).unwrap();
        let reg = regulator(&o, &sys.units).unwrap();
        assert!((reg - sys.regulator).abs() < 1e-9);
        assert!(multiplicatively_independent(&o, &sys.units).unwrap());
        // a dependent triple: u0, u1, u0^2 * u1
        let extra = o.mul(&o.mul(&sys.units[0], &sys.units[0]), &sys.units[1]);
        let dep = vec![sys.units[0].clone(), sys.units[1].clone(), extra];
        assert!(!multiplicatively_independent(&o, &dep).unwrap());
        // +-1 is always dependent
        let minus_one: Elem = o.one().iter().map(|c| -c).collect();
        assert!(!multiplicatively_independent(&o, &[minus_one]).unwrap());
        // wrong-size system must be rejected
        assert!(regulator(&o, &sys.units[..1]).is_err());
    }
}
