//! Arithmetic in `Z` and in the multiplicative groups `(Z/nZ)^×`:
//! factorization, element orders, residue symbols and explicit subgroups.
//!
//! Everything here is deterministic: primality testing uses the fixed
//! Miller-Rabin witness set valid below 3.3e24, and the rho method runs with
//! a seeded internal generator.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZmodError {
    /// An operation on `(Z/nZ)^×` received a residue not coprime to the modulus.
    NotCoprime { x: u64, modulus: u64 },
    /// The Jacobi symbol is only defined for odd lower arguments.
    EvenModulus(u64),
    /// Modulus must be at least 2.
    ModulusTooSmall(u64),
}

impl fmt::Display for ZmodError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZmodError::NotCoprime { x, modulus } => {
                write!(f, "{x} is not coprime to the modulus {modulus}")
            }
            ZmodError::EvenModulus(n) => write!(f, "modulus {n} is even"),
            ZmodError::ModulusTooSmall(n) => write!(f, "modulus {n} is too small"),
        }
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin. The witness set certifies all n < 3.3e24,
/// which covers every u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Brent-cycle rho. `n` must be odd, composite and not a prime power of a
/// trial-division prime; the loop reseeds until a factor splits off.
fn pollard_rho(n: u64, seed: u64) -> u64 {
    let mut state = seed ^ n;
    loop {
        let c = splitmix64(&mut state) % (n - 1) + 1;
        let mut x = splitmix64(&mut state) % n;
        let mut y = x;
        let mut d = 1u64;
        while d == 1 {
            x = mul_mod(x, x, n).wrapping_add(c) % n;
            y = mul_mod(y, y, n).wrapping_add(c) % n;
            y = mul_mod(y, y, n).wrapping_add(c) % n;
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
}

/// A positive integer with its ordered prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * p.pow(e))
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }
}

const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// Trial division up to 10^6, then seeded rho with deterministic
/// Miller-Rabin on the remaining cofactors.
pub fn factorize(n: u64) -> Factorization {
    factorize_seeded(n, 0x5eed)
}

pub fn factorize_seeded(n: u64, seed: u64) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    let mut d = 2u64;
    while d <= TRIAL_DIVISION_BOUND && d * d <= m {
        if m % d == 0 {
            let mut e = 0u32;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        let mut stack = vec![m];
        let mut large: Vec<u64> = Vec::new();
        while let Some(v) = stack.pop() {
            if is_prime(v) {
                large.push(v);
            } else {
                let f = pollard_rho(v, seed);
                stack.push(f);
                stack.push(v / f);
            }
        }
        large.sort_unstable();
        for p in large {
            match factors.last_mut() {
                Some(last) if last.0 == p => last.1 += 1,
                _ => factors.push((p, 1)),
            }
        }
    }
    factors.sort_unstable();
    Factorization { n, factors }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .factors
        .iter()
        .fold(1u64, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1))
}

/// The group `(Z/nZ)^×` described by independent generators; the product of
/// the generator orders is `phi(n)` and every element is a unique product of
/// generator powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitGroupModN {
    pub modulus: u64,
    pub generators: Vec<u64>,
    pub generator_orders: Vec<u64>,
}

fn primitive_root_mod_p(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let fac = factorize(p - 1);
    'g: for g in 2..p {
        for q in fac.primes() {
            if pow_mod(g, (p - 1) / q, p) == 1 {
                continue 'g;
            }
        }
        return g;
    }
    unreachable!("no primitive root found mod prime {p}")
}

/// Generator of `(Z/p^k)^×` for odd `p`: a primitive root mod `p`, adjusted
/// so it stays primitive for higher powers.
fn primitive_root_mod_pk(p: u64, k: u32) -> u64 {
    let g = primitive_root_mod_p(p);
    if k == 1 {
        return g;
    }
    let p2 = p * p;
    if pow_mod(g, p - 1, p2) == 1 {
        g + p
    } else {
        g
    }
}

/// x = residue mod `modulus`, x = 1 mod `n/modulus` (the factors are coprime).
fn crt_lift(residue: u64, modulus: u64, n: u64) -> u64 {
    let other = n / modulus;
    if other == 1 {
        return residue % n;
    }
    let inv = pow_mod(other % modulus, euler_phi(modulus) - 1, modulus);
    // x = 1 + other * ((residue - 1) * other^{-1} mod modulus)
    let diff = (residue % modulus + modulus - 1) % modulus;
    let k = mul_mod(diff, inv, modulus);
    ((1 + other as u128 * k as u128) % n as u128) as u64
}

/// CRT decomposition of `(Z/nZ)^×` into cyclic components.
pub fn unit_group(n: u64) -> UnitGroupModN {
    assert!(n >= 2, "unit_group requires n >= 2");
    let fac = factorize(n);
    let mut generators = Vec::new();
    let mut orders = Vec::new();
    for &(p, k) in &fac.factors {
        let pk = p.pow(k);
        if p == 2 {
            match k {
                1 => {}
                2 => {
                    generators.push(crt_lift(3, 4, n));
                    orders.push(2);
                }
                _ => {
                    generators.push(crt_lift(pk - 1, pk, n));
                    orders.push(2);
                    generators.push(crt_lift(3, pk, n));
                    orders.push(pk / 4);
                }
            }
        } else {
            let g = primitive_root_mod_pk(p, k);
            generators.push(crt_lift(g, pk, n));
            orders.push((p - 1) * p.pow(k - 1));
        }
    }
    UnitGroupModN {
        modulus: n,
        generators,
        generator_orders: orders,
    }
}

impl UnitGroupModN {
    pub fn order(&self) -> u64 {
        self.generator_orders.iter().product()
    }

    /// All elements of the group, sorted. Enumeration walks exponent vectors
    /// over the generators, so cost is `phi(n)` multiplications.
    pub fn elements(&self) -> Vec<u64> {
        let mut elems = vec![1u64 % self.modulus];
        for (&g, &d) in self.generators.iter().zip(&self.generator_orders) {
            let mut next = Vec::with_capacity(elems.len() * d as usize);
            let mut power = 1u64;
            for _ in 0..d {
                for &e in &elems {
                    next.push(mul_mod(e, power, self.modulus));
                }
                power = mul_mod(power, g, self.modulus);
            }
            elems = next;
        }
        elems.sort_unstable();
        elems
    }
}

/// Smallest `k >= 1` with `x^k = 1 mod n`.
pub fn element_order(x: u64, n: u64) -> Result<u64, ZmodError> {
    if n < 2 {
        return Err(ZmodError::ModulusTooSmall(n));
    }
    let x = x % n;
    if gcd(x, n) != 1 {
        return Err(ZmodError::NotCoprime { x, modulus: n });
    }
    let phi = euler_phi(n);
    let mut e = phi;
    for q in factorize(phi).primes() {
        while e % q == 0 && pow_mod(x, e / q, n) == 1 {
            e /= q;
        }
    }
    Ok(e)
}

/// Replaces `c` by `c^(2^m)` where `m` is the 2-adic valuation of the order
/// of `c`; the result has odd order and lies in every subgroup containing `c`.
pub fn strip_two_part(c: u64, n: u64) -> Result<u64, ZmodError> {
    let ord = element_order(c, n)?;
    let two_part = ord & ord.wrapping_neg(); // 2^m
    Ok(pow_mod(c, two_part, n))
}

/// Standard Jacobi symbol `(a/n)` for odd `n >= 1`.
pub fn jacobi_symbol(a: i64, n: u64) -> Result<i32, ZmodError> {
    if n % 2 == 0 {
        return Err(ZmodError::EvenModulus(n));
    }
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut sign = 1i32;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        core::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        Ok(sign)
    } else {
        Ok(0)
    }
}

/// A subgroup of `(Z/nZ)^×` stored as its full sorted element list.
///
/// Group orders in scope are at most `phi(f)` with `f` around 10^6, so the
/// explicit list keeps coset and quotient logic directly testable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SubgroupModN {
    pub modulus: u64,
    pub elements: Vec<u64>,
}

impl SubgroupModN {
    /// Wraps a sorted element list that is already known to be closed.
    pub fn from_sorted_elements(modulus: u64, elements: Vec<u64>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        SubgroupModN { modulus, elements }
    }

    pub fn trivial(modulus: u64) -> Self {
        SubgroupModN {
            modulus,
            elements: vec![1 % modulus],
        }
    }

    /// All of `(Z/nZ)^×`.
    pub fn full(modulus: u64) -> Self {
        let elements = (1..modulus.max(2)).filter(|&x| gcd(x, modulus) == 1).collect();
        SubgroupModN { modulus, elements }
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&(x % self.modulus)).is_ok()
    }

    pub fn intersect(&self, other: &SubgroupModN) -> SubgroupModN {
        assert_eq!(self.modulus, other.modulus);
        let elements = self
            .elements
            .iter()
            .copied()
            .filter(|&x| other.contains(x))
            .collect();
        SubgroupModN {
            modulus: self.modulus,
            elements,
        }
    }

    pub fn is_subgroup_of(&self, other: &SubgroupModN) -> bool {
        self.modulus == other.modulus && self.elements.iter().all(|&x| other.contains(x))
    }

    /// Multiplicative closure check (used by invariant tests).
    pub fn is_closed(&self) -> bool {
        self.contains(1)
            && self.elements.iter().all(|&x| {
                self.elements
                    .iter()
                    .all(|&y| self.contains(mul_mod(x, y, self.modulus)))
            })
    }

    /// The coset `x * H` as a sorted list.
    pub fn coset(&self, x: u64) -> Vec<u64> {
        let mut c: Vec<u64> = self
            .elements
            .iter()
            .map(|&h| mul_mod(h, x, self.modulus))
            .collect();
        c.sort_unstable();
        c
    }

    /// Order of the image of `x` in the quotient `G/self` for `x` in `G`.
    pub fn quotient_element_order(&self, x: u64) -> u64 {
        let mut k = 1u64;
        let mut acc = x % self.modulus;
        while !self.contains(acc) {
            acc = mul_mod(acc, x, self.modulus);
            k += 1;
        }
        k
    }
}

/// Smallest multiplicatively closed subset of `(Z/nZ)^×` containing the
/// generators and 1.
pub fn subgroup_closure(gens: &[u64], n: u64) -> Result<SubgroupModN, ZmodError> {
    if n < 2 {
        return Err(ZmodError::ModulusTooSmall(n));
    }
    for &g in gens {
        if gcd(g % n, n) != 1 {
            return Err(ZmodError::NotCoprime { x: g % n, modulus: n });
        }
    }
    let mut set: BTreeSet<u64> = BTreeSet::new();
    set.insert(1 % n);
    let mut frontier: Vec<u64> = vec![1 % n];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = mul_mod(x, g % n, n);
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    Ok(SubgroupModN {
        modulus: n,
        elements: set.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_examples() {
        assert_eq!(
            factorize(1456).factors,
            vec![(2, 4), (7, 1), (13, 1)]
        );
        assert_eq!(factorize(1).factors, vec![]);
        assert_eq!(
            factorize(857584).factors,
            vec![(2, 4), (7, 1), (13, 1), (19, 1), (31, 1)]
        );
    }

    #[test]
    fn factorize_reassembles_and_is_prime_certified() {
        for n in 1..=10_000u64 {
            let f = factorize(n);
            assert_eq!(f.value(), n);
            assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
            for p in f.primes() {
                assert!(is_prime(p), "{p} listed as prime factor of {n}");
            }
        }
    }

    #[test]
    fn unit_group_examples() {
        let g7 = unit_group(7);
        assert_eq!(g7.generator_orders, vec![6]);
        assert_eq!(g7.elements(), vec![1, 2, 3, 4, 5, 6]);

        let g16 = unit_group(16);
        let mut orders = g16.generator_orders.clone();
        orders.sort_unstable();
        assert_eq!(orders, vec![2, 4]);
        assert_eq!(g16.order(), 8);

        let g91 = unit_group(91);
        assert_eq!(g91.order(), 72);
        let brute = (1..91).filter(|&x| gcd(x, 91) == 1).count() as u64;
        assert_eq!(g91.order(), brute);
        assert_eq!(g91.elements().len() as u64, 72);
    }

    #[test]
    fn element_order_examples() {
        assert_eq!(element_order(6, 7).unwrap(), 2);
        assert_eq!(element_order(3, 7).unwrap(), 6);
        assert_eq!(element_order(2, 7).unwrap(), 3);
        assert!(element_order(14, 7).is_err());
    }

    #[test]
    fn strip_two_part_examples() {
        assert_eq!(strip_two_part(3, 7).unwrap(), 2); // order 6 -> 3^2
        assert_eq!(element_order(2, 7).unwrap(), 3);
        assert_eq!(strip_two_part(6, 7).unwrap(), 1); // order 2 strips to 1
        assert_eq!(strip_two_part(2, 7).unwrap(), 2); // odd order fixed point
        assert!(strip_two_part(0, 7).is_err());
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi_symbol(2, 7).unwrap(), 1);
        assert_eq!(jacobi_symbol(7, 7).unwrap(), 0);
        assert!(jacobi_symbol(3, 8).is_err());
        // Legendre agreement with the exponentiation oracle for small primes.
        for p in (3..50u64).filter(|&p| is_prime(p)) {
            for a in 0..p as i64 {
                let euler = pow_mod(a as u64, (p - 1) / 2, p);
                let expected = if euler == 1 {
                    1
                } else if euler == p - 1 {
                    -1
                } else {
                    0
                };
                assert_eq!(jacobi_symbol(a, p).unwrap(), expected, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn subgroup_closure_examples() {
        assert_eq!(subgroup_closure(&[6], 7).unwrap().elements, vec![1, 6]);
        assert_eq!(subgroup_closure(&[], 7).unwrap().elements, vec![1]);
        assert_eq!(
            subgroup_closure(&[3], 7).unwrap().elements,
            vec![1, 2, 3, 4, 5, 6]
        );
        assert!(subgroup_closure(&[7], 7).is_err());
    }

    #[test]
    fn subgroup_order_divides_phi() {
        for n in [7u64, 16, 91, 1456] {
            let phi = euler_phi(n);
            for g in 1..n.min(40) {
                if gcd(g, n) != 1 {
                    continue;
                }
                let h = subgroup_closure(&[g], n).unwrap();
                assert!(h.is_closed());
                assert_eq!(phi % h.order(), 0);
            }
        }
    }

    #[test]
    fn crt_lift_consistency() {
        // generators produced by unit_group really have the claimed orders
        for n in [16u64, 91, 1456, 857584 / 31] {
            let g = unit_group(n);
            for (&gen, &ord) in g.generators.iter().zip(&g.generator_orders) {
                assert_eq!(element_order(gen, n).unwrap(), ord, "n={n} gen={gen}");
            }
            assert_eq!(g.order(), euler_phi(n));
        }
    }
}
