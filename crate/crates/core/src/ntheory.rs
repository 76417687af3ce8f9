//! Exact integer utilities: squarefree decomposition, perfect-square
//! detection, and factorization of desk-scale integers.
//!
//! Rationals are `rug::Rational`, which GMP keeps canonical at all times
//! (reduced, positive denominator, zero stored as `0/1`).

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rug::integer::IsPrime;
use rug::ops::Pow;
use rug::{Assign, Integer};
pub use rug::Rational;

use crate::error::{Error, Result};

/// A positive squarefree integer.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SquarefreeInt(Integer);

impl SquarefreeInt {
    /// Checks squarefreeness by factoring `n` under the default budget.
    pub fn new(n: Integer) -> Result<Self> {
        Self::with_budget(n, &FactorBudget::default())
    }

    pub fn with_budget(n: Integer, budget: &FactorBudget) -> Result<Self> {
        if n <= 0 {
            return Err(Error::NotPositive(n));
        }
        if !is_squarefree_with(&n, budget)? {
            return Err(Error::NotSquarefree(n));
        }
        Ok(SquarefreeInt(n))
    }

    /// Caller guarantees `n >= 1` and squarefree.
    pub(crate) fn new_unchecked(n: Integer) -> Self {
        debug_assert!(n >= 1);
        SquarefreeInt(n)
    }

    pub fn get(&self) -> &Integer {
        &self.0
    }

    pub fn into_inner(self) -> Integer {
        self.0
    }
}

impl From<SquarefreeInt> for Integer {
    fn from(s: SquarefreeInt) -> Integer {
        s.0
    }
}

impl TryFrom<u64> for SquarefreeInt {
    type Error = Error;

    fn try_from(n: u64) -> Result<Self> {
        SquarefreeInt::new(Integer::from(n))
    }
}

impl fmt::Display for SquarefreeInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for SquarefreeInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = parse_integer(s).ok_or_else(|| Error::Parse {
            line: 0,
            column: 0,
            reason: format!("not an integer: {s:?}"),
        })?;
        SquarefreeInt::new(n)
    }
}

/// Limits for [`factor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBudget {
    /// Trial division runs over all primes below this bound.
    pub trial_bound: u32,
    /// Pollard-rho iterations allowed per composite cofactor, summed over retries.
    pub rho_iterations: u64,
    /// Inputs longer than this are rejected before any work.
    pub max_bits: u32,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_bound: 1 << 16,
            rho_iterations: 1 << 24,
            max_bits: 256,
        }
    }
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve(1 << 16))
}

fn sieve(limit: u32) -> Vec<u32> {
    let limit = limit as usize;
    let mut composite = vec![false; limit];
    let mut primes = Vec::new();
    for i in 2..limit {
        if !composite[i] {
            primes.push(i as u32);
            let mut j = i * i;
            while j < limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Prime factorization with multiplicity, in ascending order.
pub fn factor(n: &Integer) -> Result<Vec<Integer>> {
    factor_with(n, &FactorBudget::default())
}

pub fn factor_with(n: &Integer, budget: &FactorBudget) -> Result<Vec<Integer>> {
    if *n <= 0 {
        return Err(Error::NotPositive(n.clone()));
    }
    if n.significant_bits() > budget.max_bits {
        return Err(Error::BudgetExceeded(format!(
            "{}-bit input exceeds the {}-bit factoring limit",
            n.significant_bits(),
            budget.max_bits
        )));
    }
    let mut out = Vec::new();
    let mut rest = n.clone();
    let bound = budget.trial_bound.min(1 << 16);
    for &p in small_primes().iter().take_while(|&&p| p < bound) {
        if rest == 1 {
            break;
        }
        if Integer::from(p) * p > rest {
            break;
        }
        while rest.is_divisible_u(p) {
            rest.div_exact_u_mut(p);
            out.push(Integer::from(p));
        }
    }
    if rest > 1 {
        split_cofactor(rest, budget, &mut out)?;
    }
    out.sort();
    Ok(out)
}

fn split_cofactor(n: Integer, budget: &FactorBudget, out: &mut Vec<Integer>) -> Result<()> {
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if m.is_probably_prime(32) != IsPrime::No {
            out.push(m);
            continue;
        }
        if let Some(r) = exact_sqrt(&m) {
            stack.push(r.clone());
            stack.push(r);
            continue;
        }
        let d = pollard_brent(&m, budget.rho_iterations).ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "Pollard rho found no factor of {m} within {} iterations",
                budget.rho_iterations
            ))
        })?;
        let q = Integer::from(&m / &d);
        stack.push(d);
        stack.push(q);
    }
    Ok(())
}

/// Brent's cycle-finding variant of Pollard rho with batched gcds.
fn pollard_brent(n: &Integer, max_iterations: u64) -> Option<Integer> {
    if n.is_even() {
        return Some(Integer::from(2));
    }
    const BATCH: u64 = 128;
    let mut spent = 0u64;
    for c in 1u32..=16 {
        let step = |x: &Integer| -> Integer { (Integer::from(x * x) + c) % n };
        let mut y = Integer::from(2);
        let mut x = Integer::new();
        let mut ys = Integer::new();
        let mut q = Integer::from(1);
        let mut g = Integer::from(1);
        let mut r = 1u64;
        while g == 1 {
            x.assign(&y);
            for _ in 0..r {
                y = step(&y);
            }
            let mut k = 0u64;
            while k < r && g == 1 {
                ys.assign(&y);
                for _ in 0..BATCH.min(r - k) {
                    y = step(&y);
                    q = (q * Integer::from(&x - &y).abs()) % n;
                }
                g = q.clone().gcd(n);
                k += BATCH;
            }
            spent += r;
            if spent > max_iterations {
                return None;
            }
            r *= 2;
        }
        if g == *n {
            // Batch overshot; replay one step at a time.
            loop {
                ys = step(&ys);
                g = Integer::from(&x - &ys).abs().gcd(n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != *n {
            return Some(g);
        }
    }
    None
}

pub fn is_squarefree(n: &Integer) -> Result<bool> {
    is_squarefree_with(n, &FactorBudget::default())
}

fn is_squarefree_with(n: &Integer, budget: &FactorBudget) -> Result<bool> {
    let f = factor_with(n, budget)?;
    Ok(f.windows(2).all(|w| w[0] != w[1]))
}

/// Decomposes `n = s * u^2` with `s` squarefree.
pub fn squarefree_part(n: &Integer) -> Result<(SquarefreeInt, Integer)> {
    squarefree_part_with(n, &FactorBudget::default())
}

pub fn squarefree_part_with(n: &Integer, budget: &FactorBudget) -> Result<(SquarefreeInt, Integer)> {
    let primes = factor_with(n, budget)?;
    let mut s = Integer::from(1);
    let mut u = Integer::from(1);
    let mut i = 0;
    while i < primes.len() {
        let p = &primes[i];
        let mut e = 0;
        while i < primes.len() && primes[i] == *p {
            e += 1;
            i += 1;
        }
        if e % 2 == 1 {
            s *= p;
        }
        u *= Integer::from(p.pow(e / 2));
    }
    Ok((SquarefreeInt::new_unchecked(s), u))
}

/// Floor square root by Newton iteration from an initial guess above the root.
pub fn isqrt(n: &Integer) -> Integer {
    assert!(*n >= 0, "isqrt of negative integer");
    if *n < 2 {
        return n.clone();
    }
    let bits = n.significant_bits();
    let mut x = Integer::from(1) << bits.div_ceil(2);
    loop {
        let mut y = Integer::from(n / &x);
        y += &x;
        y >>= 1;
        if y >= x {
            return x;
        }
        x = y;
    }
}

// Quadratic residue tables; a non-residue modulo any of these rules out a square.
const SQUARE_MODULI: [u32; 4] = [64, 63, 65, 11];

fn residue_tables() -> &'static [Vec<bool>; 4] {
    static TABLES: OnceLock<[Vec<bool>; 4]> = OnceLock::new();
    TABLES.get_or_init(|| {
        SQUARE_MODULI.map(|m| {
            let mut t = vec![false; m as usize];
            for r in 0..m {
                t[((r * r) % m) as usize] = true;
            }
            t
        })
    })
}

/// Cheap necessary condition for `n` to be a square, from residues alone.
pub(crate) fn may_be_square_mod(residue_of: impl Fn(u32) -> u32) -> bool {
    let tables = residue_tables();
    SQUARE_MODULI
        .iter()
        .zip(tables.iter())
        .all(|(&m, t)| t[residue_of(m) as usize])
}

/// Returns the root when `n` is a perfect square.
pub fn exact_sqrt(n: &Integer) -> Option<Integer> {
    if *n < 0 {
        return None;
    }
    if !may_be_square_mod(|m| n.mod_u(m)) {
        return None;
    }
    let (r, rem) = n.clone().sqrt_rem(Integer::new());
    if rem == 0 {
        Some(r)
    } else {
        None
    }
}

pub fn is_perfect_square(n: &Integer) -> bool {
    exact_sqrt(n).is_some()
}

/// Parses an optionally signed decimal integer, rejecting anything else.
pub fn parse_integer(s: &str) -> Option<Integer> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Integer::from_str_radix(s, 10).ok()
}

/// Parses `"num"` or `"num/den"` with a nonzero denominator.
pub fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        None => parse_integer(s).map(Rational::from),
        Some((num, den)) => {
            let num = parse_integer(num)?;
            let den = parse_integer(den)?;
            if den == 0 {
                return None;
            }
            Some(Rational::from((num, den)))
        }
    }
}

/// Formats a rational as `num` or `num/den`.
pub fn format_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Natural logarithm of a positive integer from its exact bit length and
/// leading 53-bit mantissa.
pub fn ln_integer(n: &Integer) -> f64 {
    assert!(*n > 0, "ln of non-positive integer");
    let (mantissa, exp) = n.to_f64_exp();
    mantissa.ln() + f64::from(exp) * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: u64) -> Integer {
        Integer::from(n)
    }

    fn trial_factor(mut n: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            while n.is_multiple_of(p) {
                out.push(p);
                n /= p;
            }
            p += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    #[test]
    fn squarefree_part_examples() {
        let (s, u) = squarefree_part(&int(1)).unwrap();
        assert_eq!((s.get().to_u64(), u.to_u64()), (Some(1), Some(1)));
        let (s, u) = squarefree_part(&int(18)).unwrap();
        assert_eq!((s.get().to_u64(), u.to_u64()), (Some(2), Some(3)));
        let (s, u) = squarefree_part(&int(210)).unwrap();
        assert_eq!((s.get().to_u64(), u.to_u64()), (Some(210), Some(1)));
        assert!(matches!(squarefree_part(&Integer::from(0)), Err(Error::NotPositive(_))));
        assert!(matches!(squarefree_part(&Integer::from(-4)), Err(Error::NotPositive(_))));
    }

    #[test]
    fn perfect_square_examples() {
        assert_eq!(exact_sqrt(&int(0)), Some(int(0)));
        assert_eq!(exact_sqrt(&int(1442401)), Some(int(1201)));
        assert!(!is_perfect_square(&int(2)));
        assert!(!is_perfect_square(&Integer::from(-1)));
    }

    #[test]
    fn isqrt_matches_gmp_on_huge_inputs() {
        let mut x = Integer::from(3);
        for _ in 0..19 {
            x = x.clone() * &x + 7;
        }
        assert!(x.significant_bits() > 400_000);
        assert_eq!(isqrt(&x), x.clone().sqrt());
        let sq = Integer::from(x.square_ref());
        assert_eq!(exact_sqrt(&sq), Some(x.clone()));
        assert_eq!(exact_sqrt(&(sq + 1)), None);
    }

    #[test]
    fn factor_examples() {
        assert!(factor(&int(1)).unwrap().is_empty());
        assert_eq!(factor(&int(997)).unwrap(), vec![int(997)]);
        // Product check: 2*3*17*31*449*4657 = 6611719866.
        let f = factor(&int(6611719866)).unwrap();
        let expect: Vec<Integer> = [2u64, 3, 17, 31, 449, 4657].iter().map(|&p| int(p)).collect();
        assert_eq!(f, expect);
        assert_eq!(f.iter().product::<Integer>(), 6611719866u64);
    }

    #[test]
    fn factor_needs_rho_for_large_semiprime() {
        // Two primes above the trial bound.
        let p = int(1_000_000_007);
        let q = int(998_244_353);
        let n = Integer::from(&p * &q);
        assert_eq!(factor(&n).unwrap(), vec![q, p]);
    }

    #[test]
    fn factor_budget_exceeded() {
        let big = Integer::from(1) << 300;
        assert!(matches!(factor(&big), Err(Error::BudgetExceeded(_))));
        let tight = FactorBudget {
            trial_bound: 100,
            rho_iterations: 4,
            max_bits: 256,
        };
        let n = Integer::from(1_000_000_007u64) * 998_244_353u64;
        assert!(matches!(factor_with(&n, &tight), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn factor_reconstructs_every_n_up_to_10_6() {
        for n in 1u64..=1_000_000 {
            let f = factor(&int(n)).unwrap();
            assert_eq!(f.iter().product::<Integer>(), n, "n = {n}");
            if n % 9973 == 0 {
                let oracle: Vec<Integer> = trial_factor(n).into_iter().map(int).collect();
                assert_eq!(f, oracle);
            }
        }
    }

    #[test]
    fn squarefree_int_rejects_squares() {
        assert!(SquarefreeInt::try_from(6).is_ok());
        assert!(matches!(SquarefreeInt::try_from(12), Err(Error::NotSquarefree(_))));
        assert!(matches!(SquarefreeInt::try_from(0), Err(Error::NotPositive(_))));
        assert_eq!("210".parse::<SquarefreeInt>().unwrap().get(), &210);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("25/4").unwrap(), Rational::from((25, 4)));
        assert_eq!(parse_rational("-35/8").unwrap(), Rational::from((-35, 8)));
        assert_eq!(parse_rational("6/4").unwrap(), Rational::from((3, 2)));
        assert_eq!(parse_rational("-3").unwrap(), Rational::from(-3));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("1/-").is_none());
        assert!(parse_rational("1_0").is_none());
        assert!(parse_rational("").is_none());
        assert_eq!(format_rational(&Rational::from((0, 5))), "0");
        assert_eq!(format_rational(&Rational::from((-35, 8))), "-35/8");
    }

    #[test]
    fn ln_of_huge_integer_matches_bit_length() {
        let n = Integer::from(1) << 410_425;
        let expect = 410_425.0 * std::f64::consts::LN_2;
        assert!((ln_integer(&n) - expect).abs() / expect < 1e-12);
        assert!((ln_integer(&int(5)) - 5f64.ln()).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn squarefree_part_reconstructs(n in 1u64..1_000_000_000_000) {
                let (s, u) = squarefree_part(&int(n)).unwrap();
                prop_assert_eq!(s.get() * Integer::from(u.square_ref()), n);
                prop_assert!(is_squarefree(s.get()).unwrap());
            }

            #[test]
            fn squares_and_neighbours(m in 1u64..u64::MAX) {
                let m = int(m);
                let sq = Integer::from(m.square_ref());
                prop_assert_eq!(exact_sqrt(&sq), Some(m));
                prop_assert!(!is_perfect_square(&(sq + 1)));
            }
        }
    }
}
