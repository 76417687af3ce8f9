//! Tunnell's criterion by exhaustive counting of representations by
//! ternary quadratic forms.
//!
//! For odd squarefree `n`, compare `#{2x^2 + y^2 + 32z^2 = n}` with half of
//! `#{2x^2 + y^2 + 8z^2 = n}`; for even `n` use `4x^2 + y^2 + 32z^2` and
//! `4x^2 + y^2 + 8z^2` at `n/2`. Inequality proves `n` is not congruent.
//! Equality means `n` is congruent provided BSD holds for `E_n`.

use std::fmt;

use rayon::prelude::*;
use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ntheory::{is_squarefree, SquarefreeInt};

/// Largest `n` [`classify`] accepts by default (about `n/4` loop iterations).
pub const DEFAULT_MAX_N: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    NonCongruent,
    CongruentConditionalBsd,
}

impl Verdict {
    pub fn is_congruent(self) -> bool {
        self == Verdict::CongruentConditionalBsd
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NonCongruent => f.write_str("non-congruent (unconditional)"),
            Verdict::CongruentConditionalBsd => f.write_str("congruent (conditional on BSD)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TunnellVerdict {
    pub n: SquarefreeInt,
    pub verdict: Verdict,
    /// Representation counts by the `32z^2` form and the `8z^2` form.
    pub counts: (u64, u64),
}

impl fmt::Display for TunnellVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.n, self.verdict)
    }
}

/// Number of `(x, y, z) in Z^3` with `a x^2 + b y^2 + c z^2 = n`, counting
/// signs and zeros.
pub fn count_representations(a: u64, b: u64, c: u64, n: u64) -> u64 {
    assert!(a >= 1 && b >= 1 && c >= 1, "form coefficients must be positive");
    // Solve for the variable with the smallest coefficient; loop over the other two.
    let mut coef = [a, b, c];
    coef.sort_unstable();
    let [solve, mid, big] = coef;
    let n = u128::from(n);
    let (solve, mid, big) = (u128::from(solve), u128::from(mid), u128::from(big));
    let mut count = 0u64;
    let mut z = 0u128;
    while big * z * z <= n {
        let rest_z = n - big * z * z;
        let mut y = 0u128;
        while mid * y * y <= rest_z {
            let rest = rest_z - mid * y * y;
            if rest.is_multiple_of(solve) {
                let sq = rest / solve;
                let r = sq.isqrt();
                if r * r == sq {
                    let mult = |v: u128| if v == 0 { 1 } else { 2 };
                    count += mult(r) * mult(y) * mult(z);
                }
            }
            y += 1;
        }
        z += 1;
    }
    count
}

pub fn classify(n: &SquarefreeInt) -> Result<TunnellVerdict> {
    classify_with(n, DEFAULT_MAX_N)
}

pub fn classify_with(n: &SquarefreeInt, max_n: u64) -> Result<TunnellVerdict> {
    let value = n
        .get()
        .to_u64()
        .filter(|&v| v <= max_n)
        .ok_or_else(|| Error::BudgetExceeded(format!("{n} exceeds the Tunnell counting limit {max_n}")))?;
    let (lhs, rhs) = if value % 2 == 1 {
        (
            count_representations(2, 1, 32, value),
            count_representations(2, 1, 8, value),
        )
    } else {
        let half = value / 2;
        (
            count_representations(4, 1, 32, half),
            count_representations(4, 1, 8, half),
        )
    };
    let verdict = if 2 * lhs == rhs {
        Verdict::CongruentConditionalBsd
    } else {
        Verdict::NonCongruent
    };
    Ok(TunnellVerdict {
        n: n.clone(),
        verdict,
        counts: (lhs, rhs),
    })
}

/// Validates squarefreeness first, then classifies.
pub fn classify_integer(n: &Integer) -> Result<TunnellVerdict> {
    classify(&SquarefreeInt::new(n.clone())?)
}

/// Verdicts for every squarefree `n` in `lo..=hi`, in increasing order.
pub fn classify_range(lo: u64, hi: u64) -> Result<Vec<TunnellVerdict>> {
    let lo = lo.max(1);
    if hi > DEFAULT_MAX_N {
        return Err(Error::BudgetExceeded(format!(
            "range end {hi} exceeds the Tunnell counting limit {DEFAULT_MAX_N}"
        )));
    }
    (lo..=hi)
        .into_par_iter()
        .filter_map(|n| {
            let n = Integer::from(n);
            match is_squarefree(&n) {
                Ok(true) => Some(classify(&SquarefreeInt::new_unchecked(n))),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            }
        })
        .collect()
}
