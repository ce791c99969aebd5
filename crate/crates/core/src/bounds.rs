//! Protocol-level security arithmetic.
//!
//! An impostor holding `t` copies has at most `r − t` attempts. Attempt `l`
//! can be simulated from a first attempt with `t + l − 1` copies, so the
//! union bound gives
//! `Σ_{l=1}^{r−t} (1 − 1/(8(t+l)))^s ≤ (r−t)(1 − 1/(8r))^s ≤ r(1 − 1/(8r))^s`.
//! In the hardened variant the impostor may also collect up to `r` extra
//! copies by acting as an honest verifier, which turns the 8 into 16.

use serde::{Deserialize, Serialize};

use crate::adversary::fool_first_attempt_bound;
use crate::keys::Variant;
use crate::{Error, Result};

impl Variant {
    /// The constant `c` in `r(1 − 1/(c·r))^s`.
    pub fn bound_constant(self) -> f64 {
        match self {
            Variant::Standard => 8.0,
            Variant::Hardened => 16.0,
        }
    }

    /// Copies an impostor may hold beyond the `t` she starts with.
    fn extra_copies(self, r: u64) -> u64 {
        match self {
            Variant::Standard => 0,
            Variant::Hardened => r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityEstimate {
    pub r: u64,
    pub s: u64,
    pub t: u64,
    pub variant: Variant,
    /// Bound on attempt `l = 1..=r−t`.
    pub per_attempt: Vec<f64>,
    pub chain_sum: f64,
    /// `(r − t)(1 − 1/(c·r))^s`.
    pub closed_form: f64,
    /// `r(1 − 1/(c·r))^s`.
    pub p_break_bound: f64,
}

pub fn union_bound_chain(t: u64, r: u64, s: u64, variant: Variant) -> Result<SecurityEstimate> {
    check(r, s)?;
    if t >= r {
        return Err(Error::InvalidParams(format!("copies t = {t} must be below r = {r}")));
    }
    let extra = variant.extra_copies(r);
    let per_attempt: Vec<f64> =
        (1..=r - t).map(|l| fool_first_attempt_bound(t + extra + l - 1, s)).collect();
    let chain_sum = per_attempt.iter().sum();
    Ok(SecurityEstimate {
        r,
        s,
        t,
        variant,
        per_attempt,
        chain_sum,
        closed_form: (r - t) as f64 * base(r, variant).powf(s as f64),
        p_break_bound: p_break_bound(r, s, variant)?,
    })
}

/// `r(1 − 1/(c·r))^s`; `s = 0` is rejected.
pub fn p_break_bound(r: u64, s: u64, variant: Variant) -> Result<f64> {
    check(r, s)?;
    Ok(r as f64 * base(r, variant).powf(s as f64))
}

/// Smallest `s` with `p_break_bound(r, s) ≤ ε`. The boundary is located by
/// evaluating the bound itself, never a logarithmic estimate, so the result
/// always satisfies `bound(s) ≤ ε < bound(s − 1)` (or `s = 1`).
pub fn min_security_parameter(r: u64, epsilon: f64, variant: Variant) -> Result<u64> {
    if r == 0 {
        return Err(Error::InvalidParams("reusability r must be at least 1".into()));
    }
    if epsilon.is_nan() || epsilon <= 0.0 || epsilon.is_infinite() {
        return Err(Error::InvalidParams(format!("epsilon must be positive, got {epsilon}")));
    }
    let bound = |s: u64| r as f64 * base(r, variant).powf(s as f64);
    if bound(1) <= epsilon {
        return Ok(1);
    }
    // bound(lo) > ε always holds; grow hi until bound(hi) ≤ ε, then bisect.
    let (mut lo, mut hi) = (1u64, 2u64);
    while bound(hi) > epsilon {
        lo = hi;
        hi = hi.checked_mul(2).ok_or_else(|| Error::Numerical("security parameter overflow".into()))?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if bound(mid) <= epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn base(r: u64, variant: Variant) -> f64 {
    1.0 - 1.0 / (variant.bound_constant() * r as f64)
}

fn check(r: u64, s: u64) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidParams("reusability r must be at least 1".into()));
    }
    if s == 0 {
        return Err(Error::InvalidParams("security parameter s must be at least 1".into()));
    }
    Ok(())
}
