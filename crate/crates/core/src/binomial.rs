//! Binomial coefficients, exact where `f64` represents them exactly and in
//! log space beyond that.

/// Above this `n` binomials are evaluated through logarithms.
pub const DIRECT_LIMIT: u64 = 50;

/// `C(n, k)`; exact for `n ≤ 50` (every value fits in 53 bits).
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= DIRECT_LIMIT {
        let k = k.min(n - k);
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc * u128::from(n - i) / u128::from(i + 1);
        }
        acc as f64
    } else {
        ln_binomial(n, k).exp()
    }
}

/// `ln C(n, k)` as a sum of `ln((n−k+i)/i)`, accurate to a few ulps per term.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// `√(C(t, w) / 2ᵗ)` for `w = 0..=t`, the amplitudes of `(|0⟩+|1⟩)^{⊗t}/2^{t/2}`
/// in the Hamming-weight basis.
pub fn sqrt_binomial_weights(t: u64) -> Vec<f64> {
    let ln2 = std::f64::consts::LN_2;
    (0..=t)
        .map(|w| {
            if t <= DIRECT_LIMIT {
                (binomial(t, w) / 2f64.powi(t as i32)).sqrt()
            } else {
                (0.5 * (ln_binomial(t, w) - t as f64 * ln2)).exp()
            }
        })
        .collect()
}
