//! Digamma/log-gamma differences used by the closed-form weighted sums over
//! arithmetic progressions.
//!
//! Differences are evaluated directly (recurrence shift, then the asymptotic
//! series of the difference) instead of subtracting two large values, so a
//! short window far out on the axis keeps its relative accuracy.

const SHIFT: f64 = 12.0;

// B_{2k} / (2k) for k = 1..6, digamma asymptotic coefficients.
const PSI_COEFFS: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
];

// B_{2k} / (2k (2k-1)) for k = 1..6, Stirling series coefficients.
const STIRLING_COEFFS: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
];

/// `ψ(b) − ψ(a)` for `b ≥ a > 0`.
pub fn digamma_diff(mut a: f64, mut b: f64) -> f64 {
    debug_assert!(a > 0.0 && b >= a);
    let mut acc = 0.0;
    while a < SHIFT {
        acc += 1.0 / a;
        a += 1.0;
    }
    while b < SHIFT {
        acc -= 1.0 / b;
        b += 1.0;
    }
    // ψ(x) ~ ln x − 1/(2x) − Σ c_k x^{−2k}
    let mut series = ((b - a) / a).ln_1p() - 0.5 * (1.0 / b - 1.0 / a);
    let (ia2, ib2) = (1.0 / (a * a), 1.0 / (b * b));
    let (mut pa, mut pb) = (ia2, ib2);
    for c in PSI_COEFFS {
        series -= c * (pb - pa);
        pa *= ia2;
        pb *= ib2;
    }
    acc + series
}

/// `ψ(x)` for `x > 0`.
pub fn digamma(mut x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut acc = 0.0;
    while x < SHIFT {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let ix2 = 1.0 / (x * x);
    let mut p = ix2;
    let mut s = x.ln() - 0.5 / x;
    for c in PSI_COEFFS {
        s -= c * p;
        p *= ix2;
    }
    acc + s
}

/// `ψ'(x)` for `x > 0`.
pub fn trigamma(mut x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut acc = 0.0;
    while x < SHIFT {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    // ψ'(x) ~ 1/x + 1/(2x²) + Σ B_{2k} x^{−2k−1}
    const B: [f64; 6] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
    ];
    let ix = 1.0 / x;
    let ix2 = ix * ix;
    let mut p = ix2 * ix;
    let mut s = ix + 0.5 * ix2;
    for b in B {
        s += b * p;
        p *= ix2;
    }
    acc + s
}

/// `ln Γ(z + δ) − ln Γ(z)` for `z > 0`, `δ ≥ 0`.
pub fn ln_gamma_shift(mut z: f64, delta: f64) -> f64 {
    debug_assert!(z > 0.0 && delta >= 0.0);
    let mut acc = 0.0;
    while z < SHIFT {
        acc -= (delta / z).ln_1p();
        z += 1.0;
    }
    let w = z + delta;
    let mut s = (z - 0.5) * (delta / z).ln_1p() + delta * w.ln() - delta;
    let (iz2, iw2) = (1.0 / (z * z), 1.0 / (w * w));
    let (mut pz, mut pw) = (1.0 / z, 1.0 / w);
    for c in STIRLING_COEFFS {
        s += c * (pw - pz);
        pz *= iz2;
        pw *= iw2;
    }
    acc + s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(lo: u64, hi: u64) -> f64 {
        (lo..hi).map(|i| 1.0 / i as f64).sum()
    }

    #[test]
    fn digamma_diff_matches_harmonic_sums() {
        for &(lo, hi) in &[(1u64, 2u64), (1, 50), (7, 9), (100, 1000), (12345, 23456)] {
            let exact = harmonic(lo, hi);
            let got = digamma_diff(lo as f64, hi as f64);
            assert!((exact - got).abs() <= 1e-13 * exact.max(1.0), "{lo}..{hi}: {exact} vs {got}");
        }
    }

    #[test]
    fn digamma_known_values() {
        let euler_gamma = 0.577_215_664_901_532_9;
        assert!((digamma(1.0) + euler_gamma).abs() < 1e-14);
        assert!((digamma(0.5) + euler_gamma + 2.0 * 2f64.ln()).abs() < 1e-14);
        assert!((trigamma(1.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-13);
    }

    #[test]
    fn ln_gamma_shift_matches_log_products() {
        // Σ_{k=k0}^{k1-1} ln((k + (r+1)/p)/(k + r/p)) by direct summation
        let (p, r) = (3.0, 1.0);
        let direct: f64 = (5..400)
            .map(|k| {
                let k = k as f64;
                ((k + (r + 1.0) / p) / (k + r / p)).ln()
            })
            .sum();
        let z0 = 5.0 + r / p;
        let z1 = 400.0 + r / p;
        let closed = ln_gamma_shift(z1, 1.0 / p) - ln_gamma_shift(z0, 1.0 / p);
        assert!((direct - closed).abs() < 1e-12, "{direct} vs {closed}");
        // Γ(z+1)/Γ(z) = z
        assert!((ln_gamma_shift(3.7, 1.0) - 3.7f64.ln()).abs() < 1e-14);
    }
}
