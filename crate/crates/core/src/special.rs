//! Special functions not covered by `statrs`.

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// B_{2m} / (2m)! for m = 1..=10.
const BERNOULLI_OVER_FACTORIAL: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
    43_867.0 / 5_109_094_217_170_944_000.0,
    -174_611.0 / 802_857_662_698_291_200_000.0,
];

/// Riemann zeta function for real `s != 1`.
///
/// Euler–Maclaurin summation with a fixed head of 16 terms and 10 Bernoulli
/// corrections; valid for every real `s` except the pole, which is what the
/// punched-hole quadrature corrections need (`s` in `(-1, 2)`).
pub fn riemann_zeta(s: f64) -> f64 {
    if s == 1.0 {
        return f64::INFINITY;
    }
    const N: usize = 16;
    let n = N as f64;
    let mut sum = 0.0;
    for k in 1..N {
        sum += (k as f64).powf(-s);
    }
    sum += n.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * n.powf(-s);

    // Rising factorial s(s+1)...(s+2m-2) times N^{-s-2m+1}.
    let mut rising = s;
    let mut npow = n.powf(-s - 1.0);
    for (m, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        sum += coeff * rising * npow;
        let two_m = 2.0 * (m as f64 + 1.0);
        rising *= (s + two_m - 1.0) * (s + two_m);
        npow /= n * n;
    }
    sum
}

/// Finite part of the punched-hole sum `h Σ''_{k=1}^{1/h} (kh)^{-α}`.
///
/// Returns `ζ(α) h^{1-α} + 1/(1-α)`, the value the discrete compensator sum
/// takes up to `O(h)` terms. The two pieces cancel to `γ - ln h` as `α → 1`,
/// which is used inside a small window around the pole.
pub fn punched_power_sum_finite_part(alpha: f64, h: f64) -> f64 {
    let e = alpha - 1.0;
    if e.abs() < 1e-6 {
        // First-order expansion in e around the pole.
        let lh = h.ln();
        EULER_GAMMA - lh + e * (0.5 * lh * lh - EULER_GAMMA * lh - STIELTJES_1)
    } else {
        riemann_zeta(alpha) * h.powf(1.0 - alpha) + 1.0 / (1.0 - alpha)
    }
}

// First Stieltjes constant; only enters the expansion above.
const STIELTJES_1: f64 = -0.072_815_845_483_676_72;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn zeta_known_values() {
        assert_relative_eq!(riemann_zeta(2.0), PI * PI / 6.0, max_relative = 1e-13);
        assert_relative_eq!(riemann_zeta(0.0), -0.5, max_relative = 1e-13);
        assert_relative_eq!(riemann_zeta(-1.0), -1.0 / 12.0, max_relative = 1e-12);
        assert_relative_eq!(riemann_zeta(0.5), -1.460_354_508_809_586_8, max_relative = 1e-12);
        assert_relative_eq!(riemann_zeta(1.5), 2.612_375_348_685_488, max_relative = 1e-12);
        assert_relative_eq!(riemann_zeta(-0.5), -0.207_886_224_977_354_56, max_relative = 1e-12);
    }

    #[test]
    fn zeta_near_pole_matches_laurent_series() {
        for e in [1e-3, -1e-3, 1e-2] {
            let expect = 1.0 / e + EULER_GAMMA - STIELTJES_1 * e;
            assert_relative_eq!(riemann_zeta(1.0 + e), expect, max_relative = 1e-8);
        }
    }

    #[test]
    fn finite_part_is_continuous_at_one() {
        let h = 0.05;
        let at_one = punched_power_sum_finite_part(1.0, h);
        assert_relative_eq!(at_one, EULER_GAMMA - h.ln(), max_relative = 1e-14);
        for e in [1e-5, -1e-5, 1e-4] {
            let near = punched_power_sum_finite_part(1.0 + e, h);
            assert!((near - at_one).abs() < 1e-3, "e = {e}: {near} vs {at_one}");
        }
    }

    #[test]
    fn finite_part_matches_brute_force_sum() {
        // h Σ''_{k=1}^{n} (kh)^{-α} = FP + O(h) for the trapezoid end weight.
        for &alpha in &[0.5, 1.0, 1.5, 1.9] {
            for &h in &[0.01f64, 0.001] {
                let n = (1.0 / h).round() as usize;
                let mut s = 0.0;
                for k in 1..=n {
                    let w = if k == n { 0.5 } else { 1.0 };
                    s += w * h * (k as f64 * h).powf(-alpha);
                }
                let fp = punched_power_sum_finite_part(alpha, h);
                assert!((s - fp).abs() < 5.0 * h, "alpha {alpha} h {h}: {s} vs {fp}");
            }
        }
    }
}
