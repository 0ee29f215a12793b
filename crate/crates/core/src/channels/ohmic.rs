//! Time-dependent dephasing rate of an Ohmic-like bosonic bath.

use std::f64::consts::{FRAC_PI_2, PI};

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::numerics::adaptive_simpson;

pub const QUAD_TOL: f64 = 1e-10;
pub const QUAD_DEPTH: u32 = 40;

/// `γ(t) = [1 + (ωc t)²]^{-s/2} Γ(s) sin(s·arctan(ωc t))`.
pub fn ohmic_rate(t: f64, s: f64, omega_c: f64) -> f64 {
    if s == 0.0 || t == 0.0 {
        return 0.0;
    }
    let u = omega_c * t;
    (1.0 + u * u).powf(-0.5 * s) * gamma(s) * (s * u.atan()).sin()
}

/// `∫₀ᵗ γ(τ) dτ`, computed in the angle variable `θ = arctan(ωc τ)`
/// where the integrand `Γ(s) cos^{s-2}θ sin(sθ)/ωc` lives on a finite
/// interval. `t = ∞` is accepted for `s ≥ 2`, and for `s ≤ 1` where the
/// integral diverges.
pub fn integrated_rate(t: f64, s: f64, omega_c: f64) -> Result<f64> {
    if !(s >= 0.0 && omega_c > 0.0 && t >= 0.0) {
        return Err(Error::validation(format!(
            "ohmic rate needs s ≥ 0, ωc > 0, t ≥ 0 (s = {s}, ωc = {omega_c}, t = {t})"
        )));
    }
    if s == 0.0 || t == 0.0 {
        return Ok(0.0);
    }
    let theta_max = if t.is_infinite() {
        if s <= 1.0 {
            return Ok(f64::INFINITY);
        }
        if s < 2.0 {
            return Err(Error::validation(format!(
                "rate integral at infinite time is not tabulated for 1 < s < 2 (s = {s})"
            )));
        }
        FRAC_PI_2
    } else {
        (omega_c * t).atan()
    };
    // the map is completely positive, so only round-off can push this below 0
    Ok(angle_integral(0.0, theta_max, s, omega_c)?.max(0.0))
}

fn angle_integral(theta_a: f64, theta_b: f64, s: f64, omega_c: f64) -> Result<f64> {
    let integrand = |th: f64| {
        let c = th.cos().max(0.0);
        let w = if c == 0.0 { 0.0 } else { c.powf(s - 2.0) };
        w * (s * th).sin()
    };
    let g = gamma(s);
    let v = adaptive_simpson(integrand, theta_a, theta_b, QUAD_TOL / g.max(1.0), QUAD_DEPTH)?;
    Ok(g * v / omega_c)
}

/// `∫₀ᵗ γ` at every point of a finite ascending grid, accumulated
/// interval by interval.
pub fn integrated_rate_on_grid(times: &[f64], s: f64, omega_c: f64) -> Result<Vec<f64>> {
    if times.iter().any(|t| !t.is_finite()) {
        return times.iter().map(|&t| integrated_rate(t, s, omega_c)).collect();
    }
    let mut out = Vec::with_capacity(times.len());
    let mut acc = integrated_rate(times.first().copied().unwrap_or(0.0), s, omega_c)?;
    out.push(acc);
    for w in times.windows(2) {
        if s != 0.0 {
            acc += angle_integral((omega_c * w[0]).atan(), (omega_c * w[1]).atan(), s, omega_c)?;
        }
        out.push(acc.max(0.0));
    }
    Ok(out)
}

/// `exp(-∫₀ᵗ γ)`.
pub fn dephasing_attenuation(t: f64, s: f64, omega_c: f64) -> Result<f64> {
    Ok((-integrated_rate(t, s, omega_c)?).exp())
}

/// Maximal intervals on which `γ(t) < 0`.
///
/// The rate is negative while `s·arctan(ωc t)` lies in `((2k-1)π, 2kπ)`,
/// so the k-th interval runs from `tan((2k-1)π/s)/ωc` to `tan(2kπ/s)/ωc`,
/// the latter becoming `+∞` once `2kπ/s ≥ π/2`.
pub fn critical_times(s: f64, omega_c: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if !(s > 2.0) {
        return out;
    }
    let mut k = 1.0;
    loop {
        let start = (2.0 * k - 1.0) * PI / s;
        if start >= FRAC_PI_2 {
            break;
        }
        let end = 2.0 * k * PI / s;
        let t_end = if end >= FRAC_PI_2 {
            f64::INFINITY
        } else {
            end.tan() / omega_c
        };
        out.push((start.tan() / omega_c, t_end));
        k += 1.0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rate_examples() {
        assert_eq!(ohmic_rate(0.0, 3.0, 1.0), 0.0);
        assert_eq!(ohmic_rate(2.0, 0.0, 1.0), 0.0);
        assert_abs_diff_eq!(ohmic_rate(1.0, 2.0, 1.0), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn grid_accumulation_matches_pointwise_integrals() {
        let times = [0.0, 0.3, 1.0, 2.5, 7.0, 40.0];
        for &s in &[0.5, 1.0, 3.2, 6.5] {
            let acc = integrated_rate_on_grid(&times, s, 1.3).unwrap();
            for (t, a) in times.iter().zip(acc) {
                assert_abs_diff_eq!(a, integrated_rate(*t, s, 1.3).unwrap(), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn ohmic_integral_has_log_antiderivative() {
        for &t in &[0.1f64, 1.0, 3.0, 25.0, 400.0] {
            let want = 0.5 * (1.0 + t * t).ln();
            assert_abs_diff_eq!(integrated_rate(t, 1.0, 1.0).unwrap(), want, epsilon = 1e-9);
            assert_abs_diff_eq!(
                dephasing_attenuation(t, 1.0, 1.0).unwrap(),
                (1.0 + t * t).powf(-0.5),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn angle_substitution_matches_direct_time_quadrature() {
        for &s in &[0.5, 2.5, 3.2, 4.7] {
            for &t in &[0.3, 2.0, 7.5] {
                let direct =
                    adaptive_simpson(|u| ohmic_rate(u, s, 1.0), 0.0, t, 1e-12, 50).unwrap();
                assert_abs_diff_eq!(integrated_rate(t, s, 1.0).unwrap(), direct, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn critical_intervals_bracket_negative_rate() {
        assert!(critical_times(1.5, 1.0).is_empty());
        assert!(critical_times(2.0, 1.0).is_empty());
        assert_eq!(critical_times(3.2, 1.0).len(), 1);
        assert_eq!(critical_times(6.0, 1.0).len(), 1);
        assert_eq!(critical_times(6.5, 1.0).len(), 2);
        for &s in &[2.5, 3.2, 4.0, 5.5, 7.0, 9.3] {
            for (a, b) in critical_times(s, 2.0) {
                let mid = if b.is_finite() { 0.5 * (a + b) } else { 2.0 * a + 1.0 };
                assert!(ohmic_rate(mid, s, 2.0) < 0.0, "s={s}");
                assert!(ohmic_rate(a * (1.0 - 1e-6), s, 2.0) > 0.0);
                assert!(ohmic_rate(a * (1.0 + 1e-6), s, 2.0) < 0.0);
                if b.is_finite() {
                    assert!(ohmic_rate(b * (1.0 + 1e-6), s, 2.0) > 0.0);
                }
            }
        }
    }

    #[test]
    fn attenuation_monotonicity_tracks_regime() {
        let grid: Vec<f64> = (0..200).map(|i| 0.05 * i as f64).collect();
        let series = |s: f64| -> Vec<f64> {
            grid.iter().map(|&t| dephasing_attenuation(t, s, 1.0).unwrap()).collect()
        };
        assert!(series(1.5).windows(2).all(|w| w[1] <= w[0]));
        assert!(series(2.0).windows(2).all(|w| w[1] <= w[0]));
        assert!(series(3.5).windows(2).any(|w| w[1] > w[0]));
    }

    #[test]
    fn infinite_time_limits() {
        assert_eq!(integrated_rate(f64::INFINITY, 0.8, 1.0).unwrap(), f64::INFINITY);
        assert!(integrated_rate(f64::INFINITY, 1.5, 1.0).is_err());
        let far = integrated_rate(1e7, 3.2, 1.0).unwrap();
        assert_abs_diff_eq!(integrated_rate(f64::INFINITY, 3.2, 1.0).unwrap(), far, epsilon = 1e-9);
    }
}
