//! Analytic Bloch-vector solutions of the Markovian master equations.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::BlochState;

/// Residue tolerated on quantities that must come out real.
pub const IMAG_TOL: f64 = 1e-10;

/// `H = ω₀σz` with bit-flip dissipator `γ(σx ρ σx − ρ)`.
///
/// `ω = sqrt(γ² − 4ω₀²)` is taken complex so one expression covers the
/// under- and overdamped regimes.
pub fn bloch_solution_bitflip(gamma: f64, omega0: f64, r0: &BlochState, t: f64) -> Result<BlochState> {
    let (x0, y0, z0) = (r0.x(), r0.y(), r0.z());
    let w = Complex64::new(gamma * gamma - 4.0 * omega0 * omega0, 0.0).sqrt();
    let decay = (-gamma * t).exp();
    let (x, y) = if w.norm() < 1e-9 * gamma.max(omega0) {
        // critical damping: the ω → 0 limit of the expression below
        let x = decay * (x0 + t * (gamma * x0 - 2.0 * omega0 * y0));
        let y = decay * (y0 + t * (2.0 * omega0 * x0 - gamma * y0));
        (Complex64::new(x, 0.0), Complex64::new(y, 0.0))
    } else {
        let ep = (w * t).exp();
        let em = (-w * t).exp();
        let ax = w * x0 + gamma * x0 - 2.0 * omega0 * y0;
        let bx = w * x0 - gamma * x0 + 2.0 * omega0 * y0;
        let ay = w * y0 - gamma * y0 + 2.0 * omega0 * x0;
        let by = w * y0 + gamma * y0 - 2.0 * omega0 * x0;
        let x = decay / (2.0 * w) * (ax * ep + bx * em);
        let y = decay / (2.0 * w) * (ay * ep + by * em);
        (x, y)
    };
    if x.im.abs() > IMAG_TOL || y.im.abs() > IMAG_TOL {
        return Err(Error::numerical(format!(
            "bit-flip solution left imaginary residue {:e} at t = {t}",
            x.im.abs().max(y.im.abs())
        )));
    }
    BlochState::new(x.re, y.re, z0 * (-2.0 * gamma * t).exp())
}

/// Spontaneous emission toward `z = +1` under `H = −ω₀σz`.
pub fn bloch_solution_spont_emission(gamma: f64, omega0: f64, r0: &BlochState, t: f64) -> Result<BlochState> {
    let (x0, y0, z0) = (r0.x(), r0.y(), r0.z());
    if t.is_infinite() {
        return BlochState::new(0.0, 0.0, 1.0);
    }
    let a = (-0.5 * gamma * t).exp();
    let (s, c) = (2.0 * omega0 * t).sin_cos();
    BlochState::new(
        a * (x0 * c + y0 * s),
        a * (y0 * c - x0 * s),
        1.0 - (1.0 - z0) * (-gamma * t).exp(),
    )
}

/// Accumulated phase `α(t) = (ω₀/ω)(ωt − sin ωt)` of the driven dephasing model.
pub fn pd_timedep_phase(omega0: f64, omega: f64, t: f64) -> f64 {
    omega0 / omega * (omega * t - (omega * t).sin())
}

/// Dephasing at rate `γ` under `h(t) = (0, 0, −(ω₀/2)(1 − cos ωt))`.
pub fn bloch_solution_pd_timedep(
    omega0: f64,
    omega: f64,
    gamma: f64,
    r0: &BlochState,
    t: f64,
) -> Result<BlochState> {
    let (x0, y0, z0) = (r0.x(), r0.y(), r0.z());
    let d = (-2.0 * gamma * t).exp();
    let (s, c) = pd_timedep_phase(omega0, omega, t).sin_cos();
    BlochState::new(d * (x0 * c - y0 * s), d * (y0 * c + x0 * s), z0)
}
