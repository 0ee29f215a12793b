//! Thermodynamic accounting along qubit trajectories.
//!
//! Three first laws share `dU` but split it differently:
//! standard (`δQ = −h·dr`), entropy-based (`δQ = (U/r) dr`) and
//! ergotropy-based (`δQ = −h dr`). All inexact differentials use the
//! midpoint rule, which closes each step exactly.

use crate::channels::{ChannelModel, Family, Trajectory};
use crate::error::{Error, Result};
use crate::numerics::{adaptive_simpson, bisect};
use crate::state::{
    coherence_l1, cross, dot, entropy_of_radius, norm, relative_entropy_qubit, scale, sub, BlochState,
    Field3,
};

/// Radii below this are treated as the maximally mixed state.
pub const MIXED_RADIUS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    Standard,
    Entropy,
    Ergotropy,
    Operational,
}

/// `U = −h·r`.
pub fn internal_energy(state: &BlochState, field: &Field3) -> f64 {
    -field.dot(state)
}

/// Ergotropy and its incoherent/coherent split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ergotropy {
    pub total: f64,
    pub incoherent: f64,
    pub coherent: f64,
}

/// Ergotropy from coherence and energy in units of `h`.
pub fn ergotropy_qubit(c: f64, u: f64) -> Result<Ergotropy> {
    if !(c >= 0.0) || c * c + u * u > 1.0 + 1e-12 {
        return Err(Error::validation(format!(
            "(C, U) = ({c}, {u}) is not a qubit state in field units"
        )));
    }
    let radius = c.hypot(u);
    let incoherent = 2.0 * u.max(0.0);
    let coherent = (radius - u.abs()).max(0.0);
    Ok(Ergotropy {
        total: incoherent + coherent,
        incoherent,
        coherent,
    })
}

/// Ergotropy `U + h r` of a state, in energy units.
pub fn ergotropy_of(state: &BlochState, field: &Field3) -> Ergotropy {
    let h = field.magnitude();
    let u = internal_energy(state, field);
    let incoherent = 2.0 * u.max(0.0);
    // h r − |u| = h |r×ĥ|² / (r + |r·ĥ|), without the cancellation
    let coherent = match field.unit() {
        Some(n) => {
            let r = state.radius();
            let perp = norm(cross(state.vector(), n));
            let denom = r + dot(state.vector(), n).abs();
            if denom > 0.0 { h * perp * perp / denom } else { 0.0 }
        }
        None => 0.0,
    };
    Ergotropy {
        total: incoherent + coherent,
        incoherent,
        coherent,
    }
}

/// Passive Bloch vector `r ĥ`; a vanishing field selects `+z`.
pub fn passive_bloch(state: &BlochState, field: &Field3) -> BlochState {
    let dir = field.unit().unwrap_or([0.0, 0.0, 1.0]);
    BlochState::from_vector(scale(dir, state.radius())).unwrap_or(*state)
}

/// Temperature of a state under one formulation.
///
/// Sentinels: `+∞` for the maximally mixed state, a signed infinity for
/// the standard temperature when `h·r = 0`. The operational formulation
/// shares the ergotropy-based temperature.
pub fn temperature(state: &BlochState, field: &Field3, formulation: Formulation) -> f64 {
    let r = state.radius();
    if r < MIXED_RADIUS {
        return f64::INFINITY;
    }
    let h = field.magnitude();
    let ar = r.atanh();
    let hr = field.dot(state);
    match formulation {
        Formulation::Ergotropy | Formulation::Operational => h / ar,
        Formulation::Standard => {
            if hr == 0.0 {
                if h == 0.0 {
                    f64::NAN
                } else {
                    f64::INFINITY.copysign(hr)
                }
            } else {
                h * h * r / (hr * ar)
            }
        }
        Formulation::Entropy => hr / (r * ar),
    }
}

/// Increments of one trajectory step for each first law.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepIncrements {
    pub du: f64,
    pub dq_stand: f64,
    pub dw_stand: f64,
    pub dq_entro: f64,
    pub dw_entro: f64,
    pub dw_star: f64,
    pub dq_ergo: f64,
    pub dw_ergo: f64,
    /// Both endpoints are maximally mixed, so `δQ_entro` was set to 0.
    pub maximally_mixed: bool,
}

fn mid3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    scale([a[0] + b[0], a[1] + b[1], a[2] + b[2]], 0.5)
}

/// Midpoint-rule increments between consecutive trajectory points.
pub fn ledger_step(prev: (&BlochState, &Field3), next: (&BlochState, &Field3)) -> StepIncrements {
    let (s1, f1) = prev;
    let (s2, f2) = next;
    let (r1v, r2v) = (s1.vector(), s2.vector());
    let (h1v, h2v) = (f1.vector(), f2.vector());
    let u1 = internal_energy(s1, f1);
    let u2 = internal_energy(s2, f2);
    let (r1, r2) = (s1.radius(), s2.radius());
    let (h1, h2) = (f1.magnitude(), f2.magnitude());

    let dq_stand = -dot(mid3(h1v, h2v), sub(r2v, r1v));
    let dw_stand = -dot(mid3(r1v, r2v), sub(h2v, h1v));

    let ur = |u: f64, r: f64| (r >= MIXED_RADIUS).then(|| u / r);
    let (maximally_mixed, dq_entro) = match (ur(u1, r1), ur(u2, r2)) {
        (None, None) => (true, 0.0),
        (Some(a), None) | (None, Some(a)) => (false, a * (r2 - r1)),
        (Some(a), Some(b)) => (false, 0.5 * (a + b) * (r2 - r1)),
    };
    let dw_star = dq_stand - dq_entro;
    let dw_entro = dw_stand + dw_star;

    let de = (u2 + h2 * r2) - (u1 + h1 * r1);
    let dq_ergo = -0.5 * (h1 + h2) * (r2 - r1);
    let dw_ergo = -0.5 * (r1 + r2) * (h2 - h1) + de;

    StepIncrements {
        du: u2 - u1,
        dq_stand,
        dw_stand,
        dq_entro,
        dw_entro,
        dw_star,
        dq_ergo,
        dw_ergo,
        maximally_mixed,
    }
}

/// One grid point of the ledger. Heats and works are cumulative from the
/// first point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerRow {
    pub t: f64,
    pub state: BlochState,
    pub field: Field3,
    pub u: f64,
    pub s: f64,
    pub c: f64,
    pub e: f64,
    pub e_i: f64,
    pub e_c: f64,
    pub q_stand: f64,
    pub w_stand: f64,
    pub q_entro: f64,
    pub w_entro: f64,
    pub w_star: f64,
    pub q_ergo: f64,
    pub w_ergo: f64,
    pub q_op: f64,
    pub t_stand: f64,
    pub t_entro: f64,
    pub t_ergo: f64,
    /// `Σ δQ_ergo / T_ergo` accumulated with midpoint temperatures.
    pub entropy_flow: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermoLedger {
    pub rows: Vec<LedgerRow>,
    /// Indices of steps whose endpoints were both maximally mixed.
    pub mixed_steps: Vec<usize>,
    /// Grid-interpolated times where `h·r` changes sign and the standard
    /// temperature passes through its infinite sentinel.
    pub stand_poles: Vec<f64>,
}

impl ThermoLedger {
    pub fn last(&self) -> &LedgerRow {
        self.rows.last().expect("ledgers have at least two rows")
    }

    /// Largest `|ΔU − Q − W|` over the grid for a formulation.
    pub fn closure_error(&self, formulation: Formulation) -> f64 {
        let u0 = self.rows[0].u;
        self.rows
            .iter()
            .map(|r| {
                let (q, w) = match formulation {
                    Formulation::Standard => (r.q_stand, r.w_stand),
                    Formulation::Entropy => (r.q_entro, r.w_entro),
                    Formulation::Ergotropy => (r.q_ergo, r.w_ergo),
                    Formulation::Operational => (r.q_op, r.u - u0 - r.q_op),
                };
                (r.u - u0 - q - w).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn point_row(t: f64, state: &BlochState, field: &Field3) -> LedgerRow {
    let erg = ergotropy_of(state, field);
    LedgerRow {
        t,
        state: *state,
        field: *field,
        u: internal_energy(state, field),
        s: entropy_of_radius(state.radius()),
        c: coherence_l1(state, field).unwrap_or(f64::NAN),
        e: erg.total,
        e_i: erg.incoherent,
        e_c: erg.coherent,
        q_stand: 0.0,
        w_stand: 0.0,
        q_entro: 0.0,
        w_entro: 0.0,
        w_star: 0.0,
        q_ergo: 0.0,
        w_ergo: 0.0,
        q_op: 0.0,
        t_stand: temperature(state, field, Formulation::Standard),
        t_entro: temperature(state, field, Formulation::Entropy),
        t_ergo: temperature(state, field, Formulation::Ergotropy),
        entropy_flow: 0.0,
    }
}

/// Heat over temperature for one step of the ergotropy-based law. When
/// the midpoint field vanishes both numerator and temperature do, and the
/// ratio is taken in its limit `−artanh(r) dr`.
fn entropy_flow_step(r1: f64, r2: f64, h1: f64, h2: f64) -> f64 {
    let r_mid = 0.5 * (r1 + r2);
    if r_mid < MIXED_RADIUS {
        return 0.0;
    }
    let h_mid = 0.5 * (h1 + h2);
    let dq = -h_mid * (r2 - r1);
    if dq == 0.0 {
        return 0.0;
    }
    if h_mid > 0.0 {
        // δQ / T with T = h / artanh(r), written without forming T
        dq * r_mid.atanh() / h_mid
    } else {
        -r_mid.atanh() * (r2 - r1)
    }
}

/// Cumulative ledger over a trajectory.
pub fn accumulate_ledger(traj: &Trajectory) -> Result<ThermoLedger> {
    if traj.len() < 2 || traj.states.len() != traj.len() || traj.fields.len() != traj.len() {
        return Err(Error::validation("trajectory needs ≥ 2 aligned points"));
    }
    let h0 = traj.fields[0].magnitude();
    let r0 = traj.states[0].radius();
    let mut rows = Vec::with_capacity(traj.len());
    let mut mixed_steps = Vec::new();
    let mut stand_poles = Vec::new();
    rows.push(point_row(traj.times[0], &traj.states[0], &traj.fields[0]));
    for i in 1..traj.len() {
        let (s1, f1) = (&traj.states[i - 1], &traj.fields[i - 1]);
        let (s2, f2) = (&traj.states[i], &traj.fields[i]);
        let inc = ledger_step((s1, f1), (s2, f2));
        if inc.maximally_mixed {
            mixed_steps.push(i - 1);
        }
        let a = f1.dot(s1);
        let b = f2.dot(s2);
        if a != 0.0 && b != 0.0 && a.signum() != b.signum() {
            let (t1, t2) = (traj.times[i - 1], traj.times[i]);
            stand_poles.push(t1 + (t2 - t1) * a / (a - b));
        } else if b == 0.0 && a != 0.0 {
            stand_poles.push(traj.times[i]);
        }
        let prev = rows[i - 1];
        let mut row = point_row(traj.times[i], s2, f2);
        row.q_stand = prev.q_stand + inc.dq_stand;
        row.w_stand = prev.w_stand + inc.dw_stand;
        row.q_entro = prev.q_entro + inc.dq_entro;
        row.w_entro = prev.w_entro + inc.dw_entro;
        row.w_star = prev.w_star + inc.dw_star;
        row.q_ergo = prev.q_ergo + inc.dq_ergo;
        row.w_ergo = prev.w_ergo + inc.dw_ergo;
        row.q_op = -h0 * (s2.radius() - r0);
        row.entropy_flow = prev.entropy_flow
            + entropy_flow_step(s1.radius(), s2.radius(), f1.magnitude(), f2.magnitude());
        rows.push(row);
    }
    Ok(ThermoLedger {
        rows,
        mixed_steps,
        stand_poles,
    })
}

/// Ledger on `times`, with each interval subdivided until the final
/// cumulative heats, works and entropy flow change by less than `tol` between rounds.
pub fn simulate_ledger(model: &ChannelModel, r0: &BlochState, times: &[f64], tol: f64) -> Result<ThermoLedger> {
    let base = model.trajectory(r0, times)?;
    let mut factor = 1usize;
    // step precondition: r and h move by less than 0.05 per step
    let coarse = base
        .states
        .windows(2)
        .zip(base.fields.windows(2))
        .map(|(s, f)| {
            (s[1].radius() - s[0].radius())
                .abs()
                .max((f[1].magnitude() - f[0].magnitude()).abs())
                .max(norm(sub(s[1].vector(), s[0].vector())))
        })
        .fold(0.0, f64::max);
    while coarse / (factor as f64) >= 0.05 {
        factor *= 2;
    }
    let summary = |l: &ThermoLedger| {
        let r = l.last();
        [r.q_stand, r.w_stand, r.q_entro, r.w_entro, r.q_ergo, r.w_ergo, r.entropy_flow]
    };
    let mut current = ledger_with_factor(model, r0, times, factor)?;
    for _ in 0..10 {
        let refined = ledger_with_factor(model, r0, times, factor * 2)?;
        let change = summary(&current)
            .iter()
            .zip(summary(&refined))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        current = refined;
        factor *= 2;
        if change < tol {
            return Ok(current);
        }
    }
    Err(Error::numerical(format!(
        "ledger did not converge to {tol:e} after refining each step {factor}-fold"
    )))
}

fn ledger_with_factor(model: &ChannelModel, r0: &BlochState, times: &[f64], factor: usize) -> Result<ThermoLedger> {
    if factor == 1 {
        return accumulate_ledger(&model.trajectory(r0, times)?);
    }
    let mut fine = Vec::with_capacity((times.len() - 1) * factor + 1);
    for w in times.windows(2) {
        for k in 0..factor {
            fine.push(w[0] + (w[1] - w[0]) * k as f64 / factor as f64);
        }
    }
    fine.push(*times.last().expect("non-empty grid"));
    let full = accumulate_ledger(&model.trajectory(r0, &fine)?)?;
    let rows = full.rows.iter().step_by(factor).copied().collect();
    let mut mixed_steps: Vec<usize> = full.mixed_steps.iter().map(|i| i / factor).collect();
    mixed_steps.dedup();
    Ok(ThermoLedger {
        rows,
        mixed_steps,
        stand_poles: full.stand_poles,
    })
}

/// Operational heat `tr[ρ^{mπ}(t)H(0)] − tr[ρ^π(0)H(0)]` of a qubit.
pub fn operational_heat_qop(traj: &Trajectory, index: usize) -> f64 {
    let h0 = traj.fields[0].magnitude();
    -h0 * (traj.states[index].radius() - traj.states[0].radius())
}

/// Adiabatic work of the operational formulation, `ΔU_π − Q_op`.
pub fn operational_adiabatic_work(traj: &Trajectory, index: usize) -> f64 {
    let upi = |i: usize| -traj.fields[i].magnitude() * traj.states[i].radius();
    upi(index) - upi(0) - operational_heat_qop(traj, index)
}

/// Entropy production of one step toward `fixed_point`, with its passive
/// and non-passive parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyProduction {
    pub total: f64,
    pub passive: f64,
    pub non_passive: f64,
    /// A relative entropy was infinite; the values are `NaN`.
    pub support_violation: bool,
}

pub fn entropy_production_step(
    prev: &BlochState,
    next: &BlochState,
    fixed_point: &BlochState,
    field: &Field3,
) -> EntropyProduction {
    let d1 = relative_entropy_qubit(prev, fixed_point);
    let d2 = relative_entropy_qubit(next, fixed_point);
    let p1 = relative_entropy_qubit(&passive_bloch(prev, field), fixed_point);
    let p2 = relative_entropy_qubit(&passive_bloch(next, field), fixed_point);
    if [d1, d2, p1, p2].iter().any(|v| v.is_infinite()) {
        return EntropyProduction {
            total: f64::NAN,
            passive: f64::NAN,
            non_passive: f64::NAN,
            support_violation: true,
        };
    }
    let total = d1 - d2;
    let passive = p1 - p2;
    EntropyProduction {
        total,
        passive,
        non_passive: total - passive,
        support_violation: false,
    }
}

/// Rate of change of the Bloch radius, `r·ṙ/|r|`.
pub fn radius_rate(model: &ChannelModel, r0: &BlochState, t: f64) -> Result<f64> {
    let (st, v) = model.bloch_velocity(r0, t)?;
    let r = st.radius();
    Ok(if r == 0.0 { 0.0 } else { dot(st.vector(), v) / r })
}

fn require_static(model: &ChannelModel) -> Result<Field3> {
    if !model.static_field() {
        return Err(Error::validation(format!(
            "{} has a time-dependent field",
            model.family().tag()
        )));
    }
    Ok(model.field_at(0.0))
}

/// Entropy-based heat rate `(U/r) dr/dt` for a static field.
fn q_entro_rate(model: &ChannelModel, field: &Field3, r0: &BlochState, t: f64) -> f64 {
    let Ok(st) = model.evolve(r0, t) else {
        return f64::NAN;
    };
    let r = st.radius();
    // at the centre U/r → −h·v̂ and dr/dt → |v|
    if r == 0.0 {
        return model
            .bloch_velocity(r0, t)
            .map_or(f64::NAN, |(_, v)| -dot(field.vector(), v));
    }
    let u = internal_energy(&st, field);
    radius_rate(model, r0, t).map_or(f64::NAN, |v| u / r * v)
}

/// Cumulative entropy-based heat `∫₀ᵗ (U/r) dr` by adaptive quadrature.
pub fn entropic_heat(model: &ChannelModel, r0: &BlochState, t: f64) -> Result<f64> {
    let field = require_static(model)?;
    if matches!(model.family(), Family::Pd | Family::NmPd | Family::OhmicPd) {
        // energy is conserved, so the integral is U₀ ln(r/r₀)
        let (r_init, r) = (r0.radius(), model.evolve(r0, t)?.radius());
        if r_init < MIXED_RADIUS {
            return Ok(0.0);
        }
        return Ok(internal_energy(r0, &field) * (r / r_init).ln());
    }
    if t.is_infinite() {
        let integrand = |u: f64| {
            let c = u.cos();
            let v = q_entro_rate(model, &field, r0, u.tan()) / (c * c);
            if v.is_finite() { v } else { 0.0 }
        };
        return adaptive_simpson(integrand, 0.0, std::f64::consts::FRAC_PI_2, 1e-12, 40);
    }
    adaptive_simpson(|s| q_entro_rate(model, &field, r0, s), 0.0, t, 1e-12, 40)
}

/// Zeros of the cumulative entropy-based heat, the characteristic
/// adiabatic times.
#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticTimes {
    pub roots: Vec<f64>,
    pub horizon: f64,
}

impl AdiabaticTimes {
    /// Smallest `t_c > 0`.
    pub fn first(&self) -> Option<f64> {
        self.roots.first().copied()
    }

    /// Largest root, used for the non-Markovian families.
    pub fn last(&self) -> Option<f64> {
        self.roots.last().copied()
    }
}

/// Sign changes of the entropy-based heat on `times`, refined by bisection
/// on the exact cumulative integral to `1e-9`.
pub fn adiabatic_time_tc(model: &ChannelModel, r0: &BlochState, times: &[f64]) -> Result<AdiabaticTimes> {
    let field = require_static(model)?;
    if times.len() < 2 {
        return Err(Error::validation("adiabatic-time scan needs at least two times"));
    }
    let rate = |s: f64| q_entro_rate(model, &field, r0, s);
    let mut q = vec![adaptive_simpson(rate, 0.0, times[0], 1e-12, 40)?];
    for w in times.windows(2) {
        let inc = adaptive_simpson(rate, w[0], w[1], 1e-13, 40)?;
        q.push(q.last().copied().unwrap_or(0.0) + inc);
    }
    // cumulative values within quadrature noise of zero carry no sign
    let scale = q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-11 * scale.max(1e-3);
    let sign = |v: f64| if v.abs() <= floor { 0.0 } else { v.signum() };
    let mut roots = Vec::new();
    let mut last_sign = 0.0;
    let mut last_idx = 0usize;
    for (i, &v) in q.iter().enumerate() {
        if times[i] <= 0.0 {
            continue;
        }
        let sv = sign(v);
        if sv == 0.0 {
            continue;
        }
        if last_sign != 0.0 && sv != last_sign {
            let (a, b) = (times[last_idx], times[i]);
            let qa = q[last_idx];
            let g = |t: f64| qa + adaptive_simpson(rate, a, t, 1e-13, 40).unwrap_or(f64::NAN);
            roots.push(bisect(g, a, b, 1e-9)?);
        }
        last_sign = sv;
        last_idx = i;
    }
    Ok(AdiabaticTimes {
        roots,
        horizon: *times.last().expect("non-empty grid"),
    })
}

/// Energy balance at the adiabatic time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvWork {
    pub w_star: f64,
    pub delta_e: f64,
    pub delta_u_pi: f64,
}

/// `W*(t_c) = ΔU(t_c)`, `ΔU_π = −h Δr` and `ΔE`, which satisfy
/// `ΔE = W* − ΔU_π`.
pub fn env_work_identities(model: &ChannelModel, r0: &BlochState, t_c: f64) -> Result<EnvWork> {
    let field = require_static(model)?;
    let h = field.magnitude();
    if h <= 0.0 || field.hx != 0.0 || field.hy != 0.0 {
        return Err(Error::validation("environment-induced work needs a non-zero field along z"));
    }
    let st = model.evolve(r0, t_c)?;
    Ok(EnvWork {
        w_star: internal_energy(&st, &field) - internal_energy(r0, &field),
        delta_e: ergotropy_of(&st, &field).total - ergotropy_of(r0, &field).total,
        delta_u_pi: -h * (st.radius() - r0.radius()),
    })
}

/// Times where `h·r` changes sign, where the standard temperature passes
/// through its infinite sentinel; bisection to `1e-9` on `times`-brackets.
pub fn standard_temperature_poles(model: &ChannelModel, r0: &BlochState, times: &[f64]) -> Result<Vec<f64>> {
    let traj = model.trajectory(r0, times)?;
    let g = |t: f64| {
        model
            .evolve(r0, t)
            .map_or(f64::NAN, |s| model.field_at(t).dot(&s))
    };
    let mut out = Vec::new();
    for i in 1..traj.len() {
        let a = traj.fields[i - 1].dot(&traj.states[i - 1]);
        let b = traj.fields[i].dot(&traj.states[i]);
        if a != 0.0 && b != 0.0 && a.signum() != b.signum() {
            out.push(bisect(g, traj.times[i - 1], traj.times[i], 1e-9)?);
        }
    }
    Ok(out)
}
