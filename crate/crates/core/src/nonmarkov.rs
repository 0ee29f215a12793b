//! Non-Markovianity from broken monotonicity.
//!
//! A quantity `F` that is monotone under divisible dynamics (direction
//! `α = ±1`) witnesses memory effects wherever `sgn dF/dt = −α`. The
//! measure sums `|F(b) − F(a)|` over those intervals and maximizes over
//! initial states.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channels::{critical_times, ChannelModel};
use crate::error::{Error, Result};
use crate::numerics::{golden_max, linspace};
use crate::parallel::{self, Execution};
use crate::state::{coherence_l1, dot, entropy_of_radius, norm, scale, sub, trace_distance, BlochState};
use crate::thermo::{entropic_heat, internal_energy, temperature, Formulation};

/// Maximum number of grid doublings in [`sign_intervals`].
pub const MAX_DENSIFY_ROUNDS: usize = 12;

/// Time coordinate used for interval detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeAxis {
    /// `t ∈ [start, end]`.
    Finite { start: f64, end: f64 },
    /// `t = tan(u)/scale` for `u ∈ [0, π/2]`, covering `[0, ∞]`.
    Compactified { scale: f64 },
}

impl TimeAxis {
    fn bounds(&self) -> (f64, f64) {
        match *self {
            TimeAxis::Finite { start, end } => (start, end),
            TimeAxis::Compactified { .. } => (0.0, FRAC_PI_2),
        }
    }

    fn time(&self, u: f64) -> f64 {
        match *self {
            TimeAxis::Finite { .. } => u,
            TimeAxis::Compactified { scale } => {
                if u >= FRAC_PI_2 {
                    f64::INFINITY
                } else {
                    u.tan() / scale
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalGrid {
    pub axis: TimeAxis,
    pub points: usize,
}

impl SignalGrid {
    pub fn finite(end: f64, points: usize) -> Self {
        Self {
            axis: TimeAxis::Finite { start: 0.0, end },
            points,
        }
    }

    pub fn compactified(scale: f64, points: usize) -> Self {
        Self {
            axis: TimeAxis::Compactified { scale },
            points,
        }
    }
}

type Eval<'a> = Box<dyn Fn(f64) -> Result<f64> + 'a>;

/// A scalar function of time with the direction it would follow under
/// divisible dynamics.
pub struct MonotoneSignal<'a> {
    value: Eval<'a>,
    rate: Option<Eval<'a>>,
    orientation: f64,
}

impl<'a> MonotoneSignal<'a> {
    /// `orientation` is `+1` for quantities that grow under divisible
    /// dynamics and `−1` for those that shrink.
    pub fn new(value: impl Fn(f64) -> Result<f64> + 'a, orientation: f64) -> Self {
        Self {
            value: Box::new(value),
            rate: None,
            orientation: orientation.signum(),
        }
    }

    /// Supplies `dF/dt`; otherwise it is estimated by central differences.
    pub fn with_rate(mut self, rate: impl Fn(f64) -> Result<f64> + 'a) -> Self {
        self.rate = Some(Box::new(rate));
        self
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        (self.value)(t)
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    /// Whether the signal moves against its orientation at `u`.
    fn violates(&self, axis: &TimeAxis, u: f64, du: f64) -> Result<bool> {
        let rate = match &self.rate {
            Some(r) => r(axis.time(u))?,
            None => {
                let (lo, hi) = axis.bounds();
                let a = (u - du).max(lo);
                let b = (u + du).min(hi);
                let fa = (self.value)(axis.time(a))?;
                let fb = (self.value)(axis.time(b))?;
                let diff = fb - fa;
                // differences inside round-off of F carry no sign
                if diff.abs() <= 4.0 * f64::EPSILON * fa.abs().max(fb.abs()) {
                    0.0
                } else {
                    diff
                }
            }
        };
        if rate.is_nan() {
            return Err(Error::numerical(format!(
                "signal rate undefined at t = {}",
                axis.time(u)
            )));
        }
        Ok(rate != 0.0 && rate.signum() == -self.orientation)
    }
}

fn intervals_on(signal: &MonotoneSignal, axis: &TimeAxis, cells: usize) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = axis.bounds();
    let h = (hi - lo) / cells as f64;
    let du = 1e-6 * (hi - lo);
    let flags = (0..cells)
        .map(|k| signal.violates(axis, lo + (k as f64 + 0.5) * h, du))
        .collect::<Result<Vec<bool>>>()?;
    let tol = 1e-12 * (hi - lo);
    // boundary between a cell centre where `inside` holds and one where
    // it does not, located by bisection on the predicate
    let refine = |inside: f64, outside: f64| -> Result<f64> {
        let (mut a, mut b) = (inside, outside);
        while (b - a).abs() > tol {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            if signal.violates(axis, m, du)? {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    };
    let mut out = Vec::new();
    let mut k = 0;
    while k < cells {
        if !flags[k] {
            k += 1;
            continue;
        }
        let first = k;
        while k + 1 < cells && flags[k + 1] {
            k += 1;
        }
        let centre = |j: usize| lo + (j as f64 + 0.5) * h;
        let start = if first == 0 {
            lo
        } else {
            refine(centre(first), centre(first - 1))?
        };
        let end = if k == cells - 1 {
            hi
        } else {
            refine(centre(k), centre(k + 1))?
        };
        out.push((start, end));
        k += 1;
    }
    Ok(out)
}

/// Maximal intervals where `sgn dF/dt = −α`, densifying the grid until
/// the interval set is stable between successive doublings.
pub fn sign_intervals(signal: &MonotoneSignal, grid: &SignalGrid) -> Result<Vec<(f64, f64)>> {
    let axis = grid.axis;
    let mut cells = grid.points.max(16);
    let mut previous = intervals_on(signal, &axis, cells)?;
    for _ in 0..MAX_DENSIFY_ROUNDS {
        cells *= 2;
        let current = intervals_on(signal, &axis, cells)?;
        let stable = current.len() == previous.len()
            && current
                .iter()
                .zip(&previous)
                .all(|(a, b)| (a.0 - b.0).abs() < 1e-8 && (a.1 - b.1).abs() < 1e-8);
        if stable {
            return Ok(current
                .into_iter()
                .map(|(a, b)| (axis.time(a), axis.time(b)))
                .collect());
        }
        previous = current;
    }
    Err(Error::numerical(format!(
        "interval set did not stabilize after {MAX_DENSIFY_ROUNDS} grid doublings"
    )))
}

/// `Σ |F(b) − F(a)|` over the given intervals.
pub fn backflow(signal: &MonotoneSignal, intervals: &[(f64, f64)]) -> Result<f64> {
    let mut total = 0.0;
    for &(a, b) in intervals {
        total += (signal.value(b)? - signal.value(a)?).abs();
    }
    Ok(total)
}

/// Value of a measure with the state(s) that achieve it.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResult {
    pub value: f64,
    pub optimizer: Vec<BlochState>,
    pub intervals: Vec<(f64, f64)>,
}

impl MeasureResult {
    fn zero(optimizer: Vec<BlochState>) -> Self {
        Self {
            value: 0.0,
            optimizer,
            intervals: Vec::new(),
        }
    }
}

/// Quantities that can serve as monotone signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignalKind {
    EntropicHeat,
    ErgotropicHeat,
    StandardHeat,
    Coherence,
    Entropy,
    Energy,
    ErgotropicTemperature,
}

impl SignalKind {
    pub fn tag(self) -> &'static str {
        match self {
            SignalKind::EntropicHeat => "Q_entro",
            SignalKind::ErgotropicHeat => "Q_ergo",
            SignalKind::StandardHeat => "Q_stand",
            SignalKind::Coherence => "C",
            SignalKind::Entropy => "S",
            SignalKind::Energy => "U",
            SignalKind::ErgotropicTemperature => "T_ergo",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        [
            SignalKind::EntropicHeat,
            SignalKind::ErgotropicHeat,
            SignalKind::StandardHeat,
            SignalKind::Coherence,
            SignalKind::Entropy,
            SignalKind::Energy,
            SignalKind::ErgotropicTemperature,
        ]
        .into_iter()
        .find(|k| k.tag() == tag)
    }
}

fn inapplicable(msg: impl Into<String>) -> Error {
    Error::WitnessInapplicable(msg.into())
}

/// Probe times spread over the detection axis.
fn probe_times(grid: &SignalGrid) -> Vec<f64> {
    let (lo, hi) = grid.axis.bounds();
    linspace(lo, hi, 65)
        .into_iter()
        .map(|u| grid.axis.time(u))
        .filter(|t| t.is_finite())
        .collect()
}

fn check_unital(model: &ChannelModel, grid: &SignalGrid) -> Result<()> {
    for t in probe_times(grid) {
        let r = model.evolve(&BlochState::MAXIMALLY_MIXED, t)?.radius();
        if r > 1e-12 {
            return Err(inapplicable(format!(
                "{} is not unital: the maximally mixed state moves to radius {r:e} at t = {t}",
                model.family().tag()
            )));
        }
    }
    Ok(())
}

fn check_incoherent(model: &ChannelModel, grid: &SignalGrid) -> Result<()> {
    let field = model.field_at(0.0);
    let unit = field
        .unit()
        .ok_or_else(|| inapplicable("coherence needs a non-zero field"))?;
    for sign in [1.0, -1.0] {
        let st = BlochState::from_vector([0.7 * sign * unit[0], 0.7 * sign * unit[1], 0.7 * sign * unit[2]])?;
        for t in probe_times(grid) {
            let c = coherence_l1(&model.evolve(&st, t)?, &model.field_at(t))?;
            if c > 1e-12 {
                return Err(inapplicable(format!(
                    "{} is not incoherent: an energy eigenstate acquires coherence {c:e} at t = {t}",
                    model.family().tag()
                )));
            }
        }
    }
    Ok(())
}

fn check_energy_sign(model: &ChannelModel, r0: &BlochState, grid: &SignalGrid) -> Result<f64> {
    let u0 = internal_energy(r0, &model.field_at(0.0));
    if u0 == 0.0 {
        return Err(inapplicable("initial energy is zero, so the orientation is undefined"));
    }
    for t in probe_times(grid) {
        let st = model.evolve(r0, t)?;
        let u = internal_energy(&st, &model.field_at(t));
        if u != 0.0 && u.signum() != u0.signum() {
            return Err(inapplicable(format!(
                "energy changes sign at t = {t}, so the entropic heat is not monotone in purity"
            )));
        }
    }
    Ok(u0)
}

fn radial_rate(r: [f64; 3], v: [f64; 3]) -> f64 {
    let n = norm(r);
    if n == 0.0 {
        0.0
    } else {
        dot(r, v) / n
    }
}

fn field_rate(model: &ChannelModel, t: f64) -> [f64; 3] {
    if model.static_field() {
        return [0.0; 3];
    }
    let d = 1e-6 * t.max(1.0);
    let a = model.field_at((t - d).max(0.0)).vector();
    let b = model.field_at(t + d).vector();
    let span = t + d - (t - d).max(0.0);
    scale(sub(b, a), 1.0 / span)
}

/// Builds the signal of `kind` along the evolution of `r0` under `model`,
/// after checking the channel conditions under which it is monotone.
/// Rates come from the exact Bloch velocity, so their signs carry no
/// quadrature noise.
pub fn build_signal<'a>(
    kind: SignalKind,
    model: &'a ChannelModel,
    r0: BlochState,
    grid: &SignalGrid,
) -> Result<MonotoneSignal<'a>> {
    let field_of = move |t: f64| model.field_at(t);
    let motion = move |t: f64| -> Result<([f64; 3], [f64; 3])> {
        let (st, v) = model.bloch_velocity(&r0, t)?;
        Ok((st.vector(), v))
    };
    let static_only = |what: &str| -> Result<()> {
        if model.static_field() {
            Ok(())
        } else {
            Err(inapplicable(format!("{what} witness needs a static field")))
        }
    };
    Ok(match kind {
        SignalKind::EntropicHeat => {
            check_unital(model, grid)?;
            let u0 = check_energy_sign(model, &r0, grid)?;
            static_only("entropic heat")?;
            let h = model.field_at(0.0).vector();
            // purity loss lowers Q when U > 0, so the divisible direction is −sgn U₀
            MonotoneSignal::new(move |t| entropic_heat(model, &r0, t), -u0.signum()).with_rate(move |t| {
                let (r, v) = motion(t)?;
                let n = norm(r);
                if n < 1e-12 {
                    return Ok(0.0);
                }
                Ok(-dot(h, r) / n * radial_rate(r, v))
            })
        }
        SignalKind::ErgotropicHeat => {
            check_unital(model, grid)?;
            static_only("ergotropic heat")?;
            let h = model.field_at(0.0).magnitude();
            let r_init = r0.radius();
            MonotoneSignal::new(move |t| Ok(-h * (model.evolve(&r0, t)?.radius() - r_init)), 1.0).with_rate(move |t| {
                let (r, v) = motion(t)?;
                Ok(-h * radial_rate(r, v))
            })
        }
        SignalKind::StandardHeat => {
            let u0 = check_energy_sign(model, &r0, grid)?;
            static_only("standard heat")?;
            let h = model.field_at(0.0);
            let u_init = internal_energy(&r0, &h);
            MonotoneSignal::new(move |t| Ok(internal_energy(&model.evolve(&r0, t)?, &h) - u_init), -u0.signum())
                .with_rate(move |t| Ok(-dot(h.vector(), motion(t)?.1)))
        }
        SignalKind::Energy => {
            let u0 = check_energy_sign(model, &r0, grid)?;
            MonotoneSignal::new(move |t| Ok(internal_energy(&model.evolve(&r0, t)?, &field_of(t))), -u0.signum())
                .with_rate(move |t| {
                    let (r, v) = motion(t)?;
                    Ok(-dot(field_rate(model, t), r) - dot(field_of(t).vector(), v))
                })
        }
        SignalKind::Coherence => {
            check_incoherent(model, grid)?;
            MonotoneSignal::new(move |t| coherence_l1(&model.evolve(&r0, t)?, &field_of(t)), -1.0).with_rate(
                move |t| {
                    let (r, v) = motion(t)?;
                    let n = field_of(t)
                        .unit()
                        .ok_or_else(|| inapplicable("coherence needs a non-zero field"))?;
                    let perp = sub(r, scale(n, dot(r, n)));
                    let c = norm(perp);
                    Ok(if c == 0.0 { 0.0 } else { dot(perp, sub(v, scale(n, dot(v, n)))) / c })
                },
            )
        }
        SignalKind::Entropy => {
            check_unital(model, grid)?;
            MonotoneSignal::new(move |t| Ok(entropy_of_radius(model.evolve(&r0, t)?.radius())), 1.0).with_rate(
                move |t| {
                    let (r, v) = motion(t)?;
                    let n = norm(r);
                    let dr = radial_rate(r, v);
                    // dS/dr = −artanh r, unbounded at pure states
                    Ok(if n >= 1.0 { -dr } else { -n.atanh() * dr })
                },
            )
        }
        SignalKind::ErgotropicTemperature => {
            check_unital(model, grid)?;
            MonotoneSignal::new(
                move |t| Ok(temperature(&model.evolve(&r0, t)?, &field_of(t), Formulation::Ergotropy)),
                1.0,
            )
            .with_rate(move |t| {
                let (r, v) = motion(t)?;
                let n = norm(r);
                if n < 1e-12 {
                    return Ok(0.0);
                }
                let dr = radial_rate(r, v);
                if n >= 1.0 {
                    return Ok(-dr);
                }
                let a = n.atanh();
                let h = field_of(t).magnitude();
                let dh = dot(field_rate(model, t), field_of(t).unit().unwrap_or([0.0; 3]));
                Ok(dh / a - h * dr / ((1.0 - n * n) * a * a))
            })
        }
    })
}

/// Initial states over which a measure is maximized.
pub enum SearchSpace {
    States(Vec<BlochState>),
    /// A one-parameter family sampled on `[lo, hi]` with spacing `step`,
    /// refined by golden-section search around the best sample.
    Line {
        lo: f64,
        hi: f64,
        step: f64,
        state_of: Box<dyn Fn(f64) -> Result<BlochState> + Sync>,
    },
}

fn evaluate_state(
    kind: SignalKind,
    model: &ChannelModel,
    r0: BlochState,
    grid: &SignalGrid,
) -> Result<(f64, Vec<(f64, f64)>)> {
    let signal = build_signal(kind, model, r0, grid)?;
    let intervals = sign_intervals(&signal, grid)?;
    let value = backflow(&signal, &intervals)?;
    Ok((value, intervals))
}

/// `N_F`: the largest backflow of `kind` over the search space.
///
/// States with zero initial energy are skipped for energy-oriented
/// signals. If every candidate is rejected the first rejection is
/// returned.
pub fn measure_nf(
    kind: SignalKind,
    model: &ChannelModel,
    search: &SearchSpace,
    grid: &SignalGrid,
    exec: Execution,
) -> Result<MeasureResult> {
    model.validate()?;
    let score = |r0: &BlochState| evaluate_state(kind, model, *r0, grid);
    match search {
        SearchSpace::States(states) => {
            let results = parallel::map(states, exec, score);
            best_of(states, results)
        }
        SearchSpace::Line { lo, hi, step, state_of } => {
            let n = (((hi - lo) / step).round() as usize).max(1) + 1;
            let params = linspace(*lo, *hi, n);
            let states = params.iter().map(|&p| state_of(p)).collect::<Result<Vec<_>>>()?;
            let results = parallel::map(&states, exec, score);
            let coarse = best_of(&states, results)?;
            let Some(best_idx) = states.iter().position(|s| Some(s) == coarse.optimizer.first()) else {
                return Ok(coarse);
            };
            let a = params[best_idx.saturating_sub(1)];
            let b = params[(best_idx + 1).min(n - 1)];
            let objective = |p: f64| {
                state_of(p)
                    .and_then(|s| evaluate_state(kind, model, s, grid))
                    .map_or(f64::NEG_INFINITY, |v| v.0)
            };
            let (p, v) = golden_max(objective, a, b, 1e-9 * (hi - lo).abs().max(1.0));
            if v > coarse.value {
                let st = state_of(p)?;
                let (value, intervals) = evaluate_state(kind, model, st, grid)?;
                Ok(MeasureResult {
                    value,
                    optimizer: vec![st],
                    intervals,
                })
            } else {
                Ok(coarse)
            }
        }
    }
}

fn best_of(states: &[BlochState], results: Vec<Result<(f64, Vec<(f64, f64)>)>>) -> Result<MeasureResult> {
    let mut best: Option<MeasureResult> = None;
    let mut first_err = None;
    for (st, res) in states.iter().zip(results) {
        match res {
            Ok((value, intervals)) => {
                if best.as_ref().is_none_or(|b| value > b.value) {
                    best = Some(MeasureResult {
                        value,
                        optimizer: vec![*st],
                        intervals,
                    });
                }
            }
            Err(e @ Error::WitnessInapplicable(_)) => {
                first_err.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    match (best, first_err) {
        (Some(b), _) => Ok(b),
        (None, Some(e)) => Err(e),
        (None, None) => Ok(MeasureResult::zero(Vec::new())),
    }
}

/// Trace distance between the evolutions of two states, `|r_a − r_b|/2`.
pub fn pair_signal(model: &ChannelModel, a: BlochState, b: BlochState) -> MonotoneSignal<'_> {
    MonotoneSignal::new(
        move |t| Ok(trace_distance(&model.evolve(&a, t)?, &model.evolve(&b, t)?)),
        -1.0,
    )
    .with_rate(move |t| {
        let (sa, va) = model.bloch_velocity(&a, t)?;
        let (sb, vb) = model.bloch_velocity(&b, t)?;
        let d = sub(sa.vector(), sb.vector());
        let n = norm(d);
        Ok(if n == 0.0 { 0.0 } else { dot(d, sub(va, vb)) / (2.0 * n) })
    })
}

/// Trace-distance measure: largest total increase of `D(ρ₁(t), ρ₂(t))`
/// over the given pairs.
pub fn measure_nd_blp(
    model: &ChannelModel,
    pairs: &[(BlochState, BlochState)],
    grid: &SignalGrid,
    exec: Execution,
) -> Result<MeasureResult> {
    model.validate()?;
    let results = parallel::map(pairs, exec, |&(a, b)| -> Result<MeasureResult> {
        let signal = pair_signal(model, a, b);
        let intervals = sign_intervals(&signal, grid)?;
        Ok(MeasureResult {
            value: backflow(&signal, &intervals)?,
            optimizer: vec![a, b],
            intervals,
        })
    });
    let mut best = MeasureResult::zero(Vec::new());
    for r in results {
        let r = r?;
        if best.optimizer.is_empty() || r.value > best.value {
            best = r;
        }
    }
    Ok(best)
}

fn ohmic_parts(model: &ChannelModel) -> Result<(f64, f64, f64)> {
    match *model {
        ChannelModel::OhmicDephasing { s, omega_c, omega0 } => {
            model.validate()?;
            Ok((s, omega_c, omega0))
        }
        _ => Err(Error::validation(format!(
            "closed-form measures are defined for OHMIC-PD, not {}",
            model.family().tag()
        ))),
    }
}

/// Coherence factor at the ends of each negative-rate interval.
fn interval_factors(model: &ChannelModel) -> Result<(Vec<(f64, f64)>, Vec<(f64, f64)>)> {
    let (s, omega_c, _) = ohmic_parts(model)?;
    let intervals = critical_times(s, omega_c);
    let factors = intervals
        .iter()
        .map(|&(a, b)| Ok((model.coherence_factor(a)?, model.coherence_factor(b)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok((intervals, factors))
}

/// Coherence measure of Ohmic dephasing, attained by a maximally coherent
/// initial state.
pub fn measure_nc(model: &ChannelModel) -> Result<MeasureResult> {
    check_incoherent(model, &SignalGrid::finite(10.0, 16))?;
    let (intervals, factors) = interval_factors(model)?;
    let value = factors.iter().map(|(fa, fb)| (fb - fa).abs()).sum();
    Ok(MeasureResult {
        value,
        optimizer: vec![BlochState::new(1.0, 0.0, 0.0)?],
        intervals,
    })
}

/// Ergotropic-heat measure of Ohmic dephasing; any equatorial pure state
/// is optimal.
pub fn measure_nq_ergo(model: &ChannelModel) -> Result<MeasureResult> {
    check_unital(model, &SignalGrid::finite(10.0, 16))?;
    let (_, _, omega0) = ohmic_parts(model)?;
    let (intervals, factors) = interval_factors(model)?;
    let value = omega0 * factors.iter().map(|(fa, fb)| (fb - fa).abs()).sum::<f64>();
    Ok(MeasureResult {
        value,
        optimizer: vec![BlochState::new(1.0, 0.0, 0.0)?],
        intervals,
    })
}

/// Entropic-heat measure of Ohmic dephasing over pure initial states,
/// with the optimal `|z₀|` (`None` when the measure vanishes).
pub fn measure_nq_entro(model: &ChannelModel) -> Result<(MeasureResult, Option<f64>)> {
    check_unital(model, &SignalGrid::finite(10.0, 16))?;
    let (_, _, omega0) = ohmic_parts(model)?;
    let (intervals, factors) = interval_factors(model)?;
    if intervals.is_empty() {
        return Ok((MeasureResult::zero(Vec::new()), None));
    }
    let objective = |z: f64| -> f64 {
        let z2 = z * z;
        factors
            .iter()
            .map(|&(fa, fb)| {
                let num = fb * fb + (1.0 - fb * fb) * z2;
                let den = fa * fa + (1.0 - fa * fa) * z2;
                0.5 * z * (num / den).ln().abs()
            })
            .sum::<f64>()
    };
    let step = 1e-3;
    let grid = linspace(0.0, 1.0, 1001);
    let (best_i, _) = grid
        .iter()
        .map(|&z| objective(z))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let lo = (grid[best_i] - step).max(0.0);
    let hi = (grid[best_i] + step).min(1.0);
    let (z, v) = golden_max(objective, lo, hi, 1e-12);
    let value = omega0 * v;
    let optimizer = BlochState::new((1.0 - z * z).max(0.0).sqrt(), 0.0, z)?;
    Ok((
        MeasureResult {
            value,
            optimizer: vec![optimizer],
            intervals,
        },
        (value > 0.0).then_some(z),
    ))
}

/// Non-monotone stretches of the ergotropic temperature along a sampled
/// trajectory, as runs of grid steps where it decreases.
pub fn witness_temperature(traj: &crate::channels::Trajectory) -> Result<(bool, Vec<(f64, f64)>)> {
    let temps = traj
        .states
        .iter()
        .zip(&traj.fields)
        .map(|(s, f)| {
            let r = s.radius();
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::validation(format!(
                    "temperature witness needs 0 < r < 1, got {r}"
                )));
            }
            Ok(temperature(s, f, Formulation::Ergotropy))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for i in 1..temps.len() {
        let (a, b) = (temps[i - 1], temps[i]);
        let drop = a - b > 8.0 * f64::EPSILON * a.abs().max(b.abs());
        if drop {
            match out.last_mut() {
                Some(last) if last.1 == traj.times[i - 1] => last.1 = traj.times[i],
                _ => out.push((traj.times[i - 1], traj.times[i])),
            }
        }
    }
    Ok((!out.is_empty(), out))
}

/// Uniform samples from the Bloch ball.
pub fn random_bloch_states(n: usize, seed: u64) -> Vec<BlochState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if v[0] * v[0] + v[1] * v[1] + v[2] * v[2] <= 1.0 {
            out.push(BlochState::from_vector(v).expect("inside the ball"));
        }
    }
    out
}

/// Largest backflow of `kind` over `n` seeded random states on the
/// negative-rate intervals of Ohmic dephasing, which do not depend on the
/// initial state. States the witness rejects are skipped.
pub fn audit_ohmic(kind: SignalKind, model: &ChannelModel, n: usize, seed: u64, exec: Execution) -> Result<f64> {
    let (s, omega_c, _) = ohmic_parts(model)?;
    let intervals = critical_times(s, omega_c);
    let grid = SignalGrid::compactified(omega_c, 64);
    let states = random_bloch_states(n, seed);
    let values = parallel::map(&states, exec, |r0| -> Result<f64> {
        match build_signal(kind, model, *r0, &grid) {
            Ok(sig) => backflow(&sig, &intervals),
            Err(Error::WitnessInapplicable(_)) => Ok(0.0),
            Err(e) => Err(e),
        }
    });
    values.into_iter().try_fold(0.0f64, |m, v| Ok(m.max(v?)))
}

/// Largest trace-distance backflow over `n` seeded random pairs on the
/// negative-rate intervals of Ohmic dephasing.
pub fn audit_ohmic_pairs(model: &ChannelModel, n: usize, seed: u64, exec: Execution) -> Result<f64> {
    let (s, omega_c, _) = ohmic_parts(model)?;
    let intervals = critical_times(s, omega_c);
    let a = random_bloch_states(n, seed);
    let b = random_bloch_states(n, seed.wrapping_add(1));
    let pairs: Vec<_> = a.into_iter().zip(b).collect();
    let values = parallel::map(&pairs, exec, |&(p, q)| {
        backflow(&pair_signal(model, p, q), &intervals)
    });
    values.into_iter().try_fold(0.0f64, |m, v| Ok(m.max(v?)))
}

/// One point of an ohmicity sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct OhmicSweepPoint {
    pub s: f64,
    pub nc: MeasureResult,
    pub nq_entro: MeasureResult,
    pub z_max: Option<f64>,
    pub nq_ergo: MeasureResult,
    pub nd: MeasureResult,
    pub nq_stand: MeasureResult,
}

/// Grid used for the generic (sampled) measures in sweeps.
pub const SWEEP_GRID: SignalGrid = SignalGrid {
    axis: TimeAxis::Compactified { scale: 1.0 },
    points: 512,
};

/// All Ohmic-dephasing measures at each `s`.
pub fn ohmic_sweep(s_values: &[f64], omega_c: f64, omega0: f64, exec: Execution) -> Result<Vec<OhmicSweepPoint>> {
    let grid = SignalGrid {
        axis: TimeAxis::Compactified { scale: omega_c },
        points: SWEEP_GRID.points,
    };
    parallel::try_map(s_values, exec, |&s| {
        let model = ChannelModel::OhmicDephasing { s, omega_c, omega0 };
        let nc = measure_nc(&model)?;
        let (nq_entro, z_max) = measure_nq_entro(&model)?;
        let nq_ergo = measure_nq_ergo(&model)?;
        let pair = (BlochState::new(1.0, 0.0, 0.0)?, BlochState::new(-1.0, 0.0, 0.0)?);
        let nd = measure_nd_blp(&model, &[pair], &grid, Execution::Sequential)?;
        let stand_states = vec![
            BlochState::new(0.6, 0.0, 0.8)?,
            BlochState::new(0.8, 0.0, -0.6)?,
        ];
        let nq_stand = measure_nf(
            SignalKind::StandardHeat,
            &model,
            &SearchSpace::States(stand_states),
            &grid,
            Execution::Sequential,
        )?;
        Ok(OhmicSweepPoint {
            s,
            nc,
            nq_entro,
            z_max,
            nq_ergo,
            nd,
            nq_stand,
        })
    })
}
