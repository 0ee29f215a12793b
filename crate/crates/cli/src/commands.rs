//! The simulate, measure, events and plot commands.

use std::path::{Path, PathBuf};

use qthermo::channels::{sudden_death_times, Family};
use qthermo::nonmarkov::{
    measure_nc, measure_nd_blp, measure_nf, measure_nq_entro, measure_nq_ergo, random_bloch_states, MeasureResult,
    SearchSpace, SignalGrid, SignalKind,
};
use qthermo::numerics::linspace;
use qthermo::parallel::{self, Execution};
use qthermo::thermo::{adiabatic_time_tc, env_work_identities, ergotropy_of, internal_energy, simulate_ledger};
use qthermo::{BlochState, ChannelModel};

use crate::config::{with_param, EventKind, EventSpec, InitialState, MeasureKind, MeasureSpec, ScanAxis, ScenarioConfig};
use crate::error::{CliError, CliResult};
use crate::plot;
use crate::table::{format_float, Cell, Table};

pub const SIMULATE_COLUMNS: [&str; 22] = [
    "t", "x", "y", "z", "r", "U", "S", "C", "E", "E_I", "E_C", "Q_stand", "W_stand", "Q_entro", "W_entro", "W_star",
    "Q_ergo", "W_ergo", "Q_op", "T_stand", "T_entro", "T_ergo",
];

/// A command's table, its human-readable summary and the files written.
#[derive(Debug)]
pub struct Outcome {
    pub table: Table,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

fn finite_times(cfg: &ScenarioConfig, what: &str) -> CliResult<Vec<f64>> {
    if cfg.time.horizon.is_finite() {
        Ok(cfg.times())
    } else {
        Err(CliError::usage(format!("{what} needs a finite time.horizon")))
    }
}

fn write_outputs(dir: &Path, cfg: &ScenarioConfig, table: Table, summary: String, report: bool) -> CliResult<Outcome> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let csv = dir.join(format!("{}.csv", cfg.name));
    table.write(&csv)?;
    let mut files = vec![csv];
    if report {
        let txt = dir.join(format!("{}.txt", cfg.name));
        std::fs::write(&txt, format!("{summary}\n")).map_err(|e| CliError::io(&txt, e))?;
        files.push(txt);
    }
    Ok(Outcome { table, summary, files })
}

pub fn simulate_table(cfg: &ScenarioConfig) -> CliResult<Table> {
    let times = finite_times(cfg, "simulate")?;
    let r0 = cfg.init.bloch()?;
    let ledger = simulate_ledger(&cfg.channel, &r0, &times, cfg.time.tol)?;
    let mut table = Table::new(&SIMULATE_COLUMNS);
    for row in &ledger.rows {
        let st = row.state;
        table.push(
            [
                row.t,
                st.x(),
                st.y(),
                st.z(),
                st.radius(),
                row.u,
                row.s,
                row.c,
                row.e,
                row.e_i,
                row.e_c,
                row.q_stand,
                row.w_stand,
                row.q_entro,
                row.w_entro,
                row.w_star,
                row.q_ergo,
                row.w_ergo,
                row.q_op,
                row.t_stand,
                row.t_entro,
                row.t_ergo,
            ]
            .into_iter()
            .map(Cell::Num)
            .collect(),
        );
    }
    Ok(table)
}

pub fn simulate(cfg: &ScenarioConfig, dir: &Path) -> CliResult<Outcome> {
    let table = simulate_table(cfg)?;
    let summary = format!(
        "{}: {} rows over t ∈ [0, {}]",
        cfg.channel.family().tag(),
        table.rows.len(),
        cfg.time.horizon
    );
    write_outputs(dir, cfg, table, summary, false)
}

fn signal_grid(cfg: &ScenarioConfig, model: &ChannelModel) -> SignalGrid {
    if cfg.time.horizon.is_finite() {
        SignalGrid::finite(cfg.time.horizon, cfg.time.points)
    } else {
        let scale = match *model {
            ChannelModel::OhmicDephasing { omega_c, .. } => omega_c,
            _ => 1.0,
        };
        SignalGrid::compactified(scale, cfg.time.points)
    }
}

fn measure_one(
    spec: &MeasureSpec,
    cfg: &ScenarioConfig,
    model: &ChannelModel,
) -> qthermo::Result<MeasureResult> {
    let ohmic = model.family() == Family::OhmicPd;
    let grid = signal_grid(cfg, model);
    let r0 = cfg.init.bloch()?;
    let mut states = vec![r0];
    states.extend(random_bloch_states(spec.samples, spec.seed));
    let signal = match spec.kind {
        MeasureKind::Nc if ohmic => return measure_nc(model),
        MeasureKind::NqErgo if ohmic => return measure_nq_ergo(model),
        MeasureKind::NqEntro if ohmic => return measure_nq_entro(model).map(|(m, _)| m),
        MeasureKind::Nd => {
            let mut pairs = vec![(BlochState::new(1.0, 0.0, 0.0)?, BlochState::new(-1.0, 0.0, 0.0)?)];
            let others = random_bloch_states(spec.samples, spec.seed.wrapping_add(1));
            pairs.extend(states.into_iter().zip(others));
            return measure_nd_blp(model, &pairs, &grid, Execution::Sequential);
        }
        MeasureKind::Nc => SignalKind::Coherence,
        MeasureKind::NqErgo => SignalKind::ErgotropicHeat,
        MeasureKind::NqEntro => SignalKind::EntropicHeat,
        MeasureKind::NqStand => SignalKind::StandardHeat,
        MeasureKind::NfCustom => spec.signal.expect("checked when parsing"),
    };
    measure_nf(signal, model, &SearchSpace::States(states), &grid, Execution::Sequential)
}

fn intervals_text(iv: &[(f64, f64)]) -> String {
    iv.iter()
        .map(|(a, b)| format!("{}:{}", format_float(*a), format_float(*b)))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn measure_table(cfg: &ScenarioConfig) -> CliResult<(Table, String)> {
    let spec = cfg
        .measure
        .as_ref()
        .ok_or_else(|| CliError::usage("measure needs a `measure.kind` in the config"))?;
    let (param, points): (String, Vec<(f64, ChannelModel)>) = match &spec.sweep {
        Some(sw) => (
            sw.param.clone(),
            sw.values()
                .into_iter()
                .map(|v| (v, with_param(&cfg.channel, &sw.param, v).expect("checked when parsing")))
                .collect(),
        ),
        None => ("point".to_string(), vec![(0.0, cfg.channel.clone())]),
    };
    let results = parallel::try_map(&points, Execution::Parallel, |(v, model)| {
        model.validate()?;
        measure_one(spec, cfg, model).map(|m| (*v, m))
    })?;
    let mut table = Table::new(&[param.as_str(), "value", "opt_x", "opt_y", "opt_z", "intervals"]);
    let mut best: Option<(f64, f64)> = None;
    for (v, m) in &results {
        let opt = m.optimizer.first().map_or([f64::NAN; 3], |s| s.vector());
        table.push(vec![
            Cell::Num(*v),
            Cell::Num(m.value),
            Cell::Num(opt[0]),
            Cell::Num(opt[1]),
            Cell::Num(opt[2]),
            Cell::Text(intervals_text(&m.intervals)),
        ]);
        if best.is_none_or(|(_, b)| m.value > b) {
            best = Some((*v, m.value));
        }
    }
    let summary = match best {
        None => format!("{}: empty sweep", spec.kind.tag()),
        Some((v, b)) if spec.sweep.is_some() => {
            format!("{}: {} points, maximum {b:.6} at {param} = {v}", spec.kind.tag(), results.len())
        }
        Some((_, b)) => format!("{} = {b:.6}", spec.kind.tag()),
    };
    Ok((table, summary))
}

pub fn measure(cfg: &ScenarioConfig, dir: &Path) -> CliResult<Outcome> {
    let (table, summary) = measure_table(cfg)?;
    write_outputs(dir, cfg, table, summary, false)
}

fn non_markovian(model: &ChannelModel) -> bool {
    matches!(model.family(), Family::NmAd | Family::NmPd)
}

/// `[t_c, W*, ΔE, ΔU_π]` at the adiabatic time, NaN when none exists.
fn work_balance(model: &ChannelModel, r0: &BlochState, times: &[f64]) -> qthermo::Result<[f64; 4]> {
    let tc = adiabatic_time_tc(model, r0, times)?;
    let t = if non_markovian(model) { tc.last() } else { tc.first() };
    match t {
        None => Ok([f64::NAN; 4]),
        Some(t) => {
            let w = env_work_identities(model, r0, t)?;
            Ok([t, w.w_star, w.delta_e, w.delta_u_pi])
        }
    }
}

fn events_table(cfg: &ScenarioConfig, spec: &EventSpec) -> CliResult<(Table, String)> {
    let model = &cfg.channel;
    let r0 = cfg.init.bloch()?;
    let field = model.field_at(0.0);
    match spec.kind {
        EventKind::SuddenDeath => {
            let u0 = internal_energy(&r0, &field);
            let horizon = cfg.time.horizon.is_finite().then_some(cfg.time.horizon);
            let sd = sudden_death_times(model, u0, horizon)?;
            let mut table = Table::new(&["event", "t", "value"]);
            for &t in &sd.roots {
                table.push(vec!["crossing".into(), t.into(), f64::NAN.into()]);
            }
            table.push(vec!["t_sd".into(), sd.t_sd.unwrap_or(f64::NAN).into(), sd.horizon.into()]);
            let summary = match sd.t_sd {
                Some(t) => format!(
                    "t_sd = {t:.6} (U0 = {u0}, {} crossings, horizon {})",
                    sd.roots.len(),
                    sd.horizon
                ),
                None => format!("no sudden death (U0 = {u0}, horizon {})", sd.horizon),
            };
            Ok((table, summary))
        }
        EventKind::AdiabaticTime => {
            let times = finite_times(cfg, "adiabatic-time")?;
            let [t, w, de, du] = work_balance(model, &r0, &times)?;
            let mut table = Table::new(&["event", "t", "value"]);
            let summary = if t.is_nan() {
                format!("no adiabatic time within t ≤ {}", cfg.time.horizon)
            } else {
                table.push(vec!["W_star".into(), t.into(), w.into()]);
                table.push(vec!["dE".into(), t.into(), de.into()]);
                table.push(vec!["dU_pi".into(), t.into(), du.into()]);
                format!("t_c = {t:.6}: W* = {w:.6e}, dE = {de:.6e}, dU_pi = {du:.6e}")
            };
            Ok((table, summary))
        }
        EventKind::Freezing => {
            let times = finite_times(cfg, "freezing")?;
            let traj = model.trajectory(&r0, &times)?;
            let mut table = Table::new(&["t", "E"]);
            let e0 = ergotropy_of(&traj.states[0], &traj.fields[0]).total;
            let mut dev = 0.0f64;
            for i in 0..traj.len() {
                let e = ergotropy_of(&traj.states[i], &traj.fields[i]).total;
                dev = dev.max((e - e0).abs());
                table.push(vec![traj.times[i].into(), e.into()]);
            }
            let summary = if dev < 1e-12 {
                format!("frozen at E = {e0:.1}, max deviation < 1e-12 (observed {dev:.3e})")
            } else {
                format!("not frozen: E moves by up to {dev:.3e} from E(0) = {e0}")
            };
            Ok((table, summary))
        }
        EventKind::WorkMap => {
            let times = finite_times(cfg, "work-map")?;
            let rs = linspace(0.0, 1.0, spec.points);
            let thetas = linspace(0.0, std::f64::consts::PI, spec.points);
            let idx = ["t_c", "W_star", "dE", "dU_pi"]
                .iter()
                .position(|v| *v == spec.value)
                .expect("checked when parsing");
            let grid: Vec<(usize, usize)> = (0..rs.len()).flat_map(|i| (0..thetas.len()).map(move |j| (i, j))).collect();
            let values = parallel::try_map(&grid, Execution::Parallel, |&(i, j)| {
                let st = BlochState::from_spherical(rs[i], thetas[j], 0.0)?;
                work_balance(model, &st, &times).map(|b| b[idx])
            })?;
            let names: Vec<String> = thetas.iter().map(|th| format!("theta={th:.4}")).collect();
            let mut header = vec!["r0"];
            header.extend(names.iter().map(String::as_str));
            let mut table = Table::new(&header);
            for (i, &r) in rs.iter().enumerate() {
                let mut row = vec![Cell::Num(r)];
                row.extend((0..thetas.len()).map(|j| Cell::Num(values[i * thetas.len() + j])));
                table.push(row);
            }
            let found = values.iter().filter(|v| !v.is_nan()).count();
            let summary = format!("{} on a {}x{} grid: defined at {found} points", spec.value, rs.len(), thetas.len());
            Ok((table, summary))
        }
        EventKind::WorkScan => {
            let times = finite_times(cfg, "work-scan")?;
            let (r_fixed, th_fixed) = match cfg.init {
                InitialState::Spherical { r0, theta0, .. } => (r0, theta0),
                InitialState::Cartesian { .. } => {
                    return Err(CliError::usage("work-scan needs a spherical initial state"))
                }
            };
            let coords = linspace(0.0, spec.scan_max, spec.points);
            let rows = parallel::try_map(&coords, Execution::Parallel, |&c| {
                let st = match spec.scan {
                    ScanAxis::R0 => BlochState::from_spherical(c, th_fixed, 0.0)?,
                    ScanAxis::Theta0 => BlochState::from_spherical(r_fixed, c, 0.0)?,
                };
                work_balance(model, &st, &times)
            })?;
            let mut table = Table::new(&[spec.scan.tag(), "t_c", "W_star", "dE", "dU_pi"]);
            for (c, b) in coords.iter().zip(&rows) {
                let mut row = vec![Cell::Num(*c)];
                row.extend(b.iter().map(|v| Cell::Num(*v)));
                table.push(row);
            }
            let summary = format!("work balance along {} at {} points", spec.scan.tag(), coords.len());
            Ok((table, summary))
        }
    }
}

pub fn events(cfg: &ScenarioConfig, dir: &Path) -> CliResult<Outcome> {
    let spec = cfg
        .events
        .as_ref()
        .ok_or_else(|| CliError::usage("events needs an `events.kind` in the config"))?;
    let (table, summary) = events_table(cfg, spec)?;
    write_outputs(dir, cfg, table, summary, true)
}

/// Renders `columns` of `csv` into `svg`; nothing is written on failure.
pub fn plot(csv: &Path, columns: &[String], svg: &Path) -> CliResult<()> {
    let table = Table::read(csv)?;
    let doc = plot::render(&table, columns)?;
    std::fs::write(svg, doc).map_err(|e| CliError::io(svg, e))
}
