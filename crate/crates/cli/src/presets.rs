//! Fixed scenarios behind the figure presets. Each preset is one or more
//! runs written in the config format, so `qthermo preset <id>` and
//! `qthermo <command> --config` share a single code path.

use std::path::{Path, PathBuf};

use qthermo::numerics::linspace;

use crate::commands::{self, Outcome};
use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Measure,
    Events,
}

impl Command {
    pub fn run(self, cfg: &ScenarioConfig, dir: &Path) -> CliResult<Outcome> {
        match self {
            Command::Simulate => commands::simulate(cfg, dir),
            Command::Measure => commands::measure(cfg, dir),
            Command::Events => commands::events(cfg, dir),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PresetRun {
    pub command: Command,
    pub config: ScenarioConfig,
    /// Columns drawn into the SVG; empty for report-only runs.
    pub columns: Vec<String>,
}

pub const PRESET_IDS: [&str; 12] = [
    "fig4-heat-coherence",
    "fig4-dephasing-Q",
    "fig4-NQ-NC-sweep",
    "fig5-PD-freezing",
    "fig5-AD-suddendeath",
    "fig5-tc-map",
    "fig5-dUpi-map",
    "fig5-mixedfamily",
    "fig5-purefamily",
    "fig6-GAD-temps",
    "fig6-PDM-heats",
    "fig6-NM-sweep",
];

fn run(command: Command, text: &str, columns: &[&str]) -> PresetRun {
    PresetRun {
        command,
        config: text.parse().unwrap_or_else(|e| panic!("preset config is invalid: {e}\n{text}")),
        columns: columns.iter().map(|c| c.to_string()).collect(),
    }
}

fn ohmic_sweep(name: &str, kind: &str, init: &str) -> PresetRun {
    let text = format!(
        "channel.family = OHMIC-PD\nchannel.s = 3.2\nchannel.omega_c = 1\nchannel.omega0 = 1\n{init}\n\
         time.horizon = inf\ntime.points = 512\nmeasure.kind = {kind}\nmeasure.sweep = s\n\
         measure.start = 0.5\nmeasure.stop = 6\nmeasure.step = 0.1\nmeasure.samples = 0\n\
         output.name = {name}\n"
    );
    run(Command::Measure, &text, &["value"])
}

fn work_runs(id: &str, scan: &str, fixed: &str, scan_max: &str) -> Vec<PresetRun> {
    let cols = ["W_star", "dE", "dU_pi"];
    let se = format!(
        "channel.family = SPONT-EMISSION\nchannel.gamma = 1\nchannel.omega0 = 1\n{fixed}\n\
         time.horizon = 20\ntime.points = 2001\nevents.kind = work-scan\nevents.scan = {scan}\n\
         events.scan_max = {scan_max}\nevents.points = 51\noutput.name = {id}-markov\n"
    );
    let nm = format!(
        "channel.family = NM-AD\nchannel.gamma = 1\nchannel.width = 0.01\nchannel.omega0 = 1\n{fixed}\n\
         time.horizon = 100\ntime.points = 2001\nevents.kind = work-scan\nevents.scan = {scan}\n\
         events.scan_max = {scan_max}\nevents.points = 51\noutput.name = {id}-nm\n"
    );
    vec![run(Command::Events, &se, &cols), run(Command::Events, &nm, &cols)]
}

fn work_map(id: &str, value: &str) -> Vec<PresetRun> {
    let text = format!(
        "channel.family = SPONT-EMISSION\nchannel.gamma = 1\nchannel.omega0 = 1\n\
         init.r0 = 1\ninit.theta0 = 0\ninit.phi0 = 0\ntime.horizon = 20\ntime.points = 2001\n\
         events.kind = work-map\nevents.value = {value}\nevents.points = 50\noutput.name = {id}\n"
    );
    let mut r = run(Command::Events, &text, &[]);
    // a handful of θ₀ slices through the map
    let thetas = linspace(0.0, std::f64::consts::PI, 50);
    r.columns = [0usize, 12, 24, 37, 49].iter().map(|&j| format!("theta={:.4}", thetas[j])).collect();
    vec![r]
}

pub fn preset(id: &str) -> Option<Vec<PresetRun>> {
    let x_z = "init.x = 0.5\ninit.y = 0\ninit.z = -0.5";
    Some(match id {
        "fig4-heat-coherence" => vec![run(
            Command::Simulate,
            "channel.family = BITFLIP-DISS\nchannel.gamma = 0.1\nchannel.omega0 = 1\n\
             init.x = 0.5\ninit.y = 0\ninit.z = 0.5\ntime.horizon = 60\ntime.points = 1201\n\
             output.name = fig4-heat-coherence\n",
            &["Q_stand", "C"],
        )],
        "fig4-dephasing-Q" => ["1.5", "3.5"]
            .iter()
            .map(|s| {
                // r₀ = 1 with z₀ = 0.05
                let text = format!(
                    "channel.family = OHMIC-PD\nchannel.s = {s}\nchannel.omega_c = 1\nchannel.omega0 = 1\n\
                     init.x = 0.998749217771909\ninit.y = 0\ninit.z = 0.05\ntime.horizon = 10\n\
                     time.points = 1001\noutput.name = fig4-dephasing-Q-s{s}\n"
                );
                run(Command::Simulate, &text, &["Q_entro"])
            })
            .collect(),
        "fig4-NQ-NC-sweep" => vec![
            ohmic_sweep("fig4-NQ-NC-sweep-NQ_entro", "NQ_entro", "init.x = 1\ninit.y = 0\ninit.z = 0"),
            ohmic_sweep("fig4-NQ-NC-sweep-NC", "NC", "init.x = 1\ninit.y = 0\ninit.z = 0"),
        ],
        "fig5-PD-freezing" => vec![
            run(
                Command::Simulate,
                &format!(
                    "channel.family = NM-PD\nchannel.gamma = 1\nchannel.width = 0.01\nchannel.omega0 = 1\n\
                     {x_z}\ntime.horizon = 50\ntime.points = 2001\noutput.name = fig5-PD-freezing-nm\n"
                ),
                &["E", "E_I", "E_C"],
            ),
            run(
                Command::Simulate,
                &format!(
                    "channel.family = PD\nchannel.gamma = 1\nchannel.omega0 = 1\n\
                     {x_z}\ntime.horizon = 50\ntime.points = 2001\noutput.name = fig5-PD-freezing-markov\n"
                ),
                &["E", "E_I", "E_C"],
            ),
            run(
                Command::Events,
                "channel.family = NM-PD\nchannel.gamma = 1\nchannel.width = 0.01\nchannel.omega0 = 1\n\
                 init.x = 0\ninit.y = 0\ninit.z = -0.5\ntime.horizon = 50\ntime.points = 2001\n\
                 events.kind = freezing\noutput.name = fig5-PD-freezing-events\n",
                &["E"],
            ),
        ],
        "fig5-AD-suddendeath" => vec![
            run(
                Command::Simulate,
                &format!(
                    "channel.family = NM-AD\nchannel.gamma = 1\nchannel.width = 0.001\nchannel.omega0 = 1\n\
                     {x_z}\ntime.horizon = 350\ntime.points = 3501\noutput.name = fig5-AD-suddendeath-nm\n"
                ),
                &["E", "E_I", "E_C"],
            ),
            run(
                Command::Simulate,
                &format!(
                    "channel.family = AD\nchannel.gamma = 1\nchannel.omega0 = 1\n\
                     {x_z}\ntime.horizon = 5\ntime.points = 1001\noutput.name = fig5-AD-suddendeath-markov\n"
                ),
                &["E", "E_I", "E_C"],
            ),
            run(
                Command::Events,
                &format!(
                    "channel.family = NM-AD\nchannel.gamma = 1\nchannel.width = 0.001\nchannel.omega0 = 1\n\
                     {x_z}\ntime.horizon = inf\nevents.kind = sudden-death\n\
                     output.name = fig5-AD-suddendeath-events\n"
                ),
                &[],
            ),
        ],
        "fig5-tc-map" => work_map("fig5-tc-map", "t_c"),
        "fig5-dUpi-map" => work_map("fig5-dUpi-map", "dU_pi"),
        "fig5-mixedfamily" => work_runs(
            "fig5-mixedfamily",
            "r0",
            "init.r0 = 1\ninit.theta0 = pi/2\ninit.phi0 = 0",
            "1",
        ),
        "fig5-purefamily" => work_runs(
            "fig5-purefamily",
            "theta0",
            "init.r0 = 1\ninit.theta0 = 0\ninit.phi0 = 0",
            "pi/2",
        ),
        "fig6-GAD-temps" => [("minus", "-0.8"), ("plus", "0.8")]
            .iter()
            .map(|(tag, z)| {
                let text = format!(
                    "channel.family = GAD-MASTER\nchannel.gamma0 = 1\nchannel.temperature = 10\nchannel.omega0 = 1\n\
                     init.x = 0.45\ninit.y = 0\ninit.z = {z}\ntime.horizon = 5\ntime.points = 1001\n\
                     output.name = fig6-GAD-temps-{tag}\n"
                );
                run(Command::Simulate, &text, &["T_stand", "T_entro", "T_ergo"])
            })
            .collect(),
        "fig6-PDM-heats" => vec![run(
            Command::Simulate,
            "channel.family = PD-TIMEDEP\nchannel.gamma = 1\nchannel.omega0 = 1\nchannel.omega = 1\n\
             init.x = 0.5\ninit.y = 0.7\ninit.z = 0\ntime.horizon = 10\ntime.points = 1001\n\
             output.name = fig6-PDM-heats\n",
            &["Q_ergo", "Q_op", "Q_entro", "Q_stand"],
        )],
        "fig6-NM-sweep" => {
            let eq = "init.x = 1\ninit.y = 0\ninit.z = 0";
            let mut runs = vec![
                ohmic_sweep("fig6-NM-sweep-NQ_ergo", "NQ_ergo", eq),
                ohmic_sweep("fig6-NM-sweep-NQ_entro", "NQ_entro", eq),
                ohmic_sweep("fig6-NM-sweep-NQ_stand", "NQ_stand", "init.x = 0.6\ninit.y = 0\ninit.z = 0.8"),
            ];
            for s in ["2", "3.2"] {
                let text = format!(
                    "channel.family = OHMIC-PD\nchannel.s = {s}\nchannel.omega_c = 1\nchannel.omega0 = 1\n\
                     init.r0 = 0.8\ninit.theta0 = pi/2\ninit.phi0 = 0\ntime.horizon = 10\n\
                     time.points = 1001\noutput.name = fig6-NM-sweep-Tergo-s{s}\n"
                );
                runs.push(run(Command::Simulate, &text, &["T_ergo"]));
            }
            runs
        }
        _ => return None,
    })
}

/// Files written by every run of a preset, CSV first.
pub fn run_preset(id: &str, dir: &Path) -> CliResult<Vec<(Outcome, Option<PathBuf>)>> {
    let runs = preset(id)
        .ok_or_else(|| CliError::usage(format!("unknown preset `{id}` (known: {})", PRESET_IDS.join(", "))))?;
    let mut out = Vec::new();
    for r in runs {
        let outcome = r.command.run(&r.config, dir)?;
        let svg = if r.columns.is_empty() {
            None
        } else {
            let path = dir.join(format!("{}.svg", r.config.name));
            commands::plot(&outcome.files[0], &r.columns, &path)?;
            Some(path)
        };
        out.push((outcome, svg));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses_and_round_trips() {
        for id in PRESET_IDS {
            let runs = preset(id).unwrap();
            assert!(!runs.is_empty());
            assert!(runs.iter().any(|r| !r.columns.is_empty()), "{id} draws nothing");
            for r in runs {
                let again: ScenarioConfig = r.config.to_text().parse().unwrap();
                assert_eq!(again, r.config);
            }
        }
        assert!(preset("fig7").is_none());
    }
}
