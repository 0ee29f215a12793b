use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use qthermo_cli::presets::PRESET_IDS;
use qthermo_cli::table::{parse_float, Table};
use qthermo_cli::ScenarioConfig;
use tempfile::TempDir;

fn qthermo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qthermo"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("QTHERMO_OUT")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(o: &Output) {
    assert!(o.status.success(), "exit {:?}\nstdout:\n{}\nstderr:\n{}", o.status.code(), stdout(o), stderr(o));
}

fn column(t: &Table, name: &str) -> Vec<f64> {
    t.column(name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn simulate_writes_the_full_ledger_header() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "ad.cfg",
        "channel.family = AD\nchannel.gamma = 1\nchannel.omega0 = 1\n\
         init.x = 0.5\ninit.y = 0\ninit.z = -0.5\ntime.horizon = 2\ntime.points = 21\noutput.name = ad\n",
    );
    let o = qthermo(dir.path(), &["simulate", "--config", &cfg]);
    ok(&o);
    let text = std::fs::read_to_string(dir.path().join("ad.csv")).unwrap();
    assert!(text.starts_with(
        "t,x,y,z,r,U,S,C,E,E_I,E_C,Q_stand,W_stand,Q_entro,W_entro,W_star,Q_ergo,W_ergo,Q_op,T_stand,T_entro,T_ergo\r\n"
    ));
    let t = Table::read(&dir.path().join("ad.csv")).unwrap();
    assert_eq!(t.rows.len(), 21);
    assert_eq!(column(&t, "t")[20], 2.0);
}

#[test]
fn a_stationary_state_accumulates_nothing() {
    let dir = TempDir::new().unwrap();
    // on the dephasing axis nothing moves
    let cfg = write_config(
        dir.path(),
        "pd.cfg",
        "channel.family = PD\nchannel.gamma = 1\nchannel.omega0 = 1\n\
         init.x = 0\ninit.y = 0\ninit.z = 0.6\ntime.horizon = 5\ntime.points = 51\noutput.name = pd\n",
    );
    ok(&qthermo(dir.path(), &["simulate", "--config", &cfg]));
    let t = Table::read(&dir.path().join("pd.csv")).unwrap();
    for name in ["Q_stand", "W_stand", "Q_entro", "W_entro", "Q_ergo", "W_ergo", "Q_op"] {
        assert!(column(&t, name).iter().all(|v| v.abs() < 1e-12), "{name} moved");
    }
    assert!(column(&t, "z").iter().all(|z| (z - 0.6).abs() < 1e-15));
}

#[test]
fn horizon_and_grid_flags_override_the_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "se.cfg",
        "channel.family = SPONT-EMISSION\nchannel.gamma = 1\nchannel.omega0 = 1\n\
         init.r0 = 1\ninit.theta0 = pi/3\ninit.phi0 = 0\noutput.name = se\n",
    );
    ok(&qthermo(dir.path(), &["simulate", "--config", &cfg, "--horizon", "3", "--grid", "7"]));
    let t = Table::read(&dir.path().join("se.csv")).unwrap();
    assert_eq!(column(&t, "t"), vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]);
    let o = qthermo(dir.path(), &["simulate", "--config", &cfg, "--grid", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_text_round_trips() {
    let text = "channel.family = OHMIC-PD\nchannel.s = 3.2\nchannel.omega_c = 1\nchannel.omega0 = 1\n\
                # equatorial\ninit.r0 = 1\ninit.theta0 = pi/2\ninit.phi0 = 0\ntime.horizon = inf\n\
                measure.kind = NQ_ergo\nmeasure.sweep = s\nmeasure.start = 1\nmeasure.stop = 2\nmeasure.step = 0.5\n";
    let cfg: ScenarioConfig = text.parse().unwrap();
    let again: ScenarioConfig = cfg.to_text().parse().unwrap();
    assert_eq!(cfg, again);
    assert_eq!(again.to_text(), cfg.to_text());
}

#[test]
fn malformed_config_exits_one_with_the_line() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.cfg",
        "channel.family = AD\nchannel.gamma = 1\nchannel.omega0 = 1\ninit.x = 0.5\ninit.y = 0\ninit.z = zero\n",
    );
    let o = qthermo(dir.path(), &["simulate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 6"), "{}", stderr(&o));
    assert!(!dir.path().join("qthermo.csv").exists());

    let cfg = write_config(dir.path(), "typo.cfg", "channel.family = AD\nchanel.gamma = 1\n");
    let o = qthermo(dir.path(), &["simulate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn unsupported_witness_exits_three() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "w.cfg",
        "channel.family = AD\nchannel.gamma = 1\nchannel.omega0 = 1\n\
         init.x = 1\ninit.y = 0\ninit.z = 0\ntime.horizon = 5\nmeasure.kind = NQ_entro\n",
    );
    let o = qthermo(dir.path(), &["measure", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn unreachable_tolerance_exits_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "n.cfg",
        "channel.family = OHMIC-PD\nchannel.s = 3.2\nchannel.omega_c = 1\nchannel.omega0 = 1\n\
         init.x = 1\ninit.y = 0\ninit.z = 0\ntime.horizon = 5\ntime.points = 11\ntime.tol = 1e-300\n",
    );
    let o = qthermo(dir.path(), &["simulate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn amplitude_damping_sudden_death() {
    let dir = TempDir::new().unwrap();
    let base = "channel.family = AD\nchannel.gamma = 1\nchannel.omega0 = 1\ninit.x = 0\ninit.y = 0\n\
                time.horizon = inf\nevents.kind = sudden-death\noutput.name = sd\n";
    // U₀ = 0.5: E_I = 0 once 1 − e^{−t} reaches 1/3, at t = ln 1.5
    let cfg = write_config(dir.path(), "sd.cfg", &format!("{base}init.z = -0.5\n"));
    let o = qthermo(dir.path(), &["events", "--config", &cfg]);
    ok(&o);
    assert!(stdout(&o).contains(&format!("t_sd = {:.6}", 1.5f64.ln())), "{}", stdout(&o));
    let t = Table::read(&dir.path().join("sd.csv")).unwrap();
    let last = t.rows.last().unwrap();
    let t_sd = parse_float(match &last[1] {
        qthermo_cli::table::Cell::Text(s) => s,
        _ => unreachable!(),
    })
    .unwrap();
    assert!((t_sd - 1.5f64.ln()).abs() < 1e-6);
    assert!(dir.path().join("sd.txt").exists());

    let cfg = write_config(dir.path(), "nosd.cfg", &format!("{base}init.z = 0.2\n"));
    let o = qthermo(dir.path(), &["events", "--config", &cfg]);
    ok(&o);
    assert!(stdout(&o).contains("no sudden death"), "{}", stdout(&o));
}

#[test]
fn pure_dephasing_freezes_the_ergotropy() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "f.cfg",
        "channel.family = NM-PD\nchannel.gamma = 1\nchannel.width = 0.01\nchannel.omega0 = 1\n\
         init.x = 0\ninit.y = 0\ninit.z = -0.5\ntime.horizon = 50\ntime.points = 501\n\
         events.kind = freezing\noutput.name = f\n",
    );
    let o = qthermo(dir.path(), &["events", "--config", &cfg]);
    ok(&o);
    assert!(stdout(&o).contains("frozen at E = 1.0"), "{}", stdout(&o));
}

#[test]
fn ergotropy_measure_peaks_near_s_3_2() {
    let dir = TempDir::new().unwrap();
    let sweep = |start: &str, stop: &str| {
        format!(
            "channel.family = OHMIC-PD\nchannel.s = 3\nchannel.omega_c = 1\nchannel.omega0 = 1\n\
             init.x = 1\ninit.y = 0\ninit.z = 0\ntime.horizon = inf\nmeasure.kind = NQ_ergo\n\
             measure.sweep = s\nmeasure.start = {start}\nmeasure.stop = {stop}\nmeasure.step = 0.1\n\
             measure.samples = 0\noutput.name = nq\n"
        )
    };
    let cfg = write_config(dir.path(), "nq.cfg", &sweep("2.5", "4"));
    ok(&qthermo(dir.path(), &["measure", "--config", &cfg]));
    let t = Table::read(&dir.path().join("nq.csv")).unwrap();
    let s = column(&t, "s");
    let v = column(&t, "value");
    let (i, _) = v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    assert!((s[i] - 3.2).abs() < 1e-9, "peak at s = {}", s[i]);
    assert!((v[i] - 0.0315).abs() < 5e-4);

    let cfg = write_config(dir.path(), "empty.cfg", &sweep("4", "2"));
    let o = qthermo(dir.path(), &["measure", "--config", &cfg]);
    ok(&o);
    let text = std::fs::read_to_string(dir.path().join("nq.csv")).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(stdout(&o).contains("empty sweep"));
}

#[test]
fn plot_rejects_bad_input_without_writing() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "t,E\r\n").unwrap();
    let svg = dir.path().join("empty.svg");
    let o = qthermo(
        dir.path(),
        &["plot", empty.to_str().unwrap(), "--columns", "E", "--output", svg.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(!svg.exists());

    let data = dir.path().join("data.csv");
    std::fs::write(&data, "t,E\r\n0,1\r\n1,2\r\n").unwrap();
    let o = qthermo(dir.path(), &["plot", data.to_str().unwrap(), "--columns", "E,F"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown column `F`"));
    assert!(!dir.path().join("data.svg").exists());

    ok(&qthermo(dir.path(), &["plot", data.to_str().unwrap(), "--columns", "E"]));
    let svg = std::fs::read_to_string(dir.path().join("data.svg")).unwrap();
    assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn environment_variable_wins_over_out_flag() {
    let flag = TempDir::new().unwrap();
    let env = TempDir::new().unwrap();
    let cfg = write_config(
        flag.path(),
        "ad.cfg",
        "channel.family = AD\nchannel.gamma = 1\nchannel.omega0 = 1\n\
         init.x = 0\ninit.y = 0\ninit.z = 1\ntime.horizon = 1\ntime.points = 3\noutput.name = ad\n",
    );
    let o = Command::new(env!("CARGO_BIN_EXE_qthermo"))
        .args(["simulate", "--config", &cfg, "--out"])
        .arg(flag.path())
        .env("QTHERMO_OUT", env.path())
        .output()
        .unwrap();
    ok(&o);
    assert!(env.path().join("ad.csv").exists());
    assert!(!flag.path().join("ad.csv").exists());
}

#[test]
fn preset_list_and_unknown_preset() {
    let dir = TempDir::new().unwrap();
    let o = qthermo(dir.path(), &["preset", "list"]);
    ok(&o);
    assert_eq!(stdout(&o).lines().collect::<Vec<_>>(), PRESET_IDS.to_vec());
    let o = qthermo(dir.path(), &["preset", "fig9"]);
    assert_eq!(o.status.code(), Some(1));
    let o = qthermo(dir.path(), &["preset", "fig4-heat-coherence", "--grid", "10"]);
    assert_eq!(o.status.code(), Some(1));
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn every_preset_runs_quickly_and_reproducibly() {
    for id in PRESET_IDS {
        let a = TempDir::new().unwrap();
        let start = Instant::now();
        ok(&qthermo(a.path(), &["preset", id]));
        assert!(start.elapsed() < Duration::from_secs(60), "{id} took {:?}", start.elapsed());
        let files = listing(a.path());
        assert!(files.iter().any(|(n, _)| n.ends_with(".csv")), "{id}: no CSV");
        assert!(files.iter().any(|(n, _)| n.ends_with(".svg")), "{id}: no SVG");
        let b = TempDir::new().unwrap();
        ok(&qthermo(b.path(), &["preset", id]));
        assert!(files == listing(b.path()), "{id}: outputs differ between runs");
    }
}

#[test]
fn dephasing_drive_heat_signatures() {
    let dir = TempDir::new().unwrap();
    ok(&qthermo(dir.path(), &["preset", "fig6-PDM-heats"]));
    let t = Table::read(&dir.path().join("fig6-PDM-heats.csv")).unwrap();
    assert!(column(&t, "Q_stand").iter().all(|q| q.abs() < 1e-12));
    let q = column(&t, "Q_ergo");
    assert!(q[q.len() - 1] > 0.0);
    assert!(q.windows(2).all(|w| w[1] >= w[0] - 1e-12));
}

#[test]
fn non_markovian_damping_revives_the_incoherent_part() {
    let dir = TempDir::new().unwrap();
    ok(&qthermo(dir.path(), &["preset", "fig5-AD-suddendeath"]));
    let t = Table::read(&dir.path().join("fig5-AD-suddendeath-nm.csv")).unwrap();
    let e_i = column(&t, "E_I");
    let mut zero_runs = 0;
    let mut in_zero = false;
    for v in &e_i {
        let z = v.abs() < 1e-12;
        if z && !in_zero {
            zero_runs += 1;
        }
        in_zero = z;
    }
    assert!(zero_runs >= 2, "E_I touches zero in {zero_runs} intervals");
    let report = std::fs::read_to_string(dir.path().join("fig5-AD-suddendeath-events.txt")).unwrap();
    assert!(report.starts_with("t_sd = 296.71"), "{report}");
}
