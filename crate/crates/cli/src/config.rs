//! Scenario files: one `key = value` per line, dotted keys, `#` comments.
//!
//! ```text
//! # dephasing of an equatorial state
//! channel.family = PD
//! channel.gamma = 0.7
//! channel.omega0 = 1
//! init.r0 = 1
//! init.theta0 = pi/2
//! init.phi0 = 0
//! time.horizon = 10
//! time.points = 1001
//! ```
//!
//! Numbers are decimal floats, `inf`, `-inf`, `nan`, `pi` or `pi/<number>`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use qthermo::channels::Family;
use qthermo::nonmarkov::SignalKind;
use qthermo::{BlochState, ChannelModel};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Spherical { r0: f64, theta0: f64, phi0: f64 },
    Cartesian { x: f64, y: f64, z: f64 },
}

impl InitialState {
    pub fn bloch(&self) -> qthermo::Result<BlochState> {
        match *self {
            InitialState::Spherical { r0, theta0, phi0 } => BlochState::from_spherical(r0, theta0, phi0),
            InitialState::Cartesian { x, y, z } => BlochState::new(x, y, z),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    pub horizon: f64,
    pub points: usize,
    /// Convergence tolerance of the ledger refinement.
    pub tol: f64,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            horizon: 10.0,
            points: 1001,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Nd,
    Nc,
    NqEntro,
    NqErgo,
    NqStand,
    NfCustom,
}

impl MeasureKind {
    const ALL: [MeasureKind; 6] = [
        MeasureKind::Nd,
        MeasureKind::Nc,
        MeasureKind::NqEntro,
        MeasureKind::NqErgo,
        MeasureKind::NqStand,
        MeasureKind::NfCustom,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            MeasureKind::Nd => "ND",
            MeasureKind::Nc => "NC",
            MeasureKind::NqEntro => "NQ_entro",
            MeasureKind::NqErgo => "NQ_ergo",
            MeasureKind::NqStand => "NQ_stand",
            MeasureKind::NfCustom => "NF-custom",
        }
    }

    fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }
}

/// A channel parameter swept over `start, start + step, …` up to `stop`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if !(self.step > 0.0) || self.stop < self.start {
            return Vec::new();
        }
        // integer stepping keeps the grid free of accumulated round-off
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + k as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    /// Signal of the custom measure.
    pub signal: Option<SignalKind>,
    pub sweep: Option<Sweep>,
    /// Random initial states (pairs for ND) added to the search.
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    SuddenDeath,
    AdiabaticTime,
    Freezing,
    /// `t_c` and the work balance over the `(r₀, θ₀)` square.
    WorkMap,
    /// The work balance along `r₀` or `θ₀` with the other coordinate fixed.
    WorkScan,
}

impl EventKind {
    const ALL: [EventKind; 5] = [
        EventKind::SuddenDeath,
        EventKind::AdiabaticTime,
        EventKind::Freezing,
        EventKind::WorkMap,
        EventKind::WorkScan,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            EventKind::SuddenDeath => "sudden-death",
            EventKind::AdiabaticTime => "adiabatic-time",
            EventKind::Freezing => "freezing",
            EventKind::WorkMap => "work-map",
            EventKind::WorkScan => "work-scan",
        }
    }

    fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanAxis {
    R0,
    Theta0,
}

impl ScanAxis {
    pub fn tag(self) -> &'static str {
        match self {
            ScanAxis::R0 => "r0",
            ScanAxis::Theta0 => "theta0",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventSpec {
    pub kind: EventKind,
    pub scan: ScanAxis,
    /// Upper end of the scanned coordinate; maps always cover
    /// `r₀ ∈ [0, 1]`, `θ₀ ∈ [0, π]`.
    pub scan_max: f64,
    /// Grid points per scanned coordinate.
    pub points: usize,
    /// Map quantity: `t_c`, `W_star`, `dE` or `dU_pi`.
    pub value: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub channel: ChannelModel,
    pub init: InitialState,
    pub time: TimeGrid,
    pub measure: Option<MeasureSpec>,
    pub events: Option<EventSpec>,
    /// File stem of every output.
    pub name: String,
}

/// Parameter names of a family, in file order.
pub fn param_names(family: Family) -> &'static [&'static str] {
    match family {
        Family::Ad | Family::Pd | Family::BitflipDiss | Family::SpontEmission => &["gamma", "omega0"],
        Family::Gad => &["gamma", "p", "omega0"],
        Family::NmPd | Family::NmAd => &["gamma", "width", "omega0"],
        Family::OhmicPd => &["s", "omega_c", "omega0"],
        Family::GadMaster => &["gamma0", "temperature", "omega0"],
        Family::PdTimedep => &["gamma", "omega0", "omega"],
    }
}

const SECTION_KEYS: [&str; 24] = [
    "channel.family",
    "init.r0",
    "init.theta0",
    "init.phi0",
    "init.x",
    "init.y",
    "init.z",
    "time.horizon",
    "time.points",
    "time.tol",
    "measure.kind",
    "measure.signal",
    "measure.sweep",
    "measure.start",
    "measure.stop",
    "measure.step",
    "measure.samples",
    "measure.seed",
    "events.kind",
    "events.scan",
    "events.scan_max",
    "events.points",
    "events.value",
    "output.name",
];

fn is_known_key(key: &str) -> bool {
    SECTION_KEYS.contains(&key)
        || key
            .strip_prefix("channel.")
            .is_some_and(|p| Family::ALL.iter().any(|f| param_names(*f).contains(&p)))
}

pub fn params_of(m: &ChannelModel) -> Vec<f64> {
    use ChannelModel::*;
    match *m {
        AmplitudeDamping { gamma, omega0 }
        | PhaseDamping { gamma, omega0 }
        | BitflipDissipative { gamma, omega0 }
        | SpontaneousEmission { gamma, omega0 } => vec![gamma, omega0],
        GeneralizedAmplitudeDamping { gamma, p, omega0 } => vec![gamma, p, omega0],
        NmPhaseDamping { gamma, width, omega0 } | NmAmplitudeDamping { gamma, width, omega0 } => {
            vec![gamma, width, omega0]
        }
        OhmicDephasing { s, omega_c, omega0 } => vec![s, omega_c, omega0],
        GadMaster { gamma0, temperature, omega0 } => vec![gamma0, temperature, omega0],
        PdTimeDependent { gamma, omega0, omega } => vec![gamma, omega0, omega],
    }
}

pub fn model_from(family: Family, v: &[f64]) -> ChannelModel {
    use ChannelModel::*;
    match family {
        Family::Ad => AmplitudeDamping { gamma: v[0], omega0: v[1] },
        Family::Pd => PhaseDamping { gamma: v[0], omega0: v[1] },
        Family::BitflipDiss => BitflipDissipative { gamma: v[0], omega0: v[1] },
        Family::SpontEmission => SpontaneousEmission { gamma: v[0], omega0: v[1] },
        Family::Gad => GeneralizedAmplitudeDamping { gamma: v[0], p: v[1], omega0: v[2] },
        Family::NmPd => NmPhaseDamping { gamma: v[0], width: v[1], omega0: v[2] },
        Family::NmAd => NmAmplitudeDamping { gamma: v[0], width: v[1], omega0: v[2] },
        Family::OhmicPd => OhmicDephasing { s: v[0], omega_c: v[1], omega0: v[2] },
        Family::GadMaster => GadMaster { gamma0: v[0], temperature: v[1], omega0: v[2] },
        Family::PdTimedep => PdTimeDependent { gamma: v[0], omega0: v[1], omega: v[2] },
    }
}

/// `m` with one named parameter replaced.
pub fn with_param(m: &ChannelModel, name: &str, value: f64) -> Option<ChannelModel> {
    let family = m.family();
    let idx = param_names(family).iter().position(|&n| n == name)?;
    let mut v = params_of(m);
    v[idx] = value;
    Some(model_from(family, &v))
}

pub fn parse_number(raw: &str) -> Option<f64> {
    let s = raw.trim();
    match s {
        "pi" => return Some(std::f64::consts::PI),
        "inf" | "+inf" => return Some(f64::INFINITY),
        "-inf" => return Some(f64::NEG_INFINITY),
        "nan" => return Some(f64::NAN),
        _ => {}
    }
    if let Some(den) = s.strip_prefix("pi/") {
        return f64::from_str(den.trim()).ok().map(|d| std::f64::consts::PI / d);
    }
    // only plain decimal forms; the std parser would also take "infinity"
    if s.chars().all(|c| c.is_ascii_digit() || "+-.eE".contains(c)) {
        f64::from_str(s).ok()
    } else {
        None
    }
}

fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:?}")
    }
}

struct Entry {
    line: usize,
    value: String,
    used: bool,
}

struct Entries(BTreeMap<String, Entry>);

impl Entries {
    fn take_str(&mut self, key: &str) -> Option<(usize, String)> {
        self.0.get_mut(key).map(|e| {
            e.used = true;
            (e.line, e.value.clone())
        })
    }

    fn take_num(&mut self, key: &str) -> CliResult<Option<(usize, f64)>> {
        match self.take_str(key) {
            None => Ok(None),
            Some((line, raw)) => parse_number(&raw)
                .map(|v| Some((line, v)))
                .ok_or_else(|| CliError::config(line, format!("{key}: `{raw}` is not a number"))),
        }
    }

    fn num_or(&mut self, key: &str, default: f64) -> CliResult<f64> {
        Ok(self.take_num(key)?.map_or(default, |(_, v)| v))
    }

    fn count_or(&mut self, key: &str, default: usize) -> CliResult<usize> {
        match self.take_str(key) {
            None => Ok(default),
            Some((line, raw)) => raw
                .parse()
                .map_err(|_| CliError::config(line, format!("{key}: `{raw}` is not a non-negative integer"))),
        }
    }

    fn has_prefix(&self, prefix: &str) -> bool {
        self.0.keys().any(|k| k.starts_with(prefix))
    }

    fn first_line(&self, prefix: &str) -> usize {
        self.0
            .iter()
            .filter(|(k, _)| k.starts_with(prefix))
            .map(|(_, e)| e.line)
            .min()
            .unwrap_or(0)
    }
}

impl FromStr for ScenarioConfig {
    type Err = CliError;

    fn from_str(text: &str) -> CliResult<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| CliError::config(line, format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim();
            if key.is_empty() || !key.contains('.') || key.chars().any(char::is_whitespace) {
                return Err(CliError::config(line, format!("malformed key `{key}`")));
            }
            if !is_known_key(key) {
                return Err(CliError::config(line, format!("unknown key `{key}`")));
            }
            let entry = Entry {
                line,
                value: value.trim().to_string(),
                used: false,
            };
            if let Some(prev) = map.insert(key.to_string(), entry) {
                return Err(CliError::config(line, format!("duplicate key `{key}` (first on line {})", prev.line)));
            }
        }
        let mut e = Entries(map);
        let cfg = parse_entries(&mut e)?;
        if let Some((k, v)) = e.0.iter().find(|(_, v)| !v.used) {
            return Err(CliError::config(v.line, format!("unknown key `{k}`")));
        }
        Ok(cfg)
    }
}

fn parse_entries(e: &mut Entries) -> CliResult<ScenarioConfig> {
    let (fline, tag) = e
        .take_str("channel.family")
        .ok_or_else(|| CliError::config(0, "missing key `channel.family`"))?;
    let family = Family::from_tag(&tag).ok_or_else(|| {
        let known: Vec<_> = Family::ALL.iter().map(|f| f.tag()).collect();
        CliError::config(fline, format!("unknown family `{tag}` (known: {})", known.join(", ")))
    })?;
    let mut values = Vec::new();
    for name in param_names(family) {
        let key = format!("channel.{name}");
        let (_, v) = e
            .take_num(&key)?
            .ok_or_else(|| CliError::config(fline, format!("family {tag} needs `{key}`")))?;
        values.push(v);
    }
    let channel = model_from(family, &values);
    channel
        .validate()
        .map_err(|err| CliError::config(fline, err.to_string()))?;

    let spherical = ["init.r0", "init.theta0", "init.phi0"];
    let cartesian = ["init.x", "init.y", "init.z"];
    let has = |e: &Entries, keys: &[&str]| keys.iter().any(|k| e.0.contains_key(*k));
    let init = match (has(e, &spherical), has(e, &cartesian)) {
        (true, true) => {
            return Err(CliError::config(
                e.first_line("init."),
                "initial state mixes spherical and Cartesian keys",
            ))
        }
        (false, false) => return Err(CliError::config(0, "missing initial state (`init.r0` … or `init.x` …)")),
        (true, false) => InitialState::Spherical {
            r0: e.num_or("init.r0", 0.0)?,
            theta0: e.num_or("init.theta0", 0.0)?,
            phi0: e.num_or("init.phi0", 0.0)?,
        },
        (false, true) => InitialState::Cartesian {
            x: e.num_or("init.x", 0.0)?,
            y: e.num_or("init.y", 0.0)?,
            z: e.num_or("init.z", 0.0)?,
        },
    };
    init.bloch()
        .map_err(|err| CliError::config(e.first_line("init."), err.to_string()))?;

    let d = TimeGrid::default();
    let time = TimeGrid {
        horizon: e.num_or("time.horizon", d.horizon)?,
        points: e.count_or("time.points", d.points)?,
        tol: e.num_or("time.tol", d.tol)?,
    };
    if !(time.horizon > 0.0) || time.points < 2 || !(time.tol > 0.0) {
        return Err(CliError::config(
            e.first_line("time."),
            "time grid needs horizon > 0, points ≥ 2 and tol > 0",
        ));
    }

    let measure = if e.has_prefix("measure.") {
        Some(parse_measure(e, &channel)?)
    } else {
        None
    };
    let events = if e.has_prefix("events.") {
        Some(parse_events(e)?)
    } else {
        None
    };
    let name = e.take_str("output.name").map_or_else(|| "qthermo".to_string(), |(_, v)| v);
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(CliError::config(e.first_line("output.name"), "output.name must be a plain file stem"));
    }
    Ok(ScenarioConfig {
        channel,
        init,
        time,
        measure,
        events,
        name,
    })
}

fn parse_measure(e: &mut Entries, channel: &ChannelModel) -> CliResult<MeasureSpec> {
    let (line, tag) = e
        .take_str("measure.kind")
        .ok_or_else(|| CliError::config(e.first_line("measure."), "missing `measure.kind`"))?;
    let kind = MeasureKind::from_tag(&tag).ok_or_else(|| {
        let known: Vec<_> = MeasureKind::ALL.iter().map(|k| k.tag()).collect();
        CliError::config(line, format!("unknown measure `{tag}` (known: {})", known.join(", ")))
    })?;
    let signal = match e.take_str("measure.signal") {
        None => None,
        Some((l, raw)) => Some(
            SignalKind::from_tag(&raw).ok_or_else(|| CliError::config(l, format!("unknown signal `{raw}`")))?,
        ),
    };
    if kind == MeasureKind::NfCustom && signal.is_none() {
        return Err(CliError::config(line, "NF-custom needs `measure.signal`"));
    }
    let sweep = match e.take_str("measure.sweep") {
        None => None,
        Some((l, param)) => {
            if with_param(channel, &param, 0.0).is_none() {
                return Err(CliError::config(
                    l,
                    format!("`{param}` is not a parameter of {}", channel.family().tag()),
                ));
            }
            let mut need = |k: &str| -> CliResult<f64> {
                e.take_num(k)?
                    .map(|(_, v)| v)
                    .ok_or_else(|| CliError::config(l, format!("sweep needs `{k}`")))
            };
            Some(Sweep {
                param,
                start: need("measure.start")?,
                stop: need("measure.stop")?,
                step: need("measure.step")?,
            })
        }
    };
    Ok(MeasureSpec {
        kind,
        signal,
        sweep,
        samples: e.count_or("measure.samples", 32)?,
        seed: e.count_or("measure.seed", 1)? as u64,
    })
}

fn parse_events(e: &mut Entries) -> CliResult<EventSpec> {
    let (line, tag) = e
        .take_str("events.kind")
        .ok_or_else(|| CliError::config(e.first_line("events."), "missing `events.kind`"))?;
    let kind = EventKind::from_tag(&tag).ok_or_else(|| {
        let known: Vec<_> = EventKind::ALL.iter().map(|k| k.tag()).collect();
        CliError::config(line, format!("unknown event `{tag}` (known: {})", known.join(", ")))
    })?;
    let scan = match e.take_str("events.scan") {
        None => ScanAxis::R0,
        Some((_, v)) if v == "r0" => ScanAxis::R0,
        Some((_, v)) if v == "theta0" => ScanAxis::Theta0,
        Some((l, v)) => return Err(CliError::config(l, format!("events.scan must be r0 or theta0, got `{v}`"))),
    };
    let default_max = match scan {
        ScanAxis::R0 => 1.0,
        ScanAxis::Theta0 => std::f64::consts::PI,
    };
    let value = e.take_str("events.value").map_or_else(|| "t_c".to_string(), |(_, v)| v);
    if !["t_c", "W_star", "dE", "dU_pi"].contains(&value.as_str()) {
        return Err(CliError::config(e.first_line("events.value"), format!("unknown map value `{value}`")));
    }
    Ok(EventSpec {
        kind,
        scan,
        scan_max: e.num_or("events.scan_max", default_max)?,
        points: e.count_or("events.points", 50)?,
        value,
    })
}

impl ScenarioConfig {
    /// Canonical text form; parsing it gives back an equal value.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let family = self.channel.family();
        let _ = writeln!(out, "channel.family = {}", family.tag());
        for (name, v) in param_names(family).iter().zip(params_of(&self.channel)) {
            let _ = writeln!(out, "channel.{name} = {}", format_number(v));
        }
        match self.init {
            InitialState::Spherical { r0, theta0, phi0 } => {
                let _ = writeln!(out, "init.r0 = {}", format_number(r0));
                let _ = writeln!(out, "init.theta0 = {}", format_number(theta0));
                let _ = writeln!(out, "init.phi0 = {}", format_number(phi0));
            }
            InitialState::Cartesian { x, y, z } => {
                let _ = writeln!(out, "init.x = {}", format_number(x));
                let _ = writeln!(out, "init.y = {}", format_number(y));
                let _ = writeln!(out, "init.z = {}", format_number(z));
            }
        }
        let _ = writeln!(out, "time.horizon = {}", format_number(self.time.horizon));
        let _ = writeln!(out, "time.points = {}", self.time.points);
        let _ = writeln!(out, "time.tol = {}", format_number(self.time.tol));
        if let Some(m) = &self.measure {
            let _ = writeln!(out, "measure.kind = {}", m.kind.tag());
            if let Some(sig) = m.signal {
                let _ = writeln!(out, "measure.signal = {}", sig.tag());
            }
            if let Some(sw) = &m.sweep {
                let _ = writeln!(out, "measure.sweep = {}", sw.param);
                let _ = writeln!(out, "measure.start = {}", format_number(sw.start));
                let _ = writeln!(out, "measure.stop = {}", format_number(sw.stop));
                let _ = writeln!(out, "measure.step = {}", format_number(sw.step));
            }
            let _ = writeln!(out, "measure.samples = {}", m.samples);
            let _ = writeln!(out, "measure.seed = {}", m.seed);
        }
        if let Some(ev) = &self.events {
            let _ = writeln!(out, "events.kind = {}", ev.kind.tag());
            let _ = writeln!(out, "events.scan = {}", ev.scan.tag());
            let _ = writeln!(out, "events.scan_max = {}", format_number(ev.scan_max));
            let _ = writeln!(out, "events.points = {}", ev.points);
            let _ = writeln!(out, "events.value = {}", ev.value);
        }
        let _ = writeln!(out, "output.name = {}", self.name);
        out
    }

    pub fn times(&self) -> Vec<f64> {
        qthermo::numerics::linspace(0.0, self.time.horizon, self.time.points)
    }
}
