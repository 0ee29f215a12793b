//! Channel families, their Kraus sets and trajectory generators.

pub mod closed_form;
pub mod kraus;
pub mod ohmic;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{bisect, dormand_prince, linspace, Tolerances};
use crate::state::{BlochState, Field3};

pub use closed_form::{bloch_solution_bitflip, bloch_solution_pd_timedep, bloch_solution_spont_emission};
pub use kraus::{apply_kraus, KrausSet};
pub use ohmic::{critical_times, dephasing_attenuation, integrated_rate, integrated_rate_on_grid, ohmic_rate};

/// Family tags, in the order used by configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Ad,
    Gad,
    Pd,
    NmPd,
    NmAd,
    BitflipDiss,
    SpontEmission,
    OhmicPd,
    GadMaster,
    PdTimedep,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::Ad,
        Family::Gad,
        Family::Pd,
        Family::NmPd,
        Family::NmAd,
        Family::BitflipDiss,
        Family::SpontEmission,
        Family::OhmicPd,
        Family::GadMaster,
        Family::PdTimedep,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::Ad => "AD",
            Family::Gad => "GAD",
            Family::Pd => "PD",
            Family::NmPd => "NM-PD",
            Family::NmAd => "NM-AD",
            Family::BitflipDiss => "BITFLIP-DISS",
            Family::SpontEmission => "SPONT-EMISSION",
            Family::OhmicPd => "OHMIC-PD",
            Family::GadMaster => "GAD-MASTER",
            Family::PdTimedep => "PD-TIMEDEP",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.tag() == tag)
    }
}

/// A channel family together with its parameters.
///
/// Kraus families (AD, GAD, PD and their non-Markovian versions) carry a
/// constant field `(0, 0, ω₀)`, so `z = +1` is the ground state toward
/// which damping relaxes.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    /// Damping probability `p(t) = 1 − e^{−γt}`.
    AmplitudeDamping { gamma: f64, omega0: f64 },
    /// Damping strength `a(t) = 1 − e^{−γt}` at fixed population weight `p`.
    GeneralizedAmplitudeDamping { gamma: f64, p: f64, omega0: f64 },
    /// Transverse attenuation `e^{−γt/2}`.
    PhaseDamping { gamma: f64, omega0: f64 },
    /// Dephasing with reservoir correlation time `1/width`.
    NmPhaseDamping { gamma: f64, width: f64, omega0: f64 },
    /// Damping into a Lorentzian reservoir of spectral width `width`.
    NmAmplitudeDamping { gamma: f64, width: f64, omega0: f64 },
    BitflipDissipative { gamma: f64, omega0: f64 },
    SpontaneousEmission { gamma: f64, omega0: f64 },
    /// Pure dephasing with the Ohmic-like rate, in the interaction picture.
    OhmicDephasing { s: f64, omega_c: f64, omega0: f64 },
    /// Thermalizing master equation at bath temperature `temperature`.
    GadMaster { gamma0: f64, temperature: f64, omega0: f64 },
    PdTimeDependent { gamma: f64, omega0: f64, omega: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(format!("{name} must be positive, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(format!("{name} must be non-negative, got {v}")))
    }
}

/// `q(t) = (γ/2)(t + (e^{−Γt} − 1)/Γ)`, the accumulated dephasing exponent.
pub fn nm_pd_exponent(gamma: f64, width: f64, t: f64) -> f64 {
    // expm1 keeps the Γt ≪ 1 regime accurate
    0.5 * gamma * (t + (-width * t).exp_m1() / width)
}

/// Excited-state amplitude `c(t)` of damping into a Lorentzian reservoir
/// and its derivative; `d = sqrt(2γΓ − Γ²)` turns imaginary for `Γ > 2γ`.
pub fn nm_ad_amplitude(gamma: f64, width: f64, t: f64) -> (f64, f64) {
    let d = Complex64::new(2.0 * gamma * width - width * width, 0.0).sqrt();
    if d.norm() < 1e-12 * width.max(gamma) {
        let e = (-0.5 * width * t).exp();
        return (e * (1.0 + 0.5 * width * t), -0.25 * width * width * t * e);
    }
    // e^{−Γt/2}(cos(dt/2) + Γ/d sin(dt/2)) written with decaying exponentials
    let id = Complex64::i() * d;
    let g = width / id;
    let (lp, lm) = (0.5 * (id - width), 0.5 * (-id - width));
    let (ep, em) = ((lp * t).exp(), (lm * t).exp());
    let c = 0.5 * ((1.0 + g) * ep + (1.0 - g) * em);
    let dc = 0.5 * ((1.0 + g) * lp * ep + (1.0 - g) * lm * em);
    (c.re, dc.re)
}

/// Excited-population survival `q(t) = c(t)²`.
pub fn nm_ad_survival(gamma: f64, width: f64, t: f64) -> f64 {
    let (c, _) = nm_ad_amplitude(gamma, width, t);
    (c * c).clamp(0.0, 1.0)
}

/// Bose occupation `1/(e^{ω₀/T} − 1)`.
pub fn bose_occupation(omega0: f64, temperature: f64) -> f64 {
    1.0 / (omega0 / temperature).exp_m1()
}

impl ChannelModel {
    pub fn family(&self) -> Family {
        match self {
            ChannelModel::AmplitudeDamping { .. } => Family::Ad,
            ChannelModel::GeneralizedAmplitudeDamping { .. } => Family::Gad,
            ChannelModel::PhaseDamping { .. } => Family::Pd,
            ChannelModel::NmPhaseDamping { .. } => Family::NmPd,
            ChannelModel::NmAmplitudeDamping { .. } => Family::NmAd,
            ChannelModel::BitflipDissipative { .. } => Family::BitflipDiss,
            ChannelModel::SpontaneousEmission { .. } => Family::SpontEmission,
            ChannelModel::OhmicDephasing { .. } => Family::OhmicPd,
            ChannelModel::GadMaster { .. } => Family::GadMaster,
            ChannelModel::PdTimeDependent { .. } => Family::PdTimedep,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelModel::AmplitudeDamping { gamma, omega0 }
            | ChannelModel::PhaseDamping { gamma, omega0 }
            | ChannelModel::BitflipDissipative { gamma, omega0 }
            | ChannelModel::SpontaneousEmission { gamma, omega0 } => {
                positive("gamma", gamma)?;
                positive("omega0", omega0)
            }
            ChannelModel::GeneralizedAmplitudeDamping { gamma, p, omega0 } => {
                positive("gamma", gamma)?;
                positive("omega0", omega0)?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::validation(format!("p = {p} outside [0, 1]")));
                }
                Ok(())
            }
            ChannelModel::NmPhaseDamping { gamma, width, omega0 }
            | ChannelModel::NmAmplitudeDamping { gamma, width, omega0 } => {
                positive("gamma", gamma)?;
                positive("width", width)?;
                positive("omega0", omega0)
            }
            ChannelModel::OhmicDephasing { s, omega_c, omega0 } => {
                non_negative("s", s)?;
                positive("omega_c", omega_c)?;
                positive("omega0", omega0)
            }
            ChannelModel::GadMaster { gamma0, temperature, omega0 } => {
                positive("gamma0", gamma0)?;
                positive("temperature", temperature)?;
                positive("omega0", omega0)
            }
            ChannelModel::PdTimeDependent { gamma, omega0, omega } => {
                non_negative("gamma", gamma)?;
                positive("omega0", omega0)?;
                positive("omega", omega)
            }
        }
    }

    /// The field `h(t)` of `H(t) = −h(t)·σ`.
    pub fn field_at(&self, t: f64) -> Field3 {
        match *self {
            ChannelModel::AmplitudeDamping { omega0, .. }
            | ChannelModel::GeneralizedAmplitudeDamping { omega0, .. }
            | ChannelModel::PhaseDamping { omega0, .. }
            | ChannelModel::NmPhaseDamping { omega0, .. }
            | ChannelModel::NmAmplitudeDamping { omega0, .. }
            | ChannelModel::SpontaneousEmission { omega0, .. } => Field3::along_z(omega0),
            ChannelModel::BitflipDissipative { omega0, .. }
            | ChannelModel::OhmicDephasing { omega0, .. } => Field3::along_z(-omega0),
            ChannelModel::GadMaster { omega0, .. } => Field3::along_z(-0.5 * omega0),
            ChannelModel::PdTimeDependent { omega0, omega, .. } => {
                Field3::along_z(-0.5 * omega0 * (1.0 - (omega * t).cos()))
            }
        }
    }

    /// Whether the field is constant in time.
    pub fn static_field(&self) -> bool {
        !matches!(self, ChannelModel::PdTimeDependent { .. })
    }

    /// Transverse attenuation of the dephasing families.
    pub fn coherence_factor(&self, t: f64) -> Result<f64> {
        match *self {
            ChannelModel::PhaseDamping { gamma, .. } => Ok((-0.5 * gamma * t).exp()),
            ChannelModel::NmPhaseDamping { gamma, width, .. } => {
                Ok((-nm_pd_exponent(gamma, width, t)).exp())
            }
            ChannelModel::OhmicDephasing { s, omega_c, .. } => {
                Ok((-2.0 * integrated_rate(t, s, omega_c)?).exp())
            }
            _ => Err(Error::validation(format!(
                "{} is not a pure-dephasing family",
                self.family().tag()
            ))),
        }
    }

    /// Kraus set of the map from time 0 to `t`.
    pub fn build_kraus(&self, t: f64) -> Result<KrausSet> {
        self.validate()?;
        if !(t >= 0.0) {
            return Err(Error::validation(format!("time {t} must be non-negative")));
        }
        let set = match *self {
            ChannelModel::AmplitudeDamping { gamma, .. } => {
                KrausSet::amplitude_damping(-(-gamma * t).exp_m1())?
            }
            ChannelModel::GeneralizedAmplitudeDamping { gamma, p, .. } => {
                KrausSet::generalized_amplitude_damping(p, -(-gamma * t).exp_m1())?
            }
            ChannelModel::PhaseDamping { .. }
            | ChannelModel::NmPhaseDamping { .. }
            | ChannelModel::OhmicDephasing { .. } => {
                KrausSet::dephasing_with_attenuation(self.coherence_factor(t)?)?
            }
            ChannelModel::NmAmplitudeDamping { gamma, width, .. } => {
                KrausSet::amplitude_damping(1.0 - nm_ad_survival(gamma, width, t))?
            }
            _ => {
                return Err(Error::validation(format!(
                    "{} is generated by a master equation, not a Kraus family",
                    self.family().tag()
                )))
            }
        };
        Ok(set.at(t))
    }

    /// State at time `t` from `r0`.
    pub fn evolve(&self, r0: &BlochState, t: f64) -> Result<BlochState> {
        match *self {
            ChannelModel::BitflipDissipative { gamma, omega0 } => {
                bloch_solution_bitflip(gamma, omega0, r0, t)
            }
            ChannelModel::SpontaneousEmission { gamma, omega0 } => {
                bloch_solution_spont_emission(gamma, omega0, r0, t)
            }
            ChannelModel::PdTimeDependent { gamma, omega0, omega } => {
                bloch_solution_pd_timedep(omega0, omega, gamma, r0, t)
            }
            ChannelModel::GadMaster { .. } => {
                let traj = self.trajectory(r0, &[0.0, t])?;
                Ok(traj.states[1])
            }
            _ => apply_kraus(&self.build_kraus(t)?, r0),
        }
    }

    /// States and fields on an ascending grid of times.
    pub fn trajectory(&self, r0: &BlochState, times: &[f64]) -> Result<Trajectory> {
        self.validate()?;
        check_grid(times)?;
        let states = match *self {
            ChannelModel::GadMaster { gamma0, temperature, omega0 } => {
                integrate_gad_master(r0, omega0, gamma0, temperature, times)?
            }
            ChannelModel::OhmicDephasing { s, omega_c, .. } => ohmic::integrated_rate_on_grid(times, s, omega_c)?
                .into_iter()
                .map(|i| apply_kraus(&KrausSet::dephasing_with_attenuation((-2.0 * i).exp())?, r0))
                .collect::<Result<Vec<_>>>()?,
            _ => times
                .iter()
                .map(|&t| self.evolve(r0, t))
                .collect::<Result<Vec<_>>>()?,
        };
        let fields = times.iter().map(|&t| self.field_at(t)).collect();
        Ok(Trajectory {
            times: times.to_vec(),
            states,
            fields,
            channel: self.clone(),
        })
    }

    /// State at `t` together with its time derivative.
    pub fn bloch_velocity(&self, r0: &BlochState, t: f64) -> Result<(BlochState, [f64; 3])> {
        let st = self.evolve(r0, t)?;
        if t.is_infinite() {
            return Ok((st, [0.0; 3]));
        }
        let [x, y, z] = st.vector();
        let [x0, y0, z0] = r0.vector();
        let v = match *self {
            ChannelModel::PhaseDamping { .. }
            | ChannelModel::NmPhaseDamping { .. }
            | ChannelModel::OhmicDephasing { .. } => {
                let k = match *self {
                    ChannelModel::PhaseDamping { gamma, .. } => 0.5 * gamma,
                    ChannelModel::NmPhaseDamping { gamma, width, .. } => {
                        -0.5 * gamma * (-width * t).exp_m1()
                    }
                    ChannelModel::OhmicDephasing { s, omega_c, .. } => 2.0 * ohmic_rate(t, s, omega_c),
                    _ => unreachable!(),
                };
                [-k * x, -k * y, 0.0]
            }
            ChannelModel::AmplitudeDamping { gamma, .. } => {
                [-0.5 * gamma * x, -0.5 * gamma * y, gamma * (1.0 - z)]
            }
            ChannelModel::GeneralizedAmplitudeDamping { gamma, p, .. } => {
                [-0.5 * gamma * x, -0.5 * gamma * y, -gamma * (z - (2.0 * p - 1.0))]
            }
            ChannelModel::NmAmplitudeDamping { gamma, width, .. } => {
                let (c, dc) = nm_ad_amplitude(gamma, width, t);
                // x = |c| x₀ and z = 1 − c²(1 − z₀)
                let dabs = c.signum() * dc;
                [dabs * x0, dabs * y0, -2.0 * c * dc * (1.0 - z0)]
            }
            ChannelModel::BitflipDissipative { gamma, omega0 } => {
                [-2.0 * omega0 * y, 2.0 * omega0 * x - 2.0 * gamma * y, -2.0 * gamma * z]
            }
            ChannelModel::SpontaneousEmission { gamma, omega0 } => [
                2.0 * omega0 * y - 0.5 * gamma * x,
                -2.0 * omega0 * x - 0.5 * gamma * y,
                gamma * (1.0 - z),
            ],
            ChannelModel::PdTimeDependent { gamma, .. } => {
                let hz = self.field_at(t).hz;
                [2.0 * hz * y - 2.0 * gamma * x, -2.0 * hz * x - 2.0 * gamma * y, 0.0]
            }
            ChannelModel::GadMaster { gamma0, temperature, omega0 } => {
                gad_master_rhs(omega0, gamma0, temperature)(t, &[x, y, z])
            }
        };
        Ok((st, v))
    }

    /// Fixed point of the Markovian families, where one exists.
    pub fn fixed_point(&self) -> Option<BlochState> {
        match *self {
            ChannelModel::AmplitudeDamping { .. } | ChannelModel::SpontaneousEmission { .. } => {
                BlochState::new(0.0, 0.0, 1.0).ok()
            }
            ChannelModel::GeneralizedAmplitudeDamping { p, .. } => {
                BlochState::new(0.0, 0.0, 2.0 * p - 1.0).ok()
            }
            ChannelModel::PhaseDamping { .. } | ChannelModel::BitflipDissipative { .. } => {
                Some(BlochState::MAXIMALLY_MIXED)
            }
            ChannelModel::GadMaster { temperature, omega0, .. } => {
                crate::state::thermal_state(&Field3::along_z(-0.5 * omega0), 1.0 / temperature).ok()
            }
            _ => None,
        }
    }
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.len() < 2 {
        return Err(Error::validation("a trajectory needs at least two times"));
    }
    if times[0] < 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::validation("trajectory times must be non-negative and strictly increasing"));
    }
    Ok(())
}

/// Sampled evolution: times, states and fields on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<BlochState>,
    pub fields: Vec<Field3>,
    pub channel: ChannelModel,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Bloch-form right-hand side of the thermalizing master equation with
/// `H = (ω₀/2)σz`, emission rate `γ₀(N+1)` and absorption rate `γ₀N`.
pub fn gad_master_rhs(omega0: f64, gamma0: f64, temperature: f64) -> impl Fn(f64, &[f64; 3]) -> [f64; 3] {
    let n = bose_occupation(omega0, temperature);
    let total = gamma0 * (2.0 * n + 1.0);
    move |_, r| {
        [
            -omega0 * r[1] - 0.5 * total * r[0],
            omega0 * r[0] - 0.5 * total * r[1],
            -total * r[2] - gamma0,
        ]
    }
}

/// Adaptive Runge–Kutta integration of the thermalizing master equation.
pub fn integrate_gad_master(
    r0: &BlochState,
    omega0: f64,
    gamma0: f64,
    temperature: f64,
    times: &[f64],
) -> Result<Vec<BlochState>> {
    let rhs = gad_master_rhs(omega0, gamma0, temperature);
    let ys = dormand_prince(rhs, r0.vector(), times, Tolerances::default())?;
    ys.into_iter().map(BlochState::from_vector).collect()
}

/// Death and revival times of the incoherent ergotropy.
#[derive(Debug, Clone, PartialEq)]
pub struct SuddenDeath {
    /// All crossings of `q(t) = 1/(1+U₀)`, ascending.
    pub roots: Vec<f64>,
    /// Last crossing inside the horizon; `None` when no death occurs.
    pub t_sd: Option<f64>,
    pub horizon: f64,
}

pub const SUDDEN_DEATH_SAMPLES: usize = 10_000;

/// Crossings of the excited-population survival through `1/(1+U₀)`.
pub fn sudden_death_times(model: &ChannelModel, u0: f64, horizon: Option<f64>) -> Result<SuddenDeath> {
    model.validate()?;
    let (survival, gamma): (Box<dyn Fn(f64) -> f64>, f64) = match *model {
        ChannelModel::AmplitudeDamping { gamma, .. }
        | ChannelModel::SpontaneousEmission { gamma, .. } => {
            (Box::new(move |t: f64| (-gamma * t).exp()), gamma)
        }
        ChannelModel::NmAmplitudeDamping { gamma, width, .. } => {
            (Box::new(move |t| nm_ad_survival(gamma, width, t)), gamma)
        }
        _ => {
            return Err(Error::validation(format!(
                "sudden death is defined for amplitude damping, not {}",
                model.family().tag()
            )))
        }
    };
    let horizon = horizon.unwrap_or(1e3 / gamma);
    if !(horizon > 0.0) {
        return Err(Error::validation(format!("horizon {horizon} must be positive")));
    }
    if u0 <= 0.0 {
        return Ok(SuddenDeath {
            roots: Vec::new(),
            t_sd: None,
            horizon,
        });
    }
    let level = 1.0 / (1.0 + u0);
    let g = |t: f64| survival(t) - level;
    let grid = linspace(0.0, horizon, SUDDEN_DEATH_SAMPLES);
    let mut roots = Vec::new();
    let mut prev = g(grid[0]);
    for w in grid.windows(2) {
        let next = g(w[1]);
        if prev.signum() != next.signum() && next != 0.0 {
            roots.push(bisect(g, w[0], w[1], 1e-9)?);
        } else if next == 0.0 {
            roots.push(w[1]);
        }
        prev = next;
    }
    Ok(SuddenDeath {
        t_sd: roots.last().copied(),
        roots,
        horizon,
    })
}
