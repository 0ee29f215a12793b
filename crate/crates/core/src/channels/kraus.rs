use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::BlochState;

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn real(a: f64, b: f64, c: f64, d: f64) -> Mat2 {
    [
        [Complex64::new(a, 0.0), Complex64::new(b, 0.0)],
        [Complex64::new(c, 0.0), Complex64::new(d, 0.0)],
    ]
}

pub(crate) fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut o = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    o
}

pub(crate) fn dagger(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::validation(format!("{name} = {p} outside [0, 1]")))
    }
}

/// Kraus decomposition of a qubit channel at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    pub ops: Vec<Mat2>,
    pub t: f64,
}

impl KrausSet {
    pub fn identity() -> Self {
        Self {
            ops: vec![real(1.0, 0.0, 0.0, 1.0)],
            t: 0.0,
        }
    }

    /// Decay toward `z = +1` with probability `p`.
    pub fn amplitude_damping(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        Ok(Self {
            ops: vec![
                real(1.0, 0.0, 0.0, (1.0 - p).sqrt()),
                real(0.0, p.sqrt(), 0.0, 0.0),
            ],
            t: 0.0,
        })
    }

    /// Finite-temperature damping of strength `a`; `p` weights the decay
    /// toward `z = +1` against excitation toward `z = -1`.
    pub fn generalized_amplitude_damping(p: f64, a: f64) -> Result<Self> {
        check_probability("p", p)?;
        check_probability("a", a)?;
        let (sp, sq) = (p.sqrt(), (1.0 - p).sqrt());
        let (sa, sb) = (a.sqrt(), (1.0 - a).sqrt());
        Ok(Self {
            ops: vec![
                real(sp, 0.0, 0.0, sp * sb),
                real(0.0, sp * sa, 0.0, 0.0),
                real(sq * sb, 0.0, 0.0, sq),
                real(0.0, 0.0, sq * sa, 0.0),
            ],
            t: 0.0,
        })
    }

    /// Dephasing that scales the transverse Bloch components by `1 - 2p`.
    pub fn phase_damping(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        Ok(Self {
            ops: vec![
                real((1.0 - p).sqrt(), 0.0, 0.0, (1.0 - p).sqrt()),
                real(p.sqrt(), 0.0, 0.0, -p.sqrt()),
            ],
            t: 0.0,
        })
    }

    /// Dephasing written through its transverse attenuation `λ ∈ [0, 1]`.
    pub fn dephasing_with_attenuation(lambda: f64) -> Result<Self> {
        check_probability("attenuation", lambda)?;
        Self::phase_damping(0.5 * (1.0 - lambda))
    }

    pub fn at(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    /// Largest entry of `|Σ K†K − I|`.
    pub fn completeness_error(&self) -> f64 {
        let mut acc = [[ZERO; 2]; 2];
        for k in &self.ops {
            let p = mul(&dagger(k), k);
            for i in 0..2 {
                for j in 0..2 {
                    acc[i][j] += p[i][j];
                }
            }
        }
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let id = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc[i][j] - id).norm());
            }
        }
        worst
    }
}

/// `Σ K ρ K†`, renormalized to unit trace.
pub fn apply_kraus(k: &KrausSet, state: &BlochState) -> Result<BlochState> {
    let err = k.completeness_error();
    if err > 1e-8 {
        return Err(Error::validation(format!(
            "Kraus set violates completeness by {err:e}"
        )));
    }
    let rho = state.density_matrix();
    let mut out = [[ZERO; 2]; 2];
    for op in &k.ops {
        let term = mul(&mul(op, &rho), &dagger(op));
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += term[i][j];
            }
        }
    }
    BlochState::from_density_matrix(&out)
}
