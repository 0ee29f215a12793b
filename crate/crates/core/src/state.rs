//! Qubit states as Bloch vectors, fields, and spectral bookkeeping for
//! passive states and ergotropy.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Radius slack absorbed as round-off before a state is rejected.
pub const RADIUS_SLACK: f64 = 1e-12;

/// A qubit density operator `ρ = (I + r·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochState {
    pub const MAXIMALLY_MIXED: BlochState = BlochState {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Validates `r ≤ 1 + 1e-12`; radii in the slack band are pulled back
    /// onto the sphere.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::validation(format!(
                "non-finite Bloch vector ({x}, {y}, {z})"
            )));
        }
        let r = (x * x + y * y + z * z).sqrt();
        if r > 1.0 + RADIUS_SLACK {
            return Err(Error::validation(format!(
                "Bloch radius {r} exceeds 1"
            )));
        }
        if r > 1.0 {
            return Ok(Self {
                x: x / r,
                y: y / r,
                z: z / r,
            });
        }
        Ok(Self { x, y, z })
    }

    /// Spherical parameterization with polar angle `theta` from +z.
    pub fn from_spherical(r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0 + RADIUS_SLACK).contains(&r) {
            return Err(Error::validation(format!("radius {r} outside [0, 1]")));
        }
        Self::new(
            r * theta.sin() * phi.cos(),
            r * theta.sin() * phi.sin(),
            r * theta.cos(),
        )
    }

    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn vector(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn radius(&self) -> f64 {
        purity_radius(self)
    }

    /// Eigenvalues `(1+r)/2 ≥ (1-r)/2`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let r = self.radius();
        (0.5 * (1.0 + r), 0.5 * (1.0 - r))
    }

    pub fn density_matrix(&self) -> [[Complex64; 2]; 2] {
        let half = 0.5;
        [
            [
                Complex64::new(half * (1.0 + self.z), 0.0),
                Complex64::new(half * self.x, -half * self.y),
            ],
            [
                Complex64::new(half * self.x, half * self.y),
                Complex64::new(half * (1.0 - self.z), 0.0),
            ],
        ]
    }

    /// Reads the Bloch vector of a 2×2 matrix after dividing by its trace.
    pub fn from_density_matrix(m: &[[Complex64; 2]; 2]) -> Result<Self> {
        let tr = (m[0][0] + m[1][1]).re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::numerical(format!("density matrix trace {tr}")));
        }
        let x = (m[0][1].re + m[1][0].re) / tr;
        let y = (m[1][0].im - m[0][1].im) / tr;
        let z = (m[0][0].re - m[1][1].re) / tr;
        Self::new(x, y, z)
    }
}

/// Control field `h` of `H = -h·σ`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Field3 {
    pub hx: f64,
    pub hy: f64,
    pub hz: f64,
}

impl Field3 {
    pub const fn new(hx: f64, hy: f64, hz: f64) -> Self {
        Self { hx, hy, hz }
    }

    pub const fn along_z(hz: f64) -> Self {
        Self::new(0.0, 0.0, hz)
    }

    pub fn vector(&self) -> [f64; 3] {
        [self.hx, self.hy, self.hz]
    }

    pub fn magnitude(&self) -> f64 {
        norm(self.vector())
    }

    /// Unit vector `ĥ`, or `None` for a vanishing field.
    pub fn unit(&self) -> Option<[f64; 3]> {
        let h = self.magnitude();
        (h > 0.0).then(|| scale(self.vector(), 1.0 / h))
    }

    pub fn dot(&self, s: &BlochState) -> f64 {
        dot(self.vector(), s.vector())
    }
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn scale(a: [f64; 3], c: f64) -> [f64; 3] {
    [a[0] * c, a[1] * c, a[2] * c]
}

pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Bloch radius, clamped to `[0, 1]`.
pub fn purity_radius(state: &BlochState) -> f64 {
    norm(state.vector()).min(1.0)
}

fn xlnx(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.ln()
    }
}

/// Binary entropy of the eigenvalues `(1±r)/2`, in nats.
pub fn entropy_of_radius(r: f64) -> f64 {
    let r = r.clamp(0.0, 1.0);
    -(xlnx(0.5 * (1.0 + r)) + xlnx(0.5 * (1.0 - r)))
}

pub fn von_neumann_entropy(state: &BlochState) -> f64 {
    entropy_of_radius(state.radius())
}

/// l1 coherence in the eigenbasis of `H = -h·σ`: the Bloch component
/// transverse to `ĥ`.
pub fn coherence_l1(state: &BlochState, field: &Field3) -> Result<f64> {
    let u = field
        .unit()
        .ok_or_else(|| Error::validation("coherence needs a non-zero field to fix the energy basis"))?;
    Ok(norm(cross(state.vector(), u)).min(1.0))
}

pub fn trace_distance(a: &BlochState, b: &BlochState) -> f64 {
    0.5 * norm(sub(a.vector(), b.vector()))
}

/// Quantum relative entropy `S(a‖b)` in nats. Returns `f64::INFINITY` when
/// the support of `a` is not contained in that of `b`.
pub fn relative_entropy_qubit(a: &BlochState, b: &BlochState) -> f64 {
    let rb = b.radius();
    if rb >= 1.0 {
        return if norm(sub(a.vector(), b.vector())) <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let (lp, lm) = b.eigenvalues();
    let mean_log = 0.5 * (lp.ln() + lm.ln());
    let aligned = if rb > 0.0 {
        rb.atanh() * dot(a.vector(), b.vector()) / rb
    } else {
        0.0
    };
    let cross_term = mean_log + aligned;
    (-von_neumann_entropy(a) - cross_term).max(0.0)
}

/// Gibbs state `r = tanh(β h) ĥ`; `beta` may be `f64::INFINITY`.
pub fn thermal_state(field: &Field3, beta: f64) -> Result<BlochState> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::validation(format!("inverse temperature {beta}")));
    }
    match field.unit() {
        None if beta.is_infinite() => Err(Error::validation(
            "zero field at zero temperature has a degenerate ground state",
        )),
        None => Ok(BlochState::MAXIMALLY_MIXED),
        Some(u) => {
            let r = if beta == 0.0 {
                0.0
            } else {
                (beta * field.magnitude()).tanh()
            };
            BlochState::from_vector(scale(u, r))
        }
    }
}

/// Populations sorted descending against energies sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPair {
    probs: Vec<f64>,
    energies: Vec<f64>,
}

impl SpectralPair {
    /// Sorts both lists (stable, so ties keep input order) and validates
    /// the probability vector.
    pub fn new(mut probs: Vec<f64>, mut energies: Vec<f64>) -> Result<Self> {
        if probs.len() != energies.len() || probs.len() < 2 {
            return Err(Error::validation(format!(
                "spectral pair needs matching lengths ≥ 2, got {} and {}",
                probs.len(),
                energies.len()
            )));
        }
        if probs.iter().any(|p| !(-1e-12..=1.0 + 1e-12).contains(p)) {
            return Err(Error::validation("probabilities must lie in [0, 1]"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::validation(format!(
                "probabilities sum to {total}"
            )));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::validation("energies must be finite"));
        }
        probs.sort_by(|a, b| b.total_cmp(a));
        energies.sort_by(f64::total_cmp);
        Ok(Self { probs, energies })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn dimension(&self) -> usize {
        self.probs.len()
    }

    /// Spectrum of a qubit state in the eigenbasis of `H = -h·σ`, whose
    /// levels are `∓h`.
    pub fn of_qubit(state: &BlochState, field: &Field3) -> Result<Self> {
        let (p, q) = state.eigenvalues();
        let h = field.magnitude();
        Self::new(vec![p, q], vec![-h, h])
    }
}

/// The passive assignment and its energy `Σ p_k ε_k`.
pub fn passive_state(sp: &SpectralPair) -> (SpectralPair, f64) {
    let energy = sp
        .probs
        .iter()
        .zip(&sp.energies)
        .map(|(p, e)| p * e)
        .sum();
    (sp.clone(), energy)
}

/// Ergotropy `E = tr[ρH] − E_passive`.
pub fn ergotropy_general(sp: &SpectralPair, actual_energy: f64) -> Result<f64> {
    let (_, passive) = passive_state(sp);
    let e = actual_energy - passive;
    if e < -1e-12 {
        return Err(Error::numerical(format!(
            "actual energy {actual_energy} lies below the passive energy {passive}"
        )));
    }
    Ok(e.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn s(x: f64, y: f64, z: f64) -> BlochState {
        BlochState::new(x, y, z).unwrap()
    }

    #[test]
    fn radius_examples() {
        assert_eq!(purity_radius(&s(0.0, 0.0, 0.0)), 0.0);
        assert_eq!(purity_radius(&s(1.0, 0.0, 0.0)), 1.0);
        assert_abs_diff_eq!(
            purity_radius(&s(0.45, 0.0, 0.80)),
            (0.45f64.powi(2) + 0.64).sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn slack_band_renormalizes_and_beyond_rejects() {
        let st = s(1.0 + 5e-13, 0.0, 0.0);
        assert_eq!(st.radius(), 1.0);
        assert_eq!(st.x(), 1.0);
        assert!(BlochState::new(1.0 + 1e-9, 0.0, 0.0).is_err());
        assert!(BlochState::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(von_neumann_entropy(&s(0.0, 0.0, 1.0)), 0.0);
        assert_abs_diff_eq!(von_neumann_entropy(&s(0.0, 0.0, 0.0)), 2f64.ln(), epsilon = 1e-15);
        let want = -0.9 * 0.9f64.ln() - 0.1 * 0.1f64.ln();
        assert_abs_diff_eq!(von_neumann_entropy(&s(0.8, 0.0, 0.0)), want, epsilon = 1e-14);
    }

    #[test]
    fn coherence_examples() {
        let f = Field3::along_z(1.0);
        assert_eq!(coherence_l1(&s(0.0, 0.0, 0.5), &f).unwrap(), 0.0);
        assert_abs_diff_eq!(coherence_l1(&s(0.5, 0.0, 0.0), &f).unwrap(), 0.5);
        assert_abs_diff_eq!(coherence_l1(&s(0.3, 0.4, 0.5), &f).unwrap(), 0.5, epsilon = 1e-15);
        assert!(coherence_l1(&s(0.3, 0.4, 0.5), &Field3::default()).is_err());
    }

    #[test]
    fn coherence_matches_offdiagonal_in_rotated_basis() {
        // field along x: energy basis is |±⟩, coherence is the y–z part
        let f = Field3::new(-2.0, 0.0, 0.0);
        let c = coherence_l1(&s(0.1, 0.2, 0.3), &f).unwrap();
        assert_abs_diff_eq!(c, (0.04f64 + 0.09).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn trace_distance_examples() {
        let a = s(0.5, 0.0, 0.0);
        assert_eq!(trace_distance(&a, &a), 0.0);
        assert_eq!(trace_distance(&s(1.0, 0.0, 0.0), &s(-1.0, 0.0, 0.0)), 1.0);
        assert_abs_diff_eq!(
            trace_distance(&a, &s(0.0, 0.0, 0.5)),
            0.5f64.sqrt() / 2.0,
            epsilon = 1e-15
        );
    }

    /// Relative entropy from explicit eigendecompositions of both matrices.
    fn relative_entropy_brute(a: &BlochState, b: &BlochState) -> f64 {
        let eig = |st: &BlochState| {
            let r = st.radius();
            let n = if r > 0.0 { scale(st.vector(), 1.0 / r) } else { [0.0, 0.0, 1.0] };
            [(0.5 * (1.0 + r), n), (0.5 * (1.0 - r), scale(n, -1.0))]
        };
        let ea = eig(a);
        let eb = eig(b);
        let mut total = 0.0;
        for (pa, na) in ea {
            if pa <= 0.0 {
                continue;
            }
            total += pa * pa.ln();
            for (pb, nb) in eb {
                // |⟨a_i|b_j⟩|² for Bloch directions na, nb
                let overlap = 0.5 * (1.0 + dot(na, nb));
                total -= pa * overlap * pb.ln();
            }
        }
        total
    }

    #[test]
    fn relative_entropy_examples() {
        let a = s(0.0, 0.0, 0.3);
        assert_abs_diff_eq!(relative_entropy_qubit(&a, &a), 0.0, epsilon = 1e-15);
        assert_eq!(
            relative_entropy_qubit(&s(0.0, 0.0, 1.0), &s(0.0, 0.0, -1.0)),
            f64::INFINITY
        );
        let v = relative_entropy_qubit(&s(0.0, 0.0, 0.5), &BlochState::MAXIMALLY_MIXED);
        assert_abs_diff_eq!(v, relative_entropy_brute(&s(0.0, 0.0, 0.5), &BlochState::MAXIMALLY_MIXED), epsilon = 1e-14);
        assert_abs_diff_eq!(v, 0.13081203594113694, epsilon = 1e-12);
        let (a, b) = (s(0.3, -0.2, 0.5), s(-0.1, 0.4, 0.2));
        assert_abs_diff_eq!(relative_entropy_qubit(&a, &b), relative_entropy_brute(&a, &b), epsilon = 1e-14);
    }

    #[test]
    fn thermal_state_examples() {
        let f = Field3::along_z(-0.5);
        assert_eq!(thermal_state(&f, 0.0).unwrap(), BlochState::MAXIMALLY_MIXED);
        assert_eq!(thermal_state(&f, f64::INFINITY).unwrap(), s(0.0, 0.0, -1.0));
        let th = thermal_state(&Field3::along_z(1.0), 0.05).unwrap();
        assert_abs_diff_eq!(th.z(), 0.04995837495787998, epsilon = 1e-15);
        assert!(thermal_state(&Field3::default(), f64::INFINITY).is_err());
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn passive_energy_examples() {
        let sp = SpectralPair::new(vec![0.7, 0.2, 0.1], vec![1.0, 2.0, 3.0]).unwrap();
        let brute = permutations(3)
            .iter()
            .map(|p| (0..3).map(|k| sp.probs()[p[k]] * sp.energies()[k]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(passive_state(&sp).1, brute, epsilon = 1e-15);
        assert_abs_diff_eq!(brute, 1.4, epsilon = 1e-15);
        let uni = SpectralPair::new(vec![0.25; 4], vec![0.0, 1.0, 2.0, 5.0]).unwrap();
        assert_abs_diff_eq!(passive_state(&uni).1, 2.0, epsilon = 1e-15);
        let q = SpectralPair::new(vec![0.9, 0.1], vec![-1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(passive_state(&q).1, -0.8, epsilon = 1e-15);
    }

    #[test]
    fn spectral_pair_sorts_and_validates() {
        let sp = SpectralPair::new(vec![0.1, 0.9], vec![1.0, -1.0]).unwrap();
        assert_eq!(sp.probs(), &[0.9, 0.1]);
        assert_eq!(sp.energies(), &[-1.0, 1.0]);
        assert!(SpectralPair::new(vec![0.5, 0.6], vec![0.0, 1.0]).is_err());
        assert!(SpectralPair::new(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn ergotropy_examples() {
        let sp = SpectralPair::new(vec![1.0, 0.0], vec![-1.0, 1.0]).unwrap();
        assert_eq!(ergotropy_general(&sp, -1.0).unwrap(), 0.0);
        assert_eq!(ergotropy_general(&sp, 1.0).unwrap(), 2.0);
        let sp = SpectralPair::new(vec![0.6, 0.4], vec![-1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(ergotropy_general(&sp, 0.2).unwrap(), 0.4, epsilon = 1e-15);
        assert!(ergotropy_general(&sp, -0.5).is_err());
    }

    #[test]
    fn density_matrix_round_trip() {
        let st = s(0.3, -0.4, 0.5);
        let back = BlochState::from_density_matrix(&st.density_matrix()).unwrap();
        assert_abs_diff_eq!(back.x(), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(back.y(), -0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(back.z(), 0.5, epsilon = 1e-15);
    }
}
