//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use qthermo::BlochState;

pub type M2 = [[C; 2]; 2];

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);
const I: C = C::new(0.0, 1.0);

pub fn sx() -> M2 {
    [[ZERO, ONE], [ONE, ZERO]]
}
pub fn sy() -> M2 {
    [[ZERO, -I], [I, ZERO]]
}
pub fn sz() -> M2 {
    [[ONE, ZERO], [ZERO, -ONE]]
}
/// `|1⟩ → |0⟩`, toward `z = +1`.
pub fn to_up() -> M2 {
    [[ZERO, ONE], [ZERO, ZERO]]
}
/// `|0⟩ → |1⟩`, toward `z = −1`.
pub fn to_down() -> M2 {
    [[ZERO, ZERO], [ONE, ZERO]]
}

pub fn mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn add(a: &M2, b: &M2, k: C) -> M2 {
    let mut out = *a;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] += k * b[i][j];
        }
    }
    out
}

pub fn dag(a: &M2) -> M2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn scaled(a: &M2, k: f64) -> M2 {
    add(&[[ZERO; 2]; 2], a, C::new(k, 0.0))
}

pub fn rho_of(r: [f64; 3]) -> M2 {
    let h = 0.5;
    [
        [C::new(h * (1.0 + r[2]), 0.0), C::new(h * r[0], -h * r[1])],
        [C::new(h * r[0], h * r[1]), C::new(h * (1.0 - r[2]), 0.0)],
    ]
}

pub fn bloch_of(rho: &M2) -> [f64; 3] {
    [2.0 * rho[1][0].re, 2.0 * rho[1][0].im, (rho[0][0] - rho[1][1]).re]
}

/// Right-hand side of `dρ/dt = −i[H, ρ] + Σ (LρL† − ½{L†L, ρ})`.
pub fn lindblad_rhs(h: &M2, ls: &[M2], rho: &M2) -> M2 {
    let comm = add(&mul(h, rho), &mul(rho, h), -ONE);
    let mut out = scaled(&comm, 0.0);
    out = add(&out, &comm, -I);
    for l in ls {
        let ld = dag(l);
        let ldl = mul(&ld, l);
        out = add(&out, &mul(&mul(l, rho), &ld), ONE);
        out = add(&out, &mul(&ldl, rho), C::new(-0.5, 0.0));
        out = add(&out, &mul(rho, &ldl), C::new(-0.5, 0.0));
    }
    out
}

/// Classical RK4 on the density matrix with a time-dependent generator.
pub fn lindblad_rk4<G>(generator: G, r0: [f64; 3], t: f64, steps: usize) -> [f64; 3]
where
    G: Fn(f64) -> (M2, Vec<M2>),
{
    let mut rho = rho_of(r0);
    let dt = t / steps as f64;
    let f = |s: f64, r: &M2| {
        let (h, ls) = generator(s);
        lindblad_rhs(&h, &ls, r)
    };
    for k in 0..steps {
        let s = k as f64 * dt;
        let k1 = f(s, &rho);
        let k2 = f(s + 0.5 * dt, &add(&rho, &k1, C::new(0.5 * dt, 0.0)));
        let k3 = f(s + 0.5 * dt, &add(&rho, &k2, C::new(0.5 * dt, 0.0)));
        let k4 = f(s + dt, &add(&rho, &k3, C::new(dt, 0.0)));
        let mut inc = add(&k1, &k2, C::new(2.0, 0.0));
        inc = add(&inc, &k3, C::new(2.0, 0.0));
        inc = add(&inc, &k4, ONE);
        rho = add(&rho, &inc, C::new(dt / 6.0, 0.0));
    }
    bloch_of(&rho)
}

/// `H = −h·σ` for a field along z.
pub fn h_of_field_z(hz: f64) -> M2 {
    scaled(&sz(), -hz)
}

pub fn max_diff(a: [f64; 3], b: &BlochState) -> f64 {
    let v = b.vector();
    (0..3).map(|i| (a[i] - v[i]).abs()).fold(0.0, f64::max)
}

/// Relative entropy `tr ρ(ln ρ − ln σ)` from 2×2 eigen-decompositions.
pub fn relative_entropy_brute(a: [f64; 3], b: [f64; 3]) -> f64 {
    // diagonalize b: eigenvectors along ±b̂
    let rb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    let ra = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let ent = |r: f64| {
        let (p, q) = ((1.0 + r) / 2.0, (1.0 - r) / 2.0);
        let xl = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
        xl(p) + xl(q)
    };
    let cos = if rb > 0.0 { (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / rb } else { 0.0 };
    let (lp, lm) = (((1.0 + rb) / 2.0).ln(), ((1.0 - rb) / 2.0).ln());
    // ⟨±b̂|ρ_a|±b̂⟩ = (1 ± a·b̂)/2
    let cross = (1.0 + cos) / 2.0 * lp + (1.0 - cos) / 2.0 * lm;
    ent(ra) - cross
}

/// RK4 states at every point of an ascending grid starting at 0, with
/// `substeps` steps per grid interval.
pub fn lindblad_rk4_grid<G>(generator: G, r0: [f64; 3], times: &[f64], substeps: usize) -> Vec<[f64; 3]>
where
    G: Fn(f64) -> (M2, Vec<M2>),
{
    let f = |s: f64, r: &M2| {
        let (h, ls) = generator(s);
        lindblad_rhs(&h, &ls, r)
    };
    let mut rho = rho_of(r0);
    let mut out = vec![bloch_of(&rho)];
    for w in times.windows(2) {
        let dt = (w[1] - w[0]) / substeps as f64;
        for k in 0..substeps {
            let s = w[0] + k as f64 * dt;
            let k1 = f(s, &rho);
            let k2 = f(s + 0.5 * dt, &add(&rho, &k1, C::new(0.5 * dt, 0.0)));
            let k3 = f(s + 0.5 * dt, &add(&rho, &k2, C::new(0.5 * dt, 0.0)));
            let k4 = f(s + dt, &add(&rho, &k3, C::new(dt, 0.0)));
            let mut inc = add(&k1, &k2, C::new(2.0, 0.0));
            inc = add(&inc, &k3, C::new(2.0, 0.0));
            inc = add(&inc, &k4, ONE);
            rho = add(&rho, &inc, C::new(dt / 6.0, 0.0));
        }
        out.push(bloch_of(&rho));
    }
    out
}

/// Energy `tr[UρU†H]` for `H = −h σz` and `U = exp(−iθ n·σ/2)`.
pub fn rotated_energy(r: [f64; 3], h: f64, n: [f64; 3], theta: f64) -> f64 {
    let (s, c) = (0.5 * theta).sin_cos();
    let ns = add(&add(&scaled(&sx(), n[0]), &sy(), C::new(n[1], 0.0)), &sz(), C::new(n[2], 0.0));
    let u = add(&scaled(&[[ONE, ZERO], [ZERO, ONE]], c), &ns, C::new(0.0, -s));
    let rho = mul(&mul(&u, &rho_of(r)), &dag(&u));
    let hm = scaled(&sz(), -h);
    let e = mul(&rho, &hm);
    (e[0][0] + e[1][1]).re
}
