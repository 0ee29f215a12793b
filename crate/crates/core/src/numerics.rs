//! Small numerical kernels: quadrature, root bracketing, 1-D maximization
//! and explicit Runge–Kutta integrators.

use crate::error::{Error, Result};

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
///
/// The interval is bisected until the Richardson estimate falls below the
/// locally apportioned share of `tol`, or `max_depth` is exhausted, which
/// is reported as an error carrying the offending subinterval.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::numerical("quadrature bounds must be finite"));
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 1e-6 * tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    tol_floor: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::numerical(format!(
            "non-finite integrand on [{a:e}, {b:e}]"
        )));
    }
    // Round-off floor: below this the estimate carries no information.
    let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if delta.abs() <= 15.0 * tol.max(floor) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::numerical(format!(
            "quadrature did not converge on [{a:e}, {b:e}]: residual {:e} > {:e}",
            delta.abs() / 15.0,
            tol
        )));
    }
    // endpoint singularities would otherwise drive the local tolerance to zero
    let sub = (0.5 * tol).max(tol_floor);
    let l = simpson_step(f, a, m, fa, flm, fm, left, sub, tol_floor, depth - 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, sub, tol_floor, depth - 1)?;
    Ok(l + r)
}

/// Bisection for a root of `f` inside `[a, b]`, which must bracket a sign
/// change. Stops when the bracket is narrower than `tol`.
pub fn bisect<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::numerical(format!(
            "no sign change on [{a:e}, {b:e}]"
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
/// Returns the abscissa and the value there; the better endpoint wins when
/// the maximum sits on the boundary.
pub fn golden_max<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (lo, hi) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let mut best = (x, f(x));
    for e in [lo, hi] {
        let fe = f(e);
        if fe > best.1 {
            best = (e, fe);
        }
    }
    best
}

/// Error controls for [`dormand_prince`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub atol: f64,
    pub rtol: f64,
    pub min_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 1e-9,
            min_step: 1e-14,
        }
    }
}

/// Dormand–Prince 5(4) integration of `dy/dt = f(t, y)` from `t_out[0]`,
/// returning the solution at every entry of the ascending `t_out`.
pub fn dormand_prince<const N: usize, F>(
    f: F,
    y0: [f64; N],
    t_out: &[f64],
    tol: Tolerances,
) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let mut out = Vec::with_capacity(t_out.len());
    let Some(&t_start) = t_out.first() else {
        return Ok(out);
    };
    let mut t = t_start;
    let mut y = y0;
    out.push(y);
    let span = t_out.last().map_or(0.0, |&e| e - t_start).abs();
    let mut h = (span / 100.0).clamp(1e-6, 1e-2);

    for &target in &t_out[1..] {
        if target < t {
            return Err(Error::numerical("output times must ascend"));
        }
        while t < target {
            let last = target - t <= h;
            let step = if last { target - t } else { h };
            if step < tol.min_step && !last {
                return Err(Error::numerical(format!(
                    "step size underflow at t = {t:e}"
                )));
            }
            let mut k = [[0.0; N]; 7];
            k[0] = f(t, &y);
            for s in 1..7 {
                let mut ys = y;
                for (i, v) in ys.iter_mut().enumerate() {
                    for (j, kj) in k.iter().enumerate().take(s) {
                        *v += step * A[s][j] * kj[i];
                    }
                }
                k[s] = f(t + C[s] * step, &ys);
            }
            let mut y5 = y;
            let mut err = 0.0f64;
            for i in 0..N {
                let mut d5 = 0.0;
                let mut d4 = 0.0;
                for s in 0..7 {
                    d5 += B5[s] * k[s][i];
                    d4 += B4[s] * k[s][i];
                }
                y5[i] += step * d5;
                let sc = tol.atol + tol.rtol * y[i].abs().max(y5[i].abs());
                err = err.max((step * (d5 - d4)).abs() / sc);
            }
            if !err.is_finite() {
                return Err(Error::numerical(format!("non-finite derivative at t = {t:e}")));
            }
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y5;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            let proposal = step * factor;
            if err <= 1.0 && last {
                // keep the pre-clip step for the next output interval
                h = h.max(proposal);
            } else {
                h = proposal;
            }
            if h < tol.min_step {
                return Err(Error::numerical(format!(
                    "step size underflow at t = {t:e}"
                )));
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// Classic fixed-step fourth-order Runge–Kutta from `t0` to `t1`.
pub fn rk4_fixed<const N: usize, F>(f: F, y0: [f64; N], t0: f64, t1: f64, steps: usize) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    let axpy = |y: &[f64; N], k: &[f64; N], c: f64| {
        let mut o = *y;
        for i in 0..N {
            o[i] += c * k[i];
        }
        o
    };
    for n in 0..steps {
        let t = t0 + n as f64 * h;
        let k1 = f(t, &y);
        let k2 = f(t + 0.5 * h, &axpy(&y, &k1, 0.5 * h));
        let k3 = f(t + 0.5 * h, &axpy(&y, &k2, 0.5 * h));
        let k4 = f(t + h, &axpy(&y, &k3, h));
        for i in 0..N {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { b } else { a + i as f64 * h })
                .collect()
        }
    }
}
