//! Time march for `P'(t) = int_0^t K(t - s) P(s) ds`, `P(0) = 1`.
//!
//! The default scheme integrates once in time, turning the problem into the
//! second-kind equation `P(t) = 1 + int_0^t G(t - s) P(s) ds` with
//! `G(tau) = int_0^tau K`. `G(0) = 0`, so every step is explicit. `G` is
//! accumulated with four-point interpolatory panels and the convolution uses
//! fourth-order Gregory end corrections.

use crate::error::{invalid, Error, Result};

/// `|P|` beyond this aborts the march.
pub const BLOW_UP: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VolterraScheme {
    /// Integrated kernel with Gregory weights; fourth order.
    #[default]
    Gregory,
    /// Trapezoidal memory sum with an AB2 predictor and AM2 corrector; second order.
    TrapezoidPc,
}

impl VolterraScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            VolterraScheme::Gregory => "gregory",
            VolterraScheme::TrapezoidPc => "trapezoid_pc",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gregory" => Some(VolterraScheme::Gregory),
            "trapezoid_pc" => Some(VolterraScheme::TrapezoidPc),
            _ => None,
        }
    }
}

/// Polarization on the grid `t_i = i h`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationTrace {
    pub h: f64,
    pub p: Vec<f64>,
    /// Echo of every input that produced the trace.
    pub metadata: Vec<(String, String)>,
}

impl PolarizationTrace {
    pub fn new(h: f64, p: Vec<f64>) -> Self {
        PolarizationTrace {
            h,
            p,
            metadata: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn t(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn t_max(&self) -> f64 {
        self.t(self.p.len().saturating_sub(1))
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.p.len()).map(|i| self.t(i))
    }
}

/// Number of grid points covering `[0, t_max]` with step `h`.
pub fn grid_len(t_max: f64, h: f64) -> Result<usize> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(invalid("h", "must be positive"));
    }
    if !(t_max >= h) || !t_max.is_finite() {
        return Err(invalid("t_max", "must be at least one step"));
    }
    let steps = (t_max / h - 1e-9).ceil() as usize;
    Ok(steps + 1)
}

/// Solve with kernel samples `k[i] = K(i h)`; returns `P` on the same grid.
pub fn solve_volterra(k: &[f64], h: f64, scheme: VolterraScheme) -> Result<PolarizationTrace> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(invalid("h", "must be positive"));
    }
    if k.len() < 2 {
        return Err(invalid("kernel", "need at least two samples"));
    }
    let p = match scheme {
        VolterraScheme::Gregory => march_gregory(k, h)?,
        VolterraScheme::TrapezoidPc => march_trapezoid_pc(k, h)?,
    };
    Ok(PolarizationTrace::new(h, p))
}

/// Solve with a callable kernel sampled on the solver grid.
pub fn solve_volterra_fn(
    kernel: impl Fn(f64) -> f64,
    t_max: f64,
    h: f64,
    scheme: VolterraScheme,
) -> Result<PolarizationTrace> {
    let len = grid_len(t_max, h)?;
    let k: Vec<f64> = (0..len).map(|i| kernel(i as f64 * h)).collect();
    solve_volterra(&k, h, scheme)
}

fn check(p: f64, i: usize, h: f64) -> Result<f64> {
    if !p.is_finite() || p.abs() > BLOW_UP {
        return Err(Error::Unstable {
            time: i as f64 * h,
            value: p,
        });
    }
    Ok(p)
}

/// `G_n = int_0^{t_n} K`.
fn integrate_kernel(k: &[f64], h: f64) -> Vec<f64> {
    let m = k.len();
    let mut g = vec![0.0; m];
    for n in 1..m {
        let inc = if m < 4 {
            12.0 * (k[n - 1] + k[n])
        } else if n == 1 {
            9.0 * k[0] + 19.0 * k[1] - 5.0 * k[2] + k[3]
        } else if n + 1 < m {
            -k[n - 2] + 13.0 * k[n - 1] + 13.0 * k[n] - k[n + 1]
        } else {
            k[n - 3] - 5.0 * k[n - 2] + 19.0 * k[n - 1] + 9.0 * k[n]
        };
        g[n] = g[n - 1] + h / 24.0 * inc;
    }
    g
}

/// `sum_j a[j] b[j]` with four fixed accumulators.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for l in 0..4 {
            acc[l] += a[4 * c + l] * b[4 * c + l];
        }
    }
    let mut tail = 0.0;
    for j in 4 * chunks..a.len() {
        tail += a[j] * b[j];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

const GREGORY_END: [f64; 3] = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];

fn march_gregory(k: &[f64], h: f64) -> Result<Vec<f64>> {
    let m = k.len();
    let g = integrate_kernel(k, h);
    // g reversed so that the convolution is a contiguous dot product
    let g_rev: Vec<f64> = g.iter().rev().copied().collect();
    let mut p = vec![0.0; m];
    p[0] = 1.0;

    for n in 1..m {
        // integrand f_j = G(t_n - t_j) P_j; f_n = 0
        let f = |j: usize| g[n - j] * p[j];
        let quad = match n {
            1 => 0.5 * f(0),
            2 => (f(0) + 4.0 * f(1)) / 3.0,
            3 => 3.0 * (f(0) + 3.0 * f(1) + 3.0 * f(2)) / 8.0,
            4 => (14.0 * f(0) + 64.0 * f(1) + 24.0 * f(2) + 64.0 * f(3)) / 45.0,
            _ => {
                let plain = dot(&g_rev[m - 1 - n..m - 1], &p[..n]);
                plain
                    + (GREGORY_END[0] - 1.0) * f(0)
                    + (GREGORY_END[1] - 1.0) * f(1)
                    + (GREGORY_END[2] - 1.0) * f(2)
                    + (GREGORY_END[2] - 1.0) * f(n - 2)
                    + (GREGORY_END[1] - 1.0) * f(n - 1)
            }
        };
        p[n] = check(1.0 + h * quad, n, h)?;
    }
    Ok(p)
}

fn march_trapezoid_pc(k: &[f64], h: f64) -> Result<Vec<f64>> {
    let m = k.len();
    let k_rev: Vec<f64> = k.iter().rev().copied().collect();
    let mut p = vec![0.0; m];
    let mut f = vec![0.0; m];
    p[0] = 1.0;

    // trapezoidal memory integral at t_n given P_0..P_n
    let memory = |n: usize, p: &[f64], p_n: f64| -> f64 {
        if n == 0 {
            return 0.0;
        }
        let interior = dot(&k_rev[m - n..m - 1], &p[1..n]);
        h * (0.5 * k[n] * p[0] + interior + 0.5 * k[0] * p_n)
    };

    for n in 0..m - 1 {
        let predicted = if n == 0 {
            p[0] + h * f[0]
        } else {
            p[n] + 0.5 * h * (3.0 * f[n] - f[n - 1])
        };
        let f_pred = memory(n + 1, &p, predicted);
        let corrected = p[n] + 0.5 * h * (f[n] + f_pred);
        p[n + 1] = check(corrected, n + 1, h)?;
        f[n + 1] = memory(n + 1, &p, p[n + 1]);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn damped(t: f64) -> f64 {
        let b = 15f64.sqrt() / 4.0;
        (-t / 4.0).exp() * ((b * t).cos() + (b * t).sin() / (4.0 * b))
    }

    fn max_err(trace: &PolarizationTrace, exact: impl Fn(f64) -> f64) -> f64 {
        trace
            .times()
            .zip(&trace.p)
            .map(|(t, p)| (p - exact(t)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn zero_kernel_keeps_polarization() {
        for scheme in [VolterraScheme::Gregory, VolterraScheme::TrapezoidPc] {
            let tr = solve_volterra_fn(|_| 0.0, 5.0, 0.1, scheme).unwrap();
            assert!(tr.p.iter().all(|&p| p == 1.0));
        }
    }

    #[test]
    fn constant_kernel_is_a_cosine() {
        let delta = 2.5;
        let h = 1e-3 * 2.0 * std::f64::consts::PI / delta;
        let tr = solve_volterra_fn(|_| -delta * delta, 10.0, h, VolterraScheme::Gregory).unwrap();
        assert!(max_err(&tr, |t| (delta * t).cos()) < 1e-6);
    }

    #[test]
    fn exponential_kernel_both_schemes() {
        let k = |t: f64| -(-0.5 * t).exp();
        let greg = solve_volterra_fn(k, 20.0, 0.01, VolterraScheme::Gregory).unwrap();
        assert!(max_err(&greg, damped) < 1e-6);
        let trap = solve_volterra_fn(k, 20.0, 0.01, VolterraScheme::TrapezoidPc).unwrap();
        assert!(max_err(&trap, damped) < 1e-4);
    }

    #[test]
    fn trapezoid_scheme_is_second_order() {
        let k = |t: f64| -(-0.5 * t).exp();
        let e1 = max_err(
            &solve_volterra_fn(k, 20.0, 0.02, VolterraScheme::TrapezoidPc).unwrap(),
            damped,
        );
        let e2 = max_err(
            &solve_volterra_fn(k, 20.0, 0.01, VolterraScheme::TrapezoidPc).unwrap(),
            damped,
        );
        let ratio = e1 / e2;
        assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
    }

    #[test]
    fn short_grids() {
        // fewer than four samples fall back to trapezoidal panels
        let tr = solve_volterra(&[-1.0, -1.0, -1.0], 0.01, VolterraScheme::Gregory).unwrap();
        assert_eq!(tr.len(), 3);
        assert!(tr.p[1] < 1.0 && tr.p[2] < tr.p[1]);
        assert!(solve_volterra(&[-1.0], 0.1, VolterraScheme::Gregory).is_err());
        assert!(grid_len(0.01, 0.1).is_err());
        assert_eq!(grid_len(1.0, 0.1).unwrap(), 11);
    }

    #[test]
    fn blow_up_is_reported() {
        // growing solution of P'' = +P
        let err = solve_volterra_fn(|_| 1.0, 10.0, 0.01, VolterraScheme::Gregory).unwrap_err();
        match err {
            Error::Unstable { time, value } => {
                assert!(value.abs() > BLOW_UP);
                // cosh(t) = 2 at t = 1.317
                assert!((time - 1.317).abs() < 0.02);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
