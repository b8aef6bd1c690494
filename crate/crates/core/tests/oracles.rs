//! Independent checks against brute-force or closed-form references.

mod common;

use common::FockMode;
use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64;
use spinboson::chain::{ChainSpec, ModeSpectrum};
use spinboson::niba::{solve_volterra_fn, BathModes, BathState, KernelTable, VolterraScheme};

fn closed_form(omega: &[f64], g: &[f64], temperature: f64, tau: f64) -> Complex64 {
    let eta_sq = g.iter().map(|x| x * x).collect();
    let modes = BathModes::from_parts(omega.to_vec(), eta_sq, BathState::new(temperature).unwrap());
    let (q1, q2) = modes.exponents(tau);
    Complex64::new(-q1, -q2).exp()
}

#[test]
fn single_ion_zero_temperature() {
    let spectrum = ModeSpectrum::compute(&ChainSpec::new(1).unwrap()).unwrap();
    let eta = 0.4;
    let modes = BathModes::travelling_wave(&spectrum, eta, BathState::zero());
    // one mode at omega_z with unit amplitude: displacement eta
    let fock = FockMode::new(1.0, eta, 0.0, 60, 1);
    for tau in [0.0, 0.3, 1.1, 2.5, 4.0, 7.7] {
        let (q1, q2) = modes.exponents(tau);
        let exact = fock.correlation(tau);
        let c = Complex64::new(-q1, -q2).exp();
        assert!((c - exact).norm() < 1e-8, "tau {tau}: {c} vs {exact}");
        assert!((q1 + exact.norm().ln()).abs() < 1e-8);
    }
}

#[test]
fn two_ions_finite_temperature() {
    let spectrum = ModeSpectrum::compute(&ChainSpec::new(2).unwrap()).unwrap();
    let eta = 0.3;
    let temperature = 2.0;
    let modes = BathModes::travelling_wave(&spectrum, eta, BathState::new(temperature).unwrap());

    // centre-of-mass and stretch modes, amplitude 1/sqrt(2) at either ion
    let omega = [1.0, 3f64.sqrt()];
    let g: Vec<f64> = omega
        .iter()
        .map(|&w| eta * std::f64::consts::FRAC_1_SQRT_2 / w.sqrt())
        .collect();
    let fock: Vec<FockMode> = omega
        .iter()
        .zip(&g)
        .map(|(&w, &gn)| FockMode::new(w, gn, temperature, 140, 90))
        .collect();

    for tau in [0.0, 0.2, 0.9, 1.7, 3.3, 6.0] {
        let exact: Complex64 = fock.iter().map(|f| f.correlation(tau)).product();
        let (q1, q2) = modes.exponents(tau);
        let c = Complex64::new(-q1, -q2).exp();
        assert!((c - exact).norm() < 1e-6, "tau {tau}: {c} vs {exact}");
        assert!((c - closed_form(&omega, &g, temperature, tau)).norm() < 1e-12);
    }
}

#[test]
fn kernel_starts_at_minus_delta_squared() {
    let spectrum = ModeSpectrum::compute(&ChainSpec::new(7).unwrap()).unwrap();
    let modes = BathModes::travelling_wave(&spectrum, 0.8, BathState::new(3.0).unwrap());
    let table = KernelTable::tabulate(&modes, 2.5, 0.01, 10).unwrap();
    assert_eq!(table.k_values[0], -6.25);
}

#[test]
fn three_ion_hessian() {
    // u = (-(5/4)^{1/3}, 0, (5/4)^{1/3}); A_nn = 1 + 2 sum |d|^-3
    let a = 1.25f64.powf(1.0 / 3.0);
    let c1 = 2.0 / a.powi(3);
    let c2 = 2.0 / (2.0 * a).powi(3);
    let h = Matrix3::new(
        1.0 + c1 + c2,
        -c1,
        -c2,
        -c1,
        1.0 + 2.0 * c1,
        -c1,
        -c2,
        -c1,
        1.0 + c1 + c2,
    );
    let mut exact: Vec<f64> = SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .map(|m| m.sqrt())
        .collect();
    exact.sort_by(f64::total_cmp);
    let s = ModeSpectrum::compute(&ChainSpec::new(3).unwrap()).unwrap();
    for (w, e) in s.omega.iter().zip(&exact) {
        assert!((w - e).abs() < 1e-10);
    }
    assert!((s.omega[2] - 29f64.sqrt() / 5f64.sqrt()).abs() < 1e-10);
}

/// Laplace inversion of `s P - 1 = P K(s)` for `K = -Delta_e^2 e^{-gamma t}`:
/// `P = (s + gamma) / (s^2 + gamma s + Delta_e^2)`.
fn exponential_kernel_solution(delta_e: f64, gamma: f64, t: f64) -> f64 {
    let b = (delta_e * delta_e - gamma * gamma / 4.0).sqrt();
    (-gamma * t / 2.0).exp() * ((b * t).cos() + gamma / (2.0 * b) * (b * t).sin())
}

#[test]
fn volterra_matches_laplace_inversion() {
    for scheme in [VolterraScheme::Gregory, VolterraScheme::TrapezoidPc] {
        let tr = solve_volterra_fn(|t| -(-0.5 * t).exp(), 20.0, 0.01, scheme).unwrap();
        let err = tr
            .times()
            .zip(&tr.p)
            .map(|(t, p)| (p - exponential_kernel_solution(1.0, 0.5, t)).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-4, "{scheme:?}: {err}");
    }
}
