//! Axial equilibrium and normal modes of an ion chain in a harmonic trap.
//!
//! Everything is expressed in scaled units: `hbar = k_B = m = 1`, the axial
//! trap frequency is `omega_z = 1` and lengths are measured in
//! `l = (e^2 / (m omega_z^2))^(1/3)`. In these units the potential energy of
//! the chain is `sum_i u_i^2 / 2 + sum_{i<j} 1 / |u_i - u_j|`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{invalid, Error, Result};

/// Convergence threshold on the max-norm of the force residual.
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-13;
pub const EQUILIBRIUM_MAX_ITERATIONS: usize = 200;
/// Step reduction applied when a full Newton step overshoots.
pub const NEWTON_DAMPING: f64 = 0.5;

/// How the mean inter-ion distance `d0` is read off an inhomogeneous chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpacingConvention {
    /// Gap between the two ions adjacent to the chain center.
    #[default]
    Center,
    /// Mean of all nearest-neighbour gaps, `(u_N - u_1) / (N - 1)`.
    Mean,
}

impl SpacingConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            SpacingConvention::Center => "center",
            SpacingConvention::Mean => "mean",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "center" => Some(SpacingConvention::Center),
            "mean" => Some(SpacingConvention::Mean),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub n_ions: usize,
    /// Zero-based index of the laser-addressed ion.
    pub addressed_index: usize,
    pub spacing: SpacingConvention,
}

impl ChainSpec {
    /// Chain with the central ion addressed (`ceil(N/2) - 1`, left of center for even `N`).
    pub fn new(n_ions: usize) -> Result<Self> {
        if n_ions == 0 {
            return Err(invalid("n_ions", "must be at least 1"));
        }
        Ok(ChainSpec {
            n_ions,
            addressed_index: central_index(n_ions),
            spacing: SpacingConvention::Center,
        })
    }

    pub fn with_addressed_index(mut self, index: usize) -> Result<Self> {
        self.addressed_index = index;
        self.validate()?;
        Ok(self)
    }

    pub fn with_spacing(mut self, spacing: SpacingConvention) -> Self {
        self.spacing = spacing;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_ions == 0 {
            return Err(invalid("n_ions", "must be at least 1"));
        }
        if self.addressed_index >= self.n_ions {
            return Err(invalid(
                "addressed_index",
                format!(
                    "{} out of range for {} ions",
                    self.addressed_index, self.n_ions
                ),
            ));
        }
        Ok(())
    }

    /// True when the addressed ion sits on (odd `N`) or next to (even `N`) the mirror plane.
    pub fn addresses_center(&self) -> bool {
        let twice_offset = (2 * self.addressed_index).abs_diff(self.n_ions - 1);
        twice_offset <= 1
    }
}

pub fn central_index(n_ions: usize) -> usize {
    n_ions.div_ceil(2).saturating_sub(1)
}

/// Dimensionless equilibrium positions, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumPositions {
    pub u: Vec<f64>,
    pub iterations: usize,
}

impl EquilibriumPositions {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn residual(&self) -> f64 {
        max_abs(&force(&self.u))
    }

    pub fn d0(&self, convention: SpacingConvention) -> Option<f64> {
        let n = self.u.len();
        if n < 2 {
            return None;
        }
        Some(match convention {
            SpacingConvention::Center => {
                let c = n / 2;
                self.u[c] - self.u[c - 1]
            }
            SpacingConvention::Mean => (self.u[n - 1] - self.u[0]) / (n - 1) as f64,
        })
    }
}

/// Net axial force on each ion (trap restoring force minus Coulomb push).
fn force(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let mut f = u.to_vec();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = u[i] - u[j];
            let push = 1.0 / (d * d);
            if j < i {
                f[i] -= push;
            } else {
                f[i] += push;
            }
        }
    }
    f
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn hessian_of(u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            1.0 + u
                .iter()
                .enumerate()
                .filter(|&(p, _)| p != r)
                .map(|(_, up)| 2.0 / (u[r] - up).abs().powi(3))
                .sum::<f64>()
        } else {
            -2.0 / (u[r] - u[c]).abs().powi(3)
        }
    })
}

fn symmetrize(u: &mut [f64]) {
    let n = u.len();
    for i in 0..n / 2 {
        let half = 0.5 * (u[n - 1 - i] - u[i]);
        u[i] = -half;
        u[n - 1 - i] = half;
    }
    if n % 2 == 1 {
        u[n / 2] = 0.0;
    }
}

fn strictly_increasing(u: &[f64]) -> bool {
    u.windows(2).all(|w| w[1] > w[0])
}

/// Damped Newton iteration on the force balance from an equally spaced seed.
pub fn solve_equilibrium(spec: &ChainSpec) -> Result<EquilibriumPositions> {
    spec.validate()?;
    let n = spec.n_ions;
    if n == 1 {
        return Ok(EquilibriumPositions {
            u: vec![0.0],
            iterations: 0,
        });
    }
    let scale = 2.0 * (n as f64).powf(0.56) / n as f64;
    let mut u: Vec<f64> = (0..n)
        .map(|i| (i as f64 - 0.5 * (n - 1) as f64) * scale)
        .collect();
    let mut residual = max_abs(&force(&u));

    for iteration in 0..EQUILIBRIUM_MAX_ITERATIONS {
        if residual <= EQUILIBRIUM_TOLERANCE {
            return Ok(EquilibriumPositions {
                u,
                iterations: iteration,
            });
        }
        let f = DVector::from_vec(force(&u));
        let step = hessian_of(&u)
            .cholesky()
            .ok_or(Error::EquilibriumNotConverged {
                iterations: iteration,
                residual,
            })?
            .solve(&f);

        let mut fraction = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let mut trial: Vec<f64> = u
                .iter()
                .zip(step.iter())
                .map(|(x, s)| x - fraction * s)
                .collect();
            symmetrize(&mut trial);
            if strictly_increasing(&trial) {
                let r = max_abs(&force(&trial));
                if r < residual {
                    accepted = Some((trial, r));
                    break;
                }
            }
            fraction *= NEWTON_DAMPING;
        }
        match accepted {
            Some((trial, r)) => {
                u = trial;
                residual = r;
            }
            // Round-off floor: no step can reduce the residual any further.
            None if residual <= 1e3 * EQUILIBRIUM_TOLERANCE => {
                return Ok(EquilibriumPositions {
                    u,
                    iterations: iteration,
                });
            }
            None => {
                return Err(Error::EquilibriumNotConverged {
                    iterations: iteration,
                    residual,
                })
            }
        }
    }
    if residual <= EQUILIBRIUM_TOLERANCE {
        Ok(EquilibriumPositions {
            u,
            iterations: EQUILIBRIUM_MAX_ITERATIONS,
        })
    } else {
        Err(Error::EquilibriumNotConverged {
            iterations: EQUILIBRIUM_MAX_ITERATIONS,
            residual,
        })
    }
}

/// Axial Hessian `A` of the scaled potential at equilibrium.
pub fn axial_hessian(pos: &EquilibriumPositions) -> DMatrix<f64> {
    hessian_of(&pos.u)
}

/// Normal modes of the chain: frequencies, orthonormal mode matrix and the
/// mode amplitudes at the addressed ion.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    pub n_ions: usize,
    pub addressed_index: usize,
    pub spacing: SpacingConvention,
    pub positions: Vec<f64>,
    /// Ascending mode frequencies in units of `omega_z`.
    pub omega: Vec<f64>,
    /// Columns are the normalized mode vectors.
    pub mode_matrix: DMatrix<f64>,
    /// `M[addressed_index, n]` for every mode.
    pub m_at_ion: Vec<f64>,
    /// `(omega_N - omega_1) / (N - 1)`; zero for a single ion.
    pub mean_spacing: f64,
    /// Mean inter-ion distance under `spacing`; `None` for a single ion.
    pub d0: Option<f64>,
    /// Hessian diagonal at the addressed ion.
    pub hessian_diag: f64,
}

impl ModeSpectrum {
    /// Equilibrium, Hessian and eigenmodes in one go.
    pub fn compute(spec: &ChainSpec) -> Result<Self> {
        let pos = solve_equilibrium(spec)?;
        let hessian = axial_hessian(&pos);
        normal_modes(spec, &pos, &hessian)
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn max_frequency(&self) -> f64 {
        self.omega.last().copied().unwrap_or(1.0)
    }

    /// Dimensionless stiffness `beta = 2 e^2 / (m omega_z^2 d0^3)`.
    pub fn beta(&self) -> Option<f64> {
        self.d0.map(stiffness_beta)
    }

    /// Sound-velocity factor `v = sqrt(3 beta / 2)`.
    pub fn velocity(&self) -> Option<f64> {
        self.beta().map(velocity_from_beta)
    }

    /// Whether mode `n` is even under the chain's mirror reflection.
    pub fn is_mirror_symmetric(&self, n: usize) -> bool {
        let col = self.mode_matrix.column(n);
        let len = col.len();
        let even: f64 = (0..len).map(|i| (col[i] - col[len - 1 - i]).abs()).sum();
        let odd: f64 = (0..len).map(|i| (col[i] + col[len - 1 - i]).abs()).sum();
        even <= odd
    }

    /// Frequencies of the modes that carry the addressed ion's dynamics.
    ///
    /// An ion on the mirror plane only moves in mirror-symmetric modes, so for
    /// a centrally addressed chain the antisymmetric half of the spectrum is
    /// dropped. Falls back to the full spectrum when fewer than two remain.
    pub fn coupled_frequencies(&self) -> Vec<f64> {
        let spec = ChainSpec {
            n_ions: self.n_ions,
            addressed_index: self.addressed_index,
            spacing: self.spacing,
        };
        if self.n_ions >= 2 && spec.addresses_center() {
            let sym: Vec<f64> = (0..self.len())
                .filter(|&n| self.is_mirror_symmetric(n))
                .map(|n| self.omega[n])
                .collect();
            if sym.len() >= 2 {
                return sym;
            }
        }
        self.omega.clone()
    }
}

pub fn stiffness_beta(d0: f64) -> f64 {
    2.0 / (d0 * d0 * d0)
}

pub fn velocity_from_beta(beta: f64) -> f64 {
    (1.5 * beta).sqrt()
}

pub fn normal_modes(
    spec: &ChainSpec,
    pos: &EquilibriumPositions,
    hessian: &DMatrix<f64>,
) -> Result<ModeSpectrum> {
    spec.validate()?;
    let n = hessian.nrows();
    if n != spec.n_ions || hessian.ncols() != n || pos.len() != n {
        return Err(Error::Eigensolver(format!(
            "dimension mismatch: {} ions, {}x{} Hessian, {} positions",
            spec.n_ions,
            hessian.nrows(),
            hessian.ncols(),
            pos.len()
        )));
    }
    let eig = SymmetricEigen::try_new(hessian.clone(), 1e-15, 0)
        .ok_or_else(|| Error::Eigensolver("symmetric QR iteration did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut omega = Vec::with_capacity(n);
    let mut mode_matrix = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mu = eig.eigenvalues[src];
        if !(mu > 0.0) {
            return Err(Error::Eigensolver(format!(
                "Hessian not positive definite (eigenvalue {mu})"
            )));
        }
        omega.push(mu.sqrt());
        let mut v = eig.eigenvectors.column(src).into_owned();
        if sign_flip_needed(v.as_slice(), spec.addressed_index) {
            v.neg_mut();
        }
        mode_matrix.set_column(dst, &v);
    }

    let m_at_ion = (0..n)
        .map(|k| mode_matrix[(spec.addressed_index, k)])
        .collect();
    let mean_spacing = if n >= 2 {
        (omega[n - 1] - omega[0]) / (n - 1) as f64
    } else {
        0.0
    };

    Ok(ModeSpectrum {
        n_ions: n,
        addressed_index: spec.addressed_index,
        spacing: spec.spacing,
        positions: pos.u.clone(),
        omega,
        mode_matrix,
        m_at_ion,
        mean_spacing,
        d0: pos.d0(spec.spacing),
        hessian_diag: hessian[(spec.addressed_index, spec.addressed_index)],
    })
}

const SIGN_TIE: f64 = 1e-12;

fn sign_flip_needed(v: &[f64], addressed: usize) -> bool {
    if v[addressed].abs() > SIGN_TIE {
        return v[addressed] < 0.0;
    }
    v.iter()
        .find(|x| x.abs() > SIGN_TIE)
        .is_some_and(|&x| x < 0.0)
}

/// Closed-form low-energy estimate
/// `omega_n = v (pi n / N) sqrt(1 - (2/3) ln(pi n / N))` in units of `omega_z`.
pub fn dispersion_estimate(n: usize, n_ions: usize, beta: f64) -> Result<f64> {
    if n == 0 || n > n_ions {
        return Err(invalid("n", format!("mode index {n} outside 1..={n_ions}")));
    }
    if !(beta > 0.0) {
        return Err(invalid("beta", "must be positive"));
    }
    let x = PI * n as f64 / n_ions as f64;
    let bracket = 1.0 - (2.0 / 3.0) * x.ln();
    if bracket < 0.0 {
        return Err(Error::DispersionDomain { value: bracket });
    }
    Ok(velocity_from_beta(beta) * x * bracket.sqrt())
}

/// Revival time of the discrete bath seen by the addressed ion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalTime {
    /// `2 pi / spacing` from the exact spectrum.
    pub tau: f64,
    /// Mean spacing of the coupled modes.
    pub spacing: f64,
    /// Closed-form `2 N / v`, when `d0` is defined.
    pub estimate: Option<f64>,
}

/// `2 pi / (mean level spacing)` for an arbitrary ascending spectrum.
pub fn revival_time_from_frequencies(omega: &[f64]) -> Result<f64> {
    if omega.len() < 2 {
        return Err(Error::SingleIon);
    }
    let spacing = (omega[omega.len() - 1] - omega[0]) / (omega.len() - 1) as f64;
    if !(spacing > 0.0) {
        return Err(invalid("omega", "spectrum has zero width"));
    }
    Ok(2.0 * PI / spacing)
}

pub fn revival_time(spectrum: &ModeSpectrum) -> Result<RevivalTime> {
    if spectrum.n_ions < 2 {
        return Err(Error::SingleIon);
    }
    let coupled = spectrum.coupled_frequencies();
    let tau = revival_time_from_frequencies(&coupled)?;
    Ok(RevivalTime {
        tau,
        spacing: 2.0 * PI / tau,
        estimate: spectrum
            .velocity()
            .map(|v| 2.0 * spectrum.n_ions as f64 / v),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(n: usize) -> ModeSpectrum {
        ModeSpectrum::compute(&ChainSpec::new(n).unwrap()).unwrap()
    }

    #[test]
    fn single_ion_sits_at_center() {
        let pos = solve_equilibrium(&ChainSpec::new(1).unwrap()).unwrap();
        assert_eq!(pos.u, vec![0.0]);
        let h = axial_hessian(&pos);
        assert_eq!(h[(0, 0)], 1.0);
    }

    #[test]
    fn two_and_three_ion_analytic_positions() {
        let two = solve_equilibrium(&ChainSpec::new(2).unwrap()).unwrap();
        let a = 0.25_f64.cbrt();
        assert!((two.u[0] + a).abs() < 1e-10 && (two.u[1] - a).abs() < 1e-10);

        let three = solve_equilibrium(&ChainSpec::new(3).unwrap()).unwrap();
        let b = 1.25_f64.cbrt();
        assert!((three.u[0] + b).abs() < 1e-10);
        assert!(three.u[1].abs() < 1e-10);
        assert!((three.u[2] - b).abs() < 1e-10);
    }

    #[test]
    fn fifty_ion_equilibrium_invariants() {
        let pos = solve_equilibrium(&ChainSpec::new(50).unwrap()).unwrap();
        assert!(pos.residual() <= 1e-12, "residual {}", pos.residual());
        assert!(strictly_increasing(&pos.u));
        let sum: f64 = pos.u.iter().sum();
        assert!(sum.abs() < 1e-10);
        for i in 0..50 {
            assert!((pos.u[i] + pos.u[49 - i]).abs() < 1e-10);
        }
    }

    #[test]
    fn hessian_eigenvalues_for_three_ions() {
        let s = spectrum(3);
        let mu: Vec<f64> = s.omega.iter().map(|w| w * w).collect();
        assert!((mu[0] - 1.0).abs() < 1e-12);
        assert!((mu[1] - 3.0).abs() < 1e-12);
        assert!((mu[2] - 29.0 / 5.0).abs() < 1e-12);
    }

    #[test]
    fn two_ion_hessian_matches_closed_form() {
        let pos = solve_equilibrium(&ChainSpec::new(2).unwrap()).unwrap();
        let h = axial_hessian(&pos);
        let gap = 2.0 * 0.25_f64.cbrt();
        let off = 2.0 / gap.powi(3);
        assert!((h[(0, 0)] - (1.0 + off)).abs() < 1e-12);
        assert!((h[(0, 1)] + off).abs() < 1e-12);
    }

    #[test]
    fn center_of_mass_and_breathing_modes() {
        for n in [2, 5, 10, 50] {
            let s = spectrum(n);
            assert!((s.omega[0] - 1.0).abs() < 1e-9);
            assert!((s.omega[1] - 3f64.sqrt()).abs() < 1e-9);
            let com = 1.0 / (n as f64).sqrt();
            for i in 0..n {
                assert!((s.mode_matrix[(i, 0)] - com).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn addressed_amplitudes_are_nonnegative() {
        let s = spectrum(50);
        assert!(s.m_at_ion.iter().all(|&m| m >= 0.0));
        assert_eq!(s.addressed_index, 24);
    }

    #[test]
    fn odd_chain_center_has_no_antisymmetric_amplitude() {
        let s = spectrum(7);
        for n in 0..7 {
            if !s.is_mirror_symmetric(n) {
                assert!(s.m_at_ion[n].abs() < 1e-12);
            }
        }
        assert_eq!(s.coupled_frequencies().len(), 4);
    }

    #[test]
    fn addressed_index_out_of_range() {
        let err = ChainSpec::new(4)
            .unwrap()
            .with_addressed_index(4)
            .unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidParameter {
                name: "addressed_index",
                ..
            }
        ));
        assert!(ChainSpec::new(0).is_err());
    }

    #[test]
    fn dispersion_estimate_values() {
        // beta chosen so that v = 1
        let beta = 2.0 / 3.0;
        let w = dispersion_estimate(1, 10, beta).unwrap();
        let x = 0.1 * PI;
        assert!((w - x * (1.0 - (2.0 / 3.0) * x.ln()).sqrt()).abs() < 1e-15);
        assert!((w - 0.4182).abs() < 1e-4);

        let small = dispersion_estimate(1, 1_000_000, beta).unwrap();
        assert!(small < 1e-4);
        assert!(dispersion_estimate(0, 10, beta).is_err());
    }

    #[test]
    fn dispersion_mode_index_out_of_range() {
        assert!(matches!(
            dispersion_estimate(5, 4, 1.0),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn revival_time_equally_spaced() {
        let delta = 0.37;
        let omega: Vec<f64> = (1..=20).map(|n| n as f64 * delta).collect();
        let tau = revival_time_from_frequencies(&omega).unwrap();
        assert!((tau - 2.0 * PI / delta).abs() < 1e-12);
        assert!(matches!(revival_time(&spectrum(1)), Err(Error::SingleIon)));
    }

    #[test]
    fn revival_spacing_matches_velocity_estimate() {
        let s = spectrum(50);
        let rev = revival_time(&s).unwrap();
        let v = s.velocity().unwrap();
        let closed = v * PI / 50.0;
        assert!((rev.spacing - closed).abs() / closed < 0.3);
    }

    #[test]
    fn deterministic_outputs() {
        let a = spectrum(30);
        let b = spectrum(30);
        assert_eq!(a, b);
    }
}
