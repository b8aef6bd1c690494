use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Thermal `<e^{i g X(tau)} e^{-i g X(0)}>` of one oscillator with
/// `X = a + a^dagger`, evaluated in a truncated Fock space.
pub struct FockMode {
    omega: f64,
    /// `|<m| e^{i g X} |k>|^2`
    overlap: DMatrix<f64>,
    populations: Vec<f64>,
}

impl FockMode {
    pub fn new(omega: f64, g: f64, temperature: f64, dim: usize, kept: usize) -> Self {
        let mut x = DMatrix::<f64>::zeros(dim, dim);
        for n in 1..dim {
            let s = (n as f64).sqrt();
            x[(n - 1, n)] = s;
            x[(n, n - 1)] = s;
        }
        let eig = SymmetricEigen::new(x);
        let v = eig.eigenvectors.map(|c| Complex64::new(c, 0.0));
        let phases =
            DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::new(0.0, g * e).exp()));
        let u = &v * phases * v.transpose();
        let overlap = u.map(|c| c.norm_sqr());

        let populations = (0..kept)
            .map(|m| {
                if temperature == 0.0 {
                    if m == 0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    let b = (-omega / temperature).exp();
                    (1.0 - b) * b.powi(m as i32)
                }
            })
            .collect();
        FockMode {
            omega,
            overlap,
            populations,
        }
    }

    pub fn correlation(&self, tau: f64) -> Complex64 {
        let dim = self.overlap.nrows();
        let mut sum = Complex64::new(0.0, 0.0);
        for (m, &p) in self.populations.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for k in 0..dim {
                let phase = Complex64::new(0.0, self.omega * (m as f64 - k as f64) * tau).exp();
                sum += p * phase * self.overlap[(m, k)];
            }
        }
        sum
    }
}
