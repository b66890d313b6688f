//! Two-qubit entangling power and merge-error diagnostics.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qite::{compression_error_leading_term, AnsatzParameters, ReducedZyCoefficients};
use crate::statevector::TwoQubitAxis;

/// Product of two real single-qubit states `(a, b)` and `(c, d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductStateReal {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl ProductStateReal {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        for v in [a, b, c, d] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("amplitude {v} outside [0, 1]")));
            }
        }
        if (a * a + b * b - 1.0).abs() > 1e-12 || (c * c + d * d - 1.0).abs() > 1e-12 {
            return Err(Error::Config("single-qubit amplitudes must be normalized".into()));
        }
        Ok(Self { a, b, c, d })
    }

    /// From the `|1>` amplitudes of each factor.
    pub fn from_b(b: f64, d: f64) -> Result<Self> {
        Self::new((1.0 - b * b).max(0.0).sqrt(), b, (1.0 - d * d).max(0.0).sqrt(), d)
    }

    /// Amplitudes indexed by `q0 + 2 q1`, with the first factor on qubit 0.
    pub fn amplitudes(&self) -> [f64; 4] {
        [self.a * self.c, self.b * self.c, self.a * self.d, self.b * self.d]
    }
}

/// `1 - Tr(rho_0^2)` for a normalized real two-qubit state indexed by `q0 + 2 q1`.
pub fn linear_entropy(psi: &[f64; 4]) -> Result<f64> {
    let norm: f64 = psi.iter().map(|v| v * v).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Config(format!("state norm {norm} is not 1")));
    }
    let rho = |r: usize, s: usize| psi[r] * psi[s] + psi[r + 2] * psi[s + 2];
    let purity = rho(0, 0).powi(2) + rho(1, 1).powi(2) + 2.0 * rho(0, 1).powi(2);
    Ok(1.0 - purity)
}

/// Linear entropy after `exp(-i theta/2 Z_0 Y_1)` on a real product state whose
/// control factor has `|1>` amplitude `b`: `2 b^2 (1 - b^2) sin^2 theta`.
pub fn entangling_power_zy(b: f64, theta: f64) -> f64 {
    let b2 = b * b;
    2.0 * b2 * (1.0 - b2) * theta.sin().powi(2)
}

/// Same for `exp(-i theta/2 X_0 Y_1)`: `(1 - 2 b^2)^2 sin^2 theta / 2`.
pub fn entangling_power_xy(b: f64, theta: f64) -> f64 {
    0.5 * (1.0 - 2.0 * b * b).powi(2) * theta.sin().powi(2)
}

pub fn entangling_power(axis: TwoQubitAxis, b: f64, theta: f64) -> f64 {
    match axis {
        TwoQubitAxis::ZY => entangling_power_zy(b, theta),
        TwoQubitAxis::XY => entangling_power_xy(b, theta),
    }
}

/// Midpoint-rule average over `b` in `[0, 1]`.
pub fn average_entangling_power(axis: TwoQubitAxis, theta: f64, points: usize) -> f64 {
    let h = 1.0 / points as f64;
    (0..points).map(|i| entangling_power(axis, (i as f64 + 0.5) * h, theta)).sum::<f64>() * h
}

/// Mean and standard error of a Monte-Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

const MC_STREAMS: usize = 16;

fn haar_qubit(rng: &mut ChaCha8Rng) -> [Complex64; 2] {
    let mut v = [Complex64::new(0.0, 0.0); 2];
    for z in v.iter_mut() {
        *z = Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
    }
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

fn complex_linear_entropy(psi: &[Complex64; 4]) -> f64 {
    let rho = |r: usize, s: usize| psi[r] * psi[s].conj() + psi[r + 2] * psi[s + 2].conj();
    let purity = rho(0, 0).norm_sqr() + rho(1, 1).norm_sqr() + 2.0 * rho(0, 1).norm_sqr();
    1.0 - purity
}

/// Average linear entropy produced by the gate on Haar-random product states.
/// Samples are split over fixed seeded streams and reduced in stream order.
pub fn haar_entangling_power(axis: TwoQubitAxis, theta: f64, samples: usize, seed: u64) -> Estimate {
    let (s, c) = (0.5 * theta).sin_cos();
    let per = samples.div_ceil(MC_STREAMS);
    let sums: Vec<(f64, f64, usize)> = (0..MC_STREAMS)
        .into_par_iter()
        .map(|stream| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream as u64);
            let count = per.min(samples.saturating_sub(stream * per));
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let u = haar_qubit(&mut rng);
                let v = haar_qubit(&mut rng);
                // Control on qubit 0; rotate to its eigenbasis for XY.
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let u_eig = match axis {
                    TwoQubitAxis::ZY => u,
                    TwoQubitAxis::XY => [(u[0] + u[1]) * h, (u[0] - u[1]) * h],
                };
                // Branch +1 gets R_Y(theta) on the target, branch -1 gets R_Y(-theta).
                let plus = [v[0] * c - v[1] * s, v[0] * s + v[1] * c];
                let minus = [v[0] * c + v[1] * s, -v[0] * s + v[1] * c];
                let mut psi = [Complex64::new(0.0, 0.0); 4];
                for t in 0..2 {
                    let (e0, e1) = match axis {
                        TwoQubitAxis::ZY => ([1.0, 0.0], [0.0, 1.0]),
                        TwoQubitAxis::XY => ([h, h], [h, -h]),
                    };
                    psi[2 * t] += u_eig[0] * plus[t] * e0[0] + u_eig[1] * minus[t] * e1[0];
                    psi[2 * t + 1] += u_eig[0] * plus[t] * e0[1] + u_eig[1] * minus[t] * e1[1];
                }
                let e = complex_linear_entropy(&psi);
                s1 += e;
                s2 += e * e;
            }
            (s1, s2, count)
        })
        .collect();
    let (s1, s2, n) = sums.iter().fold((0.0, 0.0, 0usize), |acc, x| (acc.0 + x.0, acc.1 + x.1, acc.2 + x.2));
    let n = n.max(1) as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    Estimate { mean, std_error: (var / n).sqrt() }
}

/// Norm of the leading merge error `(1/2)[T', sum T]` for step parameters
/// `T = dtau * A`, in the normalized Frobenius norm `||M||_F / sqrt(2^N)`.
pub fn compression_step_diagnostic(history: &ReducedZyCoefficients, next: &ReducedZyCoefficients) -> Result<f64> {
    let c = compression_error_leading_term(history, next)?;
    // [T', sum T] = sum 2i c_i X_k Y_i and the strings are orthonormal.
    Ok(c.values().map(|v| v * v).sum::<f64>().sqrt())
}

/// Per-step merge-error norms of a reduced ZY run; step 1 has no history.
pub fn compression_diagnostics(params: &AnsatzParameters, pivot: usize) -> Result<Vec<f64>> {
    let mut history = vec![0.0; params.accumulated.len()];
    let mut out = Vec::with_capacity(params.layers.len());
    for layer in &params.layers {
        let h = ReducedZyCoefficients::from_basis_vector(pivot, &history)?;
        let n = ReducedZyCoefficients::from_basis_vector(pivot, layer)?;
        out.push(compression_step_diagnostic(&h, &n)?);
        for (a, v) in history.iter_mut().zip(layer) {
            *a += v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn entropy_examples() {
        let p = ProductStateReal::from_b(0.6, 0.8).unwrap();
        assert!(linear_entropy(&p.amplitudes()).unwrap().abs() < 1e-15);
        let h = 0.5f64.sqrt();
        assert!((linear_entropy(&[h, 0.0, 0.0, h]).unwrap() - 0.5).abs() < 1e-15);
        assert!(linear_entropy(&[1.0, 1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn closed_form_special_points() {
        let b = 0.5f64.sqrt();
        assert!((entangling_power_zy(b, FRAC_PI_2) - 0.5).abs() < 1e-15);
        assert!(entangling_power_xy(b, FRAC_PI_2).abs() < 1e-15);
        for b in [0.0, 0.3, 1.0] {
            assert_eq!(entangling_power_zy(b, 0.0), 0.0);
            assert_eq!(entangling_power_xy(b, 0.0), 0.0);
        }
    }

    #[test]
    fn quadrature_averages() {
        let t = 1.1f64;
        let s2 = t.sin().powi(2);
        assert!((average_entangling_power(TwoQubitAxis::ZY, t, 10_000) - 8.0 / 30.0 * s2).abs() < 1e-6);
        assert!((average_entangling_power(TwoQubitAxis::XY, t, 10_000) - 7.0 / 30.0 * s2).abs() < 1e-6);
    }

    #[test]
    fn commuting_history_is_zero() {
        let z = ReducedZyCoefficients { pivot: 0, a: vec![0.0; 3], b: vec![0.0, 0.2, 0.1] };
        let w = ReducedZyCoefficients { pivot: 0, a: vec![0.0, 0.4, 0.4], b: vec![0.0, 0.3, 0.1] };
        assert_eq!(compression_step_diagnostic(&z, &w).unwrap(), 0.0);
    }
}
