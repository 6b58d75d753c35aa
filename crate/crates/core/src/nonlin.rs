//! Nonlinearity families f(n), their deformed factorials, domains, the
//! deformed commutator, and the nonlinear-oscillator spectrum.

use crate::error::{Error, Result};
use crate::math::{harmonic, ln_factorial, ln_sinh, wrap_phase, CompensatedSum, LogComplex};
use serde::{Deserialize, Serialize};

/// Nonlinearity function family selecting a deformed coherent state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Nonlinearity {
    /// f(n) = 1: canonical coherent states.
    Identity,
    /// f(n) = e^{beta n}, beta >= 0.
    BetaExp { beta: f64 },
    /// Unit-magnitude deformation whose factorial carries the Kerr phase
    /// beta n(n+1)/2; the photon statistics stay exactly Poissonian.
    BetaImaginary { beta: f64 },
    /// f(n) = e^{lambda/n}/sqrt(n); states live on the open unit disk.
    /// lambda = 0 gives the harmonious states f(n) = 1/sqrt(n).
    LambdaExp { lambda: f64 },
    /// f(n) = q^n with q >= 1; identical to BetaExp with beta = ln q.
    QExp { q: f64 },
    /// f(n) = sqrt(sinh(gamma n)/(n sinh gamma)), gamma = ln q, q >= 1.
    QSinh { q: f64 },
}

impl Nonlinearity {
    /// Check the family parameter constraints. Called by every state
    /// constructor; exposed so front ends can validate early.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Nonlinearity::Identity => Ok(()),
            Nonlinearity::BetaExp { beta } => {
                if !beta.is_finite() {
                    Err(Error::Domain(format!("beta must be finite, got {beta}")))
                } else if beta < 0.0 {
                    Err(Error::Domain(format!(
                        "beta must be >= 0 (the state domain is empty otherwise), got {beta}"
                    )))
                } else {
                    Ok(())
                }
            }
            Nonlinearity::BetaImaginary { beta } => {
                if beta.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("beta must be finite, got {beta}")))
                }
            }
            Nonlinearity::LambdaExp { lambda } => {
                if lambda.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("lambda must be finite, got {lambda}")))
                }
            }
            Nonlinearity::QExp { q } | Nonlinearity::QSinh { q } => {
                if !q.is_finite() {
                    Err(Error::Domain(format!("q must be finite, got {q}")))
                } else if q < 1.0 {
                    Err(Error::Domain(format!("q must be >= 1, got {q}")))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// f(n) for n >= 1. For BetaImaginary this is the magnitude (1); the
    /// deformation phase lives entirely in `log_f_factorial`.
    pub fn f_value(&self, n: usize) -> Result<f64> {
        if n < 1 {
            return Err(Error::Domain(format!("f(n) requires n >= 1, got {n}")));
        }
        let nf = n as f64;
        Ok(match *self {
            Nonlinearity::Identity | Nonlinearity::BetaImaginary { .. } => 1.0,
            Nonlinearity::BetaExp { beta } => (beta * nf).exp(),
            Nonlinearity::LambdaExp { lambda } => (lambda / nf).exp() / nf.sqrt(),
            Nonlinearity::QExp { q } => (nf * q.ln()).exp(),
            Nonlinearity::QSinh { q } => {
                if q == 1.0 {
                    1.0
                } else {
                    let gamma = q.ln();
                    (0.5 * (ln_sinh(gamma * nf) - nf.ln() - ln_sinh(gamma))).exp()
                }
            }
        })
    }

    /// ln|f(n)| for n >= 1, overflow-free for every family.
    pub(crate) fn ln_f_magnitude(&self, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            Nonlinearity::Identity | Nonlinearity::BetaImaginary { .. } => 0.0,
            Nonlinearity::BetaExp { beta } => beta * nf,
            Nonlinearity::LambdaExp { lambda } => lambda / nf - 0.5 * nf.ln(),
            Nonlinearity::QExp { q } => nf * q.ln(),
            Nonlinearity::QSinh { q } => {
                if q == 1.0 {
                    0.0
                } else {
                    let gamma = q.ln();
                    0.5 * (ln_sinh(gamma * nf) - nf.ln() - ln_sinh(gamma))
                }
            }
        }
    }

    /// Deformed factorial [f(n)]! = prod_{m=1..n} f(m), with [f(0)]! = 1,
    /// in log-domain form. Closed forms where the family has one.
    pub fn log_f_factorial(&self, n: usize) -> LogComplex {
        let tri = triangle(n);
        match *self {
            Nonlinearity::Identity => LogComplex::ONE,
            Nonlinearity::BetaExp { beta } => LogComplex { log_magnitude: beta * tri, phase: 0.0 },
            Nonlinearity::BetaImaginary { beta } => {
                LogComplex { log_magnitude: 0.0, phase: wrap_phase(beta * tri) }
            }
            Nonlinearity::LambdaExp { lambda } => LogComplex {
                log_magnitude: lambda * harmonic(n) - 0.5 * ln_factorial(n),
                phase: 0.0,
            },
            Nonlinearity::QExp { q } => LogComplex { log_magnitude: q.ln() * tri, phase: 0.0 },
            Nonlinearity::QSinh { .. } => {
                let mut acc = CompensatedSum::new();
                for m in 1..=n {
                    acc.add(self.ln_f_magnitude(m));
                }
                LogComplex { log_magnitude: acc.value(), phase: 0.0 }
            }
        }
    }

    /// [f(n)]! for every n in 0..=n_max, computed incrementally in one
    /// O(n_max) pass (the per-n closed form for QSinh and the harmonic
    /// numbers would otherwise cost O(n_max^2) in a state build).
    pub fn log_f_factorials(&self, n_max: usize) -> Vec<LogComplex> {
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(LogComplex::ONE);
        match *self {
            Nonlinearity::Identity => {
                out.resize(n_max + 1, LogComplex::ONE);
            }
            Nonlinearity::BetaExp { beta } => {
                for n in 1..=n_max {
                    out.push(LogComplex { log_magnitude: beta * triangle(n), phase: 0.0 });
                }
            }
            Nonlinearity::QExp { q } => {
                let lnq = q.ln();
                for n in 1..=n_max {
                    out.push(LogComplex { log_magnitude: lnq * triangle(n), phase: 0.0 });
                }
            }
            Nonlinearity::BetaImaginary { beta } => {
                for n in 1..=n_max {
                    out.push(LogComplex {
                        log_magnitude: 0.0,
                        phase: wrap_phase(beta * triangle(n)),
                    });
                }
            }
            Nonlinearity::LambdaExp { lambda } => {
                let mut h = CompensatedSum::new();
                for n in 1..=n_max {
                    h.add(1.0 / n as f64);
                    out.push(LogComplex {
                        log_magnitude: lambda * h.value() - 0.5 * ln_factorial(n),
                        phase: 0.0,
                    });
                }
            }
            Nonlinearity::QSinh { .. } => {
                let mut acc = CompensatedSum::new();
                for n in 1..=n_max {
                    acc.add(self.ln_f_magnitude(n));
                    out.push(LogComplex { log_magnitude: acc.value(), phase: 0.0 });
                }
            }
        }
        out
    }

    /// Convergence radius of the state expansion:
    /// sqrt(lim n |f(n)|^2). Unit disk for LambdaExp, the whole plane
    /// otherwise.
    pub fn domain_radius(&self) -> f64 {
        match self {
            Nonlinearity::LambdaExp { .. } => 1.0,
            _ => f64::INFINITY,
        }
    }

    /// Eigenvalue of the deformed commutator [A, A^dag] on |n>:
    /// (n+1)|f(n+1)|^2 - n|f(n)|^2.
    pub fn deformed_commutator_diag(&self, n: usize) -> f64 {
        weighted_fsq(self, n + 1) - weighted_fsq(self, n)
    }

    /// Nonlinear-oscillator energy E(n) = [(n+1)|f(n+1)|^2 + n|f(n)|^2]/2.
    pub fn hamiltonian_spectrum(&self, n_max: usize) -> SpectrumSlice {
        let levels = (0..=n_max)
            .map(|n| (n, 0.5 * (weighted_fsq(self, n + 1) + weighted_fsq(self, n))))
            .collect();
        SpectrumSlice { spec: *self, levels }
    }
}

/// n(n+1)/2 exactly in f64 (n(n+1) stays below 2^53 for every reachable n).
fn triangle(n: usize) -> f64 {
    ((n as u64) * (n as u64 + 1) / 2) as f64
}

/// n |f(n)|^2 with the n = 0 term taken as 0 (f(0) is never evaluated).
fn weighted_fsq(spec: &Nonlinearity, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * (2.0 * spec.ln_f_magnitude(n)).exp()
    }
}

/// The first n_max+1 eigenvalues of the deformed-oscillator Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSlice {
    pub spec: Nonlinearity,
    pub levels: Vec<(usize, f64)>,
}
