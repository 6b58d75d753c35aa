//! Construction of normalized deformed coherent states on a truncated
//! Fock basis, with adaptive cutoff selection and a certified bound on
//! the truncated probability mass.

use crate::error::{Error, Result};
use crate::math::{complex_pair, ln_factorial, wrap_phase, CompensatedSum, LogComplex};
use crate::nonlin::Nonlinearity;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Hard cap on the adaptive cutoff unless the caller overrides it.
pub const DEFAULT_MAX_CUTOFF: usize = 2_000_000;

/// A normalized deformed coherent state |z, f> expanded over |0..=cutoff>.
///
/// Coefficients are stored in log-magnitude/phase form so the state stays
/// representable at extreme |z| (norms reach exp(10^24) in the far tail of
/// the radius-of-coherence scans).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformedState {
    pub spec: Nonlinearity,
    #[serde(with = "complex_pair")]
    pub z: Complex64,
    /// Highest retained Fock index N; `coeffs.len() == cutoff + 1`.
    pub cutoff: usize,
    /// Normalized coefficients c_0..c_N.
    pub coeffs: Vec<LogComplex>,
    /// Log of the normalization sum (before the square root).
    pub norm_log: f64,
    /// Upper bound on the probability mass lost to truncation.
    pub tail_bound: f64,
}

impl DeformedState {
    /// P(n) = |c_n|^2 for every retained n, in order.
    pub fn photon_distribution(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.abs_sq()).collect()
    }

    /// P(n), zero beyond the cutoff.
    pub fn p(&self, n: usize) -> f64 {
        self.coeffs.get(n).map_or(0.0, |c| c.abs_sq())
    }

    /// Coefficient c_n as an ordinary complex number (may underflow to 0).
    pub fn coeff_value(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).map_or(Complex64::new(0.0, 0.0), |c| c.value())
    }

    /// The same state re-truncated at Fock index k and renormalized.
    ///
    /// The discarded mass is added to `tail_bound`. Used for small-basis
    /// cross-checks where an O(4^N) reference formula is affordable.
    pub fn truncated(&self, k: usize) -> DeformedState {
        if k >= self.cutoff {
            return self.clone();
        }
        let mut kept = CompensatedSum::new();
        for c in &self.coeffs[..=k] {
            kept.add(c.abs_sq());
        }
        let s = kept.value();
        let half_log_s = 0.5 * s.ln();
        let coeffs = self.coeffs[..=k]
            .iter()
            .map(|c| LogComplex { log_magnitude: c.log_magnitude - half_log_s, phase: c.phase })
            .collect();
        DeformedState {
            spec: self.spec,
            z: self.z,
            cutoff: k,
            coeffs,
            norm_log: self.norm_log + s.ln(),
            tail_bound: (self.tail_bound + (1.0 - s)).max(0.0),
        }
    }

    /// The Fock basis state |n> dressed up as a DeformedState, so that the
    /// moment and Wigner machinery can run on it. Mainly for cross-checks
    /// against textbook values.
    pub fn number_state(n: usize) -> DeformedState {
        let mut coeffs = vec![LogComplex::ZERO; n + 1];
        coeffs[n] = LogComplex::ONE;
        DeformedState {
            spec: Nonlinearity::Identity,
            z: Complex64::new(0.0, 0.0),
            cutoff: n,
            coeffs,
            norm_log: 0.0,
            tail_bound: 0.0,
        }
    }
}

/// Build |z, f> with the default cutoff cap.
pub fn build_state(spec: Nonlinearity, z: Complex64, tol: f64) -> Result<DeformedState> {
    build_state_capped(spec, z, tol, DEFAULT_MAX_CUTOFF)
}

/// Build |z, f> with an explicit hard cap on the adaptive cutoff.
pub fn build_state_capped(
    spec: Nonlinearity,
    z: Complex64,
    tol: f64,
    max_cutoff: usize,
) -> Result<DeformedState> {
    spec.validate()?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Domain(format!("tol must be in (0, 1), got {tol}")));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain("z must be finite".into()));
    }
    let r = z.norm();
    if r >= spec.domain_radius() {
        return Err(Error::Domain(format!(
            "|z| = {r} is outside the domain disk (radius {}) of {spec:?}",
            spec.domain_radius()
        )));
    }
    if r == 0.0 {
        // the vacuum, exactly
        return Ok(DeformedState {
            spec,
            z,
            cutoff: 0,
            coeffs: vec![LogComplex::ONE],
            norm_log: 0.0,
            tail_bound: 0.0,
        });
    }

    let ln_r = r.ln();
    let n0 = initial_cutoff(&spec, ln_r, r, max_cutoff);

    // Unnormalized log-coefficients u_n = n ln|z| - ln(n!)/2 - ln|[f(n)]!|,
    // built incrementally (the factorial magnitude is a running sum of
    // ln|f(m)|).
    let mut u: Vec<f64> = Vec::with_capacity(n0 + 1);
    u.push(0.0);
    let mut lf = CompensatedSum::new();
    let mut u_max = 0.0f64;
    let ln_tol = tol.ln();

    let mut fill_to = n0;
    loop {
        while u.len() <= fill_to {
            let n = u.len();
            let nf = n as f64;
            lf.add(spec.ln_f_magnitude(n));
            let un = nf * ln_r - 0.5 * ln_factorial(n) - lf.value();
            u.push(un);
            if un > u_max {
                u_max = un;
            }
        }
        if converged(&spec, &u, u_max, ln_r, ln_tol) {
            break;
        }
        if fill_to >= max_cutoff {
            return Err(Error::Convergence(format!(
                "cutoff cap {max_cutoff} reached before the tail bound fell below {tol} \
                 (|z| = {r}, {spec:?})"
            )));
        }
        fill_to = (fill_to * 2).min(max_cutoff);
    }

    // Second pass, anchored at the true maximum: running compensated norm
    // prefix sums, so the overshoot trim below costs O(1) per step.
    let mut acc = CompensatedSum::new();
    let mut norm_prefix = Vec::with_capacity(u.len());
    for &un in &u {
        acc.add((2.0 * (un - u_max)).exp());
        norm_prefix.push(acc.value());
    }
    let tail_rel = |n_end: usize| {
        let r_sup = sup_ratio(&spec, n_end, ln_r);
        if r_sup >= 1.0 {
            return f64::INFINITY;
        }
        (2.0 * (u[n_end] - u_max)).exp() * r_sup / (1.0 - r_sup) / norm_prefix[n_end]
    };
    let certified = |n_end: usize| {
        n_end >= 8
            && u[n_end - 7..=n_end].iter().all(|&un| 2.0 * (un - u_max) < ln_tol)
            && tail_rel(n_end).ln() <= ln_tol
    };

    // Trim the geometric overshoot: walk the cutoff down while the
    // certification still holds.
    let mut n_end = u.len() - 1;
    while n_end >= 9 && certified(n_end - 1) {
        n_end -= 1;
    }
    let tail_bound = tail_rel(n_end);
    let norm_log = 2.0 * u_max + norm_prefix[n_end].ln();
    u.truncate(n_end + 1);

    let arg = z.arg();
    let half_norm_log = 0.5 * norm_log;
    let coeffs: Vec<LogComplex> = u
        .iter()
        .enumerate()
        .map(|(n, &un)| {
            let phase = match spec {
                Nonlinearity::BetaImaginary { beta } => {
                    wrap_phase(n as f64 * arg - beta * (n as u64 * (n as u64 + 1) / 2) as f64)
                }
                _ => wrap_phase(n as f64 * arg),
            };
            LogComplex { log_magnitude: un - half_norm_log, phase }
        })
        .collect();

    Ok(DeformedState { spec, z, cutoff: n_end, coeffs, norm_log, tail_bound })
}

/// The state a canonical coherent state |z> evolves into after time t in a
/// Kerr medium: coefficient-by-coefficient the BetaImaginary(2t) state.
pub fn kerr_evolve(z: Complex64, t: f64, tol: f64) -> Result<DeformedState> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("t must be finite, got {t}")));
    }
    build_state(Nonlinearity::BetaImaginary { beta: 2.0 * t }, z, tol)
}

/// Starting cutoff: four times a cheap estimate of where the probability
/// terms peak, floored at 32.
fn initial_cutoff(spec: &Nonlinearity, ln_r: f64, r: f64, max_cutoff: usize) -> usize {
    let peak = match *spec {
        Nonlinearity::LambdaExp { lambda } => {
            // harmonious mean x/(1-x); a negative lambda pushes the peak
            // out to lambda/ln|z|
            let x = r * r;
            let mean = x / (1.0 - x);
            let shift = if lambda < 0.0 { lambda / ln_r } else { 0.0 };
            mean.max(shift)
        }
        _ => {
            // increments d(n) = ln|z| - ln(n)/2 - ln|f(n)| are decreasing;
            // double until they go negative
            let d = |n: usize| ln_r - 0.5 * (n as f64).ln() - spec.ln_f_magnitude(n);
            let mut n = 1usize;
            while d(n) > 0.0 && n < max_cutoff {
                n *= 2;
            }
            n as f64
        }
    };
    ((4.0 * peak).ceil() as usize).clamp(32, max_cutoff.max(32))
}

/// Supremum of the term ratio t_{m+1}/t_m over all m >= n: certifies the
/// geometric tail bound. Increments are decreasing in every family except
/// LambdaExp, whose ratio climbs toward |z|^2.
fn sup_ratio(spec: &Nonlinearity, n: usize, ln_r: f64) -> f64 {
    match *spec {
        Nonlinearity::LambdaExp { lambda } => {
            (2.0 * (ln_r + (-lambda).max(0.0) / n as f64)).exp().min(1.0)
        }
        _ => {
            let m = n + 1;
            (2.0 * (ln_r - 0.5 * (m as f64).ln() - spec.ln_f_magnitude(m))).exp()
        }
    }
}

/// Check the two-part stopping rule on the prefix u[..=N]: the last 8
/// probability terms are below tol times the running maximum, and the
/// geometric tail bound relative to the norm is below tol.
fn converged(spec: &Nonlinearity, u: &[f64], u_max: f64, ln_r: f64, ln_tol: f64) -> bool {
    let n_end = u.len() - 1;
    if n_end < 8 {
        return false;
    }
    if u[n_end - 7..].iter().any(|&un| 2.0 * (un - u_max) >= ln_tol) {
        return false;
    }
    let r_sup = sup_ratio(spec, n_end, ln_r);
    if r_sup >= 1.0 {
        return false;
    }
    let mut norm_scaled = CompensatedSum::new();
    for &un in u {
        norm_scaled.add((2.0 * (un - u_max)).exp());
    }
    let tail_rel = (2.0 * (u[n_end] - u_max)).exp() * r_sup / (1.0 - r_sup) / norm_scaled.value();
    tail_rel.ln() <= ln_tol
}
