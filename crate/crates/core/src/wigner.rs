//! Wigner distribution on phase space via the displaced-parity form
//! W(x, p) = (2/pi) sum_k (-1)^k |<k| D(-alpha) |psi>|^2 with alpha = x + ip.
//!
//! Displacement matrix elements come from the associated Laguerre degree
//! recurrence run per offset |n - k|, which stays stable where the naive
//! k-recurrence over rows loses all digits. Magnitudes are carried in log
//! form so the scheme survives mean fields of a few hundred photons.

use crate::error::{Error, Result};
use crate::math::{ln_factorial, CompensatedSum};
use crate::moments::{moment_set, quadrature_squeezing};
use crate::state::DeformedState;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Remaining overlap mass allowed before the parity series is declared
/// converged; bounds the series tail directly.
const PARITY_MASS_TOL: f64 = 1e-10;
/// Hard cap on the number of parity terms.
const PARITY_TERM_CAP: usize = 65_536;
/// Laguerre values are renormalized into log scale past this magnitude.
const RESCALE_AT: f64 = 1e100;

/// Rectangular phase-space grid, endpoints included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_x: usize,
    pub n_p: usize,
}

impl PhaseGrid {
    pub fn new(x_min: f64, x_max: f64, p_min: f64, p_max: f64, n_x: usize, n_p: usize) -> Result<Self> {
        if !(x_min < x_max) || !(p_min < p_max) || !x_min.is_finite() || !x_max.is_finite()
            || !p_min.is_finite() || !p_max.is_finite()
        {
            return Err(Error::Domain(format!(
                "grid extents must be finite with x_min < x_max and p_min < p_max, \
                 got x [{x_min}, {x_max}], p [{p_min}, {p_max}]"
            )));
        }
        if n_x < 2 || n_p < 2 {
            return Err(Error::Domain(format!("grid needs at least 2 points per axis, got {n_x} x {n_p}")));
        }
        Ok(PhaseGrid { x_min, x_max, p_min, p_max, n_x, n_p })
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.n_x)
    }

    pub fn ps(&self) -> Vec<f64> {
        linspace(self.p_min, self.p_max, self.n_p)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { b } else { a + step * i as f64 }).collect()
}

/// Wigner values on a grid plus negativity summaries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub grid: PhaseGrid,
    /// values[i][j] = W(xs[i], ps[j]).
    pub values: Vec<Vec<f64>>,
    pub min_value: f64,
    pub min_location: (f64, f64),
    /// Trapezoid integral of max(-W, 0) over the grid.
    pub negative_volume: f64,
}

/// The state lowered to plain complex amplitudes, with its mean photon
/// number, shared by every grid point.
struct OverlapEngine {
    c: Vec<Complex64>,
    mean_n: f64,
}

impl OverlapEngine {
    fn new(state: &DeformedState) -> Self {
        let c: Vec<Complex64> = (0..=state.cutoff).map(|n| state.coeff_value(n)).collect();
        let mut mean = CompensatedSum::new();
        for (n, ck) in c.iter().enumerate() {
            mean.add(n as f64 * ck.norm_sqr());
        }
        OverlapEngine { c, mean_n: mean.value() }
    }

    /// o_k = <k| D(beta) |psi> for k = 0..=k_upper. Each entry is a finite
    /// sum over the state's Fock support; no truncation error beyond
    /// roundoff.
    fn overlaps(&self, beta: Complex64, k_upper: usize) -> Vec<Complex64> {
        let n_top = self.c.len() - 1;
        let mut o = vec![Complex64::ZERO; k_upper + 1];
        let x = beta.norm_sqr();
        if x < 1e-290 {
            // D(0) = identity
            let top = k_upper.min(n_top);
            o[..=top].copy_from_slice(&self.c[..=top]);
            return o;
        }
        let lnb = beta.norm().ln();

        // n = k + d branch: offsets d >= 0, Laguerre degree recurrence in k.
        // D_{k,k+d} = sqrt(k!/(k+d)!) (-conj beta)^d e^{-x/2} L_k^{(d)}(x)
        {
            let rot: Vec<Complex64> =
                (0..=n_top).map(|d| Complex64::from_polar(1.0, d as f64 * (-beta.conj()).arg())).collect();
            let mut lk = vec![1.0f64; n_top + 1];
            let mut lkm1 = vec![0.0f64; n_top + 1];
            let mut sc = vec![0.0f64; n_top + 1];
            let mut lnpref: Vec<f64> =
                (0..=n_top).map(|d| -0.5 * x + d as f64 * lnb - 0.5 * ln_factorial(d)).collect();
            for k in 0..=k_upper.min(n_top) {
                let d_avail = n_top - k;
                if k > 0 {
                    let kf = k as f64;
                    for d in 0..=d_avail {
                        let df = d as f64;
                        let lnew = ((2.0 * (kf - 1.0) + df + 1.0 - x) * lk[d]
                            - (kf - 1.0 + df) * lkm1[d])
                            / kf;
                        lkm1[d] = lk[d];
                        lk[d] = lnew;
                        lnpref[d] += 0.5 * (kf.ln() - (kf + df).ln());
                        if lk[d].abs() > RESCALE_AT {
                            let f = lk[d].abs();
                            lk[d] /= f;
                            lkm1[d] /= f;
                            sc[d] += f.ln();
                        }
                    }
                }
                let mut acc = Complex64::ZERO;
                for d in 0..=d_avail {
                    if let Some(amp) = log_amp(lnpref[d] + sc[d], lk[d]) {
                        acc += amp * rot[d] * self.c[k + d];
                    }
                }
                o[k] = acc;
            }
        }

        // k = n + e branch: offsets e >= 1, recurrence in n.
        // D_{n+e,n} = sqrt(n!/(n+e)!) beta^e e^{-x/2} L_n^{(e)}(x)
        if k_upper >= 1 {
            let rot: Vec<Complex64> =
                (0..=k_upper).map(|e| Complex64::from_polar(1.0, e as f64 * beta.arg())).collect();
            let mut ln_ = vec![1.0f64; k_upper + 1];
            let mut lnm1 = vec![0.0f64; k_upper + 1];
            let mut sc = vec![0.0f64; k_upper + 1];
            let mut lnpref: Vec<f64> =
                (0..=k_upper).map(|e| -0.5 * x + e as f64 * lnb - 0.5 * ln_factorial(e)).collect();
            for n in 0..=n_top.min(k_upper - 1) {
                let e_avail = k_upper - n;
                if n > 0 {
                    let nf = n as f64;
                    for e in 1..=e_avail {
                        let ef = e as f64;
                        let lnew = ((2.0 * (nf - 1.0) + ef + 1.0 - x) * ln_[e]
                            - (nf - 1.0 + ef) * lnm1[e])
                            / nf;
                        lnm1[e] = ln_[e];
                        ln_[e] = lnew;
                        lnpref[e] += 0.5 * (nf.ln() - (nf + ef).ln());
                        if ln_[e].abs() > RESCALE_AT {
                            let f = ln_[e].abs();
                            ln_[e] /= f;
                            lnm1[e] /= f;
                            sc[e] += f.ln();
                        }
                    }
                }
                let cn = self.c[n];
                if cn == Complex64::ZERO {
                    continue;
                }
                for e in 1..=e_avail {
                    if let Some(amp) = log_amp(lnpref[e] + sc[e], ln_[e]) {
                        o[n + e] += amp * rot[e] * cn;
                    }
                }
            }
        }
        o
    }

    fn wigner(&self, x: f64, p: f64) -> Result<f64> {
        let beta = -Complex64::new(x, p);
        let xarg = beta.norm_sqr();
        if xarg < 1e-290 {
            // exact parity identity at the origin
            let mut s = CompensatedSum::new();
            for (k, ck) in self.c.iter().enumerate() {
                let w2 = ck.norm_sqr();
                s.add(if k % 2 == 0 { w2 } else { -w2 });
            }
            return Ok(std::f64::consts::FRAC_2_PI * s.value());
        }
        // the displaced state carries about (sqrt(x) + sqrt(mean_n))^2 photons
        let target = (xarg.sqrt() + self.mean_n.sqrt()).powi(2) + 8.0;
        let mut k_upper = 64usize;
        while (k_upper as f64) <= target {
            k_upper *= 2;
        }
        loop {
            k_upper = k_upper.min(PARITY_TERM_CAP);
            let o = self.overlaps(beta, k_upper);
            let mut mass = CompensatedSum::new();
            let mut s = CompensatedSum::new();
            for (k, ok) in o.iter().enumerate() {
                let w2 = ok.norm_sqr();
                mass.add(w2);
                s.add(if k % 2 == 0 { w2 } else { -w2 });
            }
            if 1.0 - mass.value() < PARITY_MASS_TOL {
                return Ok(std::f64::consts::FRAC_2_PI * s.value());
            }
            if k_upper >= PARITY_TERM_CAP {
                return Err(Error::Convergence(format!(
                    "parity series at ({x}, {p}) still misses {:.3e} overlap mass at {PARITY_TERM_CAP} terms",
                    1.0 - mass.value()
                )));
            }
            k_upper *= 2;
        }
    }
}

/// Sign-safe exp(ln_mag) * l without overflow in either factor.
#[inline]
fn log_amp(ln_mag: f64, l: f64) -> Option<f64> {
    if l == 0.0 {
        return None;
    }
    let ln_amp = ln_mag + l.abs().ln();
    if ln_amp < -745.0 {
        return None;
    }
    Some(ln_amp.exp().copysign(l))
}

/// <k| D(-alpha) |psi>, the k-th Fock amplitude of the state displaced
/// back by alpha.
pub fn displacement_overlap(state: &DeformedState, alpha: Complex64, k: usize) -> Result<Complex64> {
    if k > PARITY_TERM_CAP {
        return Err(Error::Domain(format!("overlap index {k} beyond the {PARITY_TERM_CAP} cap")));
    }
    let engine = OverlapEngine::new(state);
    Ok(engine.overlaps(-alpha, k)[k])
}

/// W at one phase-space point, alpha = x + i p.
pub fn wigner_at(state: &DeformedState, x: f64, p: f64) -> Result<f64> {
    OverlapEngine::new(state).wigner(x, p)
}

/// W over a full grid with negativity summaries. Rows are independent and
/// evaluated in parallel when the `parallel` feature is on.
pub fn wigner_grid(state: &DeformedState, grid: PhaseGrid) -> Result<WignerGrid> {
    let engine = OverlapEngine::new(state);
    let xs = grid.xs();
    let ps = grid.ps();

    let row = |&xv: &f64| -> Result<Vec<f64>> {
        ps.iter()
            .map(|&pv| {
                engine.wigner(xv, pv).map_err(|e| {
                    Error::Convergence(format!("grid point ({xv}, {pv}): {e}"))
                })
            })
            .collect()
    };
    #[cfg(feature = "parallel")]
    let values: Vec<Vec<f64>> = xs.par_iter().map(row).collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let values: Vec<Vec<f64>> = xs.iter().map(row).collect::<Result<_>>()?;

    let mut min_value = f64::INFINITY;
    let mut min_location = (xs[0], ps[0]);
    for (i, rowv) in values.iter().enumerate() {
        for (j, &w) in rowv.iter().enumerate() {
            debug_assert!(w.abs() <= std::f64::consts::FRAC_2_PI + 1e-9, "pure-state bound violated: {w}");
            if w < min_value {
                min_value = w;
                min_location = (xs[i], ps[j]);
            }
        }
    }

    let dx = (grid.x_max - grid.x_min) / (grid.n_x - 1) as f64;
    let dp = (grid.p_max - grid.p_min) / (grid.n_p - 1) as f64;
    let edge = |i: usize, n: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
    let mut neg = CompensatedSum::new();
    for (i, rowv) in values.iter().enumerate() {
        let wi = edge(i, grid.n_x);
        for (j, &w) in rowv.iter().enumerate() {
            if w < 0.0 {
                neg.add(-w * wi * edge(j, grid.n_p));
            }
        }
    }

    Ok(WignerGrid {
        grid,
        values,
        min_value,
        min_location,
        negative_volume: neg.value() * dx * dp,
    })
}

/// A square grid sized from the state itself: centered on the mean field,
/// extending five Wigner widths (plus a vacuum unit) per quadrature.
pub fn auto_grid(state: &DeformedState, points_per_axis: usize) -> Result<PhaseGrid> {
    let ms = moment_set(state);
    let (s_x, s_p) = quadrature_squeezing(&ms);
    let sig_x = ((s_x + 0.5) / 2.0).sqrt();
    let sig_p = ((s_p + 0.5) / 2.0).sqrt();
    let (cx, cp) = (ms.a1.re, ms.a1.im);
    let (hx, hp) = (5.0 * sig_x + 1.0, 5.0 * sig_p + 1.0);
    PhaseGrid::new(cx - hx, cx + hx, cp - hp, cp + hp, points_per_axis, points_per_axis)
}

/// Small-cutoff reference evaluation through the derivative double sum
/// W = (2/pi) e^{2|a|^2} sum_{n,m} c_n conj(c_m) (-1)^{n+m}
///       / (2^{n+m} sqrt(n! m!)) d^n_z d^m_zbar e^{-4 z zbar} |_{z=a},
/// with the mixed derivatives expanded into Leibniz polynomials. Exact
/// but explosive in the cutoff; serves as an independent cross-check of
/// the parity engine.
pub fn wigner_reference_small(state: &DeformedState, x: f64, p: f64) -> Result<f64> {
    if state.cutoff > 8 {
        return Err(Error::Domain(format!(
            "reference form is limited to cutoff <= 8, state has {}",
            state.cutoff
        )));
    }
    let a = Complex64::new(x, p);
    let c: Vec<Complex64> = (0..=state.cutoff).map(|n| state.coeff_value(n)).collect();
    let fact: Vec<f64> = {
        let mut f = vec![1.0f64];
        for k in 1..=8 {
            f.push(f[k - 1] * k as f64);
        }
        f
    };
    // d^n_z d^m_zbar e^{-4 z zbar}
    //   = e^{-4|a|^2} (-4)^m sum_j C(n,j) m!/(m-j)! a^{m-j} (-4 conj a)^{n-j}
    let deriv = |n: usize, m: usize| -> Complex64 {
        let mut s = Complex64::ZERO;
        for j in 0..=n.min(m) {
            let binom = fact[n] / (fact[j] * fact[n - j]);
            let fall = fact[m] / (fact[m - j]);
            s += binom * fall * a.powu((m - j) as u32) * (-4.0 * a.conj()).powu((n - j) as u32);
        }
        (-4.0f64).powi(m as i32) * (-4.0 * a.norm_sqr()).exp() * s
    };
    let mut total = Complex64::ZERO;
    for (n, cn) in c.iter().enumerate() {
        for (m, cm) in c.iter().enumerate() {
            let sign = if (n + m) % 2 == 0 { 1.0 } else { -1.0 };
            let pref = sign / (2.0f64.powi((n + m) as i32) * (fact[n] * fact[m]).sqrt());
            total += cn * cm.conj() * pref * deriv(n, m);
        }
    }
    Ok(std::f64::consts::FRAC_2_PI * (2.0 * a.norm_sqr()).exp() * total.re)
}
