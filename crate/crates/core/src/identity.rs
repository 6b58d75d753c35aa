//! Resolution-of-identity machinery for the q-exponential family: the
//! generalized exponential, Hankel-Hadamard positivity, the log-normal
//! weight function sigma, and numerical recovery of its Stieltjes moments.

use crate::error::{Error, Result};
use crate::math::{ln_factorial, CompensatedSum};
use crate::quad::integrate;
use serde::{Deserialize, Serialize};

/// A determinant in sign/log form; values reach e^938 at size 8, far
/// beyond f64 range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogDet {
    /// -1, 0, or 1.
    pub sign: i8,
    /// ln |det|; -inf when sign is 0.
    pub ln_abs: f64,
}

impl LogDet {
    /// The determinant as an f64 (may overflow to inf).
    pub fn value(&self) -> f64 {
        self.sign as f64 * self.ln_abs.exp()
    }
}

/// sigma(x; 1, q^-2) sampled on a grid of x values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightFunctionSample {
    pub q: f64,
    /// delta = ln q^2.
    pub delta: f64,
    pub xs: Vec<f64>,
    pub sigma: Vec<f64>,
}

/// Numerically recovered moments of sigma/q^4 against the exact targets
/// n! q^{2n(n+1)}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentCheckReport {
    pub q: f64,
    pub orders: Vec<usize>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub rel_errors: Vec<f64>,
}

const MAX_SERIES_TERMS: usize = 5_000_000;

/// The generalized exponential eps_q(z) = sum z^n / (n! q^{n(n+1)}).
///
/// q = 1 recovers exp(z). Real z of either sign is accepted; the series
/// converges everywhere for q >= 1.
pub fn generalized_exp(q: f64, z: f64, tol: f64) -> Result<f64> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::Domain(format!("generalized_exp requires q >= 1, got {q}")));
    }
    if !z.is_finite() {
        return Err(Error::Domain(format!("z must be finite, got {z}")));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Domain(format!("tol must be in (0, 1), got {tol}")));
    }
    if q == 1.0 {
        return Ok(z.exp());
    }
    if z == 0.0 {
        return Ok(1.0);
    }

    // ln of |term_n|, built incrementally; increments are strictly
    // decreasing, so the terms rise to one peak and then fall.
    let ln_az = z.abs().ln();
    let lnq = q.ln();
    let ln_tol = tol.ln();
    let mut ln_terms = vec![0.0f64];
    let mut acc = CompensatedSum::new();
    let mut ln_max = 0.0f64;
    loop {
        let n = ln_terms.len();
        acc.add(ln_az - (n as f64).ln() - 2.0 * (n as f64) * lnq);
        let lt = acc.value();
        ln_terms.push(lt);
        ln_max = ln_max.max(lt);
        // past the peak and negligible against it: the partial sum is at
        // least e^{ln_max}, so the spec's term < tol * partial follows
        if lt < ln_terms[n - 1] && lt - ln_max < ln_tol - 5.0 {
            break;
        }
        if n >= MAX_SERIES_TERMS {
            return Err(Error::Convergence(format!(
                "generalized_exp series did not settle within {MAX_SERIES_TERMS} terms \
                 (q = {q}, z = {z})"
            )));
        }
    }

    let mut sum = CompensatedSum::new();
    for (n, &lt) in ln_terms.iter().enumerate() {
        let sign = if z < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
        sum.add(sign * (lt - ln_max).exp());
    }
    Ok(ln_max.exp() * sum.value())
}

/// Both sides of the derivative identity d/dz eps_q(z) = q^-2 eps_q(q^-2 z):
/// a central difference on the left, the exact right-hand side on the right.
/// The caller asserts |lhs - rhs| = O(h^2).
pub fn generalized_exp_derivative_check(q: f64, z: f64, h: f64) -> Result<(f64, f64)> {
    if !(z > h && h > 0.0) {
        return Err(Error::Domain(format!("need z > h > 0, got z = {z}, h = {h}")));
    }
    let tol = 1e-14;
    let lhs = (generalized_exp(q, z + h, tol)? - generalized_exp(q, z - h, tol)?) / (2.0 * h);
    let rhs = generalized_exp(q, z / (q * q), tol)? / (q * q);
    Ok((lhs, rhs))
}

/// Leading principal minors of the two Hankel-Hadamard matrices
/// h0(i,j) = x_{i+j-2} and h1(i,j) = x_{i+j-1} (1-based i, j) built from
/// the moment sequence x_k = k! q^{2k(k+1)}.
///
/// Every minor must be positive for the Stieltjes moment problem behind
/// the resolution of identity to be solvable. Returned in sign/log form;
/// the raw determinants overflow f64 from size 7 on.
pub fn hankel_hadamard_minors(q: f64, size: usize) -> Result<(Vec<LogDet>, Vec<LogDet>)> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::Domain(format!("hankel_hadamard_minors requires q >= 1, got {q}")));
    }
    if size < 1 || size > 8 {
        return Err(Error::Domain(format!("size must be in 1..=8, got {size}")));
    }
    let lnq = q.ln();
    let lx = |k: usize| ln_factorial(k) + 2.0 * (k * (k + 1)) as f64 * lnq;
    let minors = |off: usize| -> Vec<LogDet> {
        // scale row i and column j by exp(-l(2i+off)/2 - l(2j+off)/2):
        // the scaled matrix R has unit diagonal and O(1) entries, and
        // det H_k = det R_k * exp(sum_{i<k} l(2i+off))
        let r: Vec<Vec<f64>> = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| (lx(i + j + off) - 0.5 * (lx(2 * i + off) + lx(2 * j + off))).exp())
                    .collect()
            })
            .collect();
        let ln_r_minors = cholesky_ln_minors(&r).unwrap_or_else(|| lu_ln_minors(&r));
        let mut scale = 0.0;
        ln_r_minors
            .into_iter()
            .enumerate()
            .map(|(i, m)| {
                scale += lx(2 * i + off);
                LogDet { sign: m.sign, ln_abs: m.ln_abs + scale }
            })
            .collect()
    };
    Ok((minors(0), minors(1)))
}

/// All leading minors of a symmetric positive definite matrix from one
/// Cholesky factorization; None if a pivot fails positivity.
fn cholesky_ln_minors(r: &[Vec<f64>]) -> Option<Vec<LogDet>> {
    let n = r.len();
    let mut l = vec![vec![0.0f64; n]; n];
    let mut minors = Vec::with_capacity(n);
    let mut ln_det = 0.0;
    for j in 0..n {
        let mut d = r[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if d <= 0.0 {
            return None;
        }
        l[j][j] = d.sqrt();
        for i in j + 1..n {
            let mut s = r[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / l[j][j];
        }
        ln_det += d.ln();
        minors.push(LogDet { sign: 1, ln_abs: ln_det });
    }
    Some(minors)
}

/// Fallback: one partially pivoted LU per leading size. Handles the
/// indefinite case the Cholesky path rejects.
fn lu_ln_minors(r: &[Vec<f64>]) -> Vec<LogDet> {
    let n = r.len();
    (1..=n)
        .map(|k| {
            let mut a: Vec<Vec<f64>> = r[..k].iter().map(|row| row[..k].to_vec()).collect();
            let mut sign = 1i8;
            let mut ln_abs = 0.0f64;
            for col in 0..k {
                let pivot_row = (col..k)
                    .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                    .unwrap();
                if a[pivot_row][col] == 0.0 {
                    return LogDet { sign: 0, ln_abs: f64::NEG_INFINITY };
                }
                if pivot_row != col {
                    a.swap(pivot_row, col);
                    sign = -sign;
                }
                let p = a[col][col];
                if p < 0.0 {
                    sign = -sign;
                }
                ln_abs += p.abs().ln();
                for i in col + 1..k {
                    let f = a[i][col] / p;
                    for j in col..k {
                        a[i][j] -= f * a[col][j];
                    }
                }
            }
            LogDet { sign, ln_abs }
        })
        .collect()
}

/// ln of int_{a..}^{..b} e^{g(t)} dt for the unimodal
/// g(t) = t - e^t - (t - mu)^2 / (4 delta): locate the mode by bisection
/// on g' (strictly decreasing), clip the window where g drops 60 e-folds
/// below the peak, and integrate the rescaled bump.
fn ln_bump_integral(mu: f64, delta: f64, rel_tol: f64) -> Result<f64> {
    let g = |t: f64| t - t.exp() - (t - mu) * (t - mu) / (4.0 * delta);
    let gp = |t: f64| 1.0 - t.exp() - (t - mu) / (2.0 * delta);

    let mut lo = mu.min(0.0) - 1.0;
    while gp(lo) <= 0.0 {
        lo -= 1.0f64.max(lo.abs() / 2.0);
    }
    let mut hi = mu.max(0.0) + 1.0;
    while gp(hi) >= 0.0 {
        hi += 1.0f64.max(hi.abs() / 2.0);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if gp(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_star = 0.5 * (lo + hi);
    let g_star = g(t_star);

    let mut a = t_star;
    while g(a) > g_star - 60.0 {
        a -= 1.0;
    }
    let mut b = t_star;
    while g(b) > g_star - 60.0 {
        b += 1.0;
    }
    let bump = integrate(|t| (g(t) - g_star).exp(), a, b, rel_tol)?;
    Ok(g_star + bump.value.ln())
}

/// ln sigma(x; 1, q^-2); shared by the weight itself and the moment
/// integrals, which need the far tail at full relative accuracy.
fn sigma_log(q: f64, x: f64, quad_tol: f64) -> Result<f64> {
    let delta = 2.0 * q.ln();
    let mu = x.ln() - 2.0 * q.ln();
    let ln_pref = 4.0 * q.ln()
        - std::f64::consts::LN_2
        - 0.5 * (std::f64::consts::PI * delta).ln()
        - x.ln();
    Ok(ln_pref + ln_bump_integral(mu, delta, quad_tol)?)
}

/// The resolution-of-identity weight
/// sigma(x; 1, q^-2) = q^4/(2 sqrt(pi delta) x) *
///   int_0^inf e^-u exp(-(ln(x/(q^2 u)))^2 / (4 delta)) du,  delta = ln q^2,
/// evaluated after the substitution u = e^t to the requested relative
/// tolerance.
pub fn sigma_weight(q: f64, x: f64, quad_tol: f64) -> Result<f64> {
    check_weight_args(q, x, quad_tol)?;
    Ok(sigma_log(q, x, quad_tol)?.exp())
}

/// sigma on a grid of x values, packaged for the weight-curve output.
pub fn weight_samples(q: f64, xs: &[f64], quad_tol: f64) -> Result<WeightFunctionSample> {
    let sigma = xs.iter().map(|&x| sigma_weight(q, x, quad_tol)).collect::<Result<Vec<_>>>()?;
    Ok(WeightFunctionSample { q, delta: 2.0 * q.ln(), xs: xs.to_vec(), sigma })
}

fn check_weight_args(q: f64, x: f64, quad_tol: f64) -> Result<()> {
    if !(q > 1.0) || !q.is_finite() {
        return Err(Error::Domain(format!("weight requires q > 1, got {q}")));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("weight requires x > 0, got {x}")));
    }
    if !(quad_tol > 0.0 && quad_tol < 1.0) {
        return Err(Error::Domain(format!("quad_tol must be in (0, 1), got {quad_tol}")));
    }
    Ok(())
}

/// The experimental general-m Mittag-Leffler weight in the source-paper
/// convention (0 < q < 1, m >= 1), whose moments are
/// Gamma(mn+1) q^{-mn(n-1)}. m = 1 at q -> q^-2 recovers sigma up to the
/// q^4 x-rescaling of Eq-level packaging:
/// sigma(x; 1, q^-2) = mittag_leffler_weight(q^-2, 1, x q^-4).
pub fn mittag_leffler_weight(q: f64, m: u32, x: f64, quad_tol: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!(
            "mittag_leffler_weight uses the source convention 0 < q < 1, got {q}"
        )));
    }
    if m < 1 {
        return Err(Error::Domain("mittag_leffler_weight requires m >= 1".into()));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("weight requires x > 0, got {x}")));
    }
    if !(quad_tol > 0.0 && quad_tol < 1.0) {
        return Err(Error::Domain(format!("quad_tol must be in (0, 1), got {quad_tol}")));
    }
    let mf = m as f64;
    let delta = mf * (1.0 / q).ln();
    let delta_inner = delta / (mf * mf);
    let mu = x.ln() / mf - q.ln();
    let ln_pref =
        -std::f64::consts::LN_2 - 0.5 * (std::f64::consts::PI * delta).ln() - x.ln();
    Ok((ln_pref + ln_bump_integral(mu, delta_inner, quad_tol)?).exp())
}

/// int_0^inf e^-u u^n du by the same engine (the flat-weight W(x) = 1/pi
/// special case of the moment problem); equals n! exactly.
pub fn flat_weight_moment(n: usize, quad_tol: f64) -> Result<f64> {
    if !(quad_tol > 0.0 && quad_tol < 1.0) {
        return Err(Error::Domain(format!("quad_tol must be in (0, 1), got {quad_tol}")));
    }
    // u = e^t: F(t) = (n+1) t - e^t peaks at t = ln(n+1)
    let f = |t: f64| (n as f64 + 1.0) * t - t.exp();
    let t_star = ((n + 1) as f64).ln();
    let f_star = f(t_star);
    let mut a = t_star;
    while f(a) > f_star - 60.0 {
        a -= 1.0;
    }
    let mut b = t_star;
    while f(b) > f_star - 60.0 {
        b += 1.0;
    }
    let bump = integrate(|t| (f(t) - f_star).exp(), a, b, quad_tol)?;
    Ok(f_star.exp() * bump.value)
}

/// Integrate sigma(y)/q^4 * y^n for n = 0..=n_max and compare with the
/// exact Stieltjes targets n! q^{2n(n+1)}.
pub fn verify_moments(q: f64, n_max: usize, quad_tol: f64) -> Result<MomentCheckReport> {
    check_weight_args(q, 1.0, quad_tol)?;
    if n_max > 12 {
        return Err(Error::Domain(format!(
            "n_max must be <= 12 (targets leave safe dynamic range beyond), got {n_max}"
        )));
    }
    // the inner quadrature must out-resolve the outer one
    let inner_tol = (quad_tol * 1e-3).max(5e-15);
    let delta = 2.0 * q.ln();
    let mut lhs = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        // y = e^s; F(s) = ln sigma(e^s) - ln q^4 + (n+1) s
        let f = |s: f64| -> Result<f64> {
            Ok(sigma_log(q, s.exp(), inner_tol)? - 4.0 * q.ln() + (n as f64 + 1.0) * s)
        };
        // the integrand peaks near s = 2 delta n + 2 ln q; scan a generous
        // bracket for the true mode, then widen until 50 e-folds down
        let center = 2.0 * delta * n as f64 + 2.0 * q.ln();
        let half = 20.0 * delta.sqrt() + 15.0;
        let mut s_max = center;
        let mut f_max = f64::NEG_INFINITY;
        for k in 0..=160 {
            let s = center - half + 2.0 * half * k as f64 / 160.0;
            let v = f(s)?;
            if v > f_max {
                f_max = v;
                s_max = s;
            }
        }
        let mut a = s_max;
        while f(a)? > f_max - 50.0 {
            a -= 1.0;
        }
        let mut b = s_max;
        while f(b)? > f_max - 50.0 {
            b += 1.0;
        }
        let bump = integrate(
            |s| match f(s) {
                Ok(v) => (v - f_max).exp(),
                Err(_) => f64::NAN,
            },
            a,
            b,
            quad_tol,
        )?;
        if !bump.value.is_finite() {
            return Err(Error::Quadrature(format!(
                "inner weight quadrature failed inside moment order {n} (q = {q})"
            )));
        }
        lhs.push(f_max.exp() * bump.value);
    }
    Ok(assemble_report(q, n_max, lhs))
}

/// Fubini cross-check: with the integration order swapped, the inner
/// Gaussian y-integral is exact and the moment collapses to
/// q^{2n(n+1)} int e^-u u^n du, leaving only the flat integral to
/// quadrature.
pub fn verify_moments_fubini(q: f64, n_max: usize, quad_tol: f64) -> Result<MomentCheckReport> {
    check_weight_args(q, 1.0, quad_tol)?;
    if n_max > 12 {
        return Err(Error::Domain(format!(
            "n_max must be <= 12 (targets leave safe dynamic range beyond), got {n_max}"
        )));
    }
    let mut lhs = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let scale = (2.0 * (n * (n + 1)) as f64 * q.ln()).exp();
        lhs.push(flat_weight_moment(n, quad_tol)? * scale);
    }
    Ok(assemble_report(q, n_max, lhs))
}

fn assemble_report(q: f64, n_max: usize, lhs: Vec<f64>) -> MomentCheckReport {
    let orders: Vec<usize> = (0..=n_max).collect();
    let rhs: Vec<f64> = orders
        .iter()
        .map(|&n| (ln_factorial(n) + 2.0 * (n * (n + 1)) as f64 * q.ln()).exp())
        .collect();
    let rel_errors: Vec<f64> =
        lhs.iter().zip(&rhs).map(|(&l, &r)| (l - r).abs() / r).collect();
    MomentCheckReport { q, orders, lhs, rhs, rel_errors }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generalized_exp_reference_values() {
        // expected values computed with mpmath at 50 digits
        let cases = [
            (1.0, 3.0, 20.085_536_923_187_668),
            (2.0, 1.0, 1.257_853_229_848_357_9),
            (2.0, 0.5, 1.126_958_213_746_790_2),
            (2.0, 3.0, 1.821_414_353_349_476_3),
            (1.5, 2.0, 2.074_950_221_500_614),
            (3.0, 10.0, 2.180_011_948_975_327_3),
            (2.0, -2.0, 0.530_925_114_701_211_79),
        ];
        for (q, z, expect) in cases {
            let v = generalized_exp(q, z, 1e-14).unwrap();
            assert!((v - expect).abs() < 1e-13 * expect.abs(), "eps_{q}({z}): {v} vs {expect}");
        }
        assert_eq!(generalized_exp(7.0, 0.0, 1e-12).unwrap(), 1.0);
        assert!(generalized_exp(0.5, 1.0, 1e-12).is_err());
    }

    #[test]
    fn derivative_identity_second_order() {
        let (lhs, rhs) = generalized_exp_derivative_check(2.0, 1.0, 1e-4).unwrap();
        assert!((lhs - rhs).abs() < 1e-6);
        // halving h divides the defect by about 4
        let err = |h: f64| {
            let (l, r) = generalized_exp_derivative_check(1.5, 0.5, h).unwrap();
            (l - r).abs()
        };
        let ratio = err(1e-3) / err(5e-4);
        assert!((ratio - 4.0).abs() < 0.3, "convergence ratio {ratio}");
        // q = 1: both sides are just e^z
        let (l, r) = generalized_exp_derivative_check(1.0, 1.0, 1e-5).unwrap();
        assert!((l - std::f64::consts::E).abs() < 1e-9);
        assert!((r - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn hankel_plain_factorial_case() {
        // q = 1: x_k = k!, h0 = [[1,1],[1,2]], minors 1, 1
        let (m0, m1) = hankel_hadamard_minors(1.0, 2).unwrap();
        assert_eq!(m0[0].sign, 1);
        assert!(m0[0].ln_abs.abs() < 1e-12);
        assert!(m0[1].ln_abs.abs() < 1e-10);
        // h1 = [[1,2],[2,6]]: minors 1, 2
        assert!(m1[0].ln_abs.abs() < 1e-12);
        assert!((m1[1].ln_abs - 2.0f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn hankel_reference_minors() {
        // expected values computed with mpmath at 50 digits
        let q2_off0 = [
            0.0,
            8.979_164_648_964_708_7,
            39.833_638_408_769_511,
            104.581_246_588_061_76,
            214.939_815_059_503_52,
            382.475_465_165_788_08,
        ];
        let q2_off1 = [
            2.772_588_722_239_781_2,
            21.157_320_910_487_728,
            67.480_269_202_024_694,
            153.580_063_230_765_56,
            291.088_090_086_335_84,
            491.519_418_414_373_35,
        ];
        let (m0, m1) = hankel_hadamard_minors(2.0, 6).unwrap();
        for k in 0..6 {
            assert_eq!(m0[k].sign, 1, "off0 minor {k} sign");
            assert_eq!(m1[k].sign, 1, "off1 minor {k} sign");
            assert!(
                (m0[k].ln_abs - q2_off0[k]).abs() < 1e-9 * (1.0 + q2_off0[k]),
                "off0 minor {k}: {} vs {}",
                m0[k].ln_abs,
                q2_off0[k]
            );
            assert!(
                (m1[k].ln_abs - q2_off1[k]).abs() < 1e-9 * (1.0 + q2_off1[k]),
                "off1 minor {k}: {} vs {}",
                m1[k].ln_abs,
                q2_off1[k]
            );
        }
        // spot checks at the ends of the other frozen tables
        let (m0, m1) = hankel_hadamard_minors(1.1, 6).unwrap();
        assert!((m0[5].ln_abs - 77.901_268_991_091).abs() < 1e-9 * 78.0);
        assert!((m1[5].ln_abs - 100.185_685_643_661_61).abs() < 1e-9 * 100.0);
        let (m0, m1) = hankel_hadamard_minors(4.0, 6).unwrap();
        assert!((m0[5].ln_abs - 729.291_514_586_573_8).abs() < 1e-9 * 729.0);
        assert!((m1[5].ln_abs - 938.165_946_789_885_12).abs() < 1e-9 * 938.0);
    }

    #[test]
    fn hankel_rejects_bad_args() {
        assert!(hankel_hadamard_minors(0.9, 3).is_err());
        assert!(hankel_hadamard_minors(2.0, 0).is_err());
        assert!(hankel_hadamard_minors(2.0, 9).is_err());
    }

    #[test]
    fn lu_fallback_matches_cholesky_when_pd() {
        let r = vec![
            vec![1.0, 0.3, 0.1],
            vec![0.3, 1.0, 0.2],
            vec![0.1, 0.2, 1.0],
        ];
        let chol = cholesky_ln_minors(&r).unwrap();
        let lu = lu_ln_minors(&r);
        for (c, l) in chol.iter().zip(&lu) {
            assert_eq!(l.sign, 1);
            assert!((c.ln_abs - l.ln_abs).abs() < 1e-12);
        }
        // indefinite matrix: Cholesky refuses, LU signs it
        let ind = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert!(cholesky_ln_minors(&ind).is_none());
        let lu = lu_ln_minors(&ind);
        assert_eq!(lu[1].sign, -1);
        assert!((lu[1].ln_abs - 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn sigma_reference_values() {
        // expected values computed with mpmath at 25 digits
        let cases = [
            (2.0, 0.5, 4.426_508_004_088_802_2),
            (2.0, 2.0, 1.540_440_756_858_195),
            (2.0, 10.0, 0.252_401_453_160_400_21),
            (5.0, 1.0, 55.073_409_256_877_341),
            (10.0, 1e-4, 8_891.110_283_666_495_5),
            (10.0, 1e4, 0.035_144_592_396_735_56),
        ];
        for (q, x, expect) in cases {
            let v = sigma_weight(q, x, 1e-10).unwrap();
            assert!((v - expect).abs() < 1e-8 * expect, "sigma({q}, {x}): {v} vs {expect}");
        }
    }

    #[test]
    fn sigma_positive_on_wide_grid() {
        for q in [2.0, 5.0, 10.0] {
            for k in 0..=40 {
                let x = 10f64.powf(-4.0 + 8.0 * k as f64 / 40.0);
                let v = sigma_weight(q, x, 1e-8).unwrap();
                assert!(v > 0.0, "sigma({q}, {x}) = {v}");
            }
        }
    }

    #[test]
    fn weight_samples_package() {
        let ws = weight_samples(2.0, &[0.5, 2.0, 10.0], 1e-9).unwrap();
        assert_eq!(ws.xs.len(), ws.sigma.len());
        assert!((ws.delta - 4.0f64.ln()).abs() < 1e-15);
        assert!((ws.sigma[1] - 1.540_440_756_858_195).abs() < 1e-7);
        assert!(sigma_weight(1.0, 1.0, 1e-9).is_err());
        assert!(sigma_weight(2.0, -1.0, 1e-9).is_err());
    }

    #[test]
    fn mittag_leffler_general_m() {
        // expected values computed with mpmath at 20 digits
        let v = mittag_leffler_weight(0.7, 2, 0.5, 1e-10).unwrap();
        assert!((v - 0.314_042_051_500_030_2).abs() < 1e-8 * v);
        let v = mittag_leffler_weight(0.7, 2, 3.0, 1e-10).unwrap();
        assert!((v - 0.033_361_050_208_704_133).abs() < 1e-8 * v);
        // m = 1 at q -> q^-2 ties back to sigma exactly
        for x in [0.3, 1.0, 7.0] {
            let s = sigma_weight(2.0, x, 1e-11).unwrap();
            let ml = mittag_leffler_weight(0.25, 1, x / 16.0, 1e-11).unwrap();
            assert!((s - ml).abs() < 1e-9 * s, "x = {x}: {s} vs {ml}");
        }
        assert!(mittag_leffler_weight(1.2, 1, 1.0, 1e-9).is_err());
        assert!(mittag_leffler_weight(0.7, 0, 1.0, 1e-9).is_err());
    }

    #[test]
    fn flat_moments_are_factorials() {
        for n in 0..=8 {
            let v = flat_weight_moment(n, 1e-12).unwrap();
            let expect = ln_factorial(n).exp();
            assert!((v - expect).abs() < 1e-10 * expect, "n = {n}: {v}");
        }
    }

    #[test]
    fn moment_recovery_small_orders() {
        let report = verify_moments(1.2, 3, 1e-9).unwrap();
        assert_eq!(report.orders, vec![0, 1, 2, 3]);
        // n = 3 target is 6 * 1.2^24
        let expect = 6.0 * 1.2f64.powi(24);
        assert!((report.rhs[3] - expect).abs() < 1e-10 * expect);
        for (n, err) in report.rel_errors.iter().enumerate() {
            assert!(*err < 1e-6, "order {n} rel error {err}");
        }
        assert!(verify_moments(1.5, 13, 1e-8).is_err());
    }

    #[test]
    fn fubini_mode_agrees() {
        let direct = verify_moments(1.5, 4, 1e-9).unwrap();
        let swapped = verify_moments_fubini(1.5, 4, 1e-10).unwrap();
        for n in 0..=4 {
            let (a, b) = (direct.lhs[n], swapped.lhs[n]);
            assert!((a - b).abs() < 1e-6 * b, "order {n}: {a} vs {b}");
            assert!(swapped.rel_errors[n] < 1e-8);
        }
    }

    #[test]
    fn report_round_trips_json() {
        let report = verify_moments_fubini(2.0, 2, 1e-10).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: MomentCheckReport = serde_json::from_str(&json).unwrap();
        assert_eq!(report, back);
    }
}
