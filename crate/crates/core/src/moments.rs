//! Ladder-operator moments of a deformed state and the scalar
//! non-classicality criteria built from them: quadrature squeezing,
//! amplitude-squared squeezing, Mandel Q, g2(0), and the A3 parameter.

use crate::math::{complex_pair, ln_factorial, CompensatedSum};
use crate::state::DeformedState;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// The moments every criterion consumes: ⟨a^k⟩ for k = 1..4, the factorial
/// moments m_j = ⟨a†^j a^j⟩, and the number moments mu_j = ⟨(a†a)^j⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    #[serde(with = "complex_pair")]
    pub a1: Complex64,
    #[serde(with = "complex_pair")]
    pub a2: Complex64,
    #[serde(with = "complex_pair")]
    pub a3: Complex64,
    #[serde(with = "complex_pair")]
    pub a4: Complex64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub mu4: f64,
}

/// Every scalar criterion for one state. `None` marks a value whose
/// denominator vanishes (Q and g2 on the vacuum, A3 at singular moment
/// matrices); negative values signal non-classicality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriteriaReport {
    pub s_x: f64,
    pub s_p: f64,
    pub i_x: f64,
    pub i_y: f64,
    #[serde(rename = "q")]
    pub q_mandel: Option<f64>,
    pub g2: Option<f64>,
    pub a3: Option<f64>,
    pub mean_n: f64,
}

/// ⟨a†^j a^k⟩ = Σ_{n ≥ k} conj(c_{n-k+j}) c_n √(n!/(n-k)!) √((n-k+j)!/(n-k)!).
///
/// Two passes in log domain: locate the largest term, then accumulate the
/// rescaled terms with compensated sums. Indices past the cutoff contribute
/// exact zeros.
pub fn ladder_moment(state: &DeformedState, j: usize, k: usize) -> Complex64 {
    let c = &state.coeffs;
    let ln_term = |n: usize| -> f64 {
        let m = n - k + j;
        if m > state.cutoff {
            return f64::NEG_INFINITY;
        }
        c[m].log_magnitude
            + c[n].log_magnitude
            + 0.5 * (ln_factorial(n) - ln_factorial(n - k))
            + 0.5 * (ln_factorial(m) - ln_factorial(n - k))
    };

    let mut ln_max = f64::NEG_INFINITY;
    for n in k..=state.cutoff {
        ln_max = ln_max.max(ln_term(n));
    }
    if ln_max == f64::NEG_INFINITY {
        return Complex64::new(0.0, 0.0);
    }

    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for n in k..=state.cutoff {
        let lt = ln_term(n);
        if lt == f64::NEG_INFINITY {
            continue;
        }
        let mag = (lt - ln_max).exp();
        let phase = c[n].phase - c[n - k + j].phase;
        re.add(mag * phase.cos());
        im.add(mag * phase.sin());
    }
    let scale = ln_max.exp();
    Complex64::new(scale * re.value(), scale * im.value())
}

/// Fill the full moment set: a_k = ⟨a^k⟩, m_j = ⟨a†^j a^j⟩, and
/// mu_j = Σ n^j P(n). mu1 aliases m1 so the two agree exactly.
pub fn moment_set(state: &DeformedState) -> MomentSet {
    let a = |k: usize| ladder_moment(state, 0, k);
    // the j = k phases cancel exactly, so the diagonal moments are real
    let m = |j: usize| ladder_moment(state, j, j).re;

    let mut mu = [0.0f64; 3];
    let mut sums = [CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new()];
    for (n, c) in state.coeffs.iter().enumerate() {
        let p = c.abs_sq();
        if p == 0.0 {
            continue;
        }
        let nf = n as f64;
        let mut w = nf * p;
        for s in sums.iter_mut() {
            w *= nf;
            s.add(w);
        }
    }
    for (slot, s) in mu.iter_mut().zip(&sums) {
        *slot = s.value();
    }

    let m1 = m(1);
    MomentSet {
        a1: a(1),
        a2: a(2),
        a3: a(3),
        a4: a(4),
        m1,
        m2: m(2),
        m3: m(3),
        m4: m(4),
        mu1: m1,
        mu2: mu[0],
        mu3: mu[1],
        mu4: mu[2],
    }
}

/// Quadrature variances against the vacuum floor: s = (Δx)^2 - 1/2 and the
/// p analogue. Negative values signal squeezing of that quadrature.
pub fn quadrature_squeezing(ms: &MomentSet) -> (f64, f64) {
    let s_x = ms.a2.re + ms.m1 - 2.0 * ms.a1.re * ms.a1.re;
    let s_p = -ms.a2.re + ms.m1 - 2.0 * ms.a1.im * ms.a1.im;
    (s_x, s_p)
}

/// Amplitude-squared squeezing parameters I_X, I_Y of the two components
/// of the square of the field amplitude. Evaluated in the full normally
/// ordered form, with ⟨a^2 a†^2⟩ = m2 + 4 m1 + 2; the algebraically
/// reduced expressions serve as a debug cross-check.
pub fn amplitude_squared_squeezing(ms: &MomentSet) -> (f64, f64) {
    let aadag2 = ms.m2 + 4.0 * ms.m1 + 2.0;
    let sq = ms.a2 * ms.a2;
    let abs2 = ms.a2.norm_sqr();
    let i_x =
        0.25 * (2.0 * ms.a4.re + ms.m2 + aadag2 - 2.0 * sq.re - 2.0 * abs2) - ms.m1 - 0.5;
    let i_y =
        0.25 * (-2.0 * ms.a4.re + ms.m2 + aadag2 + 2.0 * sq.re - 2.0 * abs2) - ms.m1 - 0.5;

    #[cfg(debug_assertions)]
    {
        let scale = 1.0 + ms.a4.norm() + ms.m2.abs() + abs2;
        let i_x_reduced = 0.5 * ms.a4.re + 0.5 * ms.m2 - ms.a2.re * ms.a2.re;
        let i_y_reduced = -0.5 * ms.a4.re + 0.5 * ms.m2 - ms.a2.im * ms.a2.im;
        debug_assert!(
            (i_x - i_x_reduced).abs() <= 1e-10 * scale,
            "I_X forms disagree: {i_x} vs {i_x_reduced}"
        );
        debug_assert!(
            (i_y - i_y_reduced).abs() <= 1e-10 * scale,
            "I_Y forms disagree: {i_y} vs {i_y_reduced}"
        );
    }
    (i_x, i_y)
}

/// Mandel Q = (⟨n²⟩ - ⟨n⟩²)/⟨n⟩ - 1; None on the vacuum.
pub fn mandel_q(ms: &MomentSet) -> Option<f64> {
    if ms.mu1 <= 0.0 {
        return None;
    }
    Some((ms.mu2 - ms.mu1 * ms.mu1) / ms.mu1 - 1.0)
}

/// g²(0) = m2/m1²; None on the vacuum.
pub fn g2_zero(ms: &MomentSet) -> Option<f64> {
    if ms.m1 == 0.0 {
        return None;
    }
    Some(ms.m2 / (ms.m1 * ms.m1))
}

/// A3 = det m⁽³⁾ / (det μ⁽³⁾ - det m⁽³⁾) over the 3x3 moment matrices
/// with rows (1, v1, v2), (v1, v2, v3), (v2, v3, v4).
///
/// None when the denominator is smaller than the cofactor-level noise
/// floor (the matrices are singular for coherent, vacuum, and |1⟩ states,
/// where the ratio carries no information).
pub fn a3_parameter(ms: &MomentSet) -> Option<f64> {
    let (det_m, mag_m) = hankel3_det(ms.m1, ms.m2, ms.m3, ms.m4);
    let (det_mu, mag_mu) = hankel3_det(ms.mu1, ms.mu2, ms.mu3, ms.mu4);
    let den = det_mu - det_m;
    let noise = 64.0 * f64::EPSILON * (mag_m + mag_mu);
    if den.abs() <= noise.max(1e-300) {
        return None;
    }
    Some(det_m / den)
}

/// Cofactor expansion of det [[1, v1, v2], [v1, v2, v3], [v2, v3, v4]].
/// Also returns the sum of the magnitudes of the products, which bounds
/// the rounding noise of the expansion.
fn hankel3_det(v1: f64, v2: f64, v3: f64, v4: f64) -> (f64, f64) {
    let t1 = v2 * v4 - v3 * v3;
    let t2 = v1 * v4 - v3 * v2;
    let t3 = v1 * v3 - v2 * v2;
    let det = t1 - v1 * t2 + v2 * t3;
    let mag = (v2 * v4).abs()
        + (v3 * v3).abs()
        + v1.abs() * ((v1 * v4).abs() + (v3 * v2).abs())
        + v2.abs() * ((v1 * v3).abs() + (v2 * v2).abs());
    (det, mag)
}

/// Evaluate every criterion from one shared moment set.
pub fn criteria_report(state: &DeformedState) -> CriteriaReport {
    let ms = moment_set(state);
    let (s_x, s_p) = quadrature_squeezing(&ms);
    let (i_x, i_y) = amplitude_squared_squeezing(&ms);
    CriteriaReport {
        s_x,
        s_p,
        i_x,
        i_y,
        q_mandel: mandel_q(&ms),
        g2: g2_zero(&ms),
        a3: a3_parameter(&ms),
        mean_n: ms.mu1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlin::Nonlinearity;
    use crate::state::build_state;

    fn canonical(re: f64, im: f64) -> DeformedState {
        build_state(Nonlinearity::Identity, Complex64::new(re, im), 1e-14).unwrap()
    }

    #[test]
    fn canonical_moments_are_powers_of_z() {
        let z = Complex64::new(1.1, -0.7);
        let s = build_state(Nonlinearity::Identity, z, 1e-14).unwrap();
        let ms = moment_set(&s);
        for (k, a) in [(1, ms.a1), (2, ms.a2), (3, ms.a3), (4, ms.a4)] {
            let expect = z.powi(k);
            assert!((a - expect).norm() < 1e-11 * (1.0 + expect.norm()), "a{k}");
        }
        let x = z.norm_sqr();
        for (j, m) in [(1, ms.m1), (2, ms.m2), (3, ms.m3), (4, ms.m4)] {
            let expect = x.powi(j);
            assert!((m - expect).abs() < 1e-11 * (1.0 + expect), "m{j}");
        }
    }

    #[test]
    fn canonical_criteria_vanish() {
        let r = criteria_report(&canonical(2.0, 0.5));
        assert!(r.s_x.abs() < 1e-10);
        assert!(r.s_p.abs() < 1e-10);
        assert!(r.i_x.abs() < 1e-9);
        assert!(r.i_y.abs() < 1e-9);
        assert!(r.q_mandel.unwrap().abs() < 1e-10);
        assert!((r.g2.unwrap() - 1.0).abs() < 1e-10);
        assert!(r.a3.unwrap().abs() < 1e-9);
        assert!((r.mean_n - 4.25).abs() < 1e-10);
    }

    #[test]
    fn vacuum_report() {
        let v = build_state(Nonlinearity::Identity, Complex64::new(0.0, 0.0), 1e-14).unwrap();
        let r = criteria_report(&v);
        assert_eq!(r.s_x, 0.0);
        assert_eq!(r.s_p, 0.0);
        assert_eq!(r.i_x, 0.0);
        assert_eq!(r.i_y, 0.0);
        assert_eq!(r.q_mandel, None);
        assert_eq!(r.g2, None);
        assert_eq!(r.a3, None);
        assert_eq!(r.mean_n, 0.0);
    }

    #[test]
    fn fock_state_criteria() {
        let f2 = DeformedState::number_state(2);
        let ms = moment_set(&f2);
        assert!((ms.m1 - 2.0).abs() < 1e-14);
        assert!((ms.m2 - 2.0).abs() < 1e-14);
        assert_eq!(ms.m3, 0.0);
        assert_eq!(ms.a1, Complex64::new(0.0, 0.0));
        assert!((mandel_q(&ms).unwrap() - (-1.0)).abs() < 1e-13);
        assert!((g2_zero(&ms).unwrap() - 0.5).abs() < 1e-13);
        assert!((a3_parameter(&ms).unwrap() - (-1.0)).abs() < 1e-12);
        // |1⟩ has both determinants exactly zero: A3 carries no information
        let f1 = DeformedState::number_state(1);
        assert_eq!(a3_parameter(&moment_set(&f1)), None);
    }

    #[test]
    fn thermal_statistics_of_harmonious_states() {
        // P(n) geometric with ratio x: m_j = j! x^j/(1-x)^j, Q = x/(1-x)
        for x in [0.1f64, 0.5] {
            let z = x.sqrt();
            let s = build_state(
                Nonlinearity::LambdaExp { lambda: 0.0 },
                Complex64::new(z, 0.0),
                1e-14,
            )
            .unwrap();
            let ms = moment_set(&s);
            let ratio = x / (1.0 - x);
            for (j, m) in [(1, ms.m1), (2, ms.m2), (3, ms.m3), (4, ms.m4)] {
                let expect = (1..=j).product::<usize>() as f64 * ratio.powi(j as i32);
                assert!((m - expect).abs() < 1e-10 * (1.0 + expect), "x={x} m{j}");
            }
            assert!((mandel_q(&ms).unwrap() - ratio).abs() < 1e-10);
            assert!((g2_zero(&ms).unwrap() - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn stirling_relations() {
        let states = [
            build_state(Nonlinearity::BetaExp { beta: 0.5 }, Complex64::new(2.0, 1.0), 1e-13)
                .unwrap(),
            build_state(Nonlinearity::LambdaExp { lambda: 2.0 }, Complex64::new(0.7, -0.2), 1e-13)
                .unwrap(),
            build_state(Nonlinearity::QSinh { q: 1.4 }, Complex64::new(1.5, 0.0), 1e-13).unwrap(),
        ];
        for s in &states {
            let ms = moment_set(s);
            assert_eq!(ms.m1, ms.mu1);
            let checks = [
                (ms.mu2, ms.m2 + ms.m1),
                (ms.mu3, ms.m3 + 3.0 * ms.m2 + ms.m1),
                (ms.mu4, ms.m4 + 6.0 * ms.m3 + 7.0 * ms.m2 + ms.m1),
            ];
            for (lhs, rhs) in checks {
                assert!(
                    (lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()),
                    "{:?}: {lhs} vs {rhs}",
                    s.spec
                );
            }
        }
    }

    #[test]
    fn ladder_moment_reference_value() {
        // mean of the beta = 1, z = 1 state; mpmath oracle at 50 digits
        let s = build_state(Nonlinearity::BetaExp { beta: 1.0 }, Complex64::new(1.0, 0.0), 1e-13)
            .unwrap();
        let m1 = ladder_moment(&s, 1, 1);
        assert!((m1.re - 0.121_256_428_296_186_01).abs() < 1e-13);
        assert_eq!(m1.im, 0.0);
    }

    #[test]
    fn poisson_statistics_of_kerr_states() {
        let s = build_state(Nonlinearity::BetaImaginary { beta: 1.0 }, Complex64::new(2.0, 0.0), 1e-13)
            .unwrap();
        let r = criteria_report(&s);
        assert!(r.q_mandel.unwrap().abs() < 1e-10);
        assert!((r.g2.unwrap() - 1.0).abs() < 1e-10);
        assert!((r.mean_n - 4.0).abs() < 1e-10);
    }

    #[test]
    fn uncertainty_product_floor() {
        for s in [
            canonical(3.0, -1.0),
            build_state(Nonlinearity::BetaExp { beta: 1.5 }, Complex64::new(4.0, 0.0), 1e-13)
                .unwrap(),
            build_state(Nonlinearity::LambdaExp { lambda: 1.0 }, Complex64::new(0.8, 0.1), 1e-13)
                .unwrap(),
        ] {
            let ms = moment_set(&s);
            let (s_x, s_p) = quadrature_squeezing(&ms);
            let (dx2, dp2) = (s_x + 0.5, s_p + 0.5);
            assert!(dx2 > 0.0 && dp2 > 0.0);
            assert!(dx2 * dp2 >= 0.25 - 1e-9, "{:?}: {}", s.spec, dx2 * dp2);
        }
    }

    #[test]
    fn report_serializes_with_null_for_undefined() {
        let v = build_state(Nonlinearity::Identity, Complex64::new(0.0, 0.0), 1e-13).unwrap();
        let json = serde_json::to_string(&criteria_report(&v)).unwrap();
        assert!(json.contains(r#""q":null"#));
        assert!(json.contains(r#""g2":null"#));
        assert!(json.contains(r#""a3":null"#));
        let r = criteria_report(&canonical(1.0, 0.0));
        let json = serde_json::to_string(&r).unwrap();
        let back: CriteriaReport = serde_json::from_str(&json).unwrap();
        assert_eq!(r, back);
    }
}
