//! Classicality verdicts and parameter scans: criteria sweeps over
//! (parameter, z) grids, threshold-parameter search, and the radius of
//! coherence for the exponential deformation.

use crate::error::{Error, Result};
use crate::math::complex_pair;
use crate::moments::{criteria_report, CriteriaReport};
use crate::nonlin::Nonlinearity;
use crate::state::{build_state_capped, DeformedState, DEFAULT_MAX_CUTOFF};
use crate::wigner::{auto_grid, wigner_grid, PhaseGrid};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Upper bound on the radius search; past this the result is returned
/// capped and flagged.
pub const RADIUS_SEARCH_CAP: f64 = 1e14;

/// State-construction tolerance used by every verdict evaluation.
const VERDICT_STATE_TOL: f64 = 1e-12;

/// One-parameter families the scans run over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Beta,
    BetaImaginary,
    Lambda,
    QExp,
    QSinh,
}

impl Family {
    pub fn spec(self, param: f64) -> Nonlinearity {
        match self {
            Family::Beta => Nonlinearity::BetaExp { beta: param },
            Family::BetaImaginary => Nonlinearity::BetaImaginary { beta: param },
            Family::Lambda => Nonlinearity::LambdaExp { lambda: param },
            Family::QExp => Nonlinearity::QExp { q: param },
            Family::QSinh => Nonlinearity::QSinh { q: param },
        }
    }

    pub fn param_name(self) -> &'static str {
        match self {
            Family::Beta | Family::BetaImaginary => "beta",
            Family::Lambda => "lambda",
            Family::QExp | Family::QSinh => "q",
        }
    }
}

/// Tolerances and options for the classicality verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerdictConfig {
    /// How far below zero a criterion may sit and still count as classical;
    /// mirrors the source's stated +-0.01 evaluation precision.
    pub eps: f64,
    /// Mean photon number below which g2(0) < 1 is excused as vacuum-like
    /// (g2 converges to its undeformed value only away from the vacuum).
    pub g2_vacuum_cut: f64,
    /// Evaluate Wigner negativity as an eighth criterion.
    pub include_wigner: bool,
    /// Grid for the Wigner criterion; a state-sized grid is derived when
    /// absent.
    pub wigner_grid: Option<PhaseGrid>,
    /// Require |Q| <= eps (Poissonian) instead of Q >= -eps.
    pub strict_poissonian: bool,
    /// Hard cap on the adaptive Fock cutoff of every state the scan
    /// builds; the library default applies when absent.
    pub max_cutoff: Option<usize>,
}

impl Default for VerdictConfig {
    fn default() -> Self {
        VerdictConfig {
            eps: 0.01,
            g2_vacuum_cut: 0.01,
            include_wigner: false,
            wigner_grid: None,
            strict_poissonian: false,
            max_cutoff: None,
        }
    }
}

impl VerdictConfig {
    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::Domain(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.g2_vacuum_cut >= 0.0) || !self.g2_vacuum_cut.is_finite() {
            return Err(Error::Domain(format!(
                "g2_vacuum_cut must be nonnegative, got {}",
                self.g2_vacuum_cut
            )));
        }
        Ok(())
    }
}

/// Per-criterion classicality flags plus the underlying report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalityVerdict {
    pub s_x_ok: bool,
    pub s_p_ok: bool,
    pub i_x_ok: bool,
    pub i_y_ok: bool,
    pub q_ok: bool,
    pub g2_ok: bool,
    pub a3_ok: bool,
    /// Present only when the Wigner criterion was requested.
    pub wigner_ok: Option<bool>,
    pub overall: bool,
    pub report: CriteriaReport,
}

/// One sweep cell; failed cells carry the error text instead of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    #[serde(with = "complex_pair")]
    pub z: Complex64,
    pub overall: Option<bool>,
    pub report: Option<CriteriaReport>,
    pub error: Option<String>,
}

/// Criteria reports over a (parameter, z) grid, parameter-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub family: Family,
    pub param_name: String,
    pub param_values: Vec<f64>,
    #[serde(with = "crate::math::complex_pair_vec")]
    pub z_values: Vec<Complex64>,
    pub rows: Vec<SweepRow>,
}

/// Bisection result for the smallest classical deformation parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub family: Family,
    #[serde(with = "complex_pair")]
    pub z: Complex64,
    pub threshold: f64,
    pub eps: f64,
    pub bracket: (f64, f64),
    /// True when sampling found the verdict flipping back to false above
    /// the returned threshold.
    pub non_monotone: bool,
}

/// Radius-of-coherence result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusResult {
    pub beta: f64,
    pub radius: f64,
    pub eps: f64,
    /// "capped" when the search hit the upper bound still classical;
    /// "no_classical_region" when even tiny amplitudes fail.
    pub flags: Vec<String>,
}

fn verdict_from_state(state: &DeformedState, cfg: &VerdictConfig) -> Result<ClassicalityVerdict> {
    let report = criteria_report(state);
    let eps = cfg.eps;
    let ok = |v: f64| v >= -eps;
    let s_x_ok = ok(report.s_x);
    let s_p_ok = ok(report.s_p);
    let i_x_ok = ok(report.i_x);
    let i_y_ok = ok(report.i_y);
    let q_ok = match report.q_mandel {
        None => true,
        Some(q) if cfg.strict_poissonian => q.abs() <= eps,
        Some(q) => ok(q),
    };
    let g2_ok = report
        .g2
        .map_or(true, |g| g >= 1.0 - eps || report.mean_n < cfg.g2_vacuum_cut);
    let a3_ok = report.a3.map_or(true, ok);
    let wigner_ok = if cfg.include_wigner {
        let grid = match &cfg.wigner_grid {
            Some(g) => g.clone(),
            None => auto_grid(state, 101)?,
        };
        Some(wigner_grid(state, grid)?.min_value >= -eps)
    } else {
        None
    };
    let overall = s_x_ok
        && s_p_ok
        && i_x_ok
        && i_y_ok
        && q_ok
        && g2_ok
        && a3_ok
        && wigner_ok.unwrap_or(true);
    Ok(ClassicalityVerdict {
        s_x_ok,
        s_p_ok,
        i_x_ok,
        i_y_ok,
        q_ok,
        g2_ok,
        a3_ok,
        wigner_ok,
        overall,
        report,
    })
}

/// Evaluate every criterion at (spec, z) and fold into per-criterion flags:
/// scalar criteria pass at >= -eps (undefined passes), g2 passes at
/// >= 1 - eps or on a vacuum-like state, the optional Wigner criterion
/// passes when the grid minimum stays above -eps.
pub fn classicality_verdict(
    spec: Nonlinearity,
    z: Complex64,
    cfg: &VerdictConfig,
) -> Result<ClassicalityVerdict> {
    cfg.validate()?;
    let state = build_verdict_state(spec, z, cfg)?;
    verdict_from_state(&state, cfg)
}

fn build_verdict_state(spec: Nonlinearity, z: Complex64, cfg: &VerdictConfig) -> Result<DeformedState> {
    let cap = cfg.max_cutoff.unwrap_or(DEFAULT_MAX_CUTOFF);
    build_state_capped(spec, z, VERDICT_STATE_TOL, cap)
}

/// Full criteria reports over a parameter-major (param, z) grid. Cells
/// whose state or verdict fails are recorded as error rows, never dropped.
pub fn sweep(
    family: Family,
    param_values: &[f64],
    z_values: &[Complex64],
    cfg: &VerdictConfig,
) -> SweepTable {
    let cell = |param: f64, z: Complex64| -> SweepRow {
        let outcome = build_verdict_state(family.spec(param), z, cfg)
            .and_then(|state| verdict_from_state(&state, cfg));
        match outcome {
            Ok(v) => SweepRow {
                param,
                z,
                overall: Some(v.overall),
                report: Some(v.report),
                error: None,
            },
            Err(e) => SweepRow { param, z, overall: None, report: None, error: Some(e.to_string()) },
        }
    };

    let indices: Vec<(f64, Complex64)> = param_values
        .iter()
        .flat_map(|&p| z_values.iter().map(move |&z| (p, z)))
        .collect();
    #[cfg(feature = "parallel")]
    let rows: Vec<SweepRow> = indices.par_iter().map(|&(p, z)| cell(p, z)).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<SweepRow> = indices.iter().map(|&(p, z)| cell(p, z)).collect();

    SweepTable {
        family,
        param_name: family.param_name().to_string(),
        param_values: param_values.to_vec(),
        z_values: z_values.to_vec(),
        rows,
    }
}

/// Smallest parameter in the bracket where the verdict flips to classical,
/// bisected to absolute width 0.01. Eight samples between the result and
/// the bracket top guard the monotone-exit assumption; a false sample sets
/// `non_monotone` and moves the result to the topmost true run.
pub fn threshold_parameter(
    family: Family,
    z: Complex64,
    cfg: &VerdictConfig,
    bracket: (f64, f64),
) -> Result<ThresholdResult> {
    cfg.validate()?;
    let (lo0, hi0) = bracket;
    if !(hi0 > lo0) || !lo0.is_finite() || !hi0.is_finite() {
        return Err(Error::Domain(format!("bracket must satisfy lo < hi, got ({lo0}, {hi0})")));
    }
    let verdict = |p: f64| -> Result<bool> {
        Ok(classicality_verdict(family.spec(p), z, cfg)?.overall)
    };
    if verdict(lo0)? {
        return Err(Error::Bracket(format!("verdict is already classical at lo = {lo0}")));
    }
    if !verdict(hi0)? {
        return Err(Error::Bracket(format!("verdict is still non-classical at hi = {hi0}")));
    }
    let bisect = |mut lo: f64, mut hi: f64| -> Result<f64> {
        while hi - lo > 0.01 {
            let mid = 0.5 * (lo + hi);
            if verdict(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    };
    let mut threshold = bisect(lo0, hi0)?;
    let mut non_monotone = false;
    let mut highest_false = None;
    for i in 1..=8 {
        let s = threshold + (hi0 - threshold) * i as f64 / 9.0;
        if !verdict(s)? {
            non_monotone = true;
            highest_false = Some(s);
        }
    }
    if let Some(lo2) = highest_false {
        threshold = bisect(lo2, hi0)?;
    }
    Ok(ThresholdResult { family, z, threshold, eps: cfg.eps, bracket, non_monotone })
}

/// Largest amplitude R (to relative width 1e-3) below which the
/// exponential deformation at `beta` passes the verdict at every one of
/// `z_probe_count` evenly spaced probes in (0, R]. The upper bound grows
/// tenfold until a failure brackets the radius or the search cap is hit.
pub fn radius_of_coherence(
    beta: f64,
    cfg: &VerdictConfig,
    z_probe_count: usize,
) -> Result<RadiusResult> {
    cfg.validate()?;
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("radius search needs beta > 0, got {beta}")));
    }
    if z_probe_count == 0 {
        return Err(Error::Domain("need at least one probe point".into()));
    }
    let probe = |z: f64| -> Result<bool> {
        Ok(classicality_verdict(Nonlinearity::BetaExp { beta }, Complex64::new(z, 0.0), cfg)?.overall)
    };
    let classical = |r: f64| -> Result<bool> {
        let zs: Vec<f64> = (1..=z_probe_count).map(|i| r * i as f64 / z_probe_count as f64).collect();
        #[cfg(feature = "parallel")]
        let verdicts: Vec<bool> = zs.par_iter().map(|&z| probe(z)).collect::<Result<_>>()?;
        #[cfg(not(feature = "parallel"))]
        let verdicts: Vec<bool> = zs.iter().map(|&z| probe(z)).collect::<Result<_>>()?;
        Ok(verdicts.into_iter().all(|v| v))
    };

    let mut flags = Vec::new();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while classical(hi)? {
        lo = hi;
        hi *= 10.0;
        if hi > RADIUS_SEARCH_CAP {
            flags.push("capped".to_string());
            return Ok(RadiusResult { beta, radius: RADIUS_SEARCH_CAP, eps: cfg.eps, flags });
        }
    }
    if lo == 0.0 {
        // not even R = 1 is classical; scan down for a starting bracket
        while !classical(hi)? {
            hi /= 2.0;
            if hi <= 1e-30 {
                flags.push("no_classical_region".to_string());
                return Ok(RadiusResult { beta, radius: 0.0, eps: cfg.eps, flags });
            }
        }
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-3 * hi {
        let mid = (lo * hi).sqrt();
        if classical(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(RadiusResult { beta, radius: lo, eps: cfg.eps, flags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::build_state;

    fn zr(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn defaults_match_documented_tolerances() {
        let cfg = VerdictConfig::default();
        assert_eq!(cfg.eps, 0.01);
        assert_eq!(cfg.g2_vacuum_cut, 0.01);
        assert!(!cfg.include_wigner);
        assert!(!cfg.strict_poissonian);
        assert!(cfg.wigner_grid.is_none());
        assert!(cfg.max_cutoff.is_none());
    }

    #[test]
    fn max_cutoff_cap_reaches_the_state_builder() {
        // |z| = 8 needs a cutoff near 120; a cap of 10 must surface as a
        // convergence error instead of a silently truncated verdict.
        let cfg = VerdictConfig { max_cutoff: Some(10), ..VerdictConfig::default() };
        let err = classicality_verdict(Nonlinearity::Identity, zr(8.0), &cfg).unwrap_err();
        assert!(matches!(err, Error::Convergence(_)), "got {err:?}");

        let table = sweep(Family::Beta, &[0.0], &[zr(8.0)], &cfg);
        assert_eq!(table.rows.len(), 1);
        assert!(table.rows[0].error.as_deref().unwrap().contains("cutoff cap"));

        let relaxed = VerdictConfig { max_cutoff: Some(100_000), ..VerdictConfig::default() };
        assert!(classicality_verdict(Nonlinearity::Identity, zr(8.0), &relaxed).unwrap().overall);
    }

    #[test]
    fn canonical_state_is_always_classical() {
        let cfg = VerdictConfig::default();
        let v = classicality_verdict(Nonlinearity::Identity, zr(5.0), &cfg).unwrap();
        assert!(v.overall);
        assert!(v.s_x_ok && v.s_p_ok && v.i_x_ok && v.i_y_ok && v.q_ok && v.g2_ok && v.a3_ok);
        assert!(v.wigner_ok.is_none());
        // strict Poissonian mode also holds exactly on the canonical state
        let strict = VerdictConfig { strict_poissonian: true, ..VerdictConfig::default() };
        assert!(classicality_verdict(Nonlinearity::Identity, zr(5.0), &strict).unwrap().overall);
    }

    #[test]
    fn small_beta_state_is_nonclassical() {
        let cfg = VerdictConfig::default();
        let v = classicality_verdict(Nonlinearity::BetaExp { beta: 0.5 }, zr(5.0), &cfg).unwrap();
        assert!(!v.overall);
        assert!(!v.s_x_ok, "s_x = {}", v.report.s_x);
        assert!(!v.q_ok, "q = {:?}", v.report.q_mandel);
        assert_eq!(
            v.overall,
            v.s_x_ok && v.s_p_ok && v.i_x_ok && v.i_y_ok && v.q_ok && v.g2_ok && v.a3_ok
        );
    }

    #[test]
    fn wigner_criterion_flags_negativity() {
        let mut cfg = VerdictConfig { include_wigner: true, ..VerdictConfig::default() };
        // harmonious state at z = 0.95 dips to about -0.013 near (2.4, 0.6)
        cfg.wigner_grid = Some(PhaseGrid::new(-3.0, 3.0, -3.0, 3.0, 21, 21).unwrap());
        let v = classicality_verdict(
            Nonlinearity::LambdaExp { lambda: 0.0 },
            zr(0.95),
            &cfg,
        )
        .unwrap();
        assert_eq!(v.wigner_ok, Some(false));
        assert!(!v.overall);

        let cfg = VerdictConfig { include_wigner: true, ..VerdictConfig::default() };
        let v = classicality_verdict(Nonlinearity::Identity, zr(1.0), &cfg).unwrap();
        assert_eq!(v.wigner_ok, Some(true));
        assert!(v.overall);
    }

    #[test]
    fn sweep_shape_and_error_rows() {
        let cfg = VerdictConfig::default();
        let table = sweep(
            Family::Lambda,
            &[0.0, 2.0],
            &[zr(0.5), zr(0.9), zr(1.5)],
            &cfg,
        );
        assert_eq!(table.rows.len(), 6);
        assert_eq!(table.param_name, "lambda");
        // parameter-major ordering
        assert_eq!(table.rows[0].param, 0.0);
        assert_eq!(table.rows[2].param, 0.0);
        assert_eq!(table.rows[3].param, 2.0);
        // z = 1.5 is outside the lambda-family domain: error row, kept
        let bad = &table.rows[2];
        assert!(bad.report.is_none());
        assert!(bad.error.as_deref().unwrap_or("").contains("domain"));
        let good = &table.rows[1];
        assert!(good.report.is_some());
        assert_eq!(good.overall, Some(false));
    }

    #[test]
    fn single_cell_sweep_matches_direct_report() {
        let cfg = VerdictConfig::default();
        let table = sweep(Family::Beta, &[1.0], &[zr(1.0)], &cfg);
        let direct = criteria_report(
            &build_state(Nonlinearity::BetaExp { beta: 1.0 }, zr(1.0), VERDICT_STATE_TOL).unwrap(),
        );
        assert_eq!(table.rows[0].report.as_ref().unwrap(), &direct);
    }

    #[test]
    fn sweep_is_deterministic() {
        let cfg = VerdictConfig::default();
        let zs: Vec<Complex64> = (1..=6).map(|i| zr(i as f64)).collect();
        let a = sweep(Family::Beta, &[0.5, 2.5], &zs, &cfg);
        let b = sweep(Family::Beta, &[0.5, 2.5], &zs, &cfg);
        assert_eq!(a, b);
        let ja = serde_json::to_string(&a).unwrap();
        let jb = serde_json::to_string(&b).unwrap();
        assert_eq!(ja, jb);
    }

    #[test]
    fn beta_threshold_near_five_at_z_fifteen() {
        let cfg = VerdictConfig::default();
        let r = threshold_parameter(Family::Beta, zr(15.0), &cfg, (0.5, 7.5)).unwrap();
        // independent bisection oracle puts the flip at 5.0117
        assert!((r.threshold - 5.0117).abs() < 0.02, "threshold {}", r.threshold);
        assert!(!r.non_monotone);
        assert!(r.threshold >= 4.0 && r.threshold <= 6.5);
    }

    #[test]
    fn lambda_threshold_at_z_09() {
        let cfg = VerdictConfig::default();
        let r = threshold_parameter(Family::Lambda, zr(0.9), &cfg, (0.5, 5.25)).unwrap();
        // oracle value 3.0605; comfortably below the 5.25 ceiling
        assert!((r.threshold - 3.0605).abs() < 0.02, "threshold {}", r.threshold);
        assert!(!r.non_monotone);
    }

    #[test]
    fn threshold_bracket_errors() {
        let cfg = VerdictConfig::default();
        // beta = 0 is the canonical state: classical already at lo
        let e = threshold_parameter(Family::Beta, zr(5.0), &cfg, (0.0, 7.5)).unwrap_err();
        assert!(matches!(e, Error::Bracket(_)));
        // both ends non-classical
        let e = threshold_parameter(Family::Beta, zr(15.0), &cfg, (0.5, 1.0)).unwrap_err();
        assert!(matches!(e, Error::Bracket(_)));
        assert!(threshold_parameter(Family::Beta, zr(5.0), &cfg, (2.0, 1.0)).is_err());
    }

    #[test]
    fn lambda_55_is_globally_classical() {
        let cfg = VerdictConfig::default();
        for i in 1..=50 {
            let z = 0.99 * i as f64 / 50.0;
            let v = classicality_verdict(Nonlinearity::LambdaExp { lambda: 5.5 }, zr(z), &cfg).unwrap();
            assert!(v.overall, "failed at z = {z}: {:?}", v.report);
        }
    }

    #[test]
    fn radius_of_coherence_beta_five() {
        let cfg = VerdictConfig::default();
        let r = radius_of_coherence(5.0, &cfg, 16).unwrap();
        // oracle bisection lands at 14.914
        assert!((r.radius - 14.914).abs() < 0.15, "radius {}", r.radius);
        assert!(r.flags.is_empty());
        assert!(radius_of_coherence(-1.0, &cfg, 16).is_err());
        assert!(radius_of_coherence(5.0, &cfg, 0).is_err());
    }

    #[test]
    fn phase_rotation_interpolates_quadratures() {
        // for real-coefficient families, s_x at a rotated amplitude is the
        // cos^2-weighted blend of s_x and s_p at the real amplitude, so
        // real probes capture both extremes
        let base = criteria_report(
            &build_state(Nonlinearity::BetaExp { beta: 1.0 }, zr(2.0), 1e-13).unwrap(),
        );
        for k in 0..8 {
            let th = std::f64::consts::PI * k as f64 / 8.0;
            let z = Complex64::from_polar(2.0, th);
            let rot = criteria_report(
                &build_state(Nonlinearity::BetaExp { beta: 1.0 }, z, 1e-13).unwrap(),
            );
            let t = th.cos().powi(2);
            let expect = t * base.s_x + (1.0 - t) * base.s_p;
            assert!((rot.s_x - expect).abs() < 1e-9, "theta {th}: {} vs {expect}", rot.s_x);
            assert!(rot.s_x >= base.s_x.min(base.s_p) - 1e-9);
            // the photon-statistics criteria are phase-invariant outright
            assert!((rot.q_mandel.unwrap() - base.q_mandel.unwrap()).abs() < 1e-10);
            assert!((rot.g2.unwrap() - base.g2.unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn verdict_round_trips_json() {
        let cfg = VerdictConfig::default();
        let v = classicality_verdict(Nonlinearity::BetaExp { beta: 2.0 }, zr(3.0), &cfg).unwrap();
        let json = serde_json::to_string(&v).unwrap();
        let back: ClassicalityVerdict = serde_json::from_str(&json).unwrap();
        assert_eq!(v, back);

        let r = RadiusResult { beta: 5.0, radius: 14.9, eps: 0.01, flags: vec!["capped".into()] };
        let back: RadiusResult = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(r, back);

        // config deserializes from a sparse object via defaults
        let cfg: VerdictConfig = serde_json::from_str(r#"{"eps": 0.02}"#).unwrap();
        assert_eq!(cfg.eps, 0.02);
        assert_eq!(cfg.g2_vacuum_cut, 0.01);
    }
}
