//! Figure presets: the parameter lists behind each published curve set,
//! so `--figure N` reproduces the data for figure N without retyping the
//! caption by hand.
//!
//! Each sweep figure fixes one axis as a short list (the labeled curves)
//! and scans the other densely. The dense axes are chosen once here:
//! beta in [0, 8] at 0.05 (extended to 10 for the A3 figure), z in
//! [0, 15] or [0, 20] at 0.1 for the exponential family, lambda in
//! [0, 6] at 0.05, and z in [0, 0.99] at 0.01 inside the lambda family's
//! unit-disk domain.

use dcl_core::Family;

/// A sweep preset: the family, the curve-label axis, and the scan axis.
///
/// `params` feeds the family parameter, `zs` the (real) amplitude; which
/// of the two is dense depends on what the figure plots against.
pub struct SweepPreset {
    pub family: Family,
    pub params: Vec<f64>,
    pub zs: Vec<f64>,
}

/// A Wigner preset: one state per panel, all sharing a grid policy.
pub struct WignerPreset {
    pub family: Family,
    pub params: Vec<f64>,
    pub z: f64,
    /// Explicit window, or None for the state-sized auto grid.
    pub window: Option<(f64, f64, f64, f64)>,
}

fn axis(count: usize, step: f64) -> Vec<f64> {
    (0..=count).map(|i| i as f64 * step).collect()
}

fn beta_axis() -> Vec<f64> {
    axis(160, 0.05) // 0 ..= 8
}

fn lambda_axis() -> Vec<f64> {
    axis(120, 0.05) // 0 ..= 6
}

fn z_unit_axis() -> Vec<f64> {
    axis(99, 0.01) // 0 ..= 0.99, strictly inside the lambda domain
}

/// The sweep behind figure `n`, or None when `n` is not a sweep figure
/// (1 is the weight function; 9 and 18 are Wigner panels).
pub fn sweep_preset(n: u32) -> Option<SweepPreset> {
    use Family::{Beta, Lambda};
    let p = |family, params: &[f64], zs: Vec<f64>| SweepPreset {
        family,
        params: params.to_vec(),
        zs,
    };
    let preset = match n {
        // quadrature squeezing S_x, S_p
        2 => p(Beta, &beta_axis(), vec![1.0, 2.5, 5.0, 10.0, 15.0]),
        3 => p(Beta, &[0.5, 1.0, 2.5, 5.0, 7.5], axis(150, 0.1)),
        // amplitude-squared squeezing I_X, I_Y
        4 => p(Beta, &beta_axis(), vec![2.5, 5.0, 10.0, 15.0]),
        5 => p(Beta, &[0.25, 0.5, 1.5, 2.0], axis(150, 0.1)),
        // Mandel Q
        6 => p(Beta, &beta_axis(), vec![1.0, 2.0, 5.0, 10.0, 20.0]),
        7 => p(Beta, &[0.5, 1.0, 2.5, 5.0, 7.5], axis(200, 0.1)),
        // second-order correlation g2(0)
        8 => p(Beta, &beta_axis(), vec![1.0, 2.0, 5.0, 10.0, 20.0]),
        // A3, with the beta axis stretched to 10
        10 => p(Beta, &axis(200, 0.05), vec![5.0, 10.0, 15.0, 200.0]),
        // lambda family, same criteria in caption order
        11 => p(Lambda, &lambda_axis(), vec![0.25, 0.5, 0.75, 0.9]),
        12 => p(Lambda, &[0.5, 1.0, 2.5, 5.0, 5.5], z_unit_axis()),
        13 => p(Lambda, &lambda_axis(), vec![0.25, 0.5, 0.75, 0.9]),
        14 => p(Lambda, &[0.0, 1.0, 2.0, 4.0], z_unit_axis()),
        15 => p(Lambda, &lambda_axis(), vec![0.25, 0.5, 0.75, 0.9]),
        16 => p(Lambda, &[0.0, 1.0, 2.5, 5.0, 5.5], z_unit_axis()),
        17 => p(Lambda, &lambda_axis(), vec![0.25, 0.5, 0.75, 0.95]),
        19 => p(Lambda, &lambda_axis(), vec![0.5, 0.75, 0.85, 0.95, 0.99]),
        _ => return None,
    };
    Some(preset)
}

/// The Wigner panels behind figure `n` (9 or 18).
pub fn wigner_preset(n: u32) -> Option<WignerPreset> {
    match n {
        9 => Some(WignerPreset {
            family: Family::Beta,
            params: vec![2.0, 4.0, 7.5],
            z: 200.0,
            window: None,
        }),
        18 => Some(WignerPreset {
            family: Family::Lambda,
            params: vec![0.0, 0.5, 2.0],
            z: 0.95,
            window: Some((-3.0, 3.0, -3.0, 3.0)),
        }),
        _ => None,
    }
}

/// q values of the weight-function figure's three curves.
pub const WEIGHT_FIGURE_QS: [f64; 3] = [2.0, 5.0, 10.0];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_axes_have_exact_endpoints() {
        let b = beta_axis();
        assert_eq!(b.len(), 161);
        assert_eq!(b[0], 0.0);
        assert_eq!(*b.last().unwrap(), 8.0);
        let z = z_unit_axis();
        assert_eq!(z.len(), 100);
        assert!(*z.last().unwrap() < 1.0);
    }

    #[test]
    fn every_documented_figure_resolves() {
        for n in [2u32, 3, 4, 5, 6, 7, 8, 10, 11, 12, 13, 14, 15, 16, 17, 19] {
            assert!(sweep_preset(n).is_some(), "missing sweep preset {n}");
        }
        for n in [9u32, 18] {
            assert!(wigner_preset(n).is_some(), "missing wigner preset {n}");
        }
        assert!(sweep_preset(1).is_none());
        assert!(sweep_preset(9).is_none());
        assert!(wigner_preset(2).is_none());
    }

    #[test]
    fn lambda_presets_stay_inside_the_unit_disk() {
        for n in [11u32, 12, 13, 14, 15, 16, 17, 19] {
            let p = sweep_preset(n).unwrap();
            assert_eq!(p.family, Family::Lambda);
            assert!(p.zs.iter().all(|&z| z < 1.0), "figure {n} leaves the domain");
        }
    }
}
