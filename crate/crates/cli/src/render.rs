//! CSV and JSON rendering of the library's record types.
//!
//! The CSV dialect is fixed: comma separated, '.' decimal point, one
//! header row, LF line endings, reals at 17 significant digits so a
//! re-parse recovers the exact double. Optional values render as empty
//! cells. JSON goes through serde with float round-tripping enabled, so
//! every JSON output re-parses into the record type that produced it.

use dcl_core::{
    CriteriaReport, DeformedState, Family, MomentCheckReport, RadiusResult, SweepTable,
    ThresholdResult, WeightFunctionSample, WignerGrid,
};
use serde::{Deserialize, Serialize};

/// One Wigner panel of a multi-panel figure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerPanel {
    pub param: f64,
    pub grid: WignerGrid,
}

/// A real at 17 significant digits; round-trips through parse exactly.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Beta => "beta",
        Family::BetaImaginary => "beta_imaginary",
        Family::Lambda => "lambda",
        Family::QExp => "q_exp",
        Family::QSinh => "q_sinh",
    }
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("csv buffer flush")).expect("csv output is utf-8")
}

pub fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("record serialization") + "\n"
}

pub fn state_csv(state: &DeformedState) -> String {
    let mut w = writer();
    w.write_record(["n", "c_re", "c_im", "p"]).unwrap();
    for n in 0..=state.cutoff {
        let c = state.coeff_value(n);
        w.write_record([n.to_string(), real(c.re), real(c.im), real(state.p(n))]).unwrap();
    }
    finish(w)
}

const CRITERIA_FIELDS: [&str; 8] = ["s_x", "s_p", "i_x", "i_y", "q", "g2", "a3", "mean_n"];

fn criteria_cells(r: &CriteriaReport) -> [String; 8] {
    [
        real(r.s_x),
        real(r.s_p),
        real(r.i_x),
        real(r.i_y),
        opt(r.q_mandel),
        opt(r.g2),
        opt(r.a3),
        real(r.mean_n),
    ]
}

pub fn criteria_csv(r: &CriteriaReport) -> String {
    let mut w = writer();
    w.write_record(CRITERIA_FIELDS).unwrap();
    w.write_record(criteria_cells(r)).unwrap();
    finish(w)
}

pub fn sweep_csv(t: &SweepTable) -> String {
    let mut w = writer();
    let mut header = vec!["family", "param", "z_re", "z_im", "overall"];
    header.extend(CRITERIA_FIELDS);
    header.push("error");
    w.write_record(&header).unwrap();
    for row in &t.rows {
        let mut rec = vec![
            family_name(t.family).to_string(),
            real(row.param),
            real(row.z.re),
            real(row.z.im),
            row.overall.map(|b| b.to_string()).unwrap_or_default(),
        ];
        match &row.report {
            Some(r) => rec.extend(criteria_cells(r)),
            None => rec.extend(std::iter::repeat(String::new()).take(CRITERIA_FIELDS.len())),
        }
        rec.push(row.error.clone().unwrap_or_default());
        w.write_record(&rec).unwrap();
    }
    finish(w)
}

fn wigner_rows(w: &mut csv::Writer<Vec<u8>>, prefix: Option<f64>, grid: &WignerGrid) {
    let xs = grid.grid.xs();
    let ps = grid.grid.ps();
    for (i, &x) in xs.iter().enumerate() {
        for (j, &p) in ps.iter().enumerate() {
            let v = real(grid.values[i][j]);
            match prefix {
                Some(param) => w.write_record([real(param), real(x), real(p), v]).unwrap(),
                None => w.write_record([real(x), real(p), v]).unwrap(),
            }
        }
    }
}

pub fn wigner_grid_csv(grid: &WignerGrid) -> String {
    let mut w = writer();
    w.write_record(["x", "p", "w"]).unwrap();
    wigner_rows(&mut w, None, grid);
    finish(w)
}

pub fn wigner_panels_csv(panels: &[WignerPanel]) -> String {
    let mut w = writer();
    w.write_record(["param", "x", "p", "w"]).unwrap();
    for panel in panels {
        wigner_rows(&mut w, Some(panel.param), &panel.grid);
    }
    finish(w)
}

pub fn radius_csv(r: &RadiusResult) -> String {
    let mut w = writer();
    w.write_record(["beta", "radius", "eps", "flags"]).unwrap();
    w.write_record([real(r.beta), real(r.radius), real(r.eps), r.flags.join(";")]).unwrap();
    finish(w)
}

pub fn threshold_csv(t: &ThresholdResult) -> String {
    let mut w = writer();
    w.write_record([
        "family",
        "z_re",
        "z_im",
        "threshold",
        "eps",
        "bracket_lo",
        "bracket_hi",
        "non_monotone",
    ])
    .unwrap();
    w.write_record([
        family_name(t.family).to_string(),
        real(t.z.re),
        real(t.z.im),
        real(t.threshold),
        real(t.eps),
        real(t.bracket.0),
        real(t.bracket.1),
        t.non_monotone.to_string(),
    ])
    .unwrap();
    finish(w)
}

pub fn weight_csv(samples: &[WeightFunctionSample]) -> String {
    let mut w = writer();
    w.write_record(["q", "x", "sigma"]).unwrap();
    for s in samples {
        for (&x, &sig) in s.xs.iter().zip(&s.sigma) {
            w.write_record([real(s.q), real(x), real(sig)]).unwrap();
        }
    }
    finish(w)
}

pub fn moments_csv(r: &MomentCheckReport) -> String {
    let mut w = writer();
    w.write_record(["order", "lhs", "rhs", "rel_error"]).unwrap();
    for (i, &n) in r.orders.iter().enumerate() {
        w.write_record([n.to_string(), real(r.lhs[i]), real(r.rhs[i]), real(r.rel_errors[i])])
            .unwrap();
    }
    finish(w)
}
