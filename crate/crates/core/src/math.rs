//! Low-level numeric kernels: compensated summation, log-domain complex
//! values, ln(n!), and harmonic numbers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

/// Neumaier-compensated floating-point accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Multiply the accumulated value by a constant (used when a running
    /// log-sum-exp anchor moves).
    #[inline]
    pub fn scale(&mut self, s: f64) {
        self.sum *= s;
        self.comp *= s;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

const LN_FACT_TABLE_LEN: usize = 1025;
static LN_FACT: OnceLock<Vec<f64>> = OnceLock::new();

fn ln_fact_table() -> &'static [f64] {
    LN_FACT.get_or_init(|| {
        let mut table = Vec::with_capacity(LN_FACT_TABLE_LEN);
        table.push(0.0);
        let mut acc = CompensatedSum::new();
        for n in 1..LN_FACT_TABLE_LEN {
            acc.add((n as f64).ln());
            table.push(acc.value());
        }
        table
    })
}

/// ln(n!): table lookup for n <= 1024, Stirling series beyond (absolute
/// error well under 1e-12 everywhere).
pub fn ln_factorial(n: usize) -> f64 {
    let table = ln_fact_table();
    if let Some(&v) = table.get(n) {
        return v;
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x + 0.5) * x.ln() - x
        + 0.5 * (2.0 * PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Harmonic number H_n = sum_{k=1..n} 1/k, H_0 = 0. Exact small-n sum,
/// asymptotic expansion for n > 64.
pub fn harmonic(n: usize) -> f64 {
    if n <= 64 {
        let mut acc = CompensatedSum::new();
        for k in (1..=n).rev() {
            acc.add(1.0 / k as f64);
        }
        return acc.value();
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x.ln() + EULER_GAMMA + 0.5 * inv - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0))
}

/// ln(sinh t) for t > 0 without overflow: t - ln 2 + ln(1 - e^{-2t}).
pub fn ln_sinh(t: f64) -> f64 {
    debug_assert!(t > 0.0);
    t - std::f64::consts::LN_2 + (-(-2.0 * t).exp()).ln_1p()
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_phase(phi: f64) -> f64 {
    if !phi.is_finite() {
        return phi;
    }
    let mut p = phi % TAU;
    if p > PI {
        p -= TAU;
    } else if p <= -PI {
        p += TAU;
    }
    p
}

/// A complex value stored as natural-log magnitude plus phase.
///
/// Zero is `log_magnitude = -inf` with `phase = 0`. Multiplication adds
/// both components; addition goes through log-sum-exp at the call sites
/// that need it. Serialized as a `[log_magnitude, phase]` pair, with
/// `null` standing in for the -inf of an exact zero (JSON has no
/// infinities).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "(Option<f64>, f64)", into = "(Option<f64>, f64)")]
pub struct LogComplex {
    pub log_magnitude: f64,
    pub phase: f64,
}

impl From<(Option<f64>, f64)> for LogComplex {
    fn from(v: (Option<f64>, f64)) -> Self {
        Self { log_magnitude: v.0.unwrap_or(f64::NEG_INFINITY), phase: v.1 }
    }
}

impl From<LogComplex> for (Option<f64>, f64) {
    fn from(v: LogComplex) -> Self {
        let lm = if v.log_magnitude == f64::NEG_INFINITY { None } else { Some(v.log_magnitude) };
        (lm, v.phase)
    }
}

impl LogComplex {
    pub const ZERO: Self = Self { log_magnitude: f64::NEG_INFINITY, phase: 0.0 };
    pub const ONE: Self = Self { log_magnitude: 0.0, phase: 0.0 };

    pub fn new(log_magnitude: f64, phase: f64) -> Self {
        Self { log_magnitude, phase: wrap_phase(phase) }
    }

    pub fn from_complex(c: Complex64) -> Self {
        if c == Complex64::new(0.0, 0.0) {
            Self::ZERO
        } else {
            Self { log_magnitude: c.norm().ln(), phase: c.arg() }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    pub fn value(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let r = self.log_magnitude.exp();
        Complex64::new(r * self.phase.cos(), r * self.phase.sin())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.log_magnitude + other.log_magnitude, self.phase + other.phase)
    }

    pub fn conj(&self) -> Self {
        Self { log_magnitude: self.log_magnitude, phase: -wrap_phase(self.phase) }
    }

    /// |v|^2 as a plain float; underflows gracefully to 0.
    pub fn abs_sq(&self) -> f64 {
        (2.0 * self.log_magnitude).exp()
    }
}

/// Serde helpers representing `Complex64` as a `[re, im]` pair.
pub mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        (z.re, z.im).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let (re, im) = <(f64, f64)>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Serde helpers representing `Vec<Complex64>` as `[[re, im], ...]`.
pub mod complex_pair_vec {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(zs: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        zs.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = <Vec<(f64, f64)>>::deserialize(d)?;
        Ok(pairs.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_matches_direct_products() {
        // direct f64 products are exact-ish for small n
        let mut fact = 1.0f64;
        for n in 1..=20 {
            fact *= n as f64;
            assert!((ln_factorial(n) - fact.ln()).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn ln_factorial_table_stirling_seam() {
        // values straddling the table boundary must be consistent:
        // ln(1025!) = ln(1024!) + ln(1025)
        let lhs = ln_factorial(1025);
        let rhs = ln_factorial(1024) + 1025f64.ln();
        assert!((lhs - rhs).abs() < 1e-9, "seam mismatch {lhs} vs {rhs}");
        let lhs = ln_factorial(5000);
        let rhs = ln_factorial(4999) + 5000f64.ln();
        assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn harmonic_seam_and_small_values() {
        assert_eq!(harmonic(0), 0.0);
        assert_eq!(harmonic(1), 1.0);
        assert!((harmonic(2) - 1.5).abs() < 1e-15);
        // seam at 64/65
        let h65 = harmonic(64) + 1.0 / 65.0;
        assert!((harmonic(65) - h65).abs() < 1e-13);
    }

    #[test]
    fn ln_sinh_stable() {
        assert!((ln_sinh(1.0) - 1.0f64.sinh().ln()).abs() < 1e-15);
        // huge argument must not overflow
        let t = 800.0;
        assert!((ln_sinh(t) - (t - std::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn wrap_phase_range() {
        for k in -7..=7 {
            let phi = 0.3 + k as f64 * TAU;
            let w = wrap_phase(phi);
            assert!((w - 0.3).abs() < 1e-12);
        }
        assert!((wrap_phase(PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-12); // -pi maps to +pi
    }

    #[test]
    fn log_complex_round_trips() {
        let c = Complex64::new(-3.0, 4.0);
        let lc = LogComplex::from_complex(c);
        let back = lc.value();
        assert!((back - c).norm() < 1e-14);
        assert!(LogComplex::ZERO.value().norm() == 0.0);
        let json = serde_json::to_string(&lc).unwrap();
        let parsed: LogComplex = serde_json::from_str(&json).unwrap();
        assert_eq!(lc, parsed);
        assert!(json.starts_with('['), "serializes as a pair: {json}");
        // exact zeros survive the trip through JSON (no -inf in JSON)
        let zero_json = serde_json::to_string(&LogComplex::ZERO).unwrap();
        assert_eq!(zero_json, "[null,0.0]");
        let parsed: LogComplex = serde_json::from_str(&zero_json).unwrap();
        assert_eq!(parsed, LogComplex::ZERO);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        // classic cancellation stress: sum 1.0 followed by many tiny terms
        let mut acc = CompensatedSum::new();
        acc.add(1.0);
        for _ in 0..1_000_000 {
            acc.add(1e-16);
        }
        let expect = 1.0 + 1e-10;
        assert!((acc.value() - expect).abs() < 1e-15);
    }
}
