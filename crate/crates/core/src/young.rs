//! Young functions Φ, their generalized inverses and complementary functions.
//!
//! Three families are available:
//!
//! * `Power { p }`: `Φ(t) = |t|^p / p`, `p >= 1`; the Orlicz space is `ℓ^p`.
//! * `AlphaLog { alpha }`: `Φ(t) = |t|^α (1 + |ln|t||)`, `α > 1`.
//! * `Custom { table }`: piecewise-linear interpolation of a sampled,
//!   convexity-checked table on `[0, T]`.
//!
//! Note that `AlphaLog` is only convex for `α >= (3 + √5)/2`; for smaller
//! exponents it is concave on an interval to the left of `t = 1`. Everything
//! here except the Young-inequality direction of conjugation works without
//! convexity, and [`convexity_defect`] reports how far a function is from it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::solve::{bisect_threshold, bracket_positive, golden_section_max};

/// Relative tolerance of the bisection behind [`YoungFunction::inverse`].
pub const INVERSE_REL_TOL: f64 = 1e-12;

/// Bracket expansion stops here; an objective still increasing at this point
/// makes the complementary function `+∞`.
const CONJUGATE_X_CAP: f64 = 1e150;

const CONJUGATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum YoungError {
    #[error("argument {t} is outside the tabulated range [0, {max}]")]
    OutOfRange { t: f64, max: f64 },
    #[error("invalid Young function: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum YoungFunction {
    Power {
        p: f64,
    },
    #[serde(rename = "alphalog")]
    AlphaLog {
        alpha: f64,
    },
    /// Sample points `(t, Φ(t))` starting at `(0, 0)`.
    Custom {
        table: Vec<(f64, f64)>,
    },
}

impl YoungFunction {
    pub fn power(p: f64) -> Result<Self, YoungError> {
        let phi = YoungFunction::Power { p };
        phi.validate()?;
        Ok(phi)
    }

    pub fn alpha_log(alpha: f64) -> Result<Self, YoungError> {
        let phi = YoungFunction::AlphaLog { alpha };
        phi.validate()?;
        Ok(phi)
    }

    pub fn custom(table: Vec<(f64, f64)>) -> Result<Self, YoungError> {
        let phi = YoungFunction::Custom { table };
        phi.validate()?;
        Ok(phi)
    }

    pub fn validate(&self) -> Result<(), YoungError> {
        match self {
            YoungFunction::Power { p } => {
                if !(p.is_finite() && *p >= 1.0) {
                    return Err(YoungError::Invalid(format!("power family needs p >= 1, got {p}")));
                }
            }
            YoungFunction::AlphaLog { alpha } => {
                if !(alpha.is_finite() && *alpha > 1.0) {
                    return Err(YoungError::Invalid(format!(
                        "alphalog family needs alpha > 1, got {alpha}"
                    )));
                }
            }
            YoungFunction::Custom { table } => validate_table(table)?,
        }
        Ok(())
    }

    /// Largest argument at which Φ is defined (`∞` for the closed-form families).
    pub fn domain_max(&self) -> f64 {
        match self {
            YoungFunction::Custom { table } => table.last().map_or(0.0, |p| p.0),
            _ => f64::INFINITY,
        }
    }

    /// Φ(t).
    pub fn evaluate(&self, t: f64) -> Result<f64, YoungError> {
        let t = t.abs();
        match self {
            YoungFunction::Power { p } => Ok(if *p == 1.0 { t } else { t.powf(*p) / p }),
            YoungFunction::AlphaLog { alpha } => {
                if t == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(t.powf(*alpha) * (1.0 + t.ln().abs()))
                }
            }
            YoungFunction::Custom { table } => interpolate(table, t),
        }
    }

    /// Generalized inverse `inf { t >= 0 : Φ(t) >= s }`, by bisection.
    pub fn inverse(&self, s: f64) -> Result<f64, YoungError> {
        if s.is_nan() || s < 0.0 {
            return Err(YoungError::Invalid(format!("inverse needs s >= 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        if s.is_infinite() {
            return Ok(f64::INFINITY);
        }
        let t_max = self.domain_max();
        if t_max.is_finite() {
            let top = self.evaluate(t_max)?;
            if top < s {
                return Err(YoungError::OutOfRange { t: s, max: top });
            }
        }
        let reaches = |t: f64| -> Result<bool, YoungError> { Ok(self.evaluate(t.min(t_max))? >= s) };
        let start = if t_max.is_finite() { t_max.min(1.0) } else { 1.0 };
        let Some((lo, hi)) = bracket_positive(start, reaches)? else {
            return Ok(f64::INFINITY);
        };
        let hi = hi.min(t_max);
        bisect_threshold(lo, hi, INVERSE_REL_TOL, reaches)
    }

    /// Complementary function `Ψ(y) = sup { x|y| - Φ(x) : x >= 0 }`.
    ///
    /// Returns `f64::INFINITY` when the objective is still increasing at the
    /// bracket cap. Tabulated functions are conjugated over their domain only.
    pub fn complementary(&self, y: f64) -> Result<f64, YoungError> {
        let y = y.abs();
        if y == 0.0 {
            return Ok(0.0);
        }
        let t_max = self.domain_max();
        let mut err = None;
        let mut objective = |x: f64| match self.evaluate(x) {
            Ok(v) => x * y - v,
            Err(e) => {
                err = Some(e);
                f64::NEG_INFINITY
            }
        };
        let value = if t_max.is_finite() {
            let (_, v) = golden_section_max(&mut objective, 0.0, t_max, CONJUGATE_TOL);
            v
        } else {
            match concave_sup(&mut objective, CONJUGATE_X_CAP) {
                Some(v) => v,
                None => return Ok(f64::INFINITY),
            }
        };
        if let Some(e) = err {
            return Err(e);
        }
        Ok(value.max(0.0))
    }
}

/// Supremum over `x >= 0` of a concave objective with `g(0) = 0`, or `None`
/// when it keeps increasing up to `x_cap`.
pub fn concave_sup(mut g: impl FnMut(f64) -> f64, x_cap: f64) -> Option<f64> {
    let mut prev = 0.0;
    let mut x = 1.0;
    let mut gx = g(x);
    loop {
        let next = 2.0 * x;
        let gn = g(next);
        if gn <= gx {
            let (_, v) = golden_section_max(&mut g, prev, next, CONJUGATE_TOL);
            return Some(v.max(gx).max(0.0));
        }
        if next >= x_cap {
            return None;
        }
        prev = x;
        x = next;
        gx = gn;
    }
}

fn validate_table(table: &[(f64, f64)]) -> Result<(), YoungError> {
    if table.len() < 2 {
        return Err(YoungError::Invalid("custom table needs at least two points".into()));
    }
    if table[0] != (0.0, 0.0) {
        return Err(YoungError::Invalid("custom table must start at (0, 0)".into()));
    }
    let mut prev_slope = f64::NEG_INFINITY;
    for w in table.windows(2) {
        let ((t0, p0), (t1, p1)) = (w[0], w[1]);
        if !(t1.is_finite() && p1.is_finite()) {
            return Err(YoungError::Invalid("custom table entries must be finite".into()));
        }
        if t1 <= t0 {
            return Err(YoungError::Invalid("custom table t values must increase".into()));
        }
        if p1 <= 0.0 || p1 < p0 {
            return Err(YoungError::Invalid(
                "custom table must be positive and nondecreasing after t = 0".into(),
            ));
        }
        let slope = (p1 - p0) / (t1 - t0);
        if slope < prev_slope - 1e-12 * prev_slope.abs().max(1.0) {
            return Err(YoungError::Invalid(format!("custom table is not convex near t = {t0}")));
        }
        prev_slope = slope;
    }
    Ok(())
}

fn interpolate(table: &[(f64, f64)], t: f64) -> Result<f64, YoungError> {
    let max = table.last().map_or(0.0, |p| p.0);
    if t > max || t.is_nan() {
        return Err(YoungError::OutOfRange { t, max });
    }
    let idx = table.partition_point(|&(ti, _)| ti < t);
    if idx == 0 {
        return Ok(table[0].1);
    }
    let (t0, p0) = table[idx - 1];
    let (t1, p1) = table[idx];
    Ok(p0 + (p1 - p0) * (t - t0) / (t1 - t0))
}

/// Δ₂ evidence: `sup Φ(2t)/Φ(t)` over a logarithmic grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Delta2Report {
    pub m_hat: f64,
    pub argmax_t: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub n_grid: usize,
    /// Always true: a finite grid cannot prove Δ₂-regularity.
    pub evidence_only: bool,
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn delta2_probe(phi: &YoungFunction, t_lo: f64, t_hi: f64, n_grid: usize) -> Result<Delta2Report, YoungError> {
    if !(t_lo > 0.0 && t_hi > t_lo && n_grid >= 1) {
        return Err(YoungError::Invalid(format!(
            "delta2 probe needs 0 < t_lo < t_hi and n_grid >= 1, got [{t_lo}, {t_hi}] x {n_grid}"
        )));
    }
    let mut m_hat = f64::NEG_INFINITY;
    let mut argmax_t = t_lo;
    for t in log_grid(t_lo, t_hi, n_grid) {
        let ratio = phi.evaluate(2.0 * t)? / phi.evaluate(t)?;
        if ratio > m_hat {
            m_hat = ratio;
            argmax_t = t;
        }
    }
    Ok(Delta2Report {
        m_hat,
        argmax_t,
        t_lo,
        t_hi,
        n_grid,
        evidence_only: true,
    })
}

/// Largest violation of `xy <= Φ(x) + Ψ(y)` over `(0, 0)` and `samples - 1`
/// seeded random points in `[0, range]²`. Points with `Ψ(y) = ∞` are skipped.
pub fn young_inequality_check(phi: &YoungFunction, samples: usize, seed: u64) -> Result<f64, YoungError> {
    if samples == 0 {
        return Err(YoungError::Invalid("need at least one sample".into()));
    }
    let range = phi.domain_max().min(4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 1..samples {
        let x = rng.gen_range(0.0..=range);
        let y = rng.gen_range(0.0..=range);
        let psi = phi.complementary(y)?;
        if psi.is_infinite() {
            continue;
        }
        worst = worst.max(x * y - phi.evaluate(x)? - psi);
    }
    Ok(worst)
}

/// Most negative second difference `Φ(s) + Φ(u) - 2Φ((s+u)/2)` over a uniform
/// grid on `[0, t_hi]`; `0` means no convexity defect was seen.
pub fn convexity_defect(phi: &YoungFunction, t_hi: f64, n: usize) -> Result<f64, YoungError> {
    let t_hi = t_hi.min(phi.domain_max());
    let h = t_hi / n.max(2) as f64;
    let mut worst = 0.0f64;
    for i in 1..n.max(2) {
        let t = i as f64 * h;
        let d = phi.evaluate(t - h)? + phi.evaluate(t + h)? - 2.0 * phi.evaluate(t)?;
        worst = worst.min(d);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::{prop_assert, prop_assert_eq, prop_oneof, proptest, Strategy};

    fn p(pp: f64) -> YoungFunction {
        YoungFunction::power(pp).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(p(2.0).evaluate(3.0).unwrap(), 4.5);
        assert_eq!(YoungFunction::alpha_log(2.0).unwrap().evaluate(1.0).unwrap(), 1.0);
        assert_eq!(p(1.0).evaluate(-4.0).unwrap(), 4.0);
        assert_eq!(YoungFunction::alpha_log(1.5).unwrap().evaluate(0.0).unwrap(), 0.0);
    }

    #[test]
    fn inverse_examples() {
        assert_relative_eq!(p(2.0).inverse(0.5).unwrap(), 1.0, max_relative = 1e-12);
        assert_eq!(p(3.0).inverse(0.0).unwrap(), 0.0);
        assert_eq!(YoungFunction::alpha_log(2.0).unwrap().inverse(0.0).unwrap(), 0.0);
        assert_relative_eq!(p(1.0).inverse(7.0).unwrap(), 7.0, max_relative = 1e-12);
        // t^2/2 = 1/8  =>  t = 1/2
        assert_relative_eq!(p(2.0).inverse(0.125).unwrap(), 0.5, max_relative = 1e-12);
        assert!(p(2.0).inverse(-1.0).is_err());
    }

    #[test]
    fn complementary_examples() {
        // Dense-grid oracle for the conjugate of t^2/2 at y = 3.
        let grid_max = (0..=600_000)
            .map(|i| i as f64 * 1e-5)
            .map(|x| 3.0 * x - x * x / 2.0)
            .fold(f64::NEG_INFINITY, f64::max);
        let psi = p(2.0).complementary(3.0).unwrap();
        assert!((psi - grid_max).abs() < 1e-9);
        assert!((psi - 4.5).abs() < 1e-10);
        assert_eq!(p(2.0).complementary(0.0).unwrap(), 0.0);
        assert_eq!(YoungFunction::alpha_log(1.5).unwrap().complementary(0.0).unwrap(), 0.0);
        // Linear Φ: objective x(2 - 1) grows along every expanding bracket.
        let obj = |x: f64| 2.0 * x - p(1.0).evaluate(x).unwrap();
        let mut x = 1.0;
        while x < 1e6 {
            assert!(obj(2.0 * x) > obj(x));
            x *= 2.0;
        }
        assert_eq!(p(1.0).complementary(2.0).unwrap(), f64::INFINITY);
        assert_eq!(p(1.0).complementary(0.5).unwrap(), 0.0);
        assert_eq!(p(1.0).complementary(1.0).unwrap(), 0.0);
    }

    #[test]
    fn complementary_matches_hoelder_conjugate() {
        for pp in [1.5, 2.0, 3.0, 4.5] {
            let q = pp / (pp - 1.0);
            for y in [0.1f64, 0.5, 1.0, 2.0, 3.7] {
                let closed = y.powf(q) / q;
                let psi = p(pp).complementary(y).unwrap();
                assert!(
                    (psi - closed).abs() <= 1e-10 * (1.0 + closed),
                    "p={pp} y={y}: {psi} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn young_inequality_power_family() {
        assert!(young_inequality_check(&p(2.0), 2000, 7).unwrap() <= 1e-8);
        assert!(young_inequality_check(&p(3.0), 10_000, 11).unwrap() <= 1e-8);
        assert_eq!(young_inequality_check(&p(2.0), 1, 0).unwrap(), 0.0);
        // Closed-form Ψ for p = 3 as an independent oracle.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let (x, y): (f64, f64) = (rng.gen_range(0.0..4.0), rng.gen_range(0.0..4.0));
            let psi = y.powf(1.5) / 1.5;
            assert!(x * y - x.powi(3) / 3.0 - psi <= 1e-12);
        }
    }

    #[test]
    fn delta2_examples() {
        let r = delta2_probe(&p(2.0), 1e-3, 1e3, 200).unwrap();
        assert_relative_eq!(r.m_hat, 4.0, max_relative = 1e-12);
        assert!(r.evidence_only);
        let r = delta2_probe(&p(1.0), 1e-3, 1e3, 200).unwrap();
        assert_relative_eq!(r.m_hat, 2.0, max_relative = 1e-12);

        let r = delta2_probe(&YoungFunction::alpha_log(2.0).unwrap(), 1e-3, 1e3, 301).unwrap();
        // Direct grid oracle: 4(1 + |ln 2t|) / (1 + |ln t|).
        let oracle = log_grid(1e-3, 1e3, 301)
            .into_iter()
            .map(|t: f64| 4.0 * (1.0 + (2.0 * t).ln().abs()) / (1.0 + t.ln().abs()))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(r.m_hat.is_finite());
        assert_relative_eq!(r.m_hat, oracle, max_relative = 1e-12);
        assert!(r.m_hat >= 2.0);
        assert!(delta2_probe(&p(2.0), 1.0, 0.5, 10).is_err());
    }

    #[test]
    fn custom_table() {
        let phi = YoungFunction::custom(vec![(0.0, 0.0), (1.0, 0.5), (2.0, 2.0), (4.0, 8.0)]).unwrap();
        assert_eq!(phi.evaluate(1.5).unwrap(), 1.25);
        assert_eq!(phi.evaluate(-1.0).unwrap(), 0.5);
        assert!(matches!(phi.evaluate(5.0), Err(YoungError::OutOfRange { .. })));
        assert_relative_eq!(phi.inverse(1.25).unwrap(), 1.5, max_relative = 1e-12);
        assert!(phi.inverse(9.0).is_err());
        // Conjugate over [0, 4]: max of 2x - Φ(x) at the kink x = 1 or 2.
        assert_relative_eq!(phi.complementary(2.0).unwrap(), 2.0, max_relative = 1e-9);

        assert!(YoungFunction::custom(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 3.0)]).is_err());
        assert!(YoungFunction::custom(vec![(0.0, 0.0)]).is_err());
        assert!(YoungFunction::custom(vec![(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(YoungFunction::custom(vec![(0.0, 0.0), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn alphalog_convexity_threshold() {
        // Concave just left of t = 1 below alpha = (3 + sqrt 5) / 2.
        assert!(convexity_defect(&YoungFunction::alpha_log(2.0).unwrap(), 3.0, 3000).unwrap() < -1e-7);
        assert!(convexity_defect(&YoungFunction::alpha_log(1.5).unwrap(), 3.0, 3000).unwrap() < -1e-7);
        assert!(convexity_defect(&YoungFunction::alpha_log(2.7).unwrap(), 3.0, 3000).unwrap() >= -1e-12);
        assert!(convexity_defect(&p(2.0), 3.0, 3000).unwrap() >= -1e-12);
    }

    #[test]
    fn serde_specs() {
        let phi: YoungFunction = serde_json::from_str(r#"{"family":"power","p":2.0}"#).unwrap();
        assert_eq!(phi, p(2.0));
        let phi: YoungFunction = serde_json::from_str(r#"{"family":"alphalog","alpha":1.5}"#).unwrap();
        assert_eq!(phi, YoungFunction::AlphaLog { alpha: 1.5 });
        let phi: YoungFunction = serde_json::from_str(r#"{"family":"custom","table":[[0,0],[1,1],[2,3]]}"#).unwrap();
        assert!(phi.validate().is_ok());
    }

    fn convex_family() -> impl Strategy<Value = YoungFunction> {
        prop_oneof![
            (1.0f64..5.0).prop_map(|p| YoungFunction::Power { p }),
            (2.7f64..4.0).prop_map(|alpha| YoungFunction::AlphaLog { alpha }),
        ]
    }

    fn any_family() -> impl Strategy<Value = YoungFunction> {
        prop_oneof![
            (1.0f64..5.0).prop_map(|p| YoungFunction::Power { p }),
            (1.01f64..4.0).prop_map(|alpha| YoungFunction::AlphaLog { alpha }),
        ]
    }

    proptest! {
        #[test]
        fn even(phi in any_family(), t in -50.0f64..50.0) {
            prop_assert_eq!(phi.evaluate(-t).unwrap(), phi.evaluate(t).unwrap());
        }

        #[test]
        fn monotone(phi in any_family(), a in 0.0f64..20.0, b in 0.0f64..20.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(phi.evaluate(lo).unwrap() <= phi.evaluate(hi).unwrap());
        }

        #[test]
        fn inverse_round_trip(phi in any_family(), t in 1e-3f64..30.0) {
            let back = phi.inverse(phi.evaluate(t).unwrap()).unwrap();
            prop_assert!((back - t).abs() <= 1e-9 * (1.0 + t), "{} vs {}", back, t);
        }

        #[test]
        fn midpoint_convexity(phi in convex_family(), s in 0.0f64..10.0, t in 0.0f64..10.0) {
            let mid = phi.evaluate(0.5 * (s + t)).unwrap();
            let avg = 0.5 * (phi.evaluate(s).unwrap() + phi.evaluate(t).unwrap());
            prop_assert!(mid <= avg + 1e-12 * (1.0 + avg));
        }

        #[test]
        fn power_biconjugation(pp in 1.2f64..4.0, t in 0.05f64..3.0) {
            let phi = YoungFunction::Power { p: pp };
            let psi = |y: f64| phi.complementary(y).unwrap();
            let back = concave_sup(|y| y * t - psi(y), 1e150).unwrap();
            let expect = phi.evaluate(t).unwrap();
            prop_assert!((back - expect).abs() <= 1e-6 * (1.0 + expect), "{} vs {}", back, expect);
        }
    }
}
