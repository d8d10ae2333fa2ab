//! Weights, the weighted translation `T_{a,w} f = w · (f ∗ δ_a)` and its
//! inverse `S_{a,w} h = (h / w) ∗ δ_{a⁻¹}`.
//!
//! Every dynamical criterion is phrased through the two orbit products
//!
//! ```text
//! φ_n(x) = ∏_{j=1}^{n} w(x·a^j)          φ̃_n(x) = [∏_{j=0}^{n-1} w(x·a^{-j})]^{-1}
//! ```
//!
//! which are also the multipliers of the closed-form iterates:
//! `(Tⁿf)(x·aⁿ) = φ_n(x) f(x)` and `(Sⁿh)(x·a⁻ⁿ) = φ̃_n(x) h(x)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{Group, GroupElement, GroupError};
use crate::orlicz::OrliczVector;
use crate::young::YoungFunction;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("invalid weight: {0}")]
    Invalid(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A positive real kept as `mantissa · 2^exp2` so that long orbit products
/// neither underflow nor overflow. Multiplying by powers of two is exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightProduct {
    mantissa: f64,
    exp2: i64,
}

const RENORM_LIMIT: i64 = 256;

fn raw_exponent(x: f64) -> i64 {
    ((x.to_bits() >> 52) & 0x7ff) as i64 - 1023
}

/// `x · 2^e` without intermediate overflow of `2^e`.
pub fn ldexp(mut x: f64, mut e: i64) -> f64 {
    let step = 1000;
    while e > step && x.is_finite() && x != 0.0 {
        x *= 2f64.powi(step as i32);
        e -= step;
    }
    while e < -step && x != 0.0 {
        x *= 2f64.powi(-step as i32);
        e += step;
    }
    x * 2f64.powi(e as i32)
}

impl WeightProduct {
    pub const ONE: WeightProduct = WeightProduct { mantissa: 1.0, exp2: 0 };

    fn normalized(mut self) -> Self {
        let e = raw_exponent(self.mantissa);
        if e.abs() > RENORM_LIMIT {
            self.mantissa *= 2f64.powi(-e as i32);
            self.exp2 += e;
        }
        self
    }

    pub fn times(self, w: f64) -> Self {
        debug_assert!(w > 0.0 && w.is_finite());
        WeightProduct {
            mantissa: self.mantissa * w,
            exp2: self.exp2,
        }
        .normalized()
    }

    pub fn recip(self) -> Self {
        WeightProduct {
            mantissa: 1.0 / self.mantissa,
            exp2: -self.exp2,
        }
        .normalized()
    }

    /// Linear value; legitimately `0.0` (or `∞`) once outside the f64 range.
    pub fn value(self) -> f64 {
        ldexp(self.mantissa, self.exp2)
    }

    pub fn log2(self) -> f64 {
        self.exp2 as f64 + self.mantissa.log2()
    }

    /// `c · self` evaluated without forming `self` first.
    pub fn scale(self, c: f64) -> f64 {
        ldexp(c * self.mantissa, self.exp2)
    }
}

/// Explicit weight values with a fallback for every other element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<(GroupElement, f64)>", into = "Vec<(GroupElement, f64)>")]
pub struct WeightTable(BTreeMap<GroupElement, f64>);

impl From<Vec<(GroupElement, f64)>> for WeightTable {
    fn from(v: Vec<(GroupElement, f64)>) -> Self {
        WeightTable(v.into_iter().collect())
    }
}

impl From<WeightTable> for Vec<(GroupElement, f64)> {
    fn from(t: WeightTable) -> Self {
        t.0.into_iter().collect()
    }
}

impl WeightTable {
    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, f64)> {
        self.0.iter().map(|(g, w)| (g, *w))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Weight {
    Constant {
        c: f64,
    },
    /// On ℤ: `c_neg` for `x <= 0`, `c_pos` for `x >= 1`.
    TwoSidedStep {
        c_neg: f64,
        c_pos: f64,
    },
    /// Heisenberg weight depending on the central coordinate:
    /// `1/2` for `z >= 1`, `2^{-z}` for `-1 < z < 1`, `2` for `z <= -1`.
    HeisenbergPaper,
    Table {
        entries: WeightTable,
        default: f64,
    },
}

fn positive(name: &str, v: f64) -> Result<(), WeightError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(WeightError::Invalid(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl Weight {
    pub fn table(entries: impl IntoIterator<Item = (GroupElement, f64)>, default: f64) -> Self {
        Weight::Table {
            entries: WeightTable(entries.into_iter().collect()),
            default,
        }
    }

    pub fn validate(&self, group: &Group) -> Result<(), WeightError> {
        match self {
            Weight::Constant { c } => positive("c", *c),
            Weight::TwoSidedStep { c_neg, c_pos } => {
                if *group != Group::Integers {
                    return Err(WeightError::Invalid("two_sided_step is defined on Z only".into()));
                }
                positive("c_neg", *c_neg)?;
                positive("c_pos", *c_pos)
            }
            Weight::HeisenbergPaper => {
                if *group != Group::Heisenberg {
                    return Err(WeightError::Invalid(
                        "heisenberg_paper is defined on the Heisenberg group only".into(),
                    ));
                }
                Ok(())
            }
            Weight::Table { entries, default } => {
                positive("default", *default)?;
                for (g, w) in entries.iter() {
                    group.check(g)?;
                    positive("table entry", w)?;
                }
                Ok(())
            }
        }
    }

    /// `w(g)`; `g` must belong to the group the weight was validated against.
    pub fn evaluate(&self, g: &GroupElement) -> f64 {
        match self {
            Weight::Constant { c } => *c,
            Weight::TwoSidedStep { c_neg, c_pos } => {
                if g.coords()[0] <= 0 {
                    *c_neg
                } else {
                    *c_pos
                }
            }
            Weight::HeisenbergPaper => {
                let z = g.coords()[2];
                if z >= 1 {
                    0.5
                } else if z <= -1 {
                    2.0
                } else {
                    // 2^{-z} at z = 0
                    1.0
                }
            }
            Weight::Table { entries, default } => entries.0.get(g).copied().unwrap_or(*default),
        }
    }

    /// Exact `(inf w, sup w)` over the group.
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            Weight::Constant { c } => (*c, *c),
            Weight::TwoSidedStep { c_neg, c_pos } => (c_neg.min(*c_pos), c_neg.max(*c_pos)),
            Weight::HeisenbergPaper => (0.5, 2.0),
            Weight::Table { entries, default } => entries
                .iter()
                .fold((*default, *default), |(lo, hi), (_, w)| (lo.min(w), hi.max(w))),
        }
    }
}

/// The data defining `T_{a,w}` on `L^Φ(G)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSystem {
    pub group: Group,
    pub a: GroupElement,
    pub weight: Weight,
    pub young: YoungFunction,
}

impl WeightedSystem {
    pub fn new(group: Group, a: GroupElement, weight: Weight, young: YoungFunction) -> Result<Self, WeightError> {
        group.validate()?;
        group.check(&a)?;
        weight.validate(&group)?;
        young.validate().map_err(|e| WeightError::Invalid(e.to_string()))?;
        Ok(WeightedSystem {
            group,
            a,
            weight,
            young,
        })
    }

    pub fn w(&self, g: &GroupElement) -> f64 {
        self.weight.evaluate(g)
    }

    /// `(T f)(x) = w(x) f(x·a⁻¹)`.
    pub fn apply_t(&self, f: &OrliczVector) -> Result<OrliczVector, GroupError> {
        let mut out = Vec::with_capacity(f.support_size());
        for (x, v) in f.iter() {
            let y = self.group.mul(x, &self.a)?;
            let wy = self.w(&y);
            out.push((y, wy * v));
        }
        Ok(OrliczVector::from_pairs(out))
    }

    /// `(S h)(x) = h(x·a) / w(x·a)`.
    pub fn apply_s(&self, h: &OrliczVector) -> Result<OrliczVector, GroupError> {
        let a_inv = self.group.inv(&self.a)?;
        let mut out = Vec::with_capacity(h.support_size());
        for (y, v) in h.iter() {
            let x = self.group.mul(y, &a_inv)?;
            out.push((x, v / self.w(y)));
        }
        Ok(OrliczVector::from_pairs(out))
    }

    /// `Tⁿ f` in closed form: `(Tⁿf)(x·aⁿ) = φ_n(x) f(x)`.
    pub fn apply_t_n(&self, f: &OrliczVector, n: u64) -> Result<OrliczVector, GroupError> {
        let an = self.group.pow(&self.a, to_i64(n)?)?;
        let mut out = Vec::with_capacity(f.support_size());
        for (x, v) in f.iter() {
            let phi = self.phi_product(x, n)?;
            out.push((self.group.mul(x, &an)?, phi.scale(v)));
        }
        Ok(OrliczVector::from_pairs(out))
    }

    /// `Sⁿ h` in closed form: `(Sⁿh)(x·a⁻ⁿ) = φ̃_n(x) h(x)`.
    pub fn apply_s_n(&self, h: &OrliczVector, n: u64) -> Result<OrliczVector, GroupError> {
        let a_n_inv = self.group.pow(&self.a, -to_i64(n)?)?;
        let mut out = Vec::with_capacity(h.support_size());
        for (x, v) in h.iter() {
            let phi_t = self.phi_tilde_product(x, n)?;
            out.push((self.group.mul(x, &a_n_inv)?, phi_t.scale(v)));
        }
        Ok(OrliczVector::from_pairs(out))
    }

    /// `φ_n(x) = ∏_{j=1}^{n} w(x·a^j)`, each factor located independently.
    pub fn phi_product(&self, x: &GroupElement, n: u64) -> Result<WeightProduct, GroupError> {
        let mut acc = WeightProduct::ONE;
        for j in 1..=to_i64(n)? {
            let y = self.group.mul(x, &self.group.pow(&self.a, j)?)?;
            acc = acc.times(self.w(&y));
        }
        Ok(acc)
    }

    /// `φ̃_n(x) = [∏_{j=0}^{n-1} w(x·a^{-j})]^{-1}`.
    pub fn phi_tilde_product(&self, x: &GroupElement, n: u64) -> Result<WeightProduct, GroupError> {
        let mut acc = WeightProduct::ONE;
        for j in 0..to_i64(n)? {
            let y = self.group.mul(x, &self.group.pow(&self.a, -j)?)?;
            acc = acc.times(self.w(&y));
        }
        Ok(acc.recip())
    }

    /// `[φ_0(x), …, φ_{n_max}(x)]` via `φ_{n+1}(x) = φ_n(x) · w(x·a^{n+1})`.
    pub fn phi_series(&self, x: &GroupElement, n_max: u64) -> Result<Vec<WeightProduct>, GroupError> {
        let mut out = Vec::with_capacity(n_max as usize + 1);
        let mut acc = WeightProduct::ONE;
        let mut y = x.clone();
        out.push(acc);
        for _ in 0..n_max {
            y = self.group.mul(&y, &self.a)?;
            acc = acc.times(self.w(&y));
            out.push(acc);
        }
        Ok(out)
    }

    /// `[φ̃_0(x), …, φ̃_{n_max}(x)]`, incrementally.
    pub fn phi_tilde_series(&self, x: &GroupElement, n_max: u64) -> Result<Vec<WeightProduct>, GroupError> {
        let a_inv = self.group.inv(&self.a)?;
        let mut out = Vec::with_capacity(n_max as usize + 1);
        let mut acc = WeightProduct::ONE;
        let mut y = x.clone();
        out.push(acc);
        for _ in 0..n_max {
            acc = acc.times(self.w(&y));
            out.push(acc.recip());
            y = self.group.mul(&y, &a_inv)?;
        }
        Ok(out)
    }
}

fn to_i64(n: u64) -> Result<i64, GroupError> {
    i64::try_from(n).map_err(|_| GroupError::Overflow)
}
