//! Finitely supported functions on a discrete group and their Luxemburg norm.
//!
//! With counting measure the modular of `f` at scale `k` is the finite sum
//! `ρ(f/k) = Σ_x Φ(|f(x)|/k)`, and the Luxemburg norm
//! `N_Φ(f) = inf { k > 0 : ρ(f/k) <= 1 }` is the root of `ρ(f/k) = 1`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{CompactSet, Group, GroupElement, GroupError};
use crate::solve::{bisect_threshold, bracket_positive};
use crate::young::{YoungError, YoungFunction};

/// Relative tolerance on the scale `k` of the norm bisection.
pub const NORM_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormError {
    #[error("vector value at {0} is not finite")]
    NonFinite(GroupElement),
    #[error(transparent)]
    Young(#[from] YoungError),
}

/// Real-valued function on a group with finite support. Zero values are never
/// stored.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<(GroupElement, f64)>", into = "Vec<(GroupElement, f64)>")]
pub struct OrliczVector {
    entries: BTreeMap<GroupElement, f64>,
}

impl From<Vec<(GroupElement, f64)>> for OrliczVector {
    fn from(v: Vec<(GroupElement, f64)>) -> Self {
        OrliczVector::from_pairs(v)
    }
}

impl From<OrliczVector> for Vec<(GroupElement, f64)> {
    fn from(f: OrliczVector) -> Self {
        f.entries.into_iter().collect()
    }
}

impl FromIterator<(GroupElement, f64)> for OrliczVector {
    fn from_iter<I: IntoIterator<Item = (GroupElement, f64)>>(iter: I) -> Self {
        OrliczVector::from_pairs(iter)
    }
}

impl OrliczVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a vector from `(element, value)` pairs; repeated elements add up.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (GroupElement, f64)>) -> Self {
        let mut f = Self::zero();
        for (g, v) in pairs {
            f.add_at(g, v);
        }
        f
    }

    pub fn delta(g: GroupElement, value: f64) -> Self {
        Self::from_pairs([(g, value)])
    }

    /// Characteristic function `χ_K`.
    pub fn indicator(k: &CompactSet) -> Self {
        Self::from_pairs(k.iter().map(|g| (g.clone(), 1.0)))
    }

    pub fn get(&self, g: &GroupElement) -> f64 {
        self.entries.get(g).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, f64)> {
        self.entries.iter().map(|(g, v)| (g, *v))
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.entries.keys()
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_at(&mut self, g: GroupElement, v: f64) {
        match self.entries.entry(g) {
            Entry::Occupied(mut slot) => {
                let sum = *slot.get() + v;
                if sum == 0.0 {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
            Entry::Vacant(slot) => {
                if v != 0.0 {
                    slot.insert(v);
                }
            }
        }
    }

    /// Sup norm `‖f‖_∞`.
    pub fn max_abs(&self) -> f64 {
        self.entries.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_values(|_, v| c * v)
    }

    /// Applies `op` to every stored value, dropping results equal to zero.
    pub fn map_values(&self, mut op: impl FnMut(&GroupElement, f64) -> f64) -> Self {
        let entries = self
            .entries
            .iter()
            .filter_map(|(g, v)| {
                let r = op(g, *v);
                (r != 0.0).then(|| (g.clone(), r))
            })
            .collect();
        OrliczVector { entries }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, v) in other.iter() {
            out.add_at(g.clone(), v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, v) in other.iter() {
            out.add_at(g.clone(), -v);
        }
        out
    }

    /// True when no element carries a value in both vectors.
    pub fn support_disjoint(&self, other: &Self) -> bool {
        let (small, large) = if self.support_size() <= other.support_size() {
            (self, other)
        } else {
            (other, self)
        };
        small.support().all(|g| !large.entries.contains_key(g))
    }

    /// `f ∗ δ_a`, i.e. `g(x·a) = f(x)`.
    pub fn translate(&self, group: &Group, a: &GroupElement) -> Result<Self, GroupError> {
        let mut entries = BTreeMap::new();
        for (x, v) in self.iter() {
            entries.insert(group.mul(x, a)?, v);
        }
        Ok(OrliczVector { entries })
    }
}

fn sorted_abs(f: &OrliczVector) -> Result<Vec<f64>, NormError> {
    let mut vals = Vec::with_capacity(f.support_size());
    for (g, v) in f.iter() {
        if !v.is_finite() {
            return Err(NormError::NonFinite(g.clone()));
        }
        vals.push(v.abs());
    }
    // Summation order depends only on the multiset of values, so translated
    // copies of a vector get bit-identical modulars.
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

fn modular_sorted(vals: &[f64], phi: &YoungFunction, k: f64) -> Result<f64, YoungError> {
    vals.iter().try_fold(0.0, |acc, v| Ok(acc + phi.evaluate(v / k)?))
}

/// `ρ(f/k) = Σ_x Φ(|f(x)|/k)`.
pub fn modular(f: &OrliczVector, phi: &YoungFunction, k: f64) -> Result<f64, NormError> {
    let vals = sorted_abs(f)?;
    Ok(modular_sorted(&vals, phi, k)?)
}

/// Luxemburg norm `inf { k > 0 : ρ(f/k) <= 1 }`.
///
/// Brackets from `k₀ = ‖f‖_∞` by doubling/halving, then bisects on `k` to
/// [`NORM_REL_TOL`].
pub fn luxemburg_norm(f: &OrliczVector, phi: &YoungFunction) -> Result<f64, NormError> {
    let vals = sorted_abs(f)?;
    let Some(&k0) = vals.last() else {
        return Ok(0.0);
    };
    // A tabulated Φ is undefined past its last sample; treat the modular as
    // infinite there.
    let within = |k: f64| -> Result<bool, YoungError> {
        match modular_sorted(&vals, phi, k) {
            Ok(m) => Ok(m <= 1.0),
            Err(YoungError::OutOfRange { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };
    match bracket_positive(k0, within)? {
        Some((lo, hi)) => Ok(bisect_threshold(lo, hi, NORM_REL_TOL, within)?),
        None => Ok(f64::INFINITY),
    }
}

/// `N_Φ(χ_B) = 1 / Φ⁻¹(1/|B|)`.
pub fn indicator_norm_closed_form(b: &CompactSet, phi: &YoungFunction) -> Result<f64, YoungError> {
    Ok(1.0 / phi.inverse(1.0 / b.measure() as f64)?)
}
