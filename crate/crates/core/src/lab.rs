//! Explicit witness and periodic vectors, checked in the Luxemburg norm.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GroupElement, GroupError};
use crate::orlicz::{luxemburg_norm, NormError, OrliczVector};
use crate::weight::WeightedSystem;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("summand S^{{{l}n}} f overlaps an earlier summand; n does not separate supp f")]
    SeparationViolated { l: u64 },
    #[error("orbit products at n = {n} do not decay geometrically along l")]
    TailUnbounded { n: u64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Terms with a coefficient above this are flagged as badly conditioned.
pub const TERM_MAGNITUDE_CAP: f64 = 1e12;
pub const DEFAULT_TRUNCATION: u32 = 32;
pub const BOUNDARY_CUTOFF: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReturnReport {
    pub n: u64,
    pub depth: u32,
    pub epsilon: f64,
    /// `N(v - f)`
    pub base_residual: f64,
    /// `Σ_l N(S^{ln} f)`, which dominates `base_residual`.
    pub base_bound: f64,
    /// `N(T^{ln} v - f)` for `l = 1..=depth`
    pub return_residuals: Vec<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicityReport {
    pub n: u64,
    pub truncation: u32,
    /// `N(T^n v - v)`
    pub defect: f64,
    /// `N(T^{(L+1)n} f) + N(S^{Ln} f)`
    pub predicted_bound: f64,
    pub roundoff_allowance: f64,
    /// `N(v - f)`
    pub approximation_residual: f64,
    pub large_terms: bool,
    pub within_bound: bool,
}

fn check_n(n: u64) -> Result<(), LabError> {
    if n == 0 {
        Err(LabError::Invalid("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `v = f + Σ_{l=1}^{L} S^{ln} f` with pairwise disjoint summands.
pub fn recurrence_witness_vector(
    sys: &WeightedSystem,
    f: &OrliczVector,
    n: u64,
    depth: u32,
) -> Result<OrliczVector, LabError> {
    if depth > 0 {
        check_n(n)?;
    }
    let mut seen: BTreeSet<GroupElement> = f.support().cloned().collect();
    let mut v = f.clone();
    for l in 1..=depth as u64 {
        let piece = sys.apply_s_n(f, l * n)?;
        for g in piece.support() {
            if !seen.insert(g.clone()) {
                return Err(LabError::SeparationViolated { l });
            }
        }
        v = v.add(&piece);
    }
    Ok(v)
}

pub fn empirical_return(
    sys: &WeightedSystem,
    f: &OrliczVector,
    n: u64,
    depth: u32,
    epsilon: f64,
) -> Result<ReturnReport, LabError> {
    let phi = &sys.young;
    let v = recurrence_witness_vector(sys, f, n, depth)?;
    let base_residual = luxemburg_norm(&v.sub(f), phi)?;
    let mut base_bound = 0.0;
    let mut return_residuals = Vec::with_capacity(depth as usize);
    for l in 1..=depth as u64 {
        base_bound += luxemburg_norm(&sys.apply_s_n(f, l * n)?, phi)?;
        let moved = sys.apply_t_n(&v, l * n)?;
        return_residuals.push(luxemburg_norm(&moved.sub(f), phi)?);
    }
    let passed = base_residual < epsilon && return_residuals.iter().all(|r| *r < epsilon);
    Ok(ReturnReport {
        n,
        depth,
        epsilon,
        base_residual,
        base_bound,
        return_residuals,
        passed,
    })
}

/// Largest `log2` ratio between consecutive products `φ_{(l+1)n}/φ_{ln}` and
/// `φ̃_{(l+1)n}/φ̃_{ln}` over `supp f` and `1 ≤ l < levels`.
fn decay_ratio_log2(sys: &WeightedSystem, f: &OrliczVector, n: u64, levels: u64) -> Result<f64, LabError> {
    let m = n.checked_mul(levels).ok_or(GroupError::Overflow)?;
    let mut worst = f64::NEG_INFINITY;
    for x in f.support() {
        let fw = sys.phi_series(x, m)?;
        let bw = sys.phi_tilde_series(x, m)?;
        for l in 1..levels as usize {
            let (a, b) = (l * n as usize, (l + 1) * n as usize);
            worst = worst.max(fw[b].log2() - fw[a].log2()).max(bw[b].log2() - bw[a].log2());
        }
    }
    Ok(worst)
}

fn boundary_terms(sys: &WeightedSystem, f: &OrliczVector, n: u64, level: u64) -> Result<(f64, f64), LabError> {
    let fwd = luxemburg_norm(&sys.apply_t_n(f, (level + 1) * n)?, &sys.young)?;
    let bwd = luxemburg_norm(&sys.apply_s_n(f, level * n)?, &sys.young)?;
    Ok((fwd, bwd))
}

/// Truncated periodic vector `v = f + Σ_{l=1}^{L} (T^{ln} f + S^{ln} f)`.
///
/// With `truncation = None`, `L` is the first level whose dropped boundary
/// terms fall below [`BOUNDARY_CUTOFF`], capped at [`DEFAULT_TRUNCATION`].
pub fn chaos_periodic_vector(
    sys: &WeightedSystem,
    f: &OrliczVector,
    n: u64,
    truncation: Option<u32>,
) -> Result<(OrliczVector, PeriodicityReport), LabError> {
    check_n(n)?;
    let phi = &sys.young;
    let probe_levels = truncation.unwrap_or(DEFAULT_TRUNCATION) as u64 + 1;
    if probe_levels >= 2 && !f.is_zero() && decay_ratio_log2(sys, f, n, probe_levels)? >= 0.0 {
        return Err(LabError::TailUnbounded { n });
    }
    let level = match truncation {
        Some(l) => l,
        None => {
            let mut chosen = DEFAULT_TRUNCATION;
            for l in 1..=DEFAULT_TRUNCATION {
                let (a, b) = boundary_terms(sys, f, n, l as u64)?;
                if a.max(b) < BOUNDARY_CUTOFF {
                    chosen = l;
                    break;
                }
            }
            chosen
        }
    };

    let mut v = f.clone();
    let mut piece_norms = luxemburg_norm(f, phi)?;
    let mut large_terms = false;
    for l in 1..=level as u64 {
        for piece in [sys.apply_t_n(f, l * n)?, sys.apply_s_n(f, l * n)?] {
            large_terms |= piece.max_abs() > TERM_MAGNITUDE_CAP;
            piece_norms += luxemburg_norm(&piece, phi)?;
            v = v.add(&piece);
        }
    }
    let defect = luxemburg_norm(&sys.apply_t_n(&v, n)?.sub(&v), phi)?;
    let (a, b) = boundary_terms(sys, f, n, level as u64)?;
    let predicted_bound = a + b;
    let roundoff_allowance = 64.0 * f64::EPSILON * piece_norms;
    let report = PeriodicityReport {
        n,
        truncation: level,
        defect,
        predicted_bound,
        roundoff_allowance,
        approximation_residual: luxemburg_norm(&v.sub(f), phi)?,
        large_terms,
        within_bound: defect <= predicted_bound + roundoff_allowance,
    };
    Ok((v, report))
}

/// `[N(f), N(Tf), …, N(T^{n_steps} f)]`.
pub fn orbit_norm_series(sys: &WeightedSystem, f: &OrliczVector, n_steps: u64) -> Result<Vec<f64>, LabError> {
    check_n(n_steps)?;
    let mut out = Vec::with_capacity(n_steps as usize + 1);
    let mut g = f.clone();
    out.push(luxemburg_norm(&g, &sys.young)?);
    for _ in 0..n_steps {
        g = sys.apply_t(&g)?;
        out.push(luxemburg_norm(&g, &sys.young)?);
    }
    Ok(out)
}
