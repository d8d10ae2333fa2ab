//! Semi-decision checkers for recurrence, transitivity, mixing and chaos of a
//! weighted translation, evaluated on a user-supplied finite set `K`.
//!
//! Every checker reduces to sup-norms over `K` of the orbit products `φ_m` and
//! `φ̃_m`. One [`ProductSweep`] computes all of them for `n ≤ n_max` and
//! `l ≤ max(L, L_max)`; the checkers only scan the resulting tables. A missing
//! witness is reported as `Inconclusive`, never as a negative result, unless an
//! analytic obstruction applies.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{CompactSet, Group, GroupElement, GroupError};
use crate::weight::WeightedSystem;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriteriaError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("inconsistent verdicts: {0}")]
    InconsistentVerdicts(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Recurrent,
    MultiplyRecurrent,
    Transitive,
    Mixing,
    Chaotic,
}

impl Property {
    pub const ALL: [Property; 5] = [
        Property::MultiplyRecurrent,
        Property::Recurrent,
        Property::Transitive,
        Property::Mixing,
        Property::Chaotic,
    ];
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Property::Recurrent => "recurrent",
            Property::MultiplyRecurrent => "multiply_recurrent",
            Property::Transitive => "transitive",
            Property::Mixing => "mixing",
            Property::Chaotic => "chaotic",
        };
        f.pad(s)
    }
}

/// Analytic reason why no witness can exist.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstruction {
    /// `a` has finite order.
    Torsion { order: u64 },
    /// `sup w ≤ 1`, so `φ̃_n ≥ 1` everywhere.
    Contraction { sup_weight: f64 },
    /// `inf w ≥ 1`, so `φ_n ≥ 1` everywhere.
    Expansion { inf_weight: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    WitnessFound,
    ObstructionFound,
    Inconclusive,
}

/// `2^{-k}` for `k = 1..=10`.
pub fn default_epsilons() -> Vec<f64> {
    (1..=10).map(|k| 2f64.powi(-k)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionRequest {
    pub system: WeightedSystem,
    pub k: CompactSet,
    /// Multiple-recurrence depth `L`.
    pub depth: u32,
    pub epsilons: Vec<f64>,
    pub n_max: u64,
    /// Number of computed terms of the chaos series.
    pub l_max: u32,
    /// Search for witnesses even when the weight bound rules them out.
    /// Torsion cannot be overridden.
    pub override_obstructions: bool,
}

impl CriterionRequest {
    pub fn new(system: WeightedSystem, k: CompactSet) -> Self {
        CriterionRequest {
            system,
            k,
            depth: 1,
            epsilons: default_epsilons(),
            n_max: 256,
            l_max: 64,
            override_obstructions: false,
        }
    }

    pub fn with_depth(mut self, depth: u32) -> Self {
        self.depth = depth;
        self
    }

    pub fn with_epsilons(mut self, epsilons: Vec<f64>) -> Self {
        self.epsilons = epsilons;
        self
    }

    pub fn with_n_max(mut self, n_max: u64) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_l_max(mut self, l_max: u32) -> Self {
        self.l_max = l_max;
        self
    }

    pub fn overriding_obstructions(mut self) -> Self {
        self.override_obstructions = true;
        self
    }

    pub fn validate(&self) -> Result<(), CriteriaError> {
        let bad = |m: &str| Err(CriteriaError::InvalidRequest(m.to_string()));
        if self.depth == 0 {
            return bad("L must be at least 1");
        }
        if self.n_max == 0 {
            return bad("n_max must be at least 1");
        }
        if self.l_max == 0 {
            return bad("l_max must be at least 1");
        }
        if self.epsilons.is_empty() {
            return bad("epsilon schedule is empty");
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(CriteriaError::InvalidRequest(format!("epsilon {e} outside (0, 1)")));
        }
        for g in self.k.iter() {
            self.system.group.check(g)?;
        }
        Ok(())
    }

    fn torsion_probe_bound(&self) -> u64 {
        match self.system.group {
            Group::Cyclic { m } => m.unsigned_abs(),
            _ => self.n_max,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub epsilon: f64,
    pub n: u64,
    /// `sup_{x∈K} max(φ_{ln}(x), φ̃_{ln}(x))` for `l = 1, 2, …`.
    pub sup_by_l: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chaos_sum: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub n: u64,
    pub sup_phi: f64,
    pub sup_phi_tilde: f64,
    /// Truncated chaos series plus its geometric tail bound (the truncated sum
    /// alone when `tail_bounded` is false).
    pub chaos_sum: f64,
    pub tail_bounded: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub n_max: u64,
    pub l_max: u32,
    pub depth: u32,
    /// First candidate `n`, one past the separation constant of `K`.
    pub first_n: u64,
    pub candidates: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: Vec<Witness>,
    pub obstruction: Option<Obstruction>,
    pub series: Vec<SeriesPoint>,
    pub budget: Budget,
    pub tail_unbounded: bool,
}

/// JSON has no infinities; saturate instead.
fn finite(x: f64) -> f64 {
    x.min(f64::MAX)
}

/// Sup-norm tables over `K` of the orbit products, indexed by `n - 1`.
#[derive(Clone, Debug)]
pub struct ProductSweep {
    l_max: usize,
    n_max: u64,
    first_n: u64,
    /// `[n-1][l-1] = sup_x max(φ_{ln}(x), φ̃_{ln}(x))`
    sup_terms: Vec<Vec<f64>>,
    sup_phi: Vec<f64>,
    sup_phi_tilde: Vec<f64>,
    /// `None` when no uniform ratio `r < 1` bounds the tail at this `n`.
    chaos: Vec<Option<f64>>,
    chaos_truncated: Vec<f64>,
}

struct PointSums {
    sum: Vec<f64>,
    last: Vec<f64>,
}

struct Partial {
    sup_terms: Vec<Vec<f64>>,
    sup_phi: Vec<f64>,
    sup_phi_tilde: Vec<f64>,
    ratio_log2: Vec<f64>,
    points: Vec<PointSums>,
}

impl Partial {
    fn empty(n_max: usize, depth: usize) -> Self {
        Partial {
            sup_terms: vec![vec![0.0; depth]; n_max],
            sup_phi: vec![0.0; n_max],
            sup_phi_tilde: vec![0.0; n_max],
            ratio_log2: vec![f64::NEG_INFINITY; n_max],
            points: Vec::new(),
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        fn vmax(a: &mut [f64], b: &[f64]) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x = x.max(*y));
        }
        for (a, b) in self.sup_terms.iter_mut().zip(&other.sup_terms) {
            vmax(a, b);
        }
        vmax(&mut self.sup_phi, &other.sup_phi);
        vmax(&mut self.sup_phi_tilde, &other.sup_phi_tilde);
        vmax(&mut self.ratio_log2, &other.ratio_log2);
        self.points.extend(other.points);
        self
    }
}

impl ProductSweep {
    /// Tabulates products for `n ≤ req.n_max` and `l ≤ max(req.depth, req.l_max)`.
    /// Witness search starts at `first_n`.
    pub fn compute(req: &CriterionRequest, first_n: u64) -> Result<Self, CriteriaError> {
        let n_max = usize::try_from(req.n_max).map_err(|_| GroupError::Overflow)?;
        let l_max = req.l_max as usize;
        let depth = (req.depth as usize).max(l_max);
        let m_max = req.n_max.checked_mul(depth as u64).ok_or(GroupError::Overflow)?;
        let sys = &req.system;
        let points: Vec<&GroupElement> = req.k.iter().collect();

        let partial = points
            .par_iter()
            .map(|x| -> Result<Partial, GroupError> {
                let fw = sys.phi_series(x, m_max)?;
                let bw = sys.phi_tilde_series(x, m_max)?;
                let mut p = Partial::empty(n_max, depth);
                let mut sums = PointSums {
                    sum: vec![0.0; n_max],
                    last: vec![0.0; n_max],
                };
                for n in 1..=n_max {
                    let row = &mut p.sup_terms[n - 1];
                    let mut sum = 0.0;
                    let mut ratio = f64::NEG_INFINITY;
                    for l in 1..=depth {
                        let (f, b) = (fw[l * n], bw[l * n]);
                        let (fv, bv) = (f.value(), b.value());
                        row[l - 1] = fv.max(bv);
                        if l <= l_max {
                            sum += fv + bv;
                            if l > 1 {
                                let (pf, pb) = (fw[(l - 1) * n], bw[(l - 1) * n]);
                                ratio = ratio.max(f.log2() - pf.log2()).max(b.log2() - pb.log2());
                            }
                        }
                    }
                    p.sup_phi[n - 1] = fw[n].value();
                    p.sup_phi_tilde[n - 1] = bw[n].value();
                    p.ratio_log2[n - 1] = if l_max >= 2 { ratio } else { f64::INFINITY };
                    sums.sum[n - 1] = sum;
                    sums.last[n - 1] = fw[l_max * n].value() + bw[l_max * n].value();
                }
                p.points.push(sums);
                Ok(p)
            })
            .try_reduce(|| Partial::empty(n_max, depth), |a, b| Ok(a.merge(b)))?;

        let mut chaos = Vec::with_capacity(n_max);
        let mut chaos_truncated = Vec::with_capacity(n_max);
        for i in 0..n_max {
            let truncated = partial.points.iter().map(|s| s.sum[i]).fold(0.0, f64::max);
            chaos_truncated.push(truncated);
            let r_log2 = partial.ratio_log2[i];
            chaos.push((r_log2 < 0.0).then(|| {
                let r = r_log2.exp2();
                let c = r / (1.0 - r);
                partial
                    .points
                    .iter()
                    .map(|s| s.sum[i] + s.last[i] * c)
                    .fold(0.0, f64::max)
            }));
        }
        Ok(ProductSweep {
            l_max,
            n_max: req.n_max,
            first_n,
            sup_terms: partial.sup_terms,
            sup_phi: partial.sup_phi,
            sup_phi_tilde: partial.sup_phi_tilde,
            chaos,
            chaos_truncated,
        })
    }

    fn candidates(&self) -> impl DoubleEndedIterator<Item = u64> {
        self.first_n..=self.n_max
    }

    fn row(&self, n: u64) -> &[f64] {
        &self.sup_terms[(n - 1) as usize]
    }

    /// `max_{l ≤ depth} sup_x max(φ_{ln}, φ̃_{ln})`.
    pub fn sup_up_to(&self, n: u64, depth: usize) -> f64 {
        self.row(n)[..depth].iter().copied().fold(0.0, f64::max)
    }

    pub fn chaos_bound(&self, n: u64) -> Option<f64> {
        self.chaos[(n - 1) as usize]
    }

    pub fn series(&self) -> Vec<SeriesPoint> {
        (1..=self.n_max)
            .map(|n| {
                let i = (n - 1) as usize;
                SeriesPoint {
                    n,
                    sup_phi: finite(self.sup_phi[i]),
                    sup_phi_tilde: finite(self.sup_phi_tilde[i]),
                    chaos_sum: finite(self.chaos[i].unwrap_or(self.chaos_truncated[i])),
                    tail_bounded: self.chaos[i].is_some(),
                }
            })
            .collect()
    }

    fn budget(&self, depth: u32) -> Budget {
        Budget {
            n_max: self.n_max,
            l_max: self.l_max as u32,
            depth,
            first_n: self.first_n,
            candidates: self.candidates().count() as u64,
        }
    }
}

/// `Σ_{l=1}^{l_max} (φ_{ln}(x) + φ̃_{ln}(x))` at a single point.
pub fn chaos_partial_sum(sys: &WeightedSystem, x: &GroupElement, n: u64, l_max: u64) -> Result<f64, GroupError> {
    let m = n.checked_mul(l_max).ok_or(GroupError::Overflow)?;
    let fw = sys.phi_series(x, m)?;
    let bw = sys.phi_tilde_series(x, m)?;
    Ok((1..=l_max as usize)
        .map(|l| fw[l * n as usize].value() + bw[l * n as usize].value())
        .sum())
}

pub fn check_obstructions(req: &CriterionRequest) -> Result<Option<Obstruction>, CriteriaError> {
    let sys = &req.system;
    if let Some(order) = sys.group.torsion_order(&sys.a, req.torsion_probe_bound()) {
        return Ok(Some(Obstruction::Torsion { order }));
    }
    let (inf_w, sup_w) = sys.weight.bounds();
    if sup_w <= 1.0 {
        return Ok(Some(Obstruction::Contraction { sup_weight: sup_w }));
    }
    if inf_w >= 1.0 {
        return Ok(Some(Obstruction::Expansion { inf_weight: inf_w }));
    }
    Ok(None)
}

/// Shared preparation: validation, obstruction probe, separation, sweep.
struct Prepared {
    obstruction: Option<Obstruction>,
    blocking: bool,
    sweep: ProductSweep,
}

fn prepare(req: &CriterionRequest) -> Result<Prepared, CriteriaError> {
    req.validate()?;
    let obstruction = check_obstructions(req)?;
    let torsion = matches!(obstruction, Some(Obstruction::Torsion { .. }));
    let blocking = obstruction.is_some() && (torsion || !req.override_obstructions);
    let first_n = if torsion {
        req.n_max + 1
    } else {
        match req.system.group.separation_constant(&req.k, &req.system.a, req.n_max)? {
            Some(m) => m + 1,
            None => req.n_max + 1,
        }
    };
    let sweep = ProductSweep::compute(req, first_n)?;
    Ok(Prepared {
        obstruction,
        blocking,
        sweep,
    })
}

fn assemble(prep: &Prepared, depth: u32, witness: Vec<Witness>, complete: bool, tail_unbounded: bool) -> Verdict {
    let outcome = if prep.blocking {
        Outcome::ObstructionFound
    } else if complete {
        Outcome::WitnessFound
    } else {
        Outcome::Inconclusive
    };
    Verdict {
        outcome,
        witness: if prep.blocking { Vec::new() } else { witness },
        obstruction: prep.obstruction,
        series: prep.sweep.series(),
        budget: prep.sweep.budget(depth),
        tail_unbounded: outcome != Outcome::WitnessFound && tail_unbounded,
    }
}

fn evaluate(req: &CriterionRequest, prep: &Prepared, property: Property) -> Verdict {
    let sweep = &prep.sweep;
    let depth = match property {
        Property::Recurrent | Property::Transitive | Property::Mixing => 1,
        Property::MultiplyRecurrent => req.depth,
        Property::Chaotic => req.l_max,
    };
    let mut witness = Vec::new();
    let mut tail_unbounded = false;
    for &eps in &req.epsilons {
        let found = match property {
            Property::Recurrent | Property::Transitive | Property::MultiplyRecurrent => {
                let d = depth as usize;
                sweep
                    .candidates()
                    .find(|&n| sweep.sup_up_to(n, d) < eps)
                    .map(|n| Witness {
                        epsilon: eps,
                        n,
                        sup_by_l: sweep.row(n)[..d].to_vec(),
                        chaos_sum: None,
                    })
            }
            Property::Mixing => {
                let n0 = sweep
                    .candidates()
                    .rev()
                    .find(|&n| sweep.sup_up_to(n, 1) >= eps)
                    .map_or(sweep.first_n, |n| n + 1);
                (n0 <= sweep.n_max).then(|| Witness {
                    epsilon: eps,
                    n: n0,
                    sup_by_l: vec![sweep.sup_up_to(n0, 1)],
                    chaos_sum: None,
                })
            }
            Property::Chaotic => {
                tail_unbounded |= sweep.candidates().any(|n| sweep.chaos_bound(n).is_none());
                sweep
                    .candidates()
                    .find_map(|n| sweep.chaos_bound(n).filter(|c| *c < eps).map(|c| (n, c)))
                    .map(|(n, c)| Witness {
                        epsilon: eps,
                        n,
                        sup_by_l: sweep.row(n)[..sweep.l_max].to_vec(),
                        chaos_sum: Some(c),
                    })
            }
        };
        witness.extend(found);
    }
    let complete = witness.len() == req.epsilons.len();
    assemble(prep, depth, witness, complete, tail_unbounded)
}

pub fn check(req: &CriterionRequest, property: Property) -> Result<Verdict, CriteriaError> {
    let prep = prepare(req)?;
    Ok(evaluate(req, &prep, property))
}

pub fn multiply_recurrent_check(req: &CriterionRequest) -> Result<Verdict, CriteriaError> {
    check(req, Property::MultiplyRecurrent)
}

pub fn recurrent_check(req: &CriterionRequest) -> Result<Verdict, CriteriaError> {
    check(req, Property::Recurrent)
}

pub fn transitive_check(req: &CriterionRequest) -> Result<Verdict, CriteriaError> {
    check(req, Property::Transitive)
}

pub fn mixing_check(req: &CriterionRequest) -> Result<Verdict, CriteriaError> {
    check(req, Property::Mixing)
}

pub fn chaotic_check(req: &CriterionRequest) -> Result<Verdict, CriteriaError> {
    check(req, Property::Chaotic)
}

/// All five verdicts from a single product sweep, in [`Property::ALL`] order.
pub fn check_all(req: &CriterionRequest) -> Result<Vec<(Property, Verdict)>, CriteriaError> {
    let prep = prepare(req)?;
    Ok(Property::ALL.iter().map(|&p| (p, evaluate(req, &prep, p))).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditCheck {
    pub premise: Property,
    pub epsilon: f64,
    pub premise_n: u64,
    pub recurrence_n: Option<u64>,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub checks: Vec<AuditCheck>,
}

impl AuditReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

/// Checks that chaotic or mixing witnesses come with multiple-recurrence
/// witnesses derivable from the same `n`. Verdicts must share system, `K`
/// and budgets.
pub fn implication_audit(verdicts: &[(Property, Verdict)]) -> Result<AuditReport, CriteriaError> {
    let find = |p: Property| verdicts.iter().find(|(q, _)| *q == p).map(|(_, v)| v);
    let recurrence = find(Property::MultiplyRecurrent);
    let mut report = AuditReport::default();

    for premise in [Property::Chaotic, Property::Mixing] {
        let Some(v) = find(premise).filter(|v| v.outcome == Outcome::WitnessFound) else {
            continue;
        };
        for w in &v.witness {
            let mr = recurrence
                .filter(|r| r.outcome == Outcome::WitnessFound)
                .and_then(|r| r.witness.iter().find(|x| x.epsilon == w.epsilon));
            let mut check = AuditCheck {
                premise,
                epsilon: w.epsilon,
                premise_n: w.n,
                recurrence_n: mr.map(|m| m.n),
                passed: false,
                detail: String::new(),
            };
            match mr {
                None => check.detail = "no multiple-recurrence witness at this epsilon".into(),
                Some(m) => {
                    let depth = m.sup_by_l.len();
                    if premise == Property::Chaotic {
                        let dominated = w.sup_by_l.iter().all(|s| Some(*s) <= w.chaos_sum);
                        let covered = w.sup_by_l.len() < depth || w.sup_by_l[..depth].iter().all(|s| *s < w.epsilon);
                        check.passed = dominated && covered && m.n <= w.n;
                        check.detail = format!(
                            "terms dominated by series: {dominated}; first {depth} terms below epsilon: {covered}; recurrence n {} <= chaos n {}",
                            m.n, w.n
                        );
                    } else {
                        let reachable = (depth as u64).saturating_mul(w.n) <= v.budget.n_max;
                        check.passed = !reachable || m.n <= w.n;
                        check.detail = if reachable {
                            format!("recurrence n {} <= mixing N0 {}", m.n, w.n)
                        } else {
                            format!("L*N0 exceeds n_max; witness at n {} exists", m.n)
                        };
                    }
                }
            }
            report.checks.push(check);
        }
    }
    if report.failures() > 0 {
        let msg = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} at eps={}: {}", c.premise, c.epsilon, c.detail))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(CriteriaError::InconsistentVerdicts(msg));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::Weight;
    use crate::young::YoungFunction;
    use proptest::prelude::*;

    fn el(c: &[i64]) -> GroupElement {
        GroupElement::new(c)
    }

    fn z_system(weight: Weight) -> WeightedSystem {
        WeightedSystem::new(Group::Integers, el(&[1]), weight, YoungFunction::Power { p: 2.0 }).unwrap()
    }

    fn step() -> Weight {
        Weight::TwoSidedStep { c_neg: 2.0, c_pos: 0.5 }
    }

    fn z_box(lo: i64, hi: i64) -> CompactSet {
        CompactSet::integer_box(&Group::Integers, &[lo], &[hi]).unwrap()
    }

    fn heisenberg_request() -> CriterionRequest {
        let sys = WeightedSystem::new(
            Group::Heisenberg,
            el(&[3, 0, 2]),
            Weight::HeisenbergPaper,
            YoungFunction::Power { p: 2.0 },
        )
        .unwrap();
        let k = CompactSet::integer_box(&Group::Heisenberg, &[-1, -1, 0], &[1, 1, 0]).unwrap();
        CriterionRequest::new(sys, k).with_n_max(32)
    }

    /// Block weight on ℤ: products dip only along a sparse subsequence.
    pub(crate) fn block_alternating() -> Weight {
        let mut entries = Vec::new();
        for j in 1..=10 {
            entries.push((el(&[j]), 0.5));
            entries.push((el(&[j + 10]), 2.0));
        }
        for j in 0..10 {
            entries.push((el(&[-j]), 2.0));
            entries.push((el(&[-j - 10]), 0.5));
        }
        Weight::table(entries, 1.0)
    }

    /// Independent oracle: smallest n with max over x∈K, l≤L of the products
    /// below eps, using plain integer indexing on ℤ with a = 1.
    fn oracle_first_n(w: impl Fn(i64) -> f64, k: &[i64], depth: i64, eps: f64, n_max: i64) -> Option<i64> {
        let phi = |x: i64, m: i64| (1..=m).map(|j| w(x + j)).product::<f64>();
        let phi_t = |x: i64, m: i64| 1.0 / (0..m).map(|j| w(x - j)).product::<f64>();
        let span = k.iter().max().unwrap() - k.iter().min().unwrap();
        (span + 1..=n_max).find(|&n| {
            k.iter()
                .all(|&x| (1..=depth).all(|l| phi(x, l * n) < eps && phi_t(x, l * n) < eps))
        })
    }

    #[test]
    fn obstruction_examples() {
        let sys = WeightedSystem::new(
            Group::Cyclic { m: 6 },
            el(&[2]),
            Weight::Constant { c: 0.5 },
            YoungFunction::Power { p: 2.0 },
        )
        .unwrap();
        let k = CompactSet::new([el(&[0])]).unwrap();
        let req = CriterionRequest::new(sys, k);
        assert_eq!(
            check_obstructions(&req).unwrap(),
            Some(Obstruction::Torsion { order: 3 })
        );
        let v = transitive_check(&req.clone().overriding_obstructions()).unwrap();
        assert_eq!(v.outcome, Outcome::ObstructionFound);

        let req = CriterionRequest::new(z_system(Weight::Constant { c: 0.5 }), z_box(-2, 2));
        assert_eq!(
            check_obstructions(&req).unwrap(),
            Some(Obstruction::Contraction { sup_weight: 0.5 })
        );
        let req = CriterionRequest::new(z_system(step()), z_box(-2, 2));
        assert_eq!(check_obstructions(&req).unwrap(), None);
        let req = CriterionRequest::new(z_system(Weight::Constant { c: 2.0 }), z_box(-2, 2));
        let v = recurrent_check(&req).unwrap();
        assert_eq!(v.outcome, Outcome::ObstructionFound);
        assert_eq!(v.obstruction, Some(Obstruction::Expansion { inf_weight: 2.0 }));
        assert!(v.witness.is_empty());
    }

    #[test]
    fn obstruction_diagnostic_series() {
        let req = CriterionRequest::new(z_system(Weight::Constant { c: 0.5 }), z_box(0, 0)).with_n_max(40);
        let v = mixing_check(&req).unwrap();
        for p in &v.series {
            assert_eq!(p.sup_phi_tilde, 2f64.powi(p.n as i32));
            assert!(p.sup_phi_tilde >= 1.0);
        }
        let req = CriterionRequest::new(z_system(Weight::Constant { c: 2.0 }), z_box(0, 0)).with_n_max(40);
        let v = mixing_check(&req).unwrap();
        for p in &v.series {
            assert_eq!(p.sup_phi, 2f64.powi(p.n as i32));
        }
    }

    #[test]
    fn multiply_recurrent_step_weight() {
        let req = CriterionRequest::new(z_system(step()), z_box(-2, 2))
            .with_depth(3)
            .with_epsilons(vec![1e-3]);
        let v = multiply_recurrent_check(&req).unwrap();
        assert_eq!(v.outcome, Outcome::WitnessFound);
        assert_eq!(v.budget.first_n, 5);
        let w = &v.witness[0];
        assert_eq!(w.n, 14);
        assert_eq!(w.sup_by_l[0], 2f64.powi(4 - 14));
        assert_eq!(w.sup_by_l.iter().copied().fold(0.0, f64::max), w.sup_by_l[0]);
        let k: Vec<i64> = (-2..=2).collect();
        let w_fn = |i: i64| if i <= 0 { 2.0 } else { 0.5 };
        assert_eq!(oracle_first_n(w_fn, &k, 3, 1e-3, 64), Some(14));
    }

    #[test]
    fn unit_weight_is_inconclusive_when_overridden() {
        let req = CriterionRequest::new(z_system(Weight::Constant { c: 1.0 }), z_box(-2, 2)).with_n_max(64);
        assert_eq!(
            multiply_recurrent_check(&req).unwrap().outcome,
            Outcome::ObstructionFound
        );
        let req = req.overriding_obstructions();
        for p in Property::ALL {
            let v = check(&req, p).unwrap();
            assert_eq!(v.outcome, Outcome::Inconclusive, "{p}");
            assert!(v.witness.is_empty());
        }
        assert!(chaotic_check(&req)
            .unwrap()
            .series
            .iter()
            .all(|s| s.chaos_sum >= 128.0 - 1e-9));
    }

    #[test]
    fn heisenberg_multiply_recurrent() {
        let req = heisenberg_request().with_depth(2).with_epsilons(vec![1e-2]);
        let v = multiply_recurrent_check(&req).unwrap();
        assert_eq!(v.outcome, Outcome::WitnessFound);
        assert_eq!(v.budget.first_n, 1);
        // sup = 2^{1-n} < 1e-2 first holds at n = 8
        assert_eq!(v.witness[0].n, 8);
        assert_eq!(v.witness[0].sup_by_l[0], 2f64.powi(-7));
        let first = (1..64).find(|&n| 2f64.powi(1 - n) < 1e-2 && 2f64.powi(-n) < 1e-2);
        assert_eq!(first, Some(8));
    }

    #[test]
    fn heisenberg_chaos_series() {
        let sys = heisenberg_request().system;
        for (n, expect) in [(5u64, 3.0 / 31.0), (10, 3.0 / 1023.0)] {
            for x in [el(&[0, 0, 0]), el(&[4, -3, 0]), el(&[-2, 9, 0])] {
                let s = chaos_partial_sum(&sys, &x, n, 64).unwrap();
                assert!((s - expect).abs() <= 1e-12, "{s} vs {expect}");
            }
        }
        let v = chaotic_check(&heisenberg_request()).unwrap();
        assert_eq!(v.outcome, Outcome::WitnessFound);
        assert!(!v.tail_unbounded);
        for w in &v.witness {
            let c = w.chaos_sum.unwrap();
            assert!(c < w.epsilon);
            assert!((c - 3.0 / (2f64.powi(w.n as i32) - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn chaos_step_weight_single_point() {
        let req = CriterionRequest::new(z_system(step()), z_box(0, 0)).with_n_max(30);
        let v = chaotic_check(&req).unwrap();
        assert_eq!(v.outcome, Outcome::WitnessFound);
        for p in &v.series[..20] {
            let expect = 2.0 / (2f64.powi(p.n as i32) - 1.0);
            assert!((p.chaos_sum - expect).abs() <= 1e-12 * expect.max(1.0), "n={}", p.n);
        }
    }

    #[test]
    fn mixing_and_transitivity() {
        let req = CriterionRequest::new(z_system(step()), z_box(-2, 2)).with_n_max(64);
        let v = mixing_check(&req).unwrap();
        assert_eq!(v.outcome, Outcome::WitnessFound);
        for p in &v.series[2..] {
            assert_eq!(p.sup_phi.max(p.sup_phi_tilde), 2f64.powi(4 - p.n as i32));
        }

        let req = CriterionRequest::new(z_system(block_alternating()), z_box(0, 0))
            .with_n_max(200)
            .with_epsilons((1..=8).map(|k| 2f64.powi(-k)).collect());
        let t = transitive_check(&req).unwrap();
        assert_eq!(t.outcome, Outcome::WitnessFound);
        assert_eq!(t.witness.last().unwrap().n, 9);
        let m = mixing_check(&req).unwrap();
        assert_eq!(m.outcome, Outcome::Inconclusive);
        let c = chaotic_check(&req).unwrap();
        assert_eq!(c.outcome, Outcome::Inconclusive);
        assert!(c.tail_unbounded);
        // oracle: at n = 30, φ_30(0) = 2^{-10}·2^{10}·1^{10} = 1
        let w = |i: i64| block_alternating().evaluate(&el(&[i]));
        assert_eq!((1..=30).map(w).product::<f64>(), 1.0);
        assert!(m
            .series
            .iter()
            .any(|p| p.n > 20 && p.sup_phi.max(p.sup_phi_tilde) >= 0.5));
    }

    #[test]
    fn audit_on_matrix() {
        let reqs = [
            CriterionRequest::new(z_system(step()), z_box(-2, 2))
                .with_depth(3)
                .with_n_max(64),
            heisenberg_request().with_depth(2),
            CriterionRequest::new(z_system(block_alternating()), z_box(0, 0))
                .with_n_max(200)
                .with_depth(2),
        ];
        for req in &reqs {
            let all = check_all(req).unwrap();
            implication_audit(&all).unwrap();
            let get = |p| all.iter().find(|(q, _)| *q == p).unwrap().1.clone();
            assert_eq!(get(Property::Recurrent), get(Property::Transitive));
            assert_eq!(get(Property::Chaotic), chaotic_check(req).unwrap());
        }
        assert!(implication_audit(&[]).unwrap().checks.is_empty());
    }

    #[test]
    fn audit_flags_missing_recurrence() {
        let req = CriterionRequest::new(z_system(step()), z_box(-2, 2)).with_n_max(64);
        let chaos = chaotic_check(&req).unwrap();
        let mut mr = multiply_recurrent_check(&req).unwrap();
        mr.outcome = Outcome::Inconclusive;
        let err = implication_audit(&[(Property::Chaotic, chaos), (Property::MultiplyRecurrent, mr)]);
        assert!(matches!(err, Err(CriteriaError::InconsistentVerdicts(_))));
    }

    #[test]
    fn request_validation() {
        let base = CriterionRequest::new(z_system(step()), z_box(-2, 2));
        assert!(base.clone().with_depth(0).validate().is_err());
        assert!(base.clone().with_n_max(0).validate().is_err());
        assert!(base.clone().with_epsilons(vec![1.5]).validate().is_err());
        assert!(base.clone().with_epsilons(vec![]).validate().is_err());
        let bad_k = CriterionRequest::new(z_system(step()), CompactSet::new([el(&[0, 0])]).unwrap());
        assert!(bad_k.validate().is_err());
    }

    #[test]
    fn verdict_json_shape() {
        let req = CriterionRequest::new(z_system(step()), z_box(-2, 2)).with_n_max(20);
        let v = chaotic_check(&req).unwrap();
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["outcome"], "WitnessFound");
        assert!(j["witness"][0]["sup_by_l"].is_array());
        assert!(j["series"][0]["chaos_sum"].is_number());
        let back: Verdict = serde_json::from_value(j).unwrap();
        assert_eq!(back, v);
        let o = serde_json::to_value(Obstruction::Torsion { order: 3 }).unwrap();
        assert_eq!(o, serde_json::json!({"kind": "torsion", "order": 3}));
    }

    fn table_request() -> impl Strategy<Value = CriterionRequest> {
        (
            proptest::collection::vec(
                (-12i64..12, prop_oneof![Just(0.5), Just(2.0), Just(0.25), Just(1.0)]),
                0..16,
            ),
            prop_oneof![Just(0.5), Just(2.0)],
            -3i64..3,
            0i64..3,
            1u32..4,
        )
            .prop_map(|(entries, default, lo, span, depth)| {
                let entries: Vec<_> = entries.into_iter().map(|(i, w)| (el(&[i]), w)).collect();
                let w = Weight::table(
                    entries.into_iter().chain([(el(&[40]), 4.0), (el(&[41]), 0.125)]),
                    default,
                );
                CriterionRequest::new(z_system(w), z_box(lo, lo + span))
                    .with_depth(depth)
                    .with_n_max(48)
                    .with_l_max(8)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn recurrent_equals_transitive(req in table_request()) {
            prop_assert_eq!(recurrent_check(&req).unwrap(), transitive_check(&req).unwrap());
        }

        #[test]
        fn depth_monotonicity(req in table_request()) {
            let deep = multiply_recurrent_check(&req).unwrap();
            for d in 1..req.depth {
                let shallow = multiply_recurrent_check(&req.clone().with_depth(d)).unwrap();
                for w in &deep.witness {
                    let s = shallow.witness.iter().find(|s| s.epsilon == w.epsilon);
                    prop_assert!(s.is_some());
                    let s = s.unwrap();
                    prop_assert!(s.n <= w.n);
                }
            }
        }

        #[test]
        fn term_domination_and_audit(req in table_request()) {
            let all = check_all(&req).unwrap();
            prop_assert!(implication_audit(&all).is_ok());
            let chaos = &all.iter().find(|(p, _)| *p == Property::Chaotic).unwrap().1;
            for w in &chaos.witness {
                for s in &w.sup_by_l {
                    prop_assert!(*s <= w.chaos_sum.unwrap());
                }
            }
        }

        #[test]
        fn oracle_agreement(req in table_request(), eps_k in 1i32..8) {
            let eps = 2f64.powi(-eps_k);
            let req = req.with_epsilons(vec![eps]).overriding_obstructions();
            let v = multiply_recurrent_check(&req).unwrap();
            let ks: Vec<i64> = req.k.iter().map(|g| g.coords()[0]).collect();
            let weight = req.system.weight.clone();
            let oracle = oracle_first_n(|i| weight.evaluate(&el(&[i])), &ks, req.depth as i64, eps, 48);
            prop_assert_eq!(v.witness.first().map(|w| w.n as i64), oracle);
        }

        #[test]
        fn deterministic(req in table_request()) {
            prop_assert_eq!(check_all(&req).unwrap(), check_all(&req).unwrap());
        }
    }
}
