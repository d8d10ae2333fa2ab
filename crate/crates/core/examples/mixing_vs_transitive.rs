//! A block weight on Z whose products dip below any threshold early but
//! return to 1 later: transitive witnesses exist, mixing ones do not.

use orlicz_dynamics::criteria::{check_all, CriterionRequest};
use orlicz_dynamics::group::{CompactSet, Group, GroupElement};
use orlicz_dynamics::weight::{Weight, WeightedSystem};
use orlicz_dynamics::young::YoungFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let el = |i: i64| GroupElement::new(&[i]);
    let mut entries = Vec::new();
    for j in 1..=10 {
        entries.extend([(el(j), 0.5), (el(j + 10), 2.0), (el(1 - j), 2.0), (el(-9 - j), 0.5)]);
    }
    let sys = WeightedSystem::new(
        Group::Integers,
        el(1),
        Weight::table(entries, 1.0),
        YoungFunction::power(2.0)?,
    )?;
    let k = CompactSet::new([el(0)])?;
    let req = CriterionRequest::new(sys, k)
        .with_n_max(40)
        .with_epsilons((1..=8).map(|k| 2f64.powi(-k)).collect());

    let verdicts = check_all(&req)?;
    for (property, v) in &verdicts {
        let ns: Vec<u64> = v.witness.iter().map(|w| w.n).collect();
        println!(
            "{property:<18} {:?} witnesses at n = {ns:?} tail_unbounded={}",
            v.outcome, v.tail_unbounded
        );
    }
    let series = &verdicts[0].1.series;
    for p in series.iter().step_by(5) {
        println!("n={:>2} max(phi, phi~) = {}", p.n, p.sup_phi.max(p.sup_phi_tilde));
    }
    Ok(())
}
