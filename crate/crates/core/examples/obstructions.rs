//! Systems that can never be transitive, and the evidence reported for each.

use orlicz_dynamics::criteria::{check_obstructions, transitive_check, CriterionRequest};
use orlicz_dynamics::group::{CompactSet, Group, GroupElement};
use orlicz_dynamics::weight::{Weight, WeightedSystem};
use orlicz_dynamics::young::YoungFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let phi = YoungFunction::power(2.0)?;
    let cases = [
        (Group::Cyclic { m: 6 }, vec![2], Weight::Constant { c: 1.5 }),
        (Group::Integers, vec![1], Weight::Constant { c: 0.5 }),
        (Group::Integers, vec![1], Weight::Constant { c: 2.0 }),
        (
            Group::Integers,
            vec![1],
            Weight::TwoSidedStep { c_neg: 2.0, c_pos: 0.5 },
        ),
    ];
    for (group, a, weight) in cases {
        let k = CompactSet::new([group.identity()])?;
        let sys = WeightedSystem::new(group, GroupElement::new(&a), weight, phi.clone())?;
        let req = CriterionRequest::new(sys, k).with_n_max(8);
        let verdict = transitive_check(&req)?;
        println!("{} a={:?}: {:?}", req.system.group, a, check_obstructions(&req)?);
        for p in verdict.series.iter().take(4) {
            println!("    n={} sup phi={} sup phi~={}", p.n, p.sup_phi, p.sup_phi_tilde);
        }
    }
    Ok(())
}
