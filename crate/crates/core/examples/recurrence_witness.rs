//! From a multiple-recurrence witness n to an explicit vector v close to f
//! whose iterates T^{ln} v all return close to f.

use orlicz_dynamics::criteria::{multiply_recurrent_check, CriterionRequest};
use orlicz_dynamics::group::{CompactSet, Group, GroupElement};
use orlicz_dynamics::lab::{empirical_return, recurrence_witness_vector};
use orlicz_dynamics::orlicz::OrliczVector;
use orlicz_dynamics::weight::{Weight, WeightedSystem};
use orlicz_dynamics::young::YoungFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = WeightedSystem::new(
        Group::Integers,
        GroupElement::new(&[1]),
        Weight::TwoSidedStep { c_neg: 2.0, c_pos: 0.5 },
        YoungFunction::power(2.0)?,
    )?;
    let k = CompactSet::integer_box(&sys.group, &[-2], &[2])?;
    let req = CriterionRequest::new(sys.clone(), k.clone())
        .with_depth(3)
        .with_epsilons(vec![1e-3]);
    let verdict = multiply_recurrent_check(&req)?;
    let n = verdict.witness[0].n;
    println!("witness n = {n}, sup over l = {:?}", verdict.witness[0].sup_by_l);

    let f = OrliczVector::indicator(&k);
    let v = recurrence_witness_vector(&sys, &f, n, 3)?;
    println!("supp v has {} points", v.support_size());
    let report = empirical_return(&sys, &f, n, 3, 1e-2)?;
    println!("N(v - f) = {:.3e}", report.base_residual);
    for (l, r) in report.return_residuals.iter().enumerate() {
        println!("N(T^{}n v - f) = {r:.3e}", l + 1);
    }
    println!("all below 1e-2: {}", report.passed);
    Ok(())
}
