//! The weighted translation by (3,0,2) on the discrete Heisenberg group: the
//! chaos series at points of the centre plane sums to 3/(2^n - 1).

use orlicz_dynamics::criteria::{chaos_partial_sum, chaotic_check, CriterionRequest};
use orlicz_dynamics::group::{CompactSet, Group, GroupElement};
use orlicz_dynamics::weight::{Weight, WeightedSystem};
use orlicz_dynamics::young::YoungFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let group = Group::Heisenberg;
    let sys = WeightedSystem::new(
        group.clone(),
        GroupElement::new(&[3, 0, 2]),
        Weight::HeisenbergPaper,
        YoungFunction::power(2.0)?,
    )?;

    let x = GroupElement::new(&[5, -4, 0]);
    for n in [1u64, 2, 5, 10] {
        let s = chaos_partial_sum(&sys, &x, n, 64)?;
        let exact = 3.0 / (2f64.powi(n as i32) - 1.0);
        println!("n = {n:>2}: series {s:.15}  3/(2^n-1) = {exact:.15}");
    }

    let k = CompactSet::integer_box(&group, &[-1, -1, 0], &[1, 1, 0])?;
    let verdict = chaotic_check(&CriterionRequest::new(sys, k).with_n_max(32))?;
    println!("\nverdict: {:?}", verdict.outcome);
    for w in &verdict.witness {
        println!(
            "  eps = {:<12} n = {:>2}  bound = {:.3e}",
            w.epsilon,
            w.n,
            w.chaos_sum.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
