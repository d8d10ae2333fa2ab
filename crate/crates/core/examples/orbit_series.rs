//! Norms along an orbit: isometry, growth and decay.

use orlicz_dynamics::group::{Group, GroupElement};
use orlicz_dynamics::lab::orbit_norm_series;
use orlicz_dynamics::orlicz::OrliczVector;
use orlicz_dynamics::report::series_csv;
use orlicz_dynamics::weight::{Weight, WeightedSystem};
use orlicz_dynamics::young::YoungFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = OrliczVector::delta(GroupElement::new(&[0]), 1.0);
    for weight in [
        Weight::Constant { c: 1.0 },
        Weight::Constant { c: 2.0 },
        Weight::TwoSidedStep { c_neg: 2.0, c_pos: 0.5 },
    ] {
        let sys = WeightedSystem::new(
            Group::Integers,
            GroupElement::new(&[1]),
            weight,
            YoungFunction::power(2.0)?,
        )?;
        let series = orbit_norm_series(&sys, &f, 6)?;
        println!("{:?}\n{}", sys.weight, series_csv(&series));
    }
    Ok(())
}
