//! Luxemburg norms of finitely supported vectors under a few Young functions.

use orlicz_dynamics::group::{CompactSet, Group, GroupElement};
use orlicz_dynamics::orlicz::{indicator_norm_closed_form, luxemburg_norm, modular, OrliczVector};
use orlicz_dynamics::young::YoungFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = OrliczVector::from_pairs([
        (GroupElement::new(&[0]), 2.0),
        (GroupElement::new(&[1]), -0.5),
        (GroupElement::new(&[7]), 1.25),
    ]);
    let families = [
        ("power p=1", YoungFunction::power(1.0)?),
        ("power p=2", YoungFunction::power(2.0)?),
        ("power p=4", YoungFunction::power(4.0)?),
        ("alphalog a=3", YoungFunction::alpha_log(3.0)?),
    ];
    for (name, phi) in &families {
        let n = luxemburg_norm(&f, phi)?;
        println!("{name:<13} N(f) = {n:.12}  modular(f/N) = {:.12}", modular(&f, phi, n)?);
    }

    let phi = YoungFunction::power(2.0)?;
    for hi in [0, 3, 15] {
        let b = CompactSet::integer_box(&Group::Integers, &[0], &[hi])?;
        let bisected = luxemburg_norm(&OrliczVector::indicator(&b), &phi)?;
        let closed = indicator_norm_closed_form(&b, &phi)?;
        println!(
            "|B| = {:>2}: bisection {bisected:.12}, 1/inv(1/|B|) {closed:.12}",
            b.measure()
        );
    }
    Ok(())
}
