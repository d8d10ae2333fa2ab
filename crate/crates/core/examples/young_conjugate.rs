//! Complementary functions and the Δ₂ probe.

use orlicz_dynamics::young::{convexity_defect, delta2_probe, young_inequality_check, YoungFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let phi = YoungFunction::power(3.0)?;
    println!("Phi(t) = t^3/3, Psi should be y^(3/2)/(3/2)");
    for y in [0.5f64, 1.0, 2.0, 4.0] {
        let exact = y.powf(1.5) / 1.5;
        println!("  Psi({y}) = {:.10}  (exact {exact:.10})", phi.complementary(y)?);
    }

    for phi in [
        YoungFunction::power(1.0)?,
        YoungFunction::power(2.0)?,
        YoungFunction::alpha_log(1.5)?,
    ] {
        let d2 = delta2_probe(&phi, 1e-3, 1e3, 241)?;
        println!(
            "{phi:?}: M_hat = {:.6} at t = {:.4}, convexity defect {:.3e}, Young violation {:.3e}",
            d2.m_hat,
            d2.argmax_t,
            convexity_defect(&phi, 4.0, 400)?,
            young_inequality_check(&phi, 2000, 7)?
        );
    }
    Ok(())
}
