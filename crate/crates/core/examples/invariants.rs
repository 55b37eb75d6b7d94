//! Conserved quantities of a wet parabola: the K generators, the H
//! sequence from its K-representation and from integrating the density
//! over the support.

use airy_core::integrate::{integrate, Field, IntegratorOptions};
use airy_core::invariants::{H_by_integration, H_values, K_values, MAX_H};
use airy_core::state::State5;

fn main() -> airy_core::Result<()> {
    let s0 = State5::new(0.4, -1.0, 1.0, 0.3, -0.2);
    let sup = s0.support_interval()?;
    println!("support [{:.6}, {:.6}]", sup.x_minus, sup.x_plus);
    for n in 1..=MAX_H {
        println!(
            "H{n}: {:+.15e} (integral {:+.15e})",
            H_values(&s0, n)?,
            H_by_integration(&s0, n)?
        );
    }
    let k0 = K_values(&s0)?;
    let tr = integrate(Field::X, &s0, 3.0, &IntegratorOptions::adaptive(1e-12))?;
    let k1 = K_values(&tr.final_state().state)?;
    println!("K at t = 0: {:+.15} {:+.15} {:+.15}", k0.k0, k0.k1, k0.k2);
    println!("K at t = 3: {:+.15} {:+.15} {:+.15}", k1.k0, k1.k1, k1.k2);
    Ok(())
}
