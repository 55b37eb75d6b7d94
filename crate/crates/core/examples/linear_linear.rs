//! Linear-linear configurations (γ = 0): closed-form solution against
//! Runge–Kutta and the invariants H^l.

use airy_core::integrate::IntegratorOptions;
use airy_core::invariants::linear_invariants;
use airy_core::state::LinearState;
use airy_core::verify::linear_check;

fn main() -> airy_core::Result<()> {
    let s0 = LinearState::new(0.5, 1.0, -0.4, 0.3);
    let c = linear_check(&s0, 3.0, &IntegratorOptions::adaptive(1e-12))?;
    println!("H^l at t = 0: {:?}", linear_invariants(&s0, s0.zeta)?);
    println!("{c:?}");
    Ok(())
}
