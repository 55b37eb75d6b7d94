//! Parabolic data with γ₀ > 0: integrate until blow-up and compare with
//! the closed form.

use airy_core::closed_form::{full_solution, TauSolver};
use airy_core::integrate::{integrate, Field, IntegratorOptions};
use airy_core::state::State5;

fn main() -> airy_core::Result<()> {
    let s0 = State5::new(0.0, 1.0, 1.0, 0.0, 0.0);
    let exact = TauSolver::new(s0.alpha, s0.gamma)?
        .blowup_time()
        .expect("gamma0 > 0 blows up");
    let tr = integrate(Field::X, &s0, 2.0, &IntegratorOptions::adaptive(1e-12))?;
    println!("closed-form blow-up {exact:.12}");
    println!("integrator stopped  {:.12} ({:?})", tr.final_state().t, tr.reason);

    println!("{:>6} {:>14} {:>14} {:>10}", "t", "alpha", "alpha closed", "gamma");
    for t in [0.1, 0.3, 0.5, 0.7] {
        let s = full_solution(t, &s0)?;
        let num = integrate(Field::X, &s0, t, &IntegratorOptions::adaptive(1e-12))?;
        println!(
            "{t:>6} {:>14.10} {:>14.10} {:>10.5}",
            num.final_state().state.alpha,
            s.alpha,
            s.gamma
        );
    }
    Ok(())
}
