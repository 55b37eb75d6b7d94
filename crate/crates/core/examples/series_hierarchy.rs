//! Power-series coefficient hierarchy: parabolic truncation, the dry-point
//! linearization and the u₂ ≡ 0 reduction.

use airy_core::integrate::IntegratorOptions;
use airy_core::series::{
    dry_point_affinity_check, hierarchy_rhs, hierarchy_terms, impose_u2_constraint, integrate_series, SeriesState,
};
use airy_core::state::SymState3;

fn main() -> airy_core::Result<()> {
    for m in 0..3 {
        let (eta, u) = hierarchy_terms(m);
        println!("m = {m}: eta terms {eta:?}\n       u terms {u:?}");
    }

    let p = SymState3 {
        alpha: 0.3,
        gamma: -1.0,
        zeta: 1.0,
    };
    let tr = integrate_series(
        &SeriesState::from_parabolic(&p, 4)?,
        0.5,
        &IntegratorOptions::adaptive(1e-12),
    )?;
    let last = tr.states.last().expect("nonempty");
    println!(
        "parabolic data at order 4 after t = 0.5: eta {:?}, u {:?}",
        last.eta, last.u
    );

    let mut s = SeriesState::new(vec![0.0, 0.7, -0.2, 0.1, 0.05], vec![0.4, -0.3, 0.2, 0.1, -0.1])?;
    for n in 1..=2 {
        println!("dry point, pair {n}: {:?}", dry_point_affinity_check(n, &s)?);
    }
    s.eta[0] = 0.8;
    println!("wet point, pair 1: {:?}", dry_point_affinity_check(1, &s)?);

    s.u[2] = 0.0;
    impose_u2_constraint(&mut s)?;
    println!(
        "u2 = 0 reduction: eta3 = {:.6}, u3 = {:.6}, du2/dt = {:e}",
        s.eta[3],
        s.u[3],
        hierarchy_rhs(&s).u[2]
    );
    Ok(())
}
