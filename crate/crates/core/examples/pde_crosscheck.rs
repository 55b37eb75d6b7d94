//! Finite-volume solution of the shallow-water system from parabolic data
//! against the closed-form reduction.

use airy_core::pde::{compare_reduction, convergence_ladder};
use airy_core::state::State5;

fn main() -> airy_core::Result<()> {
    let ladder = convergence_ladder(&State5::new(0.0, -1.0, 1.0, 0.0, 0.0), 0.2, &[200, 400, 800, 1600])?;
    println!("{:>6} {:>10} {:>10} {:>10}", "cells", "linf eta", "linf u", "order");
    for (i, r) in ladder.rows.iter().enumerate() {
        let order = if i == 0 {
            String::new()
        } else {
            format!("{:.3}", ladder.orders[i - 1])
        };
        println!("{:>6} {:>10.3e} {:>10.3e} {:>10}", r.cells, r.linf_eta, r.linf_u, order);
    }

    let s0 = State5::new(0.3, -1.0, 1.0, 0.4, 0.5);
    let delta = s0.to_sigma()?.delta;
    let c = compare_reduction(&s0, 0.2, 800)?;
    println!(
        "centroid moved {:.5}, delta0 t = {:.5}, dx = {:.5}",
        c.vertex_drift,
        delta * c.t,
        c.dx
    );
    Ok(())
}
