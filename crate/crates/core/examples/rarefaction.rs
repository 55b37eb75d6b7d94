//! Dam break onto a dry bed: finite-volume solution against the centered
//! expansion fan, plus the analytic residual of the fan itself.

use airy_core::pde::{dam_break_exact, rarefaction_residual, Boundary, Grid1D};

fn main() -> airy_core::Result<()> {
    let mut g = Grid1D::from_fields(-4.0, 4.0, 1600, Boundary::Outflow, |x| {
        if x < 0.0 {
            (1.0, 0.0)
        } else {
            (0.0, 0.0)
        }
    })?;
    g.advance(1.0, false)?;
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "x", "eta", "eta fan", "u", "u fan");
    for x in [-1.5, -0.5, 0.0, 0.5, 1.0, 1.5] {
        let i = ((x - g.a) / g.dx()) as usize;
        let (e, u) = dam_break_exact(1.0, g.x(i), g.t);
        println!(
            "{:>6.3} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            g.x(i),
            g.eta[i],
            e,
            g.u(i),
            u
        );
    }
    println!("fan residual at (1, 2): {:?}", rarefaction_residual(1.0, 2.0)?);
    Ok(())
}
