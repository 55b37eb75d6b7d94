//! Bi-Hamiltonian structure on random points: Lenard–Magri relations,
//! Jacobi identities of P_f, Q_g and the pencil, and what breaks when f
//! is wrong.

use airy_core::poisson::checks::{compatibility_check, jacobi_check, lenard_magri_check, JACOBI_TOL, LAMBDAS};
use airy_core::poisson::AuxChoice;
use airy_core::sampling::{sigma_points, PointSpec};

fn main() {
    let pts = sigma_points(200, 42, &PointSpec::default());
    print!("{}", lenard_magri_check(&pts, AuxChoice::Exact).to_text());
    print!("{}", jacobi_check(&pts, AuxChoice::Exact, JACOBI_TOL).to_text());
    print!(
        "{}",
        compatibility_check(&pts, &LAMBDAS, AuxChoice::Exact, JACOBI_TOL).to_text()
    );

    let wrong = AuxChoice::Scaled { f: 1.5, g: 1.0 };
    println!("\nwith f scaled by 1.5:");
    print!("{}", lenard_magri_check(&pts, wrong).to_text());
    print!("{}", jacobi_check(&pts, wrong, JACOBI_TOL).to_text());
}
