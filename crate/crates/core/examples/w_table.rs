//! Fourier-coefficient table of the potential in the free basis and a
//! spot check of the Toeplitz structure.
//!
//! `cargo run --example w_table -- dirichlet random`

use dirac_spectra::free_basis::BasisFamily;
use dirac_spectra::potential_rep::{build_w_table, v_matrix_element};
use dirac_spectra::testbed::{NamedBc, NamedPotential};

fn main() {
    let mut args = std::env::args().skip(1);
    let bc = NamedBc::from_name(&args.next().unwrap_or_else(|| "dirichlet".into())).expect("boundary condition name");
    let v = NamedPotential::from_name(&args.next().unwrap_or_else(|| "demo".into())).expect("zero, demo or random");
    let fam = BasisFamily::new(bc.canonical()).unwrap();
    let spec = v.spec();
    let wt = build_w_table(&fam, &spec, 32).unwrap();
    println!("{} / {}: |r| = {:.6}, validation error {:.2e}", bc.name(), v.name(), wt.norm, wt.validation_error);
    for m in (-8..=8).step_by(2) {
        println!(
            "  m = {m:>3}  w11 {:>22.4e}  w12 {:>22.4e}  w21 {:>22.4e}  w22 {:>22.4e}  tail {:.3e}",
            wt.get(0, 0, m),
            wt.get(0, 1, m),
            wt.get(1, 0, m),
            wt.get(1, 1, m),
            wt.tail(m.abs()),
        );
    }
    let a = v_matrix_element(&fam, &spec, 0, 1, 4, -2);
    let b = v_matrix_element(&fam, &spec, 0, 1, -6, 8);
    println!("  element (4,-2) = {a:.6e}, element (-6,8) = {b:.6e}, table w12(2) = {:.6e}", wt.get(0, 1, 2));
}
