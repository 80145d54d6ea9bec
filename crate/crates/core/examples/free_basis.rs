//! Free eigenvalues, basis functions and Riesz constants for one boundary condition.
//!
//! `cargo run --example free_basis -- case-i`

use std::f64::consts::PI;

use dirac_spectra::free_basis::{inner_exact, BasisFamily};
use dirac_spectra::testbed::NamedBc;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "strict".into());
    let bc = NamedBc::from_name(&name).expect("periodic, antiperiodic, dirichlet, strict or case-i");
    let fam = BasisFamily::new(bc.canonical()).unwrap();
    println!("{name}: strict {}, jordan {}, tau = {} / {}", fam.is_strict(), fam.is_jordan(), fam.tau(0), fam.tau(1));

    for e in fam.free_spectrum(8).eigenvalues.iter().filter(|e| e.k.abs() <= 4) {
        println!("  lambda0 = {:>18.6}  k {:>3}  branch {:?}  alg {} geo {}", e.value, e.k, e.branch, e.algebraic, e.geometric);
    }
    for x in [0.0, PI / 3.0, PI] {
        let p = fam.eval_phi(0, 2, x);
        let q = fam.eval_phi_tilde(0, 2, x);
        println!("  x = {x:.4}: phi(0,2) = ({:.4}, {:.4})  dual = ({:.4}, {:.4})", p[0], p[1], q[0], q[1]);
    }
    let g = inner_exact(&fam.phi(1, 4), &fam.phi_tilde(1, 4));
    println!("  <phi(1,4), dual(1,4)> = {g:.3e}");
    for m in [16, 32, 64] {
        let r = fam.riesz_constants(m).unwrap();
        println!("  M = {m:>3}: |A| = {:.6}, |A^-1| = {:.6}, kappa = {:.6}", r.norm_a, r.norm_a_inv, r.kappa());
    }
}
