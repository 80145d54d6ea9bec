//! Normalizes and classifies every standard boundary condition, then a raw
//! pair of rows given on the command line as eight real numbers.
//!
//! `cargo run --example classify_bc -- 1 -1 0 0 0 0 1 -1`

use dirac_spectra::bc_algebra::{normalize_bc, RawBc};
use dirac_spectra::report::classify_report;
use dirac_spectra::testbed::NamedBc;

fn main() {
    for bc in NamedBc::ALL {
        let rep = classify_report(&bc.canonical()).expect("standard conditions are regular");
        println!("{:<13} {:<28} tau* {:?} taus {:?} rho {:?}", bc.name(), rep.class, rep.tau_star, rep.taus, rep.rho);
    }
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric entries")).collect();
    if args.len() == 8 {
        let raw = RawBc::from_real([[args[0], args[1], args[2], args[3]], [args[4], args[5], args[6], args[7]]]).expect("rows");
        match normalize_bc(&raw).and_then(|bc| classify_report(&bc)) {
            Ok(rep) => println!("{}", serde_json::to_string_pretty(&rep).unwrap()),
            Err(e) => println!("rejected: {e}"),
        }
    }
}
