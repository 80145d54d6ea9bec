//! Chooses the rectangle and discs that isolate the spectrum, or reports why none exists.
//!
//! `cargo run --example localization_plan -- periodic demo 64`

use dirac_spectra::free_basis::BasisFamily;
use dirac_spectra::localization::{make_plan, PlanOptions};
use dirac_spectra::potential_rep::build_w_table;
use dirac_spectra::report::PlanJson;
use dirac_spectra::testbed::{NamedBc, NamedPotential};

fn main() {
    let mut args = std::env::args().skip(1);
    let bc = NamedBc::from_name(&args.next().unwrap_or_else(|| "periodic".into())).expect("boundary condition name");
    let v = NamedPotential::from_name(&args.next().unwrap_or_else(|| "demo".into())).expect("zero, demo or random");
    let m: i64 = args.next().map_or(64, |s| s.parse().expect("even truncation"));
    let fam = BasisFamily::new(bc.canonical()).unwrap();
    let wt = build_w_table(&fam, &v.spec(), m).unwrap();
    match make_plan(&fam, &wt, PlanOptions::default()) {
        Ok(plan) => {
            println!(
                "N = {}, T = {:.3} (formula {:.3}), rho = {}, kappa = {:.4}, worst boundary value {:.3e}, {} discs",
                plan.n,
                plan.t,
                plan.t_formula,
                plan.rho,
                plan.kappa,
                plan.worst_boundary_value,
                plan.discs.len()
            );
            let json = PlanJson::from(&plan);
            println!("{}", serde_json::to_string_pretty(&json.rect).unwrap());
        }
        Err(e) => println!("no plan: {e}"),
    }
}
