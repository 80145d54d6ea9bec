//! Dense eigenvalues sorted into the plan's contours, with the deviations
//! from the free spectrum and, for strictly regular conditions, the same
//! deviations recomputed from the projections.

use dirac_spectra::free_basis::BasisFamily;
use dirac_spectra::localization::{make_plan, PlanOptions};
use dirac_spectra::potential_rep::build_w_table;
use dirac_spectra::resolvent_proj::{disc_projections, ProjectionEngine, QuadratureOptions, TruncatedOperator};
use dirac_spectra::spectral_solver::{deviation_via_projection, eigensolve};
use dirac_spectra::testbed::{NamedBc, NamedPotential};

fn main() {
    let mut args = std::env::args().skip(1);
    let bc = NamedBc::from_name(&args.next().unwrap_or_else(|| "dirichlet".into())).expect("boundary condition name");
    let v = NamedPotential::from_name(&args.next().unwrap_or_else(|| "demo".into())).expect("zero, demo or random");
    let m = 64;
    let fam = BasisFamily::new(bc.canonical()).unwrap();
    let wt = build_w_table(&fam, &v.spec(), m).unwrap();
    let plan = make_plan(&fam, &wt, PlanOptions::default()).expect("localizable problem");
    let op = TruncatedOperator::assemble(&fam, &wt, m);
    let report = eigensolve(&fam, &op, &plan).unwrap();
    println!(
        "{} eigenvalues: {} in the rectangle, {} unassigned, sum |delta|^2 = {:.6e}",
        report.eigenvalues.len(),
        report.rect_count,
        report.unassigned,
        report.deviation_sum()
    );

    let engine = ProjectionEngine::new(&op, QuadratureOptions::default()).unwrap();
    let discs = disc_projections(&engine, &plan, 16).unwrap();
    for d in report.deviations.iter().filter(|d| d.n.abs() <= 16) {
        let via = discs
            .iter()
            .find(|p| p.disc.m == d.n && p.disc.branch == Some(d.branch))
            .and_then(|p| deviation_via_projection(&fam, &op, &p.projection, d.n, d.branch).ok());
        match via {
            Some(x) => println!("  n {:>3} branch {}: delta {:.6e}  via projection {:.6e}", d.n, d.branch, d.delta, x),
            None => println!("  n {:>3} branch {}: delta {:.6e}", d.n, d.branch, d.delta),
        }
    }
}
