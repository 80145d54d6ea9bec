//! Riesz projections for the plan's contours and the Bari–Markus table.
//!
//! `cargo run --release --example projections -- antiperiodic random`

use dirac_spectra::free_basis::BasisFamily;
use dirac_spectra::localization::{make_plan, PlanOptions};
use dirac_spectra::potential_rep::build_w_table;
use dirac_spectra::resolvent_proj::{bari_markus_sums, ProjectionEngine, QuadratureOptions, TruncatedOperator};
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
    let q = QuadratureOptions::default();

    let engine = ProjectionEngine::new(&op, q).unwrap();
    let rect = engine.project(plan.rect.into()).unwrap();
    println!(
        "rectangle: trace {:.6}, idempotency {:.2e}, quadrature change {:.2e}",
        rect.trace,
        rect.idempotency_defect(),
        rect.quadrature_change
    );

    let bm = bari_markus_sums(&op, &fam, &plan, m / 2, q).unwrap();
    for r in &bm.rows {
        println!(
            "  n {:>3} branch {:?}: trace {:.4}, |P - P0| {:.4e}, op-norm bound {:.4e}, running {:.4e}",
            r.n, r.branch, r.trace, r.hs_norm_star, r.op_norm_estimate, r.running_sum
        );
    }
    println!("total {:.6e}", bm.total());
}
