//! Reconstructs a step function from the rectangle and disc projections
//! and reports the error for growing numbers of discs.

use dirac_spectra::free_basis::{BasisFamily, Truncation};
use dirac_spectra::localization::{make_plan, PlanOptions};
use dirac_spectra::potential_rep::build_w_table;
use dirac_spectra::resolvent_proj::{bari_markus_with, ProjectionEngine, QuadratureOptions, TruncatedOperator};
use dirac_spectra::spectral_solver::{projection_refs, reconstruct, PiecewiseFn};
use dirac_spectra::testbed::{demo_potential, NamedBc};

fn main() {
    let m = 64;
    let fam = BasisFamily::new(NamedBc::Antiperiodic.canonical()).unwrap();
    let wt = build_w_table(&fam, &demo_potential(), m).unwrap();
    let plan = make_plan(&fam, &wt, PlanOptions::default()).unwrap();
    let op = TruncatedOperator::assemble(&fam, &wt, m);
    let q = QuadratureOptions::default();
    let engine = ProjectionEngine::new(&op, q).unwrap();
    let free = ProjectionEngine::new(&op.free_part(), q).unwrap();
    let bm = bari_markus_with(&engine, &free, &fam, &plan, m / 2, &plan.riesz).unwrap();
    let rect = engine.project(plan.rect.into()).unwrap();
    let f = PiecewiseFn::step(1.0, [1.0, 0.5], [-0.5, 1.0]).unwrap();
    for n in [8, 16, 32] {
        let r = reconstruct(&fam, Truncation::new(m), &projection_refs(&rect, &bm.projections, n), &f, 20, 3);
        println!(
            "discs up to |n| = {n:>2}: L2 error {:.4e}, tail energy {:.4e}, ordering spread {:.1e}",
            r.l2_error, r.tail_energy, r.ordering_spread
        );
    }
}
