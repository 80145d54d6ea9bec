//! Sup-norm gap between perturbed and free spectral partial sums of an
//! indicator function as the rectangle grows.

use std::f64::consts::PI;

use dirac_spectra::free_basis::BasisFamily;
use dirac_spectra::localization::{make_plan, PlanOptions};
use dirac_spectra::potential_rep::build_w_table;
use dirac_spectra::resolvent_proj::{ProjectionEngine, QuadratureOptions, TruncatedOperator};
use dirac_spectra::spectral_solver::{equiconvergence_gap, PiecewiseFn};
use dirac_spectra::testbed::{demo_potential, NamedBc};

fn main() {
    let m = 64;
    let indicator = PiecewiseFn::step(1.0, [1.0, 1.0], [0.0, 0.0]).unwrap();
    let grid: Vec<f64> = (0..=256).map(|i| PI * i as f64 / 256.0).collect();
    for bc in NamedBc::ALL {
        let fam = BasisFamily::new(bc.canonical()).unwrap();
        let wt = build_w_table(&fam, &demo_potential(), m).unwrap();
        let plan = match make_plan(&fam, &wt, PlanOptions::default()) {
            Ok(p) => p,
            Err(e) => {
                println!("{:<13} {e}", bc.name());
                continue;
            }
        };
        let op = TruncatedOperator::assemble(&fam, &wt, m);
        let q = QuadratureOptions::default();
        let engine = ProjectionEngine::new(&op, q).unwrap();
        let free = ProjectionEngine::new(&op.free_part(), q).unwrap();
        print!("{:<13}", bc.name());
        for n in [4, 8, 16, 24] {
            let gap = equiconvergence_gap(&fam, &engine, &free, &plan, &indicator, n, &grid).unwrap();
            print!(" N={n}: {gap:.3e}");
        }
        println!();
    }
}
