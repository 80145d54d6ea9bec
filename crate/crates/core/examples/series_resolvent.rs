//! Compares the Neumann-series resolvent with dense inversion between the discs.

use dirac_spectra::free_basis::BasisFamily;
use dirac_spectra::linalg::frobenius;
use dirac_spectra::potential_rep::build_w_table;
use dirac_spectra::resolvent_proj::{resolvent_apply, series_resolvent, series_terms_for, TruncatedOperator};
use dirac_spectra::testbed::{demo_potential, NamedBc};
use dirac_spectra::C64;

fn main() {
    let m = 32;
    for bc in [NamedBc::Periodic, NamedBc::Dirichlet, NamedBc::Strict] {
        let fam = BasisFamily::new(bc.canonical()).unwrap();
        let wt = build_w_table(&fam, &demo_potential(), m).unwrap();
        let op = TruncatedOperator::assemble(&fam, &wt, m);
        for n in [5, 9, 13] {
            let lam = C64::new(fam.lambda0(0, n - 1).re + 1.0, 0.5);
            match series_terms_for(&op, lam, 1e-12).and_then(|s| series_resolvent(&op, lam, s)) {
                Ok(sr) => {
                    let dense = resolvent_apply(&op, lam).unwrap();
                    println!(
                        "{:<9} lambda {lam:.3}: q {:.4}, {} terms, tail bound {:.2e}, |series - dense| {:.2e}",
                        bc.name(),
                        sr.q,
                        sr.terms,
                        sr.tail_bound,
                        frobenius(&(&sr.matrix - &dense))
                    );
                }
                Err(e) => println!("{:<9} lambda {lam:.3}: {e}", bc.name()),
            }
        }
    }
}
