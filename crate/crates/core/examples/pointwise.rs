//! Symmetric partial sums of the free expansion of a step function at the
//! jump, at interior points and at both endpoints.

use std::f64::consts::PI;

use dirac_spectra::free_basis::BasisFamily;
use dirac_spectra::spectral_solver::{endpoint_limits, interior_limit, pointwise_partial_sums, PiecewiseFn};
use dirac_spectra::testbed::NamedBc;

fn main() {
    let mps: i64 = std::env::args().nth(1).map_or(512, |s| s.parse().expect("integer"));
    let f = PiecewiseFn::step(1.0, [1.0, 0.5], [-0.5, 1.0]).unwrap();
    let xs = [0.0, 0.5, 1.0, 2.0, PI];
    for bc in NamedBc::ALL {
        let fam = BasisFamily::new(bc.canonical()).unwrap();
        let sums = pointwise_partial_sums(&fam, &f, &xs, mps);
        let (at0, at_pi) = endpoint_limits(&fam.bc, &f);
        let limits = [at0, interior_limit(&f, 0.5), interior_limit(&f, 1.0), interior_limit(&f, 2.0), at_pi];
        print!("{:<13}", bc.name());
        for (s, l) in sums.iter().zip(&limits) {
            let e = ((s[0] - l[0]).norm_sqr() + (s[1] - l[1]).norm_sqr()).sqrt();
            print!(" {e:9.2e}");
        }
        println!();
    }
}
