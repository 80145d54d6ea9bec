use std::f64::consts::PI;

use dirac_spectra::expoly::ExpPoly;
use dirac_spectra::free_basis::{inner_exact, standard_grid, BasisError, BasisFamily, Truncation};
use dirac_spectra::linalg;
use dirac_spectra::quadrature::RealRule;
use dirac_spectra::testbed::NamedBc;
use dirac_spectra::C64;
use proptest::prelude::*;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn family(bc: NamedBc) -> BasisFamily {
    BasisFamily::new(bc.canonical()).unwrap()
}

fn boundary_values(p: &[ExpPoly; 2]) -> [C64; 4] {
    [p[0].eval(0.0), p[0].eval(PI), p[1].eval(0.0), p[1].eval(PI)]
}

/// `L⁰y = (i y₁′, −i y₂′)` at `x`.
fn free_operator(p: &[ExpPoly; 2], x: f64) -> [C64; 2] {
    [I * p[0].derivative(1, x), -I * p[1].derivative(1, x)]
}

fn sample_points() -> Vec<f64> {
    (0..=20).map(|i| PI * i as f64 / 20.0).collect()
}

#[test]
fn periodic_basis_is_the_exponential_system() {
    let fam = family(NamedBc::Periodic);
    for k in [-4, 0, 2, 6] {
        for x in sample_points() {
            let want = (-I * k as f64 * x).exp();
            let p = fam.eval_phi(0, k, x);
            let q = fam.eval_phi_tilde(0, k, x);
            assert!((p[0] - want).norm() < 1e-14 && p[1].norm() == 0.0);
            assert!((q[0] - want).norm() < 1e-14 && q[1].norm() == 0.0);
            let p2 = fam.eval_phi(1, k, x);
            assert!(p2[0].norm() == 0.0 && (p2[1] - want.conj()).norm() < 1e-14);
        }
    }
}

#[test]
fn dirichlet_value_at_the_left_end() {
    let fam = family(NamedBc::Dirichlet);
    let mu = (0..2).find(|&mu| fam.tau(mu).norm() < 1e-14).unwrap();
    let alpha = if mu == 0 { fam.vd.alpha } else { fam.vd.beta };
    let p = fam.eval_phi(mu, 0, 0.0);
    assert!((p[0] - alpha[0]).norm() < 1e-14);
    assert!((p[1] - alpha[1]).norm() < 1e-14);
    assert!((alpha[0] + alpha[1]).norm() < 1e-14);
}

#[test]
fn case_i_associated_function() {
    let fam = family(NamedBc::CaseI);
    let tau = fam.tau(0);
    assert!((tau - 1.0).norm() < 1e-14);
    for k in [-2, 0, 4] {
        for x in sample_points() {
            let kf = k as f64;
            let first = PI * (I * tau * (PI - x)).exp() * (-I * kf * x).exp();
            let second = x * (I * tau * x).exp() * (I * kf * x).exp();
            let p = fam.eval_phi(1, k, x);
            assert!((p[0] - first).norm() < 1e-13, "{} vs {}", p[0], first);
            assert!((p[1] - second).norm() < 1e-13);
        }
    }
}

#[test]
fn case_i_dual_prefactor() {
    let fam = family(NamedBc::CaseI);
    let delta = fam.vd.delta.unwrap();
    assert!((delta + PI).norm() < 1e-14);
    let prefactor = fam.vd.alpha[1].conj() / delta.conj();
    assert!((prefactor.norm() - 1.0 / PI).abs() < 1e-15);
    let p = fam.phi_tilde(1, 0);
    assert!((p[0].eval(PI).norm() - prefactor.norm()).abs() < 1e-14);
    assert!(p[1].eval(0.3).norm() < 1e-15);
}

#[test]
fn full_biorthogonality_for_every_condition() {
    for bc in NamedBc::ALL {
        let fam = family(bc);
        let mut worst = 0.0f64;
        for mu in 0..2 {
            for nu in 0..2 {
                for k in (-16..=16).step_by(2) {
                    for j in (-16..=16).step_by(2) {
                        let g = inner_exact(&fam.phi(mu, k), &fam.phi_tilde(nu, j));
                        let want = if mu == nu && k == j { 1.0 } else { 0.0 };
                        worst = worst.max((g - want).norm());
                    }
                }
            }
        }
        assert!(worst < 1e-10, "{}: {worst:e}", bc.name());
    }
}

#[test]
fn biorthogonality_by_quadrature() {
    let rule = RealRule::on_interval(256, 16);
    for bc in NamedBc::ALL {
        let fam = family(bc);
        let ip = |mu: usize, nu: usize| {
            let (p, q) = (fam.phi(mu, 4), fam.phi_tilde(nu, 4));
            rule.integrate(|x| p[0].eval(x) * q[0].eval(x).conj() + p[1].eval(x) * q[1].eval(x).conj()) / PI
        };
        assert!((ip(1, 1) - 1.0).norm() < 1e-12, "{}", bc.name());
        assert!(ip(1, 0).norm() < 1e-12, "{}", bc.name());
    }
}

#[test]
fn every_basis_function_satisfies_the_conditions() {
    for bc in NamedBc::ALL {
        let fam = family(bc);
        let adj = fam.adjoint_bc();
        for mu in 0..2 {
            for k in (-32..=32).step_by(2) {
                let r = fam.bc.residuals(boundary_values(&fam.phi(mu, k)));
                assert!(r[0].norm() < 1e-10 && r[1].norm() < 1e-10, "{} phi {mu} {k}", bc.name());
                let r = adj.residuals(boundary_values(&fam.phi_tilde(mu, k)));
                assert!(r[0].norm() < 1e-10 && r[1].norm() < 1e-10, "{} dual {mu} {k}", bc.name());
            }
        }
    }
}

#[test]
fn eigen_and_chain_equations() {
    for bc in NamedBc::ALL {
        let fam = family(bc);
        for k in (-16..=16).step_by(2) {
            for x in sample_points() {
                let lam = fam.lambda0(0, k);
                let p1 = fam.phi(0, k);
                let l1 = free_operator(&p1, x);
                for c in 0..2 {
                    assert!((l1[c] - lam * p1[c].eval(x)).norm() < 1e-8);
                }
                let p2 = fam.phi(1, k);
                let l2 = free_operator(&p2, x);
                let lam2 = fam.lambda0(1, k);
                for c in 0..2 {
                    let rhs = if fam.is_jordan() {
                        lam2 * p2[c].eval(x) - I * p1[c].eval(x)
                    } else {
                        lam2 * p2[c].eval(x)
                    };
                    assert!((l2[c] - rhs).norm() < 1e-8, "{} k={k} x={x}", bc.name());
                }
            }
        }
    }
}

#[test]
fn chain_equation_by_finite_differences() {
    let fam = family(NamedBc::CaseI);
    let h = 1e-5;
    let p1 = fam.phi(0, 2);
    let p2 = fam.phi(1, 2);
    let lam = fam.lambda0(1, 2);
    for x in [0.3, 1.1, 2.5] {
        let d1 = (p2[0].eval(x + h) - p2[0].eval(x - h)) / (2.0 * h);
        let d2 = (p2[1].eval(x + h) - p2[1].eval(x - h)) / (2.0 * h);
        assert!((I * d1 - lam * p2[0].eval(x) + I * p1[0].eval(x)).norm() < 1e-7);
        assert!((-I * d2 - lam * p2[1].eval(x) + I * p1[1].eval(x)).norm() < 1e-7);
    }
}

#[test]
fn a_maps_exponentials_to_the_basis() {
    let xs = standard_grid(8);
    for bc in NamedBc::ALL {
        let fam = family(bc);
        for k in [-6, 0, 4] {
            for nu in 0..2 {
                let e: Vec<[C64; 2]> = xs
                    .iter()
                    .map(|&x| {
                        let v = (I * k as f64 * x).exp();
                        if nu == 0 {
                            [v, C64::new(0.0, 0.0)]
                        } else {
                            [C64::new(0.0, 0.0), v]
                        }
                    })
                    .collect();
                let image = fam.apply_a(&xs, &e).unwrap();
                for (x, got) in xs.iter().zip(&image) {
                    let want = fam.eval_phi(nu, k, *x);
                    assert!((got[0] - want[0]).norm() < 1e-12 && (got[1] - want[1]).norm() < 1e-12, "{}", bc.name());
                }
            }
        }
    }
}

#[test]
fn periodic_a_reflects_the_first_component() {
    let xs = standard_grid(6);
    let fam = family(NamedBc::Periodic);
    let fg: Vec<[C64; 2]> = xs.iter().map(|&x| [C64::new(x.sin(), x), C64::new(x * x, -x.cos())]).collect();
    let image = fam.apply_a(&xs, &fg).unwrap();
    let n = xs.len();
    for j in 0..n {
        assert!((image[j][0] - fg[n - 1 - j][0]).norm() < 1e-14);
        assert!((image[j][1] - fg[j][1]).norm() < 1e-14);
    }
}

#[test]
fn asymmetric_grid_is_rejected() {
    let fam = family(NamedBc::Dirichlet);
    let xs = vec![0.0, 1.0, 2.0];
    let fg = vec![[C64::new(1.0, 0.0); 2]; 3];
    assert_eq!(fam.apply_a(&xs, &fg), Err(BasisError::GridNotReflective));
    assert_eq!(fam.apply_a_inv(&xs, &fg), Err(BasisError::GridNotReflective));
}

#[test]
fn exact_gram_matches_quadrature() {
    let tr = Truncation::new(8);
    let rule = RealRule::on_interval(64, 16);
    for bc in NamedBc::ALL {
        let fam = family(bc);
        let diff = &fam.gram_matrix_exact(tr) - &fam.gram_matrix(tr, &rule);
        assert!(linalg::frobenius(&diff) < 1e-11, "{}", bc.name());
    }
}

#[test]
fn periodic_riesz_constants_are_one() {
    let r = family(NamedBc::Periodic).riesz_constants(16).unwrap();
    assert!((r.norm_a - 1.0).abs() < 1e-12 && (r.norm_a_inv - 1.0).abs() < 1e-12);
}

#[test]
fn riesz_constants_grow_and_stabilize() {
    for bc in NamedBc::ALL {
        let fam = family(bc);
        let a = fam.riesz_constants(32).unwrap();
        let b = fam.riesz_constants(64).unwrap();
        assert!(a.kappa() >= 1.0 - 1e-12);
        assert!(b.norm_a >= a.norm_a - 1e-12 && b.norm_a_inv >= a.norm_a_inv - 1e-12, "{}", bc.name());
        if bc == NamedBc::Dirichlet {
            assert!((b.kappa() / a.kappa() - 1.0).abs() < 0.01);
        }
    }
}

#[test]
fn free_spectra() {
    let periodic = family(NamedBc::Periodic).free_spectrum(8);
    assert_eq!(periodic.eigenvalues.len(), 9);
    for e in &periodic.eigenvalues {
        assert!((e.value - e.k as f64).norm() < 1e-14 && e.algebraic == 2 && e.geometric == 2);
    }
    let anti = family(NamedBc::Antiperiodic).free_spectrum(8);
    for e in &anti.eigenvalues {
        let v = e.value.re.round() as i64;
        assert!(v.rem_euclid(2) == 1 && e.value.im.abs() < 1e-14);
    }
    let dirichlet = family(NamedBc::Dirichlet).free_spectrum(8);
    let values: Vec<i64> = dirichlet.eigenvalues.iter().map(|e| e.value.re.round() as i64).collect();
    assert_eq!(values, (-8..=9).collect::<Vec<_>>());
    let case_i = family(NamedBc::CaseI).free_spectrum(8);
    assert!(case_i.eigenvalues.iter().all(|e| e.algebraic == 2 && e.geometric == 1));
}

#[test]
fn strict_free_eigenvalues_are_separated() {
    for bc in [NamedBc::Dirichlet, NamedBc::Strict] {
        let fam = family(bc);
        let rho = fam.cd.rho.unwrap();
        let sp = fam.free_spectrum(16);
        for (i, x) in sp.eigenvalues.iter().enumerate() {
            for y in &sp.eigenvalues[i + 1..] {
                assert!((x.value - y.value).norm() >= 2.0 * rho - 1e-12);
            }
        }
    }
}

fn smooth_pair() -> impl Strategy<Value = Vec<(f64, f64, f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn a_inverse_undoes_a(coeffs in smooth_pair(), which in 0usize..5) {
        let fam = family(NamedBc::ALL[which]);
        let xs = standard_grid(7);
        let fg: Vec<[C64; 2]> = xs
            .iter()
            .map(|&x| {
                let mut v = [C64::new(0.0, 0.0); 2];
                for (h, &(a, b, c, d)) in coeffs.iter().enumerate() {
                    let t = (h + 1) as f64 * x;
                    v[0] += C64::new(a * t.cos(), b * t.sin());
                    v[1] += C64::new(c * t.sin(), d * t.cos());
                }
                v
            })
            .collect();
        let back = fam.apply_a_inv(&xs, &fam.apply_a(&xs, &fg).unwrap()).unwrap();
        for (u, w) in back.iter().zip(&fg) {
            prop_assert!((u[0] - w[0]).norm() < 1e-12 && (u[1] - w[1]).norm() < 1e-12);
        }
    }
}
