use std::f64::consts::PI;

use dirac_spectra::bc_algebra::{
    adjoint_bc, char_data, char_roots, classify, eigen_vectors, normalize_bc, tau_branch, BcClass, BcError, CanonicalBc,
    NonStrictKind, RawBc, Roots, Taus,
};
use dirac_spectra::C64;
use proptest::prelude::*;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() < tol
}

fn assert_bc(bc: &CanonicalBc, b: f64, a: f64, d: f64, cc: f64) {
    for (got, want) in [(bc.b(), b), (bc.a(), a), (bc.d(), d), (bc.c(), cc)] {
        assert!(close(got, c(want), 1e-14), "{got} vs {want}");
    }
}

fn roots_of(bc: &CanonicalBc) -> Vec<C64> {
    match char_roots(bc) {
        Roots::Distinct(a, b) => vec![a, b],
        Roots::Double(z) => vec![z, z],
    }
}

fn quadratic(bc: &CanonicalBc, z: C64) -> C64 {
    z * z + (bc.b() + bc.c()) * z + bc.det()
}

/// Matches the two roots of `a` against those of `b` in either order.
fn same_pair(a: &[C64], b: &[C64]) -> f64 {
    let straight = (a[0] - b[0]).norm().max((a[1] - b[1]).norm());
    let crossed = (a[0] - b[1]).norm().max((a[1] - b[0]).norm());
    straight.min(crossed)
}

#[test]
fn identity_minor_passes_through() {
    let raw = RawBc::from_real([[1.0, -1.0, 0.0, 0.0], [0.0, 0.0, -1.0, 1.0]]).unwrap();
    assert_bc(&normalize_bc(&raw).unwrap(), -1.0, 0.0, 0.0, -1.0);
}

#[test]
fn scaled_rows_normalize_to_periodic() {
    let raw = RawBc::from_real([[2.0, -2.0, 0.0, 0.0], [0.0, 0.0, -3.0, 3.0]]).unwrap();
    assert_bc(&normalize_bc(&raw).unwrap(), -1.0, 0.0, 0.0, -1.0);
}

#[test]
fn vanishing_minor_is_rejected() {
    let raw = RawBc::from_real([[0.0, 1.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0]]).unwrap();
    assert!(matches!(normalize_bc(&raw), Err(BcError::SingularA14 { .. })));
}

#[test]
fn irregular_parameters_are_rejected() {
    assert!(matches!(CanonicalBc::real(1.0, 1.0, 1.0, 1.0), Err(BcError::NotRegular { .. })));
}

#[test]
fn zero_row_is_rejected() {
    assert!(RawBc::from_real([[0.0; 4], [1.0, 0.0, 0.0, 1.0]]).is_err());
}

#[test]
fn classification_examples() {
    let periodic = CanonicalBc::real(-1.0, 0.0, 0.0, -1.0).unwrap();
    assert_eq!(classify(&periodic), BcClass::RegularNotStrict { kind: NonStrictKind::PeriodicType });
    let dirichlet = CanonicalBc::real(0.0, 1.0, 1.0, 0.0).unwrap();
    assert_eq!(classify(&dirichlet), BcClass::StrictlyRegular { dirichlet_type: true });
    let case_i = CanonicalBc::real(1.0, 0.0, 1.0, 1.0).unwrap();
    assert_eq!(classify(&case_i), BcClass::RegularNotStrict { kind: NonStrictKind::CaseI });
    let case_ii = CanonicalBc::real(1.0, 1.0, 0.0, 1.0).unwrap();
    assert_eq!(classify(&case_ii), BcClass::RegularNotStrict { kind: NonStrictKind::CaseII });
    let case_iii = CanonicalBc::real(3.0, 1.0, -1.0, 1.0).unwrap();
    assert_eq!(classify(&case_iii), BcClass::RegularNotStrict { kind: NonStrictKind::CaseIII });
    let strict = CanonicalBc::real(3.0, 1.0, 1.0, 1.0).unwrap();
    assert_eq!(classify(&strict), BcClass::StrictlyRegular { dirichlet_type: false });
}

#[test]
fn root_examples() {
    let periodic = CanonicalBc::real(-1.0, 0.0, 0.0, -1.0).unwrap();
    assert_eq!(char_roots(&periodic), Roots::Double(c(1.0)));

    let dirichlet = CanonicalBc::real(0.0, 1.0, 1.0, 0.0).unwrap();
    let r = roots_of(&dirichlet);
    assert!(same_pair(&r, &[c(1.0), c(-1.0)]) < 1e-15);

    let strict = CanonicalBc::real(3.0, 1.0, 1.0, 1.0).unwrap();
    let r = roots_of(&strict);
    let s2 = 2f64.sqrt();
    assert!(same_pair(&r, &[c(-2.0 + s2), c(-2.0 - s2)]) < 1e-14);
    for z in r {
        assert!(quadratic(&strict, z).norm() < 1e-13);
    }
}

#[test]
fn tau_examples() {
    assert_eq!(tau_branch(c(1.0)).unwrap(), C64::new(0.0, 0.0));
    assert!(close(tau_branch(c(-1.0)).unwrap(), c(1.0), 1e-15));
    let t = tau_branch(c(-2.0 + 2f64.sqrt())).unwrap();
    let oracle = C64::new(1.0, -(2.0 - 2f64.sqrt()).ln() / PI);
    assert!(close(t, oracle, 1e-14));
    assert!((t.im - 0.17024).abs() < 1e-5);
    assert_eq!(tau_branch(c(0.0)), Err(BcError::ZeroRoot));
}

#[test]
fn branch_cut_is_half_open() {
    let below = tau_branch(C64::new(-1.0, -1e-300)).unwrap();
    let above = tau_branch(C64::new(-1.0, 0.0)).unwrap();
    assert!(below.re <= 1.0 && below.re > -1.0);
    assert_eq!(above.re, 1.0);
}

#[test]
fn adjoint_examples() {
    let periodic = CanonicalBc::real(-1.0, 0.0, 0.0, -1.0).unwrap();
    assert_bc(&adjoint_bc(&periodic), -1.0, 0.0, 0.0, -1.0);
    let strict = CanonicalBc::real(3.0, 1.0, 1.0, 1.0).unwrap();
    assert_bc(&adjoint_bc(&strict), 0.5, -0.5, -0.5, 1.5);
}

#[test]
fn dirichlet_eigenvectors() {
    let bc = CanonicalBc::real(0.0, 1.0, 1.0, 0.0).unwrap();
    let cd = char_data(&bc).unwrap();
    let vd = eigen_vectors(&bc, &cd).unwrap();
    let (z1, _) = match cd.roots {
        Roots::Distinct(a, b) => (a, b),
        Roots::Double(_) => unreachable!(),
    };
    let (a, b) = if (z1 - c(1.0)).norm() < 1e-12 { (vd.alpha, vd.beta) } else { (vd.beta, vd.alpha) };
    assert!(close(a[0] + a[1], c(0.0), 1e-14) && a[0].norm() > 0.5);
    assert!(close(b[0] - b[1], c(0.0), 1e-14) && b[0].norm() > 0.5);
    let (ap, bp) = (vd.alpha_prime.unwrap(), vd.beta_prime.unwrap());
    let rows = [ap, bp];
    let cols = [vd.alpha, vd.beta];
    for (i, row) in rows.iter().enumerate() {
        for (j, col) in cols.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!(close(row[0] * col[0] + row[1] * col[1], c(want), 1e-14));
        }
    }
}

#[test]
fn case_i_vectors() {
    let bc = CanonicalBc::real(1.0, 0.0, 1.0, 1.0).unwrap();
    let vd = eigen_vectors(&bc, &char_data(&bc).unwrap()).unwrap();
    assert_eq!(vd.alpha, [c(0.0), c(1.0)]);
    assert!(close(vd.beta[0], c(PI), 1e-15) && vd.beta[1] == c(0.0));
    assert!(close(vd.delta.unwrap(), c(-PI), 1e-14));
}

#[test]
fn periodic_vectors_are_the_unit_basis() {
    let bc = CanonicalBc::real(-1.0, 0.0, 0.0, -1.0).unwrap();
    let vd = eigen_vectors(&bc, &char_data(&bc).unwrap()).unwrap();
    assert_eq!(vd.alpha, [c(1.0), c(0.0)]);
    assert_eq!(vd.beta, [c(0.0), c(1.0)]);
    assert_eq!(vd.alpha_prime, Some([c(1.0), c(0.0)]));
    assert_eq!(vd.beta_prime, Some([c(0.0), c(1.0)]));
}

#[test]
fn jordan_chain_vectors() {
    for (b, a, d, cc) in [(1.0, 0.0, 1.0, 1.0), (1.0, 1.0, 0.0, 1.0), (3.0, 1.0, -1.0, 1.0), (2.0, 0.0, -0.5, 2.0)] {
        let bc = CanonicalBc::real(b, a, d, cc).unwrap();
        let cd = char_data(&bc).unwrap();
        let z = match cd.roots {
            Roots::Double(z) => z,
            Roots::Distinct(..) => panic!("expected a double root"),
        };
        let vd = eigen_vectors(&bc, &cd).unwrap();
        let m = bc.matrix();
        for i in 0..2 {
            let lhs_a = m[i][0] * vd.alpha[0] + m[i][1] * vd.alpha[1] + z * vd.alpha[i];
            let lhs_b = m[i][0] * vd.beta[0] + m[i][1] * vd.beta[1] + z * vd.beta[i];
            assert!(lhs_a.norm() < 1e-12);
            assert!((lhs_b - PI * bc.b() * vd.alpha[i]).norm() < 1e-12);
        }
        assert!(vd.delta.unwrap().norm() > 1e-8);
    }
}

#[test]
fn antiperiodic_tau_is_one() {
    let bc = CanonicalBc::real(1.0, 0.0, 0.0, 1.0).unwrap();
    assert_eq!(char_data(&bc).unwrap().taus, Taus::Single(c(1.0)));
}

fn cplx(range: f64) -> impl Strategy<Value = C64> {
    (-range..range, -range..range).prop_map(|(re, im)| C64::new(re, im))
}

fn regular_bc() -> impl Strategy<Value = CanonicalBc> {
    (cplx(3.0), cplx(3.0), cplx(3.0), cplx(3.0))
        .prop_filter_map("regular", |(b, a, d, cc)| CanonicalBc::new(b, a, d, cc).ok().filter(|bc| bc.det().norm() > 1e-3))
}

fn invertible() -> impl Strategy<Value = [[C64; 2]; 2]> {
    (cplx(2.0), cplx(2.0), cplx(2.0), cplx(2.0))
        .prop_filter("invertible", |(p, q, r, s)| (*p * *s - *q * *r).norm() > 0.1)
        .prop_map(|(p, q, r, s)| [[p, q], [r, s]])
}

fn raw_from(bc: &CanonicalBc) -> RawBc {
    let one = c(1.0);
    let zero = c(0.0);
    RawBc::new([[one, bc.b(), bc.a(), zero], [zero, bc.d(), bc.c(), one]]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalization_ignores_row_operations(bc in regular_bc(), g in invertible()) {
        let raw = raw_from(&bc);
        let base = normalize_bc(&raw).unwrap();
        let moved = normalize_bc(&raw.left_mul(g)).unwrap();
        for (x, y) in [(base.b(), moved.b()), (base.a(), moved.a()), (base.d(), moved.d()), (base.c(), moved.c())] {
            prop_assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn roots_and_taus_have_small_residuals(bc in regular_bc()) {
        let cd = char_data(&bc).unwrap();
        let (roots, taus) = match (cd.roots, cd.taus) {
            (Roots::Distinct(a, b), Taus::Pair(s, t)) => (vec![a, b], vec![s, t]),
            (Roots::Double(z), Taus::Single(t)) => (vec![z], vec![t]),
            _ => unreachable!(),
        };
        for (z, t) in roots.iter().zip(&taus) {
            prop_assert!(quadratic(&bc, *z).norm() < 1e-12);
            prop_assert!(((C64::i() * PI * t).exp() - z).norm() < 1e-12);
        }
        prop_assert!(taus[0].re.abs() <= 1.0);
        if taus.len() == 2 {
            prop_assert!((taus[0].re - taus[1].re).abs() <= 1.0 + 1e-15);
            prop_assert!(cd.rho.unwrap() > 0.0);
        }
    }

    #[test]
    fn minus_root_is_a_matrix_eigenvalue(bc in regular_bc()) {
        let m = bc.matrix();
        for z in roots_of(&bc) {
            let det = (m[0][0] + z) * (m[1][1] + z) - m[0][1] * m[1][0];
            prop_assert!(det.norm() < 1e-12);
        }
    }

    #[test]
    fn adjoint_roots_are_reciprocal_conjugates(bc in regular_bc()) {
        let adj = adjoint_bc(&bc);
        let want: Vec<C64> = roots_of(&bc).iter().map(|z| 1.0 / z.conj()).collect();
        prop_assert!(same_pair(&roots_of(&adj), &want) < 1e-10);
    }

    #[test]
    fn adjoint_is_an_involution(bc in regular_bc()) {
        let back = adjoint_bc(&adjoint_bc(&bc));
        prop_assert!((back.b() - bc.b()).norm() < 1e-12 && (back.c() - bc.c()).norm() < 1e-12);
        prop_assert!((back.a() - bc.a()).norm() < 1e-12 && (back.d() - bc.d()).norm() < 1e-12);
    }

    #[test]
    fn dirichlet_type_survives_adjoint(b in cplx(3.0), a in cplx(3.0), d in cplx(3.0)) {
        if let Ok(bc) = CanonicalBc::new(b, a, d, -b) {
            if matches!(classify(&bc), BcClass::StrictlyRegular { .. }) {
                prop_assert_eq!(classify(&adjoint_bc(&bc)), BcClass::StrictlyRegular { dirichlet_type: true });
            }
        }
    }

    #[test]
    fn strict_eigenvectors_are_kernel_vectors(bc in regular_bc()) {
        let cd = char_data(&bc).unwrap();
        if let (Roots::Distinct(z1, z2), Ok(vd)) = (cd.roots, eigen_vectors(&bc, &cd)) {
            let m = bc.matrix();
            for (z, v) in [(z1, vd.alpha), (z2, vd.beta)] {
                for i in 0..2 {
                    prop_assert!((m[i][0] * v[0] + m[i][1] * v[1] + z * v[i]).norm() < 1e-11);
                }
                prop_assert!(v.iter().any(|x| (x - c(1.0)).norm() < 1e-15));
            }
            let (ap, bp) = (vd.alpha_prime.unwrap(), vd.beta_prime.unwrap());
            prop_assert!((ap[0] * vd.alpha[0] + ap[1] * vd.alpha[1] - 1.0).norm() < 1e-12);
            prop_assert!((bp[0] * vd.alpha[0] + bp[1] * vd.alpha[1]).norm() < 1e-12);
            prop_assert!((bp[0] * vd.beta[0] + bp[1] * vd.beta[1] - 1.0).norm() < 1e-12);
        }
    }
}
