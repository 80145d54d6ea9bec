use std::f64::consts::PI;

use dirac_spectra::free_basis::BasisFamily;
use dirac_spectra::linalg::{self, CMat};
use dirac_spectra::localization::{make_plan, LocalizationPlan, PlanOptions};
use dirac_spectra::potential_rep::{build_w_table, PotentialSpec};
use dirac_spectra::resolvent_proj::{
    bari_markus_sums, captured_identity, disc_projections, k_matrix, resolvent_apply, series_resolvent,
    series_terms_for, Contour, ProjectionEngine, ProjectionError, QuadratureOptions, TruncatedOperator,
};
use dirac_spectra::testbed::{demo_potential, random_potential, NamedBc};
use dirac_spectra::C64;
use ndarray::Array2;
use proptest::prelude::*;

const I: C64 = C64 { re: 0.0, im: 1.0 };

struct Case {
    fam: BasisFamily,
    op: TruncatedOperator,
    plan: LocalizationPlan,
}

fn case(bc: NamedBc, v: &PotentialSpec, m: i64) -> Case {
    let fam = BasisFamily::new(bc.canonical()).unwrap();
    let wt = build_w_table(&fam, v, m).unwrap();
    let plan = make_plan(&fam, &wt, PlanOptions::default()).unwrap();
    let op = TruncatedOperator::assemble(&fam, &wt, m);
    Case { fam, op, plan }
}

fn eye(n: usize) -> CMat {
    Array2::eye(n)
}

/// `(1/2πi)∮ R(λ) dλ` by the plain trapezoid rule with dense inverses.
fn trapezoid_projection(op: &TruncatedOperator, center: C64, radius: f64, q: usize) -> CMat {
    let mut acc = Array2::zeros((op.dim(), op.dim()));
    for j in 0..q {
        let e = C64::from_polar(1.0, 2.0 * PI * j as f64 / q as f64);
        let r = resolvent_apply(op, center + radius * e).unwrap();
        acc = acc + r * (radius * e / q as f64);
    }
    acc
}

#[test]
fn free_strict_resolvent_is_diagonal() {
    for bc in [NamedBc::Dirichlet, NamedBc::Strict] {
        let fam = BasisFamily::new(bc.canonical()).unwrap();
        let op = TruncatedOperator::free(&fam, 16);
        let r = resolvent_apply(&op, I).unwrap();
        for i in 0..op.dim() {
            for j in 0..op.dim() {
                let (mu, k) = op.tr.entry(i);
                let want = if i == j { 1.0 / (I - fam.lambda0(mu, k)) } else { C64::new(0.0, 0.0) };
                assert!((r[[i, j]] - want).norm() < 1e-14);
            }
        }
    }
}

#[test]
fn free_jordan_resolvent_has_the_nilpotent_term() {
    let fam = BasisFamily::new(NamedBc::CaseI.canonical()).unwrap();
    let op = TruncatedOperator::free(&fam, 8);
    let lam = C64::new(0.3, 0.7);
    let r = resolvent_apply(&op, lam).unwrap();
    for k in op.tr.ks() {
        let (i0, i1) = (op.tr.index(0, k), op.tr.index(1, k));
        let d = lam - fam.lambda0(0, k);
        assert!((r[[i1, i1]] - 1.0 / d).norm() < 1e-13);
        assert!((r[[i0, i0]] - 1.0 / d).norm() < 1e-13);
        assert!((r[[i0, i1]] + I / (d * d)).norm() < 1e-13);
        assert!(r[[i1, i0]].norm() < 1e-15);
    }
}

#[test]
fn k_squares_to_the_free_resolvent() {
    for bc in NamedBc::ALL {
        let fam = BasisFamily::new(bc.canonical()).unwrap();
        let op = TruncatedOperator::free(&fam, 8);
        let lam = C64::new(-0.4, 1.3);
        let k = k_matrix(&op, lam);
        let diff = &k.dot(&k) - &resolvent_apply(&op, lam).unwrap();
        assert!(linalg::frobenius(&diff) < 1e-13, "{}", bc.name());
        let s = series_resolvent(&op, lam, 0).unwrap();
        assert!(linalg::frobenius(&(&s.matrix - &k.dot(&k))) == 0.0);
    }
}

#[test]
fn resolvent_identity() {
    let c = case(NamedBc::Dirichlet, &demo_potential(), 16);
    let pairs = [(C64::new(0.5, 0.3), C64::new(-2.5, 1.0)), (C64::new(3.4, -0.2), C64::new(1.5, 2.0))];
    for (a, b) in pairs {
        let ra = resolvent_apply(&c.op, a).unwrap();
        let rb = resolvent_apply(&c.op, b).unwrap();
        let diff = &(&ra - &rb) - &(ra.dot(&rb) * (b - a));
        assert!(linalg::frobenius(&diff) < 1e-8);
    }
}

#[test]
fn resolvent_is_a_two_sided_inverse() {
    let c = case(NamedBc::Periodic, &random_potential(), 16);
    let lam = C64::new(1.0, 0.5);
    let r = resolvent_apply(&c.op, lam).unwrap();
    let shifted = Array2::from_diag_elem(c.op.dim(), lam) - &c.op.a;
    assert!(linalg::frobenius(&(shifted.dot(&r) - eye(c.op.dim()))) < 1e-12);
}

#[test]
fn near_spectrum_is_rejected() {
    let fam = BasisFamily::new(NamedBc::Periodic.canonical()).unwrap();
    let op = TruncatedOperator::free(&fam, 8);
    let res = resolvent_apply(&op, C64::new(2.0 + 1e-14, 0.0));
    assert!(matches!(res, Err(ProjectionError::NearSingular { .. })));
}

#[test]
fn series_matches_dense_inversion_between_discs() {
    for bc in [NamedBc::Periodic, NamedBc::Antiperiodic, NamedBc::Dirichlet] {
        let c = case(bc, &demo_potential(), 32);
        for n in [9, 11, 13] {
            let lam = C64::new(c.fam.lambda0(0, n - 1).re + 1.0, 0.5);
            let s = series_terms_for(&c.op, lam, 1e-12).unwrap();
            let series = series_resolvent(&c.op, lam, s).unwrap();
            assert!(series.q < 1.0);
            let dense = resolvent_apply(&c.op, lam).unwrap();
            let diff = linalg::frobenius(&(&series.matrix - &dense));
            assert!(diff < 1e-8, "{} n={n}: {diff:e}", bc.name());
        }
    }
}

#[test]
fn hilbert_schmidt_norm_two_ways() {
    for bc in [NamedBc::Periodic, NamedBc::Dirichlet, NamedBc::Strict] {
        let fam = BasisFamily::new(bc.canonical()).unwrap();
        let wt = build_w_table(&fam, &demo_potential(), 16).unwrap();
        let op = TruncatedOperator::assemble(&fam, &wt, 16);
        let lam = C64::new(4.0, 2.0);
        let s = series_resolvent(&op, lam, 0).unwrap();
        assert!((s.q - s.hs_definition).abs() < 1e-10, "{}", bc.name());
    }
}

#[test]
fn large_potential_makes_the_series_inadmissible() {
    let fam = BasisFamily::new(NamedBc::Periodic.canonical()).unwrap();
    let wt = build_w_table(&fam, &demo_potential().scaled(50.0), 16).unwrap();
    let op = TruncatedOperator::assemble(&fam, &wt, 16);
    assert!(matches!(series_resolvent(&op, C64::new(0.1, 0.1), 3), Err(ProjectionError::SeriesInadmissible { .. })));
}

#[test]
fn free_disc_projection_is_a_coordinate_projection() {
    for bc in NamedBc::ALL {
        let fam = BasisFamily::new(bc.canonical()).unwrap();
        let op = TruncatedOperator::free(&fam, 16);
        let engine = ProjectionEngine::new(&op, QuadratureOptions::default()).unwrap();
        let center = fam.lambda0(0, 4);
        let radius = fam.cd.rho.unwrap_or(0.25);
        let p = engine.project(Contour::Disc { center, radius }).unwrap();
        let want_rank = if fam.is_strict() { 1 } else { 2 };
        assert_eq!(p.rank(), want_rank);
        assert_eq!(p.trace_defect(), 0.0);
        let oracle = trapezoid_projection(&op, center, radius, 64);
        assert!(linalg::frobenius(&(&oracle - &p.coords)) < 1e-12, "{}", bc.name());
        let i0 = op.tr.index(0, 4);
        assert_eq!(p.coords[[i0, i0]], C64::new(1.0, 0.0));
    }
}

#[test]
fn free_rectangle_counts_the_enclosed_block() {
    for bc in NamedBc::ALL {
        let fam = BasisFamily::new(bc.canonical()).unwrap();
        let wt = build_w_table(&fam, &PotentialSpec::zero(), 32).unwrap();
        let plan = make_plan(&fam, &wt, PlanOptions::default()).unwrap();
        let engine = ProjectionEngine::new(&TruncatedOperator::free(&fam, 32), QuadratureOptions::default()).unwrap();
        let p = engine.project(plan.rect.into()).unwrap();
        assert_eq!(p.rank(), plan.free_rect_count(&fam));
        assert_eq!(p.rank() as i64, 2 * plan.n + 2, "{}", bc.name());
    }
}

#[test]
fn perturbed_projection_matches_plain_trapezoid() {
    let c = case(NamedBc::Dirichlet, &demo_potential(), 16);
    let engine = ProjectionEngine::new(&c.op, QuadratureOptions::default()).unwrap();
    let d = c.plan.discs[2];
    let p = engine.project(d.into()).unwrap();
    let oracle = trapezoid_projection(&c.op, d.center, d.radius, 64);
    assert!(linalg::frobenius(&(&oracle - &p.coords)) < 1e-10);
}

#[test]
fn projection_invariants_on_demo_potentials() {
    for bc in [NamedBc::Periodic, NamedBc::Dirichlet] {
        let c = case(bc, &demo_potential(), 32);
        let engine = ProjectionEngine::new(&c.op, QuadratureOptions::default()).unwrap();
        let discs = disc_projections(&engine, &c.plan, 16).unwrap();
        let rect = engine.project(c.plan.rect.into()).unwrap();
        assert!(rect.idempotency_defect() < 1e-6 && rect.trace_defect() < 1e-6);
        let expected = if c.fam.is_strict() { 1 } else { 2 };
        for d in &discs {
            assert!(d.projection.idempotency_defect() < 1e-6);
            assert!(d.projection.trace_defect() < 1e-6);
            assert_eq!(d.projection.rank(), expected);
        }
        for (i, a) in discs.iter().enumerate() {
            for b in discs.iter().skip(i + 1).take(4) {
                assert!(linalg::frobenius(&a.projection.coords.dot(&b.projection.coords)) < 1e-6);
            }
            assert!(linalg::frobenius(&a.projection.coords.dot(&rect.coords)) < 1e-6);
        }
    }
}

#[test]
fn projections_partition_the_captured_space() {
    let c = case(NamedBc::Periodic, &demo_potential(), 32);
    let engine = ProjectionEngine::new(&c.op, QuadratureOptions::default()).unwrap();
    let discs = disc_projections(&engine, &c.plan, 16).unwrap();
    let rect = engine.project(c.plan.rect.into()).unwrap();
    let mut sum = rect.coords.clone();
    let mut contours = vec![rect.contour];
    for d in &discs {
        sum = sum + &d.projection.coords;
        contours.push(d.projection.contour);
    }
    let captured = captured_identity(&engine, &contours);
    let trace: C64 = sum.diag().iter().sum();
    assert!((trace - captured as f64).norm() < 1e-6);
    assert!(linalg::frobenius(&(sum.dot(&sum) - &sum)) < 1e-6);
}

#[test]
fn doubling_nodes_changes_little() {
    let c = case(NamedBc::Dirichlet, &demo_potential(), 32);
    let a = ProjectionEngine::new(&c.op, QuadratureOptions { disc_nodes: 64, rect_order: 32 }).unwrap();
    let b = ProjectionEngine::new(&c.op, QuadratureOptions { disc_nodes: 128, rect_order: 64 }).unwrap();
    for d in c.plan.discs.iter().take(6) {
        let pa = a.project((*d).into()).unwrap();
        let pb = b.project((*d).into()).unwrap();
        assert!(linalg::frobenius(&(&pa.coords - &pb.coords)) < 1e-8);
    }
    let ra = a.project(c.plan.rect.into()).unwrap();
    let rb = b.project(c.plan.rect.into()).unwrap();
    assert!(linalg::frobenius(&(&ra.coords - &rb.coords)) < 1e-8);
}

#[test]
fn free_bari_markus_sums_vanish() {
    for bc in NamedBc::ALL {
        let fam = BasisFamily::new(bc.canonical()).unwrap();
        let wt = build_w_table(&fam, &PotentialSpec::zero(), 32).unwrap();
        let plan = make_plan(&fam, &wt, PlanOptions::default()).unwrap();
        let op = TruncatedOperator::assemble(&fam, &wt, 32);
        let bm = bari_markus_sums(&op, &fam, &plan, 16, QuadratureOptions::default()).unwrap();
        assert!(!bm.rows.is_empty());
        assert!(bm.rows.iter().all(|r| r.hs_norm_star == 0.0 && r.running_sum == 0.0));
    }
}

#[test]
fn demo_bari_markus_rows() {
    let c = case(NamedBc::Periodic, &demo_potential(), 32);
    let bm = bari_markus_sums(&c.op, &c.fam, &c.plan, 16, QuadratureOptions::default()).unwrap();
    let mut last = 0.0;
    for r in &bm.rows {
        assert!((r.trace - 2.0).norm() < 1e-4);
        assert!(r.running_sum >= last);
        assert!((r.op_norm_estimate - r.hs_norm_star * c.plan.kappa).abs() < 1e-15);
        last = r.running_sum;
    }
    assert!(bm.total() > 0.0);
}

#[test]
fn range_and_truncation_errors() {
    let c = case(NamedBc::Periodic, &demo_potential(), 32);
    let engine = ProjectionEngine::new(&c.op, QuadratureOptions::default()).unwrap();
    assert!(matches!(disc_projections(&engine, &c.plan, 20), Err(ProjectionError::InvalidRange(_))));
    let other = ProjectionEngine::new(&TruncatedOperator::free(&c.fam, 16), QuadratureOptions::default()).unwrap();
    assert!(matches!(disc_projections(&other, &c.plan, 8), Err(ProjectionError::TruncationMismatch { .. })));
    let e = engine.eigenvalues()[0];
    let hit = Contour::Disc { center: e - 0.25, radius: 0.25 };
    assert!(matches!(engine.project(hit), Err(ProjectionError::ContourHitsSpectrum { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn resolvent_identity_random_points(ar in -8.0..8.0f64, ai in 0.2..3.0f64, br in -8.0..8.0f64, bi in -3.0..-0.2f64) {
        let fam = BasisFamily::new(NamedBc::Strict.canonical()).unwrap();
        let wt = build_w_table(&fam, &demo_potential(), 16).unwrap();
        let op = TruncatedOperator::assemble(&fam, &wt, 16);
        let (a, b) = (C64::new(ar, ai + 1.0), C64::new(br, bi - 1.0));
        let ra = resolvent_apply(&op, a).unwrap();
        let rb = resolvent_apply(&op, b).unwrap();
        let diff = &(&ra - &rb) - &(ra.dot(&rb) * (b - a));
        prop_assert!(linalg::frobenius(&diff) < 1e-8);
    }
}
