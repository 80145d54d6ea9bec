//! JSON and CSV emission. Complex values are `[re, im]` pairs in JSON and
//! `_re`/`_im` column pairs in CSV.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::bc_algebra::{self, CanonicalBc, Roots, Taus};
use crate::config::Cx;
use crate::free_basis::BasisFamily;
use crate::localization::LocalizationPlan;
use crate::resolvent_proj::BariMarkus;
use crate::spectral_solver::{Assignment, SpectrumReport};
use crate::C64;

pub type ReportResult = Result<(), Box<dyn std::error::Error + Send + Sync>>;

/// `[re, im]` with negative zeros cleared so output is stable.
pub fn cx(z: C64) -> Cx {
    Cx([z.re + 0.0, z.im + 0.0])
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CanonicalJson {
    pub b: Cx,
    pub a: Cx,
    pub d: Cx,
    pub c: Cx,
}

impl From<&CanonicalBc> for CanonicalJson {
    fn from(bc: &CanonicalBc) -> Self {
        Self { b: cx(bc.b()), a: cx(bc.a()), d: cx(bc.d()), c: cx(bc.c()) }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassifyReport {
    pub canonical: CanonicalJson,
    pub class: &'static str,
    pub dirichlet_type: bool,
    pub roots: Vec<Cx>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub taus: Option<[Cx; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_star: Option<Cx>,
    pub rho: Option<f64>,
    pub adjoint: CanonicalJson,
}

pub fn classify_report(bc: &CanonicalBc) -> Result<ClassifyReport, bc_algebra::BcError> {
    let class = bc_algebra::classify(bc);
    let cd = bc_algebra::char_data(bc)?;
    let roots = match cd.roots {
        Roots::Distinct(a, b) => vec![cx(a), cx(b)],
        Roots::Double(a) => vec![cx(a)],
    };
    let (taus, tau_star) = match cd.taus {
        Taus::Pair(a, b) => (Some([cx(a), cx(b)]), None),
        Taus::Single(t) => (None, Some(cx(t))),
    };
    let dirichlet_type = matches!(class, bc_algebra::BcClass::StrictlyRegular { dirichlet_type: true });
    Ok(ClassifyReport {
        canonical: bc.into(),
        class: class.label(),
        dirichlet_type,
        roots,
        taus,
        tau_star,
        rho: cd.rho,
        adjoint: (&bc_algebra::adjoint_bc(bc)).into(),
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DiscJson {
    pub m: i64,
    pub branch: Option<usize>,
    pub center: Cx,
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PlanJson {
    #[serde(rename = "N")]
    pub n: i64,
    #[serde(rename = "T")]
    pub t: f64,
    pub t_formula: f64,
    pub rho: f64,
    #[serde(rename = "M")]
    pub m: i64,
    pub n_certificate: Option<i64>,
    pub norm_a: f64,
    pub norm_a_inv: f64,
    pub kappa: f64,
    pub threshold: f64,
    pub worst_boundary_value: f64,
    pub rect: RectJson,
    pub discs: Vec<DiscJson>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RectJson {
    pub center: f64,
    pub half_width: f64,
    pub half_height: f64,
}

impl From<&LocalizationPlan> for PlanJson {
    fn from(p: &LocalizationPlan) -> Self {
        Self {
            n: p.n,
            t: p.t,
            t_formula: p.t_formula,
            rho: p.rho,
            m: p.m,
            n_certificate: p.n_certificate,
            norm_a: p.riesz.norm_a,
            norm_a_inv: p.riesz.norm_a_inv,
            kappa: p.kappa,
            threshold: p.threshold,
            worst_boundary_value: p.worst_boundary_value,
            rect: RectJson { center: p.rect.center_re + 0.0, half_width: p.rect.half_width, half_height: p.rect.half_height },
            discs: p
                .discs
                .iter()
                .map(|d| DiscJson { m: d.m, branch: d.branch, center: cx(d.center), radius: d.radius })
                .collect(),
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> ReportResult {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> ReportResult {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRow {
    pub re: f64,
    pub im: f64,
    pub region: &'static str,
    pub n: Option<i64>,
    pub branch: Option<usize>,
}

pub fn spectrum_rows(report: &SpectrumReport) -> Vec<SpectrumRow> {
    report
        .eigenvalues
        .iter()
        .map(|e| {
            let (region, n, branch) = match e.assignment {
                Assignment::Disc { n, branch } => ("disc", Some(n), branch),
                Assignment::Rectangle => ("rectangle", None, None),
                Assignment::Unassigned => ("unassigned", None, None),
                Assignment::OuterBand => ("outer-band", None, None),
            };
            SpectrumRow { re: e.value.re + 0.0, im: e.value.im + 0.0, region, n, branch }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DeviationCsvRow {
    pub n: i64,
    pub branch: usize,
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub delta_re: f64,
    pub delta_im: f64,
    pub kappa: Option<f64>,
    pub count: usize,
    pub running_sum: f64,
}

pub fn deviation_rows(report: &SpectrumReport) -> Vec<DeviationCsvRow> {
    report
        .deviations
        .iter()
        .map(|d| DeviationCsvRow {
            n: d.n,
            branch: d.branch,
            lambda_re: d.lambda.re + 0.0,
            lambda_im: d.lambda.im + 0.0,
            delta_re: d.delta.re + 0.0,
            delta_im: d.delta.im + 0.0,
            kappa: d.kappa,
            count: d.count,
            running_sum: d.running_sum,
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct BariMarkusCsvRow {
    pub n: i64,
    pub branch: Option<usize>,
    pub trace_re: f64,
    pub trace_im: f64,
    pub hs_norm_star: f64,
    pub op_norm_estimate: f64,
    pub running_sum: f64,
}

pub fn bari_markus_rows(bm: &BariMarkus) -> Vec<BariMarkusCsvRow> {
    bm.rows
        .iter()
        .map(|r| BariMarkusCsvRow {
            n: r.n,
            branch: r.branch,
            trace_re: r.trace.re + 0.0,
            trace_im: r.trace.im + 0.0,
            hs_norm_star: r.hs_norm_star,
            op_norm_estimate: r.op_norm_estimate,
            running_sum: r.running_sum,
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionRow {
    pub n_max: i64,
    pub l2_error: f64,
    pub tail_energy: f64,
    pub ordering_spread: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointwiseRow {
    pub x: f64,
    pub sum_f_re: f64,
    pub sum_f_im: f64,
    pub sum_g_re: f64,
    pub sum_g_im: f64,
    pub limit_f_re: f64,
    pub limit_f_im: f64,
    pub limit_g_re: f64,
    pub limit_g_im: f64,
    pub error: f64,
}

impl PointwiseRow {
    pub fn new(x: f64, sum: [C64; 2], limit: [C64; 2]) -> Self {
        let error = ((sum[0] - limit[0]).norm_sqr() + (sum[1] - limit[1]).norm_sqr()).sqrt();
        Self {
            x,
            sum_f_re: sum[0].re + 0.0,
            sum_f_im: sum[0].im + 0.0,
            sum_g_re: sum[1].re + 0.0,
            sum_g_im: sum[1].im + 0.0,
            limit_f_re: limit[0].re + 0.0,
            limit_f_im: limit[0].im + 0.0,
            limit_g_re: limit[1].re + 0.0,
            limit_g_im: limit[1].im + 0.0,
            error,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub struct EquiconvergenceRow {
    #[serde(rename = "N")]
    pub n: i64,
    pub gap: f64,
}

/// Dump of `φ^μ_k` and `φ̃^μ_k` at the given points, for plotting.
#[derive(Debug, Clone, Serialize)]
pub struct BasisSampleRow {
    pub branch: usize,
    pub k: i64,
    pub x: f64,
    pub phi1_re: f64,
    pub phi1_im: f64,
    pub phi2_re: f64,
    pub phi2_im: f64,
    pub dual1_re: f64,
    pub dual1_im: f64,
    pub dual2_re: f64,
    pub dual2_im: f64,
}

pub fn basis_samples(fam: &BasisFamily, ks: &[i64], xs: &[f64]) -> Vec<BasisSampleRow> {
    let mut rows = Vec::new();
    for &k in ks {
        for branch in 0..2 {
            for &x in xs {
                let p = fam.eval_phi(branch, k, x);
                let q = fam.eval_phi_tilde(branch, k, x);
                rows.push(BasisSampleRow {
                    branch,
                    k,
                    x,
                    phi1_re: p[0].re,
                    phi1_im: p[0].im,
                    phi2_re: p[1].re,
                    phi2_im: p[1].im,
                    dual1_re: q[0].re,
                    dual1_im: q[0].im,
                    dual2_re: q[1].re,
                    dual2_im: q[1].im,
                });
            }
        }
    }
    rows
}
