//! Verification suites for convolution, multiplication and composition
//! inequalities on the phase-space grid, with deterministic seeded inputs and
//! JSON/CSV reports.

mod bounds;
mod checks;
mod dilated;
pub mod inputs;
mod kernel;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::orlicz::luxemburg_abs;
use crate::phasegrid::{make_grid, GridSpec, PhaseSymbol};
use crate::schatten::{quantize, schatten_orlicz_norm, singular_values, SingularSpectrum};
use crate::weyl::QuantizationIndex;
use crate::young::{Gauge, YoungFunction};

pub use bounds::{
    suite_bandlimited, suite_conv1, suite_conv2, suite_conv_schatt_exp, suite_toeplitz, ConvTriple, CONV_TRIPLES,
};
pub use checks::{
    suite_holder, suite_implications, suite_invariances, suite_moyal, suite_orlicz, suite_rank_one, suite_s2,
};
pub use dilated::{
    gaussian_rank_one_pairing, multiplication_cross_route, suite_dilated_conv, suite_dilated_mult, suite_rank_one_sums,
    MULTI_QUADRUPLES,
};
pub use inputs::{digest, random_test_inputs, InputKind, SplitMix64, TestInput};
pub use kernel::{
    chart_integral_kernel, direct_kernel, gaussian_weyl_kernel, kernel_identity_error, kernel_identity_error_multi,
    suite_kernel_identities,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawMode {
    Convolution,
    Multiplication,
}

/// Dilation parameters `t_j` with signs `m_j`; convolution needs
/// `sum m_j t_j^{-2} = 1`, multiplication needs `sum m_j t_j^2 = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationLaw {
    pub t: Vec<f64>,
    pub m: Vec<i8>,
    pub mode: LawMode,
}

const LAW_TOL: f64 = 1e-12;

impl DilationLaw {
    pub fn new(t: Vec<f64>, m: Vec<i8>, mode: LawMode) -> Result<Self> {
        if t.len() != m.len() || t.len() < 2 {
            return Err(Error::Precondition("need matching t and m with at least two entries".into()));
        }
        if t.iter().any(|&v| v == 0.0 || !v.is_finite()) || m.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Domain("t must be finite and nonzero, m must be +1 or -1".into()));
        }
        let law = Self { t, m, mode };
        let r = law.residual();
        if r.abs() > LAW_TOL {
            return Err(Error::Domain(format!("dilation law violated: sum differs from 1 by {r:.3e}")));
        }
        Ok(law)
    }

    /// `sum m_j t_j^{-2} - 1` or `sum m_j t_j^2 - 1`.
    pub fn residual(&self) -> f64 {
        let e = match self.mode {
            LawMode::Convolution => -2,
            LawMode::Multiplication => 2,
        };
        self.t.iter().zip(&self.m).map(|(&t, &m)| m as f64 * t.powi(e)).sum::<f64>() - 1.0
    }

    pub fn bilinear_convolution() -> Self {
        Self::new(vec![0.5f64.sqrt(), 1.0], vec![1, -1], LawMode::Convolution).unwrap()
    }

    pub fn trilinear_convolution() -> Self {
        Self::new(vec![2.0, 2.0, 2f64.sqrt()], vec![1, 1, 1], LawMode::Convolution).unwrap()
    }

    pub fn bilinear_multiplication() -> Self {
        Self::new(vec![0.5f64.sqrt(), 0.5f64.sqrt()], vec![1, 1], LawMode::Multiplication).unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Identity-type checks.
    pub identity: f64,
    /// Slack on inequality ratios.
    pub ratio: f64,
    /// Interpolation-route identities with two factors.
    pub interpolation: f64,
    /// Interpolation-route identities with three factors.
    pub interpolation_multi: f64,
    /// Agreement of independent routes to the same quantity.
    pub cross_route: f64,
    /// Negative eigenvalues tolerated relative to the operator norm.
    pub psd: f64,
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [self.identity, self.ratio, self.interpolation, self.interpolation_multi, self.cross_route, self.psd];
        if all.iter().all(|t| t.is_finite() && *t >= 0.0) {
            Ok(())
        } else {
            Err(Error::Domain(format!("tolerances must be finite and nonnegative: {self:?}")))
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-8,
            ratio: 1e-6,
            interpolation: 1e-4,
            interpolation_multi: 1e-3,
            cross_route: 1e-5,
            psd: 1e-8,
        }
    }
}

pub const DEFAULT_CATALOG: [&str; 6] = ["p:1", "p:1.5", "p:2", "p:4", "pinf", "exp"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub suite_id: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    pub cases: usize,
    pub young_catalog: Vec<String>,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law: Option<DilationLaw>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suite_id: String::new(),
            n: 128,
            seed: 42,
            cases: 50,
            young_catalog: DEFAULT_CATALOG.iter().map(|s| s.to_string()).collect(),
            tolerances: Tolerances::default(),
            law: None,
        }
    }
}

impl SuiteConfig {
    pub fn new(suite_id: &str, n: usize, seed: u64, cases: usize) -> Self {
        Self { suite_id: suite_id.to_string(), n, seed, cases, ..Self::default() }
    }

    pub fn grid(&self) -> Result<GridSpec> {
        make_grid(self.n)
    }

    pub fn catalog(&self) -> Result<Vec<YoungFunction>> {
        self.young_catalog.iter().map(|s| s.parse()).collect()
    }

    /// Lebesgue exponents present in the catalog.
    fn catalog_exponents(&self) -> Result<Vec<f64>> {
        Ok(self.catalog()?.iter().filter_map(|p| p.lebesgue_exponent()).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub id: String,
    pub inputs_digest: String,
    pub lhs: f64,
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
    pub diagnostics: BTreeMap<String, Value>,
}

impl CaseResult {
    /// `lhs <= bound` up to a relative slack `tol` on the ratio.
    pub fn inequality(id: String, inputs_digest: String, lhs: f64, bound: f64, tol: f64) -> Self {
        let ratio = ratio(lhs, bound);
        Self { id, inputs_digest, lhs, bound, ratio, pass: ratio <= 1.0 + tol, diagnostics: BTreeMap::new() }
    }

    /// An identity with error `err` that must stay below `tol`.
    pub fn identity(id: String, inputs_digest: String, err: f64, tol: f64) -> Self {
        let ratio = ratio(err, tol);
        Self { id, inputs_digest, lhs: err, bound: tol, ratio, pass: ratio <= 1.0, diagnostics: BTreeMap::new() }
    }

    pub fn skipped(id: String, inputs_digest: String, reason: String) -> Self {
        let mut diagnostics = BTreeMap::new();
        diagnostics.insert("skipped".to_string(), Value::String(reason));
        Self { id, inputs_digest, lhs: 0.0, bound: 0.0, ratio: 0.0, pass: true, diagnostics }
    }

    pub fn is_skipped(&self) -> bool {
        self.diagnostics.contains_key("skipped")
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.diagnostics.insert(key.to_string(), value.into());
        self
    }
}

fn ratio(lhs: f64, bound: f64) -> f64 {
    if lhs == 0.0 && bound == 0.0 {
        0.0
    } else if bound == 0.0 {
        f64::INFINITY
    } else {
        lhs / bound
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub skipped: usize,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: SuiteConfig,
    pub cases: Vec<CaseResult>,
    pub summary: Summary,
    pub timestamp: String,
}

impl SuiteReport {
    pub fn new(config: SuiteConfig, cases: Vec<CaseResult>) -> Self {
        let summary = Summary {
            total: cases.len(),
            passed: cases.iter().filter(|c| c.pass).count(),
            skipped: cases.iter().filter(|c| c.is_skipped()).count(),
            max_ratio: cases.iter().map(|c| c.ratio).fold(0.0, f64::max),
        };
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self { suite: config.suite_id.clone(), config, cases, summary, timestamp: secs.to_string() }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }
}

type SuiteFn = fn(&SuiteConfig) -> Result<Vec<CaseResult>>;

/// Suite identifiers with a one-line description.
pub const SUITES: &[(&str, &str)] = &[
    ("conv1", "L^phi0 norm of a1 * a2 against symbol-class norms of both factors"),
    ("conv2", "symbol-class norm of a1 * a2 against s_phi1 x L^phi2"),
    ("conv_schatt_exp", "pointwise and L^1 bounds for convolved Wigner families"),
    ("dilated_conv", "bilinear dilated convolution under t1^-2 - t2^-2 = 1, with PSD preservation"),
    ("dilated_conv3", "trilinear dilated convolution under sum t_j^-2 = 1"),
    ("dilated_mult", "dilated multiplication under sum t_j^2 = 1, with the symplectic Fourier cross route"),
    ("kernel_identities", "kernel of a dilated convolution against its chart-integral form"),
    ("rank_one_sums", "partial sums of rank-one pairings of dilated Wigner convolutions"),
    ("invariances", "translation, modulation and symplectic Fourier invariance of symbol norms"),
    ("bandlimited", "symbol-class and Orlicz norms of band-limited symbols bound each other"),
    ("s2", "Hilbert-Schmidt symbol norm equals the L^2 norm"),
    ("rank_one", "Orlicz-Schatten norm of A-Wigner distributions"),
    ("moyal", "L^2 norms of Hermite cross-Wigner distributions"),
    ("holder", "Holder composition with factor 2 and the classical Lebesgue form"),
    ("young_implications", "inverse-product hypotheses imply the Young conditions"),
    ("toeplitz", "two-route Toeplitz entries, Orlicz-Schatten bound and positivity"),
    ("orlicz", "Luxemburg norms, quasi-norm triangle inequality and finite-rank bound"),
];

fn lookup(id: &str) -> Option<SuiteFn> {
    let f: SuiteFn = match id {
        "conv1" => suite_conv1,
        "conv2" => suite_conv2,
        "conv_schatt_exp" => suite_conv_schatt_exp,
        "dilated_conv" => |cfg| suite_dilated_conv(cfg, &cfg.law.clone().unwrap_or_else(DilationLaw::bilinear_convolution)),
        "dilated_conv3" => |cfg| suite_dilated_conv(cfg, &cfg.law.clone().unwrap_or_else(DilationLaw::trilinear_convolution)),
        "dilated_mult" => {
            |cfg| suite_dilated_mult(cfg, &cfg.law.clone().unwrap_or_else(DilationLaw::bilinear_multiplication))
        }
        "kernel_identities" => suite_kernel_identities,
        "rank_one_sums" => {
            |cfg| suite_rank_one_sums(cfg, &cfg.law.clone().unwrap_or_else(DilationLaw::bilinear_convolution))
        }
        "invariances" => suite_invariances,
        "bandlimited" => suite_bandlimited,
        "s2" => suite_s2,
        "rank_one" => suite_rank_one,
        "moyal" => suite_moyal,
        "holder" => suite_holder,
        "young_implications" => suite_implications,
        "toeplitz" => suite_toeplitz,
        "orlicz" => suite_orlicz,
        _ => return None,
    };
    Some(f)
}

pub fn is_known_suite(id: &str) -> bool {
    lookup(id).is_some()
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let f = lookup(&cfg.suite_id).ok_or_else(|| {
        let known: Vec<&str> = SUITES.iter().map(|s| s.0).collect();
        Error::Unsupported(format!("unknown suite '{}'; known suites: {}", cfg.suite_id, known.join(", ")))
    })?;
    cfg.tolerances.validate()?;
    Ok(SuiteReport::new(cfg.clone(), f(cfg)?))
}

/// CSV with one row per case: id, inputs_digest, lhs, bound, ratio, pass, diagnostics (JSON).
pub fn report_rows(report: &SuiteReport) -> Vec<[String; 7]> {
    report
        .cases
        .iter()
        .map(|c| {
            [
                c.id.clone(),
                c.inputs_digest.clone(),
                format!("{:e}", c.lhs),
                format!("{:e}", c.bound),
                format!("{:e}", c.ratio),
                c.pass.to_string(),
                serde_json::to_string(&c.diagnostics).unwrap_or_default(),
            ]
        })
        .collect()
}

pub const CSV_HEADER: [&str; 7] = ["id", "inputs_digest", "lhs", "bound", "ratio", "pass", "diagnostics"];

/// Runs `f` for every case index on the worker pool, keeping case order.
pub(crate) fn par_cases<F>(cases: usize, f: F) -> Result<Vec<CaseResult>>
where
    F: Fn(usize) -> Result<Vec<CaseResult>> + Sync + Send,
{
    let rows: Result<Vec<Vec<CaseResult>>> = (0..cases).into_par_iter().map(f).collect();
    Ok(rows?.into_iter().flatten().collect())
}

pub(crate) fn spectrum(a: &PhaseSymbol, index: QuantizationIndex) -> Result<SingularSpectrum> {
    Ok(singular_values(&quantize(a, index)?))
}

/// `(2 pi)^{1/2} ||sigma||_{l^phi}`: the symbol-class norm from a precomputed spectrum.
pub(crate) fn s_norm(spec: &SingularSpectrum, phi: &dyn Gauge) -> f64 {
    (2.0 * PI).sqrt() * schatten_orlicz_norm(spec, phi)
}

/// Quadrature Orlicz norm with weights `h^2`.
pub(crate) fn l_norm(a: &PhaseSymbol, phi: &dyn Gauge) -> f64 {
    let w = vec![a.quadrature_weight(); a.values.len()];
    luxemburg_abs(&a.abs_values(), Some(&w), phi)
}

pub(crate) fn lebesgue(p: f64) -> YoungFunction {
    YoungFunction::lebesgue(p).expect("exponent at least 1")
}

pub(crate) fn fmt_exp(p: f64) -> String {
    if p.is_infinite() {
        "inf".to_string()
    } else {
        format!("{p}")
    }
}

/// Case identifier that sorts in generation order.
pub(crate) fn case_id(index: usize, label: &str) -> String {
    format!("{index:04}:{label}")
}
