//! Operator matrices, singular spectra and Orlicz Schatten-von Neumann norms.
//!
//! An operator with kernel `K` is represented by the Nystrom matrix `M = h K`.
//! With the quadrature inner product `h sum` on the grid, `M` is unitarily
//! equivalent to the discretized integral operator, so plain matrix singular
//! values are the operator singular values. Every `(2 pi)^{1/2}` factor lives in
//! [`symbol_schatten_norm`].

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orlicz::luxemburg_abs;
use crate::phasegrid::{GridSpec, PhaseSymbol, WaveFunction, C64};
use crate::weyl::{symbol_to_kernel, OperatorKernel, QuantizationIndex};
use crate::young::{implication_checks, verify_holder_condition, ImplicationVariant, Gauge, YoungFunction};

/// Relative clamp applied to tiny singular values.
pub const SINGULAR_CLAMP: f64 = 1e-14;
const SELF_ADJOINT_TOL: f64 = 1e-8;
const PSD_TOL: f64 = 1e-8;
const HOLDER_PROBES: usize = 48;

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub grid: GridSpec,
    pub entries: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn new(grid: GridSpec, entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != grid.n || entries.ncols() != grid.n {
            return Err(Error::GridMismatch(format!(
                "matrix is {}x{}, grid has N = {}",
                entries.nrows(),
                entries.ncols(),
                grid.n
            )));
        }
        if entries.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Precondition("matrix entries must be finite".into()));
        }
        Ok(Self { grid, entries })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, entries: DMatrix::zeros(grid.n, grid.n) }
    }

    pub fn identity(grid: GridSpec) -> Self {
        Self { grid, entries: DMatrix::identity(grid.n, grid.n) }
    }

    /// The operator `v -> <v, g> f` with the quadrature inner product.
    pub fn rank_one(f: &WaveFunction, g: &WaveFunction) -> Result<Self> {
        if !f.grid.same_as(&g.grid) {
            return Err(Error::GridMismatch("rank-one factors live on different grids".into()));
        }
        let h = f.grid.h;
        let n = f.grid.n;
        let entries = DMatrix::from_fn(n, n, |j, k| f.values[j] * g.values[k].conj() * h);
        Ok(Self { grid: f.grid, entries })
    }

    pub fn apply(&self, f: &WaveFunction) -> Result<WaveFunction> {
        if !self.grid.same_as(&f.grid) {
            return Err(Error::GridMismatch("operator and function grids differ".into()));
        }
        let v = nalgebra::DVector::from_column_slice(&f.values);
        let out = &self.entries * v;
        WaveFunction::new(f.grid, out.iter().cloned().collect())
    }

    pub fn adjoint(&self) -> Self {
        Self { grid: self.grid, entries: self.entries.adjoint() }
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &OperatorMatrix) -> Result<Self> {
        check_shared(self, first)?;
        Ok(Self { grid: self.grid, entries: &self.entries * &first.entries })
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<Self> {
        check_shared(self, other)?;
        Ok(Self { grid: self.grid, entries: &self.entries + &other.entries })
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self { grid: self.grid, entries: self.entries.map(|v| v * alpha) }
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Quadrature matrix element `<M f, g>`.
    pub fn matrix_element(&self, f: &WaveFunction, g: &WaveFunction) -> Result<C64> {
        Ok(self.apply(f)?.inner(g))
    }
}

fn check_shared(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<()> {
    if a.grid.same_as(&b.grid) {
        Ok(())
    } else {
        Err(Error::GridMismatch("operators live on different grids".into()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularSpectrum {
    pub sigma: Vec<f64>,
}

impl SingularSpectrum {
    pub fn operator_norm(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn rank(&self) -> usize {
        self.sigma.iter().filter(|&&s| s > 0.0).count()
    }
}

pub fn operator_matrix(kernel: &OperatorKernel) -> OperatorMatrix {
    let h = kernel.grid.h;
    OperatorMatrix { grid: kernel.grid, entries: kernel.values.map(|v| v * h) }
}

pub fn singular_values(m: &OperatorMatrix) -> SingularSpectrum {
    let mut sigma: Vec<f64> = m.entries.clone().singular_values().iter().cloned().collect();
    sigma.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let cut = sigma.first().copied().unwrap_or(0.0) * SINGULAR_CLAMP;
    for s in sigma.iter_mut() {
        if *s < cut {
            *s = 0.0;
        }
    }
    SingularSpectrum { sigma }
}

pub fn schatten_orlicz_norm(spectrum: &SingularSpectrum, phi: &dyn Gauge) -> f64 {
    luxemburg_abs(&spectrum.sigma, None, phi)
}

/// Operator matrix of `Op_A(a)`.
pub fn quantize(a: &PhaseSymbol, index: QuantizationIndex) -> Result<OperatorMatrix> {
    Ok(operator_matrix(&symbol_to_kernel(a, index)?))
}

/// `||a||_{s_{A, phi}} = (2 pi)^{1/2} ||Op_A(a)||_{I_phi}`.
pub fn symbol_schatten_norm(a: &PhaseSymbol, index: QuantizationIndex, phi: &dyn Gauge) -> Result<f64> {
    a.tail_report().check()?;
    symbol_schatten_norm_unchecked(a, index, phi)
}

/// As [`symbol_schatten_norm`] without the boundary-mass guard.
pub fn symbol_schatten_norm_unchecked(a: &PhaseSymbol, index: QuantizationIndex, phi: &dyn Gauge) -> Result<f64> {
    let m = quantize(a, index)?;
    Ok((2.0 * PI).sqrt() * schatten_orlicz_norm(&singular_values(&m), phi))
}

/// `Tr(M2^* M1)`.
pub fn trace_pairing(m1: &OperatorMatrix, m2: &OperatorMatrix) -> Result<C64> {
    check_shared(m1, m2)?;
    Ok(m1.entries.iter().zip(m2.entries.iter()).map(|(a, b)| a * b.conj()).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl BoundRecord {
    pub fn new(lhs: f64, rhs: f64, rel_tol: f64) -> Self {
        Self { lhs, rhs, pass: lhs <= rhs * (1.0 + rel_tol) }
    }
}

/// `||M2 M1||_{phi0} <= 2 ||M1||_{phi1} ||M2||_{phi2}`, after confirming the
/// gauges satisfy `phi0(t1 t2) <= phi1(t1) + phi2(t2)` on a probe grid (or the
/// inverse-product sufficient condition when the direct probe fails).
pub fn holder_composition_check(
    m1: &OperatorMatrix,
    m2: &OperatorMatrix,
    phi0: &YoungFunction,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
) -> Result<BoundRecord> {
    check_shared(m1, m2)?;
    let direct = verify_holder_condition(phi0, phi1, phi2, 10.0, HOLDER_PROBES);
    if !direct.passed {
        let phis = [phi0.clone(), phi1.clone(), phi2.clone()];
        let report = implication_checks(&phis, 1.0, 10.0, HOLDER_PROBES, ImplicationVariant::Holder)?;
        if report.conclusion.map_or(true, |c| !c.passed) {
            return Err(Error::Precondition(format!(
                "gauges {phi0}, {phi1}, {phi2} violate the composition condition by {:.3e}",
                direct.max_violation
            )));
        }
    }
    let lhs = schatten_orlicz_norm(&singular_values(&m2.compose(m1)?), phi0);
    let rhs = 2.0 * schatten_orlicz_norm(&singular_values(m1), phi1) * schatten_orlicz_norm(&singular_values(m2), phi2);
    Ok(BoundRecord::new(lhs, rhs, 1e-9))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityRecord {
    pub min_eig_real: f64,
    pub pass: bool,
}

pub fn positivity_check(m: &OperatorMatrix) -> Result<PositivityRecord> {
    let skew = (&m.entries - m.entries.adjoint()).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let frob = m.frobenius();
    if skew > SELF_ADJOINT_TOL * frob {
        return Err(Error::Precondition(format!(
            "operator is not self-adjoint: ||M - M*|| / ||M|| = {:.3e}",
            skew / frob
        )));
    }
    let herm = (&m.entries + m.entries.adjoint()).map(|v| v * 0.5);
    let eig = herm.symmetric_eigenvalues();
    let min_eig_real = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let sigma1 = eig.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let min_eig_real = if min_eig_real.is_finite() { min_eig_real } else { 0.0 };
    Ok(PositivityRecord { min_eig_real, pass: min_eig_real >= -PSD_TOL * sigma1 })
}

/// `|| { <M f_j, g_j> }_j ||_{l^phi}` for paired families.
pub fn on_sequence_norm(m: &OperatorMatrix, fs: &[WaveFunction], gs: &[WaveFunction], phi: &dyn Gauge) -> Result<f64> {
    if fs.len() != gs.len() {
        return Err(Error::Precondition("families differ in length".into()));
    }
    let mut abs = Vec::with_capacity(fs.len());
    for (f, g) in fs.iter().zip(gs) {
        abs.push(m.matrix_element(f, g)?.norm());
    }
    Ok(luxemburg_abs(&abs, None, phi))
}
