//! Toeplitz (localization) operators `Tp_{phi1, phi2}(a)` by two routes:
//! quantizing the convolution `a * u` with a Wigner window, and pairing the
//! dilated symbol `a(2 .)` directly against cross-Wigner distributions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orlicz::luxemburg_abs;
use crate::phasegrid::{convolve, dilate, PhaseSymbol, WaveFunction, C64};
use crate::schatten::{quantize, schatten_orlicz_norm, singular_values, OperatorMatrix};
use crate::weyl::{wigner, QuantizationIndex};
use crate::young::{delta2_constant, verify_tri_condition, ConditionReport, TriYoungCondition, YoungFunction};

/// Boundary-mass threshold for the integrand of the direct pairing.
pub const DIRECT_TAIL_THRESHOLD: f64 = 1e-12;
const BOUND_REL_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct WindowPair {
    pub phi1: WaveFunction,
    pub phi2: WaveFunction,
}

impl WindowPair {
    pub fn new(phi1: WaveFunction, phi2: WaveFunction) -> Result<Self> {
        if !phi1.grid.same_as(&phi2.grid) {
            return Err(Error::GridMismatch("windows live on different grids".into()));
        }
        phi1.tail_report().check()?;
        phi2.tail_report().check()?;
        Ok(Self { phi1, phi2 })
    }

    pub fn symmetric(phi: WaveFunction) -> Result<Self> {
        Self::new(phi.clone(), phi)
    }
}

/// `u(X) = (2 pi)^{-1/2} W^A_{phi2, phi1}(-X)`.
pub fn convolution_window(w: &WindowPair, index: QuantizationIndex) -> Result<PhaseSymbol> {
    Ok(wigner(&w.phi2, &w.phi1, index)?.parity().scale(C64::new((2.0 * PI).powf(-0.5), 0.0)))
}

/// `Tp_{phi1, phi2}(a) = Op_A(a * u)`.
///
/// Only the windows are tail checked: `u` decays, so `a * u` is accurate on
/// the part of the window where `u` does, even for symbols such as `a = 1`
/// that fill the grid.
pub fn toeplitz_via_convolution(a: &PhaseSymbol, w: &WindowPair, index: QuantizationIndex) -> Result<OperatorMatrix> {
    if !a.grid.same_as(&w.phi1.grid) {
        return Err(Error::GridMismatch("symbol and windows live on different grids".into()));
    }
    let u = convolution_window(w, index)?;
    quantize(&convolve(a, &u)?, index)
}

/// `(a(2 .) W_{f1, phi1}, W_{f2, phi2})` by quadrature, with Weyl Wigner distributions.
pub fn toeplitz_direct_entry(a: &PhaseSymbol, w: &WindowPair, f1: &WaveFunction, f2: &WaveFunction) -> Result<C64> {
    f1.tail_report().check()?;
    f2.tail_report().check()?;
    let a2 = dilate(a, 2.0)?;
    let w1 = wigner(f1, &w.phi1, QuantizationIndex::WEYL)?;
    let w2 = wigner(f2, &w.phi2, QuantizationIndex::WEYL)?;
    let integrand = PhaseSymbol {
        grid: a.grid,
        values: a2.values.zip_map(&w1.values, |x, y| x * y).component_mul(&w2.values.map(|v| v.conj())),
    };
    integrand.tail_report_with(DIRECT_TAIL_THRESHOLD).check()?;
    Ok(a2.values.iter().zip(w1.values.iter()).zip(w2.values.iter()).map(|((x, y), z)| x * y * z.conj()).sum::<C64>()
        * (a.grid.h * a.grid.h))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToeplitzBound {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    /// `C` in `lhs <= C ||a||_{L^phi} ||phi1|| ||phi2||`.
    pub constant: f64,
    /// Weights `(c0, c1, c2)` of the Young condition behind `C`.
    pub weights: [f64; 3],
    pub symbol_norm: f64,
    pub condition: ConditionReport,
}

/// Orlicz-Schatten bound for the Weyl-quantized Toeplitz operator.
///
/// The constant comes from convolving `a` in `L^phi` with `u` in `s_1` into
/// `s_phi`: the triple is `(phi, phi_[1], phi)` and Young's inequality gives
/// the weights `(1, 1, 0)`, so `C = 2 (c0 + c1 + 2 pi c2) (2 pi)^{-1/2}`.
pub fn toeplitz_orlicz_bound(a: &PhaseSymbol, w: &WindowPair, phi: &YoungFunction) -> Result<ToeplitzBound> {
    if delta2_constant(phi, 10.0).is_none() {
        return Err(Error::Unsupported(format!("{phi} fails the local doubling probe")));
    }
    let weights = [1.0, 1.0, 0.0];
    let cond = TriYoungCondition { c0: weights[0], c1: weights[1], c2: weights[2], t_max: f64::INFINITY };
    let condition = verify_tri_condition(phi, &YoungFunction::lebesgue(1.0)?, phi, &cond, 24)?;
    if !condition.passed {
        return Err(Error::Precondition(format!(
            "Young condition for {phi} violated by {:.3e}",
            condition.max_violation
        )));
    }
    let constant = 2.0 * (weights[0] + weights[1] + 2.0 * PI * weights[2]) / (2.0 * PI).sqrt();
    let m = toeplitz_via_convolution(a, w, QuantizationIndex::WEYL)?;
    let lhs = schatten_orlicz_norm(&singular_values(&m), phi);
    let quad = vec![a.quadrature_weight(); a.grid.n * a.grid.n];
    let symbol_norm = luxemburg_abs(&a.abs_values(), Some(&quad), phi);
    let rhs = constant * symbol_norm * w.phi1.l2_norm() * w.phi2.l2_norm();
    Ok(ToeplitzBound {
        lhs,
        rhs,
        pass: lhs <= rhs * (1.0 + BOUND_REL_TOL),
        constant,
        weights,
        symbol_norm,
        condition,
    })
}
