//! A-quantization on the self-dual grid: A-Wigner distributions, symbol/kernel
//! transforms, transport between calculi and the symplectic Fourier transform.
//!
//! The kernel of `Op_A(a)` is `K(x, y) = (2 pi)^{-1/2} g(x - A(x - y), x - y)` where
//! `g` is the inverse partial Fourier transform of `a` in the second variable.
//! On the grid `x - y = h m`, and `x - A(x - y)` sits at index `j - A m`, which
//! is a lattice point of the `q`-refined grid when `q A` is an integer.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phasegrid::{centered_dft, fourier2, shift_samples, GridSpec, PhaseSymbol, WaveFunction, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Scalar quantization index `A = num / den` with `den` in {1, 2, 4} and `0 <= A <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantizationIndex {
    num: u32,
    den: u32,
}

impl QuantizationIndex {
    pub const KOHN_NIRENBERG: Self = Self { num: 0, den: 1 };
    pub const WEYL: Self = Self { num: 1, den: 2 };
    pub const ANTI: Self = Self { num: 1, den: 1 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if ![1, 2, 4].contains(&den) || num > den {
            return Err(Error::Unsupported(format!(
                "quantization index {num}/{den} is not representable (need 0 <= A <= 1, denominator 1, 2 or 4)"
            )));
        }
        let g = gcd(num, den);
        Ok(Self { num: num / g, den: den / g })
    }

    pub fn from_f64(a: f64) -> Result<Self> {
        let q = (4.0 * a).round();
        if (4.0 * a - q).abs() > 1e-12 || !(0.0..=4.0).contains(&q) {
            return Err(Error::Unsupported(format!("quantization index {a} is not a multiple of 1/4 in [0, 1]")));
        }
        Self::new(q as u32, 4)
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn complement(&self) -> Self {
        Self { num: self.den - self.num, den: self.den }
    }

    /// Refinement factor of the grid on which the index is lattice exact.
    pub fn refine(&self) -> usize {
        self.den as usize
    }
}

impl fmt::Display for QuantizationIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorKernel {
    pub grid: GridSpec,
    /// `K(x_j, x_k)`.
    pub values: DMatrix<C64>,
}

/// Centered lag index `m` in `[-N/2, N/2)` stored at position `m + N/2`.
#[inline]
fn lag(pos: usize, n: usize) -> i64 {
    pos as i64 - (n / 2) as i64
}

/// Samples of `f` at `x_i + shift h`, zero where the point leaves the window.
fn shifted_window(f: &[C64], shift: f64) -> Vec<C64> {
    let n = f.len();
    let mut out = shift_samples(f, shift);
    let hi = n as f64 - 0.5;
    for (i, v) in out.iter_mut().enumerate() {
        let s = i as f64 + shift;
        if s < -0.5 || s > hi {
            *v = ZERO;
        }
    }
    out
}

/// `W^A_{f,g}(x, xi) = (2 pi)^{-1/2} int f(x + A w) conj(g(x - (1 - A) w)) e^{-i w xi} dw`.
pub fn wigner(f: &WaveFunction, g: &WaveFunction, a: QuantizationIndex) -> Result<PhaseSymbol> {
    if !f.grid.same_as(&g.grid) {
        return Err(Error::GridMismatch("Wigner arguments live on different grids".into()));
    }
    let grid = f.grid;
    let n = grid.n;
    let av = a.value();
    let mut values = DMatrix::<C64>::zeros(n, n);
    let mut column = vec![ZERO; n];
    // products P(i, m) for each lag, then one DFT per row
    let mut prod = DMatrix::<C64>::zeros(n, n);
    for pos in 0..n {
        let m = lag(pos, n) as f64;
        let fs = shifted_window(&f.values, av * m);
        let gs = shifted_window(&g.values, -(1.0 - av) * m);
        for i in 0..n {
            prod[(i, pos)] = fs[i] * gs[i].conj();
        }
    }
    for i in 0..n {
        for pos in 0..n {
            column[pos] = prod[(i, pos)];
        }
        centered_dft(&mut column, -1);
        for l in 0..n {
            values[(i, l)] = column[l];
        }
    }
    Ok(PhaseSymbol { grid, values })
}

/// Inverse partial Fourier transform in the second variable, row by row.
fn partial_inverse(a: &PhaseSymbol) -> DMatrix<C64> {
    let n = a.grid.n;
    let mut g = a.values.clone();
    let mut row = vec![ZERO; n];
    for i in 0..n {
        for l in 0..n {
            row[l] = g[(i, l)];
        }
        centered_dft(&mut row, 1);
        for l in 0..n {
            g[(i, l)] = row[l];
        }
    }
    g
}

pub fn symbol_to_kernel(a: &PhaseSymbol, index: QuantizationIndex) -> Result<OperatorKernel> {
    let n = a.grid.n;
    let av = index.value();
    let g = partial_inverse(a);
    let c = (2.0 * PI).powf(-0.5);
    let mut k = DMatrix::<C64>::zeros(n, n);
    for pos in 0..n {
        let m = lag(pos, n);
        let col: Vec<C64> = g.column(pos).iter().cloned().collect();
        let shifted = shift_samples(&col, -av * m as f64);
        for j in 0..n {
            let kk = j as i64 - m;
            if (0..n as i64).contains(&kk) {
                k[(j, kk as usize)] = shifted[j] * c;
            }
        }
    }
    Ok(OperatorKernel { grid: a.grid, values: k })
}

pub fn kernel_to_symbol(kernel: &OperatorKernel, index: QuantizationIndex) -> Result<PhaseSymbol> {
    let n = kernel.grid.n;
    let av = index.value();
    let c = (2.0 * PI).sqrt();
    let mut g = DMatrix::<C64>::zeros(n, n);
    let mut samples = vec![ZERO; n];
    for pos in 0..n {
        let m = lag(pos, n);
        for (j, s) in samples.iter_mut().enumerate() {
            let kk = j as i64 - m;
            *s = if (0..n as i64).contains(&kk) { kernel.values[(j, kk as usize)] * c } else { ZERO };
        }
        let back = shift_samples(&samples, av * m as f64);
        g.column_mut(pos).copy_from_slice(&back);
    }
    let mut row = vec![ZERO; n];
    for i in 0..n {
        for l in 0..n {
            row[l] = g[(i, l)];
        }
        centered_dft(&mut row, -1);
        for l in 0..n {
            g[(i, l)] = row[l];
        }
    }
    Ok(PhaseSymbol { grid: kernel.grid, values: g })
}

/// Symbol `b` with `Op_{A2}(b) = Op_{A1}(a)`, computed through the common kernel.
pub fn calculi_transform(a: &PhaseSymbol, from: QuantizationIndex, to: QuantizationIndex) -> Result<PhaseSymbol> {
    if from == to {
        return Ok(a.clone());
    }
    kernel_to_symbol(&symbol_to_kernel(a, from)?, to)
}

/// `F_s a(x, xi) = pi^{-1} int a(y, eta) e^{2i(y xi - x eta)} dy deta`.
///
/// Equals `2 (F a)(-2 xi, 2 x)` with the unitary two-dimensional transform `F`;
/// the doubled frequencies are even lattice points of the self-dual grid.
/// Points whose doubled frequency falls outside the window are set to zero.
pub fn symplectic_fourier(a: &PhaseSymbol) -> Result<PhaseSymbol> {
    let n = a.grid.n;
    if n % 4 != 0 {
        return Err(Error::Precondition("symplectic Fourier transform needs N divisible by 4".into()));
    }
    let fa = fourier2(a, -1);
    let half = (n / 2) as i64;
    let values = DMatrix::from_fn(n, n, |j, k| {
        let n1 = -2 * (k as i64 - half) + half;
        let n2 = 2 * (j as i64 - half) + half;
        if (0..n as i64).contains(&n1) && (0..n as i64).contains(&n2) {
            fa.values[(n1 as usize, n2 as usize)] * 2.0
        } else {
            ZERO
        }
    });
    Ok(PhaseSymbol { grid: a.grid, values })
}

/// Affine charts used to rewrite kernels of dilated convolutions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChartKind {
    /// `(t z + (x - y)/(2t), t z - (x - y)/(2t))`.
    S,
    /// `S` shifted by `t (x + y)/2` in both slots.
    T,
    /// `S` shifted by `s (x + y)/2` in both slots.
    Ts,
    /// `(z + x, z + y)`.
    S0,
    /// `(z - x, z - y)`.
    S1,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineChart {
    pub kind: ChartKind,
    pub t: f64,
    pub s: f64,
}

impl AffineChart {
    pub fn new(kind: ChartKind, t: f64, s: f64) -> Result<Self> {
        if matches!(kind, ChartKind::S | ChartKind::T | ChartKind::Ts) && t == 0.0 {
            return Err(Error::Domain("chart parameter t must be nonzero".into()));
        }
        Ok(Self { kind, t, s })
    }

    pub fn apply(&self, z: f64, x: f64, y: f64) -> (f64, f64) {
        let t = self.t;
        let d = (x - y) / (2.0 * t);
        match self.kind {
            ChartKind::S => (t * z + d, t * z - d),
            ChartKind::T => {
                let c = t * (x + y) / 2.0;
                (t * z + d + c, t * z - d + c)
            }
            ChartKind::Ts => {
                let c = self.s * (x + y) / 2.0;
                (t * z + d + c, t * z - d + c)
            }
            ChartKind::S0 => (z + x, z + y),
            ChartKind::S1 => (z - x, z - y),
        }
    }
}

/// `kappa(z) = -sum z_j`.
pub fn kappa(z: &[f64]) -> f64 {
    -z.iter().sum::<f64>()
}
