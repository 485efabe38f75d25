//! Kernel of a dilated convolution `c = a1(t1 .) * ... * aN(tN .)` computed two ways:
//! directly from `c`, and as an integral over chart variables of the partial
//! inverse transforms of the factors.
//!
//! With `G_a(x, w) = (2 pi)^{-1/2} int a(x, xi) e^{i w xi} dxi` the Weyl kernel is
//! `K_a(x, y) = (2 pi)^{-1/2} G_a((x + y)/2, x - y)`, and
//!
//! `K_c(x, y) = (2 pi)^{(N-2)/2} prod |t_j|^{-1} int G_{a1}(t1 z1, w/t1) ...
//!  G_{aN}(tN (C - z1 - ... - z_{N-1}), w/tN) dz`
//!
//! with `C = (x + y)/2` and `w = x - y`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::inputs::{random_symbol, symbol_digest, SplitMix64};
use super::{case_id, par_cases, CaseResult, DilationLaw, SuiteConfig};
use crate::error::{Error, Result};
use crate::phasegrid::{convolve, dilate, interpolation_matrix, make_grid, PhaseSymbol, C64};
use crate::weyl::{symbol_to_kernel, QuantizationIndex};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Grid size for the three-factor identity.
pub const MULTI_GRID: usize = 32;
pub const MULTI_CASES: usize = 4;

/// `G_a(t p delta, w / t)` on the lattice `p = -P..=P`, one vector per lag.
struct LatticeFactor {
    half: i64,
    /// `values[lag][p + half]`.
    values: Vec<Vec<C64>>,
}

fn lattice_factor(a: &PhaseSymbol, t: f64, delta: f64) -> LatticeFactor {
    let g = a.grid;
    let n = g.n;
    let width = n as f64 * g.h;
    let half = (width / (2.0 * t.abs() * delta)).ceil() as i64;
    let centre = (n / 2) as f64;
    let positions: Vec<f64> = (-half..=half).map(|p| t * p as f64 * delta / g.h + centre).collect();
    let e = interpolation_matrix(&positions, n);
    let re = &e * a.values.map(|v| v.re);
    let im = &e * a.values.map(|v| v.im);
    let rows: DMatrix<C64> = re.zip_map(&im, C64::new);
    let pref = g.h / (2.0 * PI).sqrt();
    let values = (0..n)
        .map(|pos| {
            let w = g.h * (pos as f64 - centre) / t;
            if w.abs() >= width / 2.0 {
                return vec![ZERO; rows.nrows()];
            }
            let phase = DVector::from_fn(n, |l, _| C64::from_polar(pref, w * g.x(l)));
            (&rows * phase).iter().cloned().collect()
        })
        .collect();
    LatticeFactor { half, values }
}

/// Full discrete convolution of two centred sequences.
fn conv_centred(a: &[C64], ha: i64, b: &[C64], hb: i64) -> (Vec<C64>, i64) {
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == ZERO {
            continue;
        }
        for (k, y) in b.iter().enumerate() {
            out[i + k] += x * y;
        }
    }
    (out, ha + hb)
}

/// Weyl kernel of the dilated convolution through the chart integral, with the
/// integral taken by the trapezoid rule on the lattice of spacing `h / Q`.
pub fn chart_integral_kernel(factors: &[PhaseSymbol], t: &[f64]) -> Result<DMatrix<C64>> {
    if factors.len() != t.len() || factors.len() < 2 {
        return Err(Error::Precondition("need one dilation factor per symbol, at least two".into()));
    }
    let g = factors[0].grid;
    if factors.iter().any(|a| !a.grid.same_as(&g)) {
        return Err(Error::GridMismatch("factors live on different grids".into()));
    }
    if t.iter().any(|v| !(0.25..=4.0).contains(&v.abs())) {
        return Err(Error::Precondition("dilation factors must satisfy 1/4 <= |t| <= 4".into()));
    }
    let n = g.n;
    let nf = factors.len();
    // even Q at least sum |t_j| keeps the trapezoid rule exact for the band limit
    let q = 2 * (t.iter().map(|v| v.abs()).sum::<f64>() / 2.0).ceil() as i64;
    let delta = g.h / q as f64;
    let lattices: Vec<LatticeFactor> = factors.iter().zip(t).map(|(a, &tj)| lattice_factor(a, tj, delta)).collect();
    let constant = (2.0 * PI).powf((nf as f64 - 2.0) / 2.0) / t.iter().map(|v| v.abs()).product::<f64>()
        * delta.powi(nf as i32 - 1);
    let last = &lattices[nf - 1];
    let mut k = DMatrix::<C64>::zeros(n, n);
    let half_n = (n / 2) as i64;
    for pos in 1..n {
        let m = pos as i64 - half_n;
        let (mut h, mut hh) = (lattices[0].values[pos].clone(), lattices[0].half);
        for f in &lattices[1..nf - 1] {
            let (c, ch) = conv_centred(&h, hh, &f.values[pos], f.half);
            h = c;
            hh = ch;
        }
        let gl = &last.values[pos];
        for j in 0..n as i64 {
            let kk = j - m;
            if !(0..n as i64).contains(&kk) {
                continue;
            }
            let q0 = (q / 2) * (j + kk - n as i64);
            let mut acc = ZERO;
            for (r, x) in h.iter().enumerate() {
                let idx = q0 - (r as i64 - hh) + last.half;
                if (0..gl.len() as i64).contains(&idx) {
                    acc += x * gl[idx as usize];
                }
            }
            k[(j as usize, kk as usize)] = acc * constant;
        }
    }
    Ok(k)
}

/// Weyl kernel of `a1(t1 .) * ... * aN(tN .)` from the convolved symbol.
pub fn direct_kernel(factors: &[PhaseSymbol], t: &[f64]) -> Result<DMatrix<C64>> {
    let mut c = dilate(&factors[0], t[0])?;
    for (a, &tj) in factors.iter().zip(t).skip(1) {
        c = convolve(&c, &dilate(a, tj)?)?;
    }
    Ok(symbol_to_kernel(&c, QuantizationIndex::WEYL)?.values)
}

/// Max-norm distance over lags `|j - k| < N/2`, relative to the max of `reference`.
fn rel_kernel_diff(test: &DMatrix<C64>, reference: &DMatrix<C64>) -> f64 {
    let n = reference.nrows() as i64;
    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for j in 0..n {
        for k in 0..n {
            if (j - k).abs() >= n / 2 {
                continue;
            }
            let (a, b) = (test[(j as usize, k as usize)], reference[(j as usize, k as usize)]);
            diff = diff.max((a - b).norm());
            scale = scale.max(b.norm());
        }
    }
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Relative max-norm gap between the two kernel routes for `a(s .) * b(t .)`.
pub fn kernel_identity_error(a: &PhaseSymbol, b: &PhaseSymbol, s: f64, t: f64) -> Result<f64> {
    kernel_identity_error_multi(&[a.clone(), b.clone()], &[s, t])
}

pub fn kernel_identity_error_multi(factors: &[PhaseSymbol], t: &[f64]) -> Result<f64> {
    let lhs = direct_kernel(factors, t)?;
    let rhs = chart_integral_kernel(factors, t)?;
    Ok(rel_kernel_diff(&rhs, &lhs))
}

/// Weyl kernel of `C e^{-g |X|^2}`.
pub fn gaussian_weyl_kernel(c: f64, g: f64, x: f64, y: f64) -> f64 {
    c / (2.0 * PI) * (-g * ((x + y) / 2.0).powi(2)).exp() * (PI / g).sqrt() * (-(x - y).powi(2) / (4.0 * g)).exp()
}

/// Gap between the direct kernel of `W(s .) * W(t .)`, `W = W_{phi0, phi0}`, and its closed form.
fn gaussian_closed_form_error(k: &DMatrix<C64>, grid: crate::phasegrid::GridSpec, s: f64, t: f64) -> f64 {
    let (al, be) = (s * s, t * t);
    let c = 2.0 / PI * PI / (al + be);
    let g = al * be / (al + be);
    let exact = DMatrix::from_fn(grid.n, grid.n, |j, k| C64::new(gaussian_weyl_kernel(c, g, grid.x(j), grid.x(k)), 0.0));
    rel_kernel_diff(k, &exact)
}

fn modulated_gaussian(grid: crate::phasegrid::GridSpec, z: [f64; 2], xi: [f64; 2]) -> PhaseSymbol {
    PhaseSymbol::from_fn(grid, |x, e| {
        let r2 = (x - z[0]).powi(2) + (e - z[1]).powi(2);
        C64::from_polar((-r2 / 2.0).exp(), x * xi[0] + e * xi[1])
    })
}

/// Two-factor identity on the configured grid, three-factor identity on a 32-point grid.
pub fn suite_kernel_identities(cfg: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let grid = cfg.grid()?;
    let tol = cfg.tolerances;
    let law = cfg.law.clone().unwrap_or_else(DilationLaw::bilinear_convolution);
    let (s, t) = if law.t.len() == 2 { (law.t[0], law.t[1]) } else { (0.5f64.sqrt(), 1.0) };
    let w = PhaseSymbol::gaussian(grid, 1.0).scale(C64::new((2.0 / PI).sqrt(), 0.0));
    let lhs = direct_kernel(&[w.clone(), w.clone()], &[s, t])?;
    let rhs = chart_integral_kernel(&[w.clone(), w.clone()], &[s, t])?;
    let mut rows = vec![CaseResult::identity(case_id(0, "N=2 gaussian"), symbol_digest(&[&w]), rel_kernel_diff(&rhs, &lhs), tol.interpolation)
        .with("closed_form_error", gaussian_closed_form_error(&lhs, grid, s, t))
        .with("t", vec![s, t])];
    rows.extend(par_cases(cfg.cases, |i| {
        let a = random_symbol(cfg.seed, 2 * i as u64, grid);
        let b = random_symbol(cfg.seed, 2 * i as u64 + 1, grid);
        let err = kernel_identity_error(&a, &b, s, t)?;
        Ok(vec![CaseResult::identity(case_id(i + 1, "N=2"), symbol_digest(&[&a, &b]), err, tol.interpolation)])
    })?);
    let g3 = make_grid(MULTI_GRID)?;
    let t3 = DilationLaw::trilinear_convolution().t;
    let base = cfg.cases + 1;
    rows.extend(par_cases(MULTI_CASES, |i| {
        let mut rng = SplitMix64::keyed(cfg.seed, i as u64, 70);
        let factors: Vec<PhaseSymbol> = (0..3)
            .map(|_| {
                if i == 0 {
                    modulated_gaussian(g3, [0.0; 2], [0.0; 2])
                } else {
                    let mut u = || rng.uniform(-0.5, 0.5);
                    modulated_gaussian(g3, [u(), u()], [u(), u()])
                }
            })
            .collect();
        let refs: Vec<&PhaseSymbol> = factors.iter().collect();
        let err = kernel_identity_error_multi(&factors, &t3)?;
        Ok(vec![CaseResult::identity(case_id(base + i, "N=3"), symbol_digest(&refs), err, tol.interpolation_multi)
            .with("t", t3.clone())])
    })?);
    Ok(rows)
}
