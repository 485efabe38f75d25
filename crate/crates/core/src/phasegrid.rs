//! Self-dual grids in one dimension and on phase space, sampled wavefunctions and
//! symbols, centered unitary Fourier transforms, grid-exact translations and
//! modulations, spectral dilation and linear convolution.
//!
//! With `h = sqrt(2 pi / N)` and `x_j = h (j - N/2)` the unitary DFT with centered
//! indexing samples the continuous unitary Fourier transform on the same grid.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Mass fraction allowed in the outer sixteenth of the grid on each side.
pub const TAIL_THRESHOLD: f64 = 1e-10;
pub const MIN_GRID: usize = 8;
pub const MAX_GRID: usize = 1024;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub h: f64,
    /// Subgrid factor used by rational quantization indices.
    pub refine: usize,
}

pub fn make_grid(n: usize) -> Result<GridSpec> {
    if !n.is_power_of_two() || !(MIN_GRID..=MAX_GRID).contains(&n) {
        return Err(Error::Precondition(format!(
            "grid size must be a power of two in [{MIN_GRID}, {MAX_GRID}], got {n}"
        )));
    }
    Ok(GridSpec { n, h: (2.0 * PI / n as f64).sqrt(), refine: 1 })
}

impl GridSpec {
    pub fn with_refine(self, q: usize) -> Self {
        Self { refine: q.max(1), ..self }
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        self.h * (j as f64 - (self.n / 2) as f64)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Half width `N h / 2` of the window.
    pub fn half_width(&self) -> f64 {
        0.5 * self.n as f64 * self.h
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.n == other.n && self.h == other.h
    }

    fn edge(&self) -> usize {
        (self.n / 16).max(1)
    }

    fn is_edge(&self, j: usize) -> bool {
        let e = self.edge();
        j < e || j >= self.n - e
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailReport {
    pub boundary_mass_fraction: f64,
    pub pass: bool,
}

impl TailReport {
    fn from_masses(edge: f64, total: f64, threshold: f64) -> Self {
        let frac = if total == 0.0 { 0.0 } else { edge / total };
        Self { boundary_mass_fraction: frac, pass: frac <= threshold }
    }

    pub fn check(self) -> Result<()> {
        if self.pass {
            Ok(())
        } else {
            Err(Error::Tail(self.boundary_mass_fraction))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    pub grid: GridSpec,
    pub values: Vec<C64>,
}

impl WaveFunction {
    pub fn new(grid: GridSpec, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::GridMismatch(format!("{} samples on a grid of {}", values.len(), grid.n)));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![ZERO; grid.n] }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> C64) -> Self {
        Self { grid, values: (0..grid.n).map(|j| f(grid.x(j))).collect() }
    }

    pub fn tail_report(&self) -> TailReport {
        let (mut edge, mut total) = (0.0, 0.0);
        for (j, v) in self.values.iter().enumerate() {
            let m = v.norm_sqr();
            total += m;
            if self.grid.is_edge(j) {
                edge += m;
            }
        }
        TailReport::from_masses(edge, total, TAIL_THRESHOLD)
    }

    /// Quadrature inner product `h sum f conj(g)`.
    pub fn inner(&self, other: &WaveFunction) -> C64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum::<C64>() * self.grid.h
    }

    pub fn l2_norm(&self) -> f64 {
        (self.grid.h * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * alpha).collect() }
    }

    /// `x -> f(-x)`.
    pub fn reverse(&self) -> Self {
        let n = self.grid.n;
        Self { grid: self.grid, values: (0..n).map(|j| self.values[(n - j) % n]).collect() }
    }
}

/// Samples `a(x_j, xi_k)`; rows index `x`, columns index `xi`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSymbol {
    pub grid: GridSpec,
    pub values: DMatrix<C64>,
}

impl PhaseSymbol {
    pub fn new(grid: GridSpec, values: DMatrix<C64>) -> Result<Self> {
        if values.nrows() != grid.n || values.ncols() != grid.n {
            return Err(Error::GridMismatch(format!(
                "{}x{} samples on a grid of {}",
                values.nrows(),
                values.ncols(),
                grid.n
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: DMatrix::zeros(grid.n, grid.n) }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> C64) -> Self {
        let values = DMatrix::from_fn(grid.n, grid.n, |j, k| f(grid.x(j), grid.x(k)));
        Self { grid, values }
    }

    /// `e^{-gamma |X|^2}`.
    pub fn gaussian(grid: GridSpec, gamma: f64) -> Self {
        Self::from_fn(grid, |x, xi| C64::new((-gamma * (x * x + xi * xi)).exp(), 0.0))
    }

    pub fn tail_report(&self) -> TailReport {
        self.tail_report_with(TAIL_THRESHOLD)
    }

    pub fn tail_report_with(&self, threshold: f64) -> TailReport {
        let (mut edge, mut total) = (0.0, 0.0);
        let n = self.grid.n;
        for k in 0..n {
            for j in 0..n {
                let m = self.values[(j, k)].norm_sqr();
                total += m;
                if self.grid.is_edge(j) || self.grid.is_edge(k) {
                    edge += m;
                }
            }
        }
        TailReport::from_masses(edge, total, threshold)
    }

    /// Quadrature inner product `h^2 sum a conj(b)`.
    pub fn inner(&self, other: &PhaseSymbol) -> C64 {
        self.values.iter().zip(other.values.iter()).map(|(a, b)| a * b.conj()).sum::<C64>()
            * (self.grid.h * self.grid.h)
    }

    pub fn l2_norm(&self) -> f64 {
        (self.grid.h * self.grid.h * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Quadrature weights `h^2` for Orlicz norms of the samples.
    pub fn quadrature_weight(&self) -> f64 {
        self.grid.h * self.grid.h
    }

    pub fn abs_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self { grid: self.grid, values: &self.values * alpha }
    }

    pub fn conj(&self) -> Self {
        Self { grid: self.grid, values: self.values.map(|v| v.conj()) }
    }

    /// `X -> a(-X)`, exact on the grid.
    pub fn parity(&self) -> Self {
        let n = self.grid.n;
        let values = DMatrix::from_fn(n, n, |j, k| self.values[((n - j) % n, (n - k) % n)]);
        Self { grid: self.grid, values }
    }

    pub fn add(&self, other: &PhaseSymbol) -> Self {
        Self { grid: self.grid, values: &self.values + &other.values }
    }

    /// Max-norm distance relative to the max norm of `reference`.
    pub fn rel_max_diff(&self, reference: &PhaseSymbol) -> f64 {
        let scale = reference.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let diff = self
            .values
            .iter()
            .zip(reference.values.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Plain unnormalized FFT (`sign = -1` forward, `+1` inverse).
pub(crate) fn fft_raw(buf: &mut [C64], sign: i32) {
    plan(buf.len(), sign > 0).process(buf);
}

/// Unitary centered DFT `(1/sqrt N) sum_j v_j e^{sign 2 pi i (j - N/2)(k - N/2) / N}`.
pub fn centered_dft(buf: &mut [C64], sign: i32) {
    let n = buf.len();
    debug_assert!(n % 4 == 0);
    for (j, v) in buf.iter_mut().enumerate() {
        if j % 2 == 1 {
            *v = -*v;
        }
    }
    fft_raw(buf, sign);
    let s = 1.0 / (n as f64).sqrt();
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= if k % 2 == 1 { -s } else { s };
    }
}

/// Samples of the `n`-th L2-normalized Hermite function.
pub fn hermite(n: usize, grid: GridSpec) -> Result<WaveFunction> {
    if n > grid.n / 4 {
        return Err(Error::Precondition(format!("Hermite index {n} exceeds N/4 = {}", grid.n / 4)));
    }
    let values = grid
        .points()
        .into_iter()
        .map(|x| C64::new(hermite_value(n, x), 0.0))
        .collect();
    let f = WaveFunction { grid, values };
    let tail = f.tail_report();
    if !tail.pass {
        return Err(Error::Precondition(format!(
            "Hermite index {n} too large for this grid (tail fraction {:.3e})",
            tail.boundary_mass_fraction
        )));
    }
    Ok(f)
}

/// Stable three-term recurrence for the normalized Hermite function at `x`.
pub fn hermite_value(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Unitary Fourier transform with kernel `e^{sign i x xi}` (`sign = -1` is forward).
pub fn fourier(f: &WaveFunction, sign: i32) -> WaveFunction {
    let mut buf = f.values.clone();
    centered_dft(&mut buf, sign);
    WaveFunction { grid: f.grid, values: buf }
}

/// Two-dimensional centered unitary DFT of a symbol, both axes with the same sign.
pub fn fourier2(a: &PhaseSymbol, sign: i32) -> PhaseSymbol {
    let n = a.grid.n;
    let mut m = a.values.clone();
    let mut buf = vec![ZERO; n];
    for k in 0..n {
        for j in 0..n {
            buf[j] = m[(j, k)];
        }
        centered_dft(&mut buf, sign);
        for j in 0..n {
            m[(j, k)] = buf[j];
        }
    }
    for j in 0..n {
        for k in 0..n {
            buf[k] = m[(j, k)];
        }
        centered_dft(&mut buf, sign);
        for k in 0..n {
            m[(j, k)] = buf[k];
        }
    }
    PhaseSymbol { grid: a.grid, values: m }
}

fn grid_steps(offset: f64, h: f64) -> Result<i64> {
    let steps = (offset / h).round();
    if (offset / h - steps).abs() > 1e-9 {
        return Err(Error::Precondition(format!(
            "offset {offset} is not a multiple of the spacing {h}; use dilate or resampling"
        )));
    }
    Ok(steps as i64)
}

fn roll_index(j: usize, steps: i64, n: usize) -> usize {
    (j as i64 - steps).rem_euclid(n as i64) as usize
}

/// `x -> e^{i x zeta} f(x - z)` for grid-exact `z` and `zeta` (translate, then modulate).
pub fn translate_modulate_wave(f: &WaveFunction, z: f64, zeta: f64) -> Result<WaveFunction> {
    let g = f.grid;
    let s = grid_steps(z, g.h)?;
    grid_steps(zeta, g.h)?;
    let values = (0..g.n)
        .map(|j| f.values[roll_index(j, s, g.n)] * C64::from_polar(1.0, g.x(j) * zeta))
        .collect();
    Ok(WaveFunction { grid: g, values })
}

/// `X -> e^{i <X, Xi>} a(X - Z)` for grid-exact `Z` and `Xi` (translate, then modulate).
pub fn translate_modulate_symbol(a: &PhaseSymbol, z: [f64; 2], xi: [f64; 2]) -> Result<PhaseSymbol> {
    let g = a.grid;
    let (sx, sk) = (grid_steps(z[0], g.h)?, grid_steps(z[1], g.h)?);
    grid_steps(xi[0], g.h)?;
    grid_steps(xi[1], g.h)?;
    let values = DMatrix::from_fn(g.n, g.n, |j, k| {
        a.values[(roll_index(j, sx, g.n), roll_index(k, sk, g.n))]
            * C64::from_polar(1.0, g.x(j) * xi[0] + g.x(k) * xi[1])
    });
    Ok(PhaseSymbol { grid: g, values })
}

/// Periodic band-limited interpolation weight between sample `j` and index
/// position `s`, `u = s - j`: `sin(pi u) / (N tan(pi u / N))`.
pub fn periodic_sinc(u: f64, n: usize) -> f64 {
    let r = u.round();
    if (u - r).abs() < 1e-13 {
        return if (r as i64).rem_euclid(n as i64) == 0 { 1.0 } else { 0.0 };
    }
    (PI * u).sin() / (n as f64 * (PI * u / n as f64).tan())
}

/// Rows evaluate the trigonometric interpolant of `n` samples at fractional
/// index positions; positions outside the window give zero rows.
pub fn interpolation_matrix(positions: &[f64], n: usize) -> DMatrix<f64> {
    let hi = n as f64 - 0.5;
    DMatrix::from_fn(positions.len(), n, |r, j| {
        let s = positions[r];
        if s < -0.5 || s > hi {
            0.0
        } else {
            periodic_sinc(s - j as f64, n)
        }
    })
}

fn real_times_complex(e: &DMatrix<f64>, m: &DMatrix<C64>) -> DMatrix<C64> {
    let re = e * m.map(|v| v.re);
    let im = e * m.map(|v| v.im);
    re.zip_map(&im, C64::new)
}

/// Samples of `X -> a(t X)` from the band-limited interpolant of `a`.
pub fn dilate(a: &PhaseSymbol, t: f64) -> Result<PhaseSymbol> {
    if !(0.25..=4.0).contains(&t.abs()) {
        return Err(Error::Precondition(format!("dilation factor {t} outside 1/4 <= |t| <= 4")));
    }
    if t == 1.0 {
        return Ok(a.clone());
    }
    if t == -1.0 {
        return Ok(a.parity());
    }
    let g = a.grid;
    let half = (g.n / 2) as f64;
    let positions: Vec<f64> = (0..g.n).map(|j| t * (j as f64 - half) + half).collect();
    let e = interpolation_matrix(&positions, g.n);
    let rows = real_times_complex(&e, &a.values);
    let values = real_times_complex(&e, &rows.transpose()).transpose();
    Ok(PhaseSymbol { grid: g, values })
}

/// Periodic trigonometric interpolant evaluated at `j + delta` for every `j`.
///
/// The Nyquist mode is kept one-sided so that shifting by `delta` and then by
/// `-delta` is exact up to rounding.
pub fn shift_samples(v: &[C64], delta: f64) -> Vec<C64> {
    let n = v.len();
    if delta == 0.0 {
        return v.to_vec();
    }
    if delta == delta.round() {
        let s = delta as i64;
        return (0..n).map(|j| v[(j as i64 + s).rem_euclid(n as i64) as usize]).collect();
    }
    let mut buf = v.to_vec();
    fft_raw(&mut buf, -1);
    let inv = 1.0 / n as f64;
    for (idx, c) in buf.iter_mut().enumerate() {
        let freq = if idx >= n / 2 { idx as f64 - n as f64 } else { idx as f64 };
        *c *= C64::from_polar(inv, 2.0 * PI * freq * delta / n as f64);
    }
    fft_raw(&mut buf, 1);
    buf
}

fn fft2_in_place(m: &mut DMatrix<C64>, sign: i32) {
    let (r, c) = (m.nrows(), m.ncols());
    let mut buf = vec![ZERO; r.max(c)];
    for k in 0..c {
        buf[..r].copy_from_slice(m.column(k).as_slice());
        fft_raw(&mut buf[..r], sign);
        m.column_mut(k).copy_from_slice(&buf[..r]);
    }
    for j in 0..r {
        for k in 0..c {
            buf[k] = m[(j, k)];
        }
        fft_raw(&mut buf[..c], sign);
        for k in 0..c {
            m[(j, k)] = buf[k];
        }
    }
}

/// Linear convolution `int a(Y) b(X - Y) dY` by zero-padded FFT, cropped to the window.
pub fn convolve(a: &PhaseSymbol, b: &PhaseSymbol) -> Result<PhaseSymbol> {
    if !a.grid.same_as(&b.grid) {
        return Err(Error::GridMismatch("convolution operands live on different grids".into()));
    }
    let n = a.grid.n;
    let m = 2 * n;
    let mut fa = DMatrix::<C64>::zeros(m, m);
    let mut fb = DMatrix::<C64>::zeros(m, m);
    fa.view_mut((0, 0), (n, n)).copy_from(&a.values);
    fb.view_mut((0, 0), (n, n)).copy_from(&b.values);
    fft2_in_place(&mut fa, -1);
    fft2_in_place(&mut fb, -1);
    fa.component_mul_assign(&fb);
    fft2_in_place(&mut fa, 1);
    let scale = a.grid.h * a.grid.h / (m * m) as f64;
    let off = n / 2;
    let values = DMatrix::from_fn(n, n, |j, k| fa[(j + off, k + off)] * scale);
    Ok(PhaseSymbol { grid: a.grid, values })
}

pub fn pointwise_multiply(a: &PhaseSymbol, b: &PhaseSymbol) -> Result<PhaseSymbol> {
    if !a.grid.same_as(&b.grid) {
        return Err(Error::GridMismatch("product operands live on different grids".into()));
    }
    Ok(PhaseSymbol { grid: a.grid, values: a.values.component_mul(&b.values) })
}

/// Grid file header `# qha-grid N=<int> h=<float> kind=<wave|symbol>`.
fn header(grid: &GridSpec, kind: &str) -> String {
    format!("# qha-grid N={} h={:.17e} kind={kind}\n", grid.n, grid.h)
}

pub fn wave_to_csv(f: &WaveFunction) -> String {
    let mut out = header(&f.grid, "wave");
    for v in &f.values {
        let _ = writeln!(out, "{:.17e},{:.17e}", v.re, v.im);
    }
    out
}

pub fn symbol_to_csv(a: &PhaseSymbol) -> String {
    let mut out = header(&a.grid, "symbol");
    let n = a.grid.n;
    for j in 0..n {
        let row: Vec<String> = (0..n)
            .map(|k| format!("{:.17e}:{:.17e}", a.values[(j, k)].re, a.values[(j, k)].im))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum GridFile {
    Wave(WaveFunction),
    Symbol(PhaseSymbol),
    /// Headerless rows of `re[,im]`, read under counting measure.
    Sequence(Vec<C64>),
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad number '{s}'")))
}

pub fn parse_grid_file(text: &str) -> Result<GridFile> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let first = match lines.clone().next() {
        Some(l) => l,
        None => return Ok(GridFile::Sequence(Vec::new())),
    };
    if !first.starts_with('#') {
        let mut seq = Vec::new();
        for line in lines {
            let mut parts = line.split(',');
            let re = parse_f64(parts.next().unwrap_or(""))?;
            let im = parts.next().map(parse_f64).transpose()?.unwrap_or(0.0);
            seq.push(C64::new(re, im));
        }
        return Ok(GridFile::Sequence(seq));
    }
    lines.next();
    let mut n = None;
    let mut kind = None;
    for field in first.trim_start_matches('#').split_whitespace() {
        if let Some(v) = field.strip_prefix("N=") {
            n = Some(v.parse::<usize>().map_err(|_| Error::Parse(format!("bad grid size '{v}'")))?);
        } else if let Some(v) = field.strip_prefix("kind=") {
            kind = Some(v.to_string());
        }
    }
    let grid = make_grid(n.ok_or_else(|| Error::Parse("header lacks N=".into()))?)?;
    match kind.as_deref() {
        Some("wave") => {
            let mut values = Vec::with_capacity(grid.n);
            for line in lines {
                let (re, im) = line
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("expected re,im in '{line}'")))?;
                values.push(C64::new(parse_f64(re)?, parse_f64(im)?));
            }
            Ok(GridFile::Wave(WaveFunction::new(grid, values)?))
        }
        Some("symbol") => {
            let mut values = DMatrix::<C64>::zeros(grid.n, grid.n);
            let mut rows = 0;
            for (j, line) in lines.enumerate() {
                if j >= grid.n {
                    return Err(Error::Parse("too many symbol rows".into()));
                }
                let entries: Vec<&str> = line.split(',').collect();
                if entries.len() != grid.n {
                    return Err(Error::Parse(format!("row {j} has {} entries", entries.len())));
                }
                for (k, e) in entries.iter().enumerate() {
                    let (re, im) = e
                        .split_once(':')
                        .ok_or_else(|| Error::Parse(format!("expected re:im in '{e}'")))?;
                    values[(j, k)] = C64::new(parse_f64(re)?, parse_f64(im)?);
                }
                rows += 1;
            }
            if rows != grid.n {
                return Err(Error::Parse(format!("expected {} symbol rows, got {rows}", grid.n)));
            }
            Ok(GridFile::Symbol(PhaseSymbol { grid, values }))
        }
        other => Err(Error::Parse(format!("unknown grid kind {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g128() -> GridSpec {
        make_grid(128).unwrap()
    }

    #[test]
    fn grid_sizes() {
        assert!((make_grid(8).unwrap().h - 0.886226925452758).abs() < 1e-12);
        assert!((g128().h - 0.2215567313631895).abs() < 1e-12);
        assert!(make_grid(100).is_err());
        assert!(make_grid(2048).is_err());
        let g = g128();
        assert!((g.h * g.h * g.n as f64 - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn hermite_values_and_orthonormality() {
        let g = g128();
        let f0 = hermite(0, g).unwrap();
        assert!((f0.values[64].re - PI.powf(-0.25)).abs() < 1e-15);
        assert!(hermite(1, g).unwrap().values[64].re.abs() < 1e-15);
        let fs: Vec<_> = (0..=8).map(|n| hermite(n, g).unwrap()).collect();
        for (m, a) in fs.iter().enumerate() {
            for (n, b) in fs.iter().enumerate() {
                let expect = if m == n { 1.0 } else { 0.0 };
                assert!((a.inner(b) - expect).norm() < 1e-10, "{m} {n}");
            }
        }
        assert!(hermite(33, g).is_err());
    }

    #[test]
    fn fourier_eigenfunctions() {
        let g = g128();
        for n in 0..=4usize {
            let f = hermite(n, g).unwrap();
            let ff = fourier(&f, -1);
            let phase = C64::new(0.0, -1.0).powu(n as u32);
            for (a, b) in ff.values.iter().zip(&f.values) {
                assert!((a - phase * b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn fourier_twice_is_reversal() {
        let g = make_grid(32).unwrap();
        let f = WaveFunction::from_fn(g, |x| C64::new((-(x - 0.7).powi(2)).exp(), x.sin()));
        let twice = fourier(&fourier(&f, -1), -1);
        let rev = f.reverse();
        for (a, b) in twice.values.iter().zip(&rev.values) {
            assert!((a - b).norm() < 1e-12);
        }
        let back = fourier(&fourier(&f, -1), 1);
        assert!((back.l2_norm() - f.l2_norm()).abs() < 1e-12);
    }

    #[test]
    fn translation_modulation() {
        let g = g128();
        let f = hermite(3, g).unwrap();
        assert_eq!(translate_modulate_wave(&f, 0.0, 0.0).unwrap(), f);
        let there = translate_modulate_wave(&f, g.h, 0.0).unwrap();
        assert_eq!(translate_modulate_wave(&there, -g.h, 0.0).unwrap(), f);
        let moved = translate_modulate_wave(&f, 3.0 * g.h, 5.0 * g.h).unwrap();
        assert!((moved.l2_norm() - f.l2_norm()).abs() < 1e-14);
        assert!(translate_modulate_wave(&f, 0.5 * g.h, 0.0).is_err());
        let a = PhaseSymbol::gaussian(g, 1.0);
        let b = translate_modulate_symbol(&a, [4.0 * g.h, -2.0 * g.h], [g.h, 3.0 * g.h]).unwrap();
        assert!((b.l2_norm() - a.l2_norm()).abs() < 1e-14);
    }

    #[test]
    fn dilation() {
        let g = g128();
        let a = PhaseSymbol::gaussian(g, 1.0);
        assert_eq!(dilate(&a, 1.0).unwrap(), a);
        assert_eq!(dilate(&a, -1.0).unwrap(), a.parity());
        let b = dilate(&a, 2f64.sqrt()).unwrap();
        assert!(b.rel_max_diff(&PhaseSymbol::gaussian(g, 2.0)) < 1e-8);
        let c = dilate(&a, 0.5).unwrap();
        assert!(c.rel_max_diff(&PhaseSymbol::gaussian(g, 0.25)) < 1e-8);
        assert!(dilate(&a, 5.0).is_err());
        assert!(dilate(&a, 0.2).is_err());
    }

    #[test]
    fn convolution_of_gaussians() {
        let g = g128();
        let a = PhaseSymbol::gaussian(g, 1.0);
        let c = convolve(&a, &a).unwrap();
        let expect = PhaseSymbol::gaussian(g, 0.5).scale(C64::new(PI / 2.0, 0.0));
        assert!(c.rel_max_diff(&expect) < 1e-8);
    }

    #[test]
    fn mollifier_convolution() {
        let g = g128();
        let a = PhaseSymbol::from_fn(g, |x, xi| C64::new((-(x * x + xi * xi) / 4.0).exp() * (x + 1.0), xi));
        let bump = PhaseSymbol::gaussian(g, 1.0 / 0.05f64.powi(2));
        let mass = bump.values.iter().map(|v| v.re).sum::<f64>() * bump.quadrature_weight();
        let c = convolve(&a, &bump.scale(C64::new(1.0 / mass, 0.0))).unwrap();
        assert!(c.rel_max_diff(&a) < 1e-3);
        let ab = convolve(&a, &PhaseSymbol::gaussian(g, 0.7)).unwrap();
        let ba = convolve(&PhaseSymbol::gaussian(g, 0.7), &a).unwrap();
        assert!(ab.rel_max_diff(&ba) < 1e-12);
    }

    #[test]
    fn shift_roundtrip() {
        let v: Vec<C64> = (0..32).map(|j| C64::new((j as f64 * 0.3).sin(), (j as f64).cos())).collect();
        let back = shift_samples(&shift_samples(&v, 0.5), -0.5);
        for (a, b) in back.iter().zip(&v) {
            assert!((a - b).norm() < 1e-12);
        }
        assert_eq!(shift_samples(&v, 2.0)[0], v[2]);
    }

    #[test]
    fn csv_roundtrip() {
        let g = make_grid(16).unwrap();
        let f = WaveFunction::from_fn(g, |x| C64::new(x, -x / 3.0));
        match parse_grid_file(&wave_to_csv(&f)).unwrap() {
            GridFile::Wave(back) => assert_eq!(back, f),
            _ => panic!("wrong kind"),
        }
        let a = PhaseSymbol::from_fn(g, |x, xi| C64::new(x * xi, 1.0 / 3.0));
        match parse_grid_file(&symbol_to_csv(&a)).unwrap() {
            GridFile::Symbol(back) => assert!(back.rel_max_diff(&a) < 1e-15),
            _ => panic!("wrong kind"),
        }
        match parse_grid_file("3\n4\n").unwrap() {
            GridFile::Sequence(s) => assert_eq!(s, vec![C64::new(3.0, 0.0), C64::new(4.0, 0.0)]),
            _ => panic!("wrong kind"),
        }
        assert!(parse_grid_file("# qha-grid N=16 kind=blob\n").is_err());
    }

    #[test]
    fn tails() {
        let g = g128();
        assert!(PhaseSymbol::gaussian(g, 1.0).tail_report().pass);
        assert!(!PhaseSymbol::gaussian(g, 0.01).tail_report().pass);
        assert!(PhaseSymbol::zeros(g).tail_report().pass);
    }
}
