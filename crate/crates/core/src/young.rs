//! Young functions on the extended half line, their conjugates and inverses,
//! and grid checks of Young-type conditions.
//!
//! Extended reals are plain `f64` with `f64::INFINITY` standing for `+inf`.
//! The only rule that differs from IEEE arithmetic is `inf * 0 = 0`, see [`ext_mul`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used by every condition check in this module.
pub const CONDITION_SLACK: f64 = 1e-12;

const BISECT_REL_TOL: f64 = 1e-13;
const BISECT_MAX_ITER: usize = 200;
const CONJUGATE_GRID: usize = 4096;
const DELTA2_GRID: usize = 2048;
/// Finite probe range used when a condition is declared to hold globally.
const GLOBAL_PROBE_RANGE: f64 = 10.0;

/// Product on the extended half line with the measure-theoretic rule `inf * 0 = 0`.
#[inline]
pub fn ext_mul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// Piecewise linear Young function through `(t_i, v_i)`, `+inf` past the last node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    nodes: Vec<(f64, f64)>,
}

impl Table {
    pub fn new(nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.len() < 2 || nodes[0] != (0.0, 0.0) {
            return Err(Error::Precondition(
                "table needs at least two nodes starting at (0, 0)".into(),
            ));
        }
        for w in nodes.windows(2) {
            let ((t0, v0), (t1, v1)) = (w[0], w[1]);
            if !(t1 > t0) || !(v1 >= v0) || !v1.is_finite() {
                return Err(Error::Precondition(
                    "table nodes must be strictly increasing in t and nondecreasing in value"
                        .into(),
                ));
            }
        }
        Ok(Self { nodes })
    }

    fn eval(&self, t: f64) -> f64 {
        let last = self.nodes[self.nodes.len() - 1];
        if t > last.0 {
            return f64::INFINITY;
        }
        let i = self.nodes.partition_point(|&(ti, _)| ti <= t);
        if i >= self.nodes.len() {
            return last.1;
        }
        let (t0, v0) = self.nodes[i - 1];
        let (t1, v1) = self.nodes[i];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Kind {
    /// `t^p` with finite `p >= 1`.
    Power(f64),
    /// 0 on `[0, 1]`, `+inf` beyond.
    IndicatorInfty,
    /// `e^t - 1`.
    ExpMinusOne,
    /// `e^t - 1 - t`.
    ExpMinusOneMinusT,
    Tabulated(Table),
    /// Legendre transform of the boxed function, evaluated by a grid sup.
    NumericConjugate(Box<YoungFunction>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YoungFunction {
    pub kind: Kind,
}

impl YoungFunction {
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Domain(format!("power exponent must be finite and >= 1, got {p}")));
        }
        Ok(Self { kind: Kind::Power(p) })
    }

    /// The Lebesgue gauge `t^p`, with `p = inf` giving the indicator gauge.
    pub fn lebesgue(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Self::indicator_infty())
        } else {
            Self::power(p)
        }
    }

    pub fn indicator_infty() -> Self {
        Self { kind: Kind::IndicatorInfty }
    }

    pub fn exp_minus_one() -> Self {
        Self { kind: Kind::ExpMinusOne }
    }

    pub fn exp_minus_one_minus_t() -> Self {
        Self { kind: Kind::ExpMinusOneMinusT }
    }

    pub fn tabulated(table: Table) -> Self {
        Self { kind: Kind::Tabulated(table) }
    }

    pub fn has_analytic_conjugate(&self) -> bool {
        matches!(self.kind, Kind::Power(_) | Kind::IndicatorInfty)
    }

    pub fn has_analytic_inverse(&self) -> bool {
        matches!(self.kind, Kind::Power(_) | Kind::IndicatorInfty | Kind::ExpMinusOne)
    }

    /// Lebesgue exponent when the function is `t^p` or the indicator gauge.
    pub fn lebesgue_exponent(&self) -> Option<f64> {
        match self.kind {
            Kind::Power(p) => Some(p),
            Kind::IndicatorInfty => Some(f64::INFINITY),
            _ => None,
        }
    }

    /// Checked evaluation.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("Young functions live on [0, inf], got {t}")));
        }
        Ok(self.phi(t))
    }

    /// Unchecked evaluation for `t >= 0` (including `+inf`).
    pub fn phi(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        if t == f64::INFINITY {
            return f64::INFINITY;
        }
        match &self.kind {
            Kind::Power(p) => t.powf(*p),
            Kind::IndicatorInfty => {
                if t <= 1.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Kind::ExpMinusOne => t.exp_m1(),
            Kind::ExpMinusOneMinusT => {
                if t < 1e-4 {
                    // series avoids cancellation near zero
                    t * t * (0.5 + t * (1.0 / 6.0 + t / 24.0))
                } else {
                    t.exp_m1() - t
                }
            }
            Kind::Tabulated(table) => table.eval(t),
            Kind::NumericConjugate(base) => legendre(base, t),
        }
    }

    /// The conjugate Young function.
    ///
    /// Powers map to the dual exponent (`t^p -> t^p'`, `t -> indicator`), the
    /// Lebesgue-dual normalization under which `L^p` and `L^p'` pair isometrically.
    /// Other kinds get a numeric Legendre transform, which is one-sided:
    /// it never exceeds the true sup.
    pub fn conjugate(&self) -> YoungFunction {
        match &self.kind {
            Kind::Power(p) if *p == 1.0 => Self::indicator_infty(),
            Kind::Power(p) => Self { kind: Kind::Power(p / (p - 1.0)) },
            Kind::IndicatorInfty => Self { kind: Kind::Power(1.0) },
            Kind::NumericConjugate(base) => (**base).clone(),
            _ => Self { kind: Kind::NumericConjugate(Box::new(self.clone())) },
        }
    }

    /// `inf { t >= 0 : phi(t) >= s }`.
    pub fn inverse(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if s == f64::INFINITY {
            return f64::INFINITY;
        }
        match self.kind {
            Kind::Power(p) => s.powf(1.0 / p),
            Kind::IndicatorInfty => 1.0,
            Kind::ExpMinusOne => s.ln_1p(),
            _ => bisect_inverse(|t| self.phi(t), s),
        }
    }

    /// True when `phi(t) > 0` for every `t > 0`.
    pub fn is_positive(&self) -> bool {
        match &self.kind {
            Kind::IndicatorInfty => false,
            Kind::Tabulated(table) => table.nodes[1].1 > 0.0,
            Kind::NumericConjugate(base) => {
                // the conjugate vanishes near 0 exactly when the base has a linear
                // part with positive slope at the origin
                self.phi(1e-9) > 0.0 || base.phi(1e-9) == 0.0
            }
            _ => true,
        }
    }
}

impl fmt::Display for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Power(p) => write!(f, "p:{p}"),
            Kind::IndicatorInfty => write!(f, "pinf"),
            Kind::ExpMinusOne => write!(f, "exp"),
            Kind::ExpMinusOneMinusT => write!(f, "exp1"),
            Kind::Tabulated(t) => write!(f, "table[{}]", t.nodes.len()),
            Kind::NumericConjugate(b) => write!(f, "conj({b})"),
        }
    }
}

const GRAMMAR: &str = "expected one of p:<real >= 1>, pinf, exp, exp1";

impl FromStr for YoungFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pinf" => Ok(Self::indicator_infty()),
            "exp" => Ok(Self::exp_minus_one()),
            "exp1" => Ok(Self::exp_minus_one_minus_t()),
            _ => {
                let rest = s
                    .strip_prefix("p:")
                    .ok_or_else(|| Error::Parse(format!("unknown Young spec '{s}': {GRAMMAR}")))?;
                let p: f64 = rest
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in '{s}': {GRAMMAR}")))?;
                Self::power(p).map_err(|e| Error::Parse(format!("{e}: {GRAMMAR}")))
            }
        }
    }
}

fn bisect_inverse(phi: impl Fn(f64) -> f64, s: f64) -> f64 {
    let mut hi = 1.0;
    while phi(hi) < s {
        hi *= 2.0;
        if hi > 1e300 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..BISECT_MAX_ITER {
        if hi - lo <= BISECT_REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if phi(mid) >= s {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `sup_{s >= 0} (s t - phi(s))` on a log grid, refined by golden section.
fn legendre(base: &YoungFunction, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let objective = |s: f64| {
        let v = base.phi(s);
        if v == f64::INFINITY {
            f64::NEG_INFINITY
        } else {
            s * t - v
        }
    };
    // grow until the secant slope of phi exceeds t; past 2*s_max the objective decreases
    let mut s_max = 1.0;
    loop {
        let (a, b) = (base.phi(s_max), base.phi(2.0 * s_max));
        if b == f64::INFINITY || b - a >= t * s_max {
            break;
        }
        s_max *= 2.0;
        if s_max > 1e300 {
            return f64::INFINITY;
        }
    }
    let hi = 2.0 * s_max;
    let grid: Vec<f64> = std::iter::once(0.0)
        .chain((0..CONJUGATE_GRID).map(|i| {
            let frac = i as f64 / (CONJUGATE_GRID - 1) as f64;
            hi * 10f64.powf(-12.0 * (1.0 - frac))
        }))
        .collect();
    let (mut best_i, mut best) = (0, 0.0);
    for (i, &s) in grid.iter().enumerate() {
        let v = objective(s);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = if best_i == 0 { 0.0 } else { grid[best_i - 1] };
    let up = if best_i + 1 < grid.len() { grid[best_i + 1] } else { hi };
    best.max(golden_max(objective, lo, up))
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * b.abs().max(1e-300) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// A Young function of order `r` in (0, 1]: `t -> base(t^r)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiYoungFunction {
    pub base: YoungFunction,
    pub order: f64,
}

impl QuasiYoungFunction {
    pub fn new(base: YoungFunction, order: f64) -> Result<Self> {
        if !(order > 0.0 && order <= 1.0) {
            return Err(Error::Domain(format!("quasi-Young order must lie in (0, 1], got {order}")));
        }
        Ok(Self { base, order })
    }

    pub fn conjugate(&self) -> Result<YoungFunction> {
        if self.order < 1.0 {
            return Err(Error::Unsupported(
                "conjugation is defined only for Young functions (order 1)".into(),
            ));
        }
        Ok(self.base.conjugate())
    }
}

impl From<YoungFunction> for QuasiYoungFunction {
    fn from(base: YoungFunction) -> Self {
        Self { base, order: 1.0 }
    }
}

/// Common interface of Young and quasi-Young gauges.
pub trait Gauge: Sync {
    fn value(&self, t: f64) -> f64;
    fn inverse(&self, s: f64) -> f64;
    fn order(&self) -> f64;
    fn base(&self) -> &YoungFunction;
}

impl Gauge for YoungFunction {
    fn value(&self, t: f64) -> f64 {
        self.phi(t)
    }
    fn inverse(&self, s: f64) -> f64 {
        YoungFunction::inverse(self, s)
    }
    fn order(&self) -> f64 {
        1.0
    }
    fn base(&self) -> &YoungFunction {
        self
    }
}

impl Gauge for QuasiYoungFunction {
    fn value(&self, t: f64) -> f64 {
        if self.order == 1.0 {
            self.base.phi(t)
        } else {
            self.base.phi(t.powf(self.order))
        }
    }
    fn inverse(&self, s: f64) -> f64 {
        if self.order == 1.0 {
            self.base.inverse(s)
        } else {
            self.base.inverse(s).powf(1.0 / self.order)
        }
    }
    fn order(&self) -> f64 {
        self.order
    }
    fn base(&self) -> &YoungFunction {
        &self.base
    }
}

/// Sup of `phi(2t)/phi(t)` over a log grid of `(T 1e-8, T]`; `None` when unbounded.
pub fn delta2_constant(phi: &dyn Gauge, t_max: f64) -> Option<f64> {
    let mut sup: f64 = 0.0;
    for i in 0..DELTA2_GRID {
        let frac = (i + 1) as f64 / DELTA2_GRID as f64;
        let t = t_max * 10f64.powf(-8.0 * (1.0 - frac));
        let (a, b) = (phi.value(t), phi.value(2.0 * t));
        if a == 0.0 {
            if b > 0.0 {
                return None;
            }
            continue;
        }
        if b == f64::INFINITY {
            return None;
        }
        sup = sup.max(b / a);
    }
    Some(sup)
}

/// Weights `c0, c1, c2` and range `T` for the three-function Young condition
///
/// `t0 t1 t2 <= c1 phi0*(t0) phi1(t1) + c2 phi0*(t0) phi2(t2) + c0 phi1(t1) phi2(t2)`
/// on `[0, T]^3`. `T = inf` means the condition holds globally.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriYoungCondition {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub t_max: f64,
}

/// Weights `c0..cN` and range `T` for
///
/// `t0 ... tN <= (sum_j c_j prod_{m != j} phi_m(t_m)) phi0*(t0) + c0 prod_j phi_j(t_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiYoungCondition {
    pub c: Vec<f64>,
    pub t_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub passed: bool,
    /// Largest `(LHS - RHS) / max(1, LHS)` over the probes, 0 if none is positive.
    pub max_violation: f64,
    pub witness: Vec<f64>,
}

impl ConditionReport {
    fn new() -> Self {
        Self { passed: true, max_violation: 0.0, witness: Vec::new() }
    }

    fn record(&mut self, lhs: f64, rhs: f64, point: &[f64]) {
        if rhs == f64::INFINITY {
            return;
        }
        let v = (lhs - rhs) / lhs.max(1.0);
        if v > self.max_violation {
            self.max_violation = v;
            self.witness = point.to_vec();
        }
        self.passed = self.max_violation <= CONDITION_SLACK;
    }
}

/// Probe points on `[0, T]`: zero, a log-spaced half near the origin and a linear half.
pub fn probe_grid(t_max: f64, probes: usize) -> Vec<f64> {
    let t_max = if t_max.is_finite() { t_max } else { GLOBAL_PROBE_RANGE };
    let n_log = probes / 2;
    let n_lin = probes.saturating_sub(n_log + 1).max(1);
    let mut pts = vec![0.0];
    for i in 0..n_log {
        let frac = i as f64 / (n_log.max(2) - 1) as f64;
        pts.push(t_max * 10f64.powf(-6.0 * (1.0 - frac)));
    }
    for k in 1..=n_lin {
        pts.push(t_max * k as f64 / n_lin as f64);
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

pub fn verify_tri_condition(
    phi0: &YoungFunction,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    cond: &TriYoungCondition,
    probes: usize,
) -> Result<ConditionReport> {
    if probes < 16 {
        return Err(Error::Precondition("at least 16 probes per axis".into()));
    }
    let grid = probe_grid(cond.t_max, probes);
    let conj = phi0.conjugate();
    let c0s: Vec<f64> = grid.iter().map(|&t| conj.phi(t)).collect();
    let f1: Vec<f64> = grid.iter().map(|&t| phi1.phi(t)).collect();
    let f2: Vec<f64> = grid.iter().map(|&t| phi2.phi(t)).collect();
    let mut report = ConditionReport::new();
    for (i0, &t0) in grid.iter().enumerate() {
        for (i1, &t1) in grid.iter().enumerate() {
            for (i2, &t2) in grid.iter().enumerate() {
                let lhs = t0 * t1 * t2;
                let rhs = ext_mul(cond.c1, ext_mul(c0s[i0], f1[i1]))
                    + ext_mul(cond.c2, ext_mul(c0s[i0], f2[i2]))
                    + ext_mul(cond.c0, ext_mul(f1[i1], f2[i2]));
                report.record(lhs, rhs, &[t0, t1, t2]);
            }
        }
    }
    Ok(report)
}

pub fn verify_multilinear_condition(
    phis: &[YoungFunction],
    cond: &MultiYoungCondition,
    probes: usize,
) -> Result<ConditionReport> {
    let n = phis.len().saturating_sub(1);
    if !(2..=3).contains(&n) {
        return Err(Error::Unsupported(format!("multilinear grid check needs N in {{2, 3}}, got {n}")));
    }
    if cond.c.len() != n + 1 {
        return Err(Error::Precondition("need N + 1 weights".into()));
    }
    if probes < 8 {
        return Err(Error::Precondition("at least 8 probes per axis".into()));
    }
    let grid = probe_grid(cond.t_max, probes);
    let g = grid.len();
    let conj = phis[0].conjugate();
    let table: Vec<Vec<f64>> = (0..=n)
        .map(|m| {
            grid.iter()
                .map(|&t| if m == 0 { conj.phi(t) } else { phis[m].phi(t) })
                .collect()
        })
        .collect();
    let mut report = ConditionReport::new();
    let total = g.pow((n + 1) as u32);
    let mut idx = vec![0usize; n + 1];
    let mut point = vec![0.0; n + 1];
    for flat in 0..total {
        let mut r = flat;
        for slot in idx.iter_mut() {
            *slot = r % g;
            r /= g;
        }
        for (m, &i) in idx.iter().enumerate() {
            point[m] = grid[i];
        }
        let lhs: f64 = point.iter().product();
        let mut mixed = 0.0;
        for j in 1..=n {
            let mut prod = cond.c[j];
            for m in 1..=n {
                if m != j {
                    prod = ext_mul(prod, table[m][idx[m]]);
                }
            }
            mixed += prod;
        }
        let mut rhs = ext_mul(mixed, table[0][idx[0]]);
        let mut last = cond.c[0];
        for m in 1..=n {
            last = ext_mul(last, table[m][idx[m]]);
        }
        rhs += last;
        report.record(lhs, rhs, &point);
    }
    Ok(report)
}

fn check_lebesgue_relation(sum_inv: f64, target: f64) -> Result<()> {
    if (sum_inv - target).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "Young exponent relation violated: sum of 1/p_j = {sum_inv}, expected {target}"
        )));
    }
    Ok(())
}

fn inv(p: f64) -> f64 {
    if p == f64::INFINITY {
        0.0
    } else {
        1.0 / p
    }
}

/// Weights for [`verify_tri_condition`] on Lebesgue gauges with
/// `1/p1 + 1/p2 = 1 + 1/p0`.
///
/// AM-GM gives `c0 = 1/p0`, `c1 = 1/p2'`, `c2 = 1/p1'`: the weight of a term is
/// the dual exponent of the gauge it omits. With `p0 = 1` the conjugate is the
/// indicator gauge and every mixed weight vanishes, so the condition only holds
/// for `t0 <= 1`; the returned range is then `T = 1`, otherwise `T = inf`.
pub fn lebesgue_constants(p0: f64, p1: f64, p2: f64) -> Result<TriYoungCondition> {
    for p in [p0, p1, p2] {
        if !(p >= 1.0) {
            return Err(Error::Domain(format!("exponent {p} is below 1")));
        }
    }
    check_lebesgue_relation(inv(p1) + inv(p2), 1.0 + inv(p0))?;
    Ok(TriYoungCondition {
        c0: inv(p0),
        c1: 1.0 - inv(p2),
        c2: 1.0 - inv(p1),
        t_max: if p0 == 1.0 { 1.0 } else { f64::INFINITY },
    })
}

/// Weights for [`verify_multilinear_condition`] on Lebesgue gauges with
/// `sum_j 1/p_j = N - 1 + 1/p0`: `c0 = 1/p0` and `c_j = 1/p_j'`.
pub fn lebesgue_multi_constants(p0: f64, ps: &[f64]) -> Result<MultiYoungCondition> {
    let n = ps.len();
    if n < 2 {
        return Err(Error::Precondition("need at least two factors".into()));
    }
    check_lebesgue_relation(ps.iter().map(|&p| inv(p)).sum(), (n - 1) as f64 + inv(p0))?;
    let mut c = vec![inv(p0)];
    c.extend(ps.iter().map(|&p| 1.0 - inv(p)));
    Ok(MultiYoungCondition { c, t_max: if p0 == 1.0 { 1.0 } else { f64::INFINITY } })
}

/// `phi0(t1 t2) <= phi1(t1) + phi2(t2)` on a probe grid of `[0, T]^2`.
pub fn verify_holder_condition(
    phi0: &YoungFunction,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    t_max: f64,
    probes: usize,
) -> ConditionReport {
    let grid = probe_grid(t_max, probes);
    let mut report = ConditionReport::new();
    for &t1 in &grid {
        for &t2 in &grid {
            report.record(phi0.phi(t1 * t2), phi1.phi(t1) + phi2.phi(t2), &[t1, t2]);
        }
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImplicationVariant {
    /// `prod phi_j^{-1}(s) <= C s^{N-1} phi0^{-1}(s)` implies the multilinear
    /// condition with every weight equal to `C`.
    InverseProduct,
    /// `prod phi_j^{-1}(s) <= phi0^{-1}(s)` implies
    /// `phi0(t1 ... tN) <= max_j phi_j(t_j) <= sum_j phi_j(t_j)`.
    Holder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImplicationStatus {
    Verified,
    HypothesisFailed,
    ConclusionFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImplicationReport {
    pub variant: ImplicationVariant,
    pub hypothesis: ConditionReport,
    pub conclusion: Option<ConditionReport>,
    pub status: ImplicationStatus,
}

/// Checks an inverse-product hypothesis on a log grid of `[0, s_max]` and, when it
/// holds, the inequality it implies on a grid of `[0, s_max]^{N+1}`.
pub fn implication_checks(
    phis: &[YoungFunction],
    c: f64,
    s_max: f64,
    probes: usize,
    variant: ImplicationVariant,
) -> Result<ImplicationReport> {
    let n = phis.len().saturating_sub(1);
    if !(2..=3).contains(&n) {
        return Err(Error::Unsupported(format!("needs N in {{2, 3}}, got {n}")));
    }
    let mut hypothesis = ConditionReport::new();
    let s_count = probes.max(16) * 16;
    for i in 0..s_count {
        let frac = i as f64 / (s_count - 1) as f64;
        let s = s_max * 10f64.powf(-8.0 * (1.0 - frac));
        let lhs: f64 = phis[1..].iter().map(|p| p.inverse(s)).product();
        let rhs = match variant {
            ImplicationVariant::InverseProduct => c * s.powi(n as i32 - 1) * phis[0].inverse(s),
            ImplicationVariant::Holder => phis[0].inverse(s),
        };
        // the hypothesis compares small quantities near s = 0, so measure relative to rhs
        let scale = rhs.max(f64::MIN_POSITIVE);
        hypothesis.record(lhs / scale, 1.0, &[s]);
    }
    if !hypothesis.passed {
        return Ok(ImplicationReport {
            variant,
            hypothesis,
            conclusion: None,
            status: ImplicationStatus::HypothesisFailed,
        });
    }
    let conclusion = match variant {
        ImplicationVariant::InverseProduct => verify_multilinear_condition(
            phis,
            &MultiYoungCondition { c: vec![c; n + 1], t_max: s_max },
            probes,
        )?,
        ImplicationVariant::Holder => {
            let grid = probe_grid(s_max, probes);
            let mut report = ConditionReport::new();
            let g = grid.len();
            let mut point = vec![0.0; n];
            for flat in 0..g.pow(n as u32) {
                let mut r = flat;
                for slot in point.iter_mut() {
                    *slot = grid[r % g];
                    r /= g;
                }
                let lhs = phis[0].phi(point.iter().product());
                let max = point
                    .iter()
                    .zip(&phis[1..])
                    .map(|(&t, p)| p.phi(t))
                    .fold(0.0, f64::max);
                report.record(lhs, max, &point);
            }
            report
        }
    };
    let status = if conclusion.passed {
        ImplicationStatus::Verified
    } else {
        ImplicationStatus::ConclusionFailed
    };
    Ok(ImplicationReport { variant, hypothesis, conclusion: Some(conclusion), status })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64) -> YoungFunction {
        YoungFunction::lebesgue(x).unwrap()
    }

    #[test]
    fn evaluates_builtin_kinds() {
        assert_eq!(p(2.0).eval(3.0).unwrap(), 9.0);
        assert_eq!(p(f64::INFINITY).eval(0.5).unwrap(), 0.0);
        assert_eq!(p(f64::INFINITY).eval(2.0).unwrap(), f64::INFINITY);
        let e = YoungFunction::exp_minus_one().eval(1.0).unwrap();
        assert!((e - 1.718281828459045).abs() < 1e-15);
        assert!(p(2.0).eval(-1.0).is_err());
        assert_eq!(p(3.0).eval(f64::INFINITY).unwrap(), f64::INFINITY);
    }

    #[test]
    fn infinity_times_zero_is_zero() {
        assert_eq!(ext_mul(f64::INFINITY, 0.0), 0.0);
        assert_eq!(ext_mul(0.0, f64::INFINITY), 0.0);
        assert_eq!(ext_mul(2.0, f64::INFINITY), f64::INFINITY);
    }

    #[test]
    fn analytic_conjugates() {
        assert_eq!(p(2.0).conjugate(), p(2.0));
        assert_eq!(p(1.0).conjugate(), p(f64::INFINITY));
        assert_eq!(p(f64::INFINITY).conjugate(), p(1.0));
        assert_eq!(p(3.0).conjugate(), p(1.5));
    }

    #[test]
    fn numeric_conjugate_matches_closed_forms() {
        let c = YoungFunction::exp_minus_one_minus_t().conjugate();
        for t in [0.5, 1.0, 2.0] {
            let exact = (1.0 + t) * (1.0f64 + t).ln() - t;
            let got = c.phi(t);
            assert!(((got - exact) / exact).abs() < 1e-8, "t={t}: {got} vs {exact}");
            assert!(got <= exact * (1.0 + 1e-14));
        }
        let c = YoungFunction::exp_minus_one().conjugate();
        for t in [0.25f64, 1.0, 3.0, 10.0] {
            let exact = if t <= 1.0 { 0.0 } else { t * t.ln() - t + 1.0 };
            assert!((c.phi(t) - exact).abs() <= 1e-8 * exact.max(1.0));
        }
        assert_eq!(c.conjugate(), YoungFunction::exp_minus_one());
    }

    #[test]
    fn inverses() {
        for q in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            assert_eq!(p(q).inverse(1.0), 1.0);
        }
        assert_eq!(p(2.0).inverse(4.0), 2.0);
        assert_eq!(p(2.0).inverse(0.0), 0.0);
        let table = Table::new(vec![(0.0, 0.0), (1.0, 0.0), (1.0 + 1e-12, 1e12)]).unwrap();
        let ind = YoungFunction::tabulated(table);
        assert!((ind.inverse(1.0) - 1.0).abs() < 1e-12);
        let e1 = YoungFunction::exp_minus_one_minus_t();
        let s = 0.3;
        let t = e1.inverse(s);
        assert!(e1.phi(t) >= s && e1.phi(t * (1.0 - 1e-10)) <= s);
    }

    #[test]
    fn quasi_young_reduces_and_composes() {
        let q = QuasiYoungFunction::new(p(1.0), 0.5).unwrap();
        assert_eq!(q.value(4.0), 2.0);
        assert!((q.inverse(3.0) - 9.0).abs() < 1e-12);
        let one: QuasiYoungFunction = p(2.0).into();
        assert_eq!(one.value(3.0), 9.0);
        assert!(q.conjugate().is_err());
        assert!(QuasiYoungFunction::new(p(1.0), 0.0).is_err());
    }

    #[test]
    fn delta2_constants() {
        for q in [1.0, 1.5, 2.0, 4.0] {
            let c = delta2_constant(&p(q), 3.0).unwrap();
            assert!((c - 2f64.powf(q)).abs() < 1e-12);
        }
        assert_eq!(delta2_constant(&p(f64::INFINITY), 1.0), None);
        let c = delta2_constant(&YoungFunction::exp_minus_one(), 1.0).unwrap();
        assert!((c - (1f64.exp() + 1.0)).abs() < 1e-12);
        assert!(!p(f64::INFINITY).is_positive());
        assert!(p(1.0).is_positive());
    }

    #[test]
    fn tri_condition_examples() {
        let cond = TriYoungCondition { c0: 0.0, c1: 0.5, c2: 0.5, t_max: 10.0 };
        let r = verify_tri_condition(&p(f64::INFINITY), &p(2.0), &p(2.0), &cond, 16).unwrap();
        assert!(r.passed);

        let cond = TriYoungCondition { c0: 1.0, c1: 0.0, c2: 0.0, t_max: 1.0 };
        assert!(verify_tri_condition(&p(1.0), &p(1.0), &p(1.0), &cond, 16).unwrap().passed);
        let cond = TriYoungCondition { t_max: 2.0, ..cond };
        let r = verify_tri_condition(&p(1.0), &p(1.0), &p(1.0), &cond, 16).unwrap();
        assert!(!r.passed);
        assert_eq!(r.witness[0], 2.0);
        assert!(r.witness[1] * r.witness[2] >= 0.5 - 1e-12);
    }

    #[test]
    fn lebesgue_weights() {
        let c = lebesgue_constants(1.0, 1.0, 1.0).unwrap();
        assert_eq!((c.c0, c.c1, c.c2), (1.0, 0.0, 0.0));
        let c = lebesgue_constants(f64::INFINITY, 2.0, 2.0).unwrap();
        assert_eq!((c.c0, c.c1, c.c2), (0.0, 0.5, 0.5));
        let c = lebesgue_constants(2.0, 2.0, 1.0).unwrap();
        assert_eq!((c.c0, c.c1, c.c2), (0.5, 0.0, 0.5));
        assert!(verify_tri_condition(&p(2.0), &p(2.0), &p(1.0), &c, 24).unwrap().passed);
        // the assignment with the two mixed weights exchanged fails near t1 = 0
        let swapped = TriYoungCondition { c1: 0.5, c2: 0.0, ..c };
        assert!(!verify_tri_condition(&p(2.0), &p(2.0), &p(1.0), &swapped, 24).unwrap().passed);
        assert!(lebesgue_constants(2.0, 2.0, 2.0).is_err());
    }

    #[test]
    fn multilinear_reduces_to_tri_with_exchanged_mixed_weights() {
        let phis = [p(2.0), p(2.0), p(1.0)];
        let tri = lebesgue_constants(2.0, 2.0, 1.0).unwrap();
        let multi = MultiYoungCondition { c: vec![tri.c0, tri.c2, tri.c1], t_max: tri.t_max };
        let a = verify_tri_condition(&phis[0], &phis[1], &phis[2], &tri, 16).unwrap();
        let b = verify_multilinear_condition(&phis, &multi, 16).unwrap();
        assert_eq!(a, b);
        assert_eq!(lebesgue_multi_constants(2.0, &[2.0, 1.0]).unwrap(), multi);
    }

    #[test]
    fn multilinear_examples() {
        let inf = p(f64::INFINITY);
        // all indicator gauges: the right side vanishes on [0, 1] while t0 t1 t2 t3 does not
        let cond = MultiYoungCondition { c: vec![1.0; 4], t_max: 1.0 };
        let phis = vec![inf.clone(); 4];
        assert!(!verify_multilinear_condition(&phis, &cond, 8).unwrap().passed);
        let phis = vec![inf.clone(), p(1.0), p(1.0), p(1.0)];
        assert!(verify_multilinear_condition(&phis, &cond, 8).unwrap().passed);

        let phis = vec![p(1.0); 4];
        let cond = MultiYoungCondition { c: vec![1.0, 0.0, 0.0, 0.0], t_max: 2.0 };
        let r = verify_multilinear_condition(&phis, &cond, 8).unwrap();
        assert!(!r.passed);
        assert_eq!(r.witness[0], 2.0);
        assert!(verify_multilinear_condition(&vec![p(1.0); 5], &cond, 8).is_err());

        for (p0, ps) in [(f64::INFINITY, vec![1.0, 2.0, 2.0]), (2.0, vec![1.0, 1.0, 2.0])] {
            let cond = lebesgue_multi_constants(p0, &ps).unwrap();
            let mut phis = vec![p(p0)];
            phis.extend(ps.iter().map(|&q| p(q)));
            assert!(verify_multilinear_condition(&phis, &cond, 10).unwrap().passed);
        }
    }

    #[test]
    fn implication_examples() {
        let r = implication_checks(&[p(1.0), p(2.0), p(2.0)], 1.0, 10.0, 24, ImplicationVariant::Holder)
            .unwrap();
        assert_eq!(r.status, ImplicationStatus::Verified);

        let r = implication_checks(
            &[p(f64::INFINITY), p(2.0), p(2.0)],
            1.0,
            10.0,
            24,
            ImplicationVariant::InverseProduct,
        )
        .unwrap();
        assert_eq!(r.status, ImplicationStatus::Verified);

        let r = implication_checks(&[p(1.0), p(2.0), p(2.0)], 1.0, 10.0, 24, ImplicationVariant::InverseProduct)
            .unwrap();
        assert_eq!(r.status, ImplicationStatus::HypothesisFailed);
        assert!(r.hypothesis.witness[0] < 1.0);
    }

    #[test]
    fn parses_mini_language() {
        assert_eq!("p:2".parse::<YoungFunction>().unwrap(), p(2.0));
        assert_eq!("pinf".parse::<YoungFunction>().unwrap(), p(f64::INFINITY));
        assert_eq!("exp".parse::<YoungFunction>().unwrap(), YoungFunction::exp_minus_one());
        assert_eq!("exp1".parse::<YoungFunction>().unwrap(), YoungFunction::exp_minus_one_minus_t());
        for bad in ["P:2", "p:0.5", "q", "p:x"] {
            let err = bad.parse::<YoungFunction>().unwrap_err();
            assert!(err.to_string().contains("pinf"), "{err}");
        }
        assert_eq!(p(1.5).to_string(), "p:1.5");
    }
}
