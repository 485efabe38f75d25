//! Luxemburg norms over weighted counting measures and Orlicz-Hölder pairings.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::young::{Gauge, YoungFunction};

const LUX_REL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedMeasure {
    weights: Vec<f64>,
}

impl WeightedMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::Precondition("measure weights must be positive and finite".into()));
        }
        Ok(Self { weights })
    }

    pub fn counting(len: usize) -> Self {
        Self { weights: vec![1.0; len] }
    }

    /// Equal weights, e.g. `h^2` for quadrature on a phase-space grid.
    pub fn uniform(len: usize, weight: f64) -> Self {
        assert!(weight > 0.0 && weight.is_finite());
        Self { weights: vec![weight; len] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    pub values: Vec<Complex64>,
    pub measure: WeightedMeasure,
}

impl SampledFunction {
    pub fn new(values: Vec<Complex64>, measure: WeightedMeasure) -> Result<Self> {
        if values.len() != measure.len() {
            return Err(Error::Precondition("values and weights differ in length".into()));
        }
        Ok(Self { values, measure })
    }

    pub fn counting(values: Vec<Complex64>) -> Self {
        let measure = WeightedMeasure::counting(values.len());
        Self { values, measure }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::counting(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn luxemburg_norm(&self, phi: &dyn Gauge) -> f64 {
        let abs: Vec<f64> = self.values.iter().map(|v| v.norm()).collect();
        luxemburg_abs(&abs, Some(self.measure.weights()), phi)
    }
}

/// Luxemburg norm `inf { l > 0 : sum_i w_i phi(|f_i| / l) <= 1 }` of `|f_i|`.
///
/// `weights = None` means counting measure. Quasi-Young gauges of order `r` are
/// handled as `|| |f|^r ||^{1/r}` under the base function.
pub fn luxemburg_abs(abs: &[f64], weights: Option<&[f64]>, phi: &dyn Gauge) -> f64 {
    let r = phi.order();
    if r != 1.0 {
        let powered: Vec<f64> = abs.iter().map(|&a| a.powf(r)).collect();
        return luxemburg_abs(&powered, weights, phi.base()).powf(1.0 / r);
    }
    let base = phi.base();
    let peak = abs.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let gauge = |lambda: f64| -> f64 {
        let mut total = 0.0;
        for (i, &a) in abs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let w = weights.map_or(1.0, |w| w[i]);
            total += w * base.phi(a / lambda);
            if total > 1.0 {
                break;
            }
        }
        total
    };
    let mut hi = peak * 1e-6;
    while gauge(hi) > 1.0 {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    // a very flat gauge can already be below one at the starting point
    let mut guard = 0;
    while gauge(lo) <= 1.0 && guard < 2000 {
        hi = lo;
        lo /= 2.0;
        guard += 1;
    }
    while hi - lo > LUX_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if gauge(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// The gauge sum `sum_i w_i phi(|f_i| / lambda)`.
pub fn gauge_sum(f: &SampledFunction, phi: &dyn Gauge, lambda: f64) -> f64 {
    f.values
        .iter()
        .zip(f.measure.weights())
        .map(|(v, w)| w * phi.value(v.norm() / lambda))
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pairing {
    pub pairing: Complex64,
    /// `2 ||f||_phi ||g||_phi*`.
    pub bound: f64,
}

pub fn holder_pairing(f: &SampledFunction, g: &SampledFunction, phi: &YoungFunction) -> Result<Pairing> {
    if f.measure != g.measure {
        return Err(Error::Precondition("pairing needs a shared measure".into()));
    }
    let pairing = f
        .values
        .iter()
        .zip(&g.values)
        .zip(f.measure.weights())
        .map(|((a, b), w)| a * b.conj() * *w)
        .sum();
    let bound = 2.0 * f.luxemburg_norm(phi) * g.luxemburg_norm(&phi.conjugate());
    Ok(Pairing { pairing, bound })
}

/// Norming functional of `f` in the Lebesgue case: `||g||_{p'} = 1` and
/// `sum_i w_i f_i conj(g_i) = ||f||_p`.
pub fn dual_witness(f: &SampledFunction, p: f64) -> Result<SampledFunction> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("exponent {p} is below 1")));
    }
    let abs: Vec<f64> = f.values.iter().map(|v| v.norm()).collect();
    let peak = abs.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::Precondition("the zero function has no norming functional".into()));
    }
    let phase = |v: Complex64| if v.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { v / v.norm() };
    let values = if p == f64::INFINITY {
        let k = abs.iter().position(|&a| a == peak).unwrap();
        let mut g = vec![Complex64::new(0.0, 0.0); abs.len()];
        g[k] = phase(f.values[k]) / f.measure.weights()[k];
        g
    } else if p == 1.0 {
        f.values.iter().map(|&v| phase(v)).collect()
    } else {
        let norm = f.luxemburg_norm(&YoungFunction::power(p)?);
        f.values
            .iter()
            .map(|&v| phase(v) * (v.norm() / norm).powf(p - 1.0))
            .collect()
    };
    SampledFunction::new(values, f.measure.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young::QuasiYoungFunction;

    fn p(x: f64) -> YoungFunction {
        YoungFunction::lebesgue(x).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let f = SampledFunction::from_real(&[3.0, 4.0]);
        assert!((f.luxemburg_norm(&p(2.0)) - 5.0).abs() < 1e-10);
        let ones = SampledFunction::from_real(&[1.0; 7]);
        assert!((ones.luxemburg_norm(&p(f64::INFINITY)) - 1.0).abs() < 1e-11);
        let q = QuasiYoungFunction::new(p(1.0), 0.5).unwrap();
        let two = SampledFunction::from_real(&[1.0, 1.0]);
        assert!((two.luxemburg_norm(&q) - 4.0).abs() < 1e-10);
        assert_eq!(SampledFunction::from_real(&[]).luxemburg_norm(&p(2.0)), 0.0);
        assert_eq!(SampledFunction::from_real(&[0.0, 0.0]).luxemburg_norm(&p(2.0)), 0.0);
    }

    #[test]
    fn single_entry_norm_uses_inverse_at_one() {
        let f = SampledFunction::from_real(&[2.5]);
        for phi in [p(1.0), p(3.0), YoungFunction::exp_minus_one(), YoungFunction::exp_minus_one_minus_t()] {
            let expect = 2.5 / phi.inverse(1.0);
            assert!((f.luxemburg_norm(&phi) - expect).abs() < 1e-10 * expect, "{phi}");
        }
    }

    #[test]
    fn weighted_measure_scales_like_lp() {
        let m = WeightedMeasure::uniform(3, 0.25);
        let f = SampledFunction::new(vec![Complex64::new(1.0, 1.0); 3], m).unwrap();
        let expect = (0.75f64 * 2.0).sqrt();
        assert!((f.luxemburg_norm(&p(2.0)) - expect).abs() < 1e-11);
        assert!(WeightedMeasure::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn pairing_examples() {
        let one = SampledFunction::from_real(&[1.0]);
        let r = holder_pairing(&one, &one, &p(2.0)).unwrap();
        assert!((r.pairing.re - 1.0).abs() < 1e-15 && (r.bound - 2.0).abs() < 1e-10);
        let f = SampledFunction::from_real(&[3.0, 4.0]);
        let g = SampledFunction::from_real(&[0.6, 0.8]);
        let r = holder_pairing(&f, &g, &p(2.0)).unwrap();
        assert!((r.pairing.re - 5.0).abs() < 1e-12 && (r.bound - 10.0).abs() < 1e-9);
        let w = SampledFunction::new(vec![Complex64::new(1.0, 0.0)], WeightedMeasure::uniform(1, 2.0)).unwrap();
        assert!(holder_pairing(&one, &w, &p(2.0)).is_err());
    }

    #[test]
    fn witnesses() {
        let f = SampledFunction::from_real(&[3.0, 4.0]);
        let g = dual_witness(&f, 2.0).unwrap();
        assert!((g.values[0].re - 0.6).abs() < 1e-12 && (g.values[1].re - 0.8).abs() < 1e-12);
        let f = SampledFunction::from_real(&[2.0, 1.0]);
        let g = dual_witness(&f, f64::INFINITY).unwrap();
        assert_eq!(g.values[0].re, 1.0);
        assert_eq!(g.values[1].re, 0.0);
        assert!(dual_witness(&SampledFunction::from_real(&[0.0]), 2.0).is_err());
    }
}
