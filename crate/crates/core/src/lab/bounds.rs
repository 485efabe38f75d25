//! Convolution bounds with fixed constants, Wigner-family convolution bounds,
//! band-limited norm equivalence and Toeplitz checks.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::inputs::{hermite_mixture, random_symbol, symbol_digest, wave_digest, SplitMix64};
use super::{case_id, fmt_exp, l_norm, lebesgue, par_cases, s_norm, spectrum, CaseResult, SuiteConfig};
use crate::error::Result;
use crate::phasegrid::{convolve, fourier2, hermite, GridSpec, PhaseSymbol, C64};
use crate::schatten::{positivity_check, singular_values};
use crate::toeplitz::{toeplitz_direct_entry, toeplitz_orlicz_bound, toeplitz_via_convolution, WindowPair};
use crate::weyl::{wigner, QuantizationIndex};
use crate::young::{lebesgue_constants, verify_tri_condition, ConditionReport, TriYoungCondition, YoungFunction};

const CONDITION_PROBES: usize = 24;

/// Lebesgue exponents `(p0, p1, p2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvTriple(pub [f64; 3]);

pub const CONV_TRIPLES: [ConvTriple; 4] = [
    ConvTriple([1.0, 1.0, 1.0]),
    ConvTriple([f64::INFINITY, 2.0, 2.0]),
    ConvTriple([2.0, 2.0, 1.0]),
    ConvTriple([1.5, 1.0, 1.5]),
];

impl ConvTriple {
    pub fn label(&self) -> String {
        let p = self.0;
        format!("({},{},{})", fmt_exp(p[0]), fmt_exp(p[1]), fmt_exp(p[2]))
    }

    pub fn gauges(&self) -> [YoungFunction; 3] {
        self.0.map(lebesgue)
    }

    /// Weights from the Lebesgue formula, confirmed on a probe grid.
    pub fn condition(&self) -> Result<(TriYoungCondition, ConditionReport)> {
        let p = self.0;
        let cond = lebesgue_constants(p[0], p[1], p[2])?;
        let [f0, f1, f2] = self.gauges();
        let report = verify_tri_condition(&f0, &f1, &f2, &cond, CONDITION_PROBES)?;
        Ok((cond, report))
    }
}

/// The fixed triples whose exponents all occur in the catalog.
pub(crate) fn catalog_triples(cfg: &SuiteConfig) -> Result<Vec<ConvTriple>> {
    let ex = cfg.catalog_exponents()?;
    Ok(CONV_TRIPLES.iter().copied().filter(|t| t.0.iter().all(|p| ex.contains(p))).collect())
}

fn with_condition(c: CaseResult, cond: &TriYoungCondition) -> CaseResult {
    c.with("c0", cond.c0).with("c1", cond.c1).with("c2", cond.c2).with("t_max", fmt_exp(cond.t_max))
}

const CONV1_PAIRS: [(QuantizationIndex, QuantizationIndex); 3] = [
    (QuantizationIndex::WEYL, QuantizationIndex::WEYL),
    (QuantizationIndex::KOHN_NIRENBERG, QuantizationIndex::ANTI),
    (QuantizationIndex::ANTI, QuantizationIndex::KOHN_NIRENBERG),
];

const INDICES: [QuantizationIndex; 3] =
    [QuantizationIndex::KOHN_NIRENBERG, QuantizationIndex::WEYL, QuantizationIndex::ANTI];

/// `||a1 * a2||_{L^phi0} <= 2 (2 pi c0 + c1 + c2) ||a1||_{s_{A1,phi1}} ||a2||_{s_{A2,phi2}}`, `A1 + A2 = 1`.
pub fn suite_conv1(cfg: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let grid = cfg.grid()?;
    let triples = catalog_triples(cfg)?;
    let conditions: Vec<_> = triples.iter().map(|t| t.condition()).collect::<Result<_>>()?;
    par_cases(cfg.cases, |i| {
        let (a1i, a2i) = CONV1_PAIRS[i % 3];
        let a1 = random_symbol(cfg.seed, 2 * i as u64, grid);
        let a2 = random_symbol(cfg.seed, 2 * i as u64 + 1, grid);
        let dig = symbol_digest(&[&a1, &a2]);
        let (s1, s2) = (spectrum(&a1, a1i)?, spectrum(&a2, a2i)?);
        let c = convolve(&a1, &a2)?;
        let mut rows = Vec::new();
        for (t, (cond, report)) in triples.iter().zip(&conditions) {
            let id = case_id(i, &format!("{} A=({a1i},{a2i})", t.label()));
            if !report.passed {
                rows.push(CaseResult::skipped(id, dig.clone(), format!("condition violated by {:.3e}", report.max_violation)));
                continue;
            }
            let [f0, f1, f2] = t.gauges();
            let lhs = l_norm(&c, &f0);
            let constant = 2.0 * (2.0 * PI * cond.c0 + cond.c1 + cond.c2);
            let bound = constant * s_norm(&s1, &f1) * s_norm(&s2, &f2);
            rows.push(with_condition(CaseResult::inequality(id, dig.clone(), lhs, bound, cfg.tolerances.ratio), cond));
        }
        Ok(rows)
    })
}

/// `||a1 * a2||_{s_{A,phi0}} <= 2 (c0 + c1 + 2 pi c2) ||a1||_{s_{A,phi1}} ||a2||_{L^phi2}`.
pub fn suite_conv2(cfg: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let grid = cfg.grid()?;
    let triples = catalog_triples(cfg)?;
    let conditions: Vec<_> = triples.iter().map(|t| t.condition()).collect::<Result<_>>()?;
    par_cases(cfg.cases, |i| {
        let idx = INDICES[i % 3];
        let a1 = random_symbol(cfg.seed, 2 * i as u64, grid);
        let a2 = random_symbol(cfg.seed, 2 * i as u64 + 1, grid);
        let dig = symbol_digest(&[&a1, &a2]);
        let s1 = spectrum(&a1, idx)?;
        let sc = spectrum(&convolve(&a1, &a2)?, idx)?;
        let mut rows = Vec::new();
        for (t, (cond, report)) in triples.iter().zip(&conditions) {
            let id = case_id(i, &format!("{} A={idx}", t.label()));
            if !report.passed {
                rows.push(CaseResult::skipped(id, dig.clone(), format!("condition violated by {:.3e}", report.max_violation)));
                continue;
            }
            let [f0, f1, f2] = t.gauges();
            let lhs = s_norm(&sc, &f0);
            let constant = 2.0 * (cond.c0 + cond.c1 + 2.0 * PI * cond.c2);
            let bound = constant * s_norm(&s1, &f1) * l_norm(&a2, &f2);
            rows.push(with_condition(CaseResult::inequality(id, dig.clone(), lhs, bound, cfg.tolerances.ratio), cond));
        }
        Ok(rows)
    })
}

pub const FAMILY_SIZE: usize = 6;

fn permutation(rng: &mut SplitMix64, j: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..j).collect();
    rng.shuffle(&mut p);
    p
}

/// Bounds on `h_{jk} = |W_{f2j,f1j} * W_{g2k,g1k}|` for orthonormal Hermite families.
pub(crate) fn schatt_exp_rows(
    grid: GridSpec,
    families: [&[usize]; 4],
    i: usize,
    label: &str,
    tol: f64,
) -> Result<Vec<CaseResult>> {
    let hs: Vec<_> = (0..=families.iter().flat_map(|f| f.iter()).copied().max().unwrap_or(0))
        .map(|n| hermite(n, grid))
        .collect::<Result<_>>()?;
    let [f1, f2, g1, g2] = families;
    let w: Vec<PhaseSymbol> =
        f1.iter().zip(f2).map(|(&a, &b)| wigner(&hs[b], &hs[a], QuantizationIndex::WEYL)).collect::<Result<_>>()?;
    let v: Vec<PhaseSymbol> =
        g1.iter().zip(g2).map(|(&a, &b)| wigner(&hs[b], &hs[a], QuantizationIndex::WEYL)).collect::<Result<_>>()?;
    let n = grid.n;
    let (jn, kn) = (w.len(), v.len());
    let mut sum_j = vec![DMatrix::<f64>::zeros(n, n); kn];
    let mut sum_k = vec![DMatrix::<f64>::zeros(n, n); jn];
    let mut l1_max: f64 = 0.0;
    for (j, wj) in w.iter().enumerate() {
        for (k, vk) in v.iter().enumerate() {
            let h = convolve(wj, vk)?.values.map(|z| z.norm());
            l1_max = l1_max.max(h.sum() * grid.h * grid.h);
            sum_j[k] += &h;
            sum_k[j] += &h;
        }
    }
    let max_of = |ms: &[DMatrix<f64>]| ms.iter().map(|m| m.max()).fold(0.0, f64::max);
    let fam: Vec<String> = families.iter().map(|f| format!("{f:?}")).collect();
    let dig = super::inputs::digest(&[w[0].values.as_slice(), v[0].values.as_slice()]);
    Ok(vec![
        CaseResult::inequality(case_id(i, &format!("{label} sum_j")), dig.clone(), max_of(&sum_j), 1.0, tol)
            .with("families", fam.join(" ")),
        CaseResult::inequality(case_id(i, &format!("{label} sum_k")), dig.clone(), max_of(&sum_k), 1.0, tol),
        CaseResult::inequality(case_id(i, &format!("{label} l1")), dig, l1_max, 2.0 * PI, tol),
    ])
}

pub fn suite_conv_schatt_exp(cfg: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let grid = cfg.grid()?;
    let j = FAMILY_SIZE.min(grid.n / 4 + 1);
    let tol = cfg.tolerances.ratio;
    let mut rows = schatt_exp_rows(grid, [&[0], &[0], &[0], &[0]], 0, "gaussian", tol)?;
    // a single Gaussian pair saturates the L^1 bound: h = e^{-|X|^2/2}
    rows[2] = rows[2].clone().with("closed_form_l1", 2.0 * PI);
    rows.extend(par_cases(cfg.cases, |i| {
        let mut rng = SplitMix64::keyed(cfg.seed, i as u64, 30);
        let fams: Vec<Vec<usize>> = (0..4).map(|_| permutation(&mut rng, j)).collect();
        schatt_exp_rows(grid, [&fams[0], &fams[1], &fams[2], &fams[3]], i + 1, &format!("J={j}"), tol)
    })?);
    Ok(rows)
}

const BAND_EDGE: f64 = 9.0;
const BAND_SOFTNESS: f64 = 1.0;

/// Per-axis Fourier profile of the reproducing symbol: 1 on `|zeta| < R - 3 sigma`, 0 beyond `R + 3 sigma`.
fn band_profile(zeta: f64) -> f64 {
    0.5 * (libm::erf((zeta + BAND_EDGE) / BAND_SOFTNESS) - libm::erf((zeta - BAND_EDGE) / BAND_SOFTNESS))
}

/// Symbol `b` with unitary Fourier transform equal to the product profile, so
/// that `a * b = 2 pi a` for every `a` with Fourier support inside the plateau.
pub fn reproducing_symbol(grid: GridSpec) -> PhaseSymbol {
    let bhat = PhaseSymbol::from_fn(grid, |z1, z2| C64::new(band_profile(z1) * band_profile(z2), 0.0));
    fourier2(&bhat, 1)
}

/// Sum of three modulated Gaussians of width 1.5, centers `|Z| <= 2`, frequencies `|Xi| <= 1`.
pub fn bandlimited_symbol(rng: &mut SplitMix64, grid: GridSpec) -> PhaseSymbol {
    let mut disk = |r: f64| loop {
        let (x, y) = (rng.uniform(-r, r), rng.uniform(-r, r));
        if x * x + y * y <= r * r {
            return (x, y);
        }
    };
    let terms: Vec<_> = (0..3).map(|_| (disk(2.0), disk(1.0))).collect();
    let amps: Vec<C64> = (0..3).map(|_| rng.complex_normal()).collect();
    PhaseSymbol::from_fn(grid, |x, xi| {
        terms
            .iter()
            .zip(&amps)
            .map(|(((z1, z2), (f1, f2)), c)| {
                let r2 = (x - z1).powi(2) + (xi - z2).powi(2);
                c * C64::from_polar((-r2 / (2.0 * 1.5 * 1.5)).exp(), x * f1 + xi * f2)
            })
            .sum()
    })
}

/// Band-limited symbols: `s_{A,phi}` and `L^phi` norms bound each other through
/// the reproducing symbol `b`.
pub fn suite_bandlimited(cfg: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let grid = cfg.grid()?;
    let b = reproducing_symbol(grid);
    let catalog = cfg.catalog()?;
    let one = lebesgue(1.0);
    let conds: Vec<(ConditionReport, ConditionReport)> = catalog
        .iter()
        .map(|phi| {
            let c1 = TriYoungCondition { c0: 1.0, c1: 1.0, c2: 0.0, t_max: f64::INFINITY };
            let c2 = TriYoungCondition { c0: 1.0, c1: 0.0, c2: 1.0, t_max: f64::INFINITY };
            Ok((
                verify_tri_condition(phi, &one, phi, &c1, CONDITION_PROBES)?,
                verify_tri_condition(phi, phi, &one, &c2, CONDITION_PROBES)?,
            ))
        })
        .collect::<Result<_>>()?;
    let b_spectra: Vec<_> = INDICES.iter().map(|&idx| spectrum(&b, idx)).collect::<Result<_>>()?;
    let tol = cfg.tolerances.ratio;
    par_cases(cfg.cases, |i| {
        let mut rng = SplitMix64::keyed(cfg.seed, i as u64, 40);
        let a = bandlimited_symbol(&mut rng, grid);
        let k = i % 3;
        let (idx, dual) = (INDICES[k], 2 - k);
        let dig = symbol_digest(&[&a]);
        let sa = spectrum(&a, idx)?;
        let b_a = s_norm(&b_spectra[k], &one);
        let b_b = s_norm(&b_spectra[dual], &one);
        let reproduced = convolve(&a, &b)?.scale(C64::new(1.0 / (2.0 * PI), 0.0));
        let repro_err = reproduced.add(&a.scale(C64::new(-1.0, 0.0))).l2_norm() / a.l2_norm();
        let mut rows = Vec::new();
        for (phi, (c1, c2)) in catalog.iter().zip(&conds) {
            let s = s_norm(&sa, phi);
            let l = l_norm(&a, phi);
            let id1 = case_id(i, &format!("{phi} A={idx} s<=L"));
            let id2 = case_id(i, &format!("{phi} A={idx} L<=s"));
            if c1.passed {
                let bound = (2.0 * PI).powf(-0.5) * 4.0 * l * b_a;
                rows.push(CaseResult::inequality(id1, dig.clone(), s, bound, tol).with("reproduction_error", repro_err));
            } else {
                rows.push(CaseResult::skipped(id1, dig.clone(), format!("condition violated by {:.3e}", c1.max_violation)));
            }
            if c2.passed {
                let bound = (2.0 * PI).powf(-0.5) * 2.0 * (2.0 * PI + 1.0) * s * b_b;
                rows.push(CaseResult::inequality(id2, dig.clone(), l, bound, tol));
            } else {
                rows.push(CaseResult::skipped(id2, dig.clone(), format!("condition violated by {:.3e}", c2.max_violation)));
            }
        }
        Ok(rows)
    })
}

pub const TOEPLITZ_MODES: usize = 7;
/// Windows mix the first few Hermite functions: the direct route samples `a(2 .)`,
/// which leaves little bandwidth for rough windows.
pub const WINDOW_MODES: usize = 4;


/// Per case: route agreement on Hermite entries, the Orlicz-Schatten bound and
/// positivity for a nonnegative symbol with equal windows.
pub fn suite_toeplitz(cfg: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let grid = cfg.grid()?;
    let catalog = cfg.catalog()?;
    let modes = TOEPLITZ_MODES.min(grid.n / 4 + 1);
    let hs: Vec<_> = (0..modes).map(|n| hermite(n, grid)).collect::<Result<_>>()?;
    let tol = cfg.tolerances;
    par_cases(cfg.cases, |i| {
        let a = random_symbol(cfg.seed, i as u64, grid);
        let mut rng = SplitMix64::keyed(cfg.seed, i as u64, 45);
        let w = WindowPair::new(hermite_mixture(&mut rng, &hs[..WINDOW_MODES.min(modes)]), hermite_mixture(&mut rng, &hs[..WINDOW_MODES.min(modes)]))?;
        let dig = format!("{}{}", symbol_digest(&[&a]), &wave_digest(&[&w.phi1, &w.phi2])[..8]);
        let m = toeplitz_via_convolution(&a, &w, QuantizationIndex::WEYL)?;
        let (mut err, mut scale): (f64, f64) = (0.0, 0.0);
        for f1 in &hs {
            for f2 in &hs {
                let r1 = m.matrix_element(f1, f2)?;
                let r2 = toeplitz_direct_entry(&a, &w, f1, f2)?;
                err = err.max((r1 - r2).norm());
                scale = scale.max(r2.norm());
            }
        }
        let mut rows = vec![CaseResult::identity(case_id(i, "routes"), dig.clone(), err / scale, tol.cross_route)
            .with("max_entry", scale)
            .with("modes", modes)];

        let phi = &catalog[i % catalog.len()];
        let id = case_id(i, &format!("bound {phi}"));
        match toeplitz_orlicz_bound(&a, &w, phi) {
            Ok(r) => rows.push(
                CaseResult::inequality(id, dig.clone(), r.lhs, r.rhs, tol.ratio)
                    .with("constant", r.constant)
                    .with("symbol_norm", r.symbol_norm),
            ),
            Err(e) => rows.push(CaseResult::skipped(id, dig.clone(), e.to_string())),
        }

        let pos = PhaseSymbol { grid, values: a.values.map(|v| C64::new(v.norm_sqr(), 0.0)) };
        let same = WindowPair::symmetric(w.phi1.clone())?;
        let mp = toeplitz_via_convolution(&pos, &same, QuantizationIndex::WEYL)?;
        let p = positivity_check(&mp)?;
        let sigma1 = singular_values(&mp).operator_norm();
        rows.push(
            CaseResult::inequality(case_id(i, "psd"), dig, (-p.min_eig_real).max(0.0), tol.psd * sigma1, 0.0)
                .with("min_eig", p.min_eig_real),
        );
        Ok(rows)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasegrid::make_grid;

    #[test]
    fn triple_conditions_hold() {
        for t in CONV_TRIPLES {
            let (_, r) = t.condition().unwrap();
            assert!(r.passed, "{}", t.label());
        }
    }

    #[test]
    fn gaussian_wigner_convolution_bounds_are_attained() {
        let g = make_grid(64).unwrap();
        let rows = schatt_exp_rows(g, [&[0], &[0], &[0], &[0]], 0, "g", 1e-6).unwrap();
        for r in &rows {
            assert!(r.pass && (r.ratio - 1.0).abs() < 1e-8, "{r:?}");
        }
    }

    #[test]
    fn reproducing_symbol_reproduces() {
        let g = make_grid(128).unwrap();
        let b = reproducing_symbol(g);
        assert!(b.tail_report().pass);
        let mut rng = SplitMix64::new(5);
        let a = bandlimited_symbol(&mut rng, g);
        let c = convolve(&a, &b).unwrap().scale(C64::new(1.0 / (2.0 * PI), 0.0));
        assert!(c.rel_max_diff(&a) < 1e-9);
    }

    #[test]
    fn zero_factor_gives_zero_lhs() {
        let g = make_grid(32).unwrap();
        let a = random_symbol(1, 0, g);
        let z = PhaseSymbol::zeros(g);
        assert_eq!(l_norm(&convolve(&a, &z).unwrap(), &lebesgue(1.0)), 0.0);
        assert_eq!(l_norm(&z, &lebesgue(2.0)), 0.0);
    }
}
