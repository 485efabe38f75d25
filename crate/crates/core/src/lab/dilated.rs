//! Dilated convolutions and multiplications of symbols, and rank-one pairing sums.

use std::f64::consts::PI;

use super::bounds::CONV_TRIPLES;
use super::inputs::{hermite_mixture, random_compact_symbol, symbol_digest, SplitMix64};
use super::{case_id, fmt_exp, lebesgue, par_cases, s_norm, spectrum, CaseResult, DilationLaw, LawMode, SuiteConfig};
use crate::error::{Error, Result};
use crate::phasegrid::{convolve, dilate, hermite, pointwise_multiply, GridSpec, PhaseSymbol, WaveFunction, C64};
use crate::schatten::{quantize, singular_values};
use crate::weyl::{symplectic_fourier, wigner, QuantizationIndex};
use crate::young::{
    lebesgue_constants, lebesgue_multi_constants, verify_multilinear_condition, verify_tri_condition, YoungFunction,
};

const W: QuantizationIndex = QuantizationIndex::WEYL;
const CONDITION_PROBES: usize = 16;

/// Exponents `(p0; p1, p2, p3)` with `sum 1/p_j = 2 + 1/p0`.
pub const MULTI_QUADRUPLES: [[f64; 4]; 4] = [
    [1.0, 1.0, 1.0, 1.0],
    [f64::INFINITY, 1.0, 2.0, 2.0],
    [2.0, 1.0, 1.0, 2.0],
    [1.5, 1.0, 1.0, 1.5],
];

fn label(p: &[f64]) -> String {
    let rest: Vec<String> = p[1..].iter().map(|&q| fmt_exp(q)).collect();
    format!("({};{})", fmt_exp(p[0]), rest.join(","))
}

/// Exponent lists with their weights for `n` factors, after a probe-grid check.
/// For two factors with convolution the weights use the three-function labeling.
fn exponent_sets(cfg: &SuiteConfig, n: usize, tri_labels: bool) -> Result<Vec<(Vec<f64>, Vec<f64>, Option<String>)>> {
    let ex = cfg.catalog_exponents()?;
    let lists: Vec<Vec<f64>> = match n {
        2 => CONV_TRIPLES.iter().map(|t| t.0.to_vec()).collect(),
        3 => MULTI_QUADRUPLES.iter().map(|q| q.to_vec()).collect(),
        _ => return Err(Error::Unsupported(format!("{n} factors; supported are 2 and 3"))),
    };
    let mut out = Vec::new();
    for p in lists.into_iter().filter(|p| p.iter().all(|q| ex.contains(q))) {
        let gauges: Vec<YoungFunction> = p.iter().map(|&q| lebesgue(q)).collect();
        let (weights, report) = if tri_labels {
            let c = lebesgue_constants(p[0], p[1], p[2])?;
            let r = verify_tri_condition(&gauges[0], &gauges[1], &gauges[2], &c, 24)?;
            (vec![c.c0, c.c1, c.c2], r)
        } else {
            let c = lebesgue_multi_constants(p[0], &p[1..])?;
            let r = verify_multilinear_condition(&gauges, &c, CONDITION_PROBES)?;
            (c.c, r)
        };
        let skip = (!report.passed).then(|| format!("condition violated by {:.3e}", report.max_violation));
        out.push((p, weights, skip));
    }
    Ok(out)
}

fn check_law(law: &DilationLaw, mode: LawMode) -> Result<()> {
    if law.mode != mode {
        return Err(Error::Precondition(format!("law mode {:?} does not match the suite", law.mode)));
    }
    if !(2..=3).contains(&law.t.len()) {
        return Err(Error::Unsupported(format!("{} factors; supported are 2 and 3", law.t.len())));
    }
    if law.t.iter().any(|t| !(0.25..=4.0).contains(&t.abs())) {
        return Err(Error::Precondition("dilation factors must satisfy 1/4 <= |t| <= 4".into()));
    }
    DilationLaw::new(law.t.clone(), law.m.clone(), law.mode).map(|_| ())
}

/// Hermite functions mixed into the waves behind dilated-convolution inputs.
/// Dilation by `t` scales bandwidth by `t`; with eight modes the trilinear law already aliases at 1e-5 on 128 points.
pub const MIXTURE_MODES: usize = 4;

/// `sum_r lambda_r W_{f_r, g_r}` over seeded Hermite mixtures; positive `lambda` and `g = f` when `psd`.
fn wigner_mixture(seed: u64, index: u64, hs: &[WaveFunction], psd: bool) -> Result<PhaseSymbol> {
    let mut rng = SplitMix64::keyed(seed, index, 50);
    let mut acc = PhaseSymbol::zeros(hs[0].grid);
    for _ in 0..3 {
        let f = hermite_mixture(&mut rng, hs);
        let (g, lambda) = if psd {
            (f.clone(), C64::new(rng.uniform(0.2, 1.0), 0.0))
        } else {
            (hermite_mixture(&mut rng, hs), rng.complex_normal())
        };
        acc = acc.add(&wigner(&f, &g, W)?.scale(lambda));
    }
    Ok(acc)
}

/// Dilated convolution bound for the Weyl classes; PSD inputs must give a PSD result.
pub fn suite_dilated_conv(cfg: &SuiteConfig, law: &DilationLaw) -> Result<Vec<CaseResult>> {
    check_law(law, LawMode::Convolution)?;
    let grid = cfg.grid()?;
    let n = law.t.len();
    let sets = exponent_sets(cfg, n, n == 2)?;
    let tprod: f64 = law.t.iter().map(|t| t.powi(-2)).product();
    let tol = cfg.tolerances;
    let hs: Vec<WaveFunction> =
        (0..MIXTURE_MODES.min(grid.n / 4 + 1)).map(|k| hermite(k, grid)).collect::<Result<_>>()?;
    par_cases(cfg.cases, |i| {
        let psd = i % 2 == 0;
        let inputs: Vec<PhaseSymbol> = (0..n)
            .map(|j| wigner_mixture(cfg.seed, (n * i + j) as u64, &hs, psd))
            .collect::<Result<_>>()?;
        let refs: Vec<&PhaseSymbol> = inputs.iter().collect();
        let dig = symbol_digest(&refs);
        let spectra: Vec<_> = inputs.iter().map(|a| spectrum(a, W)).collect::<Result<_>>()?;
        let mut c = dilate(&inputs[0], law.t[0])?;
        for (a, &t) in inputs.iter().zip(&law.t).skip(1) {
            c = convolve(&c, &dilate(a, t)?)?;
        }
        let m = quantize(&c, W)?;
        let sc = singular_values(&m);
        let mut rows = Vec::new();
        for (p, w, skip) in &sets {
            let id = case_id(i, &format!("{}{}", label(p), if psd { " psd" } else { "" }));
            if let Some(reason) = skip {
                rows.push(CaseResult::skipped(id, dig.clone(), reason.clone()));
                continue;
            }
            let gauges: Vec<YoungFunction> = p.iter().map(|&q| lebesgue(q)).collect();
            let weight = if n == 2 {
                let (t1, t2) = (law.t[0], law.t[1]);
                w[0] * (t1 * t2).powi(-2) + w[1] * t1.powi(-2) + w[2] * t2.powi(-2)
            } else {
                (w[0] + w[1..].iter().zip(&law.t).map(|(c, t)| c * t * t).sum::<f64>()) * tprod
            };
            let constant = 2.0 * (2.0 * PI).powf((n - 1) as f64 / 2.0) * weight;
            let norms: f64 = spectra.iter().zip(&gauges[1..]).map(|(s, g)| s_norm(s, g)).product();
            let lhs = s_norm(&sc, &gauges[0]);
            rows.push(
                CaseResult::inequality(id, dig.clone(), lhs, constant * norms, tol.ratio)
                    .with("constant", constant)
                    .with("weights", w.clone()),
            );
        }
        if psd {
            // Dilation leaves a small skew part from discretisation; positivity is read off the Hermitian part.
            let skew = (&m.entries - m.entries.adjoint()).norm() / m.entries.norm();
            let herm = (&m.entries + m.entries.adjoint()).map(|v| v * 0.5);
            let min_eig = herm.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
            let sigma1 = sc.operator_norm();
            rows.push(
                CaseResult::inequality(case_id(i, "psd"), dig, (-min_eig).max(0.0), tol.psd * sigma1, 0.0)
                    .with("min_eig", min_eig)
                    .with("sigma1", sigma1)
                    .with("skew", skew),
            );
        }
        Ok(rows)
    })
}

/// Relative L^2 distance between `F_s(prod_j a_j(t_j .))` and
/// `pi^{-(N-1)} *_j t_j^{-2} (F_s a_j)(. / t_j)`.
pub fn multiplication_cross_route(inputs: &[PhaseSymbol], t: &[f64]) -> Result<f64> {
    let mut product = dilate(&inputs[0], t[0])?;
    for (a, &tj) in inputs.iter().zip(t).skip(1) {
        product = pointwise_multiply(&product, &dilate(a, tj)?)?;
    }
    let direct = symplectic_fourier(&product)?;
    let mut conv: Option<PhaseSymbol> = None;
    for (a, &tj) in inputs.iter().zip(t) {
        let term = dilate(&symplectic_fourier(a)?, 1.0 / tj)?.scale(C64::new(tj.powi(-2), 0.0));
        conv = Some(match conv {
            None => term,
            Some(c) => convolve(&c, &term)?,
        });
    }
    let routed = conv.unwrap().scale(C64::new(PI.powi(-(inputs.len() as i32 - 1)), 0.0));
    Ok(routed.add(&direct.scale(C64::new(-1.0, 0.0))).l2_norm() / direct.l2_norm())
}

/// Dilated multiplication bound for the Weyl classes with the symplectic Fourier cross route.
pub fn suite_dilated_mult(cfg: &SuiteConfig, law: &DilationLaw) -> Result<Vec<CaseResult>> {
    check_law(law, LawMode::Multiplication)?;
    let grid = cfg.grid()?;
    let n = law.t.len();
    let sets = exponent_sets(cfg, n, false)?;
    let tol = cfg.tolerances;
    par_cases(cfg.cases, |i| {
        let inputs: Vec<PhaseSymbol> =
            (0..n).map(|j| random_compact_symbol(cfg.seed, (n * i + j) as u64, grid)).collect();
        let refs: Vec<&PhaseSymbol> = inputs.iter().collect();
        let dig = symbol_digest(&refs);
        let spectra: Vec<_> = inputs.iter().map(|a| spectrum(a, W)).collect::<Result<_>>()?;
        let mut product = dilate(&inputs[0], law.t[0])?;
        for (a, &t) in inputs.iter().zip(&law.t).skip(1) {
            product = pointwise_multiply(&product, &dilate(a, t)?)?;
        }
        let sp = spectrum(&product, W)?;
        let mut rows = Vec::new();
        for (p, w, skip) in &sets {
            let id = case_id(i, &label(p));
            if let Some(reason) = skip {
                rows.push(CaseResult::skipped(id, dig.clone(), reason.clone()));
                continue;
            }
            let gauges: Vec<YoungFunction> = p.iter().map(|&q| lebesgue(q)).collect();
            let weight = w[0] + w[1..].iter().zip(&law.t).map(|(c, t)| c * t.powi(-2)).sum::<f64>();
            let constant = 2.0 * (2.0 / PI).powf((n - 1) as f64 / 2.0) * weight;
            let norms: f64 = spectra.iter().zip(&gauges[1..]).map(|(s, g)| s_norm(s, g)).product();
            rows.push(
                CaseResult::inequality(id, dig.clone(), s_norm(&sp, &gauges[0]), constant * norms, tol.ratio)
                    .with("constant", constant),
            );
        }
        let err = multiplication_cross_route(&inputs, &law.t)?;
        rows.push(CaseResult::identity(case_id(i, "cross_route"), dig, err, tol.cross_route));
        Ok(rows)
    })
}

pub const RANK_ONE_FAMILY: usize = 6;

/// `<W_{f1,g1}(t1 .) * W_{f2,g2}(t2 .), W_{f3,g3}>` for the single Gaussian `f = g = phi_0`.
pub fn gaussian_rank_one_pairing(t1: f64, t2: f64) -> f64 {
    let (a, b) = (t1 * t1, t2 * t2);
    let gamma = a * b / (a + b);
    (2.0 / PI).powf(1.5) * PI / (a + b) * PI / (gamma + 1.0)
}

fn rank_one_rows(grid: GridSpec, fams: &[Vec<(usize, usize)>; 3], law: &DilationLaw, i: usize, tag: &str, tol: f64) -> Result<Vec<CaseResult>> {
    let top = fams.iter().flat_map(|f| f.iter()).map(|&(a, b)| a.max(b)).max().unwrap_or(0);
    let hs: Vec<_> = (0..=top).map(|n| hermite(n, grid)).collect::<Result<_>>()?;
    let ws: Vec<Vec<PhaseSymbol>> = fams
        .iter()
        .map(|f| f.iter().map(|&(a, b)| wigner(&hs[a], &hs[b], W)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let (t1, t2) = (law.t[0], law.t[1]);
    let d1: Vec<PhaseSymbol> = ws[0].iter().map(|w| dilate(w, t1)).collect::<Result<_>>()?;
    let d2: Vec<PhaseSymbol> = ws[1].iter().map(|w| dilate(w, t2)).collect::<Result<_>>()?;
    let j = fams[0].len();
    let mut g = vec![0.0; j * j * j];
    for (k1, a) in d1.iter().enumerate() {
        for (k2, b) in d2.iter().enumerate() {
            let c = convolve(a, b)?;
            for (k3, w3) in ws[2].iter().enumerate() {
                g[(k1 * j + k2) * j + k3] = c.inner(w3).norm();
            }
        }
    }
    let at = |k1: usize, k2: usize, k3: usize| g[(k1 * j + k2) * j + k3];
    let (mut s3, mut s1, mut s2): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for x in 0..j {
        for y in 0..j {
            s3 = s3.max((0..j).map(|k| at(x, y, k)).sum());
            s1 = s1.max((0..j).map(|k| at(k, x, y)).sum());
            s2 = s2.max((0..j).map(|k| at(x, k, y)).sum());
        }
    }
    let base = (2.0 * PI).sqrt() * (t1 * t2).powi(-2);
    let dig = super::inputs::digest(&[ws[0][0].values.as_slice(), ws[1][0].values.as_slice()]);
    let weighted = |s: f64, t: f64, k: &str| {
        let (lo, hi) = (base * t.powi(2).min(t.powi(-2)), base * t.powi(2).max(t.powi(-2)));
        CaseResult::inequality(case_id(i, &format!("{tag} sum_{k}")), dig.clone(), s, hi, tol)
            .with("ratio_t_minus2", s / (base * t.powi(-2)))
            .with("ratio_t_plus2", s / (base * t.powi(2)))
            .with("tighter_bound_holds", s <= lo * (1.0 + tol))
    };
    Ok(vec![
        CaseResult::inequality(case_id(i, &format!("{tag} sum_k3")), dig.clone(), s3, base, tol),
        weighted(s1, t1, "k1"),
        weighted(s2, t2, "k2"),
    ])
}

/// Partial sums of rank-one pairings of dilated Wigner convolutions over each index.
pub fn suite_rank_one_sums(cfg: &SuiteConfig, law: &DilationLaw) -> Result<Vec<CaseResult>> {
    check_law(law, LawMode::Convolution)?;
    if law.t.len() != 2 {
        return Err(Error::Unsupported("rank-one sums are checked for two factors".into()));
    }
    let grid = cfg.grid()?;
    let tol = cfg.tolerances.ratio;
    let single = [vec![(0, 0)], vec![(0, 0)], vec![(0, 0)]];
    let mut rows = rank_one_rows(grid, &single, law, 0, "gaussian", tol)?;
    let exact = gaussian_rank_one_pairing(law.t[0], law.t[1]);
    rows[0] = rows[0].clone().with("closed_form", exact).with("closed_form_error", (rows[0].lhs - exact).abs() / exact);
    let j = RANK_ONE_FAMILY.min(grid.n / 4 + 1);
    rows.extend(par_cases(cfg.cases, |i| {
        let mut rng = SplitMix64::keyed(cfg.seed, i as u64, 60);
        let mut fam = || {
            let mut a: Vec<usize> = (0..j).collect();
            let mut b: Vec<usize> = (0..j).collect();
            rng.shuffle(&mut a);
            rng.shuffle(&mut b);
            a.into_iter().zip(b).collect::<Vec<_>>()
        };
        let fams = [fam(), fam(), fam()];
        rank_one_rows(grid, &fams, law, i + 1, &format!("J={j}"), tol)
    })?);
    Ok(rows)
}
