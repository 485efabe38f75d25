use proptest::prelude::*;
use qha::lab::{inputs::hermite_mixture, run_suite, SplitMix64, SuiteConfig};
use qha::orlicz::luxemburg_abs;
use qha::phasegrid::{convolve, dilate, hermite, pointwise_multiply, translate_modulate_symbol, translate_modulate_wave};
use qha::schatten::{
    on_sequence_norm, quantize, schatten_orlicz_norm, singular_values, OperatorMatrix, SingularSpectrum,
};
use qha::toeplitz::{toeplitz_via_convolution, WindowPair};
use qha::weyl::wigner;
use qha::young::{lebesgue_constants, verify_tri_condition, Gauge};
use qha::{make_grid, GridSpec, PhaseSymbol, QuantizationIndex, QuasiYoungFunction, WaveFunction, YoungFunction, C64};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn young() -> impl Strategy<Value = YoungFunction> {
    prop_oneof![
        (1.0f64..6.0).prop_map(|p| YoungFunction::power(p).unwrap()),
        Just(YoungFunction::exp_minus_one()),
        Just(YoungFunction::exp_minus_one_minus_t()),
        Just(YoungFunction::indicator_infty()),
    ]
}

fn finite_young() -> impl Strategy<Value = YoungFunction> {
    prop_oneof![
        (1.0f64..6.0).prop_map(|p| YoungFunction::power(p).unwrap()),
        Just(YoungFunction::exp_minus_one()),
        Just(YoungFunction::exp_minus_one_minus_t()),
    ]
}

fn sequence() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..24)
}

fn abs(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x.abs()).collect()
}

fn norm(v: &[f64], phi: &dyn Gauge) -> f64 {
    luxemburg_abs(&abs(v), None, phi)
}

fn grid(n: usize) -> GridSpec {
    make_grid(n).unwrap()
}

/// Random unit wave from the first `modes` Hermite functions.
fn wave(seed: u64, g: GridSpec, modes: usize) -> WaveFunction {
    let hs: Vec<WaveFunction> = (0..modes).map(|k| hermite(k, g).unwrap()).collect();
    hermite_mixture(&mut SplitMix64::new(seed), &hs)
}

fn symbol(seed: u64, g: GridSpec) -> PhaseSymbol {
    let f = wave(seed, g, 4);
    let h = wave(seed ^ 0x9e37, g, 4);
    wigner(&f, &h, QuantizationIndex::WEYL).unwrap()
}

/// Sum of three modulated Gaussians `e^{-|X - Z|^2 / 2} e^{i <Xi, X>}` with small `Z` and `Xi`,
/// resolved on 128 points after stretching or compressing by 2.
fn narrow_symbol(seed: u64, g: GridSpec) -> PhaseSymbol {
    let mut rng = SplitMix64::new(seed);
    let terms: Vec<(C64, [f64; 4])> = (0..3)
        .map(|_| {
            let c = rng.complex_normal();
            (c, [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)])
        })
        .collect();
    PhaseSymbol::from_fn(g, |x, xi| {
        terms
            .iter()
            .map(|(c, [z1, z2, w1, w2])| {
                let r2 = (x - z1).powi(2) + (xi - z2).powi(2);
                c * C64::from_polar((-r2 / 2.0).exp(), w1 * x + w2 * xi)
            })
            .sum()
    })
}

fn matrix(seed: u64, n: usize, rank: usize) -> OperatorMatrix {
    let g = grid(n);
    let mut rng = SplitMix64::new(seed);
    let mut m = OperatorMatrix::zeros(g);
    for _ in 0..rank {
        let f = WaveFunction::new(g, (0..n).map(|_| rng.complex_normal()).collect()).unwrap();
        let h = WaveFunction::new(g, (0..n).map(|_| rng.complex_normal()).collect()).unwrap();
        m = m.add(&OperatorMatrix::rank_one(&f, &h).unwrap()).unwrap();
    }
    m
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn power_conjugate_is_an_involution(p in 1.05f64..8.0, t in -3.0f64..2.0) {
        let phi = YoungFunction::power(p).unwrap();
        let back = phi.conjugate().conjugate();
        let t = 10f64.powf(t);
        prop_assert!(rel(back.phi(t), phi.phi(t)) < 1e-10);
    }

    #[test]
    fn young_inequality(phi in young(), s in 0.0f64..6.0, t in 0.0f64..6.0) {
        let conj = phi.conjugate();
        prop_assert!(s * t <= phi.phi(s) + conj.phi(t) + 1e-12 * (1.0 + s * t));
    }

    #[test]
    fn inverse_is_a_right_quasi_inverse(phi in finite_young(), s in -4.0f64..3.0) {
        let s = 10f64.powf(s);
        let u = phi.inverse(s);
        prop_assert!(phi.phi(u) <= s * (1.0 + 1e-12));
        prop_assert!(s <= phi.phi(u * (1.0 + 1e-10)) * (1.0 + 1e-12));
    }

    #[test]
    fn quasi_inverse_composes_with_order(phi in finite_young(), r in 0.2f64..1.0, s in -3.0f64..2.0) {
        let s = 10f64.powf(s);
        let q = QuasiYoungFunction::new(phi.clone(), r).unwrap();
        prop_assert!(rel(q.inverse(s), phi.inverse(s).powf(1.0 / r)) < 1e-10);
    }

    #[test]
    fn lebesgue_constants_pass_grid_check(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        // 1/p1 + 1/p2 = 1 + 1/p0 with every exponent in [1, inf].
        let (i1, i2) = (0.5 + 0.5 * a, 0.5 + 0.5 * b);
        let i0 = i1 + i2 - 1.0;
        let p = |i: f64| if i <= 0.0 { f64::INFINITY } else { 1.0 / i };
        let cond = lebesgue_constants(p(i0), p(i1), p(i2)).unwrap();
        let lb = |q: f64| YoungFunction::lebesgue(q).unwrap();
        let report = verify_tri_condition(&lb(p(i0)), &lb(p(i1)), &lb(p(i2)), &cond, 16).unwrap();
        prop_assert!(report.passed, "{:?} {:?}", cond, report);
    }

    #[test]
    fn luxemburg_is_homogeneous(phi in young(), v in sequence(), alpha in -4.0f64..4.0) {
        let scaled: Vec<f64> = v.iter().map(|x| alpha * x).collect();
        let n = norm(&v, &phi);
        prop_assert!((norm(&scaled, &phi) - alpha.abs() * n).abs() <= 1e-10 * (1.0 + alpha.abs() * n));
    }

    #[test]
    fn smaller_gauge_gives_smaller_norm(v in sequence()) {
        // e^t - 1 - t <= e^t - 1 everywhere.
        let big = norm(&v, &YoungFunction::exp_minus_one());
        let small = norm(&v, &YoungFunction::exp_minus_one_minus_t());
        prop_assert!(small <= big * (1.0 + 1e-10));
    }

    #[test]
    fn luxemburg_triangle(phi in young(), v in sequence(), seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let w: Vec<f64> = v.iter().map(|_| rng.uniform(-5.0, 5.0)).collect();
        let sum: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
        prop_assert!(norm(&sum, &phi) <= (norm(&v, &phi) + norm(&w, &phi)) * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn luxemburg_r_triangle(phi in finite_young(), r in 0.25f64..1.0, v in sequence(), seed in any::<u64>()) {
        let q = QuasiYoungFunction::new(phi, r).unwrap();
        let mut rng = SplitMix64::new(seed);
        let w: Vec<f64> = v.iter().map(|_| rng.uniform(-5.0, 5.0)).collect();
        let sum: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
        let lhs = norm(&sum, &q).powf(r);
        let rhs = norm(&v, &q).powf(r) + norm(&w, &q).powf(r);
        prop_assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn gauge_sum_at_norm_is_at_most_one(phi in finite_young(), v in sequence()) {
        let n = norm(&v, &phi);
        prop_assume!(n > 0.0);
        let g: f64 = abs(&v).iter().map(|x| phi.phi(x / (n * (1.0 + 1e-9)))).sum();
        prop_assert!(g <= 1.0);
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn hermite_functions_have_unit_norm(n in 0usize..8) {
        let h = hermite(n, grid(64)).unwrap();
        prop_assert!((h.l2_norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn convolution_and_product_are_bilinear(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let g = grid(32);
        let (a, b, c) = (symbol(s1, g), symbol(s2, g), symbol(s3, g));
        let alpha = C64::new(re, im);
        let mix = a.scale(alpha).add(&c);
        for op in [convolve, pointwise_multiply] {
            let lhs = op(&mix, &b).unwrap();
            let rhs = op(&a, &b).unwrap().scale(alpha).add(&op(&c, &b).unwrap());
            prop_assert!(lhs.rel_max_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn dilation_round_trip(seed in any::<u64>(), t in 0.5f64..2.0) {
        let a = narrow_symbol(seed, grid(128));
        let back = dilate(&dilate(&a, t).unwrap(), 1.0 / t).unwrap();
        prop_assert!(back.rel_max_diff(&a) < 1e-6);
    }

    #[test]
    fn wigner_is_covariant(seed in any::<u64>(), j in -4i32..4, k in -4i32..4) {
        let g = grid(64);
        let (f, h) = (wave(seed, g, 4), wave(seed ^ 1, g, 4));
        let (z, zeta) = (j as f64 * g.h, k as f64 * g.h);
        for a in [QuantizationIndex::from_f64(0.0).unwrap(), QuantizationIndex::WEYL, QuantizationIndex::from_f64(1.0).unwrap()] {
            let moved = wigner(
                &translate_modulate_wave(&f, z, zeta).unwrap(),
                &translate_modulate_wave(&h, z, zeta).unwrap(),
                a,
            ).unwrap();
            let shifted = translate_modulate_symbol(&wigner(&f, &h, a).unwrap(), [z, zeta], [0.0, 0.0]).unwrap();
            prop_assert!(moved.rel_max_diff(&shifted) < 1e-10, "A={}", a.value());
        }
    }

    #[test]
    fn conjugate_symbol_quantizes_to_adjoint(seed in any::<u64>()) {
        let a = symbol(seed, grid(128));
        let m = quantize(&a, QuantizationIndex::WEYL).unwrap();
        let mc = quantize(&a.conj(), QuantizationIndex::WEYL).unwrap();
        let scale = m.frobenius();
        prop_assert!((&mc.entries - m.adjoint().entries).norm() <= 1e-10 * scale);
    }

    #[test]
    fn hilbert_schmidt_norm_is_symbol_l2(seed in any::<u64>()) {
        let a = symbol(seed, grid(64));
        let m = quantize(&a, QuantizationIndex::WEYL).unwrap();
        let s2 = (2.0 * std::f64::consts::PI).sqrt() * m.frobenius();
        prop_assert!(rel(s2, a.l2_norm()) < 1e-6);
    }

    #[test]
    fn schatten_r_triangle(s1 in any::<u64>(), s2 in any::<u64>(), phi in finite_young(), r in 0.3f64..1.0) {
        let q = QuasiYoungFunction::new(phi, r).unwrap();
        let (m1, m2) = (matrix(s1, 8, 3), matrix(s2, 8, 3));
        let n = |m: &OperatorMatrix| schatten_orlicz_norm(&singular_values(m), &q);
        let lhs = n(&m1.add(&m2).unwrap()).powf(r);
        prop_assert!(lhs <= n(&m1).powf(r) + n(&m2).powf(r) + 1e-9 * lhs.max(1.0));
    }

    #[test]
    fn schatten_domination(seed in any::<u64>()) {
        let s = singular_values(&matrix(seed, 8, 4));
        let big = schatten_orlicz_norm(&s, &YoungFunction::exp_minus_one());
        let small = schatten_orlicz_norm(&s, &YoungFunction::exp_minus_one_minus_t());
        prop_assert!(small <= big * (1.0 + 1e-10));
    }

    #[test]
    fn finite_rank_bound(seed in any::<u64>(), rank in 1usize..5, phi in finite_young(), r in 0.3f64..1.0) {
        let s = singular_values(&matrix(seed, 8, rank));
        let q = QuasiYoungFunction::new(phi.clone(), r).unwrap();
        let lr = QuasiYoungFunction::new(YoungFunction::power(1.0).unwrap(), r).unwrap();
        let lhs = schatten_orlicz_norm(&s, &q);
        let rhs = schatten_orlicz_norm(&s, &lr) / q.inverse(1.0);
        prop_assert!(lhs <= rhs * (1.0 + 1e-9), "{lhs} > {rhs}");
    }

    #[test]
    fn orthonormal_sequences_bound_below(seed in any::<u64>(), phi in young(), shift in 0usize..4) {
        let g = grid(64);
        let m = matrix(seed, 64, 4);
        let fs: Vec<WaveFunction> = (0..6).map(|k| hermite(k, g).unwrap()).collect();
        let gs: Vec<WaveFunction> = (0..6).map(|k| hermite(k + shift, g).unwrap()).collect();
        let lower = on_sequence_norm(&m, &fs, &gs, &phi).unwrap();
        let full = schatten_orlicz_norm(&singular_values(&m), &phi);
        prop_assert!(lower <= full * (1.0 + 1e-9));
    }

    #[test]
    fn spectra_survive_adjoint_and_parity(seed in any::<u64>()) {
        let a = symbol(seed, grid(128));
        let sv = |b: &PhaseSymbol| singular_values(&quantize(b, QuantizationIndex::WEYL).unwrap()).sigma;
        let base: SingularSpectrum = singular_values(&quantize(&a, QuantizationIndex::WEYL).unwrap());
        let top = base.operator_norm();
        for other in [sv(&a.conj()), sv(&a.parity())] {
            for (x, y) in base.sigma.iter().zip(&other) {
                prop_assert!((x - y).abs() <= 1e-10 * top);
            }
        }
    }

    #[test]
    fn toeplitz_is_sesquilinear_in_windows(seed in any::<u64>(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let g = grid(32);
        let a = symbol(seed, g);
        let (p1, p2) = (wave(seed ^ 5, g, 3), wave(seed ^ 6, g, 3));
        let alpha = C64::new(re, im);
        prop_assume!(alpha.norm() > 1e-3);
        let base = toeplitz_via_convolution(&a, &WindowPair::new(p1.clone(), p2.clone()).unwrap(), QuantizationIndex::WEYL).unwrap();
        let first = toeplitz_via_convolution(&a, &WindowPair::new(p1.scale(alpha), p2.clone()).unwrap(), QuantizationIndex::WEYL).unwrap();
        let second = toeplitz_via_convolution(&a, &WindowPair::new(p1, p2.scale(alpha)).unwrap(), QuantizationIndex::WEYL).unwrap();
        let scale = base.frobenius() * alpha.norm();
        let d1 = (&first.entries - base.scale(alpha).entries).norm();
        let d2 = (&second.entries - base.scale(alpha.conj()).entries).norm();
        let (d1c, d2c) = ((&first.entries - base.scale(alpha.conj()).entries).norm(), (&second.entries - base.scale(alpha).entries).norm());
        // One window enters linearly and the other conjugate-linearly.
        prop_assert!((d1 <= 1e-10 * scale && d2 <= 1e-10 * scale) || (d1c <= 1e-10 * scale && d2c <= 1e-10 * scale));
    }
}

#[test]
fn suites_are_deterministic() {
    for (suite, n) in [("s2", 32), ("conv1", 32), ("dilated_mult", 32), ("toeplitz", 64)] {
        let cfg = SuiteConfig::new(suite, n, 11, 2);
        let (a, b) = (run_suite(&cfg).unwrap(), run_suite(&cfg).unwrap());
        assert_eq!(a.cases, b.cases, "{suite}");
        assert_eq!(a.summary, b.summary, "{suite}");
    }
}

#[test]
fn skipped_rows_carry_reasons() {
    let cfg = SuiteConfig::new("toeplitz", 64, 3, 5);
    let report = run_suite(&cfg).unwrap();
    let skipped: Vec<_> = report.cases.iter().filter(|c| c.is_skipped()).collect();
    assert!(!skipped.is_empty());
    for c in skipped {
        assert!(c.diagnostics["skipped"].as_str().is_some_and(|s| !s.is_empty()), "{}", c.id);
    }
}
