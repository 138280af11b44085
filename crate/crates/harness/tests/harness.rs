use std::path::Path;

use modcalc_core::lattice::{QuantizationSpec, SampledField, UniformGrid};
use modcalc_core::norms::{modulation_norm, Exponent, ModSpaceSpec, PhaseNorm};
use modcalc_core::pdo::{ClosedForm, Monomial, Symbol};
use modcalc_core::stft::Window;
use modcalc_core::weights::Weight;
use modcalc_core::{Complex64, Error};
use modcalc_harness::config::{from_json, KernelConfig, SpaceConfig, TheoremConfig};
use modcalc_harness::kernel::{default_probes, MAX_PROBES};
use modcalc_harness::scenario::{scenario_opcont3, scenario_sobolev, scenario_thm_p32, scenario_weighted_l2};
use modcalc_harness::*;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn small_ladder() -> Ladder {
    Ladder { sizes: vec![64, 96, 128], half_width: 12.0 }
}

fn chirps(count: usize, seed: u64) -> Ensemble {
    Ensemble::GaussianChirps { count, seed, ranges: Default::default() }
}

fn space(weight: Weight, p: f64, q: f64) -> ModSpaceSpec {
    ModSpaceSpec::lpq(1, Exponent::Finite(p), Exponent::Finite(q), weight)
}

fn gaussian_symbol(amplitude: f64) -> Symbol {
    let cov = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(2.0, 0.0)]];
    Symbol::closed(ClosedForm::Gaussian { center: vec![0.3, -0.2], covariance: cov, amplitude: c(amplitude, 0.0) }, 1).unwrap()
}

fn config(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)).unwrap()
}

#[test]
fn ensembles_are_seeded_and_prefix_stable() {
    let a = chirps(5, 7).members().unwrap();
    assert_eq!(a, chirps(5, 7).members().unwrap());
    assert_eq!(a[..3], chirps(3, 7).members().unwrap()[..]);
    assert_ne!(a, chirps(5, 8).members().unwrap());
    for e in [
        Ensemble::HermiteMix { max_order: 4, count: 3, seed: 2 },
        Ensemble::GaborCloud { count: 3, seed: 2, atoms: 2 },
    ] {
        assert_eq!(e.members().unwrap().len(), 3);
    }
    assert!(chirps(0, 1).validate().is_err());
}

#[test]
fn members_are_normalized_in_the_source_space() {
    let grid = UniformGrid::nodal(1, 128, 12.0).unwrap();
    let src = space(Weight::Polynomial { t: 2.0 }, 1.0, 2.0);
    for m in chirps(4, 3).members().unwrap() {
        let (g, raw) = normalize(&m.sample(&grid).unwrap(), &src).unwrap().unwrap();
        assert!(raw > 0.0);
        assert!((modulation_norm(&g, &src).unwrap() - 1.0).abs() < 1e-12);
    }
    let zero = SampledField::zeros(grid);
    assert!(normalize(&zero, &src).unwrap().is_none());
}

#[test]
fn identity_operator_has_unit_ratios() {
    let one = Symbol::constant(1, c(1.0, 0.0));
    let kn = QuantizationSpec::kohn_nirenberg(1);
    for w in [Weight::one(), Weight::Polynomial { t: 2.0 }, Weight::ExpPower { r: 0.3, s: 1.0 }] {
        let s = space(w, 2.0, 1.0);
        let problem = RatioProblem { symbol: &one, quantization: &kn, source: &s, target: &s };
        let r = op_norm_ratio(&problem, &chirps(6, 11), &small_ladder()).unwrap();
        assert_eq!(r.trend.iter().map(|t| t.n).collect::<Vec<_>>(), vec![64, 96, 128]);
        for m in &r.ratios {
            assert!((m.ratio - 1.0).abs() < 1e-10, "{}", m.ratio);
        }
        assert!(r.bounded(0.1));
    }
}

#[test]
fn constant_symbols_scale_the_identity_ratio() {
    let kn = QuantizationSpec::kohn_nirenberg(1);
    let src = space(Weight::Polynomial { t: 1.0 }, 2.0, 2.0);
    let dst = space(Weight::one(), 1.0, 2.0);
    let base = {
        let one = Symbol::constant(1, c(1.0, 0.0));
        op_norm_ratio(&RatioProblem { symbol: &one, quantization: &kn, source: &src, target: &dst }, &chirps(4, 2), &small_ladder()).unwrap()
    };
    let k = c(-1.5, 2.0);
    let a = Symbol::constant(1, k);
    let r = op_norm_ratio(&RatioProblem { symbol: &a, quantization: &kn, source: &src, target: &dst }, &chirps(4, 2), &small_ladder()).unwrap();
    for (x, y) in r.ratios.iter().zip(&base.ratios) {
        assert!((x.ratio / (k.norm() * y.ratio) - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn doubling_the_symbol_doubles_the_ratio(seed in 0u64..1000, amp in 0.1f64..3.0) {
        let weyl = QuantizationSpec::weyl(1);
        let src = space(Weight::Polynomial { t: 1.0 }, 2.0, 2.0);
        let dst = space(Weight::one(), 2.0, 2.0);
        let ladder = Ladder { sizes: vec![64], half_width: 12.0 };
        let a = gaussian_symbol(amp);
        let b = gaussian_symbol(2.0 * amp);
        let ra = op_norm_ratio(&RatioProblem { symbol: &a, quantization: &weyl, source: &src, target: &dst }, &chirps(3, seed), &ladder).unwrap();
        let rb = op_norm_ratio(&RatioProblem { symbol: &b, quantization: &weyl, source: &src, target: &dst }, &chirps(3, seed), &ladder).unwrap();
        prop_assert!((rb.max_ratio / (2.0 * ra.max_ratio) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn enlarging_the_ensemble_never_lowers_the_maximum() {
    let a = gaussian_symbol(1.0);
    let kn = QuantizationSpec::kohn_nirenberg(1);
    let src = space(Weight::one(), 2.0, 2.0);
    let problem = RatioProblem { symbol: &a, quantization: &kn, source: &src, target: &src };
    let ladder = Ladder { sizes: vec![96], half_width: 12.0 };
    let mut last = f64::NEG_INFINITY;
    for count in [1, 3, 6, 10] {
        let r = op_norm_ratio(&problem, &chirps(count, 5), &ladder).unwrap();
        assert!(r.max_ratio >= last);
        last = r.max_ratio;
    }
}

#[test]
fn reports_are_reproducible() {
    let text = config("p32-gaussian.json");
    let a = run_scenario(ScenarioKind::P32, &text).unwrap();
    let b = run_scenario(ScenarioKind::P32, &text).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.to_csv(), b.to_csv());
    assert!(a.to_csv().starts_with("index,ratio,source_norm,target_norm\n"));
    assert_eq!(a.to_csv().lines().count(), 1 + a.ratio.as_ref().unwrap().ratios.len());
}

#[test]
fn window_change_is_bounded_by_the_equivalence_constants() {
    let a = gaussian_symbol(1.0);
    let kn = QuantizationSpec::kohn_nirenberg(1);
    let src = space(Weight::Polynomial { t: 1.0 }, 2.0, 2.0);
    let dst = space(Weight::one(), 1.0, 2.0);
    let problem = RatioProblem { symbol: &a, quantization: &kn, source: &src, target: &dst };
    let grid = UniformGrid::nodal(1, 128, 12.0).unwrap();
    for sigma in [0.6, 1.8] {
        let w = window_robustness(&problem, &Window::gaussian_width(1, sigma), &chirps(6, 4), &grid).unwrap();
        assert!(w.holds(), "{w:?}");
        assert!(w.ratio_first.is_finite() && w.ratio_second.is_finite());
        assert!(w.target_constant.is_finite() && w.source_constant.is_finite());
    }
}

fn ksym(terms: &[(Complex64, u32, u32)]) -> Symbol {
    Symbol::polynomial(1, terms.iter().map(|&(coeff, x, xi)| Monomial { coeff, x: vec![x], xi: vec![xi] }).collect()).unwrap()
}

#[test]
fn kernel_identity_two_paths() {
    let grid = UniformGrid::nodal(1, 128, 12.0).unwrap();
    let f = Member::Chirp { center: 0.5, width: 1.1, modulation: 0.7, chirp: 0.1 }.sample(&grid).unwrap();
    let probes = default_probes(&f, 64).unwrap();
    let w = Weight::Polynomial { t: 1.0 };
    let v = Weight::Polynomial { t: 2.0 };
    let window = Window::gaussian(1);

    let one = Symbol::constant(1, c(1.0, 0.0));
    let r = stft_kernel_crosscheck(&one, &f, &window, &w, &v, &probes).unwrap();
    assert!(r.deviation < 1e-8, "{}", r.deviation);

    let xi = ksym(&[(c(1.0, 0.0), 0, 1)]);
    let r = stft_kernel_crosscheck(&xi, &f, &window, &w, &v, &probes).unwrap();
    assert!(r.deviation < 1e-4, "{}", r.deviation);
    assert_eq!(r.probes.len(), 64);

    let mixed = ksym(&[(c(0.5, 0.0), 1, 1), (c(0.0, 1.0), 0, 2), (c(-0.3, 0.0), 1, 0)]);
    let r = stft_kernel_crosscheck(&mixed, &f, &window, &Weight::one(), &Weight::one(), &probes).unwrap();
    assert!(r.deviation < 1e-4, "{}", r.deviation);

    let zero = SampledField::zeros(grid.clone());
    let r = stft_kernel_crosscheck(&xi, &zero, &window, &w, &v, &probes).unwrap();
    assert_eq!(r.deviation, 0.0);
    assert!(r.probes.iter().all(|p| p.lhs.norm() == 0.0 && p.rhs.norm() == 0.0));
}

#[test]
fn kernel_probe_errors() {
    let grid = UniformGrid::nodal(1, 64, 12.0).unwrap();
    let f = Member::Chirp { center: 0.0, width: 1.0, modulation: 0.0, chirp: 0.0 }.sample(&grid).unwrap();
    let one = Symbol::constant(1, c(1.0, 0.0));
    let w = Weight::one();
    let off = stft_kernel_crosscheck(&one, &f, &Window::gaussian(1), &w, &w, &[(0.123, 0.0)]);
    assert!(matches!(off, Err(Error::InvalidProbe(_))));
    let many = vec![(0.0, 0.0); MAX_PROBES + 1];
    assert!(matches!(stft_kernel_crosscheck(&one, &f, &Window::gaussian(1), &w, &w, &many), Err(Error::InvalidProbe(_))));
    assert!(matches!(default_probes(&f, 10), Err(Error::InvalidProbe(_))));
}

#[test]
fn trivial_scenarios_report_unit_ratio() {
    for (kind, name) in [
        (ScenarioKind::P32, "p32-trivial.json"),
        (ScenarioKind::P32b, "p32b-trivial.json"),
        (ScenarioKind::Opcont3, "opcont3-half-trivial.json"),
        (ScenarioKind::Propopcont, "propopcont-trivial.json"),
    ] {
        let r = run_scenario(kind, &config(name)).unwrap();
        assert_eq!(r.outcome, Outcome::Pass, "{kind}");
        let ratio = r.ratio.unwrap();
        assert!((ratio.max_ratio - 1.0).abs() < 1e-10, "{kind}: {}", ratio.max_ratio);
    }
}

#[test]
fn standard_split_reduces_to_the_plain_theorem() {
    let split: TheoremConfig = from_json(&config("opcont3-standard.json")).unwrap();
    let plain: TheoremConfig = from_json(&config("p32-gaussian.json")).unwrap();
    let a = scenario_opcont3(&split).unwrap();
    let b = scenario_thm_p32(&plain).unwrap();
    assert!(a.outcome.is_pass() && b.outcome.is_pass());
    let (ra, rb) = (a.ratio.unwrap(), b.ratio.unwrap());
    assert!((ra.max_ratio - rb.max_ratio).abs() <= 1e-10 * rb.max_ratio);
    for (x, y) in ra.trend.iter().zip(&rb.trend) {
        assert!((x.max_ratio - y.max_ratio).abs() <= 1e-10 * y.max_ratio);
    }
}

#[test]
fn hypothesis_failures_are_inapplicable() {
    let skew = run_scenario(ScenarioKind::Opcont3, &config("opcont3-skew.json")).unwrap();
    assert!(matches!(skew.outcome, Outcome::Inapplicable { .. }));
    assert_eq!(skew.exit_code(), exit::INAPPLICABLE);
    assert_eq!(skew.diagnostics.phase_split, Some(false));

    let bad = run_scenario(ScenarioKind::Propopcont, &config("propopcont-incompatible.json")).unwrap();
    assert!(matches!(bad.outcome, Outcome::Inapplicable { .. }));
    assert!(!bad.diagnostics.compatibility.unwrap().bounded);
    assert!(bad.ratio.is_none());

    // Growth like exp(0.5 |xi|) exceeds the declared r0 = 0.2.
    let fast = r#"{"r0":0.2,"symbol":{"form":"separable","x":{"kind":"one"},"xi":{"kind":"smooth_growth","r":0.5}}}"#;
    let r = run_scenario(ScenarioKind::Sobolev, fast).unwrap();
    assert!(matches!(r.outcome, Outcome::Inapplicable { .. }), "{:?}", r.outcome);
}

#[test]
fn unweighted_space_identity_is_the_window_norm() {
    // With r = 0 both spaces are L^2 and the ratio is ||phi||_2 = 1.
    for (kind, name) in [(ScenarioKind::Sobolev, "sobolev-r0.json"), (ScenarioKind::Weightedl2, "weightedl2-r0.json")] {
        let cfg: SpaceConfig = from_json(&config(name)).unwrap();
        let r = match kind {
            ScenarioKind::Sobolev => scenario_sobolev(&cfg),
            _ => scenario_weighted_l2(&cfg),
        }
        .unwrap();
        assert!(r.outcome.is_pass(), "{:?}", r.outcome);
        for b in &r.identity.unwrap().brackets {
            assert!(b.lo <= 1.0 + 1e-10 && b.hi >= 1.0 - 1e-10, "{b:?}");
            assert!((b.hi - b.lo) < 1e-8, "{b:?}");
        }
    }
}

#[test]
fn configuration_errors() {
    let e = run_scenario(ScenarioKind::P32, r#"{"colour": 1}"#).unwrap_err();
    assert!(matches!(e, HarnessError::Config(_)));
    assert_eq!(e.exit_code(), exit::CONFIG);
    let e = run_scenario(ScenarioKind::Sobolev, r#"{"r": 2.0, "s": 1}"#).unwrap_err();
    assert_eq!(e.exit_code(), exit::CONFIG, "{e}");
    let e = run_scenario(ScenarioKind::P32, r#"{"norm": {"exponents": [0, 2]}}"#).unwrap_err();
    assert_eq!(e.exit_code(), exit::CONFIG);
    assert!("nonsense".parse::<ScenarioKind>().is_err());
    assert_eq!(core_exit_code(&Error::UndefinedFit("x".into())), exit::NUMERIC);
    assert_eq!(core_exit_code(&Error::NonDecayingSymbol("x".into())), exit::NUMERIC);
    assert_eq!(core_exit_code(&Error::InvalidGrid("x".into())), exit::CONFIG);
}

#[test]
fn defaults_are_complete_and_hashed() {
    let full = scenario::defaulted_config(ScenarioKind::Kernel, "{}").unwrap();
    let again: KernelConfig = serde_json::from_value(full.clone()).unwrap();
    assert_eq!(again, KernelConfig::default());
    let h1 = config::config_hash("p32", &TheoremConfig::default()).unwrap();
    let h2 = config::config_hash("p32b", &TheoremConfig::default()).unwrap();
    assert_eq!(h1.len(), 64);
    assert_ne!(h1, h2);
    // A config spelled out in full hashes like its defaulted form.
    let spelled = serde_json::to_string(&scenario::defaulted_config(ScenarioKind::P32, "{}").unwrap()).unwrap();
    let r1 = run_scenario(ScenarioKind::Kernel, "{}").unwrap();
    let r2 = run_scenario(ScenarioKind::Kernel, &serde_json::to_string(&full).unwrap()).unwrap();
    assert_eq!(r1.config_hash, r2.config_hash);
    let parsed: TheoremConfig = from_json(&spelled).unwrap();
    assert_eq!(parsed, TheoremConfig::default());
}

#[test]
fn fixtures_freeze_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = run_scenario(ScenarioKind::Kernel, "{}").unwrap();
    assert_eq!(check_fixture(&mut r, dir.path()).unwrap(), FixtureStatus::Created);
    let mut again = run_scenario(ScenarioKind::Kernel, "{}").unwrap();
    assert_eq!(check_fixture(&mut again, dir.path()).unwrap(), FixtureStatus::Matched);
    assert!(again.outcome.is_pass());

    let path = fixtures::fixture_path(dir.path(), &again);
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replacen("deviation", "deviation ", 1)).unwrap();
    let mut third = run_scenario(ScenarioKind::Kernel, "{}").unwrap();
    assert_eq!(check_fixture(&mut third, dir.path()).unwrap(), FixtureStatus::Mismatch);
    assert_eq!(third.exit_code(), exit::FAIL);

    let mut skew = run_scenario(ScenarioKind::Opcont3, &config("opcont3-skew.json")).unwrap();
    assert_eq!(check_fixture(&mut skew, dir.path()).unwrap(), FixtureStatus::NotFrozen);
    assert!(!fixtures::fixture_path(dir.path(), &skew).exists());
}

#[test]
fn kernel_scenario_uses_explicit_probes() {
    let cfg = r#"{"probes": [[0.0, 0.0], [0.2, 0.0]], "n": 64}"#;
    let e = run_scenario(ScenarioKind::Kernel, cfg);
    // Only grid samples are valid probes; the second point is off the grid.
    assert!(matches!(e, Err(HarnessError::Core(Error::InvalidProbe(_)))));
    let grid = UniformGrid::nodal(1, 64, 12.0).unwrap();
    let x = grid.axis_coords(0)[40];
    let xi = grid.reciprocal().unwrap().axis_coords(0)[30];
    let cfg = format!(r#"{{"probes": [[0.0, 0.0], [{x}, {xi}]], "n": 64}}"#);
    let r = run_scenario(ScenarioKind::Kernel, &cfg).unwrap();
    assert!(r.outcome.is_pass());
    assert_eq!(r.kernel.unwrap().probes.len(), 2);
}

#[test]
fn p32_polynomial_weights_and_norm_presets() {
    let mut cfg: TheoremConfig = from_json(&config("p32-polynomial.json")).unwrap();
    cfg.ladder = small_ladder();
    cfg.norm = PhaseNorm::lpq2(Exponent::Finite(1.0), Exponent::Infinity);
    let r = scenario_thm_p32(&cfg).unwrap();
    assert!(r.outcome.is_pass(), "{:?}", r.outcome);
}
