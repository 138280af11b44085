//! End-to-end acceptance run: one line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use modcalc_core::lattice::{fourier_transform, OrderedBasis, QuantizationSpec, SampledField, UniformGrid};
use modcalc_core::norms::{discrete_mixed_norm, embedding_check, mixed_norm, Exponent, MixedNormSpec, ModSpaceSpec};
use modcalc_core::pdo::{adjoint_symbol, apply_op, change_quantization, ApplyMethod, ClosedForm, Monomial, Profile, Symbol};
use modcalc_core::stft::{istft, stft, StftOptions, Window};
use modcalc_core::weights::{classify_pes, gevrey_derivative_check, mollify, GevreyOptions, MollifyOptions, ScanBox, Weight};
use modcalc_core::Complex64;
use modcalc_harness::kernel::default_probes;
use modcalc_harness::{check_fixture, fixture_dir, run_scenario, stft_kernel_crosscheck, Ensemble, FixtureStatus, Member, Outcome, ScenarioKind};

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn q(t: f64) -> QuantizationSpec {
    QuantizationSpec::scalar(1, t)
}

fn mono(coeff: Complex64, x: u32, xi: u32) -> Monomial {
    Monomial { coeff, x: vec![x], xi: vec![xi] }
}

fn poly(terms: &[(Complex64, u32, u32)]) -> Symbol {
    Symbol::polynomial(1, terms.iter().map(|&(k, x, xi)| mono(k, x, xi)).collect()).unwrap()
}

fn packet(grid: &UniformGrid, x0: f64, k: f64) -> SampledField {
    SampledField::from_fn(grid.clone(), |p| Complex64::from_polar((-0.5 * (p[0] - x0).powi(2)).exp(), k * p[0])).unwrap()
}

fn rel(a: &SampledField, b: &SampledField) -> f64 {
    a.relative_l2_error(b).unwrap()
}

fn config(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)).unwrap()
}

fn within(elapsed: Duration, secs: u64) -> Check {
    if elapsed <= Duration::from_secs(secs) {
        Ok(String::new())
    } else {
        Err(format!("took {:.1}s, budget {secs}s", elapsed.as_secs_f64()))
    }
}

fn fourier_and_stft() -> Check {
    let g = UniformGrid::nodal(1, 256, 12.0).unwrap();
    let gauss = SampledField::from_real_fn(g.clone(), |p| (-0.5 * p[0] * p[0]).exp()).unwrap();
    let ft = fourier_transform(&gauss).unwrap();
    let fg = ft.grid().clone();
    let ft_err = (0..ft.len())
        .map(|i| (ft.values()[i] - c((-0.5 * fg.point_of_flat(i)[0].powi(2)).exp(), 0.0)).norm())
        .fold(0.0, f64::max);
    ensure!(ft_err < 1e-10, "Fourier transform of the Gaussian off by {ft_err:e}");

    let h4 = |t: f64| (16.0 * t.powi(4) - 48.0 * t * t + 12.0) * (-0.5 * t * t).exp() / (16.0 * 24.0 * PI.sqrt()).sqrt();
    let fixtures = [gauss, SampledField::from_real_fn(g.clone(), |p| h4(p[0])).unwrap()];
    let mut worst = 0.0f64;
    for f in &fixtures {
        let w = Window::gaussian(1);
        let back = istft(&stft(f, &w, &StftOptions::default()).unwrap(), &w).unwrap();
        worst = worst.max(rel(&back.field, f));
    }
    ensure!(worst < 1e-8, "istft(stft f) off by {worst:e}");
    Ok(format!("FT max error {ft_err:.1e}, round trip {worst:.1e}"))
}

/// Iterated one-axis norms, axis 0 innermost, for row-major data.
fn nested_oracle(values: &[f64], shape: &[usize], ps: &[f64], hs: &[f64]) -> f64 {
    let mut cur = values.to_vec();
    for (k, (&p, &h)) in ps.iter().zip(hs).enumerate() {
        let n = shape[k];
        let rest = cur.len() / n;
        cur = (0..rest)
            .map(|r| {
                let col = (0..n).map(|i| cur[i * rest + r].abs());
                if p.is_infinite() {
                    col.fold(0.0, f64::max)
                } else {
                    (col.map(|v| v.powf(p)).sum::<f64>() * h).powf(1.0 / p)
                }
            })
            .collect();
    }
    cur[0]
}

fn mixed_norm_oracles() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let pool = [0.5, 1.0, 2.0, f64::INFINITY];
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let d = rng.gen_range(1..=3);
        let shape: Vec<usize> = (0..d).map(|_| rng.gen_range(1..=8)).collect();
        let hs: Vec<f64> = (0..d).map(|_| rng.gen_range(0.1..2.0)).collect();
        let ps: Vec<f64> = (0..d).map(|_| pool[rng.gen_range(0..4)]).collect();
        let len: usize = shape.iter().product();
        let vals: Vec<Complex64> = (0..len).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let grid = UniformGrid::new(OrderedBasis::identity(d), shape.clone(), hs.clone(), vec![0.0; d]).unwrap();
        let f = SampledField::new(grid, vals.clone()).unwrap();
        let spec = MixedNormSpec::standard(ps.iter().map(|&p| Exponent::new(p).unwrap()).collect());
        let got = mixed_norm(&f, &spec).unwrap();
        let abs: Vec<f64> = vals.iter().map(|v| v.norm()).collect();
        let want = nested_oracle(&abs, &shape, &ps, &hs);
        worst = worst.max((got / want - 1.0).abs());
    }
    ensure!(worst < 1e-12, "mixed norm differs from the nested loops by {worst:e}");

    // Lattice sequences against their step functions on skewed cells.
    let mut step_worst = 0.0f64;
    for _ in 0..20 {
        let skew = OrderedBasis::new(vec![vec![rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0)], vec![0.0, rng.gen_range(0.5..2.0)]]).unwrap();
        let (n0, n1, m) = (rng.gen_range(1..=5), rng.gen_range(1..=5), 3usize);
        let h = 1.0 / m as f64;
        let a: Vec<Vec<f64>> = (0..n0).map(|_| (0..n1).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let g = UniformGrid::new(skew.clone(), vec![n0 * m, n1 * m], vec![h, h], vec![0.5 * h; 2]).unwrap();
        let f = SampledField::from_fn(g, |p| {
            let t = skew.coordinates(p);
            c(a[t[0].floor() as usize][t[1].floor() as usize], 0.0)
        })
        .unwrap();
        let entries: Vec<(Vec<i64>, Complex64)> =
            (0..n0).flat_map(|i| (0..n1).map(move |j| (i, j))).map(|(i, j)| (vec![i as i64, j as i64], c(a[i][j], 0.0))).collect();
        let ps = [pool[rng.gen_range(0..4)], pool[rng.gen_range(0..4)]];
        let spec = MixedNormSpec::new(ps.iter().map(|&p| Exponent::new(p).unwrap()).collect(), skew, Weight::one());
        let dn = discrete_mixed_norm(&entries, &spec).unwrap();
        let cn = mixed_norm(&f, &spec).unwrap();
        step_worst = step_worst.max((dn / cn - 1.0).abs());
    }
    ensure!(step_worst < 1e-12, "discrete norm differs from the step function by {step_worst:e}");
    Ok(format!("200 tensors within {worst:.1e}, step functions within {step_worst:.1e}"))
}

fn quantization_algebra() -> Check {
    let phase_box = UniformGrid::nodal(2, 64, 10.0).unwrap();
    let sampled = Symbol::sampled(
        SampledField::from_fn(phase_box.clone(), |z| Complex64::from_polar((-(z[0] - 0.5).powi(2) - z[1] * z[1]).exp(), 0.3 * z[0])).unwrap(),
        false,
    )
    .unwrap();
    let mut trip = 0.0f64;
    for (t1, t2) in [(0.0, 0.5), (0.5, 1.0), (0.0, -0.75)] {
        let back = change_quantization(&change_quantization(&sampled, &q(t1), &q(t2)).unwrap(), &q(t2), &q(t1)).unwrap();
        trip = trip.max(rel(back.samples().unwrap(), sampled.samples().unwrap()));
    }
    ensure!(trip < 1e-8, "round trip off by {trip:e}");

    let weyl = change_quantization(&poly(&[(c(1.0, 0.0), 1, 1)]), &q(0.0), &q(0.5)).unwrap();
    let Some(ClosedForm::Polynomial { terms }) = weyl.closed_form() else { return Err("xξ left the polynomials".into()) };
    let mut got: Vec<(u32, u32, Complex64)> = terms.iter().map(|t| (t.x[0], t.xi[0], t.coeff)).collect();
    got.sort_by_key(|t| (t.0, t.1));
    ensure!(got == vec![(0, 0, c(0.0, 0.5)), (1, 1, c(1.0, 0.0))], "xξ became {got:?}");

    let g = UniformGrid::nodal(1, 128, 12.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let ts = [0.25, 0.5, 0.75, 1.0, -0.5];
    let mut worst = 0.0f64;
    for k in 0..20 {
        let a = Symbol::gaussian_envelope(
            vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
            vec![rng.gen_range(1.0..1.6), rng.gen_range(1.0..1.6)],
        )
        .unwrap();
        let f = packet(&g, rng.gen_range(-1.0..1.0), rng.gen_range(-1.5..1.5));
        let (t1, t2) = (ts[k % 5], ts[(k / 5 + k + 1) % 5]);
        let direct = apply_op(&a, &q(t1), &f, ApplyMethod::Quadrature).unwrap();
        let b = change_quantization(&a, &q(t1), &q(t2)).unwrap();
        let other = apply_op(&b, &q(t2), &f, ApplyMethod::Quadrature).unwrap();
        worst = worst.max(rel(&other, &direct));
    }
    ensure!(worst < 1e-6, "operator consistency off by {worst:e}");
    Ok(format!("round trip {trip:.1e}, xξ -> xξ + i/2 exact, 20 operators within {worst:.1e}"))
}

fn fast_against_quadrature() -> Check {
    let g = UniformGrid::nodal(1, 256, 12.0).unwrap();
    let pairs: Vec<(Symbol, f64, SampledField)> = vec![
        (poly(&[(c(1.0, 0.0), 1, 1)]), 0.5, packet(&g, -0.2, 0.9)),
        (poly(&[(c(1.0, 0.0), 0, 2), (c(0.0, 0.3), 1, 0)]), 0.0, packet(&g, 0.4, -0.5)),
        (poly(&[(c(1.0, 0.0), 0, 0), (c(0.0, 0.5), 0, 1), (c(-0.25, 0.0), 1, 0)]), 1.0, packet(&g, 0.0, 0.3)),
        (Symbol::gaussian_envelope(vec![0.3, 0.5], vec![2.0, 1.5]).unwrap(), 0.5, packet(&g, 0.1, 1.1)),
        (Symbol::gaussian_envelope(vec![-0.4, 0.0], vec![1.2, 1.2]).unwrap(), 0.25, packet(&g, -0.6, 0.0)),
        (Symbol::gaussian_envelope(vec![0.0, -0.7], vec![1.5, 1.0]).unwrap(), 1.0, packet(&g, 0.8, -1.0)),
        (
            Symbol::closed(ClosedForm::Separable { x: Profile::Plane { k: vec![0.7] }, xi: Profile::Plane { k: vec![0.375] }, c: c(1.0, 0.5) }, 1).unwrap(),
            0.5,
            packet(&g, 0.0, 0.5),
        ),
        (
            Symbol::closed(ClosedForm::Separable { x: Profile::Gaussian { center: vec![0.2], width: 1.3 }, xi: Profile::One, c: c(1.0, 0.0) }, 1).unwrap(),
            0.75,
            packet(&g, 0.3, 0.7),
        ),
        (
            Symbol::closed(ClosedForm::Separable { x: Profile::One, xi: Profile::Japanese { t: 2.0 }, c: c(0.5, 0.0) }, 1).unwrap(),
            0.5,
            packet(&g, -0.3, 0.2),
        ),
        (poly(&[(c(0.5, 0.0), 2, 0), (c(0.0, -1.0), 1, 1)]), 0.5, packet(&g, 0.2, -0.4)),
    ];
    let mut worst = 0.0f64;
    for (a, t, f) in &pairs {
        let fast = apply_op(a, &q(*t), f, ApplyMethod::Fast).unwrap();
        let slow = apply_op(a, &q(*t), f, ApplyMethod::Quadrature).unwrap();
        worst = worst.max(rel(&fast, &slow));
    }
    ensure!(worst < 1e-6, "fast and quadrature differ by {worst:e}");
    Ok(format!("10 pairs at N = 256 within {worst:.1e}"))
}

fn adjoint_pairing() -> Check {
    let g = UniformGrid::nodal(1, 128, 12.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let a = match k % 4 {
            0 => poly(&[(c(1.0, 0.0), 1, 1)]),
            1 => Symbol::gaussian_envelope(
                vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
                vec![rng.gen_range(0.8..2.0), rng.gen_range(0.8..2.0)],
            )
            .unwrap(),
            2 => poly(&[
                (c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), 1, 0),
                (c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), 0, 1),
                (c(rng.gen_range(-1.0..1.0), 0.0), 1, 1),
            ]),
            _ => Symbol::closed(
                ClosedForm::Separable { x: Profile::Plane { k: vec![rng.gen_range(-1.0..1.0)] }, xi: Profile::Plane { k: vec![rng.gen_range(-1.0..1.0)] }, c: c(1.0, 0.0) },
                1,
            )
            .unwrap(),
        };
        let f = packet(&g, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let h = packet(&g, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let b = adjoint_symbol(&a).unwrap();
        let lhs = apply_op(&a, &q(0.0), &f, ApplyMethod::Quadrature).unwrap().inner(&h).unwrap();
        let rhs = f.inner(&apply_op(&b, &q(0.0), &h, ApplyMethod::Quadrature).unwrap()).unwrap();
        worst = worst.max((lhs - rhs).norm() / lhs.norm().max(rhs.norm()));
    }
    ensure!(worst < 1e-6, "adjoint pairing off by {worst:e}");
    Ok(format!("20 pairs within {worst:.1e}"))
}

fn kernel_identity() -> Check {
    let g = UniformGrid::nodal(1, 128, 12.0).unwrap();
    let f = Member::Chirp { center: 0.0, width: 1.0, modulation: 0.0, chirp: 0.0 }.sample(&g).unwrap();
    let probes = default_probes(&f, 64).unwrap();
    let xi = poly(&[(c(1.0, 0.0), 0, 1)]);
    let w = Weight::Polynomial { t: 1.0 };
    let r = stft_kernel_crosscheck(&xi, &f, &Window::gaussian(1), &w, &w, &probes).map_err(|e| e.to_string())?;
    ensure!(r.probes.len() == 64, "{} probes", r.probes.len());
    ensure!(r.deviation < 1e-4, "deviation {:e}", r.deviation);
    Ok(format!("64 probes, deviation {:.1e}", r.deviation))
}

#[derive(serde::Deserialize)]
struct WeightFixture {
    weight: Weight,
    s: f64,
    c: f64,
}

fn weight_machinery() -> Check {
    let step = 0.2;
    let r_grid: Vec<f64> = (1..=15).map(|k| step * k as f64).collect();
    let rep = classify_pes(&Weight::ExpPower { r: 1.0, s: 1.0 }, 1.0, &r_grid, &ScanBox::symmetric(1, 8.0), 64).map_err(|e| e.to_string())?;
    let threshold = rep.smallest_bounded_r.ok_or("no bounded r")?;
    ensure!((threshold - 1.0).abs() <= step + 1e-12, "threshold at r = {threshold}");

    let fixtures: Vec<WeightFixture> = serde_json::from_str(&config("weights.json")).map_err(|e| e.to_string())?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for fx in &fixtures {
        let m = mollify(&fx.weight, &MollifyOptions { dim: 1, half_width: 8.0, n: 256, c: fx.c, s: fx.s }).map_err(|e| e.to_string())?;
        let fit = gevrey_derivative_check(&m.derivatives, &fx.weight, &GevreyOptions { s: fx.s, max_order: 6, h_limit: None })
            .map_err(|e| e.to_string())?;
        ensure!(fit.passed, "{:?}: Gevrey check failed", fx.weight);
        for k in 0..=400 {
            let x = -4.0 + 8.0 * k as f64 / 400.0;
            let ratio = m.weight.evaluate(&[x]) / fx.weight.evaluate(&[x]);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    ensure!(lo >= 0.2 && hi <= 5.0, "mollified ratio range [{lo}, {hi}]");
    Ok(format!("threshold r = {threshold}, {} mollified weights with ratio in [{lo:.3}, {hi:.3}]", fixtures.len()))
}

const PASSING: [(ScenarioKind, &str, bool); 17] = [
    (ScenarioKind::P32, "p32-trivial.json", true),
    (ScenarioKind::P32, "p32-polynomial.json", false),
    (ScenarioKind::P32, "p32-exp-tensor.json", false),
    (ScenarioKind::P32, "p32-gaussian.json", false),
    (ScenarioKind::P32b, "p32b-trivial.json", true),
    (ScenarioKind::P32b, "p32b-polynomial.json", false),
    (ScenarioKind::P32b, "p32b-exp-tensor.json", false),
    (ScenarioKind::Opcont3, "opcont3-standard.json", false),
    (ScenarioKind::Opcont3, "opcont3-half.json", false),
    (ScenarioKind::Opcont3, "opcont3-half-trivial.json", true),
    (ScenarioKind::Opcont3, "opcont3-permuted.json", false),
    (ScenarioKind::Propopcont, "propopcont-trivial.json", true),
    (ScenarioKind::Propopcont, "propopcont-tensor.json", false),
    (ScenarioKind::Sobolev, "sobolev.json", false),
    (ScenarioKind::Sobolev, "sobolev-r0.json", false),
    (ScenarioKind::Weightedl2, "weightedl2.json", false),
    (ScenarioKind::Weightedl2, "weightedl2-r0.json", false),
];

fn theorem_scenarios() -> Check {
    let dir = fixture_dir();
    let (mut created, mut matched) = (0, 0);
    for (kind, name, trivial) in PASSING {
        let text = config(name);
        let start = Instant::now();
        let mut r = run_scenario(kind, &text).map_err(|e| format!("{name}: {e}"))?;
        within(start.elapsed(), 120).map_err(|e| format!("{name}: {e}"))?;
        ensure!(r.outcome == Outcome::Pass, "{name}: {:?}", r.outcome);
        let ratio = r.ratio.as_ref().ok_or(format!("{name}: no ratio"))?;
        ensure!(ratio.max_ratio.is_finite() && ratio.drift < 0.1, "{name}: ratio {} drift {}", ratio.max_ratio, ratio.drift);
        ensure!(ratio.trend.iter().map(|t| t.n).collect::<Vec<_>>() == vec![128, 192, 256], "{name}: ladder {:?}", ratio.trend);
        if trivial {
            ensure!((ratio.max_ratio - 1.0).abs() < 1e-10, "{name}: trivial ratio {}", ratio.max_ratio);
        }
        match check_fixture(&mut r, &dir).map_err(|e| e.to_string())? {
            FixtureStatus::Created => created += 1,
            FixtureStatus::Matched => matched += 1,
            s => return Err(format!("{name}: fixture {s:?}")),
        }
        // A second run reproduces the frozen report byte for byte.
        let mut again = run_scenario(kind, &text).map_err(|e| e.to_string())?;
        ensure!(check_fixture(&mut again, &dir).map_err(|e| e.to_string())? == FixtureStatus::Matched, "{name}: rerun differs");
    }
    let kernel = run_scenario(ScenarioKind::Kernel, &config("kernel.json")).map_err(|e| e.to_string())?;
    ensure!(kernel.outcome.is_pass(), "kernel scenario: {:?}", kernel.outcome);
    Ok(format!("{} scenarios pass; fixtures {matched} matched, {created} created", PASSING.len()))
}

fn embedding_monotonicity() -> Check {
    let ens = Ensemble::GaussianChirps { count: 50, seed: 9, ranges: Default::default() };
    let s11 = ModSpaceSpec::lpq(1, Exponent::Finite(1.0), Exponent::Finite(1.0), Weight::one());
    let s22 = ModSpaceSpec::lpq(1, Exponent::Finite(2.0), Exponent::Finite(2.0), Weight::one());
    let mut consts = Vec::new();
    for n in [128, 256] {
        let fields = ens.sample(&UniformGrid::nodal(1, n, 12.0).unwrap()).map_err(|e| e.to_string())?;
        let rep = embedding_check(&fields, &s11, &s22, None).map_err(|e| e.to_string())?;
        ensure!(rep.constant.is_finite() && rep.constant > 0.0, "constant {} at N = {n}", rep.constant);
        consts.push(rep.constant);
    }
    let drift = (consts[1] - consts[0]).abs() / consts[1];
    ensure!(drift < 0.1, "embedding constant drifts by {drift}");
    Ok(format!("constant {:.6} (N = 128) and {:.6} (N = 256), drift {drift:.1e}", consts[0], consts[1]))
}

fn negative_control() -> Check {
    let r = run_scenario(ScenarioKind::Propopcont, &config("propopcont-incompatible.json")).map_err(|e| e.to_string())?;
    ensure!(matches!(r.outcome, Outcome::Inapplicable { .. }), "outcome {:?}", r.outcome);
    ensure!(r.exit_code() == 4, "exit code {}", r.exit_code());
    Ok("incompatible weights are inapplicable (exit 4)".into())
}

fn main() {
    let criteria: [(&str, u64, fn() -> Check); 10] = [
        ("Fourier and STFT core", 5, fourier_and_stft),
        ("mixed-norm oracles", 10, mixed_norm_oracles),
        ("quantization algebra", 30, quantization_algebra),
        ("fast path against quadrature", 60, fast_against_quadrature),
        ("adjoint pairing", 30, adjoint_pairing),
        ("kernel identity", 60, kernel_identity),
        ("weight machinery", 120, weight_machinery),
        ("theorem scenarios", 40 * 60, theorem_scenarios),
        ("embedding monotonicity", 120, embedding_monotonicity),
        ("negative control", 60, negative_control),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| within(elapsed, *budget).map(|_| detail));
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({:.1}s): {detail}", k + 1, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({:.1}s): {why}", k + 1, elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
