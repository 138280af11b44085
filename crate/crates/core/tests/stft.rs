use std::f64::consts::PI;

use modcalc_core::lattice::{SampledField, UniformGrid};
use modcalc_core::stft::*;
use modcalc_core::weights::Weight;
use modcalc_core::Complex64;
use proptest::prelude::*;

fn gaussian_field(grid: &UniformGrid, center: f64) -> SampledField {
    SampledField::from_real_fn(grid.clone(), |p| PI.powf(-0.25) * (-0.5 * (p[0] - center).powi(2)).exp()).unwrap()
}

fn nodal() -> UniformGrid {
    UniformGrid::nodal(1, 256, 12.0).unwrap()
}

fn index_of(grid: &UniformGrid, p: &[f64]) -> usize {
    grid.ravel(&grid.index_of_point(p).expect("point on grid"))
}

/// Simpson quadrature of the defining integral at one phase-space point.
fn stft_oracle(f: impl Fn(f64) -> f64, phi: impl Fn(f64) -> f64, x: f64, xi: f64) -> Complex64 {
    let (a, b, n) = (-20.0, 20.0, 40000);
    let h = (b - a) / n as f64;
    let g = |y: f64| Complex64::from_polar(f(y) * phi(y - x), -y * xi);
    let mut s = g(a) + g(b);
    for i in 1..n {
        s += g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * (h / 3.0) / (2.0 * PI).sqrt()
}

#[test]
fn gaussian_self_transform_at_origin() {
    let g = nodal();
    let f = gaussian_field(&g, 0.0);
    let s = stft(&f, &Window::gaussian(1), &StftOptions::default()).unwrap();
    let v = s.field.values()[index_of(s.field.grid(), &[0.0, 0.0])];
    assert!((v - Complex64::new((2.0 * PI).powf(-0.5), 0.0)).norm() < 1e-12);
}

#[test]
fn gaussian_self_transform_matches_closed_form() {
    let g = nodal();
    let f = gaussian_field(&g, 0.0);
    let s = stft(&f, &Window::gaussian(1), &StftOptions::default()).unwrap();
    let phase = s.field.grid();
    let mut worst = 0.0f64;
    for (i, v) in s.field.values().iter().enumerate() {
        let p = phase.point_of_flat(i);
        let want = (2.0 * PI).powf(-0.5) * (-(p[0] * p[0] + p[1] * p[1]) / 4.0).exp();
        worst = worst.max((v.norm() - want).abs());
    }
    assert!(worst < 1e-8, "{worst}");
    // The closed form itself against quadrature of the integral, phase included.
    let unit = |t: f64| PI.powf(-0.25) * (-0.5 * t * t).exp();
    let (h, dxi) = (g.steps()[0], 2.0 * PI / 24.0);
    for (k, m) in [(0, 0), (16, -8), (-32, 15), (24, 2)] {
        let (x, xi) = (k as f64 * h, m as f64 * dxi);
        let q = stft_oracle(unit, unit, x, xi);
        assert!((q.norm() - (2.0 * PI).powf(-0.5) * (-(x * x + xi * xi) / 4.0).exp()).abs() < 1e-12);
        let j = index_of(phase, &[x, xi]);
        assert!((s.field.values()[j] - q).norm() < 1e-10, "({x}, {xi})");
    }
}

#[test]
fn translation_moves_the_spectrogram() {
    let g = nodal();
    let h = g.steps()[0];
    let f = SampledField::from_real_fn(g.clone(), |p| (1.0 + p[0]) * (-0.5 * p[0] * p[0]).exp()).unwrap();
    let shift = 12;
    let x0 = shift as f64 * h;
    let shifted = SampledField::from_real_fn(g.clone(), |p| (1.0 + p[0] - x0) * (-0.5 * (p[0] - x0).powi(2)).exp()).unwrap();
    let w = Window::gaussian(1);
    let a = stft(&f, &w, &StftOptions::default()).unwrap();
    let b = stft(&shifted, &w, &StftOptions::default()).unwrap();
    let n = 256;
    let mut worst = 0.0f64;
    for i in shift..n {
        for m in 0..n {
            let va = a.field.values()[(i - shift) * n + m].norm();
            let vb = b.field.values()[i * n + m].norm();
            worst = worst.max((va - vb).abs());
        }
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn modulation_moves_the_spectrogram() {
    let g = nodal();
    let spectral = g.reciprocal().unwrap();
    let shift = 10;
    let xi0 = shift as f64 * spectral.steps()[0];
    let f = gaussian_field(&g, 1.0);
    let fm = f.map(|v| v).unwrap();
    let fm = SampledField::new(
        g.clone(),
        fm.values().iter().zip(g.axis_coords(0)).map(|(v, x)| v * Complex64::from_polar(1.0, xi0 * x)).collect(),
    )
    .unwrap();
    let w = Window::hermite(1, 1, 1.0);
    let a = stft(&f, &w, &StftOptions::default()).unwrap();
    let b = stft(&fm, &w, &StftOptions::default()).unwrap();
    let n = 256;
    let mut worst = 0.0f64;
    for i in 0..n {
        for m in shift..n {
            worst = worst.max((a.field.values()[i * n + m - shift].norm() - b.field.values()[i * n + m].norm()).abs());
        }
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn energy_identity() {
    let g = UniformGrid::centered(1, 256, 12.0).unwrap();
    let f = SampledField::from_real_fn(g.clone(), |p| (p[0] - 0.5) * (-0.4 * (p[0] - 0.5).powi(2)).exp()).unwrap();
    for w in [Window::gaussian(1), Window::hermite(1, 3, 1.3)] {
        let s = stft(&f, &w, &StftOptions::default()).unwrap();
        let phi = w.prepare().unwrap();
        let lhs = s.field.l2_norm();
        let rhs = f.l2_norm() * phi.exact_norm_sqr().sqrt();
        assert!((lhs / rhs - 1.0).abs() < 1e-8, "{lhs} vs {rhs}");
    }
}

#[test]
fn round_trips() {
    let g = UniformGrid::centered(1, 256, 12.0).unwrap();
    let h4 = |t: f64| {
        let h = 16.0 * t.powi(4) - 48.0 * t * t + 12.0;
        h * (-0.5 * t * t).exp() / (16.0 * 24.0 * PI.sqrt()).sqrt()
    };
    let cases = [
        gaussian_field(&g, 0.0),
        SampledField::from_real_fn(g.clone(), |p| h4(p[0])).unwrap(),
        SampledField::from_real_fn(g.clone(), |p| h4(p[0] - 1.0) + 0.3 * (-(p[0] + 2.0).powi(2)).exp()).unwrap(),
    ];
    for f in &cases {
        for w in [Window::gaussian(1), Window::hermite(1, 2, 0.8)] {
            let s = stft(f, &w, &StftOptions::default()).unwrap();
            let back = istft(&s, &w).unwrap();
            assert!(!back.window_mismatch && !back.strided);
            let err = back.field.relative_l2_error(f).unwrap();
            assert!(err < 1e-8, "{err}");
        }
    }
}

#[test]
fn hermite_window_matches_explicit_polynomial() {
    let phi = Window::hermite(1, 4, 1.0).prepare().unwrap();
    for t in [-3.0, -0.7, 0.0, 1.1, 4.5] {
        let h = 16.0 * f64::powi(t, 4) - 48.0 * t * t + 12.0;
        let want = h * (-0.5 * t * t).exp() / (16.0 * 24.0 * PI.sqrt()).sqrt();
        assert!((phi.evaluate(&[t]).re - want).abs() < 1e-13);
    }
}

#[test]
fn zero_spectrogram_inverts_to_zero() {
    let g = UniformGrid::centered(1, 64, 8.0).unwrap();
    let s = stft(&SampledField::zeros(g), &Window::gaussian(1), &StftOptions::default()).unwrap();
    let back = istft(&s, &Window::gaussian(1)).unwrap();
    assert_eq!(back.field.max_abs(), 0.0);
}

#[test]
fn window_mismatch_is_flagged() {
    let g = UniformGrid::centered(1, 128, 10.0).unwrap();
    let f = gaussian_field(&g, 0.0);
    let s = stft(&f, &Window::gaussian(1), &StftOptions::default()).unwrap();
    let back = istft(&s, &Window::gaussian_width(1, 2.0)).unwrap();
    assert!(back.window_mismatch);
}

#[test]
fn strided_lattice_and_truncation_report() {
    let g = UniformGrid::centered(1, 128, 10.0).unwrap();
    let f = gaussian_field(&g, 0.0);
    let s = stft(&f, &Window::gaussian(1), &StftOptions { stride: 4 }).unwrap();
    assert_eq!(s.field.grid().counts(), &[32, 128]);
    // Windows centered near the edge lose mass outside the box.
    assert!(s.meta.truncation.unwrap() > 0.1);
    assert!(stft(&f, &Window::gaussian(1), &StftOptions { stride: 3 }).is_err());
    let back = istft(&s, &Window::gaussian(1)).unwrap();
    assert!(back.strided);
}

#[test]
fn spectrogram_file_round_trip() {
    let g = UniformGrid::centered(1, 32, 6.0).unwrap();
    let s = stft(&gaussian_field(&g, 0.5), &Window::hermite(1, 1, 1.0), &StftOptions::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.modc");
    s.to_file().unwrap().save(&path).unwrap();
    let back = Spectrogram::from_file(&modcalc_core::lattice::io::FieldFile::load(&path).unwrap()).unwrap();
    assert_eq!(back, s);
    assert_eq!(back.meta.phase, PHASE_CONVENTION);
}

#[test]
fn two_dimensional_round_trip() {
    let g = UniformGrid::centered(2, 32, 8.0).unwrap();
    let f = SampledField::from_real_fn(g, |p| (-(p[0] * p[0] + 0.5 * (p[1] - 1.0).powi(2))).exp()).unwrap();
    let w = Window::gaussian(2);
    let s = stft(&f, &w, &StftOptions::default()).unwrap();
    assert_eq!(s.field.grid().dim(), 4);
    let back = istft(&s, &w).unwrap();
    assert!(back.field.relative_l2_error(&f).unwrap() < 1e-8);
}

#[test]
fn seminorm_examples() {
    let g = UniformGrid::nodal(1, 128, 12.0).unwrap();
    assert_eq!(gs_seminorm(&SampledField::zeros(g.clone()), 1.0, 1.0, 1.0, 4).unwrap(), 0.0);
    let gauss = gaussian_field(&g, 0.0);
    let mut prev = f64::INFINITY;
    for h in [0.5, 1.0, 2.0, 4.0] {
        let v = gs_seminorm(&gauss, 1.0, 1.0, h, 4).unwrap();
        assert!(v.is_finite() && v > 0.0 && v <= prev);
        prev = v;
    }
    // The order-zero term alone is sup |f| = pi^{-1/4}.
    let v = gs_seminorm(&gauss, 1.0, 1.0, 1e6, 3).unwrap();
    assert!((v - PI.powf(-0.25)).abs() < 1e-12);
}

#[test]
fn decay_fit_of_gaussian() {
    let g = nodal();
    let f = gaussian_field(&g, 0.0);
    let s = stft(&f, &Window::gaussian(1), &StftOptions::default()).unwrap();
    let rep = stft_decay_fit(&s, &Weight::one(), 1.0).unwrap();
    assert!(rep.fit.r > 0.0);
    assert!(rep.fit.decayed);
    assert!(rep.fit.c >= (2.0 * PI).powf(-0.5) - 1e-12);
    assert!(rep.residual.values().iter().all(|v| v.re <= 1e-9));
}

#[test]
fn decay_fit_recovers_synthetic_envelope() {
    let g = UniformGrid::nodal(1, 64, 8.0).unwrap();
    let w = Weight::Polynomial { t: 1.5 };
    let (c0, r0) = (2.5, 0.7);
    let template = stft(&gaussian_field(&g, 0.0), &Window::gaussian(1), &StftOptions::default()).unwrap();
    let grid = template.field.grid().clone();
    let field = SampledField::from_fn(grid, |p| {
        let mag = c0 * w.evaluate(&p[..1]) * (-r0 * p[1].abs()).exp();
        Complex64::from_polar(mag, 0.3 * p[0] - p[1])
    })
    .unwrap();
    let synth = Spectrogram { field, meta: template.meta.clone() };
    let fit = stft_decay_fit(&synth, &w, 1.0).unwrap().fit;
    assert!((fit.c / c0 - 1.0).abs() < 0.01, "{fit:?}");
    assert!((fit.r / r0 - 1.0).abs() < 0.01, "{fit:?}");
}

#[test]
fn decay_fit_rejects_zero() {
    let g = UniformGrid::nodal(1, 32, 8.0).unwrap();
    let s = stft(&SampledField::zeros(g), &Window::gaussian(1), &StftOptions::default()).unwrap();
    assert!(matches!(stft_decay_fit(&s, &Weight::one(), 1.0), Err(modcalc_core::Error::UndefinedFit(_))));
}

fn signal_strategy() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    proptest::collection::vec((-3.0f64..3.0, 0.3f64..2.0, -2.0f64..2.0), 1..4)
}

fn build(g: &UniformGrid, parts: &[(f64, f64, f64)]) -> SampledField {
    SampledField::from_fn(g.clone(), |p| {
        parts
            .iter()
            .map(|&(c, a, k)| Complex64::from_polar((-a * (p[0] - c).powi(2)).exp(), k * p[0]))
            .sum()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linear_in_signal_conjugate_linear_in_window(pf in signal_strategy(), pg in signal_strategy(), a in (-2.0f64..2.0, -2.0f64..2.0), b in (-2.0f64..2.0, -2.0f64..2.0)) {
        let g = UniformGrid::centered(1, 64, 8.0).unwrap();
        let (f, h) = (build(&g, &pf), build(&g, &pg));
        let (a, b) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let w = Window::gaussian(1);
        let o = StftOptions::default();
        let lhs = stft(&f.axpby(a, &h, b).unwrap(), &w, &o).unwrap().field;
        let rhs = stft(&f, &w, &o).unwrap().field.axpby(a, &stft(&h, &w, &o).unwrap().field, b).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().l2_norm() <= 1e-12 * rhs.l2_norm().max(1e-300));
        // Window side: tabulated windows phi1, phi2 and a phi1 + b phi2.
        let (p1, p2) = (build(&g, &pf), build(&g, &pg));
        let combo = p1.axpby(a, &p2, b).unwrap();
        let v = |p: &SampledField| stft(&f, &Window::tabulated(p, false), &o).unwrap().field;
        let lhs = v(&combo);
        let rhs = v(&p1).axpby(a.conj(), &v(&p2), b.conj()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().l2_norm() <= 1e-12 * rhs.l2_norm().max(1e-300));
    }

    #[test]
    fn larger_weight_never_lowers_r(t in 0.0f64..3.0, dt in 0.0f64..2.0, r in 0.0f64..1.0, s in 1.0f64..3.0, parts in signal_strategy()) {
        let g = UniformGrid::nodal(1, 64, 8.0).unwrap();
        let spec = stft(&build(&g, &parts), &Window::gaussian(1), &StftOptions::default()).unwrap();
        let small = Weight::Polynomial { t };
        let large = Weight::Product { factors: vec![Weight::Polynomial { t: t + dt }, Weight::ExpPower { r, s: 1.0 }] };
        let a = stft_decay_fit(&spec, &small, s).unwrap().fit;
        let b = stft_decay_fit(&spec, &large, s).unwrap().fit;
        prop_assert!(b.r >= a.r - 1e-12 * a.r.abs().max(1.0));
        prop_assert!(b.c <= a.c * (1.0 + 1e-12));
    }
}
