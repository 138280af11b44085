use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::window::{PreparedWindow, Window};
use crate::error::{Error, Result};
use crate::lattice::io::{FieldFile, MetadataBlock};
use crate::lattice::{AxisPlan, SampledField, UniformGrid};

/// Tag of the metadata block written with spectrograms.
pub const STFT_TAG: &[u8; 4] = b"STFT";
/// Phase convention tag: `V f(x, xi) = (2 pi)^{-d/2} \int f(y) conj(phi(y - x)) e^{-i<y, xi>} dy`.
pub const PHASE_CONVENTION: &str = "exp(-i<y,xi>)";

/// Window mass fraction outside the box above which truncation is reported.
const LEAKAGE_REPORT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StftOptions {
    /// Keep every `stride`-th sample of the signal grid as window position.
    pub stride: usize,
}

impl Default for StftOptions {
    fn default() -> Self {
        Self { stride: 1 }
    }
}

/// Metadata stored next to a spectrogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StftMeta {
    pub window: Window,
    pub stride: usize,
    pub phase: String,
    pub signal_grid: UniformGrid,
    /// Largest fraction of window energy that fell outside the box, when above 1e-12.
    pub truncation: Option<f64>,
}

/// `V_phi f` on the phase-space grid `positions x frequencies`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub field: SampledField,
    pub meta: StftMeta,
}

impl Spectrogram {
    pub fn dim(&self) -> usize {
        self.meta.signal_grid.dim()
    }

    pub fn to_file(&self) -> Result<FieldFile> {
        let mut file = FieldFile::new(self.field.clone());
        file.blocks.push(MetadataBlock::json(STFT_TAG, &self.meta)?);
        Ok(file)
    }

    pub fn from_file(file: &FieldFile) -> Result<Self> {
        let block = file
            .block(STFT_TAG)
            .ok_or_else(|| Error::Format("missing STFT metadata block".into()))?;
        Ok(Self {
            field: file.field.clone(),
            meta: block.parse()?,
        })
    }

    /// Frequency grid (the reciprocal of the signal grid).
    pub fn frequency_grid(&self) -> Result<UniformGrid> {
        self.meta.signal_grid.reciprocal()
    }
}

fn position_grid(signal: &UniformGrid, stride: usize) -> Result<UniformGrid> {
    if stride == 0 || signal.counts().iter().any(|n| n % stride != 0) {
        return Err(Error::InvalidGrid(format!(
            "stride {stride} does not divide the counts {:?}",
            signal.counts()
        )));
    }
    UniformGrid::new(
        signal.basis().clone(),
        signal.counts().iter().map(|n| n / stride).collect(),
        signal.steps().iter().map(|h| h * stride as f64).collect(),
        signal.offsets().to_vec(),
    )
}

/// Short-time Fourier transform: every window position gets the Fourier
/// transform of the windowed segment `f conj(phi(. - x))`.
pub fn stft(f: &SampledField, window: &Window, opts: &StftOptions) -> Result<Spectrogram> {
    let signal = f.grid();
    if !signal.is_axis_aligned() {
        return Err(Error::UnsupportedBasis("the STFT needs an axis-aligned signal grid".into()));
    }
    if window.dim != signal.dim() {
        return Err(Error::InvalidWindow(format!(
            "window dimension {} differs from signal dimension {}",
            window.dim,
            signal.dim()
        )));
    }
    let phi = window.prepare()?;
    let positions = position_grid(signal, opts.stride)?;
    let spectral = signal.reciprocal()?;
    let axes: Vec<usize> = (0..signal.dim()).collect();
    let plan = AxisPlan::forward(signal, &spectral, &axes);
    let block = signal.len();
    let norm_sqr = phi.exact_norm_sqr();
    let vol = signal.cell_volume();

    let mut values = vec![Complex64::new(0.0, 0.0); positions.len() * block];
    let leak: Vec<f64> = values
        .par_chunks_mut(block)
        .enumerate()
        .map(|(i, out)| {
            let x = positions.point_of_flat(i);
            let w = phi.sample_shifted(signal, &x);
            let inside: f64 = w.iter().map(|v| v.norm_sqr()).sum::<f64>() * vol;
            for ((o, fv), wv) in out.iter_mut().zip(f.values()).zip(&w) {
                *o = fv * wv.conj();
            }
            plan.apply(out);
            ((norm_sqr - inside) / norm_sqr).max(0.0)
        })
        .collect();
    let worst = leak.iter().copied().fold(0.0, f64::max);
    let field = SampledField::new(positions.product(&spectral)?, values)?;
    Ok(Spectrogram {
        field,
        meta: StftMeta {
            window: window.clone(),
            stride: opts.stride,
            phase: PHASE_CONVENTION.into(),
            signal_grid: signal.clone(),
            truncation: (worst > LEAKAGE_REPORT).then_some(worst),
        },
    })
}

/// Result of [`istft`].
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub field: SampledField,
    /// Synthesis window differs from the analysis window: no round-trip guarantee.
    pub window_mismatch: bool,
    /// Sub-strided input: no round-trip guarantee.
    pub strided: bool,
}

/// Inversion `f(x) = (psi, phi)^{-1} sum_y h^d g_y(x) psi(x - y)` where `g_y`
/// is the inverse Fourier transform of `V f(y, .)`; with `psi = phi` this is
/// the inversion formula with `||phi||^{-2}`.
pub fn istft(s: &Spectrogram, synthesis: &Window) -> Result<Reconstruction> {
    let signal = &s.meta.signal_grid;
    let psi = synthesis.prepare()?;
    let phi = s.meta.window.prepare()?;
    if psi.dim() != signal.dim() {
        return Err(Error::InvalidWindow("synthesis window dimension differs".into()));
    }
    let positions = position_grid(signal, s.meta.stride)?;
    let spectral = signal.reciprocal()?;
    if !s.field.grid().approx_eq(&positions.product(&spectral)?) {
        return Err(Error::Alignment("spectrogram grid does not match its metadata".into()));
    }
    let axes: Vec<usize> = (0..signal.dim()).collect();
    let plan = AxisPlan::inverse(&spectral, signal, &axes);
    let block = signal.len();
    let hx = positions.cell_volume();
    let denom = lattice_pairing(&psi, &phi, &positions);
    if denom.norm() <= 1e-300 {
        return Err(Error::InvalidWindow("analysis and synthesis windows are orthogonal".into()));
    }

    let partial: Vec<Vec<Complex64>> = s
        .field
        .values()
        .par_chunks(block)
        .enumerate()
        .map(|(i, col)| {
            let y = positions.point_of_flat(i);
            let mut g = col.to_vec();
            plan.apply(&mut g);
            let w = psi.sample_shifted(signal, &y);
            g.iter_mut().zip(&w).for_each(|(a, b)| *a *= b * hx);
            g
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); block];
    for g in &partial {
        for (o, v) in out.iter_mut().zip(g) {
            *o += v;
        }
    }
    let inv = denom.inv();
    out.iter_mut().for_each(|v| *v *= inv);
    Ok(Reconstruction {
        field: SampledField::new(signal.clone(), out)?,
        window_mismatch: synthesis != &s.meta.window,
        strided: s.meta.stride != 1,
    })
}

/// `sum_k h^d psi(z_k) conj(phi(z_k))` over the lattice `z_k = k h`
/// (the discrete `(psi, phi)`), summed until the terms vanish.
fn lattice_pairing(psi: &PreparedWindow, phi: &PreparedWindow, positions: &UniformGrid) -> Complex64 {
    let d = positions.dim();
    let steps = positions.steps();
    let reach: Vec<i64> = positions.counts().iter().map(|&n| n as i64).collect();
    let total: usize = reach.iter().map(|&r| (2 * r + 1) as usize).product();
    let vol = positions.cell_volume();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut z = vec![0.0; d];
    for mut flat in 0..total {
        for k in (0..d).rev() {
            let span = (2 * reach[k] + 1) as usize;
            z[k] = ((flat % span) as i64 - reach[k]) as f64 * steps[k];
            flat /= span;
        }
        acc += psi.evaluate(&z) * phi.evaluate(&z).conj();
    }
    acc * vol
}
