use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use modcalc_core::lattice::io::{field_from_json, field_to_json, FieldFile};
use modcalc_core::lattice::{Quantization, SampledField, UniformGrid};
use modcalc_core::norms::{mixed_norm, modulation_norm, Exponent, MixedNormSpec, ModSpaceSpec, PhaseNorm, Preset, PresetNorm};
use modcalc_core::pdo::{apply_op, phase_grid_for, ApplyMethod, ClosedForm, Symbol};
use modcalc_core::stft::{hermite_function, stft, stft_decay_fit, DecayFit, StftMeta, StftOptions, Window};
use modcalc_core::weights::Weight;
use modcalc_harness::fixtures::FIXTURE_ENV;
use modcalc_harness::scenario::defaulted_config;
use modcalc_harness::{check_fixture, exit, Member, Outcome, ScenarioKind, ScenarioReport};

use crate::args::{Cli, Command, GenCommand, MethodArg, PresetArg};
use crate::error::{CliError, Result};

pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Stft { input, window, stride, out, summary, fit_decay } => {
            let f = read_field(input)?;
            let d = f.grid().dim();
            let run = StftRun {
                input: input.clone(),
                window: parse_window(window, d)?,
                stride: *stride,
                summary: summary.clone().unwrap_or_else(|| sidecar(out, "json")),
                out: out.clone(),
                fit_decay: fit_decay.as_deref().map(|items| parse_fit(items, d)).transpose()?,
            };
            if cli.dry_run {
                return dry_run(&run);
            }
            run.execute(&f)
        }
        Command::Norm { input, exponents, modulation, preset, window, weight } => {
            let f = read_field(input)?;
            let d = f.grid().dim();
            let norm = match (exponents, modulation) {
                (Some(e), _) => {
                    let spec = MixedNormSpec {
                        exponents: parse_exponents(e)?,
                        basis: Default::default(),
                        weight: parse_weight(weight, d)?,
                    };
                    spec.validate()?;
                    NormSpec::Mixed(spec)
                }
                (None, Some(m)) => {
                    let pq = parse_exponents(m)?;
                    let [p, q] = pq[..] else {
                        return Err(CliError::Config(format!("--modulation takes p,q; got {} exponents", pq.len())));
                    };
                    let preset = match preset {
                        PresetArg::Lpq1 => Preset::Lpq1,
                        PresetArg::Lpq2 => Preset::Lpq2,
                    };
                    NormSpec::Modulation(ModSpaceSpec {
                        window: parse_window(window, d)?,
                        weight: parse_weight(weight, 2 * d)?,
                        norm: PhaseNorm::Preset(PresetNorm { preset, p, q }),
                    })
                }
                (None, None) => return Err(CliError::Config("give --exponents or --modulation".into())),
            };
            let run = NormRun { input: input.clone(), norm };
            if cli.dry_run {
                return dry_run(&run);
            }
            run.execute(&f)
        }
        Command::Apply { input, symbol, quantization, method, out } => {
            let f = read_field(input)?;
            let d = f.grid().dim();
            let quantization: Quantization = quantization.parse()?;
            quantization.spec(d)?;
            let run = ApplyRun {
                input: input.clone(),
                symbol: parse_symbol_source(symbol)?,
                quantization,
                method: match method {
                    MethodArg::Fast => ApplyMethod::Fast,
                    MethodArg::Quadrature => ApplyMethod::Quadrature,
                },
                out: out.clone(),
            };
            let a = run.symbol.load(d)?;
            if cli.dry_run {
                return dry_run(&run);
            }
            run.execute(&a, &f)
        }
        Command::Verify { scenario, config, out_dir, fixtures } => {
            let kind: ScenarioKind = scenario.parse()?;
            let text = match config {
                Some(p) => fs::read_to_string(p).map_err(io_err(p))?,
                None => "{}".to_string(),
            };
            if cli.dry_run {
                println!("{}", serde_json::to_string_pretty(&defaulted_config(kind, &text)?)?);
                return Ok(exit::PASS);
            }
            let fixtures = fixtures.clone().or_else(|| std::env::var_os(FIXTURE_ENV).map(PathBuf::from));
            verify(kind, &text, config.as_deref(), out_dir, fixtures.as_deref(), cli.threads)
        }
        Command::Gen(GenCommand::Signal { shape, dim, n, half_width, out }) => {
            let run = SignalRun {
                shape: parse_shape(shape, *dim)?,
                grid: UniformGrid::nodal(*dim, *n, *half_width)?,
                out: out.clone(),
            };
            if cli.dry_run {
                return dry_run(&run);
            }
            let f = run.shape.sample(&run.grid)?;
            write_field(&run.out, &FieldFile::new(f))?;
            println!("wrote {}", run.out.display());
            Ok(exit::PASS)
        }
        Command::Gen(GenCommand::Symbol { form, dim, n, half_width, sampled, out }) => {
            let signal = UniformGrid::nodal(*dim, *n, *half_width)?;
            let form = parse_closed_form(form)?;
            let a = Symbol::closed(form.clone(), *dim)?;
            let run = SymbolRun { form, phase_grid: phase_grid_for(&signal)?, sampled: *sampled, out: out.clone() };
            if cli.dry_run {
                return dry_run(&run);
            }
            let mut file = a.to_file(&run.phase_grid)?;
            if run.sampled {
                file.blocks.clear();
            }
            write_field(&run.out, &file)?;
            println!("wrote {}", run.out.display());
            Ok(exit::PASS)
        }
    }
}

fn dry_run<T: Serialize>(run: &T) -> Result<i32> {
    println!("{}", serde_json::to_string_pretty(run)?);
    Ok(exit::PASS)
}

#[derive(Debug, Serialize)]
struct StftRun {
    input: PathBuf,
    window: Window,
    stride: usize,
    out: PathBuf,
    summary: PathBuf,
    fit_decay: Option<FitSpec>,
}

#[derive(Debug, Serialize)]
struct FitSpec {
    s: f64,
    weight: Weight,
}

#[derive(Debug, Serialize)]
struct Peak {
    x: Vec<f64>,
    xi: Vec<f64>,
    abs: f64,
}

#[derive(Debug, Serialize)]
struct StftSummary<'a> {
    input: &'a Path,
    spectrogram: &'a Path,
    meta: &'a StftMeta,
    shape: &'a [usize],
    peak: Peak,
    /// `sum |V|^2` times the phase-space cell volume.
    energy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    decay_fit: Option<DecayFit>,
}

impl StftRun {
    fn execute(&self, f: &SampledField) -> Result<i32> {
        let spec = stft(f, &self.window, &StftOptions { stride: self.stride })?;
        let field = &spec.field;
        let d = spec.dim();
        let (at, abs) = field
            .values()
            .iter()
            .map(|v| v.norm())
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, a)| if a > best.1 { (i, a) } else { best });
        let z = field.grid().point_of_flat(at);
        let energy = field.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * field.grid().cell_volume();
        let decay_fit = match &self.fit_decay {
            Some(fit) => Some(stft_decay_fit(&spec, &fit.weight, fit.s)?.fit),
            None => None,
        };
        write_field(&self.out, &spec.to_file()?)?;
        let summary = StftSummary {
            input: &self.input,
            spectrogram: &self.out,
            meta: &spec.meta,
            shape: field.grid().counts(),
            peak: Peak { x: z[..d].to_vec(), xi: z[d..].to_vec(), abs },
            energy,
            decay_fit,
        };
        write_text(&self.summary, &serde_json::to_string_pretty(&summary)?)?;
        println!("wrote {} and {}", self.out.display(), self.summary.display());
        Ok(exit::PASS)
    }
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum NormSpec {
    Mixed(MixedNormSpec),
    Modulation(ModSpaceSpec),
}

#[derive(Debug, Serialize)]
struct NormRun {
    input: PathBuf,
    norm: NormSpec,
}

impl NormRun {
    fn execute(&self, f: &SampledField) -> Result<i32> {
        let value = match &self.norm {
            NormSpec::Mixed(spec) => mixed_norm(f, spec)?,
            NormSpec::Modulation(spec) => modulation_norm(f, spec)?,
        };
        println!("{}", format_norm(value));
        println!("spec: {}", serde_json::to_string(self)?);
        Ok(exit::PASS)
    }
}

/// Twelve digits after the point in the usual range, scientific outside it.
pub fn format_norm(v: f64) -> String {
    if v == 0.0 || (1e-3..1e12).contains(&v) {
        format!("{v:.12}")
    } else {
        format!("{v:.11e}")
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum SymbolSource {
    Closed(ClosedForm),
    File(PathBuf),
}

impl SymbolSource {
    fn load(&self, d: usize) -> Result<Symbol> {
        Ok(match self {
            SymbolSource::Closed(form) => Symbol::closed(form.clone(), d)?,
            SymbolSource::File(p) => {
                let a = Symbol::from_file(&read_file(p)?)?;
                if a.dim() != d {
                    return Err(CliError::Config(format!("symbol acts in d = {}, the signal has d = {d}", a.dim())));
                }
                a
            }
        })
    }
}

#[derive(Debug, Serialize)]
struct ApplyRun {
    input: PathBuf,
    symbol: SymbolSource,
    quantization: Quantization,
    method: ApplyMethod,
    out: PathBuf,
}

impl ApplyRun {
    fn execute(&self, a: &Symbol, f: &SampledField) -> Result<i32> {
        let q = self.quantization.spec(f.grid().dim())?;
        let g = apply_op(a, &q, f, self.method)?;
        write_field(&self.out, &FieldFile::new(g.clone()))?;
        println!("wrote {} ({} samples, l2 norm {})", self.out.display(), g.len(), format_norm(g.l2_norm()));
        Ok(exit::PASS)
    }
}

#[derive(Debug, Serialize)]
struct RunRecord<'a> {
    scenario: &'a str,
    config: Option<&'a Path>,
    config_hash: &'a str,
    started_unix_seconds: u64,
    elapsed_seconds: f64,
    threads: Option<usize>,
    fixture: Option<modcalc_harness::FixtureStatus>,
}

fn verify(kind: ScenarioKind, text: &str, config: Option<&Path>, out_dir: &Path, fixtures: Option<&Path>, threads: Option<usize>) -> Result<i32> {
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let mut report = run_scenario_report(kind, text)?;
    if let Some(dir) = fixtures {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        check_fixture(&mut report, dir)?;
    }
    // The fixture status belongs to this run, not to the report.
    let fixture = report.fixture.take();
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let stem = out_dir.join(format!("{}-{}", kind.name(), &report.config_hash[..12]));
    let json = stem.with_extension("json");
    write_text(&json, &report.to_json())?;
    write_text(&stem.with_extension("csv"), &report.to_csv())?;
    let record = RunRecord {
        scenario: kind.name(),
        config,
        config_hash: &report.config_hash,
        started_unix_seconds: started,
        elapsed_seconds: clock.elapsed().as_secs_f64(),
        threads,
        fixture,
    };
    write_text(&stem.with_extension("run.json"), &serde_json::to_string_pretty(&record)?)?;
    println!("{}", headline(&report));
    if let Some(status) = fixture {
        println!("fixture: {status:?}");
    }
    println!("report: {}", json.display());
    Ok(report.exit_code())
}

fn run_scenario_report(kind: ScenarioKind, text: &str) -> Result<ScenarioReport> {
    Ok(modcalc_harness::run_scenario(kind, text)?)
}

fn headline(r: &ScenarioReport) -> String {
    let verdict = match &r.outcome {
        Outcome::Pass => "PASS".to_string(),
        Outcome::Fail { reason } => format!("FAIL ({reason})"),
        Outcome::Inapplicable { reason } => format!("INAPPLICABLE ({reason})"),
    };
    let mut line = format!("{}: {verdict}", r.scenario.name());
    if let Some(ratio) = &r.ratio {
        line += &format!(" max_ratio={:.12} drift={:.3e}", ratio.max_ratio, ratio.drift);
    }
    if let Some(id) = &r.identity {
        line += &format!(" identity_width={:.6} identity_drift={:.3e}", id.width, id.drift);
    }
    if let Some(k) = &r.kernel {
        line += &format!(" deviation={:.3e}", k.deviation);
    }
    line
}

#[derive(Debug, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
enum Shape {
    /// `exp(-|x|^2 / 2)`.
    Gaussian,
    /// Indicator of `[0, 1)^d`.
    Indicator,
    /// `prod_k h_n(x_k)`.
    Hermite { order: usize },
    Chirp { member: Member },
}

impl Shape {
    fn sample(&self, grid: &UniformGrid) -> Result<SampledField> {
        Ok(match self {
            Shape::Gaussian => SampledField::from_real_fn(grid.clone(), |p| (-0.5 * p.iter().map(|v| v * v).sum::<f64>()).exp())?,
            Shape::Indicator => {
                SampledField::from_real_fn(grid.clone(), |p| if p.iter().all(|v| (0.0..1.0).contains(v)) { 1.0 } else { 0.0 })?
            }
            Shape::Hermite { order } => {
                SampledField::from_real_fn(grid.clone(), |p| p.iter().map(|&v| hermite_function(*order, v)).product())?
            }
            Shape::Chirp { member } => member.sample(grid)?,
        })
    }
}

#[derive(Debug, Serialize)]
struct SignalRun {
    #[serde(flatten)]
    shape: Shape,
    grid: UniformGrid,
    out: PathBuf,
}

#[derive(Debug, Serialize)]
struct SymbolRun {
    form: ClosedForm,
    phase_grid: UniformGrid,
    sampled: bool,
    out: PathBuf,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
}

fn sidecar(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn read_file(path: &Path) -> Result<FieldFile> {
    if is_json(path) {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        return Ok(FieldFile::new(field_from_json(&text)?));
    }
    let bytes = fs::read(path).map_err(io_err(path))?;
    Ok(FieldFile::read_from(&mut bytes.as_slice())?)
}

fn read_field(path: &Path) -> Result<SampledField> {
    Ok(read_file(path)?.field)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(io_err(path))
}

/// Binary field file, or the JSON mirror (samples only) for `.json` paths.
fn write_field(path: &Path, file: &FieldFile) -> Result<()> {
    if is_json(path) {
        return write_text(path, &field_to_json(&file.field)?);
    }
    let mut bytes = Vec::new();
    file.write_to(&mut bytes)?;
    fs::write(path, bytes).map_err(io_err(path))
}

fn number(text: &str, what: &str) -> Result<f64> {
    text.trim().parse().map_err(|_| CliError::Config(format!("cannot read {what} from '{text}'")))
}

pub fn parse_window(text: &str, dim: usize) -> Result<Window> {
    let w = if text.trim_start().starts_with('{') {
        serde_json::from_str(text)?
    } else {
        let parts: Vec<&str> = text.split(':').collect();
        match parts[..] {
            ["gaussian"] => Window::gaussian_width(dim, 1.0),
            ["gaussian", s] => Window::gaussian_width(dim, number(s, "window width")?),
            ["hermite", k] => Window::hermite(dim, number(k, "Hermite order")? as usize, 1.0),
            ["hermite", k, s] => Window::hermite(dim, number(k, "Hermite order")? as usize, number(s, "window width")?),
            _ => return Err(CliError::Config(format!("unknown window '{text}'"))),
        }
    };
    if w.dim != dim {
        return Err(CliError::Config(format!("window of dimension {} for a signal in d = {dim}", w.dim)));
    }
    w.prepare()?;
    Ok(w)
}

pub fn parse_weight(text: &str, dim: usize) -> Result<Weight> {
    let w = if text.trim_start().starts_with('{') {
        serde_json::from_str(text)?
    } else {
        let parts: Vec<&str> = text.split(':').collect();
        match parts[..] {
            ["one"] => Weight::one(),
            ["poly" | "polynomial", t] => Weight::Polynomial { t: number(t, "polynomial order")? },
            ["exp" | "exp_power", r, s] => Weight::ExpPower { r: number(r, "weight rate")?, s: number(s, "weight exponent")? },
            _ => return Err(CliError::Config(format!("unknown weight '{text}'"))),
        }
    };
    w.check_dim(dim)?;
    Ok(w)
}

fn parse_exponents(text: &str) -> Result<Vec<Exponent>> {
    Ok(text.split(',').map(str::parse).collect::<std::result::Result<Vec<Exponent>, _>>()?)
}

fn parse_fit(items: &[String], dim: usize) -> Result<FitSpec> {
    let mut fit = FitSpec { s: 1.0, weight: Weight::one() };
    for item in items {
        match item.split_once('=') {
            Some(("s", v)) => fit.s = number(v, "s")?,
            Some(("weight", v)) => fit.weight = parse_weight(v, dim)?,
            _ => return Err(CliError::Config(format!("--fit-decay takes s=<value> and weight=<weight>, got '{item}'"))),
        }
    }
    if !(fit.s > 0.0 && fit.s.is_finite()) {
        return Err(CliError::Config(format!("s must be positive, got {}", fit.s)));
    }
    Ok(fit)
}

fn parse_closed_form(text: &str) -> Result<ClosedForm> {
    let json = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        let p = Path::new(text);
        fs::read_to_string(p).map_err(io_err(p))?
    };
    Ok(serde_json::from_str(&json)?)
}

fn parse_symbol_source(text: &str) -> Result<SymbolSource> {
    if text.trim_start().starts_with('{') || is_json(Path::new(text)) {
        Ok(SymbolSource::Closed(parse_closed_form(text)?))
    } else {
        Ok(SymbolSource::File(PathBuf::from(text)))
    }
}

fn parse_shape(text: &str, dim: usize) -> Result<Shape> {
    let shape = match text.split_once(':') {
        None if text == "gaussian" => Shape::Gaussian,
        None if text == "indicator" => Shape::Indicator,
        Some(("hermite", k)) => Shape::Hermite { order: number(k, "Hermite order")? as usize },
        Some(("chirp", params)) => {
            let v = params.split(',').map(|t| number(t, "chirp parameter")).collect::<Result<Vec<f64>>>()?;
            let [center, width, modulation, chirp] = v[..] else {
                return Err(CliError::Config("chirp takes center,width,modulation,chirp".into()));
            };
            Shape::Chirp { member: Member::Chirp { center, width, modulation, chirp } }
        }
        _ => return Err(CliError::Config(format!("unknown shape '{text}'"))),
    };
    if matches!(shape, Shape::Chirp { .. }) && dim != 1 {
        return Err(CliError::Config("chirps are one-dimensional".into()));
    }
    Ok(shape)
}

