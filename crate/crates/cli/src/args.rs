use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "modcalc", version, about = "Time-frequency numerics and operator-norm scenarios")]
pub struct Cli {
    /// Validate, print the fully defaulted run configuration and exit.
    #[arg(long, global = true)]
    pub dry_run: bool,
    /// Cap the number of worker threads. Results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Short-time Fourier transform of a field file.
    Stft {
        #[arg(long)]
        input: PathBuf,
        /// `gaussian[:sigma]`, `hermite:<order>[:sigma]` or a JSON window.
        #[arg(long, default_value = "gaussian:1.0")]
        window: String,
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Spectrogram file; the JSON summary goes next to it unless `--summary` is given.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Fit `|V f| <= C w(x) exp(-r |xi|^(1/s))`, e.g. `--fit-decay s=1 weight=one`.
        #[arg(long, num_args = 1..)]
        fit_decay: Option<Vec<String>>,
    },
    /// Mixed norm of a field, or its modulation-space norm.
    #[command(group(ArgGroup::new("mode").required(true).args(["exponents", "modulation"])))]
    Norm {
        #[arg(long)]
        input: PathBuf,
        /// Exponents `p_1,...,p_d` of a mixed norm of the samples (innermost first).
        #[arg(long)]
        exponents: Option<String>,
        /// `p,q` of the modulation-space norm `M^{p,q}`.
        #[arg(long)]
        modulation: Option<String>,
        #[arg(long, value_enum, default_value_t = PresetArg::Lpq1)]
        preset: PresetArg,
        #[arg(long, default_value = "gaussian:1.0")]
        window: String,
        /// `one`, `poly:<t>`, `exp:<r>:<s>` or a JSON weight.
        #[arg(long, default_value = "one")]
        weight: String,
    },
    /// Apply `Op_A(a)` to a field.
    Apply {
        #[arg(long)]
        input: PathBuf,
        /// A closed-form symbol as JSON (inline or a `.json` file) or a symbol field file.
        #[arg(long)]
        symbol: String,
        /// `weyl`, `kn` or `matrix:<row-major csv>`.
        #[arg(long, default_value = "kn")]
        quantization: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Fast)]
        method: MethodArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named scenario and write JSON and CSV reports.
    Verify {
        /// p32, p32b, opcont3, propopcont, sobolev, weightedl2 or kernel.
        scenario: String,
        /// Scenario configuration; all keys are optional.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Compare against frozen fixtures here (default: $MODCALC_FIXTURES when set).
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
    /// Write test signals and sampled symbols.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// `gaussian`, `indicator` (of `[0, 1)^d`), `hermite:<k>` or `chirp:<center>,<width>,<modulation>,<chirp>`.
    Signal {
        #[arg(long, default_value = "gaussian")]
        shape: String,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 12.0)]
        half_width: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample a closed-form symbol on the phase grid of a signal grid.
    Symbol {
        /// Closed-form symbol as JSON (inline or a `.json` file).
        #[arg(long)]
        form: String,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 12.0)]
        half_width: f64,
        /// Drop the closed form and keep only the samples.
        #[arg(long)]
        sampled: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetArg {
    Lpq1,
    Lpq2,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Fast,
    Quadrature,
}
