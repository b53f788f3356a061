use std::path::PathBuf;
use std::process::ExitCode;

use boundcoh::certifier::{AnalyticBounds, GridConfig};
use boundcoh::projective::Field;
use boundcoh::reports::{
    compactness_probe, emit_report, run_certify, run_invariant, run_sample, run_verify_cocycle, CertifyConfig,
    Invariant, Model, ProbeConfig, ReportEnvelope, ReportFormat, SamplerConfig, VolumeCocycle,
    DEFAULT_COCYCLE_THRESHOLD, DEFAULT_ESCAPE_HIGH, DEFAULT_ESCAPE_LOW, DEFAULT_TOLERANCE,
};
use boundcoh::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "boundcoh", version, about = "Seeded experiments on boundary cocycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Master seed; falls back to BOUNDCOH_SEED, then 0.
    #[arg(long, env = "BOUNDCOH_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Sampling {
    /// s1, sn, complex-hyperbolic or flags3.
    #[arg(long, default_value = "s1")]
    model: String,
    /// Dimension for sn and complex-hyperbolic.
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    /// Points per tuple; defaults to 4 for cross_ratio and vol3, 3 otherwise.
    #[arg(long)]
    tuple_size: Option<usize>,
    /// Genericity tolerance on pairwise distances or pairings.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
}

impl Sampling {
    fn config(&self, seed: u64, default_size: usize) -> Result<SamplerConfig, Error> {
        let model = Model::parse(&self.model, self.n)?;
        Ok(SamplerConfig {
            model,
            tuple_size: self.tuple_size.unwrap_or(default_size),
            count: self.count,
            seed,
            tolerance: self.tol,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Real,
    Complex,
}

#[derive(Subcommand)]
enum Command {
    /// Draw generic tuples.
    Sample {
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate an invariant on generic tuples.
    Invariant {
        /// orientation_class, cartan, triple_ratio, cross_ratio or vol3.
        #[arg(long)]
        invariant: String,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        common: Common,
    },
    /// Empirical supremum of the coboundary of Vol₂ or Vol₃.
    VerifyCocycle {
        #[arg(long, default_value = "vol3")]
        cocycle: String,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Largest acceptable |δVol|.
        #[arg(long, default_value_t = DEFAULT_COCYCLE_THRESHOLD)]
        threshold: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Certify sup |F| near 1 by the doubling recursion.
    CertifyBound {
        /// vol3, zero, constant, identity, log-modulus, pole or bump.
        #[arg(long, default_value = "vol3")]
        function: String,
        #[arg(long, value_enum, default_value_t = FieldArg::Complex)]
        field: FieldArg,
        /// Region parameter; 1/8 over ℝ and 1/10 over ℂ by default.
        #[arg(long)]
        delta: Option<f64>,
        /// Grid points per region.
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
        /// Extend to the whole line using the alternating symmetries.
        #[arg(long)]
        extend: bool,
        #[arg(long)]
        m_base: Option<f64>,
        #[arg(long)]
        m_near2: Option<f64>,
        #[arg(long)]
        b_defect: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Range of an invariant over generic configurations.
    ProbeConfigSpace {
        /// orientation_class, cartan or triple_ratio.
        #[arg(long)]
        invariant: String,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long, default_value_t = DEFAULT_ESCAPE_HIGH)]
        escape_high: f64,
        #[arg(long, default_value_t = DEFAULT_ESCAPE_LOW)]
        escape_low: f64,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        common: Common,
    },
}

fn run(command: Command) -> Result<(ReportEnvelope, Common), Error> {
    Ok(match command {
        Command::Sample { sampling, common } => (run_sample(&sampling.config(common.seed, 3)?)?, common),
        Command::Invariant {
            invariant,
            sampling,
            common,
        } => {
            let inv: Invariant = invariant.parse()?;
            let size = if matches!(inv, Invariant::CrossRatio | Invariant::Vol3) { 4 } else { 3 };
            (run_invariant(&sampling.config(common.seed, size)?, inv)?, common)
        }
        Command::VerifyCocycle {
            cocycle,
            count,
            tol,
            threshold,
            common,
        } => {
            let c: VolumeCocycle = cocycle.parse()?;
            (run_verify_cocycle(c, count, common.seed, tol, threshold)?, common)
        }
        Command::CertifyBound {
            function,
            field,
            delta,
            grid,
            extend,
            m_base,
            m_near2,
            b_defect,
            common,
        } => {
            let field = match field {
                FieldArg::Real => Field::Real,
                FieldArg::Complex => Field::Complex,
            };
            let mut config = CertifyConfig::new(&function, field);
            config.delta = delta;
            config.extend = extend;
            config.grid = GridConfig {
                analytic: AnalyticBounds {
                    m_base,
                    m_near2,
                    b_defect,
                },
                ..GridConfig::default().with_points(grid)
            };
            (run_certify(&config, common.seed)?, common)
        }
        Command::ProbeConfigSpace {
            invariant,
            bins,
            escape_high,
            escape_low,
            sampling,
            common,
        } => {
            let probe = ProbeConfig {
                bins,
                escape_high,
                escape_low,
                ..ProbeConfig::default()
            };
            (
                compactness_probe(&sampling.config(common.seed, 3)?, &invariant, &probe)?,
                common,
            )
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (envelope, common) = match run(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(match e {
                Error::InvalidConfig(_) | Error::UnknownInvariant(_) | Error::Io(_) => 2,
                _ => 1,
            });
        }
    };
    let format = match common.format {
        Format::Json => ReportFormat::Json,
        Format::Csv => ReportFormat::Csv,
    };
    if let Err(e) = emit_report(&envelope, format, common.out.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if envelope.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
