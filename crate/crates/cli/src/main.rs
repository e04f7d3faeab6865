use std::path::PathBuf;
use std::process::ExitCode;

use carpet_quant_cli::commands::{self, Format, OptimalArgs, RenderSource};
use carpet_quant_cli::{CliResult, Failure, THREADS_ENV};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "carpetq", version, about = "Exact optimal quantization of the Sierpinski carpet measure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Optimal sets of n-means.
    Optimal {
        #[arg(long)]
        n: u64,
        /// Comma-separated level-ℓ words receiving m+1 points.
        #[arg(long)]
        t: Option<String>,
        /// Comma-separated variant per level-ℓ cylinder (lexicographic order).
        #[arg(long)]
        variants: Option<String>,
        /// Enumeration index of a single set.
        #[arg(long)]
        index: Option<String>,
        #[arg(long, default_value_t = 64)]
        limit: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quantization errors V_n as CSV.
    Error {
        /// List such as 2,3,5 or 1-16.
        #[arg(long)]
        n: String,
    },
    /// Seeded multi-start Lloyd on depth-k atoms.
    Lloyd {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        depth: u32,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
    },
    /// Dimension estimates 2 ln n / (-ln V_n) at n = 4^ℓ.
    Dimension {
        #[arg(long, default_value = "1-10")]
        levels: String,
    },
    /// Scaled error profile n^(2/β) V_n.
    Coefficient {
        #[arg(long, default_value = "10")]
        levels: String,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// SVG picture of a codebook over the carpet.
    Render {
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        n: Option<u64>,
        #[arg(long, default_value = "0")]
        index: String,
        /// Codebook document (JSON) to draw instead of an optimal set.
        #[arg(long)]
        file: Option<String>,
        /// Which document of the file to draw.
        #[arg(long, default_value_t = 0)]
        doc: usize,
        #[arg(long, default_value_t = 3)]
        carpet_depth: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified distortion bounds for codebook documents.
    Bounds {
        #[arg(long)]
        file: String,
        #[arg(long, default_value_t = 8)]
        depth: u32,
    },
    /// Depth-k atom discretization as CSV.
    Atoms {
        #[arg(long)]
        depth: u32,
    },
    /// Diagonal CVT and β_3 checks.
    Trap {
        #[arg(long, default_value_t = 6)]
        depth: u32,
    },
}

fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::input(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::input(format!("cannot configure thread pool: {e}")))?;
        log::debug!("using {n} worker threads");
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Optimal { n, t, variants, index, limit, format, out } => {
            let text = commands::optimal(&OptimalArgs { n, t, variants, index, limit, format: format.into() })?;
            commands::emit(&text, out.as_deref())
        }
        Command::Error { n } => commands::emit(&commands::error(&n)?, None),
        Command::Lloyd { n, depth, restarts, seed, max_iter } => {
            commands::emit(&commands::lloyd(n, depth, restarts, seed, max_iter)?, None)
        }
        Command::Dimension { levels } => commands::emit(&commands::dimension(&levels)?, None),
        Command::Coefficient { levels, grid, format } => {
            commands::emit(&commands::coefficient(&levels, grid, format.into())?, None)
        }
        Command::Render { n, index, file, doc, carpet_depth, out } => {
            let source = match (n, file) {
                (Some(n), _) => RenderSource::Optimal { n, index },
                (None, Some(path)) => RenderSource::File { path, doc },
                (None, None) => return Err(Failure::input("either --n or --file is required")),
            };
            commands::emit(&commands::render(&source, carpet_depth)?, out.as_deref())
        }
        Command::Bounds { file, depth } => commands::emit(&commands::bounds(&file, depth)?, None),
        Command::Atoms { depth } => commands::emit(&commands::atoms(depth)?, None),
        Command::Trap { depth } => commands::emit(&commands::trap(depth)?, None),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
