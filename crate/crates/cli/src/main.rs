use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use conley_cli::commands::{self, ConnectFlags, Filtration, Stage, Via};
use conley_cli::CliError;
use conley_core::conley::Strategy;

#[derive(Parser)]
#[command(name = "conley", version, about = "Connection matrices of graded cell complexes over GF(p)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Complex document (JSON).
    input: PathBuf,
    /// Override the document's prime modulus.
    #[arg(long)]
    field: Option<u32>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Coreduction)]
    strategy: StrategyArg,
    /// Size of the worker pool used for per-fiber matching.
    #[arg(long)]
    threads: Option<usize>,
    /// Write the main output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Coreduction,
    Coordinate,
}

#[derive(Clone, Copy, ValueEnum)]
enum StageArg {
    Input,
    Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum ViaArg {
    Direct,
    Conley,
}

#[derive(Subcommand)]
enum Command {
    /// Check the document; exit 1 with a report if it is not a complex.
    Validate(Common),
    /// Minimal complex and Poincaré polynomial.
    Homology(Common),
    /// Reduce to a strict complex carrying the connection matrix.
    Connect {
        #[command(flatten)]
        common: Common,
        /// Print the surviving cells after every stage.
        #[arg(long)]
        emit_tower: bool,
        /// Print shape and rank of each nonzero block.
        #[arg(long)]
        blocks: bool,
    },
    /// Fiber graph in DOT.
    Graph {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = StageArg::Input)]
        stage: StageArg,
    },
    /// Persistence diagram along a linear extension, or persistent Betti
    /// numbers of listed down-set pairs.
    Persist {
        #[command(flatten)]
        common: Common,
        /// Comma-separated element labels.
        #[arg(long, value_delimiter = ',', conflicts_with = "pairs")]
        extension: Option<Vec<String>>,
        /// File with one `a1,a2;b1,b2` line per pair.
        #[arg(long)]
        pairs: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ViaArg::Direct)]
        via: ViaArg,
    },
    /// Graded cubical complex of a grid file.
    Cubical {
        grid: PathBuf,
        #[arg(long)]
        field: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
}

fn write_main(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

impl Common {
    fn strategy(&self) -> Strategy {
        match self.strategy {
            StrategyArg::Coreduction => Strategy::Coreduction,
            StrategyArg::Coordinate => Strategy::Coordinate,
        }
    }

    fn setup(&self) -> Result<String, CliError> {
        if let Some(n) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Parse(e.to_string()))?;
        }
        read(&self.input)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate(c) => {
            let text = c.setup()?;
            eprint!("{}", commands::validate(&text, c.field)?);
        }
        Command::Homology(c) => {
            let text = c.setup()?;
            let out = commands::homology(&text, c.field, c.strategy())?;
            write_main(c.out.as_deref(), &out.main)?;
            print!("{}", out.report);
        }
        Command::Connect { common: c, emit_tower, blocks } => {
            let text = c.setup()?;
            let flags = ConnectFlags {
                strategy: c.strategy(),
                emit_tower,
                blocks,
            };
            let out = commands::connect(&text, c.field, flags)?;
            write_main(c.out.as_deref(), &out.main)?;
            print!("{}", out.report);
        }
        Command::Graph { common: c, stage } => {
            let text = c.setup()?;
            let stage = match stage {
                StageArg::Input => Stage::Input,
                StageArg::Output => Stage::Output,
            };
            write_main(c.out.as_deref(), &commands::graph(&text, c.field, stage, c.strategy())?)?;
        }
        Command::Persist { common: c, extension, pairs, via } => {
            let text = c.setup()?;
            let filtration = match (extension, pairs) {
                (Some(e), _) => Filtration::Extension(e),
                (None, Some(path)) => Filtration::Pairs(read(&path)?),
                (None, None) => Filtration::Default,
            };
            let via = match via {
                ViaArg::Direct => Via::Direct,
                ViaArg::Conley => Via::Conley,
            };
            let csv = commands::persist(&text, c.field, &filtration, via, c.strategy())?;
            write_main(c.out.as_deref(), &csv)?;
        }
        Command::Cubical { grid, field, out } => {
            let text = read(&grid)?;
            write_main(out.as_deref(), &commands::cubical(&text, field)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
