// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gridjunta::extract::Method;
use gridjunta::io::Sidecar;
use gridjunta::Mode;
use gridjunta_cli::commands;
use gridjunta_cli::config::{ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(name = "gridjunta", version, about = "Junta approximation and Lipschitz-map structure on grids and tori")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base seed for every randomised step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Largest table to materialise, in points. Overrides GRIDJUNTA_BUDGET.
    #[arg(long, global = true, value_name = "POINTS")]
    budget: Option<usize>,
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Single configuration override, `key=value`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Tribes,
    Tree,
    Cuboid,
    Random,
    Parity,
    MapIdentity,
    MapDictator,
    MapRandom,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Grid,
    Torus,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Grid => Mode::Grid,
            ModeArg::Torus => Mode::Torus,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Main,
    Refined,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated table (.gjt) or map (.gjm) with its JSON sidecar.
    Gen {
        kind: Generator,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        s: Option<u32>,
        #[arg(long)]
        t: Option<u32>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        a: Option<u32>,
        #[arg(long)]
        p: Option<f64>,
        /// 1-based input coordinate for each output of a dictator map.
        #[arg(long, value_delimiter = ',')]
        picks: Vec<usize>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Edge boundary of a table with the isoperimetric lower bound.
    Boundary {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "grid")]
        mode: ModeArg,
        /// Restrict to edges in one direction (1-based).
        #[arg(long)]
        direction: Option<usize>,
    },
    /// Coordinate influences of a table.
    Influence { input: PathBuf },
    /// Extract a junta and write it as .gjj with a report row.
    Extract {
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value = "main")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "grid")]
        mode: ModeArg,
    },
    /// Analyse a map container (.gjm) coordinate by coordinate.
    Lipschitz {
        input: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value = "torus")]
        mode: ModeArg,
    },
    /// Run a verification suite; exits 0 iff nothing failed.
    Verify {
        /// isoperimetry, claim21, transfer, intervals, fibres, hstar,
        /// normrel, pipelines, lipschitz, examples or all.
        suite: String,
        /// Extra containers to check; repeatable.
        #[arg(long)]
        input: Vec<PathBuf>,
    },
}

fn sidecar(kind: Generator, c: &Command, seed: u64) -> anyhow::Result<Sidecar> {
    let Command::Gen { k, n, l, m, s, t, d, a, p, picks, .. } = c else { unreachable!() };
    let name = match kind {
        Generator::Tribes => "tribes",
        Generator::Tree => "tree",
        Generator::Cuboid => "cuboid",
        Generator::Random => "random",
        Generator::Parity => "parity",
        Generator::MapIdentity => "map-identity",
        Generator::MapDictator => "map-dictator",
        Generator::MapRandom => "map-random",
    };
    let need = |v: Option<u32>, key: &str| v.ok_or_else(|| anyhow::anyhow!("gen {name} needs --{key}"));
    let mut sc = Sidecar::new(name, commands::needs_seed(name).then_some(seed));
    sc = match kind {
        Generator::Tribes => sc.param("k", need(*k, "k")?).param("s", need(*s, "s")?).param("t", need(*t, "t")?),
        Generator::Tree => sc.param("k", need(*k, "k")?).param("d", need(*d, "d")?),
        Generator::Cuboid => {
            sc.param("a", need(*a, "a")?).param("s", need(*s, "s")?).param("k", need(*k, "k")?).param("n", need(*n, "n")?)
        }
        Generator::Random => sc.param("k", k.unwrap_or(3)).param("n", n.unwrap_or(3)).param("p", p.unwrap_or(0.5)),
        Generator::Parity => sc.param("k", need(*k, "k")?).param("n", need(*n, "n")?),
        Generator::MapIdentity => sc.param("k", need(*k, "k")?).param("n", need(*n, "n")?),
        Generator::MapDictator => {
            if picks.is_empty() {
                anyhow::bail!("gen map-dictator needs --picks");
            }
            sc.param("k", need(*k, "k")?).param("n", need(*n, "n")?).param("l", need(*l, "l")?).param("picks", picks)
        }
        Generator::MapRandom => sc
            .param("k", need(*k, "k")?)
            .param("n", need(*n, "n")?)
            .param("l", need(*l, "l")?)
            .param("m", m.ok_or_else(|| anyhow::anyhow!("gen map-random needs --m"))?),
    };
    Ok(sc)
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let overrides = Overrides { out: cli.out, seed: cli.seed, workers: cli.workers, budget: cli.budget, set: cli.set };
    let cfg = ExperimentConfig::load(cli.config.as_deref(), &overrides)?;
    match &cli.command {
        c @ Command::Gen { kind, output, .. } => commands::gen(sidecar(*kind, c, cfg.seed)?, output.clone(), &cfg),
        Command::Boundary { input, mode, direction } => commands::boundary(input, (*mode).into(), *direction),
        Command::Influence { input } => commands::influence(input),
        Command::Extract { input, eps, method, mode } => {
            let method = match method {
                MethodArg::Main => Method::Main,
                MethodArg::Refined => Method::Refined,
            };
            commands::extract(input, *eps, method, (*mode).into(), &cfg)
        }
        Command::Lipschitz { input, delta, eps, mode } => commands::lipschitz(input, *delta, *eps, (*mode).into(), &cfg),
        Command::Verify { suite, input } => commands::verify(suite, input, &cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::EXIT_FAILURES as u8)
        }
    }
}
