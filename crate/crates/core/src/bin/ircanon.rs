use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ircanon::bench::{run_plan, write_csv, BenchOptions, BenchPlan};
use ircanon::generators::{generate, random_relabel, FamilySpec};
use ircanon::io::{decode_dimacs, decode_graph6, encode_graph6, format_cycles};
use ircanon::{isomorphic_coloured, run, ColouredGraph, EngineConfig, EngineResult, Error, Mode, SelectorStrategy, Strategy};

#[derive(Parser)]
#[command(name = "ircanon", version, about = "Graph automorphism groups and canonical labelling")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Search engine.
    #[arg(long, global = true, default_value = "dfs")]
    engine: Strategy,
    /// Target cell selector; defaults to the engine's own choice.
    #[arg(long, global = true)]
    selector: Option<SelectorStrategy>,
    /// Seed for the randomised parts of the search.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Abort after this many search nodes.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Input format; guessed from the file extension when absent.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Write bench results here instead of stdout.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Disable the fixed-vertex, discrete-children and low-degree shortcuts.
    #[arg(long, global = true)]
    no_shortcuts: bool,
    /// Print search statistics on stderr.
    #[arg(long, global = true)]
    stats: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Graph6,
    Dimacs,
}

#[derive(Subcommand)]
enum Cmd {
    /// Automorphism group: order, orbits and generators.
    Aut { input: PathBuf },
    /// Automorphism group plus canonical form.
    Canon { input: PathBuf },
    /// Isomorphism test.
    Iso { first: PathBuf, second: PathBuf },
    /// Generate a benchmark graph as graph6, e.g. `gnp:n=100,p=0.5,seed=3`.
    Gen {
        spec: FamilySpec,
        /// Relabel the output with a random permutation from this seed.
        #[arg(long)]
        relabel: Option<u64>,
    },
    /// Run a TOML benchmark plan and emit CSV.
    Bench { plan: PathBuf },
}

fn read_input(path: &Path, format: Option<Format>) -> Result<ColouredGraph, Error> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text)?;
    } else {
        File::open(path)?.read_to_string(&mut text)?;
    }
    let format = format.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("dimacs" | "col" | "dim") => Format::Dimacs,
        _ => Format::Graph6,
    });
    match format {
        Format::Dimacs => decode_dimacs(&text),
        Format::Graph6 => {
            let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
            Ok(ColouredGraph::uncoloured(decode_graph6(line.trim())?))
        }
    }
}

fn config(opts: &Opts, mode: Mode) -> EngineConfig {
    let mut cfg = EngineConfig::new(mode, opts.engine);
    cfg.selector = opts.selector;
    cfg.node_budget = opts.budget;
    if let Some(seed) = opts.seed {
        cfg = cfg.with_seed(seed);
    }
    if opts.no_shortcuts {
        cfg = cfg.without_shortcuts();
    }
    cfg
}

fn print_group(out: &mut impl Write, r: &EngineResult) -> std::io::Result<()> {
    writeln!(out, "order {}", r.group_order)?;
    let orbits: Vec<String> = r
        .orbit_partition
        .classes()
        .iter()
        .map(|c| format!("[{}]", join(c)))
        .collect();
    writeln!(out, "orbits {}", orbits.join(" "))?;
    for g in &r.generators {
        writeln!(out, "generator {}", format_cycles(g))?;
    }
    Ok(())
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn print_stats(opts: &Opts, r: &EngineResult) {
    if opts.stats {
        for (k, v) in r.stats.to_map() {
            eprintln!("{k} {v}");
        }
    }
}

fn execute(cli: &Cli) -> Result<ExitCode, Error> {
    let opts = &cli.opts;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match &cli.cmd {
        Cmd::Aut { input } => {
            let cg = read_input(input, opts.format)?;
            let r = run(&cg.graph, &cg.colouring, &config(opts, Mode::GroupOnly))?;
            print_group(&mut out, &r)?;
            print_stats(opts, &r);
        }
        Cmd::Canon { input } => {
            let cg = read_input(input, opts.format)?;
            let r = run(&cg.graph, &cg.colouring, &config(opts, Mode::Canonical))?;
            print_group(&mut out, &r)?;
            let c = r.canonical.as_ref().expect("canonical mode");
            writeln!(out, "certificate {}", hex::encode(c.certificate.as_bytes()))?;
            writeln!(out, "graph6 {}", encode_graph6(&c.graph))?;
            if c.colouring.len() > 1 {
                writeln!(out, "colours {}", join(c.colouring.colours()))?;
            }
            writeln!(out, "labelling {}", join(c.labelling.images()))?;
            print_stats(opts, &r);
        }
        Cmd::Iso { first, second } => {
            let a = read_input(first, opts.format)?;
            let b = read_input(second, opts.format)?;
            let cfg = config(opts, Mode::Canonical);
            match isomorphic_coloured(&a.graph, &a.colouring, &b.graph, &b.colouring, &cfg)? {
                Some(map) => writeln!(out, "mapping {}", join(map.images()))?,
                None => {
                    writeln!(out, "NONISOMORPHIC")?;
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Cmd::Gen { spec, relabel } => {
            for g in generate(spec)?.graphs() {
                let g = match relabel {
                    Some(seed) => random_relabel(g, *seed).0,
                    None => g.clone(),
                };
                writeln!(out, "{}", encode_graph6(&g))?;
            }
        }
        Cmd::Bench { plan } => {
            let plan = BenchPlan::load(plan)?;
            let bench_opts = BenchOptions {
                selector: opts.selector,
                budget: opts.budget,
                no_shortcuts: opts.no_shortcuts,
            };
            let records = run_plan(&plan, &bench_opts)?;
            match &opts.csv {
                Some(path) => write_csv(File::create(path)?, &records)?,
                None => write_csv(&mut out, &records)?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BudgetExceeded { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
