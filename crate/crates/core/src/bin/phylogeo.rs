use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use phylogeo_core::geo_rw::RandomWalk;
use phylogeo_core::io;
use phylogeo_core::pipeline::{run_pipeline, ModelSpec, RunConfig};
use phylogeo_core::synth::simulate;
use phylogeo_core::{CostMode, Error, Result};

/// Minimum-spanning-tree ancestral likelihood and phylogeography trees.
#[derive(Parser, Debug)]
#[command(version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate samples from a random tree.
    Simulate(SimArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    fasta: Option<PathBuf>,
    /// binary, jc69 or gtr:FILE
    #[arg(long, default_value = "jc69")]
    model: String,
    /// Substitution rate (ignored for GTR)
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long)]
    locations: Option<PathBuf>,
    #[arg(long)]
    geo_graph: Option<PathBuf>,
    /// independent or shared-t
    #[arg(long, default_value = "independent")]
    mode: String,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long)]
    root: Option<String>,
    #[arg(long)]
    out_newick: Option<PathBuf>,
    #[arg(long)]
    out_edges: Option<PathBuf>,
    #[arg(long)]
    out_report: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Leave wall time out of the report
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args, Debug)]
struct SimArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    /// binary, jc69 or gtr:FILE
    #[arg(long, default_value = "jc69")]
    model: String,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long)]
    geo_graph: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    tmin: f64,
    #[arg(long, default_value_t = 1.0)]
    tmax: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Writes samples.fasta, truth.json and, with a graph, locations.tsv
    /// and graph.tsv
    #[arg(long)]
    out_dir: PathBuf,
}

fn run(args: RunArgs) -> Result<()> {
    let fasta = args
        .fasta
        .ok_or_else(|| Error::Domain("--fasta is required".into()))?;
    let mut cfg = RunConfig::new(fasta, args.model.parse::<ModelSpec>()?);
    cfg.mu = args.mu;
    cfg.locations = args.locations;
    cfg.geo_graph = args.geo_graph;
    cfg.mode = args.mode.parse::<CostMode>()?;
    cfg.eps = args.eps;
    cfg.root = args.root;
    cfg.out_newick = args.out_newick;
    cfg.out_edges = args.out_edges;
    cfg.out_report = args.out_report;
    cfg.seed = args.seed;
    cfg.timing = !args.no_timing;
    let to_stdout = cfg.out_newick.is_none();
    let out = run_pipeline(&cfg)?;
    if to_stdout {
        print!("{}", out.newick);
    }
    Ok(())
}

fn sim(args: SimArgs) -> Result<()> {
    let model = args.model.parse::<ModelSpec>()?.load(args.mu)?;
    let walk = match &args.geo_graph {
        Some(p) => Some(RandomWalk::new(io::parse_geo_graph(p)?)?),
        None => None,
    };
    let out = simulate(args.k, args.n, &model, walk.as_ref(), (args.tmin, args.tmax), args.seed)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let dir = &args.out_dir;
    std::fs::write(dir.join("samples.fasta"), io::write_fasta(out.leaves(), &model.alphabet()))?;
    std::fs::write(dir.join("truth.json"), out.truth.to_json() + "\n")?;
    if let Some(w) = &walk {
        std::fs::write(dir.join("locations.tsv"), io::write_locations(out.leaves()))?;
        std::fs::write(dir.join("graph.tsv"), io::write_geo_graph(w.graph()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Some(Command::Simulate(a)) => sim(a),
        None => run(cli.run),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
