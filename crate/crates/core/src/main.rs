use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use diamsketch::harness;
use diamsketch::io as dio;
use diamsketch::lab;
use diamsketch::metric::{BipartiteGraph, FiniteMetric};
use diamsketch::{exact, EstimatorParams, Error};

#[derive(Parser)]
#[command(
    name = "diamsketch",
    version,
    about = "Turnstile diameter sketches on finite metrics, with an adversarial lower-bound lab"
)]
struct Cli {
    /// Worker threads for trial loops (0 = one per CPU)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InstanceArgs {
    /// Read the instance from a graph file instead of generating it
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Side size of the generated bipartite instance
    #[arg(short, default_value_t = 100)]
    n: usize,
    /// Edge probability, or `auto` for the analysis-driven value
    #[arg(short, default_value = "auto")]
    p: String,
    /// Gap parameter: I* collects i with d(u_i, v_i) >= 2k+1
    #[arg(short, default_value_t = 2)]
    k: usize,
    /// Generator seed (DIAMSKETCH_SEED overrides)
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl InstanceArgs {
    fn load(&self) -> Result<BipartiteGraph, Error> {
        match &self.graph {
            Some(path) => dio::read_graph(path),
            None => {
                let p = harness::parse_edge_probability(&self.p, self.n, self.k)?;
                BipartiteGraph::gen(self.n, p, harness::effective_seed(self.seed)?)
            }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random bipartite instance; graph to stdout or --out,
    /// structural property report to stderr
    GenMetric {
        /// Instance family (the bipartite hard distribution is the only one)
        #[arg(long)]
        bipartite: bool,
        #[arg(short)]
        n: usize,
        /// Edge probability, or `auto` for n^(-1+1/(2k-1))/log2(n)
        #[arg(short, default_value = "auto")]
        p: String,
        #[arg(short, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the graph file here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a stream against the exact diameter oracle or the
    /// insertion-only baseline
    Replay {
        #[arg(long)]
        stream: PathBuf,
        /// Dense metric CSV
        #[arg(long)]
        metric: Option<PathBuf>,
        /// Bipartite graph file (uses its 2n-point shortest-path metric)
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Print the exact diameter of the streamed multiset
        #[arg(long)]
        oracle: bool,
        /// Print the first-insertion 2-approximation (insertions only)
        #[arg(long)]
        baseline: bool,
    },
    /// Stream a multiset into the c-approximate diameter estimator
    DiamEstimate {
        /// Dense metric CSV
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        stream: PathBuf,
        /// Approximation factor (needs floor((c-2)/4) >= 2)
        #[arg(long)]
        c: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Append total rows and serialized bytes to the output
        #[arg(long)]
        report_space: bool,
    },
    /// Sweep approximation factors and report rows/bytes/success CSV
    Tradeoff {
        /// Comma-separated approximation factors
        #[arg(long, value_delimiter = ',', required = true)]
        c: Vec<f64>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Average degree of the random connected instance graphs
        #[arg(long, default_value_t = 4.0)]
        avg_deg: f64,
        #[arg(long, default_value_t = 0.25)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lower-bound laboratory
    Lab {
        #[command(subcommand)]
        cmd: LabCmd,
    },
}

#[derive(Subcommand)]
enum LabCmd {
    /// Structural properties of an instance vs the analysis thresholds
    Properties {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Draw hard samples and check that the hidden index determines the
    /// diameter; CSV `sample,i,coin,passes`
    SampleHard {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = lab::DEFAULT_P_VAL)]
        p_val: i64,
        #[arg(long, default_value_t = lab::DEFAULT_U_VAL)]
        u_val: i64,
    },
    /// Brute-force minrank over F2 of a knowledge graph (at most 5 vertices)
    Minrank {
        /// Extract the knowledge graph from this instance file
        #[arg(long, conflicts_with = "preset")]
        graph: Option<PathBuf>,
        #[arg(short, default_value_t = 2)]
        k: usize,
        /// Built-in family: edgeless, complete, or cycle
        #[arg(long)]
        preset: Option<String>,
        /// Vertex count for --preset
        #[arg(long, default_value_t = 5)]
        t: usize,
    },
    /// Kernel (fooling) vectors of a sketch matrix against an instance
    Fooling {
        /// Matrix file: header `s n`, then s integer rows
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        /// Single index to test; omit to scan all columns (CSV `i,exists`)
        #[arg(short, long)]
        index: Option<usize>,
    },
    /// Dual certificate M = H·T with unit diagonal and zeros on constrained
    /// neighborhoods; prints M as CSV
    Dual {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated constrained indices; default: every eligible
        /// index (not self-adjacent, admitting no fooling vector)
        #[arg(long)]
        constrained: Option<String>,
    },
    /// Run the sketch pipeline against the hard distribution and report the
    /// empirical failure rate
    Adversary {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Use the exact BFS oracle instead of the sketch (always rate 0)
        #[arg(long)]
        baseline: bool,
    },
}

fn load_metric(metric: &Option<PathBuf>, graph: &Option<PathBuf>) -> Result<FiniteMetric, Error> {
    match (metric, graph) {
        (Some(path), None) => dio::read_dense_metric(path),
        (None, Some(path)) => {
            let g = dio::read_graph(path)?;
            Ok(diamsketch::metric::shortest_path_metric(&g))
        }
        _ => Err(Error::param("metric", "pass exactly one of --metric or --graph")),
    }
}

fn parse_index_list(text: &str) -> Result<Vec<usize>, Error> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::param("constrained", format!("`{t}` is not an index")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), Error> {
    let stdout = io::stdout();
    match cli.command {
        Command::GenMetric { bipartite, n, p, k, seed, out } => {
            if !bipartite {
                return Err(Error::param("bipartite", "only bipartite instances are supported; pass --bipartite"));
            }
            let seed = harness::effective_seed(seed)?;
            match out {
                Some(path) => {
                    let file = std::fs::File::create(path)?;
                    harness::run_gen_metric(n, &p, k, seed, file, io::stderr())?;
                }
                None => harness::run_gen_metric(n, &p, k, seed, stdout.lock(), io::stderr())?,
            }
        }
        Command::Replay { stream, metric, graph, oracle, baseline } => {
            if oracle == baseline {
                return Err(Error::param("oracle", "pass exactly one of --oracle or --baseline"));
            }
            let m = load_metric(&metric, &graph)?;
            let updates = dio::read_stream(&stream)?;
            let mut out = stdout.lock();
            if oracle {
                writeln!(out, "diameter,{}", harness::replay_oracle(&m, &updates)?)?;
            } else {
                writeln!(out, "baseline,{}", harness::insertion_only_baseline(&m, &updates)?)?;
            }
        }
        Command::DiamEstimate { metric, stream, c, delta, seed, report_space } => {
            let m = dio::read_dense_metric(&metric)?;
            let updates = dio::read_stream(&stream)?;
            harness::run_estimate(
                &m,
                &updates,
                c,
                delta,
                harness::effective_seed(seed)?,
                EstimatorParams::default(),
                report_space,
                stdout.lock(),
            )?;
        }
        Command::Tradeoff { c, n, trials, avg_deg, delta, seed } => {
            harness::run_tradeoff(
                &c,
                n,
                trials,
                avg_deg,
                delta,
                harness::tradeoff_params(),
                harness::effective_seed(seed)?,
                stdout.lock(),
            )?;
        }
        Command::Lab { cmd } => run_lab(cmd, stdout)?,
    }
    Ok(())
}

fn run_lab(cmd: LabCmd, stdout: io::Stdout) -> Result<(), Error> {
    let mut out = stdout.lock();
    match cmd {
        LabCmd::Properties { instance } => {
            let g = instance.load()?;
            writeln!(out, "{}", lab::verify_graph_properties(&g, instance.k))?;
        }
        LabCmd::SampleHard { instance, samples, p_val, u_val } => {
            let g = instance.load()?;
            let seed = harness::effective_seed(instance.seed)?;
            writeln!(out, "sample,i,coin,passes")?;
            for s in 0..samples {
                let sample = lab::sample_hard_valid(
                    &g,
                    instance.k,
                    p_val,
                    u_val,
                    diamsketch::seeding::derive(seed, s as u64),
                    10_000,
                )?;
                let passes = lab::check_index_determines_diam(&g, &sample, instance.k)?;
                writeln!(out, "{s},{},{},{}", sample.i(), sample.coin(), passes)?;
            }
        }
        LabCmd::Minrank { graph, k, preset, t } => {
            let kg = match (&graph, preset.as_deref()) {
                (Some(path), None) => {
                    let g = dio::read_graph(path)?;
                    lab::KnowledgeGraph::from_instance(&g, k)
                }
                (None, Some("edgeless")) => lab::KnowledgeGraph::edgeless(t),
                (None, Some("complete")) => lab::KnowledgeGraph::complete(t),
                (None, Some("cycle")) => lab::KnowledgeGraph::directed_cycle(t),
                (None, Some(other)) => {
                    return Err(Error::param("preset", format!("unknown preset `{other}`")))
                }
                _ => return Err(Error::param("graph", "pass exactly one of --graph or --preset")),
            };
            writeln!(out, "vertices,{}", kg.order())?;
            writeln!(out, "edges,{}", kg.edges().len())?;
            writeln!(out, "minrank,{}", lab::minrank_f2(&kg)?)?;
        }
        LabCmd::Fooling { matrix, graph, index } => {
            let t = dio::read_matrix(&matrix)?;
            let g = dio::read_graph(&graph)?;
            match index {
                Some(i) => match lab::fooling_vector(&t, &g, i)? {
                    Some(z) => {
                        let entries: Vec<String> = z.iter().map(|v| v.to_string()).collect();
                        writeln!(out, "{}", entries.join(" "))?;
                    }
                    None => writeln!(out, "none")?,
                },
                None => {
                    writeln!(out, "i,exists")?;
                    for i in 0..t.n() {
                        writeln!(out, "{i},{}", lab::fooling_vector(&t, &g, i)?.is_some())?;
                    }
                }
            }
        }
        LabCmd::Dual { matrix, graph, constrained } => {
            let t = dio::read_matrix(&matrix)?;
            let g = dio::read_graph(&graph)?;
            let constrained = match constrained {
                Some(text) => parse_index_list(&text)?,
                None => {
                    let mut free = Vec::new();
                    let mut skipped = Vec::new();
                    for i in 0..t.n() {
                        if !g.has_edge(i, i) && lab::fooling_vector(&t, &g, i)?.is_none() {
                            free.push(i);
                        } else {
                            skipped.push(i);
                        }
                    }
                    if !skipped.is_empty() {
                        eprintln!("ineligible (self-adjacent or fooled), left unconstrained: {skipped:?}");
                    }
                    free
                }
            };
            let m = lab::build_dual_matrix(&t, &g, &constrained)?;
            for row in &m {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                writeln!(out, "{}", line.join(","))?;
            }
            writeln!(out, "numeric_rank,{}", exact::numeric_rank(&m, 1e-7))?;
        }
        LabCmd::Adversary { instance, trials, baseline } => {
            let g = instance.load()?;
            let seed = harness::effective_seed(instance.seed)?;
            let cfg = lab::AdversaryConfig::default();
            let outcome = if baseline {
                lab::oracle_baseline(&g, instance.k, &cfg, trials, seed)?
            } else {
                lab::adversary_eval(&g, instance.k, &cfg, trials, seed)?
            };
            writeln!(out, "trials,{}", outcome.trials)?;
            writeln!(out, "failures,{}", outcome.failures)?;
            writeln!(out, "rate,{}", outcome.rate())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) =
            rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // a closed stdout (e.g. piping into `head`) is not a failure
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
