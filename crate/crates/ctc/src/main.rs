use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use ctc::error::CtcError;
use ctc::eval::{edge_density, parse_workload, size_ratio, GroundTruth, WorkloadParams};
use ctc::graph::Graph;
use ctc::local::lctc_search;
use ctc::oracle::oracle_ctc;
use ctc::search::{basic_search, bulk_delete_search, CommunityResult, QuerySpec};
use ctc::truss::{load_index, save_index, TrussIndex};

#[derive(Parser)]
#[command(name = "ctc", about = "Closest truss community search", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a truss index for an edge-list graph.
    Index {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run community search for one query or a workload file.
    Query {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        index: Option<PathBuf>,
        /// basic | bd | lctc | oracle
        #[arg(long, default_value = "bd")]
        algo: String,
        /// Inline query: whitespace-separated external node ids.
        #[arg(long)]
        query: Option<String>,
        /// Workload file: one query per line.
        #[arg(long)]
        queries: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        eta: usize,
        #[arg(long, default_value_t = 3)]
        gamma: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3600)]
        budget_secs: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report elapsed_ms as 0 for reproducible output streams.
        #[arg(long, default_value_t = false)]
        no_timing: bool,
    },
    /// Generate a query workload by seeded rejection sampling.
    GenQueries {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        size: usize,
        /// Draw candidates from the top fraction of nodes by degree.
        #[arg(long, default_value_t = 0.8)]
        fraction: f64,
        /// Maximum pairwise distance inside a query set.
        #[arg(long, default_value_t = 2)]
        inter_distance: u32,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a result stream against ground-truth communities.
    Eval {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a named fixture graph as an edge list (testing aid).
    #[command(hide = true)]
    GenFixture {
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn exit_code(e: &CtcError) -> i32 {
    match e {
        CtcError::InvalidArgument(_)
        | CtcError::InvalidQuery(_)
        | CtcError::WorkloadInfeasible(_)
        | CtcError::OracleSizeGuard(_, _) => 1,
        _ => 2,
    }
}

fn load_graph(path: &PathBuf) -> ctc::Result<Graph> {
    let f = File::open(path)?;
    Graph::parse_edge_list(BufReader::new(f))
}

fn load_or_build_index(g: &Graph, path: &Option<PathBuf>) -> ctc::Result<TrussIndex> {
    match path {
        Some(p) => {
            let f = File::open(p)?;
            load_index(BufReader::new(f), g)
        }
        None => Ok(TrussIndex::build(g)),
    }
}

fn out_writer(path: &Option<PathBuf>) -> ctc::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(cli: Cli) -> ctc::Result<()> {
    match cli.command {
        Command::Index { graph, out } => cmd_index(graph, out),
        Command::Query {
            graph,
            index,
            algo,
            query,
            queries,
            eta,
            gamma,
            seed,
            budget_secs,
            out,
            no_timing,
        } => cmd_query(
            graph, index, algo, query, queries, eta, gamma, seed, budget_secs, out, no_timing,
        ),
        Command::GenQueries {
            graph,
            index,
            size,
            fraction,
            inter_distance,
            count,
            seed,
            out,
        } => cmd_gen_queries(graph, index, size, fraction, inter_distance, count, seed, out),
        Command::Eval {
            results,
            truth,
            graph,
            out,
        } => cmd_eval(results, truth, graph, out),
        Command::GenFixture { name, seed, out } => cmd_gen_fixture(name, seed, out),
    }
}

fn cmd_index(graph: PathBuf, out: PathBuf) -> ctc::Result<()> {
    let started = std::time::Instant::now();
    let g = load_graph(&graph)?;
    let idx = TrussIndex::build(&g);
    let mut sink = BufWriter::new(File::create(&out)?);
    save_index(&idx, &g, &mut sink)?;
    sink.flush()?;
    let bytes = std::fs::metadata(&out)?.len();
    println!(
        "n={} m={} tau_bar={} build_secs={:.3} bytes={}",
        g.node_count(),
        g.edge_count(),
        idx.tau_bar_empty(),
        started.elapsed().as_secs_f64(),
        bytes
    );
    Ok(())
}

fn parse_inline_query(s: &str) -> ctc::Result<Vec<u64>> {
    let mut ids = Vec::new();
    for tok in s.split_whitespace() {
        ids.push(tok.parse().map_err(|_| {
            CtcError::InvalidArgument(format!("bad node id {tok:?} in --query"))
        })?);
    }
    if ids.is_empty() {
        return Err(CtcError::InvalidArgument("--query is empty".into()));
    }
    Ok(ids)
}

fn resolve_query(g: &Graph, ext: &[u64]) -> ctc::Result<Vec<u32>> {
    ext.iter()
        .map(|&id| {
            g.internal(id)
                .ok_or_else(|| CtcError::NoCommunity(format!("unknown node id {id}")))
        })
        .collect()
}

fn run_one(
    g: &Graph,
    idx: &TrussIndex,
    algo: &str,
    ext_query: &[u64],
    eta: usize,
    gamma: u32,
    budget: Duration,
) -> ctc::Result<CommunityResult> {
    let q = resolve_query(g, ext_query)?;
    if algo == "oracle" {
        let ans = oracle_ctc(g, &q)?;
        let w = &ans.diam_witness;
        let edge_ids = w
            .edges
            .iter()
            .map(|&(u, v)| g.edge_id(u, v).expect("oracle edges exist in graph"))
            .collect();
        return Ok(CommunityResult {
            algorithm: "oracle",
            k: ans.k_opt,
            nodes: w.nodes.clone(),
            edges: edge_ids,
            query_distance: w.query_distance,
            diameter: w.diameter,
            iterations: 0,
            elapsed: Duration::ZERO,
            iteration_log: Vec::new(),
            log: Default::default(),
            g0_nodes: w.nodes.len(),
            partial: false,
            eta_raised: false,
        });
    }
    let mut spec = QuerySpec::new(q);
    spec.eta = eta;
    spec.gamma = gamma;
    spec.time_budget = budget;
    match algo {
        "basic" => basic_search(g, idx, &spec),
        "bd" => bulk_delete_search(g, idx, &spec),
        "lctc" => lctc_search(g, idx, &spec),
        other => Err(CtcError::InvalidArgument(format!("unknown algorithm {other:?}"))),
    }
}

fn result_json(
    g: &Graph,
    ext_query: &[u64],
    algo: &str,
    outcome: &ctc::Result<CommunityResult>,
    no_timing: bool,
) -> serde_json::Value {
    match outcome {
        Ok(r) => {
            let nodes = r.external_nodes(g);
            let density = edge_density(r.nodes.len(), r.edges.len()).unwrap_or(0.0);
            serde_json::json!({
                "query": ext_query,
                "algo": algo,
                "k": r.k,
                "nodes": nodes,
                "edge_count": r.edges.len(),
                "diameter": r.diameter,
                "query_distance": r.query_distance,
                "density": density,
                "iterations": r.iterations,
                "elapsed_ms": if no_timing { 0 } else { r.elapsed.as_millis() as u64 },
                "status": if r.partial { "partial" } else { "ok" },
                "g0_nodes": r.g0_nodes,
            })
        }
        Err(e) => serde_json::json!({
            "query": ext_query,
            "algo": algo,
            "k": 0,
            "nodes": [],
            "edge_count": 0,
            "diameter": 0,
            "query_distance": 0,
            "density": 0.0,
            "iterations": 0,
            "elapsed_ms": 0,
            "status": "no_community",
            "reason": e.to_string(),
        }),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_query(
    graph: PathBuf,
    index: Option<PathBuf>,
    algo: String,
    query: Option<String>,
    queries: Option<PathBuf>,
    eta: usize,
    gamma: u32,
    _seed: u64,
    budget_secs: u64,
    out: Option<PathBuf>,
    no_timing: bool,
) -> ctc::Result<()> {
    match algo.as_str() {
        "basic" | "bd" | "lctc" | "oracle" => {}
        other => {
            return Err(CtcError::InvalidArgument(format!(
                "unknown algorithm {other:?}"
            )))
        }
    }
    let g = load_graph(&graph)?;
    if algo == "oracle" && g.node_count() > ctc::oracle::ORACLE_ENUM_MAX_N {
        return Err(CtcError::OracleSizeGuard(
            g.node_count(),
            ctc::oracle::ORACLE_ENUM_MAX_N,
        ));
    }
    let idx = load_or_build_index(&g, &index)?;
    let workload: Vec<Vec<u64>> = match (&query, &queries) {
        (Some(s), None) => vec![parse_inline_query(s)?],
        (None, Some(p)) => parse_workload(BufReader::new(File::open(p)?))?,
        _ => {
            return Err(CtcError::InvalidArgument(
                "provide exactly one of --query or --queries".into(),
            ))
        }
    };
    let budget = Duration::from_secs(budget_secs);

    let pool = make_pool()?;
    let lines: Vec<String> = pool.install(|| {
        workload
            .par_iter()
            .map(|ext_query| {
                let outcome = run_one(&g, &idx, &algo, ext_query, eta, gamma, budget);
                result_json(&g, ext_query, &algo, &outcome, no_timing).to_string()
            })
            .collect()
    });

    let mut sink = out_writer(&out)?;
    for line in lines {
        writeln!(sink, "{line}")?;
    }
    sink.flush()?;
    Ok(())
}

fn make_pool() -> ctc::Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("CTC_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CtcError::InvalidArgument(format!("bad CTC_THREADS value {v:?}")))?;
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| CtcError::InvalidArgument(e.to_string()))
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen_queries(
    graph: PathBuf,
    index: Option<PathBuf>,
    size: usize,
    fraction: f64,
    inter_distance: u32,
    count: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> ctc::Result<()> {
    let g = load_graph(&graph)?;
    let idx = load_or_build_index(&g, &index)?;
    let params = WorkloadParams {
        size,
        fraction,
        inter_distance,
        count,
        seed,
    };
    let queries = ctc::eval::gen_queries(&g, &idx, &params)?;
    let mut sink = out_writer(&out)?;
    writeln!(sink, "#seed {seed}")?;
    writeln!(
        sink,
        "#params size={size} fraction={fraction} inter_distance={inter_distance} count={count}"
    )?;
    for q in queries {
        let ext: Vec<String> = q.iter().map(|&v| g.external(v).to_string()).collect();
        writeln!(sink, "{}", ext.join(" "))?;
    }
    sink.flush()?;
    Ok(())
}

fn cmd_eval(
    results: PathBuf,
    truth: Option<PathBuf>,
    graph: Option<PathBuf>,
    out: Option<PathBuf>,
) -> ctc::Result<()> {
    use std::io::BufRead;
    let file = BufReader::new(File::open(&results)?);
    let mut records = Vec::new();
    for (lineno, line) in file.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: serde_json::Value = serde_json::from_str(&line).map_err(|e| CtcError::Parse {
            line: lineno + 1,
            msg: e.to_string(),
        })?;
        records.push(v);
    }
    if records.is_empty() {
        return Err(CtcError::InvalidArgument("results file has no records".into()));
    }

    let truth = match truth {
        Some(p) => {
            let mut gt = GroundTruth::parse(BufReader::new(File::open(p)?))?;
            if let Some(gp) = &graph {
                let g = load_graph(gp)?;
                let dropped = gt.resolve(&g);
                if dropped > 0 {
                    eprintln!("warning: dropped {dropped} unresolvable ground-truth ids");
                }
            }
            Some(gt)
        }
        None => None,
    };

    let mut n_ok = 0usize;
    let mut partial = 0usize;
    let mut failed = 0usize;
    let (mut sum_diam, mut sum_density, mut sum_ratio) = (0.0f64, 0.0f64, 0.0f64);
    let (mut sum_p, mut sum_r, mut sum_f, mut scored) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    for rec in &records {
        let status = rec["status"].as_str().unwrap_or("no_community");
        if status == "no_community" {
            failed += 1;
            continue;
        }
        if status == "partial" {
            partial += 1;
        }
        n_ok += 1;
        sum_diam += rec["diameter"].as_f64().unwrap_or(0.0);
        sum_density += rec["density"].as_f64().unwrap_or(0.0);
        let nodes: Vec<u64> = rec["nodes"]
            .as_array()
            .map(|a| a.iter().filter_map(|x| x.as_u64()).collect())
            .unwrap_or_default();
        if let Some(g0) = rec["g0_nodes"].as_u64() {
            if g0 > 0 {
                sum_ratio += size_ratio(nodes.len(), g0 as usize);
            }
        }
        if let Some(gt) = &truth {
            let query: Vec<u64> = rec["query"]
                .as_array()
                .map(|a| a.iter().filter_map(|x| x.as_u64()).collect())
                .unwrap_or_default();
            if let Some((p, r, f)) = gt.best_f1(&query, &nodes) {
                sum_p += p;
                sum_r += r;
                sum_f += f;
                scored += 1;
            }
        }
    }
    if n_ok == 0 {
        return Err(CtcError::InvalidArgument(
            "no successful records to aggregate".into(),
        ));
    }

    let mut summary = serde_json::json!({
        "queries": records.len(),
        "ok": n_ok,
        "partial": partial,
        "no_community": failed,
        "mean_diameter": sum_diam / n_ok as f64,
        "mean_density": sum_density / n_ok as f64,
        "mean_size_ratio": sum_ratio / n_ok as f64,
    });
    if truth.is_some() {
        summary["scored"] = serde_json::json!(scored);
        if scored > 0 {
            summary["mean_precision"] = serde_json::json!(sum_p / scored as f64);
            summary["mean_recall"] = serde_json::json!(sum_r / scored as f64);
            summary["mean_f1"] = serde_json::json!(sum_f / scored as f64);
        }
    }
    let mut sink = out_writer(&out)?;
    writeln!(sink, "{summary}")?;
    sink.flush()?;
    Ok(())
}

fn cmd_gen_fixture(name: String, seed: u64, out: Option<PathBuf>) -> ctc::Result<()> {
    use ctc::fixtures;
    let g = match name.as_str() {
        "tri" => fixtures::g_tri(),
        "bowtie" => fixtures::g_bowtie(),
        "k4" => fixtures::g_k4(),
        "2k4" => fixtures::g_2k4(),
        "k4path" => fixtures::g_k4path(),
        "shortcut" => fixtures::g_shortcut(),
        "c5" => fixtures::g_c5(),
        "gnp" => fixtures::random_gnp(seed, 40, 0.15),
        "planted" => fixtures::planted_k8s(seed, 20).0,
        other => {
            return Err(CtcError::InvalidArgument(format!(
                "unknown fixture {other:?}"
            )))
        }
    };
    let mut sink = out_writer(&out)?;
    for e in 0..g.edge_count() as u32 {
        let (u, v) = g.edge(e);
        writeln!(sink, "{} {}", g.external(u), g.external(v))?;
    }
    sink.flush()?;
    Ok(())
}
