use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use convset::deg3::{cographic_lines, min_i2cs_maxdeg3, Deg3Error, Pipeline};
use convset::exact::{min_conversion_set, ExactError, SearchLimits};
use convset::graph::{parse_edge_list, Graph, VertexSet};
use convset::percolation::{run, run_capped};
use convset::polymatroid::{InstanceJson, PolymatroidInstance, DEFAULT_TRIALS};
use convset::satred::{build_reduction, check_equivalence, parse_dimacs, SatError};
use convset::torus::{construct_with, search_tile_patterns, white_cycle_structure, PatternSet, SearchConfig, TorusError};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "convset", version, about = "Irreversible k-conversion set toolkit")]
struct Cli {
    /// Seed for every randomized step; drawn from entropy when omitted and
    /// always echoed in the output.
    #[arg(long, global = true)]
    rng_seed: Option<u64>,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the threshold process from a seed and print the trace.
    Simulate {
        #[arg(long)]
        k: usize,
        /// Comma-separated seed vertices.
        #[arg(long, value_delimiter = ',')]
        seed: Vec<usize>,
        /// Round cap (defaults to the vertex count).
        #[arg(long)]
        max_rounds: Option<usize>,
        graph: PathBuf,
    },
    /// Find a minimum conversion set.
    MinSet {
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Engine::Auto)]
        engine: Engine,
        /// `auto` cross-checks against exhaustive search up to this many vertices.
        #[arg(long, default_value_t = 20)]
        cross_check_below: usize,
        /// Vertex limit for exhaustive search.
        #[arg(long, default_value_t = 30)]
        max_vertices: usize,
        graph: PathBuf,
    },
    /// Build the degree-4 graph for a 3-CNF formula.
    ReduceSat {
        cnf: PathBuf,
        /// Where to write the edge list.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check satisfiability against the conversion-set question by exhaustive search.
    CheckSatEquiv {
        cnf: PathBuf,
        #[arg(long, default_value_t = 120)]
        max_vertices: usize,
    },
    /// Build a 3-conversion seed on the m×n torus.
    TorusConstruct {
        m: usize,
        n: usize,
        /// Simulate the seed and check its size.
        #[arg(long)]
        verify: bool,
        /// Include the ASCII grid and the cell list.
        #[arg(long)]
        emit_grid: bool,
        /// Read pattern files from this directory instead of the built-in set.
        #[arg(long)]
        patterns: Option<PathBuf>,
    },
    /// Dump a polymatroid instance with its matching number and spanning number.
    PolymatroidDebug {
        /// Subcubic graph; its cycle-space lines are used.
        graph: Option<PathBuf>,
        /// Instance JSON instead of a graph.
        #[arg(long, conflicts_with = "graph")]
        instance: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        /// Brute-force cross-check up to this many lines.
        #[arg(long, default_value_t = 16)]
        brute_limit: usize,
    },
    /// Rerun the torus tile search and write the pattern files.
    SearchPatterns {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Engine {
    Brute,
    Deg3,
    Auto,
}

/// An error paired with the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(e: impl Into<anyhow::Error>) -> Self {
        Failure { code: 2, error: e.into() }
    }

    fn internal(e: impl Into<anyhow::Error>) -> Self {
        Failure { code: 3, error: e.into() }
    }
}

/// Successful runs report whether the answer was positive.
enum Outcome {
    Positive,
    Negative,
}

type CmdResult = Result<Outcome, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let seed = cli.rng_seed.unwrap_or_else(|| rand::thread_rng().gen());
    match pool.install(|| dispatch(cli.command, seed)) {
        Ok(Outcome::Positive) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cmd: Command, seed: u64) -> CmdResult {
    match cmd {
        Command::Simulate {
            k,
            seed: members,
            max_rounds,
            graph,
        } => simulate(&read_graph(&graph)?, k, &members, max_rounds),
        Command::MinSet {
            k,
            engine,
            cross_check_below,
            max_vertices,
            graph,
        } => min_set(&read_graph(&graph)?, k, engine, cross_check_below, max_vertices, seed),
        Command::ReduceSat { cnf, out } => reduce_sat(&cnf, &out),
        Command::CheckSatEquiv { cnf, max_vertices } => check_sat(&cnf, max_vertices),
        Command::TorusConstruct {
            m,
            n,
            verify,
            emit_grid,
            patterns,
        } => torus(m, n, verify, emit_grid, patterns.as_deref()),
        Command::PolymatroidDebug {
            graph,
            instance,
            trials,
            brute_limit,
        } => polymatroid_debug(graph.as_deref(), instance.as_deref(), trials, brute_limit, seed),
        Command::SearchPatterns { out } => search_patterns(&out),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::usage)
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let text = read_text(path)?;
    parse_edge_list(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::usage)
}

fn emit<T: Serialize>(value: &T) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(value).map_err(Failure::internal)?;
    println!("{s}");
    Ok(())
}

fn outcome(positive: bool) -> Outcome {
    if positive {
        Outcome::Positive
    } else {
        Outcome::Negative
    }
}

fn simulate(g: &Graph, k: usize, members: &[usize], max_rounds: Option<usize>) -> CmdResult {
    let seed = VertexSet::from_members(g.n(), members.iter().copied()).map_err(Failure::usage)?;
    let trace = run_capped(g, &seed, k, max_rounds.unwrap_or(g.n()));
    emit(&trace)?;
    let black = trace.final_black.len();
    eprintln!(
        "k={k}: {} seed vertices, {} rounds, {black}/{} black{}",
        seed.len(),
        trace.rounds.len(),
        g.n(),
        if trace.capped { " (round cap reached)" } else { "" }
    );
    Ok(outcome(trace.converted_all))
}

#[derive(Serialize)]
struct MinSetReport {
    engine: Engine,
    k: usize,
    n: usize,
    size: usize,
    witness: VertexSet,
    rounds: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pipeline_summary: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cross_check: Option<usize>,
}

fn exact_error(e: ExactError) -> Failure {
    match e {
        ExactError::TooLarge { .. } => Failure::usage(e),
        _ => Failure::internal(e),
    }
}

fn deg3_error(e: Deg3Error) -> Failure {
    match e {
        Deg3Error::DegreeTooHigh { .. } => Failure::usage(e),
        _ => Failure::internal(e),
    }
}

fn min_set(g: &Graph, k: usize, engine: Engine, cross_below: usize, max_vertices: usize, seed: u64) -> CmdResult {
    let limits = SearchLimits {
        max_vertices: Some(max_vertices),
        max_evaluations: None,
    };
    let deg3_applies = k == 2 && g.max_degree() <= 3;
    let use_deg3 = match engine {
        Engine::Brute => false,
        Engine::Deg3 if !deg3_applies => {
            return Err(Failure::usage(anyhow!(
                "the deg3 engine needs k = 2 and maximum degree at most 3"
            )))
        }
        Engine::Deg3 => true,
        Engine::Auto => deg3_applies,
    };
    let mut report = if use_deg3 {
        let sol = min_i2cs_maxdeg3(g, seed).map_err(deg3_error)?;
        MinSetReport {
            engine: Engine::Deg3,
            k,
            n: g.n(),
            size: sol.size,
            rounds: 0,
            witness: sol.witness,
            seed: Some(sol.seed),
            pipeline_summary: Some(serde_json::to_value(&sol.components).map_err(Failure::internal)?),
            cross_check: None,
        }
    } else {
        let sol = min_conversion_set(g, k, limits).map_err(exact_error)?;
        MinSetReport {
            engine: Engine::Brute,
            k,
            n: g.n(),
            size: sol.size,
            rounds: 0,
            witness: sol.witness,
            seed: None,
            pipeline_summary: None,
            cross_check: None,
        }
    };
    if engine == Engine::Auto && use_deg3 && g.n() <= cross_below {
        let brute = min_conversion_set(g, k, limits).map_err(exact_error)?;
        report.cross_check = Some(brute.size);
        if brute.size != report.size {
            emit(&report)?;
            return Err(Failure::internal(anyhow!(
                "deg3 engine found {} but exhaustive search found {}",
                report.size,
                brute.size
            )));
        }
    }
    let trace = run(g, &report.witness, k);
    if !trace.converted_all {
        return Err(Failure::internal(anyhow!("witness does not convert the graph")));
    }
    report.rounds = trace.rounds.len();
    emit(&report)?;
    eprintln!(
        "minimum {k}-conversion set: {} of {} vertices ({} engine, {} rounds)",
        report.size,
        g.n(),
        match report.engine {
            Engine::Deg3 => "deg3",
            _ => "brute",
        },
        report.rounds
    );
    Ok(Outcome::Positive)
}

fn sat_error(e: SatError) -> Failure {
    match e {
        SatError::OneWay(_) | SatError::Construction(_) => Failure::internal(e),
        SatError::Exact(ExactError::TooLarge { .. }) => Failure::usage(e),
        SatError::Exact(_) => Failure::internal(e),
        _ => Failure::usage(e),
    }
}

fn read_cnf(path: &Path) -> Result<convset::satred::CnfFormula, Failure> {
    let text = read_text(path)?;
    parse_dimacs(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::usage)
}

fn reduce_sat(cnf: &Path, out: &Path) -> CmdResult {
    let f = read_cnf(cnf)?;
    let red = build_reduction(&f).map_err(sat_error)?;
    fs::write(out, red.graph.to_edge_list())
        .with_context(|| format!("writing {}", out.display()))
        .map_err(Failure::usage)?;
    let mut value = serde_json::to_value(&red).map_err(Failure::internal)?;
    value["graph"] = json!({
        "path": out.display().to_string(),
        "n": red.graph.n(),
        "edges": red.graph.edge_count(),
        "max_degree": red.graph.max_degree(),
    });
    emit(&value)?;
    eprintln!(
        "{} variables, {} clauses -> {} vertices, {} edges, s = {}",
        f.n,
        f.m(),
        red.graph.n(),
        red.graph.edge_count(),
        red.s
    );
    Ok(Outcome::Positive)
}

fn check_sat(cnf: &Path, max_vertices: usize) -> CmdResult {
    let f = read_cnf(cnf)?;
    let limits = SearchLimits {
        max_vertices: Some(max_vertices),
        max_evaluations: None,
    };
    let report = check_equivalence(&f, limits).map_err(sat_error)?;
    emit(&report)?;
    eprintln!(
        "satisfiable: {}, conversion set of size {}: {}, agree: {}",
        report.satisfiable, report.s, report.conversion_set_exists, report.agrees
    );
    if !report.agrees {
        return Err(Failure::internal(anyhow!("satisfiability and conversion-set answers disagree")));
    }
    Ok(outcome(report.satisfiable))
}

fn torus_error(e: TorusError) -> Failure {
    match e {
        TorusError::TooSmall { .. } | TorusError::BadPattern { .. } | TorusError::MissingPattern(_) | TorusError::Io { .. } => {
            Failure::usage(e)
        }
        _ => Failure::internal(e),
    }
}

fn torus(m: usize, n: usize, verify: bool, emit_grid: bool, dir: Option<&Path>) -> CmdResult {
    let set = match dir {
        Some(d) => PatternSet::load_dir(d),
        None => PatternSet::from_env(),
    }
    .map_err(torus_error)?;
    let c = construct_with(m, n, &set).map_err(torus_error)?;
    let mut out = json!({
        "m": m,
        "n": n,
        "params": c.params,
        "size": c.size(),
        "expected_size": c.params.expected_size(),
        "bound": c.params.bound(),
        "extra": c.extra,
    });
    if verify {
        let percolates = c.state.percolates();
        let size_ok = match c.params.expected_size() {
            Some(e) => c.size() == e,
            None => c.size() <= c.params.bound(),
        };
        out["percolates"] = json!(percolates);
        out["size_ok"] = json!(size_ok);
        if !(percolates && size_ok) {
            emit(&out)?;
            return Err(Failure::internal(anyhow!("construction failed verification")));
        }
    }
    if emit_grid {
        out["cells"] = json!(c.state.black_cells());
        out["grid"] = json!(c.state.render());
        out["white_cycles"] = json!(white_cycle_structure(&c.state).count());
        eprint!("{}", c.state.render());
    }
    emit(&out)?;
    eprintln!("T({m},{n}) case {:?}: {} black cells", c.params.case, c.size());
    Ok(Outcome::Positive)
}

fn polymatroid_debug(
    graph: Option<&Path>,
    instance: Option<&Path>,
    trials: usize,
    brute_limit: usize,
    seed: u64,
) -> CmdResult {
    let (inst, source) = match (graph, instance) {
        (_, Some(path)) => {
            let text = read_text(path)?;
            let json: InstanceJson = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))
                .map_err(Failure::usage)?;
            (PolymatroidInstance::from_json(&json).map_err(Failure::usage)?, json!("instance"))
        }
        (Some(path), None) => {
            let g = read_graph(path)?;
            if g.max_degree() > 3 {
                return Err(Failure::usage(anyhow!("graph has maximum degree {}", g.max_degree())));
            }
            if g.vertices().all(|v| g.degree(v) == 3) {
                (cographic_lines(&g).map_err(deg3_error)?, json!("cubic graph"))
            } else {
                let p = Pipeline::build(&g).map_err(deg3_error)?;
                let inst = cographic_lines(&p.g3).map_err(deg3_error)?;
                (inst, json!({ "pipeline": p.kinds(), "g3_vertices": p.g3.n(), "v2_size": p.v2_len }))
            }
        }
        (None, None) => return Err(Failure::usage(anyhow!("give a graph file or --instance"))),
    };
    let mut rng = StdRng::seed_from_u64(seed);
    let nu = inst.nu_algebraic(&mut rng, trials);
    let all: Vec<usize> = (0..inst.len()).collect();
    let rank = inst.rank(&all);
    let spanning = inst
        .min_spanning_set(&all, &mut rng, trials)
        .map_err(Failure::internal)?;
    let mut out = json!({
        "rng_seed": seed,
        "source": source,
        "instance": inst.to_json(),
        "rank": rank,
        "nu": nu,
        "rho": spanning.members.len(),
        "matching": spanning.matching,
        "spanning_set": spanning.members,
    });
    let mut consistent = nu + spanning.members.len() == rank;
    if inst.len() <= brute_limit {
        let nu_b = inst.nu_bruteforce(brute_limit).map_err(Failure::internal)?;
        let rho_b = inst.rho_bruteforce(brute_limit).map_err(Failure::internal)?;
        out["nu_bruteforce"] = json!(nu_b);
        out["rho_bruteforce"] = json!(rho_b);
        consistent &= nu_b == nu && rho_b == spanning.members.len();
    }
    emit(&out)?;
    eprintln!(
        "{} lines in dimension {}: rank {rank}, nu {nu}, rho {}",
        inst.len(),
        inst.dim(),
        spanning.members.len()
    );
    if !consistent {
        return Err(Failure::internal(anyhow!("algebraic and brute-force values disagree")));
    }
    Ok(Outcome::Positive)
}

fn search_patterns(out: &Path) -> CmdResult {
    let set = search_tile_patterns(&SearchConfig::default()).map_err(Failure::internal)?;
    fs::create_dir_all(out)
        .and_then(|_| set.write_dir(out))
        .with_context(|| format!("writing {}", out.display()))
        .map_err(Failure::usage)?;
    let names: Vec<String> = set.iter().map(|p| p.name.clone()).collect();
    emit(&json!({ "dir": out.display().to_string(), "patterns": names }))?;
    eprintln!("wrote {} patterns to {}", names.len(), out.display());
    Ok(Outcome::Positive)
}
