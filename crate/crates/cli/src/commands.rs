use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ftconn_core::harness::bench_labels;
use ftconn_core::query::{answer, answer_with_transcript, QueryError, QueryInput};
use ftconn_core::scheme::{build_scheme, BuildConfig, PartitionMode};
use ftconn_core::verify::{run_all, VerifyOptions};
use ftconn_core::Graph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::labelfile::{write_label_file, LabelFile, LabelFileHeader};
use crate::report::{partition_name, write_bench_csv, write_suites_csv, ConfigEcho, ErrorReport, HierarchyReport, LabelReport, Report, SuiteReport};
use crate::source::{fingerprint, load_graph};
use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "ftconn", version, about = "Vertex-fault-tolerant connectivity labels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build labels for every vertex of a graph.
    Build(BuildArgs),
    /// Answer one connectivity query from a label file.
    Query(QueryArgs),
    /// Compare sampled label answers against BFS.
    Bench(BenchArgs),
    /// Build and run every invariant suite.
    Verify(VerifyArgs),
    /// Write a generated graph as an edge list.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PartitionArg {
    Random,
    Derandomized,
}

impl From<PartitionArg> for PartitionMode {
    fn from(p: PartitionArg) -> Self {
        match p {
            PartitionArg::Random => PartitionMode::Random,
            PartitionArg::Derandomized => PartitionMode::Derandomized,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct SchemeArgs {
    /// Edge-list file, or `gen:<model>:k=v,...`.
    #[arg(long)]
    pub graph: String,
    /// Maximum number of faults.
    #[arg(long)]
    pub f: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seed for generated graphs; defaults to --seed.
    #[arg(long)]
    pub graph_seed: Option<u64>,
    #[arg(long, default_value_t = 8.0)]
    pub c: f64,
    #[arg(long, default_value_t = 4.0)]
    pub c_sparse: f64,
    #[arg(long, default_value_t = 64)]
    pub uid_bits: u32,
    #[arg(long, value_enum, default_value_t = PartitionArg::Random)]
    pub partition: PartitionArg,
}

impl SchemeArgs {
    fn config(&self) -> BuildConfig {
        BuildConfig {
            f: self.f,
            seed: self.seed,
            c: self.c,
            c_sparse: self.c_sparse,
            uid_bits: self.uid_bits,
            partition: self.partition.into(),
            keep_full_aux: false,
        }
    }

    fn graph(&self) -> Result<Graph, CliError> {
        load_graph(&self.graph, self.graph_seed.unwrap_or(self.seed))
    }

    fn echo(&self, command: &str, g: &Graph) -> ConfigEcho {
        ConfigEcho {
            command: command.into(),
            graph: Some(self.graph.clone()),
            labels: None,
            n: g.n(),
            m: Some(g.m()),
            f: self.f,
            seed: self.seed,
            c: self.c,
            c_sparse: self.c_sparse,
            uid_bits: self.uid_bits,
            partition: partition_name(self.partition.into()).into(),
            queries: None,
        }
    }
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    /// Label file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// JSON report path.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct QueryArgs {
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub t: usize,
    /// Comma-separated failed vertices.
    #[arg(long, value_delimiter = ',')]
    pub fail: Vec<usize>,
    /// Print the per-round merge transcript.
    #[arg(long)]
    pub transcript: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub labels: PathBuf,
    /// The graph the labels were built from.
    #[arg(long)]
    pub graph: String,
    /// Seed for generated graphs; defaults to the build seed.
    #[arg(long)]
    pub graph_seed: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    pub queries: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, default_value_t = 200)]
    pub queries: usize,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// `gen:<model>:k=v,...` or just `<model>:k=v,...`.
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Runs a parsed command, returning the text to print on stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Build(a) => build(&a).map(|r| summary_line(&r)),
        Command::Query(a) => query(&a),
        Command::Bench(a) => bench(&a).map(|r| summary_line(&r)),
        Command::Verify(a) => verify(&a).map(|r| summary_line(&r)),
        Command::Gen(a) => gen(&a),
    }
}

fn summary_line(r: &Report) -> String {
    let mut parts = vec![format!("{}: n={} f={}", r.config.command, r.config.n, r.config.f)];
    if let Some(l) = &r.labels {
        parts.push(format!("mean_bits={:.0} max_bits={}", l.mean_bits, l.max_bits));
    }
    if let Some(e) = &r.errors {
        parts.push(format!("queries={} errors={} false_connected={}", e.queries, e.queries - e.agree, e.false_connected));
    }
    if let Some(s) = &r.suites {
        parts.push(format!("suites={} failed={}", s.len(), s.iter().filter(|x| !x.passed).count()));
    }
    parts.join(" ")
}

pub fn build(a: &BuildArgs) -> Result<Report, CliError> {
    let mut wall = BTreeMap::new();
    let t = Instant::now();
    let g = a.scheme.graph()?;
    wall.insert("graph".into(), ms(t));

    let cfg = a.scheme.config();
    let t = Instant::now();
    let sc = build_scheme(&g, &cfg)?;
    wall.insert("build".into(), ms(t));

    let header = LabelFileHeader {
        n: g.n() as u32,
        f: cfg.f as u32,
        seed: cfg.seed,
        c: cfg.c,
        c_sparse: cfg.c_sparse,
        uid_bits: cfg.uid_bits,
        partition: cfg.partition,
        fingerprint: fingerprint(&g),
    };
    let t = Instant::now();
    let bytes = write_label_file(&a.out, &header, &sc.labels)?;
    wall.insert("write".into(), ms(t));

    let report = Report {
        config: a.scheme.echo("build", &g),
        labels: Some(LabelReport::of(&sc.labels)),
        hierarchy: Some(HierarchyReport::of(&sc)),
        file_bytes: Some(bytes),
        wall_ms: wall,
        ..Default::default()
    };
    if let Some(p) = &a.report {
        report.write_json(p)?;
    }
    Ok(report)
}

fn query_error(e: QueryError) -> CliError {
    match e {
        QueryError::Invalid(m) => CliError::Usage(m),
        QueryError::Inconsistent(m) => CliError::Input(m.into()),
    }
}

pub fn query(a: &QueryArgs) -> Result<String, CliError> {
    let mut lf = LabelFile::open(&a.labels)?;
    let n = lf.len();
    let f = lf.header.f as usize;
    let mut faults = a.fail.clone();
    faults.sort_unstable();
    faults.dedup();
    for &v in [a.s, a.t].iter().chain(&faults) {
        if v >= n {
            return Err(CliError::Usage(format!("vertex {v} out of range (n = {n})")));
        }
    }
    if faults.len() > f {
        return Err(CliError::Usage(format!("{} faults exceed f = {f}", faults.len())));
    }
    if faults.contains(&a.s) || faults.contains(&a.t) {
        return Err(CliError::Usage("s and t must not be faulty".into()));
    }
    let s = lf.read_label(a.s)?;
    let t = lf.read_label(a.t)?;
    let fl = faults.iter().map(|&v| lf.read_label(v)).collect::<Result<Vec<_>, _>>()?;
    let input = QueryInput { s: &s, t: &t, faults: fl.iter().collect() };
    let (ans, transcript) = if a.transcript {
        let (ans, t) = answer_with_transcript(&input).map_err(query_error)?;
        (ans, Some(t))
    } else {
        (answer(&input).map_err(query_error)?, None)
    };
    let mut out = String::new();
    for line in transcript.into_iter().flatten() {
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str(if ans.is_connected() { "connected" } else { "disconnected" });
    Ok(out)
}

pub fn bench(a: &BenchArgs) -> Result<Report, CliError> {
    let mut wall = BTreeMap::new();
    let t = Instant::now();
    let mut lf = LabelFile::open(&a.labels)?;
    let g = load_graph(&a.graph, a.graph_seed.unwrap_or(lf.header.seed))?;
    if lf.header.fingerprint != fingerprint(&g) {
        return Err(CliError::Input(format!("{} was not built from {}", a.labels.display(), a.graph)));
    }
    let labels = lf.read_all()?;
    wall.insert("load".into(), ms(t));

    let h = lf.header.clone();
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let counts = bench_labels(&g, &labels, h.f as usize, a.queries, &mut rng).map_err(query_error)?;
    wall.insert("queries".into(), ms(t));

    let report = Report {
        config: ConfigEcho {
            command: "bench".into(),
            graph: Some(a.graph.clone()),
            labels: Some(a.labels.display().to_string()),
            n: g.n(),
            m: Some(g.m()),
            f: h.f as usize,
            seed: a.seed,
            c: h.c,
            c_sparse: h.c_sparse,
            uid_bits: h.uid_bits,
            partition: partition_name(h.partition).into(),
            queries: Some(a.queries),
        },
        errors: Some(ErrorReport {
            queries: counts.queries,
            agree: counts.agree,
            false_connected: counts.false_connected,
            false_disconnected: counts.false_disconnected,
            truly_connected: counts.truly_connected,
            error_rate: counts.error_rate(),
        }),
        labels: Some(LabelReport::of(&labels)),
        wall_ms: wall,
        ..Default::default()
    };
    write_outputs(&report, a.out.as_deref(), a.csv.as_deref(), write_bench_csv)?;
    Ok(report)
}

pub fn verify(a: &VerifyArgs) -> Result<Report, CliError> {
    let mut wall = BTreeMap::new();
    let g = a.scheme.graph()?;
    let mut cfg = a.scheme.config();
    cfg.keep_full_aux = true;
    let t = Instant::now();
    let sc = build_scheme(&g, &cfg)?;
    wall.insert("build".into(), ms(t));

    let t = Instant::now();
    let opts = VerifyOptions { seed: a.scheme.seed, queries: a.queries, ..Default::default() };
    let suites: Vec<SuiteReport> = run_all(&g, &sc, &opts).iter().map(SuiteReport::from).collect();
    wall.insert("verify".into(), ms(t));

    let mut config = a.scheme.echo("verify", &g);
    config.queries = Some(a.queries);
    let report = Report {
        config,
        labels: Some(LabelReport::of(&sc.labels)),
        hierarchy: Some(HierarchyReport::of(&sc)),
        suites: Some(suites),
        wall_ms: wall,
        ..Default::default()
    };
    write_outputs(&report, a.out.as_deref(), a.csv.as_deref(), |p, r| write_suites_csv(p, r.suites.as_deref().unwrap_or(&[])))?;
    let failed: Vec<&str> = report.suites.iter().flatten().filter(|s| !s.passed).map(|s| s.name.as_str()).collect();
    if !failed.is_empty() {
        return Err(CliError::Invariant(format!("suites failed: {}", failed.join(", "))));
    }
    Ok(report)
}

fn write_outputs(
    r: &Report,
    json: Option<&Path>,
    csv: Option<&Path>,
    write_csv: impl Fn(&Path, &Report) -> Result<(), CliError>,
) -> Result<(), CliError> {
    if let Some(p) = json {
        r.write_json(p)?;
    }
    if let Some(p) = csv {
        write_csv(p, r)?;
    }
    Ok(())
}

pub fn gen(a: &GenArgs) -> Result<String, CliError> {
    let spec = if a.model.starts_with("gen:") { a.model.clone() } else { format!("gen:{}", a.model) };
    let g = load_graph(&spec, a.seed)?;
    std::fs::write(&a.out, g.to_edge_list()).map_err(|e| CliError::io(&a.out, e))?;
    Ok(format!("gen: n={} m={} -> {}", g.n(), g.m(), a.out.display()))
}
