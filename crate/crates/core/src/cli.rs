//! Command-line front end.
//!
//! Every command writes line-oriented text. Packings are emitted as
//! [`PackingRecord`] lines:
//!
//! ```text
//! k=2 n=6 s=0,7,44 count=4 via=construct paths=0-1-7;...
//! ```
//!
//! Exit codes: 0 when everything validates, 1 on a validation or
//! construction failure, 2 on usage, range or input errors.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphcore::{Graph, Path};
use crate::oracle::{self, OracleBudget, Triples};
use crate::packer::{pi3_formula, Packer, Packing, SteinerTriple};
use crate::topology::{build_graph, build_params, dot, edge_list, parse_edge_list};
use crate::verify::{self, check_packing, random_triple, PairSample, Report, DEFAULT_SEED};

/// How a record was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Via {
    Construct,
    /// Exact oracle optimum.
    Oracle,
    /// Oracle ran out of budget; `count` is a lower bound.
    OracleInexact,
}

impl Via {
    fn as_str(self) -> &'static str {
        match self {
            Via::Construct => "construct",
            Via::Oracle => "oracle",
            Via::OracleInexact => "oracle-inexact",
        }
    }
}

/// One packing, serialized as a single line with a fixed field order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingRecord {
    pub k: usize,
    pub n: usize,
    pub s: [usize; 3],
    pub count: usize,
    pub via: Via,
    pub paths: Vec<Path>,
}

impl PackingRecord {
    pub fn from_packing(k: usize, n: usize, pk: &Packing, via: Via) -> Self {
        PackingRecord { k, n, s: pk.triple.members(), count: pk.len(), via, paths: pk.paths.clone() }
    }

    pub fn packing(&self) -> Result<Packing> {
        let s = SteinerTriple::new(self.s[0], self.s[1], self.s[2])?;
        Ok(Packing::new(s, self.paths.clone()))
    }
}

fn fmt_paths(paths: &[Path]) -> String {
    let parts: Vec<String> = paths.iter().map(|p| p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("-")).collect();
    parts.join(";")
}

impl fmt::Display for PackingRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k={} n={} s={},{},{} count={} via={} paths={}",
            self.k,
            self.n,
            self.s[0],
            self.s[1],
            self.s[2],
            self.count,
            self.via.as_str(),
            fmt_paths(&self.paths)
        )
    }
}

fn parse_num(field: &str, v: &str) -> Result<usize> {
    v.parse().map_err(|_| Error::Parse(format!("{field}: '{v}' is not a number")))
}

impl FromStr for PackingRecord {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let keys = ["k", "n", "s", "count", "via", "paths"];
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != keys.len() {
            return Err(Error::Parse(format!("expected {} fields, got {}", keys.len(), fields.len())));
        }
        let mut vals = Vec::with_capacity(keys.len());
        for (f, key) in fields.iter().zip(keys) {
            let v = f
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| Error::Parse(format!("expected field '{key}=', got '{f}'")))?;
            vals.push(v);
        }
        let s: Vec<usize> = vals[2].split(',').map(|v| parse_num("s", v)).collect::<Result<_>>()?;
        let s: [usize; 3] = s.try_into().map_err(|_| Error::Parse("s needs three uids".into()))?;
        let via = match vals[4] {
            "construct" => Via::Construct,
            "oracle" => Via::Oracle,
            "oracle-inexact" => Via::OracleInexact,
            other => return Err(Error::Parse(format!("unknown via '{other}'"))),
        };
        let paths = if vals[5].is_empty() {
            Vec::new()
        } else {
            vals[5]
                .split(';')
                .map(|p| p.split('-').map(|v| parse_num("paths", v)).collect::<Result<Path>>())
                .collect::<Result<_>>()?
        };
        Ok(PackingRecord {
            k: parse_num("k", vals[0])?,
            n: parse_num("n", vals[1])?,
            s,
            count: parse_num("count", vals[3])?,
            via,
            paths,
        })
    }
}

#[derive(Parser, Debug)]
#[command(name = "dcell-paths", version, about = "Internally disjoint Steiner paths in DCell networks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Edgelist,
    Dot,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Audit {
    Lemma1,
    Kappa,
    Bound,
}

#[derive(clap::Args, Debug, Clone)]
struct Select {
    /// One triple as three comma-separated uids.
    #[arg(long, value_parser = parse_triple, conflicts_with_all = ["all", "sample"])]
    triple: Option<SteinerTriple>,
    /// Every triple of the graph.
    #[arg(long, conflicts_with = "sample")]
    all: bool,
    /// This many random triples.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(clap::Args, Debug, Clone)]
struct Budget {
    /// Oracle search nodes per triple.
    #[arg(long, default_value_t = 10_000_000)]
    budget_nodes: u64,
    /// Oracle seconds per triple.
    #[arg(long, default_value_t = 60)]
    budget_secs: u64,
}

impl Budget {
    fn oracle(&self) -> OracleBudget {
        OracleBudget { node_limit: self.budget_nodes, time_limit: Duration::from_secs(self.budget_secs) }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Export D_{k,n} as an edge list or DOT file.
    Generate {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "edgelist")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pack S-paths and emit one validated record per triple. For n < 6 the
    /// oracle answers instead.
    Pack {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        select: Select,
        #[command(flatten)]
        budget: Budget,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact packing numbers by search, on D_{k,n} or an edge-list file.
    Oracle {
        #[arg(long, conflicts_with_all = ["k", "n"])]
        graph: Option<PathBuf>,
        #[arg(long, requires = "n")]
        k: Option<usize>,
        #[arg(long, requires = "k")]
        n: Option<usize>,
        #[command(flatten)]
        select: Select,
        #[command(flatten)]
        budget: Budget,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structural audits: lemma1, kappa or bound.
    Audit {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        which: Audit,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Timings of build, pack (including its built-in check) and a separate
    /// verification, as median and p95 over repetitions.
    Bench {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        sample: usize,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_triple(s: &str) -> std::result::Result<SteinerTriple, String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("'{t}' is not a uid")))
        .collect::<std::result::Result<_, _>>()?;
    if v.len() != 3 {
        return Err("a triple has three uids".into());
    }
    SteinerTriple::new(v[0], v[1], v[2]).map_err(|e| e.to_string())
}

/// Outcome of a command: text to emit and whether everything validated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub ok: bool,
    /// Notices and per-triple failures, meant for stderr.
    pub notes: Vec<String>,
}

impl Output {
    fn clean(text: String) -> Self {
        Output { text, ok: true, notes: Vec::new() }
    }
}

fn triples(nv: usize, select: &Select) -> Result<Vec<SteinerTriple>> {
    if let Some(t) = select.triple {
        if let Some(&v) = t.members().iter().find(|&&v| v >= nv) {
            return Err(Error::UidRange { uid: v as u64, count: nv as u64 });
        }
        return Ok(vec![t]);
    }
    if let Some(count) = select.sample {
        if nv < 3 {
            return Err(Error::InvalidParams("fewer than three vertices".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(select.seed);
        return Ok((0..count).map(|_| random_triple(&mut rng, nv)).collect());
    }
    if select.all {
        let mut out = Vec::new();
        for x in 0..nv {
            for y in x + 1..nv {
                for z in y + 1..nv {
                    out.push(SteinerTriple::new(x, y, z)?);
                }
            }
        }
        return Ok(out);
    }
    Err(Error::InvalidParams("choose --triple, --sample or --all".into()))
}

pub fn cmd_generate(k: usize, n: usize, dot_format: bool) -> Result<String> {
    let p = build_params(k, n)?;
    let g = build_graph(&p)?;
    Ok(if dot_format { dot(&p, &g) } else { edge_list(&p, &g) })
}

/// Packs the selected triples in input order. Every record is re-parsed
/// from its line and checked before it is emitted.
fn cmd_pack(k: usize, n: usize, select: &Select, budget: &OracleBudget) -> Result<Output> {
    let p = build_params(k, n)?;
    let use_oracle = n < 6;
    let (g, packer) = if use_oracle {
        (build_graph(&p)?, None)
    } else {
        let packer = Packer::new(p.clone())?;
        (packer.graph().clone(), Some(packer))
    };
    let list = triples(g.vertex_count(), select)?;
    let results: Vec<Result<PackingRecord>> = list
        .par_iter()
        .map(|s| match &packer {
            Some(pk) => pk.pack(s).map(|pk| PackingRecord::from_packing(k, n, &pk, Via::Construct)),
            None => oracle::exact_pi_s(&g, s, budget).map(|r| {
                let via = if r.exact { Via::Oracle } else { Via::OracleInexact };
                PackingRecord::from_packing(k, n, &r.witness, via)
            }),
        })
        .collect();
    let mut out = Output::clean(String::new());
    if use_oracle {
        out.notes.push(format!("n = {n} is below the construction range; answering with the oracle"));
    }
    for (s, r) in list.iter().zip(results) {
        match r.and_then(|rec| revalidate(&g, rec)) {
            Ok(line) => {
                out.text.push_str(&line);
                out.text.push('\n');
            }
            Err(e) => {
                out.ok = false;
                out.notes.push(format!("FAIL s={s}: {e}"));
            }
        }
    }
    Ok(out)
}

fn revalidate(g: &Graph, rec: PackingRecord) -> Result<String> {
    let line = rec.to_string();
    let back: PackingRecord = line.parse()?;
    let report = check_packing(g, &SteinerTriple::new(back.s[0], back.s[1], back.s[2])?, &back.packing()?);
    if back != rec || !report.ok() || back.count != back.paths.len() {
        let detail: Vec<String> = report.failures().map(|c| format!("{} {}", c.name, c.detail)).collect();
        return Err(Error::LemmaViolation(format!("record does not validate: {}", detail.join("; "))));
    }
    Ok(line)
}

fn oracle_line(r: &oracle::OracleResult) -> String {
    let s = r.witness.triple.members();
    format!(
        "s={},{},{} value={} exact={} nodes={} paths={}",
        s[0],
        s[1],
        s[2],
        r.value,
        r.exact,
        r.nodes,
        fmt_paths(&r.witness.paths)
    )
}

fn cmd_oracle(g: &Graph, select: &Select, budget: &OracleBudget) -> Result<Output> {
    if select.all {
        let r = oracle::exact_pi3(g, &Triples::All, budget)?;
        return Ok(Output::clean(format!("min {}\n", oracle_line(&r))));
    }
    let list = triples(g.vertex_count(), select)?;
    let results: Vec<Result<oracle::OracleResult>> = list.par_iter().map(|s| oracle::exact_pi_s(g, s, budget)).collect();
    let mut text = String::new();
    for r in results {
        text.push_str(&oracle_line(&r?));
        text.push('\n');
    }
    Ok(Output::clean(text))
}

/// The degree bound next to the formula value.
pub fn bound_report(k: usize, n: usize) -> Result<Report> {
    let p = build_params(k, n)?;
    let g = build_graph(&p)?;
    let ub = oracle::upper_bound_pi3(&g)?;
    let want = pi3_formula(k, n);
    let mut r = Report::new(format!("bound D_{{{k},{n}}}"));
    r.push("upper_bound_equals_formula", ub == want, format!("upper bound {ub}, formula {want}"));
    Ok(r)
}

fn cmd_audit(k: usize, n: usize, which: Audit, seed: u64) -> Result<Output> {
    let report = match which {
        Audit::Lemma1 => verify::audit_lemma1(&build_params(k, n)?)?,
        Audit::Kappa => {
            let p = build_params(k, n)?;
            let copies = p.copies_at(p.k);
            let mut subsets = Vec::new();
            for a in 0..copies {
                for b in a + 1..copies {
                    for c in b + 1..copies {
                        if subsets.len() < 20 {
                            subsets.push(vec![a, b, c]);
                        }
                    }
                }
            }
            let pairs = PairSample::Random { count: 50, seed };
            verify::audit_kappa(&p, &subsets, &pairs, &pairs)?
        }
        Audit::Bound => bound_report(k, n)?,
    };
    Ok(Output { ok: report.ok(), text: report.lines(), notes: Vec::new() })
}

fn quantiles(mut xs: Vec<Duration>) -> Option<(Duration, Duration)> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_unstable();
    let p95 = ((xs.len() * 95).div_ceil(100)).clamp(1, xs.len()) - 1;
    Some((xs[xs.len() / 2], xs[p95]))
}

fn cmd_bench(k: usize, n: usize, sample: usize, reps: usize, seed: u64) -> Result<Output> {
    let p = build_params(k, n)?;
    let (mut build, mut pack, mut check) = (Vec::new(), Vec::new(), Vec::new());
    let mut ok = true;
    for _ in 0..reps {
        let t = Instant::now();
        let packer = Packer::new(p.clone())?;
        build.push(t.elapsed());
        let select = Select { triple: None, all: false, sample: Some(sample), seed };
        for s in triples(packer.graph().vertex_count(), &select)? {
            let t = Instant::now();
            let res = packer.pack(&s);
            pack.push(t.elapsed());
            match res {
                Ok(pk) => {
                    let t = Instant::now();
                    ok &= check_packing(packer.graph(), &s, &pk).ok();
                    check.push(t.elapsed());
                }
                Err(_) => ok = false,
            }
        }
    }
    let mut text = String::new();
    for (name, xs) in [("build", build), ("pack", pack), ("verify", check)] {
        let count = xs.len();
        if let Some((med, p95)) = quantiles(xs) {
            text.push_str(&format!("BENCH {name} runs={count} median_us={} p95_us={}\n", med.as_micros(), p95.as_micros()));
        }
    }
    Ok(Output { text, ok, notes: Vec::new() })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Construction { .. } | Error::LemmaViolation(_) => 1,
        _ => 2,
    }
}

fn dispatch(cmd: Cmd) -> (Result<Output>, Option<PathBuf>) {
    match cmd {
        Cmd::Generate { k, n, format, out } => {
            (cmd_generate(k, n, matches!(format, Format::Dot)).map(Output::clean), out)
        }
        Cmd::Pack { k, n, select, budget, out } => (cmd_pack(k, n, &select, &budget.oracle()), out),
        Cmd::Oracle { graph, k, n, select, budget, out } => {
            let g = match (graph, k, n) {
                (Some(path), _, _) => fs::read_to_string(&path)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
                    .and_then(|t| parse_edge_list(&t)),
                (None, Some(k), Some(n)) => build_params(k, n).and_then(|p| build_graph(&p)),
                _ => Err(Error::InvalidParams("give --graph or both --k and --n".into())),
            };
            (g.and_then(|g| cmd_oracle(&g, &select, &budget.oracle())), out)
        }
        Cmd::Audit { k, n, which, seed, out } => (cmd_audit(k, n, which, seed), out),
        Cmd::Bench { k, n, sample, reps, seed, out } => (cmd_bench(k, n, sample, reps, seed), out),
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run_with(args: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 2;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    let (res, out) = dispatch(cli.cmd);
    let output = match res {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    for note in &output.notes {
        let _ = writeln!(stderr, "{note}");
    }
    let written = match out {
        Some(path) => fs::write(&path, &output.text).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(output.text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return 2;
    }
    if output.ok {
        0
    } else {
        1
    }
}

pub fn run() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    run_with(&args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &str) -> (i32, String, String) {
        let argv: Vec<String> = std::iter::once("dcell-paths").chain(args.split_whitespace()).map(String::from).collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(&argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn record_round_trip() {
        let rec = PackingRecord { k: 1, n: 6, s: [0, 1, 2], count: 2, via: Via::Construct, paths: vec![vec![0, 1, 2], vec![0, 5, 2, 4, 1]] };
        let line = rec.to_string();
        assert_eq!(line, "k=1 n=6 s=0,1,2 count=2 via=construct paths=0-1-2;0-5-2-4-1");
        assert_eq!(line.parse::<PackingRecord>().unwrap(), rec);
        assert!("k=1 n=6 s=0,1 count=2 via=construct paths=".parse::<PackingRecord>().is_err());
        assert!("n=6 k=1 s=0,1,2 count=0 via=construct paths=".parse::<PackingRecord>().is_err());
    }

    #[test]
    fn generate_counts() {
        let (code, text, _) = call("generate --k 1 --n 2");
        assert_eq!(code, 0);
        assert_eq!(text.lines().count(), 7);
        assert!(text.starts_with("# dcell k=1 n=2 vertices=6"));
        let (_, text, _) = call("generate --k 0 --n 6");
        assert_eq!(text.lines().count(), 16);
        let (_, text, _) = call("generate --k 2 --n 6");
        assert!(text.starts_with("# dcell k=2 n=6 vertices=1806"));
        let (_, text, _) = call("generate --k 1 --n 2 --format dot");
        assert!(text.starts_with("graph"));
    }

    #[test]
    fn pack_clique_triple() {
        let (code, text, _) = call("pack --k 1 --n 6 --triple 0,1,2");
        assert_eq!(code, 0);
        let rec: PackingRecord = text.trim().parse().unwrap();
        assert_eq!((rec.count, rec.via), (3, Via::Construct));
    }

    #[test]
    fn small_n_goes_to_oracle() {
        let (code, text, err) = call("pack --k 1 --n 5 --triple 0,1,2");
        assert_eq!(code, 0);
        assert!(err.contains("oracle"));
        let rec: PackingRecord = text.trim().parse().unwrap();
        assert_eq!(rec.via, Via::Oracle);
    }

    #[test]
    fn usage_and_range_errors() {
        assert_eq!(call("pack --k 1 --n 6").0, 2);
        assert_eq!(call("pack --k 1 --n 6 --triple 0,1,999").0, 2);
        assert_eq!(call("pack --k 1 --n 6 --triple 0,0,1").0, 2);
        assert_eq!(call("frobnicate").0, 2);
        assert_eq!(call("--help").0, 0);
    }

    #[test]
    fn oracle_budget_and_audits() {
        let (code, text, _) = call("oracle --k 1 --n 6 --triple 0,1,2");
        assert_eq!(code, 0);
        assert!(text.contains("value=3 exact=true"), "{text}");
        let (_, text, _) = call("oracle --k 1 --n 6 --triple 0,1,2 --budget-nodes 1");
        assert!(text.contains("exact=false"), "{text}");
        let (code, text, _) = call("audit --k 1 --n 6 --which bound");
        assert_eq!(code, 0, "{text}");
        assert!(text.contains("upper bound 3, formula 3"));
        assert_eq!(call("audit --k 1 --n 6 --which lemma1").0, 0);
        assert_eq!(call("audit --k 1 --n 3 --which kappa").0, 0);
    }

    #[test]
    fn oracle_reads_edge_list() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k6.txt");
        assert_eq!(call(&format!("generate --k 0 --n 6 --out {}", path.display())).0, 0);
        let (code, text, _) = call(&format!("oracle --graph {} --all", path.display()));
        assert_eq!(code, 0);
        assert!(text.starts_with("min ") && text.contains("value=3 exact=true"), "{text}");
    }

    #[test]
    fn bench_summary() {
        let (code, text, _) = call("bench --k 1 --n 6 --sample 5 --reps 2");
        assert_eq!(code, 0);
        assert_eq!(text.lines().count(), 3);
        let (_, text, _) = call("bench --k 1 --n 6 --reps 0");
        assert!(text.is_empty());
    }
}
