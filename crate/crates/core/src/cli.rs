//! The `breed` command line.
//!
//! Exit codes: 0 success or PASS, 1 validation error or FAIL, 2 usage,
//! 3 refused as infeasible.

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::catalog::{self, CatalogEntry};
use crate::compare::{compare_report, CompareFilter, CompareRow};
use crate::eaqecc::{convert_pure, BreedingProtocolSpec};
use crate::engine::{
    exact_fidelity, simulate, verify_guarantee_scoped, ChannelModel, PostSelect,
    DEFAULT_ENUMERATION_CAP,
};
use crate::error::Error;
use crate::search::{search_codes_ordered, KeyOrder, SearchQuery, Verdict, DEFAULT_BUDGET};

#[derive(Parser, Debug)]
#[command(
    name = "breed",
    version,
    about = "Breeding entanglement-distillation protocols from stabilizer codes"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Tsv,
    Jsonl,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recompute a code's parameters.
    Analyze(CodeArgs),
    /// Build the breeding protocol for a puncture set.
    Convert(ProtocolArgs),
    /// Exhaustively check the error-correction guarantee.
    Verify {
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Refuse enumerations larger than this.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u128,
        /// Only patterns without erasures.
        #[arg(long)]
        no_erasures: bool,
    },
    /// Monte Carlo fidelity over a grid of depolarizing rates.
    Simulate(SimulateArgs),
    /// Exhaustive existence search for `[[n, k, d]]_p` codes.
    Search(SearchArgs),
    /// Breeding-vs-hashing report over a catalog.
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
struct CodeArgs {
    /// Built-in code name, or a catalog file.
    #[arg(long)]
    code: String,
    /// Entry to use when the file holds several.
    #[arg(long)]
    entry: Option<String>,
}

#[derive(Args, Debug)]
struct ProtocolArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// 1-based positions holding preshared pairs, comma separated.
    #[arg(long, value_delimiter = ',')]
    puncture: Vec<usize>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    rates: Vec<f64>,
    /// Erasure probability per noisy pair.
    #[arg(long, default_value_t = 0.0)]
    erasure: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// none, nonzero, or weight:<t>
    #[arg(long, default_value = "none")]
    postselect: PostSelect,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Also print the exact fidelity.
    #[arg(long)]
    exact: bool,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    p: u8,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    dmin: usize,
    /// Require purity to `dmin`.
    #[arg(long)]
    pure: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, value_enum, default_value_t = Order::Forward)]
    order: Order,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Order {
    Forward,
    Reversed,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Catalog file; the built-in catalog when absent.
    #[arg(long)]
    catalog: Option<String>,
    /// Only rows with this many noisy pairs.
    #[arg(long)]
    n: Option<usize>,
    /// Only rows correcting `t` errors and `e` erasures, given as `t,e`.
    #[arg(long, value_parser = parse_pair)]
    correct: Option<(usize, usize)>,
    /// Search for a hashing rival to each breeding row with this budget.
    #[arg(long)]
    certify: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (t, e) = s.split_once(',').ok_or("expected `t,e`")?;
    let num = |x: &str| x.trim().parse::<usize>().map_err(|e| e.to_string());
    Ok((num(t)?, num(e)?))
}

/// A command failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Infeasible { .. }) {
            3
        } else {
            1
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Parse `args` (program name first) and run. Output goes to `out`,
/// diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let f = cli.format;
    let result = match cli.command {
        Command::Analyze(a) => analyze(&a, f, out),
        Command::Convert(a) => convert(&a, f, out),
        Command::Verify {
            protocol,
            workers,
            cap,
            no_erasures,
        } => verify(&protocol, workers, cap, !no_erasures, f, out),
        Command::Simulate(a) => run_simulate(&a, f, out),
        Command::Search(a) => search(&a, f, out),
        Command::Compare(a) => compare(&a, f, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

fn load_entry(a: &CodeArgs) -> Result<CatalogEntry, Failure> {
    let builtin = catalog::builtin();
    if a.entry.is_none() {
        if let Ok(e) = catalog::find(&builtin, &a.code) {
            return Ok(e.clone());
        }
    }
    let path = Path::new(&a.code);
    if !path.exists() {
        return Err(Error::UnknownCode(a.code.clone()).into());
    }
    let text = std::fs::read_to_string(path)?;
    let entries = catalog::load_catalog(&text)?;
    match (&a.entry, entries.len()) {
        (Some(name), _) => Ok(catalog::find(&entries, name)?.clone()),
        (None, 1) => Ok(entries.into_iter().next().unwrap()),
        (None, 0) => Err(Failure {
            code: 1,
            message: format!("{} holds no codes", a.code),
        }),
        (None, _) => Err(Failure {
            code: 1,
            message: format!(
                "{} holds several codes; pick one with --entry ({})",
                a.code,
                entries
                    .iter()
                    .map(|e| e.name.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        }),
    }
}

fn build_spec(a: &ProtocolArgs) -> Result<(CatalogEntry, BreedingProtocolSpec), Failure> {
    let entry = load_entry(&a.code)?;
    if a.puncture.is_empty() {
        let spec = BreedingProtocolSpec::hashing(entry.code().clone());
        return Ok((entry, spec));
    }
    let mut positions = Vec::with_capacity(a.puncture.len());
    for &p in &a.puncture {
        if p == 0 || p > entry.n {
            return Err(Failure {
                code: 1,
                message: format!("puncture position {p} outside 1..={}", entry.n),
            });
        }
        positions.push(p - 1);
    }
    let spec = convert_pure(entry.code(), &positions)?;
    Ok((entry, spec))
}

fn one_based(positions: &[usize]) -> String {
    positions
        .iter()
        .map(|p| (p + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn jsonl(out: &mut dyn Write, value: serde_json::Value) -> std::io::Result<()> {
    writeln!(out, "{value}")
}

fn analyze(a: &CodeArgs, f: Format, out: &mut dyn Write) -> CmdResult {
    let e = load_entry(a)?;
    let gens: Vec<String> = e.generators.iter().map(|g| g.to_string()).collect();
    let dual_dim = e.code().dual().dim();
    match f {
        Format::Human => {
            writeln!(out, "{} over F_{}", e.name, e.p)?;
            writeln!(out, "n={} k={} d={} pure={}", e.n, e.k, e.d, yes_no(e.pure))?;
            writeln!(out, "dual dimension {dual_dim}")?;
            for g in &gens {
                writeln!(out, "  {g}")?;
            }
        }
        Format::Tsv => {
            writeln!(out, "name\tp\tn\tk\td\tpure\tdual_dim\tgenerators")?;
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                e.name,
                e.p,
                e.n,
                e.k,
                e.d,
                yes_no(e.pure),
                dual_dim,
                gens.join(",")
            )?;
        }
        Format::Jsonl => jsonl(
            out,
            json!({"name": e.name, "p": e.p, "n": e.n, "k": e.k, "d": e.d, "pure": e.pure,
                   "dual_dim": dual_dim, "generators": gens}),
        )?,
    }
    Ok(0)
}

fn convert(a: &ProtocolArgs, f: Format, out: &mut dyn Write) -> CmdResult {
    let (e, spec) = build_spec(a)?;
    let p = spec.params();
    let gens: Vec<String> = spec
        .extended_code()
        .generators()
        .iter()
        .map(|g| g.to_string())
        .collect();
    let d = p.d.to_string();
    match f {
        Format::Human => {
            writeln!(
                out,
                "{}: noisy={} preshared={} gross={} net={} d={}",
                e.name,
                p.n,
                p.c,
                p.gross_k,
                p.net_yield(),
                d
            )?;
            writeln!(
                out,
                "preshared positions: {}",
                one_based(spec.ebit_positions())
            )?;
            writeln!(
                out,
                "noisy positions: {}",
                one_based(spec.noisy_positions())
            )?;
            writeln!(out, "noisy-side generators:")?;
            for g in spec.punctured().basis_vectors() {
                writeln!(out, "  {g}")?;
            }
        }
        Format::Tsv => {
            writeln!(
                out,
                "code\tnoisy\tpreshared\tgross\tnet\td\tpreshared_positions"
            )?;
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                e.name,
                p.n,
                p.c,
                p.gross_k,
                p.net_yield(),
                d,
                one_based(spec.ebit_positions())
            )?;
        }
        Format::Jsonl => jsonl(
            out,
            json!({"code": e.name, "noisy": p.n, "preshared": p.c, "gross": p.gross_k,
                   "net": p.net_yield(), "d": d,
                   "preshared_positions": spec.ebit_positions().iter().map(|x| x + 1).collect::<Vec<_>>(),
                   "generators": gens}),
        )?,
    }
    Ok(0)
}

fn verify(
    a: &ProtocolArgs,
    workers: usize,
    cap: u128,
    erasures: bool,
    f: Format,
    out: &mut dyn Write,
) -> CmdResult {
    let (e, spec) = build_spec(a)?;
    let cert = verify_guarantee_scoped(&spec, cap, workers, erasures)?;
    let verdict = if cert.passed { "PASS" } else { "FAIL" };
    let counter = cert
        .counterexample
        .as_ref()
        .map(|c| (c.error.to_string(), one_based(&c.erased)));
    match f {
        Format::Human => {
            writeln!(
                out,
                "{verdict} {} patterns with 2t+e < {} on {}",
                cert.patterns, cert.d, e.name
            )?;
            for c in &cert.cases {
                writeln!(out, "  t={} e={}: {}", c.t, c.e, c.patterns)?;
            }
            if let Some((err, erased)) = &counter {
                writeln!(out, "counterexample: error {err} erased [{erased}]")?;
            }
        }
        Format::Tsv => {
            writeln!(out, "code\tverdict\td\tpatterns\tcounterexample")?;
            writeln!(
                out,
                "{}\t{verdict}\t{}\t{}\t{}",
                e.name,
                cert.d,
                cert.patterns,
                counter
                    .as_ref()
                    .map_or("-".to_string(), |(e, s)| format!("{e} [{s}]"))
            )?;
        }
        Format::Jsonl => jsonl(
            out,
            json!({"code": e.name, "verdict": verdict, "d": cert.d, "patterns": cert.patterns,
                   "cases": cert.cases,
                   "counterexample": counter.map(|(e, s)| json!({"error": e, "erased": s}))}),
        )?,
    }
    Ok(if cert.passed { 0 } else { 1 })
}

fn run_simulate(a: &SimulateArgs, f: Format, out: &mut dyn Write) -> CmdResult {
    let (_, spec) = build_spec(&a.protocol)?;
    if a.trials == 0 {
        return Err(Failure {
            code: 1,
            message: "--trials must be positive".into(),
        });
    }
    if f == Format::Tsv {
        write!(out, "rate\tfidelity\tci\tnet\tdiscards\ttrials")?;
        writeln!(out, "{}", if a.exact { "\texact" } else { "" })?;
    }
    for &rate in &a.rates {
        let ch = ChannelModel::pauli(rate, a.erasure)?;
        let r = simulate(&spec, &ch, a.trials, a.seed, a.postselect, a.workers)?;
        let exact = if a.exact {
            Some(exact_fidelity(&spec, &ch, a.postselect, DEFAULT_ENUMERATION_CAP)?.fidelity)
        } else {
            None
        };
        let fid = format!("{:.6}", r.fidelity_estimate);
        let ci = format!("{:.6}", r.ci_half_width);
        let ex = exact.map(|x| format!("{x:.6}"));
        match f {
            Format::Human => {
                write!(
                    out,
                    "rate={rate} fidelity={fid} ci=±{ci} net={} discards={} trials={}",
                    r.net_yield, r.discards, r.trials
                )?;
                match &ex {
                    Some(x) => writeln!(out, " exact={x}")?,
                    None => writeln!(out)?,
                }
            }
            Format::Tsv => {
                write!(
                    out,
                    "{rate}\t{fid}\t{ci}\t{}\t{}\t{}",
                    r.net_yield, r.discards, r.trials
                )?;
                match &ex {
                    Some(x) => writeln!(out, "\t{x}")?,
                    None => writeln!(out)?,
                }
            }
            Format::Jsonl => jsonl(
                out,
                json!({"rate": rate, "fidelity": fid.parse::<f64>().unwrap(), "ci": ci.parse::<f64>().unwrap(),
                       "net": r.net_yield, "discards": r.discards, "trials": r.trials, "seed": r.seed,
                       "exact": ex.map(|x| x.parse::<f64>().unwrap())}),
            )?,
        }
    }
    Ok(0)
}

fn search(a: &SearchArgs, f: Format, out: &mut dyn Write) -> CmdResult {
    let q = SearchQuery {
        p: a.p,
        n: a.n,
        k: a.k,
        d_min: a.dmin,
        purity_required: a.pure,
        budget: a.budget,
    };
    let order = match a.order {
        Order::Forward => KeyOrder::Forward,
        Order::Reversed => KeyOrder::Reversed,
    };
    let r = search_codes_ordered(&q, order, a.workers)?;
    let (label, gens): (&str, Vec<String>) = match &r.verdict {
        Verdict::Exists { generators } => {
            ("EXISTS", generators.iter().map(|g| g.to_string()).collect())
        }
        Verdict::NotExists => ("NOT EXISTS (exhaustive)", Vec::new()),
        Verdict::Inconclusive => ("INCONCLUSIVE (budget exhausted)", Vec::new()),
    };
    let params = format!("[[{},{},{}]]_{}", a.n, a.k, a.dmin, a.p);
    match f {
        Format::Human => {
            writeln!(out, "{label}")?;
            writeln!(
                out,
                "query {params}{} nodes={}",
                if a.pure { " pure" } else { "" },
                r.nodes
            )?;
            for g in &gens {
                writeln!(out, "  {g}")?;
            }
        }
        Format::Tsv => {
            writeln!(out, "query\tverdict\tnodes\twitness")?;
            writeln!(out, "{params}\t{label}\t{}\t{}", r.nodes, gens.join(","))?;
        }
        Format::Jsonl => {
            let verdict = match r.verdict {
                Verdict::Exists { .. } => "exists",
                Verdict::NotExists => "not_exists",
                Verdict::Inconclusive => "inconclusive",
            };
            jsonl(
                out,
                json!({"p": a.p, "n": a.n, "k": a.k, "d_min": a.dmin, "pure": a.pure,
                       "verdict": verdict, "nodes": r.nodes, "witness": gens}),
            )?
        }
    }
    Ok(0)
}

fn compare(a: &CompareArgs, f: Format, out: &mut dyn Write) -> CmdResult {
    let entries = match &a.catalog {
        Some(path) => catalog::load_catalog(&std::fs::read_to_string(path)?)?,
        None => catalog::builtin(),
    };
    let filter = CompareFilter {
        noisy_pairs: a.n,
        correction: a.correct,
    };
    let rows = compare_report(&entries, filter, a.certify, a.workers);
    let cert = |r: &CompareRow| {
        r.certification.map_or("-".to_string(), |c| {
            serde_json::to_value(c)
                .unwrap()
                .as_str()
                .unwrap()
                .to_string()
        })
    };
    match f {
        Format::Human => {
            writeln!(
                out,
                "{:<8} {:<14} {:>5} {:>9} {:>5} {:>4} {:>2}  {:<9} certification",
                "kind", "code", "noisy", "preshared", "gross", "net", "d", "dominates"
            )?;
            for r in &rows {
                let kind = serde_json::to_value(r.kind).unwrap();
                writeln!(
                    out,
                    "{:<8} {:<14} {:>5} {:>9} {:>5} {:>4} {:>2}  {:<9} {}",
                    kind.as_str().unwrap(),
                    r.code,
                    r.noisy,
                    r.c,
                    r.gross,
                    r.net,
                    r.d,
                    yes_no(r.dominates),
                    cert(r)
                )?;
            }
        }
        Format::Tsv => {
            writeln!(
                out,
                "kind\tcode\tp\tnoisy\tpreshared\tgross\tnet\td\tdominates\tcertification"
            )?;
            for r in &rows {
                let kind = serde_json::to_value(r.kind).unwrap();
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    kind.as_str().unwrap(),
                    r.code,
                    r.p,
                    r.noisy,
                    r.c,
                    r.gross,
                    r.net,
                    r.d,
                    yes_no(r.dominates),
                    cert(r)
                )?;
            }
        }
        Format::Jsonl => {
            for r in &rows {
                jsonl(out, serde_json::to_value(r).unwrap())?;
            }
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("breed").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn analyze_examples() {
        let (code, out, _) = call(&["analyze", "--code", "6-4-2"]);
        assert_eq!(code, 0);
        assert!(out.contains("n=6 k=4 d=2 pure=yes"), "{out}");
        let (_, out, _) = call(&["analyze", "--code", "5-1-3"]);
        assert!(out.contains("n=5 k=1 d=3 pure=yes"), "{out}");
        let (code, _, err) = call(&["analyze", "--code", "no-such-code"]);
        assert_eq!(code, 1);
        assert!(err.contains("unknown code"));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&[]).0, 2);
        assert_eq!(call(&["analyze"]).0, 2);
        assert_eq!(call(&["simulate", "--code", "6-4-2", "--rates", "x"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn verify_examples() {
        let (code, out, _) = call(&["verify", "--code", "6-4-2", "--puncture", "6"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("PASS 16 patterns"), "{out}");
        let (code, _, err) = call(&["verify", "--code", "6-4-2", "--puncture", "1,2"]);
        assert_eq!(code, 1);
        assert!(err.contains("puncturing 2 positions"), "{err}");
        let (code, _, _) = call(&["verify", "--code", "6-4-2", "--puncture", "7"]);
        assert_eq!(code, 1);
        let (code, out, _) = call(&["verify", "--code", "5-1-3", "--no-erasures"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("PASS 16 patterns"), "{out}");
    }

    #[test]
    fn search_refusal_exits_three() {
        let (code, _, err) = call(&["search", "--p", "2", "--n", "7", "--k", "1", "--dmin", "3"]);
        assert_eq!(code, 3);
        assert!(err.contains("feasibility cap"));
    }

    #[test]
    fn simulate_rate_zero() {
        let (code, out, _) = call(&[
            "simulate",
            "--code",
            "6-4-2",
            "--puncture",
            "6",
            "--rates",
            "0",
            "--trials",
            "100",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("fidelity=1.000000"), "{out}");
        assert!(out.contains("net=3"), "{out}");
        let (code, _, _) = call(&["simulate", "--code", "6-4-2", "--rates", "1.5"]);
        assert_eq!(code, 1);
    }
}
