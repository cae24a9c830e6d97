//! Command-line surface. Every command returns an [`Outcome`]: prose for
//! people, a `key=value` block for scripts, and an exit code (0 holds or
//! verified, 1 violated or failed, 2 bad input).
//!
//! Arguments naming an inequality, network, code or distribution accept a
//! built-in name or a file path. Built-in names win; prefix a path with
//! `file:` to force it to be read as a file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rankineq_core::entropy::{
    builtin_distribution, evaluate_on_distribution, JointDistribution, BUILTIN_DISTRIBUTIONS,
};
use rankineq_core::expr::{builtin, parse_expression, RankExpression, SearchStrategy, BUILTIN_NAMES};
use rankineq_core::matroid::builtin_matroid;
use rankineq_core::network::{
    builtin_code, builtin_network, capacity_bound_from_inequality, dependency_cut_bound, network_cut_bound,
    verify_code_spec, CapacityBound, CodeSpec, Network, BUILTIN_CODES, BUILTIN_NETWORKS,
};
use rankineq_core::{Error as CoreError, Matrix, PrimeField, Rational};

use crate::formats::{parse_assignment, parse_code, parse_distribution, parse_network, write_assignment};
use crate::parallel::{configured_workers, search_violation};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "rankineq",
    version,
    about = "Exact workbench for linear rank inequalities over finite fields"
)]
pub struct Cli {
    /// `text` prints prose followed by the key=value block; `json` prints only
    /// the machine-readable fields as a JSON object.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate, search and print rank inequalities.
    #[command(subcommand)]
    Ineq(IneqCommand),
    /// Verify linear codes on networks and derive capacity bounds.
    #[command(subcommand)]
    Net(NetCommand),
    /// Report on a vector matroid.
    #[command(subcommand)]
    Matroid(MatroidCommand),
    /// Evaluate inequalities on probability distributions.
    #[command(subcommand)]
    Entropy(EntropyCommand),
}

#[derive(Debug, Subcommand)]
pub enum IneqCommand {
    /// Exact residual of an inequality on a subspace assignment.
    Eval {
        #[arg(long)]
        ineq: String,
        #[arg(long)]
        assignment: String,
    },
    /// Look for a violating assignment in GF(p)^d.
    Search(SearchArgs),
    /// Print an inequality in the expression file format.
    Show {
        #[arg(long)]
        ineq: String,
        /// Print the joint-rank normal form instead.
        #[arg(long)]
        desugar: bool,
    },
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub ineq: String,
    /// Field size (a prime).
    #[arg(long = "char")]
    pub characteristic: u64,
    /// Ambient dimension.
    #[arg(long)]
    pub dim: usize,
    #[arg(long, value_enum)]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Largest subspace dimension drawn by the random strategy (default: --dim).
    #[arg(long)]
    pub max_dim: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    /// Every variable a line or zero, enumerated up to change of basis.
    #[value(name = "exhaustive-1dim")]
    Exhaustive1Dim,
    Random,
}

#[derive(Debug, Subcommand)]
pub enum NetCommand {
    /// Check that a linear code satisfies every demand.
    Verify {
        #[arg(long)]
        network: String,
        #[arg(long)]
        code: String,
        /// Interpret the code literals in GF(p) instead of the code's own field.
        #[arg(long = "char")]
        characteristic: Option<u64>,
    },
    /// Upper bound on k/n from an inequality or from the dependency cut.
    Bound(BoundArgs),
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["ineq", "cut"])))]
pub struct BoundArgs {
    #[arg(long)]
    pub network: String,
    #[arg(long)]
    pub ineq: Option<String>,
    #[arg(long)]
    pub cut: bool,
    /// Demand label for --cut (default: the best over all demands).
    #[arg(long, requires = "cut")]
    pub demand: Option<String>,
    /// Rename inequality variables to network names, e.g. `a=x,b=y`.
    #[arg(long, value_delimiter = ',', requires = "ineq")]
    pub map: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum MatroidCommand {
    /// Rank, bases, circuits and axiom check of a built-in matroid.
    Info {
        #[arg(long)]
        name: String,
        #[arg(long = "char")]
        characteristic: u64,
        /// Also classify this comma-separated subset.
        #[arg(long, value_delimiter = ',')]
        subset: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum EntropyCommand {
    /// Residual of an inequality on a joint distribution.
    Eval {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 2.0)]
        base: f64,
    },
}

/// Result of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: u8,
    pub prose: Vec<String>,
    pub fields: Vec<(String, String)>,
}

impl Outcome {
    fn new(code: u8) -> Self {
        Outcome {
            code,
            prose: Vec::new(),
            fields: Vec::new(),
        }
    }

    fn say(&mut self, line: impl Into<String>) -> &mut Self {
        self.prose.push(line.into());
        self
    }

    fn field(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => {
                let mut out = String::new();
                for line in &self.prose {
                    let _ = writeln!(out, "{line}");
                }
                if !self.prose.is_empty() {
                    out.push('\n');
                }
                for (k, v) in &self.fields {
                    let _ = writeln!(out, "{k}={v}");
                }
                out
            }
            Format::Json => {
                let mut map = serde_json::Map::new();
                for (k, v) in &self.fields {
                    map.insert(k.clone(), serde_json::Value::String(v.clone()));
                }
                map.insert("exit_code".into(), self.code.into());
                format!("{}\n", serde_json::Value::Object(map))
            }
        }
    }
}

/// Where an argument points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source<'a> {
    Builtin(&'a str),
    File(&'a Path),
}

pub fn resolve<'a>(arg: &'a str, builtins: &[&str]) -> Source<'a> {
    if let Some(path) = arg.strip_prefix("file:") {
        Source::File(Path::new(path))
    } else if builtins.contains(&arg) {
        Source::Builtin(arg)
    } else {
        Source::File(Path::new(arg))
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn origin(path: &Path) -> String {
    path.display().to_string()
}

pub fn load_inequality(arg: &str) -> Result<RankExpression> {
    match resolve(arg, &BUILTIN_NAMES) {
        Source::Builtin(name) => Ok(builtin(name)?),
        Source::File(path) => {
            let e = parse_expression(&read(path)?).map_err(|e| match e {
                CoreError::Syntax { line, column, message } => Error::Format {
                    origin: origin(path),
                    line,
                    message: format!("column {column}: {message}"),
                },
                other => other.into(),
            })?;
            Ok(match (e.name(), path.file_stem()) {
                ("custom", Some(stem)) => e.clone().with_name(stem.to_string_lossy()),
                _ => e,
            })
        }
    }
}

pub fn load_network(arg: &str) -> Result<Network> {
    match resolve(arg, &BUILTIN_NETWORKS) {
        Source::Builtin(name) => Ok(builtin_network(name)?),
        Source::File(path) => parse_network(&read(path)?, &origin(path)),
    }
}

pub fn load_code(arg: &str) -> Result<CodeSpec> {
    match resolve(arg, &BUILTIN_CODES) {
        Source::Builtin(name) => Ok(builtin_code(name)?),
        Source::File(path) => parse_code(&read(path)?, &origin(path)),
    }
}

pub fn load_distribution(arg: &str) -> Result<JointDistribution> {
    match resolve(arg, &BUILTIN_DISTRIBUTIONS) {
        Source::Builtin(name) => Ok(builtin_distribution(name)?),
        Source::File(path) => parse_distribution(&read(path)?, &origin(path)),
    }
}

fn field(p: u64) -> Result<PrimeField> {
    PrimeField::new(p).map_err(|_| Error::Usage(format!("--char must be a prime, got {p}")))
}

fn verdict(residual: Rational) -> &'static str {
    if residual < Rational::from_integer(0) {
        "violated"
    } else {
        "holds"
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Ineq(IneqCommand::Eval { ineq, assignment }) => ineq_eval(ineq, assignment),
        Command::Ineq(IneqCommand::Search(args)) => ineq_search(args),
        Command::Ineq(IneqCommand::Show { ineq, desugar }) => ineq_show(ineq, *desugar),
        Command::Net(NetCommand::Verify {
            network,
            code,
            characteristic,
        }) => net_verify(network, code, *characteristic),
        Command::Net(NetCommand::Bound(args)) => net_bound(args),
        Command::Matroid(MatroidCommand::Info {
            name,
            characteristic,
            subset,
        }) => matroid_info(name, *characteristic, subset),
        Command::Entropy(EntropyCommand::Eval { dist, expr, base }) => entropy_eval(dist, expr, *base),
    }
}

fn applicability_note(out: &mut Outcome, e: &RankExpression, f: PrimeField) {
    let applies = e.applicability().applies_to(f.characteristic());
    if !applies {
        out.say(format!(
            "note: {} is claimed only for {}; GF({}) is outside that class",
            e.name(),
            e.applicability(),
            f.modulus()
        ));
    }
    out.field("applies", applies);
}

fn ineq_eval(ineq: &str, assignment: &str) -> Result<Outcome> {
    let e = load_inequality(ineq)?;
    let path = Path::new(assignment.strip_prefix("file:").unwrap_or(assignment));
    let ctx = parse_assignment(&read(path)?, &origin(path))?;
    let residual = e.evaluate(&ctx)?;
    let mut out = Outcome::new(u8::from(residual < Rational::from_integer(0)));
    out.say(format!("{}: {e}", e.name()));
    for t in e.terms() {
        out.say(format!("  {t} contributes {}", t.evaluate(&ctx)?));
    }
    out.say(format!(
        "residual {residual} on GF({})^{}: {}",
        ctx.field().modulus(),
        ctx.ambient_dim(),
        verdict(residual)
    ));
    applicability_note(&mut out, &e, ctx.field());
    out.field("ineq", e.name())
        .field("field", ctx.field().modulus())
        .field("ambient", ctx.ambient_dim())
        .field("residual", residual)
        .field("verdict", verdict(residual));
    Ok(out)
}

fn ineq_search(args: &SearchArgs) -> Result<Outcome> {
    let e = load_inequality(&args.ineq)?;
    let f = field(args.characteristic)?;
    let strategy = match args.strategy {
        Strategy::Exhaustive1Dim => SearchStrategy::ExhaustiveLines,
        Strategy::Random => SearchStrategy::Random {
            seed: args.seed,
            trials: args.trials,
            max_dim: args.max_dim.unwrap_or(args.dim),
        },
    };
    let found = search_violation(&e, f, args.dim, strategy, configured_workers()?)?;
    let mut out = Outcome::new(if found.is_some() { 1 } else { 0 });
    out.field("ineq", e.name())
        .field("field", f.modulus())
        .field("ambient", args.dim);
    if let Strategy::Random = args.strategy {
        out.field("seed", args.seed).field("trials", args.trials);
    }
    applicability_note(&mut out, &e, f);
    match found {
        Some(v) => {
            let text = write_assignment(&v.assignment);
            out.say(format!("violation with residual {}:", v.residual));
            out.prose.extend(text.lines().map(String::from));
            out.field("found", true)
                .field("residual", v.residual)
                .field("assignment", text);
        }
        None => {
            out.say("none");
            out.field("found", false);
        }
    }
    Ok(out)
}

fn ineq_show(ineq: &str, desugar: bool) -> Result<Outcome> {
    let mut e = load_inequality(ineq)?;
    if desugar {
        e = e.desugar();
    }
    let mut out = Outcome::new(0);
    out.prose.extend(e.to_text().lines().map(String::from));
    out.field("ineq", e.name())
        .field("terms", e.terms().len())
        .field("applicability", e.applicability());
    Ok(out)
}

fn row_text(m: &Matrix) -> String {
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| r.iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
        .collect();
    format!("[{}]", rows.join("; "))
}

fn net_verify(network: &str, code: &str, characteristic: Option<u64>) -> Result<Outcome> {
    let net = load_network(network)?;
    let spec = load_code(code)?;
    let f = field(characteristic.unwrap_or(spec.default_field))?;
    let mut out = Outcome::new(0);
    out.field("network", network)
        .field("code", code)
        .field("field", f.modulus())
        .field("k", spec.k)
        .field("n", spec.n);
    let verdict = match verify_code_spec(&net, &spec, f) {
        Err(CoreError::MissingInverse {
            literal,
            denominator,
            modulus,
        }) => {
            out.code = 1;
            out.say(format!(
                "code literal {literal} needs the inverse of {denominator}, which does not exist in GF({modulus})"
            ));
            out.field("verified", false).field("missing_inverse", literal);
            return Ok(out);
        }
        other => other?,
    };
    for d in &verdict.demands {
        if d.ok() {
            out.say(format!("{}: {} ok", d.label, d.target));
        } else {
            out.say(format!(
                "{}: {} FAILED, decoded minus target = {} over ({})",
                d.label,
                d.target,
                row_text(&d.residual),
                net.messages().join(",")
            ));
        }
    }
    let failing: Vec<&str> = verdict.failing().map(|d| d.label.as_str()).collect();
    out.code = if failing.is_empty() { 0 } else { 1 };
    out.field("demands", verdict.demands.len())
        .field("failed", failing.join(","))
        .field("verified", failing.is_empty());
    Ok(out)
}

fn bound_outcome(b: &CapacityBound) -> Outcome {
    let mut out = Outcome::new(0);
    out.prose.extend(b.trace.iter().cloned());
    out.say(format!(
        "k/n <= {} (from {}; holds for {})",
        b.value, b.provenance, b.applicability
    ));
    out.field("bound", b.value)
        .field("provenance", &b.provenance)
        .field("applicability", &b.applicability);
    out
}

fn net_bound(args: &BoundArgs) -> Result<Outcome> {
    let net = load_network(&args.network)?;
    let bound = if let Some(ineq) = &args.ineq {
        let e = load_inequality(ineq)?;
        let map = args
            .map
            .iter()
            .map(|pair| {
                pair.split_once('=')
                    .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                    .ok_or_else(|| Error::Usage(format!("--map entries look like `a=x`, got `{pair}`")))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        capacity_bound_from_inequality(&net, &e, &map)?
    } else if let Some(label) = &args.demand {
        dependency_cut_bound(&net, label)?
    } else {
        network_cut_bound(&net)?
    };
    let mut out = bound_outcome(&bound);
    out.fields.insert(0, ("network".into(), args.network.clone()));
    Ok(out)
}

fn matroid_info(name: &str, characteristic: u64, subset: &[String]) -> Result<Outcome> {
    field(characteristic)?;
    let m = builtin_matroid(name, characteristic)?;
    let set =
        |s: &std::collections::BTreeSet<String>| format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(","));
    let bases = m.bases()?;
    let circuits = m.circuits()?;
    let axioms = m.check_axioms()?;
    let mut out = Outcome::new(0);
    out.say(format!(
        "{name} over GF({characteristic}), ground {}",
        m.ground().join(",")
    ));
    out.say(format!("rank {}", m.full_rank()));
    out.say(format!("{} bases", bases.len()));
    out.say(format!("{} circuits:", circuits.len()));
    out.prose.extend(circuits.iter().map(|c| format!("  {}", set(c))));
    match &axioms {
        Ok(()) => out.say("independence axioms hold"),
        Err(why) => out.say(format!("axiom failure: {why}")),
    };
    out.field("name", name)
        .field("field", characteristic)
        .field("ground", m.ground().join(","))
        .field("rank", m.full_rank())
        .field("bases", bases.len())
        .field("circuits", circuits.len())
        .field("axioms", if axioms.is_ok() { "ok" } else { "failed" });
    if !subset.is_empty() {
        let refs: Vec<&str> = subset.iter().map(String::as_str).collect();
        let s: std::collections::BTreeSet<String> = subset.iter().cloned().collect();
        let rank = m.rank(&refs)?;
        let independent = m.is_independent(&refs)?;
        out.say(format!(
            "{}: rank {rank}, {}{}{}",
            set(&s),
            if independent { "independent" } else { "dependent" },
            if bases.contains(&s) { ", a base" } else { "" },
            if circuits.contains(&s) { ", a circuit" } else { "" },
        ));
        out.field("subset", subset.join(","))
            .field("subset_rank", rank)
            .field("subset_independent", independent)
            .field("subset_base", bases.contains(&s))
            .field("subset_circuit", circuits.contains(&s));
    }
    if axioms.is_err() {
        out.code = 1;
    }
    Ok(out)
}

/// Entropy residuals below this count as violations; above it they are
/// treated as rounding noise.
pub const ENTROPY_TOLERANCE: f64 = 1e-9;

fn entropy_eval(dist: &str, expr: &str, base: f64) -> Result<Outcome> {
    let d = load_distribution(dist)?;
    let e = load_inequality(expr)?;
    let residual = evaluate_on_distribution(&e, &d, base)?;
    let violated = residual < -ENTROPY_TOLERANCE;
    let mut out = Outcome::new(u8::from(violated));
    out.say(format!("{}: {e}", e.name()));
    out.say(format!(
        "residual {residual:.12} (log base {base}): {}",
        if violated { "violated" } else { "holds" }
    ));
    out.field("expr", e.name())
        .field("dist", dist)
        .field("base", base)
        .field("residual", format!("{residual:.12}"))
        .field("verdict", if violated { "violated" } else { "holds" });
    Ok(out)
}
