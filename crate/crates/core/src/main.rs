use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use inqseq::calculus::json::{from_json_str, to_json_value};
use inqseq::calculus::render::{latex_formula, latex_tree, text_tree};
use inqseq::calculus::{
    check_derivation, check_derivation_with, goal_at, CheckOptions, Derivation, Label, LABEL_CAPACITY, LabelledFormula, Rule,
    SearchConfig, Sequent,
};
use inqseq::saturate::{derived_model, saturate, verify_truth_lemma, Countermodel, SaturationOutcome};
use inqseq::schemes::{
    appendix_derivation, casari_scheme_derivation, casari_sweep, cd_derivation, double_negation_derivation,
    expand_placeholder, kuroda_derivation, scheme, AppendixName, CasariVariant, SchemeName, SchemeParams,
};
use inqseq::selftest::{self, SelftestOptions, Status};
use inqseq::semantics::{labelled_supports, supports, Assignment, Model, State};
use inqseq::syntax::{parse, print, var, Formula};
use inqseq::transform::eliminate_cut;

#[derive(Parser, Debug)]
#[command(name = "inqseq", version, about = "Labelled sequent prover for finitely bounded inquisitive first-order logic")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized runs; embedded in every report.
    #[arg(long, global = true, default_value_t = selftest::DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Latex,
}

#[derive(clap::Args, Debug, Clone)]
struct Budget {
    /// Largest pool of first-order witnesses tried by iterative deepening.
    #[arg(long, default_value_t = 6)]
    pool_max: usize,
    /// Node budget for one search.
    #[arg(long, default_value_t = 2_000_000)]
    node_limit: usize,
}

impl Budget {
    fn config(&self) -> SearchConfig {
        SearchConfig { pool_max: self.pool_max, node_limit: self.node_limit, ..SearchConfig::default() }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for a derivation of `⇒ {1..n}:FORMULA`.
    Prove {
        /// Formula text, or a scheme placeholder such as `<CD>`.
        formula: String,
        /// Size n of the root label `{1..n}`.
        #[arg(long, default_value_t = 2)]
        bound: u32,
        /// Print the countermodel of a refutation in text output.
        #[arg(long)]
        countermodel: bool,
        /// Print the derivation tree in text output.
        #[arg(long)]
        tree: bool,
        #[command(flatten)]
        budget: Budget,
    },
    /// Check a derivation certificate (JSON).
    CheckProof { file: PathBuf },
    /// Evaluate support of a formula at a state of a model file (JSON).
    CheckModel {
        model: PathBuf,
        #[arg(long)]
        formula: String,
        /// Comma-separated world names; empty for the empty state.
        #[arg(long, default_value = "")]
        state: String,
        /// Comma-separated `var=element` pairs.
        #[arg(long, default_value = "")]
        assignment: String,
    },
    /// Saturate `⇒ {1..n}:FORMULA` and read off the derived countermodel.
    Countermodel {
        /// Formula text, or a scheme placeholder such as `<CD>`.
        formula: String,
        /// Size n of the root label `{1..n}`.
        #[arg(long, default_value_t = 2)]
        bound: u32,
        #[command(flatten)]
        budget: Budget,
    },
    /// Emit a scheme instance, or with `--derive` a derivation of it.
    Scheme {
        /// CD, Kuroda, CasariAtomic, CasariDNAtomic, CasariScheme, KP, EK, EKP, NegRules or DoubleNegation.
        name: String,
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        psi: Option<String>,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long = "var")]
        variable: Option<String>,
        #[arg(long)]
        derive: bool,
        /// Label `{1..n}` of the derivation.
        #[arg(long, default_value_t = 2)]
        bound: u32,
    },
    /// Sweep the finitely checkable claims about the Casari countermodels.
    CasariClaims {
        #[arg(long, value_enum, ignore_case = true, default_value_t = VariantArg::A)]
        variant: VariantArg,
        #[arg(long = "max-world", alias = "maxWorld", default_value_t = 9)]
        max_world: u64,
        #[arg(long = "max-m", alias = "maxM", default_value_t = 3)]
        max_m: u64,
    },
    /// Remove every cut from a derivation certificate.
    EliminateCut { file: PathBuf },
    /// Run the acceptance suite.
    Selftest {
        /// Skip the criteria that run the prover, which uses (atR).
        #[arg(long)]
        disable_atr: bool,
        /// Ignore the runtime limits.
        #[arg(long)]
        untimed: bool,
        /// Comma-separated criterion numbers.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u8>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Verdict {
    Proved,
    Refuted,
    Inconclusive,
    Checked,
    Failed,
}

impl Verdict {
    fn exit_code(self) -> u8 {
        match self {
            Verdict::Proved | Verdict::Checked => 0,
            Verdict::Refuted => 1,
            Verdict::Inconclusive => 2,
            Verdict::Failed => 4,
        }
    }
}

#[derive(Serialize)]
struct RunReport {
    command: Vec<String>,
    verdict: Verdict,
    seed: u64,
    elapsed_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    budgets: Option<SearchConfig>,
    payload: Value,
}

/// What a command produced, before formatting.
struct Output {
    verdict: Verdict,
    budgets: Option<SearchConfig>,
    payload: Value,
    text: String,
    latex: Option<String>,
}

impl Output {
    fn new(verdict: Verdict, payload: Value, text: String) -> Self {
        Output { verdict, budgets: None, payload, text, latex: None }
    }
}

/// Usage and input errors, reported with exit code 3.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let start = Instant::now();
    match run(&cli) {
        Ok(out) => {
            let report = RunReport {
                command: std::env::args().collect(),
                verdict: out.verdict,
                seed: cli.seed,
                elapsed_ms: start.elapsed().as_millis(),
                budgets: out.budgets,
                payload: out.payload,
            };
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
                Format::Text => print!("{}", out.text),
                Format::Latex => print!("{}", out.latex.unwrap_or(out.text)),
            }
            ExitCode::from(out.verdict.exit_code())
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<Output, UsageError> {
    match &cli.command {
        Command::Prove { formula, bound, countermodel, tree, budget } => {
            cmd_prove(formula, *bound, *countermodel, *tree, &budget.config())
        }
        Command::CheckProof { file } => cmd_check_proof(file),
        Command::CheckModel { model, formula, state, assignment } => cmd_check_model(model, formula, state, assignment),
        Command::Countermodel { formula, bound, budget } => cmd_countermodel(formula, *bound, &budget.config()),
        Command::Scheme { name, phi, psi, theta, variable, derive, bound } => {
            let params = scheme_params(phi, psi, theta, variable)?;
            cmd_scheme(name, &params, *derive, *bound)
        }
        Command::CasariClaims { variant, max_world, max_m } => cmd_casari_claims(*variant, *max_world, *max_m),
        Command::EliminateCut { file } => cmd_eliminate_cut(file),
        Command::Selftest { disable_atr, untimed, only } => {
            let opts = SelftestOptions { seed: cli.seed, disable_atr: *disable_atr, timed: !untimed, only: only.clone() };
            Ok(cmd_selftest(&opts))
        }
    }
}

fn read_formula(text: &str) -> Result<Formula, UsageError> {
    match expand_placeholder(text) {
        Some(r) => Ok(r?),
        None => Ok(parse(text)?),
    }
}

fn bound_label(n: u32) -> Result<Label, UsageError> {
    if n == 0 || n >= LABEL_CAPACITY {
        return Err(UsageError(format!("--bound must lie in 1..={}", LABEL_CAPACITY - 1)));
    }
    Ok(Label::range(n)?)
}

/// Re-checks a derivation before it leaves the process.
fn certify(d: &Derivation) -> Result<(), String> {
    check_derivation(d).map_err(|r| format!("emitted derivation fails the checker: {r}"))
}

fn failed(msg: String) -> Output {
    Output::new(Verdict::Failed, json!({ "error": msg }), format!("failed: {msg}\n"))
}

fn derivation_output(verdict: Verdict, d: &Derivation, headline: String, tree: bool) -> Output {
    if let Err(msg) = certify(d) {
        return failed(msg);
    }
    let mut text = format!("{headline}\n");
    if tree {
        text.push_str(&text_tree(d));
    }
    let payload = json!({ "derivation": to_json_value(d), "height": d.height, "size": d.size() });
    Output { verdict, budgets: None, payload, text, latex: Some(format!("{}\n", latex_tree(d))) }
}

fn countermodel_text(cm: &Countermodel) -> String {
    let mut out = format!("worlds: {}\ndomain: {}\n", cm.model.worlds.join(", "), cm.model.domain.join(", "));
    for (p, per_world) in &cm.model.interp {
        for (w, tuples) in per_world {
            let ts: Vec<String> = tuples.iter().map(|t| format!("({})", t.join(","))).collect();
            out.push_str(&format!("I({p}, {w}) = {{{}}}\n", ts.join(", ")));
        }
    }
    out
}

/// Derived countermodel for a refuted root, verified against the truth
/// lemma and the root itself.
fn refutation_output(
    ss: &inqseq::saturate::SaturatedSequent,
    root: &LabelledFormula,
    show: bool,
) -> Result<Output, UsageError> {
    let cm = derived_model(ss);
    let lemma = verify_truth_lemma(ss)?;
    let root_supported = labelled_supports(&cm.model, &cm.naming, &cm.assignment, root)?;
    if !lemma || root_supported {
        return Ok(failed(format!("countermodel for {root} does not verify")));
    }
    let mut text = format!("refuted: {root} fails in the derived {}-world model\n", cm.model.worlds.len());
    if show {
        text.push_str(&countermodel_text(&cm));
    }
    let payload = json!({ "countermodel": cm, "saturated": ss.sequent().to_string() });
    Ok(Output::new(Verdict::Refuted, payload, text))
}

fn cmd_prove(formula: &str, bound: u32, show_model: bool, tree: bool, cfg: &SearchConfig) -> Result<Output, UsageError> {
    let f = read_formula(formula)?;
    let x = bound_label(bound)?;
    let goal = goal_at(bound, f.clone())?;
    let root = LabelledFormula::new(x, f.clone());
    let mut out = match saturate(&goal, x, cfg)? {
        SaturationOutcome::Proved(d) => {
            derivation_output(Verdict::Proved, &d, format!("proved: ⇒ {root} (height {}, {} nodes)", d.height, d.size()), tree)
        }
        SaturationOutcome::Saturated(ss) => refutation_output(&ss, &root, show_model)?,
        SaturationOutcome::Inconclusive { reason } => Output::new(
            Verdict::Inconclusive,
            json!({ "reason": reason }),
            format!("inconclusive: {reason}\n"),
        ),
    };
    out.budgets = Some(cfg.clone());
    Ok(out)
}

fn cmd_countermodel(formula: &str, bound: u32, cfg: &SearchConfig) -> Result<Output, UsageError> {
    let mut out = cmd_prove(formula, bound, true, false, cfg)?;
    if out.verdict == Verdict::Proved {
        out.text = format!("no countermodel: {}", out.text);
        out.latex = None;
    }
    Ok(out)
}

fn cmd_check_proof(file: &PathBuf) -> Result<Output, UsageError> {
    let text = fs::read_to_string(file)?;
    let d = from_json_str(&text)?;
    if d.uses_rule(Rule::Cut) {
        let msg = "the derivation contains cut nodes; run `inqseq eliminate-cut` first".to_string();
        return Ok(Output::new(Verdict::Failed, json!({ "error": msg }), format!("rejected: {msg}\n")));
    }
    Ok(match check_derivation(&d) {
        Ok(()) => Output::new(
            Verdict::Checked,
            json!({ "conclusion": d.conclusion.to_string(), "height": d.height, "size": d.size() }),
            format!("checked: {} (height {}, {} nodes)\n", d.conclusion, d.height, d.size()),
        ),
        Err(report) => Output::new(Verdict::Failed, json!({ "failure": report }), format!("failed: {report}\n")),
    })
}

fn cmd_check_model(model: &PathBuf, formula: &str, state: &str, assignment: &str) -> Result<Output, UsageError> {
    let m: Model = serde_json::from_str(&fs::read_to_string(model)?)?;
    let f = read_formula(formula)?;
    let s: State = state.split(',').map(str::trim).filter(|w| !w.is_empty()).map(String::from).collect();
    let mut g = Assignment::new();
    for pair in assignment.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (v, d) = pair.split_once('=').ok_or_else(|| UsageError(format!("bad assignment `{pair}`")))?;
        g.insert(v.trim().to_string(), d.trim().to_string());
    }
    let ok = supports(&m, &s, &g, &f)?;
    let shown: Vec<&str> = s.iter().map(String::as_str).collect();
    Ok(Output::new(
        Verdict::Checked,
        json!({ "supported": ok, "state": shown, "formula": print(&f) }),
        format!("{{{}}} {} {}\n", shown.join(","), if ok { "supports" } else { "does not support" }, print(&f)),
    ))
}

fn scheme_params(
    phi: &Option<String>,
    psi: &Option<String>,
    theta: &Option<String>,
    variable: &Option<String>,
) -> Result<SchemeParams, UsageError> {
    let mut p = SchemeParams::default();
    if let Some(t) = phi {
        p.phi = parse(t)?;
    }
    if let Some(t) = psi {
        p.psi = parse(t)?;
    }
    if let Some(t) = theta {
        p.theta = parse(t)?;
    }
    if let Some(v) = variable {
        p.var = var(v);
    }
    Ok(p)
}

fn cmd_scheme(name: &str, params: &SchemeParams, derive: bool, bound: u32) -> Result<Output, UsageError> {
    let x = bound_label(bound)?;
    let scheme_name = name.parse::<SchemeName>().ok();
    let appendix_name = name.parse::<AppendixName>().ok();
    if !derive {
        let Some(n) = scheme_name else {
            return Err(UsageError(format!("`{name}` is not a formula scheme; add --derive for derivations")));
        };
        let f = scheme(n, params)?;
        return Ok(Output {
            verdict: Verdict::Checked,
            budgets: None,
            payload: json!({ "scheme": n.as_str(), "formula": print(&f) }),
            text: format!("{}\n", print(&f)),
            latex: Some(format!("{}\n", latex_formula(&f))),
        });
    }
    let p_x = Formula::atom("P", &["x"]);
    let d = match (scheme_name, appendix_name) {
        (Some(SchemeName::Cd), _) => cd_derivation(x, &params.phi, &params.psi, &params.var)?,
        (Some(SchemeName::Kuroda), _) => kuroda_derivation(x, &params.phi, &params.var)?,
        (Some(SchemeName::CasariAtomic), _) => casari_scheme_derivation(x, &p_x, &var("x"))?,
        (Some(SchemeName::CasariScheme), _) => casari_scheme_derivation(x, &params.phi, &params.var)?,
        (Some(SchemeName::CasariDnAtomic), _) => {
            let f = scheme(SchemeName::CasariDnAtomic, params)?;
            inqseq::calculus::prove(&Sequent::goal(x, f), &SearchConfig::default())
                .derivation()
                .ok_or_else(|| UsageError("search did not find a derivation".into()))?
        }
        (None, Some(a)) => appendix_derivation(a, x, params)?,
        (None, None) if name.eq_ignore_ascii_case("DoubleNegation") => double_negation_derivation(x, &params.phi)?,
        _ => return Err(UsageError(format!("unknown scheme `{name}`"))),
    };
    Ok(derivation_output(Verdict::Proved, &d, format!("derived: {} ({} nodes)", d.conclusion, d.size()), true))
}

fn cmd_casari_claims(variant: VariantArg, max_world: u64, max_m: u64) -> Result<Output, UsageError> {
    if max_world >= 20 {
        return Err(UsageError("--max-world must be below 20".into()));
    }
    let v = match variant {
        VariantArg::A => CasariVariant::A,
        VariantArg::B => CasariVariant::B,
    };
    let report = casari_sweep(v, max_world, max_m);
    let verdict = if report.ok() { Verdict::Checked } else { Verdict::Failed };
    let mut text = format!("variant {v:?}, s ⊆ {{0..{max_world}}}, m ≤ {max_m}\n");
    text.push_str(&format!("{:>6} {:>8} {:>8}\n", "m", "claim 1", "claim 2"));
    for m in 0..=max_m {
        let fails = |c: u8| report.failures.iter().filter(|f| f.m == m && f.claim == c).count();
        let cell = |n: usize| if n == 0 { "ok".to_string() } else { format!("{n} fail") };
        text.push_str(&format!("{m:>6} {:>8} {:>8}\n", cell(fails(1)), cell(fails(2))));
    }
    text.push_str(&format!("{} checks, {} failures\n", report.checks, report.failures.len()));
    Ok(Output::new(verdict, serde_json::to_value(&report)?, text))
}

fn cmd_eliminate_cut(file: &PathBuf) -> Result<Output, UsageError> {
    let d = from_json_str(&fs::read_to_string(file)?)?;
    if let Err(r) = check_derivation_with(&d, CheckOptions { allow_cut: true }) {
        return Ok(Output::new(Verdict::Failed, json!({ "failure": r }), format!("input does not check: {r}\n")));
    }
    let e = match eliminate_cut(&d) {
        Ok(e) => e,
        Err(err) => return Ok(failed(err.to_string())),
    };
    if !e.conclusion.multiset_eq(&d.conclusion) {
        return Ok(failed("cut elimination changed the conclusion".into()));
    }
    Ok(derivation_output(Verdict::Checked, &e, format!("cut-free: {} ({} nodes)", e.conclusion, e.size()), false))
}

fn cmd_selftest(opts: &SelftestOptions) -> Output {
    let results = selftest::run(opts);
    let mut text = String::new();
    for r in &results {
        let status = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        text.push_str(&format!("{status} {:>2} {:<28} {:>7} ms  {}\n", r.id, r.title, r.millis, r.detail));
    }
    let any_fail = results.iter().any(|r| r.status == Status::Fail);
    let verdict = if any_fail { Verdict::Failed } else { Verdict::Checked };
    Output::new(verdict, json!({ "criteria": results }), text)
}
