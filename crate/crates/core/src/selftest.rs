//! The acceptance suite as a library routine, used by `inqseq selftest`.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{
    check_derivation, check_derivation_with, goal_at, premises_of, prove, CheckOptions, Derivation, Label,
    LabelledFormula, Rule, SearchConfig, SearchOutcome, Sequent, Side,
};
use crate::saturate::{derived_model, verify_truth_lemma, SaturatedSequent};
use crate::schemes::{
    appendix_derivation, casari_antecedent, casari_claim1, casari_claim2_finite, casari_derivation, cd,
    cd_derivation, claim2_bound, ekp_with_cut, AppendixName, CasariModelSpec, CasariVariant, SchemeParams,
};
use crate::semantics::{brute_force_valid, labelled_supports, Env, IndexedModel};
use crate::syntax::random::{random_formula, GenConfig};
use crate::syntax::{parse, var, Formula, Predicate};
use crate::transform::{contract, cut, eliminate_cut, invert, scheme_subst_derivation, subst_derivation, weaken};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub status: Status,
    pub detail: String,
    pub millis: u128,
    pub limit_ms: Option<u128>,
}

#[derive(Clone, Debug)]
pub struct SelftestOptions {
    pub seed: u64,
    /// Skip every criterion that runs the prover, which relies on (atR).
    pub disable_atr: bool,
    /// Enforce the runtime limits.
    pub timed: bool,
    pub only: Option<Vec<u8>>,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions { seed: DEFAULT_SEED, disable_atr: false, timed: true, only: None }
    }
}

pub const DEFAULT_SEED: u64 = 20240917;

type Outcome = Result<String, String>;

struct Criterion {
    id: u8,
    title: &'static str,
    limit_ms: Option<u128>,
    uses_prover: bool,
    run: fn(u64) -> Outcome,
}

const CRITERIA: [Criterion; 12] = [
    Criterion { id: 1, title: "double negation", limit_ms: Some(4_000), uses_prover: true, run: c1 },
    Criterion { id: 2, title: "constant domain", limit_ms: Some(5_000), uses_prover: true, run: c2 },
    Criterion { id: 3, title: "Kuroda, KP, EK, EKP", limit_ms: Some(10_000), uses_prover: false, run: c3 },
    Criterion { id: 4, title: "Casari derivations", limit_ms: Some(10_000), uses_prover: false, run: c4 },
    Criterion { id: 5, title: "schematic pipeline", limit_ms: Some(10_000), uses_prover: false, run: c5 },
    Criterion { id: 6, title: "propositional oracle", limit_ms: Some(60_000), uses_prover: true, run: c6 },
    Criterion { id: 7, title: "countermodel soundness", limit_ms: Some(60_000), uses_prover: true, run: c7 },
    Criterion { id: 8, title: "soundness sampling", limit_ms: Some(120_000), uses_prover: true, run: c8 },
    Criterion { id: 9, title: "cut admissibility", limit_ms: Some(60_000), uses_prover: true, run: c9 },
    Criterion { id: 10, title: "height preservation", limit_ms: None, uses_prover: true, run: c10 },
    Criterion { id: 11, title: "Casari claim sweep", limit_ms: Some(5_000), uses_prover: false, run: c11 },
    Criterion { id: 12, title: "persistency and empty state", limit_ms: Some(120_000), uses_prover: false, run: c12 },
];

pub fn criteria_ids() -> Vec<u8> {
    CRITERIA.iter().map(|c| c.id).collect()
}

pub fn run(opts: &SelftestOptions) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .filter(|c| opts.only.as_ref().is_none_or(|ids| ids.contains(&c.id)))
        .map(|c| run_one(c, opts))
        .collect()
}

fn run_one(c: &Criterion, opts: &SelftestOptions) -> CriterionResult {
    let base = CriterionResult {
        id: c.id,
        title: c.title,
        status: Status::Skipped,
        detail: String::new(),
        millis: 0,
        limit_ms: c.limit_ms,
    };
    if opts.disable_atr && c.uses_prover {
        return CriterionResult { detail: "needs the prover, which uses (atR)".into(), ..base };
    }
    let start = Instant::now();
    let out = (c.run)(opts.seed);
    let millis = start.elapsed().as_millis();
    let (mut status, mut detail) = match out {
        Ok(d) => (Status::Pass, d),
        Err(d) => (Status::Fail, d),
    };
    if let (true, Some(limit), Status::Pass) = (opts.timed, c.limit_ms, status) {
        if millis > limit {
            status = Status::Fail;
            detail = format!("{detail}; took {millis} ms, limit {limit} ms");
        }
    }
    CriterionResult { status, detail, millis, ..base }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn checked(d: &Derivation, what: &str) -> Result<(), String> {
    check_derivation(d).map_err(|r| format!("{what}: {r}"))
}

fn l(xs: &[u32]) -> Label {
    Label::from_slice(xs).expect("small label")
}

fn c1(_: u64) -> Outcome {
    let f = parse("~~P(x) -> P(x)").map_err(|e| e.to_string())?;
    for n in 1..=4 {
        let start = Instant::now();
        let out = prove(&goal_at(n, f.clone()).map_err(|e| e.to_string())?, &SearchConfig::default());
        let d = out.derivation().ok_or_else(|| format!("not proved at n = {n}"))?;
        checked(&d, &format!("n = {n}"))?;
        let ms = start.elapsed().as_millis();
        ensure(ms < 1_000, || format!("n = {n} took {ms} ms"))?;
    }
    Ok("proved and checked for n = 1..4".into())
}

fn c2(_: u64) -> Outcome {
    let p = SchemeParams::default();
    let ante = Formula::forall_v(var("x"), Formula::idisj(p.phi.clone(), p.psi.clone()));
    let succ = Formula::idisj(Formula::forall_v(var("x"), p.phi.clone()), p.psi.clone());
    for n in 1..=3 {
        let x = Label::range(n).expect("small label");
        let seq = Sequent::new(vec![LabelledFormula::new(x, ante.clone())], vec![LabelledFormula::new(x, succ.clone())]);
        let d = prove(&seq, &SearchConfig::default()).derivation().ok_or_else(|| format!("not proved at |X| = {n}"))?;
        checked(&d, &format!("search |X| = {n}"))?;
        let h = cd_derivation(x, &p.phi, &p.psi, &p.var).map_err(|e| e.to_string())?;
        checked(&h, &format!("hand tree |X| = {n}"))?;
        ensure(h.conclusion.succ[0].formula == cd(&p.phi, &p.psi, &p.var).map_err(|e| e.to_string())?, || {
            "hand tree concludes the wrong formula".into()
        })?;
    }
    Ok("search and hand-built derivations check for |X| ≤ 3".into())
}

fn c3(_: u64) -> Outcome {
    let p = SchemeParams::default();
    for x in [l(&[1]), l(&[1, 2])] {
        for name in [AppendixName::Kuroda, AppendixName::Kp, AppendixName::Ek, AppendixName::Ekp] {
            let d = appendix_derivation(name, x, &p).map_err(|e| format!("{name} at {x}: {e}"))?;
            checked(&d, &format!("{name} at {x}"))?;
        }
        let with_cut = ekp_with_cut(x, &p.phi, &p.theta, &p.var).map_err(|e| e.to_string())?;
        check_derivation_with(&with_cut, CheckOptions { allow_cut: true }).map_err(|r| r.to_string())?;
        ensure(x.len() < 2 || with_cut.uses_rule(Rule::Cut), || "EKP at {1,2} has no cut".into())?;
        let e = eliminate_cut(&with_cut).map_err(|e| e.to_string())?;
        ensure(!e.uses_rule(Rule::Cut), || "cut survived".into())?;
        checked(&e, &format!("EKP cut-free at {x}"))?;
    }
    Ok("all four derivations check at |X| ≤ 2; EKP cut eliminated".into())
}

fn c4(_: u64) -> Outcome {
    let p = SchemeParams::default();
    let mut sizes = Vec::new();
    for n in 1..=3 {
        let d = casari_derivation(Label::range(n).expect("small"), &p.phi, &p.var).map_err(|e| e.to_string())?;
        checked(&d, &format!("|X| = {n}"))?;
        ensure(d.has_note("mon") == (n >= 2), || format!("Mon segment presence wrong at |X| = {n}"))?;
        sizes.push(d.size());
    }
    Ok(format!("checks for |X| = 1,2,3 (sizes {sizes:?})"))
}

fn c5(_: u64) -> Outcome {
    let p = SchemeParams::default();
    let body = parse("iexists y. R(x, y)").map_err(|e| e.to_string())?;
    for n in 1..=2 {
        let d = casari_derivation(Label::range(n).expect("small"), &p.phi, &p.var).map_err(|e| e.to_string())?;
        let t = scheme_subst_derivation(&d, &Predicate::new("P", 1), &body, &[var("x")]).map_err(|e| e.to_string())?;
        checked(&t, &format!("|X| = {n}"))?;
        ensure(!t.uses_rule(Rule::AtR), || "(atR) in translation".into())?;
        ensure(t.conclusion.ante[0].formula.alpha_eq(&casari_antecedent(&body, &var("x"))), || {
            "translated conclusion is not the instance".into()
        })?;
    }
    Ok("translated derivations check without (atR) for |X| ≤ 2".into())
}

/// The seeded propositional corpus shared by criteria 6 and 7.
pub fn propositional_corpus(seed: u64, count: usize) -> Vec<Formula> {
    let cfg = GenConfig::propositional(&["p", "q"], 4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_formula(&mut rng, &cfg)).collect()
}

fn c6(seed: u64) -> Outcome {
    let corpus = propositional_corpus(seed, 200);
    let verdicts: Vec<Result<(bool, bool), String>> = corpus
        .par_iter()
        .map(|f| {
            let out = prove(&goal_at(4, f.clone()).map_err(|e| e.to_string())?, &SearchConfig::default());
            let proved = match out {
                SearchOutcome::Proved(_) => true,
                SearchOutcome::Refuted(_) => false,
                SearchOutcome::Inconclusive { reason } => return Err(format!("{f}: inconclusive ({reason})")),
            };
            let valid = brute_force_valid(f, 4, 1).map_err(|e| e.to_string())?;
            Ok((proved, valid))
        })
        .collect();
    let mut disagreements = Vec::new();
    let mut valid_count = 0;
    for (f, v) in corpus.iter().zip(verdicts) {
        let (proved, valid) = v?;
        valid_count += usize::from(valid);
        if proved != valid {
            disagreements.push(f.to_string());
        }
    }
    ensure(disagreements.is_empty(), || format!("{} disagreements, first {}", disagreements.len(), disagreements[0]))?;
    Ok(format!("200 formulas, {valid_count} valid, 0 disagreements"))
}

fn c7(seed: u64) -> Outcome {
    let corpus = propositional_corpus(seed, 200);
    let z = Label::range(4).expect("small");
    let results: Vec<Result<bool, String>> = corpus
        .par_iter()
        .map(|f| {
            let goal = goal_at(4, f.clone()).map_err(|e| e.to_string())?;
            let SearchOutcome::Refuted(stuck) = prove(&goal, &SearchConfig::default()) else { return Ok(false) };
            let ss = SaturatedSequent::from_stuck(stuck, z);
            ensure(verify_truth_lemma(&ss).map_err(|e| e.to_string())?, || format!("{f}: truth lemma fails"))?;
            let cm = derived_model(&ss);
            let root = LabelledFormula::new(z, f.clone());
            let supported = labelled_supports(&cm.model, &cm.naming, &cm.assignment, &root).map_err(|e| e.to_string())?;
            ensure(!supported, || format!("{f}: root supported at the full state"))?;
            Ok(true)
        })
        .collect();
    let mut refuted = 0;
    for r in results {
        refuted += usize::from(r?);
    }
    Ok(format!("{refuted} refutations, all countermodels verified"))
}

/// Seeded propositional sequents with labels inside `{1,2,3}` and their
/// derivations.
pub fn soundness_corpus(seed: u64, count: usize) -> Vec<Derivation> {
    let cfg = GenConfig::propositional(&["p", "q"], 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x8);
    let labels = l(&[1, 2, 3]).nonempty_subsets();
    let mut out = Vec::new();
    while out.len() < count {
        let mut pick = || LabelledFormula::new(*labels.choose(&mut rng).expect("labels"), random_formula(&mut rng, &cfg));
        let ante: Vec<LabelledFormula> = (0..2).map(|_| pick()).collect();
        let succ = vec![pick()];
        let k = rng.gen_range(0..=2);
        let seq = Sequent::new(ante[..k].to_vec(), succ);
        if let Some(d) = prove(&seq, &SearchConfig::default()).derivation() {
            out.push(d);
        }
    }
    out
}

/// Exhaustive validity of a propositional sequent over all models with at
/// most `max_worlds` worlds and all namings of `{1,2,3}`.
fn propositional_sequent_valid(seq: &Sequent, max_worlds: usize) -> Result<bool, String> {
    let mut preds = BTreeSet::new();
    for lf in seq.ante.iter().chain(&seq.succ) {
        lf.formula.predicates(&mut preds);
    }
    let sig: Vec<Predicate> = preds.into_iter().collect();
    for nw in 1..=max_worlds {
        let bits = IndexedModel::interpretation_bits(&sig, nw, 1);
        for index in 0..1u64 << bits {
            let im = IndexedModel::from_bits(&sig, nw, 1, index);
            for naming in 0..nw.pow(3) {
                let nf = |k: u32| -> Option<usize> {
                    (1..=3).contains(&k).then(|| naming / nw.pow(k - 1) % nw)
                };
                let mut env: Env = Vec::new();
                if !im.sequent_valid_idx(&nf, &mut env, seq).map_err(|e| e.to_string())? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn c8(seed: u64) -> Outcome {
    let corpus = soundness_corpus(seed, 100);
    let bad: Vec<String> = corpus
        .par_iter()
        .filter_map(|d| {
            let ok = check_derivation(d).is_ok() && propositional_sequent_valid(&d.conclusion, 3).unwrap_or(false);
            (!ok).then(|| d.conclusion.to_string())
        })
        .collect();
    ensure(bad.is_empty(), || format!("{} violations, first {}", bad.len(), bad[0]))?;
    Ok("100 derivations, 0 violations over |W| ≤ 3".into())
}

/// Seeded cut pairs: `d1: Γ ⇒ A` and `d2: A ⇒ Δ`, propositional, labels in `{1,2}`.
pub fn cut_pairs(seed: u64, count: usize) -> Vec<(Derivation, Derivation, LabelledFormula)> {
    let cfg = GenConfig::propositional(&["p", "q"], 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9);
    let labels = l(&[1, 2]).nonempty_subsets();
    let mut out = Vec::new();
    while out.len() < count {
        let mut pick = || LabelledFormula::new(*labels.choose(&mut rng).expect("labels"), random_formula(&mut rng, &cfg));
        let (a, g, h) = (pick(), pick(), pick());
        let cfg = SearchConfig::default();
        let Some(d1) = prove(&Sequent::new(vec![g], vec![a.clone()]), &cfg).derivation() else { continue };
        let Some(d2) = prove(&Sequent::new(vec![a.clone()], vec![h]), &cfg).derivation() else { continue };
        if d1.height + d2.height > 0 {
            out.push((d1, d2, a));
        }
    }
    out
}

fn c9(seed: u64) -> Outcome {
    let pairs = cut_pairs(seed, 50);
    for (d1, d2, a) in &pairs {
        let c = cut(d1, d2, a).map_err(|e| e.to_string())?;
        let e = eliminate_cut(&c).map_err(|e| format!("{a}: {e}"))?;
        checked(&e, &format!("cut on {a}"))?;
        ensure(!e.uses_rule(Rule::Cut), || "cut survived".into())?;
        let mut expect = d1.conclusion.clone();
        expect.remove_one(Side::Right, a);
        let mut right = d2.conclusion.clone();
        right.remove_one(Side::Left, a);
        ensure(e.conclusion.multiset_eq(&expect.merge(&right)), || format!("wrong conclusion {}", e.conclusion))?;
    }
    Ok("50 pairs, all eliminated and checked".into())
}

/// Seeded monadic derivations of positive height.
pub fn height_corpus(seed: u64, count: usize) -> Vec<Derivation> {
    let cfg = GenConfig::monadic("P", &["x", "y"], 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa);
    let labels = l(&[1, 2]).nonempty_subsets();
    let search = SearchConfig { pool_max: 3, node_limit: 20_000, ..SearchConfig::default() };
    let mut out = Vec::new();
    while out.len() < count {
        let k = rng.gen_range(0..3);
        let mut pick = || LabelledFormula::new(*labels.choose(&mut rng).expect("labels"), random_formula(&mut rng, &cfg));
        let ante: Vec<LabelledFormula> = (0..k).map(|_| pick()).collect();
        let succ = vec![pick()];
        if let Some(d) = prove(&Sequent::new(ante, succ), &search).derivation() {
            if d.height > 0 {
                out.push(d);
            }
        }
    }
    out
}

fn c10(seed: u64) -> Outcome {
    let corpus = height_corpus(seed, 100);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb);
    let mut outputs = 0usize;
    for d in &corpus {
        let h = d.height;
        let mut verify = |what: &str, t: &Derivation| -> Result<(), String> {
            outputs += 1;
            checked(t, what)?;
            ensure(t.height <= h, || format!("{what}: height {} > {h}", t.height))
        };
        let extra = LabelledFormula::new(l(&[1]), Formula::atom("P", &["y"]));
        let side = if rng.gen_bool(0.5) { Side::Left } else { Side::Right };
        verify("weaken", &weaken(d, side, &extra))?;
        let all: Vec<(Side, LabelledFormula)> = d
            .conclusion
            .ante
            .iter()
            .map(|f| (Side::Left, f.clone()))
            .chain(d.conclusion.succ.iter().map(|f| (Side::Right, f.clone())))
            .collect();
        let (s, f) = all.choose(&mut rng).expect("nonempty").clone();
        let c = contract(&weaken(d, s, &f), s, &f).map_err(|e| e.to_string())?;
        ensure(c.conclusion.multiset_eq(&d.conclusion), || "contraction changed the conclusion".into())?;
        verify("contract", &c)?;
        verify("subst", &subst_derivation(d, &var("x"), &var("y")))?;
        if !d.rule.is_leaf() {
            let app = d.app();
            let n = premises_of(&d.conclusion, &app).map_err(|e| e.to_string())?.len();
            for i in 0..n {
                verify("invert", &invert(d, &app, i).map_err(|e| e.to_string())?)?;
            }
        }
    }
    Ok(format!("100 derivations, {outputs} transformer outputs, 0 violations"))
}

fn c11(_: u64) -> Outcome {
    let mut checks = 0usize;
    for variant in [CasariVariant::A, CasariVariant::B] {
        let spec = CasariModelSpec::new(variant);
        for bits in 0u64..1 << 10 {
            let s: BTreeSet<u64> = (0..10).filter(|i| bits >> i & 1 == 1).collect();
            let top = s.iter().copied().max().unwrap_or(0);
            for m in 0..=3u64 {
                let c1 = casari_claim1(&spec, &s, m);
                let c2 = casari_claim2_finite(&spec, &s, m);
                let (w1, w2) = match (c1.witness, c2.witness) {
                    (Some(a), Some(b)) if c1.holds && c2.holds => (a, b),
                    _ => return Err(format!("{variant:?}: claim fails at s = {s:?}, m = {m}")),
                };
                let in_bounds = match variant {
                    CasariVariant::A => w1 == 2 * m + 1 && w2 <= claim2_bound(&s, m) && !s.contains(&w2),
                    CasariVariant::B => w1 <= top.max(m) + 1 && w2 <= top.max(m) + 1,
                };
                ensure(in_bounds, || format!("{variant:?}: witness out of bounds at s = {s:?}, m = {m}"))?;
                checks += 2;
            }
        }
    }
    Ok(format!("{checks} claim checks over s ⊆ {{0..9}}, m ≤ 3, variants A and B"))
}

/// All formulas of depth at most `depth` over `P(x)`, `P(y)`, `⊥`.
pub fn monadic_formulas(depth: usize) -> Vec<Formula> {
    let mut levels: Vec<Formula> = vec![Formula::Bot, Formula::atom("P", &["x"]), Formula::atom("P", &["y"])];
    for _ in 0..depth {
        let prev = levels.clone();
        let mut next = prev.clone();
        for a in &prev {
            for b in &prev {
                next.push(Formula::and(a.clone(), b.clone()));
                next.push(Formula::implies(a.clone(), b.clone()));
                next.push(Formula::idisj(a.clone(), b.clone()));
            }
            for v in ["x", "y"] {
                next.push(Formula::forall(v, a.clone()));
                next.push(Formula::iexists(v, a.clone()));
            }
        }
        let set: BTreeSet<Formula> = next.into_iter().collect();
        levels = set.into_iter().collect();
    }
    levels
}

fn persistency_violations(f: &Formula) -> usize {
    let sig = [Predicate::new("P", 1)];
    let mut bad = 0;
    for nw in 1..=3 {
        for nd in 1..=2 {
            let bits = IndexedModel::interpretation_bits(&sig, nw, nd);
            for index in 0..1u64 << bits {
                let im = IndexedModel::from_bits(&sig, nw, nd, index);
                for gx in 0..nd {
                    for gy in 0..nd {
                        let mut env: Env = vec![(var("x"), gx), (var("y"), gy)];
                        let Ok(set) = im.support_set(&mut env, f) else { return usize::MAX };
                        if !set.get(0) {
                            bad += 1;
                        }
                        for s in 0..1usize << nw {
                            if set.get(s) && (0..nw).any(|w| s >> w & 1 == 1 && !set.get(s & !(1 << w))) {
                                bad += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    bad
}

fn c12(seed: u64) -> Outcome {
    let mut corpus = monadic_formulas(2);
    let exhaustive = corpus.len();
    let cfg = GenConfig { leaf_bias: 0.1, ..GenConfig::monadic("P", &["x", "y"], 3) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc);
    corpus.extend((0..3000).map(|_| random_formula(&mut rng, &cfg)));
    let bad: usize = corpus.par_iter().map(persistency_violations).sum();
    ensure(bad == 0, || format!("{bad} violations"))?;
    Ok(format!(
        "{exhaustive} formulas of depth ≤ 2 plus 3000 sampled at depth 3; all models |W| ≤ 3, |D| ≤ 2; 0 violations"
    ))
}
