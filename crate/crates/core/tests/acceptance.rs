//! Acceptance suite: one PASS/FAIL line per criterion. Each criterion runs
//! the library's own check and, where a semantic claim is involved, a second
//! check against the small support evaluator defined here, which shares no
//! code with the library's semantics.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::process::ExitCode;

use inqseq::calculus::{check_derivation, goal_at, prove, Label, SearchConfig, SearchOutcome, Sequent};
use inqseq::saturate::{derived_model, SaturatedSequent};
use inqseq::schemes::{scheme, SchemeName, SchemeParams};
use inqseq::selftest::{self, SelftestOptions, Status};
use inqseq::semantics::Model;
use inqseq::syntax::random::{random_formula, GenConfig};
use inqseq::syntax::{parse, Formula, Var};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Worlds `0..nw`, elements `0..nd`, extensions keyed by predicate and world.
struct Structure {
    nw: usize,
    nd: usize,
    ext: HashSet<(String, usize, Vec<usize>)>,
}

impl Structure {
    fn states(&self) -> usize {
        1 << self.nw
    }

    fn from_model(m: &Model) -> Structure {
        let w = |n: &String| m.worlds.iter().position(|x| x == n).expect("world");
        let d = |n: &String| m.domain.iter().position(|x| x == n).expect("element");
        let mut ext = HashSet::new();
        for (p, per_world) in &m.interp {
            for (world, tuples) in per_world {
                for t in tuples {
                    ext.insert((p.clone(), w(world), t.iter().map(d).collect()));
                }
            }
        }
        Structure { nw: m.worlds.len(), nd: m.domain.len(), ext }
    }
}

fn signature(f: &Formula, out: &mut BTreeSet<(String, usize)>) {
    match f {
        Formula::Bot => {}
        Formula::Atom(p, args) => {
            out.insert((p.to_string(), args.len()));
        }
        Formula::And(a, b) | Formula::Implies(a, b) | Formula::IDisj(a, b) => {
            signature(a, out);
            signature(b, out);
        }
        Formula::Forall(_, b) | Formula::IExists(_, b) => signature(b, out),
    }
}

fn tuples(nd: usize, arity: usize) -> Vec<Vec<usize>> {
    (0..arity).fold(vec![vec![]], |acc, _| {
        acc.into_iter().flat_map(|t| (0..nd).map(move |d| [t.clone(), vec![d]].concat())).collect()
    })
}

/// Every structure over the signature with exactly `nw` worlds and `nd` elements.
fn structures(sig: &BTreeSet<(String, usize)>, nw: usize, nd: usize) -> Vec<Structure> {
    let mut slots = Vec::new();
    for (p, arity) in sig {
        for w in 0..nw {
            for t in tuples(nd, *arity) {
                slots.push((p.clone(), w, t));
            }
        }
    }
    assert!(slots.len() <= 20, "too many interpretation slots");
    (0u64..1 << slots.len())
        .map(|bits| Structure {
            nw,
            nd,
            ext: slots.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, s)| s.clone()).collect(),
        })
        .collect()
}

fn lookup(env: &[(Var, usize)], x: &Var) -> usize {
    env.iter().rev().find(|(y, _)| y == x).map(|(_, d)| *d).unwrap_or_else(|| panic!("unassigned {x}"))
}

/// Bit `s` is set iff the state with world mask `s` supports `f`.
fn support(m: &Structure, env: &mut Vec<(Var, usize)>, f: &Formula) -> u64 {
    let n = m.states();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    match f {
        Formula::Bot => 1,
        Formula::Atom(p, args) => {
            let t: Vec<usize> = args.iter().map(|a| lookup(env, a)).collect();
            let truth: usize = (0..m.nw).filter(|&w| m.ext.contains(&(p.to_string(), w, t.clone()))).map(|w| 1 << w).sum();
            (0..n).filter(|s| s & !truth == 0).fold(0, |acc, s| acc | 1 << s)
        }
        Formula::And(a, b) => support(m, env, a) & support(m, env, b),
        Formula::IDisj(a, b) => support(m, env, a) | support(m, env, b),
        Formula::Implies(a, b) => {
            let (sa, sb) = (support(m, env, a), support(m, env, b));
            let mut out = 0;
            for s in 0..n {
                let mut t = s;
                let ok = loop {
                    if sa >> t & 1 == 1 && sb >> t & 1 == 0 {
                        break false;
                    }
                    if t == 0 {
                        break true;
                    }
                    t = (t - 1) & s;
                };
                if ok {
                    out |= 1 << s;
                }
            }
            out
        }
        Formula::Forall(x, b) | Formula::IExists(x, b) => {
            let universal = matches!(f, Formula::Forall(..));
            let mut acc = if universal { all } else { 0 };
            for d in 0..m.nd {
                env.push((x.clone(), d));
                let s = support(m, env, b);
                env.pop();
                acc = if universal { acc & s } else { acc | s };
            }
            acc
        }
    }
}

fn assignments(vars: &[Var], nd: usize) -> Vec<Vec<(Var, usize)>> {
    tuples(nd, vars.len()).into_iter().map(|t| vars.iter().cloned().zip(t).collect()).collect()
}

fn free_vars(f: &Formula) -> Vec<Var> {
    fn go(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match f {
            Formula::Bot => {}
            Formula::Atom(_, args) => out.extend(args.iter().filter(|a| !bound.contains(a)).cloned()),
            Formula::And(a, b) | Formula::Implies(a, b) | Formula::IDisj(a, b) => {
                go(a, bound, out);
                go(b, bound, out);
            }
            Formula::Forall(x, b) | Formula::IExists(x, b) => {
                bound.push(x.clone());
                go(b, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut vec![], &mut out);
    out.into_iter().collect()
}

/// Every state of at most `max_worlds` worlds supports `f`, over domains up
/// to `max_domain` and every assignment of its free variables.
fn valid_upto(f: &Formula, max_worlds: usize, max_domain: usize) -> bool {
    let mut sig = BTreeSet::new();
    signature(f, &mut sig);
    let vars = free_vars(f);
    (1..=max_worlds).all(|nw| {
        (1..=max_domain).all(|nd| {
            structures(&sig, nw, nd).iter().all(|m| {
                assignments(&vars, nd).into_iter().all(|mut env| support(m, &mut env, f) >> (m.states() - 1) & 1 == 1)
            })
        })
    })
}

fn label_mask(label: Label, naming: &dyn Fn(u32) -> usize) -> usize {
    label.iter().map(|k| 1 << naming(k)).fold(0, |a, b| a | b)
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn f(text: &str) -> Formula {
    parse(text).expect("fixed formula parses")
}

fn oracle_1() -> Check {
    ensure(valid_upto(&f("~~P(x) -> P(x)"), 4, 2), || "~~P(x) -> P(x) refuted".into())?;
    Ok("oracle: ~~P(x) -> P(x) supported in all models with |W| ≤ 4, |D| ≤ 2".into())
}

fn oracle_2() -> Check {
    let cd = scheme(SchemeName::Cd, &SchemeParams::default()).map_err(|e| e.to_string())?;
    ensure(valid_upto(&cd, 3, 2), || "CD refuted".into())?;
    Ok("oracle: CD instance valid for |W| ≤ 3, |D| ≤ 2".into())
}

fn oracle_3() -> Check {
    let k = scheme(SchemeName::Kuroda, &SchemeParams::default()).map_err(|e| e.to_string())?;
    ensure(valid_upto(&k, 3, 2), || "Kuroda refuted".into())?;
    Ok("oracle: Kuroda instance valid for |W| ≤ 3, |D| ≤ 2".into())
}

fn oracle_4() -> Check {
    let c = scheme(SchemeName::CasariAtomic, &SchemeParams::default()).map_err(|e| e.to_string())?;
    ensure(valid_upto(&c, 3, 2), || "Casari refuted on a finite model".into())?;
    Ok("oracle: Casari instance valid for |W| ≤ 3, |D| ≤ 2".into())
}

fn oracle_6(seed: u64) -> Check {
    // The oracle must be able to say no.
    ensure(!valid_upto(&f("p \\/ ~p"), 2, 1), || "oracle accepts p \\/ ~p".into())?;
    let corpus = selftest::propositional_corpus(seed, 200);
    let mut valid = 0;
    for phi in &corpus {
        let goal = goal_at(4, phi.clone()).map_err(|e| e.to_string())?;
        let proved = match prove(&goal, &SearchConfig::default()) {
            SearchOutcome::Proved(_) => true,
            SearchOutcome::Refuted(_) => false,
            SearchOutcome::Inconclusive { reason } => return Err(format!("{phi}: inconclusive ({reason})")),
        };
        let oracle = valid_upto(phi, 4, 1);
        ensure(proved == oracle, || format!("{phi}: prover says {proved}, oracle says {oracle}"))?;
        valid += usize::from(oracle);
    }
    Ok(format!("oracle agrees on 200 formulas ({valid} valid)"))
}

fn oracle_7(seed: u64) -> Check {
    let z = Label::range(4).expect("small label");
    let mut refuted = 0;
    for phi in selftest::propositional_corpus(seed, 200) {
        let goal = goal_at(4, phi.clone()).map_err(|e| e.to_string())?;
        let SearchOutcome::Refuted(stuck) = prove(&goal, &SearchConfig::default()) else { continue };
        let ss = SaturatedSequent::from_stuck(stuck, z);
        let cm = derived_model(&ss);
        let m = Structure::from_model(&cm.model);
        let naming = |k: u32| {
            let w = &cm.naming[&k];
            cm.model.worlds.iter().position(|x| x == w).expect("named world")
        };
        let elems = &cm.model.domain;
        let base: Vec<(Var, usize)> = cm
            .assignment
            .iter()
            .map(|(v, d)| (Var::from(v.as_str()), elems.iter().position(|e| e == d).expect("element")))
            .collect();
        let seq = ss.sequent();
        for lf in &seq.ante {
            let s = label_mask(lf.label, &naming);
            ensure(support(&m, &mut base.clone(), &lf.formula) >> s & 1 == 1, || format!("{phi}: {lf} unsupported"))?;
        }
        for lf in &seq.succ {
            let s = label_mask(lf.label, &naming);
            ensure(support(&m, &mut base.clone(), &lf.formula) >> s & 1 == 0, || format!("{phi}: {lf} supported"))?;
        }
        let root = label_mask(z, &naming);
        ensure(support(&m, &mut base.clone(), &phi) >> root & 1 == 0, || format!("{phi}: root supported"))?;
        refuted += 1;
    }
    Ok(format!("oracle confirms truth lemma and root failure for {refuted} countermodels"))
}

/// Every model with at most `max_worlds` worlds and every map from the
/// sequent's label elements into its worlds satisfies the sequent.
fn sequent_valid_upto(seq: &Sequent, max_worlds: usize) -> bool {
    let mut sig = BTreeSet::new();
    let mut elems = BTreeSet::new();
    for lf in seq.ante.iter().chain(&seq.succ) {
        signature(&lf.formula, &mut sig);
        elems.extend(lf.label.iter());
    }
    let elems: Vec<u32> = elems.into_iter().collect();
    (1..=max_worlds).all(|nw| {
        structures(&sig, nw, 1).iter().all(|m| {
            tuples(nw, elems.len()).iter().all(|image| {
                let map: BTreeMap<u32, usize> = elems.iter().copied().zip(image.iter().copied()).collect();
                let naming = |k: u32| map[&k];
                let holds = |lf: &inqseq::calculus::LabelledFormula| {
                    support(m, &mut vec![], &lf.formula) >> label_mask(lf.label, &naming) & 1 == 1
                };
                !seq.ante.iter().all(holds) || seq.succ.iter().any(holds)
            })
        })
    })
}

fn oracle_8(seed: u64) -> Check {
    let corpus = selftest::soundness_corpus(seed, 100);
    for d in &corpus {
        check_derivation(d).map_err(|r| r.to_string())?;
        ensure(sequent_valid_upto(&d.conclusion, 3), || format!("{} refuted by the oracle", d.conclusion))?;
    }
    Ok("oracle finds all 100 conclusions valid for |W| ≤ 3 under every naming".into())
}

fn oracle_12(seed: u64) -> Check {
    let mut corpus = selftest::monadic_formulas(2);
    let cfg = GenConfig { leaf_bias: 0.1, ..GenConfig::monadic("P", &["x", "y"], 3) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xacce);
    corpus.extend((0..1000).map(|_| random_formula(&mut rng, &cfg)));
    let vars = [Var::from("x"), Var::from("y")];
    let sig = BTreeSet::from([("P".to_string(), 1)]);
    let mut models = Vec::new();
    for nw in 1..=3 {
        for nd in 1..=2 {
            models.extend(structures(&sig, nw, nd));
        }
    }
    for phi in &corpus {
        for m in &models {
            for mut env in assignments(&vars, m.nd) {
                let sup = support(m, &mut env, phi);
                ensure(sup & 1 == 1, || format!("{phi}: empty state unsupported"))?;
                for s in 0..m.states() {
                    if sup >> s & 1 == 1 {
                        let down = (0..m.states()).filter(|t| t & !s == 0).all(|t| sup >> t & 1 == 1);
                        ensure(down, || format!("{phi}: support not downward closed"))?;
                    }
                }
            }
        }
    }
    Ok(format!("oracle: {} formulas persistent with empty state support", corpus.len()))
}

fn main() -> ExitCode {
    let seed = selftest::DEFAULT_SEED;
    let mut failures = 0;
    for id in selftest::criteria_ids() {
        let opts = SelftestOptions { seed, only: Some(vec![id]), ..SelftestOptions::default() };
        let r = selftest::run(&opts).remove(0);
        let oracle = match id {
            1 => Some(oracle_1()),
            2 => Some(oracle_2()),
            3 => Some(oracle_3()),
            4 => Some(oracle_4()),
            6 => Some(oracle_6(seed)),
            7 => Some(oracle_7(seed)),
            8 => Some(oracle_8(seed)),
            12 => Some(oracle_12(seed)),
            _ => None,
        };
        let mut pass = r.status == Status::Pass;
        let mut detail = format!("{} ({} ms)", r.detail, r.millis);
        match oracle {
            Some(Ok(msg)) => detail.push_str(&format!("; {msg}")),
            Some(Err(msg)) => {
                pass = false;
                detail.push_str(&format!("; oracle: {msg}"));
            }
            None => {}
        }
        failures += usize::from(!pass);
        println!("{} criterion {:>2} {}: {detail}", if pass { "PASS" } else { "FAIL" }, id, r.title);
    }
    if failures == 0 {
        println!("all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
