//! Saturated sequents, the derived countermodel and the truth-lemma check.
//!
//! A failed search leaves a branch whose accumulated antecedent and
//! succedent are closed under every rule of the calculus. That pair is the
//! saturated sequent; `{k}:P(x̄) ∉ Δ` decides the atoms of the derived model.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::calculus::{is_initial, prove, Derivation, Label, LabelledFormula, SearchConfig, SearchOutcome, Sequent, StuckSequent};
use crate::semantics::{labelled_supports, Assignment, Model, SemanticsError, WorldNaming};
use crate::syntax::{subst_var, Formula, Predicate, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SaturateError {
    #[error("label {0} is not a subset of the universe {1}")]
    LabelOutsideUniverse(Label, Label),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SaturatedSequent {
    #[serde(serialize_with = "ser_lfs")]
    pub ante: Vec<LabelledFormula>,
    #[serde(serialize_with = "ser_lfs")]
    pub succ: Vec<LabelledFormula>,
    /// Label universe; the worlds of the derived model.
    #[serde(serialize_with = "ser_label")]
    pub z: Label,
    /// Variables of the branch; the domain of the derived model.
    #[serde(serialize_with = "ser_vars")]
    pub pool: Vec<Var>,
}

fn ser_lfs<S: serde::Serializer>(v: &[LabelledFormula], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|lf| lf.to_string()))
}

fn ser_label<S: serde::Serializer>(v: &Label, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter())
}

fn ser_vars<S: serde::Serializer>(v: &[Var], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl SaturatedSequent {
    pub fn from_stuck(stuck: StuckSequent, z: Label) -> Self {
        SaturatedSequent { ante: stuck.ante, succ: stuck.succ, z, pool: stuck.pool }
    }

    pub fn sequent(&self) -> Sequent {
        Sequent::new(self.ante.clone(), self.succ.clone())
    }
}

#[derive(Clone, Debug)]
pub enum SaturationOutcome {
    Proved(Derivation),
    Saturated(SaturatedSequent),
    /// First-order budget exhausted.
    Inconclusive { reason: String },
}

/// Saturates `seq` over the universe `z` by running the prover; the failing
/// branch of an unsuccessful search is the saturation.
pub fn saturate(seq: &Sequent, z: Label, cfg: &SearchConfig) -> Result<SaturationOutcome, SaturateError> {
    for lf in seq.ante.iter().chain(&seq.succ) {
        if !z.is_superset_of(lf.label) {
            return Err(SaturateError::LabelOutsideUniverse(lf.label, z));
        }
    }
    Ok(match prove(seq, cfg) {
        SearchOutcome::Proved(d) => SaturationOutcome::Proved(d),
        SearchOutcome::Refuted(stuck) => SaturationOutcome::Saturated(SaturatedSequent::from_stuck(stuck, z)),
        SearchOutcome::Inconclusive { reason } => SaturationOutcome::Inconclusive { reason },
    })
}

/// A model together with the naming and assignment that refute a sequent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Countermodel {
    pub model: Model,
    pub naming: WorldNaming,
    pub assignment: Assignment,
}

/// Element standing in for the domain when the branch has no variables.
const LONE_ELEMENT: &str = "d";

pub fn derived_model(ss: &SaturatedSequent) -> Countermodel {
    let worlds: Vec<String> = ss.z.iter().map(|k| k.to_string()).collect();
    let domain: Vec<String> = if ss.pool.is_empty() {
        vec![LONE_ELEMENT.to_string()]
    } else {
        ss.pool.iter().map(|v| v.to_string()).collect()
    };
    let mut preds = BTreeSet::new();
    for lf in ss.ante.iter().chain(&ss.succ) {
        lf.formula.predicates(&mut preds);
    }
    let refuted: BTreeSet<(u32, String, Vec<String>)> = ss
        .succ
        .iter()
        .filter(|lf| lf.label.len() == 1)
        .filter_map(|lf| match &lf.formula {
            Formula::Atom(p, args) => {
                Some((lf.label.min(), p.to_string(), args.iter().map(|a| a.to_string()).collect()))
            }
            _ => None,
        })
        .collect();
    let mut interp = BTreeMap::new();
    for Predicate { name, arity } in preds {
        let tuples = tuples_over(&domain, arity);
        let mut per_world = BTreeMap::new();
        for k in ss.z.iter() {
            let holds: BTreeSet<Vec<String>> = tuples
                .iter()
                .filter(|t| !refuted.contains(&(k, name.to_string(), t.to_vec())))
                .cloned()
                .collect();
            per_world.insert(k.to_string(), holds);
        }
        interp.insert(name.to_string(), per_world);
    }
    let naming = ss.z.iter().map(|k| (k, k.to_string())).collect();
    let assignment = ss.pool.iter().map(|v| (v.to_string(), v.to_string())).collect();
    Countermodel { model: Model { worlds, domain, interp }, naming, assignment }
}

fn tuples_over(domain: &[String], arity: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                domain.iter().map(move |d| {
                    let mut t = t.clone();
                    t.push(d.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// Every antecedent member is supported and every succedent member is not.
pub fn verify_truth_lemma(ss: &SaturatedSequent) -> Result<bool, SaturateError> {
    let cm = derived_model(ss);
    for lf in &ss.ante {
        if !labelled_supports(&cm.model, &cm.naming, &cm.assignment, lf)? {
            return Ok(false);
        }
    }
    for lf in &ss.succ {
        if labelled_supports(&cm.model, &cm.naming, &cm.assignment, lf)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One violated saturation condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureViolation {
    pub condition: &'static str,
    pub formula: String,
}

/// Direct scan of the saturation conditions. Unprovability is tested with
/// `cfg`; an inconclusive search is not reported as a violation.
pub fn closure_audit(ss: &SaturatedSequent, cfg: &SearchConfig) -> Vec<ClosureViolation> {
    let key = |l: Label, f: &Formula| (l, f.canonical());
    let gamma: BTreeSet<(Label, Formula)> = ss.ante.iter().map(|lf| key(lf.label, &lf.formula)).collect();
    let delta: BTreeSet<(Label, Formula)> = ss.succ.iter().map(|lf| key(lf.label, &lf.formula)).collect();
    let in_g = |l: Label, f: &Formula| gamma.contains(&key(l, f));
    let in_d = |l: Label, f: &Formula| delta.contains(&key(l, f));
    let mut out = Vec::new();
    let mut fail = |condition: &'static str, lf: &LabelledFormula| {
        out.push(ClosureViolation { condition, formula: lf.to_string() })
    };

    for lf in ss.ante.iter().chain(&ss.succ) {
        if !ss.z.is_superset_of(lf.label) {
            fail("labels", lf);
        }
    }
    let seq = ss.sequent();
    if is_initial(&seq).is_some() {
        fail("unprov", &ss.ante[0]);
    } else if matches!(prove(&seq, cfg), SearchOutcome::Proved(_)) {
        fail("unprov", ss.succ.first().or(ss.ante.first()).expect("nonempty sequent"));
    }
    let x_vars = &ss.pool;
    for lf in &ss.succ {
        let x = lf.label;
        match &lf.formula {
            Formula::Atom(..) => {
                if !x.singletons().any(|k| in_d(k, &lf.formula)) {
                    fail("atR", lf);
                }
            }
            Formula::And(a, b) => {
                if !in_d(x, a) && !in_d(x, b) {
                    fail("andR", lf);
                }
            }
            Formula::IDisj(a, b) => {
                if !(in_d(x, a) && in_d(x, b)) {
                    fail("idisjR", lf);
                }
            }
            Formula::Implies(a, b) => {
                if !x.nonempty_subsets().into_iter().any(|y| in_g(y, a) && in_d(y, b)) {
                    fail("impR", lf);
                }
            }
            Formula::Forall(v, body) => {
                if !x_vars.iter().any(|z| in_d(x, &subst_var(body, v, z))) {
                    fail("forallR", lf);
                }
            }
            Formula::IExists(v, body) => {
                if !x_vars.iter().all(|y| in_d(x, &subst_var(body, v, y))) {
                    fail("iexistsR", lf);
                }
            }
            Formula::Bot => {}
        }
    }
    for lf in &ss.ante {
        let x = lf.label;
        match &lf.formula {
            Formula::And(a, b) => {
                if !(in_g(x, a) && in_g(x, b)) {
                    fail("andL", lf);
                }
            }
            Formula::IDisj(a, b) => {
                if !in_g(x, a) && !in_g(x, b) {
                    fail("idisjL", lf);
                }
            }
            Formula::Implies(a, b) => {
                if !x.nonempty_subsets().into_iter().all(|y| in_d(y, a) || in_g(y, b)) {
                    fail("impL", lf);
                }
            }
            Formula::Forall(v, body) => {
                if !x_vars.iter().all(|y| in_g(x, &subst_var(body, v, y))) {
                    fail("forallL", lf);
                }
            }
            Formula::IExists(v, body) => {
                if !x_vars.iter().any(|z| in_g(x, &subst_var(body, v, z))) {
                    fail("iexistsL", lf);
                }
            }
            Formula::Bot | Formula::Atom(..) => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::supports;
    use crate::syntax::parse;

    fn saturated(n: u32, f: &str) -> SaturatedSequent {
        let z = Label::range(n).unwrap();
        match saturate(&Sequent::goal(z, parse(f).unwrap()), z, &SearchConfig::default()).unwrap() {
            SaturationOutcome::Saturated(ss) => ss,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn question_countermodel() {
        let ss = saturated(2, "?p");
        assert!(closure_audit(&ss, &SearchConfig::default()).is_empty());
        assert!(verify_truth_lemma(&ss).unwrap());
        let cm = derived_model(&ss);
        let p_worlds = &cm.model.interp["p"];
        let true_at = p_worlds.values().filter(|t| !t.is_empty()).count();
        assert_eq!(true_at, 1);
        let full: BTreeSet<String> = cm.model.worlds.iter().cloned().collect();
        assert!(!supports(&cm.model, &full, &cm.assignment, &parse("?p").unwrap()).unwrap());
    }

    #[test]
    fn provable_input() {
        let z = Label::range(1).unwrap();
        let out = saturate(&Sequent::goal(z, parse("p -> p").unwrap()), z, &SearchConfig::default()).unwrap();
        assert!(matches!(out, SaturationOutcome::Proved(_)));
    }

    #[test]
    fn label_outside_universe() {
        let z = Label::range(1).unwrap();
        let seq = Sequent::goal(Label::range(2).unwrap(), parse("p").unwrap());
        assert!(saturate(&seq, z, &SearchConfig::default()).is_err());
    }

    #[test]
    fn corrupted_saturation_fails() {
        let mut ss = saturated(2, "?p");
        ss.succ.retain(|lf| !(lf.label.len() == 1 && lf.formula == parse("p").unwrap()));
        assert!(!closure_audit(&ss, &SearchConfig::default()).is_empty());
        assert!(!verify_truth_lemma(&ss).unwrap());
    }

    #[test]
    fn first_order_countermodel() {
        let ss = saturated(1, "(iexists x. P(x)) -> forall x. P(x)");
        assert!(closure_audit(&ss, &SearchConfig::default()).is_empty());
        assert!(verify_truth_lemma(&ss).unwrap());
        assert!(derived_model(&ss).model.domain.len() >= 2);
    }
}
