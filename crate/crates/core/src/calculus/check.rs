use std::fmt;

use serde::Serialize;

use super::{is_initial, premises_of, Derivation, Label, LabelledFormula, Params, Rule, RuleApp, Sequent, Side};
use crate::syntax::Formula;

#[derive(Clone, Copy, Debug, Default)]
pub struct CheckOptions {
    /// Accept `cut` nodes.
    pub allow_cut: bool,
}

/// First failing node of a derivation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    /// Premise indices from the root to the failing node.
    pub path: Vec<usize>,
    pub rule: String,
    pub conclusion: String,
    pub message: String,
    pub expected: Vec<String>,
    pub found: Vec<String>,
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {:?} ({}): {}", self.path, self.rule, self.message)?;
        if !self.expected.is_empty() || !self.found.is_empty() {
            write!(f, "\n  expected: {:?}\n  found:    {:?}", self.expected, self.found)?;
        }
        Ok(())
    }
}

pub fn check_derivation(d: &Derivation) -> Result<(), CheckReport> {
    check_derivation_with(d, CheckOptions::default())
}

pub fn check_derivation_with(d: &Derivation, opts: CheckOptions) -> Result<(), CheckReport> {
    let mut path = Vec::new();
    walk(d, opts, &mut path)
}

fn walk(d: &Derivation, opts: CheckOptions, path: &mut Vec<usize>) -> Result<(), CheckReport> {
    check_node(d, opts).map_err(|(message, expected, found)| CheckReport {
        path: path.clone(),
        rule: d.rule.tag().to_string(),
        conclusion: d.conclusion.to_string(),
        message,
        expected,
        found,
    })?;
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        walk(p, opts, path)?;
        path.pop();
    }
    Ok(())
}

type NodeError = (String, Vec<String>, Vec<String>);

fn plain(msg: String) -> NodeError {
    (msg, Vec::new(), Vec::new())
}

fn shown(seqs: &[Sequent]) -> Vec<String> {
    seqs.iter().map(|s| s.to_string()).collect()
}

fn same_premises(expected: &[Sequent], found: &[Sequent]) -> bool {
    if expected.len() != found.len() {
        return false;
    }
    let mut a: Vec<_> = expected.iter().map(|s| s.canonical_key()).collect();
    let mut b: Vec<_> = found.iter().map(|s| s.canonical_key()).collect();
    a.sort();
    b.sort();
    a == b
}

fn check_node(d: &Derivation, opts: CheckOptions) -> Result<(), NodeError> {
    let found: Vec<Sequent> = d.premises.iter().map(|p| p.conclusion.clone()).collect();
    match d.rule {
        Rule::Id | Rule::BotL => {
            if !d.premises.is_empty() {
                return Err(plain(format!("{} is a leaf but has premises", d.rule)));
            }
            let ok = match d.rule {
                Rule::BotL => d.conclusion.ante.iter().any(|lf| lf.formula == Formula::Bot),
                _ => has_id_pair(&d.conclusion),
            };
            if ok {
                Ok(())
            } else {
                Err(plain(format!("conclusion is not an instance of {}", d.rule)))
            }
        }
        Rule::Cut => {
            if !opts.allow_cut {
                return Err(plain("cut is not a rule of the calculus; run eliminate-cut first".into()));
            }
            check_cut(d, &found)
        }
        rule => {
            let mut last_err = None;
            for app in candidate_apps(&d.conclusion, rule, &d.params) {
                match premises_of(&d.conclusion, &app) {
                    Ok(expected) => {
                        if same_premises(&expected, &found) {
                            return Ok(());
                        }
                        last_err = Some((
                            "stored premises differ from the rule's premises".to_string(),
                            shown(&expected),
                            shown(&found),
                        ));
                    }
                    Err(e) => {
                        if last_err.is_none() {
                            last_err = Some(plain(e.to_string()));
                        }
                    }
                }
            }
            Err(last_err.unwrap_or_else(|| plain(format!("no principal formula for {rule}"))))
        }
    }
}

fn has_id_pair(seq: &Sequent) -> bool {
    is_initial(&Sequent::new(
        seq.ante.iter().filter(|lf| lf.formula != Formula::Bot).cloned().collect(),
        seq.succ.clone(),
    )) == Some(Rule::Id)
}

fn candidate_apps(seq: &Sequent, rule: Rule, params: &Params) -> Vec<RuleApp> {
    if params.principal.is_some() {
        return vec![RuleApp { rule, params: params.clone() }];
    }
    let Some(side) = rule.principal_side() else { return Vec::new() };
    let mut out = Vec::new();
    let mut seen: Vec<&LabelledFormula> = Vec::new();
    for lf in seq.side(side) {
        if seen.iter().any(|s| s.alpha_eq(lf)) {
            continue;
        }
        seen.push(lf);
        let mut p = params.clone();
        p.principal = Some(lf.clone());
        out.push(RuleApp { rule, params: p });
    }
    out
}

fn check_cut(d: &Derivation, found: &[Sequent]) -> Result<(), NodeError> {
    let cut: &LabelledFormula =
        d.params.cut.as_ref().ok_or_else(|| plain("cut node without a cut formula".into()))?;
    if found.len() != 2 {
        return Err(plain(format!("cut needs 2 premises, found {}", found.len())));
    }
    let mut left = found[0].clone();
    let mut right = found[1].clone();
    if !left.remove_one(Side::Right, cut) {
        return Err(plain(format!("left premise lacks {cut} in the succedent")));
    }
    if !right.remove_one(Side::Left, cut) {
        return Err(plain(format!("right premise lacks {cut} in the antecedent")));
    }
    let merged = left.merge(&right);
    if merged.multiset_eq(&d.conclusion) {
        Ok(())
    } else {
        Err(("cut conclusion is not the union of the premise contexts".into(), vec![merged.to_string()], vec![d.conclusion.to_string()]))
    }
}

/// The rule application of `d` with its principal formula made explicit,
/// found by matching stored premises when the principal was omitted.
pub fn resolved_app(d: &Derivation) -> Option<RuleApp> {
    if d.params.principal.is_some() || d.rule.is_leaf() || d.rule == Rule::Cut {
        return Some(d.app());
    }
    let found: Vec<Sequent> = d.premises.iter().map(|p| p.conclusion.clone()).collect();
    candidate_apps(&d.conclusion, d.rule, &d.params).into_iter().find(|app| {
        premises_of(&d.conclusion, app).map(|e| same_premises(&e, &found)).unwrap_or(false)
    })
}

/// Labels used anywhere in a derivation.
pub fn labels_in(d: &Derivation) -> Label {
    let mut acc = d.conclusion.labels_union().unwrap_or(Label::EMPTY);
    for p in &d.premises {
        acc = acc.union(labels_in(p));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, Var};

    fn lf(xs: &[u32], f: &str) -> LabelledFormula {
        LabelledFormula::new(Label::from_slice(xs).unwrap(), parse(f).unwrap())
    }

    #[test]
    fn id_leaf_subset_direction() {
        let ok = Derivation::leaf(Sequent::new(vec![lf(&[1, 2], "P(x)")], vec![lf(&[1], "P(x)")]), Rule::Id);
        assert!(check_derivation(&ok).is_ok());
        let bad = Derivation::leaf(Sequent::new(vec![lf(&[1], "P(x)")], vec![lf(&[1, 2], "P(x)")]), Rule::Id);
        let rep = check_derivation(&bad).unwrap_err();
        assert!(rep.path.is_empty());
    }

    #[test]
    fn reports_path_of_first_failure() {
        // ⇒ {1}: P(x) ∧ q with one bad leaf
        let concl = Sequent::new(vec![lf(&[1], "P(x)")], vec![lf(&[1], "P(x) & q")]);
        let good = Derivation::leaf(Sequent::new(vec![lf(&[1], "P(x)")], vec![lf(&[1], "P(x)")]), Rule::Id);
        let bad = Derivation::leaf(Sequent::new(vec![lf(&[1], "P(x)")], vec![lf(&[1], "q")]), Rule::Id);
        let d = Derivation::node(concl, RuleApp::new(Rule::AndR, lf(&[1], "P(x) & q")), vec![good, bad]);
        let rep = check_derivation(&d).unwrap_err();
        assert_eq!(rep.path, vec![1]);
    }

    #[test]
    fn eigenvariable_reuse_detected() {
        let concl = Sequent::new(vec![lf(&[1], "P(y)")], vec![lf(&[1], "forall x. P(x)")]);
        let prem = Sequent::new(vec![lf(&[1], "P(y)")], vec![lf(&[1], "P(y)")]);
        let d = Derivation::node(
            concl,
            RuleApp::new(Rule::ForallR, lf(&[1], "forall x. P(x)")).with_var(Var::from("y")),
            vec![Derivation::leaf(prem, Rule::Id)],
        );
        let rep = check_derivation(&d).unwrap_err();
        assert_eq!(rep.rule, "forallR");
    }

    #[test]
    fn principal_may_be_omitted() {
        let concl = Sequent::new(vec![lf(&[1], "p & q")], vec![lf(&[1], "q")]);
        let prem = Sequent::new(vec![lf(&[1], "p"), lf(&[1], "q")], vec![lf(&[1], "q")]);
        let mut d = Derivation::node(concl, RuleApp::new(Rule::AndL, lf(&[1], "p & q")), vec![Derivation::leaf(prem, Rule::Id)]);
        d.params.principal = None;
        assert!(check_derivation(&d).is_ok());
    }

    #[test]
    fn cut_requires_flag() {
        let a = Derivation::leaf(Sequent::new(vec![lf(&[1, 2], "p")], vec![lf(&[1, 2], "p")]), Rule::Id);
        let b = Derivation::leaf(Sequent::new(vec![lf(&[1, 2], "p")], vec![lf(&[1], "p")]), Rule::Id);
        let concl = Sequent::new(vec![lf(&[1, 2], "p")], vec![lf(&[1], "p")]);
        let mut d = Derivation::node(concl, RuleApp { rule: Rule::Cut, params: Params::default() }, vec![a, b]);
        d.params.cut = Some(lf(&[1, 2], "p"));
        assert!(check_derivation(&d).is_err());
        assert!(check_derivation_with(&d, CheckOptions { allow_cut: true }).is_ok());
    }
}
