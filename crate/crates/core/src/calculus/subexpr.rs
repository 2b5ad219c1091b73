use std::collections::BTreeSet;

use super::{Derivation, LabelledFormula};
use crate::syntax::{subformulas, Formula, Var};

/// True iff every labelled formula in `d` is a subexpression of a root
/// formula: an alpha-variant of one of its subformulas (quantifier instances
/// ranging over the variables of `d`) under a sub-label.
pub fn search_space_subexpressions(d: &Derivation) -> bool {
    let vars: Vec<Var> = d.all_vars().into_iter().collect();
    let roots: Vec<(LabelledFormula, BTreeSet<Formula>)> = d
        .conclusion
        .ante
        .iter()
        .chain(&d.conclusion.succ)
        .map(|lf| (lf.clone(), subformulas(&lf.formula, &vars)))
        .collect();
    let ok = |lf: &LabelledFormula| {
        let key = lf.formula.canonical();
        roots.iter().any(|(r, subs)| r.label.is_superset_of(lf.label) && subs.contains(&key))
    };
    !d.any_node(&mut |n| !n.conclusion.ante.iter().chain(&n.conclusion.succ).all(ok))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{Label, Rule, Sequent};
    use crate::syntax::parse;

    #[test]
    fn junk_is_detected() {
        let l = Label::range(1).unwrap();
        let p = LabelledFormula::new(l, parse("p").unwrap());
        let ok = Derivation::leaf(Sequent::new(vec![p.clone()], vec![p.clone()]), Rule::Id);
        assert!(search_space_subexpressions(&ok));
        let junk = LabelledFormula::new(l, parse("r").unwrap());
        let leaf = Derivation::leaf(Sequent::new(vec![p.clone(), junk], vec![p.clone()]), Rule::Id);
        let root = Sequent::new(vec![p.clone()], vec![p.clone()]);
        let bad = Derivation::node(root, crate::calculus::RuleApp::new(Rule::AndL, p), vec![leaf]);
        assert!(!search_space_subexpressions(&bad));
    }
}
