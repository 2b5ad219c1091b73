//! Text and LaTeX renderings of derivations.

use std::fmt::Write;

use super::{Derivation, LabelledFormula, Sequent};
use crate::syntax::Formula;

/// Indented tree, one node per line, root first.
pub fn text_tree(d: &Derivation) -> String {
    let mut out = String::new();
    text_node(d, 0, &mut out);
    out
}

fn text_node(d: &Derivation, indent: usize, out: &mut String) {
    let mut extra = Vec::new();
    if let Some(y) = d.params.y {
        extra.push(format!("Y={y}"));
    }
    if let Some(v) = &d.params.var {
        extra.push(format!("var={v}"));
    }
    if let Some(c) = &d.params.cut {
        extra.push(format!("cut={c}"));
    }
    if let Some(n) = &d.note {
        extra.push(format!("note={n}"));
    }
    let extra = if extra.is_empty() { String::new() } else { format!(" [{}]", extra.join(", ")) };
    let _ = writeln!(out, "{:indent$}{}  ({}){}", "", d.conclusion, d.rule, extra, indent = indent);
    for p in &d.premises {
        text_node(p, indent + 2, out);
    }
}

pub fn latex_formula(f: &Formula) -> String {
    fn prec(f: &Formula) -> u8 {
        match f {
            Formula::Forall(..) | Formula::IExists(..) => 0,
            Formula::Implies(_, b) if **b == Formula::Bot => 4,
            Formula::Implies(..) => 1,
            Formula::IDisj(..) => 2,
            Formula::And(..) => 3,
            _ => 5,
        }
    }
    fn go(f: &Formula, min: u8, out: &mut String) {
        let p = prec(f);
        let paren = p < min;
        if paren {
            out.push('(');
        }
        match f {
            Formula::Bot => out.push_str("\\bot"),
            Formula::Atom(name, args) => {
                out.push_str(name);
                if !args.is_empty() {
                    let args: Vec<&str> = args.iter().map(|a| a.as_ref()).collect();
                    let _ = write!(out, "({})", args.join(","));
                }
            }
            Formula::Implies(a, b) if **b == Formula::Bot => {
                out.push_str("\\neg ");
                go(a, 4, out);
            }
            Formula::And(a, b) => {
                go(a, 3, out);
                out.push_str(" \\wedge ");
                go(b, 4, out);
            }
            Formula::IDisj(a, b) => {
                go(a, 2, out);
                out.push_str(" \\rotatebox[origin=c]{-90}{$\\geqslant$} ");
                go(b, 3, out);
            }
            Formula::Implies(a, b) => {
                go(a, 2, out);
                out.push_str(" \\to ");
                go(b, 1, out);
            }
            Formula::Forall(x, a) => {
                let _ = write!(out, "\\forall {x}\\, ");
                go(a, 0, out);
            }
            Formula::IExists(x, a) => {
                let _ = write!(out, "\\vec\\exists {x}\\, ");
                go(a, 0, out);
            }
        }
        if paren {
            out.push(')');
        }
    }
    let mut out = String::new();
    go(f, 0, &mut out);
    out
}

fn latex_lf(lf: &LabelledFormula) -> String {
    let elems: Vec<String> = lf.label.iter().map(|k| k.to_string()).collect();
    format!("\\{{{}\\}}:{}", elems.join(","), latex_formula(&lf.formula))
}

pub fn latex_sequent(s: &Sequent) -> String {
    let side = |v: &Vec<LabelledFormula>| v.iter().map(latex_lf).collect::<Vec<_>>().join(", ");
    format!("{} \\Rightarrow {}", side(&s.ante), side(&s.succ))
}

/// Proof tree in the `\infer[(rule)]{conclusion}{premise & ...}` layout of
/// the `proof` package.
pub fn latex_tree(d: &Derivation) -> String {
    let prem: Vec<String> = d.premises.iter().map(latex_tree).collect();
    format!("\\infer[({})]{{{}}}{{{}}}", d.rule, latex_sequent(&d.conclusion), prem.join(" & "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{Label, Rule};
    use crate::syntax::parse;

    #[test]
    fn renders_leaf() {
        let lf = LabelledFormula::new(Label::range(2).unwrap(), parse("~P(x) -> q").unwrap());
        let d = Derivation::leaf(Sequent::new(vec![lf.clone()], vec![lf]), Rule::Id);
        assert!(text_tree(&d).contains("(id)"));
        let tex = latex_tree(&d);
        assert!(tex.starts_with("\\infer[(id)]{\\{1,2\\}:\\neg P(x) \\to q"));
    }
}
