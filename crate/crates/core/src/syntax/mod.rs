//! Formulas of the inquisitive first-order language, their concrete syntax,
//! substitution and subformula closure.

mod parse;
mod print;
pub mod random;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use parse::{parse, parse_with, ParseError, ParseOptions, Signature};

/// Interned identifier used for variables and predicate names.
pub type Var = Arc<str>;

pub fn var(name: &str) -> Var {
    Var::from(name)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Predicate {
    pub name: Var,
    pub arity: usize,
}

impl Predicate {
    pub fn new(name: &str, arity: usize) -> Self {
        Predicate { name: var(name), arity }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Bot,
    Atom(Var, Vec<Var>),
    And(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    IDisj(Arc<Formula>, Arc<Formula>),
    Forall(Var, Arc<Formula>),
    IExists(Var, Arc<Formula>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("scheme body must have exactly {expected} free variables, found {found}")]
    FreeVarCount { expected: usize, found: usize },
    #[error("declared parameter list {params:?} does not match free variables {free:?} of the body")]
    ParamMismatch { params: Vec<String>, free: Vec<String> },
    #[error("side condition violated: {0}")]
    SideCondition(String),
}

impl Formula {
    pub fn atom(pred: &str, args: &[&str]) -> Formula {
        Formula::Atom(var(pred), args.iter().map(|a| var(a)).collect())
    }

    pub fn prop(name: &str) -> Formula {
        Formula::Atom(var(name), Vec::new())
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }

    pub fn idisj(a: Formula, b: Formula) -> Formula {
        Formula::IDisj(Arc::new(a), Arc::new(b))
    }

    pub fn forall(x: &str, body: Formula) -> Formula {
        Formula::Forall(var(x), Arc::new(body))
    }

    pub fn iexists(x: &str, body: Formula) -> Formula {
        Formula::IExists(var(x), Arc::new(body))
    }

    pub fn forall_v(x: Var, body: Formula) -> Formula {
        Formula::Forall(x, Arc::new(body))
    }

    pub fn iexists_v(x: Var, body: Formula) -> Formula {
        Formula::IExists(x, Arc::new(body))
    }

    /// `¬φ`, i.e. `φ → ⊥`.
    pub fn not(a: Formula) -> Formula {
        Formula::implies(a, Formula::Bot)
    }

    /// `?φ`, i.e. `φ ⩔ ¬φ`.
    pub fn question(a: Formula) -> Formula {
        Formula::idisj(a.clone(), Formula::not(a))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(..))
    }

    /// Number of connectives and quantifiers.
    pub fn length(&self) -> usize {
        match self {
            Formula::Bot | Formula::Atom(..) => 0,
            Formula::And(a, b) | Formula::Implies(a, b) | Formula::IDisj(a, b) => {
                1 + a.length() + b.length()
            }
            Formula::Forall(_, a) | Formula::IExists(_, a) => 1 + a.length(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Bot | Formula::Atom(..) => 0,
            Formula::And(a, b) | Formula::Implies(a, b) | Formula::IDisj(a, b) => {
                1 + a.depth().max(b.depth())
            }
            Formula::Forall(_, a) | Formula::IExists(_, a) => 1 + a.depth(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Bot => {}
            Formula::Atom(_, args) => {
                for a in args {
                    if !bound.contains(a) {
                        out.insert(a.clone());
                    }
                }
            }
            Formula::And(a, b) | Formula::Implies(a, b) | Formula::IDisj(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(x, a) | Formula::IExists(x, a) => {
                bound.push(x.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn occurs_free(&self, x: &Var) -> bool {
        match self {
            Formula::Bot => false,
            Formula::Atom(_, args) => args.contains(x),
            Formula::And(a, b) | Formula::Implies(a, b) | Formula::IDisj(a, b) => {
                a.occurs_free(x) || b.occurs_free(x)
            }
            Formula::Forall(y, a) | Formula::IExists(y, a) => y != x && a.occurs_free(x),
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Bot => {}
            Formula::Atom(_, args) => out.extend(args.iter().cloned()),
            Formula::And(a, b) | Formula::Implies(a, b) | Formula::IDisj(a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            Formula::Forall(x, a) | Formula::IExists(x, a) => {
                out.insert(x.clone());
                a.all_vars(out);
            }
        }
    }

    pub fn predicates(&self, out: &mut BTreeSet<Predicate>) {
        match self {
            Formula::Bot => {}
            Formula::Atom(p, args) => {
                out.insert(Predicate { name: p.clone(), arity: args.len() });
            }
            Formula::And(a, b) | Formula::Implies(a, b) | Formula::IDisj(a, b) => {
                a.predicates(out);
                b.predicates(out);
            }
            Formula::Forall(_, a) | Formula::IExists(_, a) => a.predicates(out),
        }
    }

    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Bot => true,
            Formula::Atom(_, args) => args.is_empty(),
            Formula::And(a, b) | Formula::Implies(a, b) | Formula::IDisj(a, b) => {
                a.is_propositional() && b.is_propositional()
            }
            Formula::Forall(..) | Formula::IExists(..) => false,
        }
    }

    /// Alpha-normal form: bound variables renamed to `_b<level>`.
    /// Two formulas are alpha-equivalent iff their canonical forms are equal.
    pub fn canonical(&self) -> Formula {
        fn go(f: &Formula, env: &mut Vec<(Var, Var)>) -> Formula {
            match f {
                Formula::Bot => Formula::Bot,
                Formula::Atom(p, args) => Formula::Atom(
                    p.clone(),
                    args.iter()
                        .map(|a| {
                            env.iter()
                                .rev()
                                .find(|(from, _)| from == a)
                                .map(|(_, to)| to.clone())
                                .unwrap_or_else(|| a.clone())
                        })
                        .collect(),
                ),
                Formula::And(a, b) => Formula::and(go(a, env), go(b, env)),
                Formula::Implies(a, b) => Formula::implies(go(a, env), go(b, env)),
                Formula::IDisj(a, b) => Formula::idisj(go(a, env), go(b, env)),
                Formula::Forall(x, a) | Formula::IExists(x, a) => {
                    let name = var(&format!("_b{}", env.len()));
                    env.push((x.clone(), name.clone()));
                    let body = go(a, env);
                    env.pop();
                    if matches!(f, Formula::Forall(..)) {
                        Formula::Forall(name, Arc::new(body))
                    } else {
                        Formula::IExists(name, Arc::new(body))
                    }
                }
            }
        }
        go(self, &mut Vec::new())
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self == other || self.canonical() == other.canonical()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::print(self))
    }
}

pub use print::print;

/// Smallest `_vK` not contained in `avoid`.
pub fn fresh_var(avoid: &BTreeSet<Var>) -> Var {
    let mut k = 0usize;
    loop {
        let cand = format!("_v{k}");
        if !avoid.contains(cand.as_str()) {
            return var(&cand);
        }
        k += 1;
    }
}

/// Index K of a reserved `_vK` name.
pub fn reserved_index(v: &str) -> Option<usize> {
    v.strip_prefix("_v").and_then(|d| d.parse().ok())
}

/// Capture-avoiding substitution `f[z/x]`.
pub fn subst_var(f: &Formula, x: &Var, z: &Var) -> Formula {
    if x == z {
        return f.clone();
    }
    let mut map = BTreeMap::new();
    map.insert(x.clone(), z.clone());
    subst_simul(f, &map)
}

/// Simultaneous capture-avoiding renaming of free variables.
pub fn subst_simul(f: &Formula, map: &BTreeMap<Var, Var>) -> Formula {
    if map.is_empty() {
        return f.clone();
    }
    match f {
        Formula::Bot => Formula::Bot,
        Formula::Atom(p, args) => Formula::Atom(
            p.clone(),
            args.iter().map(|a| map.get(a).cloned().unwrap_or_else(|| a.clone())).collect(),
        ),
        Formula::And(a, b) => Formula::and(subst_simul(a, map), subst_simul(b, map)),
        Formula::Implies(a, b) => Formula::implies(subst_simul(a, map), subst_simul(b, map)),
        Formula::IDisj(a, b) => Formula::idisj(subst_simul(a, map), subst_simul(b, map)),
        Formula::Forall(y, body) | Formula::IExists(y, body) => {
            let mut inner: BTreeMap<Var, Var> = map
                .iter()
                .filter(|(k, _)| *k != y && body.occurs_free(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            let (binder, body) = if inner.values().any(|v| v == y) {
                let mut avoid = BTreeSet::new();
                body.all_vars(&mut avoid);
                avoid.extend(inner.keys().cloned());
                avoid.extend(inner.values().cloned());
                avoid.insert(y.clone());
                let w = fresh_var(&avoid);
                inner.insert(y.clone(), w.clone());
                (w, body.as_ref().clone())
            } else {
                (y.clone(), body.as_ref().clone())
            };
            let nb = subst_simul(&body, &inner);
            if matches!(f, Formula::Forall(..)) {
                Formula::Forall(binder, Arc::new(nb))
            } else {
                Formula::IExists(binder, Arc::new(nb))
            }
        }
    }
}

/// Substitute `body` (with free variables `params`, in order) for every
/// occurrence of predicate `p` in `f`. Each occurrence `P(a1..an)` becomes
/// `body[a1/params[0], .., an/params[n-1]]` with the binders of `body` renamed
/// so that no argument is captured.
pub fn scheme_subst(
    f: &Formula,
    p: &Predicate,
    body: &Formula,
    params: &[Var],
) -> Result<Formula, SyntaxError> {
    check_scheme_body(p, body, params)?;
    Ok(scheme_subst_unchecked(f, p, body, params))
}

pub(crate) fn check_scheme_body(
    p: &Predicate,
    body: &Formula,
    params: &[Var],
) -> Result<(), SyntaxError> {
    let free = body.free_vars();
    if free.len() != p.arity || params.len() != p.arity {
        return Err(SyntaxError::FreeVarCount {
            expected: p.arity,
            found: free.len().max(params.len()),
        });
    }
    let declared: BTreeSet<Var> = params.iter().cloned().collect();
    if declared != free {
        return Err(SyntaxError::ParamMismatch {
            params: params.iter().map(|v| v.to_string()).collect(),
            free: free.iter().map(|v| v.to_string()).collect(),
        });
    }
    Ok(())
}

pub(crate) fn scheme_subst_unchecked(
    f: &Formula,
    p: &Predicate,
    body: &Formula,
    params: &[Var],
) -> Formula {
    match f {
        Formula::Bot => Formula::Bot,
        Formula::Atom(q, args) => {
            if *q == p.name && args.len() == p.arity {
                let map: BTreeMap<Var, Var> =
                    params.iter().cloned().zip(args.iter().cloned()).collect();
                subst_simul(body, &map)
            } else {
                f.clone()
            }
        }
        Formula::And(a, b) => Formula::and(
            scheme_subst_unchecked(a, p, body, params),
            scheme_subst_unchecked(b, p, body, params),
        ),
        Formula::Implies(a, b) => Formula::implies(
            scheme_subst_unchecked(a, p, body, params),
            scheme_subst_unchecked(b, p, body, params),
        ),
        Formula::IDisj(a, b) => Formula::idisj(
            scheme_subst_unchecked(a, p, body, params),
            scheme_subst_unchecked(b, p, body, params),
        ),
        Formula::Forall(x, a) => {
            Formula::forall_v(x.clone(), scheme_subst_unchecked(a, p, body, params))
        }
        Formula::IExists(x, a) => {
            Formula::iexists_v(x.clone(), scheme_subst_unchecked(a, p, body, params))
        }
    }
}

/// Subformula closure with quantifier instances drawn from `vars`.
/// Results are in alpha-normal form.
pub fn subformulas(f: &Formula, vars: &[Var]) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    let mut todo = vec![f.clone()];
    while let Some(g) = todo.pop() {
        let key = g.canonical();
        if !out.insert(key) {
            continue;
        }
        match &g {
            Formula::Bot | Formula::Atom(..) => {}
            Formula::And(a, b) | Formula::Implies(a, b) | Formula::IDisj(a, b) => {
                todo.push(a.as_ref().clone());
                todo.push(b.as_ref().clone());
            }
            Formula::Forall(x, a) | Formula::IExists(x, a) => {
                for z in vars {
                    todo.push(subst_var(a, x, z));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn subst_simple() {
        let f = p("forall y. R(x,y)");
        assert_eq!(subst_var(&f, &var("x"), &var("z")), p("forall y. R(z,y)"));
    }

    #[test]
    fn subst_capture_renames_binder() {
        let f = p("forall z. R(x,z)");
        let g = subst_var(&f, &var("x"), &var("z"));
        match &g {
            Formula::Forall(b, body) => {
                assert_ne!(&**b, "z");
                assert_eq!(**body, Formula::Atom(var("R"), vec![var("z"), b.clone()]));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(g.free_vars(), [var("z")].into_iter().collect());
    }

    #[test]
    fn subst_identity() {
        let f = p("P(x)");
        assert_eq!(subst_var(&f, &var("x"), &var("x")), f);
    }

    #[test]
    fn subst_bound_untouched() {
        let f = p("forall x. P(x)");
        assert_eq!(subst_var(&f, &var("x"), &var("y")), f);
    }

    #[test]
    fn scheme_subst_double_negation() {
        let f = p("forall x. P(x)");
        let body = p("~~P(x)");
        let out = scheme_subst(&f, &Predicate::new("P", 1), &body, &[var("x")]).unwrap();
        assert_eq!(out, p("forall x. ~~P(x)"));
    }

    #[test]
    fn scheme_subst_renames_colliding_binder() {
        // body binds y, and the occurrence passes y as argument
        let f = p("forall y. P(y)");
        let body = p("iexists y. R(x,y)");
        let out = scheme_subst(&f, &Predicate::new("P", 1), &body, &[var("x")]).unwrap();
        assert!(out.free_vars().is_empty());
        match &out {
            Formula::Forall(y, inner) => match inner.as_ref() {
                Formula::IExists(b, atom) => {
                    assert_ne!(b, y);
                    assert_eq!(**atom, Formula::Atom(var("R"), vec![y.clone(), b.clone()]));
                }
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scheme_subst_counts_free_vars() {
        let err = scheme_subst(&p("P(x)"), &Predicate::new("P", 1), &p("R(x,y)"), &[var("x")]);
        assert!(matches!(err, Err(SyntaxError::FreeVarCount { .. })));
    }

    #[test]
    fn scheme_subst_identity_body() {
        let f = p("forall x. (P(x) -> forall x. P(x)) -> P(y)");
        let out = scheme_subst(&f, &Predicate::new("P", 1), &p("P(x)"), &[var("x")]).unwrap();
        assert_eq!(out, f);
    }

    #[test]
    fn subformulas_examples() {
        let s = subformulas(&p("p & q"), &[]);
        assert_eq!(s.len(), 3);
        let s = subformulas(&p("forall x. P(x)"), &[var("y"), var("z")]);
        let expect: BTreeSet<Formula> =
            [p("forall x. P(x)").canonical(), p("P(y)"), p("P(z)")].into_iter().collect();
        assert_eq!(s, expect);
        assert_eq!(subformulas(&Formula::Bot, &[]).len(), 1);
    }

    #[test]
    fn canonical_identifies_alpha_variants() {
        assert!(p("forall x. P(x)").alpha_eq(&p("forall y. P(y)")));
        assert!(!p("forall x. R(x,y)").alpha_eq(&p("forall y. R(y,y)")));
    }
}
