//! Formula schemes, hand-built derivations of their instances and the
//! finite-window checkers for the infinite Casari countermodels.

mod appendix;
mod casari;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::calculus::{
    is_initial, premises_of, CalcError, Derivation, Label, LabelledFormula, Rule, RuleApp, Sequent, Side,
};
use crate::syntax::{fresh_var, subst_var, var, Formula, SyntaxError, Var};
use crate::transform::{mon_formula, persistency_derivation, weaken_all, TransformError};

pub use appendix::{
    appendix_derivation, cd_derivation, double_negation_derivation, ek_derivation, ekp_derivation, ekp_with_cut,
    kp_derivation, kuroda_derivation, kuroda_lemma, neg_rules_derivation, neg_union, AppendixName,
};
pub use casari::{
    casari_claim1, casari_claim2_finite, casari_sweep, claim2_bound, ClaimVerdict, CasariModelSpec, CasariVariant,
    SweepReport,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error("side condition violated: {0}")]
    SideCondition(String),
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

pub type Result<T> = std::result::Result<T, SchemeError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeName {
    Cd,
    Kuroda,
    CasariAtomic,
    CasariDnAtomic,
    CasariScheme,
}

impl SchemeName {
    pub const ALL: [SchemeName; 5] =
        [SchemeName::Cd, SchemeName::Kuroda, SchemeName::CasariAtomic, SchemeName::CasariDnAtomic, SchemeName::CasariScheme];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeName::Cd => "CD",
            SchemeName::Kuroda => "Kuroda",
            SchemeName::CasariAtomic => "CasariAtomic",
            SchemeName::CasariDnAtomic => "CasariDNAtomic",
            SchemeName::CasariScheme => "CasariScheme",
        }
    }
}

impl fmt::Display for SchemeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeName {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self> {
        SchemeName::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| SchemeError::UnknownScheme(s.to_string()))
    }
}

/// Instantiation parameters shared by the schemes and the derivation
/// builders. `phi` is the body in `var`; `psi` and `theta` are side formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeParams {
    pub phi: Formula,
    pub psi: Formula,
    pub theta: Formula,
    pub var: Var,
}

impl Default for SchemeParams {
    fn default() -> Self {
        SchemeParams {
            phi: Formula::atom("P", &["x"]),
            psi: Formula::prop("q"),
            theta: Formula::prop("r"),
            var: var("x"),
        }
    }
}

fn forall(v: &Var, f: Formula) -> Formula {
    Formula::forall_v(v.clone(), f)
}

/// `∀x((φ(x) → ∀xφ(x)) → ∀xφ(x))`, the antecedent of the Casari scheme.
pub fn casari_antecedent(phi: &Formula, v: &Var) -> Formula {
    let all = forall(v, phi.clone());
    forall(v, Formula::implies(Formula::implies(phi.clone(), all.clone()), all))
}

pub fn casari(phi: &Formula, v: &Var) -> Formula {
    Formula::implies(casari_antecedent(phi, v), forall(v, phi.clone()))
}

pub fn kuroda(phi: &Formula, v: &Var) -> Formula {
    Formula::implies(
        forall(v, Formula::not(Formula::not(phi.clone()))),
        Formula::not(Formula::not(forall(v, phi.clone()))),
    )
}

/// `∀x(φ ⩔ ψ) → (∀xφ) ⩔ ψ`; `x` must not occur free in `ψ`.
pub fn cd(phi: &Formula, psi: &Formula, v: &Var) -> Result<Formula> {
    if psi.occurs_free(v) {
        return Err(SchemeError::SideCondition(format!("{v} occurs free in {psi}")));
    }
    Ok(Formula::implies(
        forall(v, Formula::idisj(phi.clone(), psi.clone())),
        Formula::idisj(forall(v, phi.clone()), psi.clone()),
    ))
}

pub fn scheme(name: SchemeName, params: &SchemeParams) -> Result<Formula> {
    let x = var("x");
    let p = Formula::atom("P", &["x"]);
    Ok(match name {
        SchemeName::Cd => cd(&params.phi, &params.psi, &params.var)?,
        SchemeName::Kuroda => kuroda(&params.phi, &params.var),
        SchemeName::CasariAtomic => casari(&p, &x),
        SchemeName::CasariDnAtomic => casari(&Formula::not(Formula::not(p)), &x),
        SchemeName::CasariScheme => casari(&params.phi, &params.var),
    })
}

/// Expands a `<Name>` placeholder into the scheme with default parameters.
pub fn expand_placeholder(text: &str) -> Option<Result<Formula>> {
    let inner = text.trim().strip_prefix('<')?.strip_suffix('>')?;
    Some(inner.parse::<SchemeName>().and_then(|n| scheme(n, &SchemeParams::default())))
}

// ---- construction helpers shared by the builders ----

/// Applies `app` to `concl`, building each premise with `build(index, premise)`.
pub(crate) fn by(
    concl: Sequent,
    app: RuleApp,
    mut build: impl FnMut(usize, Sequent) -> Result<Derivation>,
) -> Result<Derivation> {
    let prems = premises_of(&concl, &app)?;
    let kids = prems.into_iter().enumerate().map(|(i, p)| build(i, p)).collect::<Result<Vec<_>>>()?;
    Ok(Derivation::infer(concl, app, kids)?)
}

pub(crate) fn leaf(seq: Sequent) -> Result<Derivation> {
    let rule = is_initial(&seq)
        .ok_or_else(|| SchemeError::Transform(TransformError::Internal(format!("{seq} is not initial"))))?;
    Ok(Derivation::leaf(seq, rule))
}

/// Multiset difference `big − small`, or `None` when `small ⊄ big`.
fn sequent_minus(big: &Sequent, small: &Sequent) -> Option<Sequent> {
    let mut rest = big.clone();
    for lf in &small.ante {
        if !rest.remove_one(Side::Left, lf) {
            return None;
        }
    }
    for lf in &small.succ {
        if !rest.remove_one(Side::Right, lf) {
            return None;
        }
    }
    Some(rest)
}

/// Weakens `d` so that it concludes `goal`.
pub(crate) fn fit(d: &Derivation, goal: &Sequent) -> Result<Derivation> {
    let extra = sequent_minus(goal, &d.conclusion).ok_or_else(|| {
        SchemeError::Transform(TransformError::Shape(format!("{} does not weaken to {goal}", d.conclusion)))
    })?;
    Ok(weaken_all(d, &extra))
}

/// Closes `goal ∋ left ⇒ right` with a persistency derivation.
pub(crate) fn persist_in(goal: &Sequent, left: &LabelledFormula, right: &LabelledFormula) -> Result<Derivation> {
    let mut ctx = goal.clone();
    if left.formula != right.formula || !ctx.remove_one(Side::Left, left) || !ctx.remove_one(Side::Right, right) {
        return Err(SchemeError::Transform(TransformError::Shape(format!("{goal} is not {left} ⇒ {right} in context"))));
    }
    Ok(persistency_derivation(left.label, right.label, &left.formula, &ctx)?)
}

pub(crate) fn lf(x: Label, f: &Formula) -> LabelledFormula {
    LabelledFormula::new(x, f.clone())
}

fn fresh_in(seq: &Sequent) -> Var {
    fresh_var(&seq.all_vars())
}

/// Derivation of `X:∀x((φ(x)→∀xφ(x))→∀xφ(x)) ⇒ X:∀xφ(x)` by induction on
/// `#X`. Every proper subset `Y` is handled by the hypothesis for `Y`
/// lifted with Mon and weakening; the case `Y = X` closes by persistency.
pub fn casari_derivation(x: Label, body: &Formula, v: &Var) -> Result<Derivation> {
    let mut memo = BTreeMap::new();
    casari_rec(x, body, v, &mut memo)
}

fn casari_rec(x: Label, body: &Formula, v: &Var, memo: &mut BTreeMap<Label, Derivation>) -> Result<Derivation> {
    if let Some(d) = memo.get(&x) {
        return Ok(d.clone());
    }
    let all = forall(v, body.clone());
    let c = casari_antecedent(body, v);
    let goal = Sequent::new(vec![lf(x, &c)], vec![lf(x, &all)]);
    let z = fresh_in(&goal);
    let bz = subst_var(body, v, &z);
    let bz_imp = Formula::implies(bz.clone(), all.clone());
    let dz = Formula::implies(bz_imp.clone(), all.clone());
    let subsets = x.nonempty_subsets();
    let d = by(goal, RuleApp::new(Rule::ForallR, lf(x, &all)).with_var(z.clone()), |_, p1| {
        by(p1, RuleApp::new(Rule::ForallL, lf(x, &c)).with_var(z.clone()), |_, p2| {
            by(p2, RuleApp::new(Rule::ImpL, lf(x, &dz)).with_y(x), |i, p3| {
                if i == 0 {
                    by(p3, RuleApp::new(Rule::ImpR, lf(x, &bz_imp)), |j, p4| {
                        let y = subsets[j];
                        if y == x {
                            persist_in(&p4, &lf(y, &bz), &lf(x, &bz))
                        } else {
                            let ih = casari_rec(y, body, v, memo)?;
                            let lifted = mon_formula(&ih, &lf(y, &c), x)?;
                            fit(&lifted, &p4)
                        }
                    })
                } else {
                    by(p3, RuleApp::new(Rule::ForallL, lf(x, &all)).with_var(z.clone()), |_, p5| {
                        persist_in(&p5, &lf(x, &bz), &lf(x, &bz))
                    })
                }
            })
        })
    })?;
    memo.insert(x, d.clone());
    Ok(d)
}

/// `⇒ X:CasariScheme` from the sequent form at every `Y ⊆ X`.
pub fn casari_scheme_derivation(x: Label, body: &Formula, v: &Var) -> Result<Derivation> {
    let goal = Sequent::goal(x, casari(body, v));
    let subsets = x.nonempty_subsets();
    let mut memo = BTreeMap::new();
    by(goal.clone(), RuleApp::new(Rule::ImpR, goal.succ[0].clone()), |j, _| casari_rec(subsets[j], body, v, &mut memo))
}
