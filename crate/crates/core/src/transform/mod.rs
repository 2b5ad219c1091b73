//! Admissible-rule transformers on derivation trees: substitution,
//! weakening, contraction, inversion, persistency, Mon, the negation rules,
//! scheme substitution and cut elimination.

mod cut;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::calculus::{
    is_initial, premises_of, resolved_app, CalcError, Derivation, Label, LabelledFormula, Rule, RuleApp, Sequent,
    Side,
};
use crate::syntax::{
    check_scheme_body, fresh_var, scheme_subst_unchecked, subst_var, Formula, Predicate, SyntaxError, Var,
};

pub use cut::{cut, eliminate_cut};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{0} does not occur twice on the {1:?} side")]
    NotDuplicated(String, Side),
    #[error("{0} does not occur on the {1:?} side")]
    Absent(String, Side),
    #[error("label {0} is not a superset of {1}")]
    Subset(Label, Label),
    #[error("the derivation applies (atR)")]
    UsesAtR,
    #[error("premise shape mismatch: {0}")]
    Shape(String),
    #[error("cannot determine the principal formula of a {0} node")]
    Unresolved(Rule),
    #[error("unexpected derivation shape: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, TransformError>;

pub(crate) fn app_of(d: &Derivation) -> Result<RuleApp> {
    resolved_app(d).ok_or(TransformError::Unresolved(d.rule))
}

pub(crate) fn principal(app: &RuleApp) -> Result<&LabelledFormula> {
    app.params.principal.as_ref().ok_or(TransformError::Unresolved(app.rule))
}

pub(crate) fn leaf_for(seq: Sequent) -> Result<Derivation> {
    match is_initial(&seq) {
        Some(rule) => Ok(Derivation::leaf(seq, rule)),
        None => Err(TransformError::Internal(format!("{seq} is not initial"))),
    }
}

pub(crate) fn fresh_for(d: &Derivation, extra: &[&Var]) -> Var {
    let mut avoid = d.all_vars();
    avoid.extend(extra.iter().map(|v| (*v).clone()));
    fresh_var(&avoid)
}

/// Premises of `d` listed in the order `premises_of` computes them.
pub(crate) fn aligned<'a>(d: &'a Derivation, app: &RuleApp) -> Result<Vec<&'a Derivation>> {
    let expected = premises_of(&d.conclusion, app)?;
    let mut used = vec![false; d.premises.len()];
    let mut out = Vec::with_capacity(expected.len());
    for e in &expected {
        let i = (0..d.premises.len())
            .find(|&i| !used[i] && d.premises[i].conclusion.multiset_eq(e))
            .ok_or_else(|| TransformError::Internal(format!("no stored premise for {e}")))?;
        used[i] = true;
        out.push(&d.premises[i]);
    }
    Ok(out)
}

type Key = (Side, (Label, Formula));

fn counts(s: &Sequent) -> BTreeMap<Key, Vec<LabelledFormula>> {
    let mut m: BTreeMap<Key, Vec<LabelledFormula>> = BTreeMap::new();
    for (side, v) in [(Side::Left, &s.ante), (Side::Right, &s.succ)] {
        for lf in v {
            m.entry((side, (lf.label, lf.formula.canonical()))).or_default().push(lf.clone());
        }
    }
    m
}

/// Multiset difference `a − b` up to alpha-equivalence.
pub(crate) fn difference(a: &Sequent, b: &Sequent) -> Vec<(Side, LabelledFormula)> {
    let cb = counts(b);
    let mut out = Vec::new();
    for (key, lfs) in counts(a) {
        let have = cb.get(&key).map_or(0, |v| v.len());
        out.extend(lfs.into_iter().skip(have).map(|lf| (key.0, lf)));
    }
    out
}

/// Capture-free renaming of the free variable `x` to `z` in a whole
/// derivation. Eigenvariables equal to `z` are renamed first.
pub fn subst_derivation(d: &Derivation, x: &Var, z: &Var) -> Derivation {
    if x == z || !d.conclusion.free_vars().contains(x) {
        return d.clone();
    }
    let mut app = d.app();
    let mut renamed = None;
    if d.rule.has_eigenvariable() {
        if let Some(e) = &d.params.var {
            if e == z {
                let e2 = fresh_for(d, &[x, z]);
                renamed = Some(vec![subst_derivation(&d.premises[0], e, &e2)]);
                app.params.var = Some(e2);
            }
        }
    } else if d.rule.has_instance() && app.params.var.as_ref() == Some(x) {
        app.params.var = Some(z.clone());
    }
    app.params.principal = app.params.principal.map(|p| p.subst(x, z));
    app.params.cut = app.params.cut.map(|c| c.subst(x, z));
    let src = renamed.as_ref().unwrap_or(&d.premises);
    let premises = src.iter().map(|p| subst_derivation(p, x, z)).collect();
    let mut out = Derivation::node(d.conclusion.subst(x, z), app, premises);
    out.note = d.note.clone();
    out
}

/// Height-preserving weakening by one formula.
pub fn weaken(d: &Derivation, side: Side, lf: &LabelledFormula) -> Derivation {
    let extra = Sequent::default().with(side, lf.clone());
    weaken_all(d, &extra)
}

/// Adds the whole of `extra` to the conclusion.
pub fn weaken_all(d: &Derivation, extra: &Sequent) -> Derivation {
    if extra.ante.is_empty() && extra.succ.is_empty() {
        return d.clone();
    }
    let fv = extra.free_vars();
    weaken_rec(d, extra, &fv)
}

fn weaken_rec(d: &Derivation, extra: &Sequent, fv: &std::collections::BTreeSet<Var>) -> Derivation {
    let mut app = d.app();
    let mut renamed = None;
    if d.rule.has_eigenvariable() {
        if let Some(e) = &d.params.var {
            if fv.contains(e) {
                let fv_refs: Vec<&Var> = fv.iter().collect();
                let e2 = fresh_for(d, &fv_refs);
                renamed = Some(vec![subst_derivation(&d.premises[0], e, &e2)]);
                app.params.var = Some(e2);
            }
        }
    }
    let src = renamed.as_ref().unwrap_or(&d.premises);
    let premises: Vec<Derivation> = if d.rule == Rule::Cut {
        vec![weaken_rec(&src[0], extra, fv), src[1].clone()]
    } else {
        src.iter().map(|p| weaken_rec(p, extra, fv)).collect()
    };
    let conclusion = d.conclusion.merge(extra);
    let mut out = if d.rule.is_leaf() {
        Derivation::leaf(conclusion, d.rule)
    } else {
        Derivation::node(conclusion, app, premises)
    };
    out.note = d.note.clone();
    out
}

/// Height-preserving contraction of one duplicated formula.
pub fn contract(d: &Derivation, side: Side, lf: &LabelledFormula) -> Result<Derivation> {
    if d.conclusion.count(side, lf) < 2 {
        return Err(TransformError::NotDuplicated(lf.to_string(), side));
    }
    contract_rec(d, side, lf)
}

/// Contracts `d` down to `goal`, which must have the same formulas with
/// multiplicity at most that in the conclusion of `d`.
pub fn contract_to(d: &Derivation, goal: &Sequent) -> Result<Derivation> {
    let missing = difference(goal, &d.conclusion);
    if let Some((side, lf)) = missing.first() {
        return Err(TransformError::Absent(lf.to_string(), *side));
    }
    let mut out = d.clone();
    for (side, lf) in difference(&d.conclusion, goal) {
        out = contract(&out, side, &lf)?;
    }
    Ok(out)
}

fn contract_rec(d: &Derivation, side: Side, lf: &LabelledFormula) -> Result<Derivation> {
    let mut concl = d.conclusion.clone();
    if !concl.remove_one(side, lf) {
        return Err(TransformError::Absent(lf.to_string(), side));
    }
    if d.rule.is_leaf() {
        return leaf_for(concl);
    }
    if d.rule == Rule::Cut {
        return Err(TransformError::Internal("contraction through a cut".into()));
    }
    let app = app_of(d)?;
    let p = principal(&app)?.clone();
    let is_principal = d.rule.principal_side() == Some(side) && p.alpha_eq(lf);
    if !is_principal || matches!(d.rule, Rule::ImpL | Rule::ForallL | Rule::IExistsR) {
        let premises =
            d.premises.iter().map(|q| contract_rec(q, side, lf)).collect::<Result<Vec<_>>>()?;
        return Ok(Derivation::node(concl, app, premises));
    }
    let mut rest = d.conclusion.clone();
    rest.remove_one(side, &p);
    if d.rule.has_eigenvariable() {
        let e = app.params.var.clone().ok_or(CalcError::MissingParam(d.rule, "var"))?;
        let q = &d.premises[0];
        let e2 = fresh_for(q, &[&e]);
        let inv = invert(q, &RuleApp::new(d.rule, p.clone()).with_var(e2.clone()), 0)?;
        let back = subst_derivation(&inv, &e2, &e);
        let inst = difference(&q.conclusion, &rest);
        let mut out = back;
        for (s, c) in &inst {
            out = contract_rec(&out, *s, c)?;
        }
        return Ok(Derivation::node(concl, app, vec![out]));
    }
    let expected = premises_of(&d.conclusion, &app)?;
    let ordered = aligned(d, &app)?;
    let mut premises = Vec::with_capacity(ordered.len());
    for (j, q) in ordered.into_iter().enumerate() {
        let mut inv = invert(q, &RuleApp::new(d.rule, p.clone()), j)?;
        for (s, c) in difference(&expected[j], &rest) {
            inv = contract_rec(&inv, s, &c)?;
        }
        premises.push(inv);
    }
    Ok(Derivation::node(concl, app, premises))
}

/// Height-preserving inversion: a derivation of premise `idx` of `app`
/// applied to the conclusion of `d`.
pub fn invert(d: &Derivation, app: &RuleApp, idx: usize) -> Result<Derivation> {
    if app.rule.is_leaf() || app.rule == Rule::Cut {
        return Err(CalcError::NotAnInference(app.rule).into());
    }
    let app = with_principal(&d.conclusion, app)?;
    let targets = premises_of(&d.conclusion, &app)?;
    let target = targets
        .get(idx)
        .cloned()
        .ok_or_else(|| TransformError::Shape(format!("{} has {} premises, not {}", app.rule, targets.len(), idx + 1)))?;
    if matches!(app.rule, Rule::ImpL | Rule::ForallL | Rule::IExistsR) {
        let mut extra = Sequent::default();
        for (side, lf) in difference(&target, &d.conclusion) {
            extra.side_mut(side).push(lf);
        }
        return Ok(weaken_all(d, &extra));
    }
    invert_rec(d, &app, idx, target)
}

/// `app` with its principal formula filled in.
fn with_principal(seq: &Sequent, app: &RuleApp) -> Result<RuleApp> {
    if app.params.principal.is_some() {
        return Ok(app.clone());
    }
    let side = app.rule.principal_side().ok_or(CalcError::NotAnInference(app.rule))?;
    let fits: Vec<&LabelledFormula> = seq
        .side(side)
        .iter()
        .filter(|lf| {
            let mut a = app.clone();
            a.params.principal = Some((*lf).clone());
            premises_of(seq, &a).is_ok()
        })
        .collect();
    match fits.as_slice() {
        [one] => {
            let mut a = app.clone();
            a.params.principal = Some((*one).clone());
            Ok(a)
        }
        _ => Err(TransformError::Unresolved(app.rule)),
    }
}

fn invert_rec(d: &Derivation, app: &RuleApp, idx: usize, target: Sequent) -> Result<Derivation> {
    if d.rule.is_leaf() {
        return leaf_for(target);
    }
    if d.rule == Rule::Cut {
        return Err(TransformError::Internal("inversion through a cut".into()));
    }
    let p = principal(app)?;
    let mut dapp = app_of(d)?;
    if dapp.rule == app.rule && principal(&dapp)?.alpha_eq(p) {
        if app.rule.has_eigenvariable() {
            let e = dapp.params.var.as_ref().ok_or(CalcError::MissingParam(d.rule, "var"))?;
            let z = app.params.var.as_ref().ok_or(CalcError::MissingParam(app.rule, "var"))?;
            return Ok(subst_derivation(&d.premises[0], e, z));
        }
        return d
            .premises
            .iter()
            .find(|q| q.conclusion.multiset_eq(&target))
            .cloned()
            .ok_or_else(|| TransformError::Internal(format!("no premise of {} concludes {target}", d.rule)));
    }
    let mut renamed = None;
    if app.rule.has_eigenvariable() {
        let z = app.params.var.as_ref().ok_or(CalcError::MissingParam(app.rule, "var"))?;
        if dapp.params.var.as_ref() == Some(z) {
            let e2 = fresh_for(d, &[z]);
            renamed = Some(vec![subst_derivation(&d.premises[0], z, &e2)]);
            dapp.params.var = Some(e2);
        }
    }
    let src = renamed.as_ref().unwrap_or(&d.premises);
    let mut premises = Vec::with_capacity(src.len());
    for q in src {
        let t = premises_of(&q.conclusion, app)?.swap_remove(idx);
        premises.push(invert_rec(q, app, idx, t)?);
    }
    let mut out = Derivation::node(target, dapp, premises);
    out.note = d.note.clone();
    Ok(out)
}

/// Derivation of `X:φ, Γ ⇒ Δ, Y:φ` for `X ⊇ Y`, built by induction on `φ`
/// without (atR).
pub fn persistency_derivation(x: Label, y: Label, f: &Formula, ctx: &Sequent) -> Result<Derivation> {
    if !x.is_superset_of(y) {
        return Err(TransformError::Subset(x, y));
    }
    persist(x, y, f, ctx)
}

fn persist(x: Label, y: Label, f: &Formula, ctx: &Sequent) -> Result<Derivation> {
    let lx = |g: &Formula| LabelledFormula::new(x, g.clone());
    let ly = |g: &Formula| LabelledFormula::new(y, g.clone());
    let goal = ctx.clone().with(Side::Left, lx(f)).with(Side::Right, ly(f));
    Ok(match f {
        Formula::Bot | Formula::Atom(..) => leaf_for(goal)?,
        Formula::And(a, b) => {
            let mut kids = Vec::new();
            for (c, other) in [(a, b), (b, a)] {
                let inner = persist(x, y, c, &ctx.clone().with(Side::Left, lx(other)))?;
                let concl = ctx.clone().with(Side::Left, lx(f)).with(Side::Right, ly(c));
                kids.push(Derivation::infer(concl, RuleApp::new(Rule::AndL, lx(f)), vec![inner])?);
            }
            Derivation::infer(goal, RuleApp::new(Rule::AndR, ly(f)), kids)?
        }
        Formula::IDisj(a, b) => {
            let mut kids = Vec::new();
            for c in [a, b] {
                let mut inner_ctx = ctx.clone();
                inner_ctx.succ.push(ly(a));
                inner_ctx.succ.push(ly(b));
                inner_ctx.remove_one(Side::Right, &ly(c));
                let inner = persist(x, y, c, &inner_ctx)?;
                let concl = ctx.clone().with(Side::Left, lx(c)).with(Side::Right, ly(f));
                kids.push(Derivation::infer(concl, RuleApp::new(Rule::IDisjR, ly(f)), vec![inner])?);
            }
            Derivation::infer(goal, RuleApp::new(Rule::IDisjL, lx(f)), kids)?
        }
        Formula::Implies(a, b) => {
            let mut kids = Vec::new();
            for yy in y.nonempty_subsets() {
                let ya = LabelledFormula::new(yy, a.as_ref().clone());
                let yb = LabelledFormula::new(yy, b.as_ref().clone());
                let concl = ctx.clone().with(Side::Left, lx(f)).with(Side::Left, ya.clone()).with(Side::Right, yb.clone());
                let left = persist(yy, yy, a, &ctx.clone().with(Side::Left, lx(f)).with(Side::Right, yb.clone()))?;
                let right = persist(yy, yy, b, &ctx.clone().with(Side::Left, lx(f)).with(Side::Left, ya.clone()))?;
                kids.push(Derivation::infer(concl, RuleApp::new(Rule::ImpL, lx(f)).with_y(yy), vec![left, right])?);
            }
            Derivation::infer(goal, RuleApp::new(Rule::ImpR, ly(f)), kids)?
        }
        Formula::Forall(v, body) => {
            let z = fresh_var(&goal.all_vars());
            let inst = subst_var(body, v, &z);
            let inner = persist(x, y, &inst, &ctx.clone().with(Side::Left, lx(f)))?;
            let concl = ctx.clone().with(Side::Left, lx(f)).with(Side::Right, ly(&inst));
            let mid = Derivation::infer(concl, RuleApp::new(Rule::ForallL, lx(f)).with_var(z.clone()), vec![inner])?;
            Derivation::infer(goal, RuleApp::new(Rule::ForallR, ly(f)).with_var(z), vec![mid])?
        }
        Formula::IExists(v, body) => {
            let z = fresh_var(&goal.all_vars());
            let inst = subst_var(body, v, &z);
            let inner = persist(x, y, &inst, &ctx.clone().with(Side::Right, ly(f)))?;
            let concl = ctx.clone().with(Side::Left, lx(&inst)).with(Side::Right, ly(f));
            let mid = Derivation::infer(concl, RuleApp::new(Rule::IExistsR, ly(f)).with_var(z.clone()), vec![inner])?;
            Derivation::infer(goal, RuleApp::new(Rule::IExistsL, lx(f)).with_var(z), vec![mid])?
        }
    })
}

/// Mon: replaces the antecedent formula `Y:φ` at `pos` by `X:φ` for `X ⊇ Y`,
/// through a cut against a persistency derivation followed by cut elimination.
pub fn mon(d: &Derivation, pos: usize, x: Label) -> Result<Derivation> {
    let lf = d
        .conclusion
        .ante
        .get(pos)
        .cloned()
        .ok_or_else(|| TransformError::Shape(format!("no antecedent formula at position {pos}")))?;
    if !x.is_superset_of(lf.label) {
        return Err(TransformError::Subset(x, lf.label));
    }
    if x == lf.label {
        return Ok(d.clone());
    }
    let pers = persistency_derivation(x, lf.label, &lf.formula, &Sequent::default())?;
    let c = cut(&pers, d, &lf)?;
    Ok(eliminate_cut(&c)?.with_note("mon"))
}

/// Mon applied to the first antecedent occurrence of `lf`.
pub fn mon_formula(d: &Derivation, lf: &LabelledFormula, x: Label) -> Result<Derivation> {
    let pos = d
        .conclusion
        .ante
        .iter()
        .position(|a| a.alpha_eq(lf))
        .ok_or_else(|| TransformError::Absent(lf.to_string(), Side::Left))?;
    mon(d, pos, x)
}

/// From derivations of `{k}:φ, Γ ⇒ Δ` for each `k ∈ X` (in increasing `k`),
/// a derivation of `Γ ⇒ Δ, X:¬φ`.
pub fn neg_right(phi: &Formula, x: Label, premises: &[Derivation]) -> Result<Derivation> {
    let ks: Vec<u32> = x.iter().collect();
    if premises.len() != ks.len() {
        return Err(TransformError::Shape(format!("expected {} premises, found {}", ks.len(), premises.len())));
    }
    let mut ctx: Option<Sequent> = None;
    for (&k, d) in ks.iter().zip(premises) {
        let mut c = d.conclusion.clone();
        let lf = LabelledFormula::new(Label::singleton(k)?, phi.clone());
        if !c.remove_one(Side::Left, &lf) {
            return Err(TransformError::Shape(format!("premise for {k} lacks {lf} on the left")));
        }
        match &ctx {
            Some(prev) if !prev.multiset_eq(&c) => {
                return Err(TransformError::Shape("premises have different contexts".into()))
            }
            Some(_) => {}
            None => ctx = Some(c),
        }
    }
    let ctx = ctx.ok_or_else(|| TransformError::Shape("no premises".into()))?;
    let neg = LabelledFormula::new(x, Formula::not(phi.clone()));
    let goal = ctx.clone().with(Side::Right, neg.clone());
    let mut kids = Vec::new();
    for y in x.nonempty_subsets() {
        let k = y.min();
        let i = ks.iter().position(|&j| j == k).expect("k ∈ X");
        let single = LabelledFormula::new(Label::singleton(k)?, phi.clone());
        let lifted = mon_formula(&premises[i], &single, y)?;
        kids.push(weaken(&lifted, Side::Right, &LabelledFormula::new(y, Formula::Bot)));
    }
    Ok(Derivation::infer(goal, RuleApp::new(Rule::ImpR, neg), kids)?)
}

/// From a derivation of `Γ ⇒ Δ, Y:φ` with `Y ⊆ X`, a derivation of
/// `X:¬φ, Γ ⇒ Δ`.
pub fn neg_left(phi: &Formula, x: Label, y: Label, premise: &Derivation) -> Result<Derivation> {
    if !x.is_superset_of(y) {
        return Err(TransformError::Subset(x, y));
    }
    let yphi = LabelledFormula::new(y, phi.clone());
    let mut ctx = premise.conclusion.clone();
    if !ctx.remove_one(Side::Right, &yphi) {
        return Err(TransformError::Shape(format!("premise lacks {yphi} on the right")));
    }
    let neg = LabelledFormula::new(x, Formula::not(phi.clone()));
    let goal = ctx.clone().with(Side::Left, neg.clone());
    let left = weaken(premise, Side::Left, &neg);
    let right = Derivation::leaf(goal.clone().with(Side::Left, LabelledFormula::new(y, Formula::Bot)), Rule::BotL);
    Ok(Derivation::infer(goal, RuleApp::new(Rule::ImpL, neg).with_y(y), vec![left, right])?)
}

/// Translates an (atR)-free derivation by substituting `body` for the
/// predicate `pred`. Axioms on `pred` become persistency derivations.
pub fn scheme_subst_derivation(d: &Derivation, pred: &Predicate, body: &Formula, params: &[Var]) -> Result<Derivation> {
    check_scheme_body(pred, body, params)?;
    if d.uses_rule(Rule::AtR) {
        return Err(TransformError::UsesAtR);
    }
    let tr = |lf: &LabelledFormula| LabelledFormula::new(lf.label, scheme_subst_unchecked(&lf.formula, pred, body, params));
    scheme_rec(d, pred, &tr)
}

fn scheme_rec(d: &Derivation, pred: &Predicate, tr: &dyn Fn(&LabelledFormula) -> LabelledFormula) -> Result<Derivation> {
    let tseq = |s: &Sequent| Sequent::new(s.ante.iter().map(tr).collect(), s.succ.iter().map(tr).collect());
    let concl = tseq(&d.conclusion);
    match d.rule {
        Rule::BotL => Ok(Derivation::leaf(concl, Rule::BotL)),
        Rule::Id => {
            if is_initial(&concl).is_some() {
                return leaf_for(concl);
            }
            let is_pred = |f: &Formula| matches!(f, Formula::Atom(q, args) if *q == pred.name && args.len() == pred.arity);
            for a in d.conclusion.ante.iter().filter(|lf| is_pred(&lf.formula)) {
                for s in d.conclusion.succ.iter().filter(|lf| lf.formula == a.formula) {
                    if a.label.is_superset_of(s.label) {
                        let (ta, ts) = (tr(a), tr(s));
                        let mut ctx = concl.clone();
                        ctx.remove_one(Side::Left, &ta);
                        ctx.remove_one(Side::Right, &ts);
                        return persistency_derivation(a.label, s.label, &ta.formula, &ctx);
                    }
                }
            }
            Err(TransformError::Internal(format!("{} is not an axiom", d.conclusion)))
        }
        _ => {
            let mut app = d.app();
            app.params.principal = app.params.principal.as_ref().map(tr);
            app.params.cut = app.params.cut.as_ref().map(tr);
            let premises = d.premises.iter().map(|p| scheme_rec(p, pred, tr)).collect::<Result<Vec<_>>>()?;
            let mut out = Derivation::node(concl, app, premises);
            out.note = d.note.clone();
            Ok(out)
        }
    }
}
