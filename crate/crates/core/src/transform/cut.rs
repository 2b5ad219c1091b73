//! Cut elimination. Cuts are removed topmost first; each cut between
//! cut-free derivations is reduced by induction on the length of the cut
//! formula and, for equal length, on the sum of the premise heights.

use super::{aligned, app_of, contract_to, fresh_for, leaf_for, principal, subst_derivation, weaken_all, Result, TransformError};
use crate::calculus::{is_initial, Derivation, LabelledFormula, Params, Rule, RuleApp, Sequent, Side};
use crate::syntax::{subst_var, Formula, Var};

/// The cut of `d1: Γ ⇒ Δ, A` and `d2: A, Π ⇒ Σ` on `A`.
pub fn cut(d1: &Derivation, d2: &Derivation, a: &LabelledFormula) -> Result<Derivation> {
    let (ctx1, ctx2) = contexts(d1, d2, a)?;
    let app = RuleApp { rule: Rule::Cut, params: Params { cut: Some(a.clone()), ..Params::default() } };
    Ok(Derivation::node(ctx1.merge(&ctx2), app, vec![d1.clone(), d2.clone()]))
}

fn contexts(d1: &Derivation, d2: &Derivation, a: &LabelledFormula) -> Result<(Sequent, Sequent)> {
    let mut ctx1 = d1.conclusion.clone();
    if !ctx1.remove_one(Side::Right, a) {
        return Err(TransformError::Absent(a.to_string(), Side::Right));
    }
    let mut ctx2 = d2.conclusion.clone();
    if !ctx2.remove_one(Side::Left, a) {
        return Err(TransformError::Absent(a.to_string(), Side::Left));
    }
    Ok((ctx1, ctx2))
}

/// Removes every cut. The result concludes the same sequent.
pub fn eliminate_cut(d: &Derivation) -> Result<Derivation> {
    crate::stack::with_big_stack(|| elim(d))
}

fn elim(d: &Derivation) -> Result<Derivation> {
    if !d.uses_rule(Rule::Cut) {
        return Ok(d.clone());
    }
    let premises = d.premises.iter().map(elim).collect::<Result<Vec<_>>>()?;
    if d.rule != Rule::Cut {
        let mut out = Derivation::node(d.conclusion.clone(), d.app(), premises);
        out.note = d.note.clone();
        return Ok(out);
    }
    let a = d.params.cut.as_ref().ok_or_else(|| TransformError::Shape("cut node without a cut formula".into()))?;
    let r = reduce(&premises[0], &premises[1], a)?;
    if !r.conclusion.multiset_eq(&d.conclusion) {
        return Err(TransformError::Shape(format!("cut node concludes {}, expected {}", d.conclusion, r.conclusion)));
    }
    Ok(r)
}

/// Renames the local variable of `d` (eigenvariable) if it occurs in `avoid`.
fn avoiding(d: &Derivation, avoid: &std::collections::BTreeSet<Var>) -> Result<(RuleApp, Vec<Derivation>)> {
    let mut app = app_of(d)?;
    if d.rule.has_eigenvariable() {
        if let Some(e) = app.params.var.clone() {
            if avoid.contains(&e) {
                let refs: Vec<&Var> = avoid.iter().collect();
                let e2 = fresh_for(d, &refs);
                app.params.var = Some(e2.clone());
                return Ok((app, vec![subst_derivation(&d.premises[0], &e, &e2)]));
            }
        }
    }
    Ok((app, d.premises.clone()))
}

/// Cut-free derivation of `Γ, Π ⇒ Δ, Σ` from cut-free `d1: Γ ⇒ Δ, A` and
/// `d2: A, Π ⇒ Σ`.
fn reduce(d1: &Derivation, d2: &Derivation, a: &LabelledFormula) -> Result<Derivation> {
    let (ctx1, ctx2) = contexts(d1, d2, a)?;
    let goal = ctx1.merge(&ctx2);

    if d1.rule.is_leaf() {
        if is_initial(&ctx1).is_some() {
            return leaf_for(goal);
        }
        // d1 is an axiom through A = X:P on the right: some X':P with X' ⊇ X
        // on the left. Replace A on the left of d2 by X':P.
        let src = ctx1
            .ante
            .iter()
            .find(|l| l.formula == a.formula && l.label.is_superset_of(a.label))
            .cloned()
            .ok_or_else(|| TransformError::Internal(format!("axiom {} does not use {a}", d1.conclusion)))?;
        let lifted = lift_left_atom(d2, a, &src)?;
        let mut extra = ctx1.clone();
        extra.remove_one(Side::Left, &src);
        return Ok(weaken_all(&lifted, &extra));
    }
    if d2.rule.is_leaf() {
        if is_initial(&ctx2).is_some() {
            return leaf_for(goal);
        }
        if a.formula == Formula::Bot {
            let del = delete_right(d1, a)?;
            return Ok(weaken_all(&del, &ctx2));
        }
        let target = ctx2
            .succ
            .iter()
            .find(|l| l.formula == a.formula && a.label.is_superset_of(l.label))
            .cloned()
            .ok_or_else(|| TransformError::Internal(format!("axiom {} does not use {a}", d2.conclusion)))?;
        let shrunk = shrink_right_atom(d1, a, &target)?;
        let mut extra = ctx2.clone();
        extra.remove_one(Side::Right, &target);
        return Ok(weaken_all(&shrunk, &extra));
    }

    let app1 = app_of(d1)?;
    let app2 = app_of(d2)?;
    let a_in_d1 = d1.rule.principal_side() == Some(Side::Right) && principal(&app1)?.alpha_eq(a);
    let a_in_d2 = d2.rule.principal_side() == Some(Side::Left) && principal(&app2)?.alpha_eq(a);

    if !a_in_d1 {
        let (app, prems) = avoiding(d1, &ctx2.free_vars())?;
        let new = prems.iter().map(|p| reduce(p, d2, a)).collect::<Result<Vec<_>>>()?;
        return Ok(Derivation::node(goal, app, new));
    }
    if !a_in_d2 {
        let (app, prems) = avoiding(d2, &ctx1.free_vars())?;
        let new = prems.iter().map(|p| reduce(d1, p, a)).collect::<Result<Vec<_>>>()?;
        return Ok(Derivation::node(goal, app, new));
    }

    let x = a.label;
    let lf = |f: &Formula| LabelledFormula::new(x, f.clone());
    let joined = match &a.formula {
        Formula::And(b, c) => {
            let p1 = aligned(d1, &app1)?;
            let p2 = aligned(d2, &app2)?;
            let c1 = reduce(p1[0], p2[0], &lf(b))?;
            reduce(p1[1], &c1, &lf(c))?
        }
        Formula::IDisj(b, c) => {
            let p1 = aligned(d1, &app1)?;
            let p2 = aligned(d2, &app2)?;
            let c1 = reduce(p1[0], p2[0], &lf(b))?;
            reduce(&c1, p2[1], &lf(c))?
        }
        Formula::Implies(b, c) => {
            let y0 = app2.params.y.ok_or_else(|| TransformError::Shape("impL without Y".into()))?;
            let p2 = aligned(d2, &app2)?;
            let a1 = reduce(d1, p2[0], a)?;
            let b1 = reduce(d1, p2[1], a)?;
            let i = x
                .nonempty_subsets()
                .iter()
                .position(|y| *y == y0)
                .ok_or_else(|| TransformError::Shape(format!("{y0} is not a subset of {x}")))?;
            let p1 = aligned(d1, &app1)?;
            let yb = LabelledFormula::new(y0, b.as_ref().clone());
            let yc = LabelledFormula::new(y0, c.as_ref().clone());
            let mid = reduce(&a1, p1[i], &yb)?;
            reduce(&mid, &b1, &yc)?
        }
        Formula::Forall(v, body) => {
            let e = app1.params.var.clone().ok_or_else(|| TransformError::Shape("forallR without var".into()))?;
            let y = app2.params.var.clone().ok_or_else(|| TransformError::Shape("forallL without var".into()))?;
            let b1 = reduce(d1, &d2.premises[0], a)?;
            let inst = subst_derivation(&d1.premises[0], &e, &y);
            reduce(&inst, &b1, &lf(&subst_var(body, v, &y)))?
        }
        Formula::IExists(v, body) => {
            let y = app1.params.var.clone().ok_or_else(|| TransformError::Shape("iexistsR without var".into()))?;
            let e = app2.params.var.clone().ok_or_else(|| TransformError::Shape("iexistsL without var".into()))?;
            let a1 = reduce(&d1.premises[0], d2, a)?;
            let inst = subst_derivation(&d2.premises[0], &e, &y);
            reduce(&a1, &inst, &lf(&subst_var(body, v, &y)))?
        }
        Formula::Bot | Formula::Atom(..) => {
            return Err(TransformError::Internal(format!("{a} cannot be principal on both sides")))
        }
    };
    contract_to(&joined, &goal)
}

/// Replaces one antecedent occurrence of the atom `from` by `to`, whose
/// label is a superset.
fn lift_left_atom(d: &Derivation, from: &LabelledFormula, to: &LabelledFormula) -> Result<Derivation> {
    let mut concl = d.conclusion.clone();
    if !concl.remove_one(Side::Left, from) {
        return Err(TransformError::Absent(from.to_string(), Side::Left));
    }
    concl.ante.push(to.clone());
    if d.rule.is_leaf() {
        return leaf_for(concl);
    }
    let premises = d.premises.iter().map(|p| lift_left_atom(p, from, to)).collect::<Result<Vec<_>>>()?;
    let mut out = Derivation::node(concl, app_of(d)?, premises);
    out.note = d.note.clone();
    Ok(out)
}

/// Deletes one succedent occurrence of `X:⊥`, which no rule decomposes.
fn delete_right(d: &Derivation, bot: &LabelledFormula) -> Result<Derivation> {
    let mut concl = d.conclusion.clone();
    if !concl.remove_one(Side::Right, bot) {
        return Err(TransformError::Absent(bot.to_string(), Side::Right));
    }
    if d.rule.is_leaf() {
        return leaf_for(concl);
    }
    let premises = d.premises.iter().map(|p| delete_right(p, bot)).collect::<Result<Vec<_>>>()?;
    let mut out = Derivation::node(concl, app_of(d)?, premises);
    out.note = d.note.clone();
    Ok(out)
}

/// Replaces one succedent occurrence of the atom `from` by `to`, whose label
/// is a subset. An (atR) step on `from` keeps only the premises for `to`.
fn shrink_right_atom(d: &Derivation, from: &LabelledFormula, to: &LabelledFormula) -> Result<Derivation> {
    let mut concl = d.conclusion.clone();
    if !concl.remove_one(Side::Right, from) {
        return Err(TransformError::Absent(from.to_string(), Side::Right));
    }
    concl.succ.push(to.clone());
    if d.rule.is_leaf() {
        return leaf_for(concl);
    }
    let app = app_of(d)?;
    if d.rule == Rule::AtR && principal(&app)?.alpha_eq(from) {
        let prems = aligned(d, &app)?;
        let ks: Vec<u32> = from.label.iter().collect();
        let chosen: Vec<Derivation> = to
            .label
            .iter()
            .map(|k| prems[ks.iter().position(|&j| j == k).expect("Z ⊆ X")].clone())
            .collect();
        if chosen.len() == 1 {
            return Ok(chosen.into_iter().next().expect("one premise"));
        }
        return Ok(Derivation::node(concl, RuleApp::new(Rule::AtR, to.clone()), chosen));
    }
    let premises = d.premises.iter().map(|p| shrink_right_atom(p, from, to)).collect::<Result<Vec<_>>>()?;
    let mut out = Derivation::node(concl, app, premises);
    out.note = d.note.clone();
    Ok(out)
}
