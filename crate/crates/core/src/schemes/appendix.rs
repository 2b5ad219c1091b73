//! Hand-built derivations following the printed proof trees: the
//! double-negation example, CD, Kuroda, KP, EK, EKP and the negation rules.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{by, cd, fit, fresh_in, kuroda, leaf, lf, persist_in, Result, SchemeError, SchemeParams};
use crate::calculus::{Derivation, Label, Rule, RuleApp, Sequent};
use crate::syntax::{subst_var, Formula, Var};
use crate::transform::{cut, eliminate_cut, neg_left, neg_right};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AppendixName {
    Kuroda,
    Kp,
    Ek,
    Ekp,
    NegRules,
}

impl AppendixName {
    pub const ALL: [AppendixName; 5] =
        [AppendixName::Kuroda, AppendixName::Kp, AppendixName::Ek, AppendixName::Ekp, AppendixName::NegRules];

    pub fn as_str(self) -> &'static str {
        match self {
            AppendixName::Kuroda => "Kuroda",
            AppendixName::Kp => "KP",
            AppendixName::Ek => "EK",
            AppendixName::Ekp => "EKP",
            AppendixName::NegRules => "NegRules",
        }
    }
}

impl fmt::Display for AppendixName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AppendixName {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self> {
        AppendixName::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| SchemeError::UnknownScheme(s.to_string()))
    }
}

/// The named derivation at label `x`. Kuroda yields `⇒ X:Kuroda`; the
/// others yield their characteristic sequent. EKP is returned cut-free.
pub fn appendix_derivation(name: AppendixName, x: Label, params: &SchemeParams) -> Result<Derivation> {
    let SchemeParams { phi, psi, theta, var } = params;
    match name {
        AppendixName::Kuroda => kuroda_derivation(x, phi, var),
        AppendixName::Kp => kp_derivation(x, theta, phi, psi),
        AppendixName::Ek => ek_derivation(x, phi, theta, var),
        AppendixName::Ekp => ekp_derivation(x, phi, theta, var),
        AppendixName::NegRules => neg_rules_derivation(x, phi),
    }
}

fn not(f: &Formula) -> Formula {
    Formula::not(f.clone())
}

/// `⇒ X:¬¬P → P` for an atom `P`: (⇒→), then (⇒at) when `#Y > 1`, then
/// (→⇒) with the singleton subset.
pub fn double_negation_derivation(x: Label, atom: &Formula) -> Result<Derivation> {
    if !atom.is_atom() {
        return Err(SchemeError::SideCondition(format!("{atom} is not an atom")));
    }
    let nn = not(&not(atom));
    let goal = Sequent::goal(x, Formula::implies(nn.clone(), atom.clone()));
    let subsets = x.nonempty_subsets();
    by(goal.clone(), RuleApp::new(Rule::ImpR, goal.succ[0].clone()), |j, p| {
        let y = subsets[j];
        let at_k = |k: Label, seq: Sequent| {
            by(seq, RuleApp::new(Rule::ImpL, lf(y, &nn)).with_y(k), |i, q| {
                if i == 0 {
                    by(q, RuleApp::new(Rule::ImpR, lf(k, &not(atom))), |_, r| leaf(r))
                } else {
                    leaf(q)
                }
            })
        };
        if y.len() == 1 {
            at_k(y, p)
        } else {
            let ks: Vec<Label> = y.singletons().collect();
            by(p, RuleApp::new(Rule::AtR, lf(y, atom)), |i, q| at_k(ks[i], q))
        }
    })
}

/// `⇒ X:CD` following the printed tree at each `Y ⊆ X`.
pub fn cd_derivation(x: Label, phi: &Formula, psi: &Formula, v: &Var) -> Result<Derivation> {
    let goal = Sequent::goal(x, cd(phi, psi, v)?);
    let all_d = Formula::forall_v(v.clone(), Formula::idisj(phi.clone(), psi.clone()));
    let all_phi = Formula::forall_v(v.clone(), phi.clone());
    let rhs = Formula::idisj(all_phi.clone(), psi.clone());
    let z = fresh_in(&goal);
    let pz = subst_var(phi, v, &z);
    let subsets = x.nonempty_subsets();
    by(goal.clone(), RuleApp::new(Rule::ImpR, goal.succ[0].clone()), |j, p| {
        let y = subsets[j];
        by(p, RuleApp::new(Rule::IDisjR, lf(y, &rhs)), |_, p| {
            by(p, RuleApp::new(Rule::ForallR, lf(y, &all_phi)).with_var(z.clone()), |_, p| {
                by(p, RuleApp::new(Rule::ForallL, lf(y, &all_d)).with_var(z.clone()), |_, p| {
                    let inst = Formula::idisj(pz.clone(), psi.clone());
                    by(p, RuleApp::new(Rule::IDisjL, lf(y, &inst)), |i, q| {
                        if i == 0 {
                            persist_in(&q, &lf(y, &pz), &lf(y, &pz))
                        } else {
                            persist_in(&q, &lf(y, psi), &lf(y, psi))
                        }
                    })
                })
            })
        })
    })
}

/// `X:∀x¬¬φ ⇒ X:¬¬∀xφ` through the admissible negation rules.
pub fn kuroda_lemma(x: Label, phi: &Formula, v: &Var) -> Result<Derivation> {
    let all_phi = Formula::forall_v(v.clone(), phi.clone());
    let all_nn = Formula::forall_v(v.clone(), not(&not(phi)));
    let mut prems = Vec::new();
    for k in x.singletons() {
        // X:∀x¬¬φ ⇒ {k}:∀xφ
        let goal = Sequent::new(vec![lf(x, &all_nn)], vec![lf(k, &all_phi)]);
        let z = fresh_in(&goal);
        let pz = subst_var(phi, v, &z);
        let q = by(goal, RuleApp::new(Rule::ForallR, lf(k, &all_phi)).with_var(z.clone()), |_, p| {
            by(p, RuleApp::new(Rule::ForallL, lf(x, &all_nn)).with_var(z.clone()), |_, p2| {
                let top = Sequent::new(vec![lf(k, &pz), lf(x, &all_nn)], vec![lf(k, &pz)]);
                let id = persist_in(&top, &lf(k, &pz), &lf(k, &pz))?;
                let r = neg_right(&pz, k, &[id])?;
                let n = neg_left(&not(&pz), x, k, &r)?;
                fit(&n, &p2)
            })
        })?;
        prems.push(neg_left(&all_phi, k, k, &q)?);
    }
    Ok(neg_right(&not(&all_phi), x, &prems)?)
}

/// `⇒ X:Kuroda`, one lemma per `Y ⊆ X`.
pub fn kuroda_derivation(x: Label, phi: &Formula, v: &Var) -> Result<Derivation> {
    let goal = Sequent::goal(x, kuroda(phi, v));
    let subsets = x.nonempty_subsets();
    by(goal.clone(), RuleApp::new(Rule::ImpR, goal.succ[0].clone()), |j, _| kuroda_lemma(subsets[j], phi, v))
}

/// `Y:¬θ, Z:¬θ ⇒ Y∪Z:¬θ`.
pub fn neg_union(y: Label, z: Label, theta: &Formula) -> Result<Derivation> {
    let w = y.union(z);
    let mut prems = Vec::new();
    for k in w.singletons() {
        let (used, other) = if y.is_superset_of(k) { (y, z) } else { (z, y) };
        let top = Sequent::new(vec![lf(k, theta), lf(other, &not(theta))], vec![lf(k, theta)]);
        let id = persist_in(&top, &lf(k, theta), &lf(k, theta))?;
        prems.push(neg_left(theta, used, k, &id)?);
    }
    Ok(neg_right(theta, w, &prems)?)
}

/// `Y∪Z:φ⩔ψ ⇒ Y:φ, Z:ψ`.
fn idisj_split(y: Label, z: Label, phi: &Formula, psi: &Formula) -> Result<Derivation> {
    let w = y.union(z);
    let d = Formula::idisj(phi.clone(), psi.clone());
    let goal = Sequent::new(vec![lf(w, &d)], vec![lf(y, phi), lf(z, psi)]);
    by(goal, RuleApp::new(Rule::IDisjL, lf(w, &d)), |i, q| {
        if i == 0 {
            persist_in(&q, &lf(w, phi), &lf(y, phi))
        } else {
            persist_in(&q, &lf(w, psi), &lf(z, psi))
        }
    })
}

/// `X:¬θ→(φ⩔ψ) ⇒ X:(¬θ→φ)⩔(¬θ→ψ)`.
pub fn kp_derivation(x: Label, theta: &Formula, phi: &Formula, psi: &Formula) -> Result<Derivation> {
    let nt = not(theta);
    let a = Formula::implies(nt.clone(), Formula::idisj(phi.clone(), psi.clone()));
    let left = Formula::implies(nt.clone(), phi.clone());
    let right = Formula::implies(nt.clone(), psi.clone());
    let goal = Sequent::new(vec![lf(x, &a)], vec![lf(x, &Formula::idisj(left.clone(), right.clone()))]);
    let subsets = x.nonempty_subsets();
    by(goal.clone(), RuleApp::new(Rule::IDisjR, goal.succ[0].clone()), |_, p| {
        by(p, RuleApp::new(Rule::ImpR, lf(x, &left)), |j, p2| {
            let y = subsets[j];
            by(p2, RuleApp::new(Rule::ImpR, lf(x, &right)), |i, p3| {
                let z = subsets[i];
                by(p3, RuleApp::new(Rule::ImpL, lf(x, &a)).with_y(y.union(z)), |b, p4| {
                    if b == 0 {
                        fit(&neg_union(y, z, theta)?, &p4)
                    } else {
                        fit(&idisj_split(y, z, phi, psi)?, &p4)
                    }
                })
            })
        })
    })
}

/// `X:∃⃗xφ ⇒ X:∃⃗x(¬θ→φ)`.
pub fn ek_derivation(x: Label, phi: &Formula, theta: &Formula, v: &Var) -> Result<Derivation> {
    let ex_phi = Formula::iexists_v(v.clone(), phi.clone());
    let body = Formula::implies(not(theta), phi.clone());
    let ex_b = Formula::iexists_v(v.clone(), body.clone());
    let goal = Sequent::new(vec![lf(x, &ex_phi)], vec![lf(x, &ex_b)]);
    let z = fresh_in(&goal);
    let pz = subst_var(phi, v, &z);
    let bz = subst_var(&body, v, &z);
    let subsets = x.nonempty_subsets();
    by(goal, RuleApp::new(Rule::IExistsL, lf(x, &ex_phi)).with_var(z.clone()), |_, p| {
        by(p, RuleApp::new(Rule::IExistsR, lf(x, &ex_b)).with_var(z.clone()), |_, p2| {
            by(p2, RuleApp::new(Rule::ImpR, lf(x, &bz)), |j, p3| persist_in(&p3, &lf(x, &pz), &lf(subsets[j], &pz)))
        })
    })
}

struct Ekp<'a> {
    x: Label,
    phi: &'a Formula,
    theta: &'a Formula,
    v: &'a Var,
    a: Formula,
    e: Formula,
    memo: BTreeMap<Label, Derivation>,
}

impl Ekp<'_> {
    /// `V:¬θ, X:¬θ→∃⃗xφ ⇒ X:∃⃗x(¬θ→φ)`, by (→⇒) with subset `V`. The case
    /// `V = X` uses EK; otherwise every `Z ⊄ V` reduces to a larger `V`,
    /// through a cut on `V∪Z:¬θ` when neither label contains the other.
    fn h(&mut self, vl: Label) -> Result<Derivation> {
        if let Some(d) = self.memo.get(&vl) {
            return Ok(d.clone());
        }
        let x = self.x;
        let nt = not(self.theta);
        let goal = Sequent::new(vec![lf(vl, &nt), lf(x, &self.a)], vec![lf(x, &self.e)]);
        let ex_phi = Formula::iexists_v(self.v.clone(), self.phi.clone());
        let body = Formula::implies(nt.clone(), self.phi.clone());
        let subsets = x.nonempty_subsets();
        let d = by(goal, RuleApp::new(Rule::ImpL, lf(x, &self.a)).with_y(vl), |b, p| {
            if b == 0 {
                return persist_in(&p, &lf(vl, &nt), &lf(vl, &nt));
            }
            if vl == x {
                return fit(&ek_derivation(x, self.phi, self.theta, self.v)?, &p);
            }
            let z2 = fresh_in(&p);
            let pz = subst_var(self.phi, self.v, &z2);
            let bz = subst_var(&body, self.v, &z2);
            by(p, RuleApp::new(Rule::IExistsL, lf(vl, &ex_phi)).with_var(z2.clone()), |_, p2| {
                by(p2, RuleApp::new(Rule::IExistsR, lf(x, &self.e)).with_var(z2.clone()), |_, p3| {
                    by(p3, RuleApp::new(Rule::ImpR, lf(x, &bz)), |i, p4| {
                        let z = subsets[i];
                        if vl.is_superset_of(z) {
                            persist_in(&p4, &lf(vl, &pz), &lf(z, &pz))
                        } else if z.is_superset_of(vl) {
                            fit(&self.h(z)?, &p4)
                        } else {
                            let w = vl.union(z);
                            let c = cut(&neg_union(vl, z, self.theta)?, &self.h(w)?, &lf(w, &nt))?;
                            fit(&c, &p4)
                        }
                    })
                })
            })
        })?;
        self.memo.insert(vl, d.clone());
        Ok(d)
    }
}

/// `X:¬θ→∃⃗xφ ⇒ X:∃⃗x(¬θ→φ)` with its explicit cuts; `x` must not occur
/// free in `θ`.
pub fn ekp_with_cut(x: Label, phi: &Formula, theta: &Formula, v: &Var) -> Result<Derivation> {
    if theta.occurs_free(v) {
        return Err(SchemeError::SideCondition(format!("{v} occurs free in {theta}")));
    }
    let nt = not(theta);
    let a = Formula::implies(nt.clone(), Formula::iexists_v(v.clone(), phi.clone()));
    let body = Formula::implies(nt, phi.clone());
    let e = Formula::iexists_v(v.clone(), body.clone());
    let goal = Sequent::new(vec![lf(x, &a)], vec![lf(x, &e)]);
    let z0 = fresh_in(&goal);
    let bz = subst_var(&body, v, &z0);
    let subsets = x.nonempty_subsets();
    let mut st = Ekp { x, phi, theta, v, a, e: e.clone(), memo: BTreeMap::new() };
    by(goal, RuleApp::new(Rule::IExistsR, lf(x, &e)).with_var(z0), |_, p| {
        by(p, RuleApp::new(Rule::ImpR, lf(x, &bz)), |j, p2| fit(&st.h(subsets[j])?, &p2))
    })
}

/// EKP with every cut eliminated.
pub fn ekp_derivation(x: Label, phi: &Formula, theta: &Formula, v: &Var) -> Result<Derivation> {
    Ok(eliminate_cut(&ekp_with_cut(x, phi, theta, v)?)?)
}

/// `X:φ ⇒ X:¬¬φ` using both admissible negation rules.
pub fn neg_rules_derivation(x: Label, phi: &Formula) -> Result<Derivation> {
    let mut prems = Vec::new();
    for k in x.singletons() {
        let top = Sequent::new(vec![lf(x, phi)], vec![lf(k, phi)]);
        let p = persist_in(&top, &lf(x, phi), &lf(k, phi))?;
        prems.push(neg_left(phi, k, k, &p)?);
    }
    Ok(neg_right(&not(phi), x, &prems)?)
}
