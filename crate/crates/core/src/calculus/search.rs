//! Root-first proof search.
//!
//! Search-side sequents are sets. Every rule of the calculus is invertible, so
//! a rule application is never undone: the first premise that fails makes the
//! whole search fail, and the formulas accumulated along that branch form a
//! saturated sequent from which a countermodel is read off.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use super::{premises_of, Derivation, Label, LabelledFormula, Rule, RuleApp, Sequent, Side};
use crate::syntax::{reserved_index, subst_var, var, Formula, Var};

#[derive(Clone, Debug, Serialize)]
pub struct SearchConfig {
    /// Upper bound on the number of free variables on a branch.
    pub pool_max: usize,
    /// Fresh variables that may be invented for instantiation when a branch
    /// has no free variable at all.
    pub fresh_budget: usize,
    /// Rule applications per attempt before giving up.
    pub node_limit: usize,
    /// Retry with pool bounds 1, 2, .., `pool_max`.
    pub iterative: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { pool_max: 6, fresh_budget: 1, node_limit: 2_000_000, iterative: true }
    }
}

/// Saturated sequent left by a failed search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StuckSequent {
    /// Every antecedent formula seen on the failing branch.
    #[serde(serialize_with = "ser_lfs")]
    pub ante: Vec<LabelledFormula>,
    #[serde(serialize_with = "ser_lfs")]
    pub succ: Vec<LabelledFormula>,
    /// The topmost sequent of the branch.
    #[serde(serialize_with = "ser_seq")]
    pub leaf: Sequent,
    #[serde(serialize_with = "ser_vars")]
    pub pool: Vec<Var>,
}

fn ser_lfs<S: serde::Serializer>(v: &[LabelledFormula], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|lf| lf.to_string()))
}

fn ser_seq<S: serde::Serializer>(v: &Sequent, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_vars<S: serde::Serializer>(v: &[Var], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl StuckSequent {
    pub fn sequent(&self) -> Sequent {
        Sequent::new(self.ante.clone(), self.succ.clone())
    }
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Proved(Derivation),
    Refuted(StuckSequent),
    Inconclusive { reason: String },
}

impl SearchOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, SearchOutcome::Proved(_))
    }

    pub fn derivation(self) -> Option<Derivation> {
        match self {
            SearchOutcome::Proved(d) => Some(d),
            _ => None,
        }
    }
}

type Set = BTreeSet<LabelledFormula>;

#[derive(Clone)]
struct Branch {
    ante: Set,
    succ: Set,
    acc_ante: Set,
    acc_succ: Set,
    pool: BTreeSet<Var>,
    fresh_used: usize,
    blocked: bool,
}

impl Branch {
    fn sequent(&self) -> Sequent {
        Sequent::new(self.ante.iter().cloned().collect(), self.succ.iter().cloned().collect())
    }
}

enum Fail {
    Refuted(StuckSequent),
    Budget(String),
}

struct Searcher<'a> {
    cfg: &'a SearchConfig,
    pool_cap: usize,
    memo: HashMap<(Set, Set), Derivation>,
    focus_failed: HashSet<(Set, Set)>,
    next_var: usize,
    nodes: usize,
    limit: usize,
}

/// Node budget for proving a premise from its new formulas alone.
const FOCUS_BUDGET: usize = 4_000;

pub fn prove(seq: &Sequent, cfg: &SearchConfig) -> SearchOutcome {
    crate::stack::with_big_stack(|| prove_inner(seq, cfg))
}

fn prove_inner(seq: &Sequent, cfg: &SearchConfig) -> SearchOutcome {
    let mut next_var = 0;
    for v in seq.all_vars() {
        if let Some(k) = reserved_index(&v) {
            next_var = next_var.max(k + 1);
        }
    }
    let propositional = seq.is_propositional();
    let caps: Vec<usize> = if propositional || !cfg.iterative {
        vec![cfg.pool_max]
    } else {
        (1..=cfg.pool_max.max(1)).collect()
    };
    let mut memo = HashMap::new();
    let mut last_reason = String::from("no attempt made");
    for cap in caps {
        let mut s =
            Searcher { cfg, pool_cap: cap, memo: std::mem::take(&mut memo),
            focus_failed: HashSet::new(),
            next_var,
            nodes: 0,
            limit: cfg.node_limit,
        };
        let ante: Set = seq.ante.iter().cloned().collect();
        let succ: Set = seq.succ.iter().cloned().collect();
        let root = Branch {
            pool: seq.free_vars(),
            acc_ante: ante.clone(),
            acc_succ: succ.clone(),
            ante,
            succ,
            fresh_used: 0,
            blocked: false,
        };
        let res = s.search(root);
        next_var = s.next_var;
        memo = std::mem::take(&mut s.memo);
        match res {
            Ok(d) => {
                let d = restore_duplicates(d, seq);
                return SearchOutcome::Proved(d);
            }
            Err(Fail::Refuted(stuck)) => return SearchOutcome::Refuted(stuck),
            Err(Fail::Budget(reason)) => {
                last_reason = reason;
                if s.nodes >= cfg.node_limit {
                    break;
                }
            }
        }
    }
    SearchOutcome::Inconclusive { reason: last_reason }
}

/// The root sequent may be a multiset; the search proved its underlying set.
fn restore_duplicates(mut d: Derivation, seq: &Sequent) -> Derivation {
    for side in [Side::Left, Side::Right] {
        let mut seen: Vec<&LabelledFormula> = Vec::new();
        for lf in seq.side(side) {
            if seen.contains(&lf) {
                add_everywhere(&mut d, side, lf);
            } else {
                seen.push(lf);
            }
        }
    }
    d
}

/// Weakening by a formula whose free variables are not eigenvariables of `d`.
pub(crate) fn add_everywhere(d: &mut Derivation, side: Side, lf: &LabelledFormula) {
    d.conclusion.side_mut(side).push(lf.clone());
    for p in &mut d.premises {
        add_everywhere(p, side, lf);
    }
}

fn initial_leaf(br: &Branch) -> Option<Rule> {
    if br.ante.iter().any(|lf| lf.formula == Formula::Bot) {
        return Some(Rule::BotL);
    }
    for a in br.ante.iter().filter(|lf| lf.formula.is_atom()) {
        for s in br.succ.iter().filter(|lf| lf.formula == a.formula) {
            if a.label.is_superset_of(s.label) {
                return Some(Rule::Id);
            }
        }
    }
    None
}

impl Searcher<'_> {
    fn fresh(&mut self) -> Var {
        let v = var(&format!("_v{}", self.next_var));
        self.next_var += 1;
        v
    }

    fn search(&mut self, mut br: Branch) -> Result<Derivation, Fail> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Fail::Budget(format!("node limit {} reached", self.limit)));
        }
        if let Some(rule) = initial_leaf(&br) {
            return Ok(Derivation::leaf(br.sequent(), rule));
        }
        let key = (br.ante.clone(), br.succ.clone());
        if let Some(d) = self.memo.get(&key) {
            return Ok(d.clone());
        }
        let app = match self.choose(&mut br) {
            Some(app) => app,
            None => {
                return Err(if br.blocked {
                    Fail::Budget(format!("variable pool bound {} reached", self.pool_cap))
                } else {
                    Fail::Refuted(StuckSequent {
                        ante: br.acc_ante.iter().cloned().collect(),
                        succ: br.acc_succ.iter().cloned().collect(),
                        leaf: br.sequent(),
                        pool: br.pool.iter().cloned().collect(),
                    })
                })
            }
        };
        let d = self.expand(&br, app)?;
        self.memo.insert(key, d.clone());
        Ok(d)
    }

    fn expand(&mut self, br: &Branch, app: RuleApp) -> Result<Derivation, Fail> {
        let concl = br.sequent();
        let prems = premises_of(&concl, &app).expect("search only applies applicable rules");
        let mut ds = Vec::with_capacity(prems.len());
        for p in prems {
            let mut child = br.clone();
            child.ante = Set::new();
            child.succ = Set::new();
            let mut dups = Vec::new();
            for (side, lfs) in [(Side::Left, &p.ante), (Side::Right, &p.succ)] {
                for lf in lfs {
                    let (cur, acc) = match side {
                        Side::Left => (&mut child.ante, &mut child.acc_ante),
                        Side::Right => (&mut child.succ, &mut child.acc_succ),
                    };
                    if !cur.insert(lf.clone()) {
                        dups.push((side, lf.clone()));
                    }
                    if acc.insert(lf.clone()) {
                        child.pool.extend(lf.formula.free_vars());
                    }
                }
            }
            // A focused proof already concludes the whole premise multiset.
            let d = match self.focused(&concl, &p) {
                Some(d) => d,
                None => {
                    let mut d = self.search(child)?;
                    for (side, lf) in &dups {
                        add_everywhere(&mut d, *side, lf);
                    }
                    d
                }
            };
            ds.push(d);
        }
        Ok(Derivation::node(concl, app, ds))
    }

    /// Tries to prove the formulas a premise adds to its conclusion on their
    /// own, within [`FOCUS_BUDGET`] nodes, and weakens the result to the
    /// whole premise. Eigenvariables are fresh for the entire search, so the
    /// weakening needs no renaming.
    fn focused(&mut self, concl: &Sequent, prem: &Sequent) -> Option<Derivation> {
        let new_side = |side: Side| -> Set {
            prem.side(side).iter().filter(|lf| !concl.side(side).contains(lf)).cloned().collect()
        };
        let (ante, succ) = (new_side(Side::Left), new_side(Side::Right));
        if ante.len() + succ.len() == prem.ante.len() + prem.succ.len() {
            return None;
        }
        let mut d = self.try_alone(ante, succ)?;
        let mut rest = prem.clone();
        for side in [Side::Left, Side::Right] {
            for lf in d.conclusion.side(side) {
                let xs = rest.side_mut(side);
                let i = xs.iter().position(|x| x == lf).expect("focused formulas come from the premise");
                xs.remove(i);
            }
        }
        for side in [Side::Left, Side::Right] {
            for lf in rest.side(side).to_vec() {
                add_everywhere(&mut d, side, &lf);
            }
        }
        Some(d)
    }

    /// Bounded attempt at `ante ⇒ succ` with nothing else in context.
    fn try_alone(&mut self, ante: Set, succ: Set) -> Option<Derivation> {
        if ante.is_empty() && succ.is_empty() {
            return None;
        }
        let key = (ante, succ);
        if self.focus_failed.contains(&key) {
            return None;
        }
        let (ante, succ) = key.clone();
        let pool = ante.iter().chain(&succ).flat_map(|lf| lf.formula.free_vars()).collect();
        let br = Branch {
            acc_ante: ante.clone(),
            acc_succ: succ.clone(),
            ante,
            succ,
            pool,
            fresh_used: 0,
            blocked: false,
        };
        let saved = self.limit;
        self.limit = saved.min(self.nodes + FOCUS_BUDGET);
        let res = self.search(br);
        self.limit = saved;
        if res.is_err() {
            self.focus_failed.insert(key);
        }
        res.ok()
    }

    /// Picks the next rule application, in the fixed order: single-premise
    /// invertible rules, branching rules, atR, impR, impL, quantifier instances.
    fn choose(&mut self, br: &mut Branch) -> Option<RuleApp> {
        for lf in &br.ante {
            if matches!(lf.formula, Formula::And(..)) {
                return Some(RuleApp::new(Rule::AndL, lf.clone()));
            }
        }
        for lf in &br.succ {
            if matches!(lf.formula, Formula::IDisj(..)) {
                return Some(RuleApp::new(Rule::IDisjR, lf.clone()));
            }
        }
        let eigen: Vec<(Rule, LabelledFormula)> = br
            .succ
            .iter()
            .filter(|lf| matches!(lf.formula, Formula::Forall(..)))
            .map(|lf| (Rule::ForallR, lf.clone()))
            .chain(
                br.ante
                    .iter()
                    .filter(|lf| matches!(lf.formula, Formula::IExists(..)))
                    .map(|lf| (Rule::IExistsL, lf.clone())),
            )
            .collect();
        if let Some((rule, lf)) = eigen.into_iter().next() {
            if br.pool.len() < self.pool_cap {
                let z = self.fresh();
                return Some(RuleApp::new(rule, lf).with_var(z));
            }
            br.blocked = true;
        }
        for lf in &br.succ {
            if matches!(lf.formula, Formula::And(..)) {
                return Some(RuleApp::new(Rule::AndR, lf.clone()));
            }
        }
        for lf in &br.ante {
            if matches!(lf.formula, Formula::IDisj(..)) {
                return Some(RuleApp::new(Rule::IDisjL, lf.clone()));
            }
        }
        for lf in &br.succ {
            if lf.formula.is_atom() && lf.label.len() > 1 {
                return Some(RuleApp::new(Rule::AtR, lf.clone()));
            }
        }
        for lf in &br.succ {
            if matches!(lf.formula, Formula::Implies(..)) {
                return Some(RuleApp::new(Rule::ImpR, lf.clone()));
            }
        }
        // impL instances whose left premise holds on its own go first; the
        // rest keep the formula order.
        let mut first = None;
        for lf in &br.ante {
            if let Formula::Implies(a, b) = &lf.formula {
                for y in lf.label.nonempty_subsets() {
                    let left = LabelledFormula::new(y, a.as_ref().clone());
                    let right = LabelledFormula::new(y, b.as_ref().clone());
                    if !br.acc_succ.contains(&left) && !br.acc_ante.contains(&right) {
                        let app = RuleApp::new(Rule::ImpL, lf.clone()).with_y(y);
                        if self.try_alone(Set::new(), Set::from([left])).is_some() {
                            return Some(app);
                        }
                        first.get_or_insert(app);
                    }
                }
            }
        }
        if first.is_some() {
            return first;
        }
        self.choose_instance(br)
    }

    fn choose_instance(&mut self, br: &mut Branch) -> Option<RuleApp> {
        let principals: Vec<(Rule, LabelledFormula)> = br
            .ante
            .iter()
            .filter(|lf| matches!(lf.formula, Formula::Forall(..)))
            .map(|lf| (Rule::ForallL, lf.clone()))
            .chain(
                br.succ
                    .iter()
                    .filter(|lf| matches!(lf.formula, Formula::IExists(..)))
                    .map(|lf| (Rule::IExistsR, lf.clone())),
            )
            .collect();
        if principals.is_empty() {
            return None;
        }
        for (rule, lf) in &principals {
            let (x, body) = match &lf.formula {
                Formula::Forall(x, b) | Formula::IExists(x, b) => (x, b),
                _ => unreachable!(),
            };
            for y in &br.pool {
                let inst = LabelledFormula::new(lf.label, subst_var(body, x, y));
                let seen = match rule {
                    Rule::ForallL => br.acc_ante.contains(&inst),
                    _ => br.acc_succ.contains(&inst),
                };
                if !seen {
                    return Some(RuleApp::new(*rule, lf.clone()).with_var(y.clone()));
                }
            }
        }
        if br.pool.is_empty() {
            if br.fresh_used < self.cfg.fresh_budget && br.pool.len() < self.pool_cap {
                br.fresh_used += 1;
                let y = self.fresh();
                let (rule, lf) = principals[0].clone();
                return Some(RuleApp::new(rule, lf).with_var(y));
            }
            br.blocked = true;
        }
        None
    }
}

/// `⇒ {1..n}: φ`.
pub fn goal_at(n: u32, f: Formula) -> Result<Sequent, super::CalcError> {
    Ok(Sequent::goal(Label::range(n)?, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::check_derivation;
    use crate::syntax::parse;

    fn run(n: u32, f: &str) -> SearchOutcome {
        prove(&goal_at(n, parse(f).unwrap()).unwrap(), &SearchConfig::default())
    }

    #[test]
    fn double_negation_atom() {
        for n in 1..=3 {
            let out = run(n, "~~P(x) -> P(x)");
            let d = out.derivation().expect("provable");
            check_derivation(&d).unwrap();
        }
    }

    #[test]
    fn closable_implication_is_used_first() {
        // Without trying impL premises on their own this explodes at |X| = 4.
        let f = "((~bot -> ~bot) -> bot & q & p) -> ~(~p -> bot & bot)";
        let cfg = SearchConfig { node_limit: 200_000, ..SearchConfig::default() };
        let d = prove(&goal_at(4, parse(f).unwrap()).unwrap(), &cfg).derivation().expect("provable");
        check_derivation(&d).unwrap();
        assert!(d.size() < 20_000, "{}", d.size());
    }

    #[test]
    fn question_refuted_at_two() {
        match run(2, "?p") {
            SearchOutcome::Refuted(stuck) => {
                assert!(stuck.succ.iter().any(|lf| lf.formula == parse("p").unwrap()));
            }
            other => panic!("{other:?}"),
        }
        assert!(run(1, "?p").is_proved());
    }

    #[test]
    fn peirce_holds_for_declaratives() {
        // declaratives are classical at every bound
        assert!(run(1, "((p -> q) -> p) -> p").is_proved());
        assert!(run(3, "((p -> q) -> p) -> p").is_proved());
    }

    #[test]
    fn cd_instance() {
        let out = run(2, "(forall x. P(x) \\/ q) -> (forall x. P(x)) \\/ q");
        let d = out.derivation().expect("provable");
        check_derivation(&d).unwrap();
    }

    #[test]
    fn fo_refutation_is_genuine() {
        match run(1, "(iexists x. P(x)) -> forall x. P(x)") {
            SearchOutcome::Refuted(stuck) => assert!(stuck.pool.len() >= 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn multiset_root_is_restored() {
        let p = LabelledFormula::new(Label::range(1).unwrap(), parse("p").unwrap());
        let seq = Sequent::new(vec![p.clone(), p.clone()], vec![p]);
        let d = prove(&seq, &SearchConfig::default()).derivation().unwrap();
        assert!(d.conclusion.multiset_eq(&seq));
        check_derivation(&d).unwrap();
    }
}
