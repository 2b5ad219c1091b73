//! Relational information models and the support relation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{Label, LabelledFormula, Sequent};
use crate::syntax::{Formula, Predicate, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("unassigned free variable `{0}`")]
    UnassignedVariable(String),
    #[error("world naming is undefined on {0}")]
    MissingNaming(u32),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("unknown domain element `{0}`")]
    UnknownElement(String),
    #[error("predicate `{pred}` has arity {expected} but a tuple of length {found} was given")]
    Arity { pred: String, expected: usize, found: usize },
    #[error("a model needs a nonempty set of worlds and a nonempty domain")]
    Empty,
    #[error("{0} worlds exceed the evaluator capacity of {1}")]
    TooManyWorlds(usize, usize),
    #[error("exhaustive enumeration needs {bits} interpretation bits, above the cap of {cap}")]
    EnumerationCap { bits: usize, cap: usize },
}

/// A finite relational information model `(W, D, I)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Model {
    pub worlds: Vec<String>,
    pub domain: Vec<String>,
    /// predicate -> world -> tuples. Missing entries are empty relations.
    #[serde(default)]
    pub interp: BTreeMap<String, BTreeMap<String, BTreeSet<Vec<String>>>>,
}

pub type State = BTreeSet<String>;
/// Variable name -> domain element name.
pub type Assignment = BTreeMap<String, String>;
/// Label element -> world name.
pub type WorldNaming = BTreeMap<u32, String>;

/// Largest world count handled by the literal evaluator (states are bitmasks).
pub const MAX_WORLDS: usize = 63;
/// Largest world count for which whole support sets are materialised.
pub const MAX_SET_WORLDS: usize = 16;

impl Model {
    pub fn index(&self) -> Result<IndexedModel, SemanticsError> {
        if self.worlds.is_empty() || self.domain.is_empty() {
            return Err(SemanticsError::Empty);
        }
        if self.worlds.len() > MAX_WORLDS {
            return Err(SemanticsError::TooManyWorlds(self.worlds.len(), MAX_WORLDS));
        }
        let wi: HashMap<&str, usize> =
            self.worlds.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
        let di: HashMap<&str, usize> =
            self.domain.iter().enumerate().map(|(i, d)| (d.as_str(), i)).collect();
        let nd = self.domain.len();
        let mut preds = HashMap::new();
        for (p, per_world) in &self.interp {
            let mut arity = None;
            for tuples in per_world.values() {
                for t in tuples {
                    match arity {
                        None => arity = Some(t.len()),
                        Some(a) if a != t.len() => {
                            return Err(SemanticsError::Arity {
                                pred: p.clone(),
                                expected: a,
                                found: t.len(),
                            })
                        }
                        _ => {}
                    }
                }
            }
            let Some(arity) = arity else { continue };
            let size = nd.pow(arity as u32);
            let mut table = vec![0u64; size];
            for (w, tuples) in per_world {
                let &wk = wi.get(w.as_str()).ok_or_else(|| SemanticsError::UnknownWorld(w.clone()))?;
                for t in tuples {
                    let mut idx = 0usize;
                    for e in t.iter().rev() {
                        let &d = di
                            .get(e.as_str())
                            .ok_or_else(|| SemanticsError::UnknownElement(e.clone()))?;
                        idx = idx * nd + d;
                    }
                    table[idx] |= 1 << wk;
                }
            }
            preds.insert(Var::from(p.as_str()), (arity, table));
        }
        Ok(IndexedModel { nw: self.worlds.len(), nd, preds })
    }

    pub fn state_mask(&self, s: &State) -> Result<u64, SemanticsError> {
        let mut m = 0u64;
        for w in s {
            let i = self
                .worlds
                .iter()
                .position(|x| x == w)
                .ok_or_else(|| SemanticsError::UnknownWorld(w.clone()))?;
            m |= 1 << i;
        }
        Ok(m)
    }

    fn env(&self, g: &Assignment) -> Result<Vec<(Var, usize)>, SemanticsError> {
        g.iter()
            .map(|(v, d)| {
                let i = self
                    .domain
                    .iter()
                    .position(|x| x == d)
                    .ok_or_else(|| SemanticsError::UnknownElement(d.clone()))?;
                Ok((Var::from(v.as_str()), i))
            })
            .collect()
    }
}

/// Model with worlds and elements replaced by indices. For every predicate
/// and tuple index the table stores the set of worlds where the tuple holds.
#[derive(Clone, Debug)]
pub struct IndexedModel {
    pub nw: usize,
    pub nd: usize,
    preds: HashMap<Var, (usize, Vec<u64>)>,
}

/// Variable environment; later entries shadow earlier ones.
pub type Env = Vec<(Var, usize)>;

fn lookup(env: &Env, x: &Var) -> Result<usize, SemanticsError> {
    env.iter()
        .rev()
        .find(|(v, _)| v == x)
        .map(|(_, d)| *d)
        .ok_or_else(|| SemanticsError::UnassignedVariable(x.to_string()))
}

/// Iterates over all submasks of `s`, including `s` and 0.
fn submasks(s: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(s);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & s) };
        Some(cur)
    })
}

impl IndexedModel {
    pub fn full_state(&self) -> u64 {
        if self.nw == 64 {
            u64::MAX
        } else {
            (1u64 << self.nw) - 1
        }
    }

    /// Worlds where the atom holds.
    fn atom_truth(&self, p: &Var, args: &[Var], env: &Env) -> Result<u64, SemanticsError> {
        let mut idx = 0usize;
        for a in args.iter().rev() {
            idx = idx * self.nd + lookup(env, a)?;
        }
        Ok(match self.preds.get(p) {
            Some((arity, table)) if *arity == args.len() => table[idx],
            Some((arity, _)) => {
                return Err(SemanticsError::Arity {
                    pred: p.to_string(),
                    expected: *arity,
                    found: args.len(),
                })
            }
            None => 0,
        })
    }

    /// The support clauses, evaluated literally at the state `s`.
    pub fn supports_mask(&self, s: u64, env: &mut Env, f: &Formula) -> Result<bool, SemanticsError> {
        Ok(match f {
            Formula::Bot => s == 0,
            Formula::Atom(p, args) => s & !self.atom_truth(p, args, env)? == 0,
            Formula::And(a, b) => self.supports_mask(s, env, a)? && self.supports_mask(s, env, b)?,
            Formula::IDisj(a, b) => {
                self.supports_mask(s, env, a)? || self.supports_mask(s, env, b)?
            }
            Formula::Implies(a, b) => {
                for t in submasks(s) {
                    if self.supports_mask(t, env, a)? && !self.supports_mask(t, env, b)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Forall(x, a) => {
                for d in 0..self.nd {
                    env.push((x.clone(), d));
                    let r = self.supports_mask(s, env, a);
                    env.pop();
                    if !r? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::IExists(x, a) => {
                for d in 0..self.nd {
                    env.push((x.clone(), d));
                    let r = self.supports_mask(s, env, a);
                    env.pop();
                    if r? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    /// The set of all supporting states, as a bitset indexed by state mask.
    pub fn support_set(&self, env: &mut Env, f: &Formula) -> Result<StateSet, SemanticsError> {
        if self.nw > MAX_SET_WORLDS {
            return Err(SemanticsError::TooManyWorlds(self.nw, MAX_SET_WORLDS));
        }
        let n = 1usize << self.nw;
        Ok(match f {
            Formula::Bot => StateSet::singleton(n, 0),
            Formula::Atom(p, args) => {
                let t = self.atom_truth(p, args, env)?;
                StateSet::from_fn(n, |s| s as u64 & !t == 0)
            }
            Formula::And(a, b) => self.support_set(env, a)?.and(&self.support_set(env, b)?),
            Formula::IDisj(a, b) => self.support_set(env, a)?.or(&self.support_set(env, b)?),
            Formula::Implies(a, b) => {
                let sa = self.support_set(env, a)?;
                let sb = self.support_set(env, b)?;
                // s qualifies iff every t ⊆ s supporting a also supports b;
                // states are visited in increasing order so proper subsets come first.
                let mut out = StateSet::empty(n);
                for s in 0..n {
                    let local = !sa.get(s) || sb.get(s);
                    let below = (0..self.nw).all(|w| s & (1 << w) == 0 || out.get(s & !(1 << w)));
                    if local && below {
                        out.set(s);
                    }
                }
                out
            }
            Formula::Forall(x, a) | Formula::IExists(x, a) => {
                let universal = matches!(f, Formula::Forall(..));
                let mut acc = if universal { StateSet::full(n) } else { StateSet::empty(n) };
                for d in 0..self.nd {
                    env.push((x.clone(), d));
                    let r = self.support_set(env, a);
                    env.pop();
                    let r = r?;
                    acc = if universal { acc.and(&r) } else { acc.or(&r) };
                }
                acc
            }
        })
    }

    pub fn labelled_supports_idx(
        &self,
        naming: &dyn Fn(u32) -> Option<usize>,
        env: &mut Env,
        lf: &LabelledFormula,
    ) -> Result<bool, SemanticsError> {
        let mut s = 0u64;
        for k in lf.label.iter() {
            let w = naming(k).ok_or(SemanticsError::MissingNaming(k))?;
            s |= 1 << w;
        }
        self.supports_mask(s, env, &lf.formula)
    }

    pub fn sequent_valid_idx(
        &self,
        naming: &dyn Fn(u32) -> Option<usize>,
        env: &mut Env,
        seq: &Sequent,
    ) -> Result<bool, SemanticsError> {
        for lf in &seq.ante {
            if !self.labelled_supports_idx(naming, env, lf)? {
                return Ok(true);
            }
        }
        for lf in &seq.succ {
            if self.labelled_supports_idx(naming, env, lf)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Rebuild a named model. Worlds are `w0..`, elements `d0..`.
    pub fn to_model(&self) -> Model {
        let worlds: Vec<String> = (0..self.nw).map(|i| format!("w{i}")).collect();
        let domain: Vec<String> = (0..self.nd).map(|i| format!("d{i}")).collect();
        let mut interp = BTreeMap::new();
        for (p, (arity, table)) in &self.preds {
            let mut per_world: BTreeMap<String, BTreeSet<Vec<String>>> = BTreeMap::new();
            for (idx, &mask) in table.iter().enumerate() {
                let mut tuple = Vec::with_capacity(*arity);
                let mut rest = idx;
                for _ in 0..*arity {
                    tuple.push(domain[rest % self.nd].clone());
                    rest /= self.nd;
                }
                for (w, name) in worlds.iter().enumerate() {
                    if mask & (1 << w) != 0 {
                        per_world.entry(name.clone()).or_default().insert(tuple.clone());
                    }
                }
            }
            interp.insert(p.to_string(), per_world);
        }
        Model { worlds, domain, interp }
    }

    /// Builds the `index`-th interpretation of `sig` over `nw` worlds and
    /// `nd` elements; bit i of `index` fixes one (predicate, tuple, world) cell.
    pub fn from_bits(sig: &[Predicate], nw: usize, nd: usize, index: u64) -> IndexedModel {
        let mut preds = HashMap::new();
        let mut bit = 0u32;
        for p in sig {
            let size = nd.pow(p.arity as u32);
            let mut table = vec![0u64; size];
            for cell in table.iter_mut() {
                for w in 0..nw {
                    if index >> bit & 1 == 1 {
                        *cell |= 1 << w;
                    }
                    bit += 1;
                }
            }
            preds.insert(p.name.clone(), (p.arity, table));
        }
        IndexedModel { nw, nd, preds }
    }

    pub fn interpretation_bits(sig: &[Predicate], nw: usize, nd: usize) -> usize {
        sig.iter().map(|p| nw * nd.pow(p.arity as u32)).sum()
    }
}

/// Bitset over the states of a model with at most [`MAX_SET_WORLDS`] worlds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSet {
    n: usize,
    words: Vec<u64>,
}

impl StateSet {
    fn empty(n: usize) -> Self {
        StateSet { n, words: vec![0; n.div_ceil(64)] }
    }
    fn full(n: usize) -> Self {
        Self::from_fn(n, |_| true)
    }
    fn singleton(n: usize, s: usize) -> Self {
        let mut r = Self::empty(n);
        r.set(s);
        r
    }
    fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Self {
        let mut r = Self::empty(n);
        for s in 0..n {
            if f(s) {
                r.set(s);
            }
        }
        r
    }
    fn set(&mut self, s: usize) {
        self.words[s / 64] |= 1 << (s % 64);
    }
    pub fn get(&self, s: usize) -> bool {
        self.words[s / 64] >> (s % 64) & 1 == 1
    }
    fn and(&self, o: &Self) -> Self {
        StateSet { n: self.n, words: self.words.iter().zip(&o.words).map(|(a, b)| a & b).collect() }
    }
    fn or(&self, o: &Self) -> Self {
        StateSet { n: self.n, words: self.words.iter().zip(&o.words).map(|(a, b)| a | b).collect() }
    }
    pub fn is_full(&self) -> bool {
        (0..self.n).all(|s| self.get(s))
    }
    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

pub fn supports(m: &Model, s: &State, g: &Assignment, f: &Formula) -> Result<bool, SemanticsError> {
    let im = m.index()?;
    let mask = m.state_mask(s)?;
    let mut env = m.env(g)?;
    im.supports_mask(mask, &mut env, f)
}

fn naming_fn<'a>(
    m: &'a Model,
    naming: &'a WorldNaming,
) -> Result<impl Fn(u32) -> Option<usize> + 'a, SemanticsError> {
    for w in naming.values() {
        if !m.worlds.contains(w) {
            return Err(SemanticsError::UnknownWorld(w.clone()));
        }
    }
    Ok(move |k: u32| naming.get(&k).and_then(|w| m.worlds.iter().position(|x| x == w)))
}

pub fn labelled_supports(
    m: &Model,
    naming: &WorldNaming,
    g: &Assignment,
    lf: &LabelledFormula,
) -> Result<bool, SemanticsError> {
    let im = m.index()?;
    let mut env = m.env(g)?;
    let nf = naming_fn(m, naming)?;
    im.labelled_supports_idx(&nf, &mut env, lf)
}

pub fn sequent_valid_in(
    m: &Model,
    naming: &WorldNaming,
    g: &Assignment,
    seq: &Sequent,
) -> Result<bool, SemanticsError> {
    let im = m.index()?;
    let mut env = m.env(g)?;
    let nf = naming_fn(m, naming)?;
    im.sequent_valid_idx(&nf, &mut env, seq)
}

/// Bounds for exhaustive model enumeration.
#[derive(Clone, Copy, Debug)]
pub struct BruteForceConfig {
    /// Maximum number of interpretation bits per (worlds, domain) size.
    pub max_bits: usize,
}

impl Default for BruteForceConfig {
    fn default() -> Self {
        BruteForceConfig { max_bits: 24 }
    }
}

/// A refutation found by exhaustive search.
#[derive(Clone, Debug, Serialize)]
pub struct Refutation {
    pub model: Model,
    pub state: Vec<String>,
    pub assignment: Assignment,
}

pub fn brute_force_valid(f: &Formula, max_worlds: usize, max_domain: usize) -> Result<bool, SemanticsError> {
    Ok(brute_force_refute(f, max_worlds, max_domain, BruteForceConfig::default())?.is_none())
}

/// Searches all models up to the bounds, every state and every assignment of
/// the free variables. Returns the first refutation in enumeration order.
pub fn brute_force_refute(
    f: &Formula,
    max_worlds: usize,
    max_domain: usize,
    cfg: BruteForceConfig,
) -> Result<Option<Refutation>, SemanticsError> {
    let mut sig = BTreeSet::new();
    f.predicates(&mut sig);
    let sig: Vec<Predicate> = sig.into_iter().collect();
    let free: Vec<Var> = f.free_vars().into_iter().collect();
    for nw in 1..=max_worlds.max(1) {
        if nw > MAX_SET_WORLDS {
            return Err(SemanticsError::TooManyWorlds(nw, MAX_SET_WORLDS));
        }
        for nd in 1..=max_domain.max(1) {
            let bits = IndexedModel::interpretation_bits(&sig, nw, nd);
            if bits > cfg.max_bits {
                return Err(SemanticsError::EnumerationCap { bits, cap: cfg.max_bits });
            }
            let found = (0..1u64 << bits)
                .into_par_iter()
                .map(|index| -> Result<Option<Refutation>, SemanticsError> {
                    let im = IndexedModel::from_bits(&sig, nw, nd, index);
                    refute_in(&im, f, &free)
                })
                .find_first(|r| !matches!(r, Ok(None)));
            if let Some(r) = found {
                return r;
            }
        }
    }
    Ok(None)
}

fn refute_in(im: &IndexedModel, f: &Formula, free: &[Var]) -> Result<Option<Refutation>, SemanticsError> {
    let combos = im.nd.pow(free.len() as u32);
    for c in 0..combos {
        let mut env: Env = Vec::with_capacity(free.len());
        let mut rest = c;
        for v in free {
            env.push((v.clone(), rest % im.nd));
            rest /= im.nd;
        }
        let set = im.support_set(&mut env, f)?;
        if let Some(s) = (0..set.len()).find(|&s| !set.get(s)) {
            let model = im.to_model();
            let state = (0..im.nw).filter(|w| s >> w & 1 == 1).map(|w| model.worlds[w].clone()).collect();
            let assignment = env.iter().map(|(v, d)| (v.to_string(), model.domain[*d].clone())).collect();
            return Ok(Some(Refutation { model, state, assignment }));
        }
    }
    Ok(None)
}

/// Labels in use by a sequent, as a sorted list.
pub fn label_elements(seq: &Sequent) -> Vec<u32> {
    let mut all = Label::EMPTY;
    for lf in seq.ante.iter().chain(&seq.succ) {
        all = all.union(lf.label);
    }
    all.iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn two_world_p_at_w1() -> Model {
        serde_json::from_str(r#"{"worlds":["w1","w2"],"domain":["d"],"interp":{"p":{"w1":[[]]}}}"#)
            .unwrap()
    }

    fn st(ws: &[&str]) -> State {
        ws.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn bot_at_empty_state() {
        let m = two_world_p_at_w1();
        assert!(supports(&m, &st(&[]), &Assignment::new(), &Formula::Bot).unwrap());
        assert!(!supports(&m, &st(&["w1"]), &Assignment::new(), &Formula::Bot).unwrap());
    }

    #[test]
    fn atom_at_singleton() {
        let m = two_world_p_at_w1();
        assert!(supports(&m, &st(&["w1"]), &Assignment::new(), &parse("p").unwrap()).unwrap());
        assert!(!supports(&m, &st(&["w2"]), &Assignment::new(), &parse("p").unwrap()).unwrap());
    }

    #[test]
    fn question_fails_on_mixed_state() {
        let m = two_world_p_at_w1();
        let q = parse("?p").unwrap();
        assert!(!supports(&m, &st(&["w1", "w2"]), &Assignment::new(), &q).unwrap());
        assert!(supports(&m, &st(&["w2"]), &Assignment::new(), &q).unwrap());
    }

    #[test]
    fn unassigned_variable_reported() {
        let m = two_world_p_at_w1();
        let r = supports(&m, &st(&["w1"]), &Assignment::new(), &parse("P(x)").unwrap());
        assert!(matches!(r, Err(SemanticsError::UnassignedVariable(_))));
    }

    #[test]
    fn labelled_collapse() {
        let m = two_world_p_at_w1();
        let naming: WorldNaming = [(1, "w1".to_string()), (2, "w1".to_string())].into();
        let lf = LabelledFormula::new(Label::from_slice(&[1, 2]).unwrap(), parse("p").unwrap());
        assert!(labelled_supports(&m, &naming, &Assignment::new(), &lf).unwrap());
        let missing = LabelledFormula::new(Label::from_slice(&[3]).unwrap(), parse("p").unwrap());
        assert!(matches!(
            labelled_supports(&m, &naming, &Assignment::new(), &missing),
            Err(SemanticsError::MissingNaming(3))
        ));
    }

    #[test]
    fn brute_force_examples() {
        assert!(brute_force_valid(&parse("~~p -> p").unwrap(), 4, 1).unwrap());
        assert!(!brute_force_valid(&parse("?p").unwrap(), 2, 1).unwrap());
        let cd = parse("(forall x. P(x) \\/ q) -> (forall x. P(x)) \\/ q").unwrap();
        assert!(brute_force_valid(&cd, 2, 2).unwrap());
    }

    #[test]
    fn brute_force_reports_cap() {
        let f = parse("R(x,y,z) -> R(x,y,z)").unwrap();
        let r = brute_force_refute(&f, 3, 3, BruteForceConfig { max_bits: 20 });
        assert!(matches!(r, Err(SemanticsError::EnumerationCap { .. })));
    }

    #[test]
    fn literal_and_set_evaluators_agree() {
        use crate::syntax::random::{random_formula, GenConfig};
        use rand::SeedableRng;
        let cfg = GenConfig::monadic("P", &["x", "y"], 4);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let sig = [Predicate::new("P", 1)];
        for _ in 0..200 {
            let f = random_formula(&mut rng, &cfg);
            for index in 0..64u64 {
                let im = IndexedModel::from_bits(&sig, 3, 2, index);
                let mut env: Env = vec![(Var::from("x"), 0), (Var::from("y"), 1)];
                let set = im.support_set(&mut env, &f).unwrap();
                for s in 0..8u64 {
                    assert_eq!(set.get(s as usize), im.supports_mask(s, &mut env, &f).unwrap());
                }
            }
        }
    }

    #[test]
    fn model_json_round_trip() {
        let m = two_world_p_at_w1();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<Model>(&text).unwrap(), m);
    }
}
