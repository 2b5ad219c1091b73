//! Labels, labelled sequents, the rules of the calculus, derivations, the
//! derivation checker and root-first proof search.

mod check;
pub mod json;
pub mod render;
pub mod search;
mod subexpr;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{subst_var, Formula, Var};

pub use check::{check_derivation, check_derivation_with, labels_in, resolved_app, CheckOptions, CheckReport};
pub use search::{goal_at, prove, SearchConfig, SearchOutcome, StuckSequent};
pub use subexpr::search_space_subexpressions;

/// Labels hold naturals below this bound.
pub const LABEL_CAPACITY: u32 = 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalcError {
    #[error("label element {0} exceeds the capacity of {LABEL_CAPACITY}")]
    LabelCapacity(u32),
    #[error("labels must be nonempty")]
    EmptyLabel,
    #[error("principal formula {0} not found in the conclusion")]
    PrincipalMissing(String),
    #[error("principal formula {0} has the wrong shape for rule {1}")]
    PrincipalShape(String, Rule),
    #[error("rule {0} needs parameter `{1}`")]
    MissingParam(Rule, &'static str),
    #[error("side condition: {0}")]
    SideCondition(String),
    #[error("rule {0} has no premises to compute")]
    NotAnInference(Rule),
}

/// Nonempty finite set of naturals below [`LABEL_CAPACITY`], one bit each.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(u64);

impl Label {
    /// The empty bit pattern; only used as an accumulator.
    pub(crate) const EMPTY: Label = Label(0);

    pub fn from_bits(bits: u64) -> Result<Label, CalcError> {
        if bits == 0 {
            return Err(CalcError::EmptyLabel);
        }
        if bits >> LABEL_CAPACITY != 0 {
            return Err(CalcError::LabelCapacity(63 - bits.leading_zeros()));
        }
        Ok(Label(bits))
    }

    pub fn from_slice(xs: &[u32]) -> Result<Label, CalcError> {
        let mut bits = 0u64;
        for &x in xs {
            if x >= LABEL_CAPACITY {
                return Err(CalcError::LabelCapacity(x));
            }
            bits |= 1 << x;
        }
        Label::from_bits(bits)
    }

    pub fn singleton(k: u32) -> Result<Label, CalcError> {
        Label::from_slice(&[k])
    }

    /// `{1, ..., n}`.
    pub fn range(n: u32) -> Result<Label, CalcError> {
        let xs: Vec<u32> = (1..=n).collect();
        Label::from_slice(&xs)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, k: u32) -> bool {
        k < 64 && self.0 >> k & 1 == 1
    }

    pub fn is_superset_of(self, other: Label) -> bool {
        other.0 & !self.0 == 0
    }

    pub fn union(self, other: Label) -> Label {
        Label(self.0 | other.0)
    }

    pub fn min(self) -> u32 {
        self.0.trailing_zeros()
    }

    pub fn iter(self) -> impl Iterator<Item = u32> {
        (0..64u32).filter(move |k| self.0 >> k & 1 == 1)
    }

    pub fn singletons(self) -> impl Iterator<Item = Label> {
        self.iter().map(|k| Label(1 << k))
    }

    /// Nonempty subsets ordered by cardinality, then lexicographically by
    /// their sorted element lists.
    pub fn nonempty_subsets(self) -> Vec<Label> {
        let elems: Vec<u32> = self.iter().collect();
        let n = elems.len();
        let mut out: Vec<Vec<u32>> = Vec::with_capacity((1usize << n).saturating_sub(1));
        for mask in 1u64..(1u64 << n) {
            out.push((0..n).filter(|i| mask >> i & 1 == 1).map(|i| elems[i]).collect());
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out.into_iter().map(|xs| Label::from_slice(&xs).expect("subset of a label")).collect()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, k) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelledFormula {
    pub label: Label,
    pub formula: Formula,
}

impl LabelledFormula {
    pub fn new(label: Label, formula: Formula) -> Self {
        LabelledFormula { label, formula }
    }

    /// Connective count; the label is disregarded.
    pub fn length(&self) -> usize {
        self.formula.length()
    }

    pub fn alpha_eq(&self, other: &LabelledFormula) -> bool {
        self.label == other.label && self.formula.alpha_eq(&other.formula)
    }

    pub(crate) fn key(&self) -> (Label, Formula) {
        (self.label, self.formula.canonical())
    }

    pub fn subst(&self, x: &Var, z: &Var) -> LabelledFormula {
        LabelledFormula::new(self.label, subst_var(&self.formula, x, z))
    }
}

impl fmt::Display for LabelledFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.label, self.formula)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// Two-sided sequent of labelled formulas, read as multisets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub ante: Vec<LabelledFormula>,
    pub succ: Vec<LabelledFormula>,
}

impl Sequent {
    pub fn new(ante: Vec<LabelledFormula>, succ: Vec<LabelledFormula>) -> Self {
        Sequent { ante, succ }
    }

    /// `⇒ X:φ`.
    pub fn goal(label: Label, f: Formula) -> Self {
        Sequent { ante: Vec::new(), succ: vec![LabelledFormula::new(label, f)] }
    }

    pub fn side(&self, side: Side) -> &Vec<LabelledFormula> {
        match side {
            Side::Left => &self.ante,
            Side::Right => &self.succ,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut Vec<LabelledFormula> {
        match side {
            Side::Left => &mut self.ante,
            Side::Right => &mut self.succ,
        }
    }

    pub fn with(mut self, side: Side, lf: LabelledFormula) -> Self {
        self.side_mut(side).push(lf);
        self
    }

    /// Removes one alpha-equivalent copy of `lf`; false if absent.
    pub fn remove_one(&mut self, side: Side, lf: &LabelledFormula) -> bool {
        let v = self.side_mut(side);
        if let Some(i) = v.iter().position(|x| x == lf).or_else(|| v.iter().position(|x| x.alpha_eq(lf))) {
            v.remove(i);
            true
        } else {
            false
        }
    }

    pub fn count(&self, side: Side, lf: &LabelledFormula) -> usize {
        self.side(side).iter().filter(|x| x.alpha_eq(lf)).count()
    }

    pub fn contains(&self, side: Side, lf: &LabelledFormula) -> bool {
        self.side(side).iter().any(|x| x.alpha_eq(lf))
    }

    /// Multiset union.
    pub fn merge(&self, other: &Sequent) -> Sequent {
        let mut s = self.clone();
        s.ante.extend(other.ante.iter().cloned());
        s.succ.extend(other.succ.iter().cloned());
        s
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for lf in self.ante.iter().chain(&self.succ) {
            out.extend(lf.formula.free_vars());
        }
        out
    }

    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for lf in self.ante.iter().chain(&self.succ) {
            lf.formula.all_vars(&mut out);
        }
        out
    }

    pub fn labels_union(&self) -> Option<Label> {
        let mut acc = Label::EMPTY;
        for lf in self.ante.iter().chain(&self.succ) {
            acc = acc.union(lf.label);
        }
        (!acc.is_empty()).then_some(acc)
    }

    pub fn subst(&self, x: &Var, z: &Var) -> Sequent {
        Sequent {
            ante: self.ante.iter().map(|lf| lf.subst(x, z)).collect(),
            succ: self.succ.iter().map(|lf| lf.subst(x, z)).collect(),
        }
    }

    /// Multiset equality up to alpha-equivalence.
    pub fn multiset_eq(&self, other: &Sequent) -> bool {
        self.canonical_key() == other.canonical_key()
    }

    pub(crate) fn canonical_key(&self) -> (Vec<(Label, Formula)>, Vec<(Label, Formula)>) {
        let mut a: Vec<_> = self.ante.iter().map(|lf| lf.key()).collect();
        let mut s: Vec<_> = self.succ.iter().map(|lf| lf.key()).collect();
        a.sort();
        s.sort();
        (a, s)
    }

    pub fn is_propositional(&self) -> bool {
        self.ante.iter().chain(&self.succ).all(|lf| lf.formula.is_propositional())
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &Vec<LabelledFormula>| {
            v.iter().map(|lf| lf.to_string()).collect::<Vec<_>>().join(", ")
        };
        let (a, s) = (join(&self.ante), join(&self.succ));
        match (a.is_empty(), s.is_empty()) {
            (true, true) => f.write_str("=>"),
            (true, false) => write!(f, "=> {s}"),
            (false, true) => write!(f, "{a} =>"),
            (false, false) => write!(f, "{a} => {s}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Id,
    BotL,
    AtR,
    AndR,
    AndL,
    IDisjR,
    IDisjL,
    ImpR,
    ImpL,
    ForallR,
    ForallL,
    IExistsR,
    IExistsL,
    Cut,
}

impl Rule {
    pub const ALL: [Rule; 14] = [
        Rule::Id,
        Rule::BotL,
        Rule::AtR,
        Rule::AndR,
        Rule::AndL,
        Rule::IDisjR,
        Rule::IDisjL,
        Rule::ImpR,
        Rule::ImpL,
        Rule::ForallR,
        Rule::ForallL,
        Rule::IExistsR,
        Rule::IExistsL,
        Rule::Cut,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Rule::Id => "id",
            Rule::BotL => "botL",
            Rule::AtR => "atR",
            Rule::AndR => "andR",
            Rule::AndL => "andL",
            Rule::IDisjR => "idisjR",
            Rule::IDisjL => "idisjL",
            Rule::ImpR => "impR",
            Rule::ImpL => "impL",
            Rule::ForallR => "forallR",
            Rule::ForallL => "forallL",
            Rule::IExistsR => "iexistsR",
            Rule::IExistsL => "iexistsL",
            Rule::Cut => "cut",
        }
    }

    pub fn from_tag(s: &str) -> Option<Rule> {
        Rule::ALL.iter().copied().find(|r| r.tag() == s)
    }

    pub fn is_leaf(self) -> bool {
        matches!(self, Rule::Id | Rule::BotL)
    }

    /// Side on which the principal formula sits.
    pub fn principal_side(self) -> Option<Side> {
        match self {
            Rule::AtR | Rule::AndR | Rule::IDisjR | Rule::ImpR | Rule::ForallR | Rule::IExistsR => {
                Some(Side::Right)
            }
            Rule::AndL | Rule::IDisjL | Rule::ImpL | Rule::ForallL | Rule::IExistsL | Rule::BotL => {
                Some(Side::Left)
            }
            Rule::Id | Rule::Cut => None,
        }
    }

    fn fits(self, f: &Formula) -> bool {
        matches!(
            (self, f),
            (Rule::AtR, Formula::Atom(..))
                | (Rule::AndR | Rule::AndL, Formula::And(..))
                | (Rule::IDisjR | Rule::IDisjL, Formula::IDisj(..))
                | (Rule::ImpR | Rule::ImpL, Formula::Implies(..))
                | (Rule::ForallR | Rule::ForallL, Formula::Forall(..))
                | (Rule::IExistsR | Rule::IExistsL, Formula::IExists(..))
                | (Rule::BotL, Formula::Bot)
        )
    }

    /// Rules with an eigenvariable condition.
    pub fn has_eigenvariable(self) -> bool {
        matches!(self, Rule::ForallR | Rule::IExistsL)
    }

    /// Rules instantiating with an arbitrary variable.
    pub fn has_instance(self) -> bool {
        matches!(self, Rule::ForallL | Rule::IExistsR)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Rule parameters. `principal` locates the principal formula by value;
/// when absent the checker tries every candidate.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Params {
    pub principal: Option<LabelledFormula>,
    /// Subset `Y` for `impL`.
    pub y: Option<Label>,
    /// Instance variable (forallL, iexistsR) or eigenvariable (forallR, iexistsL).
    pub var: Option<Var>,
    /// Cut formula for `cut` nodes.
    pub cut: Option<LabelledFormula>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleApp {
    pub rule: Rule,
    pub params: Params,
}

impl RuleApp {
    pub fn new(rule: Rule, principal: LabelledFormula) -> Self {
        RuleApp { rule, params: Params { principal: Some(principal), ..Params::default() } }
    }

    pub fn with_y(mut self, y: Label) -> Self {
        self.params.y = Some(y);
        self
    }

    pub fn with_var(mut self, v: Var) -> Self {
        self.params.var = Some(v);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub conclusion: Sequent,
    pub rule: Rule,
    pub params: Params,
    pub premises: Vec<Derivation>,
    /// Longest branch, counted in rule applications; leaves have height 0.
    pub height: usize,
    /// Free-form provenance marker, ignored by the checker.
    pub note: Option<String>,
}

impl Derivation {
    pub fn leaf(conclusion: Sequent, rule: Rule) -> Derivation {
        Derivation { conclusion, rule, params: Params::default(), premises: Vec::new(), height: 0, note: None }
    }

    pub fn node(conclusion: Sequent, app: RuleApp, premises: Vec<Derivation>) -> Derivation {
        let height = premises.iter().map(|p| p.height + 1).max().unwrap_or(0);
        Derivation { conclusion, rule: app.rule, params: app.params, premises, height, note: None }
    }

    /// Builds the node for `app` on `conclusion`, checking that the supplied
    /// premise derivations conclude the computed premises.
    pub fn infer(conclusion: Sequent, app: RuleApp, premises: Vec<Derivation>) -> Result<Derivation, CalcError> {
        let expected = premises_of(&conclusion, &app)?;
        if expected.len() != premises.len()
            || expected.iter().zip(&premises).any(|(e, d)| !e.multiset_eq(&d.conclusion))
        {
            return Err(CalcError::SideCondition(format!(
                "premises do not match rule {} on {}",
                app.rule, conclusion
            )));
        }
        Ok(Derivation::node(conclusion, app, premises))
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }

    pub fn app(&self) -> RuleApp {
        RuleApp { rule: self.rule, params: self.params.clone() }
    }

    pub fn recompute_height(&mut self) {
        self.height = self.premises.iter().map(|p| p.height + 1).max().unwrap_or(0);
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(|p| p.size()).sum::<usize>()
    }

    pub fn any_node(&self, pred: &mut dyn FnMut(&Derivation) -> bool) -> bool {
        pred(self) || self.premises.iter().any(|p| p.any_node(pred))
    }

    pub fn uses_rule(&self, r: Rule) -> bool {
        self.any_node(&mut |d| d.rule == r)
    }

    pub fn has_note(&self, note: &str) -> bool {
        self.any_node(&mut |d| d.note.as_deref() == Some(note))
    }

    /// All variables occurring anywhere, including rule parameters.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        out.extend(self.conclusion.all_vars());
        if let Some(v) = &self.params.var {
            out.insert(v.clone());
        }
        for p in &self.premises {
            p.collect_vars(out);
        }
    }
}

/// Initial-sequent test: `id` when some `X:P(x̄)` on the left and `Y:P(x̄)` on
/// the right satisfy `X ⊇ Y`; `botL` when some `X:⊥` is on the left.
pub fn is_initial(seq: &Sequent) -> Option<Rule> {
    if seq.ante.iter().any(|lf| lf.formula == Formula::Bot) {
        return Some(Rule::BotL);
    }
    for a in &seq.ante {
        if !a.formula.is_atom() {
            continue;
        }
        for s in &seq.succ {
            if s.formula == a.formula && a.label.is_superset_of(s.label) {
                return Some(Rule::Id);
            }
        }
    }
    None
}

fn instance(body: &Formula, x: &Var, z: &Var) -> Formula {
    subst_var(body, x, z)
}

/// Locates the principal formula and returns it with the conclusion minus it.
fn split_principal(seq: &Sequent, app: &RuleApp) -> Result<(LabelledFormula, Sequent), CalcError> {
    let side = app.rule.principal_side().ok_or(CalcError::NotAnInference(app.rule))?;
    let principal = match &app.params.principal {
        Some(p) => p.clone(),
        None => {
            let found: Vec<&LabelledFormula> =
                seq.side(side).iter().filter(|lf| app.rule.fits(&lf.formula)).collect();
            match found.as_slice() {
                [one] => (*one).clone(),
                [] => return Err(CalcError::PrincipalMissing(format!("for {}", app.rule))),
                _ => {
                    return Err(CalcError::SideCondition(format!(
                        "rule {} needs an explicit principal formula",
                        app.rule
                    )))
                }
            }
        }
    };
    if !app.rule.fits(&principal.formula) {
        return Err(CalcError::PrincipalShape(principal.to_string(), app.rule));
    }
    let mut rest = seq.clone();
    if !rest.remove_one(side, &principal) {
        return Err(CalcError::PrincipalMissing(principal.to_string()));
    }
    Ok((principal, rest))
}

/// Premises of `app` applied to `seq`, exactly as the rule prescribes.
pub fn premises_of(seq: &Sequent, app: &RuleApp) -> Result<Vec<Sequent>, CalcError> {
    if app.rule.is_leaf() || app.rule == Rule::Cut {
        return Err(CalcError::NotAnInference(app.rule));
    }
    let (p, rest) = split_principal(seq, app)?;
    let x = p.label;
    let lf = |l: Label, f: &Formula| LabelledFormula::new(l, f.clone());
    Ok(match (&app.rule, &p.formula) {
        (Rule::AtR, Formula::Atom(..)) => x
            .singletons()
            .map(|k| rest.clone().with(Side::Right, lf(k, &p.formula)))
            .collect(),
        (Rule::AndR, Formula::And(a, b)) => vec![
            rest.clone().with(Side::Right, lf(x, a)),
            rest.with(Side::Right, lf(x, b)),
        ],
        (Rule::AndL, Formula::And(a, b)) => {
            vec![rest.with(Side::Left, lf(x, a)).with(Side::Left, lf(x, b))]
        }
        (Rule::IDisjR, Formula::IDisj(a, b)) => {
            vec![rest.with(Side::Right, lf(x, a)).with(Side::Right, lf(x, b))]
        }
        (Rule::IDisjL, Formula::IDisj(a, b)) => vec![
            rest.clone().with(Side::Left, lf(x, a)),
            rest.with(Side::Left, lf(x, b)),
        ],
        (Rule::ImpR, Formula::Implies(a, b)) => x
            .nonempty_subsets()
            .into_iter()
            .map(|y| rest.clone().with(Side::Left, lf(y, a)).with(Side::Right, lf(y, b)))
            .collect(),
        (Rule::ImpL, Formula::Implies(a, b)) => {
            let y = app.params.y.ok_or(CalcError::MissingParam(Rule::ImpL, "Y"))?;
            if !x.is_superset_of(y) {
                return Err(CalcError::SideCondition(format!("impL needs {x} ⊇ {y}")));
            }
            let full = rest.with(Side::Left, p.clone());
            vec![full.clone().with(Side::Right, lf(y, a)), full.with(Side::Left, lf(y, b))]
        }
        (Rule::ForallR, Formula::Forall(v, body)) | (Rule::IExistsL, Formula::IExists(v, body)) => {
            let z = app.params.var.clone().ok_or(CalcError::MissingParam(app.rule, "var"))?;
            if seq.free_vars().contains(&z) {
                return Err(CalcError::SideCondition(format!(
                    "eigenvariable {z} of {} occurs free in the conclusion",
                    app.rule
                )));
            }
            let side = if app.rule == Rule::ForallR { Side::Right } else { Side::Left };
            vec![rest.with(side, LabelledFormula::new(x, instance(body, v, &z)))]
        }
        (Rule::ForallL, Formula::Forall(v, body)) => {
            let y = app.params.var.clone().ok_or(CalcError::MissingParam(Rule::ForallL, "var"))?;
            vec![rest
                .with(Side::Left, LabelledFormula::new(x, instance(body, v, &y)))
                .with(Side::Left, p.clone())]
        }
        (Rule::IExistsR, Formula::IExists(v, body)) => {
            let y = app.params.var.clone().ok_or(CalcError::MissingParam(Rule::IExistsR, "var"))?;
            vec![rest
                .with(Side::Right, p.clone())
                .with(Side::Right, LabelledFormula::new(x, instance(body, v, &y)))]
        }
        _ => return Err(CalcError::PrincipalShape(p.to_string(), app.rule)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn l(xs: &[u32]) -> Label {
        Label::from_slice(xs).unwrap()
    }

    fn lf(xs: &[u32], f: &str) -> LabelledFormula {
        LabelledFormula::new(l(xs), parse(f).unwrap())
    }

    #[test]
    fn label_capacity_is_enforced() {
        assert!(Label::from_slice(&[61]).is_ok());
        assert_eq!(Label::from_slice(&[62]), Err(CalcError::LabelCapacity(62)));
        assert_eq!(Label::from_slice(&[]), Err(CalcError::EmptyLabel));
    }

    #[test]
    fn subsets_in_canonical_order() {
        let subs = l(&[1, 2, 3]).nonempty_subsets();
        let shown: Vec<String> = subs.iter().map(|s| s.to_string()).collect();
        assert_eq!(shown, ["{1}", "{2}", "{3}", "{1,2}", "{1,3}", "{2,3}", "{1,2,3}"]);
    }

    #[test]
    fn imp_right_premise_count() {
        let seq = Sequent::new(vec![], vec![lf(&[1, 2], "p -> q")]);
        let ps = premises_of(&seq, &RuleApp::new(Rule::ImpR, lf(&[1, 2], "p -> q"))).unwrap();
        assert_eq!(ps.len(), 3);
        let seq4 = Sequent::new(vec![], vec![lf(&[1, 2, 3, 4], "p -> q")]);
        let ps = premises_of(&seq4, &RuleApp::new(Rule::ImpR, lf(&[1, 2, 3, 4], "p -> q"))).unwrap();
        assert_eq!(ps.len(), 15);
    }

    #[test]
    fn at_right_premises() {
        let seq = Sequent::new(vec![], vec![lf(&[1, 2], "P(x)")]);
        let ps = premises_of(&seq, &RuleApp::new(Rule::AtR, lf(&[1, 2], "P(x)"))).unwrap();
        assert_eq!(ps, vec![
            Sequent::new(vec![], vec![lf(&[1], "P(x)")]),
            Sequent::new(vec![], vec![lf(&[2], "P(x)")]),
        ]);
    }

    #[test]
    fn forall_left_repeats_principal() {
        let seq = Sequent::new(vec![lf(&[1], "forall x. P(x)")], vec![]);
        let app = RuleApp::new(Rule::ForallL, lf(&[1], "forall x. P(x)")).with_var(Var::from("y"));
        let ps = premises_of(&seq, &app).unwrap();
        assert_eq!(ps, vec![Sequent::new(vec![lf(&[1], "P(y)"), lf(&[1], "forall x. P(x)")], vec![])]);
    }

    #[test]
    fn eigenvariable_condition() {
        let seq = Sequent::new(vec![lf(&[1], "Q(z)")], vec![lf(&[1], "forall x. P(x)")]);
        let app = RuleApp::new(Rule::ForallR, lf(&[1], "forall x. P(x)")).with_var(Var::from("z"));
        assert!(matches!(premises_of(&seq, &app), Err(CalcError::SideCondition(_))));
    }

    #[test]
    fn initial_sequents() {
        let s = Sequent::new(vec![lf(&[1, 2], "P(x)")], vec![lf(&[1], "P(x)")]);
        assert_eq!(is_initial(&s), Some(Rule::Id));
        let s = Sequent::new(vec![lf(&[1], "P(x)")], vec![lf(&[1, 2], "P(x)")]);
        assert_eq!(is_initial(&s), None);
        let s = Sequent::new(vec![lf(&[3], "bot")], vec![]);
        assert_eq!(is_initial(&s), Some(Rule::BotL));
    }
}
