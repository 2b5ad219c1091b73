use inqseq::calculus::{
    check_derivation, check_derivation_with, premises_of, prove, CheckOptions, Derivation, Label, LabelledFormula, Rule,
    RuleApp, SearchConfig, Sequent, Side,
};
use inqseq::syntax::random::{random_formula, GenConfig};
use inqseq::syntax::{var, Formula};
use inqseq::transform::{contract, cut, eliminate_cut, invert, subst_derivation, weaken};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn labels() -> Vec<Label> {
    Label::range(2).unwrap().nonempty_subsets()
}

fn try_prove(seq: &Sequent) -> Option<Derivation> {
    prove(seq, &SearchConfig::default()).derivation()
}

#[test]
fn random_cuts_eliminate() {
    let cfg = GenConfig::propositional(&["p", "q"], 3);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let ls = labels();
    let mut done = 0;
    let mut tries = 0;
    while done < 60 {
        tries += 1;
        assert!(tries < 200_000, "could not generate enough cut pairs");
        let a = LabelledFormula::new(*ls.choose(&mut rng).unwrap(), random_formula(&mut rng, &cfg));
        let g = LabelledFormula::new(*ls.choose(&mut rng).unwrap(), random_formula(&mut rng, &cfg));
        let h = LabelledFormula::new(*ls.choose(&mut rng).unwrap(), random_formula(&mut rng, &cfg));
        let Some(d1) = try_prove(&Sequent::new(vec![g.clone()], vec![a.clone()])) else { continue };
        let Some(d2) = try_prove(&Sequent::new(vec![a.clone()], vec![h.clone()])) else { continue };
        if d1.height == 0 && d2.height == 0 {
            continue;
        }
        let c = cut(&d1, &d2, &a).unwrap();
        check_derivation_with(&c, CheckOptions { allow_cut: true }).unwrap();
        let e = eliminate_cut(&c).unwrap_or_else(|err| panic!("{a} / {g} / {h}: {err}"));
        check_derivation(&e).unwrap_or_else(|r| panic!("{a} / {g} / {h}: {r}"));
        assert!(!e.uses_rule(Rule::Cut));
        assert!(e.conclusion.multiset_eq(&Sequent::new(vec![g], vec![h])));
        done += 1;
    }
}

#[test]
fn random_first_order_cuts_eliminate() {
    let cfg = GenConfig::monadic("P", &["x", "y"], 3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ls = labels();
    let mut done = 0;
    let mut tries = 0;
    let search = SearchConfig { pool_max: 3, node_limit: 20_000, ..SearchConfig::default() };
    while done < 25 && tries < 20_000 {
        tries += 1;
        let a = LabelledFormula::new(*ls.choose(&mut rng).unwrap(), random_formula(&mut rng, &cfg));
        let g = LabelledFormula::new(*ls.choose(&mut rng).unwrap(), random_formula(&mut rng, &cfg));
        let h = LabelledFormula::new(*ls.choose(&mut rng).unwrap(), random_formula(&mut rng, &cfg));
        let Some(d1) = prove(&Sequent::new(vec![g.clone()], vec![a.clone()]), &search).derivation() else { continue };
        let Some(d2) = prove(&Sequent::new(vec![a.clone()], vec![h.clone()]), &search).derivation() else { continue };
        let e = eliminate_cut(&cut(&d1, &d2, &a).unwrap()).unwrap_or_else(|err| panic!("{a} / {g} / {h}: {err}"));
        check_derivation(&e).unwrap_or_else(|r| panic!("{a} / {g} / {h}: {r}"));
        done += 1;
    }
    assert!(done >= 10, "only {done} first-order cut pairs generated");
}

fn random_derivations(n: usize, seed: u64) -> Vec<Derivation> {
    let cfg = GenConfig::monadic("P", &["x", "y"], 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ls = labels();
    let search = SearchConfig { pool_max: 3, node_limit: 20_000, ..SearchConfig::default() };
    let mut out = Vec::new();
    while out.len() < n {
        let k = rng.gen_range(0..3);
        let ante: Vec<LabelledFormula> =
            (0..k).map(|_| LabelledFormula::new(*ls.choose(&mut rng).unwrap(), random_formula(&mut rng, &cfg))).collect();
        let succ = vec![LabelledFormula::new(*ls.choose(&mut rng).unwrap(), random_formula(&mut rng, &cfg))];
        if let Some(d) = prove(&Sequent::new(ante, succ), &search).derivation() {
            if d.height > 0 {
                out.push(d);
            }
        }
    }
    out
}

#[test]
fn transformers_preserve_height() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for d in random_derivations(80, 3) {
        let h = d.height;
        let side = if rng.gen_bool(0.5) { Side::Left } else { Side::Right };
        let pool = d.conclusion.ante.iter().chain(&d.conclusion.succ).cloned().collect::<Vec<_>>();
        let lf = pool.choose(&mut rng).unwrap().clone();
        let lf_side = if d.conclusion.ante.contains(&lf) { Side::Left } else { Side::Right };

        let w = weaken(&d, side, &LabelledFormula::new(Label::range(1).unwrap(), Formula::atom("P", &["y"])));
        check_derivation(&w).unwrap();
        assert!(w.height <= h);

        let dup = weaken(&d, lf_side, &lf);
        let c = contract(&dup, lf_side, &lf).unwrap();
        check_derivation(&c).unwrap_or_else(|r| panic!("contract {lf}: {r}"));
        assert!(c.conclusion.multiset_eq(&d.conclusion));
        assert!(c.height <= h);

        let s = subst_derivation(&d, &var("x"), &var("y"));
        check_derivation(&s).unwrap();
        assert!(s.height <= h);

        if !d.rule.is_leaf() {
            let app = RuleApp { rule: d.rule, params: d.params.clone() };
            let n = premises_of(&d.conclusion, &app).unwrap().len();
            for idx in 0..n {
                let inv = invert(&d, &app, idx).unwrap();
                check_derivation(&inv).unwrap();
                assert!(inv.height <= h);
            }
        }
        // invert on some non-principal compound formula of the conclusion
        for lf in d.conclusion.ante.iter().chain(&d.conclusion.succ) {
            let left = d.conclusion.ante.contains(lf);
            let rule = match (&lf.formula, left) {
                (Formula::And(..), true) => Rule::AndL,
                (Formula::And(..), false) => Rule::AndR,
                (Formula::IDisj(..), true) => Rule::IDisjL,
                (Formula::IDisj(..), false) => Rule::IDisjR,
                (Formula::Implies(..), false) => Rule::ImpR,
                (Formula::Forall(..), false) => Rule::ForallR,
                (Formula::IExists(..), true) => Rule::IExistsL,
                _ => continue,
            };
            let mut app = RuleApp::new(rule, lf.clone());
            if rule.has_eigenvariable() {
                app = app.with_var(var("fresh"));
            }
            let n = premises_of(&d.conclusion, &app).unwrap().len();
            for idx in 0..n {
                let inv = invert(&d, &app, idx).unwrap_or_else(|e| panic!("invert {lf}: {e}"));
                check_derivation(&inv).unwrap_or_else(|r| panic!("invert {lf}: {r}"));
                assert!(inv.height <= h);
            }
        }
    }
}
