use inqseq::calculus::{check_derivation, prove, search::goal_at, search_space_subexpressions, SearchConfig, SearchOutcome};
use inqseq::saturate::{closure_audit, verify_truth_lemma, SaturatedSequent};
use inqseq::semantics::brute_force_valid;
use inqseq::syntax::random::{random_formula, GenConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn propositional_search_decides_bounded_validity() {
    let cfg = GenConfig::propositional(&["p", "q"], 4);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 1..=3u32 {
        for _ in 0..60 {
            let f = random_formula(&mut rng, &cfg);
            let valid = brute_force_valid(&f, n as usize, 1).unwrap();
            match prove(&goal_at(n, f.clone()).unwrap(), &SearchConfig::default()) {
                SearchOutcome::Proved(d) => {
                    assert!(valid, "proved but invalid at {n}: {f}");
                    check_derivation(&d).unwrap();
                    assert!(search_space_subexpressions(&d), "{f}");
                }
                SearchOutcome::Refuted(stuck) => {
                    assert!(!valid, "refuted but valid at {n}: {f}");
                    let ss = SaturatedSequent::from_stuck(stuck, inqseq::calculus::Label::range(n).unwrap());
                    assert!(verify_truth_lemma(&ss).unwrap(), "{f}");
                    assert!(closure_audit(&ss, &SearchConfig::default()).is_empty(), "{f}");
                }
                SearchOutcome::Inconclusive { reason } => panic!("{f}: {reason}"),
            }
        }
    }
}
