//! Seeded random formula generation for property tests and sweeps.

use rand::Rng;

use super::{var, Formula, Var};

/// Shape of the generated formulas.
#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Atoms to draw leaves from.
    pub atoms: Vec<Formula>,
    /// Variables usable as quantifier binders. Empty means propositional.
    pub binders: Vec<Var>,
    pub max_depth: usize,
    /// Probability of stopping early at an inner position.
    pub leaf_bias: f64,
    pub allow_bot: bool,
}

impl GenConfig {
    pub fn propositional(names: &[&str], max_depth: usize) -> Self {
        GenConfig {
            atoms: names.iter().map(|n| Formula::prop(n)).collect(),
            binders: Vec::new(),
            max_depth,
            leaf_bias: 0.25,
            allow_bot: true,
        }
    }

    pub fn monadic(pred: &str, vars: &[&str], max_depth: usize) -> Self {
        GenConfig {
            atoms: vars.iter().map(|v| Formula::atom(pred, &[v])).collect(),
            binders: vars.iter().map(|v| var(v)).collect(),
            max_depth,
            leaf_bias: 0.25,
            allow_bot: true,
        }
    }
}

pub fn random_formula<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Formula {
    gen(rng, cfg, cfg.max_depth)
}

fn leaf<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Formula {
    let n = cfg.atoms.len() + usize::from(cfg.allow_bot);
    let i = rng.gen_range(0..n);
    if i < cfg.atoms.len() {
        cfg.atoms[i].clone()
    } else {
        Formula::Bot
    }
}

fn gen<R: Rng>(rng: &mut R, cfg: &GenConfig, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(cfg.leaf_bias) {
        return leaf(rng, cfg);
    }
    let quant = if cfg.binders.is_empty() { 0 } else { 2 };
    match rng.gen_range(0..4 + quant) {
        0 => Formula::and(gen(rng, cfg, depth - 1), gen(rng, cfg, depth - 1)),
        1 => Formula::implies(gen(rng, cfg, depth - 1), gen(rng, cfg, depth - 1)),
        2 => Formula::idisj(gen(rng, cfg, depth - 1), gen(rng, cfg, depth - 1)),
        3 => Formula::not(gen(rng, cfg, depth - 1)),
        k => {
            let x = cfg.binders[rng.gen_range(0..cfg.binders.len())].clone();
            let body = gen(rng, cfg, depth - 1);
            if k == 4 {
                Formula::forall_v(x, body)
            } else {
                Formula::iexists_v(x, body)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn respects_depth_and_is_deterministic() {
        let cfg = GenConfig::propositional(&["p", "q"], 4);
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let f = random_formula(&mut a, &cfg);
            assert!(f.depth() <= 4);
            assert_eq!(f, random_formula(&mut b, &cfg));
        }
    }
}
