//! Intensional interpretations of `R` on `W = D = ω` refuting the Casari
//! instance with `φ(x) = ∃⃗y R(x,y)`, and checkers for the finitely
//! decidable claims about them.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CasariVariant {
    /// `(2m+1, 2m+1) ∈ I(R,i)`; `(2m, j) ∈ I(R,i)` iff `j ≠ i` and `j` is odd or `j > 2m`.
    A,
    /// `I(R,i) = {(n,k) | i < k or (k = n and n ≠ i)}`.
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CasariModelSpec {
    pub variant: CasariVariant,
}

impl CasariModelSpec {
    pub fn new(variant: CasariVariant) -> Self {
        CasariModelSpec { variant }
    }

    /// Whether `(n, k) ∈ I(R, i)`.
    pub fn member(&self, i: u64, n: u64, k: u64) -> bool {
        match self.variant {
            CasariVariant::A => {
                if n % 2 == 1 {
                    k == n
                } else {
                    k != i && (k % 2 == 1 || k > n)
                }
            }
            CasariVariant::B => i < k || (k == n && n != i),
        }
    }

    /// `k` witnesses `∃⃗y R(n, y)` at `s` when `(n,k) ∈ I(R,i)` for all `i ∈ s`.
    pub fn witnesses(&self, s: &BTreeSet<u64>, n: u64, k: u64) -> bool {
        s.iter().all(|&i| self.member(i, n, k))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimVerdict {
    pub holds: bool,
    pub witness: Option<u64>,
}

fn max_with(s: &BTreeSet<u64>, m: u64) -> u64 {
    s.iter().copied().max().unwrap_or(0).max(m)
}

/// Largest witness the claim-2 checker for variant A inspects.
pub fn claim2_bound(s: &BTreeSet<u64>, m: u64) -> u64 {
    2 * (max_with(s, m) + 1) + 1
}

/// Variant B witnesses are searched downwards from `max(s ∪ {m}) + 1`.
fn b_search(spec: &CasariModelSpec, s: &BTreeSet<u64>, n: u64, m: u64) -> ClaimVerdict {
    let top = max_with(s, m) + 1;
    let witness = (0..=top).rev().find(|&k| spec.witnesses(s, n, k));
    ClaimVerdict { holds: witness.is_some(), witness }
}

/// `∃⃗y R(2m+1, y)` is supported at `s`. Variant A uses the witness `2m+1`.
pub fn casari_claim1(spec: &CasariModelSpec, s: &BTreeSet<u64>, m: u64) -> ClaimVerdict {
    let n = 2 * m + 1;
    match spec.variant {
        CasariVariant::A => {
            let holds = spec.witnesses(s, n, n);
            ClaimVerdict { holds, witness: holds.then_some(n) }
        }
        CasariVariant::B => b_search(spec, s, n, m),
    }
}

/// `∃⃗y R(2m, y)` is supported at the finite state `s`. For variant A the
/// witness is some `n ∉ s` that is odd or an even number above `2m`,
/// searched up to [`claim2_bound`], odd candidates first.
pub fn casari_claim2_finite(spec: &CasariModelSpec, s: &BTreeSet<u64>, m: u64) -> ClaimVerdict {
    match spec.variant {
        CasariVariant::A => {
            let bound = claim2_bound(s, m);
            let odd = (0..=bound).filter(|n| n % 2 == 1);
            let even = (0..=bound).filter(|n| n % 2 == 0 && *n > 2 * m);
            let witness = odd.chain(even).find(|n| !s.contains(n) && spec.witnesses(s, 2 * m, *n));
            ClaimVerdict { holds: witness.is_some(), witness }
        }
        CasariVariant::B => b_search(spec, s, 2 * m, m),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepFailure {
    pub state: Vec<u64>,
    pub m: u64,
    pub claim: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub variant: CasariVariant,
    pub max_world: u64,
    pub max_m: u64,
    pub checks: usize,
    pub failures: Vec<SweepFailure>,
}

impl SweepReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Both claims for every `s ⊆ {0,…,max_world}` and `m ≤ max_m`.
pub fn casari_sweep(variant: CasariVariant, max_world: u64, max_m: u64) -> SweepReport {
    assert!(max_world < 20, "sweep window too large");
    let spec = CasariModelSpec::new(variant);
    let n_states = 1u64 << (max_world + 1);
    let failures: Vec<SweepFailure> = (0..n_states)
        .into_par_iter()
        .flat_map_iter(|bits| {
            let s: BTreeSet<u64> = (0..=max_world).filter(|i| bits >> i & 1 == 1).collect();
            (0..=max_m).flat_map(move |m| {
                let s = s.clone();
                [1u8, 2].into_iter().filter_map(move |claim| {
                    let v = if claim == 1 { casari_claim1(&spec, &s, m) } else { casari_claim2_finite(&spec, &s, m) };
                    (!v.holds).then(|| SweepFailure { state: s.iter().copied().collect(), m, claim })
                })
            })
        })
        .collect();
    SweepReport { variant, max_world, max_m, checks: (n_states * (max_m + 1) * 2) as usize, failures }
}
