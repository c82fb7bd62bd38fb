//! Structural vanishing facts about ground rings, used only by synthesized (model) sources.

use num_bigint::BigInt;
use num_traits::One;

use crate::abgroup::FgAbGroup;
use crate::rings::{prime_power, RingDesc};

/// What is known to vanish for a ground ring without computing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundFacts {
    /// `K_j = 0` for all `j < 0`.
    pub negative_k_vanish: bool,
    /// `NK_j = 0` for all `j ≤ nk_vanish_through`; `None` when nothing is known.
    pub nk_vanish_through: Option<i64>,
    pub reason: String,
}

fn squarefree(n: u64) -> bool {
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

fn prime_factors(n: u64) -> Vec<u64> {
    let (mut m, mut p, mut out) = (n, 2, Vec::new());
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Facts for ground rings (no adjoined variables).
pub fn ground_facts(ring: &RingDesc) -> Option<GroundFacts> {
    let regular = |reason: &str| GroundFacts {
        negative_k_vanish: true,
        nk_vanish_through: Some(i64::MAX),
        reason: reason.to_string(),
    };
    match ring {
        RingDesc::FiniteField(_) => Some(regular("regular ring (field)")),
        RingDesc::Integers => Some(regular("regular ring (Dedekind domain)")),
        RingDesc::IntegersMod(n) if squarefree(*n) => Some(regular("regular ring (product of fields)")),
        RingDesc::IntegersMod(_) => Some(GroundFacts {
            negative_k_vanish: true,
            nk_vanish_through: Some(0),
            reason: "artinian ring (K₀-regular, no negative K-theory)".into(),
        }),
        RingDesc::Extension(_) => None,
    }
}

/// Higher K-groups `K_j`, `j ≥ 2`, of finite fields and finite products of prime fields:
/// `K_{2k}(F_q) = 0`, `K_{2k−1}(F_q) = ℤ/(q^k − 1)`.
pub fn finite_field_higher_k(ring: &RingDesc, j: i64) -> Option<FgAbGroup> {
    if j < 2 {
        return None;
    }
    let fields: Vec<u64> = match ring {
        RingDesc::FiniteField(f) => vec![f.order()],
        RingDesc::IntegersMod(n) if *n > 1 && squarefree(*n) => prime_factors(*n),
        RingDesc::IntegersMod(1) => Vec::new(),
        _ => return None,
    };
    debug_assert!(fields.iter().all(|q| prime_power(*q).is_some()));
    if j % 2 == 0 {
        return Some(FgAbGroup::trivial());
    }
    let k = ((j + 1) / 2) as u32;
    let orders: Vec<BigInt> = fields.iter().map(|&q| BigInt::from(q).pow(k) - BigInt::one()).collect();
    Some(FgAbGroup::from_orders(&orders))
}
