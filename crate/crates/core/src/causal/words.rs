//! Word-level membership for language operations. Each combinator decides `w ∈ op(L…)`
//! by querying memberships of words no longer than `w`.

use crate::behavior::{Approximant, Tree};
use crate::value::Value;

pub(crate) type Member<'a> = dyn Fn(&[usize]) -> bool + 'a;

pub(crate) fn concat(l: &Member, k: &Member, w: &[usize]) -> bool {
    (0..=w.len()).any(|s| l(&w[..s]) && k(&w[s..]))
}

/// `w ∈ L*`: split into non-empty factors from `L`.
pub(crate) fn star(l: &Member, w: &[usize]) -> bool {
    let n = w.len();
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for j in 1..=n {
        reach[j] = (0..j).any(|k| reach[k] && l(&w[k..j]));
    }
    reach[n]
}

/// `w ∈ L1 · L2 · … · Lk` (the empty product is `{ε}`).
pub(crate) fn product(ls: &[&Member], w: &[usize]) -> bool {
    let n = w.len();
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for l in ls {
        let mut next = vec![false; n + 1];
        for (a, _) in reach.iter().enumerate().filter(|(_, r)| **r) {
            for (b, slot) in next.iter_mut().enumerate().skip(a) {
                if !*slot && l(&w[a..b]) {
                    *slot = true;
                }
            }
        }
        reach = next;
    }
    reach[n]
}

/// `w ∈ L ⧢ K`: some choice of positions spells a word of `L`, the rest a word of `K`.
pub(crate) fn shuffle(l: &Member, k: &Member, w: &[usize]) -> bool {
    let n = w.len();
    assert!(n < 31, "word too long for shuffle membership");
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    (0u32..1 << n).any(|mask| {
        left.clear();
        right.clear();
        for (p, &a) in w.iter().enumerate() {
            if mask & (1 << p) != 0 {
                left.push(a);
            } else {
                right.push(a);
            }
        }
        l(&left) && k(&right)
    })
}

/// Dense membership table of a language approximant, indexed by shortlex position.
pub(crate) struct LangTable {
    k: usize,
    offsets: Vec<usize>,
    bits: Vec<bool>,
}

impl LangTable {
    pub(crate) fn new(a: &Approximant, k: usize) -> Self {
        let depth = a.depth();
        let mut offsets = Vec::with_capacity(depth + 1);
        let mut total = 0usize;
        let mut layer = 1usize;
        for _ in 0..=depth {
            offsets.push(total);
            total += layer;
            layer *= k.max(1);
        }
        let mut bits = vec![false; offsets[depth]];
        fn walk(t: &Tree, len: usize, code: usize, k: usize, offsets: &[usize], bits: &mut [bool]) {
            if let Tree::Node(n) = t {
                bits[offsets[len] + code] = n.out == Value::Bool(true);
                for (a, c) in n.children.iter().enumerate() {
                    walk(c, len + 1, code * k + a, k, offsets, bits);
                }
            }
        }
        walk(a.tree(), 0, 0, k, &offsets, &mut bits);
        LangTable { k, offsets, bits }
    }

    pub(crate) fn contains_code(&self, len: usize, code: usize) -> bool {
        len + 1 < self.offsets.len() && self.bits[self.offsets[len] + code]
    }

    pub(crate) fn contains(&self, w: &[usize]) -> bool {
        self.contains_code(w.len(), w.iter().fold(0, |acc, &a| acc * self.k + a))
    }

    /// `w ∈ self ⧢ other`, without allocating subsequences.
    pub(crate) fn shuffle_contains(&self, other: &LangTable, w: &[usize]) -> bool {
        let n = w.len();
        (0u64..1 << n).any(|mask| {
            let (mut ll, mut lc, mut rl, mut rc) = (0, 0, 0, 0);
            for (p, &a) in w.iter().enumerate() {
                if mask & (1 << p) != 0 {
                    ll += 1;
                    lc = lc * self.k + a;
                } else {
                    rl += 1;
                    rc = rc * other.k + a;
                }
            }
            self.contains_code(ll, lc) && other.contains_code(rl, rc)
        })
    }
}
