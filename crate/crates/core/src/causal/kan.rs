//! Finite stages of the finite powerset functor and the transformations
//! `c^x, c^y, d : P_•^X ⇒ P_•` for `X = {x, y}`.
//!
//! `c^x(f) = f(x)`, `c^y(f) = f(y)`, and `d(f) = f(x)` if `f(x) = ∅`, else `f(y)`.
//! All three are natural, `d` differs from both projections, yet for every `f` the
//! image sets `{c^x(f), c^y(f)}` and `{c^x(f), c^y(f), d(f)}` coincide. So the map
//! sending a set of transformations to its family of image sets is not injective.

use serde::Serialize;

use crate::error::CausalError;

/// A hereditarily finite set; an element of `P_i` for the stage it was built at.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HSet(pub Vec<HSet>);

impl HSet {
    fn from_unsorted(mut items: Vec<HSet>) -> HSet {
        items.sort();
        items.dedup();
        HSet(items)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `P_0 = 1 = {⋆}`, `P_{i+1} = P_f(P_i)`. `⋆` is represented by the empty list.
pub fn stage(i: usize) -> Vec<HSet> {
    let mut cur = vec![HSet(vec![])];
    for _ in 0..i {
        let n = cur.len();
        assert!(n < 31, "stage too large");
        cur = (0u32..1 << n)
            .map(|mask| HSet::from_unsorted((0..n).filter(|b| mask & (1 << b) != 0).map(|b| cur[b].clone()).collect()))
            .collect();
    }
    cur.sort();
    cur
}

/// The connecting map `P_{j,i}` (`j ≥ i`): iterated direct image, ending in `!` to `P_0`.
pub fn project(a: &HSet, j: usize, i: usize) -> HSet {
    assert!(i <= j);
    if i == 0 {
        return HSet(vec![]);
    }
    if i == j {
        return a.clone();
    }
    HSet::from_unsorted(a.0.iter().map(|e| project(e, j - 1, i - 1)).collect())
}

type Func = (HSet, HSet);

fn cx(f: &Func) -> HSet {
    f.0.clone()
}

fn cy(f: &Func) -> HSet {
    f.1.clone()
}

fn d(f: &Func) -> HSet {
    if f.0.is_empty() {
        f.0.clone()
    } else {
        f.1.clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KanReport {
    pub level: usize,
    pub stage_sizes: Vec<usize>,
    /// Number of functions `{x, y} → P_level`.
    pub functions: usize,
    /// Functions whose two image sets coincide.
    pub collapsed: usize,
    pub naturality_checks: usize,
    pub natural: bool,
    /// `d` differs from `c^x` and from `c^y` at this level.
    pub d_is_new: bool,
}

impl KanReport {
    pub fn passed(&self) -> bool {
        self.natural && self.collapsed == self.functions && (self.level == 0 || self.d_is_new)
    }
}

/// Materialize `P_0 … P_level` and verify naturality of `c^x`, `c^y`, `d` at every pair of
/// levels `i ≤ j ≤ level`, plus the image-set equality for every `f : {x, y} → P_level`.
pub fn powerset_kan_counterexample(level: usize) -> Result<KanReport, CausalError> {
    if level > 3 {
        return Err(CausalError::LevelTooLarge(level));
    }
    let stages: Vec<Vec<HSet>> = (0..=level).map(stage).collect();
    let mut checks = 0;
    let mut natural = true;
    for j in 0..=level {
        for i in 0..=j {
            for a in &stages[j] {
                for b in &stages[j] {
                    let f = (a.clone(), b.clone());
                    let fi = (project(a, j, i), project(b, j, i));
                    for t in [cx, cy, d] {
                        checks += 1;
                        natural &= project(&t(&f), j, i) == t(&fi);
                    }
                }
            }
        }
    }
    let top = &stages[level];
    let mut collapsed = 0;
    let mut differs_x = false;
    let mut differs_y = false;
    for a in top {
        for b in top {
            let f = (a.clone(), b.clone());
            let two = HSet::from_unsorted(vec![cx(&f), cy(&f)]);
            let three = HSet::from_unsorted(vec![cx(&f), cy(&f), d(&f)]);
            collapsed += usize::from(two == three);
            differs_x |= d(&f) != cx(&f);
            differs_y |= d(&f) != cy(&f);
        }
    }
    Ok(KanReport {
        level,
        stage_sizes: stages.iter().map(Vec::len).collect(),
        functions: top.len() * top.len(),
        collapsed,
        naturality_checks: checks,
        natural,
        d_is_new: differs_x && differs_y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_sizes() {
        assert_eq!(stage(0).len(), 1);
        assert_eq!(stage(1).len(), 2);
        assert_eq!(stage(2).len(), 4);
        assert_eq!(stage(3).len(), 16);
    }

    #[test]
    fn level_two_collapses_all_sixteen() {
        let r = powerset_kan_counterexample(2).unwrap();
        assert_eq!((r.functions, r.collapsed), (16, 16));
        assert!(r.passed());
    }

    #[test]
    fn level_zero_is_trivial() {
        let r = powerset_kan_counterexample(0).unwrap();
        assert_eq!(r.functions, 1);
        assert!(r.passed());
    }

    #[test]
    fn level_four_is_refused() {
        assert_eq!(powerset_kan_counterexample(4), Err(CausalError::LevelTooLarge(4)));
    }

    #[test]
    fn projection_composes() {
        for a in stage(3) {
            assert_eq!(project(&project(&a, 3, 2), 2, 1), project(&a, 3, 1));
        }
    }
}
