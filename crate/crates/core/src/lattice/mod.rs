//! Monotone functions on finite lattices: final sequences, greatest fixpoints and
//! the companion `t(x) = ⋀ { b_i | x ≤ b_i }`.
//!
//! On a finite lattice the decreasing sequence `⊤ = b_0 ≥ b_1 ≥ …` stabilizes after
//! at most `|L|` steps, so quantifying over all ordinal stages reduces to the finite
//! list computed by [`final_sequence`].

mod enumerate;
mod json;

use std::fmt;

use rand::Rng;

use crate::error::LatticeError;

pub use enumerate::{all_lattices_up_to, monotone_functions, MAX_ENUMERATION};
pub use json::{function_from_json, function_to_json, lattice_from_json, lattice_to_json};

/// A finite lattice with precomputed order, meet and join tables. Elements are `0..len`.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    top: usize,
    bottom: usize,
}

impl fmt::Debug for FiniteLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteLattice").field("elements", &self.names).finish()
    }
}

impl FiniteLattice {
    /// Validate a partial order given as a full `≤` matrix and build the tables.
    pub fn from_order(names: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self, LatticeError> {
        let n = names.len();
        if n == 0 {
            return Err(LatticeError::Input("a lattice needs at least one element".into()));
        }
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(LatticeError::Input("order matrix has the wrong size".into()));
        }
        for a in 0..n {
            if !leq[a][a] {
                return Err(LatticeError::NotPartialOrder(format!("{} is not ≤ itself", names[a])));
            }
            for b in 0..n {
                if a != b && leq[a][b] && leq[b][a] {
                    return Err(LatticeError::NotPartialOrder(format!("{} and {} are ≤ each other", names[a], names[b])));
                }
                for c in 0..n {
                    if leq[a][b] && leq[b][c] && !leq[a][c] {
                        return Err(LatticeError::NotPartialOrder(format!(
                            "{} ≤ {} ≤ {} but not {} ≤ {}",
                            names[a], names[b], names[c], names[a], names[c]
                        )));
                    }
                }
            }
        }
        let bound = |a: usize, b: usize, lower: bool| -> Option<usize> {
            let below = |x: usize, y: usize| if lower { leq[x][y] } else { leq[y][x] };
            let cands: Vec<usize> = (0..n).filter(|&c| below(c, a) && below(c, b)).collect();
            cands.iter().copied().find(|&c| cands.iter().all(|&d| below(d, c)))
        };
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                meet[a][b] = bound(a, b, true).ok_or_else(|| LatticeError::MissingBound(names[a].clone(), names[b].clone(), "meet"))?;
                join[a][b] = bound(a, b, false).ok_or_else(|| LatticeError::MissingBound(names[a].clone(), names[b].clone(), "join"))?;
            }
        }
        let top = (0..n).find(|&t| (0..n).all(|x| leq[x][t])).expect("finite lattices are bounded");
        let bottom = (0..n).find(|&t| (0..n).all(|x| leq[t][x])).expect("finite lattices are bounded");
        Ok(FiniteLattice { names, leq, meet, join, top, bottom })
    }

    /// Build from covering pairs `(a, b)` meaning `a < b`; the order is their
    /// reflexive-transitive closure.
    pub fn from_covers(names: Vec<String>, covers: &[(usize, usize)]) -> Result<Self, LatticeError> {
        let n = names.len();
        let mut leq = vec![vec![false; n]; n];
        for (a, row) in leq.iter_mut().enumerate() {
            row[a] = true;
        }
        for &(a, b) in covers {
            if a >= n || b >= n {
                return Err(LatticeError::Input(format!("cover ({a}, {b}) out of range")));
            }
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i][k] && leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        Self::from_order(names, leq)
    }

    /// `P({1, …, n})` ordered by inclusion; element `m` is the subset with bitmask `m`.
    pub fn powerset(n: usize) -> Result<Self, LatticeError> {
        if n > 5 {
            return Err(LatticeError::Input(format!("powerset of a {n}-element set is too large; use n <= 5")));
        }
        let size = 1usize << n;
        let names = (0..size)
            .map(|m| {
                let items: Vec<String> = (0..n).filter(|b| m >> b & 1 == 1).map(|b| (b + 1).to_string()).collect();
                format!("{{{}}}", items.join(","))
            })
            .collect();
        let leq = (0..size).map(|a| (0..size).map(|b| a & b == a).collect()).collect();
        Self::from_order(names, leq)
    }

    /// `0 < 1 < … < n-1`.
    pub fn chain(n: usize) -> Result<Self, LatticeError> {
        let names = (0..n).map(|k| k.to_string()).collect();
        let leq = (0..n).map(|a| (0..n).map(|b| a <= b).collect()).collect();
        Self::from_order(names, leq)
    }

    /// `M3`: bottom, three incomparable atoms `a`, `b`, `c`, top.
    pub fn diamond() -> Self {
        let names = ["0", "a", "b", "c", "1"].map(String::from).to_vec();
        Self::from_covers(names, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]).expect("M3 is a lattice")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Result<usize, LatticeError> {
        self.names.iter().position(|n| n == name).ok_or_else(|| LatticeError::UnknownElement(name.into()))
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn meet_all(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    pub fn join_all(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    /// Covering pairs `(a, b)`: `a < b` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let lt = |a: usize, b: usize| a != b && self.leq(a, b);
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if lt(a, b) && !(0..n).any(|c| lt(a, c) && lt(c, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// A monotone endofunction, as a table indexed by element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonotoneFn {
    table: Vec<usize>,
}

impl MonotoneFn {
    /// Checks totality and monotonicity exhaustively.
    pub fn new(lat: &FiniteLattice, table: Vec<usize>) -> Result<Self, LatticeError> {
        if table.len() != lat.len() {
            return Err(LatticeError::TableSize { expected: lat.len(), got: table.len() });
        }
        if let Some(&bad) = table.iter().find(|&&y| y >= lat.len()) {
            return Err(LatticeError::UnknownElement(bad.to_string()));
        }
        for x in lat.elements() {
            for y in lat.elements() {
                if lat.leq(x, y) && !lat.leq(table[x], table[y]) {
                    return Err(LatticeError::NotMonotone(lat.name(x).into(), lat.name(y).into()));
                }
            }
        }
        Ok(MonotoneFn { table })
    }

    pub fn from_fn(lat: &FiniteLattice, f: impl Fn(usize) -> usize) -> Result<Self, LatticeError> {
        Self::new(lat, lat.elements().map(f).collect())
    }

    pub fn identity(lat: &FiniteLattice) -> Self {
        MonotoneFn { table: lat.elements().collect() }
    }

    pub fn constant(lat: &FiniteLattice, c: usize) -> Self {
        MonotoneFn { table: vec![c; lat.len()] }
    }

    /// `x ↦ join of g(y) over y ≤ x` for a random `g`; always monotone.
    pub fn random(lat: &FiniteLattice, rng: &mut impl Rng) -> Self {
        let g: Vec<usize> = lat.elements().map(|_| rng.gen_range(0..lat.len())).collect();
        let table = lat.elements().map(|x| lat.join_all(lat.elements().filter(|&y| lat.leq(y, x)).map(|y| g[y]))).collect();
        MonotoneFn { table }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// `self ∘ g`.
    pub fn after(&self, g: &MonotoneFn) -> MonotoneFn {
        MonotoneFn { table: g.table.iter().map(|&y| self.table[y]).collect() }
    }

    pub fn leq_pointwise(&self, lat: &FiniteLattice, g: &MonotoneFn) -> bool {
        lat.elements().all(|x| lat.leq(self.apply(x), g.apply(x)))
    }

    pub fn join_pointwise(&self, lat: &FiniteLattice, g: &MonotoneFn) -> MonotoneFn {
        MonotoneFn { table: lat.elements().map(|x| lat.join(self.apply(x), g.apply(x))).collect() }
    }

    /// `f ∘ b ≤ b ∘ f`.
    pub fn compatible_with(&self, lat: &FiniteLattice, b: &MonotoneFn) -> bool {
        self.after(b).leq_pointwise(lat, &b.after(self))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinalSequence {
    /// `b_0 = ⊤, b_1, …, b_k = νb`, without repeats.
    pub stages: Vec<usize>,
    pub nu: usize,
}

/// Iterate `b` from `⊤` until the first repeat. The result is checked to be a
/// fixpoint that dominates every post-fixpoint.
pub fn final_sequence(lat: &FiniteLattice, b: &MonotoneFn) -> FinalSequence {
    let mut stages = vec![lat.top()];
    loop {
        let next = b.apply(*stages.last().unwrap());
        if next == *stages.last().unwrap() {
            break;
        }
        stages.push(next);
    }
    let nu = *stages.last().unwrap();
    debug_assert!(lat.elements().all(|x| !lat.leq(x, b.apply(x)) || lat.leq(x, nu)));
    FinalSequence { stages, nu }
}

/// `t(x) = ⋀ { b_i | x ≤ b_i }`.
pub fn companion(lat: &FiniteLattice, b: &MonotoneFn) -> MonotoneFn {
    let seq = final_sequence(lat, b);
    MonotoneFn {
        table: lat.elements().map(|x| lat.meet_all(seq.stages.iter().copied().filter(|&s| lat.leq(x, s)))).collect(),
    }
}

/// `f ≤ t` iff `f(b_i) ≤ b_i` for every stage.
pub fn is_below_companion(lat: &FiniteLattice, f: &MonotoneFn, b: &MonotoneFn) -> bool {
    final_sequence(lat, b).stages.iter().all(|&s| lat.leq(f.apply(s), s))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UptoVerdict {
    /// Some `y` with `x ≤ y ≤ b(f(y))`, the greatest such in index order.
    pub witness: Option<usize>,
    /// Whether `x ≤ νb`; implied by a witness.
    pub below_nu: bool,
}

/// Coinduction up to `f`: look for an invariant `y` with `x ≤ y ≤ b(f(y))`.
/// Refused unless `f` is below the companion of `b`.
pub fn coinduction_upto(lat: &FiniteLattice, b: &MonotoneFn, f: &MonotoneFn, x: usize) -> Result<UptoVerdict, LatticeError> {
    if !is_below_companion(lat, f, b) {
        return Err(LatticeError::NotBelowCompanion);
    }
    let nu = final_sequence(lat, b).nu;
    let witness = lat.elements().rev().find(|&y| lat.leq(x, y) && lat.leq(y, b.apply(f.apply(y))));
    let below_nu = lat.leq(x, nu);
    assert!(witness.is_none() || below_nu, "coinduction up to a function below the companion proved x <= nu b falsely");
    Ok(UptoVerdict { witness, below_nu })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_sequence() {
        let l = FiniteLattice::diamond();
        let s = final_sequence(&l, &MonotoneFn::identity(&l));
        assert_eq!(s.stages, vec![l.top()]);
        assert_eq!(s.nu, l.top());
    }

    #[test]
    fn constant_bottom_sequence() {
        let l = FiniteLattice::chain(4).unwrap();
        let s = final_sequence(&l, &MonotoneFn::constant(&l, l.bottom()));
        assert_eq!(s.stages, vec![l.top(), l.bottom()]);
    }

    #[test]
    fn intersect_with_one() {
        let l = FiniteLattice::powerset(2).unwrap();
        let one = l.index("{1}").unwrap();
        let b = MonotoneFn::from_fn(&l, |x| l.meet(x, one)).unwrap();
        let s = final_sequence(&l, &b);
        assert_eq!(s.stages, vec![l.index("{1,2}").unwrap(), one]);
        assert_eq!(s.nu, one);
    }

    #[test]
    fn companion_examples() {
        let l = FiniteLattice::powerset(2).unwrap();
        let one = l.index("{1}").unwrap();
        let b = MonotoneFn::from_fn(&l, |x| l.meet(x, one)).unwrap();
        let t = companion(&l, &b);
        assert_eq!(t.apply(l.top()), l.top());
        assert_eq!(t.apply(one), one);
        assert_eq!(t.apply(l.index("{2}").unwrap()), l.top());
        assert_eq!(t.apply(l.bottom()), one);
    }

    #[test]
    fn below_companion_examples() {
        let l = FiniteLattice::diamond();
        let a = l.index("a").unwrap();
        let b = MonotoneFn::from_fn(&l, |x| l.meet(x, a)).unwrap();
        assert!(is_below_companion(&l, &MonotoneFn::identity(&l), &b));
        assert!(is_below_companion(&l, &b, &b));
        assert!(!is_below_companion(&l, &MonotoneFn::constant(&l, l.top()), &b));
    }

    #[test]
    fn upto_examples() {
        let l = FiniteLattice::diamond();
        let a = l.index("a").unwrap();
        let b = MonotoneFn::from_fn(&l, |x| l.meet(x, a)).unwrap();
        let t = companion(&l, &b);
        let v = coinduction_upto(&l, &b, &MonotoneFn::identity(&l), l.bottom()).unwrap();
        assert_eq!(v.witness, Some(a));
        assert_eq!(coinduction_upto(&l, &b, &t, a).unwrap().witness, Some(a));
        let c = l.index("c").unwrap();
        assert_eq!(coinduction_upto(&l, &b, &t, c).unwrap(), UptoVerdict { witness: None, below_nu: false });
        let top = MonotoneFn::constant(&l, l.top());
        assert_eq!(coinduction_upto(&l, &b, &top, a), Err(LatticeError::NotBelowCompanion));
    }

    #[test]
    fn rejects_non_lattices_and_non_monotone() {
        let names = ["0", "a", "b"].map(String::from).to_vec();
        assert!(matches!(FiniteLattice::from_covers(names, &[(0, 1), (0, 2)]), Err(LatticeError::MissingBound(..))));
        let l = FiniteLattice::chain(3).unwrap();
        assert!(matches!(MonotoneFn::new(&l, vec![2, 1, 0]), Err(LatticeError::NotMonotone(..))));
        assert!(matches!(MonotoneFn::new(&l, vec![0, 1]), Err(LatticeError::TableSize { .. })));
    }

    #[test]
    fn random_functions_are_monotone() {
        use rand::SeedableRng;
        let l = FiniteLattice::powerset(4).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let f = MonotoneFn::random(&l, &mut rng);
            assert!(MonotoneFn::new(&l, f.table().to_vec()).is_ok());
        }
    }
}
