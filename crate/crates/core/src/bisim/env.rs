//! Atom declarations, hypotheses, empty-word flags and derivatives.

use std::collections::BTreeMap;

use super::{Atom, LangExpr};
use crate::error::BisimError;

/// Upper bound on symbolic atoms: truth tables are 64-bit masks over valuations.
pub const MAX_SYMBOLIC: usize = 6;

/// A boolean over the symbolic atoms, as the set of valuations where it holds.
/// Valuation `v` assigns `true` to symbolic atom `k` iff bit `k` of `v` is set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Truth(pub u64);

impl Truth {
    pub const TRUE: Truth = Truth(u64::MAX);
    pub const FALSE: Truth = Truth(0);

    pub fn var(k: usize) -> Truth {
        Truth((0..64u64).filter(|v| v >> k & 1 == 1).fold(0, |m, v| m | 1 << v))
    }

    pub fn constant(b: bool) -> Truth {
        if b {
            Truth::TRUE
        } else {
            Truth::FALSE
        }
    }

    pub fn is_true(self) -> bool {
        self == Truth::TRUE
    }

    pub fn is_false(self) -> bool {
        self == Truth::FALSE
    }

    pub fn and(self, o: Truth) -> Truth {
        Truth(self.0 & o.0)
    }

    pub fn or(self, o: Truth) -> Truth {
        Truth(self.0 | o.0)
    }

    /// Value under valuation `v`.
    pub fn at(self, v: usize) -> bool {
        self.0 >> v & 1 == 1
    }

    /// The first valuation where the two differ.
    pub fn first_difference(self, o: Truth) -> Option<usize> {
        let d = self.0 ^ o.0;
        (d != 0).then(|| d.trailing_zeros() as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtomFlag {
    True,
    False,
    Symbolic,
}

/// The setting of a proof: alphabet, atoms with their empty-word flags, and
/// hypotheses `L ↦ e` that define an atom by an equation.
///
/// Derivatives of declared atoms are fresh atoms with symbolic flags. A
/// hypothesized atom takes its flag and derivatives from its definition, which
/// must be guarded (the recursive occurrence sits behind a non-nullable factor).
#[derive(Clone, Debug)]
pub struct Env {
    alphabet: Vec<char>,
    atoms: BTreeMap<String, AtomFlag>,
    hypotheses: BTreeMap<String, LangExpr>,
    max_symbolic: usize,
    vars: Vec<Atom>,
    unfolding: Vec<String>,
}

impl Env {
    pub fn new(alphabet: &[char]) -> Self {
        let mut alphabet = alphabet.to_vec();
        alphabet.sort_unstable();
        alphabet.dedup();
        Env {
            alphabet,
            atoms: BTreeMap::new(),
            hypotheses: BTreeMap::new(),
            max_symbolic: 4,
            vars: Vec::new(),
            unfolding: Vec::new(),
        }
    }

    pub fn with_atom(mut self, name: impl Into<String>, flag: AtomFlag) -> Self {
        self.atoms.insert(name.into(), flag);
        self
    }

    pub fn with_hypothesis(mut self, name: impl Into<String>, def: LangExpr) -> Self {
        self.hypotheses.insert(name.into(), def);
        self
    }

    pub fn with_max_symbolic(mut self, n: usize) -> Self {
        self.max_symbolic = n.min(MAX_SYMBOLIC);
        self
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn atoms(&self) -> &BTreeMap<String, AtomFlag> {
        &self.atoms
    }

    pub fn hypotheses(&self) -> &BTreeMap<String, LangExpr> {
        &self.hypotheses
    }

    pub fn max_symbolic(&self) -> usize {
        self.max_symbolic
    }

    /// Symbolic atoms that have been given a truth variable, in allocation order.
    pub fn symbolic_atoms(&self) -> &[Atom] {
        &self.vars
    }

    /// The truth assignment of valuation `v` to the allocated symbolic atoms.
    pub fn valuation(&self, v: usize) -> Vec<(Atom, bool)> {
        self.vars.iter().enumerate().map(|(k, a)| (a.clone(), v >> k & 1 == 1)).collect()
    }

    /// Reject letters outside the alphabet and undeclared atoms.
    pub fn check(&self, e: &LangExpr) -> Result<(), BisimError> {
        match e {
            LangExpr::Letter(a) if !self.alphabet.contains(a) => Err(BisimError::UnknownLetter(*a)),
            LangExpr::Atom(a) if !self.atoms.contains_key(&a.name) && !self.hypotheses.contains_key(&a.name) => {
                Err(BisimError::UnknownAtom(a.name.clone()))
            }
            LangExpr::Sum(xs) => xs.iter().try_for_each(|x| self.check(x)),
            LangExpr::Cat(a, b) => {
                self.check(a)?;
                self.check(b)
            }
            LangExpr::Star(x) | LangExpr::Nu(x) => self.check(x),
            _ => Ok(()),
        }
    }

    /// Run `f` on the unfolded definition of a hypothesized atom, refusing re-entry.
    fn through_definition<T>(
        &mut self,
        a: &Atom,
        f: impl FnOnce(&mut Self, &LangExpr) -> Result<T, BisimError>,
    ) -> Result<T, BisimError> {
        if self.unfolding.contains(&a.name) {
            return Err(BisimError::Unguarded(a.name.clone()));
        }
        self.unfolding.push(a.name.clone());
        let r = self.unfold(a).and_then(|def| f(self, &def.expect("hypothesis present")));
        self.unfolding.pop();
        r
    }

    /// The definition of a hypothesized atom, differentiated along the atom's path.
    fn unfold(&mut self, a: &Atom) -> Result<Option<LangExpr>, BisimError> {
        let Some(def) = self.hypotheses.get(&a.name).cloned() else {
            return Ok(None);
        };
        let mut e = def;
        for l in a.path.chars() {
            e = self.deriv(&e, l)?;
        }
        Ok(Some(e))
    }

    fn atom_eps(&mut self, a: &Atom) -> Result<Truth, BisimError> {
        if self.hypotheses.contains_key(&a.name) {
            return self.through_definition(a, |env, def| env.eps(def));
        }
        match self.atoms.get(&a.name) {
            None => Err(BisimError::UnknownAtom(a.name.clone())),
            Some(AtomFlag::True) if a.path.is_empty() => Ok(Truth::TRUE),
            Some(AtomFlag::False) if a.path.is_empty() => Ok(Truth::FALSE),
            Some(_) => {
                if let Some(k) = self.vars.iter().position(|v| v == a) {
                    return Ok(Truth::var(k));
                }
                if self.vars.len() >= self.max_symbolic {
                    return Err(BisimError::TooManySymbolic(self.max_symbolic));
                }
                self.vars.push(a.clone());
                Ok(Truth::var(self.vars.len() - 1))
            }
        }
    }

    /// Nullability; symbolic when it depends on symbolic atoms.
    pub fn eps(&mut self, e: &LangExpr) -> Result<Truth, BisimError> {
        Ok(match e {
            LangExpr::Empty | LangExpr::Letter(_) => Truth::FALSE,
            LangExpr::Eps | LangExpr::Star(_) => Truth::TRUE,
            LangExpr::Atom(a) => self.atom_eps(a)?,
            LangExpr::Sum(xs) => {
                let mut t = Truth::FALSE;
                for x in xs {
                    t = t.or(self.eps(x)?);
                }
                t
            }
            LangExpr::Cat(a, b) => {
                let ta = self.eps(a)?;
                if ta.is_false() {
                    Truth::FALSE
                } else {
                    ta.and(self.eps(b)?)
                }
            }
            LangExpr::Nu(x) => self.eps(x)?,
        })
    }

    /// `{ε} ∩ e`, with constant flags resolved to `1` or `0`.
    fn guard(&mut self, e: &LangExpr) -> Result<LangExpr, BisimError> {
        let t = self.eps(e)?;
        if t.is_true() {
            return Ok(LangExpr::Eps);
        }
        if t.is_false() {
            return Ok(LangExpr::Empty);
        }
        Ok(match LangExpr::nu(e.clone()) {
            LangExpr::Sum(xs) => {
                let mut out = Vec::new();
                for x in xs {
                    out.push(self.guard(&x)?);
                }
                LangExpr::sum_all(out)
            }
            LangExpr::Cat(a, b) => LangExpr::cat(self.guard(&a)?, self.guard(&b)?),
            other => other,
        })
    }

    /// The Brzozowski derivative `e_a`.
    pub fn deriv(&mut self, e: &LangExpr, a: char) -> Result<LangExpr, BisimError> {
        Ok(match e {
            LangExpr::Empty | LangExpr::Eps | LangExpr::Nu(_) => LangExpr::Empty,
            LangExpr::Letter(b) if *b == a => LangExpr::Eps,
            LangExpr::Letter(_) => LangExpr::Empty,
            LangExpr::Atom(at) if self.hypotheses.contains_key(&at.name) => {
                self.through_definition(at, |env, def| env.deriv(def, a))?
            }
            LangExpr::Atom(at) => {
                if !self.atoms.contains_key(&at.name) {
                    return Err(BisimError::UnknownAtom(at.name.clone()));
                }
                LangExpr::Atom(at.deriv(a))
            }
            LangExpr::Sum(xs) => {
                let mut out = Vec::with_capacity(xs.len());
                for x in xs {
                    out.push(self.deriv(x, a)?);
                }
                LangExpr::sum_all(out)
            }
            LangExpr::Cat(x, y) => {
                let left = LangExpr::cat(self.deriv(x, a)?, (**y).clone());
                let g = self.guard(x)?;
                let right = if g == LangExpr::Empty { LangExpr::Empty } else { LangExpr::cat(g, self.deriv(y, a)?) };
                LangExpr::sum(left, right)
            }
            LangExpr::Star(x) => LangExpr::cat(self.deriv(x, a)?, e.clone()),
        })
    }

    pub fn deriv_word(&mut self, e: &LangExpr, w: &[char]) -> Result<LangExpr, BisimError> {
        let mut cur = e.clone();
        for &a in w {
            cur = self.deriv(&cur, a)?;
        }
        Ok(cur)
    }

    /// Membership of `w`, as a truth table over the symbolic atoms.
    pub fn accepts(&mut self, e: &LangExpr, w: &[char]) -> Result<Truth, BisimError> {
        let d = self.deriv_word(e, w)?;
        self.eps(&d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisim::parse_expr;

    fn p(s: &str) -> LangExpr {
        parse_expr(s).unwrap()
    }

    fn arden_env() -> Env {
        Env::new(&['a', 'b'])
            .with_atom("K", AtomFlag::False)
            .with_atom("M", AtomFlag::Symbolic)
            .with_hypothesis("L", p("KL + M"))
    }

    #[test]
    fn eps_rules() {
        let mut env = arden_env();
        assert!(env.eps(&p("K*")).unwrap().is_true());
        assert!(env.eps(&p("K·K*")).unwrap().is_false());
        let m = env.eps(&p("M")).unwrap();
        assert!(!m.is_true() && !m.is_false());
        assert_eq!(env.eps(&p("KL + M")).unwrap(), m);
        assert_eq!(env.eps(&p("L")).unwrap(), m);
    }

    #[test]
    fn arden_derivatives() {
        let mut env = arden_env();
        assert_eq!(env.deriv(&p("K*M"), 'a').unwrap(), p("K_a·K*·M + M_a"));
        assert_eq!(env.deriv(&p("KL + M"), 'a').unwrap(), p("K_a·L + M_a"));
        assert_eq!(env.deriv(&p("L"), 'b').unwrap(), p("K_b·L + M_b"));
        assert_eq!(env.deriv(&LangExpr::Empty, 'a').unwrap(), LangExpr::Empty);
    }

    #[test]
    fn symbolic_guard_is_kept() {
        let mut env = arden_env();
        assert_eq!(env.deriv(&p("M·a"), 'a').unwrap(), p("M_a·a + nu(M)"));
    }

    #[test]
    fn unguarded_hypothesis_is_reported() {
        let mut env = Env::new(&['a']).with_atom("K", AtomFlag::True).with_hypothesis("L", p("KL"));
        assert_eq!(env.eps(&p("L")), Err(BisimError::Unguarded("L".into())));
        assert_eq!(env.deriv(&p("L"), 'a'), Err(BisimError::Unguarded("L".into())));
    }

    #[test]
    fn symbolic_budget() {
        let mut env = Env::new(&['a']).with_atom("K", AtomFlag::Symbolic).with_max_symbolic(1);
        env.eps(&p("K")).unwrap();
        assert_eq!(env.eps(&p("K_a")), Err(BisimError::TooManySymbolic(1)));
    }

    #[test]
    fn truth_tables() {
        let (x, y) = (Truth::var(0), Truth::var(1));
        assert_eq!(x.and(y).first_difference(x), Some(1));
        assert!(x.or(Truth::TRUE).is_true());
        assert!(x.at(1) && !x.at(2));
    }
}
