//! Randomized causality and prefix-coherence checking.
//!
//! Every sample draws its own generator from `(seed, depth, index)`, so results do
//! not depend on scheduling and a fixed seed reproduces byte-identical verdicts.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{BehaviorArgs, CausalOperation, OpArgs, Shape};
use crate::behavior::{Approximant, BehaviorSignature, LazyBehavior, SignatureKind, Tree};
use crate::error::{BehaviorError, CausalError};
use crate::value::{Float, Value, ValueSort};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub max_depth: usize,
    pub samples: usize,
    pub seed: u64,
    /// Upper bound on `|X|`, set sizes and sequence lengths in sampled arguments.
    pub max_width: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { max_depth: 8, samples: 500, seed: 0x5eed_c0de, max_width: 3 }
    }
}

/// An element of `F X` for `X = {0, …, n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Tuple(Vec<usize>),
    Set(Vec<usize>),
    Seqs(Vec<Vec<usize>>),
}

impl Structure {
    /// `F h` for `h : X → B_d`, as arguments (sets re-normalized).
    pub fn image(&self, h: &[Approximant]) -> OpArgs {
        match self {
            Structure::Tuple(v) => OpArgs::Tuple(v.iter().map(|&x| h[x].clone()).collect()),
            Structure::Set(v) => OpArgs::set(v.iter().map(|&x| h[x].clone()).collect()),
            Structure::Seqs(v) => OpArgs::seqs(v.iter().map(|s| s.iter().map(|&x| h[x].clone()).collect()).collect()),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Structure::Tuple(v) => json!({ "tuple": v }),
            Structure::Set(v) => json!({ "set": v }),
            Structure::Seqs(v) => json!({ "seqs": v }),
        }
    }

    fn from_json(v: &serde_json::Value) -> Result<Self, BehaviorError> {
        let bad = || BehaviorError::Json(format!("bad structure {v}"));
        let idx = |a: &serde_json::Value| -> Result<Vec<usize>, BehaviorError> {
            a.as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|x| x.as_u64().map(|n| n as usize).ok_or_else(bad))
                .collect()
        };
        if let Some(a) = v.get("tuple") {
            return Ok(Structure::Tuple(idx(a)?));
        }
        if let Some(a) = v.get("set") {
            return Ok(Structure::Set(idx(a)?));
        }
        if let Some(a) = v.get("seqs") {
            return Ok(Structure::Seqs(a.as_array().ok_or_else(bad)?.iter().map(idx).collect::<Result<_, _>>()?));
        }
        Err(bad())
    }
}

/// Proof of non-causality: `f` and `g` agree up to `depth` everywhere on `X`, yet the
/// outputs on `F f` and `F g` differ at `depth`.
///
/// `f` and `g` are finite prefixes of depth `input_depth`, continued by the default padding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub symbol: String,
    pub depth: usize,
    pub input_depth: usize,
    pub structure: Structure,
    pub f: Vec<Approximant>,
    pub g: Vec<Approximant>,
    pub out_f: Approximant,
    pub out_g: Approximant,
}

fn lift(op: &CausalOperation, args: &OpArgs) -> BehaviorArgs {
    let l = |a: &Approximant| LazyBehavior::from_prefix(op.input().clone(), a.clone());
    match args {
        OpArgs::Tuple(v) => BehaviorArgs::Tuple(v.iter().map(l).collect()),
        OpArgs::Set(v) => BehaviorArgs::Set(v.iter().map(l).collect()),
        OpArgs::Seqs(v) => BehaviorArgs::Seqs(v.iter().map(|s| s.iter().map(l).collect()).collect()),
    }
}

fn eval_full(op: &CausalOperation, structure: &Structure, h: &[Approximant], i: usize) -> Result<Approximant, CausalError> {
    Ok(op.apply_full(&lift(op, &structure.image(h)))?.produce(i))
}

impl Witness {
    /// One-line description of the disagreement.
    pub fn summary(&self, op: &CausalOperation) -> String {
        format!(
            "inputs agree to depth {} but outputs differ: {} vs {}",
            self.depth,
            self.out_f.render(op.output()),
            self.out_g.render(op.output())
        )
    }

    /// Re-check agreement of the inputs and disagreement of the recomputed outputs.
    pub fn replay(&self, op: &CausalOperation) -> Result<(), String> {
        if op.symbol() != self.symbol {
            return Err(format!("witness is for `{}`, not `{}`", self.symbol, op.symbol()));
        }
        if self.f.len() != self.g.len() {
            return Err("f and g have different domains".into());
        }
        for (x, (a, b)) in self.f.iter().zip(&self.g).enumerate() {
            let pa = a.project(self.depth).map_err(|e| e.to_string())?;
            let pb = b.project(self.depth).map_err(|e| e.to_string())?;
            if pa != pb {
                return Err(format!("f({x}) and g({x}) differ below depth {}", self.depth));
            }
        }
        let of = eval_full(op, &self.structure, &self.f, self.depth).map_err(|e| e.to_string())?;
        let og = eval_full(op, &self.structure, &self.g, self.depth).map_err(|e| e.to_string())?;
        if of != self.out_f || og != self.out_g {
            return Err("recomputed outputs do not match the recorded ones".into());
        }
        if of == og {
            return Err("outputs agree; the witness does not refute causality".into());
        }
        Ok(())
    }

    pub fn to_json(&self, op: &CausalOperation) -> serde_json::Value {
        let inp = op.input();
        json!({
            "symbol": self.symbol,
            "depth": self.depth,
            "input_depth": self.input_depth,
            "structure": self.structure.to_json(),
            "f": self.f.iter().map(|a| a.to_json(inp)).collect::<Vec<_>>(),
            "g": self.g.iter().map(|a| a.to_json(inp)).collect::<Vec<_>>(),
            "out_f": self.out_f.to_json(op.output()),
            "out_g": self.out_g.to_json(op.output()),
        })
    }

    pub fn from_json(op: &CausalOperation, v: &serde_json::Value) -> Result<Self, BehaviorError> {
        let bad = |k: &str| BehaviorError::Json(format!("witness field `{k}` missing or malformed"));
        let num = |k: &str| v.get(k).and_then(|x| x.as_u64()).map(|n| n as usize).ok_or_else(|| bad(k));
        let depth = num("depth")?;
        let input_depth = num("input_depth")?;
        let approxs = |k: &str| -> Result<Vec<Approximant>, BehaviorError> {
            v.get(k)
                .and_then(|x| x.as_array())
                .ok_or_else(|| bad(k))?
                .iter()
                .map(|a| Approximant::from_json(op.input(), input_depth, a))
                .collect()
        };
        Ok(Witness {
            symbol: v.get("symbol").and_then(|s| s.as_str()).ok_or_else(|| bad("symbol"))?.to_string(),
            depth,
            input_depth,
            structure: Structure::from_json(v.get("structure").ok_or_else(|| bad("structure"))?)?,
            f: approxs("f")?,
            g: approxs("g")?,
            out_f: Approximant::from_json(op.output(), depth, v.get("out_f").ok_or_else(|| bad("out_f"))?)?,
            out_g: Approximant::from_json(op.output(), depth, v.get("out_g").ok_or_else(|| bad("out_g"))?)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CausalityVerdict {
    /// No counterexample among this many samples. Evidence, not proof.
    Causal { samples: usize },
    NotCausal(Witness),
}

impl CausalityVerdict {
    pub fn is_causal(&self) -> bool {
        matches!(self, CausalityVerdict::Causal { .. })
    }

    pub fn to_json(&self, op: &CausalOperation, cfg: &CheckConfig) -> serde_json::Value {
        match self {
            CausalityVerdict::Causal { samples } => json!({
                "op": op.symbol(),
                "verdict": "causal",
                "samples": samples,
                "max_depth": cfg.max_depth,
                "seed": cfg.seed,
            }),
            CausalityVerdict::NotCausal(w) => json!({
                "op": op.symbol(),
                "verdict": "not-causal",
                "max_depth": cfg.max_depth,
                "seed": cfg.seed,
                "witness": w.to_json(op),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoherenceVerdict {
    Coherent { checks: usize },
    Incoherent { i: usize, j: usize, args: OpArgs, detail: String },
}

impl CoherenceVerdict {
    pub fn is_coherent(&self) -> bool {
        matches!(self, CoherenceVerdict::Coherent { .. })
    }
}

fn sample_rng(seed: u64, stream: u64, depth: usize, index: usize) -> ChaCha8Rng {
    // splitmix64 over the tuple, so neighbouring samples get unrelated streams
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    for part in [depth as u64, index as u64] {
        z = z.wrapping_add(part).wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    ChaCha8Rng::seed_from_u64(z)
}

const RATIONAL_POOL: [(i64, i64); 8] = [(0, 1), (0, 1), (1, 1), (1, 1), (2, 1), (-1, 1), (3, 1), (1, 2)];

fn random_value(sort: &ValueSort, rng: &mut ChaCha8Rng) -> Value {
    match sort {
        ValueSort::Unit => Value::Unit,
        ValueSort::Bool => Value::Bool(rng.gen_bool(0.35)),
        ValueSort::Rational => {
            let (n, d) = *RATIONAL_POOL.choose(rng).expect("non-empty pool");
            Value::ratio(n, d)
        }
        ValueSort::Float => Value::Float(Float([0.0, 1.0, 2.0, -1.0, 0.5][rng.gen_range(0..5)])),
        ValueSort::Tuple(ss) => Value::Tuple(ss.iter().map(|s| random_value(s, rng)).collect()),
    }
}

fn random_tree(sig: &BehaviorSignature, depth: usize, rng: &mut ChaCha8Rng) -> Tree {
    if depth == 0 {
        return Tree::Leaf;
    }
    let ctors = sig.constructors();
    let (nullary, other): (Vec<usize>, Vec<usize>) = (0..ctors.len()).partition(|&c| ctors[c].arity == 0);
    let ctor = if !nullary.is_empty() && (other.is_empty() || rng.gen_bool(0.25)) {
        *nullary.choose(rng).expect("non-empty")
    } else {
        *other.choose(rng).expect("non-empty")
    };
    let c = &ctors[ctor];
    let out = random_value(&c.sort, rng);
    let children = (0..c.arity).map(|_| random_tree(sig, depth - 1, rng)).collect();
    Tree::node(ctor, out, children)
}

fn random_approximant(sig: &BehaviorSignature, depth: usize, rng: &mut ChaCha8Rng) -> Approximant {
    Approximant::unit().extend(depth, |_, rem| random_tree(sig, rem, rng))
}

fn random_extension(sig: &BehaviorSignature, base: &Approximant, depth: usize, rng: &mut ChaCha8Rng) -> Approximant {
    base.extend(depth, |_, rem| random_tree(sig, rem, rng))
}

fn random_structure(shape: Shape, n: usize, width: usize, rng: &mut ChaCha8Rng) -> Structure {
    match shape {
        Shape::Tuple(k) => Structure::Tuple((0..k).map(|p| p % n.max(1)).collect()),
        Shape::FinSet => {
            let size = rng.gen_range(0..=width);
            Structure::Set((0..size).map(|_| rng.gen_range(0..n)).collect())
        }
        Shape::SeqSet => {
            let count = rng.gen_range(0..=width);
            Structure::Seqs(
                (0..count)
                    .map(|_| {
                        let len = rng.gen_range(0..=width);
                        (0..len).map(|_| rng.gen_range(0..n)).collect()
                    })
                    .collect(),
            )
        }
    }
}

/// Depth of sampled inputs: deep enough to expose lookahead, e.g. `even` needs `2i`.
fn input_depth(sig: &BehaviorSignature, max_depth: usize) -> usize {
    match sig.kind() {
        SignatureKind::Language => max_depth + 2,
        _ => 2 * max_depth + 2,
    }
}

/// Domain size and values `h(x)` drawn from a small pool, so that `h` often
/// identifies points (which is what sum-like operations are sensitive to).
fn random_family(op: &CausalOperation, depth: usize, width: usize, rng: &mut ChaCha8Rng) -> Vec<Approximant> {
    let n = match op.shape() {
        Shape::Tuple(k) => k,
        _ => rng.gen_range(1..=width.max(1)),
    };
    let pool_size = rng.gen_range(1..=width.max(1));
    let pool: Vec<Approximant> = (0..pool_size).map(|_| random_approximant(op.input(), depth, rng)).collect();
    (0..n).map(|_| pool.choose(rng).expect("non-empty pool").clone()).collect()
}

/// Search for `f ≡_i g` on `X` with `α(F f) ≢_i α(F g)`, for `i = 0, …, max_depth`.
/// The first witness found has the least such `i`.
pub fn check_causality(op: &CausalOperation, cfg: &CheckConfig) -> Result<CausalityVerdict, CausalError> {
    if !op.has_full_semantics() && !op.has_prefix_action() {
        return Err(CausalError::NoSemantics(op.symbol().to_string()));
    }
    let d = input_depth(op.input(), cfg.max_depth);
    for i in 0..=cfg.max_depth {
        let found = (0..cfg.samples)
            .into_par_iter()
            .map(|s| -> Result<Option<Witness>, CausalError> {
                let mut rng = sample_rng(cfg.seed, 1, i, s);
                let f = random_family(op, d, cfg.max_width, &mut rng);
                let structure = random_structure(op.shape(), f.len(), cfg.max_width, &mut rng);
                let g: Vec<Approximant> = f
                    .iter()
                    .map(|a| {
                        if rng.gen_bool(0.3) {
                            Ok(a.clone())
                        } else {
                            Ok(random_extension(op.input(), &a.project(i)?, d, &mut rng))
                        }
                    })
                    .collect::<Result<_, BehaviorError>>()?;
                let out_f = eval_full(op, &structure, &f, i)?;
                let out_g = eval_full(op, &structure, &g, i)?;
                Ok((out_f != out_g).then(|| Witness {
                    symbol: op.symbol().to_string(),
                    depth: i,
                    input_depth: d,
                    structure,
                    f,
                    g,
                    out_f,
                    out_g,
                }))
            })
            .find_first(|r| !matches!(r, Ok(None)));
        match found {
            Some(Ok(Some(w))) => return Ok(CausalityVerdict::NotCausal(w)),
            Some(Err(e)) => return Err(e),
            _ => {}
        }
    }
    Ok(CausalityVerdict::Causal { samples: cfg.samples * (cfg.max_depth + 1) })
}

fn random_args(op: &CausalOperation, depth: usize, width: usize, rng: &mut ChaCha8Rng) -> OpArgs {
    let h = random_family(op, depth, width, rng);
    random_structure(op.shape(), h.len(), width, rng).image(&h)
}

/// Sample `i <= j <= max_depth` and depth-`j` arguments; check that `α_j` commutes with
/// projection to `i`, and that two random extensions of the projected arguments back
/// to depth `j` give the same depth-`i` output.
pub fn check_prefix_coherence(op: &CausalOperation, cfg: &CheckConfig) -> Result<CoherenceVerdict, CausalError> {
    for j in 0..=cfg.max_depth {
        let failures: Vec<Result<Option<(usize, OpArgs, String)>, CausalError>> = (0..cfg.samples)
            .into_par_iter()
            .map(|s| {
                let mut rng = sample_rng(cfg.seed, 2, j, s);
                let i = rng.gen_range(0..=j);
                let args = random_args(op, j, cfg.max_width, &mut rng);
                let lhs = op.apply_prefix(&args, j)?.project(i)?;
                let base = args.project(i)?;
                let rhs = op.apply_prefix(&base, i)?;
                if lhs != rhs {
                    return Ok(Some((i, args, "α_j then project differs from project then α_i".to_string())));
                }
                for _ in 0..2 {
                    let ext = base.map(|a| Ok::<_, BehaviorError>(random_extension(op.input(), a, j, &mut rng)))?;
                    if op.apply_prefix(&ext, j)?.project(i)? != rhs {
                        return Ok(Some((i, ext, "output depends on the choice of extension".to_string())));
                    }
                }
                Ok(None)
            })
            .collect();
        let mut worst: Option<(usize, OpArgs, String)> = None;
        for r in failures {
            if let Some(f) = r? {
                if worst.as_ref().is_none_or(|w| f.0 < w.0) {
                    worst = Some(f);
                }
            }
        }
        if let Some((i, args, detail)) = worst {
            return Ok(CoherenceVerdict::Incoherent { i, j, args, detail });
        }
    }
    Ok(CoherenceVerdict::Coherent { checks: cfg.samples * (cfg.max_depth + 1) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causal::builtins;

    fn quick() -> CheckConfig {
        CheckConfig { max_depth: 5, samples: 120, ..CheckConfig::default() }
    }

    #[test]
    fn plus_is_causal() {
        assert!(check_causality(&builtins::plus(), &quick()).unwrap().is_causal());
    }

    #[test]
    fn even_witness_appears_at_depth_two() {
        let op = builtins::even_stream();
        let CausalityVerdict::NotCausal(w) = check_causality(&op, &quick()).unwrap() else {
            panic!("even must be refuted");
        };
        assert_eq!(w.depth, 2);
        w.replay(&op).unwrap();
        let back = Witness::from_json(&op, &w.to_json(&op)).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn sum_witness_replays() {
        let op = builtins::fin_sum();
        let CausalityVerdict::NotCausal(w) = check_causality(&op, &quick()).unwrap() else {
            panic!("sum must be refuted");
        };
        assert_eq!(w.depth, 1);
        w.replay(&op).unwrap();
    }

    #[test]
    fn tampered_witness_fails_replay() {
        let op = builtins::even_stream();
        let CausalityVerdict::NotCausal(mut w) = check_causality(&op, &quick()).unwrap() else {
            panic!("even must be refuted");
        };
        w.g = w.f.clone();
        assert!(w.replay(&op).is_err());
    }

    #[test]
    fn shuffle_prefix_is_coherent() {
        assert!(check_prefix_coherence(&builtins::shuffle(), &quick()).unwrap().is_coherent());
    }

    #[test]
    fn lookahead_prefix_action_is_incoherent() {
        // reads the second element even at depth 1
        let sig = BehaviorSignature::rational_stream();
        let s = sig.clone();
        let op = CausalOperation::new("peek", Shape::Tuple(1), sig.clone(), sig).with_prefix(move |args, depth| {
            let OpArgs::Tuple(v) = args else { unreachable!() };
            let vals = v[0].values();
            let out: Vec<Value> = (0..depth).map(|k| vals.get(k + 1).cloned().unwrap_or_else(Value::zero)).collect();
            Ok(Approximant::from_values(&s, &out)?)
        });
        match check_prefix_coherence(&op, &quick()).unwrap() {
            CoherenceVerdict::Incoherent { i, j, .. } => assert!(i <= j && j <= 2),
            v => panic!("expected incoherence, got {v:?}"),
        }
    }
}
