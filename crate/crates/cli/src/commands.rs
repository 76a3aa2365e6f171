use std::io::Write;
use std::path::Path;

use companion_core::behavior::LazyBehavior;
use companion_core::bisim::{prove_upto, recheck, stream_eq, Bounds, Combinators, Outcome, StreamEq};
use companion_core::causal::kan::powerset_kan_counterexample;
use companion_core::causal::{check_causality, CausalityVerdict};
use companion_core::corecursion::{solve_cross, GsosInterp, GsosSpec, State};
use companion_core::lattice::{
    coinduction_upto, companion, final_sequence, function_from_json, function_to_json, is_below_companion, lattice_from_json,
    lattice_to_json, FiniteLattice, MonotoneFn,
};
use companion_core::{CheckConfig, EquationSystem, LatticeError, PrefixSolution, Registry, Term};
use serde_json::{json, Value as Json};

use crate::diag::{Diag, Location, EXIT_BOUNDS, EXIT_FALSE};
use crate::spec::{self, Spec};
use crate::{Cli, Command};

fn read(path: &Path) -> Result<String, Diag> {
    std::fs::read_to_string(path).map_err(|e| Diag::input("io", format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Json, Diag> {
    serde_json::from_str(&read(path)?).map_err(|e| Diag::input("json", format!("{}: {e}", path.display())))
}

fn load(path: &Path, seed: Option<u64>) -> Result<Spec, Diag> {
    if path.extension().is_some_and(|e| e == "json") {
        let sys = EquationSystem::from_json(&read_json(path)?).map_err(|e| Diag::input("json", e.to_string()))?;
        return Ok(Spec::from_system(sys));
    }
    spec::load(&path.display().to_string(), &read(path)?, seed)
}

/// Write a result to stdout. A closed pipe is not an error.
fn emit(cli: &Cli, value: Json, text: impl FnOnce() -> String) {
    let out = if cli.json { value.to_string() } else { text() };
    let _ = writeln!(std::io::stdout().lock(), "{out}");
}

pub fn run(cli: &Cli, seed: Option<u64>) -> Result<u8, Diag> {
    dispatch(cli, seed).map_err(|d| match &cli.command {
        Command::Eval { file, .. }
        | Command::CheckCausal { file, .. }
        | Command::Prove { file, .. }
        | Command::StreamEq { file, .. }
        | Command::Lattice { file, .. } => locate(d, file),
        Command::Recheck { proof } => locate(d, proof),
        Command::KanDemo { .. } => d.or_at(|| Location::whole("--level")),
    })
}

/// Point an error at the first line of `file` mentioning its subject, or at the file itself.
fn locate(d: Diag, file: &Path) -> Diag {
    let name = file.display().to_string();
    let site = match (&d.subject, std::fs::read_to_string(file)) {
        (Some(s), Ok(text)) => spec::sites(&name, &text).remove(s),
        _ => None,
    };
    d.or_at(|| site.unwrap_or_else(|| Location::whole(name)))
}

fn dispatch(cli: &Cli, seed: Option<u64>) -> Result<u8, Diag> {
    match &cli.command {
        Command::Eval { file, target, depth, gsos } => eval(cli, &load(file, seed)?, target, *depth, *gsos),
        Command::CheckCausal { file, op, depth, samples } => {
            let spec = load(file, seed)?;
            let op = spec
                .declared
                .get(op)
                .ok_or_else(|| Diag::input("unknown-name", format!("operation `{op}` is not declared")).about(op))?;
            let cfg = CheckConfig {
                max_depth: *depth,
                samples: *samples,
                seed: seed.unwrap_or(CheckConfig::default().seed),
                ..CheckConfig::default()
            };
            let verdict = check_causality(op, &cfg)?;
            emit(cli, verdict.to_json(op, &cfg), || match &verdict {
                CausalityVerdict::Causal { samples } => format!(
                    "{}: no causality witness in {samples} samples up to depth {} (seed {})",
                    op.symbol(),
                    cfg.max_depth,
                    cfg.seed
                ),
                CausalityVerdict::NotCausal(w) => format!("{}: not causal: {}", op.symbol(), w.summary(op)),
            });
            Ok(if verdict.is_causal() { 0 } else { EXIT_FALSE })
        }
        Command::Prove { file, goal, upto, max_pairs, max_depth, emit: out } => {
            prove(cli, &load(file, seed)?, goal.as_deref(), upto, Bounds { max_pairs: *max_pairs, max_depth: *max_depth }, out.as_deref())
        }
        Command::StreamEq { file, lhs, rhs, depth } => {
            let spec = load(file, seed)?;
            let (l, r) = (spec.parse_term(lhs)?, spec.parse_term(rhs)?);
            let v = stream_eq(&spec.system, &spec.registry, &spec.bindings, &l, &r, *depth)?;
            emit(cli, v.to_json(), || match &v {
                StreamEq::Equal { depth } => format!("equal on the first {depth} outputs"),
                StreamEq::Counterexample { position, lhs, rhs } => format!("differ at position {position}: {lhs} vs {rhs}"),
            });
            Ok(match v {
                StreamEq::Equal { .. } => 0,
                StreamEq::Counterexample { .. } => EXIT_FALSE,
            })
        }
        Command::Recheck { proof } => recheck_file(cli, &read_json(proof)?),
        Command::Lattice { file, b, check, upto, x, .. } => lattice(cli, &read_json(file)?, b, check.as_deref(), upto.as_deref(), x.as_deref()),
        Command::KanDemo { level } => {
            let report = powerset_kan_counterexample(*level)?;
            let passed = report.passed();
            let mut v = serde_json::to_value(&report).expect("plain data");
            v["passed"] = json!(passed);
            emit(cli, v, || {
                format!(
                    "level {}: stage sizes {:?}; {} of {} functions {{x, y}} -> P_{} have equal image sets; \
                     {} naturality checks {}; d differs from c^x and c^y: {}\n{}",
                    report.level,
                    report.stage_sizes,
                    report.collapsed,
                    report.functions,
                    report.level,
                    report.naturality_checks,
                    if report.natural { "passed" } else { "failed" },
                    report.d_is_new,
                    if passed {
                        "the counterexample holds at this level"
                    } else {
                        "the construction did not reproduce"
                    }
                )
            });
            Ok(if passed { 0 } else { EXIT_FALSE })
        }
    }
}

fn eval(cli: &Cli, spec: &Spec, target: &str, depth: usize, gsos: bool) -> Result<u8, Diag> {
    let term = spec.parse_term(target)?;
    let (sig, approx) = match &term {
        Term::Op { symbol, args } if spec.registry.lookup(symbol).is_some_and(|op| op.is_cross()) => {
            let lazies = args.iter().map(|a| lazy(spec, a)).collect::<Result<Vec<_>, _>>()?;
            let out = spec.registry.lookup(symbol).expect("checked").output().clone();
            (out, solve_cross(&spec.registry, symbol, &lazies, depth)?)
        }
        _ if gsos => {
            let interp = GsosInterp::new(GsosSpec::stream_builtins());
            let mut sol = PrefixSolution::new(spec.system.clone(), interp, spec.bindings.clone())?;
            (spec.signature.clone(), sol.solve_term(&term, depth)?)
        }
        _ => {
            let mut sol = PrefixSolution::new(spec.system.clone(), spec.registry.clone(), spec.bindings.clone())?;
            (spec.signature.clone(), sol.solve_term(&term, depth)?)
        }
    };
    let rendered = approx.render(&sig);
    emit(
        cli,
        json!({"target": target, "depth": depth, "signature": sig.name(), "rendered": rendered, "approximant": approx.to_json(&sig)}),
        || rendered.clone(),
    );
    Ok(0)
}

/// A complete behavior for an argument of an operation between signatures.
fn lazy(spec: &Spec, t: &Term) -> Result<LazyBehavior, Diag> {
    match t {
        Term::Oracle(companion_core::corecursion::OracleRef::Named(n)) => Ok(spec.bindings[n].clone()),
        Term::Var { name, args } if args.is_empty() => {
            let sol = PrefixSolution::new(spec.system.clone(), spec.registry.clone(), spec.bindings.clone())?;
            Ok(sol.into_lazy(State::var(name.clone()))?)
        }
        _ => Err(Diag::input("usage", "arguments of an operation between signatures must be variables or oracles")),
    }
}

fn word(w: &str) -> &str {
    if w.is_empty() {
        "ε"
    } else {
        w
    }
}

fn prove(cli: &Cli, spec: &Spec, goal: Option<&str>, upto: &str, bounds: Bounds, out: Option<&Path>) -> Result<u8, Diag> {
    let combinators = Combinators::parse(upto)?;
    let goals: Vec<_> = match goal {
        Some(g) => vec![spec
            .goals
            .iter()
            .find(|x| x.name == g)
            .ok_or_else(|| Diag::input("unknown-name", format!("goal `{g}` is not declared")))?],
        None => spec.goals.iter().collect(),
    };
    if goals.is_empty() {
        return Err(Diag::input("usage", "the file declares no goals"));
    }
    let mut results = Vec::new();
    let mut lines = Vec::new();
    let mut proofs = Vec::new();
    let mut exit = 0;
    for g in goals {
        let outcome = prove_upto(&spec.env, &[(g.lhs.clone(), g.rhs.clone())], &combinators, &bounds, &spec.registry)
            .map_err(|e| Diag::from(e).about(&g.name))?;
        match outcome {
            Outcome::Proof(p) => {
                let pj = p.to_json();
                lines.push(format!("{}: proved, |R| = {} up to {}", g.name, p.relation.len(), combinators.names().join(",")));
                for (l, r) in p.relation.pairs() {
                    lines.push(format!("  {l}  ~  {r}"));
                }
                results.push(json!({"goal": g.name, "verdict": "proof", "relation_size": p.relation.len(), "proof": pj.clone()}));
                proofs.push(pj);
            }
            Outcome::Counterexample(c) => {
                exit = EXIT_FALSE;
                let val = if c.valuation.is_empty() {
                    String::new()
                } else {
                    let v: Vec<String> = c.valuation.iter().map(|(a, b)| format!("{a}={b}")).collect();
                    format!(" when {}", v.join(", "))
                };
                lines.push(format!(
                    "{}: refuted, word {} is accepted by the {} side only{val}",
                    g.name,
                    word(&c.word),
                    if c.lhs_accepts { "left" } else { "right" }
                ));
                let mut j = c.to_json();
                j["word"] = json!(word(&c.word));
                results.push(json!({"goal": g.name, "verdict": "counterexample", "counterexample": j}));
            }
            Outcome::Unknown { reason, relation_size } => {
                if exit == 0 {
                    exit = EXIT_BOUNDS;
                }
                lines.push(format!("{}: unknown, {reason} (|R| = {relation_size})", g.name));
                results.push(json!({"goal": g.name, "verdict": "unknown", "reason": reason, "relation_size": relation_size}));
            }
        }
    }
    if let Some(path) = out {
        let cert = if proofs.len() == 1 { proofs.remove(0) } else { Json::Array(proofs) };
        std::fs::write(path, serde_json::to_string_pretty(&cert).expect("json"))
            .map_err(|e| Diag::input("io", format!("{}: {e}", path.display())))?;
    }
    emit(cli, json!({ "results": results }), || lines.join("\n"));
    Ok(exit)
}

fn certificates(v: &Json) -> Vec<&Json> {
    match v {
        Json::Array(xs) => xs.iter().flat_map(certificates).collect(),
        Json::Object(m) if m.contains_key("results") => m["results"].as_array().into_iter().flatten().filter_map(|r| r.get("proof")).collect(),
        other => vec![other],
    }
}

fn recheck_file(cli: &Cli, v: &Json) -> Result<u8, Diag> {
    let certs = certificates(v);
    if certs.is_empty() {
        return Err(Diag::input("bad-proof", "no proof certificate found"));
    }
    let mut reports = Vec::new();
    let mut lines = Vec::new();
    for c in certs {
        let alphabet: Vec<char> = c["alphabet"].as_str().unwrap_or_default().chars().collect();
        let r = recheck(c, &Registry::language_builtins(&alphabet))?;
        lines.push(format!(
            "valid: {} pairs, {} successor checks, {} derivations",
            r.pairs, r.successor_checks, r.derivations
        ));
        reports.push(json!({"valid": true, "pairs": r.pairs, "successor_checks": r.successor_checks, "derivations": r.derivations}));
    }
    emit(cli, json!({ "reports": reports }), || lines.join("\n"));
    Ok(0)
}

fn named_fn(lat: &FiniteLattice, v: &Json, name: &str) -> Result<MonotoneFn, Diag> {
    let f = v
        .get("functions")
        .and_then(|fs| fs.get(name))
        .ok_or_else(|| Diag::input("unknown-name", format!("function `{name}` is not defined under \"functions\"")))?;
    Ok(function_from_json(lat, f)?)
}

fn table(lat: &FiniteLattice, f: &MonotoneFn) -> String {
    lat.elements().map(|x| format!("{} -> {}", lat.name(x), lat.name(f.apply(x)))).collect::<Vec<_>>().join(", ")
}

fn lattice(cli: &Cli, v: &Json, b_name: &str, check: Option<&str>, upto: Option<&str>, x: Option<&str>) -> Result<u8, Diag> {
    let lat = lattice_from_json(v.get("lattice").ok_or_else(|| Diag::input("lattice", "missing \"lattice\""))?)?;
    let b = named_fn(&lat, v, b_name)?;
    if let Some(f_name) = check {
        let f = named_fn(&lat, v, f_name)?;
        let below = is_below_companion(&lat, &f, &b);
        emit(cli, json!({"function": f_name, "b": b_name, "below_companion": below}), || {
            format!("{f_name} is {}below the companion of {b_name}", if below { "" } else { "not " })
        });
        return Ok(if below { 0 } else { EXIT_FALSE });
    }
    if let Some(f_name) = upto {
        let f = named_fn(&lat, v, f_name)?;
        let xname = x.expect("clap requires --x");
        let xi = lat.index(xname)?;
        let verdict = coinduction_upto(&lat, &b, &f, xi).map_err(|e| match e {
            LatticeError::NotBelowCompanion => {
                Diag::refused(format!("{f_name} is not below the companion of {b_name}; coinduction up to {f_name} is refused"))
            }
            e => e.into(),
        })?;
        let witness = verdict.witness.map(|y| lat.name(y).to_string());
        emit(
            cli,
            json!({"x": xname, "up_to": f_name, "witness": witness, "below_nu": verdict.below_nu}),
            || match &witness {
                Some(y) => format!("{xname} ≤ νb: {xname} ≤ {y} ≤ b({f_name}({y}))"),
                None if verdict.below_nu => format!("{xname} ≤ νb holds, but no invariant up to {f_name} contains {xname}"),
                None => format!("{xname} is not below νb"),
            },
        );
        return Ok(if verdict.witness.is_some() { 0 } else { EXIT_FALSE });
    }
    let seq = final_sequence(&lat, &b);
    let t = companion(&lat, &b);
    let stages: Vec<&str> = seq.stages.iter().map(|&s| lat.name(s)).collect();
    emit(
        cli,
        json!({
            "lattice": lattice_to_json(&lat),
            "b": function_to_json(&lat, &b),
            "final_sequence": stages,
            "nu": lat.name(seq.nu),
            "companion": function_to_json(&lat, &t),
        }),
        || {
            format!(
                "elements: {}\nfinal sequence: {}\nνb = {}\ncompanion: {}",
                lat.names().join(" "),
                stages.join(" ≥ "),
                lat.name(seq.nu),
                table(&lat, &t)
            )
        },
    );
    Ok(0)
}
