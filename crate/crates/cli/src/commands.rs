//! One function per subcommand, each returning the finished report.

use std::collections::BTreeMap;
use std::str::FromStr;

use chipfire_core::engine::{
    check_sorted, closed_form_stabilization, stabilize_labeled, stabilize_unlabeled, RunOptions,
    StabilizationReport,
};
use chipfire_core::explorer::{
    check_conjecture, enumerate_stables_with, Conjecture, Exploration, Limits, PermView,
};
use chipfire_core::montecarlo::{estimate_sort_probability, exact_sort_probability, Protocol};
use chipfire_core::vector::{vector_stabilize, RootType, VectorStrategy};
use chipfire_core::verify::{run_suite, Suite};
use chipfire_core::{
    parse_graph, FiringMove, LabeledConfig, Seed, Strategy, UnlabeledConfig, Vertex,
};
use serde_json::{json, Value};

use crate::report::{Failure, Report};
use crate::{
    ConjectureArgs, EnumerateArgs, Mode, MontecarloArgs, StabilizeArgs, VectorfireArgs, VerifyArgs,
};

fn chips(n: u64) -> Result<i64, Failure> {
    i64::try_from(n).map_err(|_| Failure::usage(format!("--n {n} is too large")))
}

fn trace_json(trace: &Option<Vec<FiringMove>>) -> Value {
    match trace {
        None => Value::Null,
        Some(moves) => moves
            .iter()
            .map(|m| json!({ "vertex": m.vertex, "chips": m.chips }))
            .collect(),
    }
}

fn counts_json(c: &UnlabeledConfig) -> Value {
    c.iter().map(|(v, k)| json!([v, k])).collect()
}

fn run_json<C>(r: &StabilizationReport<C>) -> Value {
    json!({
        "total_firings": r.total_firings,
        "odometer": r.odometer,
        "trace": trace_json(&r.trace),
        "trace_truncated": r.trace_truncated,
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

pub fn stabilize(a: StabilizeArgs) -> Result<Report, Failure> {
    let graph = parse_graph(&a.graph)?;
    let seed = Seed::new(a.seed.seed);
    let strategy = Strategy::from_name(&a.strategy, seed)
        .ok_or_else(|| Failure::usage(format!("unknown strategy `{}`", a.strategy)))?;
    let opts = RunOptions {
        budget: a.budget,
        trace: a.trace.trace.then_some(a.trace.max_trace),
    };
    let n = chips(a.n)?;
    let inputs = json!({
        "graph": graph.to_string(),
        "n": a.n,
        "labeled": a.labeled,
        "strategy": strategy.name(),
        "seed": a.seed.seed,
        "trace": a.trace.trace,
        "max_trace": a.trace.max_trace,
        "budget": a.budget,
    });
    let random = matches!(
        strategy,
        Strategy::UniformMove(_) | Strategy::UniformVertexThenChips(_)
    );

    let results = if a.labeled {
        let r = stabilize_labeled(&graph, &LabeledConfig::delta_n(n)?, &strategy, opts)?;
        let check = check_sorted(&r.final_config, &graph, a.n as usize)?;
        merge(
            run_json(&r),
            json!({
                "final": r.final_config.to_string(),
                "positions": r.final_config.positions(),
                "cross_firings": r.cross_firings,
                "last_firing": r.last_firing,
                "sorted": check.sorted,
                "first_violation": check.first_violation,
                "exact_main": check.exact_main,
            }),
        )
    } else {
        let r = stabilize_unlabeled(&graph, &UnlabeledConfig::n_delta0(n)?, &strategy, opts)?;
        let closed = closed_form_stabilization(&graph, a.n).ok();
        merge(
            run_json(&r),
            json!({
                "final": r.final_config.to_string(),
                "counts": counts_json(&r.final_config),
                "sorted": Value::Null,
                "matches_closed_form": closed.map(|c| c == r.final_config),
            }),
        )
    };
    let closed_form_ok = results["matches_closed_form"].as_bool() != Some(false);
    Ok(Report::new("stabilize", inputs, results, !random).with_check(closed_form_ok))
}

/// Pairs of labels `i < j` with chip `i` strictly right of chip `j`.
fn inversions(c: &LabeledConfig) -> u64 {
    let pos = c.positions();
    let mut inv = 0;
    for i in 0..pos.len() {
        inv += pos[i + 1..].iter().filter(|&&q| q < pos[i]).count() as u64;
    }
    inv
}

pub fn enumerate(a: EnumerateArgs) -> Result<Report, Failure> {
    let graph = parse_graph(&a.graph)?;
    let limits = Limits {
        max_states: a.max_states,
        max_seconds: a.max_seconds,
    };
    let mode = match a.mode {
        Mode::Dfs => Exploration::DepthFirst,
        Mode::Bfs => Exploration::BreadthFirst,
        Mode::Parallel => Exploration::Parallel,
    };
    let inputs = json!({
        "graph": graph.to_string(),
        "n": a.n,
        "max_states": a.max_states,
        "max_seconds": a.max_seconds,
        "dump_perms": a.dump_perms,
        "mode": mode,
    });
    let set = enumerate_stables_with(&graph, &LabeledConfig::delta_n(chips(a.n)?)?, limits, mode)?;
    let max_inversions = set.stables.iter().map(inversions).max();
    let mut results = json!({
        "count": set.len(),
        "reachable_states": set.reachable_states,
        "all_sorted": set.all_sorted(),
        "max_inversions": max_inversions,
    });
    if a.dump_perms {
        let members: Vec<Value> = set
            .stables
            .iter()
            .map(|c| {
                json!({
                    "config": c.to_string(),
                    "perm": PermView::from_config(c).ok().map(|p| p.word()),
                    "inversions": inversions(c),
                })
            })
            .collect();
        results["members"] = Value::Array(members);
    }
    if !set.exact {
        eprintln!("chipfire: search stopped at a limit; the result is partial");
    }
    Ok(Report::new("enumerate", inputs, results, set.exact))
}

pub fn verify(a: VerifyArgs) -> Result<Report, Failure> {
    let suite = Suite::from_name(&a.suite).ok_or_else(|| {
        let names: Vec<&str> = Suite::ALL.iter().map(Suite::name).collect();
        Failure::usage(format!(
            "unknown suite `{}` (expected one of {})",
            a.suite,
            names.join(", ")
        ))
    })?;
    let inputs = json!({ "suite": suite.name(), "max_n": a.max_n, "seeds": a.seeds });
    let report = run_suite(suite, a.max_n, a.seeds)?;
    let passed = report.passed();
    for f in &report.failures {
        eprintln!(
            "chipfire: FAIL {}: {}",
            f.case,
            f.detail.as_deref().unwrap_or("")
        );
    }
    let results = json!({
        "cases": report.cases,
        "passed": report.cases - report.failures.len() as u64,
        "failed": report.failures.len(),
        "failures": report.failures,
    });
    Ok(Report::new("verify", inputs, results, true).with_check(passed))
}

pub fn montecarlo(a: MontecarloArgs) -> Result<Report, Failure> {
    let protocol = Protocol::from_name(&a.protocol)
        .ok_or_else(|| Failure::usage(format!("unknown protocol `{}`", a.protocol)))?;
    let exact = a.exact || protocol == Protocol::UniformSequence;
    if exact {
        let inputs =
            json!({ "n": a.n, "protocol": protocol.name(), "exact": true, "guard": a.guard });
        let r = exact_sort_probability(a.n, protocol, a.guard)?;
        let results = json!({
            "probability": r.probability.to_string(),
            "probability_f64": r.to_f64(),
            "excess_over_one_third": r.excess_over_one_third().to_string(),
            "states": r.states,
        });
        return Ok(Report::new("montecarlo", inputs, results, true));
    }
    let inputs = json!({
        "n": a.n,
        "protocol": protocol.name(),
        "trials": a.trials,
        "seed": a.seed.seed,
    });
    let r = estimate_sort_probability(a.n, protocol, a.trials, a.seed.seed)?;
    let results = json!({
        "sorted_count": r.sorted_count,
        "estimate": r.estimate_f64(),
        "estimate_fraction": r.estimate.to_string(),
        "standard_error": r.standard_error(),
        "ci95": [r.ci95.0, r.ci95.1],
        "last_move_violations": r.last_move_violations,
    });
    let ok = r.last_move_violations == 0;
    Ok(Report::new("montecarlo", inputs, results, false).with_check(ok))
}

fn parse_params(text: &str) -> Result<BTreeMap<String, String>, Failure> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("expected key=value, got `{item}`")))?;
        if out
            .insert(k.trim().to_string(), v.trim().to_string())
            .is_some()
        {
            return Err(Failure::usage(format!("parameter `{k}` given twice")));
        }
    }
    Ok(out)
}

struct Params(BTreeMap<String, String>);

impl Params {
    fn take<T: FromStr>(&mut self, key: &str) -> Result<T, Failure> {
        let raw = self
            .0
            .remove(key)
            .ok_or_else(|| Failure::usage(format!("missing parameter `{key}`")))?;
        raw.parse()
            .map_err(|_| Failure::usage(format!("bad value `{raw}` for `{key}`")))
    }

    /// A colon-separated vertex set; absent or empty means the empty set.
    fn take_set(&mut self, key: &str) -> Result<Vec<Vertex>, Failure> {
        let raw = self.0.remove(key).unwrap_or_default();
        let mut s = raw
            .split(':')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse()
                    .map_err(|_| Failure::usage(format!("bad vertex `{t}` in `{key}`")))
            })
            .collect::<Result<Vec<Vertex>, _>>()?;
        s.sort_unstable();
        s.dedup();
        Ok(s)
    }

    fn finish(self) -> Result<(), Failure> {
        match self.0.keys().next() {
            Some(k) => Err(Failure::usage(format!("unknown parameter `{k}`"))),
            None => Ok(()),
        }
    }
}

pub fn conjecture(a: ConjectureArgs) -> Result<Report, Failure> {
    let mut p = Params(parse_params(&a.params)?);
    let c = match a.id.as_str() {
        "loops" => Conjecture::Loops {
            s: p.take_set("s")?,
            n: p.take("n")?,
        },
        "parallel" => Conjecture::Parallel {
            r: p.take("r")?,
            n: p.take("n")?,
        },
        "combined" => Conjecture::Combined {
            s: p.take_set("s")?,
            r: p.take("r")?,
            n: p.take("n")?,
        },
        "inversions" => Conjecture::Inversions { n: p.take("n")? },
        other => return Err(Failure::usage(format!("unknown conjecture `{other}`"))),
    };
    p.finish()?;
    let limits = Limits {
        max_states: a.max_states,
        max_seconds: a.max_seconds,
    };
    let inputs = json!({
        "conjecture": c,
        "max_states": a.max_states,
        "max_seconds": a.max_seconds,
    });
    let r = check_conjecture(&c, limits)?;
    let passed = !r.counterexample && r.inversions_match != Some(false);
    let exact = r.exact;
    let results = serde_json::to_value(&r).expect("reports serialize");
    Ok(Report::new("conjecture", inputs, results, exact).with_check(passed))
}

pub fn vectorfire(a: VectorfireArgs) -> Result<Report, Failure> {
    let type_tag = RootType::from_str(&a.type_tag)?;
    let strategy = VectorStrategy::from_name(&a.strategy, Seed::new(a.seed.seed))
        .ok_or_else(|| Failure::usage(format!("unknown strategy `{}`", a.strategy)))?;
    let inputs = json!({
        "type": a.type_tag.to_uppercase(),
        "n": a.n,
        "strategy": strategy.name(),
        "seed": a.seed.seed,
        "trace": a.trace,
        "budget": a.budget,
    });
    let r = vector_stabilize(type_tag, a.n, strategy, a.budget, a.trace)?;
    let ascending: Vec<i64> = (1..=a.n as i64).collect();
    let reaches_ascending = r.final_state.coords == ascending;
    let results = json!({
        "final": r.final_state.coords,
        "steps": r.steps,
        "ends_at_ascending": (type_tag == RootType::B).then_some(reaches_ascending),
        "trace": r.trace.map(|t| t.iter().map(ToString::to_string).collect::<Vec<_>>()),
    });
    let passed = type_tag != RootType::B || reaches_ascending;
    let random = matches!(strategy, VectorStrategy::Uniform(_));
    Ok(Report::new("vectorfire", inputs, results, !random).with_check(passed))
}
