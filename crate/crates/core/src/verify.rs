//! Property suites behind `chipfire verify`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{compare, LabeledConfig, Order, UnlabeledConfig, Vertex};
use crate::engine::{
    check_label_bounds, check_sorted, closed_form_stabilization, fire, linestab, predicted_counts,
    random_rightward_walk, stabilize_labeled, stabilize_unlabeled, RunOptions, Strategy,
};
use crate::error::{Error, Result};
use crate::graph::{parse_graph, PathGraph};
use crate::rng::Seed;
use crate::vector::{vector_stabilize, RootType, VectorStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Main,
    Runtime,
    Stabcover,
    Bounds,
    Typeb,
    Loops,
    Closedforms,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Main,
        Suite::Runtime,
        Suite::Stabcover,
        Suite::Bounds,
        Suite::Typeb,
        Suite::Loops,
        Suite::Closedforms,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Main => "main",
            Suite::Runtime => "runtime",
            Suite::Stabcover => "stabcover",
            Suite::Bounds => "bounds",
            Suite::Typeb => "typeb",
            Suite::Loops => "loops",
            Suite::Closedforms => "closedforms",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case: String,
    pub passed: bool,
    /// Counterexample or error text when the case failed.
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub max_n: u64,
    pub seeds: u64,
    pub cases: u64,
    pub failures: Vec<CaseResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Recorder {
    cases: u64,
    failures: Vec<CaseResult>,
}

impl Recorder {
    fn check(&mut self, case: impl FnOnce() -> String, outcome: Result<Option<String>>) {
        self.cases += 1;
        let detail = match outcome {
            Ok(None) => return,
            Ok(Some(why)) => why,
            Err(e) => format!("error: {e}"),
        };
        self.failures.push(CaseResult {
            case: case(),
            passed: false,
            detail: Some(detail),
        });
    }
}

fn mismatch<T: std::fmt::Debug + PartialEq>(got: T, want: T) -> Option<String> {
    (got != want).then(|| format!("got {got:?}, expected {want:?}"))
}

/// Runs one suite over `n ≤ max_n` with `seeds` seeded runs per random strategy.
pub fn run_suite(suite: Suite, max_n: u64, seeds: u64) -> Result<SuiteReport> {
    let mut rec = Recorder {
        cases: 0,
        failures: Vec::new(),
    };
    match suite {
        Suite::Main => main_suite(&mut rec, max_n, seeds),
        Suite::Runtime => runtime_suite(&mut rec, max_n, seeds),
        Suite::Stabcover => stabcover_suite(&mut rec, max_n, seeds)?,
        Suite::Bounds => bounds_suite(&mut rec, max_n, seeds),
        Suite::Typeb => typeb_suite(&mut rec, max_n, seeds),
        Suite::Loops => loops_suite(&mut rec, max_n, seeds)?,
        Suite::Closedforms => closedforms_suite(&mut rec, max_n)?,
    }
    Ok(SuiteReport {
        suite,
        max_n,
        seeds,
        cases: rec.cases,
        failures: rec.failures,
    })
}

fn line() -> PathGraph {
    PathGraph::line()
}

fn delta(n: u64) -> LabeledConfig {
    LabeledConfig::delta_n(n as i64).expect("nonnegative")
}

/// Sorting to the exact positions, cross-firing counts, and `ψ_k` bookkeeping
/// for even `n`.
fn main_suite(rec: &mut Recorder, max_n: u64, seeds: u64) {
    for n in (2..=max_n).step_by(2) {
        let p = predicted_counts(n);
        for strategy in Strategy::standard_set(0..seeds) {
            let case = || format!("n={n} strategy={strategy:?}");
            let outcome = stabilize_labeled(&line(), &delta(n), &strategy, RunOptions::default())
                .and_then(|r| {
                    let check = check_sorted(&r.final_config, &line(), n as usize)?;
                    if check.exact_main != Some(true) {
                        return Ok(Some(format!("terminal {}", r.final_config)));
                    }
                    for k in 1..=n as u32 {
                        let want = p.cross(k as u64)?;
                        let got = r.cross_firings.get(&k).copied().unwrap_or(0);
                        let psi_drop = -r.final_config.psi(k)?;
                        if got != want || psi_drop != want as i64 {
                            return Ok(Some(format!(
                                "k={k}: cross {got}, psi drop {psi_drop}, expected {want}"
                            )));
                        }
                    }
                    Ok(None)
                });
            rec.check(case, outcome);
        }
    }
}

/// Total and per-vertex firing counts against the closed forms, every `n`.
fn runtime_suite(rec: &mut Recorder, max_n: u64, seeds: u64) {
    for n in 1..=max_n {
        let p = predicted_counts(n);
        for strategy in Strategy::standard_set(0..seeds) {
            let outcome = stabilize_labeled(&line(), &delta(n), &strategy, RunOptions::default())
                .map(|r| {
                    let odometer_ok = r.odometer.iter().all(|(&j, &k)| k == p.per_vertex(j))
                        && (-(p.m as Vertex)..=p.m as Vertex)
                            .all(|j| r.odometer.get(&j).copied().unwrap_or(0) == p.per_vertex(j));
                    if !odometer_ok {
                        return Some(format!("odometer {:?}", r.odometer));
                    }
                    mismatch(r.total_firings, p.total())
                });
            rec.check(|| format!("n={n} strategy={strategy:?}"), outcome);
        }
    }
}

fn stabilize_z(c: &UnlabeledConfig) -> Result<UnlabeledConfig> {
    Ok(
        stabilize_unlabeled(&line(), c, &Strategy::LeftmostVertex, RunOptions::default())?
            .final_config,
    )
}

/// A random configuration of at most `max_chips` chips in `[-window, window]`.
pub fn random_config<R: Rng>(rng: &mut R, max_chips: u64, window: Vertex) -> UnlabeledConfig {
    let chips = rng.random_range(1..=max_chips.max(1));
    let mut c = UnlabeledConfig::new();
    for _ in 0..chips {
        c.add(rng.random_range(-window..=window), 1);
    }
    c
}

/// Moves one uniformly chosen chip one step right.
pub fn random_cover<R: Rng>(rng: &mut R, c: &UnlabeledConfig) -> Result<UnlabeledConfig> {
    let mut pick = rng.random_range(0..c.total());
    let v = c
        .iter()
        .find_map(|(v, k)| {
            if pick < k {
                Some(v)
            } else {
                pick -= k;
                None
            }
        })
        .ok_or_else(|| Error::Precondition("empty configuration".into()))?;
    let mut d = c.clone();
    d.shift_right(v)?;
    Ok(d)
}

/// Cover preservation and rightward monotonicity on random pairs.
fn stabcover_suite(rec: &mut Recorder, max_n: u64, seeds: u64) -> Result<()> {
    let max_chips = max_n.clamp(1, 30);
    for s in 0..seeds {
        let mut rng = Seed::new(s).with_stream(0).rng();
        for i in 0..100 {
            let c = random_config(&mut rng, max_chips, 50);
            let d = random_cover(&mut rng, &c)?;
            let outcome = (|| {
                let cmp = compare(&stabilize_z(&c)?, &stabilize_z(&d)?)?;
                Ok(mismatch((cmp.order, cmp.is_cover), (Order::Less, true)))
            })();
            rec.check(|| format!("seed={s} pair={i} c={c} d={d}"), outcome);

            let steps = rng.random_range(0..40);
            let outcome = (|| {
                let walked = random_rightward_walk(&c, steps, Seed::new(s).with_stream(i + 1))?;
                let cmp = compare(&stabilize_z(&c)?, &stabilize_z(&walked)?)?;
                Ok((!matches!(cmp.order, Order::Less | Order::Equal))
                    .then(|| format!("walked to {walked}")))
            })();
            rec.check(|| format!("seed={s} walk={i} c={c} steps={steps}"), outcome);
        }
    }
    Ok(())
}

/// The position bounds at every intermediate step of labeled runs.
fn bounds_suite(rec: &mut Recorder, max_n: u64, seeds: u64) {
    for n in 1..=max_n {
        for strategy in Strategy::standard_set(0..seeds) {
            let outcome = (|| {
                let r = stabilize_labeled(
                    &line(),
                    &delta(n),
                    &strategy,
                    RunOptions::traced(usize::MAX),
                )?;
                let mut c = delta(n);
                for (step, mv) in r.trace.unwrap_or_default().iter().enumerate() {
                    c = fire(&line(), &c, mv)?;
                    if !check_label_bounds(&c, n as usize)? {
                        return Ok(Some(format!("step {step}: {c}")));
                    }
                }
                Ok(None)
            })();
            rec.check(|| format!("n={n} strategy={strategy:?}"), outcome);
        }
    }
}

/// Type B root firing ends at `(1, …, n)`.
fn typeb_suite(rec: &mut Recorder, max_n: u64, seeds: u64) {
    for n in 1..=max_n as usize {
        let want: Vec<i64> = (1..=n as i64).collect();
        let strategies = [VectorStrategy::First, VectorStrategy::Last]
            .into_iter()
            .chain((0..seeds).map(|s| VectorStrategy::Uniform(Seed::new(s))));
        for strategy in strategies {
            let outcome = vector_stabilize(RootType::B, n, strategy, None, false)
                .map(|r| mismatch(r.final_state.coords, want.clone()));
            rec.check(|| format!("n={n} strategy={strategy:?}"), outcome);
        }
    }
}

/// Loops at the origin: sorting when `n ≡ ℓ (mod 2)`, and the unlabeled
/// closed form for every `n`.
fn loops_suite(rec: &mut Recorder, max_n: u64, seeds: u64) -> Result<()> {
    for ell in 0..=3u64 {
        let graph = if ell == 0 {
            line()
        } else {
            line().with_loops(0, ell)?
        };
        for n in 1..=max_n {
            let outcome = (|| {
                let c = UnlabeledConfig::n_delta0(n as i64)?;
                let got = stabilize_unlabeled(
                    &graph,
                    &c,
                    &Strategy::LeftmostVertex,
                    RunOptions::default(),
                )?;
                Ok(mismatch(
                    got.final_config,
                    closed_form_stabilization(&graph, n)?,
                ))
            })();
            rec.check(|| format!("graph={graph} n={n} unlabeled"), outcome);
            if n % 2 != ell % 2 {
                continue;
            }
            for strategy in Strategy::standard_set(0..seeds) {
                let outcome =
                    stabilize_labeled(&graph, &delta(n), &strategy, RunOptions::default())
                        .and_then(|r| {
                            Ok((!check_sorted(&r.final_config, &graph, n as usize)?.sorted)
                                .then(|| r.final_config.to_string()))
                        });
                rec.check(
                    || format!("graph={graph} n={n} strategy={strategy:?}"),
                    outcome,
                );
            }
        }
    }
    Ok(())
}

/// Closed forms on `Z`, the half-lines, and the line-plus-one-chip formula.
fn closedforms_suite(rec: &mut Recorder, max_n: u64) -> Result<()> {
    let graphs = [line(), parse_graph("N")?, parse_graph("Ndir")?];
    for graph in &graphs {
        for n in 0..=max_n {
            let outcome = (|| {
                let c = UnlabeledConfig::n_delta0(n as i64)?;
                let got = stabilize_unlabeled(
                    graph,
                    &c,
                    &Strategy::LeftmostVertex,
                    RunOptions::default(),
                )?;
                Ok(mismatch(
                    got.final_config,
                    closed_form_stabilization(graph, n)?,
                ))
            })();
            rec.check(|| format!("graph={graph} n={n}"), outcome);
        }
    }
    for (graph, first) in [(&graphs[1], 1), (&graphs[2], 0)] {
        for n in 1..=max_n {
            let outcome = stabilize_labeled(
                graph,
                &delta(n),
                &Strategy::UniformMove(Seed::new(n)),
                RunOptions::default(),
            )
            .map(|r| {
                mismatch(
                    r.final_config.positions(),
                    (first..first + n as Vertex).collect(),
                )
            });
            rec.check(|| format!("graph={graph} n={n} labeled"), outcome);
        }
    }
    let span = max_n.min(60) as Vertex;
    for width in 1..=span {
        let (a, b) = (-(width / 2), width - width / 2);
        for i in a..=b {
            let outcome = (|| {
                let mut c = UnlabeledConfig::delta_interval(a + 1, b - 1);
                c.add(i, 1);
                Ok(mismatch(stabilize_z(&c)?, linestab(a, b, i)?))
            })();
            rec.check(|| format!("linestab a={a} b={b} i={i}"), outcome);
        }
    }
    Ok(())
}
