//! The bounds suite: eight checks reproducing the constructed instances
//! exactly and testing every upper bound on seeded random instances.
//!
//! Each check returns a [`CriterionResult`] listing every failure it found,
//! so a failing run reports all counterexamples rather than the first.

use std::fmt;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    compute_ratios, enumerate_profiles, optimal_profile, AnalysisReport, Criterion,
    EnumerationLimits,
};
use crate::constructive::constructive_min_maxcost_ne;
use crate::dynamics::{
    deviation_cost, run_dynamics, AgentOrder, DeviationPolicy, ImprovementRule, DEFAULT_STEP_CAP,
};
use crate::error::Result;
use crate::extension::feasible_extension;
use crate::game::{
    agent_cost, is_feasible, is_nash, potential, sum_cost, GameInstance, StrategyProfile,
};
use crate::graph::{enumerate_st_paths, Graph, Path, DEFAULT_PATH_CAP};
use crate::instances::{
    fig2_dag, fig2_dag_relaxed, fig3_parallel, random_asymmetric, random_sp, two_link, RandomDagParams,
    RandomSpParams,
};
use crate::rational::{format_rational, int, ratio, Cost, RatioValue, Rational};

pub const CRITERIA: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: u8,
    /// Claims covered, e.g. `Thm5 Thm9`.
    pub tags: &'static str,
    pub claim: String,
    pub measured: String,
    pub instances: String,
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} C{} [{}] claim: {} | measured: {} | instances: {} ({:.2}s)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.tags,
            self.claim,
            self.measured,
            self.instances,
            self.elapsed.as_secs_f64()
        )?;
        for failure in self.failures.iter().take(10) {
            write!(f, "\n    - {failure}")?;
        }
        if self.failures.len() > 10 {
            write!(f, "\n    ... {} more", self.failures.len() - 10)?;
        }
        Ok(())
    }
}

/// Seeds of the random criteria are `seed + offset + i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Criteria not started within the budget are reported as failures.
    pub budget: Option<Duration>,
}

struct Builder {
    result: CriterionResult,
    started: Instant,
}

impl Builder {
    fn new(id: u8, tags: &'static str, claim: impl Into<String>, instances: impl Into<String>) -> Self {
        Builder {
            result: CriterionResult {
                id,
                tags,
                claim: claim.into(),
                measured: String::new(),
                instances: instances.into(),
                failures: Vec::new(),
                elapsed: Duration::ZERO,
            },
            started: Instant::now(),
        }
    }

    fn fail(&mut self, message: impl Into<String>) {
        self.result.failures.push(message.into());
    }

    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.fail(message());
        }
    }

    /// Records an error and returns `None`.
    fn ok<T>(&mut self, context: &str, value: Result<T>) -> Option<T> {
        match value {
            Ok(v) => Some(v),
            Err(err) => {
                self.fail(format!("{context}: {err}"));
                None
            }
        }
    }

    fn finish(mut self, measured: impl Into<String>) -> CriterionResult {
        self.result.measured = measured.into();
        self.result.elapsed = self.started.elapsed();
        self.result
    }
}

fn show(value: &RatioValue) -> String {
    value.to_string()
}

fn exact(value: &RatioValue) -> Option<&Rational> {
    value.exact()
}

/// Path through the nodes with the given labels, taking the first matching
/// edge at each hop.
fn path_by_labels(graph: &Graph, labels: &[&str]) -> Option<Path> {
    labels
        .windows(2)
        .map(|hop| {
            let tail = graph.node_by_label(hop[0])?;
            let head = graph.node_by_label(hop[1])?;
            graph.out_edges(tail).iter().copied().find(|&e| graph.edge(e).head == head)
        })
        .collect()
}

fn sp_params(seed: u64, agents: usize) -> RandomSpParams {
    RandomSpParams { seed, agents, ..Default::default() }
}

fn dag_params(seed: u64, agents: usize) -> RandomDagParams {
    RandomDagParams { seed, agents, ..Default::default() }
}

/// Five-node DAG: exact anarchy values and their growth with `y = x^2`.
pub fn criterion_1() -> CriterionResult {
    let mut b = Builder::new(
        1,
        "Thm1 Thm6",
        "PoA_sc = 4/5 + 2y/5x, PoA_mc = 2/3 + y/3x; with y = x^2 PoA_sc increases, > 40 at x = 100",
        "five-node DAG at (1,2), (1,100), (3,9) and (x, x^2) for x = 1, 10, 100",
    );
    let limits = EnumerationLimits::default();
    let mut measured = Vec::new();
    for (x, y) in [(1, 2), (1, 100), (3, 9)] {
        let (xr, yr) = (int(x), int(y));
        let Some(g) = b.ok(&format!("fig2({x},{y})"), fig2_dag(xr.clone(), yr.clone())) else { continue };
        let Some(report) = b.ok(&format!("analysis of fig2({x},{y})"), compute_ratios(&g, limits)) else {
            continue;
        };
        let bad: Option<Vec<Path>> = [&["s", "a", "b", "t"][..], &["s", "b", "c", "t"][..]]
            .iter()
            .map(|labels| path_by_labels(g.graph(), labels))
            .collect();
        let bad_is_nash = bad.map_or(false, |mut paths| {
            paths.sort();
            report
                .equilibria
                .distinct()
                .iter()
                .any(|(m, _)| m.profile.canonical_multiset() == paths)
        });
        b.check(bad_is_nash, || format!("fig2({x},{y}): {{s.a.b.t, s.b.c.t}} missing from the equilibria"));

        let want_sc = ratio(4, 5) + int(2) * &yr / (int(5) * &xr);
        let want_mc = ratio(2, 3) + &yr / (int(3) * &xr);
        let got_sc = exact(&report.poa_sc.value);
        let got_mc = exact(&report.poa_mc.value);
        b.check(got_sc == Some(&want_sc), || {
            format!("fig2({x},{y}): PoA_sc {} != {}", show(&report.poa_sc.value), format_rational(&want_sc))
        });
        b.check(got_mc.map_or(false, |v| v >= &want_mc), || {
            format!("fig2({x},{y}): PoA_mc {} < {}", show(&report.poa_mc.value), format_rational(&want_mc))
        });
        // The other equilibrium costs at most 3x per agent, below 2x + y,
        // so the bad one is the worst and the bound is attained.
        let worst = report.equilibria.worst(Criterion::MaxCost).map(|m| m.max_cost.clone());
        b.check(worst == Some(int(2) * &xr + &yr), || format!("fig2({x},{y}): worst max-cost NE is not 2x+y"));
        b.check(got_mc == Some(&want_mc), || {
            format!("fig2({x},{y}): PoA_mc {} != {}", show(&report.poa_mc.value), format_rational(&want_mc))
        });
        measured.push(format!(
            "({x},{y}): PoA_sc={} PoA_mc={}",
            show(&report.poa_sc.value),
            show(&report.poa_mc.value)
        ));
    }

    let mut growth = Vec::new();
    for x in [1i64, 10, 100] {
        let y = x * x;
        let Some(g) = b.ok(&format!("fig2({x},{y})"), fig2_dag_relaxed(int(x), int(y))) else { continue };
        if let Some(report) = b.ok(&format!("analysis of fig2({x},{y})"), compute_ratios(&g, limits)) {
            growth.push(report.poa_sc.value.clone());
        }
    }
    b.check(growth.windows(2).all(|w| w[0] < w[1]), || {
        format!("PoA_sc not strictly increasing: {}", growth.iter().map(show).collect::<Vec<_>>().join(", "))
    });
    b.check(growth.last().map_or(false, |v| v > &RatioValue::Exact(int(40))), || {
        "PoA_sc at x = 100 does not exceed 40".to_string()
    });
    measured.push(format!("growth {}", growth.iter().map(show).collect::<Vec<_>>().join(" < ")));
    b.finish(measured.join("; "))
}

/// Parallel links with a threshold edge: unique equilibrium and exact
/// stability ratio.
pub fn criterion_2() -> CriterionResult {
    let eps = ratio(1, 1000);
    let mut b = Builder::new(
        2,
        "Lem7 Thm8",
        "unique NE with sum-cost n-1+1/n; PoS_sc = (n-1+1/n)/(1+eps); limit n+1/n-1",
        "threshold parallel links, n = 2..5, eps = 1/1000",
    );
    let closed_form = |n: i64, eps: &Rational| (int(n - 1) + ratio(1, n)) / (Rational::one() + eps);
    let mut measured = Vec::new();
    for n in 2..=5i64 {
        let Some(g) = b.ok(&format!("fig3({n})"), fig3_parallel(n as u32, eps.clone())) else { continue };
        let limits = EnumerationLimits::default();
        let Some(report) = b.ok(&format!("analysis of fig3({n})"), compute_ratios(&g, limits)) else { continue };
        let distinct = report.equilibria.distinct();
        b.check(distinct.len() == 1, || format!("n={n}: {} equilibria up to permutation", distinct.len()));
        let ne_cost = int(n - 1) + ratio(1, n);
        b.check(distinct.iter().all(|(m, _)| m.sum_cost == ne_cost), || {
            format!("n={n}: equilibrium sum-cost differs from {}", format_rational(&ne_cost))
        });
        b.check(report.optimum_sc.value == Rational::one() + &eps, || format!("n={n}: optimum is not 1+eps"));
        let want = closed_form(n, &eps);
        b.check(exact(&report.pos_sc.value) == Some(&want), || {
            format!("n={n}: PoS_sc {} != {}", show(&report.pos_sc.value), format_rational(&want))
        });
        let limit = closed_form(n, &Rational::zero());
        let symbolic = int(n) + ratio(1, n) - int(1);
        b.check(limit == symbolic, || format!("n={n}: limit {} != n+1/n-1", format_rational(&limit)));
        measured.push(format!("n={n}: PoS_sc={}", show(&report.pos_sc.value)));
    }
    b.finish(measured.join(", "))
}

/// Two parallel links: both anarchy ratios equal `n`.
pub fn criterion_3() -> CriterionResult {
    let mut b = Builder::new(3, "Thm5 Thm9", "PoA_sc = PoA_mc = n", "two links of cost 1 and n, n = 2, 5");
    let mut measured = Vec::new();
    for n in [2u32, 5] {
        let g = two_link(n);
        let Some(report) = b.ok(&format!("two-link({n})"), compute_ratios(&g, EnumerationLimits::default()))
        else {
            continue;
        };
        let want = RatioValue::Exact(int(i64::from(n)));
        b.check(report.poa_sc.value == want, || format!("n={n}: PoA_sc = {}", show(&report.poa_sc.value)));
        b.check(report.poa_mc.value == want, || format!("n={n}: PoA_mc = {}", show(&report.poa_mc.value)));
        measured.push(format!(
            "n={n}: PoA_sc={} PoA_mc={}",
            show(&report.poa_sc.value),
            show(&report.poa_mc.value)
        ));
    }
    b.finish(measured.join(", "))
}

/// Largest `measured / bound` over the verdicts with the given tag.
fn track_worst(worst: &mut Option<Rational>, report: &AnalysisReport, tag: &str) {
    if let Some(v) = report.verdict(tag) {
        if let (RatioValue::Exact(m), false) = (&v.measured, v.bound.is_zero()) {
            let r = m / &v.bound;
            if worst.as_ref().map_or(true, |w| &r > w) {
                *worst = Some(r);
            }
        }
    }
}

fn worst_summary(tags: &[&str], worst: &[Option<Rational>]) -> String {
    tags.iter()
        .zip(worst)
        .map(|(t, w)| {
            let w = w.as_ref().map_or("-".to_string(), |r| format!("{:.3}", crate::rational::to_f64(r)));
            format!("{t} max ratio/bound {w}")
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Random symmetric series-parallel games: all four ratios and the
/// per-agent cost bound.
pub fn criterion_4(seed: u64) -> CriterionResult {
    const COUNT: u64 = 200;
    let tags = ["Thm5:PoA_sc<=n", "Thm9:PoA_mc<=n", "Thm8:PoS_sc<=n", "Thm10:PoS_mc<=n", "Lem3:p_j(NE)<=opt_sc"];
    let mut b = Builder::new(
        4,
        "Thm5 Thm8 Thm9 Thm10 Lem3 Lem6",
        "PoA_sc, PoA_mc, PoS_sc, PoS_mc <= n; NE agent cost <= opt_sc",
        format!("{COUNT} random SP games, n in {{2,3}}, <= 8 edges, mixed schemes, seeds {seed}+i"),
    );
    let mut worst = vec![None; tags.len()];
    for i in 0..COUNT {
        let s = seed.wrapping_add(i);
        let agents = 2 + (i % 2) as usize;
        let Some(g) = b.ok(&format!("random-sp seed {s}"), random_sp(&sp_params(s, agents))) else { continue };
        let Some(report) = b.ok(&format!("analysis seed {s}"), compute_ratios(&g, EnumerationLimits::default()))
        else {
            continue;
        };
        for (tag, w) in tags.iter().zip(worst.iter_mut()) {
            match report.verdict(tag) {
                None => b.fail(format!("seed {s}: verdict {tag} missing (class {})", report.class)),
                Some(v) if !v.holds => b.fail(format!(
                    "seed {s}: {tag} violated, measured {} bound {}",
                    v.measured,
                    format_rational(&v.bound)
                )),
                Some(_) => track_worst(w, &report, tag),
            }
        }
    }
    b.finish(worst_summary(&tags, &worst))
}

/// Random asymmetric DAG games: both stability bounds.
pub fn criterion_5(seed: u64) -> CriterionResult {
    const COUNT: u64 = 100;
    let tags = ["Thm13:PoS_sc<=n", "Thm14:PoS_mc<=n^2"];
    let mut b = Builder::new(
        5,
        "Thm13 Thm14",
        "PoS_sc <= n, PoS_mc <= n^2",
        format!("{COUNT} random asymmetric DAG games, n in {{2,3}}, seeds {}+i", seed.wrapping_add(10_000)),
    );
    let mut worst = vec![None; tags.len()];
    for i in 0..COUNT {
        let s = seed.wrapping_add(10_000 + i);
        let agents = 2 + (i % 2) as usize;
        let Some(g) = b.ok(&format!("random-dag seed {s}"), random_asymmetric(&dag_params(s, agents))) else {
            continue;
        };
        let Some(report) = b.ok(&format!("analysis seed {s}"), compute_ratios(&g, EnumerationLimits::default()))
        else {
            continue;
        };
        for (tag, w) in tags.iter().zip(worst.iter_mut()) {
            match report.verdict(tag) {
                None => b.fail(format!("seed {s}: verdict {tag} missing")),
                Some(v) if !v.holds => b.fail(format!("seed {s}: {tag} violated, measured {}", v.measured)),
                Some(_) => track_worst(w, &report, tag),
            }
        }
    }
    b.finish(worst_summary(&tags, &worst))
}

fn random_instance(seed: u64, i: u64) -> Result<GameInstance> {
    let agents = 2 + (i % 2) as usize;
    if i % 2 == 0 {
        random_sp(&sp_params(seed, agents))
    } else {
        random_asymmetric(&dag_params(seed, agents))
    }
}

/// Potential sandwich, exact potential identity and dynamics convergence.
pub fn criterion_6(seed: u64) -> CriterionResult {
    const INSTANCES: u64 = 50;
    const PROFILES_EACH: usize = 20;
    const DEVIATIONS: usize = 500;
    const DEVIATIONS_EACH: usize = 10;
    /// Games whose agents have a single path admit no deviation, so the
    /// deviation sample may draw on further games.
    const MAX_INSTANCES: u64 = 500;
    let mut b = Builder::new(
        6,
        "Prop1 Lem6",
        "cost_sc <= Phi <= n cost_sc; dPhi = dp_j; dynamics end at a NE with decreasing Phi",
        format!(
            "{} profiles and 4 dynamics runs each over {INSTANCES} random SP and DAG games; {} deviations from the same family",
            INSTANCES as usize * PROFILES_EACH,
            DEVIATIONS
        ),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(20_000));
    let (mut profiles_checked, mut deviations_checked, mut runs, mut total_steps) = (0usize, 0usize, 0usize, 0usize);
    for i in 0..MAX_INSTANCES {
        if i >= INSTANCES && deviations_checked >= DEVIATIONS {
            break;
        }
        let s = seed.wrapping_add(20_000 + i);
        let Some(g) = b.ok(&format!("instance seed {s}"), random_instance(s, i)) else { continue };
        let Some(profiles) = b.ok("enumeration", enumerate_profiles(&g, EnumerationLimits::default())) else {
            continue;
        };
        let Some(strategies) = b.ok("paths", g.agent_paths(DEFAULT_PATH_CAP)) else { continue };
        let n = int(g.agent_count() as i64);

        let sample = if i < INSTANCES { PROFILES_EACH } else { 0 };
        for _ in 0..sample {
            let p = profiles.choose(&mut rng).expect("feasible games have profiles");
            let (Cost::Finite(sc), Ok(phi)) = (sum_cost(&g, p), potential(&g, p)) else {
                b.fail(format!("seed {s}: feasible profile without finite cost"));
                continue;
            };
            b.check(sc <= phi && phi <= &n * &sc, || {
                format!(
                    "seed {s}: sandwich fails, cost_sc {} Phi {}",
                    format_rational(&sc),
                    format_rational(&phi)
                )
            });
            profiles_checked += 1;
        }

        let mut done = 0;
        let mut attempts = 0;
        while done < DEVIATIONS_EACH && deviations_checked < DEVIATIONS && attempts < 50 * DEVIATIONS_EACH {
            attempts += 1;
            let p = profiles.choose(&mut rng).expect("nonempty");
            let agent = rng.gen_range(0..g.agent_count());
            let path = strategies[agent].choose(&mut rng).expect("agents have paths");
            if path == p.path(agent) {
                continue;
            }
            let q = p.with_path(agent, path.clone());
            if !is_feasible(&g, &q) {
                continue;
            }
            let (Ok(before), Ok(after)) = (potential(&g, p), potential(&g, &q)) else { continue };
            let old = agent_cost(&g, p, agent);
            let new = agent_cost(&g, &q, agent);
            let predicted = deviation_cost(&g, p, agent, path);
            b.check(new == predicted, || format!("seed {s}: deviation cost {predicted} but realized {new}"));
            match (old, new) {
                (Cost::Finite(old), Cost::Finite(new)) => b.check(&after - &before == &new - &old, || {
                    format!(
                        "seed {s}: dPhi {} != dp_j {}",
                        format_rational(&(&after - &before)),
                        format_rational(&(&new - &old))
                    )
                }),
                _ => b.fail(format!("seed {s}: feasible deviation with infinite cost")),
            }
            done += 1;
            deviations_checked += 1;
        }
        if i >= INSTANCES {
            continue;
        }

        let agents = g.agent_count();
        let policies = [
            DeviationPolicy::default(),
            DeviationPolicy { order: AgentOrder::Seeded(s), rule: ImprovementRule::BestResponse },
            DeviationPolicy { order: AgentOrder::RoundRobin, rule: ImprovementRule::FirstImproving },
            DeviationPolicy {
                order: AgentOrder::Fixed((0..agents).rev().collect()),
                rule: ImprovementRule::FirstImproving,
            },
        ];
        for policy in &policies {
            let start = profiles.choose(&mut rng).expect("nonempty");
            let Some(trace) = b.ok(&format!("dynamics seed {s}"), run_dynamics(&g, start, policy, DEFAULT_STEP_CAP))
            else {
                continue;
            };
            runs += 1;
            total_steps += trace.step_count();
            b.check(is_nash(&g, &trace.terminal), || format!("seed {s}: dynamics ended off equilibrium"));
            let mut last = trace.start_potential.clone();
            for step in &trace.steps {
                b.check(step.potential_after < last, || format!("seed {s}: potential did not drop"));
                last = step.potential_after.clone();
            }
            b.check(trace.step_count() <= profiles.len(), || format!("seed {s}: more steps than profiles"));
        }
    }
    b.check(deviations_checked == DEVIATIONS, || format!("only {deviations_checked} feasible deviations found"));
    b.finish(format!(
        "{profiles_checked} sandwiches, {deviations_checked} identities, {runs} runs with {total_steps} steps"
    ))
}

/// The constructive procedure on random series-parallel games and both
/// parallel-link families.
pub fn criterion_7(seed: u64) -> CriterionResult {
    const COUNT: u64 = 50;
    let mut b = Builder::new(
        7,
        "Thm10",
        "constructed NE has max-cost <= n opt_mc; equilibrium potentials strictly decrease",
        format!("{COUNT} random SP games (n in {{2,3}}), two-link n = 2..5, threshold links n = 2..5"),
    );
    let mut games: Vec<(String, Result<GameInstance>)> = (0..COUNT)
        .map(|i| {
            let s = seed.wrapping_add(30_000 + i);
            (format!("random-sp seed {s}"), random_sp(&sp_params(s, 2 + (i % 2) as usize)))
        })
        .collect();
    for n in 2..=5u32 {
        games.push((format!("two-link({n})"), Ok(two_link(n))));
        games.push((format!("fig3({n})"), fig3_parallel(n, ratio(1, 1000))));
    }
    let (mut rounds, mut worst): (usize, Option<Rational>) = (0, None);
    for (name, game) in games {
        let Some(g) = b.ok(&name, game) else { continue };
        let Some(opt) = b.ok(&name, optimal_profile(&g, Criterion::MaxCost, EnumerationLimits::default())) else {
            continue;
        };
        let Some(out) = b.ok(&name, constructive_min_maxcost_ne(&g, &opt.profile, &DeviationPolicy::default()))
        else {
            continue;
        };
        let n = int(g.agent_count() as i64);
        b.check(is_nash(&g, &out.equilibrium), || format!("{name}: result is not an equilibrium"));
        b.check(out.max_cost <= &n * &opt.value, || {
            format!(
                "{name}: max-cost {} > n * {}",
                format_rational(&out.max_cost),
                format_rational(&opt.value)
            )
        });
        let potentials = out.equilibrium_potentials();
        b.check(potentials.windows(2).all(|w| w[1] < w[0]), || format!("{name}: potentials not decreasing"));
        rounds += out.iterations.len();
        if !opt.value.is_zero() {
            let r = &out.max_cost / &opt.value;
            if worst.as_ref().map_or(true, |w| &r > w) {
                worst = Some(r);
            }
        }
    }
    b.finish(format!(
        "max (max-cost / opt_mc) = {}, {rounds} replacement rounds",
        worst.map_or("-".to_string(), |w| format_rational(&w))
    ))
}

/// Every simple path inside `E(big)` that `small` can absorb.
pub fn brute_force_extensions(instance: &GameInstance, big: &StrategyProfile, small: &StrategyProfile) -> Result<Vec<Path>> {
    let graph = instance.graph();
    let used = big.used_edges();
    let all = enumerate_st_paths(graph, graph.source(), graph.sink(), DEFAULT_PATH_CAP)?;
    Ok(all
        .into_iter()
        .filter(|p| p.iter().all(|e| used.contains(e)))
        .filter(|p| p.iter().all(|&e| small.load(e) < instance.capacity(e)))
        .collect())
}

/// Extension paths against the brute-force oracle.
pub fn criterion_8(seed: u64) -> CriterionResult {
    const COUNT: u64 = 100;
    let mut b = Builder::new(
        8,
        "Lem2",
        "extension path lies in E(big) and keeps small + path feasible",
        format!("{COUNT} random SP games, n in {{2,3}}, independent profiles with r = n - 1"),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(40_000));
    let mut checked = 0;
    for i in 0..COUNT {
        let s = seed.wrapping_add(40_000 + i);
        let agents = 2 + (i % 2) as usize;
        let Some(g) = b.ok(&format!("random-sp seed {s}"), random_sp(&sp_params(s, agents))) else { continue };
        let Some(fewer) = b.ok(
            &format!("seed {s} with {} agents", agents - 1),
            GameInstance::symmetric(g.graph().clone(), g.schemes().to_vec(), agents - 1),
        ) else {
            continue;
        };
        let limits = EnumerationLimits::default();
        let (Some(bigs), Some(smalls)) = (
            b.ok("enumeration", enumerate_profiles(&g, limits)),
            b.ok("enumeration", enumerate_profiles(&fewer, limits)),
        ) else {
            continue;
        };
        let big = bigs.choose(&mut rng).expect("nonempty");
        let small = smalls.choose(&mut rng).expect("nonempty");
        let Some(oracle) = b.ok("oracle", brute_force_extensions(&g, big, small)) else { continue };
        b.check(!oracle.is_empty(), || format!("seed {s}: no valid extension exists"));
        match feasible_extension(&g, big, small) {
            Ok(path) => {
                b.check(oracle.contains(&path), || format!("seed {s}: returned path {path:?} is not valid"));
                let mut paths = small.paths().to_vec();
                paths.push(path);
                let combined = StrategyProfile::from_st_paths(g.graph(), paths);
                b.check(combined.map_or(false, |c| is_feasible(&g, &c)), || {
                    format!("seed {s}: combined profile infeasible")
                });
            }
            Err(err) => b.fail(format!("seed {s}: {err} while the oracle found {} paths", oracle.len())),
        }
        checked += 1;
    }
    b.finish(format!("{checked} cases agree with the oracle"))
}

pub fn run_criterion(id: u8, seed: u64) -> Option<CriterionResult> {
    Some(match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(seed),
        5 => criterion_5(seed),
        6 => criterion_6(seed),
        7 => criterion_7(seed),
        8 => criterion_8(seed),
        _ => return None,
    })
}

/// Runs all eight checks in order.
pub fn run_suite(config: &SuiteConfig) -> Vec<CriterionResult> {
    let started = Instant::now();
    CRITERIA
        .iter()
        .map(|&id| {
            if config.budget.map_or(false, |budget| started.elapsed() > budget) {
                return CriterionResult {
                    id,
                    tags: "",
                    claim: String::new(),
                    measured: String::new(),
                    instances: String::new(),
                    failures: vec!["not run: time budget exhausted".to_string()],
                    elapsed: Duration::ZERO,
                };
            }
            run_criterion(id, config.seed).expect("known criterion")
        })
        .collect()
}
