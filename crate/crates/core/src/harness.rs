//! Experiment drivers that sweep or sample information-flow graphs and
//! cross-check solvability, domination and homology against each other.
//!
//! Instances are evaluated on the rayon pool and merged in enumeration
//! order, so a report depends only on its arguments and seed.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynet::{domination, Digraph};
use crate::error::{Error, Result};
use crate::homology::{betti_reduced, BettiVector};
use crate::protocol::{protocol_complex, XiMap};
use crate::simplicial::{pseudosphere, CSimplex, Label};
use crate::solver::{averaging_map, kset_by_domination, solve, verify_decision_map};
use crate::tasks::{approx_task, decode_tuple, kset_task, Rational, TaskDescriptor, TaskKind};

/// Largest `n` for exhaustive digraph sweeps (`2^12` digraphs).
pub const MAX_EXHAUSTIVE_N: usize = 4;

/// All `2^(n(n-1))` labeled irreflexive digraphs on `n` nodes, in bitmask order.
pub fn enumerate_digraphs(n: usize) -> Result<impl Iterator<Item = Digraph>> {
    if n == 0 || n > MAX_EXHAUSTIVE_N {
        return Err(Error::ProcessCount { n, max: MAX_EXHAUSTIVE_N });
    }
    let count = 1u64 << Digraph::arc_slots(n);
    Ok((0..count).map(move |mask| Digraph::from_bitmask(n, mask).expect("mask in range")))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceRecord {
    /// Digraph bitmask (see [`Digraph::from_bitmask`]) or trial number.
    pub id: u64,
    pub gamma: usize,
    pub verdicts: Vec<(&'static str, String)>,
    pub betti: Option<BettiVector>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    pub id: u64,
    pub detail: String,
    /// Single-instance command line reproducing the check.
    pub reproduce: String,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub experiment: String,
    pub parameters: Vec<(&'static str, String)>,
    pub instances: usize,
    pub agreements: usize,
    pub disagreements: Vec<Disagreement>,
    pub records: Vec<InstanceRecord>,
    pub elapsed: Duration,
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: &'a str,
    instances: usize,
    agreements: usize,
    disagreements: usize,
    passed: bool,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }

    /// Line-oriented report followed by a JSON summary line. Wall-clock time
    /// is left out so identical runs render identically.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment {}", self.experiment);
        for (k, v) in &self.parameters {
            let _ = writeln!(s, "param {k}={v}");
        }
        for r in &self.records {
            let _ = write!(s, "instance {:#x} gamma={}", r.id, r.gamma);
            for (k, v) in &r.verdicts {
                let _ = write!(s, " {k}={v}");
            }
            if let Some(b) = &r.betti {
                let _ = write!(s, " betti=[{b}]");
            }
            s.push('\n');
        }
        for d in &self.disagreements {
            let _ = writeln!(s, "DISAGREEMENT {:#x}: {}\n  reproduce: {}", d.id, d.detail, d.reproduce);
        }
        let summary = Summary {
            experiment: &self.experiment,
            instances: self.instances,
            agreements: self.agreements,
            disagreements: self.disagreements.len(),
            passed: self.passed(),
        };
        let _ = writeln!(s, "SUMMARY {}", serde_json::to_string(&summary).expect("summary serializes"));
        s
    }
}

/// Per-instance outcome before merging.
struct Outcome {
    record: InstanceRecord,
    problems: Vec<String>,
}

fn assemble(
    experiment: &str,
    parameters: Vec<(&'static str, String)>,
    outcomes: Vec<Result<Outcome>>,
    reproduce: impl Fn(u64) -> String,
    started: Instant,
) -> Result<ExperimentReport> {
    let mut report = ExperimentReport {
        experiment: experiment.to_string(),
        parameters,
        instances: 0,
        agreements: 0,
        disagreements: Vec::new(),
        records: Vec::new(),
        elapsed: Duration::ZERO,
    };
    for outcome in outcomes {
        let outcome = outcome?;
        report.instances += 1;
        if outcome.problems.is_empty() {
            report.agreements += 1;
        }
        for detail in outcome.problems {
            report.disagreements.push(Disagreement {
                id: outcome.record.id,
                detail,
                reproduce: reproduce(outcome.record.id),
            });
        }
        report.records.push(outcome.record);
    }
    report.elapsed = started.elapsed();
    Ok(report)
}

fn join_labels(values: &[Label]) -> String {
    values.iter().map(Label::as_str).collect::<Vec<_>>().join(",")
}

fn task_json(desc: &TaskDescriptor) -> String {
    serde_json::to_string(desc).expect("descriptor serializes")
}

/// Solvability of k-set agreement coincides with `γ <= k` on every digraph,
/// and the dominating-set protocol is a valid witness whenever `γ <= k`.
pub fn check_kset_theorem(n: usize, values: &[Label], k: usize) -> Result<ExperimentReport> {
    let started = Instant::now();
    let task = kset_task(n, values, k)?;
    let desc = TaskDescriptor {
        kind: TaskKind::Kset,
        n,
        values: values.iter().map(|l| serde_json::Value::String(l.to_string())).collect(),
        k: Some(k),
        m: None,
        eps: None,
    };
    let graphs: Vec<Digraph> = enumerate_digraphs(n)?.collect();
    let outcomes = graphs
        .par_iter()
        .map(|h| -> Result<Outcome> {
            let gamma = domination(h).gamma;
            let verdict = solve(&task, h)?;
            let mut problems = Vec::new();
            let mut verdicts = vec![("solve", if verdict.is_solvable() { "solvable" } else { "unsolvable" }.to_string())];
            if verdict.is_solvable() != (gamma <= k) {
                problems.push(format!("solve says {} but gamma = {gamma}, k = {k}", verdicts[0].1));
            }
            if let Some(w) = verdict.witness() {
                if !verify_decision_map(&task, h, w)? {
                    problems.push("search witness fails verification".into());
                }
            }
            if gamma <= k {
                let dm = kset_by_domination(h, task.input_complex(), k)?;
                let ok = verify_decision_map(&task, h, &dm)?;
                verdicts.push(("domination_witness", if ok { "verified" } else { "rejected" }.to_string()));
                if !ok {
                    problems.push("dominating-set witness fails verification".into());
                }
            }
            Ok(Outcome { record: InstanceRecord { id: h.bitmask().unwrap(), gamma, verdicts, betti: None }, problems })
        })
        .collect();
    let json = task_json(&desc);
    assemble(
        "kset",
        vec![("n", n.to_string()), ("values", join_labels(values)), ("k", k.to_string())],
        outcomes,
        |mask| format!("knowall solve --n {n} --mask {mask} --task '{json}'"),
        started,
    )
}

/// Which digraphs an experiment visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    Exhaustive,
    /// `count` distinct qualifying digraphs chosen with a seeded shuffle.
    Sampled { count: usize, seed: u64 },
}

/// `γ > k` implies `β̃_0 = ... = β̃_{k-1} = 0` for the binary protocol complex.
pub fn check_connectivity_theorem(n: usize, k: usize, sampling: Sampling) -> Result<ExperimentReport> {
    let started = Instant::now();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let binary = pseudosphere(n, &[Label::new("0"), Label::new("1")])?;
    let mut pool: Vec<Digraph> = enumerate_digraphs(n)?.filter(|h| domination(h).gamma > k).collect();
    let mut parameters = vec![("n", n.to_string()), ("k", k.to_string())];
    if let Sampling::Sampled { count, seed } = sampling {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        pool.shuffle(&mut rng);
        pool.truncate(count);
        pool.sort_by_key(|h| h.bitmask());
        parameters.push(("sample", count.to_string()));
        parameters.push(("seed", seed.to_string()));
    }
    let outcomes = pool
        .par_iter()
        .map(|h| -> Result<Outcome> {
            let gamma = domination(h).gamma;
            let (complex, _) = protocol_complex(h, &binary)?;
            let betti = betti_reduced(&complex, k - 1)?;
            let problems = match betti.first_nonzero() {
                Some(d) => vec![format!("gamma = {gamma} > {k} but reduced Betti number {d} is nonzero")],
                None => Vec::new(),
            };
            Ok(Outcome {
                record: InstanceRecord { id: h.bitmask().unwrap(), gamma, verdicts: Vec::new(), betti: Some(betti) },
                problems,
            })
        })
        .collect();
    assemble(
        "connectivity",
        parameters,
        outcomes,
        |mask| format!("knowall homology --n {n} --mask {mask} --values 0,1 --up-to {}", k - 1),
        started,
    )
}

/// Whether two simplex families generate the same complex (empty simplices
/// contribute nothing).
pub fn same_closure(a: &[CSimplex], b: &[CSimplex]) -> bool {
    let covered = |x: &[CSimplex], y: &[CSimplex]| {
        x.iter().filter(|s| !s.is_empty()).all(|s| y.iter().any(|t| s.is_face_of(t)))
    };
    covered(a, b) && covered(b, a)
}

/// Conclusion of the union-cover lemma for scissor cuts: given input facets
/// `sigma0` and `others` whose first `s` entries share codimension-one faces
/// with `sigma0`, equal input unions imply equal image unions.
/// Returns `None` when the hypothesis does not hold.
pub fn union_cover_preserved(xi: &XiMap, sigma0: &CSimplex, others: &[CSimplex], s: usize) -> Option<bool> {
    let d = sigma0.len();
    let distinct: BTreeSet<&CSimplex> = std::iter::once(sigma0).chain(others).collect();
    let hypothesis = s >= 1
        && s <= others.len()
        && distinct.len() == others.len() + 1
        && others[..s].iter().all(|o| o.intersection(sigma0).len() + 1 == d)
        && {
            let cuts: Vec<CSimplex> = others.iter().map(|o| o.intersection(sigma0)).collect();
            same_closure(&cuts, &cuts[..s])
        };
    if !hypothesis {
        return None;
    }
    let image0 = xi.get(sigma0)?;
    let cuts: Vec<CSimplex> = others.iter().map(|o| xi.get(o).map(|x| x.intersection(image0))).collect::<Option<_>>()?;
    Some(same_closure(&cuts, &cuts[..s]))
}

/// Dimension of `∩ Ξ(σ_i)` over `sigma0` and `neighbours` (-1 when empty).
pub fn image_intersection_dim(xi: &XiMap, sigma0: &CSimplex, neighbours: &[CSimplex]) -> Option<isize> {
    let mut acc = xi.get(sigma0)?.clone();
    for s in neighbours {
        acc = acc.intersection(xi.get(s)?);
    }
    Some(acc.dim())
}

fn random_digraph(n: usize, rng: &mut ChaCha8Rng) -> Digraph {
    let density: f64 = rng.gen();
    let arcs: Vec<(usize, usize)> = (0..n)
        .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
        .collect();
    Digraph::from_arcs(n, arcs.into_iter().filter(|_| rng.gen_bool(density))).expect("valid arcs")
}

/// Facets of `Ψ([n], values)` differing from `tuple` in exactly one process.
fn neighbours(tuple: &[usize], base: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for p in 0..tuple.len() {
        for v in 0..base {
            if v != tuple[p] {
                let mut t = tuple.to_vec();
                t[p] = v;
                out.push(t);
            }
        }
    }
    out
}

struct ScissorTrial {
    graph: Digraph,
    sigma0: Vec<usize>,
    /// union-cover family: first `cover_s` entries are neighbours
    cover_family: Vec<Vec<usize>>,
    cover_s: usize,
    /// intersection family: all neighbours
    meet_family: Vec<Vec<usize>>,
}

fn draw_trial(n: usize, base: usize, rng: &mut ChaCha8Rng) -> ScissorTrial {
    let graph = random_digraph(n, rng);
    let gamma = domination(&graph).gamma;
    let sigma0: Vec<usize> = (0..n).map(|_| rng.gen_range(0..base)).collect();
    let nbrs = neighbours(&sigma0, base);

    let mut shuffled = nbrs.clone();
    shuffled.shuffle(rng);
    let s = rng.gen_range(1..=shuffled.len());
    let chosen: Vec<Vec<usize>> = shuffled[..s].to_vec();
    let cut_names = |t: &[usize]| -> u64 {
        (0..n).filter(|&p| t[p] == sigma0[p]).fold(0, |m, p| m | 1 << p)
    };
    let chosen_cuts: Vec<u64> = chosen.iter().map(|t| cut_names(t)).collect();
    let total = base.pow(n as u32);
    let mut extra: Vec<Vec<usize>> = (0..total)
        .map(|i| decode_tuple(i, base, n))
        .filter(|t| *t != sigma0 && !chosen.contains(t))
        .filter(|t| {
            let c = cut_names(t);
            chosen_cuts.iter().any(|&cc| c & !cc == 0)
        })
        .filter(|_| rng.gen_bool(0.5))
        .collect();
    extra.shuffle(rng);
    let mut cover_family = chosen;
    cover_family.extend(extra);

    let k = gamma - 1;
    let mut meet = nbrs;
    meet.shuffle(rng);
    let t = rng.gen_range(1..=meet.len().min(k.max(1)));
    meet.truncate(t);
    ScissorTrial { graph, sigma0, cover_family, cover_s: s, meet_family: meet }
}

/// Random trials of the two scissor-cut lemmas on `Ψ([n], values)`:
/// union-cover preservation, and `dim ∩ Ξ(σ_i) >= k - t` whenever `γ > k`.
pub fn check_scissor_lemmas(n: usize, values: &[Label], trials: usize, seed: u64) -> Result<ExperimentReport> {
    let started = Instant::now();
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if n < 2 || Digraph::arc_slots(n) > 64 {
        return Err(Error::ProcessCount { n, max: 8 });
    }
    let input = pseudosphere(n, values)?;
    let values: Vec<Label> = input.vertices().iter().filter(|v| v.name == 0).map(|v| v.label.clone()).collect();
    let base = values.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let drawn: Vec<Option<ScissorTrial>> =
        (0..trials).map(|_| (base > 1).then(|| draw_trial(n, base, &mut rng))).collect();
    let to_facet = |t: &[usize]| CSimplex::from_labels(t.iter().map(|&d| values[d].clone()));

    let outcomes = drawn
        .par_iter()
        .enumerate()
        .map(|(i, trial)| -> Result<Outcome> {
            let id = i as u64;
            // a single input value: every facet coincides, nothing to check
            let Some(trial) = trial else {
                return Ok(Outcome {
                    record: InstanceRecord { id, gamma: 0, verdicts: vec![("lemmas", "vacuous".into())], betti: None },
                    problems: Vec::new(),
                });
            };
            let gamma = domination(&trial.graph).gamma;
            let (_, xi) = protocol_complex(&trial.graph, &input)?;
            let sigma0 = to_facet(&trial.sigma0);
            let mut problems = Vec::new();

            let cover: Vec<CSimplex> = trial.cover_family.iter().map(|t| to_facet(t)).collect();
            let cover_ok = match union_cover_preserved(&xi, &sigma0, &cover, trial.cover_s) {
                Some(ok) => ok,
                None => {
                    problems.push("sampled union-cover family violates the hypothesis".into());
                    false
                }
            };
            if !cover_ok {
                problems.push(format!("union-cover equality fails (s = {}, t = {})", trial.cover_s, cover.len()));
            }

            let meet: Vec<CSimplex> = trial.meet_family.iter().map(|t| to_facet(t)).collect();
            let dim = image_intersection_dim(&xi, &sigma0, &meet).expect("facets of the input complex");
            let k = gamma as isize - 1;
            let t = meet.len() as isize;
            if dim < k - t {
                problems.push(format!("dim of image intersection {dim} < k - t = {}", k - t));
            }
            let verdicts = vec![
                ("graph", format!("{:#x}", trial.graph.bitmask().unwrap())),
                ("cover", format!("s={},t={},{}", trial.cover_s, cover.len(), if cover_ok { "ok" } else { "FAIL" })),
                ("meet", format!("t={t},k={k},dim={dim}")),
            ];
            Ok(Outcome { record: InstanceRecord { id, gamma, verdicts, betti: None }, problems })
        })
        .collect();
    let labels = join_labels(&values);
    assemble(
        "scissor",
        vec![("n", n.to_string()), ("values", labels.clone()), ("trials", trials.to_string()), ("seed", seed.to_string())],
        outcomes,
        |_| format!("knowall check scissor --n {n} --values {labels} --trials {trials} --seed {seed}"),
        started,
    )
}

/// Complete digraph minus the Hamiltonian cycle `0 -> 1 -> ... -> 0`.
pub fn complete_minus_cycle(n: usize) -> Result<Digraph> {
    let cycle = Digraph::directed_cycle(n)?;
    Digraph::from_arcs(n, Digraph::complete(n)?.arcs().filter(|&(p, q)| !cycle.has_arc(p, q)))
}

/// ε-approximate agreement with `ε = 1/n < 1/(n-1)` on the `1/n` grid is
/// solvable exactly on digraphs with a universal node; on the complete
/// digraph minus a Hamiltonian cycle, averaging solves `1/(n-1)`-agreement
/// with width exactly `1/(n-1)` on mixed inputs.
pub fn check_approx_theorem(n: usize) -> Result<ExperimentReport> {
    let started = Instant::now();
    if !(2..=MAX_EXHAUSTIVE_N).contains(&n) {
        return Err(Error::ProcessCount { n, max: MAX_EXHAUSTIVE_N });
    }
    let fine_m = n as u64;
    let fine_eps = Rational::new(1, n as i64)?;
    let fine = approx_task(n, fine_m, fine_eps)?;
    let coarse_m = (n - 1) as u64;
    let coarse_eps = Rational::new(1, (n - 1) as i64)?;
    let coarse = approx_task(n, coarse_m, coarse_eps)?;

    let graphs: Vec<Digraph> = enumerate_digraphs(n)?.collect();
    let mut outcomes: Vec<Result<Outcome>> = graphs
        .par_iter()
        .map(|h| -> Result<Outcome> {
            let gamma = domination(h).gamma;
            let verdict = solve(&fine, h)?;
            let label = if verdict.is_solvable() { "solvable" } else { "unsolvable" };
            let mut problems = Vec::new();
            if verdict.is_solvable() != (gamma == 1) {
                problems.push(format!("eps = {fine_eps}: solve says {label} but gamma = {gamma}"));
            }
            if let Some(w) = verdict.witness() {
                if !verify_decision_map(&fine, h, w)? {
                    problems.push("search witness fails verification".into());
                }
            }
            Ok(Outcome {
                record: InstanceRecord { id: h.bitmask().unwrap(), gamma, verdicts: vec![("solve", label.into())], betti: None },
                problems,
            })
        })
        .collect();

    let tight = complete_minus_cycle(n)?;
    outcomes.push((|| {
        let gamma = domination(&tight).gamma;
        let mut problems = Vec::new();
        let dm = averaging_map(&tight, coarse.input_complex(), coarse_m)?;
        if !verify_decision_map(&coarse, &tight, &dm)? {
            problems.push("averaging map fails verification".into());
        }
        let (_, xi) = protocol_complex(&tight, coarse.input_complex())?;
        for (sigma, image) in xi.iter() {
            let outs: Vec<Rational> = image
                .vertices()
                .iter()
                .map(|v| dm.get(v).expect("total").as_str().parse())
                .collect::<Result<_>>()?;
            let ins: Vec<&str> = sigma.vertices().iter().map(|v| v.label.as_str()).collect();
            let (lo, hi) = (*outs.iter().min().unwrap(), *outs.iter().max().unwrap());
            if ins.iter().all(|v| *v == ins[0]) {
                let want: Rational = ins[0].parse()?;
                if outs.iter().any(|o| *o != want) {
                    problems.push(format!("validity fails on unanimous input {sigma}"));
                }
            } else if hi - lo != coarse_eps {
                problems.push(format!("width {} != {coarse_eps} on input {sigma}", hi - lo));
            }
        }
        let searched = solve(&coarse, &tight)?.is_solvable();
        if !searched {
            problems.push(format!("search finds eps = {coarse_eps} unsolvable on the tightness instance"));
        }
        let verdicts = vec![
            ("averaging", if problems.is_empty() { "tight" } else { "FAIL" }.to_string()),
            ("solve_coarse", if searched { "solvable" } else { "unsolvable" }.to_string()),
        ];
        Ok(Outcome { record: InstanceRecord { id: tight.bitmask().unwrap(), gamma, verdicts, betti: None }, problems })
    })());

    assemble(
        "approx",
        vec![
            ("n", n.to_string()),
            ("fine", format!("m={fine_m},eps={fine_eps}")),
            ("coarse", format!("m={coarse_m},eps={coarse_eps}")),
        ],
        outcomes,
        |mask| {
            format!(
                "knowall solve --n {n} --mask {mask} --task '{{\"kind\":\"approx\",\"n\":{n},\"m\":{fine_m},\"eps\":\"{fine_eps}\"}}'"
            )
        },
        started,
    )
}
