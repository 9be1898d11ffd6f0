//! Solvability by decision-map search, and the two constructive protocols
//! (dominating-set set agreement, averaging approximate agreement).
//!
//! A task is solvable on an information-flow graph iff some name-preserving
//! assignment of outputs to protocol vertices sends every `Ξ(σ)` into `Δ(σ)`.
//! The search assigns values to protocol vertices; each input facet is a
//! table constraint over the `n` vertices of its image, kept generalized
//! arc consistent after every decision.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::dynet::{domination, Digraph};
use crate::error::{Error, Result};
use crate::protocol::{compute_views, protocol_complex, View};
use crate::simplicial::{CVertex, ChromaticComplex, Label};
use crate::tasks::{Rational, Task};

/// Output value per protocol vertex `(name, view)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecisionMap(pub BTreeMap<CVertex, Label>);

impl DecisionMap {
    pub fn get(&self, v: &CVertex) -> Option<&Label> {
        self.0.get(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Records a decision; a conflicting earlier decision is a logic error.
    fn decide(&mut self, v: CVertex, value: Label) {
        if let Some(prev) = self.0.insert(v.clone(), value.clone()) {
            assert_eq!(prev, value, "decision rule is not a function of the view at {v}");
        }
    }
}

impl fmt::Display for DecisionMap {
    /// One `name view -> value` line per vertex.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, out) in &self.0 {
            writeln!(f, "{} {} -> {}", v.name + 1, v.label, out)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub backtracks: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Solvable(DecisionMap),
    Unsolvable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveVerdict {
    pub status: SolveStatus,
    pub stats: SearchStats,
}

impl SolveVerdict {
    pub fn is_solvable(&self) -> bool {
        matches!(self.status, SolveStatus::Solvable(_))
    }

    pub fn witness(&self) -> Option<&DecisionMap> {
        match &self.status {
            SolveStatus::Solvable(dm) => Some(dm),
            SolveStatus::Unsolvable => None,
        }
    }
}

fn check_n(task: &Task, ifg: &Digraph) -> Result<()> {
    if task.n() != ifg.n() {
        return Err(Error::ProcessCountMismatch { expected: task.n(), found: ifg.n() });
    }
    Ok(())
}

/// Protocol vertices (canonical order) and, per input facet index, the
/// vertex index of each process in `Ξ(σ)`.
struct Layout {
    vertices: Vec<CVertex>,
    facet_vertices: Vec<Vec<usize>>,
}

fn layout(task: &Task, ifg: &Digraph) -> Result<Layout> {
    let (complex, xi) = protocol_complex(ifg, task.input_complex())?;
    let vertices: Vec<CVertex> = complex.vertices().into_iter().collect();
    let index: BTreeMap<&CVertex, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let facet_vertices = (0..task.input_facet_count())
        .map(|f| {
            let image = xi.get(&task.input_facet(f)).expect("Ξ is total on input facets");
            image.vertices().iter().map(|v| index[v]).collect()
        })
        .collect();
    Ok(Layout { vertices, facet_vertices })
}

struct Search<'a> {
    tables: Vec<&'a [Vec<u16>]>,
    facet_vertices: &'a [Vec<usize>],
    /// input facets whose image contains each vertex
    vertex_facets: Vec<Vec<usize>>,
    stats: SearchStats,
}

impl Search<'_> {
    /// Prunes unsupported values until a fixpoint; false on a wipe-out.
    fn propagate(&self, domains: &mut [u64], mut queue: VecDeque<usize>, queued: &mut [bool]) -> bool {
        while let Some(f) = queue.pop_front() {
            queued[f] = false;
            let vs = &self.facet_vertices[f];
            let mut support = vec![0u64; vs.len()];
            for t in self.tables[f] {
                if t.iter().zip(vs).all(|(&val, &v)| domains[v] >> val & 1 == 1) {
                    for (s, &val) in support.iter_mut().zip(t) {
                        *s |= 1 << val;
                    }
                }
            }
            for (&v, s) in vs.iter().zip(&support) {
                let narrowed = domains[v] & s;
                if narrowed == domains[v] {
                    continue;
                }
                if narrowed == 0 {
                    return false;
                }
                domains[v] = narrowed;
                for &g in &self.vertex_facets[v] {
                    if !queued[g] {
                        queued[g] = true;
                        queue.push_back(g);
                    }
                }
            }
        }
        true
    }

    fn dfs(&mut self, domains: Vec<u64>) -> Option<Vec<u64>> {
        // most constrained open vertex, lowest index on ties
        let Some(v) = (0..domains.len())
            .filter(|&v| domains[v].count_ones() > 1)
            .min_by_key(|&v| (domains[v].count_ones(), v))
        else {
            return Some(domains);
        };
        let mut values = domains[v];
        while values != 0 {
            let val = values.trailing_zeros();
            values &= values - 1;
            self.stats.nodes += 1;
            let mut next = domains.clone();
            next[v] = 1 << val;
            let mut queued = vec![false; self.tables.len()];
            let queue: VecDeque<usize> = self.vertex_facets[v].iter().copied().collect();
            for &f in &queue {
                queued[f] = true;
            }
            if self.propagate(&mut next, queue, &mut queued) {
                if let Some(found) = self.dfs(next) {
                    return Some(found);
                }
            }
            self.stats.backtracks += 1;
        }
        None
    }
}

/// Complete, deterministic search for a decision map.
pub fn solve(task: &Task, ifg: &Digraph) -> Result<SolveVerdict> {
    check_n(task, ifg)?;
    let outputs = task.output_values();
    if outputs.len() > 64 {
        return Err(Error::InvalidParameter("search supports at most 64 output values".into()));
    }
    let lay = layout(task, ifg)?;
    let mut vertex_facets = vec![Vec::new(); lay.vertices.len()];
    for (f, vs) in lay.facet_vertices.iter().enumerate() {
        for &v in vs {
            vertex_facets[v].push(f);
        }
    }
    let mut search = Search {
        tables: (0..task.input_facet_count()).map(|f| task.delta_tuples(f)).collect(),
        facet_vertices: &lay.facet_vertices,
        vertex_facets,
        stats: SearchStats::default(),
    };
    let all = if outputs.len() == 64 { u64::MAX } else { (1u64 << outputs.len()) - 1 };
    let mut domains = vec![all; lay.vertices.len()];
    let facets = search.tables.len();
    let mut queued = vec![true; facets];
    let solution = if search.propagate(&mut domains, (0..facets).collect(), &mut queued) {
        search.dfs(domains)
    } else {
        None
    };
    let status = match solution {
        Some(domains) => SolveStatus::Solvable(DecisionMap(
            lay.vertices
                .iter()
                .zip(&domains)
                .map(|(v, d)| (v.clone(), outputs[d.trailing_zeros() as usize].clone()))
                .collect(),
        )),
        None => SolveStatus::Unsolvable,
    };
    Ok(SolveVerdict { status, stats: search.stats })
}

/// Whether `δ(Ξ(σ)) ∈ Δ(σ)` for every input facet `σ`. A map missing some
/// protocol vertex is an error.
pub fn verify_decision_map(task: &Task, ifg: &Digraph, dm: &DecisionMap) -> Result<bool> {
    check_n(task, ifg)?;
    let lay = layout(task, ifg)?;
    if let Some(v) = lay.vertices.iter().find(|v| !dm.0.contains_key(v)) {
        return Err(Error::PartialDecisionMap(v.to_string()));
    }
    Ok(lay.facet_vertices.iter().enumerate().all(|(f, vs)| {
        let outs: Vec<Label> = vs.iter().map(|&v| dm.0[&lay.vertices[v]].clone()).collect();
        task.is_legal(f, &outs)
    }))
}

/// Applies `rule` to every view of every input facet.
fn decide_by_view<F>(ifg: &Digraph, input_complex: &ChromaticComplex, mut rule: F) -> Result<DecisionMap>
where
    F: FnMut(&View) -> Result<Label>,
{
    // validates the input complex
    protocol_complex(ifg, input_complex)?;
    let mut dm = DecisionMap::default();
    for sigma in input_complex.facets() {
        let inputs: Vec<Label> = sigma.vertices().iter().map(|v| v.label.clone()).collect();
        for view in compute_views(ifg, &inputs)? {
            let out = rule(&view)?;
            dm.decide(view.vertex(), out);
        }
    }
    Ok(dm)
}

/// Set agreement through a minimum dominating set `D`: each process decides
/// the input of the smallest-named member of `D` it has heard from.
pub fn kset_by_domination(ifg: &Digraph, input_complex: &ChromaticComplex, k: usize) -> Result<DecisionMap> {
    let dom = domination(ifg);
    if dom.gamma > k {
        return Err(Error::DominationTooLarge { gamma: dom.gamma, k });
    }
    let d_mask = dom.witness_mask();
    decide_by_view(ifg, input_complex, |view| {
        let heard = view.name_mask() & d_mask;
        let leader = heard.trailing_zeros() as usize;
        Ok(view.known[&leader].clone())
    })
}

/// Approximate agreement by averaging: each process decides the mean of the
/// inputs it knows, which must land exactly on the `1/m` grid.
pub fn averaging_map(ifg: &Digraph, input_complex: &ChromaticComplex, m: u64) -> Result<DecisionMap> {
    if m == 0 || m > i64::MAX as u64 {
        return Err(Error::InvalidParameter("grid denominator m must be at least 1".into()));
    }
    let grid = Rational::integer(m as i64);
    decide_by_view(ifg, input_complex, |view| {
        let mut sum = Rational::zero();
        for v in view.known.values() {
            sum = sum + v.as_str().parse::<Rational>()?;
        }
        let mean = sum / Rational::integer(view.known.len() as i64);
        if (mean * grid).denom() != 1 {
            return Err(Error::OffGrid { process: view.owner + 1, value: mean.to_string(), m });
        }
        Ok(mean.label())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tasks::{approx_task, consensus_task, kset_task};

    fn c3() -> Digraph {
        Digraph::directed_cycle(3).unwrap()
    }

    fn s3() -> Digraph {
        Digraph::from_arcs(3, [(0, 1), (0, 2)]).unwrap()
    }

    fn reverse_c3() -> Digraph {
        Digraph::from_arcs(3, [(1, 0), (2, 1), (0, 2)]).unwrap()
    }

    #[test]
    fn consensus_on_star_and_cycle() {
        let task = consensus_task(3, &[0, 1]).unwrap();
        let v = solve(&task, &s3()).unwrap();
        assert!(v.is_solvable());
        assert!(verify_decision_map(&task, &s3(), v.witness().unwrap()).unwrap());
        assert!(!solve(&task, &c3()).unwrap().is_solvable());
    }

    #[test]
    fn two_set_on_cycle() {
        let task = kset_task(3, &[0, 1, 2], 2).unwrap();
        let v = solve(&task, &c3()).unwrap();
        assert!(v.is_solvable());
        assert!(verify_decision_map(&task, &c3(), v.witness().unwrap()).unwrap());
    }

    #[test]
    fn center_input_map_on_star() {
        // every vertex decides what the center proposed
        let task = consensus_task(3, &[0, 1]).unwrap();
        let dm = decide_by_view(&s3(), task.input_complex(), |w| Ok(w.known[&0].clone())).unwrap();
        assert!(verify_decision_map(&task, &s3(), &dm).unwrap());
    }

    #[test]
    fn constant_map_violates_validity() {
        let task = consensus_task(3, &[0, 1]).unwrap();
        let dm = decide_by_view(&c3(), task.input_complex(), |_| Ok(Label::new("0"))).unwrap();
        assert!(!verify_decision_map(&task, &c3(), &dm).unwrap());
        let mut partial = dm.clone();
        let first = partial.0.keys().next().unwrap().clone();
        partial.0.remove(&first);
        assert!(matches!(verify_decision_map(&task, &c3(), &partial), Err(Error::PartialDecisionMap(_))));
    }

    #[test]
    fn size_mismatch() {
        let task = consensus_task(2, &[0, 1]).unwrap();
        assert!(matches!(solve(&task, &c3()), Err(Error::ProcessCountMismatch { .. })));
    }

    #[test]
    fn domination_rule_on_cycle() {
        let task = kset_task(3, &[0, 1, 2], 2).unwrap();
        let dm = kset_by_domination(&c3(), task.input_complex(), 2).unwrap();
        let inputs: Vec<Label> = ["0", "1", "2"].into_iter().map(Label::new).collect();
        let decided: Vec<&str> = compute_views(&c3(), &inputs)
            .unwrap()
            .iter()
            .map(|w| dm.get(&w.vertex()).unwrap().as_str())
            .collect();
        assert_eq!(decided, ["0", "0", "1"]);
        assert!(verify_decision_map(&task, &c3(), &dm).unwrap());
        assert!(matches!(
            kset_by_domination(&c3(), task.input_complex(), 1),
            Err(Error::DominationTooLarge { gamma: 2, k: 1 })
        ));
    }

    #[test]
    fn domination_rule_with_universal_node() {
        let task = consensus_task(3, &[0, 1]).unwrap();
        let dm = kset_by_domination(&s3(), task.input_complex(), 1).unwrap();
        assert!(verify_decision_map(&task, &s3(), &dm).unwrap());
        let k3 = Digraph::complete(3).unwrap();
        let dm = kset_by_domination(&k3, task.input_complex(), 1).unwrap();
        for (v, out) in &dm.0 {
            assert_eq!(v.label.as_str().split(',').next().unwrap(), format!("1={out}"));
        }
    }

    #[test]
    fn averaging_on_reverse_cycle() {
        let task = approx_task(3, 2, "1/2".parse().unwrap()).unwrap();
        let dm = averaging_map(&reverse_c3(), task.input_complex(), 2).unwrap();
        let inputs: Vec<Label> = ["0", "1", "1"].into_iter().map(Label::new).collect();
        let decided: Vec<&str> = compute_views(&reverse_c3(), &inputs)
            .unwrap()
            .iter()
            .map(|w| dm.get(&w.vertex()).unwrap().as_str())
            .collect();
        assert_eq!(decided, ["1/2", "1", "1/2"]);
        assert!(verify_decision_map(&task, &reverse_c3(), &dm).unwrap());
        assert!(matches!(averaging_map(&reverse_c3(), task.input_complex(), 3), Err(Error::OffGrid { .. })));
    }

    #[test]
    fn solve_is_deterministic() {
        let task = kset_task(3, &[0, 1, 2], 2).unwrap();
        assert_eq!(solve(&task, &c3()).unwrap(), solve(&task, &c3()).unwrap());
    }
}
