//! Views under flooding, the facet map Ξ and protocol complexes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::dynet::{bits, information_flow_graph, Digraph, DynamicGraph};
use crate::error::{Error, Result};
use crate::simplicial::{CSimplex, CVertex, ChromaticComplex, Label};

/// The name-input pairs a process knows.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct View {
    pub owner: usize,
    pub known: BTreeMap<usize, Label>,
}

impl View {
    /// Canonical rendering `j=v,...` with 1-based names in increasing order.
    pub fn label(&self) -> Label {
        Label::new(self.to_string())
    }

    pub fn vertex(&self) -> CVertex {
        CVertex { name: self.owner, label: self.label() }
    }

    pub fn name_mask(&self) -> u64 {
        self.known.keys().fold(0, |m, &j| m | 1 << j)
    }
}

impl fmt::Display for View {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (j, v)) in self.known.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}={}", j + 1, v)?;
        }
        Ok(())
    }
}

fn check_inputs(n: usize, inputs: &[Label]) -> Result<()> {
    if inputs.len() != n {
        return Err(Error::ProcessCountMismatch { expected: n, found: inputs.len() });
    }
    Ok(())
}

/// `w_i = {(j, v_j) : i = j or (j, i) ∈ ifg}`.
pub fn compute_views(ifg: &Digraph, inputs: &[Label]) -> Result<Vec<View>> {
    check_inputs(ifg.n(), inputs)?;
    Ok((0..ifg.n())
        .map(|i| {
            let heard = ifg.in_mask(i) | 1 << i;
            View { owner: i, known: bits(heard).map(|j| (j, inputs[j].clone())).collect() }
        })
        .collect())
}

/// Knowledge sets after each round of flooding; entry 0 is the initial state.
pub fn flood_trace(g: &DynamicGraph, inputs: &[Label]) -> Result<Vec<Vec<View>>> {
    check_inputs(g.n(), inputs)?;
    let n = g.n();
    let mut state: Vec<View> = (0..n)
        .map(|i| View { owner: i, known: BTreeMap::from([(i, inputs[i].clone())]) })
        .collect();
    let mut trace = vec![state.clone()];
    for round in g.rounds() {
        // everyone sends what it knew at the start of the round
        let sent = state.clone();
        for (p, view) in sent.iter().enumerate() {
            for q in bits(round.out_mask(p)) {
                state[q].known.extend(view.known.iter().map(|(j, v)| (*j, v.clone())));
            }
        }
        trace.push(state.clone());
    }
    Ok(trace)
}

/// Views after flooding through all rounds of `g`.
pub fn flood_simulate(g: &DynamicGraph, inputs: &[Label]) -> Result<Vec<View>> {
    Ok(flood_trace(g, inputs)?.pop().expect("trace has an initial state"))
}

/// Ξ restricted to facets: input facet to its unique protocol facet.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct XiMap {
    entries: BTreeMap<CSimplex, CSimplex>,
}

impl XiMap {
    pub fn get(&self, input_facet: &CSimplex) -> Option<&CSimplex> {
        self.entries.get(input_facet)
    }

    /// `(input facet, protocol facet)` pairs in canonical input order.
    pub fn iter(&self) -> impl Iterator<Item = (&CSimplex, &CSimplex)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Whether `k` is a full pseudosphere `Ψ([n], I)` for some value set `I`.
fn is_pseudosphere(k: &ChromaticComplex, n: usize) -> bool {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    if k.is_empty() || !k.facets().iter().all(|f| f.len() == n && f.name_mask() == full) {
        return false;
    }
    let mut per_name: Vec<BTreeSet<&Label>> = vec![BTreeSet::new(); n];
    for v in k.facets().iter().flat_map(|f| f.vertices()) {
        per_name[v.name].insert(&v.label);
    }
    let values = &per_name[0];
    per_name.iter().all(|s| s == values)
        && (values.len() as u128).checked_pow(n as u32) == Some(k.facets().len() as u128)
}

/// Protocol complex of `ifg` over `input_complex`, one facet per input facet,
/// vertices deduplicated by `(name, view)`; plus the facet map Ξ.
pub fn protocol_complex(ifg: &Digraph, input_complex: &ChromaticComplex) -> Result<(ChromaticComplex, XiMap)> {
    if !is_pseudosphere(input_complex, ifg.n()) {
        return Err(Error::NotPseudosphere);
    }
    let mut entries = BTreeMap::new();
    for sigma in input_complex.facets() {
        let inputs: Vec<Label> = sigma.vertices().iter().map(|v| v.label.clone()).collect();
        let views = compute_views(ifg, &inputs)?;
        let image = CSimplex::new(views.iter().map(View::vertex).collect())?;
        entries.insert(sigma.clone(), image);
    }
    let complex = ChromaticComplex::from_facets(entries.values().cloned());
    Ok((complex, XiMap { entries }))
}

/// `Ξ(σ) = {τ ∈ Ξ(φ) : φ ⊇ σ facet, names(τ) = names(σ)}`, sorted.
pub fn xi_simplex(xi: &XiMap, s: &CSimplex) -> Vec<CSimplex> {
    let mask = s.name_mask();
    let images: BTreeSet<CSimplex> = xi
        .iter()
        .filter(|(phi, _)| s.is_face_of(phi))
        .map(|(_, tau)| tau.restrict_to_names(mask))
        .collect();
    images.into_iter().collect()
}

/// Convenience: the information-flow graph of `g` followed by [`protocol_complex`].
pub fn protocol_complex_of(g: &DynamicGraph, input_complex: &ChromaticComplex) -> Result<(ChromaticComplex, XiMap)> {
    protocol_complex(&information_flow_graph(g), input_complex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynet::constant_instance;
    use crate::simplicial::pseudosphere;

    fn labels(s: &[&str]) -> Vec<Label> {
        s.iter().map(Label::new).collect()
    }

    fn c3() -> Digraph {
        Digraph::directed_cycle(3).unwrap()
    }

    fn s3() -> Digraph {
        Digraph::from_arcs(3, [(0, 1), (0, 2)]).unwrap()
    }

    fn binary3() -> ChromaticComplex {
        pseudosphere(3, &labels(&["0", "1"])).unwrap()
    }

    #[test]
    fn views_on_cycle() {
        let views = compute_views(&c3(), &labels(&["0", "0", "1"])).unwrap();
        let rendered: Vec<String> = views.iter().map(|v| v.to_string()).collect();
        assert_eq!(rendered, ["1=0,3=1", "1=0,2=0", "2=0,3=1"]);
    }

    #[test]
    fn views_extremes() {
        let inputs = labels(&["a", "b", "c"]);
        for v in compute_views(&Digraph::complete(3).unwrap(), &inputs).unwrap() {
            assert_eq!(v.to_string(), "1=a,2=b,3=c");
        }
        let views = compute_views(&Digraph::empty(3).unwrap(), &inputs).unwrap();
        assert_eq!(views[1].to_string(), "2=b");
        assert!(compute_views(&c3(), &inputs[..2]).is_err());
    }

    #[test]
    fn flooding_relay() {
        let g = DynamicGraph::new(
            3,
            vec![Digraph::from_arcs(3, [(0, 1)]).unwrap(), Digraph::from_arcs(3, [(1, 2)]).unwrap()],
        )
        .unwrap();
        let inputs = labels(&["a", "b", "c"]);
        let views = flood_simulate(&g, &inputs).unwrap();
        assert_eq!(views[2].to_string(), "1=a,2=b,3=c");
        let trace = flood_trace(&g, &inputs).unwrap();
        assert_eq!(trace.len(), 3);
        assert_eq!(trace[1][2].to_string(), "3=c");
        let none = flood_simulate(&g.truncated(0), &inputs).unwrap();
        assert!(none.iter().all(|v| v.known.len() == 1));
        let full = flood_simulate(&constant_instance(&Digraph::complete(3).unwrap(), 1), &inputs).unwrap();
        assert!(full.iter().all(|v| v.known.len() == 3));
    }

    #[test]
    fn binary_protocol_complexes_on_three_nodes() {
        let (ps, xi) = protocol_complex(&s3(), &binary3()).unwrap();
        assert_eq!(ps.connected_components(), 2);
        assert_eq!(xi.len(), 8);
        let (pc, _) = protocol_complex(&c3(), &binary3()).unwrap();
        assert_eq!((pc.facets().len(), pc.connected_components()), (8, 1));
        let (pk, _) = protocol_complex(&Digraph::complete(3).unwrap(), &binary3()).unwrap();
        assert_eq!((pk.facets().len(), pk.connected_components()), (8, 8));
    }

    #[test]
    fn xi_on_vertices() {
        let center = CSimplex::from_labels(["0"]);
        let (_, xs) = protocol_complex(&s3(), &binary3()).unwrap();
        assert_eq!(xi_simplex(&xs, &center).len(), 1);
        let (_, xc) = protocol_complex(&c3(), &binary3()).unwrap();
        assert_eq!(xi_simplex(&xc, &center).len(), 2);
        let facet = CSimplex::from_labels(["0", "1", "1"]);
        assert_eq!(xi_simplex(&xc, &facet), vec![xc.get(&facet).unwrap().clone()]);
    }

    #[test]
    fn rejects_non_pseudosphere() {
        let partial = ChromaticComplex::from_facets(binary3().facets()[..7].to_vec());
        assert!(matches!(protocol_complex(&c3(), &partial), Err(Error::NotPseudosphere)));
        let wrong_n = pseudosphere(2, &labels(&["0", "1"])).unwrap();
        assert!(protocol_complex(&c3(), &wrong_n).is_err());
    }
}
