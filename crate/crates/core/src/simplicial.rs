//! Chromatic simplicial complexes.
//!
//! A complex is stored as its canonical facet list. Faces are never
//! materialized; anything that needs them enumerates the subsets of each
//! facet on demand.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Opaque vertex label: an input value, an output value or a rendered view.
/// Compared byte-wise.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Arc<str>);

impl Label {
    pub fn new(s: impl AsRef<str>) -> Self {
        Label(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::new(s)
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label::new(s)
    }
}

/// A `(process name, label)` pair. Names are 0-based; displayed 1-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CVertex {
    pub name: usize,
    pub label: Label,
}

impl CVertex {
    pub fn new(name: usize, label: impl Into<Label>) -> Self {
        CVertex { name, label: label.into() }
    }
}

impl fmt::Display for CVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name + 1, self.label)
    }
}

/// Properly colored simplex: vertices sorted by name, names pairwise distinct.
/// The empty simplex (dimension -1) is allowed; it arises as an intersection.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct CSimplex {
    vertices: Vec<CVertex>,
}

impl CSimplex {
    pub fn new(mut vertices: Vec<CVertex>) -> Result<Self> {
        vertices.sort();
        vertices.dedup();
        if let Some(w) = vertices.windows(2).find(|w| w[0].name == w[1].name) {
            return Err(Error::RepeatedName(w[0].name + 1));
        }
        Ok(CSimplex { vertices })
    }

    /// Simplex `{(0, labels[0]), ..., (n-1, labels[n-1])}`.
    pub fn from_labels<L: Into<Label>>(labels: impl IntoIterator<Item = L>) -> Self {
        CSimplex {
            vertices: labels.into_iter().enumerate().map(|(i, l)| CVertex::new(i, l)).collect(),
        }
    }

    pub fn empty() -> Self {
        CSimplex::default()
    }

    pub fn vertices(&self) -> &[CVertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn dim(&self) -> isize {
        self.vertices.len() as isize - 1
    }

    pub fn names(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices.iter().map(|v| v.name)
    }

    pub fn name_mask(&self) -> u64 {
        self.names().fold(0, |m, i| m | 1 << i)
    }

    pub fn label_of(&self, name: usize) -> Option<&Label> {
        self.vertices
            .binary_search_by_key(&name, |v| v.name)
            .ok()
            .map(|i| &self.vertices[i].label)
    }

    pub fn contains(&self, v: &CVertex) -> bool {
        self.vertices.binary_search(v).is_ok()
    }

    pub fn is_face_of(&self, other: &CSimplex) -> bool {
        self.vertices.iter().all(|v| other.contains(v))
    }

    pub fn intersection(&self, other: &CSimplex) -> CSimplex {
        CSimplex {
            vertices: self.vertices.iter().filter(|v| other.contains(v)).cloned().collect(),
        }
    }

    /// The face spanned by the vertices whose names are in `mask`.
    pub fn restrict_to_names(&self, mask: u64) -> CSimplex {
        CSimplex {
            vertices: self.vertices.iter().filter(|v| mask >> v.name & 1 == 1).cloned().collect(),
        }
    }

    /// All nonempty faces, including the simplex itself.
    pub fn faces(&self) -> impl Iterator<Item = CSimplex> + '_ {
        let m = self.vertices.len();
        (1u64..1 << m).map(move |sub| CSimplex {
            vertices: (0..m)
                .filter(|i| sub >> i & 1 == 1)
                .map(|i| self.vertices[i].clone())
                .collect(),
        })
    }
}

impl fmt::Display for CSimplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str("\t")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Simplicial complex given by its facets, in canonical (sorted) order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ChromaticComplex {
    facets: Vec<CSimplex>,
}

impl ChromaticComplex {
    /// Keeps only maximal simplices; empty simplices are dropped.
    pub fn from_facets(simplices: impl IntoIterator<Item = CSimplex>) -> Self {
        let mut all: Vec<CSimplex> = simplices.into_iter().filter(|s| !s.is_empty()).collect();
        all.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        all.dedup();
        let mut facets: Vec<CSimplex> = Vec::with_capacity(all.len());
        for s in all {
            if !facets.iter().any(|f| s.is_face_of(f)) {
                facets.push(s);
            }
        }
        facets.sort();
        ChromaticComplex { facets }
    }

    /// The complex of a single simplex: the simplex and all its faces.
    pub fn of_simplex(s: CSimplex) -> Self {
        Self::from_facets([s])
    }

    pub fn facets(&self) -> &[CSimplex] {
        &self.facets
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    pub fn vertices(&self) -> BTreeSet<CVertex> {
        self.facets.iter().flat_map(|f| f.vertices().iter().cloned()).collect()
    }

    /// Largest facet dimension (-1 for the empty complex).
    pub fn dim(&self) -> isize {
        self.facets.iter().map(CSimplex::dim).max().unwrap_or(-1)
    }

    /// The common facet dimension, if the complex is nonempty and pure.
    pub fn pure_dim(&self) -> Option<isize> {
        let d = self.facets.first()?.dim();
        self.facets.iter().all(|f| f.dim() == d).then_some(d)
    }

    pub fn contains(&self, s: &CSimplex) -> bool {
        self.facets.iter().any(|f| s.is_face_of(f))
    }

    /// Every nonempty simplex of the complex, deduplicated and sorted.
    pub fn simplices(&self) -> BTreeSet<CSimplex> {
        self.facets.iter().flat_map(|f| f.faces()).collect()
    }

    /// Simplices of dimension exactly `d`, sorted.
    pub fn faces_of_dim(&self, d: usize) -> Vec<CSimplex> {
        let mut out = BTreeSet::new();
        for f in &self.facets {
            if f.len() > d {
                out.extend(f.faces().filter(|s| s.len() == d + 1));
            }
        }
        out.into_iter().collect()
    }

    /// Number of connected components (facets linked when they intersect).
    pub fn connected_components(&self) -> usize {
        let m = self.facets.len();
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut by_vertex: BTreeMap<&CVertex, usize> = BTreeMap::new();
        for (i, f) in self.facets.iter().enumerate() {
            for v in f.vertices() {
                if let Some(&j) = by_vertex.get(v) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                } else {
                    by_vertex.insert(v, i);
                }
            }
        }
        (0..m).filter(|&i| find(&mut parent, i) == i).count()
    }

    /// Facet-list text: one facet per line, `name:label` entries sorted by
    /// name and tab-separated, lines sorted lexicographically.
    pub fn to_facet_list(&self) -> String {
        let mut lines: Vec<String> = self.facets.iter().map(|f| f.to_string()).collect();
        lines.sort();
        let mut out = lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }

    pub fn from_facet_list(text: &str) -> Result<Self> {
        Ok(Self::from_facets(parse_facet_lines(text)?))
    }
}

/// Parses facet-list lines in file order (blank lines skipped).
pub fn parse_facet_lines(text: &str) -> Result<Vec<CSimplex>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let vertices = line
                .split('\t')
                .map(|entry| {
                    let (name, label) = entry
                        .split_once(':')
                        .ok_or_else(|| Error::Parse(format!("missing ':' in entry {entry:?}")))?;
                    let name: usize = name
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad process name {name:?}")))?;
                    if name == 0 {
                        return Err(Error::Parse("process names are 1-based".into()));
                    }
                    Ok(CVertex::new(name - 1, label))
                })
                .collect::<Result<Vec<_>>>()?;
            CSimplex::new(vertices)
        })
        .collect()
}

/// `Ψ([n], values)`: all assignments of a value to each of the `n` names.
pub fn pseudosphere(n: usize, values: &[Label]) -> Result<ChromaticComplex> {
    if n == 0 {
        return Err(Error::ProcessCount { n, max: usize::MAX });
    }
    let mut values = values.to_vec();
    values.sort();
    values.dedup();
    if values.is_empty() {
        return Err(Error::EmptyValues);
    }
    let base = values.len();
    let total = base.checked_pow(n as u32).ok_or_else(|| {
        Error::InvalidParameter(format!("|I|^n overflows for n = {n}, |I| = {base}"))
    })?;
    let facets = (0..total).map(|mut idx| {
        let mut labels = vec![values[0].clone(); n];
        for slot in labels.iter_mut().rev() {
            *slot = values[idx % base].clone();
            idx /= base;
        }
        CSimplex::from_labels(labels)
    });
    Ok(ChromaticComplex::from_facets(facets))
}

/// `St(s, k)`: the subcomplex generated by the facets of `k` containing `s`.
pub fn star(s: &CSimplex, k: &ChromaticComplex) -> Result<ChromaticComplex> {
    let facets: Vec<CSimplex> = k.facets().iter().filter(|f| s.is_face_of(f)).cloned().collect();
    if facets.is_empty() {
        return Err(Error::NotInComplex(s.to_string()));
    }
    Ok(ChromaticComplex { facets })
}

/// All faces of `k` of dimension at most `d`, by their maximal elements.
pub fn skeleton(k: &ChromaticComplex, d: usize) -> ChromaticComplex {
    let mut faces = BTreeSet::new();
    for f in k.facets() {
        if f.len() <= d + 1 {
            faces.insert(f.clone());
        } else {
            faces.extend(f.faces().filter(|s| s.len() == d + 1));
        }
    }
    ChromaticComplex::from_facets(faces)
}

/// Whether the vertex map `f` preserves names and carries every simplex of
/// `a` onto a simplex of `b`. Undefined vertices make the check fail.
pub fn check_chromatic_simplicial_map(
    f: &BTreeMap<CVertex, CVertex>,
    a: &ChromaticComplex,
    b: &ChromaticComplex,
) -> bool {
    a.facets().iter().all(|facet| {
        let mut image = Vec::with_capacity(facet.len());
        for v in facet.vertices() {
            match f.get(v) {
                Some(w) if w.name == v.name => image.push(w.clone()),
                _ => return false,
            }
        }
        // Names are preserved, so the image of a facet is properly colored;
        // faces of a facet map to faces of its image.
        CSimplex::new(image).is_ok_and(|img| b.contains(&img))
    })
}

/// Whether `f` (simplex to set of simplices) is a spreading map from `a` to
/// `b`: every image simplex lies in `b`, and the image of each simplex of `a`
/// lies in the complex generated by the images of the facets containing it.
pub fn check_spreading_map<F>(f: F, a: &ChromaticComplex, b: &ChromaticComplex) -> bool
where
    F: Fn(&CSimplex) -> Vec<CSimplex>,
{
    let facet_images: Vec<Vec<CSimplex>> = a.facets().iter().map(&f).collect();
    a.simplices().iter().all(|sigma| {
        let covering: Vec<&CSimplex> = a
            .facets()
            .iter()
            .zip(&facet_images)
            .filter(|(phi, _)| sigma.is_face_of(phi))
            .flat_map(|(_, img)| img.iter())
            .collect();
        f(sigma).iter().all(|tau| {
            (tau.is_empty() || b.contains(tau)) && covering.iter().any(|c| tau.is_face_of(c))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary() -> Vec<Label> {
        vec![Label::new("0"), Label::new("1")]
    }

    #[test]
    fn pseudosphere_sizes() {
        let p2 = pseudosphere(2, &binary()).unwrap();
        assert_eq!((p2.facets().len(), p2.vertices().len()), (4, 4));
        let p3 = pseudosphere(3, &binary()).unwrap();
        assert_eq!((p3.facets().len(), p3.vertices().len()), (8, 6));
        assert_eq!(p3.pure_dim(), Some(2));
        let p1 = pseudosphere(1, &[Label::new("7")]).unwrap();
        assert_eq!(p1.facets(), &[CSimplex::from_labels(["7"])]);
        assert!(matches!(pseudosphere(2, &[]), Err(Error::EmptyValues)));
    }

    #[test]
    fn simplex_rejects_repeated_names() {
        let err = CSimplex::new(vec![CVertex::new(0, "0"), CVertex::new(0, "1")]).unwrap_err();
        assert!(matches!(err, Error::RepeatedName(1)));
    }

    #[test]
    fn star_examples() {
        let p2 = pseudosphere(2, &binary()).unwrap();
        let v = CSimplex::from_labels(["0"]);
        let st = star(&v, &p2).unwrap();
        assert_eq!(st.facets(), &[CSimplex::from_labels(["0", "0"]), CSimplex::from_labels(["0", "1"])]);
        let facet = CSimplex::from_labels(["1", "0"]);
        assert_eq!(star(&facet, &p2).unwrap().facets(), std::slice::from_ref(&facet));
        let single = ChromaticComplex::of_simplex(CSimplex::from_labels(["0", "1"]));
        assert_eq!(star(&v, &single).unwrap(), single);
        assert!(star(&CSimplex::from_labels(["2"]), &p2).is_err());
    }

    #[test]
    fn skeleton_examples() {
        let tri = ChromaticComplex::of_simplex(CSimplex::from_labels(["a", "b", "c"]));
        let edges = skeleton(&tri, 1);
        assert_eq!(edges.facets().len(), 3);
        assert!(edges.facets().iter().all(|f| f.dim() == 1));
        assert_eq!(skeleton(&tri, 2), tri);
        assert_eq!(skeleton(&tri, 7), tri);
        let p3 = pseudosphere(3, &binary()).unwrap();
        let verts = skeleton(&p3, 0);
        assert_eq!(verts.facets().len(), 6);
        assert_eq!(skeleton(&verts, 0), verts);
    }

    #[test]
    fn identity_is_chromatic_simplicial() {
        let p3 = pseudosphere(3, &binary()).unwrap();
        let id: BTreeMap<_, _> = p3.vertices().into_iter().map(|v| (v.clone(), v)).collect();
        assert!(check_chromatic_simplicial_map(&id, &p3, &p3));
        let mut renamed = id.clone();
        let v = CVertex::new(0, "0");
        renamed.insert(v, CVertex::new(1, "0"));
        assert!(!check_chromatic_simplicial_map(&renamed, &p3, &p3));
    }

    #[test]
    fn carrier_maps_are_spreading() {
        let p3 = pseudosphere(3, &binary()).unwrap();
        // sigma -> all of its faces is inclusion-monotone.
        let faces = |s: &CSimplex| s.faces().collect::<Vec<_>>();
        assert!(check_spreading_map(faces, &p3, &p3));
        let everything = p3.facets().to_vec();
        assert!(check_spreading_map(|_: &CSimplex| everything.clone(), &p3, &p3));
    }

    #[test]
    fn spreading_counterexample() {
        let p2 = pseudosphere(2, &binary()).unwrap();
        // The shared vertex (1,0) is sent to (1,1), which no facet of its
        // star reaches.
        let f = |s: &CSimplex| {
            if s == &CSimplex::from_labels(["0"]) {
                vec![CSimplex::from_labels(["1"])]
            } else if s.len() == 2 && s.label_of(0).map(Label::as_str) == Some("1") {
                vec![]
            } else {
                vec![s.clone()]
            }
        };
        assert!(!check_spreading_map(f, &p2, &p2));
    }

    #[test]
    fn facet_list_format() {
        let k = ChromaticComplex::from_facets([
            CSimplex::from_labels(["1=0,3=1", "1=0,2=0"]),
            CSimplex::from_labels(["a:b", "c"]),
        ]);
        let text = k.to_facet_list();
        assert_eq!(text, "1:1=0,3=1\t2:1=0,2=0\n1:a:b\t2:c\n");
        assert_eq!(ChromaticComplex::from_facet_list(&text).unwrap(), k);
        assert!(ChromaticComplex::from_facet_list("0:x").is_err());
        assert!(ChromaticComplex::from_facet_list("1:x\t1:y").is_err());
    }

    #[test]
    fn from_facets_drops_non_maximal() {
        let k = ChromaticComplex::from_facets([
            CSimplex::from_labels(["0", "1"]),
            CSimplex::from_labels(["0"]),
            CSimplex::from_labels(["0", "1"]),
        ]);
        assert_eq!(k.facets().len(), 1);
    }

    #[test]
    fn components() {
        let two = ChromaticComplex::from_facets([
            CSimplex::from_labels(["0", "0"]),
            CSimplex::from_labels(["1", "1"]),
        ]);
        assert_eq!(two.connected_components(), 2);
        assert_eq!(pseudosphere(3, &binary()).unwrap().connected_components(), 1);
    }
}
