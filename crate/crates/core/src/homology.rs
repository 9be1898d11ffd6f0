//! Reduced GF(2) homology and shellings of pure complexes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::simplicial::{CSimplex, ChromaticComplex};

/// Reduced Betti numbers `β̃_0, ..., β̃_d` over GF(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiVector(pub Vec<usize>);

impl BettiVector {
    pub fn values(&self) -> &[usize] {
        &self.0
    }

    /// Lowest dimension with a nonzero entry.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.0.iter().position(|&b| b != 0)
    }
}

impl fmt::Display for BettiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Rank of a set of GF(2) vectors given as little-endian `u64` words.
fn gf2_rank(mut columns: Vec<Vec<u64>>) -> usize {
    // pivot bit -> reduced column having that bit as its highest set bit
    let mut pivots: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for col in columns.iter_mut() {
        while let Some(top) = highest_bit(col) {
            match pivots.get(&top) {
                Some(p) => col.iter_mut().zip(p).for_each(|(a, b)| *a ^= b),
                None => {
                    pivots.insert(top, std::mem::take(col));
                    break;
                }
            }
        }
    }
    pivots.len()
}

fn highest_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .rev()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
}

/// Rank of the boundary map from `d`-faces to `(d-1)`-faces.
fn boundary_rank(upper: &[CSimplex], lower: &[CSimplex]) -> usize {
    if upper.is_empty() || lower.is_empty() {
        return 0;
    }
    let index: BTreeMap<&CSimplex, usize> = lower.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let words = lower.len().div_ceil(64);
    let columns = upper
        .iter()
        .map(|s| {
            let mut col = vec![0u64; words];
            let vs = s.vertices();
            for skip in 0..vs.len() {
                let face = CSimplex::new(
                    vs.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| v.clone()).collect(),
                )
                .expect("faces of a simplex are simplices");
                let row = index[&face];
                col[row / 64] ^= 1 << (row % 64);
            }
            col
        })
        .collect();
    gf2_rank(columns)
}

/// Reduced Betti numbers over GF(2) for dimensions `0..=up_to`, from the
/// ranks of the boundary matrices (`∂_0` is the augmentation map).
pub fn betti_reduced(k: &ChromaticComplex, up_to: usize) -> Result<BettiVector> {
    if k.is_empty() {
        return Err(Error::EmptyComplex);
    }
    let faces: Vec<Vec<CSimplex>> = (0..=up_to + 1).map(|d| k.faces_of_dim(d)).collect();
    // ranks[d] = rank ∂_d
    let mut ranks = vec![1usize; up_to + 2];
    for d in 1..=up_to + 1 {
        ranks[d] = boundary_rank(&faces[d], &faces[d - 1]);
    }
    Ok(BettiVector(
        (0..=up_to).map(|d| faces[d].len() - ranks[d] - ranks[d + 1]).collect(),
    ))
}

/// Outcome of the homological connectivity test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnectivityVerdict {
    /// Reduced homology vanishes up to the level (necessary condition holds).
    Consistent,
    /// `β̃_d != 0` for this `d`: the complex is certainly not level-connected.
    Refuted(usize),
}

/// Checks `β̃_0 = ... = β̃_level = 0`. An empty complex is refuted at 0.
pub fn connectivity_certificate(k: &ChromaticComplex, level: usize) -> ConnectivityVerdict {
    match betti_reduced(k, level) {
        Ok(b) => b.first_nonzero().map_or(ConnectivityVerdict::Consistent, ConnectivityVerdict::Refuted),
        Err(_) => ConnectivityVerdict::Refuted(0),
    }
}

/// An ordering of all facets of a pure complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShellingOrder(pub Vec<CSimplex>);

impl ShellingOrder {
    pub fn facets(&self) -> &[CSimplex] {
        &self.0
    }
}

fn pure_dim(k: &ChromaticComplex) -> Result<isize> {
    if k.is_empty() {
        return Err(Error::EmptyComplex);
    }
    k.pure_dim().ok_or(Error::NotPure)
}

fn check_permutation(k: &ChromaticComplex, ord: &ShellingOrder) -> Result<()> {
    let given: BTreeSet<&CSimplex> = ord.0.iter().collect();
    if given.len() != ord.0.len() || ord.0.len() != k.facets().len() || !k.facets().iter().all(|f| given.contains(f)) {
        return Err(Error::NotAPermutation);
    }
    Ok(())
}

/// Whether `(∪ prefix) ∩ next` is pure of dimension `d - 1`, where `d + 1`
/// is the facet size.
fn extends_shelling(prefix: &[CSimplex], next: &CSimplex) -> bool {
    let d = next.len() - 1;
    let cuts: Vec<CSimplex> = prefix.iter().map(|f| f.intersection(next)).collect();
    let petals: Vec<&CSimplex> = cuts.iter().filter(|c| c.len() == d).collect();
    !petals.is_empty() && cuts.iter().all(|c| petals.iter().any(|p| c.is_face_of(p)))
}

/// First prefix length `t` (1-based, `1 <= t <= m-1`) at which
/// `(φ_1 ∪ ... ∪ φ_t) ∩ φ_{t+1}` fails to be pure of dimension `d - 1`.
pub fn first_shelling_violation(k: &ChromaticComplex, ord: &ShellingOrder) -> Result<Option<usize>> {
    pure_dim(k)?;
    check_permutation(k, ord)?;
    Ok((1..ord.0.len()).find(|&t| !extends_shelling(&ord.0[..t], &ord.0[t])))
}

pub fn check_shelling_order(k: &ChromaticComplex, ord: &ShellingOrder) -> Result<bool> {
    Ok(first_shelling_violation(k, ord)?.is_none())
}

/// Depth-first search for a shelling order, branching over facets in
/// canonical order. `None` means "not found within `budget` expansions",
/// never "not shellable".
pub fn find_shelling_order(k: &ChromaticComplex, budget: u64) -> Result<Option<ShellingOrder>> {
    pure_dim(k)?;
    let facets = k.facets();
    let mut used = vec![false; facets.len()];
    let mut prefix: Vec<CSimplex> = Vec::with_capacity(facets.len());
    let mut expansions = 0u64;

    fn extend(
        facets: &[CSimplex],
        used: &mut [bool],
        prefix: &mut Vec<CSimplex>,
        expansions: &mut u64,
        budget: u64,
    ) -> Option<bool> {
        if prefix.len() == facets.len() {
            return Some(true);
        }
        for i in 0..facets.len() {
            if used[i] || (!prefix.is_empty() && !extends_shelling(prefix, &facets[i])) {
                continue;
            }
            *expansions += 1;
            if *expansions > budget {
                return None;
            }
            used[i] = true;
            prefix.push(facets[i].clone());
            if extend(facets, used, prefix, expansions, budget)? {
                return Some(true);
            }
            prefix.pop();
            used[i] = false;
        }
        Some(false)
    }

    Ok(match extend(facets, &mut used, &mut prefix, &mut expansions, budget) {
        Some(true) => Some(ShellingOrder(prefix)),
        _ => None,
    })
}

/// Minimal covering set of petals of `φ_{t+1}` given the valid shelling
/// prefix `φ_1..φ_t`. Returns 0-based positions into `ord`: for each distinct
/// codimension-one face `φ_i ∩ φ_{t+1}`, the smallest such `i`.
pub fn minimal_petal_cover(k: &ChromaticComplex, ord: &ShellingOrder, t: usize) -> Result<BTreeSet<usize>> {
    pure_dim(k)?;
    check_permutation(k, ord)?;
    let m = ord.0.len();
    if t == 0 || t >= m {
        return Err(Error::PrefixOutOfRange { t, max: m.saturating_sub(1) });
    }
    if (1..=t).any(|s| !extends_shelling(&ord.0[..s], &ord.0[s])) {
        return Err(Error::InvalidShellingPrefix(t));
    }
    let next = &ord.0[t];
    let d = next.len() - 1;
    let mut first_by_face: BTreeMap<CSimplex, usize> = BTreeMap::new();
    for (i, phi) in ord.0[..t].iter().enumerate() {
        let cut = phi.intersection(next);
        if cut.len() == d {
            first_by_face.entry(cut).or_insert(i);
        }
    }
    Ok(first_by_face.into_values().collect())
}
