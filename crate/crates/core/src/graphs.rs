//! Communication patterns as directed graphs on the parties.
//!
//! An edge `i → j` means party `j`'s output may depend on `x_i`. Every party
//! may always depend on its own input, so self-loops carry no information and
//! are never stored.
//!
//! A graph is *partially paired* (PP) when some pair of inputs is seen
//! together by no party, and *totally paired* (TP) otherwise. A graph is
//! separable when the parties split into two blocks with no edge between
//! them. Letting outputs within a block also depend on other outputs of the
//! same block adds nothing, because every such model is a mixture of
//! deterministic strategies whose outputs depend on inputs alone; so looking
//! at input dependence only is enough.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bits::{full_mask, MAX_PARTIES, MIN_PARTIES};
use crate::error::{check_party_count, Error, Result};

/// Directed communication graph on parties `1..=m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CommGraph {
    m: usize,
    /// `incoming[j]` has bit `i - 1` set for each edge `i → j + 1`.
    incoming: Vec<u32>,
}

#[derive(Debug, Deserialize)]
struct GraphFile {
    m: usize,
    edges: Vec<[usize; 2]>,
}

impl CommGraph {
    pub fn empty(m: usize) -> Result<Self> {
        check_party_count(m, 1, MAX_PARTIES)?;
        Ok(Self { m, incoming: vec![0; m] })
    }

    pub fn complete(m: usize) -> Result<Self> {
        check_party_count(m, 1, MAX_PARTIES)?;
        let all = full_mask(m);
        Ok(Self { m, incoming: (0..m).map(|j| all & !(1 << j)).collect() })
    }

    /// Builds from 1-based `(from, to)` pairs. Self-loops are dropped with a
    /// warning.
    pub fn from_edges(m: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(m)?;
        for &(i, j) in edges {
            if i == 0 || j == 0 || i > m || j > m {
                return Err(Error::InvalidGraph(format!("edge ({i}, {j}) outside parties 1..={m}")));
            }
            if i == j {
                log::warn!("ignoring self-loop on party {i}");
                continue;
            }
            g.incoming[j - 1] |= 1 << (i - 1);
        }
        Ok(g)
    }

    /// Graph whose dependency sets are exactly `deps` (1-based party lists,
    /// one per party; own index optional).
    pub fn from_dependencies(deps: &[Vec<usize>]) -> Result<Self> {
        let m = deps.len();
        let edges: Vec<(usize, usize)> = deps
            .iter()
            .enumerate()
            .flat_map(|(j, d)| d.iter().filter(move |&&i| i != j + 1).map(move |&i| (i, j + 1)))
            .collect();
        Self::from_edges(m, &edges)
    }

    /// Graph number `code` in the enumeration of all `2^{m(m-1)}` graphs on
    /// `m` parties; bit `k` of `code` toggles the `k`-th ordered pair.
    pub fn from_code(m: usize, code: u64) -> Result<Self> {
        let pairs = ordered_pairs(m);
        if pairs.len() < 64 && code >> pairs.len() != 0 {
            return Err(Error::InvalidParams(format!("graph code {code} too large for m = {m}")));
        }
        let edges: Vec<_> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| code >> k & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        Self::from_edges(m, &edges)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.incoming[j - 1] >> (i - 1) & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 1..=self.m {
            for j in 1..=self.m {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.incoming.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn with_edge(&self, i: usize, j: usize) -> Result<Self> {
        let mut edges = self.edges();
        edges.push((i, j));
        Self::from_edges(self.m, &edges)
    }

    /// `Dep(i)` as a party mask (bit `k - 1` for party `k`).
    pub fn dependency_mask(&self, i: usize) -> u32 {
        self.incoming[i - 1] | 1 << (i - 1)
    }

    pub fn dependency_sets(&self) -> DependencyProfile {
        DependencyProfile { m: self.m, masks: (1..=self.m).map(|i| self.dependency_mask(i)).collect() }
    }

    pub fn classify(&self) -> Result<Classification> {
        classify(self)
    }

    pub fn is_separable(&self) -> bool {
        is_separable(self)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let edges: Vec<_> = self.edges().into_iter().map(|(i, j)| json!([i, j])).collect();
        json!({ "m": self.m, "edges": edges })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(s)?;
        let edges: Vec<_> = file.edges.iter().map(|&[i, j]| (i, j)).collect();
        Self::from_edges(file.m, &edges)
    }
}

/// All ordered pairs `(i, j)`, `i ≠ j`, in lexicographic order.
pub fn ordered_pairs(m: usize) -> Vec<(usize, usize)> {
    (1..=m)
        .flat_map(|i| (1..=m).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect()
}

/// `Dep(i)` for every party.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyProfile {
    m: usize,
    masks: Vec<u32>,
}

impl DependencyProfile {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mask(&self, i: usize) -> u32 {
        self.masks[i - 1]
    }

    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    /// `Dep(i)` as sorted 1-based party indices.
    pub fn set(&self, i: usize) -> BTreeSet<usize> {
        mask_to_parties(self.mask(i)).into_iter().collect()
    }

    /// Lowest-index party whose dependency set contains `mask`.
    pub fn lowest_cover(&self, mask: u32) -> Option<usize> {
        self.masks.iter().position(|&d| d & mask == mask).map(|k| k + 1)
    }
}

pub(crate) fn mask_to_parties(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask >> b & 1 == 1).map(|b| b as usize + 1).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphClass {
    PP,
    TP,
}

/// PP with the lexicographically smallest unpaired pair, or TP with, for
/// every pair `i < j`, the lowest-index party seeing both inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    PartiallyPaired { pair: (usize, usize) },
    TotallyPaired { cover: Vec<((usize, usize), usize)> },
}

impl Classification {
    pub fn class(&self) -> GraphClass {
        match self {
            Classification::PartiallyPaired { .. } => GraphClass::PP,
            Classification::TotallyPaired { .. } => GraphClass::TP,
        }
    }

    pub fn is_tp(&self) -> bool {
        self.class() == GraphClass::TP
    }

    pub fn witness_json(&self) -> serde_json::Value {
        match self {
            Classification::PartiallyPaired { pair: (i, j) } => json!([i, j]),
            Classification::TotallyPaired { cover } => {
                json!(cover.iter().map(|&((i, j), k)| json!([i, j, k])).collect::<Vec<_>>())
            }
        }
    }
}

pub fn dependency_sets(g: &CommGraph) -> DependencyProfile {
    g.dependency_sets()
}

pub fn classify(g: &CommGraph) -> Result<Classification> {
    check_party_count(g.m, MIN_PARTIES, MAX_PARTIES)?;
    let deps = g.dependency_sets();
    let mut cover = Vec::new();
    for i in 1..=g.m {
        for j in i + 1..=g.m {
            match deps.lowest_cover(1 << (i - 1) | 1 << (j - 1)) {
                Some(k) => cover.push(((i, j), k)),
                None => return Ok(Classification::PartiallyPaired { pair: (i, j) }),
            }
        }
    }
    Ok(Classification::TotallyPaired { cover })
}

/// True iff the undirected support of the edge set is disconnected.
pub fn is_separable(g: &CommGraph) -> bool {
    let adjacency: Vec<u32> = (1..=g.m)
        .map(|i| {
            let out: u32 = (1..=g.m).filter(|&j| g.has_edge(i, j)).map(|j| 1 << (j - 1)).sum();
            g.incoming[i - 1] | out
        })
        .collect();
    let mut seen = 1u32;
    let mut frontier = 1u32;
    while frontier != 0 {
        let mut next = 0;
        for b in mask_to_parties(frontier) {
            next |= adjacency[b - 1];
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen != full_mask(g.m)
}

/// Named graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogEntry {
    /// Four parties, no communication.
    Fig1I,
    /// Blocks `{1,3}` and `{2,4}`.
    Fig1IIa,
    /// Block `{1,2,3}` and a lone party 4.
    Fig1IIb,
    /// Parties 3 and 4 never seen together.
    Fig1III,
    /// Party 1 sees everything.
    Fig1IVa,
    /// Totally paired with sparse communication.
    Fig1IVb,
    /// Complete graph on four parties.
    Fig1V,
    /// The general partially paired graph with unpaired parties 1 and `m`.
    Fig2 { m: usize, k: usize },
    Empty(usize),
    Complete(usize),
    /// Three parties; parties 1 and 3 never seen together although the
    /// graph is connected.
    ThreePartyInseparable,
}

pub const CATALOG_NAMES: &[&str] = &[
    "fig1_i",
    "fig1_iia",
    "fig1_iib",
    "fig1_iii",
    "fig1_iva",
    "fig1_ivb",
    "fig1_v",
    "fig2",
    "empty",
    "complete",
    "three_party_pp",
];

impl CatalogEntry {
    /// Resolves a catalog name; `m` and `k` are only read by the
    /// parameterized entries.
    pub fn parse(name: &str, m: Option<usize>, k: Option<usize>) -> Result<Self> {
        let need_m = || m.ok_or_else(|| Error::InvalidParams(format!("`{name}` needs m")));
        Ok(match name {
            "fig1_i" => CatalogEntry::Fig1I,
            "fig1_iia" => CatalogEntry::Fig1IIa,
            "fig1_iib" => CatalogEntry::Fig1IIb,
            "fig1_iii" => CatalogEntry::Fig1III,
            "fig1_iva" => CatalogEntry::Fig1IVa,
            "fig1_ivb" => CatalogEntry::Fig1IVb,
            "fig1_v" => CatalogEntry::Fig1V,
            "fig2" => CatalogEntry::Fig2 {
                m: need_m()?,
                k: k.ok_or_else(|| Error::InvalidParams("`fig2` needs k".into()))?,
            },
            "empty" => CatalogEntry::Empty(need_m()?),
            "complete" => CatalogEntry::Complete(need_m()?),
            "three_party_pp" => CatalogEntry::ThreePartyInseparable,
            _ => return Err(Error::UnknownGraph(name.to_string())),
        })
    }

    pub fn build(self) -> Result<CommGraph> {
        let deps = |d: &[&[usize]]| CommGraph::from_dependencies(&d.iter().map(|s| s.to_vec()).collect::<Vec<_>>());
        match self {
            CatalogEntry::Fig1I => CommGraph::empty(4),
            CatalogEntry::Fig1IIa => deps(&[&[1, 3], &[2, 4], &[1, 3], &[2, 4]]),
            CatalogEntry::Fig1IIb => deps(&[&[1, 2, 3], &[1, 2, 3], &[1, 2, 3], &[4]]),
            CatalogEntry::Fig1III => deps(&[&[1, 2, 3], &[1, 2, 4], &[1, 2, 3], &[1, 2, 4]]),
            CatalogEntry::Fig1IVa => deps(&[&[1, 2, 3, 4], &[2], &[3], &[4]]),
            CatalogEntry::Fig1IVb => deps(&[&[1, 3], &[1, 2], &[2, 3, 4], &[1, 2, 4]]),
            CatalogEntry::Fig1V => CommGraph::complete(4),
            CatalogEntry::Fig2 { m, k } => fig2(m, k),
            CatalogEntry::Empty(m) => CommGraph::empty(m),
            CatalogEntry::Complete(m) => CommGraph::complete(m),
            CatalogEntry::ThreePartyInseparable => deps(&[&[1, 2], &[1, 2], &[2, 3]]),
        }
    }
}

pub fn catalog(name: &str, m: Option<usize>, k: Option<usize>) -> Result<CommGraph> {
    CatalogEntry::parse(name, m, k)?.build()
}

/// Parties `2..=k` and `k+1..=m-1` form two fully connected circles that are
/// also fully connected to each other. Party 1 exchanges with the first circle
/// and only listens to the second; party `m` mirrors that. Parties 1 and `m`
/// share no edge.
fn fig2(m: usize, k: usize) -> Result<CommGraph> {
    check_party_count(m, 4, MAX_PARTIES)?;
    if k < 2 || k > m - 2 {
        return Err(Error::InvalidParams(format!("fig2 needs 2 <= k <= m - 2, got m = {m}, k = {k}")));
    }
    let first = 2..=k;
    let second = k + 1..=m - 1;
    let mut edges = Vec::new();
    for i in 2..m {
        for j in 2..m {
            if i != j {
                edges.push((i, j));
            }
        }
    }
    for i in first.clone() {
        edges.extend([(1, i), (i, 1), (i, m)]);
    }
    for i in second {
        edges.extend([(m, i), (i, m), (i, 1)]);
    }
    CommGraph::from_edges(m, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn empty_graph_dependencies() {
        let d = CommGraph::empty(3).unwrap().dependency_sets();
        for i in 1..=3 {
            assert_eq!(d.set(i), set(&[i]));
        }
    }

    #[test]
    fn fig1_iii_dependencies() {
        let d = catalog("fig1_iii", None, None).unwrap().dependency_sets();
        assert_eq!(d.set(1), set(&[1, 2, 3]));
        assert_eq!(d.set(3), set(&[1, 2, 3]));
        assert_eq!(d.set(2), set(&[1, 2, 4]));
        assert_eq!(d.set(4), set(&[1, 2, 4]));
    }

    #[test]
    fn complete_dependencies() {
        let d = CommGraph::complete(4).unwrap().dependency_sets();
        for i in 1..=4 {
            assert_eq!(d.set(i), set(&[1, 2, 3, 4]));
        }
    }

    #[test]
    fn catalog_classes() {
        let pp = |name| match catalog(name, None, None).unwrap().classify().unwrap() {
            Classification::PartiallyPaired { pair } => Some(pair),
            _ => None,
        };
        assert_eq!(pp("fig1_i"), Some((1, 2)));
        assert_eq!(pp("fig1_iii"), Some((3, 4)));
        assert_eq!(pp("three_party_pp"), Some((1, 3)));
        assert_eq!(pp("fig1_iva"), None);
        assert_eq!(pp("fig1_ivb"), None);
        assert_eq!(pp("fig1_v"), None);
    }

    #[test]
    fn tp_cover_is_lowest_index() {
        let c = catalog("fig1_iva", None, None).unwrap().classify().unwrap();
        match c {
            Classification::TotallyPaired { cover } => {
                assert_eq!(cover.len(), 6);
                assert!(cover.iter().all(|&(_, k)| k == 1));
            }
            _ => panic!("expected TP"),
        }
    }

    #[test]
    fn separability() {
        assert!(catalog("fig1_iia", None, None).unwrap().is_separable());
        assert!(catalog("fig1_iib", None, None).unwrap().is_separable());
        assert!(!catalog("fig1_iii", None, None).unwrap().is_separable());
        assert!(!catalog("three_party_pp", None, None).unwrap().is_separable());
        assert!(!CommGraph::complete(5).unwrap().is_separable());
    }

    #[test]
    fn fig2_keeps_ends_apart() {
        let g = catalog("fig2", Some(6), Some(3)).unwrap();
        assert!(!g.has_edge(1, 6) && !g.has_edge(6, 1));
        let d = g.dependency_sets();
        assert!((1..=6).all(|i| d.mask(i) & 0b100001 != 0b100001));
        assert_eq!(g.classify().unwrap(), Classification::PartiallyPaired { pair: (1, 6) });
    }

    #[test]
    fn catalog_errors() {
        assert!(matches!(catalog("fig9", None, None), Err(Error::UnknownGraph(_))));
        assert!(matches!(catalog("fig2", Some(5), Some(4)), Err(Error::InvalidParams(_))));
        assert!(matches!(catalog("fig2", Some(5), Some(1)), Err(Error::InvalidParams(_))));
        assert_eq!(catalog("empty", Some(3), None).unwrap().edge_count(), 0);
    }

    #[test]
    fn single_party_not_classified() {
        let g = CommGraph::empty(1).unwrap();
        assert!(matches!(g.classify(), Err(Error::PartyCount { .. })));
    }

    #[test]
    fn self_loops_ignored() {
        let g = CommGraph::from_json(r#"{"m":3,"edges":[[1,1],[1,2]]}"#).unwrap();
        assert_eq!(g.edges(), vec![(1, 2)]);
        assert!(CommGraph::from_json(r#"{"m":3,"edges":[[1,4]]}"#).is_err());
    }

    #[test]
    fn graph_codes_cover_all_graphs() {
        let all: BTreeSet<_> = (0..64).map(|c| CommGraph::from_code(3, c).unwrap().edges()).collect();
        assert_eq!(all.len(), 64);
    }
}
