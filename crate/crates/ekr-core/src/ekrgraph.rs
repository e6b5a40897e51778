//! The graph on G whose cliques are the intersecting sets of a coset
//! action, plus exact maximum-clique search and the weak/strong deciders.
//!
//! Vertices are group element indices; g1 ~ g2 iff g1^-1 g2 lies in
//! D \ {1}, where D is the union of the conjugates of the stabilizer.
//! Every clique translates to one through the identity, and such cliques
//! live inside {1} u (D \ {1}), so search runs on that induced subgraph.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::CosetAction;
use crate::groupcore::is_coset_of_conjugate;

#[derive(Debug, Error)]
pub enum EkrError {
    #[error("clique search needs {0} candidate vertices, cap is {1}")]
    VertexCap(usize, usize),
    #[error("more than {0} maximum cliques through the identity")]
    ExtremalCap(usize),
    #[error("witness set is not a clique")]
    NotAClique,
    #[error("witness set is not independent")]
    NotIndependent,
}

/// Caps for the exact search; exceeding one yields an error or a
/// `not_computed` verdict rather than a silent approximation.
#[derive(Debug, Clone, Copy)]
pub struct CliqueCaps {
    pub max_vertices: usize,
    pub max_extremal: usize,
}

impl Default for CliqueCaps {
    fn default() -> Self {
        CliqueCaps { max_vertices: 100_000, max_extremal: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriState {
    True,
    False,
    NotComputed,
}

impl Serialize for TriState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            TriState::True => "true",
            TriState::False => "false",
            TriState::NotComputed => "not_computed",
        })
    }
}

impl<'de> Deserialize<'de> for TriState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "true" => Ok(TriState::True),
            "false" => Ok(TriState::False),
            "not_computed" => Ok(TriState::NotComputed),
            other => Err(serde::de::Error::custom(format!("bad tri-state {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ReportWitness {
    /// Group element indices, canonical order.
    pub elements: Vec<u32>,
    /// "clique" for a weak-EKR violation, "non_canonical_max_clique" for a
    /// maximum clique that is not a stabilizer coset.
    pub kind: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct EkrReport {
    pub group_order: usize,
    pub index: usize,
    pub stabilizer_size: usize,
    pub max_clique: usize,
    pub weak: bool,
    pub strong: TriState,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<ReportWitness>,
    /// Number of maximum cliques through the identity (0 when not
    /// enumerated); by translation these represent all maximum cliques.
    pub extremal_count: usize,
    /// The cliques themselves, kept out of the serialized report.
    #[serde(skip)]
    pub extremal_cliques: Vec<Vec<u32>>,
}

pub struct DerangementGraph {
    action: Arc<CosetAction>,
    /// Indices of D \ {1} in canonical order.
    candidates: Vec<u32>,
}

pub fn build_graph(action: Arc<CosetAction>) -> DerangementGraph {
    let d = action.fixed_point_set();
    let id = action.group().identity();
    let candidates: Vec<u32> = (0..action.group().order() as u32)
        .filter(|&g| g != id && d.contains(g))
        .collect();
    DerangementGraph { action, candidates }
}

impl DerangementGraph {
    pub fn action(&self) -> &Arc<CosetAction> {
        &self.action
    }

    pub fn order(&self) -> usize {
        self.action.group().order()
    }

    pub fn adjacent(&self, g1: u32, g2: u32) -> bool {
        if g1 == g2 {
            return false;
        }
        let g = self.action.group();
        self.action.fixed_point_set().contains(g.mul(g.inv(g1), g2))
    }

    pub fn degree(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_clique(&self, s: &[u32]) -> bool {
        for (i, &a) in s.iter().enumerate() {
            for &b in &s[i + 1..] {
                if !self.adjacent(a, b) {
                    return false;
                }
            }
        }
        true
    }

    pub fn verify_independent(&self, t: &[u32]) -> bool {
        for (i, &a) in t.iter().enumerate() {
            for &b in &t[i + 1..] {
                if self.adjacent(a, b) {
                    return false;
                }
            }
        }
        true
    }

    /// Lemma: in a vertex-transitive graph |clique| * |independent| <= |V|.
    /// A false return is a tripwire for an internal bug.
    pub fn clique_coclique_check(&self, s: &[u32], t: &[u32]) -> Result<bool, EkrError> {
        if !self.is_clique(s) {
            return Err(EkrError::NotAClique);
        }
        if !self.verify_independent(t) {
            return Err(EkrError::NotIndependent);
        }
        Ok(s.len() * t.len() <= self.order())
    }

    /// Adjacency matrix of the induced subgraph on D \ {1}, bit-packed rows.
    fn candidate_adjacency(&self) -> Vec<Vec<u64>> {
        let k = self.candidates.len();
        let words = (k + 63) / 64;
        let mut adj = vec![vec![0u64; words]; k];
        for i in 0..k {
            for j in i + 1..k {
                if self.adjacent(self.candidates[i], self.candidates[j]) {
                    adj[i][j / 64] |= 1 << (j % 64);
                    adj[j][i / 64] |= 1 << (i % 64);
                }
            }
        }
        adj
    }

    /// Exact maximum clique size with one witness clique (which contains the
    /// identity). Branch-and-bound with a greedy-coloring bound; vertices in
    /// canonical index order, so the witness is deterministic.
    pub fn max_clique(&self, caps: &CliqueCaps) -> Result<(usize, Vec<u32>), EkrError> {
        let k = self.candidates.len();
        if k > caps.max_vertices {
            return Err(EkrError::VertexCap(k, caps.max_vertices));
        }
        let id = self.action.group().identity();
        if k == 0 {
            return Ok((1, vec![id]));
        }
        let adj = self.candidate_adjacency();
        let mut best: Vec<usize> = Vec::new();
        let mut cur: Vec<usize> = Vec::new();
        let all: Vec<usize> = (0..k).collect();
        branch(&adj, &mut cur, &all, &mut best);
        let mut clique: Vec<u32> = best.iter().map(|&i| self.candidates[i]).collect();
        clique.push(id);
        clique.sort_unstable();
        Ok((best.len() + 1, clique))
    }

    /// All maximum cliques containing the identity, canonical order. By
    /// translation these represent every maximum clique in the graph.
    pub fn enumerate_maximum_cliques_through_identity(
        &self,
        max_size: usize,
        caps: &CliqueCaps,
    ) -> Result<Vec<Vec<u32>>, EkrError> {
        let id = self.action.group().identity();
        if max_size == 1 {
            return Ok(vec![vec![id]]);
        }
        let adj = self.candidate_adjacency();
        let target = max_size - 1;
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut cur: Vec<usize> = Vec::new();
        let all: Vec<usize> = (0..self.candidates.len()).collect();
        enumerate_exact(&adj, &mut cur, &all, target, caps.max_extremal, &mut out)?;
        Ok(out
            .into_iter()
            .map(|c| {
                let mut v: Vec<u32> = c.into_iter().map(|i| self.candidates[i]).collect();
                v.push(id);
                v.sort_unstable();
                v
            })
            .collect())
    }
}

fn adj_contains(row: &[u64], j: usize) -> bool {
    row[j / 64] >> (j % 64) & 1 == 1
}

/// Greedy coloring of `p` (assigned in canonical order), then reordered by
/// color class. In the returned (vertex, color) list colors are
/// non-decreasing, so any clique inside a prefix ending at color c has at
/// most c vertices (one per class).
fn color_order(adj: &[Vec<u64>], p: &[usize]) -> Vec<(usize, usize)> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in p {
        let slot = classes
            .iter()
            .position(|class| class.iter().all(|&u| !adj_contains(&adj[v], u)));
        match slot {
            Some(c) => classes[c].push(v),
            None => classes.push(vec![v]),
        }
    }
    let mut out = Vec::with_capacity(p.len());
    for (c, class) in classes.iter().enumerate() {
        for &v in class {
            out.push((v, c + 1));
        }
    }
    out
}

fn branch(adj: &[Vec<u64>], cur: &mut Vec<usize>, p: &[usize], best: &mut Vec<usize>) {
    if p.is_empty() {
        if cur.len() > best.len() {
            *best = cur.clone();
        }
        return;
    }
    let ordered = color_order(adj, p);
    for i in (0..ordered.len()).rev() {
        let (v, color) = ordered[i];
        if cur.len() + color <= best.len() {
            return;
        }
        let next: Vec<usize> = ordered[..i]
            .iter()
            .map(|&(u, _)| u)
            .filter(|&u| adj_contains(&adj[v], u))
            .collect();
        cur.push(v);
        branch(adj, cur, &next, best);
        cur.pop();
    }
}

fn enumerate_exact(
    adj: &[Vec<u64>],
    cur: &mut Vec<usize>,
    p: &[usize],
    target: usize,
    cap: usize,
    out: &mut Vec<Vec<usize>>,
) -> Result<(), EkrError> {
    if cur.len() == target {
        if out.len() >= cap {
            return Err(EkrError::ExtremalCap(cap));
        }
        out.push(cur.clone());
        return Ok(());
    }
    let need = target - cur.len();
    for (idx, &v) in p.iter().enumerate() {
        if p.len() - idx < need {
            break;
        }
        let next: Vec<usize> = p[idx + 1..].iter().copied().filter(|&u| adj_contains(&adj[v], u)).collect();
        if next.len() + 1 < need {
            continue;
        }
        cur.push(v);
        enumerate_exact(adj, cur, &next, target, cap, out)?;
        cur.pop();
    }
    Ok(())
}

/// Weak EKR: every intersecting set has size at most |H|. Since the
/// stabilizer itself is a clique, this is max_clique == |H|.
pub fn check_weak_ekr(action: Arc<CosetAction>, caps: &CliqueCaps) -> Result<EkrReport, EkrError> {
    let h = action.subgroup().order();
    let n = action.group().order();
    let index = action.num_points();
    if h == n {
        // complete graph: the whole group is the unique maximum clique
        return Ok(EkrReport {
            group_order: n,
            index,
            stabilizer_size: h,
            max_clique: n,
            weak: true,
            strong: TriState::True,
            witness: None,
            extremal_count: 1,
            extremal_cliques: vec![(0..n as u32).collect()],
        });
    }
    let graph = build_graph(Arc::clone(&action));
    let (size, clique) = graph.max_clique(caps)?;
    debug_assert!(size >= h, "stabilizer is always a clique");
    debug_assert!(action.is_intersecting(&clique));
    let weak = size == h;
    Ok(EkrReport {
        group_order: n,
        index,
        stabilizer_size: h,
        max_clique: size,
        weak,
        strong: if weak { TriState::NotComputed } else { TriState::False },
        witness: if weak {
            None
        } else {
            Some(ReportWitness { elements: clique, kind: "clique".into() })
        },
        extremal_count: 0,
        extremal_cliques: Vec::new(),
    })
}

/// Strong EKR: weak EKR holds and every maximum intersecting set is a coset
/// of a point stabilizer. Cliques through the identity must then be exactly
/// the conjugates of H. Reported false-by-convention when weak fails, with
/// the oversized clique attached.
pub fn check_strong_ekr(action: Arc<CosetAction>, caps: &CliqueCaps) -> Result<EkrReport, EkrError> {
    let mut report = check_weak_ekr(Arc::clone(&action), caps)?;
    if !report.weak || report.strong == TriState::True {
        return Ok(report);
    }
    let graph = build_graph(Arc::clone(&action));
    let cliques = match graph.enumerate_maximum_cliques_through_identity(report.max_clique, caps) {
        Ok(c) => c,
        Err(EkrError::ExtremalCap(_)) => {
            report.strong = TriState::NotComputed;
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let h = action.subgroup();
    let g = action.group();
    report.extremal_count = cliques.len();
    let mut strong = TriState::True;
    for c in &cliques {
        debug_assert!(action.is_intersecting(c));
        if !is_coset_of_conjugate(g, c, h) {
            strong = TriState::False;
            if report.witness.is_none() {
                report.witness =
                    Some(ReportWitness { elements: c.clone(), kind: "non_canonical_max_clique".into() });
            }
        }
    }
    report.strong = strong;
    report.extremal_cliques = cliques;
    Ok(report)
}
