//! Feynman graphs as labelled multigraphs, and the spanning-tree and
//! two-forest enumerations behind the parametric graph polynomials.
//!
//! Self-loops and parallel lines are legal everywhere. Lines are ordered by
//! ascending id; that order fixes the parameter slot of each line in every
//! polynomial built downstream.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::CoreError;
use crate::rat::Rat;

/// One internal line: an unordered pair of vertices and a squared mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub id: u32,
    /// Indices into the vertex table. Equal indices form a self-loop.
    pub ends: (usize, usize),
    pub mass2: Rat,
}

/// One external leg: a momentum label attached to a vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Leg {
    pub label: String,
    pub vertex: usize,
}

/// Input description of a line, with vertices by name.
#[derive(Debug, Clone)]
pub struct LineSpec {
    pub id: u32,
    pub ends: (String, String),
    pub mass2: Rat,
}

#[derive(Debug, Clone)]
pub struct LegSpec {
    pub label: String,
    pub vertex: String,
}

/// Declares the invariant symbol carried by a split of the external legs:
/// `legs` lists one side of the bipartition; the other side is implied.
#[derive(Debug, Clone)]
pub struct InvariantSpec {
    pub legs: Vec<String>,
    pub symbol: String,
}

/// A connected labelled multigraph with external legs and a table of
/// kinematic invariants keyed by leg bipartitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeynmanGraph {
    vertices: Vec<String>,
    lines: Vec<Line>,
    legs: Vec<Leg>,
    /// Canonical leg-side (the side holding the smallest leg label) -> symbol.
    invariants: BTreeMap<BTreeSet<String>, String>,
}

impl FeynmanGraph {
    pub fn new(
        vertices: Vec<String>,
        line_specs: Vec<LineSpec>,
        leg_specs: Vec<LegSpec>,
        invariant_specs: Vec<InvariantSpec>,
    ) -> Result<Self, CoreError> {
        if vertices.is_empty() {
            return Err(CoreError::EmptyGraph);
        }
        let vertex_index: BTreeMap<&str, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let mut lines = Vec::with_capacity(line_specs.len());
        let mut seen_ids = BTreeSet::new();
        for spec in line_specs {
            if !seen_ids.insert(spec.id) {
                return Err(CoreError::DuplicateLine { line: spec.id });
            }
            let resolve = |name: &String| {
                vertex_index
                    .get(name.as_str())
                    .copied()
                    .ok_or_else(|| CoreError::UnknownVertex {
                        line: spec.id,
                        vertex: name.clone(),
                    })
            };
            lines.push(Line {
                id: spec.id,
                ends: (resolve(&spec.ends.0)?, resolve(&spec.ends.1)?),
                mass2: spec.mass2,
            });
        }
        lines.sort_by_key(|l| l.id);
        // Ids must be exactly 1..=L so that id - 1 is the parameter slot.
        if lines.iter().enumerate().any(|(i, l)| l.id as usize != i + 1) {
            return Err(CoreError::BadLineIds {
                got: lines.iter().map(|l| l.id).collect(),
            });
        }
        let mut legs = Vec::with_capacity(leg_specs.len());
        let mut seen_legs = BTreeSet::new();
        for spec in leg_specs {
            if !seen_legs.insert(spec.label.clone()) {
                return Err(CoreError::DuplicateLeg { leg: spec.label });
            }
            let vertex = vertex_index.get(spec.vertex.as_str()).copied().ok_or_else(|| {
                CoreError::UnknownLegVertex {
                    leg: spec.label.clone(),
                    vertex: spec.vertex.clone(),
                }
            })?;
            legs.push(Leg {
                label: spec.label,
                vertex,
            });
        }
        let all_legs: BTreeSet<String> = legs.iter().map(|l| l.label.clone()).collect();
        let mut invariants = BTreeMap::new();
        for spec in invariant_specs {
            let side: BTreeSet<String> = spec.legs.into_iter().collect();
            for leg in &side {
                if !all_legs.contains(leg) {
                    return Err(CoreError::UnknownLegVertex {
                        leg: leg.clone(),
                        vertex: String::from("<invariant table>"),
                    });
                }
            }
            let key = canonical_side(&side, &all_legs);
            invariants.insert(key, spec.symbol);
        }
        Ok(Self {
            vertices,
            lines,
            legs,
            invariants,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    /// Lines in ascending id order; position in this slice is the line's
    /// parameter slot everywhere downstream.
    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn masses(&self) -> Vec<Rat> {
        self.lines.iter().map(|l| l.mass2.clone()).collect()
    }

    /// Loop number (first Betti number) of the connected graph.
    pub fn loop_count(&self) -> usize {
        self.lines.len() + 1 - self.vertices.len()
    }

    /// Looks up the invariant symbol for a bipartition given by one side.
    pub fn invariant_for(&self, side: &BTreeSet<String>) -> Option<&str> {
        let all: BTreeSet<String> = self.legs.iter().map(|l| l.label.clone()).collect();
        self.invariants
            .get(&canonical_side(side, &all))
            .map(String::as_str)
    }

    fn components(&self, line_filter: impl Fn(&Line) -> bool) -> Vec<Vec<usize>> {
        let mut dsu = Dsu::new(self.vertices.len());
        for line in &self.lines {
            if line_filter(line) {
                dsu.union(line.ends.0, line.ends.1);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.vertices.len() {
            groups.entry(dsu.find(v)).or_default().push(v);
        }
        groups.into_values().collect()
    }

    fn require_connected(&self) -> Result<(), CoreError> {
        let comps = self.components(|_| true);
        if comps.len() > 1 {
            return Err(CoreError::Disconnected {
                components: comps
                    .into_iter()
                    .map(|c| c.into_iter().map(|v| self.vertices[v].clone()).collect())
                    .collect(),
            });
        }
        Ok(())
    }

    /// All spanning trees, as sorted line-id sets in lexicographic order.
    ///
    /// Enumeration is a contraction/deletion recursion over lines in id
    /// order with union-find state and a connectivity cut, so only viable
    /// branches are visited; no power-set scan is involved.
    pub fn spanning_trees(&self) -> Result<TreeSet, CoreError> {
        self.require_connected()?;
        let nv = self.vertices.len();
        let mut out: Vec<Vec<u32>> = Vec::new();
        let mut chosen: Vec<u32> = Vec::new();
        let dsu = Dsu::new(nv);
        self.tree_rec(0, dsu, &mut chosen, &mut out);
        out.sort();
        Ok(TreeSet { trees: out })
    }

    fn tree_rec(&self, i: usize, dsu: Dsu, chosen: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if chosen.len() == self.vertices.len() - 1 {
            out.push(chosen.clone());
            return;
        }
        if i == self.lines.len() {
            return;
        }
        let line = &self.lines[i];
        // Contract: take the line if it joins two distinct components.
        if dsu.clone_find(line.ends.0) != dsu.clone_find(line.ends.1) {
            let mut taken = dsu.clone();
            taken.union(line.ends.0, line.ends.1);
            chosen.push(line.id);
            self.tree_rec(i + 1, taken, chosen, out);
            chosen.pop();
        }
        // Delete: skip the line, but only if the remaining lines can still
        // connect everything.
        let mut probe = dsu.clone();
        for l in &self.lines[i + 1..] {
            probe.union(l.ends.0, l.ends.1);
        }
        if probe.component_count() == 1 {
            self.tree_rec(i + 1, dsu, chosen, out);
        }
    }

    /// All spanning two-forests (exactly two components, no cycles), each
    /// with the induced bipartition of vertices and external legs.
    ///
    /// A graph on a single vertex has none: the empty line set already
    /// spans it with one component.
    pub fn two_trees(&self) -> Result<Vec<TwoTree>, CoreError> {
        self.require_connected()?;
        if self.vertices.len() < 2 {
            return Ok(Vec::new());
        }
        // Every two-forest is a spanning tree minus one tree line, and all
        // arise that way; dedupe because different trees share forests.
        let trees = self.spanning_trees()?;
        let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
        let mut out = Vec::new();
        for tree in &trees.trees {
            for skip in tree {
                let forest: Vec<u32> = tree.iter().copied().filter(|id| id != skip).collect();
                if !seen.insert(forest.clone()) {
                    continue;
                }
                let keep: BTreeSet<u32> = forest.iter().copied().collect();
                let comps = self.components(|l| keep.contains(&l.id));
                debug_assert_eq!(comps.len(), 2);
                let side_of = |vs: &Vec<usize>| -> (Vec<String>, Vec<String>) {
                    let verts: Vec<String> =
                        vs.iter().map(|&v| self.vertices[v].clone()).collect();
                    let legs: Vec<String> = self
                        .legs
                        .iter()
                        .filter(|leg| vs.contains(&leg.vertex))
                        .map(|leg| leg.label.clone())
                        .collect();
                    (verts, legs)
                };
                let (va, la) = side_of(&comps[0]);
                let (vb, lb) = side_of(&comps[1]);
                out.push(TwoTree {
                    lines: forest,
                    vertex_split: (va, vb),
                    leg_split: (la, lb),
                });
            }
        }
        out.sort_by(|a, b| a.lines.cmp(&b.lines));
        Ok(out)
    }

    /// Number of spanning trees by the matrix-tree theorem: an independent
    /// cross-check on the enumeration, via a Laplacian determinant.
    pub fn kirchhoff_count(&self) -> Result<Rat, CoreError> {
        let n = self.vertices.len();
        if n == 1 {
            return Ok(crate::rat::int(1));
        }
        let mut lap = vec![vec![Rat::zero(); n]; n];
        for line in &self.lines {
            let (a, b) = line.ends;
            if a == b {
                continue;
            }
            lap[a][a] += crate::rat::int(1);
            lap[b][b] += crate::rat::int(1);
            lap[a][b] -= crate::rat::int(1);
            lap[b][a] -= crate::rat::int(1);
        }
        let reduced: Vec<Vec<Rat>> = (1..n)
            .map(|i| (1..n).map(|j| lap[i][j].clone()).collect())
            .collect();
        crate::linalg::determinant(&reduced)
    }
}

/// Ordered collection of spanning trees (sorted line-id sets, lexicographic).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSet {
    pub trees: Vec<Vec<u32>>,
}

/// A spanning two-forest with its vertex and external-leg bipartition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoTree {
    pub lines: Vec<u32>,
    pub vertex_split: (Vec<String>, Vec<String>),
    pub leg_split: (Vec<String>, Vec<String>),
}

/// Canonical key for a leg bipartition: the side containing the smallest
/// leg label overall (or the given side verbatim when there are no legs).
pub fn canonical_side(side: &BTreeSet<String>, all: &BTreeSet<String>) -> BTreeSet<String> {
    match all.iter().next() {
        Some(smallest) if !side.contains(smallest) => all.difference(side).cloned().collect(),
        _ => side.clone(),
    }
}

/// Union-find over vertex indices.
#[derive(Debug, Clone)]
struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Find without mutation (used where the state is shared across branches).
    fn clone_find(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn component_count(&self) -> usize {
        self.parent
            .iter()
            .enumerate()
            .filter(|(v, &p)| *v == p)
            .count()
    }
}
