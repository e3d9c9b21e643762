//! Surfaces and topological types of multicurves.
//!
//! A multicurve on `S_{g,n}` is encoded by its cut graph: one vertex per
//! complementary piece (decorated with the piece's genus and number of
//! marked points) and one edge per curve. Loops and parallel edges are
//! allowed, so edges are kept as an explicit list.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed orientable surface of genus `genus` with `marked` unlabeled
/// marked points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Surface {
    pub genus: u32,
    pub marked: u32,
}

impl Surface {
    pub fn new(genus: u32, marked: u32) -> Result<Self> {
        let complexity = 3 * genus as i64 - 3 + marked as i64;
        if complexity < 1 {
            return Err(Error::UnsupportedSurface {
                genus,
                marked,
                complexity,
            });
        }
        Ok(Surface { genus, marked })
    }

    /// Number of curves in a pants decomposition, `3g - 3 + n`.
    pub fn complexity(&self) -> usize {
        (3 * self.genus as i64 - 3 + self.marked as i64) as usize
    }

    /// Dimension of the curve complex, `3g - 4 + n`.
    pub fn curve_complex_dim(&self) -> usize {
        self.complexity() - 1
    }

    /// Upper bound on the number of complementary pieces of any multicurve.
    pub fn max_pieces(&self) -> usize {
        (2 * self.genus as i64 - 2 + self.marked as i64) as usize
    }
}

impl std::fmt::Display for Surface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "S_{{{},{}}}", self.genus, self.marked)
    }
}

/// Genus and marked-point count of a complementary piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexDecoration {
    pub genus: u32,
    pub marked: u32,
}

impl VertexDecoration {
    pub const fn new(genus: u32, marked: u32) -> Self {
        VertexDecoration { genus, marked }
    }

    /// Euler-characteristic style weight `2g - 2 + n + degree`.
    pub fn weight(&self, degree: usize) -> i64 {
        2 * self.genus as i64 - 2 + self.marked as i64 + degree as i64
    }

    /// A pair of pants: genus zero with three boundary components or marked points.
    pub fn is_pants(&self, degree: usize) -> bool {
        self.genus == 0 && self.marked as usize + degree == 3
    }
}

/// A piece is stable when `2g - 2 + n + degree > 0`. This rules out disks,
/// once-marked disks and annuli, so every curve is essential, non-peripheral
/// and not isotopic to another curve of the system.
pub fn is_stable(decoration: VertexDecoration, degree: usize) -> bool {
    decoration.weight(degree) > 0
}

/// Cut graph of a multicurve. Edges are unordered vertex pairs stored with
/// the smaller endpoint first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct MulticurveGraph {
    vertices: Vec<VertexDecoration>,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    vertices: Vec<VertexDecoration>,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawGraph> for MulticurveGraph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        MulticurveGraph::new(raw.vertices, raw.edges)
    }
}

impl From<MulticurveGraph> for RawGraph {
    fn from(g: MulticurveGraph) -> Self {
        RawGraph {
            vertices: g.vertices,
            edges: g.edges,
        }
    }
}

/// Outcome of deleting a curve from a multicurve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Deletion {
    /// The deleted curve was the only one; what remains is the whole surface.
    Empty(VertexDecoration),
    /// A smaller multicurve. `surviving[j]` is the index, in the original
    /// graph, of edge `j` of the new graph.
    Face {
        graph: MulticurveGraph,
        surviving: Vec<usize>,
    },
}

impl MulticurveGraph {
    /// Builds a graph and checks the structural invariants: at least one
    /// edge, endpoints in range, connectivity and stability of every piece.
    pub fn new(vertices: Vec<VertexDecoration>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| if u <= v { (u, v) } else { (v, u) })
            .collect();
        let graph = MulticurveGraph { vertices, edges };
        graph.check()?;
        Ok(graph)
    }

    fn check(&self) -> Result<()> {
        let nv = self.vertices.len();
        if nv == 0 {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        if self.edges.is_empty() {
            return Err(Error::InvalidGraph("a multicurve needs at least one curve".into()));
        }
        if let Some(&(u, v)) = self.edges.iter().find(|&&(_, v)| v >= nv) {
            return Err(Error::InvalidGraph(format!(
                "edge ({u},{v}) references a vertex outside 0..{nv}"
            )));
        }
        if !self.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        for (i, dec) in self.vertices.iter().enumerate() {
            let deg = self.degree(i);
            if !is_stable(*dec, deg) {
                return Err(Error::InvalidGraph(format!(
                    "piece {i} (genus {}, {} marked, degree {deg}) is unstable",
                    dec.genus, dec.marked
                )));
            }
        }
        Ok(())
    }

    /// Checks the accounting against a surface: total genus, marked points
    /// and the curve-count bound.
    pub fn validate_for(&self, surface: Surface) -> Result<()> {
        let own = self.surface();
        if own != surface {
            return Err(Error::InvalidGraph(format!(
                "graph encodes a multicurve on {own}, expected {surface}"
            )));
        }
        if self.edges.len() > surface.complexity() {
            return Err(Error::InvalidGraph(format!(
                "{} curves exceed the maximum {} on {surface}",
                self.edges.len(),
                surface.complexity()
            )));
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[VertexDecoration] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of edge endpoints at `v`; loops count twice.
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    /// Number of edges joining `u` and `v` (loops when `u == v`).
    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        let key = if u <= v { (u, v) } else { (v, u) };
        self.edges.iter().filter(|&&e| e == key).count()
    }

    pub fn first_betti(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    /// The surface this multicurve lives on.
    pub fn surface(&self) -> Surface {
        let genus = self.vertices.iter().map(|d| d.genus).sum::<u32>() + self.first_betti() as u32;
        let marked = self.vertices.iter().map(|d| d.marked).sum();
        Surface { genus, marked }
    }

    /// True when every piece is a pair of pants.
    pub fn is_pants_decomposition(&self) -> bool {
        (0..self.vertices.len()).all(|v| self.vertices[v].is_pants(self.degree(v)))
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                let other = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Removes curve `edge`. A curve between two pieces glues them (genera
    /// and marked points add); a loop raises its piece's genus by one.
    ///
    /// Panics if `edge` is out of range.
    pub fn delete_curve(&self, edge: usize) -> Deletion {
        let (u, v) = self.edges[edge];
        let mut vertices = self.vertices.clone();
        let surviving: Vec<usize> = (0..self.edges.len()).filter(|&e| e != edge).collect();
        let mut edges: Vec<(usize, usize)> = surviving.iter().map(|&e| self.edges[e]).collect();
        if u == v {
            vertices[u].genus += 1;
        } else {
            // merge v into u, then close the gap left by v
            vertices[u].genus += vertices[v].genus;
            vertices[u].marked += vertices[v].marked;
            vertices.remove(v);
            let relabel = |w: usize| {
                let w = if w == v { u } else { w };
                if w > v {
                    w - 1
                } else {
                    w
                }
            };
            for e in &mut edges {
                let (a, b) = (relabel(e.0), relabel(e.1));
                *e = if a <= b { (a, b) } else { (b, a) };
            }
        }
        if edges.is_empty() {
            debug_assert_eq!(vertices.len(), 1);
            return Deletion::Empty(vertices[0]);
        }
        let graph = MulticurveGraph { vertices, edges };
        debug_assert!(graph.check().is_ok());
        Deletion::Face { graph, surviving }
    }

    /// Keeps only the curves listed in `keep` (original indices) by deleting
    /// all others. Returns `None` when `keep` is empty. The second component
    /// lists, for each edge of the result, its original index.
    pub fn restrict_to(&self, keep: &[usize]) -> Option<(MulticurveGraph, Vec<usize>)> {
        if keep.is_empty() {
            return None;
        }
        let mut graph = self.clone();
        let mut origin: Vec<usize> = (0..self.edges.len()).collect();
        let mut idx = 0;
        while idx < origin.len() {
            if keep.contains(&origin[idx]) {
                idx += 1;
                continue;
            }
            match graph.delete_curve(idx) {
                Deletion::Face { graph: g, surviving } => {
                    origin = surviving.iter().map(|&j| origin[j]).collect();
                    graph = g;
                }
                Deletion::Empty(_) => unreachable!("a kept edge always survives"),
            }
        }
        Some((graph, origin))
    }

    /// Applies a vertex relabeling (`vertex_perm[old] = new`) and an edge
    /// reordering (`edge_perm[old] = new`).
    pub fn relabel(&self, vertex_perm: &[usize], edge_perm: &[usize]) -> MulticurveGraph {
        let mut vertices = vec![VertexDecoration::new(0, 0); self.vertices.len()];
        for (old, &new) in vertex_perm.iter().enumerate() {
            vertices[new] = self.vertices[old];
        }
        let mut edges = vec![(0, 0); self.edges.len()];
        for (old, &new) in edge_perm.iter().enumerate() {
            let (a, b) = self.edges[old];
            let (a, b) = (vertex_perm[a], vertex_perm[b]);
            edges[new] = if a <= b { (a, b) } else { (b, a) };
        }
        MulticurveGraph { vertices, edges }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec(g: u32, n: u32) -> VertexDecoration {
        VertexDecoration::new(g, n)
    }

    #[test]
    fn stability_examples() {
        assert!(!is_stable(dec(0, 0), 1));
        assert!(!is_stable(dec(0, 1), 1));
        assert!(is_stable(dec(0, 2), 2));
        // annulus piece
        assert!(!is_stable(dec(0, 0), 2));
        assert!(is_stable(dec(1, 0), 1));
    }

    #[test]
    fn stability_is_monotone_in_degree() {
        for g in 0..3 {
            for n in 0..4 {
                for k in 0..6 {
                    if is_stable(dec(g, n), k) {
                        assert!(is_stable(dec(g, n), k + 1));
                    }
                }
            }
        }
    }

    #[test]
    fn surface_rejects_sporadic() {
        assert!(Surface::new(0, 3).is_err());
        assert!(Surface::new(1, 0).is_err());
        assert!(Surface::new(0, 0).is_err());
        let s = Surface::new(1, 2).unwrap();
        assert_eq!(s.complexity(), 2);
        assert_eq!(s.curve_complex_dim(), 1);
    }

    #[test]
    fn rejects_invalid_graphs() {
        // disconnected
        assert!(MulticurveGraph::new(vec![dec(0, 2), dec(0, 2)], vec![(0, 0), (1, 1)]).is_err());
        // once-marked disk
        assert!(MulticurveGraph::new(vec![dec(1, 0), dec(0, 1)], vec![(0, 1)]).is_err());
        // vertex out of range
        assert!(MulticurveGraph::new(vec![dec(0, 2)], vec![(0, 1)]).is_err());
        // no curves
        assert!(MulticurveGraph::new(vec![dec(1, 2)], vec![]).is_err());
    }

    #[test]
    fn validate_accounting() {
        let g = MulticurveGraph::new(vec![dec(0, 2)], vec![(0, 0)]).unwrap();
        assert!(g.validate_for(Surface::new(1, 2).unwrap()).is_ok());
        assert!(g.validate_for(Surface::new(2, 0).unwrap()).is_err());
    }

    #[test]
    fn delete_bridge_of_dumbbell() {
        let g = MulticurveGraph::new(vec![dec(0, 0), dec(0, 0)], vec![(0, 0), (0, 1), (1, 1)])
            .unwrap();
        match g.delete_curve(1) {
            Deletion::Face { graph, surviving } => {
                assert_eq!(graph.vertices(), &[dec(0, 0)]);
                assert_eq!(graph.edges(), &[(0, 0), (0, 0)]);
                assert_eq!(graph.first_betti(), 2);
                assert_eq!(graph.surface(), g.surface());
                assert_eq!(surviving, vec![0, 2]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn delete_only_loop() {
        let g = MulticurveGraph::new(vec![dec(0, 2)], vec![(0, 0)]).unwrap();
        assert_eq!(g.delete_curve(0), Deletion::Empty(dec(1, 2)));
    }

    #[test]
    fn delete_separating_curve() {
        let g = MulticurveGraph::new(vec![dec(1, 0), dec(1, 0)], vec![(0, 1)]).unwrap();
        assert_eq!(g.delete_curve(0), Deletion::Empty(dec(2, 0)));
    }

    #[test]
    fn restrict_keeps_original_indices() {
        let g = MulticurveGraph::new(vec![dec(0, 0), dec(0, 0)], vec![(0, 0), (0, 1), (1, 1)])
            .unwrap();
        let (r, origin) = g.restrict_to(&[2]).unwrap();
        assert_eq!(origin, vec![2]);
        assert_eq!(r.edge_count(), 1);
        assert_eq!(r.surface(), g.surface());
        assert!(g.restrict_to(&[]).is_none());
    }
}
