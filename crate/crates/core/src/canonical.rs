//! Canonical labeling and automorphism groups of decorated multigraphs.
//!
//! Vertices are first split into classes by a refinement-stable invariant
//! (decoration, degree, loop count, neighbour signature). The canonical
//! ordering is the lexicographically least adjacency code over all vertex
//! orderings that respect the class order. Graphs of interest have at most a
//! handful of vertices, so the search is exhaustive within classes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::topology::{MulticurveGraph, VertexDecoration};

/// Complete isomorphism invariant: vertex count, decorations in canonical
/// order, then the upper-triangular multiplicity matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalLabel(pub Vec<u32>);

impl CanonicalLabel {
    /// Short stable hex digest used as an orbit identifier.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for word in &self.0 {
            hasher.update(word.to_le_bytes());
        }
        let out = hasher.finalize();
        out.iter().take(6).map(|b| format!("{b:02x}")).collect()
    }
}

/// A decoration-preserving automorphism, given by the images of vertices
/// and of edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Automorphism {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Automorphism {
    pub fn identity(nv: usize, ne: usize) -> Self {
        Automorphism {
            vertices: (0..nv).collect(),
            edges: (0..ne).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.vertices.iter().enumerate().all(|(i, &v)| i == v)
            && self.edges.iter().enumerate().all(|(i, &e)| i == e)
    }

    pub fn compose(&self, then: &Automorphism) -> Automorphism {
        Automorphism {
            vertices: self.vertices.iter().map(|&v| then.vertices[v]).collect(),
            edges: self.edges.iter().map(|&e| then.edges[e]).collect(),
        }
    }

    /// True when this is a genuine automorphism of `graph`: both maps are
    /// bijections, decorations are preserved and every edge is sent to an
    /// edge with the image endpoints.
    pub fn is_valid_for(&self, graph: &MulticurveGraph) -> bool {
        let nv = graph.vertex_count();
        let ne = graph.edge_count();
        if self.vertices.len() != nv || self.edges.len() != ne {
            return false;
        }
        if !is_permutation(&self.vertices) || !is_permutation(&self.edges) {
            return false;
        }
        let decs = graph.vertices();
        if (0..nv).any(|v| decs[v] != decs[self.vertices[v]]) {
            return false;
        }
        graph.edges().iter().enumerate().all(|(e, &(a, b))| {
            let (x, y) = (self.vertices[a], self.vertices[b]);
            let want = if x <= y { (x, y) } else { (y, x) };
            graph.edges()[self.edges[e]] == want
        })
    }
}

pub(crate) fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// Result of canonicalizing a graph.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub label: CanonicalLabel,
    /// The canonical representative: vertices in canonical order, edges
    /// sorted by endpoints.
    pub graph: MulticurveGraph,
    /// Input vertex -> canonical vertex.
    pub vertex_map: Vec<usize>,
    /// Input edge -> canonical edge.
    pub edge_map: Vec<usize>,
    /// Automorphism group of the canonical graph, identity first.
    pub automorphisms: Vec<Automorphism>,
}

impl CanonicalForm {
    /// Distinct permutations induced on the edges (the action on curves).
    pub fn edge_action(&self) -> Vec<Vec<usize>> {
        edge_action(&self.automorphisms)
    }
}

/// Distinct edge permutations of an automorphism list, in first-seen order.
pub fn edge_action(automorphisms: &[Automorphism]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for a in automorphisms {
        if !out.contains(&a.edges) {
            out.push(a.edges.clone());
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct VertexInvariant {
    decoration: VertexDecoration,
    degree: usize,
    loops: usize,
    neighbours: Vec<(VertexDecoration, usize, usize)>,
}

fn vertex_invariants(graph: &MulticurveGraph) -> Vec<VertexInvariant> {
    let nv = graph.vertex_count();
    let decs = graph.vertices();
    (0..nv)
        .map(|v| {
            let mut neighbours: Vec<(VertexDecoration, usize, usize)> = (0..nv)
                .filter(|&w| w != v)
                .filter_map(|w| {
                    let m = graph.multiplicity(v, w);
                    (m > 0).then(|| (decs[w], graph.degree(w), m))
                })
                .collect();
            neighbours.sort();
            VertexInvariant {
                decoration: decs[v],
                degree: graph.degree(v),
                loops: graph.multiplicity(v, v),
                neighbours,
            }
        })
        .collect()
}

fn multiplicity_matrix(graph: &MulticurveGraph) -> Vec<Vec<usize>> {
    let nv = graph.vertex_count();
    let mut m = vec![vec![0usize; nv]; nv];
    for &(a, b) in graph.edges() {
        m[a][b] += 1;
        if a != b {
            m[b][a] += 1;
        }
    }
    m
}

/// Calls `visit` with every ordering (position -> vertex) that lists the
/// classes in order and permutes freely inside each class.
fn for_each_class_ordering(classes: &[Vec<usize>], visit: &mut dyn FnMut(&[usize])) {
    fn rec(
        classes: &[Vec<usize>],
        ci: usize,
        order: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if ci == classes.len() {
            visit(order);
            return;
        }
        let len = order.len();
        for perm in permutations(classes[ci].len()) {
            order.truncate(len);
            order.extend(perm.iter().map(|&k| classes[ci][k]));
            rec(classes, ci + 1, order, visit);
        }
        order.truncate(len);
    }
    rec(classes, 0, &mut Vec::new(), visit);
}

fn code_for(graph: &MulticurveGraph, mult: &[Vec<usize>], order: &[usize]) -> Vec<u32> {
    let nv = order.len();
    let mut code = Vec::with_capacity(1 + 2 * nv + nv * (nv + 1) / 2);
    code.push(nv as u32);
    for &v in order {
        let d = graph.vertices()[v];
        code.push(d.genus);
        code.push(d.marked);
    }
    for i in 0..nv {
        for j in i..nv {
            code.push(mult[order[i]][order[j]] as u32);
        }
    }
    code
}

fn invariant_classes(graph: &MulticurveGraph) -> Vec<Vec<usize>> {
    let inv = vertex_invariants(graph);
    let mut by_inv: BTreeMap<VertexInvariant, Vec<usize>> = BTreeMap::new();
    for (v, i) in inv.into_iter().enumerate() {
        by_inv.entry(i).or_default().push(v);
    }
    by_inv.into_values().collect()
}

/// Canonical labeling of a multigraph together with its full automorphism
/// group.
pub fn canonicalize(graph: &MulticurveGraph) -> CanonicalForm {
    let mult = multiplicity_matrix(graph);
    let classes = invariant_classes(graph);

    let mut best: Option<(Vec<u32>, Vec<usize>)> = None;
    for_each_class_ordering(&classes, &mut |order| {
        let code = code_for(graph, &mult, order);
        if best.as_ref().is_none_or(|(b, _)| code < *b) {
            best = Some((code, order.to_vec()));
        }
    });
    let (code, order) = best.expect("at least one ordering");

    let nv = graph.vertex_count();
    let mut vertex_map = vec![0; nv];
    for (pos, &v) in order.iter().enumerate() {
        vertex_map[v] = pos;
    }

    // canonical graph: edges sorted by canonical endpoints
    let mut canon_edges: Vec<(usize, usize)> = graph
        .edges()
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (vertex_map[a], vertex_map[b]);
            if x <= y {
                (x, y)
            } else {
                (y, x)
            }
        })
        .collect();
    let mut sorted = canon_edges.clone();
    sorted.sort();
    let mut taken = vec![false; sorted.len()];
    let edge_map: Vec<usize> = canon_edges
        .iter()
        .map(|e| {
            let idx = (0..sorted.len())
                .find(|&i| !taken[i] && sorted[i] == *e)
                .expect("edge present");
            taken[idx] = true;
            idx
        })
        .collect();
    canon_edges = sorted;
    let canon_vertices: Vec<VertexDecoration> =
        order.iter().map(|&v| graph.vertices()[v]).collect();
    let canon = MulticurveGraph::new(canon_vertices, canon_edges)
        .expect("relabeling preserves validity");

    let automorphisms = automorphisms_of(&canon);

    CanonicalForm {
        label: CanonicalLabel(code),
        graph: canon,
        vertex_map,
        edge_map,
        automorphisms,
    }
}

/// All decoration-preserving automorphisms (vertex map plus edge map),
/// identity first. Parallel edges and loops contribute every bijection
/// within their endpoint class.
pub fn automorphisms_of(graph: &MulticurveGraph) -> Vec<Automorphism> {
    let nv = graph.vertex_count();
    let mult = multiplicity_matrix(graph);
    let inv = vertex_invariants(graph);

    let mut vertex_autos: Vec<Vec<usize>> = Vec::new();
    let mut image = vec![usize::MAX; nv];
    let mut used = vec![false; nv];
    fn search(
        v: usize,
        nv: usize,
        inv: &[VertexInvariant],
        mult: &[Vec<usize>],
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if v == nv {
            out.push(image.clone());
            return;
        }
        for w in 0..nv {
            if used[w] || inv[w] != inv[v] {
                continue;
            }
            if (0..v).any(|u| mult[u][v] != mult[image[u]][w]) || mult[v][v] != mult[w][w] {
                continue;
            }
            image[v] = w;
            used[w] = true;
            search(v + 1, nv, inv, mult, image, used, out);
            used[w] = false;
            image[v] = usize::MAX;
        }
    }
    search(0, nv, &inv, &mult, &mut image, &mut used, &mut vertex_autos);

    // edges grouped by endpoint pair
    let mut classes: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (e, &pair) in graph.edges().iter().enumerate() {
        classes.entry(pair).or_default().push(e);
    }

    let mut out = Vec::new();
    for vperm in vertex_autos {
        let blocks: Vec<(&Vec<usize>, &Vec<usize>)> = classes
            .iter()
            .map(|(&(a, b), src)| {
                let (x, y) = (vperm[a], vperm[b]);
                let key = if x <= y { (x, y) } else { (y, x) };
                (src, &classes[&key])
            })
            .collect();
        let mut edge_img = vec![usize::MAX; graph.edge_count()];
        extend_edge_maps(&blocks, 0, &mut edge_img, &vperm, &mut out);
    }
    out
}

fn extend_edge_maps(
    blocks: &[(&Vec<usize>, &Vec<usize>)],
    bi: usize,
    edge_img: &mut Vec<usize>,
    vperm: &[usize],
    out: &mut Vec<Automorphism>,
) {
    if bi == blocks.len() {
        out.push(Automorphism {
            vertices: vperm.to_vec(),
            edges: edge_img.clone(),
        });
        return;
    }
    let (src, dst) = blocks[bi];
    for perm in permutations(dst.len()) {
        for (k, &e) in src.iter().enumerate() {
            edge_img[e] = dst[perm[k]];
        }
        extend_edge_maps(blocks, bi + 1, edge_img, vperm, out);
    }
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Every edge bijection `g -> h` induced by a decoration-preserving graph
/// isomorphism. Empty when the graphs are not isomorphic.
pub fn isomorphisms(g: &MulticurveGraph, h: &MulticurveGraph) -> Vec<Vec<usize>> {
    let cg = canonicalize(g);
    let ch = canonicalize(h);
    if cg.label != ch.label {
        return Vec::new();
    }
    let mut h_inv = vec![0; ch.edge_map.len()];
    for (e, &c) in ch.edge_map.iter().enumerate() {
        h_inv[c] = e;
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    for a in &ch.automorphisms {
        let map: Vec<usize> = cg.edge_map.iter().map(|&c| h_inv[a.edges[c]]).collect();
        if !out.contains(&map) {
            out.push(map);
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec(g: u32, n: u32) -> VertexDecoration {
        VertexDecoration::new(g, n)
    }

    #[test]
    fn permutations_count() {
        assert_eq!(permutations(0).len(), 1);
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(3)[0], vec![0, 1, 2]);
    }

    #[test]
    fn single_loop_has_trivial_edge_action() {
        let g = MulticurveGraph::new(vec![dec(0, 2)], vec![(0, 0)]).unwrap();
        let cf = canonicalize(&g);
        assert_eq!(cf.edge_action(), vec![vec![0]]);
        assert!(cf.automorphisms[0].is_identity());
    }

    #[test]
    fn nonseparating_pair_swaps_curves() {
        let g = MulticurveGraph::new(vec![dec(0, 1), dec(0, 1)], vec![(0, 1), (0, 1)]).unwrap();
        let cf = canonicalize(&g);
        assert_eq!(cf.automorphisms.len(), 4);
        let action = cf.edge_action();
        assert_eq!(action.len(), 2);
        assert!(action.contains(&vec![1, 0]));
    }

    #[test]
    fn theta_graph_group() {
        let g = MulticurveGraph::new(vec![dec(0, 0), dec(0, 0)], vec![(0, 1); 3]).unwrap();
        let cf = canonicalize(&g);
        // vertex swap times S3 on the three parallel edges
        assert_eq!(cf.automorphisms.len(), 12);
        // induced action on curves is S3
        assert_eq!(cf.edge_action().len(), 6);
        for a in &cf.automorphisms {
            assert!(a.is_valid_for(&cf.graph));
        }
    }

    #[test]
    fn dumbbell_group() {
        let g = MulticurveGraph::new(vec![dec(0, 0), dec(0, 0)], vec![(0, 0), (0, 1), (1, 1)])
            .unwrap();
        let cf = canonicalize(&g);
        assert_eq!(cf.automorphisms.len(), 2);
        assert_eq!(cf.edge_action().len(), 2);
    }

    #[test]
    fn label_distinguishes_decorations() {
        let a = MulticurveGraph::new(vec![dec(1, 0), dec(0, 2)], vec![(0, 1)]).unwrap();
        let b = MulticurveGraph::new(vec![dec(0, 2), dec(1, 0)], vec![(0, 1)]).unwrap();
        let c = MulticurveGraph::new(vec![dec(0, 2)], vec![(0, 0)]).unwrap();
        assert_eq!(canonicalize(&a).label, canonicalize(&b).label);
        assert_ne!(canonicalize(&a).label, canonicalize(&c).label);
    }

    #[test]
    fn isomorphisms_between_relabelings() {
        let g = MulticurveGraph::new(vec![dec(0, 0), dec(0, 2)], vec![(0, 0), (0, 1)]).unwrap();
        let h = g.relabel(&[1, 0], &[1, 0]);
        let isos = isomorphisms(&g, &h);
        assert_eq!(isos, vec![vec![1, 0]]);
    }

    #[test]
    fn invalid_automorphism_detected() {
        let g = MulticurveGraph::new(vec![dec(0, 0), dec(0, 2)], vec![(0, 0), (0, 1)]).unwrap();
        let bogus = Automorphism {
            vertices: vec![0, 1],
            edges: vec![1, 0],
        };
        assert!(!bogus.is_valid_for(&g));
    }
}
