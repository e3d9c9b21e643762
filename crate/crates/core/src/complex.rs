//! Enumeration of the finite orbicomplex of multicurve types.
//!
//! Each simplex orbit is a topological type of multicurve, stored as its
//! canonical cut graph together with the automorphism group of that graph.
//! Face maps are obtained by deleting one curve and re-canonicalizing.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::{canonicalize, edge_action, isomorphisms, Automorphism, CanonicalLabel};
use crate::error::{Error, Result};
use crate::topology::{is_stable, Deletion, MulticurveGraph, Surface, VertexDecoration};

pub const SCHEMA_VERSION: u32 = 1;

/// Stable orbit identifier, a digest of the canonical label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrbitId(pub String);

impl std::fmt::Display for OrbitId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimplexOrbit {
    pub id: OrbitId,
    pub dim: usize,
    pub label: CanonicalLabel,
    pub graph: MulticurveGraph,
    pub automorphisms: Vec<Automorphism>,
}

impl SimplexOrbit {
    fn from_graph(graph: &MulticurveGraph) -> Self {
        let cf = canonicalize(graph);
        SimplexOrbit {
            id: OrbitId(cf.label.digest()),
            dim: cf.graph.edge_count() - 1,
            label: cf.label,
            graph: cf.graph,
            automorphisms: cf.automorphisms,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Distinct permutations of the curves induced by automorphisms.
    pub fn edge_action(&self) -> Vec<Vec<usize>> {
        edge_action(&self.automorphisms)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceMap {
    pub from: OrbitId,
    pub deleted_edge: usize,
    pub to: OrbitId,
    /// Pairs `(edge of from, edge of to)` for every surviving curve.
    pub edge_injection: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuotientComplex {
    pub schema_version: u32,
    pub surface: Surface,
    /// Sorted by dimension, then id.
    pub orbits: Vec<SimplexOrbit>,
    pub face_maps: Vec<FaceMap>,
    #[serde(skip)]
    index: HashMap<OrbitId, usize>,
    #[serde(skip)]
    by_label: HashMap<CanonicalLabel, usize>,
}

/// Complete, duplicate-free list of multicurve types with `k` curves.
pub fn enumerate_orbits(surface: Surface, k: usize) -> Result<Vec<SimplexOrbit>> {
    let max = surface.complexity();
    if k == 0 || k > max {
        return Err(Error::CurveCountOutOfRange { k, max });
    }
    let max_vertices = surface.max_pieces().min(k + 1);
    let candidates: Vec<MulticurveGraph> = (1..=max_vertices)
        .into_par_iter()
        .flat_map_iter(|nv| graphs_with(surface, k, nv))
        .collect();
    let mut seen: BTreeMap<CanonicalLabel, SimplexOrbit> = BTreeMap::new();
    for g in &candidates {
        let orbit = SimplexOrbit::from_graph(g);
        seen.entry(orbit.label.clone()).or_insert(orbit);
    }
    let mut orbits: Vec<SimplexOrbit> = seen.into_values().collect();
    orbits.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(orbits)
}

/// All stable connected decorated multigraphs on `nv` labeled vertices with
/// `k` edges encoding multicurves on `surface` (with repetitions).
fn graphs_with(surface: Surface, k: usize, nv: usize) -> Vec<MulticurveGraph> {
    if k + 1 < nv {
        return Vec::new();
    }
    let betti = k + 1 - nv;
    if betti as u32 > surface.genus {
        return Vec::new();
    }
    let genus_budget = surface.genus - betti as u32;

    let slots: Vec<(usize, usize)> = (0..nv).flat_map(|i| (i..nv).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let mut counts = vec![0usize; slots.len()];
    distribute_edges(&slots, 0, k, &mut counts, &mut |counts| {
        let edges: Vec<(usize, usize)> = slots
            .iter()
            .zip(counts)
            .flat_map(|(&s, &c)| std::iter::repeat_n(s, c))
            .collect();
        let mut degree = vec![0usize; nv];
        for &(a, b) in &edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        if !connected(nv, &edges) {
            return;
        }
        let mut decs = vec![VertexDecoration::new(0, 0); nv];
        decorate(
            0,
            genus_budget,
            surface.marked,
            &degree,
            &mut decs,
            &mut |decs| {
                if let Ok(g) = MulticurveGraph::new(decs.to_vec(), edges.clone()) {
                    out.push(g);
                }
            },
        );
    });
    out
}

fn distribute_edges(
    slots: &[(usize, usize)],
    i: usize,
    left: usize,
    counts: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if i == slots.len() {
        if left == 0 {
            visit(counts);
        }
        return;
    }
    for c in 0..=left {
        counts[i] = c;
        distribute_edges(slots, i + 1, left - c, counts, visit);
    }
    counts[i] = 0;
}

fn decorate(
    v: usize,
    genus_left: u32,
    marked_left: u32,
    degree: &[usize],
    decs: &mut Vec<VertexDecoration>,
    visit: &mut dyn FnMut(&[VertexDecoration]),
) {
    if v == degree.len() {
        if genus_left == 0 && marked_left == 0 {
            visit(decs);
        }
        return;
    }
    for g in 0..=genus_left {
        for n in 0..=marked_left {
            let d = VertexDecoration::new(g, n);
            if !is_stable(d, degree[v]) {
                continue;
            }
            decs[v] = d;
            decorate(v + 1, genus_left - g, marked_left - n, degree, decs, visit);
        }
    }
}

fn connected(nv: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; nv];
    seen[0] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for &(a, b) in edges {
            if seen[a] != seen[b] {
                seen[a] = true;
                seen[b] = true;
                changed = true;
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Builds the whole orbicomplex and checks its invariants.
pub fn build_complex(surface: Surface) -> Result<QuotientComplex> {
    let d = surface.complexity();
    let per_k: Vec<Vec<SimplexOrbit>> = (1..=d)
        .into_par_iter()
        .map(|k| enumerate_orbits(surface, k))
        .collect::<Result<_>>()?;
    let orbits: Vec<SimplexOrbit> = per_k.into_iter().flatten().collect();
    let mut complex = QuotientComplex {
        schema_version: SCHEMA_VERSION,
        surface,
        orbits,
        face_maps: Vec::new(),
        index: HashMap::new(),
        by_label: HashMap::new(),
    };
    complex.rebuild_index();
    complex.face_maps = complex.compute_face_maps()?;
    complex.validate()?;
    Ok(complex)
}

impl QuotientComplex {
    fn rebuild_index(&mut self) {
        self.index = self
            .orbits
            .iter()
            .enumerate()
            .map(|(i, o)| (o.id.clone(), i))
            .collect();
        self.by_label = self
            .orbits
            .iter()
            .enumerate()
            .map(|(i, o)| (o.label.clone(), i))
            .collect();
    }

    fn compute_face_maps(&self) -> Result<Vec<FaceMap>> {
        let mut maps = Vec::new();
        for orbit in &self.orbits {
            for e in 0..orbit.edge_count() {
                match orbit.graph.delete_curve(e) {
                    Deletion::Empty(_) => {}
                    Deletion::Face { graph, surviving } => {
                        let cf = canonicalize(&graph);
                        let to = self
                            .by_label
                            .get(&cf.label)
                            .map(|&i| self.orbits[i].id.clone())
                            .ok_or_else(|| {
                                Error::InvalidGraph(format!(
                                    "face of {} by curve {e} is missing from the complex",
                                    orbit.id
                                ))
                            })?;
                        let edge_injection = surviving
                            .iter()
                            .enumerate()
                            .map(|(j, &orig)| (orig, cf.edge_map[j]))
                            .collect();
                        maps.push(FaceMap {
                            from: orbit.id.clone(),
                            deleted_edge: e,
                            to,
                            edge_injection,
                        });
                    }
                }
            }
        }
        Ok(maps)
    }

    /// Parses a serialized complex and re-checks every invariant.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut complex: QuotientComplex = serde_json::from_str(text)?;
        if complex.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                complex.schema_version
            )));
        }
        for o in &complex.orbits {
            let cf = canonicalize(&o.graph);
            if cf.label != o.label || cf.label.digest() != o.id.0 || cf.graph != o.graph {
                return Err(Error::Schema(format!("orbit {} is not canonical", o.id)));
            }
        }
        complex.rebuild_index();
        let expected = complex.compute_face_maps()?;
        if expected != complex.face_maps {
            return Err(Error::Schema("face maps do not match the orbits".into()));
        }
        complex.validate()?;
        Ok(complex)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Checks the structural invariants of the orbicomplex.
    pub fn validate(&self) -> Result<()> {
        let d = self.surface.complexity();
        for o in &self.orbits {
            o.graph.validate_for(self.surface)?;
            if o.dim + 1 != o.edge_count() {
                return Err(Error::InvalidGraph(format!("orbit {} has wrong dim", o.id)));
            }
            if o.edge_count() == d && !o.graph.is_pants_decomposition() {
                return Err(Error::InvalidGraph(format!(
                    "maximal orbit {} is not a pants decomposition",
                    o.id
                )));
            }
            if o.automorphisms.is_empty() || !o.automorphisms[0].is_identity() {
                return Err(Error::InvalidGraph(format!(
                    "orbit {} lacks the identity automorphism",
                    o.id
                )));
            }
        }
        if self.max_dim() != Some(self.surface.curve_complex_dim()) {
            return Err(Error::InvalidGraph("top dimension does not match 3g-4+n".into()));
        }
        for o in self.orbits.iter().filter(|o| o.edge_count() < d) {
            let has_coface = self.face_maps.iter().any(|f| f.to == o.id);
            if !has_coface {
                return Err(Error::InvalidGraph(format!(
                    "orbit {} is not a face of any larger orbit",
                    o.id
                )));
            }
        }
        Ok(())
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.orbits.iter().map(|o| o.dim).max()
    }

    pub fn orbit(&self, id: &OrbitId) -> Result<&SimplexOrbit> {
        self.index
            .get(id)
            .map(|&i| &self.orbits[i])
            .ok_or_else(|| Error::UnknownOrbit(id.0.clone()))
    }

    pub fn orbit_index(&self, id: &OrbitId) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Orbit whose canonical label matches `graph`, with the map from the
    /// edges of `graph` to the orbit's canonical edges.
    pub fn locate(&self, graph: &MulticurveGraph) -> Option<(usize, Vec<usize>)> {
        let cf = canonicalize(graph);
        self.by_label.get(&cf.label).map(|&i| (i, cf.edge_map))
    }

    pub fn orbits_of_dim(&self, dim: usize) -> impl Iterator<Item = &SimplexOrbit> {
        self.orbits.iter().filter(move |o| o.dim == dim)
    }

    /// Indices of pants-decomposition orbits.
    pub fn maximal_orbits(&self) -> Vec<usize> {
        let d = self.surface.complexity();
        (0..self.orbits.len())
            .filter(|&i| self.orbits[i].edge_count() == d)
            .collect()
    }

    pub fn faces_of<'a>(&'a self, id: &'a OrbitId) -> impl Iterator<Item = &'a FaceMap> {
        self.face_maps.iter().filter(move |f| &f.from == id)
    }

    /// Every way of realizing orbit `face` as a face of orbit `target`: each
    /// entry maps the curves of `face` injectively to curves of `target`
    /// such that deleting the other curves of `target` yields `face` with
    /// that identification. Closed under the automorphisms of both.
    pub fn embeddings(&self, face: usize, target: usize) -> Vec<Vec<usize>> {
        let f = &self.orbits[face];
        let t = &self.orbits[target];
        let (kf, kt) = (f.edge_count(), t.edge_count());
        if kf > kt {
            return Vec::new();
        }
        let mut out: Vec<Vec<usize>> = Vec::new();
        for subset in subsets_of_size(kt, kf) {
            let Some((restricted, origin)) = t.graph.restrict_to(&subset) else {
                continue;
            };
            for iso in isomorphisms(&restricted, &f.graph) {
                // iso: restricted edge j -> face edge iso[j]
                let mut emb = vec![0; kf];
                for (j, &fe) in iso.iter().enumerate() {
                    emb[fe] = origin[j];
                }
                if !out.contains(&emb) {
                    out.push(emb);
                }
            }
        }
        out.sort();
        out
    }

    /// Human-readable orbit counts per dimension.
    pub fn summary(&self) -> String {
        let mut lines = vec![format!(
            "{}: {} orbits, {} face maps",
            self.surface,
            self.orbits.len(),
            self.face_maps.len()
        )];
        for dim in 0..=self.max_dim().unwrap_or(0) {
            let n = self.orbits_of_dim(dim).count();
            let noun = if n == 1 { "orbit" } else { "orbits" };
            lines.push(format!("dim {dim}: {n} {noun}"));
        }
        lines.join("\n")
    }

    /// Graphviz rendering: one node per orbit, one arrow per face map.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph orbicomplex {\n  rankdir=BT;\n");
        for o in &self.orbits {
            let pieces: Vec<String> = o
                .graph
                .vertices()
                .iter()
                .map(|d| format!("({},{})", d.genus, d.marked))
                .collect();
            let edges: Vec<String> = o
                .graph
                .edges()
                .iter()
                .map(|(a, b)| format!("{a}-{b}"))
                .collect();
            s.push_str(&format!(
                "  \"{}\" [label=\"{}\\ndim {}\\npieces {}\\ncurves {}\\n|Aut| {}\"];\n",
                o.id,
                o.id,
                o.dim,
                pieces.join(" "),
                edges.join(" "),
                o.edge_action().len()
            ));
        }
        for f in &self.face_maps {
            s.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"-{}\"];\n",
                f.from, f.to, f.deleted_edge
            ));
        }
        s.push_str("}\n");
        s
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub(crate) fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surface(g: u32, n: u32) -> Surface {
        Surface::new(g, n).unwrap()
    }

    #[test]
    fn s12_vertices_and_edges() {
        let v = enumerate_orbits(surface(1, 2), 1).unwrap();
        assert_eq!(v.len(), 2);
        let e = enumerate_orbits(surface(1, 2), 2).unwrap();
        assert_eq!(e.len(), 2);
        assert!(e.iter().all(|o| o.graph.is_pants_decomposition()));
    }

    #[test]
    fn s2_pants_types() {
        let t = enumerate_orbits(surface(2, 0), 3).unwrap();
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn s04_single_curve_type() {
        let v = enumerate_orbits(surface(0, 4), 1).unwrap();
        assert_eq!(v.len(), 1);
        let d = v[0].graph.vertices();
        assert!(d.iter().all(|d| d.marked == 2));
    }

    #[test]
    fn curve_count_range() {
        assert!(enumerate_orbits(surface(1, 2), 0).is_err());
        assert!(enumerate_orbits(surface(1, 2), 3).is_err());
    }

    #[test]
    fn s11_is_a_point() {
        let c = build_complex(surface(1, 1)).unwrap();
        assert_eq!(c.orbits.len(), 1);
        assert_eq!(c.orbits[0].dim, 0);
        assert!(c.face_maps.is_empty());
    }

    #[test]
    fn s12_face_maps() {
        let c = build_complex(surface(1, 2)).unwrap();
        assert_eq!(c.face_maps.len(), 4);
        let nn = c
            .orbits_of_dim(1)
            .find(|o| o.edge_action().len() == 2)
            .unwrap();
        let targets: Vec<_> = c.faces_of(&nn.id).map(|f| f.to.clone()).collect();
        assert_eq!(targets.len(), 2);
        assert_eq!(targets[0], targets[1]);
    }

    #[test]
    fn embeddings_of_nonseparating_curve() {
        let c = build_complex(surface(1, 2)).unwrap();
        let nonsep = c
            .orbits
            .iter()
            .position(|o| o.dim == 0 && o.graph.vertex_count() == 1)
            .unwrap();
        let counts: Vec<usize> = c
            .maximal_orbits()
            .into_iter()
            .map(|m| c.embeddings(nonsep, m).len())
            .collect();
        let mut counts = counts;
        counts.sort();
        assert_eq!(counts, vec![1, 2]);
    }

    #[test]
    fn subsets() {
        assert_eq!(subsets_of_size(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets_of_size(2, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn json_round_trip_revalidates() {
        let c = build_complex(surface(1, 2)).unwrap();
        let text = c.to_json().unwrap();
        let back = QuotientComplex::from_json(&text).unwrap();
        assert_eq!(back.orbits.len(), c.orbits.len());
        let tampered = text.replacen("\"schema_version\": 1", "\"schema_version\": 9", 1);
        assert!(QuotientComplex::from_json(&tampered).is_err());
    }
}
