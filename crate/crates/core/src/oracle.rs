//! Brute-force distance oracle on a grid.
//!
//! Every maximal orthant is sampled on the grid `mesh * Z^d` inside a box.
//! Grid points are identified whenever they represent the same point of the
//! quotient (same support type, same coordinates up to automorphism), and
//! neighbouring points of one orthant, diagonals included, are joined by an
//! edge of length `mesh / 2`. With diagonal moves the graph distance inside
//! one orthant is exactly the half sup metric on grid points, so the graph
//! distance is an upper bound that converges to the true distance as the
//! mesh shrinks. This shares no code with the gallery search.

use std::collections::{HashMap, VecDeque};

use crate::complex::QuotientComplex;
use crate::cone::ConePoint;
use crate::error::{Error, Result};

type NodeKey = (Option<usize>, Vec<u32>);
/// Support orbit of a face and its curve map, `None` for the apex.
type Support = Option<(usize, Vec<(usize, usize)>)>;

pub struct GridOracle<'a> {
    complex: &'a QuotientComplex,
    mesh: f64,
    steps: u32,
    bound: f64,
    maximal: Vec<usize>,
    nodes: HashMap<NodeKey, usize>,
    adjacency: Vec<Vec<usize>>,
    /// `(maximal orbit, support mask)` -> support orbit and curve map.
    support_cache: HashMap<(usize, u64), Support>,
}

impl<'a> GridOracle<'a> {
    /// Grid over `[0, bound]` in every coordinate of every maximal orthant.
    pub fn new(complex: &'a QuotientComplex, mesh: f64, bound: f64) -> Result<Self> {
        if !(mesh > 0.0) || !mesh.is_finite() {
            return Err(Error::InvalidMesh(mesh));
        }
        if !(bound >= 0.0) || !bound.is_finite() {
            return Err(Error::InvalidConfig(format!("bad oracle bound {bound}")));
        }
        let steps = (bound / mesh - 1e-9).ceil().max(0.0) as u32;
        let mut oracle = GridOracle {
            complex,
            mesh,
            steps,
            bound,
            maximal: complex.maximal_orbits(),
            nodes: HashMap::new(),
            adjacency: Vec::new(),
            support_cache: HashMap::new(),
        };
        oracle.build();
        Ok(oracle)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    fn build(&mut self) {
        let maximal = self.maximal.clone();
        for m in maximal {
            let dim = self.complex.orbits[m].edge_count();
            let side = self.steps as usize + 1;
            let total = side.pow(dim as u32);
            let mut ids = Vec::with_capacity(total);
            let mut v = vec![0u32; dim];
            for flat in 0..total {
                let mut r = flat;
                for c in v.iter_mut() {
                    *c = (r % side) as u32;
                    r /= side;
                }
                ids.push(self.node_for(m, &v));
            }
            // king moves; each unordered pair once via the positive half of offsets
            let offsets: Vec<Vec<i64>> = (0..3usize.pow(dim as u32))
                .map(|mut r| {
                    (0..dim)
                        .map(|_| {
                            let d = (r % 3) as i64 - 1;
                            r /= 3;
                            d
                        })
                        .collect()
                })
                .filter(|o: &Vec<i64>| o.iter().rev().find(|&&d| d != 0) == Some(&1))
                .collect();
            for flat in 0..total {
                let mut coords = vec![0i64; dim];
                let mut r = flat;
                for c in coords.iter_mut() {
                    *c = (r % side) as i64;
                    r /= side;
                }
                for off in &offsets {
                    let mut nflat = 0usize;
                    let mut mul = 1usize;
                    let mut ok = true;
                    for k in 0..dim {
                        let c = coords[k] + off[k];
                        if c < 0 || c > self.steps as i64 {
                            ok = false;
                            break;
                        }
                        nflat += c as usize * mul;
                        mul *= side;
                    }
                    if ok {
                        let (a, b) = (ids[flat], ids[nflat]);
                        if a != b {
                            self.adjacency[a].push(b);
                            self.adjacency[b].push(a);
                        }
                    }
                }
            }
        }
    }

    fn support(&mut self, m: usize, mask: u64) -> Support {
        if let Some(hit) = self.support_cache.get(&(m, mask)) {
            return hit.clone();
        }
        let keep: Vec<usize> = (0..64).filter(|&e| mask & (1 << e) != 0).collect();
        let value = self.complex.orbits[m]
            .graph
            .restrict_to(&keep)
            .map(|(face, origin)| {
                let (idx, edge_map) = self.complex.locate(&face).expect("face in complex");
                let pairs = origin
                    .iter()
                    .enumerate()
                    .map(|(j, &o)| (o, edge_map[j]))
                    .collect();
                (idx, pairs)
            });
        self.support_cache.insert((m, mask), value.clone());
        value
    }

    fn key(&mut self, m: usize, v: &[u32]) -> NodeKey {
        let mask = v
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .fold(0u64, |acc, (e, _)| acc | (1 << e));
        match self.support(m, mask) {
            None => (None, Vec::new()),
            Some((orbit, pairs)) => {
                let o = &self.complex.orbits[orbit];
                let mut coords = vec![0u32; o.edge_count()];
                for &(from, to) in &pairs {
                    coords[to] = v[from];
                }
                let best = o
                    .edge_action()
                    .iter()
                    .map(|perm| {
                        let mut img = vec![0u32; coords.len()];
                        for (e, &c) in coords.iter().enumerate() {
                            img[perm[e]] = c;
                        }
                        img
                    })
                    .min()
                    .unwrap_or(coords);
                (Some(orbit), best)
            }
        }
    }

    fn node_for(&mut self, m: usize, v: &[u32]) -> usize {
        let key = self.key(m, v);
        if let Some(&id) = self.nodes.get(&key) {
            return id;
        }
        let id = self.adjacency.len();
        self.adjacency.push(Vec::new());
        self.nodes.insert(key, id);
        id
    }

    /// Grid node nearest to `p` and the sup-metric cost of moving there.
    fn snap(&mut self, p: &ConePoint) -> Result<(usize, f64)> {
        p.check(self.complex)?;
        let p = p.canonical(self.complex);
        let needed = p.max_coord();
        if needed > self.bound + 1e-12 {
            return Err(Error::BoxTooSmall {
                bound: self.bound,
                needed,
            });
        }
        let (m, chart) = match &p.orbit {
            None => {
                let m = self.maximal[0];
                (m, vec![0.0; self.complex.orbits[m].edge_count()])
            }
            Some(id) => {
                let o = self.complex.orbit_index(id).expect("checked point");
                self.maximal
                    .iter()
                    .find_map(|&m| {
                        self.complex.embeddings(o, m).first().map(|emb| {
                            let mut v = vec![0.0; self.complex.orbits[m].edge_count()];
                            for (j, &e) in emb.iter().enumerate() {
                                v[e] = p.coords[j];
                            }
                            (m, v)
                        })
                    })
                    .ok_or_else(|| Error::NoMaximalCoface(id.0.clone()))?
            }
        };
        let grid: Vec<u32> = chart
            .iter()
            .map(|&c| ((c / self.mesh).round() as u32).min(self.steps))
            .collect();
        let cost = 0.5
            * chart
                .iter()
                .zip(&grid)
                .map(|(&c, &g)| (c - g as f64 * self.mesh).abs())
                .fold(0.0, f64::max);
        let key = self.key(m, &grid);
        let node = *self.nodes.get(&key).expect("grid point present");
        Ok((node, cost))
    }

    /// Upper bound for the distance between `p` and `q`.
    pub fn distance(&mut self, p: &ConePoint, q: &ConePoint) -> Result<f64> {
        let (a, ca) = self.snap(p)?;
        let (b, cb) = self.snap(q)?;
        let hops = self.hops(a, b).expect("the grid is connected through the apex");
        Ok(ca + cb + 0.5 * self.mesh * hops as f64)
    }

    fn hops(&self, a: usize, b: usize) -> Option<usize> {
        let mut dist = vec![usize::MAX; self.adjacency.len()];
        dist[a] = 0;
        let mut queue = VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            if v == b {
                return Some(dist[v]);
            }
            for &w in &self.adjacency[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

/// One-shot oracle with the box set to the largest coordinate of `p`, `q`.
pub fn brute_force_distance(
    complex: &QuotientComplex,
    p: &ConePoint,
    q: &ConePoint,
    mesh: f64,
) -> Result<f64> {
    let bound = p.max_coord().max(q.max_coord());
    GridOracle::new(complex, mesh, bound)?.distance(p, q)
}
