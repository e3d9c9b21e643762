//! Exact distances in the quotient cone.
//!
//! A path in the quotient is a chain of straight segments, each inside the
//! closed orthant of one pants-decomposition orbit, where consecutive
//! segments meet at a point of a common face. The combinatorial data of
//! such a chain is a gallery: the sequence of maximal orbits plus, for every
//! crossing, the identification of the shared curves (the "developing
//! data", which already absorbs the automorphism twists). For a fixed
//! gallery the shortest chain is a linear program in the crossing points;
//! the distance is the minimum over simple galleries, plus the route
//! through the apex.

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{OrbitId, QuotientComplex};
use crate::cone::ConePoint;
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, Relation};

/// Gallery values closer than this are considered ties.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Crossing from one maximal orbit into another through a common face.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transition {
    /// Orbit indices in the complex.
    pub from: usize,
    pub to: usize,
    /// `(curve of from, curve of to)` for every curve of the shared face.
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transit {
    Face { pairs: Vec<(usize, usize)> },
    Apex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gallery {
    pub orbits: Vec<OrbitId>,
    pub transits: Vec<Transit>,
    /// Chart coordinates of the start point in the first orbit.
    pub start: Vec<f64>,
    /// Chart coordinates of the end point in the last orbit.
    pub end: Vec<f64>,
}

/// A crossing point written in the charts on both sides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub exit: Vec<f64>,
    pub entry: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicResult {
    pub distance: f64,
    pub gallery: Gallery,
    pub breakpoints: Vec<Breakpoint>,
    pub segment_lengths: Vec<f64>,
}

impl GeodesicResult {
    /// Sum of the sup-lengths of the segments, recomputed from the stored
    /// breakpoints.
    pub fn recomputed_length(&self) -> f64 {
        let n = self.gallery.orbits.len();
        (0..n)
            .map(|i| {
                let entry = if i == 0 {
                    &self.gallery.start
                } else {
                    &self.breakpoints[i - 1].entry
                };
                let exit = if i + 1 == n {
                    &self.gallery.end
                } else {
                    &self.breakpoints[i].exit
                };
                segment_length(entry, exit)
            })
            .sum()
    }

    /// Start coordinates of curves that do not survive all crossings to the
    /// last orbit. Along the path each such coordinate must drop to zero.
    pub fn dropped_start_coords(&self) -> Vec<f64> {
        let mut alive: Vec<Option<usize>> = (0..self.gallery.start.len()).map(Some).collect();
        for t in &self.gallery.transits {
            for slot in alive.iter_mut() {
                *slot = match (t, *slot) {
                    (_, None) | (Transit::Apex, _) => None,
                    (Transit::Face { pairs }, Some(e)) => {
                        pairs.iter().find(|(a, _)| *a == e).map(|&(_, b)| b)
                    }
                };
            }
        }
        (0..self.gallery.start.len())
            .filter(|&e| alive[e].is_none() && self.gallery.start[e] > 0.0)
            .map(|e| self.gallery.start[e])
            .collect()
    }

    pub fn visits_each_orbit_once(&self) -> bool {
        let set: HashSet<&OrbitId> = self.gallery.orbits.iter().collect();
        set.len() == self.gallery.orbits.len()
    }
}

fn segment_length(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug)]
pub struct DistanceOptions {
    /// Extra visits to an already visited orbit allowed along a gallery.
    /// Zero gives the simple galleries that suffice for geodesics.
    pub max_revisits: usize,
    pub parallel: bool,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        DistanceOptions {
            max_revisits: 0,
            parallel: true,
        }
    }
}

/// The metric space: a complex plus precomputed face identifications.
pub struct ConeSpace {
    complex: QuotientComplex,
    maximal: Vec<usize>,
    /// `embeddings[orbit][k]`: embeddings of `orbit` into `maximal[k]`.
    embeddings: Vec<Vec<Vec<Vec<usize>>>>,
    /// `transitions[a][b]` between `maximal[a]` and `maximal[b]`.
    transitions: Vec<Vec<Vec<Transition>>>,
}

impl ConeSpace {
    pub fn new(complex: QuotientComplex) -> Self {
        let maximal = complex.maximal_orbits();
        let embeddings: Vec<Vec<Vec<Vec<usize>>>> = (0..complex.orbits.len())
            .into_par_iter()
            .map(|o| maximal.iter().map(|&m| complex.embeddings(o, m)).collect())
            .collect();
        let d = complex.surface.complexity();
        let nm = maximal.len();
        let mut transitions = vec![vec![Vec::new(); nm]; nm];
        for a in 0..nm {
            for b in 0..nm {
                let mut set: Vec<Vec<(usize, usize)>> = Vec::new();
                for (f, face) in complex.orbits.iter().enumerate() {
                    if face.edge_count() >= d {
                        continue;
                    }
                    for ea in &embeddings[f][a] {
                        for eb in &embeddings[f][b] {
                            let mut pairs: Vec<(usize, usize)> =
                                ea.iter().copied().zip(eb.iter().copied()).collect();
                            pairs.sort();
                            if a == b && pairs.iter().all(|(x, y)| x == y) {
                                continue;
                            }
                            if !set.contains(&pairs) {
                                set.push(pairs);
                            }
                        }
                    }
                }
                // a crossing through a smaller face is a special case of one
                // through a larger face with some coordinates zero
                let keep: Vec<Vec<(usize, usize)>> = set
                    .iter()
                    .filter(|p| {
                        !set.iter()
                            .any(|q| q.len() > p.len() && p.iter().all(|x| q.contains(x)))
                    })
                    .cloned()
                    .collect();
                transitions[a][b] = keep
                    .into_iter()
                    .map(|pairs| Transition {
                        from: maximal[a],
                        to: maximal[b],
                        pairs,
                    })
                    .collect();
            }
        }
        ConeSpace {
            complex,
            maximal,
            embeddings,
            transitions,
        }
    }

    pub fn complex(&self) -> &QuotientComplex {
        &self.complex
    }

    /// Transitions between two maximal orbits, by orbit index.
    pub fn transitions_between(&self, from: usize, to: usize) -> &[Transition] {
        let a = self.maximal.iter().position(|&m| m == from);
        let b = self.maximal.iter().position(|&m| m == to);
        match (a, b) {
            (Some(a), Some(b)) => &self.transitions[a][b],
            _ => &[],
        }
    }

    /// Every chart representation `(maximal position, coordinates)` of a
    /// point, deduplicated.
    pub fn chart_reps(&self, p: &ConePoint) -> Vec<(usize, Vec<f64>)> {
        let p = p.canonical(&self.complex);
        let mut out: Vec<(usize, Vec<f64>)> = Vec::new();
        match &p.orbit {
            None => {
                for (k, &m) in self.maximal.iter().enumerate() {
                    out.push((k, vec![0.0; self.complex.orbits[m].edge_count()]));
                }
            }
            Some(id) => {
                let o = self.complex.orbit_index(id).expect("checked point");
                for (k, &m) in self.maximal.iter().enumerate() {
                    for emb in &self.embeddings[o][k] {
                        let mut v = vec![0.0; self.complex.orbits[m].edge_count()];
                        for (j, &e) in emb.iter().enumerate() {
                            v[e] = p.coords[j];
                        }
                        if !out.iter().any(|(kk, w)| *kk == k && *w == v) {
                            out.push((k, v));
                        }
                    }
                }
            }
        }
        out
    }

    fn check_point(&self, p: &ConePoint) -> Result<()> {
        p.check(&self.complex).map_err(|e| match e {
            Error::UnknownOrbit(_) => Error::ComplexMismatch,
            other => other,
        })
    }

    pub fn distance(&self, p: &ConePoint, q: &ConePoint) -> Result<GeodesicResult> {
        self.distance_with(p, q, DistanceOptions::default())
    }

    pub fn distance_with(
        &self,
        p: &ConePoint,
        q: &ConePoint,
        opts: DistanceOptions,
    ) -> Result<GeodesicResult> {
        self.check_point(p)?;
        self.check_point(q)?;
        let p = p.canonical(&self.complex);
        let q = q.canonical(&self.complex);
        let starts = self.chart_reps(&p);
        let ends = self.chart_reps(&q);
        let mut targets: Vec<Vec<Vec<f64>>> = vec![Vec::new(); self.maximal.len()];
        for (k, v) in ends {
            targets[k].push(v);
        }

        let mut apex: Option<Candidate> = None;
        let mut initial = f64::INFINITY;
        if !p.is_apex() && !q.is_apex() {
            let value = 0.5 * p.max_coord() + 0.5 * q.max_coord();
            let (ks, s) = starts[0].clone();
            let (ke, e) = targets
                .iter()
                .enumerate()
                .find_map(|(k, v)| v.first().map(|v| (k, v.clone())))
                .expect("every point has a chart");
            initial = value;
            apex = Some(Candidate {
                value,
                orbits: vec![self.maximal[ks], self.maximal[ke]],
                transits: vec![None],
                start: s,
                end: e,
                crossings: Vec::new(),
            });
        }

        let search = Search {
            space: self,
            targets,
            best: AtomicU64::new(initial.to_bits()),
            max_revisits: opts.max_revisits,
        };
        let run = |(k, s): &(usize, Vec<f64>)| -> Result<Vec<Candidate>> {
            let mut found = Vec::new();
            let mut visits = vec![0usize; self.maximal.len()];
            visits[*k] = 1;
            let mut path = Path {
                positions: vec![*k],
                transits: Vec::new(),
                start: s.clone(),
                revisits: 0,
            };
            search.explore(&mut path, &mut visits, &mut found)?;
            Ok(found)
        };
        let per_root: Vec<Vec<Candidate>> = if opts.parallel {
            starts.par_iter().map(run).collect::<Result<_>>()?
        } else {
            starts.iter().map(run).collect::<Result<_>>()?
        };

        let mut all: Vec<Candidate> = per_root.into_iter().flatten().collect();
        all.extend(apex);
        let min = all
            .iter()
            .map(|c| c.value)
            .fold(f64::INFINITY, f64::min);
        let chosen = all
            .into_iter()
            .filter(|c| c.value <= min + TIE_TOLERANCE)
            .min_by(|a, b| self.tie_key(a).cmp(&self.tie_key(b)))
            .expect("the search always finds a route");
        Ok(self.finish(chosen))
    }

    fn tie_key(&self, c: &Candidate) -> TieKey {
        let orbits: Vec<OrbitId> = c
            .orbits
            .iter()
            .map(|&o| self.complex.orbits[o].id.clone())
            .collect();
        let transits: Vec<(bool, Vec<(usize, usize)>)> = c
            .transits
            .iter()
            .map(|t| match t {
                None => (true, Vec::new()),
                Some(t) => (false, t.pairs.clone()),
            })
            .collect();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<u64>>();
        (orbits, transits, bits(&c.start), bits(&c.end))
    }

    fn finish(&self, c: Candidate) -> GeodesicResult {
        let n = c.orbits.len();
        let mut breakpoints = Vec::with_capacity(n.saturating_sub(1));
        for (i, t) in c.transits.iter().enumerate() {
            let mut exit = vec![0.0; self.complex.orbits[c.orbits[i]].edge_count()];
            let mut entry = vec![0.0; self.complex.orbits[c.orbits[i + 1]].edge_count()];
            if let Some(t) = t {
                for (k, &(a, b)) in t.pairs.iter().enumerate() {
                    let w = c.crossings[i][k];
                    exit[a] = w;
                    entry[b] = w;
                }
            }
            breakpoints.push(Breakpoint { exit, entry });
        }
        let gallery = Gallery {
            orbits: c
                .orbits
                .iter()
                .map(|&o| self.complex.orbits[o].id.clone())
                .collect(),
            transits: c
                .transits
                .iter()
                .map(|t| match t {
                    None => Transit::Apex,
                    Some(t) => Transit::Face {
                        pairs: t.pairs.clone(),
                    },
                })
                .collect(),
            start: c.start,
            end: c.end,
        };
        let mut result = GeodesicResult {
            distance: 0.0,
            gallery,
            breakpoints,
            segment_lengths: Vec::new(),
        };
        result.segment_lengths = (0..n)
            .map(|i| {
                let entry = if i == 0 {
                    &result.gallery.start
                } else {
                    &result.breakpoints[i - 1].entry
                };
                let exit = if i + 1 == n {
                    &result.gallery.end
                } else {
                    &result.breakpoints[i].exit
                };
                segment_length(entry, exit)
            })
            .collect();
        result.distance = result.segment_lengths.iter().sum();
        result
    }
}

type TieKey = (Vec<OrbitId>, Vec<(bool, Vec<(usize, usize)>)>, Vec<u64>, Vec<u64>);

#[derive(Clone, Debug)]
struct Candidate {
    value: f64,
    /// Orbit indices.
    orbits: Vec<usize>,
    /// `None` is a crossing through the apex.
    transits: Vec<Option<Transition>>,
    start: Vec<f64>,
    end: Vec<f64>,
    /// Crossing coordinates, one vector per transit (ordered as its pairs).
    crossings: Vec<Vec<f64>>,
}

struct Path<'a> {
    /// Positions in `ConeSpace::maximal`.
    positions: Vec<usize>,
    transits: Vec<&'a Transition>,
    start: Vec<f64>,
    revisits: usize,
}

struct Search<'a> {
    space: &'a ConeSpace,
    targets: Vec<Vec<Vec<f64>>>,
    best: AtomicU64,
    max_revisits: usize,
}

impl<'a> Search<'a> {
    fn best(&self) -> f64 {
        f64::from_bits(self.best.load(Ordering::Relaxed))
    }

    fn offer(&self, value: f64) {
        // nonnegative floats order like their bit patterns
        self.best.fetch_min(value.max(0.0).to_bits(), Ordering::Relaxed);
    }

    fn explore(
        &self,
        path: &mut Path<'a>,
        visits: &mut Vec<usize>,
        found: &mut Vec<Candidate>,
    ) -> Result<()> {
        let here = *path.positions.last().unwrap();
        let orbits: Vec<usize> = path
            .positions
            .iter()
            .map(|&k| self.space.maximal[k])
            .collect();

        for end in &self.targets[here] {
            let (value, crossings) =
                solve_gallery(&self.space.complex, &path.start, &orbits, &path.transits, Some(end))?;
            if value <= self.best() + TIE_TOLERANCE {
                self.offer(value);
                found.push(Candidate {
                    value,
                    orbits: orbits.clone(),
                    transits: path.transits.iter().map(|t| Some((*t).clone())).collect(),
                    start: path.start.clone(),
                    end: end.clone(),
                    crossings,
                });
            }
        }
        let bound = self.best();
        found.retain(|c| c.value <= bound + TIE_TOLERANCE);

        for next in 0..self.space.maximal.len() {
            let revisit = visits[next] > 0;
            if revisit && path.revisits >= self.max_revisits {
                continue;
            }
            for t in &self.space.transitions[here][next] {
                path.positions.push(next);
                path.transits.push(t);
                let mut prefix_orbits = orbits.clone();
                prefix_orbits.push(self.space.maximal[next]);
                let (lower, _) = solve_gallery(
                    &self.space.complex,
                    &path.start,
                    &prefix_orbits,
                    &path.transits,
                    None,
                )?;
                if lower <= self.best() + TIE_TOLERANCE {
                    visits[next] += 1;
                    path.revisits += revisit as usize;
                    self.explore(path, visits, found)?;
                    path.revisits -= revisit as usize;
                    visits[next] -= 1;
                }
                path.positions.pop();
                path.transits.pop();
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Term {
    Const(f64),
    Var(usize),
}

/// Builds the linear program of a gallery: minimize the sum of segment
/// lengths `t_i` with `t_i >= 1/2 |entry_e - exit_e|` for every curve of the
/// segment's orbit. Crossing coordinates are the variables; curves off the
/// shared face are zero at a crossing. With `end == None` the last orbit is
/// only entered, which gives a lower bound for every extension.
pub fn gallery_program(
    complex: &QuotientComplex,
    start: &[f64],
    orbits: &[usize],
    transits: &[&Transition],
    end: Option<&[f64]>,
) -> (LinearProgram, Vec<usize>) {
    debug_assert_eq!(transits.len() + 1, orbits.len());
    let mut offsets = Vec::with_capacity(transits.len());
    let mut nvars = 0;
    for t in transits {
        offsets.push(nvars);
        nvars += t.pairs.len();
    }
    let segments = if end.is_some() {
        orbits.len()
    } else {
        orbits.len() - 1
    };
    let t_base = nvars;
    nvars += segments;

    let mut lp = LinearProgram::new(nvars);
    for i in 0..segments {
        lp.objective[t_base + i] = 1.0;
        let m = complex.orbits[orbits[i]].edge_count();
        let mut entry = vec![Term::Const(0.0); m];
        let mut exit = vec![Term::Const(0.0); m];
        if i == 0 {
            for (e, &c) in start.iter().enumerate() {
                entry[e] = Term::Const(c);
            }
        } else {
            for (k, &(_, b)) in transits[i - 1].pairs.iter().enumerate() {
                entry[b] = Term::Var(offsets[i - 1] + k);
            }
        }
        if i + 1 == orbits.len() {
            for (e, &c) in end.expect("last segment needs an end").iter().enumerate() {
                exit[e] = Term::Const(c);
            }
        } else {
            for (k, &(a, _)) in transits[i].pairs.iter().enumerate() {
                exit[a] = Term::Var(offsets[i] + k);
            }
        }
        for e in 0..m {
            for sign in [1.0, -1.0] {
                // t_i - sign/2 (entry - exit) >= 0
                let mut terms = vec![(t_base + i, 1.0)];
                let mut rhs = 0.0;
                match entry[e] {
                    Term::Const(c) => rhs += sign * 0.5 * c,
                    Term::Var(v) => terms.push((v, -sign * 0.5)),
                }
                match exit[e] {
                    Term::Const(c) => rhs -= sign * 0.5 * c,
                    Term::Var(v) => terms.push((v, sign * 0.5)),
                }
                lp.add(&terms, Relation::Ge, rhs);
            }
        }
    }
    (lp, offsets)
}

fn solve_gallery(
    complex: &QuotientComplex,
    start: &[f64],
    orbits: &[usize],
    transits: &[&Transition],
    end: Option<&[f64]>,
) -> Result<(f64, Vec<Vec<f64>>)> {
    let (lp, offsets) = gallery_program(complex, start, orbits, transits, end);
    let sol = solve_lp(&lp)?;
    let crossings = transits
        .iter()
        .zip(&offsets)
        .map(|(t, &o)| sol.x[o..o + t.pairs.len()].to_vec())
        .collect();
    Ok((sol.value, crossings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use crate::topology::Surface;

    fn s12() -> ConeSpace {
        ConeSpace::new(build_complex(Surface::new(1, 2).unwrap()).unwrap())
    }

    fn orbit_where(space: &ConeSpace, dim: usize, sym: usize) -> OrbitId {
        space
            .complex()
            .orbits_of_dim(dim)
            .find(|o| o.edge_action().len() == sym)
            .unwrap()
            .id
            .clone()
    }

    #[test]
    fn apex_to_point() {
        let space = s12();
        let id = orbit_where(&space, 1, 2);
        let q = ConePoint::new(space.complex(), &id, vec![2.0, 6.0]).unwrap();
        let r = space.distance(&ConePoint::apex(), &q).unwrap();
        assert!((r.distance - 3.0).abs() < 1e-12);
        let r = space.distance(&ConePoint::apex(), &ConePoint::apex()).unwrap();
        assert_eq!(r.distance, 0.0);
    }

    #[test]
    fn swapped_points_coincide() {
        let space = s12();
        let id = orbit_where(&space, 1, 2);
        let p = ConePoint::new(space.complex(), &id, vec![1.0, 3.0]).unwrap();
        let q = ConePoint::new(space.complex(), &id, vec![3.0, 1.0]).unwrap();
        assert!(space.distance(&p, &q).unwrap().distance.abs() < 1e-12);
    }

    #[test]
    fn separating_to_nonseparating_pair() {
        // sep curve at 4 against (2, 2) on the nonsep/nonsep edge: any path
        // pays 2 to kill the separating coordinate and 1 to reach (2, 2) from
        // the shared axis, total 3.
        let space = s12();
        let c = space.complex();
        let mixed = orbit_where(&space, 1, 1);
        let mixed_orbit = c.orbit(&mixed).unwrap();
        // the separating curve is the bridge
        let sep = (0..2)
            .find(|&e| {
                let (a, b) = mixed_orbit.graph.edges()[e];
                a != b
            })
            .unwrap();
        let mut coords = vec![0.0; 2];
        coords[sep] = 4.0;
        let p = ConePoint::new(c, &mixed, coords).unwrap();
        let nn = orbit_where(&space, 1, 2);
        let q = ConePoint::new(c, &nn, vec![2.0, 2.0]).unwrap();
        let r = space.distance(&p, &q).unwrap();
        assert!((r.distance - 3.0).abs() < 1e-9, "{}", r.distance);
        assert!((r.recomputed_length() - r.distance).abs() < 1e-12);
    }

    #[test]
    fn unknown_orbit_is_complex_mismatch() {
        let space = s12();
        let p = ConePoint {
            orbit: Some(OrbitId("000000000000".into())),
            coords: vec![1.0],
        };
        assert!(matches!(
            space.distance(&p, &ConePoint::apex()),
            Err(Error::ComplexMismatch)
        ));
    }

    #[test]
    fn transitions_of_s12() {
        let space = s12();
        let c = space.complex();
        let mixed = c.orbit_index(&orbit_where(&space, 1, 1)).unwrap();
        let nn = c.orbit_index(&orbit_where(&space, 1, 2)).unwrap();
        // the nonseparating curve of the mixed edge meets either curve of nn
        assert_eq!(space.transitions_between(mixed, nn).len(), 2);
        assert_eq!(space.transitions_between(nn, mixed).len(), 2);
        // nn to itself: swapping the shared curve, not the identity
        assert_eq!(space.transitions_between(nn, nn).len(), 2);
        assert_eq!(space.transitions_between(mixed, mixed).len(), 0);
    }

    #[test]
    fn single_segment_program_is_orthant_distance() {
        let space = s12();
        let m = space.complex().maximal_orbits()[0];
        let (value, _) =
            solve_gallery(space.complex(), &[0.0, 0.0], &[m], &[], Some(&[2.0, 6.0])).unwrap();
        assert!((value - 3.0).abs() < 1e-12);
    }
}
