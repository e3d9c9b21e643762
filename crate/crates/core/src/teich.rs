//! Fenchel-Nielsen image of the cone and distances in products of
//! hyperbolic half-planes.
//!
//! A cone point with coordinates `x_e` on a pants decomposition is sent to
//! lengths `eps0 * exp(-x_e)` and zero twists. In the coordinates
//! `(twist, 1 / length)` each curve lives in an upper half-plane carrying
//! `ds^2 = (dx^2 + dy^2) / (4 y^2)`, i.e. half the usual distance, and the
//! product carries the sup metric. The additive constants relating these
//! quantities to Teichmuller distance are not numerically known and are
//! never represented as numbers here.

use serde::{Deserialize, Serialize};

use crate::complex::{OrbitId, QuotientComplex};
use crate::cone::{permute, ConePoint};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Collar constant; only its existence is known, any value in (0, 1) works.
    pub epsilon0: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { epsilon0: 0.1 }
    }
}

impl ModelConfig {
    pub fn new(epsilon0: f64) -> Result<Self> {
        if !(epsilon0 > 0.0 && epsilon0 < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon0 must lie in (0, 1), got {epsilon0}"
            )));
        }
        Ok(ModelConfig { epsilon0 })
    }
}

/// Lengths and twists of the curves of a pants decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FnPoint {
    pub orbit: OrbitId,
    pub lengths: Vec<f64>,
    pub twists: Vec<f64>,
}

impl FnPoint {
    pub fn new(orbit: OrbitId, lengths: Vec<f64>, twists: Vec<f64>) -> Result<Self> {
        if lengths.len() != twists.len() {
            return Err(Error::EdgeSetMismatch(format!(
                "{} lengths vs {} twists",
                lengths.len(),
                twists.len()
            )));
        }
        if let Some(l) = lengths.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidPoint(format!("length {l} is not positive")));
        }
        Ok(FnPoint {
            orbit,
            lengths,
            twists,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct H2Point {
    pub x: f64,
    pub y: f64,
}

impl H2Point {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !y.is_finite() || !x.is_finite() {
            return Err(Error::InvalidPoint(format!("({x}, {y}) is not in the upper half-plane")));
        }
        Ok(H2Point { x, y })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductPoint {
    pub orbit: OrbitId,
    pub planes: Vec<H2Point>,
}

/// One way of writing a cone point in the chart of a maximal orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct MaximalExtension {
    pub orbit: usize,
    /// Curves of the point's own orbit -> curves of the maximal orbit.
    pub embedding: Vec<usize>,
    pub coords: Vec<f64>,
}

/// Every extension of `p` by zero coordinates to a pants decomposition,
/// ordered by orbit id, then embedding.
pub fn maximal_extensions(complex: &QuotientComplex, p: &ConePoint) -> Result<Vec<MaximalExtension>> {
    p.check(complex)?;
    let p = p.canonical(complex);
    let mut out = Vec::new();
    for m in complex.maximal_orbits() {
        let size = complex.orbits[m].edge_count();
        match &p.orbit {
            None => out.push(MaximalExtension {
                orbit: m,
                embedding: Vec::new(),
                coords: vec![0.0; size],
            }),
            Some(id) => {
                let o = complex.orbit_index(id).expect("checked point");
                for emb in complex.embeddings(o, m) {
                    let mut coords = vec![0.0; size];
                    for (j, &e) in emb.iter().enumerate() {
                        coords[e] = p.coords[j];
                    }
                    out.push(MaximalExtension {
                        orbit: m,
                        embedding: emb,
                        coords,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// The map on a single orthant: lengths `eps0 * exp(-x)`, twists zero.
pub fn psi_chart(orbit: &OrbitId, coords: &[f64], cfg: &ModelConfig) -> FnPoint {
    FnPoint {
        orbit: orbit.clone(),
        lengths: coords.iter().map(|x| cfg.epsilon0 * (-x).exp()).collect(),
        twists: vec![0.0; coords.len()],
    }
}

/// The map on the cone. Points off the maximal orbits are extended through
/// the least maximal coface (by orbit id) and its first embedding.
pub fn psi(complex: &QuotientComplex, p: &ConePoint, cfg: &ModelConfig) -> Result<FnPoint> {
    let ext = maximal_extensions(complex, p)?;
    let first = ext.first().ok_or_else(|| {
        Error::NoMaximalCoface(p.orbit.as_ref().map_or("apex".into(), |o| o.0.clone()))
    })?;
    Ok(psi_chart(&complex.orbits[first.orbit].id, &first.coords, cfg))
}

pub fn fn_to_product(f: &FnPoint) -> ProductPoint {
    ProductPoint {
        orbit: f.orbit.clone(),
        planes: f
            .lengths
            .iter()
            .zip(&f.twists)
            .map(|(&l, &t)| H2Point { x: t, y: 1.0 / l })
            .collect(),
    }
}

/// Distance for `ds^2 = (dx^2 + dy^2) / (4 y^2)`: half the standard
/// half-plane distance. `arccosh(1 + d)` is evaluated as
/// `ln_1p(d + sqrt(d (d + 2)))`, which stays accurate for `d` near zero.
pub fn h2_distance(a: &H2Point, b: &H2Point) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let delta = (dx * dx + dy * dy) / (2.0 * a.y * b.y);
    0.5 * (delta + (delta * (delta + 2.0)).sqrt()).ln_1p()
}

/// Sup over curves of the half-plane distances, pairing curve `e` of `p`
/// with curve `matching[e]` of `q`.
pub fn product_distance(p: &ProductPoint, q: &ProductPoint, matching: &[usize]) -> Result<f64> {
    if p.planes.len() != q.planes.len() || matching.len() != p.planes.len() {
        return Err(Error::EdgeSetMismatch(format!(
            "{} and {} planes with a matching of size {}",
            p.planes.len(),
            q.planes.len(),
            matching.len()
        )));
    }
    let pairs: Vec<(usize, usize)> = matching.iter().copied().enumerate().collect();
    sup_over(p, q, &pairs)
}

/// The sup of half-plane distances over the shared curves only. This is the
/// model quantity appearing in the lower bound for Teichmuller distance,
/// before subtracting the unknown additive constant.
pub fn partial_sup_lower_bound(
    p: &ProductPoint,
    q: &ProductPoint,
    shared: &[(usize, usize)],
) -> Result<f64> {
    if shared.is_empty() {
        return Err(Error::EmptySharedEdges);
    }
    sup_over(p, q, shared)
}

fn sup_over(p: &ProductPoint, q: &ProductPoint, pairs: &[(usize, usize)]) -> Result<f64> {
    let mut best = 0.0f64;
    for &(a, b) in pairs {
        let (Some(x), Some(y)) = (p.planes.get(a), q.planes.get(b)) else {
            return Err(Error::EdgeSetMismatch(format!("curve pair ({a}, {b}) out of range")));
        };
        best = best.max(h2_distance(x, y));
    }
    Ok(best)
}

/// Relabels a Fenchel-Nielsen point by an edge permutation.
pub fn permute_fn(f: &FnPoint, perm: &[usize]) -> FnPoint {
    FnPoint {
        orbit: f.orbit.clone(),
        lengths: permute(&f.lengths, perm),
        twists: permute(&f.twists, perm),
    }
}
