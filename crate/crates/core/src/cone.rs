//! Points of the cone over the orbicomplex and the sup metric on orthants.

use serde::{Deserialize, Serialize};

use crate::complex::{OrbitId, QuotientComplex, SimplexOrbit};
use crate::error::{Error, Result};

/// A point of the cone: an orbit plus one nonnegative coordinate per curve
/// of its canonical graph. `orbit == None` is the apex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub orbit: Option<OrbitId>,
    pub coords: Vec<f64>,
}

impl ConePoint {
    pub fn apex() -> Self {
        ConePoint {
            orbit: None,
            coords: Vec::new(),
        }
    }

    /// Checks the point against `complex` and returns its canonical form.
    pub fn new(complex: &QuotientComplex, orbit: &OrbitId, coords: Vec<f64>) -> Result<Self> {
        let p = ConePoint {
            orbit: Some(orbit.clone()),
            coords,
        };
        p.check(complex)?;
        Ok(p.canonical(complex))
    }

    pub fn is_apex(&self) -> bool {
        self.orbit.is_none() || self.coords.iter().all(|&c| c == 0.0)
    }

    pub fn check(&self, complex: &QuotientComplex) -> Result<()> {
        match &self.orbit {
            None => {
                if !self.coords.is_empty() {
                    return Err(Error::InvalidPoint("apex carries no coordinates".into()));
                }
            }
            Some(id) => {
                let o = complex.orbit(id)?;
                if self.coords.len() != o.edge_count() {
                    return Err(Error::InvalidPoint(format!(
                        "orbit {id} has {} curves but {} coordinates were given",
                        o.edge_count(),
                        self.coords.len()
                    )));
                }
                if let Some(c) = self.coords.iter().find(|c| !c.is_finite() || **c < 0.0) {
                    return Err(Error::InvalidPoint(format!(
                        "coordinate {c} is not a nonnegative real"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Moves the point to the face spanned by its positive coordinates and
    /// picks the lexicographically least coordinate vector among the
    /// automorphic images.
    pub fn canonical(&self, complex: &QuotientComplex) -> ConePoint {
        let Some(id) = &self.orbit else {
            return ConePoint::apex();
        };
        let orbit = complex.orbit(id).expect("checked point");
        let support: Vec<usize> = (0..self.coords.len())
            .filter(|&e| self.coords[e] > 0.0)
            .collect();
        let Some((face, origin)) = orbit.graph.restrict_to(&support) else {
            return ConePoint::apex();
        };
        let (idx, edge_map) = complex.locate(&face).expect("faces are in the complex");
        let target = &complex.orbits[idx];
        let mut coords = vec![0.0; target.edge_count()];
        for (j, &orig) in origin.iter().enumerate() {
            coords[edge_map[j]] = self.coords[orig];
        }
        ConePoint {
            orbit: Some(target.id.clone()),
            coords: least_image(target, &coords),
        }
    }

    /// Largest coordinate; twice the distance to the apex.
    pub fn max_coord(&self) -> f64 {
        self.coords.iter().copied().fold(0.0, f64::max)
    }
}

/// Lexicographically least vector in the automorphism orbit of `coords`.
pub fn least_image(orbit: &SimplexOrbit, coords: &[f64]) -> Vec<f64> {
    let mut best = coords.to_vec();
    for perm in orbit.edge_action() {
        let img = permute(coords, &perm);
        if lex_less(&img, &best) {
            best = img;
        }
    }
    best
}

/// `out[perm[e]] = coords[e]`.
pub fn permute(coords: &[f64], perm: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; coords.len()];
    for (e, &c) in coords.iter().enumerate() {
        out[perm[e]] = c;
    }
    out
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Half the sup-norm distance between two coordinate vectors of one orthant.
pub fn orthant_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::EdgeSetMismatch(format!(
            "{} vs {} coordinates",
            x.len(),
            y.len()
        )));
    }
    Ok(0.5 * x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Orthant distance minimized over the orbit's automorphisms. An upper
/// bound for the quotient distance.
pub fn symmetric_orthant_distance(orbit: &SimplexOrbit, x: &[f64], y: &[f64]) -> Result<f64> {
    let mut best = f64::INFINITY;
    for perm in orbit.edge_action() {
        best = best.min(orthant_distance(x, &permute(y, &perm))?);
    }
    Ok(best)
}

/// Dilation by `lambda > 0`.
pub fn scale(p: &ConePoint, lambda: f64) -> Result<ConePoint> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NonPositiveScale(lambda));
    }
    Ok(ConePoint {
        orbit: p.orbit.clone(),
        coords: p.coords.iter().map(|c| c * lambda).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use crate::topology::Surface;

    #[test]
    fn orthant_examples() {
        assert_eq!(orthant_distance(&[0.0, 0.0], &[2.0, 6.0]).unwrap(), 3.0);
        assert_eq!(orthant_distance(&[1.5, 2.0], &[1.5, 2.0]).unwrap(), 0.0);
        assert_eq!(orthant_distance(&[5.0, 1.0], &[1.0, 5.0]).unwrap(), 2.0);
        assert!(orthant_distance(&[1.0], &[1.0, 2.0]).is_err());
    }

    fn swap_orbit() -> SimplexOrbit {
        let c = build_complex(Surface::new(1, 2).unwrap()).unwrap();
        let o = c
            .orbits_of_dim(1)
            .find(|o| o.edge_action().len() == 2)
            .unwrap()
            .clone();
        o
    }

    #[test]
    fn symmetric_examples() {
        let o = swap_orbit();
        assert_eq!(symmetric_orthant_distance(&o, &[1.0, 3.0], &[3.0, 1.0]).unwrap(), 0.0);
        assert_eq!(symmetric_orthant_distance(&o, &[1.0, 3.0], &[1.0, 3.0]).unwrap(), 0.0);
        // direct: 1/2 max(4, 2) = 2; swapped y = (2, 4): 1/2 max(2, 0) = 1
        assert_eq!(symmetric_orthant_distance(&o, &[0.0, 4.0], &[4.0, 2.0]).unwrap(), 1.0);
    }

    #[test]
    fn scale_rules() {
        let p = ConePoint {
            orbit: Some(OrbitId("x".into())),
            coords: vec![1.0, 2.0],
        };
        assert_eq!(scale(&p, 1.0).unwrap(), p);
        assert_eq!(scale(&p, 2.0).unwrap().coords, vec![2.0, 4.0]);
        assert_eq!(scale(&ConePoint::apex(), 3.0).unwrap(), ConePoint::apex());
        assert!(scale(&p, 0.0).is_err());
        assert!(scale(&p, -1.0).is_err());
    }

    #[test]
    fn canonical_drops_zero_coordinates() {
        let c = build_complex(Surface::new(1, 2).unwrap()).unwrap();
        let o = swap_orbit();
        let p = ConePoint::new(&c, &o.id, vec![0.0, 2.5]).unwrap();
        let target = c.orbit(p.orbit.as_ref().unwrap()).unwrap();
        assert_eq!(target.dim, 0);
        assert_eq!(p.coords, vec![2.5]);
        let apex = ConePoint::new(&c, &o.id, vec![0.0, 0.0]).unwrap();
        assert!(apex.orbit.is_none());
        let q = ConePoint::new(&c, &o.id, vec![3.0, 1.0]).unwrap();
        assert_eq!(q.coords, vec![1.0, 3.0]);
    }

    #[test]
    fn rejects_bad_points() {
        let c = build_complex(Surface::new(1, 2).unwrap()).unwrap();
        let o = swap_orbit();
        assert!(ConePoint::new(&c, &o.id, vec![1.0]).is_err());
        assert!(ConePoint::new(&c, &o.id, vec![1.0, -1.0]).is_err());
        assert!(ConePoint::new(&c, &o.id, vec![1.0, f64::NAN]).is_err());
        assert!(ConePoint::new(&c, &OrbitId("nope".into()), vec![1.0]).is_err());
    }
}
