//! The closed-form half-plane distance against arc length integrated along
//! explicit geodesics.

use modcone::teich::{h2_distance, H2Point};

/// Simpson's rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn semicircle_arc_length() {
    // geodesic through (0, 1) and (1, 1): circle centred at (1/2, 0)
    let r = 1.25f64.sqrt();
    let t0 = (0.5 / r).acos();
    let t1 = (-0.5 / r).acos();
    // for the metric |dz| / (2 y), arc length on the circle is dθ / (2 sin θ)
    let integral = simpson(|t| 0.5 / t.sin(), t0, t1, 20_000);
    let d = h2_distance(&H2Point::new(0.0, 1.0).unwrap(), &H2Point::new(1.0, 1.0).unwrap());
    assert!((d - integral).abs() < 1e-9, "{d} vs {integral}");
    assert!((d - 0.5 * 1.5f64.acosh()).abs() < 1e-12);
}

#[test]
fn vertical_arc_length() {
    let integral = simpson(|y| 0.5 / y, 1.0, 3.0f64.exp(), 20_000);
    let d = h2_distance(&H2Point::new(2.0, 1.0).unwrap(), &H2Point::new(2.0, 3.0f64.exp()).unwrap());
    assert!((d - 1.5).abs() < 1e-12);
    assert!((d - integral).abs() < 1e-9);
}
