mod common;

use modcone::{build_complex, Surface};

fn library_count(g: u32, n: u32, k: usize) -> usize {
    let c = build_complex(Surface::new(g, n).unwrap()).unwrap();
    c.orbits_of_dim(k - 1).count()
}

#[test]
fn matches_brute_force_on_small_surfaces() {
    for (g, n) in [
        (1, 1),
        (0, 4),
        (1, 2),
        (0, 5),
        (2, 0),
        (1, 3),
        (0, 6),
        (2, 1),
        (1, 4),
        (0, 7),
    ] {
        let d = (3 * g + n - 3) as usize;
        for k in 1..=d {
            let brute = common::brute_force_types(g, n, k).len();
            assert_eq!(library_count(g, n, k), brute, "S_{{{g},{n}}} with {k} curves");
        }
    }
}

#[test]
fn known_counts() {
    // S_2: one nonseparating and one separating curve
    assert_eq!(common::brute_force_types(2, 0, 1).len(), 2);
    // S_{0,4}: a single curve type
    assert_eq!(common::brute_force_types(0, 4, 1).len(), 1);
    // S_2 pants decompositions: theta and dumbbell
    assert_eq!(common::brute_force_types(2, 0, 3).len(), 2);
}

#[test]
fn no_curves_beyond_the_dimension() {
    assert!(common::brute_force_types(1, 1, 2).is_empty());
    assert!(common::brute_force_types(0, 5, 3).is_empty());
}
