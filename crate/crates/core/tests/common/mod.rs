//! Brute-force enumeration of multicurve types, written without canonical
//! forms: every decorated multigraph is generated and duplicates are
//! removed by trying every vertex bijection against every kept graph.

#![allow(dead_code)]

/// A decorated multigraph: `(genus, marked)` per vertex, sorted edge list.
#[derive(Clone, Debug)]
pub struct RawType {
    pub decorations: Vec<(u32, u32)>,
    pub edges: Vec<(usize, usize)>,
}

fn connected(v: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; v];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &(a, b) in edges {
            for (s, t) in [(a, b), (b, a)] {
                if s == x && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// All multisets of size `k` drawn from `0..m`, as nondecreasing sequences.
fn multisets(m: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in multisets(m, k - 1) {
        let start = rest.last().copied().unwrap_or(0);
        for x in start..m {
            let mut r = rest.clone();
            r.push(x);
            out.push(r);
        }
    }
    out
}

/// Ways to write `total` as an ordered sum of `parts` nonnegative integers.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn isomorphic(a: &RawType, b: &RawType) -> bool {
    let v = a.decorations.len();
    if v != b.decorations.len() || a.edges.len() != b.edges.len() {
        return false;
    }
    let mut perm: Vec<usize> = (0..v).collect();
    let mut target = b.edges.clone();
    target.sort();
    loop {
        if (0..v).all(|i| a.decorations[i] == b.decorations[perm[i]]) {
            let mut img: Vec<(usize, usize)> = a
                .edges
                .iter()
                .map(|&(x, y)| {
                    let (p, q) = (perm[x], perm[y]);
                    (p.min(q), p.max(q))
                })
                .collect();
            img.sort();
            if img == target {
                return true;
            }
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Isomorphism classes of `k`-curve multicurve types on `S_{g,n}`.
pub fn brute_force_types(g: u32, n: u32, k: usize) -> Vec<RawType> {
    let max_vertices = (2 * g as i64 - 2 + n as i64).max(1) as usize;
    let mut kept: Vec<RawType> = Vec::new();
    for v in 1..=max_vertices.min(k + 1) {
        // Betti number of a connected graph with v vertices and k edges
        let betti = k as i64 - v as i64 + 1;
        if betti < 0 || betti > g as i64 {
            continue;
        }
        let slots: Vec<(usize, usize)> =
            (0..v).flat_map(|a| (a..v).map(move |b| (a, b))).collect();
        for choice in multisets(slots.len(), k) {
            let edges: Vec<(usize, usize)> = choice.iter().map(|&s| slots[s]).collect();
            if !connected(v, &edges) {
                continue;
            }
            let mut degree = vec![0i64; v];
            for &(a, b) in &edges {
                degree[a] += 1;
                degree[b] += 1;
            }
            for genera in compositions(g - betti as u32, v) {
                for marks in compositions(n, v) {
                    let stable = (0..v).all(|i| {
                        2 * genera[i] as i64 - 2 + marks[i] as i64 + degree[i] > 0
                    });
                    if !stable {
                        continue;
                    }
                    let candidate = RawType {
                        decorations: genera.iter().copied().zip(marks.iter().copied()).collect(),
                        edges: edges.clone(),
                    };
                    if !kept.iter().any(|t| isomorphic(t, &candidate)) {
                        kept.push(candidate);
                    }
                }
            }
        }
    }
    kept
}
