//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};
use std::path::PathBuf;

use bondmatcher_core::grid::ScalarGrid;
use bondmatcher_core::morse::DiscreteGradient;
use bondmatcher_core::synth::FixtureSpec;
use bondmatcher_core::triangulation::{SimplexId, Triangulation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> FixtureSpec {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random grid with every axis in `lo..=hi` (z may collapse to 1). Half of
/// the seeds draw small integers so that ties are frequent.
pub fn random_grid(seed: u64, lo: usize, hi: usize) -> ScalarGrid {
    let mut r = rng(seed);
    let nx = r.gen_range(lo..=hi);
    let ny = r.gen_range(lo..=hi);
    let nz = if r.gen_bool(0.25) { 1 } else { r.gen_range(lo..=hi) };
    let n = nx * ny * nz;
    let ties = seed % 2 == 0;
    let values = (0..n)
        .map(|_| if ties { r.gen_range(0..6) as f64 } else { r.gen_range(-1.0..1.0) })
        .collect();
    ScalarGrid::new([nx, ny, nz], [0.5, 0.5, 0.5], [0.0; 3], values).unwrap()
}

/// Sum of Gaussian wells `depth * exp(-|p - c|^2 / w^2)` sampled on a grid.
pub fn wells(dims: [usize; 3], h: f64, origin: [f64; 3], wells: &[([f64; 3], f64, f64)]) -> ScalarGrid {
    let mut values = Vec::with_capacity(dims.iter().product());
    for z in 0..dims[2] {
        for y in 0..dims[1] {
            for x in 0..dims[0] {
                let p = [
                    origin[0] + x as f64 * h,
                    origin[1] + y as f64 * h,
                    origin[2] + z as f64 * h,
                ];
                let v: f64 = wells
                    .iter()
                    .map(|(c, depth, w)| {
                        let d2: f64 = (0..3).map(|k| (p[k] - c[k]).powi(2)).sum();
                        depth * (-d2 / (w * w)).exp()
                    })
                    .sum();
                values.push(v);
            }
        }
    }
    ScalarGrid::new(dims, [h; 3], origin, values).unwrap()
}

/// Ranks by `(value, index)`, computed without the library.
pub fn ranks(grid: &ScalarGrid) -> Vec<u32> {
    let mut idx: Vec<usize> = (0..grid.len()).collect();
    idx.sort_by(|&a, &b| grid.value(a).total_cmp(&grid.value(b)).then(a.cmp(&b)));
    let mut rank = vec![0u32; idx.len()];
    for (r, v) in idx.into_iter().enumerate() {
        rank[v] = r as u32;
    }
    rank
}

/// 0-dimensional persistence by reducing the vertex-edge boundary matrix of
/// the lower-star filtration over Z/2.
///
/// Returns `(minimum vertex, destroying edge vertices)` for finite pairs and
/// the vertices never killed.
pub fn boundary_matrix_pairs(grid: &ScalarGrid) -> (BTreeSet<(usize, [usize; 2])>, BTreeSet<usize>) {
    let rank = ranks(grid);
    let tri = grid.triangulation();
    let mut edges: Vec<[usize; 2]> = tri
        .simplices(1)
        .map(|e| {
            let v = tri.vertices(e);
            [v[0], v[1]]
        })
        .collect();
    // an edge enters with its higher vertex, after that vertex, ordered by
    // its lower vertex
    let key = |e: &[usize; 2]| {
        let (a, b) = (rank[e[0]], rank[e[1]]);
        (a.max(b), a.min(b))
    };
    edges.sort_by_key(key);
    // vertices indexed by rank; a column is the set of its boundary rows
    let mut low_owner: Vec<Option<usize>> = vec![None; rank.len()];
    let mut columns: Vec<Vec<u32>> = Vec::with_capacity(edges.len());
    let mut pairs = BTreeSet::new();
    let mut by_rank = vec![0usize; rank.len()];
    for (v, &r) in rank.iter().enumerate() {
        by_rank[r as usize] = v;
    }
    for (j, e) in edges.iter().enumerate() {
        let mut col = vec![rank[e[0]].min(rank[e[1]]), rank[e[0]].max(rank[e[1]])];
        loop {
            let Some(&low) = col.last() else { break };
            match low_owner[low as usize] {
                Some(k) => {
                    // symmetric difference of sorted columns
                    let other = &columns[k];
                    let mut merged = Vec::with_capacity(col.len() + other.len());
                    let (mut a, mut b) = (0, 0);
                    while a < col.len() || b < other.len() {
                        match (col.get(a), other.get(b)) {
                            (Some(x), Some(y)) if x == y => {
                                a += 1;
                                b += 1;
                            }
                            (Some(x), Some(y)) if x < y => {
                                merged.push(*x);
                                a += 1;
                            }
                            (Some(_), Some(y)) => {
                                merged.push(*y);
                                b += 1;
                            }
                            (Some(x), None) => {
                                merged.push(*x);
                                a += 1;
                            }
                            (None, Some(y)) => {
                                merged.push(*y);
                                b += 1;
                            }
                            (None, None) => unreachable!(),
                        }
                    }
                    col = merged;
                }
                None => {
                    low_owner[low as usize] = Some(j);
                    pairs.insert((by_rank[low as usize], *e));
                    break;
                }
            }
        }
        columns.push(col);
    }
    // a non-minimum vertex is the low of its first lower edge (a pair of
    // zero lifetime that union-find never reports); keep minima only
    let pairs = pairs.into_iter().filter(|(v, _)| is_local_minimum(grid, &rank, *v)).collect();
    let essential = (0..rank.len())
        .filter(|&r| low_owner[r].is_none())
        .map(|r| by_rank[r])
        .collect();
    (pairs, essential)
}

fn is_local_minimum(grid: &ScalarGrid, rank: &[u32], v: usize) -> bool {
    let tri = grid.triangulation();
    let mut edges = Vec::new();
    tri.star(v, 1, &mut edges);
    edges.iter().all(|&e| {
        let vs = tri.vertices(e);
        let u = if vs[0] == v { vs[1] } else { vs[0] };
        rank[u] > rank[v]
    })
}

/// Factorial search for the minimum of `sum_a |p_a - q_map(a)|`, accumulated
/// in `a` order.
pub fn brute_force_assignment(p: &[[f64; 3]], q: &[[f64; 3]]) -> (f64, Vec<usize>) {
    let energy = assignment_energy;
    let n = p.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = (energy(p, q, &perm), perm.clone());
    // Heap's algorithm
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            let e = energy(p, q, &perm);
            if e < best.0 || (e == best.0 && perm < best.1) {
                best = (e, perm.clone());
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

/// Energy of `map` under the same accumulation as the brute force.
pub fn assignment_energy(p: &[[f64; 3]], q: &[[f64; 3]], map: &[usize]) -> f64 {
    let mut e = 0.0;
    for (a, &b) in map.iter().enumerate() {
        let d: f64 = (0..3).map(|k| (p[a][k] - q[b][k]).powi(2)).sum();
        e += d.sqrt();
    }
    e
}

/// Checks a gradient simplex by simplex: at most one vector per simplex,
/// symmetric pairs between a simplex and one of its cofacets, no closed
/// v-path (Kahn's algorithm per dimension). Returns the critical counts.
pub fn check_gradient(g: &DiscreteGradient) -> Result<Vec<usize>, String> {
    let tri: &Triangulation = g.triangulation();
    let dim = tri.dimension();
    let mut counts = vec![0usize; dim + 1];
    for d in 0..=dim {
        for s in tri.simplices(d) {
            let up = g.head_of(s);
            let down = g.tail_of(s);
            match (up, down) {
                (Some(_), Some(_)) => return Err(format!("{s} is in two vectors")),
                (None, None) => {
                    if !g.is_critical(s) {
                        return Err(format!("{s} unpaired but not critical"));
                    }
                    counts[d] += 1;
                }
                (Some(h), None) => {
                    if !tri.cofacets(s).into_iter().any(|c| c == h) {
                        return Err(format!("{s} paired with non-cofacet {h}"));
                    }
                    if g.tail_of(h) != Some(s) {
                        return Err(format!("{s} -> {h} not mirrored"));
                    }
                }
                (None, Some(t)) => {
                    if !tri.facets(s).into_iter().any(|f| f == t) {
                        return Err(format!("{s} paired with non-facet {t}"));
                    }
                    if g.head_of(t) != Some(s) {
                        return Err(format!("{t} -> {s} not mirrored"));
                    }
                }
            }
        }
    }
    for d in 0..dim {
        let n = tri.slot_count(d);
        let mut indeg = vec![0u32; n];
        let mut nodes = 0usize;
        let succ = |s: SimplexId| -> Vec<SimplexId> {
            let h = g.head_of(s).unwrap();
            tri.facets(h)
                .into_iter()
                .filter(|&f| f != s && g.head_of(f).is_some())
                .collect()
        };
        for s in tri.simplices(d).filter(|&s| g.head_of(s).is_some()) {
            nodes += 1;
            for f in succ(s) {
                indeg[tri.slot(f)] += 1;
            }
        }
        let mut queue: VecDeque<SimplexId> = tri
            .simplices(d)
            .filter(|&s| g.head_of(s).is_some() && indeg[tri.slot(s)] == 0)
            .collect();
        let mut seen = 0usize;
        while let Some(s) = queue.pop_front() {
            seen += 1;
            for f in succ(s) {
                let k = tri.slot(f);
                indeg[k] -= 1;
                if indeg[k] == 0 {
                    queue.push_back(f);
                }
            }
        }
        if seen != nodes {
            return Err(format!("closed v-path among {}-simplices", d));
        }
    }
    Ok(counts)
}

pub fn euler(counts: &[usize]) -> i64 {
    counts
        .iter()
        .enumerate()
        .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum()
}
