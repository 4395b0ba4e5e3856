use serde::{Deserialize, Serialize};

use super::EnsembleError;

/// A bijection between two node sets and its total Euclidean cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeAssignment {
    /// `map[a]` is the node of the second set matched to node `a`.
    pub map: Vec<usize>,
    /// Sum of matched distances, Å, accumulated in `a` order.
    pub energy: f64,
}

impl NodeAssignment {
    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
            energy: 0.0,
        }
    }

    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.map.len()];
        for (a, &b) in self.map.iter().enumerate() {
            inv[b] = a;
        }
        inv
    }
}

pub fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Minimum-energy bijection between two point sets of equal size.
///
/// Among optimal maps the lexicographically smallest is returned.
pub fn optimal_assignment(ni: &[[f64; 3]], nj: &[[f64; 3]]) -> Result<NodeAssignment, EnsembleError> {
    if ni.len() != nj.len() {
        return Err(EnsembleError::SizeMismatch {
            left: ni.len(),
            right: nj.len(),
        });
    }
    let cost: Vec<Vec<f64>> = ni
        .iter()
        .map(|a| nj.iter().map(|b| distance(a, b)).collect())
        .collect();
    let map = solve_assignment(&cost);
    let energy = map.iter().enumerate().map(|(a, &b)| cost[a][b]).sum();
    Ok(NodeAssignment { map, energy })
}

/// Exact square assignment (Hungarian method with potentials), then the
/// lexicographically smallest optimum over the tight edges of the dual.
pub fn solve_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let (hungarian, u, v) = hungarian(cost);
    let scale = cost
        .iter()
        .flatten()
        .fold(1.0f64, |m, c| m.max(c.abs()));
    let tol = 1e-9 * scale;
    let tight: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| (cost[i][j] - u[i] - v[j]).abs() <= tol).collect())
        .collect();
    lexicographic_perfect_matching(&tight).unwrap_or(hungarian)
}

/// Returns `(row -> column, row potentials, column potentials)`.
fn hungarian(a: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let n = a.len();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut map = vec![0; n];
    for j in 1..=n {
        map[p[j] - 1] = j - 1;
    }
    (map, u[1..].to_vec(), v[1..].to_vec())
}

/// Greedy row by row: keep the smallest column that still leaves a perfect
/// matching of the remaining rows.
fn lexicographic_perfect_matching(allowed: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = allowed.len();
    let mut fixed: Vec<usize> = Vec::with_capacity(n);
    let mut taken = vec![false; n];
    for i in 0..n {
        let choice = (0..n).find(|&j| {
            if !allowed[i][j] || taken[j] {
                return false;
            }
            taken[j] = true;
            let ok = has_perfect_matching(allowed, i + 1, &taken);
            taken[j] = false;
            ok
        })?;
        taken[choice] = true;
        fixed.push(choice);
    }
    Some(fixed)
}

/// Kuhn's augmenting paths on rows `from..` and untaken columns.
fn has_perfect_matching(allowed: &[Vec<bool>], from: usize, taken: &[bool]) -> bool {
    let n = allowed.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(i: usize, allowed: &[Vec<bool>], taken: &[bool], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for j in 0..allowed.len() {
            if allowed[i][j] && !taken[j] && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| augment(k, allowed, taken, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    (from..n).all(|i| {
        let mut seen = vec![false; n];
        augment(i, allowed, taken, &mut seen, &mut owner)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_sets_map_to_identity() {
        let p = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 2.0, 0.0]];
        let a = optimal_assignment(&p, &p).unwrap();
        assert_eq!(a.map, vec![0, 1, 2]);
        assert_eq!(a.energy, 0.0);
    }

    #[test]
    fn swapped_points() {
        let a = [[0.0, 0.0, 0.0], [10.0, 0.0, 0.0]];
        let b = [[10.0, 0.5, 0.0], [0.0, 0.5, 0.0]];
        let r = optimal_assignment(&a, &b).unwrap();
        assert_eq!(r.map, vec![1, 0]);
        assert_eq!(r.energy, 1.0);
    }

    #[test]
    fn ties_prefer_lexicographic_map() {
        // every bijection costs the same
        let cost = vec![vec![1.0; 4]; 4];
        assert_eq!(solve_assignment(&cost), vec![0, 1, 2, 3]);
        // optima [1, 0, 2] and [2, 0, 1]
        let cost = vec![vec![5.0, 1.0, 1.0], vec![1.0, 5.0, 5.0], vec![5.0, 1.0, 1.0]];
        assert_eq!(solve_assignment(&cost), vec![1, 0, 2]);
    }

    #[test]
    fn size_mismatch_names_counts() {
        let e = optimal_assignment(&[[0.0; 3]], &[[0.0; 3], [1.0; 3]]).unwrap_err();
        assert_eq!(e, EnsembleError::SizeMismatch { left: 1, right: 2 });
        assert_eq!(e.to_string(), "node counts differ: 1 against 2");
    }
}
