use std::cmp::Ordering;

use arrayvec::ArrayVec;
use rayon::prelude::*;

use super::{CriticalSimplex, MorseError};
use crate::grid::{ScalarGrid, VertexOrder};
use crate::triangulation::{SimplexId, Triangulation, MAX_COFACETS};

// Per-simplex pairing code: 0 is critical, 1..=MAX_COFACETS names the
// cofacet table entry the simplex points up to, DOWN + i names facet i.
const CRITICAL: u8 = 0;
const DOWN: u8 = 32;

/// A discrete gradient over the implicit triangulation of a grid.
///
/// Each simplex is either critical or in exactly one discrete vector with a
/// facet or a cofacet. Both ends of a vector store the pairing, so the field
/// is symmetric by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteGradient {
    tri: Triangulation,
    codes: Vec<Vec<u8>>,
}

impl DiscreteGradient {
    /// Every simplex critical.
    pub fn trivial(tri: Triangulation) -> Self {
        let codes = (0..=tri.dimension())
            .map(|d| vec![CRITICAL; tri.slot_count(d)])
            .collect();
        Self { tri, codes }
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }

    #[inline]
    fn code(&self, s: SimplexId) -> u8 {
        self.codes[s.dim()][self.tri.slot(s)]
    }

    pub fn is_critical(&self, s: SimplexId) -> bool {
        self.code(s) == CRITICAL
    }

    /// The cofacet `s` points to, when `s` is the tail of a vector.
    #[inline]
    pub fn head_of(&self, s: SimplexId) -> Option<SimplexId> {
        let c = self.code(s);
        if c != CRITICAL && c < DOWN {
            Some(self.tri.cofacet_entry(s, (c - 1) as usize))
        } else {
            None
        }
    }

    /// The facet pointing to `s`, when `s` is the head of a vector.
    #[inline]
    pub fn tail_of(&self, s: SimplexId) -> Option<SimplexId> {
        let c = self.code(s);
        if c >= DOWN {
            Some(self.tri.facet_entry(s, (c - DOWN) as usize))
        } else {
            None
        }
    }

    pub fn partner(&self, s: SimplexId) -> Option<SimplexId> {
        self.head_of(s).or_else(|| self.tail_of(s))
    }

    /// Pairs `tail` with its cofacet `head`, overwriting previous states.
    pub(crate) fn pair(&mut self, tail: SimplexId, head: SimplexId) {
        let up = self
            .tri
            .cofacet_index(tail, head)
            .expect("head is a cofacet of tail");
        let down = self
            .tri
            .facet_index(head, tail)
            .expect("tail is a facet of head");
        let ts = self.tri.slot(tail);
        let hs = self.tri.slot(head);
        self.codes[tail.dim()][ts] = up as u8 + 1;
        self.codes[head.dim()][hs] = DOWN + down as u8;
    }

    /// Critical simplices of dimension `d`, in slot order.
    pub fn critical_of_dim(&self, d: usize) -> impl Iterator<Item = SimplexId> + '_ {
        self.codes[d]
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == CRITICAL)
            .map(move |(slot, _)| self.tri.from_slot(d, slot))
            .filter(move |s| self.tri.is_valid(*s))
    }

    /// Number of critical simplices per dimension.
    pub fn critical_counts(&self) -> Vec<usize> {
        (0..=self.tri.dimension())
            .map(|d| self.critical_of_dim(d).count())
            .collect()
    }

    /// All critical simplices, sorted by `(index, value, id)`.
    pub fn critical_simplices(&self, grid: &ScalarGrid, order: &VertexOrder) -> Vec<CriticalSimplex> {
        let mut out: Vec<CriticalSimplex> = (0..=self.tri.dimension())
            .flat_map(|d| self.critical_of_dim(d).collect::<Vec<_>>())
            .map(|s| CriticalSimplex::new(grid, order, s))
            .collect();
        out.sort_by(|a, b| {
            a.index
                .cmp(&b.index)
                .then(a.value.total_cmp(&b.value))
                .then(a.id.cmp(&b.id))
        });
        out
    }

    /// Checks the gradient invariants: pairing symmetry, single membership
    /// and absence of closed v-paths in every dimension.
    pub fn validate(&self) -> Result<(), MorseError> {
        let tri = &self.tri;
        for d in 0..=tri.dimension() {
            for (slot, &c) in self.codes[d].iter().enumerate() {
                let s = tri.from_slot(d, slot);
                if !tri.is_valid(s) {
                    if c != CRITICAL {
                        return Err(MorseError::InvalidGradient(format!("{s} is outside the grid but paired")));
                    }
                    continue;
                }
                if c == CRITICAL {
                    continue;
                }
                if c < DOWN {
                    if c as usize > MAX_COFACETS || d == tri.dimension() {
                        return Err(MorseError::InvalidGradient(format!("{s} has a bad code")));
                    }
                    let head = tri
                        .cofacets_raw(s)
                        .nth((c - 1) as usize)
                        .flatten()
                        .ok_or_else(|| MorseError::InvalidGradient(format!("{s} points outside the grid")))?;
                    if self.tail_of(head) != Some(s) {
                        return Err(MorseError::InvalidGradient(format!("{s} -> {head} is not symmetric")));
                    }
                } else {
                    if d == 0 || (c - DOWN) as usize > d {
                        return Err(MorseError::InvalidGradient(format!("{s} has a bad code")));
                    }
                    let tail = tri.facet_entry(s, (c - DOWN) as usize);
                    if self.head_of(tail) != Some(s) {
                        return Err(MorseError::InvalidGradient(format!("{tail} -> {s} is not symmetric")));
                    }
                }
            }
        }
        for d in 0..tri.dimension() {
            self.check_acyclic(d)?;
        }
        Ok(())
    }

    /// Depth-first search over d-dimensional tails; a back edge is a closed v-path.
    fn check_acyclic(&self, d: usize) -> Result<(), MorseError> {
        const WHITE: u8 = 0;
        const GREY: u8 = 1;
        const BLACK: u8 = 2;
        let tri = &self.tri;
        let mut color = vec![WHITE; tri.slot_count(d)];
        let successors = |s: SimplexId| -> ArrayVec<SimplexId, 4> {
            match self.head_of(s) {
                Some(head) => tri
                    .facets(head)
                    .into_iter()
                    .filter(|&f| f != s && self.head_of(f).is_some())
                    .collect(),
                None => ArrayVec::new(),
            }
        };
        for start_slot in 0..tri.slot_count(d) {
            if color[start_slot] != WHITE {
                continue;
            }
            let start = tri.from_slot(d, start_slot);
            if !tri.is_valid(start) || self.head_of(start).is_none() {
                color[start_slot] = BLACK;
                continue;
            }
            let mut stack: Vec<(SimplexId, ArrayVec<SimplexId, 4>)> = vec![(start, successors(start))];
            color[start_slot] = GREY;
            while let Some((node, succ)) = stack.last_mut() {
                if let Some(next) = succ.pop() {
                    let ns = tri.slot(next);
                    match color[ns] {
                        WHITE => {
                            color[ns] = GREY;
                            let s = successors(next);
                            stack.push((next, s));
                        }
                        GREY => {
                            return Err(MorseError::InvalidGradient(format!(
                                "closed v-path through {next} in dimension {d}"
                            )))
                        }
                        _ => {}
                    }
                } else {
                    let slot = tri.slot(*node);
                    color[slot] = BLACK;
                    stack.pop();
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Open,
    Paired,
    Critical,
}

struct LocalCell {
    id: SimplexId,
    key: ArrayVec<u32, 4>,
    state: State,
    faces: ArrayVec<u8, 4>,
    cofaces: ArrayVec<u8, MAX_COFACETS>,
}

/// Lower-star pairing of a single vertex (Robins, Wood & Sheppard).
///
/// Returns the discrete vectors as `(tail, head)` pairs. Every simplex of the
/// lower star not mentioned is critical.
fn process_lower_star(
    tri: &Triangulation,
    order: &VertexOrder,
    v: usize,
    star: &mut Vec<SimplexId>,
    out: &mut Vec<(SimplexId, SimplexId)>,
) {
    tri.lower_star_into(v, order, star);
    if star.len() == 1 {
        return;
    }
    let mut cells: Vec<LocalCell> = star
        .iter()
        .map(|&id| LocalCell {
            id,
            key: tri.filtration_key(id, order),
            state: State::Open,
            faces: ArrayVec::new(),
            cofaces: ArrayVec::new(),
        })
        .collect();
    let mut lookup: Vec<(SimplexId, u8)> = star.iter().enumerate().map(|(i, &s)| (s, i as u8)).collect();
    lookup.sort_unstable();
    for i in 0..cells.len() {
        for f in tri.facets(cells[i].id) {
            if let Ok(k) = lookup.binary_search_by(|(s, _)| s.cmp(&f)) {
                let j = lookup[k].1 as usize;
                cells[i].faces.push(j as u8);
                cells[j].cofaces.push(i as u8);
            }
        }
    }
    let open_faces = |cells: &[LocalCell], i: usize| {
        cells[i]
            .faces
            .iter()
            .filter(|&&f| cells[f as usize].state == State::Open)
            .count()
    };
    let cmp = |cells: &[LocalCell], a: usize, b: usize| -> Ordering { cells[a].key.cmp(&cells[b].key) };
    fn pop_min(queue: &mut Vec<usize>, cells: &[LocalCell], cmp: impl Fn(&[LocalCell], usize, usize) -> Ordering) -> Option<usize> {
        loop {
            let (pos, _) = queue
                .iter()
                .enumerate()
                .min_by(|(_, &a), (_, &b)| cmp(cells, a, b))?;
            let c = queue.swap_remove(pos);
            if cells[c].state == State::Open {
                return Some(c);
            }
        }
    }
    let push_ready = |cells: &[LocalCell], of: usize, queue: &mut Vec<usize>| {
        for &c in &cells[of].cofaces {
            let c = c as usize;
            if cells[c].state == State::Open && open_faces(cells, c) == 1 {
                queue.push(c);
            }
        }
    };

    // index 0 is the vertex itself; edges follow
    let edges: Vec<usize> = (1..cells.len()).filter(|&i| cells[i].id.dim() == 1).collect();
    let delta = *edges
        .iter()
        .min_by(|&&a, &&b| cmp(&cells, a, b))
        .expect("non-trivial lower star has an edge");
    cells[0].state = State::Paired;
    cells[delta].state = State::Paired;
    out.push((cells[0].id, cells[delta].id));

    let mut pq_zero: Vec<usize> = edges.iter().copied().filter(|&e| e != delta).collect();
    let mut pq_one: Vec<usize> = Vec::new();
    push_ready(&cells, delta, &mut pq_one);

    loop {
        while let Some(alpha) = pop_min(&mut pq_one, &cells, cmp) {
            let open: ArrayVec<usize, 4> = cells[alpha]
                .faces
                .iter()
                .map(|&f| f as usize)
                .filter(|&f| cells[f].state == State::Open)
                .collect();
            match open.len() {
                0 => pq_zero.push(alpha),
                1 => {
                    let face = open[0];
                    cells[alpha].state = State::Paired;
                    cells[face].state = State::Paired;
                    out.push((cells[face].id, cells[alpha].id));
                    push_ready(&cells, alpha, &mut pq_one);
                    push_ready(&cells, face, &mut pq_one);
                }
                _ => unreachable!("open face count only decreases"),
            }
        }
        match pop_min(&mut pq_zero, &cells, cmp) {
            Some(gamma) => {
                cells[gamma].state = State::Critical;
                push_ready(&cells, gamma, &mut pq_one);
            }
            None => break,
        }
    }
    debug_assert!(cells.iter().all(|c| c.state != State::Open));
}

/// Builds the lower-star discrete gradient of `grid` under `order`.
pub fn compute_gradient(grid: &ScalarGrid, order: &VertexOrder) -> DiscreteGradient {
    let tri = grid.triangulation();
    let mut g = DiscreteGradient::trivial(tri);
    const BATCH: usize = 1 << 14;
    let n = tri.vertex_count();
    let mut start = 0;
    while start < n {
        let end = (start + BATCH).min(n);
        let pairs: Vec<(SimplexId, SimplexId)> = (start..end)
            .into_par_iter()
            .fold(
                || (Vec::new(), Vec::with_capacity(80)),
                |(mut acc, mut star), v| {
                    process_lower_star(&tri, order, v, &mut star, &mut acc);
                    (acc, star)
                },
            )
            .map(|(acc, _)| acc)
            .flatten_iter()
            .collect();
        for (tail, head) in pairs {
            g.pair(tail, head);
        }
        start = end;
    }
    g
}
