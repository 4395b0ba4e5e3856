//! Implicit Freudenthal triangulation of a regular grid.
//!
//! Nothing is materialized. A simplex is named by the grid vertex with the
//! smallest index among its vertices (`base`) and by the chain of nested
//! axis subsets `∅ = S0 ⊂ S1 ⊂ … ⊂ Sd` leading from the base to its other
//! vertices (`local` enumerates those chains). Every simplex lies in the cube
//! spanned by `base` and `base + (1,1,1)` and contains a segment of the main
//! diagonal direction, which is exactly the Kuhn/Freudenthal subdivision: 6
//! tetrahedra per cube, 2 triangles per square in planar mode.

use std::fmt;
use std::sync::OnceLock;

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{ScalarGrid, VertexOrder};

/// Largest number of codimension-1 cofaces of any simplex (vertex in 3D).
pub const MAX_COFACETS: usize = 14;

pub type SimplexList = ArrayVec<SimplexId, MAX_COFACETS>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("simplex {0} is not part of the triangulation")]
    InvalidSimplex(SimplexId),
    #[error("vertex {0} is out of range")]
    InvalidVertex(usize),
}

/// Canonical name of a simplex of the implicit triangulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SimplexId {
    pub dim: u8,
    pub base: u32,
    pub local: u8,
}

impl SimplexId {
    pub fn new(dim: u8, base: usize, local: u8) -> Self {
        Self {
            dim,
            base: base as u32,
            local,
        }
    }

    pub fn vertex(v: usize) -> Self {
        Self::new(0, v, 0)
    }

    #[inline]
    pub fn dim(self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn base(self) -> usize {
        self.base as usize
    }
}

impl fmt::Display for SimplexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-simplex@{}#{}", self.dim, self.base, self.local)
    }
}

type Offset = [i8; 3];

#[derive(Debug)]
struct LocalType {
    chain: ArrayVec<u8, 4>,
}

impl LocalType {
    fn max_set(&self) -> u8 {
        *self.chain.last().expect("non-empty chain")
    }
}

#[derive(Debug)]
struct Tables {
    types: Vec<Vec<LocalType>>,
    facets: Vec<Vec<ArrayVec<(Offset, u8), 4>>>,
    cofacets: Vec<Vec<Vec<(Offset, u8)>>>,
    star: Vec<Vec<(Offset, u8)>>,
}

fn bits_to_offset(bits: u8) -> Offset {
    [(bits & 1) as i8, ((bits >> 1) & 1) as i8, ((bits >> 2) & 1) as i8]
}

fn chains(full: u8, dim: usize) -> Vec<ArrayVec<u8, 4>> {
    fn extend(prefix: &mut ArrayVec<u8, 4>, full: u8, remaining: usize, out: &mut Vec<ArrayVec<u8, 4>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        let last = *prefix.last().unwrap();
        for next in 1..=full {
            if next & !full != 0 || next == last || next & last != last {
                continue;
            }
            prefix.push(next);
            extend(prefix, full, remaining - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    let mut prefix = ArrayVec::new();
    prefix.push(0u8);
    extend(&mut prefix, full, dim, &mut out);
    out
}

impl Tables {
    fn build(dimension: usize) -> Self {
        let full: u8 = (1 << dimension) - 1;
        let types: Vec<Vec<LocalType>> = (0..=dimension)
            .map(|d| chains(full, d).into_iter().map(|chain| LocalType { chain }).collect())
            .collect();
        let lookup = |d: usize, chain: &[u8]| -> u8 {
            types[d]
                .iter()
                .position(|t| t.chain.as_slice() == chain)
                .expect("facet chain is a valid local type") as u8
        };

        let mut facets: Vec<Vec<ArrayVec<(Offset, u8), 4>>> = vec![Vec::new()];
        for d in 1..=dimension {
            let mut per_type = Vec::new();
            for t in &types[d] {
                let c = &t.chain;
                let mut list = ArrayVec::new();
                // removing the last vertex first lists facets in lexicographic vertex order
                for removed in (0..=d).rev() {
                    if removed == 0 {
                        let shift = c[1];
                        let chain: ArrayVec<u8, 4> = c[1..].iter().map(|s| s & !shift).collect();
                        list.push((bits_to_offset(shift), lookup(d - 1, &chain)));
                    } else {
                        let chain: ArrayVec<u8, 4> = c
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| *i != removed)
                            .map(|(_, s)| *s)
                            .collect();
                        list.push(([0; 3], lookup(d - 1, &chain)));
                    }
                }
                per_type.push(list);
            }
            facets.push(per_type);
        }

        let mut cofacets: Vec<Vec<Vec<(Offset, u8)>>> =
            (0..=dimension).map(|d| vec![Vec::new(); types[d].len()]).collect();
        for d in 1..=dimension {
            for (t, list) in facets[d].iter().enumerate() {
                for &(off, ft) in list {
                    let neg = [-off[0], -off[1], -off[2]];
                    cofacets[d - 1][ft as usize].push((neg, t as u8));
                }
            }
        }

        let star = (0..=dimension)
            .map(|d| {
                let mut list = Vec::new();
                for (t, lt) in types[d].iter().enumerate() {
                    for &s in &lt.chain {
                        let o = bits_to_offset(s);
                        list.push(([-o[0], -o[1], -o[2]], t as u8));
                    }
                }
                list
            })
            .collect();

        Tables {
            types,
            facets,
            cofacets,
            star,
        }
    }

    fn get(dimension: usize) -> &'static Tables {
        static PLANAR: OnceLock<Tables> = OnceLock::new();
        static VOLUMETRIC: OnceLock<Tables> = OnceLock::new();
        match dimension {
            2 => PLANAR.get_or_init(|| Tables::build(2)),
            3 => VOLUMETRIC.get_or_init(|| Tables::build(3)),
            _ => unreachable!("only planar and volumetric grids exist"),
        }
    }
}

/// Navigation over the Freudenthal triangulation of a grid with the given
/// vertex dimensions. Cheap to copy; all queries are arithmetic.
#[derive(Clone, Copy)]
pub struct Triangulation {
    dims: [usize; 3],
    dimension: usize,
    tables: &'static Tables,
}

impl fmt::Debug for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Triangulation")
            .field("dims", &self.dims)
            .field("dimension", &self.dimension)
            .finish()
    }
}

impl PartialEq for Triangulation {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims
    }
}

impl Eq for Triangulation {}

impl Triangulation {
    pub fn new(dims: [usize; 3]) -> Self {
        let dimension = if dims[2] == 1 { 2 } else { 3 };
        Self {
            dims,
            dimension,
            tables: Tables::get(dimension),
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// Top simplex dimension: 2 or 3.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertex_count(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    /// Number of local simplex types of dimension `d` anchored at one vertex.
    pub fn local_types(&self, d: usize) -> usize {
        self.tables.types[d].len()
    }

    /// Size of the dense slot range for dimension `d`; slots of simplices
    /// hanging off the upper grid boundary are left unused.
    pub fn slot_count(&self, d: usize) -> usize {
        self.vertex_count() * self.local_types(d)
    }

    #[inline]
    pub fn slot(&self, s: SimplexId) -> usize {
        s.base() * self.local_types(s.dim()) + s.local as usize
    }

    #[inline]
    pub fn from_slot(&self, d: usize, slot: usize) -> SimplexId {
        let n = self.local_types(d);
        SimplexId::new(d as u8, slot / n, (slot % n) as u8)
    }

    #[inline]
    fn coords(&self, v: usize) -> [usize; 3] {
        let x = v % self.dims[0];
        let yz = v / self.dims[0];
        [x, yz % self.dims[1], yz / self.dims[1]]
    }

    #[inline]
    fn shift(&self, v: usize, off: Offset) -> Option<usize> {
        let c = self.coords(v);
        let mut out = [0usize; 3];
        for a in 0..3 {
            let p = c[a] as isize + off[a] as isize;
            if p < 0 || p >= self.dims[a] as isize {
                return None;
            }
            out[a] = p as usize;
        }
        Some(out[0] + self.dims[0] * (out[1] + self.dims[1] * out[2]))
    }

    pub fn is_valid(&self, s: SimplexId) -> bool {
        let d = s.dim();
        if d > self.dimension || s.local as usize >= self.local_types(d) || s.base() >= self.vertex_count() {
            return false;
        }
        let max_set = self.tables.types[d][s.local as usize].max_set();
        self.shift(s.base(), bits_to_offset(max_set)).is_some()
    }

    pub fn check(&self, s: SimplexId) -> Result<(), TopologyError> {
        if self.is_valid(s) {
            Ok(())
        } else {
            Err(TopologyError::InvalidSimplex(s))
        }
    }

    /// Vertex indices in strictly increasing order.
    pub fn vertices(&self, s: SimplexId) -> ArrayVec<usize, 4> {
        let [x, y, z] = self.coords(s.base());
        self.tables.types[s.dim()][s.local as usize]
            .chain
            .iter()
            .map(|&bits| {
                let o = bits_to_offset(bits);
                (x + o[0] as usize) + self.dims[0] * ((y + o[1] as usize) + self.dims[1] * (z + o[2] as usize))
            })
            .collect()
    }

    /// Codimension-1 faces, in lexicographic order of their vertex tuples.
    pub fn facets(&self, s: SimplexId) -> SimplexList {
        let d = s.dim();
        let mut out = SimplexList::new();
        if d == 0 {
            return out;
        }
        for &(off, t) in &self.tables.facets[d][s.local as usize] {
            let base = self
                .shift(s.base(), off)
                .expect("facets of a valid simplex are valid");
            out.push(SimplexId::new(d as u8 - 1, base, t));
        }
        out
    }

    /// Codimension-1 cofaces that exist inside the grid.
    pub fn cofacets(&self, s: SimplexId) -> SimplexList {
        let d = s.dim();
        let mut out = SimplexList::new();
        if d >= self.dimension {
            return out;
        }
        for &(off, t) in &self.tables.cofacets[d][s.local as usize] {
            if let Some(base) = self.shift(s.base(), off) {
                let c = SimplexId::new(d as u8 + 1, base, t);
                if self.is_valid(c) {
                    out.push(c);
                }
            }
        }
        out
    }

    pub fn checked_facets(&self, s: SimplexId) -> Result<SimplexList, TopologyError> {
        self.check(s)?;
        Ok(self.facets(s))
    }

    pub fn checked_cofacets(&self, s: SimplexId) -> Result<SimplexList, TopologyError> {
        self.check(s)?;
        Ok(self.cofacets(s))
    }

    /// All simplices of dimension `d` having `v` as a vertex.
    pub fn star(&self, v: usize, d: usize, out: &mut Vec<SimplexId>) {
        for &(off, t) in &self.tables.star[d] {
            if let Some(base) = self.shift(v, off) {
                let s = SimplexId::new(d as u8, base, t);
                if self.is_valid(s) {
                    out.push(s);
                }
            }
        }
    }

    /// Every simplex whose highest-ranked vertex is `v`, grouped by dimension.
    pub fn lower_star(&self, v: usize, order: &VertexOrder) -> Result<Vec<SimplexId>, TopologyError> {
        if v >= self.vertex_count() {
            return Err(TopologyError::InvalidVertex(v));
        }
        let mut out = Vec::new();
        self.lower_star_into(v, order, &mut out);
        Ok(out)
    }

    pub(crate) fn lower_star_into(&self, v: usize, order: &VertexOrder, out: &mut Vec<SimplexId>) {
        out.clear();
        out.push(SimplexId::vertex(v));
        let rv = order.rank(v);
        let mut buf = Vec::with_capacity(36);
        for d in 1..=self.dimension {
            buf.clear();
            self.star(v, d, &mut buf);
            out.extend(
                buf.iter()
                    .copied()
                    .filter(|&s| self.vertices(s).iter().all(|&u| order.rank(u) <= rv)),
            );
        }
    }

    /// Valid simplices of dimension `d`, in slot order.
    pub fn simplices(&self, d: usize) -> impl Iterator<Item = SimplexId> + '_ {
        (0..self.slot_count(d))
            .map(move |slot| self.from_slot(d, slot))
            .filter(move |s| self.is_valid(*s))
    }

    /// Closed-form simplex count for dimension `d`.
    pub fn count(&self, d: usize) -> usize {
        if d > self.dimension {
            return 0;
        }
        self.tables.types[d]
            .iter()
            .map(|t| {
                let o = bits_to_offset(t.max_set());
                (0..3).map(|a| self.dims[a] - o[a] as usize).product::<usize>()
            })
            .sum()
    }

    /// Alternating sum of simplex counts.
    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dimension)
            .map(|d| if d % 2 == 0 { self.count(d) as i64 } else { -(self.count(d) as i64) })
            .sum()
    }

    /// Index of `s` inside `facets(t)`.
    pub(crate) fn facet_index(&self, t: SimplexId, s: SimplexId) -> Option<usize> {
        self.facets(t).iter().position(|&f| f == s)
    }

    pub(crate) fn cofacet_index(&self, s: SimplexId, t: SimplexId) -> Option<usize> {
        self.cofacets_raw(s).position(|c| c == Some(t))
    }

    /// Cofacets by table entry, `None` where the entry falls outside the grid.
    pub(crate) fn cofacets_raw(&self, s: SimplexId) -> impl Iterator<Item = Option<SimplexId>> + '_ {
        let d = s.dim();
        let entries: &[(Offset, u8)] = if d < self.dimension {
            &self.tables.cofacets[d][s.local as usize]
        } else {
            &[]
        };
        entries.iter().map(move |&(off, t)| {
            self.shift(s.base(), off)
                .map(|base| SimplexId::new(d as u8 + 1, base, t))
                .filter(|c| self.is_valid(*c))
        })
    }

    pub(crate) fn cofacet_entry(&self, s: SimplexId, entry: usize) -> SimplexId {
        let (off, t) = self.tables.cofacets[s.dim()][s.local as usize][entry];
        let base = self.shift(s.base(), off).expect("paired cofacet exists");
        SimplexId::new(s.dim + 1, base, t)
    }

    pub(crate) fn facet_entry(&self, s: SimplexId, entry: usize) -> SimplexId {
        self.facets(s)[entry]
    }

    /// Highest-ranked vertex of `s`.
    pub fn top_vertex(&self, s: SimplexId, order: &VertexOrder) -> usize {
        self.vertices(s)
            .into_iter()
            .max_by_key(|&v| order.rank(v))
            .expect("simplex has vertices")
    }

    /// Vertex ranks sorted in decreasing order; the lexicographic order on
    /// these keys is the lower-star filtration order.
    pub fn filtration_key(&self, s: SimplexId, order: &VertexOrder) -> ArrayVec<u32, 4> {
        let mut key: ArrayVec<u32, 4> = self.vertices(s).iter().map(|&v| order.rank(v)).collect();
        key.sort_unstable_by(|a, b| b.cmp(a));
        key
    }

    pub fn barycenter(&self, grid: &ScalarGrid, s: SimplexId) -> [f64; 3] {
        let vs = self.vertices(s);
        let mut p = [0.0; 3];
        for &v in &vs {
            let q = grid.position(v);
            for a in 0..3 {
                p[a] += q[a];
            }
        }
        let n = vs.len() as f64;
        [p[0] / n, p[1] / n, p[2] / n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, HashSet};

    /// Independent construction: each cube split along its main diagonal
    /// into one tetrahedron per axis permutation, faces collected by vertex set.
    fn brute_force(dims: [usize; 3]) -> Vec<BTreeSet<Vec<usize>>> {
        let planar = dims[2] == 1;
        let idx = |c: [usize; 3]| c[0] + dims[0] * (c[1] + dims[1] * c[2]);
        let perms: Vec<Vec<usize>> = if planar {
            vec![vec![0, 1], vec![1, 0]]
        } else {
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0],
            ]
        };
        let top = if planar { 2 } else { 3 };
        let mut sets = vec![BTreeSet::new(); top + 1];
        let zmax = if planar { 1 } else { dims[2] - 1 };
        for z in 0..zmax {
            for y in 0..dims[1] - 1 {
                for x in 0..dims[0] - 1 {
                    for p in &perms {
                        let mut c = [x, y, z];
                        let mut verts = vec![idx(c)];
                        for &axis in p {
                            c[axis] += 1;
                            verts.push(idx(c));
                        }
                        // all faces of the top simplex
                        for mask in 1u32..(1 << verts.len()) {
                            let mut f: Vec<usize> = (0..verts.len())
                                .filter(|i| mask & (1 << i) != 0)
                                .map(|i| verts[i])
                                .collect();
                            f.sort();
                            sets[f.len() - 1].insert(f);
                        }
                    }
                }
            }
        }
        sets
    }

    fn grids() -> Vec<[usize; 3]> {
        let mut out = vec![[2, 2, 1], [3, 2, 1], [4, 3, 1], [4, 4, 1]];
        for nx in 2..=4 {
            for ny in 2..=4 {
                for nz in 2..=4 {
                    out.push([nx, ny, nz]);
                }
            }
        }
        out
    }

    #[test]
    fn census_matches_brute_force() {
        for dims in grids() {
            let tri = Triangulation::new(dims);
            let brute = brute_force(dims);
            for d in 0..=tri.dimension() {
                let ours: BTreeSet<Vec<usize>> =
                    tri.simplices(d).map(|s| tri.vertices(s).to_vec()).collect();
                assert_eq!(ours, brute[d], "dims {dims:?} dim {d}");
                assert_eq!(tri.count(d), brute[d].len());
                assert_eq!(tri.simplices(d).count(), tri.count(d));
            }
            assert_eq!(tri.euler_characteristic(), 1);
        }
    }

    #[test]
    fn local_type_counts() {
        let t3 = Triangulation::new([3, 3, 3]);
        assert_eq!((0..4).map(|d| t3.local_types(d)).collect::<Vec<_>>(), vec![1, 7, 12, 6]);
        let t2 = Triangulation::new([3, 3, 1]);
        assert_eq!((0..3).map(|d| t2.local_types(d)).collect::<Vec<_>>(), vec![1, 3, 2]);
    }

    #[test]
    fn vertex_tuples_strictly_increase_and_encoding_is_unique() {
        for dims in grids() {
            let tri = Triangulation::new(dims);
            for d in 0..=tri.dimension() {
                let mut seen = HashSet::new();
                for s in tri.simplices(d) {
                    let vs = tri.vertices(s);
                    assert_eq!(vs.len(), d + 1);
                    assert!(vs.windows(2).all(|w| w[0] < w[1]));
                    assert!(seen.insert(vs.to_vec()), "two encodings of {vs:?}");
                }
            }
        }
    }

    #[test]
    fn facet_cofacet_duality() {
        for dims in grids() {
            let tri = Triangulation::new(dims);
            for d in 0..=tri.dimension() {
                for s in tri.simplices(d) {
                    for f in tri.facets(s) {
                        assert!(tri.is_valid(f));
                        assert!(tri.cofacets(f).contains(&s), "{s} not a cofacet of {f}");
                        let fv = tri.vertices(f);
                        assert!(fv.iter().all(|v| tri.vertices(s).contains(v)));
                    }
                    for c in tri.cofacets(s) {
                        assert!(tri.facets(c).contains(&s));
                    }
                }
            }
        }
    }

    #[test]
    fn edge_and_interior_examples() {
        let tri = Triangulation::new([4, 4, 4]);
        let e = tri.simplices(1).next().unwrap();
        let vs = tri.vertices(e);
        let f = tri.facets(e);
        assert_eq!(f.as_slice(), &[SimplexId::vertex(vs[0]), SimplexId::vertex(vs[1])]);

        let center = 1 + 4 * (1 + 4 * 1);
        let tet = SimplexId::new(3, center, 0);
        assert!(tri.is_valid(tet));
        assert_eq!(tri.facets(tet).len(), 4);
        for tri_face in tri.facets(tet) {
            // interior triangles of a 4³ grid starting at (1,1,1)
            assert_eq!(tri.cofacets(tri_face).len(), 2);
        }
        // interior vertex has 14 edges, 36 triangles, 24 tetrahedra
        let mut buf = Vec::new();
        for (d, n) in [(1, 14), (2, 36), (3, 24)] {
            buf.clear();
            tri.star(center, d, &mut buf);
            assert_eq!(buf.len(), n);
        }
    }

    #[test]
    fn lower_stars_partition_the_complex() {
        use crate::grid::ScalarGrid;
        let dims = [3, 3, 3];
        // pseudo-random but fixed values
        let values: Vec<f64> = (0..27).map(|i| ((i * 37 + 11) % 27) as f64 * 0.5 - 3.0).collect();
        let grid = ScalarGrid::new(dims, [1.0; 3], [0.0; 3], values).unwrap();
        let order = VertexOrder::new(&grid);
        let tri = grid.triangulation();
        let mut seen = HashSet::new();
        let mut total = 0;
        for v in 0..27 {
            for s in tri.lower_star(v, &order).unwrap() {
                assert_eq!(tri.top_vertex(s, &order), v);
                assert!(seen.insert(s));
                total += 1;
            }
        }
        let brute: usize = brute_force(dims).iter().map(|s| s.len()).sum();
        assert_eq!(total, brute);
        assert!(tri.lower_star(27, &order).is_err());
    }

    #[test]
    fn invalid_ids_are_rejected() {
        let tri = Triangulation::new([3, 3, 3]);
        // base at the far corner cannot anchor an edge
        let e = SimplexId::new(1, 26, 0);
        assert!(tri.checked_facets(e).is_err());
        assert!(tri.checked_cofacets(SimplexId::new(4, 0, 0)).is_err());
    }
}
