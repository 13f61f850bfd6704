//! Sierpinski gasket approximation graphs in integer triangular coordinates.
//!
//! A vertex of the level-`n` graph is stored as `(a, b)` in units of
//! `2^-n` along the directions `(1, 0)` and `(1/2, sqrt(3)/2)`. Corners are
//! `u1 = (0, 0)`, `u2 = (0, 2^n)` (top) and `u3 = (2^n, 0)`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TriCoord {
    pub a: u32,
    pub b: u32,
}

impl TriCoord {
    pub const fn new(a: u32, b: u32) -> Self {
        TriCoord { a, b }
    }

    /// Canonical ordering key: lexicographic by `(b, a)`.
    fn key(self) -> (u32, u32) {
        (self.b, self.a)
    }

    /// Euclidean position when the coordinate is read at `level`.
    pub fn to_point(self, level: u32) -> Point {
        let s = (1u64 << level) as f64;
        Point {
            x: (self.a as f64 + self.b as f64 / 2.0) / s,
            y: self.b as f64 * SQRT3 / (2.0 * s),
        }
    }
}

/// A point of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// Address of a level-`len` cell: the word `w_1 .. w_len` over `{1,2,3}`
/// naming the cell `psi_w(SG) = psi_{w_len} o ... o psi_{w_1}(SG)`.
/// Two bits per symbol, `w_1` in the lowest bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellWord {
    len: u8,
    code: u32,
}

impl CellWord {
    pub const EMPTY: CellWord = CellWord { len: 0, code: 0 };

    pub fn from_symbols(symbols: &[u8]) -> Result<Self> {
        let mut w = CellWord::EMPTY;
        for &s in symbols {
            if !(1..=3).contains(&s) {
                return Err(Error::InvalidWordSymbol(s));
            }
            w = w.push(s);
        }
        Ok(w)
    }

    fn push(self, symbol: u8) -> Self {
        debug_assert!(self.len < 16);
        CellWord {
            len: self.len + 1,
            code: self.code | ((symbol as u32) << (2 * self.len as u32)),
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn symbols(&self) -> Vec<u8> {
        (0..self.len).map(|i| ((self.code >> (2 * i as u32)) & 3) as u8).collect()
    }
}

impl std::fmt::Display for CellWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for s in self.symbols() {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GasketGraph {
    level: u32,
    vertices: Vec<TriCoord>,
    adjacency: Vec<[u32; 4]>,
    degree: Vec<u8>,
    corners: [usize; 3],
    cutpoints: Option<[usize; 3]>,
    cells: Vec<[CellWord; 2]>,
    cell_count: Vec<u8>,
}

/// Shift of copy `i` (1-based) in units of the copied graph's side length.
fn corner_unit(symbol: u8) -> (u32, u32) {
    match symbol {
        1 => (0, 0),
        2 => (0, 1),
        3 => (1, 0),
        _ => unreachable!("symbol checked by caller"),
    }
}

pub fn build_gasket(n: u32) -> Result<GasketGraph> {
    build_gasket_with_cap(n, Caps::from_env().gasket)
}

pub fn build_gasket_with_cap(n: u32, cap: u32) -> Result<GasketGraph> {
    if n > cap || n > 15 {
        return Err(Error::LevelTooLarge { level: n, cap: cap.min(15) });
    }

    // Level 0: the triangle u1, u2, u3.
    let mut coords = vec![TriCoord::new(0, 0), TriCoord::new(0, 1), TriCoord::new(1, 0)];
    let mut edges: Vec<(u32, u32)> = vec![(0, 1), (1, 2), (0, 2)];
    let mut cells: Vec<Vec<CellWord>> = vec![vec![CellWord::EMPTY]; 3];
    let mut corners = [0usize, 1, 2];

    for k in 0..n {
        let side = 1u32 << k;
        let len = coords.len();
        let mut next_coords = Vec::with_capacity(3 * len - 3);
        let mut next_cells: Vec<Vec<CellWord>> = Vec::with_capacity(3 * len - 3);
        let mut next_edges = Vec::with_capacity(3 * edges.len());
        let mut next_corners = [0usize; 3];
        // index maps of the three copies; shared corners resolved explicitly
        let mut maps: [Vec<usize>; 3] = [vec![usize::MAX; len], vec![usize::MAX; len], vec![usize::MAX; len]];

        for copy in 0..3u8 {
            let symbol = copy + 1;
            let (da, db) = corner_unit(symbol);
            // corners of this copy that coincide with an earlier copy
            let shared: Vec<(usize, usize)> = match symbol {
                1 => vec![],
                // copy 2's u1 is copy 1's u2
                2 => vec![(corners[0], maps[0][corners[1]])],
                // copy 3's u1 is copy 1's u3, copy 3's u2 is copy 2's u3
                _ => vec![(corners[0], maps[0][corners[2]]), (corners[1], maps[1][corners[2]])],
            };
            for v in 0..len {
                if let Some(&(_, target)) = shared.iter().find(|(src, _)| *src == v) {
                    maps[copy as usize][v] = target;
                    next_cells[target].extend(cells[v].iter().map(|w| w.push(symbol)));
                    continue;
                }
                let c = coords[v];
                maps[copy as usize][v] = next_coords.len();
                next_coords.push(TriCoord::new(c.a + da * side, c.b + db * side));
                next_cells.push(cells[v].iter().map(|w| w.push(symbol)).collect());
            }
            let map = &maps[copy as usize];
            next_edges.extend(edges.iter().map(|&(i, j)| (map[i as usize] as u32, map[j as usize] as u32)));
            next_corners[copy as usize] = map[corners[copy as usize]];
        }
        coords = next_coords;
        edges = next_edges;
        cells = next_cells;
        corners = next_corners;
    }

    // canonical order
    let mut order: Vec<usize> = (0..coords.len()).collect();
    order.sort_unstable_by_key(|&i| coords[i].key());
    let mut rank = vec![0u32; coords.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r as u32;
    }
    let vertices: Vec<TriCoord> = order.iter().map(|&i| coords[i]).collect();
    let mut adjacency = vec![[u32::MAX; 4]; vertices.len()];
    let mut degree = vec![0u8; vertices.len()];
    for &(i, j) in &edges {
        let (i, j) = (rank[i as usize], rank[j as usize]);
        for (x, y) in [(i, j), (j, i)] {
            let d = &mut degree[x as usize];
            adjacency[x as usize][*d as usize] = y;
            *d += 1;
        }
    }
    for (adj, &d) in adjacency.iter_mut().zip(&degree) {
        adj[..d as usize].sort_unstable();
    }
    let mut cell_arr = vec![[CellWord::EMPTY; 2]; vertices.len()];
    let mut cell_count = vec![0u8; vertices.len()];
    for (i, mut ws) in cells.into_iter().enumerate() {
        ws.sort_unstable();
        let r = rank[i] as usize;
        cell_count[r] = ws.len() as u8;
        for (slot, w) in cell_arr[r].iter_mut().zip(ws) {
            *slot = w;
        }
    }

    let side = 1u32 << n;
    let mut g = GasketGraph {
        level: n,
        vertices,
        adjacency,
        degree,
        corners: corners.map(|c| rank[c] as usize),
        cutpoints: None,
        cells: cell_arr,
        cell_count,
    };
    if n >= 1 {
        let h = side / 2;
        let find = |c: TriCoord| g.index_of(c).expect("cutpoint present");
        g.cutpoints = Some([find(TriCoord::new(0, h)), find(TriCoord::new(h, 0)), find(TriCoord::new(h, h))]);
    }
    Ok(g)
}

impl GasketGraph {
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Side length in edges, `2^n`.
    pub fn side(&self) -> u32 {
        1 << self.level
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.degree.iter().map(|&d| d as usize).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> &[TriCoord] {
        &self.vertices
    }

    pub fn coord(&self, v: usize) -> TriCoord {
        self.vertices[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v][..self.degree[v] as usize].iter().map(|&w| w as usize)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degree[v] as usize
    }

    /// `[u1, u2, u3]` = bottom-left, top, bottom-right.
    pub fn corners(&self) -> [usize; 3] {
        self.corners
    }

    pub fn is_corner(&self, v: usize) -> bool {
        self.corners.contains(&v)
    }

    /// `[p1, p2, p3]` = left-edge, bottom-edge and right-edge midpoints (`n >= 1`).
    pub fn cutpoints(&self) -> Option<[usize; 3]> {
        self.cutpoints
    }

    /// Level-`n` cells containing `v` (one for corners, two otherwise).
    pub fn cell_addresses(&self, v: usize) -> &[CellWord] {
        &self.cells[v][..self.cell_count[v] as usize]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |v| self.neighbors(v).filter(move |&w| w > v).map(move |w| (v, w)))
    }

    pub fn index_of(&self, c: TriCoord) -> Option<usize> {
        self.vertices.binary_search_by_key(&c.key(), |v| v.key()).ok()
    }

    /// Smallest `k` such that `v` is a vertex of the level-`k` graph.
    pub fn vertex_level(&self, v: usize) -> u32 {
        coord_level(self.vertices[v], self.level)
    }

    pub fn rotate_vertex(&self, v: usize, direction: i32) -> usize {
        let c = rotate_coord(self.vertices[v], self.side(), direction);
        self.index_of(c).expect("rotation is an automorphism")
    }

    /// Index map of `psi_w` restricted to the level-`(n - |w|)` vertex set:
    /// entry `i` is the image of canonical vertex `i` of that smaller graph.
    pub fn cell_map(&self, word: &[u8]) -> Result<Vec<usize>> {
        let w = CellWord::from_symbols(word)?;
        let m = w.len() as u32;
        if m > self.level {
            return Err(Error::LevelTooLarge { level: m, cap: self.level });
        }
        let sub = build_gasket_with_cap(self.level - m, u32::MAX)?;
        Ok(sub
            .vertices
            .iter()
            .map(|&c| {
                let img = apply_word(c, self.level - m, word);
                self.index_of(img).expect("image lies in the graph")
            })
            .collect())
    }

    pub fn to_dump(&self) -> GraphDump {
        GraphDump {
            level: self.level,
            vertices: self.vertices.iter().map(|c| [c.a, c.b]).collect(),
            edges: self.edges().map(|(i, j)| [i, j]).collect(),
            corners: self.corners.to_vec(),
            cutpoints: self.cutpoints.map(|c| c.to_vec()).unwrap_or_default(),
        }
    }
}

/// Maps a coordinate at level `from_level` through `psi_w`, `w_1` applied first.
pub fn apply_word(mut c: TriCoord, from_level: u32, word: &[u8]) -> TriCoord {
    for (exp, &s) in (from_level..).zip(word) {
        let (da, db) = corner_unit(s);
        c = TriCoord::new(c.a + (da << exp), c.b + (db << exp));
    }
    c
}

pub(crate) fn coord_level(c: TriCoord, level: u32) -> u32 {
    let tz = |x: u32| if x == 0 { level } else { x.trailing_zeros().min(level) };
    level - tz(c.a).min(tz(c.b))
}

/// Counterclockwise 120-degree rotation for `direction > 0`, clockwise otherwise.
pub fn rotate_coord(c: TriCoord, side: u32, direction: i32) -> TriCoord {
    if direction >= 0 {
        TriCoord::new(side - c.a - c.b, c.a)
    } else {
        TriCoord::new(c.b, side - c.a - c.b)
    }
}

/// Graph distance to the nearest corner, by multi-source BFS.
pub fn corner_distance(g: &GasketGraph) -> Vec<u32> {
    let mut dist = vec![u32::MAX; g.vertex_count()];
    let mut queue = VecDeque::new();
    for c in g.corners() {
        dist[c] = 0;
        queue.push_back(c);
    }
    while let Some(v) = queue.pop_front() {
        let next = dist[v] + 1;
        for w in g.neighbors(v) {
            if dist[w] == u32::MAX {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Graph distance from a single source vertex.
pub fn distance_from(g: &GasketGraph, source: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; g.vertex_count()];
    let mut queue = VecDeque::from([source]);
    dist[source] = 0;
    while let Some(v) = queue.pop_front() {
        for w in g.neighbors(v) {
            if dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Nearest vertex of `g` to `p`; equidistant candidates resolve to the
/// rightmost one, then the topmost one.
pub fn nearest_vertex(g: &GasketGraph, p: Point) -> Result<usize> {
    let tol = 1.0 / (1u64 << (g.level + 4)) as f64;
    // signed distances to the three sides, positive inside
    let bottom = p.y;
    let left = (SQRT3 * p.x - p.y) / 2.0;
    let right = (SQRT3 * (1.0 - p.x) - p.y) / 2.0;
    if !(bottom >= -tol && left >= -tol && right >= -tol) {
        return Err(Error::PointOutsideTriangle { x: p.x, y: p.y });
    }

    let s = g.side() as f64;
    let tb = p.y * 2.0 / SQRT3 * s;
    let ta = p.x * s - tb / 2.0;
    const EPS: f64 = 1e-9;
    let mut best: Option<(f64, usize)> = None;
    for (i, c) in g.vertices.iter().enumerate() {
        let da = c.a as f64 - ta;
        let db = c.b as f64 - tb;
        let d2 = (da + db / 2.0).powi(2) + 0.75 * db * db;
        best = match best {
            None => Some((d2, i)),
            Some((bd, bi)) => {
                if d2 < bd - EPS {
                    Some((d2, i))
                } else if d2 <= bd + EPS && rightmost_then_top(*c, g.vertices[bi]) {
                    Some((d2.min(bd), i))
                } else {
                    Some((bd, bi))
                }
            }
        };
    }
    Ok(best.expect("graph is non-empty").1)
}

fn rightmost_then_top(c: TriCoord, incumbent: TriCoord) -> bool {
    let x = |t: TriCoord| 2 * t.a as u64 + t.b as u64;
    (x(c), c.b) > (x(incumbent), incumbent.b)
}

/// JSON graph dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDump {
    pub level: u32,
    pub vertices: Vec<[u32; 2]>,
    pub edges: Vec<[usize; 2]>,
    pub corners: Vec<usize>,
    pub cutpoints: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(g: &GasketGraph, a: u32, b: u32) -> usize {
        g.index_of(TriCoord::new(a, b)).unwrap()
    }

    #[test]
    fn small_levels_match_figure_counts() {
        for (n, v, e) in [(0, 3, 3), (1, 6, 9), (2, 15, 27)] {
            let g = build_gasket(n).unwrap();
            assert_eq!((g.vertex_count(), g.edge_count()), (v, e), "level {n}");
        }
    }

    #[test]
    fn canonical_order_and_corners() {
        let g = build_gasket(1).unwrap();
        let coords: Vec<_> = g.vertices().iter().map(|c| (c.a, c.b)).collect();
        assert_eq!(coords, vec![(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (0, 2)]);
        assert_eq!(g.corners(), [0, 5, 2]);
        assert_eq!(g.cutpoints(), Some([3, 1, 4]));
        assert!(build_gasket(0).unwrap().cutpoints().is_none());
    }

    #[test]
    fn rejects_levels_over_cap() {
        assert_eq!(build_gasket_with_cap(5, 4).unwrap_err(), Error::LevelTooLarge { level: 5, cap: 4 });
    }

    #[test]
    fn corner_distance_examples() {
        let g1 = build_gasket(1).unwrap();
        let d1 = corner_distance(&g1);
        for c in g1.corners() {
            assert_eq!(d1[c], 0);
        }
        for m in g1.cutpoints().unwrap() {
            assert_eq!(d1[m], 1);
        }
        let g2 = build_gasket(2).unwrap();
        let d2 = corner_distance(&g2);
        assert_eq!(d2[g2.cutpoints().unwrap()[0]], 2);
    }

    #[test]
    fn nearest_vertex_examples() {
        let g = build_gasket(3).unwrap();
        let top = nearest_vertex(&g, Point::new(0.5, SQRT3 / 2.0)).unwrap();
        assert_eq!(top, g.corners()[1]);
        let mid = nearest_vertex(&g, Point::new(0.5, 0.0)).unwrap();
        assert_eq!(g.coord(mid), TriCoord::new(4, 0));

        // centroid of the bottom-left level-1 cell: three equidistant corners
        let g1 = build_gasket(1).unwrap();
        let centroid = Point::new(0.25, SQRT3 / 12.0);
        let v = nearest_vertex(&g1, centroid).unwrap();
        assert_eq!(g1.coord(v), TriCoord::new(1, 0));

        assert!(matches!(nearest_vertex(&g, Point::new(-0.1, 0.0)), Err(Error::PointOutsideTriangle { .. })));
        // within tolerance of the boundary
        assert!(nearest_vertex(&g, Point::new(0.5, -1e-4)).is_ok());
    }

    #[test]
    fn tie_break_prefers_right_then_top() {
        // same plane x (= 1/2 at level 1): the upper one wins
        assert!(rightmost_then_top(TriCoord::new(0, 2), TriCoord::new(1, 0)));
        assert!(!rightmost_then_top(TriCoord::new(1, 0), TriCoord::new(0, 2)));
        // larger plane x wins regardless of height
        assert!(rightmost_then_top(TriCoord::new(1, 1), TriCoord::new(0, 2)));
    }

    #[test]
    fn rotation_examples() {
        let g = build_gasket(1).unwrap();
        let [u1, u2, u3] = g.corners();
        assert_eq!(g.rotate_vertex(u1, 1), u3);
        assert_eq!(g.rotate_vertex(u3, 1), u2);
        assert_eq!(g.rotate_vertex(u2, 1), u1);
        let bottom = idx(&g, 1, 0);
        assert_eq!(g.rotate_vertex(bottom, 1), idx(&g, 1, 1));
        for v in 0..g.vertex_count() {
            let r = g.rotate_vertex(g.rotate_vertex(g.rotate_vertex(v, 1), 1), 1);
            assert_eq!(r, v);
            assert_eq!(g.rotate_vertex(g.rotate_vertex(v, 1), -1), v);
        }
    }

    #[test]
    fn cell_map_examples() {
        let g = build_gasket(1).unwrap();
        let ident = g.cell_map(&[]).unwrap();
        assert_eq!(ident, (0..6).collect::<Vec<_>>());
        let m = g.cell_map(&[1]).unwrap();
        let mut img: Vec<_> = m.iter().map(|&i| g.coord(i)).collect();
        img.sort();
        assert_eq!(img, vec![TriCoord::new(0, 0), TriCoord::new(0, 1), TriCoord::new(1, 0)]);
        assert_eq!(g.cell_map(&[4]).unwrap_err(), Error::InvalidWordSymbol(4));
        assert!(g.cell_map(&[1, 1]).is_err());
    }

    #[test]
    fn cell_word_composition_order() {
        // psi_w = psi_{w2} o psi_{w1}: w = (1, 2) lands in the top level-1 cell
        let g = build_gasket(2).unwrap();
        let m = g.cell_map(&[1, 2]).unwrap();
        let mut img: Vec<_> = m.iter().map(|&i| g.coord(i)).collect();
        img.sort();
        assert_eq!(img, vec![TriCoord::new(0, 2), TriCoord::new(0, 3), TriCoord::new(1, 2)]);
        let top = idx(&g, 0, 4);
        assert_eq!(g.cell_addresses(top).iter().map(|w| w.to_string()).collect::<Vec<_>>(), vec!["22"]);
    }

    #[test]
    fn cell_addresses_cover_all_cells() {
        for n in 0..=5 {
            let g = build_gasket(n).unwrap();
            let mut all: Vec<CellWord> = (0..g.vertex_count()).flat_map(|v| g.cell_addresses(v).to_vec()).collect();
            all.sort();
            all.dedup();
            assert_eq!(all.len(), 3usize.pow(n));
            for v in 0..g.vertex_count() {
                let expected = if g.is_corner(v) { 1 } else { 2 };
                assert_eq!(g.cell_addresses(v).len(), expected);
            }
        }
    }

    #[test]
    fn vertex_levels() {
        let g = build_gasket(3).unwrap();
        assert_eq!(g.vertex_level(g.corners()[1]), 0);
        assert_eq!(g.vertex_level(g.cutpoints().unwrap()[2]), 1);
        assert_eq!(g.vertex_level(idx(&g, 2, 2)), 2);
        assert_eq!(g.vertex_level(idx(&g, 1, 0)), 3);
    }

    #[test]
    fn dump_shape() {
        let d = build_gasket(1).unwrap().to_dump();
        assert_eq!(d.edges.len(), 9);
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.starts_with(r#"{"level":1,"vertices":[[0,0],[1,0],[2,0],[0,1],[1,1],[0,2]],"edges":"#));
        assert!(json.ends_with(r#""corners":[0,5,2],"cutpoints":[3,1,4]}"#));
    }
}
