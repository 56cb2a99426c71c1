//! Uniformly refined triangulations of the unit square.
//!
//! Level `L` splits the square into `2^L x 2^L` grid squares, each cut into two
//! triangles along its bottom-left to top-right diagonal. Vertices and edges are
//! numbered lexicographically (by `y`, then `x`), so two meshes of the same level
//! are identical entity for entity.

use std::io::Write;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest refinement level accepted by [`build_uniform_mesh`].
pub const MAX_LEVEL: u32 = 12;

/// An edge as a sorted vertex pair together with its (one or two) neighbouring cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub cells: [Option<usize>; 2],
}

impl Edge {
    pub fn cell_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }
}

/// Boundary classification of vertices and edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryFlags {
    pub vertices: Vec<bool>,
    pub edges: Vec<bool>,
}

impl BoundaryFlags {
    pub fn vertex_count(&self) -> usize {
        self.vertices.iter().filter(|&&b| b).count()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().filter(|&&b| b).count()
    }
}

#[derive(Debug, Clone)]
pub struct Mesh<T> {
    level: u32,
    vertices: Vec<[T; 2]>,
    /// Counterclockwise vertex triples.
    cells: Vec<[usize; 3]>,
    /// Local edge `k` of a cell is opposite its local vertex `k`.
    cell_edges: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    boundary: BoundaryFlags,
}

impl<T: Real> Mesh<T> {
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Grid spacing `h = 2^-L`.
    pub fn h(&self) -> T {
        T::one() / T::from_usize_lossy(1usize << self.level)
    }

    pub fn vertices(&self) -> &[[T; 2]] {
        &self.vertices
    }

    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    pub fn cell_edges(&self) -> &[[usize; 3]] {
        &self.cell_edges
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn boundary(&self) -> &BoundaryFlags {
        &self.boundary
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn cell_coordinates(&self, cell: usize) -> [[T; 2]; 3] {
        let [a, b, c] = self.cells[cell];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Signed area of a cell (positive for counterclockwise orientation).
    pub fn signed_area(&self, cell: usize) -> T {
        let [p0, p1, p2] = self.cell_coordinates(cell);
        let half = T::lit(0.5);
        half * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]))
    }

    pub fn edge_midpoint(&self, edge: usize) -> [T; 2] {
        let [a, b] = self.edges[edge].vertices;
        let half = T::lit(0.5);
        [
            half * (self.vertices[a][0] + self.vertices[b][0]),
            half * (self.vertices[a][1] + self.vertices[b][1]),
        ]
    }

    /// Plain-text dump: a header line, then one `v x y` line per vertex and one
    /// `c a b c` line per cell.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# level {} vertices {} cells {}",
            self.level,
            self.num_vertices(),
            self.num_cells()
        )?;
        for v in &self.vertices {
            writeln!(out, "v {} {}", v[0], v[1])?;
        }
        for c in &self.cells {
            writeln!(out, "c {} {} {}", c[0], c[1], c[2])?;
        }
        Ok(())
    }
}

/// Builds the level-`level` triangulation of `[0,1]^2`.
pub fn build_uniform_mesh<T: Real>(level: u32) -> Result<Mesh<T>> {
    if level > MAX_LEVEL {
        return Err(Error::LevelTooLarge {
            level,
            max: MAX_LEVEL,
        });
    }
    let n = 1usize << level;
    let stride = n + 1;
    let inv_n = T::one() / T::from_usize_lossy(n);

    let mut vertices = Vec::with_capacity(stride * stride);
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([T::from_usize_lossy(i) * inv_n, T::from_usize_lossy(j) * inv_n]);
        }
    }

    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let v00 = j * stride + i;
            let v10 = v00 + 1;
            let v01 = v00 + stride;
            let v11 = v01 + 1;
            cells.push([v00, v10, v11]);
            cells.push([v00, v11, v01]);
        }
    }

    // Edge keys are twice the midpoint in grid units, which are distinct integers.
    let key = |a: usize, b: usize| {
        let (ia, ja) = (a % stride, a / stride);
        let (ib, jb) = (b % stride, b / stride);
        (ja + jb, ia + ib)
    };
    let mut local: Vec<((usize, usize), [usize; 2], usize, usize)> = Vec::with_capacity(6 * n * n);
    for (c, tri) in cells.iter().enumerate() {
        for k in 0..3 {
            let a = tri[(k + 1) % 3];
            let b = tri[(k + 2) % 3];
            let pair = if a < b { [a, b] } else { [b, a] };
            local.push((key(a, b), pair, c, k));
        }
    }
    local.sort_by_key(|&(key, _, cell, k)| (key, cell, k));

    let mut edges: Vec<Edge> = Vec::with_capacity(stride * stride + 2 * n * n);
    let mut cell_edges = vec![[usize::MAX; 3]; cells.len()];
    let mut last_key = None;
    for (key, pair, cell, k) in local {
        if last_key != Some(key) {
            edges.push(Edge {
                vertices: pair,
                cells: [Some(cell), None],
            });
            last_key = Some(key);
        } else {
            let e = edges.last_mut().expect("edge present");
            debug_assert_eq!(e.vertices, pair);
            debug_assert!(e.cells[1].is_none());
            e.cells[1] = Some(cell);
        }
        cell_edges[cell][k] = edges.len() - 1;
    }

    let mut mesh = Mesh {
        level,
        vertices,
        cells,
        cell_edges,
        edges,
        boundary: BoundaryFlags {
            vertices: Vec::new(),
            edges: Vec::new(),
        },
    };
    mesh.boundary = classify_boundary(&mesh);
    Ok(mesh)
}

/// Flags the vertices and edges lying on the boundary of the unit square.
///
/// An edge is a boundary edge iff exactly one cell contains it; a vertex is on
/// the boundary iff one of its grid coordinates is `0` or `2^L`.
pub fn classify_boundary<T: Real>(mesh: &Mesh<T>) -> BoundaryFlags {
    let n = 1usize << mesh.level;
    let stride = n + 1;
    let vertices = (0..mesh.num_vertices())
        .map(|v| {
            let (i, j) = (v % stride, v / stride);
            i == 0 || j == 0 || i == n || j == n
        })
        .collect();
    let edges = mesh.edges.iter().map(|e| e.cell_count() == 1).collect();
    BoundaryFlags { vertices, edges }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(level: u32) -> (usize, usize, usize) {
        let m = build_uniform_mesh::<f64>(level).unwrap();
        (m.num_vertices(), m.num_cells(), m.num_edges())
    }

    #[test]
    fn entity_counts() {
        assert_eq!(counts(0), (4, 2, 5));
        assert_eq!(counts(2), (25, 32, 56));
        assert_eq!(counts(3), (81, 128, 208));
        for level in 0..6 {
            let (v, t, e) = counts(level);
            let n = 1usize << level;
            assert_eq!(v, (n + 1) * (n + 1));
            assert_eq!(t, 2 * n * n);
            assert_eq!(e, v + t - 1);
        }
    }

    #[test]
    fn level_cap() {
        assert!(matches!(
            build_uniform_mesh::<f64>(MAX_LEVEL + 1),
            Err(Error::LevelTooLarge { .. })
        ));
    }

    #[test]
    fn boundary_counts() {
        let m = build_uniform_mesh::<f64>(2).unwrap();
        assert_eq!(m.boundary().vertex_count(), 16);
        assert_eq!(m.boundary().edge_count(), 16);

        let m0 = build_uniform_mesh::<f64>(0).unwrap();
        assert_eq!(m0.boundary().vertex_count(), 4);
        assert_eq!(m0.boundary().edge_count(), 4);
        let diagonal = m0
            .edges()
            .iter()
            .position(|e| e.vertices == [0, 3])
            .unwrap();
        assert!(!m0.boundary().edges[diagonal]);
    }

    #[test]
    fn boundary_edges_lie_on_the_boundary() {
        let m = build_uniform_mesh::<f64>(3).unwrap();
        for (e, edge) in m.edges().iter().enumerate() {
            let mid = m.edge_midpoint(e);
            let on = mid.iter().any(|&x| x == 0.0 || x == 1.0);
            assert_eq!(on, m.boundary().edges[e]);
            if on {
                assert!(edge.vertices.iter().all(|&v| m.boundary().vertices[v]));
            }
        }
    }

    #[test]
    fn cells_are_positively_oriented_with_uniform_area() {
        for level in 0..5 {
            let m = build_uniform_mesh::<f64>(level).unwrap();
            let h = m.h();
            let mut total = 0.0;
            for c in 0..m.num_cells() {
                let a = m.signed_area(c);
                assert!((a - 0.5 * h * h).abs() < 1e-15);
                total += a;
            }
            assert!((total - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn edge_cell_adjacency_is_consistent() {
        let m = build_uniform_mesh::<f64>(3).unwrap();
        for (c, edges) in m.cell_edges().iter().enumerate() {
            let tri = m.cells()[c];
            for k in 0..3 {
                let e = &m.edges()[edges[k]];
                assert!(e.cells.contains(&Some(c)));
                let mut want = [tri[(k + 1) % 3], tri[(k + 2) % 3]];
                want.sort_unstable();
                assert_eq!(e.vertices, want);
            }
        }
        for (e, edge) in m.edges().iter().enumerate() {
            for c in edge.cells.iter().flatten() {
                assert!(m.cell_edges()[*c].contains(&e));
            }
            let expected = if m.boundary().edges[e] { 1 } else { 2 };
            assert_eq!(edge.cell_count(), expected);
        }
    }

    #[test]
    fn refinement_nests_vertices() {
        let coarse = build_uniform_mesh::<f64>(2).unwrap();
        let fine = build_uniform_mesh::<f64>(3).unwrap();
        for v in coarse.vertices() {
            assert!(fine.vertices().iter().any(|w| w == v));
        }
    }

    #[test]
    fn edges_ordered_lexicographically() {
        let m = build_uniform_mesh::<f64>(2).unwrap();
        let mids: Vec<_> = (0..m.num_edges()).map(|e| m.edge_midpoint(e)).collect();
        for w in mids.windows(2) {
            assert!((w[0][1], w[0][0]) < (w[1][1], w[1][0]));
        }
    }

    #[test]
    fn single_precision_mesh() {
        let m = build_uniform_mesh::<f32>(3).unwrap();
        let total: f32 = (0..m.num_cells()).map(|c| m.signed_area(c)).sum();
        assert!((total - 1.0).abs() < 1e-5);
    }

    #[test]
    fn text_dump_has_one_line_per_entity() {
        let m = build_uniform_mesh::<f64>(1).unwrap();
        let mut buf = Vec::new();
        m.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 9 + 8);
        assert!(text.lines().nth(1).unwrap().starts_with("v 0 0"));
    }
}
