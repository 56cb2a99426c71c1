//! Fill-reducing orderings for sparse symmetric factorization.
//!
//! Graph nested dissection with breadth-first level-set separators: a
//! pseudo-peripheral root is found, the BFS level containing the median vertex
//! becomes the separator (thinned to vertices touching the far side), both
//! halves are ordered recursively and the separator is numbered last.

use std::collections::VecDeque;

const LEAF_SIZE: usize = 48;

/// Undirected adjacency structure in compressed form (no self loops).
#[derive(Debug, Clone)]
pub struct Graph {
    ptr: Vec<usize>,
    adj: Vec<usize>,
}

impl Graph {
    /// Builds the graph from per-vertex neighbour lists; the lists are symmetrized.
    pub fn from_neighbours(n: usize, mut edges: impl FnMut(usize, &mut Vec<usize>)) -> Self {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut buf = Vec::new();
        for i in 0..n {
            buf.clear();
            edges(i, &mut buf);
            for &j in &buf {
                if j != i {
                    pairs.push((i, j));
                    pairs.push((j, i));
                }
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut ptr = vec![0usize; n + 1];
        for &(i, _) in &pairs {
            ptr[i + 1] += 1;
        }
        for i in 0..n {
            ptr[i + 1] += ptr[i];
        }
        let adj = pairs.into_iter().map(|(_, j)| j).collect();
        Self { ptr, adj }
    }

    pub fn len(&self) -> usize {
        self.ptr.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.adj[self.ptr[i]..self.ptr[i + 1]]
    }
}

/// Returns `perm` with `perm[new] = old`.
pub fn nested_dissection(graph: &Graph) -> Vec<usize> {
    let n = graph.len();
    let mut order = Vec::with_capacity(n);
    // `part[v]` is the id of the subproblem that currently owns `v`.
    let mut part = vec![0usize; n];
    let mut next_part = 1usize;
    let mut level = vec![usize::MAX; n];
    // Separators are emitted after both halves; a work list keeps the recursion iterative.
    enum Task {
        Split(Vec<usize>, usize),
        Emit(Vec<usize>),
    }
    let mut tasks = vec![Task::Split((0..n).collect(), 0)];

    while let Some(task) = tasks.pop() {
        let (nodes, id) = match task {
            Task::Emit(sep) => {
                order.extend(sep);
                continue;
            }
            Task::Split(nodes, id) => (nodes, id),
        };
        if nodes.len() <= LEAF_SIZE {
            order.extend(nodes);
            continue;
        }
        // Split into connected components first.
        let components = components(graph, &nodes, id, &part, &mut level);
        if components.len() > 1 {
            // Components are independent: order them one after another.
            for comp in components.into_iter().rev() {
                let pid = next_part;
                next_part += 1;
                for &v in &comp {
                    part[v] = pid;
                }
                tasks.push(Task::Split(comp, pid));
            }
            continue;
        }

        let root = pseudo_peripheral(graph, nodes[0], id, &part, &mut level, &nodes);
        let depth = bfs_levels(graph, root, id, &part, &mut level);
        let mut counts = vec![0usize; depth + 1];
        for &v in &nodes {
            counts[level[v]] += 1;
        }
        if depth < 2 {
            order.extend(nodes);
            continue;
        }
        let half = nodes.len() / 2;
        let mut acc = 0;
        let mut mid = 1;
        for (l, &c) in counts.iter().enumerate() {
            acc += c;
            if acc >= half {
                mid = l.clamp(1, depth - 1);
                break;
            }
        }

        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut sep = Vec::new();
        for &v in &nodes {
            let l = level[v];
            if l < mid {
                left.push(v);
            } else if l > mid {
                right.push(v);
            } else if graph
                .neighbours(v)
                .iter()
                .any(|&w| part[w] == id && level[w] == mid + 1)
            {
                sep.push(v);
            } else {
                left.push(v);
            }
        }

        let (lid, rid) = (next_part, next_part + 1);
        next_part += 2;
        for &v in &left {
            part[v] = lid;
        }
        for &v in &right {
            part[v] = rid;
        }
        for &v in &sep {
            part[v] = usize::MAX;
        }
        tasks.push(Task::Emit(sep));
        tasks.push(Task::Split(right, rid));
        tasks.push(Task::Split(left, lid));
    }
    debug_assert_eq!(order.len(), n);
    order
}

fn components(
    graph: &Graph,
    nodes: &[usize],
    id: usize,
    part: &[usize],
    seen: &mut [usize],
) -> Vec<Vec<usize>> {
    for &v in nodes {
        seen[v] = usize::MAX;
    }
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for &start in nodes {
        if seen[start] != usize::MAX {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = 0;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in graph.neighbours(v) {
                if part[w] == id && seen[w] == usize::MAX {
                    seen[w] = 0;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Breadth-first levels from `root` restricted to subproblem `id`; returns the depth.
fn bfs_levels(graph: &Graph, root: usize, id: usize, part: &[usize], level: &mut [usize]) -> usize {
    let mut queue = VecDeque::new();
    level[root] = 0;
    queue.push_back(root);
    let mut depth = 0;
    while let Some(v) = queue.pop_front() {
        let lv = level[v];
        depth = depth.max(lv);
        for &w in graph.neighbours(v) {
            if part[w] == id && level[w] == usize::MAX {
                level[w] = lv + 1;
                queue.push_back(w);
            }
        }
    }
    depth
}

fn reset_levels(nodes: &[usize], level: &mut [usize]) {
    for &v in nodes {
        level[v] = usize::MAX;
    }
}

fn pseudo_peripheral(
    graph: &Graph,
    start: usize,
    id: usize,
    part: &[usize],
    level: &mut [usize],
    nodes: &[usize],
) -> usize {
    let mut root = start;
    reset_levels(nodes, level);
    let mut depth = bfs_levels(graph, root, id, part, level);
    for _ in 0..8 {
        // Farthest vertex of minimum degree.
        let candidate = nodes
            .iter()
            .copied()
            .filter(|&v| level[v] == depth)
            .min_by_key(|&v| (graph.neighbours(v).iter().filter(|&&w| part[w] == id).count(), v))
            .expect("non-empty last level");
        reset_levels(nodes, level);
        let d = bfs_levels(graph, candidate, id, part, level);
        if d > depth {
            root = candidate;
            depth = d;
        } else {
            break;
        }
    }
    reset_levels(nodes, level);
    root
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(nx: usize, ny: usize) -> Graph {
        Graph::from_neighbours(nx * ny, |v, out| {
            let (i, j) = (v % nx, v / nx);
            if i + 1 < nx {
                out.push(v + 1);
            }
            if j + 1 < ny {
                out.push(v + nx);
            }
        })
    }

    #[test]
    fn ordering_is_a_permutation() {
        for (nx, ny) in [(1, 1), (3, 2), (20, 20), (50, 7)] {
            let g = grid(nx, ny);
            let perm = nested_dissection(&g);
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..nx * ny).collect::<Vec<_>>());
        }
    }

    #[test]
    fn disconnected_graph() {
        let g = Graph::from_neighbours(200, |v, out| {
            if v % 2 == 0 && v + 2 < 200 {
                out.push(v + 2);
            }
        });
        let perm = nested_dissection(&g);
        assert_eq!(perm.len(), 200);
    }

    #[test]
    fn deterministic() {
        let g = grid(30, 30);
        assert_eq!(nested_dissection(&g), nested_dissection(&g));
    }
}
