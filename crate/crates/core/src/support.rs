//! Support graph of a non-negative matrix: edge `i -> j` iff `a[i][j] > 0`.

use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::linalg::Matrix;

/// Strongly connected components of the support graph restricted to `nodes`.
/// Components are returned in reverse topological order (sinks first) and
/// contain indices into the full matrix.
pub fn strongly_connected_components(a: &Matrix, nodes: &[usize]) -> Vec<Vec<usize>> {
    let mut g = DiGraph::<usize, ()>::with_capacity(nodes.len(), 0);
    let handles: Vec<NodeIndex> = nodes.iter().map(|&i| g.add_node(i)).collect();
    for (a_pos, &i) in nodes.iter().enumerate() {
        for (b_pos, &j) in nodes.iter().enumerate() {
            if a[(i, j)] > 0.0 {
                g.add_edge(handles[a_pos], handles[b_pos], ());
            }
        }
    }
    tarjan_scc(&g)
        .into_iter()
        .map(|comp| {
            let mut c: Vec<usize> = comp.into_iter().map(|h| g[h]).collect();
            c.sort_unstable();
            c
        })
        .collect()
}

/// All indices that can reach some index in `targets` along support edges
/// (targets included), sorted.
pub fn ancestors(a: &Matrix, targets: &[usize]) -> Vec<usize> {
    let n = a.rows();
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = targets.iter().copied().collect();
    for &t in targets {
        seen[t] = true;
    }
    while let Some(j) = queue.pop_front() {
        for (i, s) in seen.iter_mut().enumerate() {
            if !*s && a[(i, j)] > 0.0 {
                *s = true;
                queue.push_back(i);
            }
        }
    }
    (0..n).filter(|&i| seen[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_is_all_singletons() {
        let a = Matrix::from_rows(vec![
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        let sccs = strongly_connected_components(&a, &[0, 1, 2]);
        assert_eq!(sccs.len(), 3);
        assert_eq!(ancestors(&a, &[2]), vec![0, 1, 2]);
        assert_eq!(ancestors(&a, &[0]), vec![0]);
    }

    #[test]
    fn cycle_is_one_component() {
        let a = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(strongly_connected_components(&a, &[0, 1]), vec![vec![0, 1]]);
    }
}
