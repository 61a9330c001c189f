//! Router-to-router connectivity.
//!
//! Two routers are linked when their centres are at most `2r` apart, i.e. the
//! two coverage disks touch. The network is connected when the link graph has
//! a single component.

use std::collections::VecDeque;

use crate::region::Cell;

#[inline]
pub fn are_linked(a: Cell, b: Cell, radius: u32) -> bool {
    let r = radius as u64;
    a.dist2(b) <= 4 * r * r
}

/// Symmetric neighbour lists without self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyList {
    neighbors: Vec<Vec<usize>>,
}

impl AdjacencyList {
    pub fn build(centers: &[Cell], radius: u32) -> Self {
        let n = centers.len();
        let mut neighbors = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                if are_linked(centers[i], centers[j], radius) {
                    neighbors[i].push(j);
                    neighbors[j].push(i);
                }
            }
        }
        Self { neighbors }
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Component id per router, numbered in order of first appearance.
    pub fn components(&self) -> Vec<usize> {
        let n = self.len();
        let mut comp = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        let mut next = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in &self.neighbors[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |m| m + 1)
    }
}

/// True when all routers form one connected network. A single router is
/// connected; an empty set is not.
pub fn is_connected(centers: &[Cell], radius: u32) -> bool {
    if centers.is_empty() {
        return false;
    }
    // BFS from router 0 over the implicit link graph
    let n = centers.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut reached = 1;
    while let Some(u) = stack.pop() {
        for v in 0..n {
            if !seen[v] && are_linked(centers[u], centers[v], radius) {
                seen[v] = true;
                reached += 1;
                stack.push(v);
            }
        }
    }
    reached == n
}
