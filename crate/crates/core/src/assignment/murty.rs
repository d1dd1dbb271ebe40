//! Murty's K-best ranked assignment.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::lsap::{solve_rows, CostMatrix};

/// One solution of the ranked assignment: the column of each row and its cost.
#[derive(Clone, Debug, PartialEq)]
pub struct RankedAssignment {
    pub columns: Vec<usize>,
    pub cost: f64,
}

struct Node {
    cost: f64,
    seq: u64,
    columns: Vec<usize>,
    matrix: CostMatrix,
    /// Rows `< fixed` are already forced in `matrix`.
    fixed: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // Min-heap on cost, FIFO on ties.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn force(m: &mut CostMatrix, row: usize, col: usize) {
    let keep = m.get(row, col);
    for c in 0..m.cols() {
        m.set(row, c, f64::INFINITY);
    }
    for r in 0..m.rows() {
        m.set(r, col, f64::INFINITY);
    }
    m.set(row, col, keep);
}

/// Up to `k` lowest-cost row-complete assignments of `cost` (`rows <= cols`),
/// in nondecreasing order of cost. Infinite entries are forbidden.
pub fn murty(cost: &CostMatrix, k: usize) -> Vec<RankedAssignment> {
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let Some((columns, _)) = solve_rows(cost) else {
        return out;
    };
    let total = |cols: &[usize]| -> f64 {
        cols.iter().enumerate().map(|(r, &c)| cost.get(r, c)).sum()
    };

    let mut seq = 0u64;
    let mut heap = BinaryHeap::new();
    heap.push(Node {
        cost: total(&columns),
        seq,
        columns,
        matrix: cost.clone(),
        fixed: 0,
    });

    while let Some(node) = heap.pop() {
        out.push(RankedAssignment {
            columns: node.columns.clone(),
            cost: node.cost,
        });
        if out.len() == k {
            break;
        }
        // Partition the node's solution space around its best solution:
        // child t keeps rows < t fixed to the solution and excludes (t, s_t).
        let mut base = node.matrix;
        let n = node.columns.len();
        for t in node.fixed..n {
            let mut child = base.clone();
            child.set(t, node.columns[t], f64::INFINITY);
            if let Some((cols, _)) = solve_rows(&child) {
                seq += 1;
                heap.push(Node {
                    cost: total(&cols),
                    seq,
                    columns: cols,
                    matrix: child,
                    fixed: t,
                });
            }
            force(&mut base, t, node.columns[t]);
        }
    }
    out
}
