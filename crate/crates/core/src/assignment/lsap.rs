//! Rectangular linear sum assignment by shortest augmenting paths.

/// Dense row-major cost matrix. `f64::INFINITY` marks a forbidden pair.
#[derive(Clone, Debug, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, fill: f64) -> Self {
        Self {
            rows,
            cols,
            data: vec![fill; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::new(r, c, 0.0);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged cost matrix");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::new(self.cols, self.rows, 0.0);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }
}

/// Optimal assignment of every row to a distinct column (`rows <= cols`).
///
/// Returns the column of each row and the total cost, or `None` when no
/// assignment avoids forbidden (infinite) entries. Columns are scanned in
/// ascending order and equal reduced costs prefer a free column, so the result
/// is deterministic.
pub fn solve_rows(cost: &CostMatrix) -> Option<(Vec<usize>, f64)> {
    let nr = cost.rows;
    let nc = cost.cols;
    assert!(nr <= nc, "solve_rows needs rows <= cols");
    if nr == 0 {
        return Some((Vec::new(), 0.0));
    }

    let mut u = vec![0.0; nr];
    let mut v = vec![0.0; nc];
    let mut shortest = vec![f64::INFINITY; nc];
    let mut path = vec![usize::MAX; nc];
    let mut col4row = vec![usize::MAX; nr];
    let mut row4col = vec![usize::MAX; nc];
    let mut sr = vec![false; nr];
    let mut sc = vec![false; nc];
    let mut remaining: Vec<usize> = Vec::with_capacity(nc);

    for cur_row in 0..nr {
        shortest.fill(f64::INFINITY);
        sr.fill(false);
        sc.fill(false);
        remaining.clear();
        remaining.extend(0..nc);

        let mut min_val = 0.0;
        let mut i = cur_row;
        let sink;
        loop {
            sr[i] = true;
            let mut lowest = f64::INFINITY;
            let mut index = usize::MAX;
            for (it, &j) in remaining.iter().enumerate() {
                let c = cost.get(i, j);
                let r = min_val + c - u[i] - v[j];
                if r < shortest[j] {
                    path[j] = i;
                    shortest[j] = r;
                }
                if shortest[j] < lowest || (shortest[j] == lowest && row4col[j] == usize::MAX) {
                    lowest = shortest[j];
                    index = it;
                }
            }
            min_val = lowest;
            if !min_val.is_finite() {
                return None;
            }
            let j = remaining.remove(index);
            sc[j] = true;
            if row4col[j] == usize::MAX {
                sink = j;
                break;
            }
            i = row4col[j];
        }

        u[cur_row] += min_val;
        for r in 0..nr {
            if sr[r] && r != cur_row {
                u[r] += min_val - shortest[col4row[r]];
            }
        }
        for c in 0..nc {
            if sc[c] {
                v[c] -= min_val - shortest[c];
            }
        }

        let mut j = sink;
        loop {
            let r = path[j];
            row4col[j] = r;
            let prev = col4row[r];
            col4row[r] = j;
            if r == cur_row {
                break;
            }
            j = prev;
        }
    }

    let total = col4row
        .iter()
        .enumerate()
        .map(|(r, &c)| cost.get(r, c))
        .sum();
    Some((col4row, total))
}

/// Optimal partial one-to-one assignment of `min(rows, cols)` pairs for any
/// rectangular matrix. Returns `(row, col)` pairs sorted by row.
pub fn solve_rectangular(cost: &CostMatrix) -> Option<(Vec<(usize, usize)>, f64)> {
    if cost.rows <= cost.cols {
        let (cols, total) = solve_rows(cost)?;
        Some((cols.into_iter().enumerate().collect(), total))
    } else {
        let (rows_for_col, total) = solve_rows(&cost.transpose())?;
        let mut pairs: Vec<(usize, usize)> = rows_for_col
            .into_iter()
            .enumerate()
            .map(|(c, r)| (r, c))
            .collect();
        pairs.sort_unstable();
        Some((pairs, total))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(cost: &CostMatrix) -> f64 {
        fn rec(cost: &CostMatrix, row: usize, used: &mut Vec<bool>) -> f64 {
            if row == cost.rows() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for c in 0..cost.cols() {
                if !used[c] {
                    used[c] = true;
                    best = best.min(cost.get(row, c) + rec(cost, row + 1, used));
                    used[c] = false;
                }
            }
            best
        }
        rec(cost, 0, &mut vec![false; cost.cols()])
    }

    #[test]
    fn small_known_problem() {
        let m = CostMatrix::from_rows(&[vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]]);
        let (cols, total) = solve_rows(&m).unwrap();
        assert_eq!(total, 5.0);
        assert_eq!(cols, vec![1, 0, 2]);
    }

    #[test]
    fn infeasible_is_reported() {
        let inf = f64::INFINITY;
        let m = CostMatrix::from_rows(&[vec![1.0, inf], vec![2.0, inf]]);
        assert!(solve_rows(&m).is_none());
    }

    #[test]
    fn forbidden_entries_are_avoided() {
        let inf = f64::INFINITY;
        let m = CostMatrix::from_rows(&[vec![0.0, 5.0, inf], vec![0.0, inf, inf]]);
        let (cols, total) = solve_rows(&m).unwrap();
        assert_eq!(cols, vec![1, 0]);
        assert_eq!(total, 5.0);
    }

    #[test]
    fn matches_brute_force_on_pseudorandom_matrices() {
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64) / ((1u64 << 53) as f64)
        };
        for n in 1..=5 {
            for m in n..=6 {
                for _ in 0..20 {
                    let mut cost = CostMatrix::new(n, m, 0.0);
                    for r in 0..n {
                        for c in 0..m {
                            cost.set(r, c, (next() * 100.0).floor());
                        }
                    }
                    let (_, total) = solve_rows(&cost).unwrap();
                    assert!((total - brute(&cost)).abs() < 1e-9);
                }
            }
        }
    }
}
