//! Minimum-cost assignment (Hungarian method with potentials).

/// Assigns every row to a distinct column minimising total cost; requires
/// `rows <= cols`. Returns the column chosen for each row.
pub(crate) fn min_cost_assignment(cost: &[Vec<i64>], cols: usize) -> Vec<usize> {
    let rows = cost.len();
    assert!(rows <= cols, "more rows than columns");
    if rows == 0 {
        return Vec::new();
    }
    // 1-based arrays; column 0 is the virtual start.
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; rows + 1];
    let mut v = vec![0i64; cols + 1];
    let mut owner = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    for i in 1..=rows {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=cols {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; rows];
    for j in 1..=cols {
        if owner[j] != 0 {
            out[owner[j] - 1] = j - 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(cost: &[Vec<i64>], cols: usize) -> i64 {
        fn go(cost: &[Vec<i64>], row: usize, used: &mut Vec<bool>) -> i64 {
            if row == cost.len() {
                return 0;
            }
            let mut best = i64::MAX;
            for j in 0..used.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(cost[row][j] + go(cost, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        go(cost, 0, &mut vec![false; cols])
    }

    #[test]
    fn matches_brute_force() {
        let mut seed = 7u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) % 20) as i64
        };
        for rows in 0..5 {
            for cols in rows..6 {
                let cost: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| next()).collect()).collect();
                let assignment = min_cost_assignment(&cost, cols);
                let total: i64 = assignment.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
                assert_eq!(total, brute(&cost, cols));
                let mut seen = assignment.clone();
                seen.sort();
                seen.dedup();
                assert_eq!(seen.len(), rows);
            }
        }
    }
}
