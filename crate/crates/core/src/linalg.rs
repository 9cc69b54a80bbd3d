//! Dense stationary-distribution solver shared by the source model and the
//! joint-chain analysis.

const PIVOT_EPS: f64 = 1e-12;

/// Max-norm residual `‖πP − π‖∞`.
pub fn stationary_residual(matrix: &[Vec<f64>], pi: &[f64]) -> f64 {
    let n = pi.len();
    (0..n)
        .map(|j| {
            let flow: f64 = (0..n).map(|i| pi[i] * matrix[i][j]).sum();
            (flow - pi[j]).abs()
        })
        .fold(0.0, f64::max)
}

/// Solves `πP = π`, `Σπ = 1` by Gaussian elimination with partial pivoting on
/// `(Pᵀ − I)` with the last balance equation replaced by the normalization.
///
/// Returns `None` when the system is singular, which happens exactly when the
/// chain has more than one closed communicating class.
pub fn solve_stationary(matrix: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = matrix.len();
    if n == 0 {
        return None;
    }
    if n == 1 {
        return Some(vec![1.0]);
    }
    let mut a = vec![vec![0.0; n + 1]; n];
    for (j, row) in a.iter_mut().enumerate().take(n - 1) {
        for i in 0..n {
            row[i] = matrix[i][j];
        }
        row[j] -= 1.0;
    }
    for x in a[n - 1].iter_mut().take(n) {
        *x = 1.0;
    }
    a[n - 1][n] = 1.0;

    let mut pi = eliminate(a)?;
    // One refinement step keeps the residual at rounding level for larger chains.
    for _ in 0..2 {
        let sum: f64 = pi.iter().sum();
        pi.iter_mut().for_each(|x| *x /= sum);
        let next: Vec<f64> = (0..n).map(|j| (0..n).map(|i| pi[i] * matrix[i][j]).sum()).collect();
        if stationary_residual(matrix, &next) <= stationary_residual(matrix, &pi) {
            pi = next;
        }
    }
    for x in pi.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let sum: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= sum);
    Some(pi)
}

#[allow(clippy::needless_range_loop)]
fn eliminate(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[pivot][col].abs() < PIVOT_EPS {
            return None;
        }
        a.swap(col, pivot);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..=n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (a[r][n] - s) / a[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubly_stochastic_gives_uniform() {
        let m = vec![vec![0.2, 0.5, 0.3], vec![0.3, 0.2, 0.5], vec![0.5, 0.3, 0.2]];
        let pi = solve_stationary(&m).unwrap();
        for x in &pi {
            assert!((x - 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn two_closed_classes_are_singular() {
        let m = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(solve_stationary(&m).is_none());
        let m = vec![
            vec![0.5, 0.5, 0.0, 0.0],
            vec![0.5, 0.5, 0.0, 0.0],
            vec![0.0, 0.0, 0.1, 0.9],
            vec![0.0, 0.0, 0.9, 0.1],
        ];
        assert!(solve_stationary(&m).is_none());
    }

    #[test]
    fn transient_states_get_zero_mass() {
        let m = vec![vec![0.5, 0.5, 0.0], vec![0.0, 0.3, 0.7], vec![0.0, 0.6, 0.4]];
        let pi = solve_stationary(&m).unwrap();
        assert!(pi[0].abs() < 1e-15);
        assert!(stationary_residual(&m, &pi) < 1e-14);
    }

    #[test]
    fn periodic_chain_is_solved() {
        let m = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let pi = solve_stationary(&m).unwrap();
        assert!((pi[0] - 0.5).abs() < 1e-15);
    }
}
