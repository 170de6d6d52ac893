/// Solve `A x = b` for a small symmetric positive-definite `A` (row-major,
/// `dim * dim`) by in-place Cholesky. Returns false if the factorization
/// breaks down.
pub(crate) fn solve_spd(a: &mut [f64], b: &mut [f64], dim: usize) -> bool {
    debug_assert_eq!(a.len(), dim * dim);
    debug_assert_eq!(b.len(), dim);
    // Factor A = L L^T in the lower triangle.
    for j in 0..dim {
        let mut d = a[j * dim + j];
        for k in 0..j {
            d -= a[j * dim + k] * a[j * dim + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return false;
        }
        let l_jj = d.sqrt();
        a[j * dim + j] = l_jj;
        for i in (j + 1)..dim {
            let mut s = a[i * dim + j];
            for k in 0..j {
                s -= a[i * dim + k] * a[j * dim + k];
            }
            a[i * dim + j] = s / l_jj;
        }
    }
    // Forward substitution L y = b.
    for i in 0..dim {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * dim + k] * b[k];
        }
        b[i] = s / a[i * dim + i];
    }
    // Back substitution L^T x = y.
    for i in (0..dim).rev() {
        let mut s = b[i];
        for k in (i + 1)..dim {
            s -= a[k * dim + i] * b[k];
        }
        b[i] = s / a[i * dim + i];
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use tracklab_rng::Rng;

    #[test]
    fn solves_random_spd_systems() {
        let mut rng = Rng::seed_from(41);
        for dim in 1..9 {
            // A = B B^T + I is SPD.
            let b_mat: Vec<f64> = (0..dim * dim).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let mut a = vec![0.0; dim * dim];
            for i in 0..dim {
                for j in 0..dim {
                    let mut s = if i == j { 1.0 } else { 0.0 };
                    for k in 0..dim {
                        s += b_mat[i * dim + k] * b_mat[j * dim + k];
                    }
                    a[i * dim + j] = s;
                }
            }
            let x_true: Vec<f64> = (0..dim).map(|_| rng.uniform(-2.0, 2.0)).collect();
            let mut rhs = vec![0.0; dim];
            for i in 0..dim {
                for j in 0..dim {
                    rhs[i] += a[i * dim + j] * x_true[j];
                }
            }
            let mut a_work = a.clone();
            assert!(solve_spd(&mut a_work, &mut rhs, dim));
            for i in 0..dim {
                assert!((rhs[i] - x_true[i]).abs() < 1e-9, "dim {dim} i {i}");
            }
        }
    }

    #[test]
    fn rejects_indefinite_matrix() {
        let mut a = vec![1.0, 2.0, 2.0, 1.0]; // eigenvalues 3, -1
        let mut b = vec![1.0, 1.0];
        assert!(!solve_spd(&mut a, &mut b, 2));
    }
}
