//! Exact Gaussian elimination over the rationals.

use crate::exactnum::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct Singular {
    /// Column for which no nonzero pivot was found.
    pub column: usize,
}

/// Solves the square system `matrix · x = rhs`. Rows are swapped so that the
/// pivot has the largest magnitude in its column; with exact arithmetic this
/// only keeps intermediate numbers small.
pub fn solve(mut matrix: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Result<Vec<Rational>, Singular> {
    let n = rhs.len();
    assert!(matrix.len() == n && matrix.iter().all(|row| row.len() == n), "square system");
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !matrix[r][col].is_zero())
            .max_by(|&a, &b| matrix[a][col].abs().cmp(&matrix[b][col].abs()))
            .ok_or(Singular { column: col })?;
        matrix.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = matrix[col][col].recip().expect("nonzero pivot");
        for row in col + 1..n {
            if matrix[row][col].is_zero() {
                continue;
            }
            let factor = &matrix[row][col] * &inv;
            for k in col..n {
                let delta = &factor * &matrix[col][k];
                matrix[row][k] = &matrix[row][k] - &delta;
            }
            let delta = &factor * &rhs[col];
            rhs[row] = &rhs[row] - &delta;
        }
    }
    let mut x = vec![Rational::zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for k in row + 1..n {
            acc = acc - &matrix[row][k] * &x[k];
        }
        x[row] = &acc / &matrix[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: i64) -> Rational {
        Rational::integer(v)
    }

    #[test]
    fn solves_small_system() {
        // x + 2y = 5, 3x - y = 1  ->  x = 1, y = 2
        let m = vec![vec![r(1), r(2)], vec![r(3), r(-1)]];
        assert_eq!(solve(m, vec![r(5), r(1)]).unwrap(), vec![r(1), r(2)]);
    }

    #[test]
    fn needs_row_swap() {
        let m = vec![vec![r(0), r(1)], vec![r(1), r(0)]];
        assert_eq!(solve(m, vec![r(7), r(-3)]).unwrap(), vec![r(-3), r(7)]);
    }

    #[test]
    fn detects_singularity() {
        let m = vec![vec![r(1), r(2)], vec![r(2), r(4)]];
        assert_eq!(solve(m, vec![r(1), r(2)]), Err(Singular { column: 1 }));
    }

    #[test]
    fn hilbert_system_is_exact() {
        let n = 6;
        let m: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| Rational::frac(1, (i + j + 1) as i64)).collect())
            .collect();
        let x_true: Vec<Rational> = (0..n).map(|i| r(i as i64 - 2)).collect();
        let rhs: Vec<Rational> = m
            .iter()
            .map(|row| row.iter().zip(&x_true).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
            .collect();
        assert_eq!(solve(m, rhs).unwrap(), x_true);
    }
}
