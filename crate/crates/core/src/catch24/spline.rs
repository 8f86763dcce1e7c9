//! Least-squares cubic spline with a single interior break, used to detrend
//! series before the periodicity search.

/// Fits a C2 cubic spline with breaks at `0`, `floor(n/2) - 1` and `n - 1`
/// to `y` (sampled at `0..n`) and returns the fitted values.
pub(crate) fn detrend_fit(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mid = (n / 2) as f64 - 1.0;
    let last = (n - 1) as f64;
    let h0 = mid;
    let h1 = last - mid;
    // Clamped extension of the break sequence by repeating the piece widths.
    let knots = [
        -(h1 + h0 + h1),
        -(h1 + h0),
        -h1,
        0.0,
        mid,
        last,
        last + h0,
        last + h0 + h1,
        last + h0 + h1 + h0,
    ];
    // 5 cubic B-splines overlap [0, n-1]
    let n_basis = knots.len() - 4;
    let mut gram = vec![0.0; n_basis * n_basis];
    let mut rhs = vec![0.0; n_basis];
    let basis: Vec<[f64; 5]> = (0..n)
        .map(|i| {
            let x = i as f64;
            let mut row = [0.0; 5];
            for (j, r) in row.iter_mut().enumerate() {
                *r = bspline(&knots, j, 3, x, i < n - 1);
            }
            row
        })
        .collect();
    for (row, &v) in basis.iter().zip(y) {
        for a in 0..n_basis {
            rhs[a] += row[a] * v;
            for b in 0..n_basis {
                gram[a * n_basis + b] += row[a] * row[b];
            }
        }
    }
    let coef = solve_gauss(n_basis, gram, rhs);
    basis
        .iter()
        .map(|row| row.iter().zip(&coef).map(|(b, c)| b * c).sum())
        .collect()
}

/// Cox-de Boor recursion. `half_open` chooses `[t_j, t_{j+1})` intervals;
/// the right end point of the domain is evaluated with closed intervals.
fn bspline(t: &[f64], j: usize, degree: usize, x: f64, half_open: bool) -> f64 {
    if degree == 0 {
        let inside = if half_open {
            t[j] <= x && x < t[j + 1]
        } else {
            t[j] < x && x <= t[j + 1]
        };
        return if inside { 1.0 } else { 0.0 };
    }
    let mut v = 0.0;
    let d1 = t[j + degree] - t[j];
    if d1 != 0.0 {
        v += (x - t[j]) / d1 * bspline(t, j, degree - 1, x, half_open);
    }
    let d2 = t[j + degree + 1] - t[j + 1];
    if d2 != 0.0 {
        v += (t[j + degree + 1] - x) / d2 * bspline(t, j + 1, degree - 1, x, half_open);
    }
    v
}

/// Gaussian elimination without pivoting; the normal matrix is SPD.
fn solve_gauss(n: usize, mut a: Vec<f64>, mut b: Vec<f64>) -> Vec<f64> {
    for i in 0..n {
        for j in i + 1..n {
            let f = a[j * n + i] / a[i * n + i];
            b[j] -= f * b[i];
            for k in i..n {
                a[j * n + k] -= f * a[i * n + k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in i + 1..n {
            acc -= x[j] * a[i * n + j];
        }
        x[i] = acc / a[i * n + i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_a_cubic_exactly() {
        let y: Vec<f64> = (0..101)
            .map(|i| {
                let x = i as f64 / 100.0;
                1.0 - 2.0 * x + 0.5 * x * x + 3.0 * x * x * x
            })
            .collect();
        let fit = detrend_fit(&y);
        for (a, b) in fit.iter().zip(&y) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn reproduces_a_broken_cubic() {
        // cubic with a third-derivative jump at the interior break stays in the space
        let n = 64;
        let brk = (n / 2) as f64 - 1.0;
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let x = i as f64;
                let tail = (x - brk).max(0.0);
                0.3 + 0.01 * x - 1e-4 * x * x + 5e-5 * tail.powi(3)
            })
            .collect();
        let fit = detrend_fit(&y);
        for (a, b) in fit.iter().zip(&y) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }
}
