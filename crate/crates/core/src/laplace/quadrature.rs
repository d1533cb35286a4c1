use rayon::prelude::*;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if m == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

fn simpson_weights(intervals: usize) -> Vec<f64> {
    (0..=intervals)
        .map(|i| {
            if i == 0 || i == intervals {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            }
        })
        .collect()
}

/// Composite Simpson rule of `f` on the box `lo..hi` with `intervals` (even)
/// subintervals per axis. Rows along the first axis are summed in parallel
/// and combined in index order, so the result does not depend on scheduling.
pub fn simpson_box(f: &(dyn Fn(&[f64]) -> f64 + Sync), lo: &[f64], hi: &[f64], intervals: usize) -> f64 {
    let n = lo.len();
    let h: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (b - a) / intervals as f64).collect();
    let w = simpson_weights(intervals);
    let inner: usize = (intervals + 1).pow((n - 1) as u32);
    let rows: Vec<f64> = (0..=intervals)
        .into_par_iter()
        .map(|i0| {
            let mut x = vec![0.0; n];
            x[0] = lo[0] + i0 as f64 * h[0];
            let mut row = 0.0;
            for m in 0..inner {
                let mut r = m;
                let mut weight = w[i0];
                for j in (1..n).rev() {
                    let k = r % (intervals + 1);
                    r /= intervals + 1;
                    x[j] = lo[j] + k as f64 * h[j];
                    weight *= w[k];
                }
                row += weight * f(&x);
            }
            row
        })
        .collect();
    let scale: f64 = h.iter().map(|v| v / 3.0).product();
    rows.iter().sum::<f64>() * scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        for m in [1, 2, 5, 16, 33] {
            let (x, w) = gauss_legendre(m);
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            let deg = 2 * m - 1;
            let exact = if deg % 2 == 1 { 2.0 / (deg as f64) } else { 0.0 };
            // ∫ x^{deg−1}, even power
            let got: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(deg as i32 - 1)).sum();
            assert_abs_diff_eq!(got, exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let f = |x: &[f64]| x[0].powi(3) + x[0] * x[1] * x[1];
        let v = simpson_box(&f, &[0.0, 0.0], &[1.0, 2.0], 2);
        assert_abs_diff_eq!(v, 2.0 * 0.25 + 0.5 * 8.0 / 3.0, epsilon = 1e-13);
    }
}
