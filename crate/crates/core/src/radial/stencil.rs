//! Five-point finite-difference stencils on arbitrary ascending grids.

/// Fornberg weights for derivatives 0..=2 at `z` from nodes `x`.
pub(crate) fn fornberg<const K: usize>(z: f64, x: &[f64; K]) -> [[f64; K]; 3] {
    let mut c = [[0.0; K]; 3];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..K {
        let mn = i.min(2);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Stencil node positions and sample indices for node `i`.
///
/// Centered where possible; when the grid starts at r = 0 the missing left
/// nodes are mirrored (even extension), otherwise the window is shifted.
fn stencil(r: &[f64], i: usize, mirror: bool) -> ([f64; 5], [usize; 5]) {
    stencil_clear(r, i, mirror, false)
}

/// As [`stencil`]; with `clear_end` the nodes up to `n - 3` use windows that
/// stop before the last node.
fn stencil_clear(r: &[f64], i: usize, mirror: bool, clear_end: bool) -> ([f64; 5], [usize; 5]) {
    let n = r.len();
    let last = if clear_end && n >= 6 && i + 3 <= n { n as isize - 6 } else { n as isize - 5 };
    let mut xs = [0.0; 5];
    let mut idx = [0usize; 5];
    let mirror = mirror && r[0] == 0.0;
    let start: isize = if mirror { (i as isize - 2).min(last) } else { (i as isize - 2).clamp(0, last) };
    for k in 0..5 {
        let j = start + k as isize;
        if j < 0 {
            xs[k] = -r[(-j) as usize];
            idx[k] = (-j) as usize;
        } else {
            xs[k] = r[j as usize];
            idx[k] = j as usize;
        }
    }
    (xs, idx)
}

/// First and second derivatives of samples `u` at every node, treating `u`
/// as even about r = 0 when the grid starts there.
pub fn derivatives(r: &[f64], u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    derivatives_with(r, u, true)
}

/// First and second derivatives with shifted one-sided stencils at both ends.
pub fn derivatives_one_sided(r: &[f64], u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    derivatives_with(r, u, false)
}

/// First derivative of samples that are odd about r = 0 when the grid starts
/// there. Interior stencils stay clear of the last node, where the data may
/// only be Hölder continuous (Dirichlet boundary of a sublinear source).
pub fn derivative_odd(r: &[f64], u: &[f64]) -> Vec<f64> {
    let n = r.len();
    assert!(n >= 5, "stencils need at least 5 nodes");
    (0..n)
        .map(|i| {
            let (xs, idx) = stencil_clear(r, i, true, true);
            let w = fornberg(r[i], &xs);
            (0..5)
                .map(|k| {
                    let v = if xs[k] < 0.0 { -u[idx[k]] } else { u[idx[k]] };
                    w[1][k] * (v - u[i])
                })
                .sum()
        })
        .collect()
}

fn derivatives_with(r: &[f64], u: &[f64], mirror: bool) -> (Vec<f64>, Vec<f64>) {
    let n = r.len();
    assert!(n >= 5, "stencils need at least 5 nodes");
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 0..n {
        let (xs, idx) = stencil(r, i, mirror);
        let w = fornberg(r[i], &xs);
        let (mut a, mut b) = (0.0, 0.0);
        for k in 0..5 {
            let du = u[idx[k]] - u[i];
            a += w[1][k] * du;
            b += w[2][k] * du;
        }
        d1[i] = a;
        d2[i] = b;
    }
    if mirror && r[0] == 0.0 {
        d1[0] = 0.0;
    }
    (d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_reproduce_quartics() {
        let xs = [0.0, 0.3, 0.7, 1.2, 2.0];
        let w = fornberg(0.9, &xs);
        let f = |x: f64| x.powi(4) - 2.0 * x.powi(3) + x;
        let (d1, d2): (f64, f64) =
            (0..5).fold((0.0, 0.0), |(a, b), k| (a + w[1][k] * f(xs[k]), b + w[2][k] * f(xs[k])));
        let x: f64 = 0.9;
        assert!((d1 - (4.0 * x.powi(3) - 6.0 * x * x + 1.0)).abs() < 1e-12);
        assert!((d2 - (12.0 * x * x - 12.0 * x)).abs() < 1e-11);
    }

    #[test]
    fn mirrored_center_is_even() {
        let r: Vec<f64> = (0..20).map(|i| i as f64 * 0.05).collect();
        let u: Vec<f64> = r.iter().map(|x| (x * x).cos()).collect();
        let (d1, d2) = derivatives(&r, &u);
        assert_eq!(d1[0], 0.0);
        assert!(d2[0].abs() < 1e-4);
        let x = r[1];
        assert!((d1[1] + 2.0 * x * (x * x).sin()).abs() < 1e-6);
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |n: usize| {
            let r: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 / (n - 1) as f64).collect();
            let u: Vec<f64> = r.iter().map(|x| x.ln()).collect();
            let (_, d2) = derivatives(&r, &u);
            (2..n - 2).map(|i| (d2[i] + 1.0 / (r[i] * r[i])).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(33), err(65));
        assert!(e1 / e2 > 12.0, "{e1} {e2}");
    }
}
