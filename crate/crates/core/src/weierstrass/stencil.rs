//! Finite-difference and edge-quadrature weights on uniform grid axes.

/// Fornberg's recursion: `w[m][k]` is the weight of `f(x[k])` in the
/// approximation of `f^(m)(x0)`, for `m ≤ max_order`.
pub(crate) fn fd_weights(x0: f64, x: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - x0;
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

/// Derivative stencil width (sixth order at centred nodes).
pub(crate) const DIFF_WIDTH: usize = 7;
/// Edge quadrature stencil width (sixth order).
pub(crate) const EDGE_WIDTH: usize = 6;

const GAUSS4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

/// One grid axis: `n` nodes with spacing `step`, optionally periodic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Axis {
    pub n: usize,
    pub step: f64,
    pub periodic: bool,
}

impl Axis {
    /// Offsets (relative to `i`) and node indices of a `width`-point window
    /// whose centre is as close to `i + shift` as the grid allows.
    fn window(&self, i: usize, width: usize, lead: usize) -> Vec<(f64, usize)> {
        let n = self.n as isize;
        let i = i as isize;
        let start = if self.periodic { i - lead as isize } else { (i - lead as isize).clamp(0, n - width as isize) };
        (start..start + width as isize).map(|k| ((k - i) as f64, k.rem_euclid(n) as usize)).collect()
    }

    /// Weights for the first and second derivative at node `i`.
    pub fn diff(&self, i: usize) -> Vec<(usize, f64, f64)> {
        let win = self.window(i, DIFF_WIDTH, DIFF_WIDTH / 2);
        let xs: Vec<f64> = win.iter().map(|w| w.0).collect();
        let c = fd_weights(0.0, &xs, 2);
        win.iter()
            .enumerate()
            .map(|(k, w)| (w.1, c[1][k] / self.step, c[2][k] / (self.step * self.step)))
            .collect()
    }

    /// Weights of `∫_{x_i}^{x_{i+1}} f` from a six-point interpolant.
    pub fn edge(&self, i: usize) -> Vec<(usize, f64)> {
        let win = self.window(i, EDGE_WIDTH, EDGE_WIDTH / 2 - 1);
        let xs: Vec<f64> = win.iter().map(|w| w.0).collect();
        let mut out: Vec<(usize, f64)> = win.iter().map(|w| (w.1, 0.0)).collect();
        for (g, wg) in GAUSS4 {
            let c = fd_weights(0.5 * (g + 1.0), &xs, 0);
            for (o, ck) in out.iter_mut().zip(&c[0]) {
                o.1 += 0.5 * wg * ck * self.step;
            }
        }
        out
    }

    /// Nodes whose centred derivative stencil fits inside the grid.
    pub fn interior(&self) -> std::ops::Range<usize> {
        if self.periodic {
            0..self.n
        } else {
            DIFF_WIDTH / 2..self.n.saturating_sub(DIFF_WIDTH / 2)
        }
    }
}
