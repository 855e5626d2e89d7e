//! Test oracles that share no code path with the exponential-sum engine.
#![allow(dead_code)]

use expburgers::{BigReal, Real};

/// Gauss-Legendre nodes and weights on `[0, 1]` in the working precision.
pub fn gauss_legendre(n: usize) -> (Vec<BigReal>, Vec<BigReal>) {
    let one = BigReal::from_i64(1);
    let two = BigReal::from_i64(2);
    let tol = BigReal::epsilon() * BigReal::from_i64(64);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = BigReal::from_f64(guess);
        let mut dp = one.clone();
        for _ in 0..200 {
            let (p, d) = legendre(n, &x);
            dp = d;
            let step = p / dp.clone();
            x = x - step.clone();
            if step.abs() < tol {
                let (_, d) = legendre(n, &x);
                dp = d;
                break;
            }
        }
        let w = two.clone() / ((one.clone() - x.clone() * x.clone()) * dp.clone() * dp);
        nodes.push((one.clone() + x) / two.clone());
        weights.push(w / two.clone());
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: &BigReal) -> (BigReal, BigReal) {
    let mut prev = BigReal::from_i64(1);
    let mut cur = x.clone();
    for j in 2..=n as i64 {
        let next = (BigReal::from_i64(2 * j - 1) * x.clone() * cur.clone()
            - BigReal::from_i64(j - 1) * prev.clone())
            / BigReal::from_i64(j);
        prev = cur;
        cur = next;
    }
    let n_big = BigReal::from_i64(n as i64);
    let deriv = n_big * (x.clone() * cur.clone() - prev) / (x.clone() * x.clone() - BigReal::from_i64(1));
    (cur, deriv)
}

/// Lagrange basis through `nodes`, evaluated at `x`.
fn lagrange_basis(nodes: &[BigReal], x: &BigReal) -> Vec<BigReal> {
    (0..nodes.len())
        .map(|j| {
            let mut value = BigReal::from_i64(1);
            for (l, node) in nodes.iter().enumerate() {
                if l != j {
                    value = value * (x.clone() - node.clone()) / (nodes[j].clone() - node.clone());
                }
            }
            value
        })
        .collect()
}

/// Quadrature layout for [`neumann_coefficients`].
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub panels: usize,
    /// Collocation nodes per panel.
    pub nodes: usize,
    /// Gauss points for each kernel integral.
    pub kernel_points: usize,
}

/// `v_hat(k, t_end)` for `k = 1..=k_max` from the integral equation
///
/// `v(k, t) = delta_{k1} e^{-rho_k t}
///     + (k/2) int_0^t e^{-(t-s) rho_k} sum_{p+q=k} v(p, s) v(q, s) ds`.
///
/// Time is cut into panels; on each panel the convolution is interpolated
/// through Gauss nodes and integrated against the kernel by a second Gauss
/// rule, restarting from the panel's left end by the semigroup property.
pub fn neumann_coefficients(rates: &[BigReal], t_end: &BigReal, q: Quadrature) -> Vec<BigReal> {
    let k_max = rates.len();
    let h = t_end.clone() / BigReal::from_i64(q.panels as i64);
    let (x, _) = gauss_legendre(q.nodes);
    let (y, g) = gauss_legendre(q.kernel_points);
    let taus: Vec<BigReal> = x.iter().map(|xi| xi.clone() * h.clone()).collect();
    // evaluation points: the collocation nodes, then the panel end
    let mut points = taus.clone();
    points.push(h.clone());

    // basis[i][r][j] = L_j(points[i] * y_r)
    let basis: Vec<Vec<Vec<BigReal>>> = points
        .iter()
        .map(|p| {
            y.iter()
                .map(|yr| lagrange_basis(&taus, &(p.clone() * yr.clone())))
                .collect()
        })
        .collect();

    // weights[k][i][j] = int_0^{p_i} e^{-rho_k (p_i - s)} L_j(s) ds
    let mut decay = Vec::with_capacity(k_max);
    let mut weights = Vec::with_capacity(k_max);
    for rho in rates {
        let mut dk = Vec::with_capacity(points.len());
        let mut wk = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            dk.push((-(rho.clone() * p.clone())).exp());
            let kernel: Vec<BigReal> = y
                .iter()
                .zip(&g)
                .map(|(yr, gr)| {
                    gr.clone()
                        * p.clone()
                        * (-(rho.clone() * p.clone() * (BigReal::from_i64(1) - yr.clone()))).exp()
                })
                .collect();
            let row = (0..q.nodes)
                .map(|j| {
                    kernel
                        .iter()
                        .zip(&basis[i])
                        .fold(BigReal::from_i64(0), |acc, (w, b)| acc + w.clone() * b[j].clone())
                })
                .collect::<Vec<_>>();
            wk.push(row);
        }
        decay.push(dk);
        weights.push(wk);
    }

    let mut start = vec![BigReal::from_i64(0); k_max];
    start[0] = BigReal::from_i64(1);
    for _ in 0..q.panels {
        // values[k][i] at points[i] of this panel
        let mut values: Vec<Vec<BigReal>> = Vec::with_capacity(k_max);
        for k in 1..=k_max {
            let conv: Vec<BigReal> = (0..q.nodes)
                .map(|j| {
                    (1..k).fold(BigReal::from_i64(0), |acc, p| {
                        acc + values[p - 1][j].clone() * values[k - p - 1][j].clone()
                    })
                })
                .collect();
            let half_k = BigReal::from_i64(k as i64) / BigReal::from_i64(2);
            let row: Vec<BigReal> = (0..points.len())
                .map(|i| {
                    let forced = weights[k - 1][i]
                        .iter()
                        .zip(&conv)
                        .fold(BigReal::from_i64(0), |acc, (w, c)| acc + w.clone() * c.clone());
                    decay[k - 1][i].clone() * start[k - 1].clone() + half_k.clone() * forced
                })
                .collect();
            values.push(row);
        }
        for k in 0..k_max {
            start[k] = values[k][q.nodes].clone();
        }
    }
    start
}
