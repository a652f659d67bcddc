/// Finite-difference weights for the `order`-th derivative at 0 on `nodes`
/// (Fornberg's recursion).
pub fn fornberg_weights(order: usize, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    assert!(n > order, "need more than {order} nodes");
    // c[j][k]: weight of node j for derivative k
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0];
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i];
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|w| w[order]).collect()
}

/// Smallest symmetric node set for a central `order`-th derivative:
/// `order + 1` nodes, integers `−k..=k` for even orders and `±1, …, ±k`
/// otherwise.
pub fn central_nodes(order: usize) -> Vec<f64> {
    if order.is_multiple_of(2) {
        let k = (order / 2) as i64;
        (-k..=k).map(|i| i as f64).collect()
    } else {
        let k = order.div_ceil(2) as i64;
        (-k..=k).filter(|&i| i != 0).map(|i| i as f64).collect()
    }
}

/// Central stencil `(nodes, weights)` for unit step.
pub fn central_stencil(order: usize) -> (Vec<f64>, Vec<f64>) {
    let nodes = central_nodes(order);
    let w = fornberg_weights(order, &nodes);
    (nodes, w)
}
