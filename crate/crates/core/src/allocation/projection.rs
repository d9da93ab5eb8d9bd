/// Euclidean projection of `x` onto `{mu >= 0, phi^T mu = 1}`.
///
/// The minimizer has the form `mu_k = max(0, x_k - theta * phi_k)`. Sorting by
/// the breakpoints `x_k / phi_k` in decreasing order, the active set is the
/// longest prefix whose last breakpoint still exceeds the `theta` solved on
/// that prefix, and `theta = (sum phi_k x_k - 1) / sum phi_k^2` over it.
///
/// `phi` must be strictly positive; the result does not depend on whether
/// `phi` sums to one.
pub fn project_onto_d(x: &[f64], phi: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), phi.len(), "x and phi must have the same length");
    assert!(!x.is_empty(), "cannot project an empty vector");
    debug_assert!(phi.iter().all(|&p| p > 0.0));

    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| (x[b] / phi[b]).total_cmp(&(x[a] / phi[a])));

    let (mut dot, mut norm) = (0.0, 0.0);
    let mut theta = 0.0;
    for &k in &order {
        let next_dot = dot + phi[k] * x[k];
        let next_norm = norm + phi[k] * phi[k];
        let next_theta = (next_dot - 1.0) / next_norm;
        if x[k] / phi[k] <= next_theta && norm > 0.0 {
            break;
        }
        dot = next_dot;
        norm = next_norm;
        theta = next_theta;
    }
    x.iter()
        .zip(phi)
        .map(|(&xk, &pk)| (xk - theta * pk).max(0.0))
        .collect()
}
