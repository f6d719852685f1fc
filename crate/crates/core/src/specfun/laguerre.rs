/// Generalized Laguerre polynomial `L_n^a(x)` by the three-term recurrence
///
/// `(k+1) L_{k+1} = (2k + 1 + a - x) L_k - (k + a) L_{k-1}`.
///
/// Non-finite inputs propagate as NaN.
pub fn laguerre(n: u32, a: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `d/dx L_n^a(x) = -L_{n-1}^{a+1}(x)`.
pub fn laguerre_derivative(n: u32, a: f64, x: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        -laguerre(n - 1, a + 1.0, x)
    }
}
