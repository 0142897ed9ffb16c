//! Pool-adjacent-violators for weighted isotonic least squares with box
//! constraints. Pooling happens on the unconstrained problem; clamping the
//! pooled block values into the box afterwards yields the exact constrained
//! minimizer (prefix sums of within-block residuals keep the sign pattern the
//! optimality argument needs), which the brute-force oracle tests pin down.

/// Weighted isotonic regression: minimize sum_i w_i (f_i - y_i)^2 subject to
/// f_1 <= f_2 <= ... <= f_n. Weights must be positive.
pub fn pava_weighted(y: &[f64], w: &[f64]) -> Vec<f64> {
    let n = y.len();
    debug_assert_eq!(w.len(), n);
    // (value, weight, count) blocks
    let mut vals: Vec<f64> = Vec::with_capacity(n);
    let mut wts: Vec<f64> = Vec::with_capacity(n);
    let mut cnt: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        vals.push(y[i]);
        wts.push(w[i]);
        cnt.push(1);
        while vals.len() > 1 && vals[vals.len() - 2] > vals[vals.len() - 1] {
            let (vb, wb, cb) = (vals.pop().unwrap(), wts.pop().unwrap(), cnt.pop().unwrap());
            let k = vals.len() - 1;
            let wa = wts[k];
            vals[k] = (vals[k] * wa + vb * wb) / (wa + wb);
            wts[k] = wa + wb;
            cnt[k] += cb;
        }
    }
    let mut out = Vec::with_capacity(n);
    for (v, c) in vals.iter().zip(&cnt) {
        out.extend(std::iter::repeat(*v).take(*c));
    }
    out
}

pub fn pava(y: &[f64]) -> Vec<f64> {
    pava_weighted(y, &vec![1.0; y.len()])
}

/// Isotonic least squares under the box [lo, hi].
pub fn pava_box(y: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    pava(y).into_iter().map(|v| v.clamp(lo, hi)).collect()
}

pub fn pava_box_weighted(y: &[f64], w: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    pava_weighted(y, w).into_iter().map(|v| v.clamp(lo, hi)).collect()
}

/// Generalized separable problem: minimize sum_i (q_i f_i^2 - 2 b_i f_i)
/// over monotone f in [lo, hi]^n. Points with q_i = 0 get a tiny ridge so
/// block means stay defined; the perturbation is far below solver tolerance.
pub fn pava_box_linear_quadratic(q: &[f64], b: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let n = q.len();
    debug_assert_eq!(b.len(), n);
    let qmax = q.iter().cloned().fold(0.0f64, f64::max);
    let ridge = if qmax > 0.0 { qmax * 1e-12 } else { 1e-12 };
    let mut w = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let qi = q[i] + ridge;
        w.push(qi);
        // block objective q f^2 - 2 b f is minimized at f = b/q; purely
        // linear points get huge targets, which is exactly what drives the
        // pooled solution onto the box where the LP maximizer lives
        y.push(b[i] / qi);
    }
    pava_box_weighted(&y, &w, lo, hi)
}
