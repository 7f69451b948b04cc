use crate::error::{invalid, Result};

/// Derivative of a uniformly sampled series: second-order central differences
/// in the interior, second-order one-sided stencils at both ends.
pub fn derivative_on_grid(values: &[f64], dt: f64) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 3 {
        return invalid(format!("need at least 3 samples to differentiate, got {n}"));
    }
    if !(dt > 0.0) {
        return invalid(format!("grid spacing must be positive, got {dt}"));
    }
    let mut out = Vec::with_capacity(n);
    out.push((-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dt));
    out.extend(values.windows(3).map(|w| (w[2] - w[0]) / (2.0 * dt)));
    out.push((3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * dt));
    Ok(out)
}
