use super::NumericError;
use crate::scalar::Real;

/// Central-difference gradient: `(f(x + h eᵢ) − f(x − h eᵢ)) / 2h` per component.
pub fn finite_diff_grad<T: Real>(
    mut f: impl FnMut(&[T]) -> T,
    x: &[T],
    h: T,
) -> Result<Vec<T>, NumericError> {
    if !(h > T::zero()) {
        return Err(NumericError::Step(h.as_f64()));
    }
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let fp = f(&probe);
        probe[i] = x[i] - h;
        let fm = f(&probe);
        probe[i] = x[i];
        if !fp.is_finite() || !fm.is_finite() {
            return Err(NumericError::NonFinite {
                what: "function value",
                point: x.iter().map(|v| v.as_f64()).collect(),
            });
        }
        grad.push((fp - fm) / (T::lit(2.0) * h));
    }
    Ok(grad)
}
