use super::SurrogateError;
use crate::scalar::Real;

pub(crate) fn squared_distance<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| (*x - *y) * (*x - *y)).sum()
}

/// Squared-exponential kernel `signal_var · exp(−‖a − b‖² / 2ℓ²)`.
pub fn rbf_kernel<T: Real>(a: &[T], b: &[T], lengthscale: T, signal_var: T) -> Result<T, SurrogateError> {
    if a.len() != b.len() {
        return Err(SurrogateError::Dimension { expected: a.len(), got: b.len() });
    }
    if !(lengthscale > T::zero()) || !(signal_var > T::zero()) {
        return Err(SurrogateError::Parameter(format!(
            "kernel hyperparameters must be positive (lengthscale {lengthscale}, signal variance {signal_var})"
        )));
    }
    let r2 = squared_distance(a, b);
    Ok(signal_var * (-r2 / (T::lit(2.0) * lengthscale * lengthscale)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(rbf_kernel(&[0.3, 0.1], &[0.3, 0.1], 0.7, 2.5).unwrap(), 2.5);
        let k = rbf_kernel(&[0.0, 0.0], &[1.0, 1.0], 1.0, 1.0).unwrap();
        assert!((k - (-1.0f64).exp()).abs() < 1e-15);
        let k: f64 = rbf_kernel(&[0.0], &[1.0], 10.0, 1.0).unwrap();
        assert!((k - 0.995012).abs() < 1e-6);
        let k32 = rbf_kernel(&[0.0f32], &[1.0], 10.0, 1.0).unwrap();
        assert!((k32 - 0.995012).abs() < 1e-6);
    }

    #[test]
    fn symmetric() {
        let a = [0.2, -0.4, 0.9];
        let b = [-0.1, 0.5, 0.3];
        assert_eq!(rbf_kernel(&a, &b, 0.6, 1.3).unwrap(), rbf_kernel(&b, &a, 0.6, 1.3).unwrap());
    }

    #[test]
    fn rejects_bad_hyperparameters() {
        assert!(rbf_kernel(&[0.0], &[1.0], 0.0, 1.0).is_err());
        assert!(rbf_kernel(&[0.0], &[1.0], 1.0, -1.0).is_err());
        assert!(rbf_kernel(&[0.0], &[1.0, 2.0], 1.0, 1.0).is_err());
    }
}
