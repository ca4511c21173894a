use statrs::function::erf::erfc;

use super::SurrogateError;
use crate::scalar::Real;

/// Standard normal CDF.
pub fn normal_cdf<T: Real>(z: T) -> T {
    T::lit(0.5 * erfc(-z.as_f64() / std::f64::consts::SQRT_2))
}

/// Standard normal density.
pub fn normal_pdf<T: Real>(z: T) -> T {
    (-(z * z) / T::lit(2.0)).exp() / (T::lit(2.0) * T::PI()).sqrt()
}

/// Expected improvement below `best` of a normal prediction `(mean, std)` (minimization).
///
/// Zero when `std` is zero, regardless of the mean.
pub fn expected_improvement<T: Real>(mean: T, std: T, best: T) -> Result<T, SurrogateError> {
    if std < T::zero() || std.is_nan() {
        return Err(SurrogateError::Parameter(format!("predictive std must be non-negative, got {std}")));
    }
    if std == T::zero() {
        return Ok(T::zero());
    }
    let imp = best - mean;
    let z = imp / std;
    let ei = imp * normal_cdf(z) + std * normal_pdf(z);
    Ok(ei.max(T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_std_is_zero() {
        assert_eq!(expected_improvement(-100.0, 0.0, 5.0).unwrap(), 0.0);
    }

    #[test]
    fn reference_values() {
        let ei: f64 = expected_improvement(1.0, 1.0, 1.0).unwrap();
        assert!((ei - 0.398942).abs() < 1e-6);
        let ei: f64 = expected_improvement(-1.0, 1.0, 0.0).unwrap();
        assert!((ei - 1.083315).abs() < 1e-6);
        let ei32 = expected_improvement(1.0f32, 1.0, 1.0).unwrap();
        assert!((ei32 - 0.398942).abs() < 1e-6);
    }

    #[test]
    fn negative_std_rejected() {
        assert!(expected_improvement(0.0, -1e-3, 1.0).is_err());
    }

    #[test]
    fn monotone_in_mean_and_std() {
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let ei = expected_improvement(-3.0 + 0.12 * i as f64, 0.7, 0.0).unwrap();
            assert!(ei < prev && ei >= 0.0);
            prev = ei;
        }
        let mut prev = 0.0;
        for i in 1..50 {
            let ei = expected_improvement(0.4, 0.05 * i as f64, 0.0).unwrap();
            assert!(ei >= prev);
            prev = ei;
        }
    }
}
