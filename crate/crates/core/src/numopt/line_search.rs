//! Strong Wolfe line search with cubic-interpolation zoom.

use crate::scalar::{all_finite, dot, Real};

/// Accepted trial point, carrying the objective state so the caller does not re-evaluate.
#[derive(Debug, Clone)]
pub struct LineSearchPoint<T> {
    pub step: T,
    pub x: Vec<T>,
    pub value: T,
    pub gradient: Vec<T>,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchFailure {
    pub evaluations: usize,
}

struct Trial<T> {
    step: T,
    value: T,
    slope: T,
    x: Vec<T>,
    gradient: Vec<T>,
}

struct Probe<'a, T, F> {
    objective: &'a mut F,
    x: &'a [T],
    direction: &'a [T],
    evaluations: usize,
}

impl<T: Real, F: FnMut(&[T], &mut [T]) -> T> Probe<'_, T, F> {
    fn at(&mut self, step: T) -> Option<Trial<T>> {
        let x: Vec<T> = self.x.iter().zip(self.direction).map(|(&xi, &di)| xi + step * di).collect();
        let mut gradient = vec![T::zero(); x.len()];
        let value = (self.objective)(&x, &mut gradient);
        self.evaluations += 1;
        if !value.is_finite() || !all_finite(&gradient) {
            return None;
        }
        let slope = dot(&gradient, self.direction);
        Some(Trial { step, value, slope, x, gradient })
    }
}

/// Minimizer of the cubic through two points with known slopes, or `None` when degenerate.
fn cubic_minimizer<T: Real>(a: T, fa: T, da: T, b: T, fb: T, db: T) -> Option<T> {
    let three = T::lit(3.0);
    let d1 = da + db - three * (fa - fb) / (a - b);
    let disc = d1 * d1 - da * db;
    if !(disc >= T::zero()) {
        return None;
    }
    let d2 = (b - a).signum() * disc.sqrt();
    let denom = db - da + T::lit(2.0) * d2;
    if denom == T::zero() {
        return None;
    }
    let t = b - (b - a) * (db + d2 - d1) / denom;
    t.is_finite().then_some(t)
}

/// Finds a step along `direction` satisfying the strong Wolfe conditions.
///
/// `direction` must be a descent direction at `x`. Non-finite trial values are treated as
/// overshoot and the step is shrunk toward the last good point.
#[allow(clippy::too_many_arguments)]
pub fn strong_wolfe<T, F>(
    objective: &mut F,
    x: &[T],
    value: T,
    gradient: &[T],
    direction: &[T],
    initial_step: T,
    c1: T,
    c2: T,
    max_steps: usize,
) -> Result<LineSearchPoint<T>, LineSearchFailure>
where
    T: Real,
    F: FnMut(&[T], &mut [T]) -> T,
{
    let slope0 = dot(gradient, direction);
    let mut probe = Probe { objective, x, direction, evaluations: 0 };
    if !(slope0 < T::zero()) {
        return Err(LineSearchFailure { evaluations: 0 });
    }
    let armijo = |t: &Trial<T>| t.value <= value + c1 * t.step * slope0;
    let curvature = |t: &Trial<T>| t.slope.abs() <= -c2 * slope0;
    let accept = |t: Trial<T>, evaluations| LineSearchPoint {
        step: t.step,
        x: t.x,
        value: t.value,
        gradient: t.gradient,
        evaluations,
    };

    let mut prev = Trial { step: T::zero(), value, slope: slope0, x: x.to_vec(), gradient: gradient.to_vec() };
    let mut step = initial_step;
    let mut bracket = None;
    let half = T::lit(0.5);

    for i in 0..max_steps {
        let Some(trial) = probe.at(step) else {
            step = prev.step + half * (step - prev.step);
            continue;
        };
        if !armijo(&trial) || (i > 0 && trial.value >= prev.value) {
            bracket = Some((prev, trial));
            break;
        }
        if curvature(&trial) {
            let n = probe.evaluations;
            return Ok(accept(trial, n));
        }
        if trial.slope >= T::zero() {
            bracket = Some((trial, prev));
            break;
        }
        step = trial.step * T::lit(2.0);
        prev = trial;
    }

    let Some((mut lo, mut hi)) = bracket else {
        return Err(LineSearchFailure { evaluations: probe.evaluations });
    };

    let tenth = T::lit(0.1);
    for _ in 0..max_steps {
        let (a, b) = (lo.step, hi.step);
        let width = (b - a).abs();
        let (left, right) = if a < b { (a, b) } else { (b, a) };
        let mut t = cubic_minimizer(a, lo.value, lo.slope, b, hi.value, hi.slope)
            .unwrap_or(half * (a + b));
        if !(t > left + tenth * width && t < right - tenth * width) {
            t = half * (a + b);
        }
        if width <= T::epsilon() * left.abs().max(T::one()) {
            break;
        }
        let Some(trial) = probe.at(t) else {
            hi = Trial { step: t, value: T::infinity(), slope: T::zero(), x: Vec::new(), gradient: Vec::new() };
            continue;
        };
        if !armijo(&trial) || trial.value >= lo.value {
            hi = trial;
        } else {
            if curvature(&trial) {
                let n = probe.evaluations;
                return Ok(accept(trial, n));
            }
            if trial.slope * (hi.step - lo.step) >= T::zero() {
                hi = lo;
            }
            lo = trial;
        }
    }

    // Zoom exhausted: the low end still satisfies sufficient decrease, so take it if it moved.
    if lo.step > T::zero() && lo.value < value {
        let n = probe.evaluations;
        return Ok(accept(lo, n));
    }
    Err(LineSearchFailure { evaluations: probe.evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_exact_step() {
        // f(x) = (x - 3)², from 0 along +1: minimizer at step 3.
        let mut f = |x: &[f64], g: &mut [f64]| {
            g[0] = 2.0 * (x[0] - 3.0);
            (x[0] - 3.0).powi(2)
        };
        let p = strong_wolfe(&mut f, &[0.0], 9.0, &[-6.0], &[1.0], 1.0, 1e-4, 0.1, 30).unwrap();
        assert!(p.value < 9.0);
        assert!(p.gradient[0].abs() <= 0.1 * 6.0);
    }

    #[test]
    fn rejects_ascent_direction() {
        let mut f = |x: &[f64], g: &mut [f64]| {
            g[0] = 2.0 * x[0];
            x[0] * x[0]
        };
        assert!(strong_wolfe(&mut f, &[1.0], 1.0, &[2.0], &[1.0], 1.0, 1e-4, 0.9, 20).is_err());
    }

    #[test]
    fn shrinks_past_non_finite_region() {
        let mut f = |x: &[f64], g: &mut [f64]| {
            if x[0] > 2.0 {
                g[0] = f64::NAN;
                return f64::NAN;
            }
            g[0] = 2.0 * (x[0] - 1.0);
            (x[0] - 1.0).powi(2)
        };
        let p = strong_wolfe(&mut f, &[0.0], 1.0, &[-2.0], &[1.0], 8.0, 1e-4, 0.9, 40).unwrap();
        assert!(p.x[0] <= 2.0 && p.value < 1.0);
    }
}
