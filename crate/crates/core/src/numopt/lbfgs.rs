//! Limited-memory BFGS with the two-loop recursion.

use std::collections::VecDeque;

use super::line_search::strong_wolfe;
use super::NumericError;
use crate::scalar::{all_finite, dot, max_abs, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsOptions<T> {
    /// Number of stored curvature pairs.
    pub memory: usize,
    pub max_iterations: usize,
    /// Infinity-norm gradient threshold for convergence.
    pub gradient_tolerance: T,
    /// Stops when the relative decrease `(f_prev - f) / max(|f_prev|, |f|, 1)` falls to this value;
    /// zero disables the test.
    pub value_tolerance: T,
    pub wolfe_c1: T,
    pub wolfe_c2: T,
    pub max_line_search_steps: usize,
}

impl<T: Real> Default for LbfgsOptions<T> {
    fn default() -> Self {
        Self {
            memory: 10,
            max_iterations: 500,
            gradient_tolerance: T::lit(1e-6),
            value_tolerance: T::zero(),
            wolfe_c1: T::lit(1e-4),
            wolfe_c2: T::lit(0.9),
            max_line_search_steps: 20,
        }
    }
}

impl<T: Real> LbfgsOptions<T> {
    pub fn validate(&self) -> Result<(), NumericError> {
        let bad = |m: &str| Err(NumericError::Options(m.to_owned()));
        if self.memory == 0 {
            return bad("memory must be positive");
        }
        if self.max_iterations == 0 || self.max_line_search_steps == 0 {
            return bad("iteration limits must be positive");
        }
        if !(self.gradient_tolerance > T::zero()) {
            return bad("gradient_tolerance must be positive");
        }
        if !(self.value_tolerance >= T::zero()) {
            return bad("value_tolerance must be non-negative");
        }
        if !(T::zero() < self.wolfe_c1 && self.wolfe_c1 < self.wolfe_c2 && self.wolfe_c2 < T::one()) {
            return bad("require 0 < wolfe_c1 < wolfe_c2 < 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbfgsStatus {
    Converged,
    /// Relative objective decrease fell below `value_tolerance`.
    ValueConverged,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LbfgsResult<T> {
    pub x: Vec<T>,
    pub value: T,
    pub gradient_norm: T,
    pub iterations: usize,
    pub evaluations: usize,
    pub status: LbfgsStatus,
}

struct Pair<T> {
    s: Vec<T>,
    y: Vec<T>,
    rho: T,
}

fn two_loop<T: Real>(history: &VecDeque<Pair<T>>, gradient: &[T]) -> Vec<T> {
    let mut q = gradient.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for p in history.iter().rev() {
        let a = p.rho * dot(&p.s, &q);
        for (qi, yi) in q.iter_mut().zip(&p.y) {
            *qi -= a * *yi;
        }
        alphas.push(a);
    }
    if let Some(last) = history.back() {
        let gamma = dot(&last.s, &last.y) / dot(&last.y, &last.y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for (p, a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = p.rho * dot(&p.y, &q);
        for (qi, si) in q.iter_mut().zip(&p.s) {
            *qi += (a - b) * *si;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Minimizes `objective`, which returns the value and writes the gradient into its second argument.
///
/// A failed line search clears the curvature memory and retries once along the steepest-descent
/// direction; a second consecutive failure stops with [`LbfgsStatus::IterationLimit`].
pub fn lbfgs_minimize<T, F>(
    mut objective: F,
    x0: &[T],
    opts: &LbfgsOptions<T>,
) -> Result<LbfgsResult<T>, NumericError>
where
    T: Real,
    F: FnMut(&[T], &mut [T]) -> T,
{
    opts.validate()?;
    let mut x = x0.to_vec();
    let mut gradient = vec![T::zero(); x.len()];
    let mut value = objective(&x, &mut gradient);
    let mut evaluations = 1;
    if !value.is_finite() || !all_finite(&gradient) {
        return Err(NumericError::NonFinite {
            what: if value.is_finite() { "gradient" } else { "objective value" },
            point: x.iter().map(|v| v.as_f64()).collect(),
        });
    }

    let mut history: VecDeque<Pair<T>> = VecDeque::with_capacity(opts.memory);
    let mut restarted = false;
    let mut status = LbfgsStatus::IterationLimit;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        if max_abs(&gradient) <= opts.gradient_tolerance {
            status = LbfgsStatus::Converged;
            break;
        }
        iterations += 1;
        let mut direction = two_loop(&history, &gradient);
        if !(dot(&direction, &gradient) < T::zero()) {
            history.clear();
            direction = gradient.iter().map(|g| -*g).collect();
        }
        let initial_step = if history.is_empty() {
            let norm = dot(&gradient, &gradient).sqrt();
            T::one().min(T::one() / norm)
        } else {
            T::one()
        };
        match strong_wolfe(
            &mut objective,
            &x,
            value,
            &gradient,
            &direction,
            initial_step,
            opts.wolfe_c1,
            opts.wolfe_c2,
            opts.max_line_search_steps,
        ) {
            Ok(point) => {
                evaluations += point.evaluations;
                let s: Vec<T> = point.x.iter().zip(&x).map(|(a, b)| *a - *b).collect();
                let y: Vec<T> = point.gradient.iter().zip(&gradient).map(|(a, b)| *a - *b).collect();
                let sy = dot(&s, &y);
                if sy > T::epsilon() * dot(&y, &y) {
                    if history.len() == opts.memory {
                        history.pop_front();
                    }
                    history.push_back(Pair { s, y, rho: T::one() / sy });
                }
                let scale = value.abs().max(point.value.abs()).max(T::one());
                let small_decrease = (value - point.value) <= opts.value_tolerance * scale;
                x = point.x;
                value = point.value;
                gradient = point.gradient;
                restarted = false;
                if small_decrease {
                    status = LbfgsStatus::ValueConverged;
                    break;
                }
            }
            Err(failure) => {
                evaluations += failure.evaluations;
                if restarted {
                    break;
                }
                history.clear();
                restarted = true;
            }
        }
    }
    if status == LbfgsStatus::IterationLimit && max_abs(&gradient) <= opts.gradient_tolerance {
        status = LbfgsStatus::Converged;
    }

    Ok(LbfgsResult { gradient_norm: max_abs(&gradient), x, value, iterations, evaluations, status })
}
