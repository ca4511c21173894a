//! Gaussian process regression with an isotropic RBF kernel and learned noise.

use rand::Rng;

use super::kernel::squared_distance;
use super::{Standardizer, SurrogateError, TrainingSet};
use crate::linalg::{Cholesky, LinalgError, Matrix};
use crate::numopt::{lbfgs_minimize, LbfgsOptions};
use crate::scalar::{dot, Real};

/// Kernel hyperparameters in log space (standardized target units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpHyperparameters<T> {
    pub log_lengthscale: T,
    pub log_signal_std: T,
    pub log_noise_std: T,
}

impl<T: Real> GpHyperparameters<T> {
    pub fn new(lengthscale: T, signal_std: T, noise_std: T) -> Self {
        Self {
            log_lengthscale: lengthscale.ln(),
            log_signal_std: signal_std.ln(),
            log_noise_std: noise_std.ln(),
        }
    }

    fn to_vec(self) -> Vec<T> {
        vec![self.log_lengthscale, self.log_signal_std, self.log_noise_std]
    }

    fn from_slice(p: &[T]) -> Self {
        Self { log_lengthscale: p[0], log_signal_std: p[1], log_noise_std: p[2] }
    }

    fn lengthscale(&self) -> T {
        self.log_lengthscale.exp()
    }

    fn signal_var(&self) -> T {
        (T::lit(2.0) * self.log_signal_std).exp()
    }

    fn noise_var(&self) -> T {
        (T::lit(2.0) * self.log_noise_std).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpOptions<T> {
    pub restarts: usize,
    pub lengthscale_range: (T, T),
    pub signal_std_range: (T, T),
    pub noise_std_range: (T, T),
    /// Largest diagonal jitter tried when the kernel matrix is numerically indefinite.
    pub max_jitter: T,
    pub lbfgs: LbfgsOptions<T>,
}

impl<T: Real> Default for GpOptions<T> {
    fn default() -> Self {
        Self {
            restarts: 5,
            lengthscale_range: (T::lit(0.05), T::lit(5.0)),
            signal_std_range: (T::lit(0.1), T::lit(10.0)),
            noise_std_range: (T::lit(1e-4), T::one()),
            max_jitter: T::lit(1e-6),
            lbfgs: LbfgsOptions {
                max_iterations: 200,
                gradient_tolerance: T::lit(1e-4),
                value_tolerance: T::lit(1e-7),
                max_line_search_steps: 20,
                ..LbfgsOptions::default()
            },
        }
    }
}

fn pairwise_sq_distances<T: Real>(x: &Matrix<T>) -> Matrix<T> {
    let n = x.rows();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let r2 = squared_distance(x.row(i), x.row(j));
            d[(i, j)] = r2;
            d[(j, i)] = r2;
        }
    }
    d
}

/// `K_f` (noise-free kernel matrix) from cached squared distances.
fn kernel_matrix<T: Real>(sq: &Matrix<T>, h: &GpHyperparameters<T>) -> Matrix<T> {
    let inv_two_l2 = T::one() / (T::lit(2.0) * h.lengthscale() * h.lengthscale());
    let sf2 = h.signal_var();
    let n = sq.rows();
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = sf2;
        for j in 0..i {
            let v = sf2 * (-sq[(i, j)] * inv_two_l2).exp();
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// Cholesky of `K_f + (σ²_n + jitter) I`, escalating the jitter from 1e-10 up to `max_jitter`.
fn factor_with_jitter<T: Real>(
    kf: &Matrix<T>,
    noise_var: T,
    max_jitter: T,
) -> Result<(Cholesky<T>, T), LinalgError> {
    let n = kf.rows();
    let mut jitter = T::zero();
    loop {
        let mut k = kf.clone();
        for i in 0..n {
            k[(i, i)] += noise_var + jitter;
        }
        match Cholesky::new(&k) {
            Ok(c) => return Ok((c, jitter)),
            Err(e) => {
                jitter = if jitter == T::zero() { T::lit(1e-10) } else { jitter * T::lit(10.0) };
                if jitter > max_jitter * T::lit(1.0 + 1e-9) {
                    return Err(e);
                }
            }
        }
    }
}

fn lml_with_cache<T: Real>(
    sq: &Matrix<T>,
    y: &[T],
    h: &GpHyperparameters<T>,
    max_jitter: T,
) -> Result<(T, [T; 3]), LinalgError> {
    let n = y.len();
    let kf = kernel_matrix(sq, h);
    let noise_var = h.noise_var();
    let (chol, _) = factor_with_jitter(&kf, noise_var, max_jitter)?;
    let alpha = chol.solve(y);
    let half = T::lit(0.5);
    let value = -half * dot(y, &alpha)
        - half * chol.log_det()
        - half * T::from_count(n) * (T::lit(2.0) * T::PI()).ln();

    // ∂LML/∂θ = ½ tr((ααᵀ − K⁻¹) ∂K/∂θ)
    let kinv = chol.inverse();
    let inv_l2 = T::one() / (h.lengthscale() * h.lengthscale());
    let (mut g_len, mut g_sig, mut g_noise) = (T::zero(), T::zero(), T::zero());
    for i in 0..n {
        let kf_row = kf.row(i);
        let kinv_row = kinv.row(i);
        let sq_row = sq.row(i);
        let ai = alpha[i];
        let (mut row_len, mut row_sig) = (T::zero(), T::zero());
        for j in 0..i {
            let wk = (ai * alpha[j] - kinv_row[j]) * kf_row[j];
            row_len += wk * sq_row[j];
            row_sig += wk;
        }
        let wii = ai * ai - kinv_row[i];
        g_len += row_len;
        g_sig += row_sig + half * wii * kf_row[i];
        g_noise += wii;
    }
    // off-diagonal sums above cover each symmetric pair once
    let two = T::lit(2.0);
    Ok((value, [g_len * inv_l2, two * g_sig, noise_var * g_noise]))
}

/// Log marginal likelihood of standardized `targets` and its gradient with respect to the
/// log hyperparameters.
pub fn gp_log_marginal_likelihood<T: Real>(
    h: &GpHyperparameters<T>,
    inputs: &[Vec<T>],
    targets: &[T],
) -> Result<(T, [T; 3]), SurrogateError> {
    let data = TrainingSet::new(inputs, targets)?;
    let sq = pairwise_sq_distances(&data.inputs);
    Ok(lml_with_cache(&sq, targets, h, T::lit(1e-6))?)
}

/// Fitted GP posterior with its Cholesky factor and weight vector cached.
#[derive(Debug, Clone, PartialEq)]
pub struct GpModel<T> {
    training_inputs: Matrix<T>,
    training_targets: Vec<T>,
    standardizer: Standardizer<T>,
    hyperparameters: GpHyperparameters<T>,
    jitter: T,
    cholesky: Cholesky<T>,
    alpha: Vec<T>,
    log_marginal_likelihood: T,
}

impl<T: Real> GpModel<T> {
    /// Builds the posterior for fixed hyperparameters, without optimization.
    pub fn with_hyperparameters(
        data: &TrainingSet<T>,
        hyperparameters: GpHyperparameters<T>,
        max_jitter: T,
    ) -> Result<Self, SurrogateError> {
        let standardizer = Standardizer::fit(&data.targets);
        let y: Vec<T> = data.targets.iter().map(|&t| standardizer.forward(t)).collect();
        let sq = pairwise_sq_distances(&data.inputs);
        let kf = kernel_matrix(&sq, &hyperparameters);
        let (cholesky, jitter) = factor_with_jitter(&kf, hyperparameters.noise_var(), max_jitter)?;
        let alpha = cholesky.solve(&y);
        let half = T::lit(0.5);
        let log_marginal_likelihood = -half * dot(&y, &alpha)
            - half * cholesky.log_det()
            - half * T::from_count(y.len()) * (T::lit(2.0) * T::PI()).ln();
        Ok(Self {
            training_inputs: data.inputs.clone(),
            training_targets: y,
            standardizer,
            hyperparameters,
            jitter,
            cholesky,
            alpha,
            log_marginal_likelihood,
        })
    }

    /// Maximizes the log marginal likelihood over `opts.restarts` log-uniform starting points.
    pub fn fit<R: Rng + ?Sized>(data: &TrainingSet<T>, opts: &GpOptions<T>, rng: &mut R) -> Result<Self, SurrogateError> {
        if data.is_empty() {
            return Err(SurrogateError::EmptyTrainingSet);
        }
        let standardizer = Standardizer::fit(&data.targets);
        let y: Vec<T> = data.targets.iter().map(|&t| standardizer.forward(t)).collect();
        let sq = pairwise_sq_distances(&data.inputs);

        let log_uniform = |rng: &mut R, (lo, hi): (T, T)| {
            let u = T::lit(rng.random::<f64>());
            (lo.ln() + u * (hi.ln() - lo.ln())).exp()
        };
        let mut best: Option<(T, GpHyperparameters<T>)> = None;
        let mut last_error = String::from("no restarts requested");
        for _ in 0..opts.restarts.max(1) {
            let start = GpHyperparameters::new(
                log_uniform(rng, opts.lengthscale_range),
                log_uniform(rng, opts.signal_std_range),
                log_uniform(rng, opts.noise_std_range),
            );
            let objective = |p: &[T], g: &mut [T]| match lml_with_cache(&sq, &y, &GpHyperparameters::from_slice(p), opts.max_jitter) {
                Ok((v, grad)) => {
                    for (gi, di) in g.iter_mut().zip(grad) {
                        *gi = -di;
                    }
                    -v
                }
                Err(_) => T::nan(),
            };
            match lbfgs_minimize(objective, &start.to_vec(), &opts.lbfgs) {
                Ok(r) => {
                    if best.as_ref().is_none_or(|(v, _)| r.value < *v) {
                        best = Some((r.value, GpHyperparameters::from_slice(&r.x)));
                    }
                }
                Err(e) => last_error = e.to_string(),
            }
        }
        let Some((_, hyperparameters)) = best else {
            return Err(SurrogateError::Fit { restarts: opts.restarts, last: last_error });
        };
        Self::with_hyperparameters(data, hyperparameters, opts.max_jitter)
    }

    /// Posterior mean and standard deviation of the latent function at `x`, in target units.
    pub fn predict(&self, x: &[T]) -> (T, T) {
        let h = &self.hyperparameters;
        let sf2 = h.signal_var();
        let inv_two_l2 = T::one() / (T::lit(2.0) * h.lengthscale() * h.lengthscale());
        let kstar: Vec<T> = (0..self.training_inputs.rows())
            .map(|i| sf2 * (-squared_distance(self.training_inputs.row(i), x) * inv_two_l2).exp())
            .collect();
        let mean = dot(&kstar, &self.alpha);
        let v = self.cholesky.solve_lower(&kstar);
        let var = (sf2 - dot(&v, &v)).max(T::zero());
        (self.standardizer.inverse(mean), var.sqrt() * self.standardizer.std)
    }

    pub fn hyperparameters(&self) -> &GpHyperparameters<T> {
        &self.hyperparameters
    }

    pub fn standardizer(&self) -> &Standardizer<T> {
        &self.standardizer
    }

    pub fn jitter(&self) -> T {
        self.jitter
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn cholesky_factor(&self) -> &Matrix<T> {
        self.cholesky.factor()
    }

    /// Standardized training targets.
    pub fn training_targets(&self) -> &[T] {
        &self.training_targets
    }

    pub fn training_inputs(&self) -> &Matrix<T> {
        &self.training_inputs
    }

    pub fn log_marginal_likelihood(&self) -> T {
        self.log_marginal_likelihood
    }

    /// Noise plus jitter actually placed on the kernel diagonal.
    pub fn effective_noise_var(&self) -> T {
        self.hyperparameters.noise_var() + self.jitter
    }
}
