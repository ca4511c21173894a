//! One-hidden-layer ReLU regression network trained by L-BFGS on mean squared error.

use rand::Rng;

use super::{Standardizer, SurrogateError, TrainingSet};
use crate::linalg::Matrix;
use crate::numopt::{lbfgs_minimize, LbfgsOptions};
use crate::scalar::{dot, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct MlpOptions<T> {
    pub hidden_units: usize,
    pub restarts: usize,
    /// Initial weights are uniform in `±init_scale / √fan_in`.
    pub init_scale: T,
    pub lbfgs: LbfgsOptions<T>,
}

impl<T: Real> Default for MlpOptions<T> {
    fn default() -> Self {
        Self {
            hidden_units: 10,
            restarts: 5,
            init_scale: T::lit(0.7),
            lbfgs: LbfgsOptions { max_iterations: 200, ..LbfgsOptions::default() },
        }
    }
}

/// Per-dimension affine input map `(x − offset) · scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputScaling<T> {
    pub offset: Vec<T>,
    pub scale: Vec<T>,
}

impl<T: Real> InputScaling<T> {
    pub fn identity(dim: usize) -> Self {
        Self { offset: vec![T::zero(); dim], scale: vec![T::one(); dim] }
    }

    fn apply(&self, x: &[T]) -> Vec<T> {
        x.iter().zip(&self.offset).zip(&self.scale).map(|((v, o), s)| (*v - *o) * *s).collect()
    }
}

/// Flat parameter layout: hidden weights (H × N, row-major), hidden biases, output weights, output bias.
struct Layout {
    inputs: usize,
    hidden: usize,
}

impl Layout {
    fn len(&self) -> usize {
        self.hidden * self.inputs + 2 * self.hidden + 1
    }
    fn b1(&self) -> usize {
        self.hidden * self.inputs
    }
    fn w2(&self) -> usize {
        self.b1() + self.hidden
    }
    fn b2(&self) -> usize {
        self.w2() + self.hidden
    }
}

/// Mean squared error of the network on `(inputs, targets)` and its gradient with respect to the
/// flat parameter vector.
pub fn mlp_loss_and_gradient<T: Real>(
    params: &[T],
    hidden: usize,
    inputs: &Matrix<T>,
    targets: &[T],
    gradient: &mut [T],
) -> T {
    let layout = Layout { inputs: inputs.cols(), hidden };
    debug_assert_eq!(params.len(), layout.len());
    gradient.iter_mut().for_each(|g| *g = T::zero());
    let (w1, rest) = params.split_at(layout.b1());
    let (b1, rest) = rest.split_at(hidden);
    let (w2, b2) = rest.split_at(hidden);
    let b2 = b2[0];
    let n = T::from_count(targets.len());
    let mut z = vec![T::zero(); hidden];
    let mut loss = T::zero();
    for (s, &y) in targets.iter().enumerate() {
        let x = inputs.row(s);
        let mut out = b2;
        for h in 0..hidden {
            z[h] = dot(&w1[h * layout.inputs..(h + 1) * layout.inputs], x) + b1[h];
            if z[h] > T::zero() {
                out += w2[h] * z[h];
            }
        }
        let r = out - y;
        loss += r * r;
        let delta = T::lit(2.0) * r / n;
        gradient[layout.b2()] += delta;
        for h in 0..hidden {
            if z[h] > T::zero() {
                gradient[layout.w2() + h] += delta * z[h];
                let back = delta * w2[h];
                gradient[layout.b1() + h] += back;
                let row = &mut gradient[h * layout.inputs..(h + 1) * layout.inputs];
                for (g, xi) in row.iter_mut().zip(x) {
                    *g += back * *xi;
                }
            }
        }
    }
    loss / n
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel<T> {
    hidden_weights: Matrix<T>,
    hidden_biases: Vec<T>,
    output_weights: Vec<T>,
    output_bias: T,
    input_scaling: InputScaling<T>,
    standardizer: Standardizer<T>,
    training_loss: T,
}

impl<T: Real> MlpModel<T> {
    /// Network from explicit weights.
    pub fn from_weights(
        hidden_weights: Matrix<T>,
        hidden_biases: Vec<T>,
        output_weights: Vec<T>,
        output_bias: T,
        standardizer: Standardizer<T>,
    ) -> Result<Self, SurrogateError> {
        let h = hidden_weights.rows();
        for len in [hidden_biases.len(), output_weights.len()] {
            if len != h {
                return Err(SurrogateError::Dimension { expected: h, got: len });
            }
        }
        let dim = hidden_weights.cols();
        Ok(Self {
            hidden_weights,
            hidden_biases,
            output_weights,
            output_bias,
            input_scaling: InputScaling::identity(dim),
            standardizer,
            training_loss: T::zero(),
        })
    }

    /// Zero-weight network that predicts `value` everywhere.
    pub fn constant(dim: usize, value: T) -> Self {
        Self::zeroed(dim, 10, Standardizer { mean: value, std: T::one() })
    }

    fn zeroed(dim: usize, hidden: usize, standardizer: Standardizer<T>) -> Self {
        Self {
            hidden_weights: Matrix::zeros(hidden, dim),
            hidden_biases: vec![T::zero(); hidden],
            output_weights: vec![T::zero(); hidden],
            output_bias: T::zero(),
            input_scaling: InputScaling::identity(dim),
            standardizer,
            training_loss: T::zero(),
        }
    }

    fn from_params(params: &[T], dim: usize, hidden: usize, standardizer: Standardizer<T>, loss: T) -> Self {
        let layout = Layout { inputs: dim, hidden };
        Self {
            hidden_weights: Matrix::from_fn(hidden, dim, |h, i| params[h * dim + i]),
            hidden_biases: params[layout.b1()..layout.w2()].to_vec(),
            output_weights: params[layout.w2()..layout.b2()].to_vec(),
            output_bias: params[layout.b2()],
            input_scaling: InputScaling::identity(dim),
            standardizer,
            training_loss: loss,
        }
    }

    /// Best of `opts.restarts` L-BFGS fits from random initial weights.
    pub fn fit<R: Rng + ?Sized>(data: &TrainingSet<T>, opts: &MlpOptions<T>, rng: &mut R) -> Result<Self, SurrogateError> {
        if data.is_empty() {
            return Err(SurrogateError::EmptyTrainingSet);
        }
        if opts.hidden_units == 0 {
            return Err(SurrogateError::Parameter("hidden_units must be positive".into()));
        }
        let dim = data.dim();
        let hidden = opts.hidden_units;
        let standardizer = Standardizer::fit(&data.targets);
        if Standardizer::is_degenerate(&data.targets) {
            return Ok(Self::zeroed(dim, hidden, standardizer));
        }
        let y: Vec<T> = data.targets.iter().map(|&t| standardizer.forward(t)).collect();
        let layout = Layout { inputs: dim, hidden };

        let mut best: Option<(T, Vec<T>)> = None;
        let mut last_error = String::from("no restarts requested");
        for _ in 0..opts.restarts.max(1) {
            let hidden_bound = opts.init_scale.as_f64() / (dim as f64).sqrt();
            let out_bound = opts.init_scale.as_f64() / (hidden as f64).sqrt();
            let init: Vec<T> = (0..layout.len())
                .map(|i| {
                    let b = if i < layout.w2() { hidden_bound } else { out_bound };
                    T::lit(rng.random_range(-b..=b))
                })
                .collect();
            let objective = |p: &[T], g: &mut [T]| mlp_loss_and_gradient(p, hidden, &data.inputs, &y, g);
            match lbfgs_minimize(objective, &init, &opts.lbfgs) {
                Ok(r) => {
                    if best.as_ref().is_none_or(|(v, _)| r.value < *v) {
                        best = Some((r.value, r.x));
                    }
                }
                Err(e) => last_error = e.to_string(),
            }
        }
        let Some((loss, params)) = best else {
            return Err(SurrogateError::Fit { restarts: opts.restarts, last: last_error });
        };
        Ok(Self::from_params(&params, dim, hidden, standardizer, loss))
    }

    /// Predicted target value at `x`.
    pub fn predict(&self, x: &[T]) -> T {
        let x = self.input_scaling.apply(x);
        let mut out = self.output_bias;
        for h in 0..self.hidden_units() {
            let z = dot(self.hidden_weights.row(h), &x) + self.hidden_biases[h];
            out += self.output_weights[h] * z.max(T::zero());
        }
        self.standardizer.inverse(out)
    }

    pub fn hidden_units(&self) -> usize {
        self.hidden_weights.rows()
    }

    /// Mean squared error on standardized targets at the end of training.
    pub fn training_loss(&self) -> T {
        self.training_loss
    }

    pub fn hidden_weights(&self) -> &Matrix<T> {
        &self.hidden_weights
    }

    pub fn output_weights(&self) -> &[T] {
        &self.output_weights
    }

    pub fn output_bias(&self) -> T {
        self.output_bias
    }

    pub fn standardizer(&self) -> &Standardizer<T> {
        &self.standardizer
    }

    pub fn all_weights_finite(&self) -> bool {
        self.hidden_weights.as_slice().iter().chain(&self.hidden_biases).chain(&self.output_weights).all(|w| w.is_finite())
            && self.output_bias.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn identity() -> Standardizer<f64> {
        Standardizer { mean: 0.0, std: 1.0 }
    }

    #[test]
    fn zero_network_predicts_zero() {
        let m = MlpModel::from_weights(Matrix::zeros(10, 6), vec![0.0; 10], vec![0.0; 10], 0.0, identity()).unwrap();
        assert_eq!(m.predict(&[0.3; 6]), 0.0);
    }

    #[test]
    fn output_bias_passes_through() {
        let st = Standardizer { mean: 5.0f64, std: 2.0 };
        let m = MlpModel::from_weights(Matrix::zeros(10, 6), vec![0.4; 10], vec![1.0; 10], 1.5, st).unwrap();
        // Hidden weights zero but biases positive: every unit outputs 0.4.
        assert!((m.predict(&[-0.9; 6]) - (5.0 + 2.0 * (1.5 + 4.0))).abs() < 1e-12);
        let m = MlpModel::from_weights(Matrix::zeros(10, 6), vec![0.0; 10], vec![1.0; 10], 1.5, st).unwrap();
        assert_eq!(m.predict(&[0.2; 6]), 5.0 + 2.0 * 1.5);
    }

    #[test]
    fn single_relu_identity() {
        let w = Matrix::from_rows(&[vec![1.0]]).unwrap();
        let m = MlpModel::from_weights(w, vec![0.0], vec![1.0], 0.0, identity()).unwrap();
        assert_eq!(m.predict(&[0.7]), 0.7);
        assert_eq!(m.predict(&[-0.7]), 0.0);
    }

    #[test]
    fn constant_targets() {
        let x: Vec<Vec<f64>> = (0..7).map(|i| vec![i as f64 / 7.0 - 0.5; 6]).collect();
        let data = TrainingSet::new(&x, &[12.5; 7]).unwrap();
        let m = MlpModel::fit(&data, &MlpOptions::default(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        for q in [-1.0, 0.0, 0.6] {
            assert!((m.predict(&[q; 6]) - 12.5).abs() < 1e-6);
        }
    }

    #[test]
    fn fits_linear_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let coef = [0.8, -1.1, 0.3, 0.5, -0.2, 1.4];
        let x: Vec<Vec<f64>> = (0..20).map(|_| (0..6).map(|_| rng.random_range(-1.0..=1.0)).collect()).collect();
        let y: Vec<f64> = x.iter().map(|r| dot(r, &coef) + 2.0).collect();
        let data = TrainingSet::new(&x, &y).unwrap();
        let m = MlpModel::fit(&data, &MlpOptions::default(), &mut rng).unwrap();
        let mse: f64 = x.iter().zip(&y).map(|(r, t)| (m.predict(r) - t).powi(2)).sum::<f64>() / 20.0;
        assert!(mse <= 1e-5, "mse {mse}");
        assert!(m.all_weights_finite());
        assert_eq!(m.hidden_units(), 10);
    }

    #[test]
    fn deterministic_given_seed() {
        let x: Vec<Vec<f64>> = (0..9).map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.91).cos()]).collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] * r[1]).collect();
        let data = TrainingSet::new(&x, &y).unwrap();
        let a = MlpModel::fit(&data, &MlpOptions::default(), &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let b = MlpModel::fit(&data, &MlpOptions::default(), &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
    }
}
