//! A tiny CNN for 8×950 epochs with hand-written forward and backward
//! passes.
//!
//! Layer stack: temporal convolution (shared across channels) → batch norm →
//! spatial depthwise convolution across channels → batch norm → ReLU →
//! average pool → separable convolution (depthwise temporal + pointwise mix)
//! → batch norm → ReLU → average pool → dense to class logits.
//!
//! The model is generic over the float type: the pipeline trains in `f32`,
//! gradient-check tests instantiate the same code at `f64`. There is no
//! autodiff engine; gradients are derived per layer for this fixed stack.

mod adam;
mod layers;
mod train;

pub use adam::AdamState;
pub use train::{
    shuffled_indices, train, EpochSelection, EvalMetrics, History, TrainParams, DEFAULT_BATCH_SIZE,
    DEFAULT_EPOCHS, DEFAULT_LEARNING_RATE,
};

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::MoveClass;
use crate::dsp::{EpochTensor, EPOCH_SAMPLES};
use crate::NUM_CHANNELS;

/// Batch-norm momentum for the running statistics.
pub const BN_MOMENTUM: f64 = 0.9;
/// Batch-norm variance epsilon.
pub const BN_EPSILON: f64 = 1e-5;

/// Network hyperparameters.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NetConfig {
    pub n_channels: usize,
    pub n_samples: usize,
    pub n_classes: usize,
    /// Temporal filter count.
    pub temporal_filters: usize,
    /// Temporal kernel length in samples.
    pub temporal_kernel: usize,
    /// Spatial depth multiplier per temporal filter.
    pub depth_multiplier: usize,
    /// Separable (depthwise temporal) kernel length.
    pub separable_kernel: usize,
    /// First average-pool width.
    pub pool1: usize,
    /// Second average-pool width.
    pub pool2: usize,
    /// Weight initialization seed.
    pub seed: u64,
}

impl Default for NetConfig {
    /// Defaults sized for 8×950 inputs with well under 10k parameters.
    fn default() -> Self {
        NetConfig {
            n_channels: NUM_CHANNELS,
            n_samples: EPOCH_SAMPLES,
            n_classes: 2,
            temporal_filters: 8,
            temporal_kernel: 32,
            depth_multiplier: 2,
            separable_kernel: 16,
            pool1: 8,
            pool2: 8,
            seed: 0,
        }
    }
}

impl NetConfig {
    pub fn validate(&self) -> Result<(), NetError> {
        let fields = [
            self.n_channels,
            self.n_samples,
            self.n_classes,
            self.temporal_filters,
            self.temporal_kernel,
            self.depth_multiplier,
            self.separable_kernel,
            self.pool1,
            self.pool2,
        ];
        if fields.iter().any(|&v| v == 0) {
            return Err(NetError::InvalidConfig("all dimensions must be positive"));
        }
        if self.pooled_len2() < 1 {
            return Err(NetError::InvalidConfig(
                "pooling leaves no output time steps",
            ));
        }
        Ok(())
    }

    /// Feature maps after the spatial depthwise stage.
    pub fn spatial_maps(&self) -> usize {
        self.temporal_filters * self.depth_multiplier
    }

    /// Time steps after the first pool.
    pub fn pooled_len1(&self) -> usize {
        self.n_samples / self.pool1
    }

    /// Time steps after the second pool.
    pub fn pooled_len2(&self) -> usize {
        self.pooled_len1() / self.pool2
    }

    /// Flattened feature size feeding the dense layer.
    pub fn flat_len(&self) -> usize {
        self.spatial_maps() * self.pooled_len2()
    }

    /// Closed-form count of trainable parameters.
    pub fn param_count(&self) -> usize {
        let m = self.spatial_maps();
        self.temporal_filters * self.temporal_kernel
            + 2 * self.temporal_filters
            + self.temporal_filters * self.depth_multiplier * self.n_channels
            + 2 * m
            + m * self.separable_kernel
            + m * m
            + 2 * m
            + self.n_classes * self.flat_len()
            + self.n_classes
    }
}

/// Errors from model construction and evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetError {
    InvalidConfig(&'static str),
    ShapeMismatch { expected: usize, got: usize },
    BadLabel { label: usize, n_classes: usize },
    EmptyDataset,
}

impl fmt::Display for NetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetError::InvalidConfig(what) => write!(f, "invalid network config: {what}"),
            NetError::ShapeMismatch { expected, got } => {
                write!(f, "input holds {got} values, expected {expected}")
            }
            NetError::BadLabel { label, n_classes } => {
                write!(f, "label {label} out of range for {n_classes} classes")
            }
            NetError::EmptyDataset => write!(f, "dataset is empty"),
        }
    }
}

impl core::error::Error for NetError {}

/// All trainable tensors, in the declared layer order. The same struct
/// doubles as the gradient container.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamTensors<T> {
    pub temporal: Vec<T>,
    pub bn1_gamma: Vec<T>,
    pub bn1_beta: Vec<T>,
    pub spatial: Vec<T>,
    pub bn2_gamma: Vec<T>,
    pub bn2_beta: Vec<T>,
    pub sep_depth: Vec<T>,
    pub sep_point: Vec<T>,
    pub bn3_gamma: Vec<T>,
    pub bn3_beta: Vec<T>,
    pub dense_w: Vec<T>,
    pub dense_b: Vec<T>,
}

/// Number of tensors in [`ParamTensors`].
pub const PARAM_TENSOR_COUNT: usize = 12;

impl<T: Float> ParamTensors<T> {
    pub fn zeros(cfg: &NetConfig) -> ParamTensors<T> {
        let m = cfg.spatial_maps();
        let z = |n: usize| vec![T::zero(); n];
        ParamTensors {
            temporal: z(cfg.temporal_filters * cfg.temporal_kernel),
            bn1_gamma: z(cfg.temporal_filters),
            bn1_beta: z(cfg.temporal_filters),
            spatial: z(cfg.temporal_filters * cfg.depth_multiplier * cfg.n_channels),
            bn2_gamma: z(m),
            bn2_beta: z(m),
            sep_depth: z(m * cfg.separable_kernel),
            sep_point: z(m * m),
            bn3_gamma: z(m),
            bn3_beta: z(m),
            dense_w: z(cfg.n_classes * cfg.flat_len()),
            dense_b: z(cfg.n_classes),
        }
    }

    /// Tensors in declared order (checkpoint, Adam, and gradient order).
    pub fn tensors(&self) -> [&Vec<T>; PARAM_TENSOR_COUNT] {
        [
            &self.temporal,
            &self.bn1_gamma,
            &self.bn1_beta,
            &self.spatial,
            &self.bn2_gamma,
            &self.bn2_beta,
            &self.sep_depth,
            &self.sep_point,
            &self.bn3_gamma,
            &self.bn3_beta,
            &self.dense_w,
            &self.dense_b,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Vec<T>; PARAM_TENSOR_COUNT] {
        [
            &mut self.temporal,
            &mut self.bn1_gamma,
            &mut self.bn1_beta,
            &mut self.spatial,
            &mut self.bn2_gamma,
            &mut self.bn2_beta,
            &mut self.sep_depth,
            &mut self.sep_point,
            &mut self.bn3_gamma,
            &mut self.bn3_beta,
            &mut self.dense_w,
            &mut self.dense_b,
        ]
    }

    /// Total element count across all tensors.
    pub fn len(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Batch-norm running statistics for the three normalization stages.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningStats<T> {
    pub bn1_mean: Vec<T>,
    pub bn1_var: Vec<T>,
    pub bn2_mean: Vec<T>,
    pub bn2_var: Vec<T>,
    pub bn3_mean: Vec<T>,
    pub bn3_var: Vec<T>,
}

impl<T: Float> RunningStats<T> {
    fn init(cfg: &NetConfig) -> RunningStats<T> {
        let m = cfg.spatial_maps();
        RunningStats {
            bn1_mean: vec![T::zero(); cfg.temporal_filters],
            bn1_var: vec![T::one(); cfg.temporal_filters],
            bn2_mean: vec![T::zero(); m],
            bn2_var: vec![T::one(); m],
            bn3_mean: vec![T::zero(); m],
            bn3_var: vec![T::one(); m],
        }
    }
}

/// Forward-pass mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Normalize with batch statistics and update the running statistics.
    Train,
    /// Normalize with the stored running statistics; pure in the model.
    Eval,
}

/// A batch of inputs, flattened `[batch][channel][time]`.
#[derive(Debug, Clone)]
pub struct Input<T> {
    pub data: Vec<T>,
    pub batch: usize,
    pub channels: usize,
    pub samples: usize,
}

impl<T: Float> Input<T> {
    pub fn new(data: Vec<T>, batch: usize, channels: usize, samples: usize) -> Result<Self, NetError> {
        if data.len() != batch * channels * samples {
            return Err(NetError::ShapeMismatch {
                expected: batch * channels * samples,
                got: data.len(),
            });
        }
        Ok(Input {
            data,
            batch,
            channels,
            samples,
        })
    }

    /// Packs preprocessed epochs into a batch, casting to `T`, and returns
    /// the class indices alongside.
    pub fn from_epochs(epochs: &[&EpochTensor]) -> (Input<T>, Vec<usize>) {
        let mut data = Vec::with_capacity(epochs.len() * NUM_CHANNELS * EPOCH_SAMPLES);
        let mut labels = Vec::with_capacity(epochs.len());
        for e in epochs {
            data.extend(e.data().iter().map(|&v| T::from(v).unwrap()));
            labels.push(e.class().index());
        }
        (
            Input {
                data,
                batch: epochs.len(),
                channels: NUM_CHANNELS,
                samples: EPOCH_SAMPLES,
            },
            labels,
        )
    }
}

/// The model: configuration, trainable tensors, and running statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Model<T> {
    cfg: NetConfig,
    params: ParamTensors<T>,
    running: RunningStats<T>,
}

impl<T: Float> Model<T> {
    /// Deterministic fan-in-scaled uniform initialization; normalization
    /// scales start at 1, shifts at 0. Weights are drawn in `f64` and cast,
    /// so `f32` and `f64` models start from the same values.
    pub fn init(cfg: NetConfig) -> Result<Model<T>, NetError> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut params = ParamTensors::zeros(&cfg);

        let mut fill = |t: &mut Vec<T>, fan_in: usize| {
            let bound = 1.0 / (fan_in as f64).sqrt();
            for v in t.iter_mut() {
                *v = T::from(rng.random_range(-bound..bound)).unwrap();
            }
        };
        fill(&mut params.temporal, cfg.temporal_kernel);
        fill(&mut params.spatial, cfg.n_channels);
        fill(&mut params.sep_depth, cfg.separable_kernel);
        fill(&mut params.sep_point, cfg.spatial_maps());
        fill(&mut params.dense_w, cfg.flat_len());
        for g in params
            .bn1_gamma
            .iter_mut()
            .chain(params.bn2_gamma.iter_mut())
            .chain(params.bn3_gamma.iter_mut())
        {
            *g = T::one();
        }

        let running = RunningStats::init(&cfg);
        Ok(Model {
            cfg,
            params,
            running,
        })
    }

    pub fn config(&self) -> &NetConfig {
        &self.cfg
    }

    pub fn params(&self) -> &ParamTensors<T> {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamTensors<T> {
        &mut self.params
    }

    pub fn running(&self) -> &RunningStats<T> {
        &self.running
    }

    pub fn running_mut(&mut self) -> &mut RunningStats<T> {
        &mut self.running
    }

    /// Rebuilds a model from its parts, checking shape consistency.
    pub fn from_parts(
        cfg: NetConfig,
        params: ParamTensors<T>,
        running: RunningStats<T>,
    ) -> Result<Model<T>, NetError> {
        cfg.validate()?;
        let expected = ParamTensors::<T>::zeros(&cfg);
        for (have, want) in params.tensors().iter().zip(expected.tensors().iter()) {
            if have.len() != want.len() {
                return Err(NetError::ShapeMismatch {
                    expected: want.len(),
                    got: have.len(),
                });
            }
        }
        if running.bn1_mean.len() != cfg.temporal_filters
            || running.bn2_mean.len() != cfg.spatial_maps()
            || running.bn3_mean.len() != cfg.spatial_maps()
            || running.bn1_var.len() != cfg.temporal_filters
            || running.bn2_var.len() != cfg.spatial_maps()
            || running.bn3_var.len() != cfg.spatial_maps()
        {
            return Err(NetError::InvalidConfig("running stats shape mismatch"));
        }
        Ok(Model {
            cfg,
            params,
            running,
        })
    }

    /// Runtime count of allocated trainable parameters.
    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// Forward pass; `Train` mode normalizes with batch statistics and
    /// updates the running statistics, `Eval` uses the stored ones.
    /// Returns logits `[batch][n_classes]`.
    pub fn forward(&mut self, input: &Input<T>, mode: Mode) -> Result<Vec<T>, NetError> {
        match mode {
            Mode::Train => {
                let (logits, _) = layers::forward_train(&self.cfg, &self.params, &mut self.running, input)?;
                Ok(logits)
            }
            Mode::Eval => self.forward_eval(input),
        }
    }

    /// Eval-mode forward; a pure function of `(model, input)`.
    pub fn forward_eval(&self, input: &Input<T>) -> Result<Vec<T>, NetError> {
        layers::forward_eval(&self.cfg, &self.params, &self.running, input)
    }

    /// Mean softmax cross-entropy over the batch and its exact gradient for
    /// every parameter, computed in train mode (batch statistics; running
    /// statistics are updated as in any training step).
    pub fn loss_and_grad(
        &mut self,
        input: &Input<T>,
        labels: &[usize],
    ) -> Result<(T, ParamTensors<T>), NetError> {
        if labels.len() != input.batch {
            return Err(NetError::ShapeMismatch {
                expected: input.batch,
                got: labels.len(),
            });
        }
        for &l in labels {
            if l >= self.cfg.n_classes {
                return Err(NetError::BadLabel {
                    label: l,
                    n_classes: self.cfg.n_classes,
                });
            }
        }
        let (logits, cache) =
            layers::forward_train(&self.cfg, &self.params, &mut self.running, input)?;
        let (loss, dlogits) = softmax_cross_entropy(&logits, labels, self.cfg.n_classes);
        let grads = layers::backward(&self.cfg, &self.params, &cache, &dlogits);
        Ok((loss, grads))
    }
}

/// Softmax probabilities of a two-logit row; shift-invariant by max
/// subtraction.
pub fn softmax<T: Float>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
    let exps: Vec<T> = logits.iter().map(|&v| (v - max).exp()).collect();
    let sum = exps.iter().fold(T::zero(), |a, &b| a + b);
    exps.into_iter().map(|v| v / sum).collect()
}

/// Mean cross-entropy over the batch and d(loss)/d(logits).
fn softmax_cross_entropy<T: Float>(
    logits: &[T],
    labels: &[usize],
    n_classes: usize,
) -> (T, Vec<T>) {
    let batch = labels.len();
    let inv_b = T::from(1.0 / batch as f64).unwrap();
    let mut loss = T::zero();
    let mut dlogits = vec![T::zero(); logits.len()];
    for (b, &label) in labels.iter().enumerate() {
        let row = &logits[b * n_classes..(b + 1) * n_classes];
        let probs = softmax(row);
        loss = loss - probs[label].max(T::from(1e-30).unwrap()).ln() * inv_b;
        for (j, &p) in probs.iter().enumerate() {
            let target = if j == label { T::one() } else { T::zero() };
            dlogits[b * n_classes + j] = (p - target) * inv_b;
        }
    }
    (loss, dlogits)
}

/// Class decision for one epoch: argmax of softmax over the two logits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub class: MoveClass,
    pub probabilities: [f32; 2],
}

/// Eval-mode prediction for a single preprocessed epoch.
pub fn predict(model: &Model<f32>, epoch: &EpochTensor) -> Result<Prediction, NetError> {
    if model.cfg.n_classes != 2 {
        return Err(NetError::InvalidConfig("predict requires two classes"));
    }
    let (input, _) = Input::<f32>::from_epochs(&[epoch]);
    let logits = model.forward_eval(&input)?;
    let probs = softmax(&logits);
    let class = if logits[1] > logits[0] {
        MoveClass::Right
    } else {
        MoveClass::Left
    };
    Ok(Prediction {
        class,
        probabilities: [probs[0], probs[1]],
    })
}

/// A trained (or in-training) model snapshot with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub model: Model<f32>,
    pub adam: Option<AdamState<f32>>,
    pub epoch: u32,
    pub tag: String,
}

impl Checkpoint {
    pub fn new(model: Model<f32>, adam: Option<AdamState<f32>>, epoch: u32, tag: String) -> Self {
        Checkpoint {
            model,
            adam,
            epoch,
            tag,
        }
    }

    pub fn config(&self) -> &NetConfig {
        self.model.config()
    }

    pub fn with_tag(mut self, tag: String) -> Self {
        self.tag = tag;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::MoveClass;

    fn small_cfg() -> NetConfig {
        NetConfig {
            n_channels: 8,
            n_samples: 50,
            n_classes: 2,
            temporal_filters: 2,
            temporal_kernel: 9,
            depth_multiplier: 1,
            separable_kernel: 5,
            pool1: 2,
            pool2: 2,
            seed: 7,
        }
    }

    fn random_input(cfg: &NetConfig, batch: usize, seed: u64) -> Input<f32> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = batch * cfg.n_channels * cfg.n_samples;
        let data = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        Input::new(data, batch, cfg.n_channels, cfg.n_samples).unwrap()
    }

    #[test]
    fn init_is_deterministic() {
        let a: Model<f32> = Model::init(small_cfg()).unwrap();
        let b: Model<f32> = Model::init(small_cfg()).unwrap();
        assert_eq!(a, b);
        let mut cfg = small_cfg();
        cfg.seed = 8;
        let c: Model<f32> = Model::init(cfg).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn default_config_stays_tiny() {
        let cfg = NetConfig::default();
        assert!(cfg.param_count() <= 10_000, "params = {}", cfg.param_count());
        let model: Model<f32> = Model::init(cfg.clone()).unwrap();
        assert_eq!(model.param_count(), cfg.param_count());
    }

    #[test]
    fn param_count_formula_matches_allocation_for_varied_configs() {
        for (f1, l1, d, l2, p1, p2) in
            [(4, 16, 1, 8, 4, 4), (8, 32, 2, 16, 8, 8), (3, 7, 3, 5, 2, 5)]
        {
            let cfg = NetConfig {
                temporal_filters: f1,
                temporal_kernel: l1,
                depth_multiplier: d,
                separable_kernel: l2,
                pool1: p1,
                pool2: p2,
                ..NetConfig::default()
            };
            let model: Model<f32> = Model::init(cfg.clone()).unwrap();
            assert_eq!(model.param_count(), cfg.param_count());
        }
    }

    #[test]
    fn zero_filter_config_rejected() {
        let cfg = NetConfig {
            temporal_filters: 0,
            ..NetConfig::default()
        };
        assert!(Model::<f32>::init(cfg).is_err());
    }

    #[test]
    fn overpooled_config_rejected() {
        let cfg = NetConfig {
            n_samples: 10,
            pool1: 8,
            pool2: 8,
            ..NetConfig::default()
        };
        assert!(Model::<f32>::init(cfg).is_err());
    }

    #[test]
    fn forward_shape_and_finiteness() {
        let cfg = small_cfg();
        let mut model: Model<f32> = Model::init(cfg.clone()).unwrap();
        let input = random_input(&cfg, 5, 1);
        let logits = model.forward(&input, Mode::Train).unwrap();
        assert_eq!(logits.len(), 5 * 2);
        assert!(logits.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn zeroed_dense_gives_uniform_softmax_and_ln2_loss() {
        let cfg = small_cfg();
        let mut model: Model<f32> = Model::init(cfg.clone()).unwrap();
        for v in model.params_mut().dense_w.iter_mut() {
            *v = 0.0;
        }
        for v in model.params_mut().dense_b.iter_mut() {
            *v = 0.0;
        }
        let input = random_input(&cfg, 4, 2);
        let logits = model.forward(&input, Mode::Train).unwrap();
        assert!(logits.iter().all(|&v| v == 0.0));
        let probs = softmax(&logits[0..2]);
        assert!((probs[0] - 0.5).abs() < 1e-7 && (probs[1] - 0.5).abs() < 1e-7);

        let (loss, _) = model.loss_and_grad(&input, &[0, 1, 0, 1]).unwrap();
        assert!((loss - core::f32::consts::LN_2).abs() < 1e-6, "loss = {loss}");
    }

    #[test]
    fn eval_output_independent_of_batch_composition() {
        let cfg = small_cfg();
        let mut model: Model<f32> = Model::init(cfg.clone()).unwrap();
        // Push some data through in train mode so running stats are
        // non-trivial.
        let warm = random_input(&cfg, 6, 3);
        model.forward(&warm, Mode::Train).unwrap();

        let x = random_input(&cfg, 1, 4);
        let y = random_input(&cfg, 1, 5);
        let mut concat = x.data.clone();
        concat.extend_from_slice(&y.data);
        let xy = Input::new(concat, 2, cfg.n_channels, cfg.n_samples).unwrap();

        let solo = model.forward_eval(&x).unwrap();
        let joint = model.forward_eval(&xy).unwrap();
        assert!((solo[0] - joint[0]).abs() < 1e-6);
        assert!((solo[1] - joint[1]).abs() < 1e-6);
    }

    #[test]
    fn duplicated_batch_leaves_loss_and_grads_unchanged() {
        let cfg = small_cfg();
        // f64 so the tolerance of 1e-12 is meaningful.
        let mut model: Model<f64> = Model::init(cfg.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 3 * cfg.n_channels * cfg.n_samples;
        let data: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let single = Input::new(data.clone(), 3, cfg.n_channels, cfg.n_samples).unwrap();
        let mut doubled_data = data.clone();
        doubled_data.extend_from_slice(&data);
        let doubled = Input::new(doubled_data, 6, cfg.n_channels, cfg.n_samples).unwrap();

        let mut model2 = model.clone();
        let (l1, g1) = model.loss_and_grad(&single, &[0, 1, 0]).unwrap();
        let (l2, g2) = model2.loss_and_grad(&doubled, &[0, 1, 0, 0, 1, 0]).unwrap();
        assert!((l1 - l2).abs() < 1e-12);
        for (a, b) in g1.tensors().iter().zip(g2.tensors().iter()) {
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn softmax_shift_invariance() {
        let logits = [0.3f64, -1.2];
        let shifted = [0.3 + 17.5, -1.2 + 17.5];
        let p = softmax(&logits);
        let q = softmax(&shifted);
        assert!((p[0] - q[0]).abs() < 1e-9 && (p[1] - q[1]).abs() < 1e-9);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn predict_probabilities_sum_to_one_and_match_argmax() {
        let mut data = vec![0.0f32; NUM_CHANNELS * EPOCH_SAMPLES];
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for v in &mut data {
            *v = rng.random_range(-1.0..1.0);
        }
        let epoch = EpochTensor::new(data, MoveClass::Left).unwrap();
        let model: Model<f32> = Model::init(NetConfig::default()).unwrap();
        let pred = predict(&model, &epoch).unwrap();
        assert!(pred.probabilities.iter().all(|&p| p >= 0.0));
        assert!((pred.probabilities[0] + pred.probabilities[1] - 1.0).abs() <= 1e-6);
        let expect = if pred.probabilities[1] > pred.probabilities[0] {
            MoveClass::Right
        } else {
            MoveClass::Left
        };
        assert_eq!(pred.class, expect);
    }
}
