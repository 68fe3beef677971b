use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative with respect to the pre-activation.
    #[inline]
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
        }
    }
}

pub const N_CONV_LAYERS: [usize; 3] = [1, 2, 3];
pub const FILTERS_PER_LAYER: [usize; 4] = [4, 8, 16, 32];
pub const KERNEL_TIME: [usize; 5] = [3, 5, 7, 9, 11];
pub const POOL_TIME: [usize; 3] = [1, 2, 3];
pub const ACTIVATION: [Activation; 2] = [Activation::Relu, Activation::Tanh];
pub const N_DENSE_LAYERS: [usize; 2] = [1, 2];
pub const DENSE_UNITS: [usize; 4] = [16, 32, 64, 128];
pub const DROPOUT_RATE: [f64; 3] = [0.0, 0.25, 0.5];
pub const LEARNING_RATE: [f64; 3] = [1e-2, 1e-3, 1e-4];
pub const BATCH_SIZE: [usize; 3] = [16, 32, 64];

/// The ten hyperparameters that define a verifier network and how it is
/// trained.
///
/// Convolutions run along time over all six sensor/axis rows at once, each
/// followed by the activation and a max-pool. Hidden dense layers use the
/// same activation and are followed by dropout; the output is one sigmoid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CnnGenome {
    pub n_conv_layers: usize,
    pub filters_per_layer: usize,
    pub kernel_time: usize,
    pub pool_time: usize,
    pub activation: Activation,
    pub n_dense_layers: usize,
    pub dense_units: usize,
    pub dropout_rate: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
}

impl Default for CnnGenome {
    fn default() -> Self {
        Self {
            n_conv_layers: 2,
            filters_per_layer: 8,
            kernel_time: 7,
            pool_time: 3,
            activation: Activation::Relu,
            n_dense_layers: 1,
            dense_units: 32,
            dropout_rate: 0.25,
            learning_rate: 1e-2,
            batch_size: 32,
        }
    }
}

/// Trait identifiers, in genome order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenomeTrait {
    NConvLayers,
    FiltersPerLayer,
    KernelTime,
    PoolTime,
    Activation,
    NDenseLayers,
    DenseUnits,
    DropoutRate,
    LearningRate,
    BatchSize,
}

impl GenomeTrait {
    pub const ALL: [GenomeTrait; 10] = [
        GenomeTrait::NConvLayers,
        GenomeTrait::FiltersPerLayer,
        GenomeTrait::KernelTime,
        GenomeTrait::PoolTime,
        GenomeTrait::Activation,
        GenomeTrait::NDenseLayers,
        GenomeTrait::DenseUnits,
        GenomeTrait::DropoutRate,
        GenomeTrait::LearningRate,
        GenomeTrait::BatchSize,
    ];

    pub fn domain_size(self) -> usize {
        match self {
            GenomeTrait::NConvLayers => N_CONV_LAYERS.len(),
            GenomeTrait::FiltersPerLayer => FILTERS_PER_LAYER.len(),
            GenomeTrait::KernelTime => KERNEL_TIME.len(),
            GenomeTrait::PoolTime => POOL_TIME.len(),
            GenomeTrait::Activation => ACTIVATION.len(),
            GenomeTrait::NDenseLayers => N_DENSE_LAYERS.len(),
            GenomeTrait::DenseUnits => DENSE_UNITS.len(),
            GenomeTrait::DropoutRate => DROPOUT_RATE.len(),
            GenomeTrait::LearningRate => LEARNING_RATE.len(),
            GenomeTrait::BatchSize => BATCH_SIZE.len(),
        }
    }

    /// Position of the genome's value in this trait's domain, if it is in it.
    pub fn index_in(self, g: &CnnGenome) -> Option<usize> {
        match self {
            GenomeTrait::NConvLayers => N_CONV_LAYERS.iter().position(|&v| v == g.n_conv_layers),
            GenomeTrait::FiltersPerLayer => FILTERS_PER_LAYER.iter().position(|&v| v == g.filters_per_layer),
            GenomeTrait::KernelTime => KERNEL_TIME.iter().position(|&v| v == g.kernel_time),
            GenomeTrait::PoolTime => POOL_TIME.iter().position(|&v| v == g.pool_time),
            GenomeTrait::Activation => ACTIVATION.iter().position(|&v| v == g.activation),
            GenomeTrait::NDenseLayers => N_DENSE_LAYERS.iter().position(|&v| v == g.n_dense_layers),
            GenomeTrait::DenseUnits => DENSE_UNITS.iter().position(|&v| v == g.dense_units),
            GenomeTrait::DropoutRate => DROPOUT_RATE.iter().position(|&v| v == g.dropout_rate),
            GenomeTrait::LearningRate => LEARNING_RATE.iter().position(|&v| v == g.learning_rate),
            GenomeTrait::BatchSize => BATCH_SIZE.iter().position(|&v| v == g.batch_size),
        }
    }

    /// Set the trait to the `i`-th value of its domain.
    pub fn set_index(self, g: &mut CnnGenome, i: usize) {
        match self {
            GenomeTrait::NConvLayers => g.n_conv_layers = N_CONV_LAYERS[i],
            GenomeTrait::FiltersPerLayer => g.filters_per_layer = FILTERS_PER_LAYER[i],
            GenomeTrait::KernelTime => g.kernel_time = KERNEL_TIME[i],
            GenomeTrait::PoolTime => g.pool_time = POOL_TIME[i],
            GenomeTrait::Activation => g.activation = ACTIVATION[i],
            GenomeTrait::NDenseLayers => g.n_dense_layers = N_DENSE_LAYERS[i],
            GenomeTrait::DenseUnits => g.dense_units = DENSE_UNITS[i],
            GenomeTrait::DropoutRate => g.dropout_rate = DROPOUT_RATE[i],
            GenomeTrait::LearningRate => g.learning_rate = LEARNING_RATE[i],
            GenomeTrait::BatchSize => g.batch_size = BATCH_SIZE[i],
        }
    }

    /// Copy this trait's value from `src` into `dst`, in or out of domain.
    pub fn copy(self, dst: &mut CnnGenome, src: &CnnGenome) {
        match self {
            GenomeTrait::NConvLayers => dst.n_conv_layers = src.n_conv_layers,
            GenomeTrait::FiltersPerLayer => dst.filters_per_layer = src.filters_per_layer,
            GenomeTrait::KernelTime => dst.kernel_time = src.kernel_time,
            GenomeTrait::PoolTime => dst.pool_time = src.pool_time,
            GenomeTrait::Activation => dst.activation = src.activation,
            GenomeTrait::NDenseLayers => dst.n_dense_layers = src.n_dense_layers,
            GenomeTrait::DenseUnits => dst.dense_units = src.dense_units,
            GenomeTrait::DropoutRate => dst.dropout_rate = src.dropout_rate,
            GenomeTrait::LearningRate => dst.learning_rate = src.learning_rate,
            GenomeTrait::BatchSize => dst.batch_size = src.batch_size,
        }
    }

    pub fn same_value(self, a: &CnnGenome, b: &CnnGenome) -> bool {
        let mut probe = *a;
        self.copy(&mut probe, b);
        probe == *a
    }
}

impl CnnGenome {
    /// Every trait drawn uniformly from its domain.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut g = CnnGenome::default();
        for t in GenomeTrait::ALL {
            let i = rng.random_range(0..t.domain_size());
            t.set_index(&mut g, i);
        }
        g
    }

    /// Time length left after every conv/pool stage on `input_len` samples.
    pub fn final_time_len(&self, input_len: usize) -> usize {
        let pool = self.pool_time.max(1);
        (0..self.n_conv_layers).fold(input_len, |len, _| len / pool)
    }

    pub fn validate(&self, w_s: usize) -> Result<()> {
        for t in GenomeTrait::ALL {
            if t.index_in(self).is_none() {
                return Err(Error::InvalidGenome(format!("{t:?} outside its domain in {self:?}")));
            }
        }
        let input_len = w_s * 50;
        if self.final_time_len(input_len) < 1 {
            return Err(Error::InvalidGenome(format!(
                "{} conv layers with pool {} collapse {input_len} samples below 1",
                self.n_conv_layers, self.pool_time
            )));
        }
        Ok(())
    }
}
