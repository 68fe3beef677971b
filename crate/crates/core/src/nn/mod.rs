//! A small from-scratch convolutional network used as a per-subject
//! verifier: genome-defined topology, forward/backward passes, training and
//! gradient checking. Everything is `f64`.

mod genome;
mod model;
mod train;

pub use genome::{
    Activation, CnnGenome, GenomeTrait, ACTIVATION, BATCH_SIZE, DENSE_UNITS, DROPOUT_RATE, FILTERS_PER_LAYER,
    KERNEL_TIME, LEARNING_RATE, N_CONV_LAYERS, N_DENSE_LAYERS, POOL_TIME,
};
pub use model::CnnModel;
pub use train::{
    class_weights, grad_check, train, train_with, GradCheckReport, TrainOptions, TrainReport, TrainSet, EPOCHS,
    GRAD_CHECK_FLOOR, GRAD_CHECK_STEP, MOMENTUM,
};
