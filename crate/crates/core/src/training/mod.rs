//! Optimizers, gradient engines and the training drivers, with exact
//! accounting of circuit evaluations.

mod adam;
mod psr;
mod trace;
mod trainer;

pub use adam::{adam_step, AdamConfig, OptimState};
pub use psr::psr_gradient;
pub use trace::{params_hash, IterationRecord, Phase, TrainTrace};
pub use trainer::{
    predict_label, pretrain_general, train_alt_then_sim, train_alternate, train_full_psr, train_gsim_only,
    train_simultaneous, GradientEngine, PretrainSchedule, Task, TrainConfig, Trainer,
};
