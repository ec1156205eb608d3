//! Loss assembly, optimizers and the training loop.

mod adam;
mod loss;
mod schedule;
mod trainer;

pub use adam::{adam_step, sgd_step, AdamParams, AdamState};
pub use loss::{
    loss_bound, loss_init, loss_res, total_loss, JetModel, LossBreakdown, LossWeights, Objective,
    CHUNK,
};
pub use schedule::{lr_at, Schedule};
pub use trainer::{
    read_history_csv, train, write_history_csv, Optimizer, TrainConfig, TrainOutcome, TrainRecord,
    HISTORY_HEADER,
};
