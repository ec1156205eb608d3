//! Dense feed-forward networks `u(t, x)`.

mod activation;
pub mod batch;
pub mod checkpoint;
pub(crate) mod network;

pub use activation::{gelu, gelu_prime, gelu_second, Activation};
pub use batch::{predict_batch, BatchForward, JetOrder, OutputAdjoints};
pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use network::{
    layer_sizes, param_count_for, LayerParams, Network, TapedNetwork, INPUT_WIDTH, OUTPUT_WIDTH,
};
