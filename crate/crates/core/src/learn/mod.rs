//! Training machinery: parameter-shift gradients, Adam, the classical
//! discriminator, and the distribution-learning and classification loops.

mod adam;
mod classifier;
mod discriminator;
mod distribution;
mod gradient;
mod report;

pub use adam::AdamState;
pub use classifier::{class_scores, readout_qubits, train_classifier, ClassifierConfig};
pub use discriminator::{Discriminator, HIDDEN_WIDTH, LEAKY_SLOPE};
pub use distribution::{
    encode_outcome, train_distribution_direct, train_distribution_qgan, DistributionConfig,
    ParamInit,
};
pub use gradient::{output_probabilities, probability_jacobian, Jacobian};
pub use report::TrainReport;
