//! The native backend: seeded splits, training, prediction and metrics.

pub mod data;
pub mod decimal;
pub mod forest;
pub mod kmeans;
pub mod knn;
pub mod linear;
pub mod metrics;
pub mod model;
pub mod registry;
pub mod split;
pub mod tree;

pub use data::Matrix;
pub use metrics::MetricRecord;
pub use model::{evaluate, fit, fit_kmeans, fit_linear, FeatureSpec, Hyper, MlType, Model, Outputs, Params, TrainSpec};
pub use registry::Algorithm;
pub use split::{default_split_sizes, train_test_split, Split};
