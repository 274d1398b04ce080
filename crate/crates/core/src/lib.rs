pub mod cli;
pub mod graph;
pub mod index;
pub mod json;
pub mod metrics;
pub mod task;
pub mod tensor;
pub mod validate;
pub mod view;
