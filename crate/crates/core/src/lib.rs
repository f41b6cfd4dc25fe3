pub mod builders;
pub mod execution;
pub mod field;
pub mod kronpow;
pub mod lowerbound;
pub mod netfile;
pub mod network;
pub mod oracle;
pub mod pattern;
pub mod planner;
pub mod tensor;
