//! Random polynomial ideals, an instrumented Buchberger algorithm, and
//! models that predict how much work a Gröbner basis computation takes.

pub mod buchberger;
pub mod idealgen;
pub mod invariants;
pub mod pipeline;
pub mod poly;
pub mod regress;
pub mod rng;
pub mod scalar;
pub mod valuenet;

pub use scalar::Scalar;

pub type DesignMatrix64 = regress::DesignMatrix<f64>;
pub type DesignMatrix32 = regress::DesignMatrix<f32>;
pub type LinearModel64 = regress::LinearModel<f64>;
pub type LinearModel32 = regress::LinearModel<f32>;
pub type EvalMetrics64 = regress::EvalMetrics<f64>;
pub type GruParams64 = valuenet::GruParams<f64>;
pub type GruParams32 = valuenet::GruParams<f32>;
pub type SeqSample64 = valuenet::SeqSample<f64>;
