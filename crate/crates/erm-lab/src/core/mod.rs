//! Domain types shared by every module: samples, the L2(P_n) geometry,
//! noise, function representations, and the seeding policy. Everything here
//! is immutable after construction and every operation is a pure function of
//! its inputs.

pub mod fitted;
pub mod member;
pub mod noise;
pub mod norms;
pub mod sample;
pub mod seed;
pub mod values;

pub use fitted::{extend, FittedFunction};
pub use member::{MemberFn, SpikyMember};
pub use noise::NoiseVector;
pub use norms::{population_norm_surrogate, surrogate_norm_of_values, SurrogateNorm};
pub use sample::{DesignKind, DesignSample, DistributionId};
pub use seed::SeedPolicy;
pub use values::{
    compensated_sum, empirical_inner, empirical_norm, inner_mean, mean_and_se, norm_mean,
    FunctionValues,
};
