//! Problem parameters and the domain types shared by every module.

mod params;
mod profile;
mod report;

pub use params::{validate_params, Equation, Params};
pub use profile::{
    ArcState, Chart, ChartState, Events, Profile, ProfileMethod, Sample, SolveStats, Start, Termination,
};
pub use report::{Check, CheckStatus, VerificationReport};
