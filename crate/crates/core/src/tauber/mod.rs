//! Generic Tauberian engine: sampled functions, Cesàro and Abel–Laplace
//! means, slow-decrease estimates and the Wiener–Ikehara pipeline.

mod means;
mod sampled;
mod slowdec;
mod theorem;
mod wiener_ikehara;

pub use means::{
    abel_laplace_mean, cesaro_mean, kernel_path, laplace_transform, truncated_mean, CutoffKernel, MeanValue,
    TRUNCATION_TOL,
};
pub use sampled::{registry, ClosedForm, Kind, SampledFunction, TailModel, CLOSED_FORM_TOL, REGISTRY_IDS};
pub use slowdec::{
    slow_decrease_estimate, slow_decrease_estimate_with, SlowDecreaseConfig, SlowDecreaseReport, SlowDecreaseRow,
    SlowDecreaseVerdict, DEFAULT_LAMBDAS,
};
pub use theorem::{tauber_demo, TauberDemo, TauberOutcome};
pub use wiener_ikehara::{
    wiener_ikehara_verify, wiener_ikehara_verify_with, TransformFn, TransformSample, WienerIkeharaConfig,
    WienerIkeharaProblem, WienerIkeharaReport,
};
