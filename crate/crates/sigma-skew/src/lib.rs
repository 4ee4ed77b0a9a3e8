//! Monte Carlo construction and verification of skew Brownian motion built
//! from continuous class-(Σ) processes.
//!
//! The pipeline: generate a nonnegative class-(Σ) path (reflected Brownian
//! motion, drawdown, a scaled |martingale|, or a product of reflected
//! components), decompose it into excursions, flip each excursion's sign by
//! an independent Bernoulli(α) draw — after a quadratic-variation time
//! change when the driver is not already Brownian — and statistically verify
//! the resulting process against the skew Brownian motion law: occupation
//! probabilities, marginal distribution, martingale characterizations,
//! local-time and decomposition identities.
//!
//! All randomness is a pure function of (seed, stream, replicate index), so
//! every ensemble and every test statistic is bit-reproducible regardless of
//! thread count.

pub mod checks;
pub mod error;
pub mod excursions;
pub mod io;
pub mod local_time;
pub mod path;
pub mod process;
pub mod rng;
pub mod sign;
pub mod skew;
pub mod stats;

pub use checks::{
    abs_match_test, abs_mismatch_count, azema_yor_identity_test, balayage_identity_test,
    martingale_increment_test, occupation_probability_test, sde_residual_test,
    sigma_membership_test, skew_marginal_ks_test, transform_martingale_test, TestReport, Transform,
};
pub use error::{Result, SigmaError};
pub use excursions::{decompose, decompose_process, decompose_signed, last_zero, Excursion, ExcursionDecomposition};
pub use local_time::{default_eps, lt_band, lt_tanaka, LocalTimeEstimate, LtMethod};
pub use path::{generate_bm, realized_qv, Path};
pub use process::{
    abs_bm_from, drawdown_from, make_sigma_process, product_abs_from, scaled_abs_from, sgn,
    time_change, ProcessKind, SigmaProcess,
};
pub use sign::{sample_z_alpha, sample_z_alpha_schedule, to_cadlag_k, zeta, AlphaSchedule, SignPath};
pub use skew::{
    build_direct, build_replicate, build_time_changed, drift_ledger, flip_signs, BuildSpec,
    Construction, SkewSolution,
};
pub use stats::StepFn;

/// Caps the rayon worker count for all subsequent parallel work. A second
/// call (or one made after parallel work has already run) is a no-op; the
/// determinism contract makes results identical for every worker count
/// anyway.
pub fn init_threads(threads: usize) {
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}
