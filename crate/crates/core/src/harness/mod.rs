//! Session orchestration and Monte Carlo sweeps.

pub mod channel;
pub mod metrics;
pub mod session;
pub mod sweep;
pub mod transcript;

pub use channel::apply_channel_noise;
pub use metrics::{certain_fraction, compute_iae, compute_qber, shannon_information, wrong_certain};
pub use session::{
    run_session, run_session_with_message, BlockOutcome, Delivery, Seeds, SessionConfig, SessionResult,
    DEFAULT_MESSAGE_BITS,
};
pub use sweep::{calibrate_error_rate, parse_grid, run_sweep, SweepConfig, SweepResult, SweepRow, CSV_HEADER};
pub use transcript::{ClassicalMessage, Party, Phase, Transcript, TranscriptEntry};
