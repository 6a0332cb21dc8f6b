//! Algorithmic core of **bmikit**, a desk-scale EEG motor-movement BMI pipeline.
//!
//! The crate covers the full in-memory path from raw multichannel signal to
//! transfer-learning experiment results:
//!
//! * [`data`] — sessions, runs and labeled trials (8 channels at 500 Hz).
//! * [`synth`] — a deterministic synthetic-EEG generator with class-dependent
//!   oscillatory signatures and controllable inter-session drift.
//! * [`dsp`] — the preprocessing chain: 50 Hz notch, 4th-order Butterworth
//!   band-pass 0.5–100 Hz, ×2 decimation, per-epoch standardization.
//! * [`net`] — a tiny CNN (temporal / spatial-depthwise / separable stack)
//!   with hand-written forward and backward passes, cross-entropy loss and
//!   Adam, sized for 8×950 inputs and 2 classes.
//! * [`harness`] — rolling-window cross-validation, pretraining-epoch
//!   selection, one-to-one / multi-to-one / chain transfer learning, and
//!   calibration-time accounting.
//! * [`budget`] — closed-form MAC counting and the latency / energy / battery
//!   arithmetic of the embedded deployment.
//! * [`quant`] — post-training 8-bit affine quantization and an
//!   integer-accumulation inference path.
//!
//! Everything here is pure computation over owned buffers; file formats and
//! the CLI live in the companion `bmikit` crate. The crate is `no_std`
//! compatible (with `alloc`) so the inference path can be reused on embedded
//! targets: build with `default-features = false`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod budget;
pub mod data;
pub mod dsp;
pub mod harness;
pub mod net;
pub mod quant;
pub mod synth;

mod seed;

pub use seed::derive_seed;

/// Number of electrode channels; fixed by the headband hardware model.
pub const NUM_CHANNELS: usize = 8;

/// Acquisition sample rate in Hz.
pub const SAMPLE_RATE_HZ: u32 = 500;

/// Trials per run.
pub const TRIALS_PER_RUN: usize = 15;

/// Trials of each class (left / right / rest) per run.
pub const TRIALS_PER_CLASS: usize = 5;

/// Raw samples stored per trial: 10 s at 500 Hz.
pub const TRIAL_RAW_SAMPLES: usize = 5000;

/// Length of the instruction window in raw samples (4 s at 500 Hz).
pub const INSTRUCTION_WINDOW_SAMPLES: usize = 2000;

/// Inclusive range of runs per session supported by the protocol.
pub const RUN_COUNT_RANGE: core::ops::RangeInclusive<usize> = 12..=20;
