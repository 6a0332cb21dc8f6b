//! Session data model: labeled trials grouped into runs and sessions.
//!
//! A trial stores 10 s of raw 8-channel signal at 500 Hz, channel-major.
//! A run holds 15 trials (5 left, 5 right, 5 rest, arbitrary order); a
//! session holds 12–20 runs. Constructors validate these protocol invariants
//! so downstream code can rely on them.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::{
    INSTRUCTION_WINDOW_SAMPLES, NUM_CHANNELS, RUN_COUNT_RANGE, SAMPLE_RATE_HZ, TRIALS_PER_CLASS,
    TRIALS_PER_RUN,
};

/// Cue class of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Label {
    Left,
    Right,
    Rest,
}

impl Label {
    /// Wire encoding used by the run-file format.
    pub fn to_u8(self) -> u8 {
        match self {
            Label::Left => 0,
            Label::Right => 1,
            Label::Rest => 2,
        }
    }

    pub fn from_u8(v: u8) -> Option<Label> {
        match v {
            0 => Some(Label::Left),
            1 => Some(Label::Right),
            2 => Some(Label::Rest),
            _ => None,
        }
    }
}

/// Two-class movement label; the classification target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MoveClass {
    Left,
    Right,
}

impl MoveClass {
    /// Class index used for logits / one-hot targets.
    pub fn index(self) -> usize {
        match self {
            MoveClass::Left => 0,
            MoveClass::Right => 1,
        }
    }
}

impl TryFrom<Label> for MoveClass {
    type Error = DataError;

    fn try_from(label: Label) -> Result<Self, DataError> {
        match label {
            Label::Left => Ok(MoveClass::Left),
            Label::Right => Ok(MoveClass::Right),
            Label::Rest => Err(DataError::RestTrialInTwoClassContext),
        }
    }
}

/// Validation errors for the session data model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataError {
    /// Sample buffer length is not `channels * n_raw`.
    SampleLengthMismatch { expected: usize, got: usize },
    /// Trial shorter than the instruction window requires.
    TrialTooShort { n_raw: usize, min: usize },
    /// `cue_onset + instruction window` exceeds the trial length.
    CueWindowOutOfRange { cue_onset: usize, n_raw: usize },
    /// A run does not hold exactly [`TRIALS_PER_RUN`] trials.
    BadTrialCount { got: usize },
    /// A run does not hold exactly [`TRIALS_PER_CLASS`] trials of each label.
    BadLabelBalance { left: usize, right: usize, rest: usize },
    /// Session run count outside [`RUN_COUNT_RANGE`].
    BadRunCount { got: usize },
    /// Session sample rate differs from [`SAMPLE_RATE_HZ`].
    BadSampleRate { got: u32 },
    /// A rest trial reached a two-class-only path.
    RestTrialInTwoClassContext,
}

impl fmt::Display for DataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataError::SampleLengthMismatch { expected, got } => {
                write!(f, "sample buffer holds {got} values, expected {expected}")
            }
            DataError::TrialTooShort { n_raw, min } => {
                write!(f, "trial has {n_raw} samples, minimum is {min}")
            }
            DataError::CueWindowOutOfRange { cue_onset, n_raw } => write!(
                f,
                "cue onset {cue_onset} leaves no room for a {INSTRUCTION_WINDOW_SAMPLES}-sample window in {n_raw} samples"
            ),
            DataError::BadTrialCount { got } => {
                write!(f, "run holds {got} trials, expected {TRIALS_PER_RUN}")
            }
            DataError::BadLabelBalance { left, right, rest } => write!(
                f,
                "run label balance {left}/{right}/{rest}, expected {TRIALS_PER_CLASS} of each"
            ),
            DataError::BadRunCount { got } => write!(
                f,
                "session holds {got} runs, expected {} to {}",
                RUN_COUNT_RANGE.start(),
                RUN_COUNT_RANGE.end()
            ),
            DataError::BadSampleRate { got } => {
                write!(f, "sample rate {got} Hz, expected {SAMPLE_RATE_HZ} Hz")
            }
            DataError::RestTrialInTwoClassContext => {
                write!(f, "rest trial is not part of the two-class view")
            }
        }
    }
}

impl core::error::Error for DataError {}

/// One cued trial: label, cue onset, and the raw 8-channel signal.
///
/// Samples are stored channel-major: all of channel 0, then channel 1, …
/// (the same layout as the on-disk run format).
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    label: Label,
    cue_onset: u32,
    n_raw: usize,
    samples: Vec<f32>,
}

impl Trial {
    /// Minimum raw samples per trial: the 4 s instruction window at 500 Hz.
    pub const MIN_RAW_SAMPLES: usize = INSTRUCTION_WINDOW_SAMPLES;

    /// Validates and builds a trial. `samples` must hold `8 * n_raw` values
    /// channel-major, with `n_raw` inferred from the buffer length.
    pub fn new(label: Label, cue_onset: u32, samples: Vec<f32>) -> Result<Trial, DataError> {
        if samples.len() % NUM_CHANNELS != 0 {
            return Err(DataError::SampleLengthMismatch {
                expected: (samples.len() / NUM_CHANNELS) * NUM_CHANNELS,
                got: samples.len(),
            });
        }
        let n_raw = samples.len() / NUM_CHANNELS;
        if n_raw < Self::MIN_RAW_SAMPLES {
            return Err(DataError::TrialTooShort {
                n_raw,
                min: Self::MIN_RAW_SAMPLES,
            });
        }
        if cue_onset as usize + INSTRUCTION_WINDOW_SAMPLES > n_raw {
            return Err(DataError::CueWindowOutOfRange {
                cue_onset: cue_onset as usize,
                n_raw,
            });
        }
        Ok(Trial {
            label,
            cue_onset,
            n_raw,
            samples,
        })
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn cue_onset(&self) -> u32 {
        self.cue_onset
    }

    /// Raw samples per channel.
    pub fn n_raw(&self) -> usize {
        self.n_raw
    }

    /// One channel's samples.
    pub fn channel(&self, c: usize) -> &[f32] {
        &self.samples[c * self.n_raw..(c + 1) * self.n_raw]
    }

    /// The full channel-major buffer.
    pub fn samples(&self) -> &[f32] {
        &self.samples
    }
}

/// A block of [`TRIALS_PER_RUN`] trials with balanced labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    trials: Vec<Trial>,
}

impl Run {
    pub fn new(trials: Vec<Trial>) -> Result<Run, DataError> {
        if trials.len() != TRIALS_PER_RUN {
            return Err(DataError::BadTrialCount { got: trials.len() });
        }
        let count = |l: Label| trials.iter().filter(|t| t.label() == l).count();
        let (left, right, rest) = (count(Label::Left), count(Label::Right), count(Label::Rest));
        if left != TRIALS_PER_CLASS || right != TRIALS_PER_CLASS || rest != TRIALS_PER_CLASS {
            return Err(DataError::BadLabelBalance { left, right, rest });
        }
        Ok(Run { trials })
    }

    /// Builds a run without validating the protocol invariants. Only for
    /// tests that need malformed or degenerate runs.
    #[doc(hidden)]
    pub fn new_unchecked(trials: Vec<Trial>) -> Run {
        Run { trials }
    }

    pub fn trials(&self) -> &[Trial] {
        &self.trials
    }
}

/// One wearing of the device: an ordered list of runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    session_id: String,
    sample_rate: u32,
    runs: Vec<Run>,
}

impl Session {
    pub fn new(session_id: String, sample_rate: u32, runs: Vec<Run>) -> Result<Session, DataError> {
        if sample_rate != SAMPLE_RATE_HZ {
            return Err(DataError::BadSampleRate { got: sample_rate });
        }
        if !RUN_COUNT_RANGE.contains(&runs.len()) {
            return Err(DataError::BadRunCount { got: runs.len() });
        }
        Ok(Session {
            session_id,
            sample_rate,
            runs,
        })
    }

    pub fn session_id(&self) -> &str {
        &self.session_id
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    /// Two-class view over a borrowed run list; see [`two_class_view`].
    pub fn two_class_view(&self) -> Vec<TwoClassTrial<'_>> {
        two_class_view_of_runs(&self.runs)
    }
}

/// A left/right trial with its position inside the session.
#[derive(Debug, Clone, Copy)]
pub struct TwoClassTrial<'a> {
    pub run_index: usize,
    pub trial_index: usize,
    pub class: MoveClass,
    pub trial: &'a Trial,
}

/// Drops rest trials and returns the remaining left/right trials in session
/// order (run order, then intra-run order).
pub fn two_class_view(session: &Session) -> Vec<TwoClassTrial<'_>> {
    session.two_class_view()
}

pub(crate) fn two_class_view_of_runs(runs: &[Run]) -> Vec<TwoClassTrial<'_>> {
    let mut out = Vec::new();
    for (run_index, run) in runs.iter().enumerate() {
        for (trial_index, trial) in run.trials().iter().enumerate() {
            let class = match trial.label() {
                Label::Left => MoveClass::Left,
                Label::Right => MoveClass::Right,
                Label::Rest => continue,
            };
            out.push(TwoClassTrial {
                run_index,
                trial_index,
                class,
                trial,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn flat_trial(label: Label, n_raw: usize) -> Trial {
        Trial::new(label, 0, vec![0.0; NUM_CHANNELS * n_raw]).unwrap()
    }

    fn balanced_run() -> Run {
        let mut trials = Vec::new();
        for label in [Label::Left, Label::Right, Label::Rest] {
            for _ in 0..TRIALS_PER_CLASS {
                trials.push(flat_trial(label, 2000));
            }
        }
        Run::new(trials).unwrap()
    }

    #[test]
    fn trial_rejects_short_signal() {
        let err = Trial::new(Label::Left, 0, vec![0.0; NUM_CHANNELS * 100]).unwrap_err();
        assert!(matches!(err, DataError::TrialTooShort { .. }));
    }

    #[test]
    fn trial_rejects_late_cue() {
        let err = Trial::new(Label::Left, 1, vec![0.0; NUM_CHANNELS * 2000]).unwrap_err();
        assert!(matches!(err, DataError::CueWindowOutOfRange { .. }));
    }

    #[test]
    fn run_rejects_fourteen_trials() {
        let mut trials = balanced_run().trials.clone();
        trials.pop();
        assert!(matches!(
            Run::new(trials),
            Err(DataError::BadTrialCount { got: 14 })
        ));
    }

    #[test]
    fn run_rejects_imbalanced_labels() {
        let mut trials = balanced_run().trials.clone();
        trials[0] = flat_trial(Label::Right, 2000);
        assert!(matches!(
            Run::new(trials),
            Err(DataError::BadLabelBalance { left: 4, right: 6, rest: 5 })
        ));
    }

    #[test]
    fn session_rejects_out_of_range_run_counts() {
        let runs = vec![balanced_run(); 11];
        assert!(matches!(
            Session::new("s".into(), SAMPLE_RATE_HZ, runs),
            Err(DataError::BadRunCount { got: 11 })
        ));
        let runs = vec![balanced_run(); 21];
        assert!(Session::new("s".into(), SAMPLE_RATE_HZ, runs).is_err());
    }

    #[test]
    fn session_rejects_wrong_sample_rate() {
        let runs = vec![balanced_run(); 12];
        assert!(matches!(
            Session::new("s".into(), 250, runs),
            Err(DataError::BadSampleRate { got: 250 })
        ));
    }

    #[test]
    fn two_class_view_keeps_ten_per_run_in_order() {
        let session = Session::new("s".into(), SAMPLE_RATE_HZ, vec![balanced_run(); 12]).unwrap();
        let view = two_class_view(&session);
        assert_eq!(view.len(), 10 * 12);
        // Order preserved: run indices non-decreasing, trial indices increasing
        // within a run.
        for pair in view.windows(2) {
            assert!(pair[0].run_index <= pair[1].run_index);
            if pair[0].run_index == pair[1].run_index {
                assert!(pair[0].trial_index < pair[1].trial_index);
            }
        }
        assert!(view.iter().all(|t| t.trial.label() != Label::Rest));
    }

    #[test]
    fn two_class_view_of_all_rest_run_is_empty() {
        // Degenerate run outside the protocol invariants.
        let runs = [Run::new_unchecked(vec![
            flat_trial(Label::Rest, 2000);
            TRIALS_PER_RUN
        ])];
        assert!(two_class_view_of_runs(&runs).is_empty());
    }
}
