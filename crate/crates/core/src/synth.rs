//! Synthetic multi-session EEG with class-dependent oscillatory signatures
//! and controllable inter-session drift.
//!
//! Each subject profile assigns the left and right classes disjoint channel
//! sets carrying amplitude-modulated 8–12 Hz sinusoids during the 4 s
//! instruction window, on top of 1/f^α background noise. A [`DriftParams`]
//! value models what changes between two wearings of the headband: a
//! near-identity channel mixing (electrode shift), per-channel gain changes,
//! a raised white-noise floor, and a small shift of the rhythm frequencies.
//!
//! Every output is a pure function of `(profile, drift, seed)`; per-trial
//! seeds are derived deterministically from the session seed so generation
//! could be parallelized without changing results.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::{Label, Run, Session, Trial};
use crate::seed::derive_seed;
use crate::{
    INSTRUCTION_WINDOW_SAMPLES, NUM_CHANNELS, RUN_COUNT_RANGE, SAMPLE_RATE_HZ, TRIALS_PER_CLASS,
    TRIAL_RAW_SAMPLES,
};

/// Baseline standard deviation of the additive white noise floor, in units
/// of the (unit-variance) background; [`DriftParams::noise_scale`] multiplies
/// this.
pub const NOISE_FLOOR_STD: f64 = 0.5;

/// Radians of channel-space rotation per unit of drift magnitude δ.
pub const MIXING_ROTATION_SCALE: f64 = 2.4;

/// Taps of the fractional-integration filter shaping the 1/f^α background.
const PINK_FILTER_TAPS: usize = 32;

/// Raised-cosine ramp length (samples) at the edges of the signature window.
const ENVELOPE_RAMP: usize = 100;

/// Errors from generator parameter validation.
#[derive(Debug, Clone, PartialEq)]
pub enum SynthError {
    RunCountOutOfRange { got: usize },
    OverlappingSignatureChannels { channel: usize },
    NonPositiveAmplitude { amplitude: f64 },
    BadChannelIndex { channel: usize },
    InvalidDrift(&'static str),
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::RunCountOutOfRange { got } => write!(
                f,
                "run count {got} outside {}..={}",
                RUN_COUNT_RANGE.start(),
                RUN_COUNT_RANGE.end()
            ),
            SynthError::OverlappingSignatureChannels { channel } => {
                write!(f, "channel {channel} appears in both class signatures")
            }
            SynthError::NonPositiveAmplitude { amplitude } => {
                write!(f, "signature amplitude {amplitude} must be > 0")
            }
            SynthError::BadChannelIndex { channel } => {
                write!(f, "channel index {channel} out of range")
            }
            SynthError::InvalidDrift(what) => write!(f, "invalid drift parameters: {what}"),
        }
    }
}

impl core::error::Error for SynthError {}

/// One oscillatory class signature: a tone on one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SignatureComponent {
    pub channel: usize,
    pub freq_hz: f64,
    pub amplitude: f64,
}

/// A synthetic subject: where and how strongly each class modulates the
/// rhythm, plus background-noise shape and per-channel baseline gains.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubjectProfile {
    pub left: Vec<SignatureComponent>,
    pub right: Vec<SignatureComponent>,
    /// Exponent α of the 1/f^α background.
    pub noise_exponent: f64,
    pub base_gains: [f64; NUM_CHANNELS],
}

impl SubjectProfile {
    /// Checks the profile invariants: disjoint class channel sets, positive
    /// amplitudes, channel indices in range.
    pub fn validate(&self) -> Result<(), SynthError> {
        for c in self.left.iter().chain(&self.right) {
            if c.channel >= NUM_CHANNELS {
                return Err(SynthError::BadChannelIndex { channel: c.channel });
            }
            if !(c.amplitude > 0.0) {
                return Err(SynthError::NonPositiveAmplitude {
                    amplitude: c.amplitude,
                });
            }
        }
        for l in &self.left {
            if self.right.iter().any(|r| r.channel == l.channel) {
                return Err(SynthError::OverlappingSignatureChannels { channel: l.channel });
            }
        }
        Ok(())
    }

    fn signature(&self, label: Label) -> &[SignatureComponent] {
        match label {
            Label::Left => &self.left,
            Label::Right => &self.right,
            Label::Rest => &[],
        }
    }
}

/// Deterministically samples a subject profile: two signature channels per
/// class (left from the first channel group, right from the second),
/// 8–12 Hz center frequencies, and near-unit baseline gains.
pub fn make_profile(seed: u64) -> SubjectProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0, 0));
    let mut pick = |rng: &mut ChaCha8Rng, lo: usize| {
        let mut group: Vec<usize> = (lo..lo + NUM_CHANNELS / 2).collect();
        group.shuffle(rng);
        group.truncate(2);
        group
    };
    let left_channels = pick(&mut rng, 0);
    let right_channels = pick(&mut rng, NUM_CHANNELS / 2);

    let mut component = |rng: &mut ChaCha8Rng, channel: usize| SignatureComponent {
        channel,
        freq_hz: rng.random_range(8.5..11.5),
        amplitude: rng.random_range(1.6..2.2),
    };
    let left = left_channels
        .iter()
        .map(|&c| component(&mut rng, c))
        .collect();
    let right = right_channels
        .iter()
        .map(|&c| component(&mut rng, c))
        .collect();

    let mut base_gains = [1.0; NUM_CHANNELS];
    for g in &mut base_gains {
        *g = rng.random_range(0.9..1.1);
    }

    let profile = SubjectProfile {
        left,
        right,
        noise_exponent: 1.0,
        base_gains,
    };
    debug_assert!(profile.validate().is_ok());
    profile
}

/// What changes between two sessions of the same subject.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DriftParams {
    /// Channel mixing matrix, a rotation `exp(δ·MIXING_ROTATION_SCALE·S)`
    /// with `S` a random unit-Frobenius skew generator; orthogonal, hence
    /// always invertible, and exactly the identity at δ = 0.
    pub mixing: [[f64; NUM_CHANNELS]; NUM_CHANNELS],
    pub gains: [f64; NUM_CHANNELS],
    /// Multiplier on [`NOISE_FLOOR_STD`].
    pub noise_scale: f64,
    /// Magnitude of the per-session shift of signature frequencies.
    pub freq_jitter_hz: f64,
    /// Drift magnitude δ the mixing was built from.
    pub delta: f64,
    pub seed: u64,
}

impl DriftParams {
    /// No drift at all: the reference wearing of the device.
    pub fn none(seed: u64) -> DriftParams {
        DriftParams::custom(seed, 0.0, (1.0, 1.0), 1.0, 0.0).expect("identity drift is valid")
    }

    /// Mild drift preset: δ = 0.1, gains in [0.8, 1.25], noise ×1.2.
    pub fn mild(seed: u64) -> DriftParams {
        DriftParams::custom(seed, 0.1, (0.8, 1.25), 1.2, 0.5).expect("mild preset is valid")
    }

    /// Strong drift preset: δ = 0.3, gains in [0.5, 2.0], noise ×1.5.
    /// Calibrated so that a model carried across sessions without transfer
    /// learning loses on the order of 20–30 accuracy points.
    pub fn strong(seed: u64) -> DriftParams {
        DriftParams::custom(seed, 0.3, (0.5, 2.0), 1.5, 1.5).expect("strong preset is valid")
    }

    /// Builds drift parameters from explicit knobs. Gains are drawn
    /// uniformly from `gain_range`, the mixing rotation from `delta`.
    pub fn custom(
        seed: u64,
        delta: f64,
        gain_range: (f64, f64),
        noise_scale: f64,
        freq_jitter_hz: f64,
    ) -> Result<DriftParams, SynthError> {
        if !(delta >= 0.0) {
            return Err(SynthError::InvalidDrift("delta must be >= 0"));
        }
        if !(gain_range.0 > 0.0 && gain_range.1 >= gain_range.0) {
            return Err(SynthError::InvalidDrift("gain range must be positive"));
        }
        if !(noise_scale > 0.0) {
            return Err(SynthError::InvalidDrift("noise scale must be > 0"));
        }
        if !(freq_jitter_hz >= 0.0) {
            return Err(SynthError::InvalidDrift("freq jitter must be >= 0"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 1, 0));
        let mixing = random_rotation(delta * MIXING_ROTATION_SCALE, &mut rng);
        let mut gains = [1.0; NUM_CHANNELS];
        for g in &mut gains {
            *g = if gain_range.0 == gain_range.1 {
                gain_range.0
            } else {
                rng.random_range(gain_range.0..gain_range.1)
            };
        }
        Ok(DriftParams {
            mixing,
            gains,
            noise_scale,
            freq_jitter_hz,
            delta,
            seed,
        })
    }

    /// Declared bound on how far the mixing may deviate from the identity:
    /// `‖M − I‖_F ≤ exp(√2·MIXING_ROTATION_SCALE·δ) − 1`.
    pub fn mixing_deviation_bound(delta: f64) -> f64 {
        libm::expm1(core::f64::consts::SQRT_2 * MIXING_ROTATION_SCALE * delta)
    }

    /// Checks the drift invariants: orthogonal (hence invertible) mixing
    /// within the declared deviation bound, positive gains and noise scale.
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.gains.iter().any(|&g| !(g > 0.0)) {
            return Err(SynthError::InvalidDrift("gain multipliers must be > 0"));
        }
        if !(self.noise_scale > 0.0) {
            return Err(SynthError::InvalidDrift("noise scale must be > 0"));
        }
        let m = &self.mixing;
        let mut dev = 0.0;
        let mut ortho = 0.0;
        for i in 0..NUM_CHANNELS {
            for j in 0..NUM_CHANNELS {
                let id = if i == j { 1.0 } else { 0.0 };
                dev += (m[i][j] - id) * (m[i][j] - id);
                let mut dot = 0.0;
                for k in 0..NUM_CHANNELS {
                    dot += m[k][i] * m[k][j];
                }
                ortho += (dot - id) * (dot - id);
            }
        }
        if libm::sqrt(ortho) > 1e-8 {
            return Err(SynthError::InvalidDrift("mixing is not orthogonal"));
        }
        if libm::sqrt(dev) > Self::mixing_deviation_bound(self.delta) + 1e-9 {
            return Err(SynthError::InvalidDrift("mixing exceeds deviation bound"));
        }
        Ok(())
    }
}

/// `exp(angle·S)` for a random skew-symmetric `S` normalized so a single
/// Givens plane would rotate by exactly `angle`.
fn random_rotation(angle: f64, rng: &mut ChaCha8Rng) -> [[f64; NUM_CHANNELS]; NUM_CHANNELS] {
    let mut skew = [[0.0f64; NUM_CHANNELS]; NUM_CHANNELS];
    let mut norm_sq = 0.0;
    for i in 0..NUM_CHANNELS {
        for j in (i + 1)..NUM_CHANNELS {
            let v: f64 = rng.sample(StandardNormal);
            skew[i][j] = v;
            skew[j][i] = -v;
            norm_sq += 2.0 * v * v;
        }
    }
    let mut m = identity();
    if angle == 0.0 || norm_sq == 0.0 {
        return m;
    }
    let scale = angle * core::f64::consts::SQRT_2 / libm::sqrt(norm_sq);
    for row in &mut skew {
        for v in row.iter_mut() {
            *v *= scale;
        }
    }
    // exp(A) by plain series; ‖A‖ is at most a few units here so 24 terms
    // reach machine precision.
    let mut term = identity();
    for k in 1..=24 {
        term = matmul(&term, &skew);
        let inv_k = 1.0 / k as f64;
        for row in &mut term {
            for v in row.iter_mut() {
                *v *= inv_k;
            }
        }
        for i in 0..NUM_CHANNELS {
            for j in 0..NUM_CHANNELS {
                m[i][j] += term[i][j];
            }
        }
    }
    m
}

fn identity() -> [[f64; NUM_CHANNELS]; NUM_CHANNELS] {
    let mut m = [[0.0; NUM_CHANNELS]; NUM_CHANNELS];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn matmul(
    a: &[[f64; NUM_CHANNELS]; NUM_CHANNELS],
    b: &[[f64; NUM_CHANNELS]; NUM_CHANNELS],
) -> [[f64; NUM_CHANNELS]; NUM_CHANNELS] {
    let mut out = [[0.0; NUM_CHANNELS]; NUM_CHANNELS];
    for i in 0..NUM_CHANNELS {
        for k in 0..NUM_CHANNELS {
            let aik = a[i][k];
            for (j, o) in out[i].iter_mut().enumerate() {
                *o += aik * b[k][j];
            }
        }
    }
    out
}

/// Uniform value in [0, 1) from a hash, for session-level jitter offsets.
fn unit_f64(h: u64) -> f64 {
    (h >> 11) as f64 / (1u64 << 53) as f64
}

/// Per-session frequency offset of one signature component, fixed across all
/// trials of the session (it depends only on the drift seed).
fn jitter_offset(drift: &DriftParams, label: Label, component: usize) -> f64 {
    if drift.freq_jitter_hz == 0.0 {
        return 0.0;
    }
    let tag = match label {
        Label::Left => 2,
        Label::Right => 3,
        Label::Rest => return 0.0,
    };
    let u = unit_f64(derive_seed(drift.seed, tag, component as u64));
    (2.0 * u - 1.0) * drift.freq_jitter_hz
}

/// MA coefficients of the fractional integrator `(1 - z^{-1})^{-α/2}`,
/// truncated; convolving white noise with these yields 1/f^α noise.
fn pink_taps(alpha: f64) -> [f64; PINK_FILTER_TAPS] {
    let mut h = [0.0; PINK_FILTER_TAPS];
    h[0] = 1.0;
    for k in 1..PINK_FILTER_TAPS {
        h[k] = h[k - 1] * (k as f64 - 1.0 + alpha / 2.0) / k as f64;
    }
    h
}

fn envelope(t: usize) -> f64 {
    let ramp = ENVELOPE_RAMP;
    if t < ramp {
        0.5 * (1.0 - libm::cos(core::f64::consts::PI * t as f64 / ramp as f64))
    } else if t >= INSTRUCTION_WINDOW_SAMPLES - ramp {
        let k = INSTRUCTION_WINDOW_SAMPLES - 1 - t;
        0.5 * (1.0 - libm::cos(core::f64::consts::PI * k as f64 / ramp as f64))
    } else {
        1.0
    }
}

/// Generates one 10 s trial. The class modulation is active only inside the
/// 4 s instruction window at the start of the trial; the recorded signal is
/// `gains ⊙ (mixing × (background + signature)) + noise_scale·floor·white`.
pub fn synth_trial(
    profile: &SubjectProfile,
    drift: &DriftParams,
    label: Label,
    seed: u64,
) -> Trial {
    let n = TRIAL_RAW_SAMPLES;
    let fs = SAMPLE_RATE_HZ as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let taps = pink_taps(profile.noise_exponent);

    // Unit-variance 1/f^α background, one independent stream per channel.
    let mut source = vec![0.0f64; NUM_CHANNELS * n];
    for c in 0..NUM_CHANNELS {
        let mut white = vec![0.0f64; n + PINK_FILTER_TAPS];
        for w in &mut white {
            *w = rng.sample(StandardNormal);
        }
        let ch = &mut source[c * n..(c + 1) * n];
        for (t, v) in ch.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, tap) in taps.iter().enumerate() {
                acc += tap * white[t + PINK_FILTER_TAPS - 1 - k];
            }
            *v = acc;
        }
        let mean = ch.iter().sum::<f64>() / n as f64;
        let var = ch.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        if var > 0.0 {
            let inv = 1.0 / libm::sqrt(var);
            for v in ch.iter_mut() {
                *v = (*v - mean) * inv;
            }
        }
    }

    // Class signature inside the instruction window.
    for (idx, comp) in profile.signature(label).iter().enumerate() {
        let phase: f64 = rng.random_range(0.0..2.0 * core::f64::consts::PI);
        let freq = comp.freq_hz + jitter_offset(drift, label, idx);
        let ch = &mut source[comp.channel * n..comp.channel * n + INSTRUCTION_WINDOW_SAMPLES];
        for (t, v) in ch.iter_mut().enumerate() {
            let arg = 2.0 * core::f64::consts::PI * freq * t as f64 / fs + phase;
            *v += comp.amplitude * libm::sin(arg) * envelope(t);
        }
    }

    // Mixing, gains, noise floor.
    let mut samples = vec![0.0f32; NUM_CHANNELS * n];
    let noise_std = drift.noise_scale * NOISE_FLOOR_STD;
    for c in 0..NUM_CHANNELS {
        let gain = profile.base_gains[c] * drift.gains[c];
        let out = &mut samples[c * n..(c + 1) * n];
        for (t, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for c2 in 0..NUM_CHANNELS {
                acc += drift.mixing[c][c2] * source[c2 * n + t];
            }
            let w: f64 = rng.sample(StandardNormal);
            *o = (gain * acc + noise_std * w) as f32;
        }
    }

    Trial::new(label, 0, samples).expect("generated trial satisfies invariants")
}

/// Generates a full session: `n_runs` runs of 15 trials (5 per class, order
/// shuffled per run), with the same drift applied to every run.
pub fn synth_session(
    profile: &SubjectProfile,
    drift: &DriftParams,
    n_runs: usize,
    seed: u64,
) -> Result<Session, SynthError> {
    synth_session_with_id(profile, drift, n_runs, seed, format!("synth-{seed:016x}"))
}

/// [`synth_session`] with an explicit session id.
pub fn synth_session_with_id(
    profile: &SubjectProfile,
    drift: &DriftParams,
    n_runs: usize,
    seed: u64,
    session_id: String,
) -> Result<Session, SynthError> {
    if !RUN_COUNT_RANGE.contains(&n_runs) {
        return Err(SynthError::RunCountOutOfRange { got: n_runs });
    }
    let mut runs = Vec::with_capacity(n_runs);
    for r in 0..n_runs {
        let run_seed = derive_seed(seed, r as u64, 0);
        let mut labels = Vec::with_capacity(3 * TRIALS_PER_CLASS);
        for label in [Label::Left, Label::Right, Label::Rest] {
            labels.extend(core::iter::repeat(label).take(TRIALS_PER_CLASS));
        }
        let mut shuffle_rng = ChaCha8Rng::seed_from_u64(derive_seed(run_seed, 0, 1));
        labels.shuffle(&mut shuffle_rng);

        let trials = labels
            .iter()
            .enumerate()
            .map(|(t, &label)| {
                synth_trial(profile, drift, label, derive_seed(run_seed, 1, t as u64))
            })
            .collect();
        runs.push(Run::new(trials).expect("generated run satisfies invariants"));
    }
    Ok(Session::new(session_id, SAMPLE_RATE_HZ, runs).expect("generated session is valid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_are_deterministic_per_seed() {
        assert_eq!(make_profile(42), make_profile(42));
        assert_ne!(make_profile(42), make_profile(43));
    }

    #[test]
    fn profile_invariants_hold_across_seeds() {
        for seed in 0..100 {
            let p = make_profile(seed);
            p.validate().unwrap();
            assert!(p.left.iter().all(|c| c.amplitude > 0.0));
            assert!(p.right.iter().all(|c| c.amplitude > 0.0));
        }
    }

    #[test]
    fn different_seeds_vary_signature_channels() {
        let reference = make_profile(0);
        let ref_channels: Vec<usize> = reference.left.iter().map(|c| c.channel).collect();
        let mut collisions = 0;
        for seed in 1..=100 {
            let p = make_profile(seed);
            let channels: Vec<usize> = p.left.iter().map(|c| c.channel).collect();
            if channels == ref_channels {
                collisions += 1;
            }
        }
        // 12 ordered 2-of-4 choices; ~8 collisions expected, 40 is far above
        // any plausible fluctuation.
        assert!(collisions < 40, "collisions = {collisions}");
    }

    #[test]
    fn trials_are_deterministic() {
        let p = make_profile(1);
        let d = DriftParams::strong(2);
        let a = synth_trial(&p, &d, Label::Left, 99);
        let b = synth_trial(&p, &d, Label::Left, 99);
        assert_eq!(a, b);
        let c = synth_trial(&p, &d, Label::Left, 100);
        assert_ne!(a, c);
    }

    #[test]
    fn drift_presets_satisfy_invariants() {
        for seed in 0..20 {
            DriftParams::none(seed).validate().unwrap();
            DriftParams::mild(seed).validate().unwrap();
            DriftParams::strong(seed).validate().unwrap();
        }
    }

    #[test]
    fn zero_delta_mixing_is_identity() {
        let d = DriftParams::none(7);
        for i in 0..NUM_CHANNELS {
            for j in 0..NUM_CHANNELS {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((d.mixing[i][j] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn session_rejects_out_of_range_run_count() {
        let p = make_profile(1);
        let d = DriftParams::none(1);
        assert!(matches!(
            synth_session(&p, &d, 11, 5),
            Err(SynthError::RunCountOutOfRange { got: 11 })
        ));
        assert!(synth_session(&p, &d, 21, 5).is_err());
    }

    #[test]
    fn session_has_balanced_shuffled_runs() {
        let p = make_profile(3);
        let d = DriftParams::mild(4);
        let s = synth_session(&p, &d, 12, 11).unwrap();
        assert_eq!(s.runs().len(), 12);
        // Balance is enforced by Run::new; check shuffling actually happens:
        // not every run starts with the same label sequence.
        let first: Vec<Label> = s.runs()[0].trials().iter().map(|t| t.label()).collect();
        let any_different = s.runs()[1..].iter().any(|r| {
            let labels: Vec<Label> = r.trials().iter().map(|t| t.label()).collect();
            labels != first
        });
        assert!(any_different);
    }

    #[test]
    fn custom_drift_validates_inputs() {
        assert!(DriftParams::custom(0, -0.1, (1.0, 1.0), 1.0, 0.0).is_err());
        assert!(DriftParams::custom(0, 0.1, (0.0, 1.0), 1.0, 0.0).is_err());
        assert!(DriftParams::custom(0, 0.1, (1.0, 1.0), 0.0, 0.0).is_err());
    }
}
