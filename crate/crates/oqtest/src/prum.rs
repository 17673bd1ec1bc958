//! The prepare, run, uncompute, measure check loop.
//!
//! A check feeds the program under test one input state, compares what
//! comes out against the classical specification, and repeats with fresh
//! measurements to drive down the chance that a wrong program slips
//! through. Basis inputs can be judged by measuring directly against the
//! expected basis index or by uncomputing the expected output and checking
//! for all zeros; the two give identical failure probabilities. Two-value
//! superposition inputs are always judged by uncomputing, since a direct
//! measurement cannot see relative phase.
//!
//! Repetition counts come from the misjudgment budget `alpha`: a wrong
//! program that still passes one repetition with probability `p` survives
//! `N` repetitions with probability `p^N`, so `N` is chosen to push `p^N`
//! under `alpha` for the worst `p` the fault model allows.
//!
//! In a noiseless simulation, re-preparing the same input yields a state
//! identical bit for bit, so each check builds its output state once and
//! draws every repetition's measurement from that state. Each repetition
//! still consumes its own RNG stream keyed by campaign seed, input index,
//! and repetition index, keeping results reproducible and independent of
//! execution order.

use crate::classes::{sample_basis_input, sample_twovalue_input, ClassError, QuantumClassId, QuantumClassSet};
use crate::oracle::{concat_registers, expected_output, OracleError, OracleProgram, OracleSpec, MAX_REFERENCE_QUBITS};
use crate::prep::{build_basis_prep, build_twovalue_prep, PrepError};
use crate::sim::{RngSeed, SimError, StateVector};
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Relative slack when turning the two-value repetition bound into an
/// integer: bounds whose fractional part is within this slack of an
/// integer are snapped down instead of rounded up.
pub const NTV_ROUNDING_SLACK: f64 = 5e-4;

const STREAM_SAMPLE: u64 = 0;
const STREAM_MEASURE: u64 = 1;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PrumError {
    #[error("misjudgment budget alpha={0} outside (0, 1)")]
    BadAlpha(f64),
    #[error("pass probability bound {0} outside [0, 1)")]
    BadPassProbability(f64),
    #[error("phase gap {0} outside (0, pi]")]
    BadPhaseGap(f64),
    #[error("repetition count must be at least 1")]
    ZeroRepetitions,
    #[error("two-value check targets collapse to one basis state {0}")]
    DegenerateTarget(u64),
    #[error("spec domain of {0} qubits too large to scan phases")]
    PhaseScanTooLarge(usize),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Prep(#[from] PrepError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// How a basis-input check judges the program output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    /// Measure and compare against the expected basis index.
    DirectMeasure,
    /// Uncompute the expected output, measure, expect all zeros.
    InverseAndMeasure,
}

/// Outcome of checking one input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckResult {
    Pass,
    /// First failing repetition and the offending measured index.
    Fail { repetition: u64, measured: u64 },
}

/// Repetitions for basis-input checks: smallest `N` with `a_sq^N <= alpha`,
/// where `a_sq` bounds a wrong program's single-repetition pass
/// probability. `a_sq = 0` means one repetition always suffices.
pub fn compute_ncb(alpha: f64, a_sq: f64) -> Result<u64, PrumError> {
    check_alpha(alpha)?;
    if !(0.0..1.0).contains(&a_sq) {
        return Err(PrumError::BadPassProbability(a_sq));
    }
    if a_sq == 0.0 {
        return Ok(1);
    }
    let n = (alpha.ln() / a_sq.ln()).ceil() as u64;
    Ok(n.max(1))
}

/// Repetitions for two-value checks given the smallest phase gap
/// `delta_theta` the fault model must catch: a wrong phase passes one
/// repetition with probability at most `cos^2(delta_theta / 2)`.
///
/// The bound `ln(alpha) / ln(cos^2(delta_theta / 2))` is snapped down when
/// it overshoots an integer by less than [`NTV_ROUNDING_SLACK`] relative,
/// then rounded up.
pub fn compute_ntv(alpha: f64, delta_theta: f64) -> Result<u64, PrumError> {
    check_alpha(alpha)?;
    if !(delta_theta > 0.0 && delta_theta <= std::f64::consts::PI) {
        return Err(PrumError::BadPhaseGap(delta_theta));
    }
    let pass = (delta_theta / 2.0).cos().powi(2);
    if pass == 0.0 {
        return Ok(1);
    }
    let bound = alpha.ln() / pass.ln();
    let n = (bound * (1.0 - NTV_ROUNDING_SLACK)).ceil() as u64;
    Ok(n.max(1))
}

fn check_alpha(alpha: f64) -> Result<(), PrumError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(PrumError::BadAlpha(alpha))
    }
}

/// Smallest wrapped gap between distinct phase values of `G` over the full
/// input domain, or `None` when `G` is constant as a phase. Gaps at or
/// below the phase tolerance count as equal.
pub fn min_delta_theta(spec: &OracleSpec) -> Result<Option<f64>, PrumError> {
    let total = spec.num_qubits();
    if total > MAX_REFERENCE_QUBITS {
        return Err(PrumError::PhaseScanTooLarge(total));
    }
    let mut phases = Vec::with_capacity(1usize << total);
    for x in 0..1u64 << spec.m {
        for y in 0..1u64 << spec.n {
            phases.push((spec.g)(x, y).rem_euclid(TAU));
        }
    }
    phases.sort_by(f64::total_cmp);
    let mut best = f64::INFINITY;
    for w in phases.windows(2) {
        let gap = w[1] - w[0];
        if gap > crate::TOL_PHASE {
            best = best.min(gap);
        }
    }
    if best.is_infinite() {
        return Ok(None);
    }
    let wrap = phases[0] + TAU - phases[phases.len() - 1];
    if wrap > crate::TOL_PHASE {
        best = best.min(wrap);
    }
    Ok(Some(best))
}

/// Builds the post-program state for a basis input along with the accepted
/// measurement outcome under `mode`.
fn basis_check_state(
    program: &OracleProgram,
    spec: &OracleSpec,
    x: u64,
    y: u64,
    mode: CheckMode,
) -> Result<(StateVector, usize), PrumError> {
    let (expected_index, _) = expected_output(spec, x, y)?;
    let input = concat_registers(spec.m, x, y) as u64;
    let mut sv = build_basis_prep(program.num_qubits, input)?.prepare()?;
    program.apply(&mut sv)?;
    match mode {
        CheckMode::DirectMeasure => Ok((sv, expected_index)),
        CheckMode::InverseAndMeasure => {
            let uncompute = build_basis_prep(program.num_qubits, expected_index as u64)?.inverse();
            sv.apply_all(&uncompute.gates)?;
            Ok((sv, 0))
        }
    }
}

/// Builds the post-program, post-uncompute state for a two-value input.
/// The accepted outcome is always the all-zeros index.
fn twovalue_check_state(
    program: &OracleProgram,
    spec: &OracleSpec,
    first: (u64, u64),
    second: (u64, u64),
) -> Result<StateVector, PrumError> {
    let s1 = concat_registers(spec.m, first.0, first.1) as u64;
    let s2 = concat_registers(spec.m, second.0, second.1) as u64;
    let (i1, g1) = expected_output(spec, first.0, first.1)?;
    let (i2, g2) = expected_output(spec, second.0, second.1)?;
    if i1 == i2 {
        return Err(PrumError::DegenerateTarget(i1 as u64));
    }
    let delta_g = g2 - g1;
    let mut sv = build_twovalue_prep(program.num_qubits, s1, s2, 0.0)?.prepare()?;
    program.apply(&mut sv)?;
    let uncompute = build_twovalue_prep(program.num_qubits, i1 as u64, i2 as u64, delta_g)?.inverse();
    sv.apply_all(&uncompute.gates)?;
    Ok(sv)
}

fn measure_repetitions(
    state: &StateVector,
    accept: usize,
    reps: u64,
    seed: RngSeed,
    input_index: u64,
) -> Result<CheckResult, PrumError> {
    if reps == 0 {
        return Err(PrumError::ZeroRepetitions);
    }
    for rep in 0..reps {
        let mut rng = seed.stream(&[STREAM_MEASURE, input_index, rep]);
        let measured = state.measure_all(&mut rng)?;
        if measured != accept {
            return Ok(CheckResult::Fail { repetition: rep, measured: measured as u64 });
        }
    }
    Ok(CheckResult::Pass)
}

/// Checks one basis input `|x>|y>` over `reps` repetitions.
pub fn prum_basis(
    program: &OracleProgram,
    spec: &OracleSpec,
    x: u64,
    y: u64,
    mode: CheckMode,
    reps: u64,
    seed: RngSeed,
    input_index: u64,
) -> Result<CheckResult, PrumError> {
    let (state, accept) = basis_check_state(program, spec, x, y, mode)?;
    measure_repetitions(&state, accept, reps, seed, input_index)
}

/// Checks one two-value input `(|i1> + |i2>)/sqrt(2)` over `reps`
/// repetitions. Always uncomputes; the mode distinction does not apply.
pub fn prum_twovalue(
    program: &OracleProgram,
    spec: &OracleSpec,
    first: (u64, u64),
    second: (u64, u64),
    reps: u64,
    seed: RngSeed,
    input_index: u64,
) -> Result<CheckResult, PrumError> {
    let state = twovalue_check_state(program, spec, first, second)?;
    measure_repetitions(&state, 0, reps, seed, input_index)
}

/// Campaign parameters: repetition counts, sampling density, judging mode
/// for basis inputs, early exit, and the seed all streams derive from.
#[derive(Debug, Clone, Copy)]
pub struct CampaignSettings {
    pub n_cb: u64,
    pub n_tv: u64,
    pub samples_per_class: usize,
    pub mode: CheckMode,
    pub fail_fast: bool,
    pub seed: RngSeed,
}

/// Failure context from the first failing check of a campaign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureReport {
    pub class: String,
    pub input: String,
    pub repetition: u64,
    pub measured: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(FailureReport),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOutcome {
    pub verdict: Verdict,
    pub checks_run: u64,
    pub reps_used: u64,
}

/// Runs one full campaign: samples `samples_per_class` inputs from every
/// quantum class in order and checks each. With `fail_fast` the campaign
/// stops at the first failure; otherwise it runs everything and reports
/// the first failure found.
pub fn run_campaign(
    program: &OracleProgram,
    spec: &OracleSpec,
    set: &QuantumClassSet,
    settings: &CampaignSettings,
) -> Result<CampaignOutcome, PrumError> {
    let mut sample_rng = settings.seed.stream(&[STREAM_SAMPLE]);
    let mut outcome = CampaignOutcome { verdict: Verdict::Pass, checks_run: 0, reps_used: 0 };
    let mut input_index = 0u64;
    for id in set.ids() {
        for _ in 0..settings.samples_per_class {
            let (result, reps, input_desc) = match id {
                QuantumClassId::Basis(i) => {
                    let (x, y) = sample_basis_input(set, i, &mut sample_rng)?;
                    let r = prum_basis(program, spec, x, y, settings.mode, settings.n_cb, settings.seed, input_index)?;
                    (r, settings.n_cb, format!("x={x} y={y}"))
                }
                QuantumClassId::SamePair(i) => {
                    let (a, b) = sample_twovalue_input(set, i, i, &mut sample_rng)?;
                    let r = prum_twovalue(program, spec, a, b, settings.n_tv, settings.seed, input_index)?;
                    (r, settings.n_tv, format!("x1={} y1={} x2={} y2={}", a.0, a.1, b.0, b.1))
                }
                QuantumClassId::CrossPair(i, j) => {
                    let (a, b) = sample_twovalue_input(set, i, j, &mut sample_rng)?;
                    let r = prum_twovalue(program, spec, a, b, settings.n_tv, settings.seed, input_index)?;
                    (r, settings.n_tv, format!("x1={} y1={} x2={} y2={}", a.0, a.1, b.0, b.1))
                }
            };
            input_index += 1;
            outcome.checks_run += 1;
            match result {
                CheckResult::Pass => outcome.reps_used += reps,
                CheckResult::Fail { repetition, measured } => {
                    outcome.reps_used += repetition + 1;
                    if outcome.verdict.passed() {
                        outcome.verdict = Verdict::Fail(FailureReport {
                            class: id.describe(&set.classes),
                            input: input_desc,
                            repetition,
                            measured,
                        });
                    }
                    if settings.fail_fast {
                        return Ok(outcome);
                    }
                }
            }
        }
    }
    Ok(outcome)
}

/// Per-class outcome over a multi-round detection run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionStatus {
    /// No sampled input from this class ever failed.
    NotDetected,
    /// Some rounds failed, some passed.
    PartiallyDetected,
    /// Every round failed.
    FullyDetected,
}

/// Runs `rounds` independent single-sample sweeps over every quantum class
/// and reports, per class, whether its sampled inputs caught the program
/// in every round, some rounds, or never. Never exits early.
pub fn run_detection(
    program: &OracleProgram,
    spec: &OracleSpec,
    set: &QuantumClassSet,
    settings: &CampaignSettings,
    rounds: u64,
) -> Result<BTreeMap<QuantumClassId, DetectionStatus>, PrumError> {
    if rounds == 0 {
        return Err(PrumError::ZeroRepetitions);
    }
    let mut sample_rng = settings.seed.stream(&[STREAM_SAMPLE]);
    let ids = set.ids();
    let mut detected = vec![0u64; ids.len()];
    let mut input_index = 0u64;
    for _ in 0..rounds {
        for (slot, id) in ids.iter().enumerate() {
            for _ in 0..settings.samples_per_class {
                let result = match *id {
                    QuantumClassId::Basis(i) => {
                        let (x, y) = sample_basis_input(set, i, &mut sample_rng)?;
                        prum_basis(program, spec, x, y, settings.mode, settings.n_cb, settings.seed, input_index)?
                    }
                    QuantumClassId::SamePair(i) => {
                        let (a, b) = sample_twovalue_input(set, i, i, &mut sample_rng)?;
                        prum_twovalue(program, spec, a, b, settings.n_tv, settings.seed, input_index)?
                    }
                    QuantumClassId::CrossPair(i, j) => {
                        let (a, b) = sample_twovalue_input(set, i, j, &mut sample_rng)?;
                        prum_twovalue(program, spec, a, b, settings.n_tv, settings.seed, input_index)?
                    }
                };
                input_index += 1;
                if let CheckResult::Fail { .. } = result {
                    detected[slot] += 1;
                    break;
                }
            }
        }
    }
    Ok(ids
        .into_iter()
        .enumerate()
        .map(|(slot, id)| {
            let status = if detected[slot] == rounds {
                DetectionStatus::FullyDetected
            } else if detected[slot] == 0 {
                DetectionStatus::NotDetected
            } else {
                DetectionStatus::PartiallyDetected
            };
            (id, status)
        })
        .collect())
}
