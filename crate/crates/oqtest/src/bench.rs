//! Benchmark oracle programs, their input partitions, and mutants.
//!
//! Ten correct programs cover three styles: phase oracles over a single
//! register (`Parity_P`, `Is2Power_P`, `LessThan_P`, `HamiltonX`, `Ising`),
//! qubit oracles writing a Boolean into a one-bit output register
//! (`Parity_Q`, `Is2Power_Q`, `LessThan_Q`), and arithmetic over two
//! five-bit registers (`QAdder`, and `Mixed_Proc` which adds a phase).
//! Every program ships with its classical input partition.
//!
//! Mutants come in two flavors: gate mutants append one defective gate to
//! the correct program, and behavioral mutants implement a plausibly
//! wrong classical behavior (negated predicate, off-by-one comparison,
//! big-endian register interpretation, and similar). Targets are resolved
//! by name, for example `QAdder_AddRyPi` or `LessThanEq_Q`.

use crate::classes::ClassicalClass;
use crate::oracle::{reference_oracle, OracleError, OracleProgram, OracleSpec};
use crate::sim::Gate;
use std::f64::consts::PI;

pub const BENCHMARK_NAMES: [&str; 10] = [
    "Parity_P",
    "Is2Power_P",
    "LessThan_P",
    "Parity_Q",
    "Is2Power_Q",
    "LessThan_Q",
    "QAdder",
    "HamiltonX",
    "Ising",
    "Mixed_Proc",
];

/// Suffixes of the twelve appended-gate mutants.
pub const GATE_MUTANT_SUFFIXES: [&str; 12] = [
    "AddRyPiDiv3",
    "AddRyPiDiv2",
    "AddRy2PiDiv3",
    "AddRyPi",
    "AddZ",
    "AddS",
    "AddT",
    "AddRz8",
    "AddRz16",
    "AddRz32",
    "AddCNOT",
    "AddCZ",
];

/// The comparison threshold of the LessThan programs.
pub const LESS_THAN_K: u64 = 10;
/// Evolution time of HamiltonX, Ising, and the Mixed_Proc phase.
pub const EVOLUTION_T: f64 = 0.2;
/// Ising couplings.
pub const ISING_J: f64 = 1.0;
pub const ISING_B: f64 = 1.0;
const ISING_BITS: usize = 7;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum BenchError {
    #[error("unknown target {0}")]
    UnknownTarget(String),
    #[error("mutant kind {kind} does not apply to {base}")]
    IncompatibleMutant { base: String, kind: String },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Odd number of set bits.
pub fn parity(v: u64) -> bool {
    v.count_ones() % 2 == 1
}

/// Exactly one set bit.
pub fn is_two_power(v: u64) -> bool {
    v != 0 && v & (v - 1) == 0
}

/// Reverses the low `width` bits of `v`.
pub fn reverse_bits(v: u64, width: usize) -> u64 {
    let mut out = 0;
    for i in 0..width {
        if v >> i & 1 == 1 {
            out |= 1 << (width - 1 - i);
        }
    }
    out
}

/// Ising phase over a circular chain of 7 spins: neighbor coupling plus
/// external field, scaled by the evolution time.
pub fn ising_phase(y: u64) -> f64 {
    let spin = |i: usize| if y >> (i % ISING_BITS) & 1 == 1 { -1.0 } else { 1.0 };
    let mut coupling = 0.0;
    let mut field = 0.0;
    for i in 0..ISING_BITS {
        coupling += spin(i) * spin(i + 1);
        field += spin(i);
    }
    (ISING_J * coupling + ISING_B * field) * EVOLUTION_T
}

/// A resolvable target: the program to run plus the reference functions
/// and input partition it is judged against. For mutants, `spec` and
/// `classes` belong to the correct base program.
pub struct Benchmark {
    pub name: String,
    pub spec: OracleSpec,
    pub program: OracleProgram,
    pub classes: Vec<ClassicalClass>,
}

fn phase_predicate_spec(bits: usize, pred: impl Fn(u64) -> bool + Send + Sync + 'static) -> OracleSpec {
    OracleSpec::new(0, bits, |_, y| y, move |_, y| if pred(y) { PI } else { 0.0 }).unwrap()
}

fn qubit_predicate_spec(bits: usize, pred: impl Fn(u64) -> bool + Send + Sync + 'static) -> OracleSpec {
    OracleSpec::new(bits, 1, move |x, y| y ^ pred(x) as u64, |_, _| 0.0).unwrap()
}

fn adder_spec(phase_t: f64) -> OracleSpec {
    OracleSpec::new(5, 5, |x, y| (x + y) % 32, move |_, y| phase_t * y as f64).unwrap()
}

/// Which register the partitioned values live in.
#[derive(Clone, Copy)]
enum ValueRegister {
    /// Phase oracles: the partition is over `y`, `x` is empty.
    Y,
    /// Qubit oracles: the partition is over `x`, `y` is fixed to zero.
    X,
}

fn classes_from_values(
    labeled: Vec<(String, Vec<u64>)>,
    register: ValueRegister,
) -> Vec<ClassicalClass> {
    labeled
        .into_iter()
        .enumerate()
        .map(|(id, (label, values))| {
            let members = values
                .into_iter()
                .map(|v| match register {
                    ValueRegister::Y => (0, v),
                    ValueRegister::X => (v, 0),
                })
                .collect();
            ClassicalClass::explicit(id, label, members)
        })
        .collect()
}

/// All-zeros, all-ones, predicate-true, predicate-false.
fn predicate_partition(bits: usize, pred: &dyn Fn(u64) -> bool) -> Vec<(String, Vec<u64>)> {
    let max = (1u64 << bits) - 1;
    vec![
        ("1".into(), vec![0]),
        ("2".into(), vec![max]),
        ("3".into(), (1..max).filter(|&v| pred(v)).collect()),
        ("4".into(), (1..max).filter(|&v| !pred(v)).collect()),
    ]
}

/// Boundary-focused partition around the threshold `k`.
fn less_than_partition(bits: usize, k: u64) -> Vec<(String, Vec<u64>)> {
    let max = (1u64 << bits) - 1;
    vec![
        ("1".into(), vec![0]),
        ("2".into(), (1..k - 1).collect()),
        ("3".into(), vec![k - 1]),
        ("4".into(), vec![k]),
        ("5".into(), vec![k + 1]),
        ("6".into(), (k + 2..max).collect()),
        ("7".into(), vec![max]),
    ]
}

/// Zero/nonzero boundaries of both addends, then the four overflow
/// quadrants split at half range.
fn adder_classes() -> Vec<ClassicalClass> {
    let half = 15u64;
    let max = 31u64;
    let square = |xs: std::ops::RangeInclusive<u64>, ys: std::ops::RangeInclusive<u64>| {
        let mut members = Vec::new();
        for x in xs {
            for y in ys.clone() {
                members.push((x, y));
            }
        }
        members
    };
    let blocks: Vec<(String, Vec<(u64, u64)>)> = vec![
        ("1".into(), vec![(0, 0)]),
        ("2".into(), (1..=max).map(|y| (0, y)).collect()),
        ("3".into(), (1..=max).map(|x| (x, 0)).collect()),
        ("4".into(), square(1..=half, 1..=half)),
        ("5".into(), square(1..=half, half + 1..=max)),
        ("6".into(), square(half + 1..=max, 1..=half)),
        ("7".into(), square(half + 1..=max, half + 1..=max)),
    ];
    blocks
        .into_iter()
        .enumerate()
        .map(|(id, (label, members))| ClassicalClass::explicit(id, label, members))
        .collect()
}

fn ising_partition() -> Vec<(String, Vec<u64>)> {
    let adjacent = |v: u64| {
        (0..ISING_BITS as u64)
            .any(|i| v == (1 << i) | (1 << ((i + 1) % ISING_BITS as u64)))
    };
    let mut blocks = vec![
        ("1".to_string(), vec![0]),
        ("2".to_string(), Vec::new()),
        ("3".to_string(), Vec::new()),
        ("4".to_string(), Vec::new()),
        ("5".to_string(), Vec::new()),
    ];
    for v in 1u64..1 << ISING_BITS {
        let slot = match v.count_ones() {
            1 => 1,
            2 => {
                if adjacent(v) {
                    2
                } else {
                    3
                }
            }
            _ => 4,
        };
        blocks[slot].1.push(v);
    }
    blocks
}

/// The correct program and partition for one of the ten benchmark names.
pub fn benchmark(name: &str) -> Result<Benchmark, BenchError> {
    let (spec, classes) = match name {
        "Parity_P" => (
            phase_predicate_spec(6, parity),
            classes_from_values(predicate_partition(6, &parity), ValueRegister::Y),
        ),
        "Is2Power_P" => (
            phase_predicate_spec(6, is_two_power),
            classes_from_values(predicate_partition(6, &is_two_power), ValueRegister::Y),
        ),
        "LessThan_P" => (
            phase_predicate_spec(5, |v| v < LESS_THAN_K),
            classes_from_values(less_than_partition(5, LESS_THAN_K), ValueRegister::Y),
        ),
        "Parity_Q" => (
            qubit_predicate_spec(6, parity),
            classes_from_values(predicate_partition(6, &parity), ValueRegister::X),
        ),
        "Is2Power_Q" => (
            qubit_predicate_spec(6, is_two_power),
            classes_from_values(predicate_partition(6, &is_two_power), ValueRegister::X),
        ),
        "LessThan_Q" => (
            qubit_predicate_spec(5, |v| v < LESS_THAN_K),
            classes_from_values(less_than_partition(5, LESS_THAN_K), ValueRegister::X),
        ),
        "QAdder" => (adder_spec(0.0), adder_classes()),
        "HamiltonX" => (
            OracleSpec::new(0, 3, |_, y| y, |_, y| EVOLUTION_T * y as f64).unwrap(),
            classes_from_values(
                (0..8u64).map(|y| (y.to_string(), vec![y])).collect(),
                ValueRegister::Y,
            ),
        ),
        "Ising" => (
            OracleSpec::new(0, ISING_BITS, |_, y| y, |_, y| ising_phase(y)).unwrap(),
            classes_from_values(ising_partition(), ValueRegister::Y),
        ),
        "Mixed_Proc" => (adder_spec(EVOLUTION_T), adder_classes()),
        other => return Err(BenchError::UnknownTarget(other.to_string())),
    };
    let program = reference_oracle(&spec)?;
    Ok(Benchmark { name: name.to_string(), spec, program, classes })
}

/// One mutation applied to a correct program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MutantKind {
    AddRy(f64),
    AddZ,
    AddS,
    AddT,
    AddRz(f64),
    AddCnot,
    AddCz,
    /// Negate the Boolean predicate everywhere.
    FlipOut,
    /// Interpret both registers big-endian.
    BigEndian,
    /// Flip the predicate at the all-ones input only.
    FlipAll1,
    /// Replace `< k` by `<= k`.
    LessThanEq,
    /// Replace `< k` by `>= k`.
    GreaterThanEq,
    /// Flip output bit 0 when `x = 0`.
    Change0p,
}

impl MutantKind {
    fn describe(&self) -> String {
        format!("{self:?}")
    }
}

/// The predicate-program bases share this shape, which behavioral
/// predicate mutants rebuild with a substituted predicate.
fn predicate_base(base: &str) -> Option<(usize, ValueRegister, fn(u64) -> bool)> {
    match base {
        "Parity_P" => Some((6, ValueRegister::Y, parity)),
        "Parity_Q" => Some((6, ValueRegister::X, parity)),
        "Is2Power_P" => Some((6, ValueRegister::Y, is_two_power)),
        "Is2Power_Q" => Some((6, ValueRegister::X, is_two_power)),
        "LessThan_P" => Some((5, ValueRegister::Y, |v| v < LESS_THAN_K)),
        "LessThan_Q" => Some((5, ValueRegister::X, |v| v < LESS_THAN_K)),
        _ => None,
    }
}

fn predicate_spec(bits: usize, register: ValueRegister, pred: impl Fn(u64) -> bool + Send + Sync + 'static) -> OracleSpec {
    match register {
        ValueRegister::Y => phase_predicate_spec(bits, pred),
        ValueRegister::X => qubit_predicate_spec(bits, pred),
    }
}

/// Big-endian misinterpretation of any spec: every register value is bit
/// reversed on the way in and the output is bit reversed on the way out.
fn big_endian_spec(spec: &OracleSpec) -> OracleSpec {
    let (m, n) = (spec.m, spec.n);
    let f = spec.f.clone();
    let g = spec.g.clone();
    OracleSpec::new(
        m,
        n,
        move |x, y| reverse_bits(f(reverse_bits(x, m), reverse_bits(y, n)), n),
        move |x, y| g(reverse_bits(x, m), reverse_bits(y, n)),
    )
    .unwrap()
}

/// Builds the program for `kind` applied to the named base. Gate mutants
/// run the correct program and then the extra gate; behavioral mutants are
/// correct realizations of a wrong specification.
pub fn apply_mutant(base: &Benchmark, kind: MutantKind) -> Result<OracleProgram, BenchError> {
    let incompatible = || BenchError::IncompatibleMutant {
        base: base.name.clone(),
        kind: kind.describe(),
    };
    let gate = |g: Gate| Ok(base.program.with_suffix(vec![g]));
    match kind {
        MutantKind::AddRy(theta) => gate(Gate::Ry(0, theta)),
        MutantKind::AddZ => gate(Gate::Z(0)),
        MutantKind::AddS => gate(Gate::S(0)),
        MutantKind::AddT => gate(Gate::T(0)),
        MutantKind::AddRz(theta) => gate(Gate::Rz(0, theta)),
        MutantKind::AddCnot => gate(Gate::Cnot(0, 1)),
        MutantKind::AddCz => gate(Gate::Cz(0, 1)),
        MutantKind::FlipOut => {
            let (bits, register, pred) = predicate_base(&base.name).ok_or_else(incompatible)?;
            Ok(reference_oracle(&predicate_spec(bits, register, move |v| !pred(v)))?)
        }
        MutantKind::FlipAll1 => {
            let (bits, register, pred) = predicate_base(&base.name).ok_or_else(incompatible)?;
            let max = (1u64 << bits) - 1;
            Ok(reference_oracle(&predicate_spec(bits, register, move |v| pred(v) ^ (v == max)))?)
        }
        MutantKind::LessThanEq => {
            let (bits, register, _) = match base.name.as_str() {
                "LessThan_P" | "LessThan_Q" => predicate_base(&base.name).unwrap(),
                _ => return Err(incompatible()),
            };
            Ok(reference_oracle(&predicate_spec(bits, register, |v| v <= LESS_THAN_K))?)
        }
        MutantKind::GreaterThanEq => {
            let (bits, register, _) = match base.name.as_str() {
                "LessThan_P" | "LessThan_Q" => predicate_base(&base.name).unwrap(),
                _ => return Err(incompatible()),
            };
            Ok(reference_oracle(&predicate_spec(bits, register, |v| v >= LESS_THAN_K))?)
        }
        MutantKind::BigEndian => Ok(reference_oracle(&big_endian_spec(&base.spec))?),
        MutantKind::Change0p => {
            if base.name != "QAdder" && base.name != "Mixed_Proc" {
                return Err(incompatible());
            }
            let f = base.spec.f.clone();
            let g = base.spec.g.clone();
            let spec = OracleSpec::new(
                5,
                5,
                move |x, y| f(x, y) ^ (x == 0) as u64,
                move |x, y| g(x, y),
            )
            .unwrap();
            Ok(reference_oracle(&spec)?)
        }
    }
}

fn gate_mutant_kind(suffix: &str) -> Option<MutantKind> {
    Some(match suffix {
        "AddRyPiDiv3" => MutantKind::AddRy(PI / 3.0),
        "AddRyPiDiv2" => MutantKind::AddRy(PI / 2.0),
        "AddRy2PiDiv3" => MutantKind::AddRy(2.0 * PI / 3.0),
        "AddRyPi" => MutantKind::AddRy(PI),
        "AddZ" => MutantKind::AddZ,
        "AddS" => MutantKind::AddS,
        "AddT" => MutantKind::AddT,
        "AddRz8" => MutantKind::AddRz(PI / 8.0),
        "AddRz16" => MutantKind::AddRz(PI / 16.0),
        "AddRz32" => MutantKind::AddRz(PI / 32.0),
        "AddCNOT" => MutantKind::AddCnot,
        "AddCZ" => MutantKind::AddCz,
        _ => return None,
    })
}

/// Resolves a target name: a correct benchmark, a gate mutant
/// `{base}_{suffix}`, or a behavioral mutant by its published name. The
/// returned spec and classes always belong to the correct base program.
pub fn resolve_target(name: &str) -> Result<Benchmark, BenchError> {
    if BENCHMARK_NAMES.contains(&name) {
        return benchmark(name);
    }
    // Behavioral mutants named after the wrong behavior they implement.
    let renamed: Option<(&str, MutantKind)> = match name {
        "GreaterThanEq_P" | "GreaterThanEq_P_FlipOut" => Some(("LessThan_P", MutantKind::GreaterThanEq)),
        "GreaterThanEq_Q" | "GreaterThanEq_Q_FlipOut" => Some(("LessThan_Q", MutantKind::GreaterThanEq)),
        "LessThanEq_P" => Some(("LessThan_P", MutantKind::LessThanEq)),
        "LessThanEq_Q" => Some(("LessThan_Q", MutantKind::LessThanEq)),
        "QAdder_change0p" => Some(("QAdder", MutantKind::Change0p)),
        "Mixed_Proc_change0p" => Some(("Mixed_Proc", MutantKind::Change0p)),
        _ => None,
    };
    let (base_name, kind) = if let Some(pair) = renamed {
        pair
    } else {
        let (base_name, suffix) = name
            .rsplit_once('_')
            .ok_or_else(|| BenchError::UnknownTarget(name.to_string()))?;
        let kind = match suffix {
            "FlipOut" => MutantKind::FlipOut,
            "BE" => MutantKind::BigEndian,
            "FlipAll1" => MutantKind::FlipAll1,
            other => gate_mutant_kind(other)
                .ok_or_else(|| BenchError::UnknownTarget(name.to_string()))?,
        };
        if !BENCHMARK_NAMES.contains(&base_name) {
            return Err(BenchError::UnknownTarget(name.to_string()));
        }
        (base_name, kind)
    };
    let base = benchmark(base_name)?;
    let program = apply_mutant(&base, kind)?;
    Ok(Benchmark { name: name.to_string(), program, spec: base.spec, classes: base.classes })
}

/// The 132 expected-fail targets: every gate mutant of every benchmark
/// plus the twelve behavioral mutants with observable wrong behavior.
pub fn expected_fail_names() -> Vec<String> {
    let mut names = Vec::new();
    for suffix in GATE_MUTANT_SUFFIXES {
        for base in BENCHMARK_NAMES {
            names.push(format!("{base}_{suffix}"));
        }
    }
    for behavioral in [
        "Parity_Q_FlipOut",
        "Is2Power_Q_FlipOut",
        "GreaterThanEq_Q",
        "LessThan_P_BE",
        "LessThan_Q_BE",
        "QAdder_BE",
        "HamiltonX_BE",
        "Parity_P_FlipAll1",
        "Parity_Q_FlipAll1",
        "LessThanEq_P",
        "LessThanEq_Q",
        "QAdder_change0p",
    ] {
        names.push(behavioral.to_string());
    }
    names
}

/// The fifteen behavioral-change programs studied with detection maps.
/// The three phase-register entries (`Parity_P_FlipOut`,
/// `Is2Power_P_FlipOut`, `GreaterThanEq_P`) differ from their base only by
/// a global phase and are expected to evade detection entirely.
pub fn behavioral_names() -> [&'static str; 15] {
    [
        "Parity_P_FlipOut",
        "Parity_Q_FlipOut",
        "Is2Power_P_FlipOut",
        "Is2Power_Q_FlipOut",
        "GreaterThanEq_P",
        "GreaterThanEq_Q",
        "LessThan_P_BE",
        "LessThan_Q_BE",
        "QAdder_BE",
        "HamiltonX_BE",
        "Parity_P_FlipAll1",
        "Parity_Q_FlipAll1",
        "LessThanEq_P",
        "LessThanEq_Q",
        "QAdder_change0p",
    ]
}

/// The fixed two-value input used when a single maximally superposed state
/// is wanted: both registers span all-zeros to all-ones, except for the
/// adders where only `x` is superposed and `y` stays zero.
pub fn rq_fixed_input(name: &str) -> Result<((u64, u64), (u64, u64)), BenchError> {
    let base = benchmark(name)?;
    let (m, n) = (base.spec.m, base.spec.n);
    if name == "QAdder" || name == "Mixed_Proc" {
        Ok(((0, 0), ((1 << m) - 1, 0)))
    } else {
        Ok(((0, 0), (if m == 0 { 0 } else { (1 << m) - 1 }, (1 << n) - 1)))
    }
}
