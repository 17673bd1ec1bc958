//! Dense statevector simulator.
//!
//! States hold all `2^n` complex amplitudes in little-endian order: qubit 0
//! is the least significant bit of the basis index. Gates are applied by
//! in-place kernels; measurement samples a full-register outcome from the
//! Born distribution without modeling collapse, since every check in this
//! crate measures exactly once at the end of a circuit.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Maximum register width; a dense state above this does not fit the budget.
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SimError {
    #[error("qubit count {0} outside supported range 1..={MAX_QUBITS}")]
    BadQubitCount(usize),
    #[error("qubit index {index} out of range for {num_qubits}-qubit state")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("two-qubit gate uses the same qubit {0} twice")]
    DuplicateQubit(usize),
    #[error("basis index {index} out of range for {num_qubits}-qubit state")]
    IndexOutOfRange { index: usize, num_qubits: usize },
    #[error("state norm deviates from 1 by {0:.3e}, refusing to measure")]
    NormDrift(f64),
    #[error("inner product of states with different qubit counts {0} and {1}")]
    SizeMismatch(usize, usize),
}

/// A single gate application, parameterized by target qubit indices and,
/// for rotations, an angle in radians.
///
/// `Cnot` lists the control qubit first. Rotation conventions:
/// `Rz(theta) = diag(e^{-i theta/2}, e^{i theta/2})`,
/// `R1(theta) = diag(1, e^{i theta})`, and `Rx`, `Ry` are the usual
/// half-angle rotations about the X and Y axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    X(usize),
    H(usize),
    Z(usize),
    S(usize),
    T(usize),
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    R1(usize, f64),
    Cnot(usize, usize),
    Cz(usize, usize),
}

impl Gate {
    /// The gate implementing the adjoint. Self-inverse gates map to
    /// themselves; rotations negate their angle; `S` and `T` become
    /// `R1` rotations so that every gate has an inverse in the set.
    pub fn inverse(self) -> Gate {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        match self {
            Gate::X(_) | Gate::H(_) | Gate::Z(_) | Gate::Cnot(_, _) | Gate::Cz(_, _) => self,
            Gate::S(q) => Gate::R1(q, -FRAC_PI_2),
            Gate::T(q) => Gate::R1(q, -FRAC_PI_4),
            Gate::Rx(q, a) => Gate::Rx(q, -a),
            Gate::Ry(q, a) => Gate::Ry(q, -a),
            Gate::Rz(q, a) => Gate::Rz(q, -a),
            Gate::R1(q, a) => Gate::R1(q, -a),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::X(q) => write!(f, "X {q}"),
            Gate::H(q) => write!(f, "H {q}"),
            Gate::Z(q) => write!(f, "Z {q}"),
            Gate::S(q) => write!(f, "S {q}"),
            Gate::T(q) => write!(f, "T {q}"),
            Gate::Rx(q, a) => write!(f, "RX {q} {a}"),
            Gate::Ry(q, a) => write!(f, "RY {q} {a}"),
            Gate::Rz(q, a) => write!(f, "RZ {q} {a}"),
            Gate::R1(q, a) => write!(f, "R1 {q} {a}"),
            Gate::Cnot(c, t) => write!(f, "CNOT {c} {t}"),
            Gate::Cz(a, b) => write!(f, "CZ {a} {b}"),
        }
    }
}

/// Dense state over `num_qubits` qubits; `amps[i]` is the amplitude of
/// basis state `|i>` with qubit 0 as the least significant bit of `i`.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub num_qubits: usize,
    pub amps: Vec<Complex64>,
}

impl StateVector {
    /// All-zeros basis state `|0...0>`.
    pub fn new_zero_state(num_qubits: usize) -> Result<Self, SimError> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(SimError::BadQubitCount(num_qubits));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    fn check_qubit(&self, q: usize) -> Result<(), SimError> {
        if q >= self.num_qubits {
            Err(SimError::QubitOutOfRange { index: q, num_qubits: self.num_qubits })
        } else {
            Ok(())
        }
    }

    /// Applies one gate in place.
    pub fn apply(&mut self, gate: Gate) -> Result<(), SimError> {
        match gate {
            Gate::X(q) => {
                self.check_qubit(q)?;
                let bit = 1usize << q;
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        self.amps.swap(i, i | bit);
                    }
                }
            }
            Gate::H(q) => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                self.apply_one_qubit(q, [
                    Complex64::new(h, 0.0), Complex64::new(h, 0.0),
                    Complex64::new(h, 0.0), Complex64::new(-h, 0.0),
                ])?;
            }
            Gate::Z(q) => self.apply_phase(q, Complex64::new(-1.0, 0.0))?,
            Gate::S(q) => self.apply_phase(q, Complex64::new(0.0, 1.0))?,
            Gate::T(q) => self.apply_phase(q, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4))?,
            Gate::R1(q, a) => self.apply_phase(q, Complex64::from_polar(1.0, a))?,
            Gate::Rz(q, a) => {
                self.check_qubit(q)?;
                let neg = Complex64::from_polar(1.0, -a / 2.0);
                let pos = Complex64::from_polar(1.0, a / 2.0);
                let bit = 1usize << q;
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    *amp *= if i & bit == 0 { neg } else { pos };
                }
            }
            Gate::Rx(q, a) => {
                let (c, s) = ((a / 2.0).cos(), (a / 2.0).sin());
                self.apply_one_qubit(q, [
                    Complex64::new(c, 0.0), Complex64::new(0.0, -s),
                    Complex64::new(0.0, -s), Complex64::new(c, 0.0),
                ])?;
            }
            Gate::Ry(q, a) => {
                let (c, s) = ((a / 2.0).cos(), (a / 2.0).sin());
                self.apply_one_qubit(q, [
                    Complex64::new(c, 0.0), Complex64::new(-s, 0.0),
                    Complex64::new(s, 0.0), Complex64::new(c, 0.0),
                ])?;
            }
            Gate::Cnot(c, t) => {
                self.check_qubit(c)?;
                self.check_qubit(t)?;
                if c == t {
                    return Err(SimError::DuplicateQubit(c));
                }
                let (cb, tb) = (1usize << c, 1usize << t);
                for i in 0..self.amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        self.amps.swap(i, i | tb);
                    }
                }
            }
            Gate::Cz(a, b) => {
                self.check_qubit(a)?;
                self.check_qubit(b)?;
                if a == b {
                    return Err(SimError::DuplicateQubit(a));
                }
                let mask = (1usize << a) | (1usize << b);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies a gate sequence in order.
    pub fn apply_all(&mut self, gates: &[Gate]) -> Result<(), SimError> {
        for &g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// General single-qubit kernel for matrix `[[m0, m1], [m2, m3]]`.
    fn apply_one_qubit(&mut self, q: usize, m: [Complex64; 4]) -> Result<(), SimError> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let j = i | bit;
                let (a0, a1) = (self.amps[i], self.amps[j]);
                self.amps[i] = m[0] * a0 + m[1] * a1;
                self.amps[j] = m[2] * a0 + m[3] * a1;
            }
        }
        Ok(())
    }

    /// Diagonal kernel: multiplies the `|1>` branch of qubit `q` by `phase`.
    fn apply_phase(&mut self, q: usize, phase: Complex64) -> Result<(), SimError> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & bit != 0 {
                *amp *= phase;
            }
        }
        Ok(())
    }

    /// Sum of squared amplitude magnitudes.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Born probability of observing basis index `index` on a full-register
    /// measurement.
    pub fn probability_of(&self, index: usize) -> Result<f64, SimError> {
        self.amps
            .get(index)
            .map(|a| a.norm_sqr())
            .ok_or(SimError::IndexOutOfRange { index, num_qubits: self.num_qubits })
    }

    /// Samples one full-register measurement outcome from the Born
    /// distribution. The state is not collapsed. Fails if the norm has
    /// drifted beyond tolerance, which would make the distribution invalid.
    pub fn measure_all<R: Rng>(&self, rng: &mut R) -> Result<usize, SimError> {
        let drift = (self.norm_sqr() - 1.0).abs();
        if drift > crate::TOL_NORM {
            return Err(SimError::NormDrift(drift));
        }
        let u: f64 = rng.gen();
        let mut cumulative = 0.0;
        let mut last_support = 0;
        for (i, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            if p > 0.0 {
                last_support = i;
                cumulative += p;
                if u < cumulative {
                    return Ok(i);
                }
            }
        }
        // Rounding can leave the cumulative sum a hair under u; attribute
        // the sliver to the top of the support.
        Ok(last_support)
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64, SimError> {
        if self.num_qubits != other.num_qubits {
            return Err(SimError::SizeMismatch(self.num_qubits, other.num_qubits));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Campaign-level seed from which all per-input, per-repetition RNG streams
/// are derived.
///
/// Streams are keyed by an integer path (for example `[input_index,
/// repetition_index]`); distinct paths give statistically independent
/// ChaCha8 streams, and the same `(seed, path)` always yields the same
/// stream, so campaigns are reproducible and insensitive to execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngSeed {
    /// Derives an independent child seed for one path under this seed.
    /// Distinct paths give statistically independent children.
    pub fn child(self, path: &[u64]) -> RngSeed {
        let mut h = splitmix64(self.0);
        for &component in path {
            h = splitmix64(h ^ splitmix64(component));
        }
        RngSeed(h)
    }

    /// Derives the RNG stream for one path under this campaign seed.
    pub fn stream(self, path: &[u64]) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.child(path).0)
    }
}
