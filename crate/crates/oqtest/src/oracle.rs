//! Classical oracle specifications and quantum oracle programs.
//!
//! An oracle specification pairs two classical functions over an `m`-bit
//! input register `x` and an `n`-bit output register `y`: a transform
//! `F(x, y)` that must be bijective in `y` for every fixed `x`, and a phase
//! `G(x, y)` in radians. The intended program semantics on basis states is
//!
//! ```text
//! |x>|y>  ->  e^{i G(x,y)} |x>|F(x,y)>
//! ```
//!
//! extended linearly to superpositions. [`reference_oracle`] realizes these
//! semantics exactly on the simulator via precomputed permutation and phase
//! tables; programs under test are opaque [`OracleProgram`] values that may
//! or may not match their specification.

use crate::sim::{SimError, StateVector};
use num_complex::Complex64;
use std::sync::Arc;

/// Widest register pair for which reference tables are precomputed.
pub const MAX_REFERENCE_QUBITS: usize = 20;
/// Widest output register for which bijectivity is validated exhaustively.
pub const MAX_VALIDATE_BITS: usize = 12;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum OracleError {
    #[error("output register must have at least 1 bit")]
    EmptyOutputRegister,
    #[error("F is not bijective in y at x={x}: F({x},{y1}) == F({x},{y2})")]
    NotBijective { x: u64, y1: u64, y2: u64 },
    #[error("F({x},{y}) = {value} does not fit in {n} output bits")]
    OutputOutOfRange { x: u64, y: u64, value: u64, n: usize },
    #[error("input x={x} does not fit in {m} bits")]
    XOutOfRange { x: u64, m: usize },
    #[error("input y={y} does not fit in {n} bits")]
    YOutOfRange { y: u64, n: usize },
    #[error("register pair of {0} qubits exceeds the {MAX_REFERENCE_QUBITS}-qubit reference table cap")]
    TooLargeForReference(usize),
    #[error("output register of {0} bits exceeds the {MAX_VALIDATE_BITS}-bit validation cap")]
    TooLargeForValidation(usize),
    #[error("program expects {expected} qubits, state has {actual}")]
    WidthMismatch { expected: usize, actual: usize },
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Classical specification of an oracle: register widths plus the reference
/// functions. `F` values must lie in `[0, 2^n)`; `G` is a phase in radians
/// with no range restriction.
#[derive(Clone)]
pub struct OracleSpec {
    pub m: usize,
    pub n: usize,
    pub f: Arc<dyn Fn(u64, u64) -> u64 + Send + Sync>,
    pub g: Arc<dyn Fn(u64, u64) -> f64 + Send + Sync>,
}

impl OracleSpec {
    pub fn new(
        m: usize,
        n: usize,
        f: impl Fn(u64, u64) -> u64 + Send + Sync + 'static,
        g: impl Fn(u64, u64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, OracleError> {
        if n == 0 {
            return Err(OracleError::EmptyOutputRegister);
        }
        Ok(OracleSpec { m, n, f: Arc::new(f), g: Arc::new(g) })
    }

    pub fn num_qubits(&self) -> usize {
        self.m + self.n
    }

    fn check_input(&self, x: u64, y: u64) -> Result<(), OracleError> {
        if self.m < 64 && x >> self.m != 0 {
            return Err(OracleError::XOutOfRange { x, m: self.m });
        }
        if y >> self.n != 0 {
            return Err(OracleError::YOutOfRange { y, n: self.n });
        }
        Ok(())
    }
}

/// Basis index of `|x>|y>`: `x` in the low `m` bits, `y` above it.
pub fn concat_registers(m: usize, x: u64, y: u64) -> usize {
    (x | (y << m)) as usize
}

/// Splits a basis index back into `(x, y)`.
pub fn split_registers(m: usize, index: usize) -> (u64, u64) {
    let x = index as u64 & ((1u64 << m) - 1);
    (x, index as u64 >> m)
}

/// The basis-state image `(concat(x, F(x,y)), G(x,y))` a correct program
/// must produce for input `|x>|y>`.
pub fn expected_output(spec: &OracleSpec, x: u64, y: u64) -> Result<(usize, f64), OracleError> {
    spec.check_input(x, y)?;
    let fv = (spec.f)(x, y);
    if fv >> spec.n != 0 {
        return Err(OracleError::OutputOutOfRange { x, y, value: fv, n: spec.n });
    }
    Ok((concat_registers(spec.m, x, fv), (spec.g)(x, y)))
}

/// Exhaustively checks that `F(x, .)` permutes `[0, 2^n)` for every `x`,
/// reporting the first collision found as a witness. Scans `y` in ascending
/// order, so for constant `F` the witness at each `x` is `(y1, y2) = (0, 1)`.
pub fn validate_bijectivity(spec: &OracleSpec) -> Result<(), OracleError> {
    if spec.n > MAX_VALIDATE_BITS {
        return Err(OracleError::TooLargeForValidation(spec.n));
    }
    let size = 1u64 << spec.n;
    let mut first_seen_at = vec![u64::MAX; size as usize];
    for x in 0..1u64 << spec.m {
        first_seen_at.fill(u64::MAX);
        for y in 0..size {
            let fv = (spec.f)(x, y);
            if fv >= size {
                return Err(OracleError::OutputOutOfRange { x, y, value: fv, n: spec.n });
            }
            let prev = first_seen_at[fv as usize];
            if prev != u64::MAX {
                return Err(OracleError::NotBijective { x, y1: prev, y2: y });
            }
            first_seen_at[fv as usize] = y;
        }
    }
    Ok(())
}

/// An opaque program over `num_qubits` qubits. The only way to interact
/// with it is to run it on a state.
#[derive(Clone)]
pub struct OracleProgram {
    pub num_qubits: usize,
    apply_fn: Arc<dyn Fn(&mut StateVector) -> Result<(), OracleError> + Send + Sync>,
}

impl OracleProgram {
    pub fn new(
        num_qubits: usize,
        apply_fn: impl Fn(&mut StateVector) -> Result<(), OracleError> + Send + Sync + 'static,
    ) -> Self {
        OracleProgram { num_qubits, apply_fn: Arc::new(apply_fn) }
    }

    /// Runs the program on `state` in place.
    pub fn apply(&self, state: &mut StateVector) -> Result<(), OracleError> {
        if state.num_qubits != self.num_qubits {
            return Err(OracleError::WidthMismatch {
                expected: self.num_qubits,
                actual: state.num_qubits,
            });
        }
        (self.apply_fn)(state)
    }

    /// Derived program that runs `self` and then the given gates. Used to
    /// model programs with trailing defects.
    pub fn with_suffix(&self, gates: Vec<crate::sim::Gate>) -> OracleProgram {
        let base = self.clone();
        OracleProgram::new(self.num_qubits, move |sv| {
            base.apply(sv)?;
            sv.apply_all(&gates)?;
            Ok(())
        })
    }
}

impl std::fmt::Debug for OracleProgram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OracleProgram").field("num_qubits", &self.num_qubits).finish()
    }
}

/// Builds the program that implements `spec` exactly, as a precomputed
/// basis permutation plus per-basis phase. Construction fails if `F` is not
/// bijective in `y` or produces out-of-range values; bijectivity here is
/// checked over the full domain as a side effect of table building, so it
/// is not subject to the [`MAX_VALIDATE_BITS`] cap.
pub fn reference_oracle(spec: &OracleSpec) -> Result<OracleProgram, OracleError> {
    let total = spec.num_qubits();
    if total > MAX_REFERENCE_QUBITS {
        return Err(OracleError::TooLargeForReference(total));
    }
    let dim = 1usize << total;
    let mut perm = vec![0usize; dim];
    let mut phase = vec![Complex64::new(1.0, 0.0); dim];
    let mut first_seen_at = vec![u64::MAX; 1usize << spec.n];
    for x in 0..1u64 << spec.m {
        first_seen_at.fill(u64::MAX);
        for y in 0..1u64 << spec.n {
            let (image, g) = expected_output(spec, x, y)?;
            let fv = (image >> spec.m) as u64;
            let prev = first_seen_at[fv as usize];
            if prev != u64::MAX {
                return Err(OracleError::NotBijective { x, y1: prev, y2: y });
            }
            first_seen_at[fv as usize] = y;
            let source = concat_registers(spec.m, x, y);
            perm[source] = image;
            phase[source] = Complex64::from_polar(1.0, g);
        }
    }
    let num_qubits = total.max(1);
    Ok(OracleProgram::new(num_qubits, move |sv| {
        let mut out = vec![Complex64::new(0.0, 0.0); sv.amps.len()];
        for (i, amp) in sv.amps.iter().enumerate() {
            out[perm[i]] = amp * phase[i];
        }
        sv.amps = out;
        Ok(())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Gate;
    use crate::{phase_distance, TOL_PHASE, TOL_STATE};
    use std::f64::consts::PI;

    fn xor_spec() -> OracleSpec {
        // F(x,y) = y xor x, G(x,y) = pi/2 * popcount(x & y); m = n = 2.
        OracleSpec::new(
            2,
            2,
            |x, y| y ^ x,
            |x, y| PI / 2.0 * (x & y).count_ones() as f64,
        )
        .unwrap()
    }

    #[test]
    fn expected_output_concatenates_little_endian() {
        let spec = xor_spec();
        // x=3, y=1: F=2, so index = 3 | (2 << 2) = 11; G = pi/2.
        let (idx, g) = expected_output(&spec, 3, 1).unwrap();
        assert_eq!(idx, 11);
        assert!((g - PI / 2.0).abs() < 1e-12);
        let (x, y) = split_registers(2, idx);
        assert_eq!((x, y), (3, 2));
    }

    #[test]
    fn expected_output_validates_ranges() {
        let spec = xor_spec();
        assert_eq!(expected_output(&spec, 4, 0).unwrap_err(), OracleError::XOutOfRange { x: 4, m: 2 });
        assert_eq!(expected_output(&spec, 0, 4).unwrap_err(), OracleError::YOutOfRange { y: 4, n: 2 });
        let wide = OracleSpec::new(1, 1, |_, y| y + 2, |_, _| 0.0).unwrap();
        assert!(matches!(
            expected_output(&wide, 0, 0).unwrap_err(),
            OracleError::OutputOutOfRange { value: 2, .. }
        ));
    }

    #[test]
    fn bijectivity_accepts_permutations() {
        assert_eq!(validate_bijectivity(&xor_spec()), Ok(()));
        let add = OracleSpec::new(3, 3, |x, y| (x + y) % 8, |_, _| 0.0).unwrap();
        assert_eq!(validate_bijectivity(&add), Ok(()));
    }

    #[test]
    fn constant_zero_f_yields_canonical_witness() {
        let spec = OracleSpec::new(1, 1, |_, _| 0, |_, _| 0.0).unwrap();
        assert_eq!(
            validate_bijectivity(&spec),
            Err(OracleError::NotBijective { x: 0, y1: 0, y2: 1 })
        );
        assert!(reference_oracle(&spec).is_err());
    }

    #[test]
    fn witness_reports_colliding_pair() {
        // Collision only at x=2: F(2,1) == F(2,3) == 1.
        let spec = OracleSpec::new(2, 2, |x, y| if x == 2 && y == 3 { 1 } else { y }, |_, _| 0.0).unwrap();
        let err = validate_bijectivity(&spec).unwrap_err();
        assert_eq!(err, OracleError::NotBijective { x: 2, y1: 1, y2: 3 });
    }

    #[test]
    fn validation_cap_is_enforced() {
        let spec = OracleSpec::new(0, 13, |_, y| y, |_, _| 0.0).unwrap();
        assert_eq!(validate_bijectivity(&spec), Err(OracleError::TooLargeForValidation(13)));
        // Reference tables have their own, larger cap.
        let spec = OracleSpec::new(10, 11, |_, y| y, |_, _| 0.0).unwrap();
        assert_eq!(
            reference_oracle(&spec).unwrap_err(),
            OracleError::TooLargeForReference(21)
        );
    }

    #[test]
    fn reference_matches_expected_output_on_every_basis_state() {
        let spec = xor_spec();
        let program = reference_oracle(&spec).unwrap();
        for x in 0..4u64 {
            for y in 0..4u64 {
                let mut sv = StateVector::new_zero_state(4).unwrap();
                sv.amps[0] = Complex64::new(0.0, 0.0);
                sv.amps[concat_registers(2, x, y)] = Complex64::new(1.0, 0.0);
                program.apply(&mut sv).unwrap();
                let (index, g) = expected_output(&spec, x, y).unwrap();
                let amp = sv.amps[index];
                assert!((amp.norm() - 1.0).abs() < TOL_STATE);
                assert!(phase_distance(amp.arg(), g) < TOL_PHASE);
            }
        }
    }

    #[test]
    fn reference_is_linear_on_superpositions() {
        let spec = xor_spec();
        let program = reference_oracle(&spec).unwrap();
        // H on qubit 0 of |x=0,y=2>: (|0,2> + |1,2>)/sqrt(2).
        let mut sv = StateVector::new_zero_state(4).unwrap();
        sv.apply(Gate::X(3)).unwrap();
        sv.apply(Gate::H(0)).unwrap();
        program.apply(&mut sv).unwrap();
        let half = std::f64::consts::FRAC_1_SQRT_2;
        let (i0, g0) = expected_output(&spec, 0, 2).unwrap();
        let (i1, g1) = expected_output(&spec, 1, 2).unwrap();
        let e0 = Complex64::from_polar(half, g0);
        let e1 = Complex64::from_polar(half, g1);
        assert!((sv.amps[i0] - e0).norm() < TOL_STATE);
        assert!((sv.amps[i1] - e1).norm() < TOL_STATE);
        assert!((sv.norm_sqr() - 1.0).abs() < TOL_STATE);
    }

    #[test]
    fn program_rejects_width_mismatch() {
        let program = reference_oracle(&xor_spec()).unwrap();
        let mut sv = StateVector::new_zero_state(3).unwrap();
        assert_eq!(
            program.apply(&mut sv).unwrap_err(),
            OracleError::WidthMismatch { expected: 4, actual: 3 }
        );
    }

    #[test]
    fn suffix_gates_run_after_the_base_program() {
        let spec = OracleSpec::new(1, 1, |_, y| y, |_, _| 0.0).unwrap();
        let mutant = reference_oracle(&spec).unwrap().with_suffix(vec![Gate::X(1)]);
        let mut sv = StateVector::new_zero_state(2).unwrap();
        mutant.apply(&mut sv).unwrap();
        assert!((sv.probability_of(2).unwrap() - 1.0).abs() < TOL_STATE);
    }

    #[test]
    fn zero_width_input_register_is_allowed() {
        let spec = OracleSpec::new(0, 2, |_, y| y ^ 0b11, |_, _| 0.0).unwrap();
        let program = reference_oracle(&spec).unwrap();
        let mut sv = StateVector::new_zero_state(2).unwrap();
        program.apply(&mut sv).unwrap();
        assert!((sv.probability_of(3).unwrap() - 1.0).abs() < TOL_STATE);
        assert_eq!(expected_output(&spec, 0, 1).unwrap().0, 2);
    }
}
