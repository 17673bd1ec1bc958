//! State preparation circuits for the two input shapes used by checks.
//!
//! Basis inputs `|s>` are prepared by X gates on the set bits of `s`.
//! Two-value inputs `(|s1> + e^{i theta} |s2>)/sqrt(2)` are prepared by a
//! fixed synthesis: X gates on bits where `s1` and `s2` agree on 1, an H
//! and a phase rotation on the lowest differing bit (the pivot), a CNOT
//! fan-out from the pivot to the remaining differing bits, and finally X
//! gates on the differing bits where `s1` has a 1. The phase always lands
//! on the `s2` branch and the produced state carries no global phase.
//!
//! Gate order within each stage is ascending by qubit index, so circuits
//! are unique per `(s1, s2, theta)` and stable across runs.

use crate::sim::{Gate, SimError, StateVector};
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PrepError {
    #[error("state {s} does not fit in {num_qubits} qubits")]
    StateOutOfRange { s: u64, num_qubits: usize },
    #[error("two-value preparation requires distinct targets, got {0} twice")]
    EqualTargets(u64),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// What a preparation circuit produces when run on `|0...0>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PreparedState {
    /// `|s>`.
    Basis(u64),
    /// `(|s1> + e^{i theta} |s2>)/sqrt(2)`.
    TwoValue { s1: u64, s2: u64, theta: f64 },
}

/// A gate sequence that prepares [`PreparedState`] from the all-zeros state.
/// `Display` renders one gate per line.
#[derive(Debug, Clone, PartialEq)]
pub struct PrepCircuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
    pub description: PreparedState,
}

impl PrepCircuit {
    /// The adjoint circuit: gates reversed, each inverted. Running it after
    /// the forward circuit restores `|0...0>`; on its own it maps the
    /// described state to `|0...0>`. The description still names the state
    /// of the forward direction.
    pub fn inverse(&self) -> PrepCircuit {
        PrepCircuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(|g| g.inverse()).collect(),
            description: self.description,
        }
    }

    /// Runs the circuit on a fresh zero state.
    pub fn prepare(&self) -> Result<StateVector, PrepError> {
        let mut sv = StateVector::new_zero_state(self.num_qubits)?;
        sv.apply_all(&self.gates)?;
        Ok(sv)
    }
}

impl fmt::Display for PrepCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for gate in &self.gates {
            writeln!(f, "{gate}")?;
        }
        Ok(())
    }
}

fn check_state(num_qubits: usize, s: u64) -> Result<(), PrepError> {
    if num_qubits < 64 && s >> num_qubits != 0 {
        Err(PrepError::StateOutOfRange { s, num_qubits })
    } else {
        Ok(())
    }
}

/// X gates on the set bits of `s`, ascending. Exactly `popcount(s)` gates.
pub fn build_basis_prep(num_qubits: usize, s: u64) -> Result<PrepCircuit, PrepError> {
    check_state(num_qubits, s)?;
    let gates = (0..num_qubits).filter(|q| s >> q & 1 == 1).map(Gate::X).collect();
    Ok(PrepCircuit { num_qubits, gates, description: PreparedState::Basis(s) })
}

/// Circuit for `(|s1> + e^{i theta} |s2>)/sqrt(2)` with `s1 != s2`.
pub fn build_twovalue_prep(
    num_qubits: usize,
    s1: u64,
    s2: u64,
    theta: f64,
) -> Result<PrepCircuit, PrepError> {
    check_state(num_qubits, s1)?;
    check_state(num_qubits, s2)?;
    if s1 == s2 {
        return Err(PrepError::EqualTargets(s1));
    }
    let diff = s1 ^ s2;
    let pivot = diff.trailing_zeros() as usize;
    let mut gates = Vec::new();
    for q in 0..num_qubits {
        if (s1 & s2) >> q & 1 == 1 {
            gates.push(Gate::X(q));
        }
    }
    gates.push(Gate::H(pivot));
    gates.push(Gate::R1(pivot, theta));
    for q in 0..num_qubits {
        if q != pivot && diff >> q & 1 == 1 {
            gates.push(Gate::Cnot(pivot, q));
        }
    }
    for q in 0..num_qubits {
        if (s1 & diff) >> q & 1 == 1 {
            gates.push(Gate::X(q));
        }
    }
    Ok(PrepCircuit { num_qubits, gates, description: PreparedState::TwoValue { s1, s2, theta } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::RngSeed;
    use crate::{phase_distance, TOL_PHASE, TOL_STATE};
    use num_complex::Complex64;
    use rand::Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn basis_prep_uses_one_x_per_set_bit() {
        let circuit = build_basis_prep(5, 25).unwrap();
        assert_eq!(circuit.gates, vec![Gate::X(0), Gate::X(3), Gate::X(4)]);
        let sv = circuit.prepare().unwrap();
        assert!((sv.probability_of(25).unwrap() - 1.0).abs() < TOL_STATE);

        let empty = build_basis_prep(4, 0).unwrap();
        assert!(empty.gates.is_empty());
    }

    #[test]
    fn basis_prep_rejects_out_of_range_state() {
        assert_eq!(
            build_basis_prep(5, 32).unwrap_err(),
            PrepError::StateOutOfRange { s: 32, num_qubits: 5 }
        );
    }

    #[test]
    fn twovalue_example_circuit_is_pinned() {
        // s1=44=101100b, s2=58=111010b: common 1s {3,5}, pivot 1,
        // remaining differing bits {2,4}, s1-only 1s {2}.
        let c = build_twovalue_prep(6, 44, 58, PI / 3.0).unwrap();
        assert_eq!(
            c.gates,
            vec![
                Gate::X(3),
                Gate::X(5),
                Gate::H(1),
                Gate::R1(1, PI / 3.0),
                Gate::Cnot(1, 2),
                Gate::Cnot(1, 4),
                Gate::X(2),
            ]
        );
        let sv = c.prepare().unwrap();
        let expect_s1 = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let expect_s2 = Complex64::from_polar(FRAC_1_SQRT_2, PI / 3.0);
        assert!((sv.amps[44] - expect_s1).norm() < TOL_STATE);
        assert!((sv.amps[58] - expect_s2).norm() < TOL_STATE);
    }

    #[test]
    fn listing_is_one_gate_per_line() {
        let c = build_twovalue_prep(6, 44, 58, PI / 3.0).unwrap();
        let lines: Vec<String> = c.to_string().lines().map(String::from).collect();
        assert_eq!(
            lines,
            vec![
                "X 3".to_string(),
                "X 5".to_string(),
                "H 1".to_string(),
                format!("R1 1 {}", PI / 3.0),
                "CNOT 1 2".to_string(),
                "CNOT 1 4".to_string(),
                "X 2".to_string(),
            ]
        );
    }

    #[test]
    fn ghz_and_minus_specials() {
        // s1=0, s2=all-ones, theta=0: equal superposition of extremes.
        let c = build_twovalue_prep(4, 0, 15, 0.0).unwrap();
        let sv = c.prepare().unwrap();
        assert!((sv.amps[0].re - FRAC_1_SQRT_2).abs() < TOL_STATE);
        assert!((sv.amps[15].re - FRAC_1_SQRT_2).abs() < TOL_STATE);
        assert!((sv.norm_sqr() - 1.0).abs() < TOL_STATE);
        assert_eq!(c.gates[0], Gate::H(0));
        assert_eq!(&c.gates[2..], &[Gate::Cnot(0, 1), Gate::Cnot(0, 2), Gate::Cnot(0, 3)]);

        // s1=0, s2=1, theta=pi: the |-> state.
        let sv = build_twovalue_prep(1, 0, 1, PI).unwrap().prepare().unwrap();
        assert!((sv.amps[0] - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < TOL_STATE);
        assert!((sv.amps[1] - Complex64::new(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn phase_stays_on_s2_when_s1_owns_the_pivot_bit() {
        // s1=3 has bit 1 set, pivot of 3^5=6 is bit 1.
        let theta = 0.8;
        let sv = build_twovalue_prep(3, 3, 5, theta).unwrap().prepare().unwrap();
        assert!((sv.amps[3] - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < TOL_STATE);
        assert!((sv.amps[5] - Complex64::from_polar(FRAC_1_SQRT_2, theta)).norm() < TOL_STATE);
    }

    #[test]
    fn equal_targets_rejected() {
        assert_eq!(build_twovalue_prep(3, 5, 5, 0.0).unwrap_err(), PrepError::EqualTargets(5));
    }

    #[test]
    fn inverse_restores_zero_state() {
        let c = build_twovalue_prep(5, 19, 6, 2.1).unwrap();
        let mut sv = c.prepare().unwrap();
        sv.apply_all(&c.inverse().gates).unwrap();
        assert!((sv.amps[0] - Complex64::new(1.0, 0.0)).norm() < TOL_STATE);
        for (i, amp) in sv.amps.iter().enumerate().skip(1) {
            assert!(amp.norm() < TOL_STATE, "residual amplitude at {i}");
        }
    }

    #[test]
    fn random_twovalue_instances_hit_spec_exactly() {
        let mut rng = RngSeed(2024).stream(&[77]);
        for trial in 0..200 {
            let n = rng.gen_range(1..=10usize);
            let dim = 1u64 << n;
            let s1 = rng.gen_range(0..dim);
            let s2 = loop {
                let c = rng.gen_range(0..dim);
                if c != s1 {
                    break c;
                }
            };
            let theta = rng.gen::<f64>() * 2.0 * PI;
            let sv = build_twovalue_prep(n, s1, s2, theta).unwrap().prepare().unwrap();
            let a1 = sv.amps[s1 as usize];
            let a2 = sv.amps[s2 as usize];
            assert!((a1.norm() - FRAC_1_SQRT_2).abs() < 1e-9, "trial {trial}");
            assert!((a2.norm() - FRAC_1_SQRT_2).abs() < 1e-9, "trial {trial}");
            let relative = a2.arg() - a1.arg();
            assert!(phase_distance(relative, theta) < TOL_PHASE, "trial {trial}");
            for (i, amp) in sv.amps.iter().enumerate() {
                if i as u64 != s1 && i as u64 != s2 {
                    assert!(amp.norm() < TOL_STATE, "trial {trial} support leak at {i}");
                }
            }
        }
    }

    #[test]
    fn mismatched_phase_roundtrip_measures_cos_squared() {
        // Preparing with theta_err and unpreparing with theta_0 leaves
        // P(all zeros) = cos^2((theta_err - theta_0)/2) exactly.
        let mut rng = RngSeed(31).stream(&[5]);
        for _ in 0..50 {
            let n = rng.gen_range(1..=8usize);
            let dim = 1u64 << n;
            let s1 = rng.gen_range(0..dim);
            let s2 = loop {
                let c = rng.gen_range(0..dim);
                if c != s1 {
                    break c;
                }
            };
            let theta_err = rng.gen::<f64>() * 2.0 * PI;
            let theta_0 = rng.gen::<f64>() * 2.0 * PI;
            let mut sv = build_twovalue_prep(n, s1, s2, theta_err).unwrap().prepare().unwrap();
            sv.apply_all(&build_twovalue_prep(n, s1, s2, theta_0).unwrap().inverse().gates).unwrap();
            let p0 = sv.probability_of(0).unwrap();
            let predicted = ((theta_err - theta_0) / 2.0).cos().powi(2);
            assert!((p0 - predicted).abs() < 1e-9, "p0={p0} predicted={predicted}");
        }
    }
}
