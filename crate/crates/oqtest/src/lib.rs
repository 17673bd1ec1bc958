//! Black-box testing of quantum oracle programs.
//!
//! A program under test is treated as an opaque unitary that should implement
//! `|x>|y> -> e^{i G(x,y)} |x>|F(x,y)>` for classical reference functions
//! `F` and `G`. The crate provides a dense statevector simulator, reference
//! oracle construction, state preparation circuits for basis states and
//! two-value superpositions, equivalence-class derivation over quantum inputs,
//! the prepare/run/uncompute/measure check loop with repetition-count bounds,
//! and a benchmark suite of ten programs plus mutants.
//!
//! Bit conventions used throughout: qubit 0 is the least significant bit of a
//! basis index, the input register `x` occupies qubits `0..m`, and the output
//! register `y` occupies qubits `m..m+n`.

pub mod bench;
pub mod classes;
pub mod oracle;
pub mod prep;
pub mod prum;
pub mod sim;

/// Absolute amplitude tolerance for exact-state comparisons.
pub const TOL_STATE: f64 = 1e-10;
/// Tolerance on `|<psi|psi> - 1|` before measurement is refused.
pub const TOL_NORM: f64 = 1e-8;
/// Tolerance for phase comparisons, applied to the wrapped distance mod 2pi.
pub const TOL_PHASE: f64 = 1e-9;

/// Wrapped distance between two angles: `min(|d|, 2pi - |d|)` for `d` reduced
/// mod 2pi. Zero iff the angles are equal as phases.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let d = (a - b).rem_euclid(tau);
    d.min(tau - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn phase_distance_wraps() {
        assert!(phase_distance(0.1, 0.1 + 2.0 * PI) < 1e-12);
        assert!((phase_distance(-PI, PI) - 0.0).abs() < 1e-12);
        assert!((phase_distance(0.0, PI) - PI).abs() < 1e-12);
        assert!((phase_distance(6.2, 0.1) - (0.1 + 2.0 * PI - 6.2)).abs() < 1e-12);
    }
}
