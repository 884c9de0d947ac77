//! Statevector storage, gate application, overlaps and one-qubit reductions.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::{Gate, QsimError, MAX_QUBITS};

pub const COMPLEX_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const COMPLEX_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Normalized complex amplitude vector of dimension 2^n. Qubit 0 addresses
/// the least-significant bit of the amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    amps: Vec<Complex64>,
    n_qubits: usize,
}

impl Statevector {
    /// The all-zeros basis state |0…0⟩.
    pub fn zero_state(n_qubits: usize) -> Result<Self, QsimError> {
        if n_qubits < 1 || n_qubits > MAX_QUBITS {
            return Err(QsimError::InvalidQubitCount { n_qubits });
        }
        let mut amps = vec![COMPLEX_ZERO; 1 << n_qubits];
        amps[0] = COMPLEX_ONE;
        Ok(Statevector { amps, n_qubits })
    }

    /// Builds a state from raw amplitudes; the length must be a power of two
    /// and the vector is normalized on construction.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QsimError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() || len > (1 << MAX_QUBITS) {
            return Err(QsimError::InvalidQubitCount {
                n_qubits: len.trailing_zeros() as usize,
            });
        }
        let n_qubits = len.trailing_zeros() as usize;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QsimError::NonFiniteInput { index: 0 });
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Statevector { amps, n_qubits })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_qubit(&self, q: usize) -> Result<(), QsimError> {
        if q >= self.n_qubits {
            return Err(QsimError::QubitOutOfRange {
                qubit: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    fn apply_single(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let mask = 1usize << q;
        let len = self.amps.len();
        let mut base = 0usize;
        while base < len {
            if base & mask == 0 {
                let pair = base | mask;
                let a0 = self.amps[base];
                let a1 = self.amps[pair];
                self.amps[base] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[pair] = m[1][0] * a0 + m[1][1] * a1;
            }
            base += 1;
        }
    }

    /// Applies one gate in place; norm is preserved and only the addressed
    /// qubits are touched.
    pub fn apply_gate(&mut self, gate: Gate) -> Result<(), QsimError> {
        match gate {
            Gate::H { q } => {
                self.check_qubit(q)?;
                let s = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_single(q, [[s, s], [s, -s]]);
            }
            Gate::Rx { q, theta } => {
                self.check_qubit(q)?;
                let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                let c = Complex64::new(c, 0.0);
                let ms = Complex64::new(0.0, -s);
                self.apply_single(q, [[c, ms], [ms, c]]);
            }
            Gate::Ry { q, theta } => {
                self.check_qubit(q)?;
                let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                let c = Complex64::new(c, 0.0);
                let s = Complex64::new(s, 0.0);
                self.apply_single(q, [[c, -s], [s, c]]);
            }
            Gate::Rz { q, theta } => {
                self.check_qubit(q)?;
                let e0 = Complex64::from_polar(1.0, -theta / 2.0);
                let e1 = Complex64::from_polar(1.0, theta / 2.0);
                self.apply_single(q, [[e0, COMPLEX_ZERO], [COMPLEX_ZERO, e1]]);
            }
            Gate::Phase { q, theta } => {
                self.check_qubit(q)?;
                let e = Complex64::from_polar(1.0, theta);
                self.apply_single(q, [[COMPLEX_ONE, COMPLEX_ZERO], [COMPLEX_ZERO, e]]);
            }
            Gate::Cx { control, target } => {
                self.check_qubit(control)?;
                self.check_qubit(target)?;
                if control == target {
                    return Err(QsimError::ControlEqualsTarget { qubit: control });
                }
                let cmask = 1usize << control;
                let tmask = 1usize << target;
                for i in 0..self.amps.len() {
                    if i & cmask != 0 && i & tmask == 0 {
                        self.amps.swap(i, i | tmask);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_all(&mut self, gates: &[Gate]) -> Result<(), QsimError> {
        for g in gates {
            self.apply_gate(*g)?;
        }
        Ok(())
    }
}

/// Inner product ⟨a|b⟩ of two equal-dimension states.
pub fn overlap(a: &Statevector, b: &Statevector) -> Result<Complex64, QsimError> {
    if a.n_qubits != b.n_qubits {
        return Err(QsimError::DimensionMismatch {
            expected: a.n_qubits,
            got: b.n_qubits,
        });
    }
    Ok(a.amps
        .iter()
        .zip(b.amps.iter())
        .map(|(x, y)| x.conj() * y)
        .fold(COMPLEX_ZERO, |acc, v| acc + v))
}

/// One-qubit reduced density matrix: 2×2 complex, Hermitian, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct OneQubitDensity {
    rho: [[Complex64; 2]; 2],
}

impl OneQubitDensity {
    pub fn elements(&self) -> &[[Complex64; 2]; 2] {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        (self.rho[0][0] + self.rho[1][1]).re
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        (self.rho[0][1] - self.rho[1][0].conj()).norm()
    }

    /// Pauli expectation values (tr\[Xρ\], tr\[Yρ\], tr\[Zρ\]).
    pub fn bloch_components(&self) -> (f64, f64, f64) {
        let x = 2.0 * self.rho[0][1].re;
        let y = -2.0 * self.rho[0][1].im;
        let z = (self.rho[0][0] - self.rho[1][1]).re;
        (x, y, z)
    }
}

/// Partial trace over all qubits except `k`.
pub fn reduced_density_matrix(
    state: &Statevector,
    k: usize,
) -> Result<OneQubitDensity, QsimError> {
    if k >= state.n_qubits {
        return Err(QsimError::QubitOutOfRange {
            qubit: k,
            n_qubits: state.n_qubits,
        });
    }
    let mask = 1usize << k;
    let mut rho = [[COMPLEX_ZERO; 2]; 2];
    for i in 0..state.amps.len() {
        if i & mask == 0 {
            let a0 = state.amps[i];
            let a1 = state.amps[i | mask];
            rho[0][0] += a0 * a0.conj();
            rho[0][1] += a0 * a1.conj();
            rho[1][0] += a1 * a0.conj();
            rho[1][1] += a1 * a1.conj();
        }
    }
    Ok(OneQubitDensity { rho })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{build_feature_map, encode_state, Entanglement, FeatureMapFamily};
    use core::f64::consts::FRAC_1_SQRT_2;

    fn plus_state() -> Statevector {
        let mut s = Statevector::zero_state(1).unwrap();
        s.apply_gate(Gate::H { q: 0 }).unwrap();
        s
    }

    #[test]
    fn hadamard_makes_equal_superposition() {
        let s = plus_state();
        assert!((s.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn cx_flips_target_when_control_set() {
        // |10⟩ (qubit 0 = control, set) → |11⟩
        let mut s = Statevector::from_amplitudes(vec![
            COMPLEX_ZERO,
            COMPLEX_ONE,
            COMPLEX_ZERO,
            COMPLEX_ZERO,
        ])
        .unwrap();
        s.apply_gate(Gate::Cx {
            control: 0,
            target: 1,
        })
        .unwrap();
        assert_eq!(s.amplitudes()[3], COMPLEX_ONE);
    }

    #[test]
    fn rz_inverse_restores_state() {
        let mut s = plus_state();
        let before = s.clone();
        s.apply_gate(Gate::Rz { q: 0, theta: 0.7 }).unwrap();
        s.apply_gate(Gate::Rz { q: 0, theta: -0.7 }).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn cx_rejects_equal_indices() {
        let mut s = Statevector::zero_state(2).unwrap();
        assert!(matches!(
            s.apply_gate(Gate::Cx {
                control: 1,
                target: 1
            }),
            Err(QsimError::ControlEqualsTarget { qubit: 1 })
        ));
    }

    #[test]
    fn gate_index_validation() {
        let mut s = Statevector::zero_state(2).unwrap();
        assert!(s.apply_gate(Gate::H { q: 2 }).is_err());
    }

    #[test]
    fn overlap_of_state_with_itself_is_one() {
        let s = plus_state();
        let o = overlap(&s, &s).unwrap();
        assert!((o.re - 1.0).abs() < 1e-15 && o.im.abs() < 1e-15);
    }

    #[test]
    fn orthogonal_basis_states_overlap_zero() {
        let zero = Statevector::zero_state(1).unwrap();
        let mut one = Statevector::zero_state(1).unwrap();
        one.apply_gate(Gate::Rx {
            q: 0,
            theta: core::f64::consts::PI,
        })
        .unwrap();
        assert!(overlap(&zero, &one).unwrap().norm() < 1e-15);
    }

    #[test]
    fn overlap_of_plus_with_zero() {
        let plus = plus_state();
        let zero = Statevector::zero_state(1).unwrap();
        let o = overlap(&plus, &zero).unwrap();
        assert!((o.re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn overlap_dimension_mismatch() {
        let a = Statevector::zero_state(1).unwrap();
        let b = Statevector::zero_state(2).unwrap();
        assert!(overlap(&a, &b).is_err());
    }

    #[test]
    fn product_state_rdm_is_pure_projector() {
        // |0⟩ ⊗ |+⟩ with |+⟩ on qubit 1
        let mut s = Statevector::zero_state(2).unwrap();
        s.apply_gate(Gate::H { q: 1 }).unwrap();
        let rho = reduced_density_matrix(&s, 1).unwrap();
        let (x, y, z) = rho.bloch_components();
        assert!((x - 1.0).abs() < 1e-14);
        assert!(y.abs() < 1e-14 && z.abs() < 1e-14);
        assert!((rho.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bell_state_rdm_is_maximally_mixed() {
        let mut s = Statevector::zero_state(2).unwrap();
        s.apply_gate(Gate::H { q: 0 }).unwrap();
        s.apply_gate(Gate::Cx {
            control: 0,
            target: 1,
        })
        .unwrap();
        for k in 0..2 {
            let rho = reduced_density_matrix(&s, k).unwrap();
            let e = rho.elements();
            assert!((e[0][0].re - 0.5).abs() < 1e-14);
            assert!((e[1][1].re - 0.5).abs() < 1e-14);
            assert!(e[0][1].norm() < 1e-14);
            let (x, y, z) = rho.bloch_components();
            assert!(x.abs() < 1e-14 && y.abs() < 1e-14 && z.abs() < 1e-14);
        }
    }

    #[test]
    fn zero_state_bloch_is_plus_z() {
        let s = Statevector::zero_state(1).unwrap();
        let rho = reduced_density_matrix(&s, 0).unwrap();
        assert_eq!(rho.bloch_components(), (0.0, 0.0, 1.0));
    }

    #[test]
    fn rdm_index_out_of_range() {
        let s = Statevector::zero_state(2).unwrap();
        assert!(reduced_density_matrix(&s, 2).is_err());
    }

    #[test]
    fn z_map_single_qubit_hand_value() {
        // H then P(0): amplitudes (1/√2, 1/√2)
        let spec = build_feature_map(FeatureMapFamily::Z, 1, 1, Entanglement::None).unwrap();
        let s = encode_state(&spec, &[0.0]).unwrap();
        assert!((s.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn encode_is_deterministic() {
        let spec = build_feature_map(FeatureMapFamily::Zz, 2, 2, Entanglement::Full).unwrap();
        let x = [0.37, -1.2];
        let a = encode_state(&spec, &x).unwrap();
        let b = encode_state(&spec, &x).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
    }

    #[test]
    fn encode_preserves_norm() {
        for family in [
            FeatureMapFamily::Z,
            FeatureMapFamily::Zz,
            FeatureMapFamily::Pauli,
            FeatureMapFamily::HighDim,
            FeatureMapFamily::YzCx,
        ] {
            let ent = match family {
                FeatureMapFamily::Z => Entanglement::None,
                FeatureMapFamily::Zz | FeatureMapFamily::Pauli => Entanglement::Full,
                _ => Entanglement::Linear,
            };
            let spec = build_feature_map(family, 3, 2, ent).unwrap();
            let s = encode_state(&spec, &[0.4, -0.9, 2.2]).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }
}
