//! Dense state-vector simulation of k qudits of dimension d.
//!
//! Amplitudes are indexed by base-d digit strings (l_1 ... l_k) with the
//! most significant digit belonging to wire 0. Gates act on a single wire;
//! measurement is projective with Born-rule sampling and collapse.
//!
//! Roots of unity are always computed as exp(2*pi*i*m/d) with the integer
//! exponent m reduced mod d first, so phases never drift for large exponents.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound on the amplitude vector length (d^k).
pub const DEFAULT_AMPLITUDE_CAP: usize = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("wire {wire} out of range for {k} qudits")]
    WireOutOfRange { wire: usize, k: usize },
    #[error("basis index {index} out of range for dimension {d}")]
    IndexOutOfRange { index: u64, d: usize },
    #[error("pauli parameter {value} out of range for dimension {d}")]
    PauliParamOutOfRange { value: u64, d: usize },
    #[error("state of {required} amplitudes exceeds cap {cap}")]
    CapExceeded { required: usize, cap: usize },
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("state norm {norm} is not 1; numerical corruption")]
    NotNormalized { norm: f64 },
    #[error("projection onto outcome {value} has vanishing probability")]
    DegenerateProjection { value: u64 },
    #[error("digit string length {got} does not match qudit count {want}")]
    DigitCountMismatch { got: usize, want: usize },
}

/// Which single-qudit basis a preparation or measurement refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Computational,
    Fourier,
}

/// A basis state label: computational index i means |i>, fourier index i
/// means QFT|i>.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BasisLabel {
    pub kind: BasisKind,
    pub index: u64,
}

/// Result of a single projective measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MeasurementOutcome {
    pub wire: usize,
    pub basis: BasisKind,
    pub value: u64,
}

/// exp(2*pi*i * m / d) with m reduced mod d before exponentiation.
pub fn omega_pow(d: usize, exponent: u64) -> Complex64 {
    let m = exponent % d as u64;
    let theta = 2.0 * std::f64::consts::PI * m as f64 / d as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// The d x d QFT matrix F[x][y] = omega^(x*y) / sqrt(d), row-major.
pub fn qft_matrix(d: usize) -> Vec<Complex64> {
    let scale = 1.0 / (d as f64).sqrt();
    let mut m = Vec::with_capacity(d * d);
    for x in 0..d {
        for y in 0..d {
            m.push(omega_pow(d, (x * y) as u64) * scale);
        }
    }
    m
}

/// The inverse QFT matrix, omega^(-x*y) / sqrt(d).
pub fn inverse_qft_matrix(d: usize) -> Vec<Complex64> {
    let scale = 1.0 / (d as f64).sqrt();
    let d64 = d as u64;
    let mut m = Vec::with_capacity(d * d);
    for x in 0..d {
        for y in 0..d {
            let e = ((x * y) as u64) % d64;
            m.push(omega_pow(d, (d64 - e) % d64) * scale);
        }
    }
    m
}

/// A pure state of k qudits of dimension d.
#[derive(Debug, Clone)]
pub struct QuditState {
    d: usize,
    k: usize,
    amps: Vec<Complex64>,
}

impl QuditState {
    fn checked_len(d: usize, k: usize, cap: usize) -> Result<usize, SimError> {
        if d < 2 {
            return Err(SimError::DimensionTooSmall(d));
        }
        let mut len = 1usize;
        for _ in 0..k {
            let next = len
                .checked_mul(d)
                .ok_or(SimError::CapExceeded { required: usize::MAX, cap })?;
            if next > cap {
                return Err(SimError::CapExceeded { required: next, cap });
            }
            len = next;
        }
        Ok(len)
    }

    /// All-|0...0> state of k qudits.
    pub fn zero(d: usize, k: usize) -> Result<Self, SimError> {
        let len = Self::checked_len(d, k, DEFAULT_AMPLITUDE_CAP)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(QuditState { d, k, amps })
    }

    /// Multi-qudit computational basis state |digits[0] digits[1] ...>.
    pub fn computational(d: usize, digits: &[u64]) -> Result<Self, SimError> {
        let mut state = Self::zero(d, digits.len())?;
        let mut index = 0usize;
        for &digit in digits {
            if digit >= d as u64 {
                return Err(SimError::IndexOutOfRange { index: digit, d });
            }
            index = index * d + digit as usize;
        }
        state.amps[0] = Complex64::new(0.0, 0.0);
        state.amps[index] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    /// Single-qudit state for a basis label: |i> or QFT|i>.
    pub fn prepare_basis_state(d: usize, label: BasisLabel) -> Result<Self, SimError> {
        if label.index >= d as u64 {
            return Err(SimError::IndexOutOfRange { index: label.index, d });
        }
        let mut state = Self::zero(d, 1)?;
        match label.kind {
            BasisKind::Computational => {
                state.amps[0] = Complex64::new(0.0, 0.0);
                state.amps[label.index as usize] = Complex64::new(1.0, 0.0);
            }
            BasisKind::Fourier => {
                let scale = 1.0 / (d as f64).sqrt();
                for x in 0..d {
                    state.amps[x] = omega_pow(d, label.index * x as u64) * scale;
                }
            }
        }
        Ok(state)
    }

    /// GHZ state (1/sqrt(d)) sum_j |j j ... j> of k qudits. Uses the default
    /// amplitude cap; see [`QuditState::ghz_with_cap`].
    pub fn ghz(d: usize, k: usize) -> Result<Self, SimError> {
        Self::ghz_with_cap(d, k, DEFAULT_AMPLITUDE_CAP)
    }

    pub fn ghz_with_cap(d: usize, k: usize, cap: usize) -> Result<Self, SimError> {
        let len = Self::checked_len(d, k, cap)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        // |jj...j| sits at j * (d^k - 1) / (d - 1).
        let step = (len - 1) / (d - 1);
        let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        for j in 0..d {
            amps[j * step] = amp;
        }
        Ok(QuditState { d, k, amps })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn num_qudits(&self) -> usize {
        self.k
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Inner product <self|other>.
    pub fn overlap(&self, other: &QuditState) -> Result<Complex64, SimError> {
        if self.d != other.d || self.k != other.k {
            return Err(SimError::DigitCountMismatch { got: other.k, want: self.k });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn stride(&self, wire: usize) -> usize {
        self.d.pow((self.k - 1 - wire) as u32)
    }

    fn check_wire(&self, wire: usize) -> Result<(), SimError> {
        if wire >= self.k {
            return Err(SimError::WireOutOfRange { wire, k: self.k });
        }
        Ok(())
    }

    /// Digit of basis index `index` on `wire`.
    pub fn digit_at(&self, index: usize, wire: usize) -> u64 {
        ((index / self.stride(wire)) % self.d) as u64
    }

    /// Applies a d x d row-major matrix to one wire, identity elsewhere.
    fn apply_matrix(&mut self, wire: usize, mat: &[Complex64]) -> Result<(), SimError> {
        self.check_wire(wire)?;
        let d = self.d;
        let stride = self.stride(wire);
        let block = stride * d;
        let mut scratch = vec![Complex64::new(0.0, 0.0); d];
        for base in (0..self.amps.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (r, s) in scratch.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for c in 0..d {
                        acc += mat[r * d + c] * self.amps[start + c * stride];
                    }
                    *s = acc;
                }
                for (r, s) in scratch.iter().enumerate() {
                    self.amps[start + r * stride] = *s;
                }
            }
        }
        Ok(())
    }

    /// QFT on one wire: |y> -> (1/sqrt(d)) sum_x omega^(y*x) |x>.
    pub fn apply_qft(&mut self, wire: usize) -> Result<(), SimError> {
        let mat = qft_matrix(self.d);
        self.apply_matrix(wire, &mat)
    }

    /// Inverse QFT on one wire.
    pub fn apply_inverse_qft(&mut self, wire: usize) -> Result<(), SimError> {
        let mat = inverse_qft_matrix(self.d);
        self.apply_matrix(wire, &mat)
    }

    /// Generalized Pauli U_{alpha,beta}: |x> -> omega^(beta*x) |x+alpha mod d>.
    pub fn apply_pauli(&mut self, wire: usize, alpha: u64, beta: u64) -> Result<(), SimError> {
        self.check_wire(wire)?;
        let d = self.d as u64;
        if alpha >= d {
            return Err(SimError::PauliParamOutOfRange { value: alpha, d: self.d });
        }
        if beta >= d {
            return Err(SimError::PauliParamOutOfRange { value: beta, d: self.d });
        }
        let d = self.d;
        let stride = self.stride(wire);
        let block = stride * d;
        let mut scratch = vec![Complex64::new(0.0, 0.0); d];
        for base in (0..self.amps.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for x in 0..d {
                    let target = (x + alpha as usize) % d;
                    scratch[target] =
                        omega_pow(d, beta * x as u64) * self.amps[start + x * stride];
                }
                for (r, s) in scratch.iter().enumerate() {
                    self.amps[start + r * stride] = *s;
                }
            }
        }
        Ok(())
    }

    /// Born-rule marginal distribution of one wire in the computational basis.
    pub fn probabilities(&self, wire: usize) -> Result<Vec<f64>, SimError> {
        self.check_wire(wire)?;
        let mut probs = vec![0.0f64; self.d];
        for (index, amp) in self.amps.iter().enumerate() {
            probs[self.digit_at(index, wire) as usize] += amp.norm_sqr();
        }
        Ok(probs)
    }

    /// Projective measurement of one wire in the computational basis.
    ///
    /// Samples the Born distribution, collapses and renormalizes in place.
    pub fn measure_computational(
        &mut self,
        wire: usize,
        rng: &mut impl Rng,
    ) -> Result<MeasurementOutcome, SimError> {
        let probs = self.probabilities(wire)?;
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(SimError::NotNormalized { norm: total.sqrt() });
        }
        let target = rng.random::<f64>() * total;
        let mut cumulative = 0.0;
        let mut value = self.d - 1;
        for (v, &p) in probs.iter().enumerate() {
            cumulative += p;
            if target < cumulative {
                value = v;
                break;
            }
        }
        let p = probs[value];
        if p < 1e-12 {
            return Err(SimError::DegenerateProjection { value: value as u64 });
        }
        let scale = Complex64::new(1.0 / p.sqrt(), 0.0);
        for index in 0..self.amps.len() {
            if self.digit_at(index, wire) == value as u64 {
                self.amps[index] *= scale;
            } else {
                self.amps[index] = Complex64::new(0.0, 0.0);
            }
        }
        Ok(MeasurementOutcome {
            wire,
            basis: BasisKind::Computational,
            value: value as u64,
        })
    }

    /// Measures one wire in the requested basis.
    ///
    /// The Fourier-basis measurement rotates the wire by the inverse QFT,
    /// measures computationally, and rotates the residual state back.
    pub fn measure_in_basis(
        &mut self,
        wire: usize,
        basis: BasisKind,
        rng: &mut impl Rng,
    ) -> Result<MeasurementOutcome, SimError> {
        match basis {
            BasisKind::Computational => self.measure_computational(wire, rng),
            BasisKind::Fourier => {
                self.apply_inverse_qft(wire)?;
                let outcome = self.measure_computational(wire, rng)?;
                self.apply_qft(wire)?;
                Ok(MeasurementOutcome { basis: BasisKind::Fourier, ..outcome })
            }
        }
    }

    /// Debug dump: one CSV row per basis state, digits dash-separated,
    /// re/im with 17 significant digits, locale-independent.
    pub fn dump_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "digits,re,im")?;
        for (index, amp) in self.amps.iter().enumerate() {
            let digits: Vec<String> = (0..self.k)
                .map(|w| self.digit_at(index, w).to_string())
                .collect();
            writeln!(out, "{},{:.16e},{:.16e}", digits.join("-"), amp.re, amp.im)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn computational_preparation() {
        let s = QuditState::prepare_basis_state(
            2,
            BasisLabel { kind: BasisKind::Computational, index: 0 },
        )
        .unwrap();
        assert_eq!(s.amplitudes(), &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn fourier_preparation() {
        let s = QuditState::prepare_basis_state(
            2,
            BasisLabel { kind: BasisKind::Fourier, index: 0 },
        )
        .unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert!(close(s.amplitudes()[0], Complex64::new(r, 0.0), 1e-12));
        assert!(close(s.amplitudes()[1], Complex64::new(r, 0.0), 1e-12));

        // d=3, fourier 1 -> (1, w, w^2)/sqrt(3)
        let s = QuditState::prepare_basis_state(
            3,
            BasisLabel { kind: BasisKind::Fourier, index: 1 },
        )
        .unwrap();
        let r = 1.0 / 3f64.sqrt();
        for x in 0..3 {
            assert!(close(s.amplitudes()[x], omega_pow(3, x as u64) * r, 1e-12));
        }
    }

    #[test]
    fn preparation_rejects_bad_index() {
        let err = QuditState::prepare_basis_state(
            3,
            BasisLabel { kind: BasisKind::Computational, index: 3 },
        );
        assert_eq!(err.unwrap_err(), SimError::IndexOutOfRange { index: 3, d: 3 });
    }

    #[test]
    fn ghz_examples() {
        let s = QuditState::ghz(2, 2).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert!(close(s.amplitudes()[0], Complex64::new(r, 0.0), 1e-12));
        assert!(close(s.amplitudes()[3], Complex64::new(r, 0.0), 1e-12));
        assert!(close(s.amplitudes()[1], Complex64::new(0.0, 0.0), 1e-12));

        let s = QuditState::ghz(3, 2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        for j in 0..3 {
            assert!(close(s.amplitudes()[j * 4], Complex64::new(r, 0.0), 1e-12));
        }

        // Degenerate GHZ with one qudit is the plus state.
        let s = QuditState::ghz(2, 1).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::new(r_sqrt2(), 0.0), 1e-12));
        assert!(close(s.amplitudes()[1], Complex64::new(r_sqrt2(), 0.0), 1e-12));
    }

    fn r_sqrt2() -> f64 {
        1.0 / 2f64.sqrt()
    }

    #[test]
    fn ghz_cap_enforced() {
        assert!(matches!(
            QuditState::ghz_with_cap(2, 30, 1 << 10),
            Err(SimError::CapExceeded { .. })
        ));
    }

    #[test]
    fn qft_on_basis_states() {
        let mut s = QuditState::zero(2, 1).unwrap();
        s.apply_qft(0).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::new(r_sqrt2(), 0.0), 1e-12));
        assert!(close(s.amplitudes()[1], Complex64::new(r_sqrt2(), 0.0), 1e-12));

        let mut s = QuditState::computational(3, &[1]).unwrap();
        s.apply_qft(0).unwrap();
        let r = 1.0 / 3f64.sqrt();
        for x in 0..3u64 {
            assert!(close(s.amplitudes()[x as usize], omega_pow(3, x) * r, 1e-12));
        }
    }

    #[test]
    fn inverse_qft_undoes_qft() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let mut s = random_state(3, 2, &mut rng);
        let original = s.clone();
        s.apply_qft(1).unwrap();
        s.apply_inverse_qft(1).unwrap();
        for (a, b) in s.amplitudes().iter().zip(original.amplitudes()) {
            assert!(close(*a, *b, 1e-12));
        }

        let mut s = QuditState::computational(3, &[2]).unwrap();
        s.apply_qft(0).unwrap();
        s.apply_inverse_qft(0).unwrap();
        assert!(close(s.amplitudes()[2], Complex64::new(1.0, 0.0), 1e-12));
    }

    #[test]
    fn qft_matrix_product_is_identity() {
        // Oracle: direct matrix product F * F^{-1} compared to I entrywise.
        for d in [2usize, 3, 5, 7] {
            let f = qft_matrix(d);
            let finv = inverse_qft_matrix(d);
            for r in 0..d {
                for c in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for m in 0..d {
                        acc += f[r * d + m] * finv[m * d + c];
                    }
                    let expect = if r == c { 1.0 } else { 0.0 };
                    assert!(close(acc, Complex64::new(expect, 0.0), 1e-12), "d={d}");
                }
            }
        }
    }

    #[test]
    fn pauli_examples() {
        // X gate: U_{1,0}|0> = |1> at d=3.
        let mut s = QuditState::computational(3, &[0]).unwrap();
        s.apply_pauli(0, 1, 0).unwrap();
        assert!(close(s.amplitudes()[1], Complex64::new(1.0, 0.0), 1e-12));

        // Z gate: U_{0,1}|2> = w^2 |2> at d=3.
        let mut s = QuditState::computational(3, &[2]).unwrap();
        s.apply_pauli(0, 0, 1).unwrap();
        assert!(close(s.amplitudes()[2], omega_pow(3, 2), 1e-12));

        // U_{0,0} is the identity.
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let mut s = random_state(5, 1, &mut rng);
        let before = s.clone();
        s.apply_pauli(0, 0, 0).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!(close(*a, *b, 1e-15));
        }
    }

    #[test]
    fn pauli_shift_composition() {
        // U_{a,0} twice equals U_{2a mod d, 0}.
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for d in [2usize, 3, 5] {
            for alpha in 0..d as u64 {
                let s0 = random_state(d, 2, &mut rng);
                let mut twice = s0.clone();
                twice.apply_pauli(1, alpha, 0).unwrap();
                twice.apply_pauli(1, alpha, 0).unwrap();
                let mut once = s0;
                once.apply_pauli(1, (2 * alpha) % d as u64, 0).unwrap();
                for (a, b) in twice.amplitudes().iter().zip(once.amplitudes()) {
                    assert!(close(*a, *b, 1e-12));
                }
            }
        }
    }

    #[test]
    fn pauli_rejects_out_of_range_parameters() {
        let mut s = QuditState::zero(3, 1).unwrap();
        assert!(matches!(
            s.apply_pauli(0, 3, 0),
            Err(SimError::PauliParamOutOfRange { value: 3, d: 3 })
        ));
        assert!(matches!(
            s.apply_pauli(0, 0, 5),
            Err(SimError::PauliParamOutOfRange { value: 5, d: 3 })
        ));
        assert!(matches!(
            s.apply_qft(1),
            Err(SimError::WireOutOfRange { wire: 1, k: 1 })
        ));
    }

    #[test]
    fn ghz_measurement_correlates() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let mut zeros = 0usize;
        for _ in 0..400 {
            let mut s = QuditState::ghz(2, 2).unwrap();
            let first = s.measure_computational(0, &mut rng).unwrap();
            let second = s.measure_computational(1, &mut rng).unwrap();
            assert_eq!(first.value, second.value);
            if first.value == 0 {
                zeros += 1;
            }
        }
        // p = 1/2, 400 trials, 3 sigma = 30.
        assert!((zeros as i64 - 200).abs() < 30, "zeros={zeros}");
    }

    #[test]
    fn eigenstate_measurement_is_deterministic() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let mut s = QuditState::computational(5, &[1]).unwrap();
        let out = s.measure_computational(0, &mut rng).unwrap();
        assert_eq!(out.value, 1);
        assert!(close(s.amplitudes()[1], Complex64::new(1.0, 0.0), 1e-12));
    }

    #[test]
    fn born_rule_statistics_for_fourier_state() {
        // Fourier state measured computationally: uniform over Z_d.
        let d = 5;
        let trials = 10_000usize;
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let mut counts = vec![0usize; d];
        for _ in 0..trials {
            let mut s = QuditState::prepare_basis_state(
                d,
                BasisLabel { kind: BasisKind::Fourier, index: 2 },
            )
            .unwrap();
            let out = s.measure_computational(0, &mut rng).unwrap();
            counts[out.value as usize] += 1;
        }
        let p = 1.0 / d as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        for (v, &c) in counts.iter().enumerate() {
            let freq = c as f64 / trials as f64;
            assert!((freq - p).abs() < 3.0 * sigma, "value {v} freq {freq}");
        }
    }

    #[test]
    fn correct_basis_measurement_is_deterministic() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for d in [2usize, 3, 5] {
            for index in 0..d as u64 {
                let mut s = QuditState::prepare_basis_state(
                    d,
                    BasisLabel { kind: BasisKind::Fourier, index },
                )
                .unwrap();
                let out = s.measure_in_basis(0, BasisKind::Fourier, &mut rng).unwrap();
                assert_eq!(out.value, index);
                assert_eq!(out.basis, BasisKind::Fourier);

                let mut s = QuditState::prepare_basis_state(
                    d,
                    BasisLabel { kind: BasisKind::Computational, index },
                )
                .unwrap();
                let out = s
                    .measure_in_basis(0, BasisKind::Computational, &mut rng)
                    .unwrap();
                assert_eq!(out.value, index);
            }
        }
    }

    #[test]
    fn wrong_basis_measurement_is_uniform() {
        // |j> measured in the fourier basis: |<j|QFT|x>|^2 = 1/d for all x.
        let d = 3;
        let trials = 10_000usize;
        let mut rng = ChaCha12Rng::seed_from_u64(37);
        let mut counts = vec![0usize; d];
        for _ in 0..trials {
            let mut s = QuditState::computational(d, &[1]).unwrap();
            let out = s.measure_in_basis(0, BasisKind::Fourier, &mut rng).unwrap();
            counts[out.value as usize] += 1;
        }
        let p = 1.0 / d as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        for &c in &counts {
            assert!((c as f64 / trials as f64 - p).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn fourier_sum_identity_on_ghz() {
        // QFT on every wire of GHZ(d, t): support is exactly {sum of digits = 0},
        // each surviving amplitude has magnitude d^{-(t-1)/2}.
        for d in [2usize, 3, 5] {
            for t in [2usize, 3] {
                let mut s = QuditState::ghz(d, t).unwrap();
                for w in 0..t {
                    s.apply_qft(w).unwrap();
                }
                let expected = (d as f64).powf(-((t - 1) as f64) / 2.0);
                for (index, amp) in s.amplitudes().iter().enumerate() {
                    let digit_sum: u64 = (0..t).map(|w| s.digit_at(index, w)).sum();
                    if digit_sum.is_multiple_of(d as u64) {
                        assert!(
                            (amp.norm() - expected).abs() < 1e-10,
                            "d={d} t={t} index={index}"
                        );
                    } else {
                        assert!(amp.norm() < 1e-10, "d={d} t={t} index={index}");
                    }
                }
            }
        }
    }

    #[test]
    fn csv_dump_format() {
        let s = QuditState::ghz(2, 2).unwrap();
        let mut buf = Vec::new();
        s.dump_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "digits,re,im");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0-0,7.07106781186547"), "{}", lines[1]);
        assert!(lines[2].starts_with("0-1,0.0000000000000000e0,"), "{}", lines[2]);
    }

    pub(crate) fn random_state(d: usize, k: usize, rng: &mut impl Rng) -> QuditState {
        let mut s = QuditState::zero(d, k).unwrap();
        let mut norm_sqr = 0.0;
        for a in s.amps.iter_mut() {
            *a = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            norm_sqr += a.norm_sqr();
        }
        let scale = Complex64::new(1.0 / norm_sqr.sqrt(), 0.0);
        for a in s.amps.iter_mut() {
            *a *= scale;
        }
        s
    }

    proptest! {
        /// Normalization survives arbitrary circuits of up to 50 gates.
        #[test]
        fn random_circuits_preserve_norm(
            seed in any::<u64>(),
            d in 2usize..=5,
            k in 1usize..=3,
            gates in proptest::collection::vec((0u8..3, 0usize..3, 0u64..5, 0u64..5), 0..50),
        ) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut s = random_state(d, k, &mut rng);
            for (kind, wire, alpha, beta) in gates {
                let wire = wire % k;
                match kind {
                    0 => s.apply_qft(wire).unwrap(),
                    1 => s.apply_inverse_qft(wire).unwrap(),
                    _ => s
                        .apply_pauli(wire, alpha % d as u64, beta % d as u64)
                        .unwrap(),
                }
            }
            prop_assert!((s.norm() - 1.0).abs() < 1e-9);
        }

        /// Measurement preserves normalization and collapses the wire.
        #[test]
        fn measurement_preserves_norm(seed in any::<u64>(), d in 2usize..=5, k in 1usize..=3) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut s = random_state(d, k, &mut rng);
            let wire = (seed as usize) % k;
            let out = s.measure_computational(wire, &mut rng).unwrap();
            prop_assert!((s.norm() - 1.0).abs() < 1e-9);
            let probs = s.probabilities(wire).unwrap();
            prop_assert!((probs[out.value as usize] - 1.0).abs() < 1e-9);
        }
    }
}
