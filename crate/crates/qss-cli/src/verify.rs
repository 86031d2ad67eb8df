//! Simulator invariant suite behind the `verify-gates` subcommand.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use qss_core::qudit::{
    inverse_qft_matrix, qft_matrix, BasisKind, BasisLabel, QuditState,
    DEFAULT_AMPLITUDE_CAP,
};

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn matrix_max_dev_from_identity(product: &[Complex64], d: usize) -> f64 {
    let mut max = 0.0f64;
    for r in 0..d {
        for c in 0..d {
            let expect = if r == c { 1.0 } else { 0.0 };
            max = max.max((product[r * d + c] - Complex64::new(expect, 0.0)).norm());
        }
    }
    max
}

fn mat_mul(a: &[Complex64], b: &[Complex64], d: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); d * d];
    for r in 0..d {
        for c in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..d {
                acc += a[r * d + m] * b[m * d + c];
            }
            out[r * d + c] = acc;
        }
    }
    out
}

fn random_state(d: usize, k: usize, rng: &mut impl Rng) -> QuditState {
    // Random gates on |0..0> give a generic normalized state.
    let mut s = QuditState::zero(d, k).expect("within cap");
    for _ in 0..8 {
        let wire = rng.random_range(0..k);
        match rng.random_range(0..3u8) {
            0 => s.apply_qft(wire).unwrap(),
            1 => s.apply_inverse_qft(wire).unwrap(),
            _ => {
                let alpha = rng.random_range(0..d as u64);
                let beta = rng.random_range(0..d as u64);
                s.apply_pauli(wire, alpha, beta).unwrap()
            }
        }
    }
    s
}

/// Runs every simulator invariant for one dimension. All randomness flows
/// from `seed`.
pub fn run_gate_checks(d: usize, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    // Unitarity: F^dagger F = I.
    let f = qft_matrix(d);
    let mut f_dagger = vec![Complex64::new(0.0, 0.0); d * d];
    for r in 0..d {
        for c in 0..d {
            f_dagger[r * d + c] = f[c * d + r].conj();
        }
    }
    let dev = matrix_max_dev_from_identity(&mat_mul(&f_dagger, &f, d), d);
    checks.push(Check {
        name: format!("qft_unitarity(d={d})"),
        pass: dev < 1e-12,
        detail: format!("max |F^H F - I| = {dev:.3e}"),
    });

    // Inverse: F * F^{-1} = I.
    let dev = matrix_max_dev_from_identity(&mat_mul(&f, &inverse_qft_matrix(d), d), d);
    checks.push(Check {
        name: format!("qft_inverse_product(d={d})"),
        pass: dev < 1e-12,
        detail: format!("max |F F^-1 - I| = {dev:.3e}"),
    });

    // Round trip on a generic state.
    let mut s = random_state(d, 2, &mut rng);
    let original = s.clone();
    s.apply_qft(0).unwrap();
    s.apply_inverse_qft(0).unwrap();
    let dev = s
        .amplitudes()
        .iter()
        .zip(original.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    checks.push(Check {
        name: format!("qft_roundtrip(d={d})"),
        pass: dev < 1e-12,
        detail: format!("max amplitude deviation = {dev:.3e}"),
    });

    // Shift composition: U_{a,0} twice = U_{2a,0}.
    let mut worst = 0.0f64;
    for alpha in 0..d as u64 {
        let s0 = random_state(d, 1, &mut rng);
        let mut twice = s0.clone();
        twice.apply_pauli(0, alpha, 0).unwrap();
        twice.apply_pauli(0, alpha, 0).unwrap();
        let mut once = s0;
        once.apply_pauli(0, (2 * alpha) % d as u64, 0).unwrap();
        let dev = twice
            .amplitudes()
            .iter()
            .zip(once.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        worst = worst.max(dev);
    }
    checks.push(Check {
        name: format!("pauli_shift_composition(d={d})"),
        pass: worst < 1e-12,
        detail: format!("max amplitude deviation = {worst:.3e}"),
    });

    // Post-QFT GHZ support: digit sums congruent to zero, flat magnitudes.
    for t in [2usize, 3] {
        if d.pow(t as u32) > DEFAULT_AMPLITUDE_CAP {
            continue;
        }
        let mut s = QuditState::ghz(d, t).unwrap();
        for w in 0..t {
            s.apply_qft(w).unwrap();
        }
        let expected = (d as f64).powf(-((t - 1) as f64) / 2.0);
        let mut ok = true;
        let mut worst = 0.0f64;
        for (index, amp) in s.amplitudes().iter().enumerate() {
            let digit_sum: u64 = (0..t).map(|w| s.digit_at(index, w)).sum();
            let dev = if digit_sum.is_multiple_of(d as u64) {
                (amp.norm() - expected).abs()
            } else {
                amp.norm()
            };
            worst = worst.max(dev);
            ok &= dev < 1e-10;
        }
        checks.push(Check {
            name: format!("ghz_fourier_support(d={d},t={t})"),
            pass: ok,
            detail: format!("max deviation = {worst:.3e}"),
        });
    }

    // Normalization drift over a 50-gate random circuit.
    let mut s = random_state(d, 2, &mut rng);
    for _ in 0..50 {
        let wire = rng.random_range(0..2);
        match rng.random_range(0..3u8) {
            0 => s.apply_qft(wire).unwrap(),
            1 => s.apply_inverse_qft(wire).unwrap(),
            _ => {
                let alpha = rng.random_range(0..d as u64);
                let beta = rng.random_range(0..d as u64);
                s.apply_pauli(wire, alpha, beta).unwrap()
            }
        }
    }
    let drift = (s.norm() - 1.0).abs();
    checks.push(Check {
        name: format!("normalization_50_gates(d={d})"),
        pass: drift < 1e-9,
        detail: format!("|norm - 1| = {drift:.3e}"),
    });

    // Correct-basis measurement reproduces the prepared index.
    let mut ok = true;
    for kind in [BasisKind::Computational, BasisKind::Fourier] {
        for index in 0..d as u64 {
            let mut s = QuditState::prepare_basis_state(d, BasisLabel { kind, index }).unwrap();
            let out = s.measure_in_basis(0, kind, &mut rng).unwrap();
            ok &= out.value == index;
        }
    }
    checks.push(Check {
        name: format!("correct_basis_determinism(d={d})"),
        pass: ok,
        detail: "all prepared indices reproduced".to_string(),
    });

    checks
}
