//! Shamir (t,n) threshold sharing over Z_d.
//!
//! The dealer hides the secret as the constant term of a random degree-(t-1)
//! polynomial, hands participant i the evaluation f(x_i), and any t
//! participants recombine with Lagrange coefficients. The per-participant
//! product y_i * lambda_i is the participant's *shadow*: the shadows of a
//! t-subset sum to the secret, which is exactly the form the quantum
//! reconstruction phase consumes.

use rand::Rng;
use thiserror::Error;

use crate::field::{FieldElement, FieldError, PrimeModulus};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShamirError {
    #[error("threshold must be at least 2, got {0}")]
    InvalidThreshold(usize),
    #[error("polynomial and argument use different moduli")]
    ModulusMismatch,
    #[error("evaluation points must be pairwise distinct")]
    DuplicateX,
    #[error("evaluation points must be nonzero")]
    ZeroX,
    #[error("at most {max} participants fit in Z_{d}, got {n}")]
    TooManyParticipants { n: usize, max: usize, d: u64 },
    #[error("share x-value is not a member of the reconstruction subset")]
    ShareNotInSubset,
    #[error("index {index} out of range for subset of size {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("reconstruction requires at least one share")]
    EmptySubset,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Dealer polynomial f(x) = a_0 + a_1 x + ... + a_{t-1} x^{t-1} over Z_d.
///
/// The constant term is the secret; the coefficient count is the threshold t.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<FieldElement>,
}

impl Polynomial {
    /// Requires at least two coefficients (t >= 2) with a uniform modulus.
    pub fn new(coeffs: Vec<FieldElement>) -> Result<Self, ShamirError> {
        if coeffs.len() < 2 {
            return Err(ShamirError::InvalidThreshold(coeffs.len()));
        }
        let d = coeffs[0].modulus();
        if coeffs.iter().any(|c| c.modulus() != d) {
            return Err(ShamirError::ModulusMismatch);
        }
        Ok(Polynomial { coeffs })
    }

    pub fn secret(&self) -> FieldElement {
        self.coeffs[0]
    }

    pub fn threshold(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.coeffs[0].modulus()
    }

    /// Horner evaluation of f at x, mod d.
    pub fn evaluate(&self, x: FieldElement) -> Result<FieldElement, ShamirError> {
        if x.modulus() != self.modulus() {
            return Err(ShamirError::ModulusMismatch);
        }
        let mut acc = self.modulus().element(0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        Ok(acc)
    }
}

/// Samples f with constant term `a0` and t-1 uniform coefficients from Z_d.
pub fn sample_polynomial(
    a0: FieldElement,
    t: usize,
    rng: &mut impl Rng,
) -> Result<Polynomial, ShamirError> {
    if t < 2 {
        return Err(ShamirError::InvalidThreshold(t));
    }
    let d = a0.modulus();
    let mut coeffs = Vec::with_capacity(t);
    coeffs.push(a0);
    for _ in 1..t {
        coeffs.push(d.element(rng.random_range(0..d.get())));
    }
    Polynomial::new(coeffs)
}

/// A participant's share: the public point x and private value y = f(x).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Share {
    pub x: FieldElement,
    pub y: FieldElement,
}

/// Lagrange-weighted share s = y * prod_{j != i} x_j / (x_j - x_i) mod d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shadow {
    /// Position of the owning share inside the reconstruction subset.
    pub participant_index: usize,
    pub s: FieldElement,
}

fn check_points(xs: &[FieldElement], d: PrimeModulus) -> Result<(), ShamirError> {
    if xs.iter().any(|x| x.modulus() != d) {
        return Err(ShamirError::ModulusMismatch);
    }
    if xs.iter().any(|x| x.is_zero()) {
        return Err(ShamirError::ZeroX);
    }
    for (i, a) in xs.iter().enumerate() {
        if xs[i + 1..].contains(a) {
            return Err(ShamirError::DuplicateX);
        }
    }
    Ok(())
}

/// Evaluates f at every point of `xs`, producing one share per participant.
pub fn distribute_shares(
    p: &Polynomial,
    xs: &[FieldElement],
) -> Result<Vec<Share>, ShamirError> {
    let d = p.modulus();
    check_points(xs, d)?;
    let max = (d.get() - 1) as usize;
    if xs.len() > max {
        return Err(ShamirError::TooManyParticipants {
            n: xs.len(),
            max,
            d: d.get(),
        });
    }
    xs.iter()
        .map(|&x| Ok(Share { x, y: p.evaluate(x)? }))
        .collect()
}

/// Lagrange coefficient at zero for position i of the subset:
/// prod_{j != i} x_j * (x_j - x_i)^{-1} mod d. Empty product for |xs| = 1.
pub fn lagrange_coefficient(
    i: usize,
    xs: &[FieldElement],
) -> Result<FieldElement, ShamirError> {
    if xs.is_empty() {
        return Err(ShamirError::EmptySubset);
    }
    if i >= xs.len() {
        return Err(ShamirError::IndexOutOfRange { index: i, len: xs.len() });
    }
    let d = xs[0].modulus();
    check_points(xs, d)?;
    let mut acc = d.element(1);
    for (j, &xj) in xs.iter().enumerate() {
        if j != i {
            acc = acc * xj * (xj - xs[i]).inverse()?;
        }
    }
    Ok(acc)
}

/// Weights a share by its Lagrange coefficient within `xs`.
pub fn compute_shadow(share: &Share, xs: &[FieldElement]) -> Result<Shadow, ShamirError> {
    let i = xs
        .iter()
        .position(|&x| x == share.x)
        .ok_or(ShamirError::ShareNotInSubset)?;
    let lambda = lagrange_coefficient(i, xs)?;
    Ok(Shadow {
        participant_index: i,
        s: share.y * lambda,
    })
}

/// Recovers the secret a_0 = sum_i y_i * lambda_i mod d from a t-subset.
///
/// Equals the sum of the subset's shadows. A singleton subset degenerates to
/// that share's y (constant polynomial).
pub fn reconstruct_classical(shares: &[Share]) -> Result<FieldElement, ShamirError> {
    if shares.is_empty() {
        return Err(ShamirError::EmptySubset);
    }
    let d = shares[0].x.modulus();
    let xs: Vec<FieldElement> = shares.iter().map(|s| s.x).collect();
    check_points(&xs, d)?;
    let mut acc = d.element(0);
    for (i, share) in shares.iter().enumerate() {
        if share.y.modulus() != d {
            return Err(ShamirError::ModulusMismatch);
        }
        acc = acc + share.y * lagrange_coefficient(i, &xs)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeModulus;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn fe(v: u64, d: u64) -> FieldElement {
        PrimeModulus::new(d).unwrap().element(v)
    }

    fn poly(coeffs: &[u64], d: u64) -> Polynomial {
        Polynomial::new(coeffs.iter().map(|&c| fe(c, d)).collect()).unwrap()
    }

    #[test]
    fn sample_forces_constant_term() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let p = sample_polynomial(fe(2, 5), 2, &mut rng).unwrap();
        assert_eq!(p.secret().value(), 2);
        assert_eq!(p.threshold(), 2);
        let p = sample_polynomial(fe(0, 5), 3, &mut rng).unwrap();
        assert_eq!(p.secret().value(), 0);
        assert_eq!(p.threshold(), 3);
    }

    #[test]
    fn sample_rejects_degenerate_threshold() {
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        assert_eq!(
            sample_polynomial(fe(1, 5), 1, &mut rng),
            Err(ShamirError::InvalidThreshold(1))
        );
    }

    #[test]
    fn sampled_coefficients_are_uniform() {
        // Chi-square style check: each value of Z_5 appears with frequency
        // 0.2 +/- 0.02 over 10^4 draws of the free coefficient.
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let mut counts = [0usize; 5];
        for _ in 0..10_000 {
            let p = sample_polynomial(fe(0, 5), 2, &mut rng).unwrap();
            counts[p.coefficients()[1].value() as usize] += 1;
        }
        for (v, &c) in counts.iter().enumerate() {
            let freq = c as f64 / 10_000.0;
            assert!((freq - 0.2).abs() < 0.02, "value {v} frequency {freq}");
        }
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(poly(&[2, 3], 5).evaluate(fe(1, 5)).unwrap().value(), 0);
        assert_eq!(poly(&[2, 3], 5).evaluate(fe(0, 5)).unwrap().value(), 2);
        // 1 + 4 + 12 = 17 = 3 mod 7
        assert_eq!(poly(&[1, 2, 3], 7).evaluate(fe(2, 7)).unwrap().value(), 3);
    }

    #[test]
    fn evaluate_rejects_modulus_mismatch() {
        assert_eq!(
            poly(&[2, 3], 5).evaluate(fe(1, 7)),
            Err(ShamirError::ModulusMismatch)
        );
    }

    #[test]
    fn distribute_evaluates_at_each_point() {
        let shares =
            distribute_shares(&poly(&[2, 3], 5), &[fe(1, 5), fe(2, 5), fe(3, 5)]).unwrap();
        let ys: Vec<u64> = shares.iter().map(|s| s.y.value()).collect();
        assert_eq!(ys, vec![0, 3, 1]);
    }

    #[test]
    fn degenerate_polynomial_rejected() {
        assert_eq!(
            Polynomial::new(vec![fe(4, 5)]),
            Err(ShamirError::InvalidThreshold(1))
        );
    }

    #[test]
    fn distribute_input_validation() {
        let p = poly(&[2, 3], 5);
        assert_eq!(
            distribute_shares(&p, &[fe(1, 5), fe(1, 5)]),
            Err(ShamirError::DuplicateX)
        );
        assert_eq!(
            distribute_shares(&p, &[fe(0, 5), fe(1, 5)]),
            Err(ShamirError::ZeroX)
        );
        let too_many: Vec<FieldElement> = (1..=4).map(|v| fe(v, 5)).collect();
        assert!(distribute_shares(&p, &too_many).is_ok());
        // n > d - 1 is impossible with distinct nonzero points, so the
        // cardinality check fires before the duplicate check.
        let p3 = poly(&[1, 1], 3);
        let xs: Vec<FieldElement> = vec![fe(1, 3), fe(2, 3), fe(1, 3)];
        assert_eq!(
            distribute_shares(&p3, &xs),
            Err(ShamirError::DuplicateX)
        );
    }

    #[test]
    fn lagrange_examples() {
        let xs = [fe(1, 5), fe(2, 5)];
        assert_eq!(lagrange_coefficient(0, &xs).unwrap().value(), 2);
        assert_eq!(lagrange_coefficient(1, &xs).unwrap().value(), 4);
        // Singleton: empty product.
        assert_eq!(lagrange_coefficient(0, &[fe(3, 5)]).unwrap().value(), 1);
    }

    #[test]
    fn shadow_examples() {
        let xs = [fe(1, 5), fe(2, 5)];
        let s0 = compute_shadow(&Share { x: fe(1, 5), y: fe(0, 5) }, &xs).unwrap();
        assert_eq!(s0.s.value(), 0);
        assert_eq!(s0.participant_index, 0);
        let s1 = compute_shadow(&Share { x: fe(2, 5), y: fe(3, 5) }, &xs).unwrap();
        assert_eq!(s1.s.value(), 2); // 3 * 4 = 12 = 2 mod 5
        assert_eq!(
            compute_shadow(&Share { x: fe(3, 5), y: fe(1, 5) }, &xs),
            Err(ShamirError::ShareNotInSubset)
        );
    }

    #[test]
    fn reconstruct_examples() {
        let shares = [
            Share { x: fe(1, 5), y: fe(0, 5) },
            Share { x: fe(2, 5), y: fe(3, 5) },
        ];
        assert_eq!(reconstruct_classical(&shares).unwrap().value(), 2);
        // Degenerate singleton: the share's y.
        let single = [Share { x: fe(2, 5), y: fe(3, 5) }];
        assert_eq!(reconstruct_classical(&single).unwrap().value(), 3);
    }

    #[test]
    fn shadows_sum_to_reconstruction() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let d = PrimeModulus::new(7).unwrap();
        let p = sample_polynomial(d.element(5), 3, &mut rng).unwrap();
        let xs: Vec<FieldElement> = [2u64, 4, 6].iter().map(|&v| d.element(v)).collect();
        let shares = distribute_shares(&p, &xs).unwrap();
        let mut sum = d.element(0);
        for share in &shares {
            sum = sum + compute_shadow(share, &xs).unwrap().s;
        }
        assert_eq!(sum, reconstruct_classical(&shares).unwrap());
        assert_eq!(sum.value(), 5);
    }

    use crate::testutil::subsets;

    /// Every t-subset of every small configuration reconstructs the secret.
    #[test]
    fn reconstruction_exhaustive_small_systems() {
        for d in [2u64, 3, 5, 7, 11] {
            let m = PrimeModulus::new(d).unwrap();
            for t in [2usize, 3] {
                let n_max = std::cmp::min(5, (d - 1) as usize);
                for n in t..=n_max {
                    for secret in 0..d {
                        let mut rng = ChaCha12Rng::seed_from_u64(d * 1000 + secret);
                        let p = sample_polynomial(m.element(secret), t, &mut rng).unwrap();
                        let xs: Vec<FieldElement> =
                            (1..=n as u64).map(|v| m.element(v)).collect();
                        let shares = distribute_shares(&p, &xs).unwrap();
                        for subset in subsets(n, t) {
                            let chosen: Vec<Share> =
                                subset.iter().map(|&i| shares[i]).collect();
                            let got = reconstruct_classical(&chosen).unwrap();
                            assert_eq!(got.value(), secret, "d={d} t={t} n={n}");
                        }
                    }
                }
            }
        }
    }

    /// Perfect secrecy at t-1 shares: for d=5, t=2, n=3, any single share is
    /// consistent with exactly one polynomial per candidate secret.
    #[test]
    fn single_share_reveals_nothing() {
        let d = PrimeModulus::new(5).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let p = sample_polynomial(d.element(4), 2, &mut rng).unwrap();
        let xs: Vec<FieldElement> = (1..=3u64).map(|v| d.element(v)).collect();
        let shares = distribute_shares(&p, &xs).unwrap();
        for share in &shares {
            for candidate in 0..5u64 {
                // Enumerate all d^(t-1) polynomials with this constant term.
                let consistent = (0..5u64)
                    .filter(|&a1| {
                        let q = poly(&[candidate, a1], 5);
                        q.evaluate(share.x).unwrap() == share.y
                    })
                    .count();
                assert_eq!(consistent, 1, "candidate {candidate} at x={}", share.x);
            }
        }
    }

}
