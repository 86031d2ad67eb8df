//! PyO3 bindings for the secret sharing simulation lab.
//!
//! Python drives the same code paths as the `qss` CLI: exact field/Shamir
//! arithmetic, the qudit simulator, full protocol runs, attack batches and
//! the constraint nullspace report. Structured results (runs, summaries,
//! reports) are returned as JSON strings; parse them with `json.loads`.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use qss_core::adversary::{self, AttackModel};
use qss_core::field::{self, FieldElement, PrimeModulus};
use qss_core::protocol::{self, ProtocolConfig};
use qss_core::qudit::{BasisKind, BasisLabel, QuditState as CoreState};
use qss_core::shamir;
use qss_core::trials::{self, TrialPlan};

fn value_error<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_error<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn parse_basis(kind: &str) -> PyResult<BasisKind> {
    match kind {
        "computational" => Ok(BasisKind::Computational),
        "fourier" => Ok(BasisKind::Fourier),
        other => Err(PyValueError::new_err(format!(
            "unknown basis {other:?}; use \"computational\" or \"fourier\""
        ))),
    }
}

fn prime(d: u64) -> PyResult<PrimeModulus> {
    PrimeModulus::new(d).map_err(value_error)
}

/// Deterministic random source; every stochastic method takes one.
#[pyclass]
struct Rng {
    inner: ChaCha12Rng,
}

#[pymethods]
impl Rng {
    #[new]
    fn new(seed: u64) -> Self {
        Rng { inner: ChaCha12Rng::seed_from_u64(seed) }
    }

    fn __repr__(&self) -> String {
        "Rng(ChaCha12)".to_string()
    }
}

/// Dense state of k qudits of dimension d.
#[pyclass]
struct QuditState {
    inner: CoreState,
}

#[pymethods]
impl QuditState {
    /// |0...0> of k qudits.
    #[new]
    fn new(d: usize, k: usize) -> PyResult<Self> {
        Ok(QuditState { inner: CoreState::zero(d, k).map_err(value_error)? })
    }

    /// GHZ state (1/sqrt(d)) sum_j |j...j>.
    #[staticmethod]
    fn ghz(d: usize, k: usize) -> PyResult<Self> {
        Ok(QuditState { inner: CoreState::ghz(d, k).map_err(value_error)? })
    }

    /// Computational basis state |digits[0] digits[1] ...>.
    #[staticmethod]
    fn computational(d: usize, digits: Vec<u64>) -> PyResult<Self> {
        Ok(QuditState { inner: CoreState::computational(d, &digits).map_err(value_error)? })
    }

    /// Single qudit prepared in a labeled basis state: |i> or QFT|i>.
    #[staticmethod]
    fn basis(d: usize, kind: &str, index: u64) -> PyResult<Self> {
        let label = BasisLabel { kind: parse_basis(kind)?, index };
        Ok(QuditState { inner: CoreState::prepare_basis_state(d, label).map_err(value_error)? })
    }

    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn num_qudits(&self) -> usize {
        self.inner.num_qudits()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    /// Born marginal of one wire in the computational basis.
    fn probabilities(&self, wire: usize) -> PyResult<Vec<f64>> {
        self.inner.probabilities(wire).map_err(value_error)
    }

    fn apply_qft(&mut self, wire: usize) -> PyResult<()> {
        self.inner.apply_qft(wire).map_err(value_error)
    }

    fn apply_inverse_qft(&mut self, wire: usize) -> PyResult<()> {
        self.inner.apply_inverse_qft(wire).map_err(value_error)
    }

    /// Generalized Pauli U_{alpha,beta}: |x> -> omega^(beta x) |x+alpha>.
    fn apply_pauli(&mut self, wire: usize, alpha: u64, beta: u64) -> PyResult<()> {
        self.inner.apply_pauli(wire, alpha, beta).map_err(value_error)
    }

    /// Measures one wire in the computational basis; collapses in place and
    /// returns the outcome value.
    fn measure_computational(&mut self, wire: usize, rng: &mut Rng) -> PyResult<u64> {
        self.inner
            .measure_computational(wire, &mut rng.inner)
            .map(|o| o.value)
            .map_err(runtime_error)
    }

    /// Measures one wire in "computational" or "fourier" basis.
    fn measure_in_basis(&mut self, wire: usize, kind: &str, rng: &mut Rng) -> PyResult<u64> {
        self.inner
            .measure_in_basis(wire, parse_basis(kind)?, &mut rng.inner)
            .map(|o| o.value)
            .map_err(runtime_error)
    }

    /// Debug dump, one CSV row per basis state.
    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.dump_csv(&mut buf).map_err(runtime_error)?;
        String::from_utf8(buf).map_err(runtime_error)
    }

    fn __repr__(&self) -> String {
        format!(
            "QuditState(d={}, k={}, norm={:.6})",
            self.inner.dimension(),
            self.inner.num_qudits(),
            self.inner.norm()
        )
    }
}

/// Smallest prime p with n < p <= 2n.
#[pyfunction]
fn select_prime(n: u64) -> PyResult<u64> {
    field::select_prime(n).map(|p| p.get()).map_err(value_error)
}

/// Multiplicative inverse of a mod d.
#[pyfunction]
fn mod_inverse(a: u64, d: u64) -> PyResult<u64> {
    prime(d)?.element(a).inverse().map(|v| v.value()).map_err(value_error)
}

/// Samples a degree-(t-1) polynomial with constant term `secret` and returns
/// the n shares [(x, y)] at x = 1..n.
#[pyfunction]
fn share_secret(d: u64, t: usize, n: usize, secret: u64, seed: u64) -> PyResult<Vec<(u64, u64)>> {
    let modulus = prime(d)?;
    if secret >= d {
        return Err(PyValueError::new_err(format!("secret {secret} is not in Z_{d}")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let polynomial =
        shamir::sample_polynomial(modulus.element(secret), t, &mut rng).map_err(value_error)?;
    let points: Vec<FieldElement> = (1..=n as u64).map(|v| modulus.element(v)).collect();
    let shares = shamir::distribute_shares(&polynomial, &points).map_err(value_error)?;
    Ok(shares.iter().map(|s| (s.x.value(), s.y.value())).collect())
}

/// Lagrange reconstruction of the secret from t shares [(x, y)].
#[pyfunction]
fn reconstruct(d: u64, shares: Vec<(u64, u64)>) -> PyResult<u64> {
    let modulus = prime(d)?;
    let shares: Vec<shamir::Share> = shares
        .iter()
        .map(|&(x, y)| shamir::Share { x: modulus.element(x), y: modulus.element(y) })
        .collect();
    shamir::reconstruct_classical(&shares).map(|v| v.value()).map_err(value_error)
}

/// Lagrange coefficient at zero for position i of the subset xs.
#[pyfunction]
fn lagrange_coefficient(d: u64, i: usize, xs: Vec<u64>) -> PyResult<u64> {
    let modulus = prime(d)?;
    let xs: Vec<FieldElement> = xs.iter().map(|&v| modulus.element(v)).collect();
    shamir::lagrange_coefficient(i, &xs).map(|v| v.value()).map_err(value_error)
}

/// SHA-256 commitment to (d, secret), hex-encoded.
#[pyfunction]
fn commit_secret_hex(d: u64, secret: u64) -> PyResult<String> {
    let digest = protocol::commit_secret(prime(d)?.element(secret));
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn build_config(
    n: usize,
    t: usize,
    d: Option<u64>,
    m: usize,
    secret: u64,
    error_threshold: f64,
    seed: u64,
) -> PyResult<ProtocolConfig> {
    ProtocolConfig::new(n, t, d, m, secret, error_threshold, seed).map_err(value_error)
}

/// One honest protocol run. Returns the run document (config, subset,
/// result, transcript) as a JSON string.
#[pyfunction]
#[pyo3(signature = (n, t, secret, d=None, m=4, seed=0, error_threshold=0.0, subset=None))]
#[allow(clippy::too_many_arguments)]
fn run_protocol_json(
    n: usize,
    t: usize,
    secret: u64,
    d: Option<u64>,
    m: usize,
    seed: u64,
    error_threshold: f64,
    subset: Option<Vec<usize>>,
) -> PyResult<String> {
    let config = build_config(n, t, d, m, secret, error_threshold, seed)?;
    let subset = subset.unwrap_or_else(|| (1..=t).collect());
    config.validate_subset(&subset).map_err(value_error)?;
    let (transcript, result) = protocol::run_protocol(&config, &subset).map_err(runtime_error)?;
    let doc = serde_json::json!({
        "schema": "qss-run/1",
        "config": config,
        "subset": subset,
        "result": result,
        "transcript": transcript,
    });
    serde_json::to_string(&doc).map_err(runtime_error)
}

/// Monte Carlo attack batch. `model` is one of "none", "intercept-resend",
/// "dishonest-measure", "forged-result", "song-baseline". Returns the
/// StatsSummary as a JSON string.
#[pyfunction]
#[pyo3(signature = (model, n, t, secret, trials, d=None, m=4, seed=0, error_threshold=0.0, subset=None, target=None, forged=None))]
#[allow(clippy::too_many_arguments)]
fn attack_trials_json(
    model: &str,
    n: usize,
    t: usize,
    secret: u64,
    trials: u64,
    d: Option<u64>,
    m: usize,
    seed: u64,
    error_threshold: f64,
    subset: Option<Vec<usize>>,
    target: Option<usize>,
    forged: Option<u64>,
) -> PyResult<String> {
    let config = build_config(n, t, d, m, secret, error_threshold, seed)?;
    let subset = subset.unwrap_or_else(|| (1..=t).collect());
    config.validate_subset(&subset).map_err(value_error)?;
    let attack = match model {
        "none" => AttackModel::None,
        "intercept-resend" => AttackModel::InterceptResend,
        "song-baseline" => AttackModel::SongBaseline,
        "dishonest-measure" => {
            AttackModel::DishonestMeasure { target: target.unwrap_or(subset[0]) }
        }
        "forged-result" => AttackModel::ForgedResult {
            forged: forged.unwrap_or((config.secret + 1) % config.d.get()),
        },
        other => {
            return Err(PyValueError::new_err(format!("unknown attack model {other:?}")));
        }
    };
    let plan = TrialPlan {
        master_seed: config.master_seed,
        base_config: config,
        subset,
        attack,
        trials,
    };
    let summary = trials::run_trials(&plan).map_err(runtime_error)?;
    serde_json::to_string(&summary).map_err(runtime_error)
}

/// 1 - ((d+1)/(2d))^m: intercept-resend detection probability.
#[pyfunction]
fn detection_probability_theoretical(d: u64, m: u32) -> f64 {
    adversary::detection_probability_theoretical(d, m)
}

/// Entangle-and-measure constraint nullspace report as a JSON string.
#[pyfunction]
fn entangle_measure_nullspace_json(d: u64) -> PyResult<String> {
    let report = adversary::entangle_measure_nullspace(d).map_err(value_error)?;
    serde_json::to_string(&report).map_err(runtime_error)
}

/// Wilson score interval for `successes` out of `trials` at critical z.
#[pyfunction]
fn wilson_interval(successes: u64, trials: u64, z: f64) -> PyResult<(f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(PyValueError::new_err("need 0 <= successes <= trials, trials >= 1"));
    }
    Ok(trials::wilson_interval(successes, trials, z))
}

/// Child seed for trial `index` under `master`; the fixed SplitMix64-based
/// derivation the trial runner uses.
#[pyfunction]
fn derive_seed(master: u64, index: u64) -> u64 {
    trials::derive_seed(master, index)
}

#[pymodule]
fn qss_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Rng>()?;
    m.add_class::<QuditState>()?;
    m.add_function(wrap_pyfunction!(select_prime, m)?)?;
    m.add_function(wrap_pyfunction!(mod_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(share_secret, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(lagrange_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(commit_secret_hex, m)?)?;
    m.add_function(wrap_pyfunction!(run_protocol_json, m)?)?;
    m.add_function(wrap_pyfunction!(attack_trials_json, m)?)?;
    m.add_function(wrap_pyfunction!(detection_probability_theoretical, m)?)?;
    m.add_function(wrap_pyfunction!(entangle_measure_nullspace_json, m)?)?;
    m.add_function(wrap_pyfunction!(wilson_interval, m)?)?;
    m.add_function(wrap_pyfunction!(derive_seed, m)?)?;
    Ok(())
}
