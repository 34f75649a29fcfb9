//! Eavesdropper's minimum error probability for reading a ciphered bit.
//!
//! For bit `b` the eavesdropper faces the uniform mixture over the wheel
//!
//! ```text
//! ρ_b = (1/M) Σ_k |Ψ(θ_bk)⟩⟨Ψ(θ_bk)|,   θ_bk = (φ_k + bπ) mod 2π,
//! |Ψ(θ)⟩ = |e^{−iθ/2} α/√2⟩ ⊗ |e^{iθ/2} α/√2⟩.
//! ```
//!
//! In the angular-momentum basis `|J, q⟩ = |J−q⟩ ⊗ |J+q⟩` the state splits
//! into orthogonal sectors of fixed `q`, each with weight `e^{−x} I_{2|q|}(x)`
//! (`x = |α|²`) and phase `e^{iθq}`. Both integer and half-integer `q` occur:
//! the integer sectors alone carry only `e^{−x} cosh x` of the norm. The
//! difference matrix over the truncated `q` range is therefore
//!
//! ```text
//! Δρ_{q,q'} = e^{−x} √(I_{2|q|}(x) I_{2|q'|}(x)) · (1/M) Σ_k [e^{iθ_0k(q'−q)} − e^{iθ_1k(q'−q)}],
//! ```
//!
//! which for integer `q' − q` reduces to the familiar
//! `−2i sin((q'−q)π/2) e^{i(q'−q)π/2} (1/M) Σ_k e^{iφ_k(q'−q)}` factor.
//! Because the state depends on `θ` modulo 4π on half-integer sectors, phases
//! are taken reduced into `[0, 2π)` before they enter the matrix.
//!
//! With equal priors the minimum error is `(1 − Σλ⁺)/2`, `Σλ⁺` being the sum
//! of the positive eigenvalues of `Δρ` (half its trace norm).

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::bessel::log_scaled_bessel_sequence;
use crate::error::{domain, Error, Result};
use crate::linalg::{eigvalsh, ComplexMatrix};
use crate::mry::{wheel_units, SystemParams};

/// Default tail tolerance for the truncation of the `q` sums.
pub const DEFAULT_TAIL_EPSILON: f64 = 1e-14;

/// Eigenvalues below this magnitude are treated as solver noise.
pub const EIGENVALUE_FLOOR: f64 = 1e-13;

/// Largest tolerated norm loss of the truncated states.
const MAX_WEIGHT_DEFICIT: f64 = 1e-8;

/// Cut-off of the angular-momentum expansion: `q` runs over
/// `{−Q, −Q+½, …, Q}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    pub max_order: u32,
    pub tail_epsilon: f64,
}

impl TruncationSpec {
    /// Number of `q` values kept, `4Q + 1`.
    pub fn dimension(&self) -> usize {
        4 * self.max_order as usize + 1
    }

    /// Same tolerance, `Q` doubled.
    pub fn doubled(&self) -> Self {
        Self {
            max_order: self.max_order * 2,
            ..*self
        }
    }
}

/// Smallest `Q` with `e^{−n} I_{2Q}(n) < eps`.
pub fn truncation_order(n: f64, eps: f64) -> Result<TruncationSpec> {
    if !(n > 0.0 && n.is_finite()) || !(eps > 0.0) {
        return Err(domain(alloc::format!(
            "truncation needs n > 0 and eps > 0, got n = {n}, eps = {eps}"
        )));
    }
    let log_eps = libm::log(eps);
    // e^{−n} I_ν(n) falls roughly like exp(−ν²/2n) below ν ~ n and faster above
    let mut max_order = (libm::ceil(libm::sqrt(2.0 * n * (-log_eps).max(1.0)) + 16.0)) as u32;
    loop {
        let seq = log_scaled_bessel_sequence(max_order, n)?;
        if let Some(q) = (0..=max_order / 2).find(|&q| seq[2 * q as usize] < log_eps) {
            return Ok(TruncationSpec {
                max_order: q,
                tail_epsilon: eps,
            });
        }
        max_order = max_order.checked_mul(2).ok_or_else(|| {
            Error::Numerical(alloc::format!("no truncation order found for n = {n}, eps = {eps}"))
        })?;
    }
}

/// `(1/M) Σ_k exp(i φ_k d)`.
pub fn cipher_sum(d: i64, num_bases: u32) -> Result<Complex64> {
    if num_bases == 0 {
        return Err(domain("number of bases must be >= 1"));
    }
    let m = u64::from(num_bases);
    // φ_k d in units of π/M, reduced modulo 2M
    let modulus = 2 * m as i128;
    let sum: Complex64 = (0..num_bases)
        .map(|k| {
            let units = (i128::from(wheel_units(k, num_bases)) * i128::from(d)).rem_euclid(modulus);
            Complex64::from_polar(1.0, PI * units as f64 / m as f64)
        })
        .sum();
    Ok(sum / m as f64)
}

/// Truncated difference density matrix for a wheel of `M` bases.
#[derive(Debug, Clone)]
pub struct DeltaRhoMatrix {
    params: SystemParams,
    truncation: TruncationSpec,
    matrix: ComplexMatrix,
    captured_weight: f64,
}

impl DeltaRhoMatrix {
    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn truncation(&self) -> &TruncationSpec {
        &self.truncation
    }

    pub fn dimension(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Entry for `q = two_q/2`, `q' = two_q_prime/2`.
    pub fn entry(&self, two_q: i64, two_q_prime: i64) -> Complex64 {
        let offset = 2 * i64::from(self.truncation.max_order);
        self.matrix
            .get((two_q + offset) as usize, (two_q_prime + offset) as usize)
    }

    /// Total norm of one truncated ciphered state, `Σ_{|2q| ≤ 2Q} e^{−x} I_{|2q|}(x)`.
    pub fn captured_weight(&self) -> f64 {
        self.captured_weight
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.matrix.hermitian_defect()
    }
}

/// Builds `Δρ` at the eavesdropper's photon number `r·⟨n⟩`.
pub fn build_delta_rho(params: &SystemParams, trunc: &TruncationSpec) -> Result<DeltaRhoMatrix> {
    let x = params.source_photon_number();
    let m = params.num_bases();
    let span = 2 * trunc.max_order as usize;
    let dim = 2 * span + 1;

    let log_weights = log_scaled_bessel_sequence(span as u32, x)?;
    let half_log_weight = |two_q: i64| 0.5 * log_weights[two_q.unsigned_abs() as usize];

    let captured_weight = (-(span as i64)..=span as i64)
        .map(|p| libm::exp(log_weights[p.unsigned_abs() as usize]))
        .sum::<f64>();
    if 1.0 - captured_weight > MAX_WEIGHT_DEFICIT {
        return Err(Error::Numerical(alloc::format!(
            "truncation Q = {} keeps only {captured_weight} of the state norm at n = {x}",
            trunc.max_order
        )));
    }

    let sums = phase_difference_sums(m, 2 * span);
    let matrix = ComplexMatrix::from_fn(dim, |i, j| {
        let (p, p_prime) = (i as i64 - span as i64, j as i64 - span as i64);
        let d = p_prime - p;
        let magnitude = libm::exp(half_log_weight(p) + half_log_weight(p_prime));
        sums[(d + 2 * span as i64) as usize] * magnitude
    });

    let trace = matrix.trace().norm();
    if trace > 1e-10 {
        return Err(Error::Numerical(alloc::format!(
            "difference matrix trace {trace:e} is not zero"
        )));
    }

    Ok(DeltaRhoMatrix {
        params: *params,
        truncation: *trunc,
        matrix,
        captured_weight,
    })
}

/// `S(d) = (1/M) Σ_k [e^{iθ_0k d/2} − e^{iθ_1k d/2}]` for `d` in
/// `[−max_d, max_d]`, indexed by `d + max_d`.
fn phase_difference_sums(num_bases: u32, max_d: usize) -> Vec<Complex64> {
    let m = u64::from(num_bases);
    // angles in units of π/(2M); a full turn is 4M units
    let turn = 4 * m;
    let unit_circle: Vec<Complex64> = (0..turn)
        .map(|j| Complex64::from_polar(1.0, PI * j as f64 / (2 * m) as f64))
        .collect();
    let bit0: Vec<u64> = (0..num_bases).map(|k| wheel_units(k, num_bases)).collect();
    let bit1: Vec<u64> = bit0.iter().map(|&a| (a + m) % (2 * m)).collect();

    (-(max_d as i64)..=max_d as i64)
        .map(|d| {
            let d_mod = d.rem_euclid(turn as i64) as u64;
            let total: Complex64 = bit0
                .iter()
                .zip(&bit1)
                .map(|(&a, &b)| unit_circle[(a * d_mod % turn) as usize] - unit_circle[(b * d_mod % turn) as usize])
                .sum();
            total / m as f64
        })
        .collect()
}

/// Minimum error probability with the positive-eigenvalue mass it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeResult {
    pub pe: f64,
    pub positive_eigenvalue_sum: f64,
    pub truncation: TruncationSpec,
}

/// Minimum error probability with the default truncation.
pub fn min_error_probability(params: &SystemParams) -> Result<PeResult> {
    let trunc = truncation_order(params.source_photon_number(), DEFAULT_TAIL_EPSILON)?;
    min_error_probability_with(params, &trunc)
}

/// Minimum error probability for an explicit truncation.
pub fn min_error_probability_with(params: &SystemParams, trunc: &TruncationSpec) -> Result<PeResult> {
    let delta = build_delta_rho(params, trunc)?;
    let eigenvalues = eigvalsh(delta.matrix())?;
    // ascending order; summing from the smallest positive value up keeps the
    // reduction order fixed
    let positive: f64 = eigenvalues
        .iter()
        .filter(|&&l| l > EIGENVALUE_FLOOR)
        .sum();
    if positive > 1.0 + 1e-10 {
        return Err(Error::Numerical(alloc::format!(
            "positive eigenvalue mass {positive} exceeds 1"
        )));
    }
    Ok(PeResult {
        pe: (0.5 * (1.0 - positive)).clamp(0.0, 0.5),
        positive_eigenvalue_sum: positive,
        truncation: *trunc,
    })
}

/// Error probability when each bit and its basis are sent `r` times: a single
/// shot at `r·⟨n⟩`.
pub fn repetition_equivalent_pe(params: &SystemParams) -> Result<PeResult> {
    let single_shot = SystemParams::new(params.source_photon_number(), params.num_bases())?;
    min_error_probability(&single_shot)
}

/// One point of an error-probability curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PePoint {
    pub num_bases: u32,
    pub mean_photon_number: f64,
    pub pe: f64,
    pub mutual_information: f64,
}

impl PePoint {
    pub fn compute(num_bases: u32, n: f64) -> Result<Self> {
        let pe = min_error_probability(&SystemParams::new(n, num_bases)?)?.pe;
        Ok(Self {
            num_bases,
            mean_photon_number: n,
            pe,
            mutual_information: eve_mutual_information(pe)?,
        })
    }
}

/// Error probability (and mutual information) against `M` at fixed `⟨n⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeCurve {
    pub points: Vec<PePoint>,
}

pub fn pe_curve(num_bases: &[u32], n: f64) -> Result<PeCurve> {
    if num_bases.is_empty() {
        return Err(domain("curve needs at least one M value"));
    }
    let points = num_bases
        .iter()
        .map(|&m| PePoint::compute(m, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(PeCurve { points })
}

/// `h(p) = −p log₂ p − (1−p) log₂(1−p)`, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_probability(p)?;
    let term = |x: f64| if x == 0.0 { 0.0 } else { -x * libm::log2(x) };
    Ok(term(p) + term(1.0 - p))
}

/// Bits of information per bit available to an eavesdropper with error
/// probability `pe`: `1 − h(pe)`.
pub fn eve_mutual_information(pe: f64) -> Result<f64> {
    Ok((1.0 - binary_entropy(pe)?).clamp(0.0, 1.0))
}

/// `ΔI = L₀[h(ber_eve) − h(ber_bob)]`, clamped to `[−L₀, L₀]`.
pub fn information_balance(ber_bob: f64, ber_eve: f64, sequence_len: u64) -> Result<f64> {
    if sequence_len == 0 {
        return Err(domain("sequence length must be >= 1"));
    }
    let len = sequence_len as f64;
    let delta = len * (binary_entropy(ber_eve)? - binary_entropy(ber_bob)?);
    Ok(delta.clamp(-len, len))
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(domain(alloc::format!("probability must lie in [0, 1], got {p}")));
    }
    Ok(())
}
