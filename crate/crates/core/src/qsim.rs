//! Dense statevector simulation of Gauss-sum phase estimation on qudits.
//!
//! Registers are `k`-dimensional. The Legendre state
//! `|chi> = (k-1)^(-1/2) sum_n chi(n) |n>` is prepared by phase kickback: an
//! ancilla holding a Fourier eigenstate of the cyclic shift is shifted by
//! `((k-1)/2) log_g n`, which returns the eigenvalue `(-1)^(log_g n) = chi(n)`.
//! The shift acts on the exponent group `Z_(k-1)`, embedded in the first
//! `k - 1` levels of the ancilla register, because only there does the
//! kickback eigenvalue equal `+-1`.
//!
//! A Fourier transform with parameter `a` then turns `|chi>` into
//! `(G(k,a) / sqrt(k)) |chi>`, and a Hadamard test on a control qubit reads
//! out that global phase.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numtheory::{discrete_log, gauss_sum_brute, is_prime, mod_inv, primitive_root, root_of_unity, Character};
use crate::scalar::Scalar;

/// Largest register dimension the simulator accepts.
pub const MAX_K: usize = 1024;

/// Tolerance for unitarity and state-identity checks at precision `T`.
pub fn state_tolerance<T: Scalar>() -> T {
    T::of((T::epsilon().as_f64() * 1e3).max(1e-10))
}

/// Amplitudes over one or two `Z_k` registers, register 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    k: usize,
    regs: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    fn check_shape(k: usize, regs: usize) -> Result<()> {
        if !(1..=2).contains(&regs) {
            return Err(Error::InvalidState(format!("{regs} registers; expected 1 or 2")));
        }
        if k < 2 {
            return Err(Error::InvalidState(format!("register dimension {k} below 2")));
        }
        if k > MAX_K {
            return Err(Error::DimensionTooLarge { dim: k, limit: MAX_K });
        }
        Ok(())
    }

    /// Computational basis state `|digits[0]> (x) |digits[1]>`.
    pub fn basis(k: usize, digits: &[usize]) -> Result<Self> {
        let regs = digits.len();
        Self::check_shape(k, regs)?;
        if let Some(&d) = digits.iter().find(|&&d| d >= k) {
            return Err(Error::InvalidState(format!("basis digit {d} out of range for k = {k}")));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); k.pow(regs as u32)];
        amps[digits.iter().fold(0, |acc, &d| acc * k + d)] = Complex::new(T::one(), T::zero());
        Ok(Self { k, regs, amps })
    }

    pub fn from_amplitudes(k: usize, regs: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        Self::check_shape(k, regs)?;
        if amps.len() != k.pow(regs as u32) {
            return Err(Error::InvalidState(format!(
                "{} amplitudes for {regs} registers of dimension {k}",
                amps.len()
            )));
        }
        Ok(Self { k, regs, amps })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn regs(&self) -> usize {
        self.regs
    }

    pub fn amps(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |x, y| x + y)
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.amps.len(), other.amps.len(), "state shapes differ");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::new(T::zero(), T::zero()), |x, y| x + y)
    }

    fn check_reg(&self, reg: usize) -> Result<()> {
        if reg >= self.regs {
            return Err(Error::RegisterOutOfRange { reg, regs: self.regs });
        }
        Ok(())
    }

    /// (outer index, stride) pairs addressing each fiber of register `reg`.
    fn fibers(&self, reg: usize) -> impl Iterator<Item = (usize, usize)> {
        let stride = if self.regs == 2 && reg == 0 { self.k } else { 1 };
        let k = self.k;
        let others = self.amps.len() / k;
        (0..others).map(move |o| (if stride == 1 { o * k } else { o }, stride))
    }

    /// Applies the dense `k x k` matrix `u` (row-major) to register `reg`.
    pub fn apply(&mut self, reg: usize, u: &[Complex<T>]) -> Result<()> {
        self.check_reg(reg)?;
        let k = self.k;
        assert_eq!(u.len(), k * k, "gate dimension mismatch");
        let mut buf = vec![Complex::new(T::zero(), T::zero()); k];
        let fibers: Vec<_> = self.fibers(reg).collect();
        for (base, stride) in fibers {
            for (s, out) in buf.iter_mut().enumerate() {
                *out = (0..k)
                    .map(|p| u[s * k + p] * self.amps[base + p * stride])
                    .fold(Complex::new(T::zero(), T::zero()), |x, y| x + y);
            }
            for (s, &v) in buf.iter().enumerate() {
                self.amps[base + s * stride] = v;
            }
        }
        Ok(())
    }

    /// Multiplies `|.., n, ..>` on register `reg` by `diag[n]`.
    pub fn apply_diagonal(&mut self, reg: usize, diag: &[Complex<T>]) -> Result<()> {
        self.check_reg(reg)?;
        assert_eq!(diag.len(), self.k);
        let fibers: Vec<_> = self.fibers(reg).collect();
        for (base, stride) in fibers {
            for (n, d) in diag.iter().enumerate() {
                self.amps[base + n * stride] *= d;
            }
        }
        Ok(())
    }

    /// Controlled cyclic shift on a two-register state: for control value `c`
    /// with `shift(c) = Some(s)`, maps `|c>|l> -> |c>|(l + s) mod order>` for
    /// `l < order`. Levels `>= order` of the target are untouched.
    pub fn apply_controlled_shift(&mut self, order: usize, shift: impl Fn(usize) -> Option<usize>) -> Result<()> {
        if self.regs != 2 {
            return Err(Error::RegisterOutOfRange { reg: 1, regs: self.regs });
        }
        assert!(order <= self.k);
        let k = self.k;
        let mut row = vec![Complex::new(T::zero(), T::zero()); order];
        for c in 0..k {
            let Some(s) = shift(c) else { continue };
            for l in 0..order {
                row[(l + s) % order] = self.amps[c * k + l];
            }
            self.amps[c * k..c * k + order].copy_from_slice(&row);
        }
        Ok(())
    }

    /// Projects register 0 onto the complement of `|0>` and renormalizes;
    /// returns the probability of that outcome.
    pub fn postselect_nonzero(&mut self) -> Result<T> {
        let stride = if self.regs == 2 { self.k } else { 1 };
        for a in &mut self.amps[..stride] {
            *a = Complex::new(T::zero(), T::zero());
        }
        let p = self.norm_sqr();
        if p.is_zero() {
            return Err(Error::InvalidState("postselection has zero probability".into()));
        }
        let s = p.sqrt().recip();
        for a in &mut self.amps {
            *a *= s;
        }
        Ok(p)
    }
}

/// `F_a[s][p] = k^(-1/2) exp(-2 pi i a p s / k)`; `a = 1` is the plain QFT.
pub fn fourier_matrix<T: Scalar>(k: usize, a: i64) -> Vec<Complex<T>> {
    let ku = k as u64;
    let a = crate::numtheory::reduce(i128::from(a), ku);
    let norm = T::of_int(k as i128).sqrt().recip();
    let mut u = Vec::with_capacity(k * k);
    for s in 0..ku {
        for p in 0..ku {
            let r = (u128::from(a) * u128::from(p * s % ku) % u128::from(ku)) as u64;
            u.push(root_of_unity::<T>(r, ku, -1) * norm);
        }
    }
    u
}

/// Fourier transform of `Z_order` on the first `order` levels of a
/// `k`-level register, identity on the remaining levels.
pub fn cyclic_fourier_matrix<T: Scalar>(k: usize, order: usize) -> Vec<Complex<T>> {
    let f = fourier_matrix::<T>(order, 1);
    let mut u = vec![Complex::new(T::zero(), T::zero()); k * k];
    for s in 0..k {
        for p in 0..k {
            u[s * k + p] = if s < order && p < order {
                f[s * order + p]
            } else if s == p {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            };
        }
    }
    u
}

/// Conjugate transpose of a row-major square matrix.
pub fn adjoint<T: Scalar>(u: &[Complex<T>], k: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::new(T::zero(), T::zero()); k * k];
    for s in 0..k {
        for p in 0..k {
            out[p * k + s] = u[s * k + p].conj();
        }
    }
    out
}

/// QFT on register `reg` with the negative-exponent convention.
pub fn qft_mod_k<T: Scalar>(s: &StateVector<T>, reg: usize) -> Result<StateVector<T>> {
    let mut out = s.clone();
    out.apply(reg, &fourier_matrix(s.k, 1))?;
    Ok(out)
}

/// Inverse of [`qft_mod_k`].
pub fn inverse_qft_mod_k<T: Scalar>(s: &StateVector<T>, reg: usize) -> Result<StateVector<T>> {
    let mut out = s.clone();
    out.apply(reg, &adjoint(&fourier_matrix(s.k, 1), s.k))?;
    Ok(out)
}

fn require_sim_prime(k: usize) -> Result<()> {
    if k > MAX_K {
        return Err(Error::DimensionTooLarge { dim: k, limit: MAX_K });
    }
    if k < 3 || k.is_multiple_of(2) || !is_prime(k as u64) {
        return Err(Error::NotOddPrime(k as u64));
    }
    Ok(())
}

/// Ancilla state after the cyclic Fourier transform of `|1>` on `Z_(k-1)`.
fn ancilla_eigenstate<T: Scalar>(k: usize) -> Vec<Complex<T>> {
    let order = k - 1;
    let norm = T::of_int(order as i128).sqrt().recip();
    (0..k)
        .map(|s| {
            if s < order {
                root_of_unity::<T>(s as u64, order as u64, -1) * norm
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
        .collect()
}

/// Runs the kickback on a two-register state whose ancilla (register 1) is
/// `|1>`, then discards the ancilla after confirming it factors out.
fn kickback_and_discard<T: Scalar>(mut state: StateVector<T>, g: u64) -> Result<StateVector<T>> {
    let k = state.k;
    let order = k - 1;
    state.apply(1, &cyclic_fourier_matrix(k, order))?;
    let half = order / 2;
    state.apply_controlled_shift(order, |n| {
        (n != 0).then(|| {
            let log = discrete_log(n as i64, g, k as u64).expect("n is a unit") as usize;
            half * log % order
        })
    })?;

    let phi = ancilla_eigenstate::<T>(k);
    let psi: Vec<Complex<T>> = (0..k)
        .map(|n| {
            (0..k)
                .map(|l| phi[l].conj() * state.amps[n * k + l])
                .fold(Complex::new(T::zero(), T::zero()), |x, y| x + y)
        })
        .collect();
    let residual = (0..k * k)
        .map(|idx| (state.amps[idx] - psi[idx / k] * phi[idx % k]).norm_sqr())
        .fold(T::zero(), |x, y| x + y)
        .sqrt();
    if residual > state_tolerance::<T>() {
        return Err(Error::InvalidState(format!(
            "ancilla is entangled with the data register (residual {:e})", residual.as_f64()
        )));
    }
    StateVector::from_amplitudes(k, 1, psi)
}

/// Multiplies each `|n>`, `n != 0`, of a one-register state by `chi(n)`
/// using the ancilla kickback; `|0>` is left alone.
pub fn legendre_kickback<T: Scalar>(s: &StateVector<T>) -> Result<StateVector<T>> {
    if s.regs != 1 {
        return Err(Error::InvalidState("kickback expects a single register".into()));
    }
    require_sim_prime(s.k)?;
    let k = s.k;
    let g = primitive_root(k as u64)?;
    let mut amps = vec![Complex::new(T::zero(), T::zero()); k * k];
    for n in 0..k {
        amps[n * k + 1] = s.amps[n];
    }
    kickback_and_discard(StateVector::from_amplitudes(k, 2, amps)?, g)
}

/// Reference `|chi>` built directly from the character table.
pub fn legendre_reference<T: Scalar>(k: usize) -> Result<StateVector<T>> {
    require_sim_prime(k)?;
    let chi = Character::new(k as u64)?;
    let norm = T::of_int(k as i128 - 1).sqrt().recip();
    let amps = chi.table().iter().map(|&c| Complex::new(T::of(f64::from(c)) * norm, T::zero())).collect();
    StateVector::from_amplitudes(k, 1, amps)
}

/// Prepares `|chi>` with the kickback circuit: QFT of `|0>` on the data
/// register, postselection away from `|0>` (the logarithm of 0 is
/// undefined), ancilla `|1>` Fourier-transformed over `Z_(k-1)`, controlled
/// shift by `((k-1)/2) log_g n`, and removal of the now unentangled ancilla.
pub fn prepare_legendre_state<T: Scalar>(k: usize) -> Result<StateVector<T>> {
    require_sim_prime(k)?;
    let g = primitive_root(k as u64)?;
    let mut state = StateVector::<T>::basis(k, &[0, 1])?;
    state.apply(0, &fourier_matrix(k, 1))?;
    state.postselect_nonzero()?;
    kickback_and_discard(state, g)
}

/// The encoding unitary without input validation: Fourier transform with
/// parameter `a`, then the second kickback pass, applied twice so that it
/// multiplies `|l>` by `chi(l)^2`.
fn encode<T: Scalar>(s: &StateVector<T>, a: i64) -> Result<StateVector<T>> {
    let mut out = s.clone();
    out.apply(0, &fourier_matrix(s.k, a))?;
    legendre_kickback(&legendre_kickback(&out)?)
}

/// Maps `|chi>` to `(G(k, a) / sqrt(k)) |chi>`.
pub fn gauss_phase_encode<T: Scalar>(s: &StateVector<T>, a: i64) -> Result<StateVector<T>> {
    require_sim_prime(s.k)?;
    if s.regs != 1 {
        return Err(Error::InvalidState("encoding expects a single register".into()));
    }
    let k = s.k as u64;
    if mod_inv(i128::from(a), k).is_none() {
        return Err(Error::NotCoprime { a, k });
    }
    let reference = legendre_reference::<T>(s.k)?;
    let fidelity = reference.inner(s).norm();
    if (T::one() - fidelity).abs() > state_tolerance::<T>() || (T::one() - s.norm_sqr()).abs() > state_tolerance::<T>() {
        return Err(Error::InvalidState(format!("input is not the Legendre state (fidelity {fidelity})")));
    }
    encode(s, a)
}

/// `ceil(8 ln(40) / eps^2)` shots per measurement basis: a Hoeffding bound
/// that gives 95% joint confidence over the two bases.
pub fn samples_for(epsilon: f64) -> u64 {
    (8.0 * 40f64.ln() / (epsilon * epsilon)).ceil() as u64
}

/// Half-width of the 95% confidence interval on the phase after `samples`
/// shots per basis: with failure probability 2.5% per basis, each estimated
/// coordinate of `exp(i phi)` is off by at most `2t`, `t = sqrt(ln 80 / 2N)`,
/// and a perturbation of length `rho < 1` rotates a unit vector by at most
/// `asin(rho)`.
pub fn ci_halfwidth(samples: u64) -> f64 {
    let t = (80f64.ln() / (2.0 * samples as f64)).sqrt();
    let rho = 2.0 * std::f64::consts::SQRT_2 * t;
    if rho >= 1.0 { std::f64::consts::PI } else { rho.asin() }
}

/// Per-trial seed: SplitMix64 applied to `root + (trial + 1) * 0x9E3779B97F4A7C15`.
pub fn trial_seed(root: u64, trial: u64) -> u64 {
    let mut z = root.wrapping_add((trial + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseEstimate<T> {
    pub k: usize,
    pub a: i64,
    /// Estimated `arg(G(k, a))` in `(-pi, pi]`.
    pub phi: T,
    pub phi_true: T,
    /// Shots per measurement basis.
    pub samples: u64,
    pub epsilon: T,
    pub ci_halfwidth: T,
    pub seed: u64,
}

impl<T: Scalar> PhaseEstimate<T> {
    /// Circular distance between estimate and true phase.
    pub fn error(&self) -> T {
        let d = (self.phi - self.phi_true).as_f64().rem_euclid(std::f64::consts::TAU);
        T::of(d.min(std::f64::consts::TAU - d))
    }
}

#[derive(Serialize)]
struct EstimateWire<T> {
    k: usize,
    a: i64,
    phi_hat: T,
    phi_true: T,
    epsilon: T,
    samples: u64,
    seed: u64,
}

impl<T: Scalar + Serialize> Serialize for PhaseEstimate<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        EstimateWire {
            k: self.k,
            a: self.a,
            phi_hat: self.phi,
            phi_true: self.phi_true,
            epsilon: self.epsilon,
            samples: self.samples,
            seed: self.seed,
        }
        .serialize(serializer)
    }
}

/// The interferometer for one `(k, a)`: outcome probabilities are computed
/// once from the simulated circuit and reused across sampling runs.
#[derive(Debug, Clone)]
pub struct PhaseEstimator<T> {
    k: usize,
    a: i64,
    /// P(control = |+>)
    p_plus: f64,
    /// P(control = |+i>)
    p_plus_i: f64,
    phi_true: T,
}

impl<T: Scalar> PhaseEstimator<T> {
    /// Simulates the Hadamard test `(|0>|chi> + |1> U|chi>) / sqrt(2)`, where
    /// `U` is the encoding unitary and `U|chi> = exp(i phi)|chi>`.
    pub fn new(k: usize, a: i64) -> Result<Self> {
        require_sim_prime(k)?;
        if mod_inv(i128::from(a), k as u64).is_none() {
            return Err(Error::NotCoprime { a, k: k as u64 });
        }
        let chi = prepare_legendre_state::<T>(k)?;
        let encoded = encode(&chi, a)?;
        let half = T::of(0.5);
        let i = Complex::new(T::zero(), T::one());
        // control measured along <+| and <+i|, each = (<0| + conj(c) <1|) / sqrt(2)
        let branch_prob = |c: Complex<T>| -> f64 {
            chi.amps
                .iter()
                .zip(&encoded.amps)
                .map(|(&x, &y)| ((x + c.conj() * y) * half).norm_sqr())
                .fold(T::zero(), |p, q| p + q)
                .as_f64()
        };
        let p_plus = branch_prob(Complex::new(T::one(), T::zero()));
        let p_plus_i = branch_prob(i);
        let g = gauss_sum_brute::<T>(k as u64, a)?;
        Ok(Self { k, a, p_plus, p_plus_i, phi_true: g.arg() })
    }

    pub fn probabilities(&self) -> (f64, f64) {
        (self.p_plus, self.p_plus_i)
    }

    pub fn estimate(&self, epsilon: f64, seed: u64) -> Result<PhaseEstimate<T>> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::EpsilonOutOfRange(epsilon));
        }
        let n = samples_for(epsilon);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |p: f64| {
            Binomial::new(n, p.clamp(0.0, 1.0))
                .expect("valid binomial parameters")
                .sample(&mut rng)
        };
        let hits_x = draw(self.p_plus);
        let hits_y = draw(self.p_plus_i);
        let x = 2.0 * hits_x as f64 / n as f64 - 1.0;
        let y = 2.0 * hits_y as f64 / n as f64 - 1.0;
        Ok(PhaseEstimate {
            k: self.k,
            a: self.a,
            phi: T::of(y.atan2(x)),
            phi_true: self.phi_true,
            samples: n,
            epsilon: T::of(epsilon),
            ci_halfwidth: T::of(ci_halfwidth(n)),
            seed,
        })
    }

    /// Independent trials seeded by [`trial_seed`], run in parallel.
    pub fn trials(&self, epsilon: f64, root_seed: u64, count: u64) -> Result<Vec<PhaseEstimate<T>>> {
        (0..count)
            .into_par_iter()
            .map(|t| self.estimate(epsilon, trial_seed(root_seed, t)))
            .collect()
    }
}

/// Estimates `arg(G(k, a))` to within `epsilon` at 95% confidence.
pub fn phase_estimate<T: Scalar>(k: usize, a: i64, epsilon: f64, seed: u64) -> Result<PhaseEstimate<T>> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    PhaseEstimator::<T>::new(k, a)?.estimate(epsilon, seed)
}
