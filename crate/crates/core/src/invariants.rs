//! Topological invariants as multivariate Gaussian sums over a linking matrix.
//!
//! All three invariants share one kernel, [`multivariate_gauss_sum`]:
//!
//! ```text
//! S = sum_{n in R^m} exp(2 pi i * scale * n^T J n)
//! ```
//!
//! with an exact rational `scale` and a per-invariant summation range `R`.
//! `n^T J n` is tracked modulo the denominator of `scale` in integer
//! arithmetic, so the angle handed to the trigonometric functions is always
//! an exact residue.

use std::time::{Duration, Instant};

use num_complex::Complex;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linkalg::{diagonalize_mod_k, signature, FramedLinkMatrix, KirbyMove};
use crate::numtheory::{gauss_sum_brute, reduce, root_of_unity, GaussValue, ModK};
use crate::scalar::Scalar;
use crate::summation::{tree_sum, TreeSum};

/// Tolerance for every exact-invariance check.
pub const INVARIANCE_TOLERANCE: f64 = 1e-9;
/// Agreement required between brute-force and factorized `tau_A`, in units of
/// the sum's natural magnitude `k^(m/2)`.
pub const ORACLE_TOLERANCE: f64 = 1e-6;

const CHUNK: u64 = 1 << 14;
const MAX_TABLE: u64 = 1 << 22;

/// Upper bound on the number of terms a brute-force sum may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guard(pub u64);

impl Default for Guard {
    fn default() -> Self {
        Guard(100_000_000)
    }
}

impl Guard {
    fn check(self, count: u64, m: usize) -> Result<u64> {
        let mut terms: u128 = 1;
        for _ in 0..m {
            terms = terms.saturating_mul(u128::from(count));
            if terms > u128::from(self.0) {
                return Err(Error::GuardExceeded { terms, guard: self.0 });
            }
        }
        Ok(terms as u64)
    }
}

/// Exact rational exponent scale `num / den`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseScale {
    num: i64,
    den: u64,
}

impl PhaseScale {
    pub fn new(num: i64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidMatrix("phase scale with zero denominator".into()));
        }
        let g = (num.unsigned_abs()).gcd(&den).max(1);
        Ok(Self { num: num / g as i64, den: den / g })
    }

    /// `-1/k`, the Abelian Chern-Simons convention.
    pub fn abelian(k: u64) -> Self {
        Self { num: -1, den: k }
    }

    /// `+1/4`: `exp(i pi x / 2) = exp(2 pi i x / 4)`.
    pub fn su2_k3() -> Self {
        Self { num: 1, den: 4 }
    }

    /// `+1/k`, the Dijkgraaf-Witten convention.
    pub fn dijkgraaf_witten(k: u64) -> Self {
        Self { num: 1, den: k }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }
}

/// Range of each summation variable `n_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SumRange {
    /// `0..=k-1`
    ZeroToKMinusOne,
    /// `1..=k`
    OneToK,
    /// `1..=2`
    OneToTwo,
    /// `1..=k-1`
    OneToKMinusOne,
}

impl SumRange {
    /// First value and number of values.
    pub fn bounds(self, k: u64) -> (i64, u64) {
        match self {
            SumRange::ZeroToKMinusOne => (0, k),
            SumRange::OneToK => (1, k),
            SumRange::OneToTwo => (1, 2),
            SumRange::OneToKMinusOne => (1, k - 1),
        }
    }
}

struct Kernel<'a, T> {
    j: &'a FramedLinkMatrix,
    m: usize,
    start: i64,
    count: u64,
    /// `J` reduced modulo `den`
    jm: Vec<u64>,
    num: u64,
    den: u64,
    table: Option<Vec<Complex<T>>>,
}

impl<T: Scalar> Kernel<'_, T> {
    fn root(&self, q: u64) -> Complex<T> {
        let r = (u128::from(self.num) * u128::from(q) % u128::from(self.den)) as u64;
        match &self.table {
            Some(t) => t[r as usize],
            None => root_of_unity(r, self.den, 1),
        }
    }

    fn md(&self, x: i128) -> u64 {
        reduce(x, self.den)
    }

    /// Pairwise sum of the terms with linear indices `lo..hi`; the last
    /// variable varies fastest.
    fn chunk(&self, lo: u64, hi: u64) -> Complex<T> {
        let m = self.m;
        let mut digits = vec![0u64; m];
        let mut rest = lo;
        for d in digits.iter_mut().rev() {
            *d = rest % self.count;
            rest /= self.count;
        }
        let n: Vec<i64> = digits.iter().map(|&d| self.start + d as i64).collect();
        // jn = J n mod den, q = n^T J n mod den
        let mut jn: Vec<u64> = (0..m)
            .map(|a| self.md((0..m).map(|b| i128::from(self.j.get(a, b)) * i128::from(n[b])).sum()))
            .collect();
        let mut q = self.md(self.j.quadratic_form(&n));

        let mut acc = TreeSum::new();
        for t in lo..hi {
            acc.push(self.root(q));
            if t + 1 == hi {
                break;
            }
            let mut i = m;
            loop {
                i -= 1;
                let delta: i128 = if digits[i] + 1 < self.count {
                    digits[i] += 1;
                    1
                } else {
                    let back = digits[i] as i128;
                    digits[i] = 0;
                    -back
                };
                let jj = i128::from(self.jm[i * m + i]);
                q = self.md(i128::from(q) + 2 * delta * i128::from(jn[i]) + delta * delta * jj);
                for (a, v) in jn.iter_mut().enumerate() {
                    *v = self.md(i128::from(*v) + delta * i128::from(self.jm[a * m + i]));
                }
                if delta == 1 {
                    break;
                }
            }
        }
        acc.total()
    }
}

/// `sum_{n in R^m} exp(2 pi i * scale * n^T J n)` by direct enumeration.
///
/// Terms are grouped in fixed chunks that may run on any number of worker
/// threads; chunk partials are combined by pairwise summation in index order,
/// so the result is bit-identical regardless of the thread count.
pub fn multivariate_gauss_sum<T: Scalar>(
    j: &FramedLinkMatrix,
    k: u64,
    scale: PhaseScale,
    range: SumRange,
    guard: Guard,
) -> Result<GaussValue<T>> {
    if k < 2 {
        return Err(Error::ModulusTooSmall { k, min: 2 });
    }
    let m = j.m();
    let (start, count) = range.bounds(k);
    let total = guard.check(count, m)?;
    if total == 0 {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let den = scale.den;
    let table = (den <= MAX_TABLE).then(|| (0..den).map(|r| root_of_unity(r, den, 1)).collect());
    let kernel = Kernel {
        j,
        m,
        start,
        count,
        jm: (0..m * m).map(|idx| reduce(i128::from(j.get(idx / m.max(1), idx % m.max(1))), den)).collect(),
        num: reduce(i128::from(scale.num), den),
        den,
        table,
    };
    let chunks = total.div_ceil(CHUNK);
    let partials: Vec<Complex<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| kernel.chunk(c * CHUNK, ((c + 1) * CHUNK).min(total)))
        .collect();
    Ok(tree_sum(partials))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Factorized,
}

/// Summation range for the Dijkgraaf-Witten sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DwRange {
    /// `n_i` in `1..=k-1`, as the Gaussian-sum formula is written.
    #[default]
    Paper,
    /// `n_i` in `0..=k-1`, all of `H^1(M; Z_k)`.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantResult<T> {
    pub value: GaussValue<T>,
    /// `value / k^(m/2)` for `tau_A`; equal to `value` for the other
    /// invariants, which carry their own normalization.
    pub normalized: GaussValue<T>,
    pub method: Method,
    pub k: u64,
    pub m: usize,
    pub elapsed: Duration,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct ResultWire<T> {
    re: T,
    im: T,
    method: Method,
    k: u64,
    m: usize,
    normalized_re: T,
    normalized_im: T,
}

impl<T: Scalar + Serialize> Serialize for InvariantResult<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ResultWire {
            re: self.value.re,
            im: self.value.im,
            method: self.method,
            k: self.k,
            m: self.m,
            normalized_re: self.normalized.re,
            normalized_im: self.normalized.im,
        }
        .serialize(serializer)
    }
}

/// Abelian Chern-Simons invariant `tau_A = sum_n exp(-2 pi i n^T J n / k)`.
///
/// `Factorized` diagonalizes `J` modulo `k` and multiplies scalar Gauss sums.
/// Moduli `k = 3 (mod 4)` are accepted with a warning: only for
/// `k = 1 (mod 4)` is the raw sum a topological invariant.
pub fn tau_abelian<T: Scalar>(
    j: &FramedLinkMatrix,
    ring: &ModK,
    method: Method,
    guard: Guard,
) -> Result<InvariantResult<T>> {
    let started = Instant::now();
    let k = ring.k();
    let value = match method {
        Method::Brute => multivariate_gauss_sum(j, k, PhaseScale::abelian(k), SumRange::ZeroToKMinusOne, guard)?,
        Method::Factorized => {
            let diag = diagonalize_mod_k(j, ring)?;
            let factors = diag
                .d
                .iter()
                .map(|&d| gauss_sum_brute::<T>(k, d as i64))
                .collect::<Result<Vec<_>>>()?;
            factors.into_iter().fold(Complex::new(T::one(), T::zero()), |acc, g| acc * g)
        }
    };
    let mut warnings = Vec::new();
    if k % 4 != 1 {
        warnings.push(format!("k = {k} is not 1 mod 4; tau_A is not a topological invariant for this k"));
    }
    let scale = T::of_int(i128::from(k)).powf(T::of(j.m() as f64 / 2.0));
    Ok(InvariantResult {
        value,
        normalized: value / scale,
        method,
        k,
        m: j.m(),
        elapsed: started.elapsed(),
        warnings,
    })
}

/// SU(2) invariant at level 3:
/// `2^(-m/2) exp(-i pi sigma / 4) sum_{n in {1,2}^m} exp(i pi n^T J n / 2)`.
pub fn tau_su2_k3<T: Scalar>(j: &FramedLinkMatrix, guard: Guard) -> Result<InvariantResult<T>> {
    let started = Instant::now();
    let m = j.m();
    let sum = multivariate_gauss_sum::<T>(j, 3, PhaseScale::su2_k3(), SumRange::OneToTwo, guard)?;
    let sigma = signature(j);
    // exp(-i pi sigma / 4) as an exact eighth root of unity
    let phase = root_of_unity::<T>(reduce(-i128::from(sigma), 8), 8, 1);
    let value = sum * phase * T::of(2.0).powf(T::of(-(m as f64) / 2.0));
    Ok(InvariantResult {
        value,
        normalized: value,
        method: Method::Brute,
        k: 3,
        m,
        elapsed: started.elapsed(),
        warnings: Vec::new(),
    })
}

/// `Z_k` Dijkgraaf-Witten invariant `(1/k) sum_n exp(2 pi i n^T J n / k)`
/// over the chosen range.
pub fn tau_dw<T: Scalar>(
    j: &FramedLinkMatrix,
    k: u64,
    range: DwRange,
    guard: Guard,
) -> Result<InvariantResult<T>> {
    let started = Instant::now();
    let sum_range = match range {
        DwRange::Paper => SumRange::OneToKMinusOne,
        DwRange::Full => SumRange::ZeroToKMinusOne,
    };
    let sum = multivariate_gauss_sum::<T>(j, k, PhaseScale::dijkgraaf_witten(k), sum_range, guard)?;
    let value = sum / T::of_int(i128::from(k));
    Ok(InvariantResult {
        value,
        normalized: value,
        method: Method::Brute,
        k,
        m: j.m(),
        elapsed: started.elapsed(),
        warnings: Vec::new(),
    })
}

/// Brute-force and factorized `tau_A` side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison<T> {
    pub brute: GaussValue<T>,
    pub factorized: GaussValue<T>,
    /// `|brute - factorized| / k^(m/2)`
    pub deviation: f64,
    pub passed: bool,
}

pub fn compare_abelian_methods<T: Scalar>(
    j: &FramedLinkMatrix,
    ring: &ModK,
    guard: Guard,
) -> Result<OracleComparison<T>> {
    let brute = tau_abelian::<T>(j, ring, Method::Brute, guard)?;
    let fact = tau_abelian::<T>(j, ring, Method::Factorized, guard)?;
    let deviation = (brute.normalized - fact.normalized).norm().as_f64();
    Ok(OracleComparison {
        brute: brute.value,
        factorized: fact.value,
        deviation,
        passed: deviation < ORACLE_TOLERANCE,
    })
}

/// Which invariant a Kirby-invariance check evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantKind {
    Su2K3,
    Abelian { ring: ModK, method: Method },
    Dw { k: u64, range: DwRange },
}

impl InvariantKind {
    pub fn evaluate<T: Scalar>(&self, j: &FramedLinkMatrix, guard: Guard) -> Result<InvariantResult<T>> {
        match *self {
            InvariantKind::Su2K3 => tau_su2_k3(j, guard),
            InvariantKind::Abelian { ring, method } => tau_abelian(j, &ring, method, guard),
            InvariantKind::Dw { k, range } => tau_dw(j, k, range, guard),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InvariantKind::Su2K3 => "su2k3",
            InvariantKind::Abelian { .. } => "abelian",
            InvariantKind::Dw { .. } => "dw",
        }
    }

    /// Whether invariance under `mv` is a theorem (asserted) or only recorded.
    fn asserts(&self, mv: &KirbyMove) -> bool {
        match *self {
            InvariantKind::Su2K3 => true,
            InvariantKind::Abelian { ring, .. } => mv.is_handle_slide() || ring.k() % 4 == 1,
            InvariantKind::Dw { range, .. } => mv.is_handle_slide() && range == DwRange::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    #[serde(rename = "move")]
    pub mv: String,
    pub m: usize,
    pub re: f64,
    pub im: f64,
    pub deviation: f64,
    pub asserted: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KirbyReport {
    pub invariant: &'static str,
    pub initial_re: f64,
    pub initial_im: f64,
    pub steps: Vec<StepRecord>,
    /// Largest deviation among asserted steps.
    pub max_deviation: f64,
    pub passed: bool,
}

fn wrapped_angle(x: f64) -> f64 {
    let t = std::f64::consts::TAU;
    let r = x.rem_euclid(t);
    if r > std::f64::consts::PI { r - t } else { r }
}

/// Evaluates the invariant after every move of `script` and compares each
/// value with its predecessor.
///
/// * `Su2K3`: values must agree to [`INVARIANCE_TOLERANCE`] across every move.
/// * `Abelian`: a blow-up multiplies the raw value by `sqrt(k)` when
///   `k = 1 (mod 4)`; the deviation is the larger of the phase change and the
///   relative error of the modulus ratio against `sqrt(k)^(change in m)`.
///   Handle slides are asserted for every `k`, blow-ups only for
///   `k = 1 (mod 4)`.
/// * `Dw`: handle slides are asserted for the full range; blow-ups and the
///   paper range are recorded without assertion.
pub fn check_kirby_invariance<T: Scalar>(
    j: &FramedLinkMatrix,
    kind: InvariantKind,
    script: &[KirbyMove],
    guard: Guard,
) -> Result<KirbyReport> {
    let mut cur = j.clone();
    let mut prev = kind.evaluate::<T>(&cur, guard)?.value;
    let initial = prev;
    let mut steps = Vec::with_capacity(script.len());
    for mv in script {
        let next = mv.apply(&cur)?;
        let val = kind.evaluate::<T>(&next, guard)?.value;
        let (a, b) = (
            Complex::new(prev.re.as_f64(), prev.im.as_f64()),
            Complex::new(val.re.as_f64(), val.im.as_f64()),
        );
        let deviation = match kind {
            InvariantKind::Abelian { ring, .. } => {
                let expected_ratio = (ring.k() as f64).powf(mv.component_delta() as f64 / 2.0);
                let phase = wrapped_angle(b.arg() - a.arg()).abs();
                let ratio = ((b.norm() / a.norm()) / expected_ratio - 1.0).abs();
                phase.max(ratio)
            }
            _ => (b - a).norm() / a.norm().max(1.0),
        };
        let asserted = kind.asserts(mv);
        steps.push(StepRecord {
            mv: format!("{mv:?}"),
            m: next.m(),
            re: b.re,
            im: b.im,
            deviation,
            asserted,
            passed: !asserted || deviation < INVARIANCE_TOLERANCE,
        });
        cur = next;
        prev = val;
    }
    let max_deviation = steps
        .iter()
        .filter(|s| s.asserted)
        .map(|s| s.deviation)
        .fold(0.0, f64::max);
    Ok(KirbyReport {
        invariant: kind.name(),
        initial_re: initial.re.as_f64(),
        initial_im: initial.im.as_f64(),
        passed: steps.iter().all(|s| s.passed),
        steps,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkalg::Sign;
    use approx::assert_abs_diff_eq;

    fn mat(rows: &[&[i64]]) -> FramedLinkMatrix {
        FramedLinkMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    /// Term-by-term oracle without incremental updates or chunking.
    fn naive(j: &FramedLinkMatrix, scale: (i64, u64), values: &[i64]) -> Complex<f64> {
        let m = j.m();
        let mut idx = vec![0usize; m];
        let mut acc = Complex::new(0.0, 0.0);
        loop {
            let n: Vec<i64> = idx.iter().map(|&i| values[i]).collect();
            let q = j.quadratic_form(&n) * i128::from(scale.0);
            let r = q.rem_euclid(i128::from(scale.1)) as f64;
            acc += Complex::from_polar(1.0, std::f64::consts::TAU * r / scale.1 as f64);
            let mut p = m;
            loop {
                if p == 0 {
                    return acc;
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] < values.len() {
                    break;
                }
                idx[p] = 0;
            }
        }
    }

    #[test]
    fn kernel_examples() {
        let g = Guard::default();
        let v: GaussValue = multivariate_gauss_sum(&mat(&[&[1]]), 5, PhaseScale::abelian(5), SumRange::ZeroToKMinusOne, g).unwrap();
        assert_abs_diff_eq!(v.re, 5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);

        for m in 0..4 {
            let v: GaussValue =
                multivariate_gauss_sum(&FramedLinkMatrix::zeros(m), 7, PhaseScale::new(3, 7).unwrap(), SumRange::ZeroToKMinusOne, g).unwrap();
            assert_eq!(v, Complex::new(7f64.powi(m as i32), 0.0));
        }

        let v: GaussValue = multivariate_gauss_sum(&mat(&[&[1, 0], &[0, 2]]), 5, PhaseScale::abelian(5), SumRange::ZeroToKMinusOne, g).unwrap();
        assert_abs_diff_eq!(v.re, -5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn kernel_matches_naive_enumeration() {
        let js = [
            mat(&[&[3, -1, 2], &[-1, 0, 4], &[2, 4, -2]]),
            mat(&[&[0, 1], &[1, 0]]),
            mat(&[&[7]]),
            mat(&[&[1, 2, 0, -1], &[2, -3, 1, 0], &[0, 1, 2, 2], &[-1, 0, 2, 5]]),
        ];
        for j in &js {
            for (k, scale, range) in [
                (5u64, (-1i64, 5u64), SumRange::ZeroToKMinusOne),
                (9, (1, 9), SumRange::OneToKMinusOne),
                (3, (1, 4), SumRange::OneToTwo),
                (7, (-1, 7), SumRange::OneToK),
                (13, (2, 13), SumRange::ZeroToKMinusOne),
            ] {
                let (start, count) = range.bounds(k);
                let values: Vec<i64> = (0..count as i64).map(|i| start + i).collect();
                let got: GaussValue =
                    multivariate_gauss_sum(j, k, PhaseScale::new(scale.0, scale.1).unwrap(), range, Guard::default()).unwrap();
                let want = naive(j, scale, &values);
                assert!((got - want).norm() < 1e-9, "{j:?} k={k}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn range_shift_is_exact() {
        let j = mat(&[&[2, 1, 0], &[1, -1, 3], &[0, 3, 4]]);
        for k in [5u64, 7, 9] {
            let a: GaussValue = multivariate_gauss_sum(&j, k, PhaseScale::abelian(k), SumRange::ZeroToKMinusOne, Guard::default()).unwrap();
            let b: GaussValue = multivariate_gauss_sum(&j, k, PhaseScale::abelian(k), SumRange::OneToK, Guard::default()).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn chunking_spans_many_chunks() {
        // 11^5 = 161051 terms covers ten chunks with a ragged tail
        let j = mat(&[
            &[1, 2, 0, 0, 1],
            &[2, 3, 1, 0, 0],
            &[0, 1, -2, 1, 0],
            &[0, 0, 1, 4, 2],
            &[1, 0, 0, 2, 5],
        ]);
        let ring = ModK::new(11).unwrap();
        let c = compare_abelian_methods::<f64>(&j, &ring, Guard::default()).unwrap();
        assert!(c.passed, "{c:?}");
    }

    #[test]
    fn guard_is_enforced() {
        let j = FramedLinkMatrix::zeros(12);
        let err = multivariate_gauss_sum::<f64>(&j, 5, PhaseScale::abelian(5), SumRange::ZeroToKMinusOne, Guard::default());
        assert!(matches!(err, Err(Error::GuardExceeded { .. })));
        let ok = multivariate_gauss_sum::<f64>(&FramedLinkMatrix::zeros(3), 5, PhaseScale::abelian(5), SumRange::ZeroToKMinusOne, Guard(125));
        assert!(ok.is_ok());
        let err = multivariate_gauss_sum::<f64>(&FramedLinkMatrix::zeros(3), 5, PhaseScale::abelian(5), SumRange::ZeroToKMinusOne, Guard(124));
        assert!(err.is_err());
    }

    #[test]
    fn tau_abelian_examples() {
        let ring = ModK::new(5).unwrap();
        for method in [Method::Brute, Method::Factorized] {
            let r = tau_abelian::<f64>(&mat(&[&[1]]), &ring, method, Guard::default()).unwrap();
            assert_abs_diff_eq!(r.value.re, 5f64.sqrt(), epsilon = 1e-12);
            assert_abs_diff_eq!(r.normalized.re, 1.0, epsilon = 1e-12);
            assert!(r.warnings.is_empty());

            let r = tau_abelian::<f64>(&FramedLinkMatrix::empty(), &ring, method, Guard::default()).unwrap();
            assert_eq!(r.value, Complex::new(1.0, 0.0));
        }
        let c = compare_abelian_methods::<f64>(&mat(&[&[0, 1], &[1, 0]]), &ring, Guard::default()).unwrap();
        assert!(c.passed);
        // G(5,1) G(5,-1) = 5 for the hyperbolic plane
        assert_abs_diff_eq!(c.brute.re, 5.0, epsilon = 1e-12);

        let r = tau_abelian::<f64>(&mat(&[&[1]]), &ModK::new(7).unwrap(), Method::Brute, Guard::default()).unwrap();
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn tau_su2_k3_examples() {
        let one = |rows: &[&[i64]]| tau_su2_k3::<f64>(&mat(rows), Guard::default()).unwrap().value;
        let v = one(&[&[1]]);
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
        let v = one(&[&[-1]]);
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
        let v = one(&[&[0]]);
        assert_abs_diff_eq!(v.re, 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
        let v = tau_su2_k3::<f64>(&FramedLinkMatrix::empty(), Guard::default()).unwrap().value;
        assert_eq!(v, Complex::new(1.0, 0.0));
    }

    /// The `{1,2}^m` form agrees with the sublink sum it came from:
    /// `sum_{S subset L} exp(i pi sum_{i,j in S} J_ij / 2)`.
    #[test]
    fn su2_k3_matches_sublink_sum() {
        let j = mat(&[&[1, 2, -1], &[2, 0, 3], &[-1, 3, -2]]);
        let sigma = signature(&j);
        let mut sum = Complex::new(0.0, 0.0);
        for mask in 0..8u32 {
            let s: i64 = (0..3)
                .flat_map(|a| (0..3).map(move |b| (a, b)))
                .filter(|&(a, b)| mask >> a & 1 == 1 && mask >> b & 1 == 1)
                .map(|(a, b)| j.get(a, b))
                .sum();
            sum += Complex::from_polar(1.0, std::f64::consts::PI * s as f64 / 2.0);
        }
        let want = sum * Complex::from_polar(2f64.powf(-1.5), -std::f64::consts::PI * sigma as f64 / 4.0);
        let got = tau_su2_k3::<f64>(&j, Guard::default()).unwrap().value;
        assert!((got - want).norm() < 1e-12);
    }

    #[test]
    fn su2_k3_depends_on_j_mod_4() {
        let j = mat(&[&[1, 2], &[2, -3]]);
        let bumped = mat(&[&[5, 2], &[2, -3]]);
        assert_eq!(signature(&j), signature(&bumped));
        let a = tau_su2_k3::<f64>(&j, Guard::default()).unwrap().value;
        let b = tau_su2_k3::<f64>(&bumped, Guard::default()).unwrap().value;
        assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn tau_dw_examples() {
        let g = Guard::default();
        let v = tau_dw::<f64>(&mat(&[&[1]]), 5, DwRange::Full, g).unwrap().value;
        assert_abs_diff_eq!(v.re, 5f64.sqrt() / 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
        let v = tau_dw::<f64>(&mat(&[&[1]]), 5, DwRange::Paper, g).unwrap().value;
        assert_abs_diff_eq!(v.re, (5f64.sqrt() - 1.0) / 5.0, epsilon = 1e-12);
        let v = tau_dw::<f64>(&mat(&[&[0]]), 3, DwRange::Full, g).unwrap().value;
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn kirby_check_examples() {
        let g = Guard::default();
        let script = [KirbyMove::BlowUp(Sign::Plus), KirbyMove::HandleSlide { i: 0, j: 1, sign: Sign::Plus }];
        let r = check_kirby_invariance::<f64>(&mat(&[&[0]]), InvariantKind::Su2K3, &script, g).unwrap();
        assert!(r.passed, "{r:?}");
        assert_abs_diff_eq!(r.initial_re, 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.steps[1].re, 2f64.sqrt(), epsilon = 1e-9);

        let kind = InvariantKind::Abelian { ring: ModK::new(5).unwrap(), method: Method::Brute };
        let r = check_kirby_invariance::<f64>(&mat(&[&[1]]), kind, &[KirbyMove::BlowUp(Sign::Plus)], g).unwrap();
        assert!(r.passed);
        assert_abs_diff_eq!(r.steps[0].re, 5.0, epsilon = 1e-9);

        for kind in [InvariantKind::Su2K3, kind, InvariantKind::Dw { k: 5, range: DwRange::Paper }] {
            let r = check_kirby_invariance::<f64>(&mat(&[&[2]]), kind, &[], g).unwrap();
            assert!(r.passed && r.steps.is_empty() && r.max_deviation == 0.0);
        }

        let err = check_kirby_invariance::<f64>(&mat(&[&[2]]), InvariantKind::Su2K3, &[KirbyMove::BlowDown(0)], g);
        assert!(matches!(err, Err(Error::IllegalMove(_))));
    }

    #[test]
    fn abelian_blow_up_for_3_mod_4_is_recorded_not_asserted() {
        let kind = InvariantKind::Abelian { ring: ModK::new(7).unwrap(), method: Method::Brute };
        let r = check_kirby_invariance::<f64>(&mat(&[&[1]]), kind, &[KirbyMove::BlowUp(Sign::Plus)], Guard::default()).unwrap();
        assert!(!r.steps[0].asserted);
        // G(7, 1) = -i sqrt(7) rotates the phase
        assert!(r.steps[0].deviation > 1.0);
        assert!(r.passed);
    }

    #[test]
    fn single_precision_kernel() {
        let v: GaussValue<f32> =
            multivariate_gauss_sum(&mat(&[&[1, 0], &[0, 2]]), 5, PhaseScale::abelian(5), SumRange::ZeroToKMinusOne, Guard::default()).unwrap();
        assert!((v.re + 5.0).abs() < 1e-4);
    }

    #[test]
    fn result_json_shape() {
        let r = tau_abelian::<f64>(&mat(&[&[1]]), &ModK::new(5).unwrap(), Method::Factorized, Guard::default()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        for key in ["re", "im", "method", "k", "m", "normalized_re", "normalized_im"] {
            assert!(keys.contains(&key), "{key}");
        }
        assert_eq!(v["method"], "factorized");
    }
}
