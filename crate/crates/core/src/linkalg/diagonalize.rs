use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::FramedLinkMatrix;
use crate::error::Result;
use crate::numtheory::ModK;

/// Unimodular `U` and residues `d` with `U^T J U = diag(d) (mod k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalizationResult {
    /// Row-major integer matrix with determinant `+1`.
    pub u: Vec<Vec<BigInt>>,
    /// Diagonal residues in `[0, k)`, one per component.
    pub d: Vec<u64>,
}

impl DiagonalizationResult {
    pub fn det(&self) -> BigInt {
        det_bigint(&self.u)
    }

    /// Checks `det U = +-1` and `U^T J U = diag(d) (mod k)` entrywise.
    pub fn verify(&self, j: &FramedLinkMatrix, ring: &ModK) -> bool {
        let m = j.m();
        if self.u.len() != m || self.d.len() != m || self.det().abs() != BigInt::one() {
            return false;
        }
        let k = BigInt::from(ring.k());
        for a in 0..m {
            for b in 0..m {
                let mut acc = BigInt::zero();
                for c in 0..m {
                    for e in 0..m {
                        acc += &self.u[c][a] * j.get(c, e) * &self.u[e][b];
                    }
                }
                let expected = if a == b { BigInt::from(self.d[a]) } else { BigInt::zero() };
                if !(acc - expected).mod_floor(&k).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_bigint(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    let mut sign = 1;
    let mut prev = BigInt::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return BigInt::zero();
        };
        if p != c {
            m.swap(p, c);
            sign = -sign;
        }
        for r in c + 1..n {
            for cc in c + 1..n {
                let v = (&m[r][cc] * &m[c][c] - &m[r][c] * &m[c][cc]) / &prev;
                m[r][cc] = v;
            }
            m[r][c] = BigInt::zero();
        }
        prev = m[c][c].clone();
    }
    &m[n - 1][n - 1] * sign
}

/// Working state: `a` holds `U^T J U mod k`, `u` the accumulated transform.
struct Elimination<'a> {
    ring: &'a ModK,
    m: usize,
    a: Vec<u64>,
    u: Vec<Vec<BigInt>>,
}

impl Elimination<'_> {
    fn at(&self, i: usize, j: usize) -> u64 {
        self.a[i * self.m + j]
    }

    /// Congruence by `E = I + coef * e_src e_tgt^T`: column `tgt` of `U` gains
    /// `coef` times column `src`, and `A` becomes `E^T A E`.
    fn add_multiple(&mut self, tgt: usize, src: usize, coef: u64) {
        let (m, k) = (self.m, self.ring);
        for c in 0..m {
            let v = k.add(self.at(tgt, c), k.mul(coef, self.at(src, c)));
            self.a[tgt * m + c] = v;
        }
        for r in 0..m {
            let v = k.add(self.at(r, tgt), k.mul(coef, self.at(r, src)));
            self.a[r * m + tgt] = v;
        }
        let coef = BigInt::from(coef);
        for row in self.u.iter_mut() {
            let v = &row[src] * &coef;
            row[tgt] += v;
        }
    }
}

/// Diagonalizes the linking matrix modulo `k = p^e` by unimodular congruence.
///
/// Each round picks an active entry of minimal p-adic valuation, preferring
/// diagonal entries and then the lowest row index. An off-diagonal pivot
/// `(i, j)` is first moved to the diagonal by the slide `column_i +=
/// column_j`; since `p` is odd, `J_ii + 2 J_ij + J_jj` keeps the minimal
/// valuation. The pivot then clears its row and column. Once every remaining
/// entry vanishes mod `k`, the rest of `d` is zero.
pub fn diagonalize_mod_k(l: &FramedLinkMatrix, ring: &ModK) -> Result<DiagonalizationResult> {
    let m = l.m();
    let mut el = Elimination {
        ring,
        m,
        a: (0..m * m).map(|idx| ring.reduce(i128::from(l.get(idx / m, idx % m)))).collect(),
        u: (0..m)
            .map(|i| (0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect(),
    };
    let mut active: Vec<usize> = (0..m).collect();
    let mut d = vec![0u64; m];

    while !active.is_empty() {
        let val = |el: &Elimination, i: usize, j: usize| ring.valuation(el.at(i, j));
        let diag = active.iter().map(|&i| (val(&el, i, i), i)).min();
        let off = active
            .iter()
            .flat_map(|&i| active.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
            .map(|(i, j)| (val(&el, i, j), i, j))
            .min();
        let (v, r) = match (diag, off) {
            (Some((vd, i)), Some((vo, _, _))) if vd <= vo => (vd, i),
            (Some((vd, i)), None) => (vd, i),
            (_, Some((vo, i, j))) => {
                el.add_multiple(i, j, 1);
                (vo, i)
            }
            (None, None) => unreachable!("active set is non-empty"),
        };
        if v >= ring.e() {
            // remaining block vanishes mod k
            break;
        }

        let pv = ring.prime_power(v);
        let modulus = ring.k() / pv;
        let unit = el.at(r, r) / pv;
        let inv = crate::numtheory::mod_inv(i128::from(unit), modulus).expect("pivot unit");
        for &t in &active {
            if t == r || el.at(t, r) == 0 {
                continue;
            }
            let q = el.at(t, r) / pv;
            let c = (u128::from(q) * u128::from(inv) % u128::from(modulus)) as u64;
            let neg = ring.reduce(-i128::from(c));
            el.add_multiple(t, r, neg);
        }
        debug_assert!(active.iter().all(|&t| t == r || el.at(t, r) == 0));
        d[r] = el.at(r, r);
        active.retain(|&t| t != r);
    }

    let mut u = el.u;
    if m > 0 && det_bigint(&u).is_negative() {
        for row in u.iter_mut() {
            row[0] = -&row[0];
        }
    }
    Ok(DiagonalizationResult { u, d })
}
