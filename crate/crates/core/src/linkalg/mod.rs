//! Linking matrices of framed links and the Kirby moves acting on them.

mod diagonalize;
mod signature;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::schema::{self, SchemaError};

pub use diagonalize::{det_bigint, diagonalize_mod_k, DiagonalizationResult};
pub use signature::{signature, signature_over};

/// Symmetric integer linking matrix: linking numbers off the diagonal,
/// framings (self-linking numbers) on it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FramedLinkMatrix {
    m: usize,
    entries: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn of(x: i64) -> Option<Self> {
        match x {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl FramedLinkMatrix {
    /// The empty link (presents `S^3`).
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn zeros(m: usize) -> Self {
        Self { m, entries: vec![0; m * m] }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let m = rows.len();
        let mut entries = Vec::with_capacity(m * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {m}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        let out = Self { m, entries };
        for i in 0..m {
            for j in i + 1..m {
                if out.get(i, j) != out.get(j, i) {
                    return Err(Error::InvalidMatrix(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(out)
    }

    pub fn diagonal(framings: &[i64]) -> Self {
        let mut out = Self::zeros(framings.len());
        for (i, &r) in framings.iter().enumerate() {
            out.entries[i * out.m + i] = r;
        }
        out
    }

    /// Component count.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.m + j]
    }

    fn set_sym(&mut self, i: usize, j: usize, v: i64) {
        self.entries[i * self.m + j] = v;
        self.entries[j * self.m + i] = v;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.m.max(1)).take(self.m).map(<[i64]>::to_vec).collect()
    }

    /// `n^T J n` in exact integer arithmetic.
    pub fn quadratic_form(&self, n: &[i64]) -> i128 {
        assert_eq!(n.len(), self.m);
        let mut acc = 0i128;
        for i in 0..self.m {
            for j in 0..self.m {
                acc += i128::from(n[i]) * i128::from(self.get(i, j)) * i128::from(n[j]);
            }
        }
        acc
    }

    /// Components that are split unknots with framing `+-1`, i.e. legal
    /// blow-down targets.
    pub fn split_unit_components(&self) -> Vec<usize> {
        (0..self.m)
            .filter(|&i| {
                self.get(i, i).abs() == 1 && (0..self.m).all(|j| j == i || self.get(i, j) == 0)
            })
            .collect()
    }

    /// Adds a split unknot with framing `sign`.
    pub fn blow_up(&self, sign: Sign) -> Self {
        let m = self.m + 1;
        let mut out = Self::zeros(m);
        for i in 0..self.m {
            for j in 0..self.m {
                out.entries[i * m + j] = self.get(i, j);
            }
        }
        out.entries[m * m - 1] = sign.value();
        out
    }

    /// Removes component `i`, which must be a split `+-1`-framed unknot.
    pub fn blow_down(&self, i: usize) -> Result<Self> {
        if i >= self.m {
            return Err(Error::IndexOutOfRange { index: i, len: self.m });
        }
        if self.get(i, i).abs() != 1 {
            return Err(Error::IllegalMove(format!(
                "component {i} has framing {}, not +-1",
                self.get(i, i)
            )));
        }
        if let Some(j) = (0..self.m).find(|&j| j != i && self.get(i, j) != 0) {
            return Err(Error::IllegalMove(format!(
                "component {i} links component {j} ({})",
                self.get(i, j)
            )));
        }
        let keep: Vec<usize> = (0..self.m).filter(|&r| r != i).collect();
        let mut out = Self::zeros(self.m - 1);
        for (a, &r) in keep.iter().enumerate() {
            for (b, &c) in keep.iter().enumerate() {
                out.entries[a * out.m + b] = self.get(r, c);
            }
        }
        Ok(out)
    }

    /// Slides component `i` over component `j`: returns `E^T J E` with `E`
    /// the identity plus `sign` at `(j, i)`.
    pub fn handle_slide(&self, i: usize, j: usize, sign: Sign) -> Result<Self> {
        for idx in [i, j] {
            if idx >= self.m {
                return Err(Error::IndexOutOfRange { index: idx, len: self.m });
            }
        }
        if i == j {
            return Err(Error::IllegalMove(format!("cannot slide component {i} over itself")));
        }
        let s = sign.value();
        let overflow = || Error::Overflow("handle slide");
        let mut out = self.clone();
        for b in 0..self.m {
            if b == i {
                continue;
            }
            let v = self
                .get(i, b)
                .checked_add(s * self.get(j, b))
                .ok_or_else(overflow)?;
            out.set_sym(i, b, v);
        }
        let jj = self.get(i, i)
            .checked_add(2i64.checked_mul(s * self.get(i, j)).ok_or_else(overflow)?)
            .and_then(|x| x.checked_add(self.get(j, j)))
            .ok_or_else(overflow)?;
        out.set_sym(i, i, jj);
        Ok(out)
    }

    /// Parses `{"m": int, "J": [[int, ...], ...]}`, naming the JSON pointer of
    /// any offending field.
    pub fn from_json_value(v: &Value) -> std::result::Result<Self, SchemaError> {
        let m_val = schema::field(v, "", "m")?;
        let m = schema::integer(m_val, "/m")?;
        if m < 0 {
            return Err(SchemaError::new("/m", "component count must be non-negative"));
        }
        let m = m as usize;
        let rows = schema::array(schema::field(v, "", "J")?, "/J")?;
        if rows.len() != m {
            return Err(SchemaError::new("/J", format!("expected {m} rows, found {}", rows.len())));
        }
        let mut parsed = Vec::with_capacity(m);
        for (i, row) in rows.iter().enumerate() {
            let ptr = format!("/J/{i}");
            let row = schema::array(row, &ptr)?;
            if row.len() != m {
                return Err(SchemaError::new(ptr, format!("expected {m} entries, found {}", row.len())));
            }
            let vals = row
                .iter()
                .enumerate()
                .map(|(j, x)| schema::integer(x, &format!("{ptr}/{j}")))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            parsed.push(vals);
        }
        for i in 0..m {
            for j in i + 1..m {
                if parsed[i][j] != parsed[j][i] {
                    return Err(SchemaError::new(
                        format!("/J/{j}/{i}"),
                        format!("matrix is not symmetric: {} != {}", parsed[j][i], parsed[i][j]),
                    ));
                }
            }
        }
        Ok(Self::from_rows(&parsed).expect("validated above"))
    }
}

#[derive(Serialize)]
struct Wire {
    m: usize,
    #[serde(rename = "J")]
    j: Vec<Vec<i64>>,
}

impl Serialize for FramedLinkMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        Wire { m: self.m, j: self.rows() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FramedLinkMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        Self::from_json_value(&v).map_err(serde::de::Error::custom)
    }
}

/// A single Kirby move on a linking matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KirbyMove {
    BlowUp(Sign),
    BlowDown(usize),
    HandleSlide { i: usize, j: usize, sign: Sign },
}

impl KirbyMove {
    pub fn apply(&self, l: &FramedLinkMatrix) -> Result<FramedLinkMatrix> {
        match *self {
            KirbyMove::BlowUp(sign) => Ok(l.blow_up(sign)),
            KirbyMove::BlowDown(i) => l.blow_down(i),
            KirbyMove::HandleSlide { i, j, sign } => l.handle_slide(i, j, sign),
        }
    }

    /// Net change in component count.
    pub fn component_delta(&self) -> i64 {
        match self {
            KirbyMove::BlowUp(_) => 1,
            KirbyMove::BlowDown(_) => -1,
            KirbyMove::HandleSlide { .. } => 0,
        }
    }

    pub fn is_handle_slide(&self) -> bool {
        matches!(self, KirbyMove::HandleSlide { .. })
    }
}

/// Random script of `len` legal moves starting from `start`.
///
/// Blow-ups are suppressed once the link has `max_m` components; blow-downs
/// are only drawn when a split `+-1` unknot exists.
pub fn random_script<R: Rng + ?Sized>(
    rng: &mut R,
    start: &FramedLinkMatrix,
    len: usize,
    max_m: usize,
) -> Vec<KirbyMove> {
    let mut cur = start.clone();
    let mut script = Vec::with_capacity(len);
    let sign = |rng: &mut R| if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus };
    while script.len() < len {
        let downs = cur.split_unit_components();
        let mv = match rng.random_range(0..3) {
            0 if cur.m() < max_m => KirbyMove::BlowUp(sign(rng)),
            1 if !downs.is_empty() => KirbyMove::BlowDown(downs[rng.random_range(0..downs.len())]),
            2 if cur.m() >= 2 => {
                let i = rng.random_range(0..cur.m());
                let mut j = rng.random_range(0..cur.m() - 1);
                if j >= i {
                    j += 1;
                }
                KirbyMove::HandleSlide { i, j, sign: sign(rng) }
            }
            _ => continue,
        };
        // entries can only overflow on pathological inputs; skip such moves
        if let Ok(next) = mv.apply(&cur) {
            cur = next;
            script.push(mv);
        }
    }
    script
}
