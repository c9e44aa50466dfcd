//! Linking matrices of polygonal links in R^3.
//!
//! For closed polygons the Gauss linking integral splits into one term per
//! pair of segments. For segments `[a0, a1]` and `[b0, b1]` the difference
//! `b(t) - a(s)` is affine in `(s, t)`, so the pair's contribution is the
//! signed solid angle subtended at the origin by the flat parallelogram with
//! corners `b0 - a0`, `b1 - a0`, `b1 - a1`, `b0 - a1`, divided by `4 pi`.
//! The parallelogram is split into two triangles and each is evaluated with
//! the van Oosterom-Strackee formula, so the sum is exact up to rounding.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linkalg::FramedLinkMatrix;
use crate::scalar::Scalar;
use crate::schema::{self, SchemaError};
use crate::summation::TreeSum;

/// Maximum distance of the raw Gauss integral from the nearest integer.
pub const RESIDUAL_TOLERANCE: f64 = 1e-6;
/// Minimum distance between segments that are not adjacent on one curve.
pub const MIN_SEPARATION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Vec3<T>(pub [T; 3]);

impl<T: Scalar> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self([x, y, z])
    }

    pub fn from_f64(v: [f64; 3]) -> Self {
        Self(v.map(T::of))
    }

    pub fn dot(self, o: Self) -> T {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(self, o: Self) -> Self {
        let [a, b, c] = self.0;
        let [x, y, z] = o.0;
        Self([b * z - c * y, c * x - a * z, a * y - b * x])
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl<T: Scalar> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<T: Scalar> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl<T: Scalar> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self(self.0.map(|x| x * s))
    }
}

impl<T: Scalar> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|x| -x))
    }
}

/// Closed polygon; vertex `i` connects to vertex `(i + 1) mod n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve<T> {
    points: Vec<Vec3<T>>,
}

impl<T: Scalar> ClosedCurve<T> {
    /// Validates vertex count, finiteness, and that non-adjacent segments keep
    /// at least [`MIN_SEPARATION`] apart.
    pub fn new(points: Vec<Vec3<T>>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidCurve(format!("need at least 3 points, got {}", points.len())));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidCurve(format!("point {i} is not finite")));
        }
        let curve = Self { points };
        let n = curve.len();
        let eps = T::of(MIN_SEPARATION);
        for i in 0..n {
            let (a0, a1) = curve.segment(i);
            if (a1 - a0).norm() <= eps {
                return Err(Error::InvalidCurve(format!("segment {i} is degenerate")));
            }
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (b0, b1) = curve.segment(j);
                let d = segment_distance(a0, a1, b0, b1);
                if d <= eps {
                    return Err(Error::InvalidCurve(format!(
                        "segments {i} and {j} come within {:e}",
                        d.as_f64()
                    )));
                }
            }
        }
        Ok(curve)
    }

    pub fn points(&self) -> &[Vec3<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn segment(&self, i: usize) -> (Vec3<T>, Vec3<T>) {
        (self.points[i], self.points[(i + 1) % self.points.len()])
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { points }
    }

    /// Rigid translation.
    pub fn translated(&self, by: Vec3<T>) -> Self {
        Self { points: self.points.iter().map(|&p| p + by).collect() }
    }

    /// The push-off `p_i + delta * offset_i / |offset_i|`.
    pub fn pushed_off(&self, offsets: &[Vec3<T>], delta: T) -> Result<Self> {
        if offsets.len() != self.len() {
            return Err(Error::InvalidCurve(format!(
                "{} offsets for {} points",
                offsets.len(),
                self.len()
            )));
        }
        let points = self
            .points
            .iter()
            .zip(offsets)
            .enumerate()
            .map(|(i, (&p, &o))| {
                let n = o.norm();
                if n.is_zero() || !n.is_finite() {
                    return Err(Error::InvalidCurve(format!("offset {i} has no direction")));
                }
                Ok(p + o * (delta / n))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }
}

/// Closest distance between segments `[p0, p1]` and `[q0, q1]`.
pub fn segment_distance<T: Scalar>(p0: Vec3<T>, p1: Vec3<T>, q0: Vec3<T>, q1: Vec3<T>) -> T {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.dot(d1);
    let e = d2.dot(d2);
    let f = d2.dot(r);
    let c = d1.dot(r);
    let b = d1.dot(d2);
    let denom = a * e - b * b;
    let clamp = |x: T| x.max(T::zero()).min(T::one());

    let mut s = if denom > T::epsilon() * a * e { clamp((b * f - c * e) / denom) } else { T::zero() };
    let mut t = (b * s + f) / e;
    if t < T::zero() {
        t = T::zero();
        s = clamp(-c / a);
    } else if t > T::one() {
        t = T::one();
        s = clamp((b - c) / a);
    }
    ((p0 + d1 * s) - (q0 + d2 * t)).norm()
}

/// Minimum distance between any segment of `a` and any segment of `b`.
pub fn curve_distance<T: Scalar>(a: &ClosedCurve<T>, b: &ClosedCurve<T>) -> T {
    let mut best = T::infinity();
    for i in 0..a.len() {
        let (a0, a1) = a.segment(i);
        for j in 0..b.len() {
            let (b0, b1) = b.segment(j);
            best = best.min(segment_distance(a0, a1, b0, b1));
        }
    }
    best
}

/// Signed solid angle of the triangle `(r1, r2, r3)` seen from the origin.
fn triangle_solid_angle<T: Scalar>(r1: Vec3<T>, r2: Vec3<T>, r3: Vec3<T>) -> T {
    let (l1, l2, l3) = (r1.norm(), r2.norm(), r3.norm());
    let num = r1.dot(r2.cross(r3));
    let den = l1 * l2 * l3 + r1.dot(r2) * l3 + r1.dot(r3) * l2 + r2.dot(r3) * l1;
    T::of(2.0) * num.atan2(den)
}

/// Contribution of one segment pair to the Gauss integral, times `4 pi`.
fn segment_pair_angle<T: Scalar>(a0: Vec3<T>, a1: Vec3<T>, b0: Vec3<T>, b1: Vec3<T>) -> T {
    let r1 = b0 - a0;
    let r2 = b1 - a0;
    let r3 = b1 - a1;
    let r4 = b0 - a1;
    -(triangle_solid_angle(r1, r2, r3) + triangle_solid_angle(r1, r3, r4))
}

/// Raw Gauss linking integral of two disjoint closed polygons.
pub fn gauss_linking_integral<T: Scalar>(a: &ClosedCurve<T>, b: &ClosedCurve<T>) -> T {
    let mut sum = TreeSum::new();
    for i in 0..a.len() {
        let (a0, a1) = a.segment(i);
        for j in 0..b.len() {
            let (b0, b1) = b.segment(j);
            sum.push(segment_pair_angle(a0, a1, b0, b1));
        }
    }
    sum.total() / (T::of(4.0) * T::PI())
}

/// Integer linking number together with the raw integral it was rounded from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linking<T> {
    pub value: i64,
    pub raw: T,
    pub residual: T,
}

pub fn linking_number_detailed<T: Scalar>(a: &ClosedCurve<T>, b: &ClosedCurve<T>) -> Result<Linking<T>> {
    let dist = curve_distance(a, b);
    if dist <= T::of(MIN_SEPARATION) {
        return Err(Error::CurvesTooClose { distance: dist.as_f64(), threshold: MIN_SEPARATION });
    }
    let raw = gauss_linking_integral(a, b);
    let rounded = raw.round();
    let residual = (raw - rounded).abs();
    if residual.is_nan() || residual >= T::of(RESIDUAL_TOLERANCE) {
        return Err(Error::NonIntegralLinking { value: raw.as_f64(), tolerance: RESIDUAL_TOLERANCE });
    }
    Ok(Linking { value: rounded.to_i64().expect("finite linking number"), raw, residual })
}

/// Linking number of two disjoint closed polygons.
pub fn linking_number<T: Scalar>(a: &ClosedCurve<T>, b: &ClosedCurve<T>) -> Result<i64> {
    linking_number_detailed(a, b).map(|l| l.value)
}

/// Linking number of `curve` with its push-off, required to agree at `delta`,
/// `delta / 2` and `delta / 4`.
pub fn self_linking<T: Scalar>(curve: &ClosedCurve<T>, offsets: &[Vec3<T>], delta: T) -> Result<i64> {
    if delta <= T::zero() || !delta.is_finite() {
        return Err(Error::InvalidCurve(format!("push-off distance {delta} must be positive")));
    }
    let values = [T::one(), T::of(2.0), T::of(4.0)]
        .into_iter()
        .map(|div| linking_number(curve, &curve.pushed_off(offsets, delta / div)?))
        .collect::<Result<Vec<_>>>()?;
    if values.iter().any(|&v| v != values[0]) {
        return Err(Error::UnstableFraming { values });
    }
    Ok(values[0])
}

/// A link component with one framing direction per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct FramedCurve<T> {
    pub curve: ClosedCurve<T>,
    pub offsets: Vec<Vec3<T>>,
}

impl<T: Scalar> FramedCurve<T> {
    pub fn new(curve: ClosedCurve<T>, offsets: Vec<Vec3<T>>) -> Result<Self> {
        if offsets.len() != curve.len() {
            return Err(Error::InvalidCurve(format!(
                "{} offsets for {} points",
                offsets.len(),
                curve.len()
            )));
        }
        Ok(Self { curve, offsets })
    }
}

/// A framed polygonal link together with its push-off distance.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyLink<T> {
    pub components: Vec<FramedCurve<T>>,
    pub delta: T,
}

impl<T: Scalar> PolyLink<T> {
    /// Validates pairwise disjointness of the components.
    pub fn new(components: Vec<FramedCurve<T>>, delta: T) -> Result<Self> {
        for i in 0..components.len() {
            for j in i + 1..components.len() {
                let d = curve_distance(&components[i].curve, &components[j].curve);
                if d <= T::of(MIN_SEPARATION) {
                    return Err(Error::Component {
                        i,
                        j,
                        source: Box::new(Error::CurvesTooClose {
                            distance: d.as_f64(),
                            threshold: MIN_SEPARATION,
                        }),
                    });
                }
            }
        }
        Ok(Self { components, delta })
    }

    /// Parses `{"components": [{"points": [...], "offsets": [...]}, ...],
    /// "delta": float}`.
    pub fn from_json_value(v: &Value) -> std::result::Result<Self, SchemaError> {
        let delta = schema::number(schema::field(v, "", "delta")?, "/delta")?;
        if delta <= 0.0 {
            return Err(SchemaError::new("/delta", "push-off distance must be positive"));
        }
        let comps = schema::array(schema::field(v, "", "components")?, "/components")?;
        let mut components = Vec::with_capacity(comps.len());
        for (c, comp) in comps.iter().enumerate() {
            let ptr = format!("/components/{c}");
            let read = |name: &str| -> std::result::Result<Vec<Vec3<T>>, SchemaError> {
                let p = format!("{ptr}/{name}");
                schema::array(schema::field(comp, &ptr, name)?, &p)?
                    .iter()
                    .enumerate()
                    .map(|(i, x)| schema::triple(x, &format!("{p}/{i}")).map(Vec3::from_f64))
                    .collect()
            };
            let points = read("points")?;
            let offsets = read("offsets")?;
            if offsets.len() != points.len() {
                return Err(SchemaError::new(
                    format!("{ptr}/offsets"),
                    format!("expected {} offsets, found {}", points.len(), offsets.len()),
                ));
            }
            let curve = ClosedCurve::new(points)
                .map_err(|e| SchemaError::new(format!("{ptr}/points"), e.to_string()))?;
            components.push(FramedCurve { curve, offsets });
        }
        Self::new(components, T::of(delta)).map_err(|e| SchemaError::new("/components", e.to_string()))
    }
}

impl<'de, T: Scalar> Deserialize<'de> for PolyLink<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        Self::from_json_value(&v).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize)]
struct ComponentWire<'a, T> {
    points: &'a [Vec3<T>],
    offsets: &'a [Vec3<T>],
}

impl<T: Scalar + Serialize> Serialize for PolyLink<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let comps: Vec<_> = self
            .components
            .iter()
            .map(|c| ComponentWire { points: c.curve.points(), offsets: &c.offsets })
            .collect();
        let mut s = serializer.serialize_struct("PolyLink", 2)?;
        s.serialize_field("components", &comps)?;
        s.serialize_field("delta", &self.delta)?;
        s.end()
    }
}

/// Linking matrix of a framed polygonal link: pairwise linking numbers off
/// the diagonal and push-off self-linking on it.
pub fn linking_matrix<T: Scalar>(link: &PolyLink<T>, delta: T) -> Result<FramedLinkMatrix> {
    let m = link.components.len();
    let mut rows = vec![vec![0i64; m]; m];
    for i in 0..m {
        let c = &link.components[i];
        rows[i][i] = self_linking(&c.curve, &c.offsets, delta)
            .map_err(|e| Error::Component { i, j: i, source: Box::new(e) })?;
        for j in i + 1..m {
            let v = linking_number(&c.curve, &link.components[j].curve)
                .map_err(|e| Error::Component { i, j, source: Box::new(e) })?;
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    FramedLinkMatrix::from_rows(&rows)
}

/// Curves used by tests, examples and the CLI fixtures.
pub mod fixtures {
    use super::*;

    /// Axis-aligned square of side 2 in the plane spanned by axes `u`, `v`,
    /// centered at `center`, traversed counterclockwise in `(u, v)`.
    pub fn square<T: Scalar>(center: [f64; 3], u: usize, v: usize) -> ClosedCurve<T> {
        let corners = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];
        let points = corners
            .iter()
            .map(|&(a, b)| {
                let mut p = center;
                p[u] += a;
                p[v] += b;
                Vec3::from_f64(p)
            })
            .collect();
        ClosedCurve::new(points).expect("square is a valid curve")
    }

    /// Hopf link: a square in the xy-plane at the origin and a square in the
    /// xz-plane centered at `(1, 0, 0)`.
    pub fn hopf<T: Scalar>() -> (ClosedCurve<T>, ClosedCurve<T>) {
        (square([0.0, 0.0, 0.0], 0, 1), square([1.0, 0.0, 0.0], 0, 2))
    }

    /// Regular `n`-gon of radius `r` in the plane `z = z0` centered at `(cx, cy)`.
    pub fn circle<T: Scalar>(n: usize, r: f64, center: [f64; 3]) -> ClosedCurve<T> {
        let points = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                Vec3::from_f64([center[0] + r * t.cos(), center[1] + r * t.sin(), center[2]])
            })
            .collect();
        ClosedCurve::new(points).expect("polygon is a valid curve")
    }

    /// Framing of an `n`-gon from [`circle`] that turns `twists` full times
    /// around the tangent, right-handed for positive `twists`, starting from
    /// the outward radial direction. Its self-linking number is `twists`.
    pub fn twisted_offsets<T: Scalar>(n: usize, twists: i64) -> Vec<Vec3<T>> {
        (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                let phi = t * twists as f64;
                let radial = [t.cos(), t.sin(), 0.0];
                Vec3::from_f64([radial[0] * phi.cos(), radial[1] * phi.cos(), -phi.sin()])
            })
            .collect()
    }
}
