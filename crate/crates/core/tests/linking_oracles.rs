//! Linking numbers checked against two independent computations: direct
//! quadrature of the Gauss double integral, and the signed crossing count of
//! a planar projection.

use qtopo::linkgeom::{curve_distance, linking_number_detailed};
use qtopo::{linking_number, ClosedCurve64, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

type P = [f64; 3];

fn sub(a: P, b: P) -> P {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: P, b: P) -> P {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: P, b: P) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Midpoint rule for `(1/4pi) sum (r1 - r2) . (dr1 x dr2) / |r1 - r2|^3`.
fn quadrature(a: &[P], b: &[P], sub_steps: usize) -> f64 {
    let sample = |c: &[P]| -> Vec<(P, P)> {
        let mut out = Vec::new();
        for i in 0..c.len() {
            let (p, q) = (c[i], c[(i + 1) % c.len()]);
            let d = sub(q, p);
            let h = 1.0 / sub_steps as f64;
            for s in 0..sub_steps {
                let t = (s as f64 + 0.5) * h;
                out.push(([p[0] + t * d[0], p[1] + t * d[1], p[2] + t * d[2]], [d[0] * h, d[1] * h, d[2] * h]));
            }
        }
        out
    };
    let (sa, sb) = (sample(a), sample(b));
    let mut acc = 0.0;
    for &(r1, d1) in &sa {
        for &(r2, d2) in &sb {
            let r = sub(r1, r2);
            let n = dot(r, r).sqrt();
            acc += dot(r, cross(d1, d2)) / (n * n * n);
        }
    }
    acc / (4.0 * PI)
}

/// Half the signed count of crossings in the projection along `z`; a crossing
/// is positive when `over x under` points towards the viewer.
fn crossing_count(a: &[P], b: &[P]) -> i64 {
    let mut twice = 0i64;
    for i in 0..a.len() {
        let (p0, p1) = (a[i], a[(i + 1) % a.len()]);
        for j in 0..b.len() {
            let (q0, q1) = (b[j], b[(j + 1) % b.len()]);
            let (u, v) = (sub(p1, p0), sub(q1, q0));
            let den = u[0] * v[1] - u[1] * v[0];
            if den.abs() < 1e-14 {
                continue;
            }
            let w = sub(q0, p0);
            let s = (w[0] * v[1] - w[1] * v[0]) / den;
            let t = (w[0] * u[1] - w[1] * u[0]) / den;
            if !(0.0..1.0).contains(&s) || !(0.0..1.0).contains(&t) {
                continue;
            }
            let za = p0[2] + s * u[2];
            let zb = q0[2] + t * v[2];
            let (over, under) = if za > zb { (u, v) } else { (v, u) };
            twice += if cross(over, under)[2] > 0.0 { 1 } else { -1 };
        }
    }
    assert_eq!(twice % 2, 0, "crossings of a closed pair come in pairs");
    twice / 2
}

fn curve(points: &[P]) -> ClosedCurve64 {
    ClosedCurve64::new(points.iter().map(|&p| Vec3::from_f64(p)).collect()).unwrap()
}

/// A noisy polygonal circle in a random plane.
fn random_loop(rng: &mut ChaCha8Rng, center: P) -> Vec<P> {
    let n = rng.random_range(5..=9);
    let axis = |rng: &mut ChaCha8Rng| -> P {
        let v = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let l = dot(v, v).sqrt();
        [v[0] / l, v[1] / l, v[2] / l]
    };
    let e1 = axis(rng);
    let raw = axis(rng);
    let proj = dot(raw, e1);
    let e2 = sub(raw, [proj * e1[0], proj * e1[1], proj * e1[2]]);
    let l2 = dot(e2, e2).sqrt();
    let e2 = [e2[0] / l2, e2[1] / l2, e2[2] / l2];
    (0..n)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / n as f64 + rng.random_range(-0.2..0.2);
            let r = rng.random_range(0.8..1.2);
            let (c, s) = (r * th.cos(), r * th.sin());
            [
                center[0] + c * e1[0] + s * e2[0] + rng.random_range(-0.1..0.1),
                center[1] + c * e1[1] + s * e2[1] + rng.random_range(-0.1..0.1),
                center[2] + c * e1[2] + s * e2[2] + rng.random_range(-0.1..0.1),
            ]
        })
        .collect()
}

fn random_pairs(seed: u64, count: usize) -> Vec<(Vec<P>, Vec<P>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let a = random_loop(&mut rng, [0.0; 3]);
        let c = [rng.random_range(-1.2..1.2), rng.random_range(-1.2..1.2), rng.random_range(-0.5..0.5)];
        let b = random_loop(&mut rng, c);
        let (Ok(ca), Ok(cb)) = (ClosedCurve64::new(a.iter().map(|&p| Vec3::from_f64(p)).collect()), ClosedCurve64::new(b.iter().map(|&p| Vec3::from_f64(p)).collect())) else {
            continue;
        };
        // keep the quadrature well resolved
        if curve_distance(&ca, &cb) > 0.15 {
            out.push((a, b));
        }
    }
    out
}

#[test]
fn hopf_sign_matches_oracles() {
    let (a, b) = qtopo::linkgeom::fixtures::hopf::<f64>();
    let pa: Vec<P> = a.points().iter().map(|p| p.0).collect();
    let pb: Vec<P> = b.points().iter().map(|p| p.0).collect();
    let lk = linking_number(&a, &b).unwrap();
    assert_eq!(lk.abs(), 1);
    assert_eq!(crossing_count(&pa, &pb), lk);
    assert!((quadrature(&pa, &pb, 200) - lk as f64).abs() < 0.02);
}

#[test]
fn random_pairs_match_quadrature_and_crossings() {
    let pairs = random_pairs(2024, 50);
    let mut linked = 0;
    for (a, b) in &pairs {
        let lk = linking_number(&curve(a), &curve(b)).unwrap();
        let q = quadrature(a, b, 60);
        assert!((q - lk as f64).abs() < 0.1, "quadrature {q} vs {lk}");
        assert_eq!(crossing_count(a, b), lk);
        linked += usize::from(lk != 0);
    }
    assert!(linked >= 5, "sample should contain linked pairs ({linked})");
}

#[test]
fn random_pairs_are_symmetric_with_small_residual() {
    for (a, b) in random_pairs(77, 50) {
        let (ca, cb) = (curve(&a), curve(&b));
        let ab = linking_number_detailed(&ca, &cb).unwrap();
        let ba = linking_number_detailed(&cb, &ca).unwrap();
        assert_eq!(ab.value, ba.value);
        assert!(ab.residual < 1e-6 && ba.residual < 1e-6);
        assert_eq!(linking_number(&ca.reversed(), &cb).unwrap(), -ab.value);
    }
}
