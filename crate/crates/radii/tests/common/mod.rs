#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use radii::contraction::{EstimateSettings, SegmentData};
use radii::{CosinePoint, ModelParams, SpaceParams};

pub fn space() -> SpaceParams {
    SpaceParams::new(2.0, 10.0).unwrap()
}

pub fn e_d(m: usize) -> CosinePoint<f64> {
    let mut t = CosinePoint::zeros(m);
    t.d = 1.0;
    t
}

/// A straight piece of the homogeneous branch from `d0` to `d1`.
pub fn trivial_segment(d0: f64, d1: f64, m: usize) -> SegmentData {
    let p = ModelParams::default();
    let mut t = e_d(m);
    if d1 < d0 {
        t.d = -1.0;
    }
    SegmentData::new(
        p.constant_point(d0, m),
        p.constant_point(d1, m),
        t.clone(),
        t,
        space(),
        p,
        EstimateSettings::default(),
    )
    .unwrap()
}

/// The homogeneous state plus decaying noise of relative size `amp`.
pub fn noisy_point(rng: &mut StdRng, d: f64, m: usize, amp: f64) -> CosinePoint<f64> {
    let mut u = ModelParams::default().constant_point(d, m);
    for c in 0..3 {
        for (n, v) in u.comp_mut(c).coeffs_mut().iter_mut().enumerate() {
            *v += amp * rng.gen_range(-1.0..1.0) / (1.0 + (n * n) as f64);
        }
    }
    u
}

/// A short segment between two noisy points near `d`, with tangents close
/// to the `d` direction.
pub fn noisy_segment(rng: &mut StdRng, d: f64, m: usize, amp: f64) -> SegmentData {
    let u0 = noisy_point(rng, d, m, amp);
    let mut u1 = noisy_point(rng, d - 1e-4, m, amp);
    u1.d = d - 1e-4;
    let tangent = |rng: &mut StdRng| {
        let mut t = e_d(m);
        t.d = -1.0;
        for c in 0..3 {
            for v in t.comp_mut(c).coeffs_mut().iter_mut() {
                *v = 1e-3 * rng.gen_range(-1.0..1.0);
            }
        }
        t
    };
    let (t0, t1) = (tangent(rng), tangent(rng));
    SegmentData::new(u0, u1, t0, t1, space(), ModelParams::default(), EstimateSettings::default()).unwrap()
}
