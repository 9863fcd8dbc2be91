//! Random generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use hadalg::algebra::Element;
use hadalg::coeffseq::Layout;
use hadalg::{EpSeq, Weight, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CMat = DMatrix<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fw() -> Weight {
    Weight::factorial()
}

/// Quarter-integer Gaussian value with parts in `[-2, 2]`; products and sums
/// of a few of these are exact in binary floating point.
pub fn dyadic(r: &mut ChaCha8Rng) -> C64 {
    let v = |r: &mut ChaCha8Rng| r.random_range(-8i32..=8) as f64 / 4.0;
    C64::new(v(r), v(r))
}

/// Dyadic value, zero with probability `p_zero`.
pub fn sparse_dyadic(r: &mut ChaCha8Rng, p_zero: f64) -> C64 {
    if r.random_bool(p_zero) {
        ZERO
    } else {
        loop {
            let z = dyadic(r);
            if z != ZERO {
                return z;
            }
        }
    }
}

/// Uniform value in the square `[-s, s]^2`.
pub fn gaussian_box(r: &mut ChaCha8Rng, s: f64) -> C64 {
    C64::new(r.random_range(-s..=s), r.random_range(-s..=s))
}

pub fn random_layout(r: &mut ChaCha8Rng, max_prefix: usize, max_cycle: usize) -> Layout {
    Layout::new(r.random_range(0..=max_prefix), r.random_range(1..=max_cycle))
}

pub fn seq_with(r: &mut ChaCha8Rng, layout: Layout, mut value: impl FnMut(&mut ChaCha8Rng) -> C64) -> EpSeq {
    let prefix = (0..layout.prefix_len).map(|_| value(r)).collect();
    let cycle = (0..layout.cycle_len).map(|_| value(r)).collect();
    EpSeq::new(prefix, cycle).unwrap()
}

pub fn element_with(r: &mut ChaCha8Rng, layout: Layout, value: impl FnMut(&mut ChaCha8Rng) -> C64) -> Element {
    Element::from_normalized(fw(), seq_with(r, layout, value))
}

pub fn dyadic_element(r: &mut ChaCha8Rng) -> Element {
    let l = random_layout(r, 3, 4);
    element_with(r, l, dyadic)
}

pub fn sparse_element(r: &mut ChaCha8Rng, p_zero: f64) -> Element {
    let l = random_layout(r, 3, 4);
    element_with(r, l, |r| sparse_dyadic(r, p_zero))
}

/// Length of the scan window `0..prefix + 2 * lcm(cycles)` for brute-force oracles.
pub fn scan_len(es: &[&Element]) -> usize {
    let mut p = 0;
    let mut l = 1;
    for e in es {
        let u = e.u().unwrap();
        p = p.max(u.prefix().len());
        l = lcm(l, u.cycle().len());
    }
    p + 2 * l
}

pub fn gcd_usize(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd_usize(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd_usize(a, b) * b
}

/// Materialized values of `e` at `0..n`.
pub fn values(e: &Element, n: usize) -> Vec<C64> {
    (0..n).map(|k| e.normalized_at(k).unwrap()).collect()
}

/// Zero run of a materialized sequence from `k` (None when it reaches the end).
pub fn brute_run(vals: &[C64], k: usize) -> Option<usize> {
    vals[k..].iter().position(|&z| z != ZERO)
}

/// Zero set of the witness family up to `horizon` by writing each block.
pub fn krull_zero_oracle(n: u32, horizon: usize) -> Vec<bool> {
    let mut zero = vec![false; horizon + 1];
    let mut a = 1usize;
    let mut k = 0u64;
    while a <= horizon {
        let len = k.pow(n + 1) as usize;
        for l in 0..=len {
            if a + l <= horizon {
                zero[a + l] = true;
            }
        }
        a *= 2;
        k += 1;
    }
    zero
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn random_cmat(r: &mut ChaCha8Rng, rows: usize, cols: usize, s: f64) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian_box(r, s))
}

/// Scales `m` so that its spectral norm is at most `bound`.
pub fn clamp_spectral(m: CMat, bound: f64) -> CMat {
    let s = m.clone().svd(false, false).singular_values.max();
    if s > bound {
        m * C64::new(bound / s, 0.0)
    } else {
        m
    }
}
