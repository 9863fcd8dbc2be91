//! Property tests against brute-force oracles.

mod common;

use common::*;
use hadalg::algebra::Element;
use hadalg::ideals::{annihilator_generator, index_order, krull_zero, p1_p2_check, Order};
use hadalg::json::{element_from_value, element_to_value, registry_with};
use hadalg::matalg::{mat_exp, mat_log_with, mat_solve, LogOptions, MatElement, DEFAULT_RTOL};
use hadalg::{EpSeq, Layout, Weight, C64};
use proptest::collection::vec;
use proptest::prelude::*;

fn dyadic_s() -> impl Strategy<Value = C64> + Clone {
    (-8i32..=8, -8i32..=8).prop_map(|(a, b)| C64::new(a as f64 / 4.0, b as f64 / 4.0))
}

fn sparse_s() -> impl Strategy<Value = C64> + Clone {
    prop_oneof![2 => Just(ZERO), 3 => dyadic_s()]
}

fn raw_s(values: impl Strategy<Value = C64> + Clone) -> impl Strategy<Value = (Vec<C64>, Vec<C64>)> {
    (vec(values.clone(), 0..=3), vec(values, 1..=4))
}

fn elem_s(values: impl Strategy<Value = C64> + Clone) -> impl Strategy<Value = Element> {
    raw_s(values).prop_map(|(p, c)| Element::from_normalized(fw(), EpSeq::new(p, c).unwrap()))
}

/// Value of the uncanonicalized pair at index `n`.
fn raw_get(p: &[C64], c: &[C64], n: usize) -> C64 {
    if n < p.len() {
        p[n]
    } else {
        c[(n - p.len()) % c.len()]
    }
}

fn mat_s(rows: usize, cols: usize) -> impl Strategy<Value = MatElement> {
    vec(elem_s(dyadic_s()), rows * cols).prop_map(move |es| MatElement::new(fw(), rows, cols, es).unwrap())
}

fn positions(ms: &[&MatElement]) -> usize {
    let refs: Vec<&Element> = ms.iter().flat_map(|m| m.entries()).collect();
    scan_len(&refs)
}

fn spectral(m: &CMat) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

fn from_positions(layout: Layout, mats: &[CMat]) -> MatElement {
    let (rows, cols) = mats[0].shape();
    let entries = (0..rows * cols)
        .map(|idx| {
            let vals = mats.iter().map(|m| m[(idx / cols, idx % cols)]).collect();
            Element::from_samples(fw(), layout, vals).unwrap()
        })
        .collect();
    MatElement::new(fw(), rows, cols, entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn factorial_tail_bound_is_sound_and_monotone(big_n in 0usize..40, frac in 0.0f64..1.0) {
        let w = Weight::factorial();
        let r = frac * (big_n as f64 + 2.0) / 2.0;
        let t = w.tail_bound(big_n, r).unwrap();
        let direct: f64 = (big_n + 1..big_n + 400)
            .map(|n| if r == 0.0 { 0.0 } else { (n as f64 * r.ln() - w.log_p(n)).exp() })
            .sum();
        prop_assert!(direct <= t * (1.0 + 1e-12));
        prop_assert!(w.tail_bound(big_n + 1, r).unwrap() <= t);
    }

    #[test]
    fn super_exp_tail_bound_is_sound(big_n in 2usize..30, r in 0.0f64..4.0) {
        let w = Weight::super_exp(2.0, 2.0).unwrap();
        if let Ok(t) = w.tail_bound(big_n, r) {
            let direct: f64 = (big_n + 1..big_n + 40)
                .map(|n| if r == 0.0 { 0.0 } else { (n as f64 * r.ln() - w.log_p(n)).exp() })
                .sum();
            prop_assert!(direct <= t * (1.0 + 1e-12));
        }
    }

    #[test]
    fn canonical_form_keeps_values_and_is_idempotent((p, c) in raw_s(sparse_s())) {
        let s = EpSeq::new(p.clone(), c.clone()).unwrap();
        for n in 0..p.len() + 3 * c.len() {
            prop_assert_eq!(s.get(n), raw_get(&p, &c, n));
        }
        prop_assert_eq!(EpSeq::new(s.prefix().to_vec(), s.cycle().to_vec()).unwrap(), s.clone());
        prop_assert!(s.prefix().len() <= p.len() && s.cycle().len() <= c.len());
    }

    #[test]
    fn zip_is_pointwise((p1, c1) in raw_s(dyadic_s()), (p2, c2) in raw_s(dyadic_s())) {
        let (a, b) = (EpSeq::new(p1.clone(), c1.clone()).unwrap(), EpSeq::new(p2.clone(), c2.clone()).unwrap());
        let z = a.zip(&b, |x, y| x * y - y).unwrap();
        let n = p1.len().max(p2.len()) + 2 * lcm(c1.len(), c2.len());
        for k in 0..n {
            let (x, y) = (raw_get(&p1, &c1, k), raw_get(&p2, &c2, k));
            prop_assert_eq!(z.get(k), x * y - y);
        }
    }

    #[test]
    fn ring_laws(f in elem_s(dyadic_s()), g in elem_s(dyadic_s()), h in elem_s(dyadic_s())) {
        prop_assert_eq!(f.star(&g).unwrap().star(&h).unwrap(), f.star(&g.star(&h).unwrap()).unwrap());
        prop_assert_eq!(f.star(&g).unwrap(), g.star(&f).unwrap());
        prop_assert_eq!(
            f.add(&g).unwrap().star(&h).unwrap(),
            f.star(&h).unwrap().add(&g.star(&h).unwrap()).unwrap()
        );
        prop_assert_eq!(f.add(&f.neg().unwrap()).unwrap(), Element::zero(fw()));
        prop_assert_eq!(f.star(&Element::unit(fw())).unwrap(), f);
    }

    #[test]
    fn element_json_round_trip(f in elem_s(sparse_s())) {
        let v = element_to_value(&f).unwrap();
        prop_assert_eq!(element_from_value(&v, &registry_with(&fw())).unwrap(), f);
    }

    #[test]
    fn u_view_is_multiplicative(a in mat_s(2, 3), b in mat_s(3, 2)) {
        let ab = a.mul(&b).unwrap();
        for k in 0..positions(&[&a, &b]) {
            let want = a.u_at(k).unwrap() * b.u_at(k).unwrap();
            prop_assert!(max_abs(&(ab.u_at(k).unwrap() - want)) <= 1e-12);
        }
    }

    #[test]
    fn det_matches_position_determinant(a in mat_s(3, 3)) {
        let d = a.det().unwrap();
        for k in 0..positions(&[&a]) {
            let want = a.u_at(k).unwrap().determinant();
            prop_assert!((d.normalized_at(k).unwrap() - want).norm() <= 1e-10 * want.norm().max(1.0));
        }
    }

    #[test]
    fn solve_returns_minimal_norm_solution(seed in any::<u64>(), m in 1usize..=4, n in 1usize..=4) {
        let mut r = rng(seed);
        let layout = random_layout(&mut r, 2, 3);
        let amats: Vec<CMat> = (0..layout.len()).map(|_| random_cmat(&mut r, m, n, 1.0)).collect();
        let x0s: Vec<CMat> = (0..layout.len()).map(|_| random_cmat(&mut r, n, 1, 1.0)).collect();
        let bmats: Vec<CMat> = amats.iter().zip(&x0s).map(|(a, x)| a * x).collect();
        let sol = mat_solve(&from_positions(layout, &amats), &from_positions(layout, &bmats), DEFAULT_RTOL).unwrap();
        for k in 0..layout.len() {
            let x = sol.x.u_at(k).unwrap();
            // oracle: the pseudo-inverse solution
            let pinv = amats[k].clone().pseudo_inverse(1e-12).unwrap();
            let want = pinv * &bmats[k];
            prop_assert!(spectral(&(&x - want)) <= 1e-8);
            prop_assert!(x.norm() <= x0s[k].norm() + 1e-10);
        }
    }

    #[test]
    fn matrix_log_round_trip(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let layout = random_layout(&mut r, 1, 2);
        let bs: Vec<CMat> = (0..layout.len()).map(|_| clamp_spectral(random_cmat(&mut r, n, n, 1.0), 1.5)).collect();
        let a = mat_exp(&from_positions(layout, &bs)).unwrap();
        let out = mat_log_with(&a, &LogOptions { nodes: 512, agreement_tol: 1e-6 }).unwrap();
        let back = mat_exp(&out.log).unwrap();
        for k in 0..layout.len() {
            prop_assert!(spectral(&(back.u_at(k).unwrap() - a.u_at(k).unwrap())) <= 1e-9);
        }
    }

    #[test]
    fn index_order_matches_scan(f in elem_s(sparse_s()), k in 0usize..16) {
        let rep = index_order(&f, k, 0).unwrap();
        let vals = values(&f, scan_len(&[&f]) + k);
        let want = brute_run(&vals, k).map_or(Order::Infinite, Order::Finite);
        prop_assert_eq!(rep.m, want);
        prop_assert!(rep.certainty == hadalg::Certainty::Exact);
    }

    #[test]
    fn order_inequalities(f in elem_s(sparse_s()), g in elem_s(sparse_s()), k in 0usize..12) {
        prop_assert!(p1_p2_check(&f, &g, k, 64).unwrap().both());
    }

    #[test]
    fn krull_zero_matches_blocks(n in 1u32..=3, m in 0usize..4096) {
        prop_assert_eq!(krull_zero(n, m), krull_zero_oracle(n, 4096)[m]);
    }

    #[test]
    fn annihilator_is_the_kernel(f in elem_s(sparse_s()), h in elem_s(sparse_s())) {
        let chi = annihilator_generator(&f).unwrap();
        prop_assert_eq!(f.star(&chi).unwrap(), Element::zero(fw()));
        let killed = f.star(&h).unwrap() == Element::zero(fw());
        prop_assert_eq!(killed, h.star(&chi).unwrap() == h);
        prop_assert_eq!(killed, h.divide(&chi).is_ok());
    }
}
