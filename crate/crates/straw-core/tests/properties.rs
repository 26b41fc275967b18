//! Property-based invariants for the core library.

use proptest::prelude::*;

use straw_core::field::{PValueField, SparsityField, DEFAULT_CLIP};
use straw_core::lattice::{euclidean_distance, Lattice, Site};
use straw_core::normal;
use straw_core::procedures::{bh_procedure, straw_stepup, GridSpec};
use straw_core::weighting::{check_assumption_a4, varphi, varphi_inv, weighted_pvalues};

fn pfield(v: &[f64]) -> PValueField {
    PValueField::new(v.to_vec()).unwrap()
}

fn sfield(v: &[f64]) -> SparsityField {
    SparsityField::clamped(v.to_vec(), DEFAULT_CLIP).unwrap()
}

fn pi_vec(len: core::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..0.95, len)
}

fn p_vec(len: core::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, len)
}

proptest! {
    #[test]
    fn lattice_index_round_trip(
        extents in prop::collection::vec(1usize..10, 1..=3),
    ) {
        let lat = Lattice::new(&extents).unwrap();
        for idx in 0..lat.num_sites() {
            let s = lat.site_at(idx).unwrap();
            prop_assert_eq!(lat.linear_index(&s).unwrap(), idx);
            for (axis, &c) in s.coords().iter().enumerate() {
                prop_assert!(c >= 1 && c <= extents[axis] as i64);
            }
        }
    }

    #[test]
    fn distance_triangle_inequality(
        a in prop::collection::vec(-50i64..50, 3),
        b in prop::collection::vec(-50i64..50, 3),
        c in prop::collection::vec(-50i64..50, 3),
    ) {
        let sa = Site::new(&a).unwrap();
        let sb = Site::new(&b).unwrap();
        let sc = Site::new(&c).unwrap();
        let ab = euclidean_distance(&sa, &sb).unwrap();
        let bc = euclidean_distance(&sb, &sc).unwrap();
        let ac = euclidean_distance(&sa, &sc).unwrap();
        prop_assert!(ac <= ab + bc + 1e-9);
        prop_assert_eq!(ab, euclidean_distance(&sb, &sa).unwrap());
    }

    #[test]
    fn varphi_round_trip(x in 0.001f64..0.999, k in 0.2f64..8.0) {
        let y = varphi(x, k).unwrap();
        prop_assert!(y > 0.0);
        let back = varphi_inv(y, k);
        prop_assert!((back - x).abs() <= 1e-12 * x.max(1.0));
    }

    #[test]
    fn varphi_strictly_increasing(x in 0.01f64..0.98, k in 0.2f64..8.0) {
        let lo = varphi(x, k).unwrap();
        let hi = varphi(x + 0.01, k).unwrap();
        prop_assert!(hi > lo);
    }

    #[test]
    fn weighting_monotone_and_bounded(
        p in 0.0f64..=1.0,
        pi in 0.05f64..0.90,
        k in 0.3f64..6.0,
    ) {
        let w = weighted_pvalues(&pfield(&[p]), &sfield(&[pi]), k).unwrap();
        let v = w.values()[0];
        prop_assert!((0.0..=1.0).contains(&v));

        // monotone in the raw p-value
        let w2 = weighted_pvalues(&pfield(&[(p * 0.5)]), &sfield(&[pi]), k).unwrap();
        prop_assert!(w2.values()[0] <= v);

        // nonincreasing as local signal frequency grows
        let w3 = weighted_pvalues(&pfield(&[p]), &sfield(&[pi + 0.05]), k).unwrap();
        prop_assert!(w3.values()[0] <= v + 1e-15);
    }

    #[test]
    fn weighting_large_k_approaches_identity(
        p in 0.0f64..=1.0,
        pi in 0.05f64..0.95,
    ) {
        let w = weighted_pvalues(&pfield(&[p]), &sfield(&[pi]), 1e6).unwrap();
        prop_assert!((w.values()[0] - p).abs() < 1e-5);
    }

    #[test]
    fn coefficient_identity(pi in pi_vec(1..40), k in 0.3f64..6.0) {
        let p = vec![0.5; pi.len()];
        let w = weighted_pvalues(&pfield(&p), &sfield(&pi), k).unwrap();
        for (i, &x) in pi.iter().enumerate() {
            let direct = (1.0 - x).powf(1.0 - 1.0 / k) * x.powf(1.0 / k);
            prop_assert!((w.coefficients()[i] - direct).abs() <= 1e-12 * direct.max(1e-300));
        }
    }

    #[test]
    fn bh_alpha_monotone(p in p_vec(1..60), a1 in 0.01f64..0.5, a2 in 0.01f64..0.5) {
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let r_lo = bh_procedure(&p, lo).unwrap().rejection_count;
        let r_hi = bh_procedure(&p, hi).unwrap().rejection_count;
        prop_assert!(r_lo <= r_hi);
    }

    #[test]
    fn straw_alpha_monotone_and_maximal(
        p in p_vec(1..60),
        seedpi in pi_vec(1..2),
        a1 in 0.01f64..0.5,
        a2 in 0.01f64..0.5,
    ) {
        let pi: Vec<f64> = (0..p.len())
            .map(|i| 0.05 + 0.9 * ((seedpi[0] * (i as f64 + 1.3)).fract()))
            .collect();
        let w = weighted_pvalues(&pfield(&p), &sfield(&pi), 2.0).unwrap();
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        prop_assert!(straw_stepup(&w, lo).rejection_count <= straw_stepup(&w, hi).rejection_count);

        // maximality: every later candidate rank with an unclipped value violates
        let out = straw_stepup(&w, lo);
        let c: f64 = w.coefficients().iter().sum();
        let mut sorted = w.values().to_vec();
        sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (j0, &v) in sorted.iter().enumerate() {
            let j = j0 + 1;
            if j > out.rejection_count && v < 1.0 {
                prop_assert!(c * v / j as f64 > lo);
            }
        }
        if out.rejection_count > 0 {
            prop_assert!(c * out.threshold / out.rejection_count as f64 <= lo + 1e-12);
        }
    }

    #[test]
    fn a4_holds_at_k_two(pi in pi_vec(1..100)) {
        prop_assert!(check_assumption_a4(&sfield(&pi), 2.0));
    }

    #[test]
    fn grid_endpoints_and_length(b1 in 0.1f64..2.0, step in 0.05f64..1.0, l in 0usize..30) {
        let b2 = b1 + step * l as f64;
        let grid = GridSpec::new(b1, b2, l).unwrap();
        let pts = grid.points();
        prop_assert_eq!(pts.len(), l + 1);
        prop_assert!((pts[0] - b1).abs() < 1e-12);
        if l > 0 {
            prop_assert!((pts[l] - b2).abs() < 1e-9);
            for w in pts.windows(2) {
                prop_assert!(w[1] > w[0]);
            }
        }
    }

    #[test]
    fn normal_cdf_quantile_round_trip(p in 1e-10f64..1.0) {
        let q = normal::normal_quantile(p).unwrap();
        let back = normal::normal_cdf(q);
        prop_assert!((back - p).abs() <= 1e-11 * p.max(1e-3));
    }

    #[test]
    fn two_sided_p_symmetric_and_consistent(x in -8.0f64..8.0) {
        let p = normal::two_sided_p(x);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert_eq!(p, normal::two_sided_p(-x));
        let direct = 2.0 * (1.0 - normal::normal_cdf(x.abs()));
        prop_assert!((p - direct).abs() <= 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smoothing_output_is_clamped_weighted_average(
        vals in prop::collection::vec(0.0f64..=1.0, 30..60),
        h in 0.5f64..4.0,
        c in 1.0f64..8.0,
    ) {
        let lat = Lattice::new(&[vals.len()]).unwrap();
        let est = straw_core::sparsity::LfdrEstimate {
            values: vals.clone(),
            pi0_hat: 1.0,
            z: vec![0.0; vals.len()],
        };
        let ks = straw_core::sparsity::KernelSpec::new(
            straw_core::sparsity::KernelFamily::Gaussian, h, c).unwrap();
        let field = straw_core::sparsity::smooth_sparsity(&lat, &est, &ks, DEFAULT_CLIP).unwrap();
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (want_lo, want_hi) = ((1.0 - hi).max(DEFAULT_CLIP), (1.0 - lo).min(1.0 - DEFAULT_CLIP));
        for &v in field.values() {
            prop_assert!(v >= want_lo - 1e-12 && v <= want_hi + 1e-12);
        }
    }
}
