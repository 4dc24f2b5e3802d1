use hyperdomain::algebra::{intersect_branches, HypersurfaceSpec, Side, Sigma};
use hyperdomain::io::DomainFile;
use hyperdomain::{build_domain, build_system, Branch, BuildOptions, DomainSpec, Label};
use proptest::prelude::*;

fn side() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::Plus), Just(Side::Minus)]
}

fn branch() -> impl Strategy<Value = Branch> {
    (-5.0..5.0f64, -5.0..5.0f64, prop_oneof![-6.0..-0.05f64, 0.05..6.0f64], side())
        .prop_map(|(a, b, c, s)| Branch::new(a, b, c, s).unwrap())
}

fn domain() -> impl Strategy<Value = DomainSpec> {
    (-10.0..0.0f64, prop::collection::vec((0.2..4.0f64, any::<bool>()), 1..5)).prop_map(|(start, steps)| {
        let mut t = vec![start];
        let mut labels = Vec::new();
        for (gap, open) in steps {
            t.push(t.last().unwrap() + gap);
            labels.push(if open { Label::NonCompact } else { Label::Compact });
        }
        build_domain(&t, &labels, BuildOptions::default()).unwrap()
    })
}

proptest! {
    #[test]
    fn branch_points_are_zeros_of_the_hypersurface(b in branch(), s in 0.01..0.99f64, neg in any::<bool>()) {
        let sup = b.support();
        let u = if sup.lo.is_finite() { sup.lo + s * 10.0 } else { sup.hi - s * 10.0 };
        let v = b.height(u).unwrap();
        prop_assert!(b.contains([u, v], 1e-9 * (1.0 + v.abs())));
        let sigma = if neg { Sigma::Neg } else { Sigma::Pos };
        let h = HypersurfaceSpec::new(2, b, sigma).unwrap();
        let x = h.lift(u, v, &[0.0, 1.5, 0.0]);
        let p = h.poly(3).unwrap();
        prop_assert!(p.eval(&x).unwrap().abs() <= 1e-9 * (1.0 + p.eval_abs(&x).unwrap()));
    }

    #[test]
    fn intersection_is_symmetric(b1 in branch(), b2 in branch()) {
        let mut p: Vec<[f64; 2]> = intersect_branches(&b1, &b2).unwrap().iter().map(|q| q.point).collect();
        let mut q: Vec<[f64; 2]> = intersect_branches(&b2, &b1).unwrap().iter().map(|q| q.point).collect();
        prop_assert_eq!(p.len(), q.len());
        p.sort_by(|x, y| x[0].total_cmp(&y[0]));
        q.sort_by(|x, y| x[0].total_cmp(&y[0]));
        for (x, y) in p.iter().zip(&q) {
            prop_assert!((x[0] - y[0]).abs() <= 1e-9 * (1.0 + x[0].abs()));
            prop_assert!((x[1] - y[1]).abs() <= 1e-9 * (1.0 + x[1].abs()));
        }
    }

    #[test]
    fn corners_sit_over_the_sequence(d in domain()) {
        prop_assert_eq!(d.corner_values(), d.t().to_vec());
        prop_assert!(d.contains(d.base_point(), false, 0.0).unwrap());
    }

    #[test]
    fn slices_are_bounded_exactly_over_compact_intervals(d in domain(), s in 0.01..0.99f64) {
        for (j, w) in d.t().windows(2).enumerate() {
            let x1 = w[0] + s * (w[1] - w[0]);
            prop_assert_eq!(d.slice_bounded(x1), Some(d.labels()[j] == Label::Compact));
            let x = d.interior_fill(x1, 1.0).unwrap();
            prop_assert!(d.sign_membership(&x, 0.0).unwrap());
            prop_assert!(d.slice_membership(&x, false, 0.0).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sampled_points_are_regular(d in domain(), seed in any::<u64>()) {
        let s = build_system(d, None).unwrap();
        for p in s.sample_manifold(20, 20.0, seed).unwrap() {
            prop_assert!(s.scaled_residual(&p).unwrap() < 1e-10);
            prop_assert_eq!(s.jacobian_rank(&p, 1e-9).unwrap().rank, s.num_equations());
        }
    }

    #[test]
    fn domain_files_round_trip_bit_exactly(d in domain()) {
        let text = DomainFile::from_domain(&d).to_json();
        let back = DomainFile::from_json(&text).unwrap().to_domain().unwrap();
        prop_assert_eq!(DomainFile::from_domain(&back).to_json(), text);
        prop_assert!(back.t().iter().zip(d.t()).all(|(a, b)| a.to_bits() == b.to_bits()));
        prop_assert!(back.base_point().iter().zip(d.base_point()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}
