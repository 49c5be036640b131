use horoxt::lattice::*;
use horoxt::section::*;
use horoxt::sl2::*;
use proptest::prelude::*;

fn group_element() -> impl Strategy<Value = GroupElement> {
    (-0.5f64..0.5, 0.87f64..4.0, 0.0f64..std::f64::consts::PI)
        .prop_map(|(u, v, theta)| iwasawa_encode(&IwasawaCoords { u, v, theta }))
}

fn brute_triangle(m: &GroupElement, x: f64, bound: i64) -> Vec<PrimitiveVector> {
    let region = TriangleRegion::new(x).unwrap();
    let mut out = Vec::new();
    for c in -bound..=bound {
        for d in -bound..=bound {
            if gcd(c, d) != 1 {
                continue;
            }
            if region.contains(m.row_mul([c as f64, d as f64])) {
                out.push(PrimitiveVector::new(c, d).unwrap());
            }
        }
    }
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coset_completion_is_in_sl2z(c in -10_000i64..10_000, d in -10_000i64..10_000) {
        prop_assume!(gcd(c, d) == 1);
        let v = PrimitiveVector::new(c, d).unwrap();
        let g = complete_coset(v);
        prop_assert_eq!(g.det(), 1);
        prop_assert_eq!((g.c, g.d), (c, d));
        if c != 0 {
            prop_assert!(0 <= g.a && g.a < c.abs());
        }
    }

    #[test]
    fn reduction_lands_in_the_domain(g in (-20.0f64..20.0, 0.001f64..5.0, 0.0f64..3.0)
        .prop_map(|(u, v, theta)| iwasawa_encode(&IwasawaCoords { u, v, theta })))
    {
        let red = reduce_fundamental(&g).unwrap();
        prop_assert!(red.point.x.abs() <= 0.5 + 1e-12);
        prop_assert!(red.point.abs_sq() >= 1.0 - 1e-12);
        prop_assert_eq!(red.gamma.det(), 1);
        // the reduced point is the highest point of the orbit
        let z = mobius_apply(&g, &UpperHalfPoint::I);
        let h = horoxt::section::height_at_time(&g, 0.0).unwrap();
        prop_assert!((red.point.y.ln() - h).abs() < 1e-9, "{} vs {}", red.point.y.ln(), h);
        prop_assert!(z.y <= red.point.y * (1.0 + 1e-12));
    }

    #[test]
    fn gauss_reduction_finds_shortest(g in group_element(), s in 0.0f64..30.0) {
        let m = horocycle_plus(&g, s);
        let (_, n2) = shortest_vector(&m).unwrap();
        let mut best = f64::INFINITY;
        for c in -60i64..=60 {
            for d in -60i64..=60 {
                if (c, d) != (0, 0) {
                    let u = m.row_mul([c as f64, d as f64]);
                    best = best.min(u[0] * u[0] + u[1] * u[1]);
                }
            }
        }
        prop_assert!((n2 - best).abs() <= 1e-12 * best.max(1.0));
    }

    #[test]
    fn triangle_matches_brute_force(g in group_element(), r in -1.0f64..2.0, x in prop_oneof![-20.0f64..-0.5, 0.5f64..20.0]) {
        let basis = LatticeBasis::for_orbit(&g, r).unwrap();
        let mut fast: Vec<_> = enumerate_in_triangle(&basis, &TriangleRegion::new(x).unwrap())
            .unwrap()
            .into_iter()
            .map(|p| p.vector)
            .collect();
        fast.sort();
        prop_assert_eq!(fast, brute_triangle(basis.matrix(), x, 120));
    }

    #[test]
    fn hits_satisfy_event_invariants(g in group_element(), r in -0.5f64..1.5) {
        let hits = hit_process(&OrbitSpec::new(g, r, 60.0).unwrap()).unwrap();
        for w in hits.windows(2) {
            prop_assert!(w[0].xi < w[1].xi);
        }
        for h in &hits {
            prop_assert!(h.xi > 0.0 && h.xi <= 60.0);
            prop_assert!((h.delta - (h.t.exp() - 1.0).sqrt()).abs() < 1e-9);
            prop_assert_eq!(h.xi_entry, h.xi - h.delta);
            prop_assert!((0.0..1.0).contains(&h.s));
        }
    }

    #[test]
    fn scaling_law(g in group_element(), r in prop_oneof![Just(1.0f64), Just(2.0f64)]) {
        let t = 100.0;
        let a = hit_process(&OrbitSpec::new(g, r, t).unwrap()).unwrap();
        let flowed = geodesic_flow(&g, -r).unwrap();
        let b = hit_process(&OrbitSpec::new(flowed, 0.0, t * (-r).exp()).unwrap()).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.vector, y.vector);
            prop_assert!((x.t - y.t).abs() < 1e-9);
            prop_assert!((x.xi - y.xi * r.exp()).abs() < 1e-9 * x.xi.max(1.0));
        }
    }

    #[test]
    fn sup_is_monotone_in_horizon(g in group_element(), t1 in 10.0f64..60.0, extra in 0.0f64..60.0) {
        let a = sup_excursion_height(&g, t1).unwrap();
        let b = sup_excursion_height(&g, t1 + extra).unwrap();
        prop_assert!(b.height >= a.height);
    }

    #[test]
    fn oracle_matches_lattice_path(g in group_element(), r in -0.5f64..1.0) {
        let spec = OrbitSpec::new(g, r, 15.0).unwrap();
        let a = hit_process(&spec).unwrap();
        let b = direct_crossing_oracle(&spec).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.vector, y.vector);
            prop_assert!((x.xi - y.xi).abs() < 1e-7);
            prop_assert!((x.t - y.t).abs() < 1e-7);
        }
    }
}

/// Grid-and-golden-section maximisation of the height along the orbit.
fn dense_sup(g: &GroupElement, horizon: f64) -> f64 {
    let n = 10_000;
    let f = |s: f64| height_at_time(g, s).unwrap();
    let xs: Vec<f64> = (0..=n).map(|k| horizon * k as f64 / n as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut best = ys[0].max(ys[n]);
    for k in 1..n {
        if ys[k] >= ys[k - 1] && ys[k] >= ys[k + 1] {
            let (mut a, mut b) = (xs[k - 1], xs[k + 1]);
            let phi = 0.618_033_988_749_894_8;
            for _ in 0..80 {
                let x1 = b - phi * (b - a);
                let x2 = a + phi * (b - a);
                if f(x1) < f(x2) {
                    a = x1;
                } else {
                    b = x2;
                }
            }
            best = best.max(f(0.5 * (a + b)));
        }
    }
    best
}

#[test]
fn sup_matches_dense_grid() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let u = rng.random::<f64>() - 0.5;
        let v = 0.87 + 3.0 * rng.random::<f64>();
        let theta = std::f64::consts::PI * rng.random::<f64>();
        let g = iwasawa_encode(&IwasawaCoords { u, v, theta });
        let fast = sup_excursion_height(&g, 10.0).unwrap().height;
        let slow = dense_sup(&g, 10.0);
        assert!((fast - slow).abs() < 1e-6, "{fast} vs {slow}");
    }
}

#[test]
fn minimal_return_time_is_one() {
    let mut min = f64::INFINITY;
    for i in 0..10_000u64 {
        let (s, t) = horoxt::mc::sample_section_point(4, i);
        min = min.min(return_time_forward(s, t, 0.0).unwrap());
    }
    assert!(min >= 1.0 - 1e-9, "{min}");
    // and the bound is approached
    assert!(min < 1.1, "{min}");
}
