use expzero::corpus::random_exppoly;
use expzero::decomposition::{extract_decomposition, integer_relation, normalize_l, refine};
use expzero::exppoly::ExpPoly;
use expzero::scalar::BranchEnv;
use expzero::variety::build_variety;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sample(seed: u64, nvars: usize, h: u32) -> ExpPoly {
    random_exppoly(nvars, h, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn point(n: usize, seed: u64) -> Vec<Complex64> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..n).map(|_| Complex64::new(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6))).collect()
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9 * a.norm().max(b.norm()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_stage_keeps_the_defining_conditions(seed in any::<u64>(), nvars in 1usize..=3, h in 1u32..=3) {
        let p = sample(seed, nvars, h);
        let d = extract_decomposition(&p).unwrap();
        d.check_bullets().unwrap();
        prop_assert_eq!(d.target(), &p);

        let r = refine(&d);
        r.check_bullets().unwrap();
        prop_assert!(r.refined() && r.is_refined());
        prop_assert!(r.alpha() <= d.alpha());
        let heights: Vec<u32> = r.bricks().iter().map(|b| b.height()).collect();
        prop_assert!(heights.windows(2).all(|w| w[0] <= w[1]), "{:?}", heights);
        prop_assert!(integer_relation(&r.bodies()).is_none());

        let (nd, s) = normalize_l(&r);
        nd.check_bullets().unwrap();
        prop_assert!(nd.l() == &1.into() && nd.is_refined());
        prop_assert_eq!(&s.factor, r.l());
        let env = BranchEnv::new();
        let a = point(nvars, seed);
        if let (Ok(lhs), Ok(rhs)) = (nd.target().eval(&a, &env), p.eval(&s.map_back(&a), &env)) {
            prop_assert!(close(lhs, rhs), "{} vs {}", lhs, rhs);
        }
    }

    #[test]
    fn variety_equations_give_back_the_bricks(seed in any::<u64>(), nvars in 1usize..=3, h in 1u32..=3) {
        let p = sample(seed, nvars, h);
        let (d, _) = normalize_l(&refine(&extract_decomposition(&p).unwrap()));
        let v = build_variety(&d).unwrap();
        prop_assert_eq!(v.graph_polys().len(), v.alpha() - v.n());
        for (q, b) in v.graph_polys().iter().zip(&v.bricks()[v.n()..]) {
            prop_assert_eq!(&v.substitute(q).unwrap(), b);
        }
        prop_assert_eq!(&v.reconstruct().unwrap(), d.target());

        // on the graph of the bricks, p* takes the values of the target
        let env = BranchEnv::new();
        let a = point(nvars, seed);
        let Ok(pt) = v.witness(&a, &env) else { return Ok(()) };
        let xy: Vec<Complex64> = pt.x.iter().chain(&pt.y).copied().collect();
        for (q, w) in v.graph_polys().iter().zip(&pt.w) {
            prop_assert!(close(q.eval(&xy, &env), *w));
        }
        let target = d.target().eval(&a, &env).unwrap();
        prop_assert!(close(v.hypersurface().eval(&xy, &env), target));
    }
}
