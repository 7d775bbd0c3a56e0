use num_complex::Complex64;
use proptest::prelude::*;

use holodyn::linearize::{abel_solve, koenigs, koenigs_repelling, poly_iter_root, LaurentSeries};
use holodyn::maps::{Polynomial, RationalMap, SpherePoint};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `λz + a z^2 + b z^3` with an attracting fixed point at 0.
fn attracting_germ() -> impl Strategy<Value = RationalMap> {
    (0.2..0.8f64, 0.0..std::f64::consts::TAU, -1.0..1.0f64, -1.0..1.0f64, -0.5..0.5f64).prop_map(|(r, t, a, b, e)| {
        RationalMap::polynomial(Polynomial::new(vec![c(0.0, 0.0), Complex64::from_polar(r, t), c(a, b), c(e, 0.0)])).unwrap()
    })
}

fn iterate(f: &RationalMap, z: SpherePoint, n: usize) -> SpherePoint {
    (0..n).fold(z, |acc, _| f.eval(acc).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn koenigs_is_functorial(f in attracting_germ()) {
        let chart = koenigs(&f, SpherePoint::new(0.0, 0.0), 500).unwrap();
        let lambda = f.derivative_at(c(0.0, 0.0));
        for z in chart.samples(30, 0.9) {
            let b = chart.eval(z).unwrap();
            for n in 1..=5 {
                let lhs = chart.eval(iterate(&f, z, n)).unwrap();
                let rhs = lambda.powi(n as i32) * b;
                prop_assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm().max(f64::MIN_POSITIVE), "n={} at {}", n, z);
            }
        }
    }

    #[test]
    fn abel_solution_telescopes(
        f in attracting_germ(),
        a0 in -1.0..1.0f64,
        a1 in -1.0..1.0f64,
        a2 in -1.0..1.0f64,
    ) {
        let zero = c(0.0, 0.0);
        // F = a0 + a1 z + (a2 + 0.3i) z^(1/2)
        let rhs = LaurentSeries::indexed(zero, 1, c(a0, 0.0), &[c(a1, 0.0), c(a2, 0.3)], &[], 0.0, 0.05).unwrap();
        let sol = match abel_solve(&f, SpherePoint::new(0.0, 0.0), &rhs, 24) {
            Ok(sol) => sol,
            // a resonance cannot occur for attracting multipliers
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let mut checked = 0;
        for k in 0..8 {
            let z = Complex64::from_polar(0.02, 0.3 + 0.7 * k as f64);
            let p = SpherePoint::Finite(z);
            let start = match sol.eval(p) {
                Ok(v) => v,
                // the logarithm of the Koenigs coordinate is cut along a ray
                Err(_) => continue,
            };
            let mut sum = c(0.0, 0.0);
            let mut w = p;
            for n in 1..=5 {
                // the identity holds up to a period of the logarithm, so the
                // orbit is followed only while no step turns across the cut
                if sol.residual(&f, w).is_err() {
                    break;
                }
                sum += rhs.eval(w.finite().unwrap());
                w = f.eval(w).unwrap();
                let end = match sol.eval(w) {
                    Ok(v) => v,
                    Err(_) => break,
                };
                prop_assert!(((end - start) - sum).norm() < 1e-7, "n={} at {}", n, z);
                checked += 1;
            }
        }
        prop_assert!(checked > 0, "no step checked");
    }

    #[test]
    fn iterative_roots_round_trip(
        a in -2.0..2.0f64,
        b in -2.0..2.0f64,
        lead in 0.5..2.0f64,
        cubic in any::<bool>(),
    ) {
        let g = if cubic {
            Polynomial::from_real(&[b, a, 0.0, lead])
        } else {
            Polynomial::from_real(&[b, a, lead])
        };
        let f = g.compose(&g);
        let roots = poly_iter_root(&f, g.degree()).unwrap();
        prop_assert!(!roots.is_empty());
        for r in &roots {
            let back = r.compose(r);
            prop_assert!(back.distance(&f) < 1e-8 * f.scale().max(1.0));
        }
        prop_assert!(roots.iter().any(|r| r.distance(&g) < 1e-8));
    }
}

#[test]
fn repelling_point_is_linearized_through_the_inverse_branch() {
    let f = RationalMap::poly_desc(&[1.0, 2.0, 0.0]).unwrap();
    let chart = koenigs_repelling(&f, SpherePoint::new(0.0, 0.0), 500).unwrap();
    let h = 1e-6;
    let slope = (chart.eval(SpherePoint::new(h, 0.0)).unwrap() - chart.eval(SpherePoint::new(-h, 0.0)).unwrap()) / (2.0 * h);
    assert!((slope - 1.0).norm() < 1e-6);
    for z in chart.samples(50, 0.4) {
        assert!(chart.residual(&f, z).unwrap() < 1e-9);
    }
    // the attracting construction refuses a repelling point
    assert!(koenigs(&f, SpherePoint::new(0.0, 0.0), 500).is_err());
}

#[test]
fn koenigs_at_infinity_uses_the_inverted_chart() {
    // 1/f(1/w) = w/2 + w^2 near w = 0, i.e. f(z) = z^2 / (z/2 + 1)
    let f = RationalMap::new(Polynomial::from_real(&[0.0, 0.0, 1.0]), Polynomial::from_real(&[1.0, 0.5])).unwrap();
    let chart = koenigs(&f, SpherePoint::Infinity, 500).unwrap();
    for z in chart.samples(40, 0.9) {
        assert!(chart.residual(&f, z).unwrap() < 1e-9);
    }
}

#[test]
fn iterative_root_of_a_fourth_iterate() {
    let g = Polynomial::from_real(&[0.3, 0.0, 1.0]);
    let f = g.compose(&g).compose(&g.compose(&g));
    let roots = poly_iter_root(&f, 2).unwrap();
    assert!(roots.iter().any(|r| r.distance(&g) < 1e-8));
}
