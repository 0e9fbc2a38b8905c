//! Property tests over random inputs.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ekkit::ainfinity::{basis, composable_strings, gerstenhaber, BasisElement, Cochain, Combination};
use ekkit::classical::{kronecker_f, theta, weier_p, Tau, KRONECKER_STRIP};
use ekkit::ekseries::Series;
use ekkit::symrec::{reduce_gab, Generator, MPoly};
use ekkit::{Lattice, C64};

fn taus() -> impl Strategy<Value = C64> {
    prop_oneof![
        Just(C64::new(0.0, 1.0)),
        Just(C64::new(0.5, 1.0)),
        Just(C64::new(-0.25, 1.1)),
        (-0.5..0.5f64, 0.8..2.0f64).prop_map(|(a, b)| C64::new(a, b))
    ]
}

fn point() -> impl Strategy<Value = C64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| C64::new(a, b))
}

/// A point in the cell at distance ≥ 0.15·shortest from the lattice.
fn generic(l: &Lattice, u: f64, v: f64) -> Option<C64> {
    let z = l.omega1() * u + l.omega2() * v;
    (l.reduce_nearest(z).0.norm() >= 0.15 * l.shortest()).then_some(z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_is_unimodular(t in taus(), z in point(), w in point()) {
        let l = Lattice::from_tau(t).unwrap();
        prop_assert!((l.pairing(z, w).norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn pairing_trivial_on_lattice(t in taus(), m in -10i64..=10, n in -10i64..=10, p in -10i64..=10, q in -10i64..=10) {
        let l = Lattice::from_tau(t).unwrap();
        prop_assert!((l.pairing(l.point(m, n), l.point(p, q)) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn reduce_is_idempotent(t in taus(), z in point()) {
        let l = Lattice::from_tau(t).unwrap();
        let r = l.reduce(z).0;
        prop_assert!((l.reduce(r).0 - r).norm() < 1e-14);
        let (x, lp) = l.reduce(z);
        prop_assert!((x + lp.value(&l) - z).norm() < 1e-12);
    }

    #[test]
    fn points_near_matches_box_scan(t in taus(), c in point(), r in 0.5..15.0f64) {
        let l = Lattice::from_tau(t).unwrap();
        let mut got: Vec<_> = l.points_near(c, r).into_iter().map(|p| (p.m, p.n)).collect();
        got.sort();
        let mut want = Vec::new();
        for m in -40i64..=40 {
            for n in -40i64..=40 {
                if (l.point(m, n) + c).norm() <= r {
                    want.push((m, n));
                }
            }
        }
        prop_assert_eq!(got, want);
    }

    #[test]
    fn theta_quasi_periodic(t in taus(), u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let tau = Tau::new(t).unwrap();
        let z = C64::new(u, 0.0) + t * v;
        let i = C64::new(0.0, 1.0);
        let lhs = theta(z + t, tau, 1e-16);
        let rhs = (-i * std::f64::consts::PI * t - 2.0 * std::f64::consts::PI * i * z).exp() * theta(z, tau, 1e-16);
        prop_assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0));
    }

    #[test]
    fn kronecker_symmetric(t in taus(), a in -0.5..0.5f64, b in -0.5..0.5f64) {
        let tau = Tau::new(t).unwrap();
        let (lo, hi) = KRONECKER_STRIP;
        let z = C64::new(a, 0.0) + t * (lo + 0.1 * (hi - lo));
        let w = C64::new(b, 0.0) + t * (hi - 0.1 * (hi - lo));
        let (f1, f2) = (kronecker_f(z, w, tau, 1e-15).unwrap(), kronecker_f(w, z, tau, 1e-15).unwrap());
        prop_assert!((f1 - f2).norm() < 1e-10 * f1.norm().max(1.0));
    }

    #[test]
    fn weierstrass_p_is_even_and_periodic(t in taus(), u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let l = Lattice::from_tau(t).unwrap();
        if let Some(z) = generic(&l, u, v) {
            let p = weier_p(z, &l, 0, 1e-15).unwrap();
            prop_assert!((weier_p(-z, &l, 0, 1e-15).unwrap() - p).norm() < 1e-9 * p.norm().max(1.0));
            prop_assert!((weier_p(z + l.omega2(), &l, 0, 1e-15).unwrap() - p).norm() < 1e-9 * p.norm().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn g_quasi_periodic_and_odd(t in taus(), u in 0.0..1.0f64, v in 0.0..1.0f64, x in 0.0..1.0f64, y in 0.0..1.0f64,
                                m in -2i64..=2, n in -2i64..=2, a in 0usize..3, b in 0usize..3) {
        let l = Lattice::from_tau(t).unwrap();
        let s = Series::new(l);
        if let (Some(z), Some(w)) = (generic(&l, u, v), generic(&l, x, y)) {
            let lam = l.point(m, n);
            let g = s.gc(a, b, z, w).unwrap();
            let tol = 1e-10 * g.norm().max(1.0);
            prop_assert!((s.gc(a, b, z, w + lam).unwrap() - g).norm() < tol);
            prop_assert!((s.gc(a, b, z + lam, w).unwrap() - g * l.pairing(lam, w)).norm() < tol);
            let sg = if (a + b) % 2 == 0 { -1.0 } else { 1.0 };
            prop_assert!((s.gc(a, b, -z, -w).unwrap() - g * sg).norm() < tol);
        }
    }
}

// ---- exact polynomials ----

fn mpoly() -> impl Strategy<Value = MPoly> {
    let gens = [Generator::G00, Generator::G01, Generator::Zb(1), Generator::Wb(2), Generator::C(0, 3)];
    prop::collection::vec((0usize..5, 0u32..3, -5i64..=5, 1i64..=4), 0..5).prop_map(move |terms| {
        let mut p = MPoly::zero();
        for (g, e, num, den) in terms {
            let mut t = MPoly::constant(BigRational::new(BigInt::from(num), BigInt::from(den)));
            for _ in 0..e {
                t = t.mul(&MPoly::var(gens[g]));
            }
            p = p.add(&t);
        }
        p
    })
}

fn env() -> std::collections::HashMap<Generator, C64> {
    [
        (Generator::G00, C64::new(0.3, -1.2)),
        (Generator::G01, C64::new(-0.7, 0.4)),
        (Generator::Zb(1), C64::new(1.1, 0.2)),
        (Generator::Wb(2), C64::new(0.05, 0.9)),
        (Generator::C(0, 3), C64::new(-1.3, 0.0)),
    ]
    .into_iter()
    .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mpoly_ring_laws(p in mpoly(), q in mpoly(), r in mpoly()) {
        prop_assert_eq!(p.add(&q), q.add(&p));
        prop_assert_eq!(p.mul(&q), q.mul(&p));
        prop_assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
        prop_assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
        prop_assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn mpoly_eval_is_a_homomorphism(p in mpoly(), q in mpoly()) {
        let e = env();
        let (pv, qv) = (p.eval(&e).unwrap(), q.eval(&e).unwrap());
        prop_assert!((p.mul(&q).eval(&e).unwrap() - pv * qv).norm() < 1e-9 * (pv * qv).norm().max(1.0));
        prop_assert!((p.add(&q).eval(&e).unwrap() - (pv + qv)).norm() < 1e-9 * (pv + qv).norm().max(1.0));
    }
}

#[test]
fn reduction_is_deterministic() {
    for (a, b) in [(2, 2), (3, 1), (1, 4)] {
        assert_eq!(reduce_gab(a, b).to_string(), reduce_gab(a, b).to_string());
    }
}

// ---- graded Jacobi identity for the Gerstenhaber bracket ----

/// A sparse homogeneous cochain: about a third of the composable strings of
/// the given arity get a random multiple of a basis element of the right
/// degree and endpoints.
fn random_cochain(rng: &mut ChaCha8Rng, b: &[BasisElement], arity: usize, deg: i32) -> Cochain {
    let mut table = BTreeMap::new();
    for st in composable_strings(b, arity) {
        if rng.gen::<f64>() > 0.35 {
            continue;
        }
        let d: i32 = st.iter().map(|x| x.degree()).sum::<i32>() + deg;
        let (src, tgt) = (st[0].source(), st[arity - 1].target());
        let cands: Vec<_> = b.iter().filter(|y| y.degree() == d && y.source() == src && y.target() == tgt).collect();
        if cands.is_empty() {
            continue;
        }
        let y = *cands[rng.gen_range(0..cands.len())];
        let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        table.insert(st, Combination::single(y, c));
    }
    Cochain::from_table(arity, deg, table)
}

fn sign(e: i32) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gerstenhaber_jacobi(seed in any::<u64>(), ar in prop::array::uniform3(1usize..=3), dg in prop::array::uniform3(-1i32..=1)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = basis(1, 1);
        let f = random_cochain(&mut rng, &b, ar[0], dg[0]);
        let g = random_cochain(&mut rng, &b, ar[1], dg[1]);
        let h = random_cochain(&mut rng, &b, ar[2], dg[2]);
        // [f,[g,h]] = [[f,g],h] + (-1)^{|f||g|} [g,[f,h]]
        let lhs = gerstenhaber(&f, &gerstenhaber(&g, &h));
        let r1 = gerstenhaber(&gerstenhaber(&f, &g), &h);
        let r2 = gerstenhaber(&g, &gerstenhaber(&f, &h));
        let sg = C64::new(sign(f.shifted() * g.shifted()), 0.0);
        let n = ar[0] + ar[1] + ar[2] - 2;
        for st in composable_strings(&b, n) {
            let mut d = lhs.eval(&st).sub(&r1.eval(&st));
            d.add_scaled(&r2.eval(&st), -sg);
            prop_assert!(d.max_norm() < 1e-12, "{:?}: {:e}", st, d.max_norm());
        }
    }
}
