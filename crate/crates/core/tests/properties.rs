use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;
use paroper::curve::{riemann_hurwitz_genus, MarkedCurve};
use paroper::fuchsian::linalg::CMatrix;
use paroper::fuchsian::{build_fuchsian, numerical_monodromy, Puncture};
use paroper::jet::{jet_graded, regular_rep_check};
use paroper::oper::{oper_bundle, theta_power};
use paroper::orbifold::{from_orbifold, to_orbifold};
use paroper::rational::{int, rat, Rational};
use paroper::LocallyAbelianBundle;
use proptest::prelude::*;

fn binom(n: i128, k: i128) -> i128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Curves with arbitrary levels >= 2.
fn any_curve() -> impl Strategy<Value = Arc<MarkedCurve>> {
    (0u32..4, prop::collection::vec(2u32..10, 0..5))
        .prop_filter_map("genus-0 needs 3 points", |(g, levels)| {
            MarkedCurve::with_levels(g, &levels).ok().map(Arc::new)
        })
}

/// Curves admitting the oper constructions: odd levels >= 5.
fn oper_curve() -> impl Strategy<Value = Arc<MarkedCurve>> {
    (0u32..4, prop::collection::vec(2u32..8, 1..5)).prop_filter_map(
        "genus-0 needs 3 points",
        |(g, cs)| {
            let levels: Vec<u32> = cs.iter().map(|c| 2 * c + 1).collect();
            MarkedCurve::with_levels(g, &levels).ok().map(Arc::new)
        },
    )
}

fn bundle_on(
    curve: Arc<MarkedCurve>,
    max_rank: usize,
) -> impl Strategy<Value = LocallyAbelianBundle> {
    let levels: Vec<u32> = curve.levels().collect();
    (1..=max_rank, -6i64..6).prop_flat_map(move |(rank, degree)| {
        let curve = curve.clone();
        let per_point: Vec<_> = levels
            .iter()
            .map(|&n| prop::collection::vec(0..n, rank))
            .collect();
        let levels = levels.clone();
        per_point.prop_map(move |ks| {
            let weights = ks
                .iter()
                .zip(&levels)
                .map(|(k, &n)| k.iter().map(|&k| rat(k as i128, n as i128)).collect())
                .collect();
            LocallyAbelianBundle::new(curve.clone(), rank, degree, weights).unwrap()
        })
    })
}

fn pair() -> impl Strategy<Value = (LocallyAbelianBundle, LocallyAbelianBundle)> {
    any_curve().prop_flat_map(|c| (bundle_on(c.clone(), 3), bundle_on(c, 3)))
}

fn triple() -> impl Strategy<
    Value = (
        LocallyAbelianBundle,
        LocallyAbelianBundle,
        LocallyAbelianBundle,
    ),
> {
    any_curve().prop_flat_map(|c| {
        (
            bundle_on(c.clone(), 2),
            bundle_on(c.clone(), 2),
            bundle_on(c, 2),
        )
    })
}

fn weights_are_canonical(v: &LocallyAbelianBundle) -> bool {
    v.curve().levels().zip(v.weights()).all(|(n, ws)| {
        ws.len() == v.rank()
            && ws.windows(2).all(|w| w[0] >= w[1])
            && ws
                .iter()
                .all(|w| *w >= Rational::zero() && *w < int(1) && (w * int(n as i64)).is_integer())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dual_is_an_involution((v, _) in pair()) {
        prop_assert_eq!(v.dual().dual(), v.clone());
        prop_assert_eq!(v.dual().par_deg(), -v.par_deg());
    }

    #[test]
    fn tensor_par_deg((v, w) in pair()) {
        let t = v.tensor(&w).unwrap();
        let want = v.par_deg() * int(w.rank() as i64) + w.par_deg() * int(v.rank() as i64);
        prop_assert_eq!(t.par_deg(), want);
        prop_assert!(weights_are_canonical(&t));
    }

    #[test]
    fn tensor_commutes_and_associates((a, b, c) in triple()) {
        prop_assert_eq!(a.tensor(&b).unwrap(), b.tensor(&a).unwrap());
        let left = a.tensor(&b).unwrap().tensor(&c).unwrap();
        let right = a.tensor(&b.tensor(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn sym_and_det_par_deg((v, _) in pair(), k in 0usize..5) {
        let r = v.rank() as i128;
        let s = v.sym_pow(k);
        prop_assert_eq!(s.rank() as i128, binom(r + k as i128 - 1, k as i128));
        let want = Rational::from_integer(binom(r + k as i128 - 1, k as i128)) * Rational::new(k as i128, r) * v.par_deg();
        prop_assert_eq!(s.par_deg(), want);
        prop_assert!(weights_are_canonical(&s));
        prop_assert_eq!(v.det().par_deg(), v.par_deg());
        prop_assert!(weights_are_canonical(&v.det()));
    }

    #[test]
    fn euler_characteristic_is_additive((v, w) in pair()) {
        let s = v.direct_sum(&w).unwrap();
        prop_assert_eq!(s.euler_characteristic(), v.euler_characteristic() + w.euler_characteristic());
        prop_assert_eq!(s.par_deg(), v.par_deg() + w.par_deg());
    }

    #[test]
    fn orbifold_round_trip((v, _) in pair()) {
        let d = v.curve().default_cover_degree();
        let orb = to_orbifold(&v, d).unwrap();
        let total: i64 = orb.components().iter().map(|c| c.y_degree).sum();
        prop_assert_eq!(int(total), v.par_deg() * int(d as i64));
        prop_assert_eq!(from_orbifold(&orb).unwrap(), v);
    }

    #[test]
    fn orbifold_intertwines_tensor_and_dual((v, w) in pair()) {
        let d = v.curve().default_cover_degree();
        let (ov, ow) = (to_orbifold(&v, d).unwrap(), to_orbifold(&w, d).unwrap());
        prop_assert_eq!(from_orbifold(&ov.tensor(&ow).unwrap()).unwrap(), v.tensor(&w).unwrap());
        prop_assert_eq!(from_orbifold(&ov.dual()).unwrap(), v.dual());
        prop_assert_eq!(from_orbifold(&ov.det()).unwrap(), v.det());
    }

    #[test]
    fn regular_representation_has_par_deg_zero(c in any_curve()) {
        // Ramification data with odd 2g_Y - 2 admits no cover.
        let d = c.default_cover_degree();
        prop_assume!(riemann_hurwitz_genus(&c, d).is_ok());
        prop_assert!(regular_rep_check(&c, d).unwrap().pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn oper_determinant_is_trivial(c in oper_curve(), r in 2usize..13) {
        prop_assert!(oper_bundle(&c, r).unwrap().det().is_trivial());
    }

    #[test]
    fn jet_pieces_are_theta_powers(c in oper_curve(), j in 0usize..40) {
        prop_assert_eq!(jet_graded(&c, j), theta_power(&c, -2 * j as i64).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// det of the monodromy is exp(-2 pi i tr Res).
    #[test]
    fn monodromy_determinant(
        entries in prop::collection::vec(-0.45f64..0.45, 8),
        shift in 0.5f64..2.0,
    ) {
        let m = |k: usize| CMatrix::from_fn(2, 2, |i, j| Complex64::new(entries[k + 2 * i + j], 0.0));
        let system = build_fuchsian(2, vec![
            Puncture { label: "a".into(), coordinate: Complex64::new(0.0, 0.0), residue: m(0) },
            Puncture { label: "b".into(), coordinate: Complex64::new(shift, 0.3), residue: m(4) },
        ]).unwrap();
        for label in ["a", "b"] {
            let mono = numerical_monodromy(&system, label, 1e-9).unwrap();
            let tr = system.residue(label).unwrap().trace();
            let want = (Complex64::new(0.0, -std::f64::consts::TAU) * tr).exp();
            prop_assert!((mono.matrix.determinant() - want).norm() < 1e-7);
        }
    }
}

#[test]
fn zero_weight_bundle_is_plain() {
    let c = Arc::new(MarkedCurve::with_levels(1, &[3]).unwrap());
    let v = LocallyAbelianBundle::new(c, 2, 3, vec![vec![int(0), int(0)]]).unwrap();
    assert_eq!(v.par_deg(), int(3));
    assert!(v.dual().weights()[0].iter().all(Zero::is_zero));
}
