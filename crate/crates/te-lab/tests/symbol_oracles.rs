//! Symbol and direction-census checks against oracles that do not share
//! code with the crate's closed-form quintic: Faddeev–LeVerrier on the
//! assembled matrix, nalgebra's Schur form, and symmetry of the medium.

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use te_lab::classify::{find_special_directions, Census, Tag};
use te_lab::fresnel::{contact_order_across, ContactOrder};
use te_lab::linalg::Mat5;
use te_lab::symbol::{assemble_b, char_quintic};
use te_lab::{Medium, C64};

/// Monic `det(νI − B)` coefficients, descending, by Faddeev–LeVerrier.
fn faddeev_leverrier(b: &Mat5) -> [C64; 6] {
    let mut c = [C64::new(0.0, 0.0); 6];
    c[0] = C64::new(1.0, 0.0);
    let mut mk = Mat5::zeros();
    for k in 1..=5 {
        mk = b * mk + Mat5::identity() * c[k - 1];
        c[k] = -(b * mk).trace() / k as f64;
    }
    c
}

fn schur_eigenvalues(b: &Mat5) -> Vec<C64> {
    let t = nalgebra::linalg::Schur::new(*b).unpack().1;
    (0..5).map(|i| t[(i, i)]).collect()
}

fn medium_strategy() -> impl Strategy<Value = Medium> {
    prop_oneof![
        (1.5f64..5.0, 0.3f64..2.0, -0.9f64..0.9, 0.2f64..2.0, 0.2f64..2.0)
            .prop_filter_map("cubic constraints", |(tau, mu, frac, g, k)| Medium::cubic(tau, mu, frac * tau, g, k)
                .ok()),
        (1.5f64..5.0, 1.5f64..5.0, 0.3f64..2.0, -0.9f64..0.9, 0.2f64..2.0, 0.2f64..2.0).prop_filter_map(
            "rhombic constraints",
            |(t1, t2, mu, frac, g, k)| Medium::rhombic(t1, t2, mu, frac * t1.min(t2), g, k).ok()
        ),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn quintic_matches_faddeev_leverrier(m in medium_strategy(), phi in 0.0..TAU, log_s in -2.0f64..2.0) {
        let s = 10f64.powf(log_s);
        let xi = [s * phi.cos(), s * phi.sin()];
        let sm = assemble_b(&m, xi).unwrap();
        let want = faddeev_leverrier(&sm.b);
        let got = char_quintic(&m, xi).unwrap();
        let scale = sm.b.norm().max(1.0);
        for k in 0..6 {
            let err = (got[k] - want[k]).norm() / scale.powi(k as i32);
            prop_assert!(err < 1e-11, "coefficient {k}: {} vs {}", got[k], want[k]);
        }
    }
}

#[test]
fn hyperbolic_directions_carry_real_pairs() {
    for m in [Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0).unwrap(), Medium::rhombic(4.0, 2.0, 1.0, 1.0, 1.0, 1.0).unwrap()] {
        let census = find_special_directions(&m, 1024).unwrap();
        let hyp = census.hyperbolic();
        assert!(!hyp.is_empty(), "{}", m.name());
        for d in hyp {
            let j0 = d.tag.j0().unwrap();
            let f = m.frame(d.phi);
            for s in [0.1, 1.0, 10.0] {
                let eig = schur_eigenvalues(&assemble_b(&m, [s * d.eta[0], s * d.eta[1]]).unwrap().b);
                for sign in [1.0, -1.0] {
                    let target = C64::new(sign * s * f.omega[j0], 0.0);
                    let best = eig.iter().map(|z| (z - target).norm()).fold(f64::INFINITY, f64::min);
                    assert!(best < 1e-9 * s.max(1.0), "{} phi={} s={s}: miss {best:e}", m.name(), d.phi);
                }
            }
        }
    }
}

fn tag_counts(c: &Census) -> (usize, usize, usize) {
    let d = c.directions();
    let count = |f: fn(&Tag) -> bool| d.iter().filter(|x| f(&x.tag)).count();
    (
        count(|t| matches!(t, Tag::Parabolic)),
        count(|t| matches!(t, Tag::Hyperbolic(_) | Tag::GammaDegenerate(_))),
        count(|t| matches!(t, Tag::Degenerate)),
    )
}

#[test]
fn census_is_stable_under_scan_refinement() {
    for m in [
        Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0).unwrap(),
        Medium::cubic(3.0, 1.0, -0.5, 1.0, 1.0).unwrap(),
        Medium::rhombic(4.0, 2.0, 1.0, 1.0, 1.0, 1.0).unwrap(),
    ] {
        let counts: Vec<_> =
            [512, 1024, 2048].iter().map(|&n| tag_counts(&find_special_directions(&m, n).unwrap())).collect();
        assert!(counts.windows(2).all(|w| w[0] == w[1]), "{}: {counts:?}", m.name());
        let base = find_special_directions(&m, 1024).unwrap();
        let fine = find_special_directions(&m, 2048).unwrap();
        for (a, b) in base.directions().iter().zip(fine.directions()) {
            assert!((a.phi - b.phi).abs() < 1e-8, "{}: {} vs {}", m.name(), a.phi, b.phi);
        }
    }
}

fn has_direction(c: &Census, phi: f64, tag: &str) -> bool {
    c.directions().iter().any(|d| {
        let gap = (d.phi - phi).rem_euclid(TAU);
        gap.min(TAU - gap) < 1e-7 && d.tag.name() == tag
    })
}

#[test]
fn census_is_symmetric_under_reflection() {
    let cases = [
        (Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0).unwrap(), true),
        (Medium::cubic(3.0, 1.0, -0.5, 1.0, 1.0).unwrap(), true),
        (Medium::rhombic(4.0, 2.0, 1.0, 1.0, 1.0, 1.0).unwrap(), false),
    ];
    for (m, cubic) in cases {
        let c = find_special_directions(&m, 1024).unwrap();
        for d in c.directions() {
            let tag = d.tag.name();
            // η → −η
            assert!(has_direction(&c, d.phi + PI, tag), "{} phi={} antipode", m.name(), d.phi);
            // both media are even in each coordinate
            assert!(has_direction(&c, -d.phi, tag), "{} phi={} mirror", m.name(), d.phi);
            if cubic {
                assert!(has_direction(&c, PI / 2.0 - d.phi, tag), "{} phi={} diagonal", m.name(), d.phi);
            }
        }
    }
}

#[test]
fn contact_order_is_stable_under_refinement() {
    let m = Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0).unwrap();
    let census = find_special_directions(&m, 1024).unwrap();
    for d in census.hyperbolic() {
        let j = d.tag.j0().unwrap();
        let orders = contact_order_across(&m, j, d.phi, &[1024, 2048, 4096]).unwrap();
        assert!(orders.iter().all(|&o| o == orders[0]), "phi={}: {orders:?}", d.phi);
        assert!(matches!(orders[0], ContactOrder::Finite(g) if g >= 2));
    }
}
