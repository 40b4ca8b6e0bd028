//! Lp–Lq decay exponents predicted from the direction census.
//!
//! A rate is reported as the exponent `e` in `(1+t)^{−e(1/p−1/q)}`. Near a
//! hyperbolic direction with vanishing order `ℓ` and Fresnel contact order
//! `γ̄` the exponent is `1/min(2ℓ, γ̄)`; parabolic parts decay with exponent 1
//! for small frequencies and exponentially for large ones.

use serde::Serialize;

use crate::classify::{find_special_directions, Census, DirectionClass, Tag, VanishingOrder};
use crate::fresnel::{contact_order, flat_points, ContactOrder, FresnelProfile, PROFILE_N};
use crate::media::{Medium, TABLE_SIZE};
use crate::{unit, LabError, Result};

/// Exponent of the small-frequency parabolic part.
pub const PARABOLIC_EXPONENT: f64 = 1.0;
/// Scan resolution used by [`predict_global`].
pub const DEFAULT_SCAN: usize = 4096;

/// Which estimate fixes the exponent at a direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `ℓ = 1`: exponent 1/2.
    SimpleZero,
    /// `γ̄ < 2ℓ`: the Fresnel curve limits the rate, exponent `1/γ̄`.
    ContactLimited,
    /// `γ̄ ≥ 2ℓ`: the coupling limits the rate, exponent `1/(2ℓ)`.
    CouplingLimited,
    /// Coupling vanishes identically: wave-type estimate governed by the
    /// curvature of the Fresnel curve alone.
    Strichartz,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionExponent {
    pub phi: f64,
    pub eta: [f64; 2],
    /// Branch index, 1-based as in reports.
    pub sheet: usize,
    /// Vanishing order, absent when the coupling vanishes identically.
    pub ell: Option<u32>,
    pub gamma_bar: u32,
    /// `min(2ℓ, γ̄)`.
    pub denominator: u32,
    pub exponent: f64,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayPrediction {
    pub medium: String,
    pub per_direction: Vec<DirectionExponent>,
    pub parabolic_small_freq: f64,
    pub parabolic_large_freq: &'static str,
    pub global_exponent: f64,
    /// Data regularity must exceed `regularity_factor·(1/p − 1/q)`.
    pub regularity_factor: f64,
}

impl DecayPrediction {
    /// Plain-text JSON with fields in declaration order.
    pub fn report(&self) -> String {
        serde_json::to_string_pretty(self).expect("prediction serialises")
    }
}

/// Sobolev threshold `2(1/p − 1/q)`; data regularity must be strictly larger.
pub fn regularity_threshold(p: f64, q: f64) -> f64 {
    2.0 * (1.0 / p - 1.0 / q)
}

/// Exponent at a hyperbolic direction with contact order `gamma_bar`.
pub fn predict_direction(class: &DirectionClass, gamma_bar: u32) -> Result<DirectionExponent> {
    let j0 = match class.tag {
        Tag::Hyperbolic(j) => j,
        Tag::GammaDegenerate(_) => return Err(LabError::GammaDegenerate { phi: class.phi }),
        _ => {
            return Err(LabError::InvalidInput(format!(
                "direction phi={} is {}, not hyperbolic",
                class.phi,
                class.tag.name()
            )))
        }
    };
    if gamma_bar < 2 {
        return Err(LabError::InvalidInput(format!("contact order must be at least 2 (got {gamma_bar})")));
    }
    let ell = match class.vanishing_order {
        Some(VanishingOrder::Finite(l)) if l >= 1 => Some(l),
        Some(VanishingOrder::IdenticallyVanishing) => None,
        other => return Err(LabError::InvalidInput(format!("no usable vanishing order ({other:?})"))),
    };
    let (denominator, rule) = match ell {
        None => (gamma_bar, Rule::Strichartz),
        Some(1) => (2, Rule::SimpleZero),
        Some(l) if gamma_bar < 2 * l => (gamma_bar, Rule::ContactLimited),
        Some(l) => (2 * l, Rule::CouplingLimited),
    };
    Ok(DirectionExponent {
        phi: class.phi,
        eta: class.eta,
        sheet: j0 + 1,
        ell,
        gamma_bar,
        denominator,
        exponent: 1.0 / denominator as f64,
        rule,
    })
}

fn finite_contact(c: ContactOrder, phi: f64) -> Result<u32> {
    c.finite().ok_or_else(|| LabError::Numerical(format!("contact order above the cap at phi={phi}")))
}

/// Largest contact order of sheet `j` over the whole circle.
pub fn max_contact_order(m: &Medium, j: usize) -> Result<(u32, f64)> {
    let prof = FresnelProfile::new(m, j, PROFILE_N)?;
    let g = prof.factor_samples();
    let scale = g.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let h = std::f64::consts::TAU / g.len() as f64;
    let mut candidates = flat_points(m, j, PROFILE_N)?;
    // touching zeros do not change sign; catch them as near-zero local minima
    for k in 0..g.len() {
        let (a, b, c) = (g[(k + g.len() - 1) % g.len()].abs(), g[k].abs(), g[(k + 1) % g.len()].abs());
        if b <= a && b <= c && b < 1e-6 * scale {
            candidates.push(k as f64 * h);
        }
    }
    let mut best = (2, 0.0);
    for phi in candidates {
        let c = finite_contact(prof.contact_order(phi), phi)?;
        if c > best.0 {
            best = (c, phi);
        }
    }
    Ok(best)
}

/// Global prediction from the census and the Fresnel contact orders.
pub fn predict_global(m: &Medium) -> Result<DecayPrediction> {
    let census = find_special_directions(m, DEFAULT_SCAN)?;
    let mut per_direction = Vec::new();
    match &census {
        Census::AllDegenerate => {
            return Err(LabError::Degenerate {
                phi: 0.0,
                hint: "every direction is degenerate; the system decouples and no thermo-elastic rate applies".into(),
            })
        }
        Census::Decoupled { branch } => {
            let j = *branch;
            for f in m.frames(TABLE_SIZE) {
                if f.is_degenerate() {
                    continue;
                }
                let phi = crate::angle_of(f.eta);
                if !crate::classify::check_a4(m, f.eta, j) {
                    return Err(LabError::GammaDegenerate { phi });
                }
            }
            let (gamma_bar, phi) = max_contact_order(m, j)?;
            let class = DirectionClass {
                tag: Tag::Hyperbolic(j),
                phi,
                eta: unit(phi),
                vanishing_order: Some(VanishingOrder::IdenticallyVanishing),
                a4_ok: true,
            };
            per_direction.push(predict_direction(&class, gamma_bar)?);
        }
        Census::Isolated(dirs) => {
            for d in dirs {
                match d.tag {
                    Tag::Parabolic => {}
                    Tag::Degenerate => {
                        return Err(LabError::Degenerate {
                            phi: d.phi,
                            hint: "decay estimates need non-degenerate directions".into(),
                        })
                    }
                    Tag::GammaDegenerate(_) => return Err(LabError::GammaDegenerate { phi: d.phi }),
                    Tag::Hyperbolic(j) => {
                        let gamma_bar = finite_contact(contact_order(m, j, d.eta)?, d.phi)?;
                        per_direction.push(predict_direction(d, gamma_bar)?);
                    }
                }
            }
        }
    }
    let global_exponent = per_direction.iter().map(|d| d.exponent).fold(PARABOLIC_EXPONENT, f64::min);
    Ok(DecayPrediction {
        medium: m.name(),
        per_direction,
        parabolic_small_freq: PARABOLIC_EXPONENT,
        parabolic_large_freq: "exp",
        global_exponent,
        regularity_factor: 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hyp(ell: u32) -> DirectionClass {
        DirectionClass {
            tag: Tag::Hyperbolic(0),
            phi: 0.0,
            eta: [1.0, 0.0],
            vanishing_order: Some(VanishingOrder::Finite(ell)),
            a4_ok: true,
        }
    }

    #[test]
    fn rule_table() {
        assert_eq!(predict_direction(&hyp(1), 2).unwrap().exponent, 0.5);
        assert_eq!(predict_direction(&hyp(3), 4).unwrap().exponent, 0.25);
        assert_eq!(predict_direction(&hyp(3), 6).unwrap().exponent, 1.0 / 6.0);
        assert_eq!(predict_direction(&hyp(3), 8).unwrap().rule, Rule::CouplingLimited);
    }

    #[test]
    fn gamma_degenerate_refused() {
        let mut c = hyp(1);
        c.tag = Tag::GammaDegenerate(0);
        assert!(matches!(predict_direction(&c, 2), Err(LabError::GammaDegenerate { .. })));
    }

    #[test]
    fn isotropic_is_strichartz() {
        let m = Medium::isotropic(1.0, 1.0, 1.0, 1.0).unwrap();
        let p = predict_global(&m).unwrap();
        assert_eq!(p.global_exponent, 0.5);
        assert_eq!(p.per_direction[0].rule, Rule::Strichartz);
    }

    #[test]
    fn rhombic_pipeline() {
        let m = Medium::rhombic(3.0, 2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let p = predict_global(&m).unwrap();
        let x = p.per_direction.iter().find(|d| d.phi.abs() < 1e-6).unwrap();
        assert_eq!(x.ell, Some(3));
        assert_eq!(x.denominator, 6.min(x.gamma_bar));
        assert_eq!(p.global_exponent, x.exponent);
    }

    proptest! {
        #[test]
        fn monotone_in_order_and_contact(l in 1u32..6, g in 2u32..12, dl in 0u32..3, dg in 0u32..3) {
            let a = predict_direction(&hyp(l), g).unwrap().exponent;
            let b = predict_direction(&hyp(l + dl), g + dg).unwrap().exponent;
            prop_assert!(b <= a);
            prop_assert!(a <= 1.0);
        }
    }
}
