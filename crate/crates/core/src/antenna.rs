//! Inset-fed rectangular patch design and a simple element pattern.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::microstrip::{self, Substrate};
use crate::{SPEED_OF_LIGHT, Z_REF};

/// Edge input resistance (ohm) of the FR4 / 5.2 GHz reference patch.
///
/// Back-solved from a 4.7 mm inset on a 12.7 mm patch matched to 50 Ω,
/// so it reproduces that inset by construction. Use a measured or modelled
/// value for any other design.
pub const REFERENCE_EDGE_RESISTANCE: f64 = 317.0;

/// Patch length (m) of the finished FR4 / 5.2 GHz reference design.
pub const REFERENCE_PATCH_LENGTH: f64 = 12.7e-3;

/// Edge-to-edge element gap (m) of the reference layout.
pub const REFERENCE_ELEMENT_GAP: f64 = 3.4e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatchDims {
    pub width_w: f64,
    pub length_l: f64,
    /// Fringing extension on each radiating edge.
    pub delta_l: f64,
    pub eps_reff: f64,
    pub inset_y0: f64,
    pub feed_line_width: f64,
}

/// Width, length and fringing extension of a patch resonant at `fr`.
///
/// The returned dims carry `inset_y0 = 0` (edge feed) and the 50 Ω line width;
/// see [`PatchDims::with_inset`].
pub fn design_patch(fr: f64, substrate: &Substrate) -> Result<PatchDims> {
    substrate.validate()?;
    if !(fr.is_finite() && fr > 0.0) {
        return Err(Error::DesignRange {
            component: "patch",
            reason: format!("resonant frequency must be positive, got {fr}"),
        });
    }
    let er = substrate.epsilon_r;
    let h = substrate.height_h;
    let width_w = SPEED_OF_LIGHT / (2.0 * fr) * (2.0 / (er + 1.0)).sqrt();
    let eps_reff = microstrip::effective_permittivity(width_w, substrate);
    let u = width_w / h;
    let delta_l = h * 0.412 * (eps_reff + 0.3) * (u + 0.264) / ((eps_reff - 0.258) * (u + 0.8));
    let length_l = SPEED_OF_LIGHT / (2.0 * fr * eps_reff.sqrt()) - 2.0 * delta_l;
    if !(length_l.is_finite() && length_l > 0.0) {
        return Err(Error::DesignRange {
            component: "patch",
            reason: format!(
                "non-positive patch length {length_l} m (fringing {delta_l} m too large)"
            ),
        });
    }
    let feed_line_width = microstrip::synthesize_width(Z_REF, substrate)?;
    Ok(PatchDims {
        width_w,
        length_l,
        delta_l,
        eps_reff,
        inset_y0: 0.0,
        feed_line_width,
    })
}

impl PatchDims {
    /// Sets the inset depth that transforms `r_edge` down to `r_target`.
    pub fn with_inset(mut self, r_edge: f64, r_target: f64) -> Result<Self> {
        self.inset_y0 = inset_position(r_edge, r_target, self.length_l)?;
        Ok(self)
    }
}

/// Inset depth `y0` (m) where `r_edge·cos²(π·y0/L)` equals `r_target`.
pub fn inset_position(r_edge: f64, r_target: f64, length_l: f64) -> Result<f64> {
    if !(r_edge > 0.0 && r_target > 0.0 && length_l > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "inset needs positive resistances and length (r_edge {r_edge}, r_target {r_target}, L {length_l})"
        )));
    }
    if r_target > r_edge {
        return Err(Error::InsetNoSolution { r_edge, r_target });
    }
    Ok(length_l / PI * (r_target / r_edge).sqrt().acos())
}

/// Element radiation model used when forming array patterns.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementModel {
    /// `cos θ`, zero beyond ±90°.
    #[default]
    Cosine,
    Isotropic,
}

impl std::str::FromStr for ElementModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cos" | "cosine" => Ok(Self::Cosine),
            "iso" | "isotropic" => Ok(Self::Isotropic),
            other => Err(Error::InvalidParameter(format!(
                "unknown element model '{other}'"
            ))),
        }
    }
}

/// Linear field amplitude of one element at `theta` radians from broadside.
pub fn element_pattern(theta: f64, model: ElementModel) -> f64 {
    match model {
        ElementModel::Isotropic => 1.0,
        ElementModel::Cosine => {
            if theta.abs() >= FRAC_PI_2 {
                0.0
            } else {
                theta.cos().max(0.0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MM: f64 = 1e-3;

    #[test]
    fn reference_patch_dimensions() {
        let p = design_patch(5.2e9, &Substrate::fr4()).unwrap();
        assert!((p.width_w / MM - 16.8).abs() / 16.8 < 0.01);
        assert!((p.length_l / MM - 12.5).abs() < 0.05);
        assert!((p.length_l / MM - 12.7).abs() / 12.7 < 0.03);
        assert!((p.delta_l / MM - 0.72).abs() < 0.01);
        assert!((p.eps_reff - 4.28).abs() < 0.01);
        assert!(p.width_w > p.length_l);
        assert!((p.feed_line_width / MM - 2.8).abs() < 0.05);
    }

    #[test]
    fn length_plus_fringing_is_half_guided_wavelength() {
        for (fr, er, h) in [
            (5.2e9, 4.9, 1.6e-3),
            (2.4e9, 2.2, 0.8e-3),
            (10e9, 10.2, 0.635e-3),
        ] {
            let s = Substrate::new(er, h).unwrap();
            let p = design_patch(fr, &s).unwrap();
            let half = SPEED_OF_LIGHT / (2.0 * fr * p.eps_reff.sqrt());
            assert!(((p.length_l + 2.0 * p.delta_l) - half).abs() <= 1e-15 * half);
        }
    }

    #[test]
    fn width_independent_of_height() {
        let a = design_patch(5.2e9, &Substrate::new(4.9, 0.5e-3).unwrap()).unwrap();
        let b = design_patch(5.2e9, &Substrate::new(4.9, 3.2e-3).unwrap()).unwrap();
        assert_eq!(a.width_w, b.width_w);
    }

    #[test]
    fn thick_substrate_out_of_range() {
        let s = Substrate::new(4.9, 0.2).unwrap();
        match design_patch(5.2e9, &s) {
            Err(Error::DesignRange { component, .. }) => assert_eq!(component, "patch"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inset_examples() {
        let l = 12.7 * MM;
        assert_eq!(inset_position(50.0, 50.0, l).unwrap(), 0.0);
        let y0 = inset_position(REFERENCE_EDGE_RESISTANCE, 50.0, REFERENCE_PATCH_LENGTH).unwrap();
        assert!((y0 / MM - 4.7).abs() < 0.05, "{}", y0 / MM);
        let quarter = inset_position(200.0, 100.0, l).unwrap();
        assert!((quarter - l / 4.0).abs() < 1e-15);
        assert!(y0 < l / 2.0);
    }

    #[test]
    fn inset_without_solution() {
        assert!(matches!(
            inset_position(40.0, 50.0, 0.01),
            Err(Error::InsetNoSolution { .. })
        ));
        assert!(inset_position(0.0, 0.0, 0.01).is_err());
    }

    #[test]
    fn element_pattern_values() {
        assert_eq!(element_pattern(0.0, ElementModel::Cosine), 1.0);
        assert_eq!(element_pattern(FRAC_PI_2, ElementModel::Cosine), 0.0);
        assert_eq!(element_pattern(-FRAC_PI_2, ElementModel::Cosine), 0.0);
        assert!((element_pattern(60f64.to_radians(), ElementModel::Cosine) - 0.5).abs() < 1e-15);
        assert_eq!(element_pattern(1.2, ElementModel::Isotropic), 1.0);
    }
}
