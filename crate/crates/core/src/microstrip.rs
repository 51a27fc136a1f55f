//! Closed-form microstrip synthesis and analysis.
//!
//! Quasi-static model: effective permittivity does not depend on frequency and
//! the strip is treated as infinitely thin. Lengths are in meters.
//!
//! Width synthesis uses the two classic closed forms for `W/h`:
//!
//! * wide strip (`W/h > 2`), with `B = 60π² / (Z0·√εr)`:
//!   `W/h = (2/π)·[B − 1 − ln(2B − 1) + (εr − 1)/(2εr)·(ln(B − 1) + 0.39 − 0.61/εr)]`
//! * narrow strip (`W/h < 2`), with
//!   `A = (Z0/60)·√((εr + 1)/2) + (εr − 1)/(εr + 1)·(0.23 + 0.11/εr)`:
//!   `W/h = 8·e^A / (e^{2A} − 2)`
//!
//! Note the `Z0/60` normalisation inside `A`; without it the exponential
//! overflows for any practical impedance. The branch is chosen by checking
//! which formula is self-consistent with its own validity range rather than
//! by an impedance threshold.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;

/// Dielectric substrate: relative permittivity and thickness (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Substrate {
    pub epsilon_r: f64,
    pub height_h: f64,
}

impl Substrate {
    pub fn new(epsilon_r: f64, height_h: f64) -> Result<Self> {
        let s = Self {
            epsilon_r,
            height_h,
        };
        s.validate()?;
        Ok(s)
    }

    /// FR4 with εr = 4.9 and h = 1.6 mm, the reference WLAN design substrate.
    pub fn fr4() -> Self {
        Self {
            epsilon_r: 4.9,
            height_h: 1.6e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_r.is_finite() && self.epsilon_r >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon_r must be >= 1, got {}",
                self.epsilon_r
            )));
        }
        if !(self.height_h.is_finite() && self.height_h > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "substrate height must be > 0, got {}",
                self.height_h
            )));
        }
        Ok(())
    }
}

/// Physical and electrical description of one microstrip line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicrostripLineSpec {
    pub substrate: Substrate,
    pub z0: f64,
    pub width_w: f64,
    pub length_l: f64,
    pub eps_reff: f64,
    /// Phase delay at the design frequency (rad).
    pub electrical_length: f64,
}

impl MicrostripLineSpec {
    /// Synthesizes a line of impedance `z0` whose electrical length at
    /// `frequency` is `electrical_length` radians.
    pub fn design(
        z0: f64,
        substrate: Substrate,
        frequency: f64,
        electrical_length: f64,
    ) -> Result<Self> {
        let width_w = synthesize_width(z0, &substrate)?;
        let eps_reff = effective_permittivity(width_w, &substrate);
        let length_l = phase_shift_length(electrical_length, frequency, eps_reff);
        Ok(Self {
            substrate,
            z0,
            width_w,
            length_l,
            eps_reff,
            electrical_length,
        })
    }

    /// Quarter-wave line of impedance `z0` at `frequency`.
    pub fn quarter_wave(z0: f64, substrate: Substrate, frequency: f64) -> Result<Self> {
        Self::design(z0, substrate, frequency, PI / 2.0)
    }
}

fn wide_strip_ratio(z0: f64, er: f64) -> f64 {
    let b = 60.0 * PI * PI / (z0 * er.sqrt());
    2.0 / PI
        * (b - 1.0 - (2.0 * b - 1.0).ln()
            + (er - 1.0) / (2.0 * er) * ((b - 1.0).ln() + 0.39 - 0.61 / er))
}

fn narrow_strip_ratio(z0: f64, er: f64) -> f64 {
    let a = z0 / 60.0 * ((er + 1.0) / 2.0).sqrt() + (er - 1.0) / (er + 1.0) * (0.23 + 0.11 / er);
    8.0 * a.exp() / ((2.0 * a).exp() - 2.0)
}

fn usable(ratio: f64) -> bool {
    ratio.is_finite() && ratio > 0.0
}

/// Strip width (m) giving characteristic impedance `z0` (ohm) on `substrate`.
pub fn synthesize_width(z0: f64, substrate: &Substrate) -> Result<f64> {
    substrate.validate()?;
    if !(z0.is_finite() && z0 > 0.0) {
        return Err(Error::SynthesisRange {
            z0,
            reason: "impedance must be positive and finite".into(),
        });
    }
    let er = substrate.epsilon_r;
    let h = substrate.height_h;

    let wide = wide_strip_ratio(z0, er);
    if usable(wide) && wide >= 2.0 {
        return Ok(wide * h);
    }
    let narrow = narrow_strip_ratio(z0, er);

    let wide_ok = usable(wide) && wide > 2.0;
    let narrow_ok = usable(narrow) && narrow < 2.0;
    let ratio = match (wide_ok, narrow_ok) {
        (false, true) => narrow,
        (true, false) => wide,
        _ => {
            let round_trip = |ratio: f64| (analyze_impedance(ratio * h, substrate) - z0).abs();
            [wide, narrow]
                .into_iter()
                .filter(|r| usable(*r))
                .min_by(|a, b| round_trip(*a).total_cmp(&round_trip(*b)))
                .ok_or_else(|| Error::SynthesisRange {
                    z0,
                    reason: format!("no valid W/h (wide {wide}, narrow {narrow})"),
                })?
        }
    };
    Ok(ratio * h)
}

/// Characteristic impedance (ohm) of a strip of width `width_w` (m).
///
/// Standard quasi-static expressions:
/// `Z0 = 60/√εe · ln(8h/W + W/4h)` for `W/h ≤ 1`, otherwise
/// `Z0 = 120π / (√εe · (W/h + 1.393 + 0.667·ln(W/h + 1.444)))`.
pub fn analyze_impedance(width_w: f64, substrate: &Substrate) -> f64 {
    let u = width_w / substrate.height_h;
    let e = effective_permittivity(width_w, substrate).sqrt();
    if u <= 1.0 {
        60.0 / e * (8.0 / u + u / 4.0).ln()
    } else {
        120.0 * PI / (e * (u + 1.393 + 0.667 * (u + 1.444).ln()))
    }
}

/// Effective permittivity seen by the quasi-TEM mode of a strip of width `width_w`.
pub fn effective_permittivity(width_w: f64, substrate: &Substrate) -> f64 {
    let er = substrate.epsilon_r;
    let ratio = substrate.height_h / width_w;
    (er + 1.0) / 2.0 + (er - 1.0) / 2.0 / (1.0 + 12.0 * ratio).sqrt()
}

/// Wavelength inside the line (m).
pub fn guided_wavelength(frequency: f64, eps_reff: f64) -> f64 {
    SPEED_OF_LIGHT / frequency / eps_reff.sqrt()
}

/// Physical length (m) of a quarter-wave section.
pub fn quarter_wave_length(frequency: f64, eps_reff: f64) -> f64 {
    guided_wavelength(frequency, eps_reff) / 4.0
}

/// Physical length (m) of line producing a phase delay of `phi` radians.
pub fn phase_shift_length(phi: f64, frequency: f64, eps_reff: f64) -> f64 {
    phi * guided_wavelength(frequency, eps_reff) / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const MM: f64 = 1e-3;

    #[test]
    fn fifty_ohm_width_on_fr4() {
        let w = synthesize_width(50.0, &Substrate::fr4()).unwrap();
        assert!((w / MM - 2.8).abs() < 0.05, "w = {} mm", w / MM);
        assert!((w / (1.6 * MM) - 1.76).abs() < 0.01);
    }

    #[test]
    fn branch_arm_width_on_fr4() {
        let w = synthesize_width(35.4, &Substrate::fr4()).unwrap();
        assert!((w / MM - 4.8).abs() < 0.1, "w = {} mm", w / MM);
    }

    #[test]
    fn wide_formula_intermediate_b() {
        // B = 60π²/(50·√4.9)
        let b = 60.0 * PI * PI / (50.0 * 4.9f64.sqrt());
        assert!((b - 5.35).abs() < 0.01);
    }

    #[test]
    fn rejects_non_positive_impedance() {
        for z in [0.0, -10.0, f64::NAN] {
            match synthesize_width(z, &Substrate::fr4()) {
                Err(Error::SynthesisRange { .. }) => {}
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn rejects_bad_substrate() {
        assert!(Substrate::new(0.5, 1e-3).is_err());
        assert!(Substrate::new(4.9, 0.0).is_err());
        assert!(synthesize_width(
            50.0,
            &Substrate {
                epsilon_r: 4.9,
                height_h: -1.0
            }
        )
        .is_err());
    }

    #[test]
    fn air_dielectric_has_unit_permittivity() {
        let air = Substrate::new(1.0, 1.6e-3).unwrap();
        for w in [0.1e-3, 1e-3, 20e-3] {
            assert_eq!(effective_permittivity(w, &air), 1.0);
        }
    }

    #[test]
    fn effective_permittivity_examples() {
        let s = Substrate::fr4();
        let h = s.height_h;
        assert!((effective_permittivity(10.5 * h, &s) - 4.28).abs() < 0.01);
        assert!((effective_permittivity(1.76 * h, &s) - 3.65).abs() < 0.01);
    }

    #[test]
    fn wavelength_examples() {
        assert!((guided_wavelength(5.2e9, 1.0) / MM - 57.652).abs() < 0.01);
        assert_relative_eq!(
            guided_wavelength(5.2e9, 4.0),
            guided_wavelength(5.2e9, 1.0) / 2.0,
            max_relative = 1e-15
        );
        assert!((guided_wavelength(5.2e9, 3.65) / MM - 30.2).abs() < 0.05);
        assert_relative_eq!(
            guided_wavelength(5.2e9, 1.0) * 5.2e9,
            SPEED_OF_LIGHT,
            max_relative = 1e-15
        );
    }

    #[test]
    fn quarter_wave_examples() {
        let s = Substrate::fr4();
        let w = synthesize_width(50.0, &s).unwrap();
        let e = effective_permittivity(w, &s);
        assert!((quarter_wave_length(5.2e9, e) / MM - 7.5).abs() < 0.1);
        assert!((quarter_wave_length(5.2e9, 1.0) / MM - 14.413).abs() < 0.01);
        assert!((quarter_wave_length(2.6e9, 3.65) / MM - 15.1).abs() < 0.05);
    }

    #[test]
    fn phase_length_examples() {
        let (f, e) = (5.2e9, 3.65);
        assert_relative_eq!(
            phase_shift_length(2.0 * PI, f, e),
            guided_wavelength(f, e),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            phase_shift_length(PI / 2.0, f, e),
            quarter_wave_length(f, e),
            max_relative = 1e-15
        );
        assert!((phase_shift_length(PI / 4.0, f, e) / MM - 3.78).abs() < 0.01);
    }

    #[test]
    fn analysis_examples() {
        let s = Substrate::fr4();
        assert!((analyze_impedance(2.8 * MM, &s) - 50.0).abs() < 1.0);
        assert!((analyze_impedance(4.8 * MM, &s) - 35.4).abs() < 1.0);
        let w = synthesize_width(70.7, &s).unwrap();
        assert!((analyze_impedance(w, &s) - 70.7).abs() / 70.7 < 0.01);
    }

    #[test]
    fn line_spec_design() {
        let spec = MicrostripLineSpec::quarter_wave(50.0, Substrate::fr4(), 5.2e9).unwrap();
        assert!(spec.eps_reff > 1.0 && spec.eps_reff < 4.9);
        assert_relative_eq!(
            spec.length_l,
            quarter_wave_length(5.2e9, spec.eps_reff),
            max_relative = 1e-15
        );
    }
}
