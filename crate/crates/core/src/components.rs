//! Scattering-matrix models of the Butler matrix building blocks.
//!
//! Every model is referenced to 50 Ω. Two fidelity levels exist: `ideal`
//! models are the textbook matrices, `circuit` models are assembled from
//! lossless transmission-line sections and ideal junctions.
//!
//! Four-port port numbering follows the quadrature hybrid convention:
//! 1 input, 2 through, 3 coupled, 4 isolated. For the crossover, 1 → 3 and
//! 2 → 4 are the crossing paths.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::microstrip::{self, Substrate};
use crate::network::{interconnect, Netlist};
use crate::smatrix::{Abcd, ScatteringMatrix};
use crate::{SPEED_OF_LIGHT, Z_REF};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fidelity {
    Ideal,
    Circuit,
}

impl std::str::FromStr for Fidelity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ideal" => Ok(Self::Ideal),
            "circuit" => Ok(Self::Circuit),
            other => Err(Error::InvalidParameter(format!(
                "unknown fidelity '{other}'"
            ))),
        }
    }
}

impl std::fmt::Display for Fidelity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Ideal => "ideal",
            Self::Circuit => "circuit",
        })
    }
}

/// What a device does inside a larger network; used for census and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceRole {
    Hybrid,
    Crossover,
    PhaseShifter,
    /// Delay line that equalises the insertion phase of a crossover.
    MatchingLine,
    Line,
    Junction,
    Load,
}

/// Model parameters. Frequencies in Hz, lengths in meters, angles in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DeviceKind {
    IdealHybrid,
    IdealCrossover,
    /// Matched delay whose phase is `phi0` at `f0` and scales linearly with frequency.
    PhaseShifter {
        phi0: f64,
        f0: f64,
    },
    /// Lossless line of characteristic impedance `z0`.
    Tline {
        z0: f64,
        length: f64,
        eps_reff: f64,
    },
    /// Lossless three-way junction of equal-impedance ports.
    Tee,
    MatchedLoad,
    /// Composite device; its ports are the netlist's external ports.
    Subnetwork {
        netlist: Box<Netlist>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceModel {
    pub label: String,
    pub role: DeviceRole,
    pub fidelity: Fidelity,
    pub kind: DeviceKind,
}

impl DeviceModel {
    pub fn n_ports(&self) -> usize {
        match &self.kind {
            DeviceKind::IdealHybrid | DeviceKind::IdealCrossover => 4,
            DeviceKind::PhaseShifter { .. } | DeviceKind::Tline { .. } => 2,
            DeviceKind::Tee => 3,
            DeviceKind::MatchedLoad => 1,
            DeviceKind::Subnetwork { netlist } => netlist.external_ports.len(),
        }
    }

    /// Scattering matrix at `frequency` (Hz).
    pub fn evaluate(&self, frequency: f64) -> Result<ScatteringMatrix> {
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "frequency must be positive, got {frequency}"
            )));
        }
        let j = Complex64::i();
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        Ok(match &self.kind {
            DeviceKind::IdealHybrid => {
                let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
                ScatteringMatrix::from_rows([
                    [zero, j, one, zero],
                    [j, zero, zero, one],
                    [one, zero, zero, j],
                    [zero, one, j, zero],
                ])
                .scale(r)
            }
            DeviceKind::IdealCrossover => ScatteringMatrix::from_rows([
                [zero, zero, j, zero],
                [zero, zero, zero, j],
                [j, zero, zero, zero],
                [zero, j, zero, zero],
            ]),
            DeviceKind::PhaseShifter { phi0, f0 } => {
                let t = Complex64::from_polar(1.0, -phi0 * frequency / f0);
                ScatteringMatrix::from_rows([[zero, t], [t, zero]])
            }
            DeviceKind::Tline {
                z0,
                length,
                eps_reff,
            } => {
                let theta = 2.0 * PI * length * eps_reff.sqrt() * frequency / SPEED_OF_LIGHT;
                Abcd::lossless_line(*z0, theta).to_s(Z_REF)
            }
            DeviceKind::Tee => {
                let d = Complex64::new(-1.0 / 3.0, 0.0);
                let t = Complex64::new(2.0 / 3.0, 0.0);
                ScatteringMatrix::from_rows([[d, t, t], [t, d, t], [t, t, d]])
            }
            DeviceKind::MatchedLoad => ScatteringMatrix::zeros(1),
            DeviceKind::Subnetwork { netlist } => interconnect(netlist, frequency)?,
        })
    }
}

/// Quadrature hybrid with the textbook matrix `(1/√2)·[[0,j,1,0],[j,0,0,1],[1,0,0,j],[0,1,j,0]]`.
pub fn ideal_hybrid() -> DeviceModel {
    DeviceModel {
        label: "90deg hybrid (1 in, 2 through, 3 coupled, 4 isolated)".into(),
        role: DeviceRole::Hybrid,
        fidelity: Fidelity::Ideal,
        kind: DeviceKind::IdealHybrid,
    }
}

/// Crossover passing 1 → 3 and 2 → 4 with a `j` transmission coefficient.
pub fn ideal_crossover() -> DeviceModel {
    DeviceModel {
        label: "crossover (1->3, 2->4)".into(),
        role: DeviceRole::Crossover,
        fidelity: Fidelity::Ideal,
        kind: DeviceKind::IdealCrossover,
    }
}

/// Delay of `phi0` radians at `f0`; transmission is `exp(-j·phi0·f/f0)`.
pub fn phase_shifter(phi0: f64, f0: f64) -> DeviceModel {
    assert!(f0 > 0.0, "phase shifter design frequency must be positive");
    DeviceModel {
        label: format!(
            "-{:.2}deg phase shifter @ {:.4} GHz (1-2)",
            phi0.to_degrees(),
            f0 / 1e9
        ),
        role: DeviceRole::PhaseShifter,
        fidelity: Fidelity::Ideal,
        kind: DeviceKind::PhaseShifter { phi0, f0 },
    }
}

/// Lossless transmission line, converted from its ABCD form to S referenced to 50 Ω.
pub fn tline(z0: f64, length: f64, eps_reff: f64) -> DeviceModel {
    assert!(
        z0 > 0.0 && length >= 0.0 && eps_reff >= 1.0,
        "tline parameters out of range"
    );
    DeviceModel {
        label: format!("{z0:.2} ohm line, {:.3} mm (1-2)", length * 1e3),
        role: DeviceRole::Line,
        fidelity: Fidelity::Circuit,
        kind: DeviceKind::Tline {
            z0,
            length,
            eps_reff,
        },
    }
}

pub fn tee() -> DeviceModel {
    DeviceModel {
        label: "3-way junction".into(),
        role: DeviceRole::Junction,
        fidelity: Fidelity::Circuit,
        kind: DeviceKind::Tee,
    }
}

pub fn matched_load() -> DeviceModel {
    DeviceModel {
        label: "matched load".into(),
        role: DeviceRole::Load,
        fidelity: Fidelity::Ideal,
        kind: DeviceKind::MatchedLoad,
    }
}

/// 50 Ω microstrip line of the given phase delay at `f0`.
pub(crate) fn microstrip_delay(phi: f64, f0: f64, substrate: &Substrate) -> Result<DeviceModel> {
    let w = microstrip::synthesize_width(Z_REF, substrate)?;
    let e = microstrip::effective_permittivity(w, substrate);
    Ok(tline(Z_REF, microstrip::phase_shift_length(phi, f0, e), e))
}

fn quarter_wave_tline(z0: f64, f0: f64, substrate: &Substrate) -> Result<DeviceModel> {
    let spec = microstrip::MicrostripLineSpec::quarter_wave(z0, *substrate, f0)?;
    Ok(tline(z0, spec.length_l, spec.eps_reff))
}

/// Branch-line quadrature hybrid built from quarter-wave microstrip sections.
///
/// Layout (ports at the corners, each behind a 50 Ω quarter-wave feed line):
///
/// ```text
///   1 ──┬── Z0/√2 ──┬── 2
///       │           │
///      Z0          Z0
///       │           │
///   4 ──┴── Z0/√2 ──┴── 3
/// ```
///
/// The feed lines place the reference planes so that at `f0` the matrix
/// coincides with [`ideal_hybrid`] including its sign.
pub fn branchline_hybrid_circuit(f0: f64, substrate: &Substrate) -> Result<DeviceModel> {
    if !(f0.is_finite() && f0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "f0 must be positive, got {f0}"
        )));
    }
    let series = quarter_wave_tline(Z_REF * FRAC_1_SQRT_2, f0, substrate)?;
    let shunt = quarter_wave_tline(Z_REF, f0, substrate)?;
    let feed = quarter_wave_tline(Z_REF, f0, substrate)?;

    let mut net = Netlist::new();
    for corner in 1..=4 {
        net.add_device(format!("J{corner}"), tee())?;
        net.add_device(format!("F{corner}"), feed.clone())?;
        net.connect((format!("J{corner}"), 1), (format!("F{corner}"), 2))?;
    }
    // Junction port 2 faces the horizontal arm, port 3 the vertical arm.
    net.add_device("S12", series.clone())?;
    net.add_device("S43", series)?;
    net.add_device("P14", shunt.clone())?;
    net.add_device("P23", shunt)?;
    net.connect(("J1", 2), ("S12", 1))?;
    net.connect(("S12", 2), ("J2", 2))?;
    net.connect(("J4", 2), ("S43", 1))?;
    net.connect(("S43", 2), ("J3", 2))?;
    net.connect(("J1", 3), ("P14", 1))?;
    net.connect(("P14", 2), ("J4", 3))?;
    net.connect(("J2", 3), ("P23", 1))?;
    net.connect(("P23", 2), ("J3", 3))?;
    for corner in 1..=4 {
        net.expose(format!("{corner}"), (format!("F{corner}"), 1))?;
    }
    net.validate()?;

    Ok(DeviceModel {
        label: format!(
            "branch-line hybrid @ {:.4} GHz (1 in, 2 through, 3 coupled, 4 isolated)",
            f0 / 1e9
        ),
        role: DeviceRole::Hybrid,
        fidelity: Fidelity::Circuit,
        kind: DeviceKind::Subnetwork {
            netlist: Box::new(net),
        },
    })
}

/// Crossover made of two cascaded branch-line hybrids.
///
/// `H1.2 → H2.1` and `H1.3 → H2.4`; external ports are
/// `[H1.1, H1.4, H2.3, H2.2]` so that 1 → 3 and 2 → 4 cross.
pub fn crossover_circuit(f0: f64, substrate: &Substrate) -> Result<DeviceModel> {
    let hybrid = branchline_hybrid_circuit(f0, substrate)?;
    let net = cascaded_hybrid_crossover(hybrid.clone(), hybrid)?;
    Ok(DeviceModel {
        label: format!("two-hybrid crossover @ {:.4} GHz (1->3, 2->4)", f0 / 1e9),
        role: DeviceRole::Crossover,
        fidelity: Fidelity::Circuit,
        kind: DeviceKind::Subnetwork {
            netlist: Box::new(net),
        },
    })
}

pub(crate) fn cascaded_hybrid_crossover(a: DeviceModel, b: DeviceModel) -> Result<Netlist> {
    let mut net = Netlist::new();
    net.add_device("H1", a)?;
    net.add_device("H2", b)?;
    net.connect(("H1", 2), ("H2", 1))?;
    net.connect(("H1", 3), ("H2", 4))?;
    net.expose("1", ("H1", 1))?;
    net.expose("2", ("H1", 4))?;
    net.expose("3", ("H2", 3))?;
    net.expose("4", ("H2", 2))?;
    net.validate()?;
    Ok(net)
}
