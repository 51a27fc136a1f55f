//! Reproducible design reports and tabular outputs of a Butler run.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt::Write as _;

use crate::antenna::{self, PatchDims};
use crate::array::{self, ArrayGeometry};
use crate::components::{DeviceRole, Fidelity};
use crate::error::{Error, Result};
use crate::fmt::sci9;
use crate::microstrip::{MicrostripLineSpec, Substrate};
use crate::network::{self, excite_matrix, ExcitationResult};
use crate::smatrix::ScatteringMatrix;
use crate::touchstone::FreqUnit;
use crate::Z_REF;

/// Linearly spaced frequency sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub f_start: f64,
    pub f_stop: f64,
    pub n_points: usize,
    pub scale_unit: FreqUnit,
}

impl SweepSpec {
    pub fn new(f_start: f64, f_stop: f64, n_points: usize, scale_unit: FreqUnit) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidParameter(format!(
                "sweep needs at least 2 points, got {n_points}"
            )));
        }
        if !(f_start > 0.0 && f_start < f_stop && f_stop.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sweep requires 0 < f_start < f_stop, got {f_start}..{f_stop}"
            )));
        }
        Ok(Self {
            f_start,
            f_stop,
            n_points,
            scale_unit,
        })
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let step = (self.f_stop - self.f_start) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| {
                if i + 1 == self.n_points {
                    self.f_stop
                } else {
                    self.f_start + step * i as f64
                }
            })
            .collect()
    }
}

/// Rounds to nine significant digits so reports are stable across platforms.
fn r9(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { 0.0 } else { v };
    }
    sci9(v).parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportInputs {
    pub frequency_hz: f64,
    pub epsilon_r: f64,
    pub height_mm: f64,
    pub edge_resistance_ohm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineRow {
    pub name: String,
    pub z0_ohm: f64,
    pub width_mm: f64,
    pub length_mm: f64,
    pub eps_reff: f64,
    pub electrical_length_deg: f64,
}

impl LineRow {
    fn from_spec(name: &str, spec: &MicrostripLineSpec) -> Self {
        Self {
            name: name.into(),
            z0_ohm: r9(spec.z0),
            width_mm: r9(spec.width_w * 1e3),
            length_mm: r9(spec.length_l * 1e3),
            eps_reff: r9(spec.eps_reff),
            electrical_length_deg: r9(spec.electrical_length.to_degrees()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchRow {
    pub width_mm: f64,
    pub length_mm: f64,
    pub delta_l_mm: f64,
    pub eps_reff: f64,
    pub inset_mm: f64,
    pub feed_line_width_mm: f64,
    pub element_gap_mm: f64,
    pub center_spacing_mm: f64,
}

impl PatchRow {
    fn from_dims(p: &PatchDims) -> Self {
        let gap = antenna::REFERENCE_ELEMENT_GAP;
        Self {
            width_mm: r9(p.width_w * 1e3),
            length_mm: r9(p.length_l * 1e3),
            delta_l_mm: r9(p.delta_l * 1e3),
            eps_reff: r9(p.eps_reff),
            inset_mm: r9(p.inset_y0 * 1e3),
            feed_line_width_mm: r9(p.feed_line_width * 1e3),
            element_gap_mm: r9(gap * 1e3),
            center_spacing_mm: r9((p.width_w + gap) * 1e3),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetlistSummary {
    pub fidelity: Fidelity,
    pub hybrids: usize,
    pub crossovers: usize,
    pub phase_shifters: usize,
    pub matching_lines: usize,
    pub external_ports: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitationRow {
    pub input_port: String,
    pub output_port: String,
    pub magnitude_db: f64,
    pub phase_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamRow {
    pub input_port: String,
    pub progression_deg: f64,
    pub beam_angle_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub inputs: ReportInputs,
    pub microstrip: Vec<LineRow>,
    pub patch: PatchRow,
    pub netlist: NetlistSummary,
    pub excitation: Vec<ExcitationRow>,
    pub beams: Vec<BeamRow>,
}

/// Builds the full closed-form design at `frequency` on `substrate`.
///
/// The inset is solved for a 50 Ω feed from `edge_resistance`. Excitations
/// and beams come from the ideal Butler matrix at `frequency` with
/// half-wavelength element spacing.
pub fn design_report(
    frequency: f64,
    substrate: &Substrate,
    edge_resistance: f64,
) -> Result<DesignReport> {
    substrate.validate()?;
    if !(frequency.is_finite() && frequency > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "frequency must be positive, got {frequency}"
        )));
    }
    let line = |name: &str, z0: f64, phi: f64| -> Result<LineRow> {
        let spec = MicrostripLineSpec::design(z0, *substrate, frequency, phi).map_err(|e| {
            Error::DesignRange {
                component: "microstrip",
                reason: format!("{name}: {e}"),
            }
        })?;
        Ok(LineRow::from_spec(name, &spec))
    };
    let microstrip = vec![
        line("hybrid shunt arm / feed (quarter-wave)", Z_REF, PI / 2.0)?,
        line(
            "hybrid series arm (quarter-wave)",
            Z_REF * FRAC_1_SQRT_2,
            PI / 2.0,
        )?,
        line("-45 deg phase shifter", Z_REF, PI / 4.0)?,
        line("crossover matching line", Z_REF, 1.5 * PI)?,
    ];

    let patch = antenna::design_patch(frequency, substrate)?.with_inset(edge_resistance, Z_REF)?;

    let net = network::build_butler_4x4(Fidelity::Ideal, frequency, substrate)?;
    let netlist = NetlistSummary {
        fidelity: Fidelity::Ideal,
        hybrids: net.count_role(DeviceRole::Hybrid),
        crossovers: net.count_role(DeviceRole::Crossover),
        phase_shifters: net.count_role(DeviceRole::PhaseShifter),
        matching_lines: net.count_role(DeviceRole::MatchingLine),
        external_ports: net.external_names().iter().map(|s| s.to_string()).collect(),
    };
    let s = network::interconnect(&net, frequency)?;
    let excitations = all_excitations(&s, frequency)?;
    let geometry = ArrayGeometry::half_wavelength(4, frequency)?;

    Ok(DesignReport {
        inputs: ReportInputs {
            frequency_hz: r9(frequency),
            epsilon_r: r9(substrate.epsilon_r),
            height_mm: r9(substrate.height_h * 1e3),
            edge_resistance_ohm: r9(edge_resistance),
        },
        microstrip,
        patch: PatchRow::from_dims(&patch),
        netlist,
        excitation: excitation_rows(&excitations),
        beams: beam_table(&excitations, &geometry)?,
    })
}

/// Excitation of each of the four inputs, in port order.
pub fn all_excitations(s: &ScatteringMatrix, frequency: f64) -> Result<Vec<ExcitationResult>> {
    (1..=s.n_ports() / 2)
        .map(|p| excite_matrix(s, p, frequency))
        .collect()
}

fn port_name(i: usize) -> String {
    network::BUTLER_PORTS
        .get(i)
        .map_or_else(|| format!("P{}", i + 1), |s| s.to_string())
}

pub fn excitation_rows(excitations: &[ExcitationResult]) -> Vec<ExcitationRow> {
    let n_in = excitations.len();
    excitations
        .iter()
        .flat_map(|ex| {
            ex.output_amplitudes
                .iter()
                .enumerate()
                .map(move |(k, a)| ExcitationRow {
                    input_port: port_name(ex.input_port - 1),
                    output_port: port_name(n_in + k),
                    magnitude_db: r9(20.0 * a.norm().log10()),
                    phase_deg: r9(a.arg().to_degrees()),
                })
        })
        .collect()
}

/// Progressive phase of each input and the beam direction it produces.
pub fn beam_table(
    excitations: &[ExcitationResult],
    geometry: &ArrayGeometry,
) -> Result<Vec<BeamRow>> {
    excitations
        .iter()
        .map(|ex| {
            let progression = ex.progression_deg();
            let theta = array::beam_angle(-progression.to_radians(), geometry)?;
            Ok(BeamRow {
                input_port: port_name(ex.input_port - 1),
                progression_deg: r9(progression),
                beam_angle_deg: r9(theta.to_degrees()),
            })
        })
        .collect()
}

/// `frequency_hz,input_port,output_port,magnitude_db,phase_deg` for the
/// selected inputs (one-based) at every sweep point.
pub fn excitation_csv(sweep: &[(f64, ScatteringMatrix)], inputs: &[usize]) -> Result<String> {
    let mut out = String::from("frequency_hz,input_port,output_port,magnitude_db,phase_deg\n");
    for (f, s) in sweep {
        let n_in = s.n_ports() / 2;
        for &p in inputs {
            let ex = excite_matrix(s, p, *f)?;
            for (k, a) in ex.output_amplitudes.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    sci9(*f),
                    port_name(p - 1),
                    port_name(n_in + k),
                    sci9(20.0 * a.norm().log10()),
                    sci9(a.arg().to_degrees())
                );
            }
        }
    }
    Ok(out)
}

pub fn beam_csv(rows: &[BeamRow]) -> String {
    let mut out = String::from("input_port,progression_deg,beam_angle_deg\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            r.input_port,
            sci9(r.progression_deg),
            sci9(r.beam_angle_deg)
        );
    }
    out
}

impl DesignReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Plain-text summary tables.
    pub fn to_text(&self) -> String {
        let mut o = String::new();
        let i = &self.inputs;
        let _ = writeln!(
            o,
            "Design at {:.4} GHz, er = {}, h = {} mm, patch edge resistance {} ohm",
            i.frequency_hz / 1e9,
            i.epsilon_r,
            i.height_mm,
            i.edge_resistance_ohm
        );
        let _ = writeln!(o, "\nMicrostrip lines");
        let _ = writeln!(
            o,
            "  {:<40} {:>8} {:>9} {:>10} {:>8} {:>8}",
            "line", "Z0 ohm", "W mm", "L mm", "ereff", "deg"
        );
        for l in &self.microstrip {
            let _ = writeln!(
                o,
                "  {:<40} {:>8.2} {:>9.3} {:>10.3} {:>8.3} {:>8.1}",
                l.name, l.z0_ohm, l.width_mm, l.length_mm, l.eps_reff, l.electrical_length_deg
            );
        }
        let p = &self.patch;
        let _ = writeln!(o, "\nPatch antenna");
        let _ = writeln!(o, "  width            {:>8.3} mm", p.width_mm);
        let _ = writeln!(o, "  length           {:>8.3} mm", p.length_mm);
        let _ = writeln!(o, "  fringing dL      {:>8.3} mm", p.delta_l_mm);
        let _ = writeln!(o, "  ereff            {:>8.3}", p.eps_reff);
        let _ = writeln!(o, "  inset depth      {:>8.3} mm", p.inset_mm);
        let _ = writeln!(o, "  feed line width  {:>8.3} mm", p.feed_line_width_mm);
        let n = &self.netlist;
        let _ = writeln!(
            o,
            "\nNetwork ({}): {} hybrids, {} crossovers, {} phase shifters, {} matching lines",
            n.fidelity, n.hybrids, n.crossovers, n.phase_shifters, n.matching_lines
        );
        let _ = writeln!(o, "\nExcitations");
        for e in &self.excitation {
            let _ = writeln!(
                o,
                "  {:>3} -> {:<3} {:>8.3} dB {:>9.3} deg",
                e.input_port, e.output_port, e.magnitude_db, e.phase_deg
            );
        }
        let _ = writeln!(o, "\nBeams (d = lambda0/2)");
        for b in &self.beams {
            let _ = writeln!(
                o,
                "  {:>3}  progression {:>8.2} deg  beam {:>7.2} deg",
                b.input_port, b.progression_deg, b.beam_angle_deg
            );
        }
        o
    }
}
