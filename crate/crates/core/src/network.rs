//! Multiport interconnection and the 4x4 Butler matrix topology.
//!
//! [`interconnect`] uses sub-network growth. All devices are first stacked
//! into one block-diagonal matrix; each connection then joins two ports `k`
//! and `l` of that composite and removes them. With every other port matched,
//! the remaining entries become
//!
//! ```text
//! S'ij = Sij + [ Skj·Sil·(1 − Slk) + Slj·Sik·(1 − Skl) + Skj·Sll·Sik + Slj·Skk·Sil ] / D
//! D    = (1 − Skl)·(1 − Slk) − Skk·Sll
//! ```
//!
//! A join with `|D| < 1e-12` is a resonance of the partially built network
//! and is reported as [`Error::TopologyResonance`].

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;

use crate::components::{self, DeviceModel, DeviceRole, Fidelity};
use crate::error::{Error, Result};
use crate::microstrip::Substrate;
use crate::smatrix::ScatteringMatrix;

/// Minimum join denominator magnitude.
pub const RESONANCE_TOL: f64 = 1e-12;

/// A one-based port of a named device.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PortRef {
    pub device: String,
    pub port: usize,
}

impl std::fmt::Display for PortRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}.{}", self.device, self.port)
    }
}

impl<S: Into<String>> From<(S, usize)> for PortRef {
    fn from((device, port): (S, usize)) -> Self {
        Self {
            device: device.into(),
            port,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedDevice {
    pub name: String,
    #[serde(flatten)]
    pub model: DeviceModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Connection {
    pub a: PortRef,
    pub b: PortRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalPort {
    pub name: String,
    #[serde(flatten)]
    pub at: PortRef,
}

/// Devices, the pairwise joins between their ports, and the ordered list of
/// ports left open to the outside.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Netlist {
    pub devices: Vec<NamedDevice>,
    pub connections: Vec<Connection>,
    pub external_ports: Vec<ExternalPort>,
}

impl Netlist {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_device(&mut self, name: impl Into<String>, model: DeviceModel) -> Result<()> {
        let name = name.into();
        if self.devices.iter().any(|d| d.name == name) {
            return Err(Error::Netlist(format!("duplicate device name '{name}'")));
        }
        self.devices.push(NamedDevice { name, model });
        Ok(())
    }

    pub fn connect(&mut self, a: impl Into<PortRef>, b: impl Into<PortRef>) -> Result<()> {
        let (a, b) = (a.into(), b.into());
        self.check_port(&a)?;
        self.check_port(&b)?;
        self.connections.push(Connection { a, b });
        Ok(())
    }

    pub fn expose(&mut self, name: impl Into<String>, at: impl Into<PortRef>) -> Result<()> {
        let at = at.into();
        self.check_port(&at)?;
        self.external_ports.push(ExternalPort {
            name: name.into(),
            at,
        });
        Ok(())
    }

    pub fn device(&self, name: &str) -> Option<&NamedDevice> {
        self.devices.iter().find(|d| d.name == name)
    }

    pub fn external_names(&self) -> Vec<&str> {
        self.external_ports
            .iter()
            .map(|p| p.name.as_str())
            .collect()
    }

    /// Number of devices playing `role`.
    pub fn count_role(&self, role: DeviceRole) -> usize {
        self.devices.iter().filter(|d| d.model.role == role).count()
    }

    fn check_port(&self, p: &PortRef) -> Result<()> {
        let dev = self
            .device(&p.device)
            .ok_or_else(|| Error::Netlist(format!("unknown device '{}'", p.device)))?;
        let n = dev.model.n_ports();
        if p.port == 0 || p.port > n {
            return Err(Error::Netlist(format!(
                "port {p} out of range (device has {n} ports)"
            )));
        }
        Ok(())
    }

    /// Checks that every device port is used exactly once, either in one
    /// connection or as one external port.
    pub fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for d in &self.devices {
            if !names.insert(d.name.as_str()) {
                return Err(Error::Netlist(format!(
                    "duplicate device name '{}'",
                    d.name
                )));
            }
        }
        let mut used: HashSet<&PortRef> = HashSet::new();
        let refs = self
            .connections
            .iter()
            .flat_map(|c| [&c.a, &c.b])
            .chain(self.external_ports.iter().map(|e| &e.at));
        for r in refs {
            self.check_port(r)?;
            if !used.insert(r) {
                return Err(Error::Netlist(format!("port {r} used more than once")));
            }
        }
        for c in &self.connections {
            if c.a == c.b {
                return Err(Error::Netlist(format!("port {} connected to itself", c.a)));
            }
        }
        for d in &self.devices {
            for port in 1..=d.model.n_ports() {
                let r = PortRef {
                    device: d.name.clone(),
                    port,
                };
                if !used.contains(&r) {
                    return Err(Error::Netlist(format!("dangling port {r}")));
                }
            }
        }
        if self.external_ports.is_empty() {
            return Err(Error::Netlist("netlist has no external ports".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let net: Self = serde_json::from_str(text)?;
        net.validate()?;
        Ok(net)
    }
}

/// Working state of sub-network growth: a dense matrix plus the identity of
/// each remaining row.
struct Composite {
    n: usize,
    s: Vec<Complex64>,
    ports: Vec<PortRef>,
}

impl Composite {
    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.s[i * self.n + j]
    }

    fn join(&mut self, k: usize, l: usize) -> Result<()> {
        let one = Complex64::new(1.0, 0.0);
        let (skk, sll, skl, slk) = (self.at(k, k), self.at(l, l), self.at(k, l), self.at(l, k));
        let denom = (one - skl) * (one - slk) - skk * sll;
        if denom.norm() < RESONANCE_TOL {
            return Err(Error::TopologyResonance {
                a: self.ports[k].to_string(),
                b: self.ports[l].to_string(),
                denominator: denom.norm(),
            });
        }
        let keep: Vec<usize> = (0..self.n).filter(|&i| i != k && i != l).collect();
        let m = keep.len();
        let mut out = vec![Complex64::new(0.0, 0.0); m * m];
        for (r, &i) in keep.iter().enumerate() {
            let (sik, sil) = (self.at(i, k), self.at(i, l));
            for (c, &j) in keep.iter().enumerate() {
                let (skj, slj) = (self.at(k, j), self.at(l, j));
                let num = skj * sil * (one - slk)
                    + slj * sik * (one - skl)
                    + skj * sll * sik
                    + slj * skk * sil;
                out[r * m + c] = self.at(i, j) + num / denom;
            }
        }
        self.ports = keep.iter().map(|&i| self.ports[i].clone()).collect();
        self.s = out;
        self.n = m;
        Ok(())
    }
}

/// Scattering matrix seen at the netlist's external ports, in declared order.
pub fn interconnect(net: &Netlist, frequency: f64) -> Result<ScatteringMatrix> {
    net.validate()?;
    let blocks = net
        .devices
        .iter()
        .map(|d| d.model.evaluate(frequency))
        .collect::<Result<Vec<_>>>()?;
    let stacked = ScatteringMatrix::block_diag(blocks.iter());
    let ports = net
        .devices
        .iter()
        .flat_map(|d| (1..=d.model.n_ports()).map(move |p| PortRef::from((d.name.as_str(), p))))
        .collect();
    let mut comp = Composite {
        n: stacked.n_ports(),
        s: stacked.entries().to_vec(),
        ports,
    };

    for c in &net.connections {
        let k = comp.ports.iter().position(|p| *p == c.a);
        let l = comp.ports.iter().position(|p| *p == c.b);
        match (k, l) {
            (Some(k), Some(l)) => comp.join(k, l)?,
            _ => unreachable!("validated netlist references a consumed port"),
        }
    }

    let index: HashMap<&PortRef, usize> =
        comp.ports.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let order: Vec<usize> = net.external_ports.iter().map(|e| index[&e.at]).collect();
    let full = ScatteringMatrix::from_row_major(comp.n, comp.s, stacked.z_ref())?;
    Ok(full.select(&order))
}

/// Evaluates the netlist at every frequency, in parallel, preserving order.
pub fn sweep(net: &Netlist, frequencies: &[f64]) -> Result<Vec<(f64, ScatteringMatrix)>> {
    net.validate()?;
    frequencies
        .par_iter()
        .map(|&f| interconnect(net, f).map(|s| (f, s)))
        .collect()
}

/// Names of the Butler matrix external ports, inputs first.
pub const BUTLER_PORTS: [&str; 8] = ["1R", "2L", "2R", "1L", "A1", "A2", "A3", "A4"];

/// Inter-element phase lag of the −45° shifters.
const SHIFTER_PHASE: f64 = PI / 4.0;
/// Delay matching the `j` insertion phase of a crossover on uncrossed lines
/// (`exp(−j·3π/2) = j`).
const MATCHING_PHASE: f64 = 3.0 * PI / 2.0;

/// 4x4 Butler matrix: 4 hybrids, 2 crossovers, 2 −45° shifters.
///
/// ```text
///  1R ─┐┌─ H1.2 ─ PS1 ─ M1 ─────────── H3.1   H3.2 ─ M3 ────── A1
///      H1                         ╳          H3
///  2L ─┘└─ H1.3 ─┐          ┌──── H3.4   H3.3 ─┐      ┌─ A2
///                X1         │                  X2     │
///  2R ─┐┌─ H2.2 ─┘          └──── H4.1   H4.2 ─┘      └─ A3
///      H2                                    H4
///  1L ─┘└─ H2.3 ─ PS2 ─ M2 ─────────── H4.4   H4.3 ─ M4 ────── A4
/// ```
///
/// The shifters sit on the first-stage through lines that do not pass the
/// centre crossover. Because each crossover transmits with phase `j`, the
/// uncrossed line at every crossover stage carries a matching delay
/// (M1..M4) of the same insertion phase.
pub fn build_butler_4x4(fidelity: Fidelity, f0: f64, substrate: &Substrate) -> Result<Netlist> {
    if !(f0.is_finite() && f0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "f0 must be positive, got {f0}"
        )));
    }
    let (hybrid, crossover, shifter, matching) = match fidelity {
        Fidelity::Ideal => {
            let mut m = components::phase_shifter(MATCHING_PHASE, f0);
            m.role = DeviceRole::MatchingLine;
            m.label = format!("crossover matching delay @ {:.4} GHz (1-2)", f0 / 1e9);
            (
                components::ideal_hybrid(),
                components::ideal_crossover(),
                components::phase_shifter(SHIFTER_PHASE, f0),
                m,
            )
        }
        Fidelity::Circuit => {
            let mut ps = components::microstrip_delay(SHIFTER_PHASE, f0, substrate)?;
            ps.role = DeviceRole::PhaseShifter;
            let mut m = components::microstrip_delay(MATCHING_PHASE, f0, substrate)?;
            m.role = DeviceRole::MatchingLine;
            (
                components::branchline_hybrid_circuit(f0, substrate)?,
                components::crossover_circuit(f0, substrate)?,
                ps,
                m,
            )
        }
    };

    let mut net = Netlist::new();
    for h in ["H1", "H2", "H3", "H4"] {
        net.add_device(h, hybrid.clone())?;
    }
    net.add_device("X1", crossover.clone())?;
    net.add_device("X2", crossover)?;
    net.add_device("PS1", shifter.clone())?;
    net.add_device("PS2", shifter)?;
    for m in ["M1", "M2", "M3", "M4"] {
        net.add_device(m, matching.clone())?;
    }

    // First stage: H1 fed by (1R, 2L), H2 by (2R, 1L).
    net.expose("1R", ("H1", 1))?;
    net.expose("2L", ("H1", 4))?;
    net.expose("2R", ("H2", 1))?;
    net.expose("1L", ("H2", 4))?;

    // Outer lines: shifter then crossover-matching delay.
    net.connect(("H1", 2), ("PS1", 1))?;
    net.connect(("PS1", 2), ("M1", 1))?;
    net.connect(("M1", 2), ("H3", 1))?;
    net.connect(("H2", 3), ("PS2", 1))?;
    net.connect(("PS2", 2), ("M2", 1))?;
    net.connect(("M2", 2), ("H4", 4))?;

    // Centre crossover exchanges the middle lines.
    net.connect(("H1", 3), ("X1", 1))?;
    net.connect(("H2", 2), ("X1", 2))?;
    net.connect(("X1", 3), ("H4", 1))?;
    net.connect(("X1", 4), ("H3", 4))?;

    // Output crossover restores element order.
    net.connect(("H3", 2), ("M3", 1))?;
    net.connect(("H3", 3), ("X2", 1))?;
    net.connect(("H4", 2), ("X2", 2))?;
    net.connect(("H4", 3), ("M4", 1))?;

    net.expose("A1", ("M3", 2))?;
    net.expose("A2", ("X2", 4))?;
    net.expose("A3", ("X2", 3))?;
    net.expose("A4", ("M4", 2))?;

    net.validate()?;
    Ok(net)
}

/// Waves at the array ports for a unit wave into one input port.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcitationResult {
    /// One-based input port index.
    pub input_port: usize,
    pub output_amplitudes: Vec<Complex64>,
    pub frequency: f64,
}

impl ExcitationResult {
    /// Phase difference `arg(a[k+1]) − arg(a[k])` wrapped to (−180°, 180°], in degrees.
    pub fn adjacent_phase_deg(&self) -> Vec<f64> {
        self.output_amplitudes
            .windows(2)
            .map(|w| (w[1] / w[0]).arg().to_degrees())
            .collect()
    }

    /// Mean adjacent phase progression (degrees), computed on the unit circle.
    pub fn progression_deg(&self) -> f64 {
        let sum: Complex64 = self
            .output_amplitudes
            .windows(2)
            .map(|w| {
                let r = w[1] / w[0];
                r / r.norm()
            })
            .sum();
        sum.arg().to_degrees()
    }
}

/// Excites input `input_port` (1-based, first half of the external ports)
/// and reads the second half as array ports.
pub fn excite(net: &Netlist, input_port: usize, frequency: f64) -> Result<ExcitationResult> {
    let s = interconnect(net, frequency)?;
    excite_matrix(&s, input_port, frequency)
}

/// Same as [`excite`] for an already evaluated composite matrix.
pub fn excite_matrix(
    s: &ScatteringMatrix,
    input_port: usize,
    frequency: f64,
) -> Result<ExcitationResult> {
    let n = s.n_ports();
    let n_in = n / 2;
    if !n.is_multiple_of(2) || input_port == 0 || input_port > n_in {
        return Err(Error::InvalidParameter(format!(
            "input port {input_port} out of range 1..={n_in}"
        )));
    }
    let output_amplitudes = (0..n - n_in)
        .map(|k| s.get(n_in + k, input_port - 1))
        .collect();
    Ok(ExcitationResult {
        input_port,
        output_amplitudes,
        frequency,
    })
}
