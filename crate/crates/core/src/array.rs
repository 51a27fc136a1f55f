//! Beam directions and far-field cuts of a uniform line array.
//!
//! Sign convention: element `k` (zero-based) contributes `a_k·exp(+j·k·βd·sinθ)`,
//! so a progressive phase of `−α` per element steers the main beam to
//! `θ = +arcsin(α/(βd))`. Negate θ for the mirror convention.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::antenna::{element_pattern, ElementModel};
use crate::error::{Error, Result};
use crate::fmt::sci9;
use crate::SPEED_OF_LIGHT;

/// Default angular step of pattern cuts (degrees).
pub const DEFAULT_STEP_DEG: f64 = 0.05;

/// Floor applied before converting magnitudes to dB.
const DB_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub n_elements: usize,
    pub spacing_d: f64,
    pub frequency: f64,
}

impl ArrayGeometry {
    pub fn new(n_elements: usize, spacing_d: f64, frequency: f64) -> Result<Self> {
        if n_elements < 2 {
            return Err(Error::InvalidParameter(format!(
                "array needs at least 2 elements, got {n_elements}"
            )));
        }
        if !(spacing_d.is_finite() && spacing_d > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "spacing must be positive, got {spacing_d}"
            )));
        }
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "frequency must be positive, got {frequency}"
            )));
        }
        Ok(Self {
            n_elements,
            spacing_d,
            frequency,
        })
    }

    /// Half-wavelength spacing at `frequency`.
    pub fn half_wavelength(n_elements: usize, frequency: f64) -> Result<Self> {
        Self::new(n_elements, SPEED_OF_LIGHT / frequency / 2.0, frequency)
    }

    /// Free-space wave number β = 2π/λ0 (rad/m).
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI * self.frequency / SPEED_OF_LIGHT
    }

    /// Phase advance between adjacent elements for a wave from endfire, β·d.
    pub fn beta_d(&self) -> f64 {
        self.wavenumber() * self.spacing_d
    }
}

/// Inter-element phase `i·π/n` of beam `i` for half-wavelength spacing.
pub fn inter_element_phase(i: i64, n: usize) -> Result<f64> {
    if i < 1 || i as usize >= n {
        return Err(Error::BeamIndex {
            index: i,
            max: n.saturating_sub(1),
        });
    }
    Ok(i as f64 * PI / n as f64)
}

/// Beam direction (rad) produced by a per-element phase lag `alpha` (rad).
pub fn beam_angle(alpha: f64, geometry: &ArrayGeometry) -> Result<f64> {
    let limit = geometry.beta_d();
    if alpha.abs() > limit {
        return Err(Error::BeamInvisible { alpha, limit });
    }
    Ok((alpha / limit).asin())
}

/// Sampled far-field magnitude against angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternCut {
    /// Radians from broadside, strictly increasing.
    pub angles: Vec<f64>,
    /// Linear field amplitude.
    pub magnitude: Vec<f64>,
    pub input_port_label: String,
}

/// `n` evenly spaced angles covering [−90°, +90°] with `step_deg` spacing.
pub fn angle_grid(step_deg: f64) -> Vec<f64> {
    let n = (180.0 / step_deg).round() as usize;
    (0..=n)
        .map(|i| (-90.0 + 180.0 * i as f64 / n as f64).to_radians())
        .collect()
}

/// Default 0.05° grid over [−90°, +90°].
pub fn default_angle_grid() -> Vec<f64> {
    angle_grid(DEFAULT_STEP_DEG)
}

/// Complex array factor at one angle.
pub fn array_factor_at(
    excitations: &[Complex64],
    geometry: &ArrayGeometry,
    theta: f64,
) -> Complex64 {
    let psi = geometry.beta_d() * theta.sin();
    excitations
        .iter()
        .enumerate()
        .map(|(k, a)| a * Complex64::from_polar(1.0, k as f64 * psi))
        .sum()
}

/// Element pattern times `|Σ a_k·exp(j·k·βd·sinθ)|` over `angles`.
///
/// With `normalize` the cut is scaled so its largest sample is 1.
pub fn array_factor(
    excitations: &[Complex64],
    geometry: &ArrayGeometry,
    angles: &[f64],
    element: ElementModel,
    normalize: bool,
    label: impl Into<String>,
) -> Result<PatternCut> {
    if excitations.len() != geometry.n_elements {
        return Err(Error::InvalidParameter(format!(
            "{} excitations for a {}-element array",
            excitations.len(),
            geometry.n_elements
        )));
    }
    if angles.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "angles must be strictly increasing".into(),
        ));
    }
    let mut magnitude: Vec<f64> = angles
        .iter()
        .map(|&t| element_pattern(t, element) * array_factor_at(excitations, geometry, t).norm())
        .collect();
    if normalize {
        let peak = magnitude.iter().copied().fold(0.0, f64::max);
        if peak > 0.0 {
            magnitude.iter_mut().for_each(|m| *m /= peak);
        }
    }
    Ok(PatternCut {
        angles: angles.to_vec(),
        magnitude,
        input_port_label: label.into(),
    })
}

/// Power sum of several cuts on the same grid: `sqrt(Σ |m|²)`.
///
/// This is an incoherent overlay, not a pattern any single excitation produces.
pub fn incoherent_overlay(cuts: &[PatternCut]) -> Result<PatternCut> {
    let first = cuts
        .first()
        .ok_or_else(|| Error::InvalidParameter("no cuts to overlay".into()))?;
    if cuts.iter().any(|c| c.angles != first.angles) {
        return Err(Error::InvalidParameter(
            "cuts use different angle grids".into(),
        ));
    }
    let magnitude = (0..first.angles.len())
        .map(|i| {
            cuts.iter()
                .map(|c| c.magnitude[i].powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let labels: Vec<&str> = cuts.iter().map(|c| c.input_port_label.as_str()).collect();
    Ok(PatternCut {
        angles: first.angles.clone(),
        magnitude,
        input_port_label: format!("incoherent power sum of {}", labels.join("+")),
    })
}

fn to_db(m: f64) -> f64 {
    20.0 * m.max(DB_FLOOR).log10()
}

impl PatternCut {
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn peak(&self) -> f64 {
        self.magnitude.iter().copied().fold(0.0, f64::max)
    }

    /// Copy scaled to a unit peak.
    pub fn normalized(&self) -> Self {
        let p = self.peak();
        let mut out = self.clone();
        if p > 0.0 {
            out.magnitude.iter_mut().for_each(|m| *m /= p);
        }
        out
    }

    /// `angle_deg,magnitude_linear,magnitude_db` CSV with LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("angle_deg,magnitude_linear,magnitude_db\n");
        for (t, m) in self.angles.iter().zip(&self.magnitude) {
            let _ = writeln!(
                out,
                "{},{},{}",
                sci9(t.to_degrees()),
                sci9(*m),
                sci9(to_db(*m))
            );
        }
        out
    }
}

/// Summary figures of one cut. Angles in radians, levels in dB relative to the peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternMetrics {
    pub peak_angle: f64,
    pub peak_magnitude: f64,
    /// Half-power beamwidth; `None` if the −3 dB level is not reached on both sides.
    pub hpbw: Option<f64>,
    /// Highest lobe outside the main lobe; `None` if there is none.
    pub sidelobe_db: Option<f64>,
}

/// Vertex of the parabola through three points.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Option<(f64, f64)> {
    let d = (x[0] - x[1]) * (x[0] - x[2]) * (x[1] - x[2]);
    let a = (x[2] * (y[1] - y[0]) + x[1] * (y[0] - y[2]) + x[0] * (y[2] - y[1])) / d;
    let b =
        (x[2] * x[2] * (y[0] - y[1]) + x[1] * x[1] * (y[2] - y[0]) + x[0] * x[0] * (y[1] - y[2]))
            / d;
    let c = y[0] - a * x[0] * x[0] - b * x[0];
    if a >= 0.0 || !a.is_finite() {
        return None;
    }
    let xv = -b / (2.0 * a);
    Some((xv, c - b * b / (4.0 * a)))
}

pub fn pattern_metrics(cut: &PatternCut) -> Result<PatternMetrics> {
    let m = &cut.magnitude;
    let t = &cut.angles;
    if m.len() < 3 || m.len() != t.len() {
        return Err(Error::DegeneratePattern("need at least 3 samples".into()));
    }
    let (imax, &peak) = m
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let min = m.iter().copied().fold(f64::INFINITY, f64::min);
    if peak.is_nan() || peak <= 0.0 || peak - min <= 1e-12 * peak {
        return Err(Error::DegeneratePattern("no distinct main lobe".into()));
    }

    let (mut peak_angle, mut peak_magnitude) = (t[imax], peak);
    if imax > 0 && imax + 1 < m.len() {
        if let Some((xv, yv)) = parabola_vertex(
            [t[imax - 1], t[imax], t[imax + 1]],
            [m[imax - 1], peak, m[imax + 1]],
        ) {
            if xv >= t[imax - 1] && xv <= t[imax + 1] {
                peak_angle = xv;
                peak_magnitude = yv.max(peak);
            }
        }
    }

    let half = peak / std::f64::consts::SQRT_2;
    let crossing = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut prev = imax;
        for i in range {
            if m[i] < half {
                let f = (half - m[i]) / (m[prev] - m[i]);
                return Some(t[i] + f * (t[prev] - t[i]));
            }
            prev = i;
        }
        None
    };
    let left = crossing(&mut (0..imax).rev());
    let right = crossing(&mut (imax + 1..m.len()));
    let hpbw = match (left, right) {
        (Some(l), Some(r)) => Some(r - l),
        _ => None,
    };

    // Main lobe runs down to the first local minimum on each side.
    let mut lo = imax;
    while lo > 0 && m[lo - 1] <= m[lo] {
        lo -= 1;
    }
    let mut hi = imax;
    while hi + 1 < m.len() && m[hi + 1] <= m[hi] {
        hi += 1;
    }
    let is_local_max = |i: usize| {
        let left_ok = i == 0 || m[i] >= m[i - 1];
        let right_ok = i + 1 == m.len() || m[i] >= m[i + 1];
        left_ok && right_ok
    };
    let sidelobe = (0..lo)
        .chain(hi + 1..m.len())
        .filter(|&i| is_local_max(i) && m[i] > 0.0)
        .map(|i| m[i])
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        });

    Ok(PatternMetrics {
        peak_angle,
        peak_magnitude,
        hpbw,
        sidelobe_db: sidelobe.map(|s| to_db(s / peak)),
    })
}

/// Level (dB below each beam's own peak) where two adjacent beams intersect
/// between their peaks.
pub fn crossover_level(a: &PatternCut, b: &PatternCut) -> Result<f64> {
    if a.angles != b.angles {
        return Err(Error::InvalidParameter(
            "cuts use different angle grids".into(),
        ));
    }
    let (na, nb) = (a.normalized(), b.normalized());
    let ia = argmax(&na.magnitude);
    let ib = argmax(&nb.magnitude);
    let (lo, hi) = (ia.min(ib), ia.max(ib));
    if lo == hi {
        return Err(Error::DegeneratePattern(
            "beams peak at the same angle".into(),
        ));
    }
    let diff = |i: usize| na.magnitude[i] - nb.magnitude[i];
    for i in lo..hi {
        let (d0, d1) = (diff(i), diff(i + 1));
        if d0 == 0.0 {
            return Ok(to_db(na.magnitude[i]));
        }
        if d0.signum() != d1.signum() {
            let f = d0 / (d0 - d1);
            let level = na.magnitude[i] + f * (na.magnitude[i + 1] - na.magnitude[i]);
            return Ok(to_db(level));
        }
    }
    Err(Error::DegeneratePattern(
        "beams do not intersect between their peaks".into(),
    ))
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i)
}
