//! Dense complex scattering matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::Z_REF;

/// N×N scattering matrix at a single frequency.
///
/// Entries are stored row-major; `get(i, j)` is the wave leaving port `i`
/// for a unit wave incident on port `j` (zero-based). Use [`ScatteringMatrix::s`]
/// for the conventional one-based `S_ij` notation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix {
    n_ports: usize,
    entries: Vec<Complex64>,
    z_ref: f64,
}

impl ScatteringMatrix {
    pub fn zeros(n_ports: usize) -> Self {
        Self::zeros_with_ref(n_ports, Z_REF)
    }

    pub fn zeros_with_ref(n_ports: usize, z_ref: f64) -> Self {
        assert!(n_ports >= 1, "scattering matrix needs at least one port");
        Self {
            n_ports,
            entries: vec![Complex64::new(0.0, 0.0); n_ports * n_ports],
            z_ref,
        }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(n_ports: usize, entries: Vec<Complex64>, z_ref: f64) -> Result<Self> {
        if n_ports == 0 || entries.len() != n_ports * n_ports {
            return Err(Error::InvalidParameter(format!(
                "expected {} entries for a {n_ports}-port matrix, got {}",
                n_ports * n_ports,
                entries.len()
            )));
        }
        Ok(Self {
            n_ports,
            entries,
            z_ref,
        })
    }

    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Self {
        let entries = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self {
            n_ports: N,
            entries,
            z_ref: Z_REF,
        }
    }

    pub fn n_ports(&self) -> usize {
        self.n_ports
    }

    pub fn z_ref(&self) -> f64 {
        self.z_ref
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.n_ports + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.n_ports + col] = value;
    }

    /// One-based access: `s(2, 1)` is S21.
    pub fn s(&self, i: usize, j: usize) -> Complex64 {
        self.get(i - 1, j - 1)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            n_ports: self.n_ports,
            entries: self.entries.iter().map(|v| v * factor).collect(),
            z_ref: self.z_ref,
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.n_ports;
        let mut out = Self::zeros_with_ref(n, self.z_ref);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Block-diagonal stacking of several matrices, in order.
    pub fn block_diag<'a>(blocks: impl IntoIterator<Item = &'a ScatteringMatrix>) -> Self {
        let blocks: Vec<&ScatteringMatrix> = blocks.into_iter().collect();
        let total: usize = blocks.iter().map(|b| b.n_ports).sum();
        let z_ref = blocks.first().map_or(Z_REF, |b| b.z_ref);
        let mut out = Self::zeros_with_ref(total.max(1), z_ref);
        let mut offset = 0;
        for b in blocks {
            for i in 0..b.n_ports {
                for j in 0..b.n_ports {
                    out.set(offset + i, offset + j, b.get(i, j));
                }
            }
            offset += b.n_ports;
        }
        out
    }

    /// Sub-matrix keeping the given ports in the given order.
    pub fn select(&self, ports: &[usize]) -> Self {
        let mut out = Self::zeros_with_ref(ports.len(), self.z_ref);
        for (r, &pi) in ports.iter().enumerate() {
            for (c, &pj) in ports.iter().enumerate() {
                out.set(r, c, self.get(pi, pj));
            }
        }
        out
    }

    /// Largest entry-wise magnitude of `S^H S - I`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.n_ports;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// Largest entry-wise magnitude of `S - S^T`.
    pub fn reciprocity_error(&self) -> f64 {
        let n = self.n_ports;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    pub fn is_reciprocal(&self, tol: f64) -> bool {
        self.reciprocity_error() <= tol
    }

    /// Largest entry-wise distance to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n_ports, other.n_ports, "port count mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Voltage-current transfer (ABCD) parameters of a two-port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abcd {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Abcd {
    /// Lossless line of characteristic impedance `z0` and electrical length `theta` (rad).
    pub fn lossless_line(z0: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let j = Complex64::i();
        Self {
            a: c.into(),
            b: j * z0 * s,
            c: j * s / z0,
            d: c.into(),
        }
    }

    /// Converts to S-parameters referenced to `z_ref` on both ports.
    ///
    /// With `Δ = A + B/Z + C·Z + D`:
    /// `S11 = (A + B/Z − C·Z − D)/Δ`, `S12 = 2(AD − BC)/Δ`,
    /// `S21 = 2/Δ`, `S22 = (−A + B/Z − C·Z + D)/Δ`.
    pub fn to_s(&self, z_ref: f64) -> ScatteringMatrix {
        let Abcd { a, b, c, d } = *self;
        let bz = b / z_ref;
        let cz = c * z_ref;
        let delta = a + bz + cz + d;
        let mut s = ScatteringMatrix::zeros_with_ref(2, z_ref);
        s.set(0, 0, (a + bz - cz - d) / delta);
        s.set(0, 1, 2.0 * (a * d - b * c) / delta);
        s.set(1, 0, 2.0 / delta);
        s.set(1, 1, (-a + bz - cz + d) / delta);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn one_based_access() {
        let s =
            ScatteringMatrix::from_rows([[c(0.1, 0.0), c(0.2, 0.0)], [c(0.3, 0.0), c(0.4, 0.0)]]);
        assert_eq!(s.s(2, 1), c(0.3, 0.0));
        assert_eq!(s.get(0, 1), c(0.2, 0.0));
    }

    #[test]
    fn from_row_major_rejects_wrong_length() {
        assert!(ScatteringMatrix::from_row_major(2, vec![c(0.0, 0.0); 3], 50.0).is_err());
    }

    #[test]
    fn block_diag_places_blocks() {
        let a = ScatteringMatrix::from_rows([[c(1.0, 0.0)]]);
        let b =
            ScatteringMatrix::from_rows([[c(0.0, 0.0), c(2.0, 0.0)], [c(3.0, 0.0), c(0.0, 0.0)]]);
        let m = ScatteringMatrix::block_diag([&a, &b]);
        assert_eq!(m.n_ports(), 3);
        assert_eq!(m.get(0, 0), c(1.0, 0.0));
        assert_eq!(m.get(1, 2), c(2.0, 0.0));
        assert_eq!(m.get(2, 1), c(3.0, 0.0));
        assert_eq!(m.get(0, 1), c(0.0, 0.0));
    }

    #[test]
    fn matched_line_is_pure_delay() {
        let theta = 0.7;
        let s = Abcd::lossless_line(50.0, theta).to_s(50.0);
        assert!(s.get(0, 0).norm() < 1e-15);
        assert!((s.get(1, 0) - Complex64::from_polar(1.0, -theta)).norm() < 1e-15);
    }

    #[test]
    fn permutation_matrix_is_unitary_not_reciprocal() {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let s = ScatteringMatrix::from_rows([[z, o, z], [z, z, o], [o, z, z]]);
        assert!(s.is_unitary(1e-15));
        assert!(!s.is_reciprocal(1e-3));
    }
}
