//! Touchstone v1 (`.sNp`) reading and writing.
//!
//! Writer layout: one option line `# <unit> S <format> R <z_ref>`; 1- and
//! 2-port records on a single line (2-port in the v1 order S11 S21 S12 S22);
//! for three or more ports, every matrix row starts a new line and rows are
//! wrapped after four complex pairs.

use num_complex::Complex64;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fmt::sci;
use crate::smatrix::ScatteringMatrix;

/// Significant digits of written values.
pub const DIGITS: usize = 12;

const PAIRS_PER_LINE: usize = 4;

/// Smallest magnitude representable in dB output.
const DB_MAG_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DataFormat {
    /// Real, imaginary.
    Ri,
    /// Linear magnitude, angle in degrees.
    Ma,
    /// Magnitude in dB, angle in degrees.
    Db,
}

impl DataFormat {
    pub const ALL: [DataFormat; 3] = [Self::Ri, Self::Ma, Self::Db];

    pub fn keyword(self) -> &'static str {
        match self {
            Self::Ri => "RI",
            Self::Ma => "MA",
            Self::Db => "DB",
        }
    }

    fn encode(self, z: Complex64) -> (f64, f64) {
        match self {
            Self::Ri => (z.re, z.im),
            Self::Ma => (z.norm(), z.arg().to_degrees()),
            Self::Db => (
                20.0 * z.norm().max(DB_MAG_FLOOR).log10(),
                z.arg().to_degrees(),
            ),
        }
    }

    fn decode(self, a: f64, b: f64) -> Complex64 {
        match self {
            Self::Ri => Complex64::new(a, b),
            Self::Ma => Complex64::from_polar(a, b.to_radians()),
            Self::Db => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
        }
    }
}

impl std::str::FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RI" => Ok(Self::Ri),
            "MA" => Ok(Self::Ma),
            "DB" => Ok(Self::Db),
            other => Err(Error::InvalidParameter(format!(
                "unknown data format '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FreqUnit {
    Hz,
    KHz,
    MHz,
    GHz,
}

impl FreqUnit {
    pub const ALL: [FreqUnit; 4] = [Self::Hz, Self::KHz, Self::MHz, Self::GHz];

    pub fn scale(self) -> f64 {
        match self {
            Self::Hz => 1.0,
            Self::KHz => 1e3,
            Self::MHz => 1e6,
            Self::GHz => 1e9,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Self::Hz => "Hz",
            Self::KHz => "kHz",
            Self::MHz => "MHz",
            Self::GHz => "GHz",
        }
    }
}

impl std::str::FromStr for FreqUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hz" => Ok(Self::Hz),
            "khz" => Ok(Self::KHz),
            "mhz" => Ok(Self::MHz),
            "ghz" => Ok(Self::GHz),
            other => Err(Error::InvalidParameter(format!(
                "unknown frequency unit '{other}'"
            ))),
        }
    }
}

/// Parsed file contents. Frequencies are always in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct Touchstone {
    pub unit: FreqUnit,
    pub format: DataFormat,
    pub z_ref: f64,
    pub n_ports: usize,
    pub data: Vec<(f64, ScatteringMatrix)>,
}

/// Renders a sweep as Touchstone v1 text.
pub fn write(
    sweep: &[(f64, ScatteringMatrix)],
    n_ports: usize,
    format: DataFormat,
    unit: FreqUnit,
) -> Result<String> {
    let first = sweep
        .first()
        .ok_or_else(|| Error::Consistency("empty sweep".into()))?;
    let z_ref = first.1.z_ref();
    for (i, (f, s)) in sweep.iter().enumerate() {
        if s.n_ports() != n_ports {
            return Err(Error::Consistency(format!(
                "sample {i} has {} ports, expected {n_ports}",
                s.n_ports()
            )));
        }
        if s.z_ref() != z_ref {
            return Err(Error::Consistency(format!(
                "sample {i} references {} ohm, expected {z_ref}",
                s.z_ref()
            )));
        }
        if !(f.is_finite() && *f > 0.0) {
            return Err(Error::Consistency(format!("sample {i} has frequency {f}")));
        }
        if i > 0 && *f <= sweep[i - 1].0 {
            return Err(Error::Ordering { index: i });
        }
    }

    let mut body = String::new();
    for (f, s) in sweep {
        write_record(&mut body, *f / unit.scale(), s, format);
    }
    let hash = hex::encode(Sha256::digest(body.as_bytes()));

    let mut out = String::new();
    let _ = writeln!(
        out,
        "! butler-core {} Touchstone v1",
        env!("CARGO_PKG_VERSION")
    );
    let _ = writeln!(out, "! ports: {n_ports}");
    let _ = writeln!(out, "! input-sha256: {hash}");
    let _ = writeln!(
        out,
        "# {} S {} R {}",
        unit.keyword(),
        format.keyword(),
        fmt_plain(z_ref)
    );
    out.push_str(&body);
    Ok(out)
}

fn fmt_plain(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn write_record(out: &mut String, f_scaled: f64, s: &ScatteringMatrix, format: DataFormat) {
    let n = s.n_ports();
    let pair = |z: Complex64| {
        let (a, b) = format.encode(z);
        format!("{} {}", sci(a, DIGITS), sci(b, DIGITS))
    };
    let freq = sci(f_scaled, DIGITS);
    match n {
        1 => {
            let _ = writeln!(out, "{freq} {}", pair(s.get(0, 0)));
        }
        2 => {
            let _ = writeln!(
                out,
                "{freq} {} {} {} {}",
                pair(s.get(0, 0)),
                pair(s.get(1, 0)),
                pair(s.get(0, 1)),
                pair(s.get(1, 1))
            );
        }
        _ => {
            for row in 0..n {
                for (chunk_idx, chunk) in (0..n)
                    .collect::<Vec<_>>()
                    .chunks(PAIRS_PER_LINE)
                    .enumerate()
                {
                    let fields: Vec<String> = chunk.iter().map(|&c| pair(s.get(row, c))).collect();
                    if row == 0 && chunk_idx == 0 {
                        let _ = writeln!(out, "{freq} {}", fields.join(" "));
                    } else {
                        let _ = writeln!(out, "{}", fields.join(" "));
                    }
                }
            }
        }
    }
}

pub fn write_file(
    path: impl AsRef<Path>,
    sweep: &[(f64, ScatteringMatrix)],
    n_ports: usize,
    format: DataFormat,
    unit: FreqUnit,
) -> Result<()> {
    let text = write(sweep, n_ports, format, unit)?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Port count encoded in a `.sNp` extension.
pub fn ports_from_extension(path: impl AsRef<Path>) -> Option<usize> {
    let ext = path.as_ref().extension()?.to_str()?.to_ascii_lowercase();
    let digits = ext.strip_prefix('s')?.strip_suffix('p')?;
    digits.parse().ok().filter(|&n| n > 0)
}

pub fn read_file(path: impl AsRef<Path>) -> Result<Touchstone> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    read_str(&text, ports_from_extension(path))
}

struct Options {
    unit: FreqUnit,
    format: DataFormat,
    z_ref: f64,
}

fn parse_options(line: &str, line_no: usize) -> Result<Options> {
    let err = |message: String| Error::Parse {
        line: line_no,
        message,
    };
    let mut opts = Options {
        unit: FreqUnit::GHz,
        format: DataFormat::Ma,
        z_ref: 50.0,
    };
    let mut tokens = line.trim_start_matches('#').split_whitespace();
    while let Some(tok) = tokens.next() {
        let upper = tok.to_ascii_uppercase();
        match upper.as_str() {
            "HZ" | "KHZ" | "MHZ" | "GHZ" => opts.unit = upper.parse().expect("known unit"),
            "RI" | "MA" | "DB" => opts.format = upper.parse().expect("known format"),
            "S" => {}
            "Y" | "Z" | "H" | "G" => {
                return Err(err(format!(
                    "only S-parameter files are supported, found '{tok}'"
                )))
            }
            "R" => {
                let v = tokens
                    .next()
                    .ok_or_else(|| err("option 'R' without a value".into()))?;
                opts.z_ref = v
                    .parse::<f64>()
                    .ok()
                    .filter(|z| z.is_finite() && *z > 0.0)
                    .ok_or_else(|| err(format!("invalid reference impedance '{v}'")))?;
            }
            _ => return Err(err(format!("unrecognized option '{tok}'"))),
        }
    }
    Ok(opts)
}

/// Parses Touchstone v1 text. `n_ports` comes from the file extension when
/// known; otherwise it is inferred from the layout of the first record.
pub fn read_str(text: &str, n_ports: Option<usize>) -> Result<Touchstone> {
    let mut options: Option<Options> = None;
    // (line number, tokens)
    let mut lines: Vec<(usize, Vec<f64>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('!').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('#') {
            if options.is_none() {
                options = Some(parse_options(content, line_no)?);
            }
            continue;
        }
        if content.starts_with('[') {
            return Err(Error::Parse {
                line: line_no,
                message: "Touchstone v2 keywords are not supported".into(),
            });
        }
        let values = content
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("non-numeric token '{t}'"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        lines.push((line_no, values));
    }
    let options = options.ok_or_else(|| Error::Parse {
        line: 1,
        message: "missing option line".into(),
    })?;
    if lines.is_empty() {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            message: "no data".into(),
        });
    }

    let inferred = infer_ports(&lines)?;
    let n = match n_ports {
        Some(n) if n != inferred => {
            return Err(Error::Parse {
                line: lines[0].0,
                message: format!("data layout implies {inferred} ports but {n} were expected"),
            })
        }
        Some(n) => n,
        None => inferred,
    };

    let per_record = 1 + 2 * n * n;
    let mut data = Vec::new();
    let mut buf: Vec<f64> = Vec::with_capacity(per_record);
    let mut record_line = lines[0].0;
    for (line_no, values) in &lines {
        if buf.is_empty() {
            record_line = *line_no;
        } else if values.len() % 2 == 1 {
            return Err(Error::Parse {
                line: *line_no,
                message: format!(
                    "arity mismatch: record starting at line {record_line} has {} of {per_record} values",
                    buf.len()
                ),
            });
        }
        buf.extend_from_slice(values);
        if buf.len() > per_record {
            return Err(Error::Parse {
                line: *line_no,
                message: format!("arity mismatch: {} values for a {n}-port record", buf.len()),
            });
        }
        if buf.len() == per_record {
            data.push(decode_record(&buf, n, &options));
            buf.clear();
        }
    }
    if !buf.is_empty() {
        return Err(Error::Parse {
            line: record_line,
            message: format!("truncated record: {} of {per_record} values", buf.len()),
        });
    }

    Ok(Touchstone {
        unit: options.unit,
        format: options.format,
        z_ref: options.z_ref,
        n_ports: n,
        data,
    })
}

/// Port count from the first record: it starts on a line with an odd token
/// count and continues over even-count lines.
fn infer_ports(lines: &[(usize, Vec<f64>)]) -> Result<usize> {
    let (first_line, first) = &lines[0];
    if first.len() % 2 == 0 {
        return Err(Error::Parse {
            line: *first_line,
            message: "first data line must start with a frequency".into(),
        });
    }
    let mut values = first.len() - 1;
    for (_, v) in &lines[1..] {
        if v.len() % 2 == 1 {
            break;
        }
        values += v.len();
    }
    let pairs = values / 2;
    let n = (pairs as f64).sqrt().round() as usize;
    if n == 0 || n * n != pairs {
        return Err(Error::Parse {
            line: *first_line,
            message: format!("arity mismatch: {pairs} complex values is not a square matrix"),
        });
    }
    Ok(n)
}

fn decode_record(values: &[f64], n: usize, options: &Options) -> (f64, ScatteringMatrix) {
    let f = values[0] * options.unit.scale();
    let pairs: Vec<Complex64> = values[1..]
        .chunks(2)
        .map(|p| options.format.decode(p[0], p[1]))
        .collect();
    let mut s = ScatteringMatrix::zeros_with_ref(n, options.z_ref);
    if n == 2 {
        s.set(0, 0, pairs[0]);
        s.set(1, 0, pairs[1]);
        s.set(0, 1, pairs[2]);
        s.set(1, 1, pairs[3]);
    } else {
        for (idx, z) in pairs.into_iter().enumerate() {
            s.set(idx / n, idx % n, z);
        }
    }
    (f, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::ideal_hybrid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn minimal_one_port() {
        let s = ScatteringMatrix::from_rows([[c(0.25, -0.5)]]);
        let text = write(&[(5.2e9, s)], 1, DataFormat::Ri, FreqUnit::GHz).unwrap();
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('!')).collect();
        assert_eq!(data[0], "# GHz S RI R 50");
        assert_eq!(data.len(), 2);
        assert_eq!(data[1].split_whitespace().count(), 3);
    }

    #[test]
    fn parse_one_port() {
        let t = read_str("# GHz S RI R 50\n5.2 0 0\n", None).unwrap();
        assert_eq!(t.n_ports, 1);
        assert_eq!(t.data[0].0, 5.2e9);
        assert_eq!(t.data[0].1.get(0, 0), c(0.0, 0.0));
    }

    #[test]
    fn db_entry_decodes() {
        let t = read_str("# MHz S DB R 50\n100 -6.0206 45.0\n", Some(1)).unwrap();
        let z = t.data[0].1.get(0, 0);
        assert!((z.norm() - 0.5).abs() < 1e-5);
        assert!((z.arg().to_degrees() - 45.0).abs() < 1e-12);
        assert_eq!(t.data[0].0, 100e6);
    }

    #[test]
    fn hybrid_ma_rows() {
        let s = ideal_hybrid().evaluate(5.2e9).unwrap();
        let text = write(&[(5.2e9, s)], 4, DataFormat::Ma, FreqUnit::GHz).unwrap();
        let data: Vec<&str> = text
            .lines()
            .filter(|l| !l.starts_with(['!', '#']))
            .collect();
        assert_eq!(data.len(), 4);
        // Row 2 holds S21 first.
        let s21_mag: f64 = data[1].split_whitespace().next().unwrap().parse().unwrap();
        assert!(data[1].starts_with("7.07106781187e-1 "), "{}", data[1]);
        assert!((s21_mag - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn eight_port_wraps_rows() {
        let s = ScatteringMatrix::zeros(8);
        let text = write(&[(1e9, s)], 8, DataFormat::Ri, FreqUnit::Hz).unwrap();
        let data: Vec<&str> = text
            .lines()
            .filter(|l| !l.starts_with(['!', '#']))
            .collect();
        assert_eq!(data.len(), 16);
        assert_eq!(data[0].split_whitespace().count(), 9);
        assert!(data[1..].iter().all(|l| l.split_whitespace().count() == 8));
    }

    #[test]
    fn two_port_column_order() {
        let s =
            ScatteringMatrix::from_rows([[c(0.1, 0.0), c(0.2, 0.0)], [c(0.3, 0.0), c(0.4, 0.0)]]);
        let text = write(&[(1e9, s.clone())], 2, DataFormat::Ri, FreqUnit::GHz).unwrap();
        let line = text.lines().last().unwrap();
        let v: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        assert_eq!(&v[1..], &[0.1, 0.0, 0.3, 0.0, 0.2, 0.0, 0.4, 0.0]);
        let back = read_str(&text, Some(2)).unwrap();
        assert_eq!(back.data[0].1, s);
    }

    #[test]
    fn ordering_and_consistency_errors() {
        let s = ScatteringMatrix::zeros(2);
        let bad = [(2e9, s.clone()), (1e9, s.clone())];
        assert!(matches!(
            write(&bad, 2, DataFormat::Ri, FreqUnit::GHz),
            Err(Error::Ordering { index: 1 })
        ));
        let mixed = [(1e9, s), (2e9, ScatteringMatrix::zeros(3))];
        assert!(matches!(
            write(&mixed, 2, DataFormat::Ri, FreqUnit::GHz),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = read_str("! c\n# GHz S XX R 50\n1 0 0\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = read_str("# GHz S RI R 50\n1 0 abc\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = read_str("# GHz S RI R 50\n1 0 0 0 0\n", Some(2)).unwrap_err();
        assert!(matches!(e, Error::Parse { .. }), "{e}");
        let e = read_str("# GHz Z RI R 50\n1 0 0\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }), "{e}");
    }

    #[test]
    fn extension_port_count() {
        assert_eq!(ports_from_extension("a/b/butler.s8p"), Some(8));
        assert_eq!(ports_from_extension("x.S2P"), Some(2));
        assert_eq!(ports_from_extension("x.txt"), None);
    }

    #[test]
    fn header_is_deterministic() {
        let s = ideal_hybrid().evaluate(5.2e9).unwrap();
        let a = write(&[(5.2e9, s.clone())], 4, DataFormat::Db, FreqUnit::MHz).unwrap();
        let b = write(&[(5.2e9, s)], 4, DataFormat::Db, FreqUnit::MHz).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("! input-sha256: "));
    }
}
