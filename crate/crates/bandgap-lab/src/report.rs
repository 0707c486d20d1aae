//! Plot-ready tabulation of verification outputs.
//!
//! Everything here turns structured results into CSV text.  File paths,
//! manifests, and actual writes belong to the command-line layer; keeping
//! this module pure makes the tables testable by string comparison and the
//! byte-for-byte reproducibility contract easy to audit.
//!
//! Numeric cells use Rust's shortest round-trip float formatting, so a
//! value read back from a table parses to the exact bits that were
//! computed.  Complex numbers occupy two adjacent columns (`_re`, `_im`).

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::band_geometry::SumReport;
use crate::determinant::DetSample;
use crate::disk::{distance_ratios_at, JoukowskiMap};
use crate::spectrum::DiscreteSpectrum;
use crate::{Error, Result};

/// A rectangular table with a fixed header.  Row arity is checked at
/// insertion so a malformed table cannot be built in the first place.
#[derive(Clone, Debug)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        CsvTable { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    /// Number of columns, fixed by the header.
    pub fn width(&self) -> usize {
        self.header.len()
    }

    /// Number of data rows (the header does not count).
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Append one row; its length must match the header.
    pub fn push_row(&mut self, row: Vec<String>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::InvalidParam(format!(
                "row has {} fields, header has {}",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Render the table.  Fields containing a comma, quote, or line break
    /// are quoted with inner quotes doubled; lines end in `\n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        write_line(&mut out, &self.header);
        for row in &self.rows {
            write_line(&mut out, row);
        }
        out
    }
}

fn write_line(out: &mut String, fields: &[String]) {
    for (i, f) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        if f.contains(['"', ',', '\n', '\r']) {
            out.push('"');
            for ch in f.chars() {
                if ch == '"' {
                    out.push('"');
                }
                out.push(ch);
            }
            out.push('"');
        } else {
            out.push_str(f);
        }
    }
    out.push('\n');
}

/// Shortest decimal string that parses back to exactly `x`.  Positional
/// notation for moderate magnitudes, exponent form outside them (plain
/// `{}` would render 1e-300 as three hundred zeros).
pub fn float_cell(x: f64) -> String {
    let mut s = String::new();
    if x != 0.0 && x.is_finite() && !(1e-4..1e16).contains(&x.abs()) {
        let _ = write!(s, "{x:e}");
    } else {
        let _ = write!(s, "{x}");
    }
    s
}

/// Real and imaginary parts as two cells.
pub fn complex_cells(z: Complex64) -> [String; 2] {
    [float_cell(z.re), float_cell(z.im)]
}

fn option_cell(x: Option<f64>) -> String {
    x.map(float_cell).unwrap_or_default()
}

/// Filtered spectrum as one row per entry.
pub fn spectrum_csv(spectrum: &DiscreteSpectrum) -> CsvTable {
    let mut table =
        CsvTable::new(["lambda_re", "lambda_im", "multiplicity", "stable", "drift"]);
    for e in &spectrum.entries {
        let [re, im] = complex_cells(e.lambda);
        table
            .push_row(vec![
                re,
                im,
                e.multiplicity.to_string(),
                e.stable.to_string(),
                float_cell(e.drift),
            ])
            .expect("fixed arity");
    }
    table
}

/// Determinant samples as one row per evaluation point.
pub fn det_samples_csv(samples: &[DetSample]) -> CsvTable {
    let mut table = CsvTable::new([
        "lambda_re",
        "lambda_im",
        "k",
        "value_re",
        "value_im",
        "log_modulus",
        "bound_side",
    ]);
    for s in samples {
        let [lre, lim] = complex_cells(s.lambda);
        let [vre, vim] = complex_cells(s.value);
        table
            .push_row(vec![
                lre,
                lim,
                s.k.to_string(),
                vre,
                vim,
                float_cell(s.log_modulus),
                float_cell(s.bound_side),
            ])
            .expect("fixed arity");
    }
    table
}

/// Distance-comparison ratios over a grid of disk points, one row per
/// point.  Grid points the pointwise evaluation rejects (too close to the
/// circle, the cutoff radius, or a corner preimage) are skipped rather
/// than reported as errors, so callers can pass a plain rectangular grid.
pub fn joukowski_csv(map: &JoukowskiMap, grid: &[Complex64]) -> CsvTable {
    let mut table =
        CsvTable::new(["w_re", "w_im", "lambda_re", "lambda_im", "edge_ratio", "band_ratio"]);
    for &w in grid {
        let Ok((lambda, r1, r2)) = distance_ratios_at(map, w) else {
            continue;
        };
        let [wre, wim] = complex_cells(w);
        let [lre, lim] = complex_cells(lambda);
        table
            .push_row(vec![wre, wim, lre, lim, float_cell(r1), float_cell(r2)])
            .expect("fixed arity");
    }
    table
}

/// One member of a scaled perturbation family, tagged with its instance
/// index and coupling scale.
#[derive(Clone, Debug)]
pub struct FamilyRow {
    pub instance: usize,
    pub t: f64,
    pub report: SumReport,
}

/// Family sweep of sum reports, one row per (instance, scale) pair.
/// Optional fields render as empty cells.
pub fn family_csv(rows: &[FamilyRow]) -> CsvTable {
    let mut table = CsvTable::new([
        "instance", "t", "p", "q", "eps", "terms", "value", "bound", "ratio",
    ]);
    for r in rows {
        table
            .push_row(vec![
                r.instance.to_string(),
                float_cell(r.t),
                float_cell(r.report.p),
                option_cell(r.report.q),
                float_cell(r.report.eps),
                r.report.terms.to_string(),
                float_cell(r.report.value),
                option_cell(r.report.bound_side),
                option_cell(r.report.ratio),
            ])
            .expect("fixed arity");
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band_geometry::WeightedPointSet;
    use crate::spectrum::SpectrumEntry;

    #[test]
    fn plain_fields_render_unquoted() {
        let mut t = CsvTable::new(["a", "b"]);
        t.push_row(vec!["1".into(), "x y".into()]).unwrap();
        assert_eq!(t.to_csv(), "a,b\n1,x y\n");
    }

    #[test]
    fn fields_with_metacharacters_are_quoted_and_doubled() {
        let mut t = CsvTable::new(["note"]);
        t.push_row(vec!["says \"hi\", twice\nline two".into()]).unwrap();
        assert_eq!(t.to_csv(), "note\n\"says \"\"hi\"\", twice\nline two\"\n");
    }

    #[test]
    fn row_arity_is_enforced() {
        let mut t = CsvTable::new(["a", "b", "c"]);
        let err = t.push_row(vec!["1".into(), "2".into()]).unwrap_err();
        assert!(matches!(err, Error::InvalidParam(_)));
        assert!(t.is_empty());
    }

    #[test]
    fn float_cells_parse_back_to_the_same_bits() {
        let values = [
            0.1,
            -2.5,
            1.0 / 3.0,
            std::f64::consts::PI,
            1e-300,
            4.9e-324,
            f64::MAX,
            -0.0,
            3.0,
        ];
        for &x in &values {
            let parsed: f64 = float_cell(x).parse().unwrap();
            assert_eq!(parsed.to_bits(), x.to_bits(), "value {x:e}");
        }
        assert_eq!(float_cell(1e-9), "1e-9");
        assert_eq!(float_cell(1.5e17), "1.5e17");
        assert_eq!(float_cell(0.001), "0.001");
    }

    #[test]
    fn complex_cells_split_into_two_columns() {
        let [re, im] = complex_cells(Complex64::new(1.5, -2.0));
        assert_eq!(re, "1.5");
        assert_eq!(im, "-2");
    }

    #[test]
    fn spectrum_table_has_one_row_per_entry() {
        let spectrum = DiscreteSpectrum {
            entries: vec![
                SpectrumEntry {
                    lambda: Complex64::new(2.5, 0.0),
                    multiplicity: 1,
                    stable: true,
                    drift: 1e-9,
                },
                SpectrumEntry {
                    lambda: Complex64::new(0.0, 2.2),
                    multiplicity: 2,
                    stable: false,
                    drift: 0.3,
                },
            ],
            n1: 100,
            n2: 200,
            eta: 0.2,
            match_tol: 4e-4,
        };
        let csv = spectrum_csv(&spectrum).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "lambda_re,lambda_im,multiplicity,stable,drift");
        assert_eq!(lines[1], "2.5,0,1,true,1e-9");
        assert_eq!(lines[2], "0,2.2,2,false,0.3");
    }

    #[test]
    fn det_table_carries_value_and_bound_columns() {
        let samples = vec![DetSample {
            lambda: Complex64::new(3.0, 0.5),
            k: 1,
            value: Complex64::new(0.25, -0.125),
            log_modulus: -1.2425,
            bound_side: 2.0,
        }];
        let csv = det_samples_csv(&samples).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "lambda_re,lambda_im,k,value_re,value_im,log_modulus,bound_side"
        );
        assert_eq!(lines[1], "3,0.5,1,0.25,-0.125,-1.2425,2");
    }

    #[test]
    fn joukowski_table_skips_rejected_points_and_has_no_nan() {
        let map = JoukowskiMap::new(-2.0, 2.0).unwrap();
        // 0.01 falls under the ratio cutoff, 1.0 lands on the circle, and
        // exactly ±1 are corner preimages; only the middle radii survive.
        let grid: Vec<Complex64> = [0.01, 0.3, 0.7, 1.0]
            .iter()
            .flat_map(|&r| {
                (0..8).map(move |j| {
                    Complex64::from_polar(r, std::f64::consts::TAU * (j as f64 + 0.5) / 8.0)
                })
            })
            .collect();
        let table = joukowski_csv(&map, &grid);
        assert_eq!(table.len(), 16);
        for line in table.to_csv().lines().skip(1) {
            for field in line.split(',') {
                let x: f64 = field.parse().unwrap();
                assert!(x.is_finite());
            }
        }
    }

    #[test]
    fn family_table_renders_missing_bound_as_empty_cells() {
        let mut set = WeightedPointSet::default();
        set.push(Complex64::new(2.5, 0.0), 1);
        let bands = crate::band_geometry::BandSet::single(-2.0, 2.0).unwrap();
        let with_bound = crate::band_geometry::sum_lt_high(&set, &bands, 1.0, 0.5)
            .unwrap()
            .with_bound_side(1.5);
        let without = crate::band_geometry::sum_lt_high(&set, &bands, 1.0, 0.5).unwrap();
        let rows = vec![
            FamilyRow { instance: 0, t: 1.0, report: with_bound },
            FamilyRow { instance: 1, t: 0.25, report: without },
        ];
        let csv = family_csv(&rows).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "instance,t,p,q,eps,terms,value,bound,ratio");
        assert!(lines[1].starts_with("0,1,1,,0.5,1,"));
        assert!(lines[1].contains(",1.5,"));
        assert!(lines[2].ends_with(",,"), "missing bound and ratio: {}", lines[2]);
    }
}
