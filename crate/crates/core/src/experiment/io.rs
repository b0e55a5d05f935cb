//! Result files: beamformer text files, fit reports, gain maps and sweep
//! tables. Every file starts with `#` comment lines echoing the resolved
//! configuration (a JSON line) and any notes.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::array_model::{to_db, GainMap};
use crate::design::JptaBeamformer;
use crate::error::{JptaError, Result};
use crate::hbf::{HbfBeamformer, HbfStructure};
use crate::metrics::FitReport;

/// Twelve significant digits.
fn sci(x: f64) -> String {
    format!("{x:.11e}")
}

fn write_header<W: Write>(out: &mut W, title: &str, echo: &str) -> std::io::Result<()> {
    writeln!(out, "# {title}")?;
    for line in echo.lines() {
        if line.starts_with('{') {
            writeln!(out, "# config: {line}")?;
        } else {
            writeln!(out, "# {line}")?;
        }
    }
    Ok(())
}

fn csv_error(e: csv::Error) -> JptaError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => JptaError::Io(io),
        other => JptaError::Parse {
            line: 0,
            message: format!("{other:?}"),
        },
    }
}

/// Writes the `[delays_ns]`, `[phases_rad]` and `[alpha_re_im]` sections.
pub fn write_beamformer<W: Write>(bf: &JptaBeamformer, echo: &str, mut out: W) -> Result<()> {
    write_header(&mut out, "jpta beamformer", echo)?;
    writeln!(out, "[delays_ns]")?;
    for t in bf.delays() {
        writeln!(out, "{}", sci(t * 1e9))?;
    }
    writeln!(out, "[phases_rad]")?;
    for p in bf.phases() {
        writeln!(out, "{}", sci(*p))?;
    }
    writeln!(out, "[alpha_re_im]")?;
    for a in bf.alpha() {
        writeln!(out, "{},{}", sci(a.re), sci(a.im))?;
    }
    out.flush()?;
    Ok(())
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim().parse().map_err(|_| JptaError::Parse {
        line,
        message: format!("`{}` is not a number", s.trim()),
    })
}

fn parse_pair(s: &str, line: usize) -> Result<Complex64> {
    let (re, im) = s.split_once(',').ok_or_else(|| JptaError::Parse {
        line,
        message: format!("`{s}` is not a re,im pair"),
    })?;
    Ok(Complex64::new(parse_f64(re, line)?, parse_f64(im, line)?))
}

/// Splits a sectioned text file into `(section, [(line number, text)])`.
fn sections<R: BufRead>(reader: R) -> Result<BTreeMap<String, Vec<(usize, String)>>> {
    let mut out: BTreeMap<String, Vec<(usize, String)>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            if out.contains_key(name) {
                return Err(JptaError::Parse {
                    line: i + 1,
                    message: format!("duplicate section [{name}]"),
                });
            }
            out.insert(name.to_string(), Vec::new());
            current = Some(name.to_string());
            continue;
        }
        let Some(name) = &current else {
            return Err(JptaError::Parse {
                line: i + 1,
                message: "data before the first section header".into(),
            });
        };
        out.get_mut(name)
            .expect("section inserted on header")
            .push((i + 1, t.to_string()));
    }
    Ok(out)
}

fn take_section<'a>(
    all: &'a BTreeMap<String, Vec<(usize, String)>>,
    name: &str,
) -> Result<&'a [(usize, String)]> {
    all.get(name).map(Vec::as_slice).ok_or_else(|| JptaError::Parse {
        line: 0,
        message: format!("missing section [{name}]"),
    })
}

pub fn read_beamformer<R: BufRead>(reader: R) -> Result<JptaBeamformer> {
    let all = sections(reader)?;
    let delays = take_section(&all, "delays_ns")?
        .iter()
        .map(|(l, s)| parse_f64(s, *l).map(|v| v * 1e-9))
        .collect::<Result<Vec<_>>>()?;
    let phases = take_section(&all, "phases_rad")?
        .iter()
        .map(|(l, s)| parse_f64(s, *l))
        .collect::<Result<Vec<_>>>()?;
    let alpha = take_section(&all, "alpha_re_im")?
        .iter()
        .map(|(l, s)| parse_pair(s, *l))
        .collect::<Result<Vec<_>>>()?;
    Ok(JptaBeamformer::new(delays, phases, alpha))
}

fn write_matrix<W: Write>(out: &mut W, m: &DMatrix<Complex64>) -> std::io::Result<()> {
    for row in m.row_iter() {
        let cells: Vec<String> = row
            .iter()
            .map(|z| format!("{},{}", sci(z.re), sci(z.im)))
            .collect();
        writeln!(out, "{}", cells.join(" "))?;
    }
    Ok(())
}

fn read_matrix(lines: &[(usize, String)]) -> Result<DMatrix<Complex64>> {
    let rows: Vec<Vec<Complex64>> = lines
        .iter()
        .map(|(l, s)| s.split_whitespace().map(|p| parse_pair(p, *l)).collect())
        .collect::<Result<_>>()?;
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(((l, _), r)) = lines.iter().zip(&rows).find(|(_, r)| r.len() != ncols) {
        return Err(JptaError::Parse {
            line: *l,
            message: format!("expected {ncols} entries, found {}", r.len()),
        });
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// HBF factors in `[structure]`, `[f_rf_re_im]` (one row per antenna) and
/// `[f_bb_re_im]` (one row per RF chain) sections.
pub fn write_hbf<W: Write>(bf: &HbfBeamformer, echo: &str, mut out: W) -> Result<()> {
    write_header(&mut out, "hbf beamformer", echo)?;
    writeln!(out, "[structure]")?;
    writeln!(out, "{}", bf.structure().name())?;
    writeln!(out, "[f_rf_re_im]")?;
    write_matrix(&mut out, bf.analog())?;
    writeln!(out, "[f_bb_re_im]")?;
    write_matrix(&mut out, bf.digital())?;
    out.flush()?;
    Ok(())
}

pub fn read_hbf<R: BufRead>(reader: R) -> Result<HbfBeamformer> {
    let all = sections(reader)?;
    let structure = match take_section(&all, "structure")?.first() {
        Some((_, s)) if s == "fc" => HbfStructure::FullyConnected,
        Some((_, s)) if s == "pc" => HbfStructure::PartiallyConnected,
        Some((l, s)) => {
            return Err(JptaError::Parse {
                line: *l,
                message: format!("unknown structure `{s}`"),
            })
        }
        None => {
            return Err(JptaError::Parse {
                line: 0,
                message: "empty [structure] section".into(),
            })
        }
    };
    let analog = read_matrix(take_section(&all, "f_rf_re_im")?)?;
    let digital = read_matrix(take_section(&all, "f_bb_re_im")?)?;
    HbfBeamformer::from_parts(analog, digital, structure)
}

#[derive(Debug, Serialize, Deserialize)]
struct ReportRow {
    section: String,
    key: String,
    value: String,
}

/// Long-form `section,key,value` table: summary values, the convergence
/// trace, per-subcarrier matches keyed by subcarrier index, and metadata.
pub fn write_fit_report<W: Write>(
    report: &FitReport,
    indices: &[i64],
    echo: &str,
    mut out: W,
) -> Result<()> {
    write_header(&mut out, "fit report", echo)?;
    let mut w = csv::Writer::from_writer(out);
    let mut row = |section: &str, key: String, value: String| {
        w.serialize(ReportRow {
            section: section.into(),
            key,
            value,
        })
    };
    row("summary", "f_obj".into(), report.f_obj.to_string()).map_err(csv_error)?;
    if let Some(t) = report.f_tilde_obj {
        row("summary", "f_tilde_obj".into(), t.to_string()).map_err(csv_error)?;
    }
    row("summary", "iterations".into(), report.trace.len().to_string()).map_err(csv_error)?;
    for (i, v) in report.trace.iter().enumerate() {
        row("trace", (i + 1).to_string(), v.to_string()).map_err(csv_error)?;
    }
    for (k, v) in indices.iter().zip(&report.per_subcarrier_match) {
        row("match", k.to_string(), v.to_string()).map_err(csv_error)?;
    }
    for (k, v) in &report.metadata {
        row("meta", k.clone(), v.clone()).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_fit_report<R: std::io::Read>(reader: R) -> Result<FitReport> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    let mut report = FitReport {
        f_obj: f64::NAN,
        f_tilde_obj: None,
        per_subcarrier_match: Vec::new(),
        trace: Vec::new(),
        metadata: BTreeMap::new(),
    };
    for (i, rec) in r.deserialize::<ReportRow>().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let line = i + 2;
        match (rec.section.as_str(), rec.key.as_str()) {
            ("summary", "f_obj") => report.f_obj = parse_f64(&rec.value, line)?,
            ("summary", "f_tilde_obj") => report.f_tilde_obj = Some(parse_f64(&rec.value, line)?),
            ("summary", _) => {}
            ("trace", _) => report.trace.push(parse_f64(&rec.value, line)?),
            ("match", _) => report.per_subcarrier_match.push(parse_f64(&rec.value, line)?),
            ("meta", _) => {
                report.metadata.insert(rec.key, rec.value);
            }
            (other, _) => {
                return Err(JptaError::Parse {
                    line,
                    message: format!("unknown section `{other}`"),
                })
            }
        }
    }
    Ok(report)
}

/// Header `k,f_hz,theta_deg,gain_linear,gain_db`, rows by subcarrier then
/// angle.
pub fn write_gain_map<W: Write>(map: &GainMap, echo: &str, mut out: W) -> Result<()> {
    write_header(&mut out, "gain map", echo)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "f_hz", "theta_deg", "gain_linear", "gain_db"])
        .map_err(csv_error)?;
    let thetas_deg: Vec<String> = map
        .thetas()
        .iter()
        .map(|t| format!("{:.6}", t.to_degrees()))
        .collect();
    for row in 0..map.num_rows() {
        let k = map.indices()[row].to_string();
        let f = map.frequencies()[row].to_string();
        for (col, theta) in thetas_deg.iter().enumerate() {
            let g = map.get(row, col);
            w.write_record([
                k.as_str(),
                f.as_str(),
                theta.as_str(),
                &format!("{g:.9e}"),
                &format!("{:.6}", to_db(g)),
            ])
            .map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Gain-map rows as `(k, theta_deg, gain_linear)`.
pub fn read_gain_map<R: std::io::Read>(reader: R) -> Result<Vec<(i64, f64, f64)>> {
    #[derive(Deserialize)]
    struct Row {
        k: i64,
        #[allow(dead_code)]
        f_hz: f64,
        theta_deg: f64,
        gain_linear: f64,
        #[allow(dead_code)]
        gain_db: f64,
    }
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    r.deserialize::<Row>()
        .map(|row| {
            let row = row.map_err(csv_error)?;
            Ok((row.k, row.theta_deg, row.gain_linear))
        })
        .collect()
}

/// Writes serializable rows as CSV after the config echo.
pub fn write_rows<W: Write, T: Serialize>(rows: &[T], title: &str, echo: &str, mut out: W) -> Result<()> {
    write_header(&mut out, title, echo)?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: std::io::Read, T: for<'de> Deserialize<'de>>(reader: R) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beamformer_round_trip_is_exact_to_twelve_digits() {
        let bf = JptaBeamformer::from_parts(
            vec![0.0, 1.234567890123456e-10, 6.4e-9],
            vec![-3.0, 0.5, 3.1],
            vec![1.0, 2.0],
            vec![0.25, -1.5],
        );
        let mut buf = Vec::new();
        write_beamformer(&bf, "{\"id\":\"x\"}", &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("[delays_ns]\n0.00000000000e0\n1.23456789012e-1"));
        let back = read_beamformer(buf.as_slice()).unwrap();
        for (a, b) in back.delays().iter().zip(bf.delays()) {
            assert!((a - b).abs() <= 1e-11 * b.abs().max(1e-20));
        }
        for (a, b) in back.alpha().iter().zip(bf.alpha()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn malformed_beamformer_reports_line() {
        let text = "[delays_ns]\n1.0\n[phases_rad]\nabc\n[alpha_re_im]\n1,0\n";
        match read_beamformer(text.as_bytes()) {
            Err(JptaError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(read_beamformer("[delays_ns]\n1.0\n".as_bytes()).is_err());
    }

    #[test]
    fn fit_report_round_trip() {
        let report = FitReport {
            f_obj: 0.875,
            f_tilde_obj: Some(0.1),
            per_subcarrier_match: vec![0.5, 1.0],
            trace: vec![1.0, 2.0, 2.5],
            metadata: [("algorithm".to_string(), "jpta_line_search".to_string())].into(),
        };
        let mut buf = Vec::new();
        write_fit_report(&report, &[-1, 0], "{}", &mut buf).unwrap();
        let back = read_fit_report(buf.as_slice()).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn hbf_round_trip() {
        let analog = DMatrix::from_fn(4, 2, |i, n| {
            if i / 2 == n {
                Complex64::from_polar(1.0, 0.3 * i as f64)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let digital = DMatrix::from_fn(2, 3, |n, k| Complex64::new(n as f64, k as f64));
        let bf = HbfBeamformer::from_parts(analog, digital, HbfStructure::PartiallyConnected).unwrap();
        let mut buf = Vec::new();
        write_hbf(&bf, "", &mut buf).unwrap();
        let back = read_hbf(buf.as_slice()).unwrap();
        assert_eq!(back.structure(), HbfStructure::PartiallyConnected);
        assert!((back.product() - bf.product()).norm() < 1e-10);
    }
}
