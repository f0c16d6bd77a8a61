//! CSV artifacts.
//!
//! Numbers are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64`. Metadata goes in `#`-prefixed `key=value` lines
//! ahead of the column header.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::deconv::{Curve, CurveMeta};
use crate::error::{Error, Result};
use crate::kde::Sample;
use crate::montecarlo::McReport;

/// Format with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_header<W: Write + ?Sized>(w: &mut W, pairs: &[(String, String)]) -> std::io::Result<()> {
    for (k, v) in pairs {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(())
}

/// Parse one value per line; blank and `#` lines are skipped, and a single
/// `x` header line is allowed before the first value.
pub fn parse_sample(text: &str) -> Result<Sample> {
    let mut values = Vec::new();
    let mut header_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "x" {
            if header_seen || !values.is_empty() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: "unexpected header line".into(),
                });
            }
            header_seen = true;
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("not a number: '{line}'"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("value is not finite: '{line}'"),
            });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no observations found".into(),
        });
    }
    Sample::new(values)
}

pub fn read_sample(path: &Path) -> Result<Sample> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_sample(&text)
}

pub fn write_sample_to<W: Write + ?Sized>(w: &mut W, sample: &Sample, header: &[(String, String)]) -> std::io::Result<()> {
    write_header(w, header)?;
    writeln!(w, "x")?;
    for &v in sample.values() {
        writeln!(w, "{}", fmt17(v))?;
    }
    Ok(())
}

pub fn write_sample(path: &Path, sample: &Sample, header: &[(String, String)]) -> Result<()> {
    write_file(path, |w| write_sample_to(w, sample, header))
}

fn curve_header(meta: &CurveMeta) -> Vec<(String, String)> {
    let mut pairs = vec![
        ("estimator".to_string(), meta.estimator.clone()),
        ("n".to_string(), meta.n.to_string()),
        ("h".to_string(), format!("{}", meta.h)),
    ];
    if let Some(hp) = meta.h_pivot {
        pairs.push(("h_pivot".into(), format!("{hp}")));
    }
    pairs.push(("kernel".into(), meta.kernel.clone()));
    pairs.push(("weight".into(), meta.weight.clone()));
    pairs.extend(meta.extra.iter().cloned());
    pairs
}

pub fn write_curve_to<W: Write + ?Sized>(w: &mut W, curve: &Curve) -> std::io::Result<()> {
    write_header(w, &curve_header(&curve.meta))?;
    writeln!(w, "x,value")?;
    for (i, v) in curve.values.iter().enumerate() {
        writeln!(w, "{},{}", fmt17(curve.x(i)), fmt17(*v))?;
    }
    Ok(())
}

pub fn write_curve(path: &Path, curve: &Curve) -> Result<()> {
    write_file(path, |w| write_curve_to(w, curve))
}

/// Read a curve written by [`write_curve`]. The grid start and step are
/// recovered from the first and last rows; rows must be equally spaced.
pub fn parse_curve(text: &str) -> Result<Curve> {
    let mut meta = CurveMeta {
        estimator: String::new(),
        n: 0,
        h: f64::NAN,
        h_pivot: None,
        kernel: String::new(),
        weight: String::new(),
        extra: Vec::new(),
    };
    let mut xs = Vec::new();
    let mut values = Vec::new();
    let mut header_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let parse_err = |message: String| Error::Parse { line: idx + 1, message };
        if line.is_empty() {
            continue;
        }
        if let Some(kv) = line.strip_prefix('#') {
            if let Some((k, v)) = kv.trim().split_once('=') {
                let v = v.to_string();
                match k {
                    "estimator" => meta.estimator = v,
                    "n" => meta.n = v.parse().map_err(|_| parse_err(format!("bad n '{v}'")))?,
                    "h" => meta.h = v.parse().map_err(|_| parse_err(format!("bad h '{v}'")))?,
                    "h_pivot" => {
                        meta.h_pivot =
                            Some(v.parse().map_err(|_| parse_err(format!("bad h_pivot '{v}'")))?)
                    }
                    "kernel" => meta.kernel = v,
                    "weight" => meta.weight = v,
                    _ => meta.extra.push((k.to_string(), v)),
                }
            }
            continue;
        }
        if !header_seen {
            if line != "x,value" {
                return Err(parse_err(format!("expected header 'x,value', got '{line}'")));
            }
            header_seen = true;
            continue;
        }
        let (x, v) = line
            .split_once(',')
            .ok_or_else(|| parse_err(format!("expected two columns: '{line}'")))?;
        let x: f64 = x.trim().parse().map_err(|_| parse_err(format!("bad x '{x}'")))?;
        let v: f64 = v.trim().parse().map_err(|_| parse_err(format!("bad value '{v}'")))?;
        xs.push(x);
        values.push(v);
    }
    if xs.len() < 2 {
        return Err(Error::Parse {
            line: 0,
            message: "a curve needs at least two rows".into(),
        });
    }
    let last = xs.len() - 1;
    let dx = (xs[last] - xs[0]) / last as f64;
    if let Some(i) = xs
        .iter()
        .enumerate()
        .position(|(i, &x)| (x - (xs[0] + i as f64 * dx)).abs() > 1e-6 * dx.abs())
    {
        return Err(Error::Parse {
            line: 0,
            message: format!("row {} breaks the uniform spacing ({})", i + 1, xs[i]),
        });
    }
    Curve::new(xs[0], dx, values, meta)
}

pub fn read_curve(path: &Path) -> Result<Curve> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_curve(&text)
}

pub const REPORT_COLUMNS: &str = "x,truth,mean,bias,variance,se_mean,se_variance,skewness,\
excess_kurtosis,mse,fourth_moment,theory_bias,theory_variance";

/// One row per evaluation point, with the configuration (and any integrated
/// summaries) in the comment block.
pub fn write_report_to<W: Write + ?Sized>(w: &mut W, report: &McReport, extra: &[(String, String)]) -> std::io::Result<()> {
    let mut header = report.config.describe();
    header.extend(extra.iter().cloned());
    if let Some(m) = &report.mise {
        header.push(("mise_empirical".into(), fmt17(m.empirical)));
        header.push(("mise_std_error".into(), fmt17(m.std_error)));
        if let Some(e) = &m.expansion {
            header.push(("mise_theory_bias_term".into(), fmt17(e.bias_term)));
            header.push(("mise_theory_var_term".into(), fmt17(e.var_term)));
            header.push(("mise_theory_total".into(), fmt17(e.total)));
        }
    }
    if let Some(b) = report.pivot_bound {
        header.push(("pivot_bound".into(), fmt17(b)));
    }
    write_header(w, &header)?;
    writeln!(w, "{REPORT_COLUMNS}")?;
    for p in &report.points {
        let row = [
            p.x,
            p.truth,
            p.mean,
            p.bias,
            p.variance,
            p.se_mean,
            p.se_variance,
            p.skewness,
            p.excess_kurtosis,
            p.mse,
            p.fourth_moment,
            p.theory_bias,
            p.theory_variance,
        ];
        let cells: Vec<String> = row.iter().map(|v| fmt17(*v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn write_report(path: &Path, report: &McReport, extra: &[(String, String)]) -> Result<()> {
    write_file(path, |w| write_report_to(w, report, extra))
}

fn write_file<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>,
{
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}
