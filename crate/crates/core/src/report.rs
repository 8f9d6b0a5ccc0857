//! Machine-readable CSV output shared by the scan and error-curve commands.

use std::io::Write;

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::experiments::{ConvergenceVerdict, ErrorCurveRow};
use crate::real::{from_rational, render, GUARD_BITS};

pub const CSV_HEADER: [&str; 9] = [
    "x",
    "alpha",
    "series",
    "terms",
    "value",
    "reference",
    "abs_err",
    "rel_err",
    "verdict",
];

/// One CSV line; absent numbers are written as empty fields.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub x: Float,
    pub alpha: Float,
    pub series: String,
    pub terms: usize,
    pub value: Option<Float>,
    pub reference: Option<Float>,
    pub abs_err: Option<Float>,
    pub rel_err: Option<Float>,
    pub verdict: String,
}

fn errors(value: &Option<Float>, reference: &Option<Float>, precision: u32) -> (Option<Float>, Option<Float>) {
    match (value, reference) {
        (Some(v), Some(r)) => {
            let abs = Float::with_val(precision, Float::with_val(precision + GUARD_BITS, v - r).abs_ref());
            let rel = if r.is_zero() {
                abs.clone()
            } else {
                Float::with_val(precision, &abs / Float::with_val(precision, r.abs_ref()))
            };
            (Some(abs), Some(rel))
        }
        _ => (None, None),
    }
}

fn alpha_float(alpha: &Rational, precision: u32) -> Float {
    from_rational(precision, alpha)
}

impl CsvRow {
    pub fn from_verdict(v: &ConvergenceVerdict, precision: u32) -> Self {
        let (abs_err, rel_err) = errors(&v.value, &v.reference, precision);
        CsvRow {
            x: v.x.value(precision),
            alpha: alpha_float(&v.alpha, precision),
            series: v.series.label().to_string(),
            terms: v.terms,
            value: v.value.clone(),
            reference: v.reference.clone(),
            abs_err,
            rel_err,
            verdict: v.verdict.label().to_string(),
        }
    }

    pub fn from_error_row(r: &ErrorCurveRow, precision: u32) -> Self {
        let verdict = if r.approx.is_some() && r.reference.is_some() {
            "evaluated"
        } else {
            "out_of_domain"
        };
        CsvRow {
            x: r.x.value(precision),
            alpha: alpha_float(&r.alpha, precision),
            series: r.series.label().to_string(),
            terms: r.terms,
            value: r.approx.clone(),
            reference: r.reference.clone(),
            abs_err: r.abs_err.clone(),
            rel_err: r.rel_err.clone(),
            verdict: verdict.to_string(),
        }
    }

    fn fields(&self, digits: usize) -> [String; 9] {
        let opt = |v: &Option<Float>| v.as_ref().map(|f| render(f, digits)).unwrap_or_default();
        [
            render(&self.x, digits),
            render(&self.alpha, digits),
            self.series.clone(),
            self.terms.to_string(),
            opt(&self.value),
            opt(&self.reference),
            opt(&self.abs_err),
            opt(&self.rel_err),
            self.verdict.clone(),
        ]
    }
}

/// Writes the header and one line per row, LF-terminated, numbers rendered
/// to `digits` significant digits.
pub fn write_csv<W: Write>(out: W, rows: &[CsvRow], digits: usize) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        w.write_record(row.fields(digits)).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

/// Renders the rows to a string; see [`write_csv`].
pub fn to_csv_string(rows: &[CsvRow], digits: usize) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows, digits)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}
