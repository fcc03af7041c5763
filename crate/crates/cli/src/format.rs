//! Result rows and their CSV form.
//!
//! Floats use Rust's shortest round-trip representation, so a written file
//! parses back to the same values and re-serializes to the same bytes.

use std::io::{Read, Write};
use std::str::FromStr;

use squeeze_core::{ArchKind, LayerModel, Mode};

use crate::error::{CliError, CliResult};

pub const CSV_HEADER: [&str; 14] = [
    "arch",
    "L",
    "n_in",
    "n_out",
    "n_l",
    "theta",
    "mode",
    "model",
    "exp_sy",
    "var_sy0",
    "deriv_numeric",
    "deriv_analytic",
    "delta_phi_css",
    "delta_phi_paper",
];

pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn fmt_opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub arch: ArchKind,
    pub layers: usize,
    pub n_in: usize,
    pub n_out: usize,
    pub n_l: Option<usize>,
    pub theta: f64,
    pub mode: Mode,
    pub model: Option<LayerModel>,
    pub exp_sy: f64,
    pub var_sy0: f64,
    pub deriv_numeric: f64,
    pub deriv_analytic: Option<f64>,
    pub delta_phi_css: Option<f64>,
    pub delta_phi_paper: Option<f64>,
}

impl ResultRow {
    pub fn to_record(&self) -> Vec<String> {
        vec![
            self.arch.to_string(),
            self.layers.to_string(),
            self.n_in.to_string(),
            self.n_out.to_string(),
            fmt_opt(self.n_l),
            fmt_f64(self.theta),
            self.mode.to_string(),
            fmt_opt(self.model),
            fmt_f64(self.exp_sy),
            fmt_f64(self.var_sy0),
            fmt_f64(self.deriv_numeric),
            fmt_opt(self.deriv_analytic),
            fmt_opt(self.delta_phi_css),
            fmt_opt(self.delta_phi_paper),
        ]
    }

    pub fn from_record(record: &csv::StringRecord) -> CliResult<Self> {
        if record.len() != CSV_HEADER.len() {
            return Err(CliError::Usage(format!(
                "expected {} fields, found {}",
                CSV_HEADER.len(),
                record.len()
            )));
        }
        let f = |i: usize| &record[i];
        Ok(Self {
            arch: parse(f(0), "arch")?,
            layers: parse(f(1), "L")?,
            n_in: parse(f(2), "n_in")?,
            n_out: parse(f(3), "n_out")?,
            n_l: parse_opt(f(4), "n_l")?,
            theta: parse(f(5), "theta")?,
            mode: parse(f(6), "mode")?,
            model: parse_opt(f(7), "model")?,
            exp_sy: parse(f(8), "exp_sy")?,
            var_sy0: parse(f(9), "var_sy0")?,
            deriv_numeric: parse(f(10), "deriv_numeric")?,
            deriv_analytic: parse_opt(f(11), "deriv_analytic")?,
            delta_phi_css: parse_opt(f(12), "delta_phi_css")?,
            delta_phi_paper: parse_opt(f(13), "delta_phi_paper")?,
        })
    }
}

fn parse<T: FromStr>(s: &str, field: &str) -> CliResult<T> {
    s.parse()
        .map_err(|_| CliError::Usage(format!("bad {field} field '{s}'")))
}

fn parse_opt<T: FromStr>(s: &str, field: &str) -> CliResult<Option<T>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse(s, field).map(Some)
    }
}

fn csv_err(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io("csv", io),
        other => CliError::Usage(format!("malformed csv: {other:?}")),
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[ResultRow]) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.to_record()).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io("csv", e))
}

pub fn read_csv<R: Read>(input: R) -> CliResult<Vec<ResultRow>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = r.headers().map_err(csv_err)?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(CliError::Usage(format!("unexpected csv header {header:?}")));
    }
    r.records()
        .map(|rec| ResultRow::from_record(&rec.map_err(csv_err)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> ResultRow {
        ResultRow {
            arch: ArchKind::Qnn,
            layers: 3,
            n_in: 4,
            n_out: 4,
            n_l: Some(4),
            theta: 0.1,
            mode: Mode::Sequential,
            model: Some(LayerModel::EventAdditive),
            exp_sy: 1.0 / 3.0,
            var_sy0: 3.0,
            deriv_numeric: -0.0,
            deriv_analytic: None,
            delta_phi_css: Some(f64::INFINITY),
            delta_phi_paper: Some(1e-300),
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let mut bytes = Vec::new();
        write_csv(&mut bytes, &[row(), row()]).unwrap();
        let back = read_csv(bytes.as_slice()).unwrap();
        assert_eq!(back, vec![row(), row()]);
        let mut again = Vec::new();
        write_csv(&mut again, &back).unwrap();
        assert_eq!(bytes, again);
    }

    #[test]
    fn header_is_exact() {
        let mut bytes = Vec::new();
        write_csv(&mut bytes, &[]).unwrap();
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            "arch,L,n_in,n_out,n_l,theta,mode,model,exp_sy,var_sy0,deriv_numeric,deriv_analytic,delta_phi_css,delta_phi_paper\n"
        );
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
