//! CSV output for sweep rows and table cells.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::sweep::{DeltaRow, OmegaRow};
use super::tables::{CellStatus, TableCell};
use super::Breakdown;
use crate::error::{Error, Result};
use crate::precision::{PrecisionContext, XReal};

/// A row type that can be written as one CSV record.
pub trait CsvRow {
    fn header() -> Vec<&'static str>;
    /// Fields; reals in scientific notation with `digits` significant digits.
    fn record(&self, digits: usize) -> Vec<String>;
}

fn sci(x: XReal, digits: usize) -> String {
    x.to_sci_string(digits)
}

const BREAKDOWN_HEADER: [&str; 11] = ["I_R", "I1", "I2", "I3", "frac1", "frac2", "frac3", "F", "norm_v", "norm_u", "B"];

fn breakdown_fields(b: &Breakdown, digits: usize, out: &mut Vec<String>) {
    for x in [b.i_r, b.i1, b.i2, b.i3, b.fractions[0], b.fractions[1], b.fractions[2], b.f, b.norm_v, b.norm_u, b.b] {
        out.push(sci(x, digits));
    }
}

impl CsvRow for DeltaRow {
    fn header() -> Vec<&'static str> {
        let mut h = vec![
            "rho", "delta", "N", "gamma", "tau", "L", "c_R", "c_R0", "adhoc_ratio", "classic_ratio",
        ];
        h.extend(BREAKDOWN_HEADER);
        h
    }

    fn record(&self, digits: usize) -> Vec<String> {
        let mut r = vec![
            sci(self.rho, digits),
            sci(self.delta, digits),
            self.grid_side.to_string(),
            sci(self.gamma, digits),
            sci(self.tau, digits),
            self.cutoff.to_string(),
            sci(self.c_r, digits),
            sci(self.c_r0, digits),
            sci(self.adhoc_ratio, digits),
            sci(self.classic_ratio, digits),
        ];
        breakdown_fields(&self.breakdown, digits, &mut r);
        r
    }
}

impl CsvRow for OmegaRow {
    fn header() -> Vec<&'static str> {
        let mut h = vec![
            "j", "omega1", "omega2", "status", "gamma", "tau", "L", "c_R", "c_R0", "adhoc_ratio", "classic_ratio",
            "classic_over_adhoc",
        ];
        h.extend(BREAKDOWN_HEADER);
        h
    }

    fn record(&self, digits: usize) -> Vec<String> {
        let c = self.omega.comps();
        let mut r = vec![
            self.index.map(|j| j.to_string()).unwrap_or_default(),
            sci(c[0], digits),
            c.get(1).map(|w| sci(*w, digits)).unwrap_or_default(),
        ];
        match &self.outcome {
            Ok(p) => {
                r.push("ok".into());
                for x in [p.gamma, p.tau] {
                    r.push(sci(x, digits));
                }
                r.push(p.cutoff.to_string());
                for x in [p.c_r, p.c_r0, p.adhoc_ratio, p.classic_ratio, p.classic_over_adhoc()] {
                    r.push(sci(x, digits));
                }
                breakdown_fields(&p.breakdown, digits, &mut r);
            }
            Err(msg) => {
                r.push(msg.clone());
                r.resize(Self::header().len(), String::new());
            }
        }
        r
    }
}

impl CsvRow for TableCell {
    fn header() -> Vec<&'static str> {
        vec!["table", "row", "quantity", "reference", "computed", "exact", "deviation", "tolerance", "status"]
    }

    fn record(&self, digits: usize) -> Vec<String> {
        let opt = |x: Option<XReal>| x.map(|v| sci(v, digits)).unwrap_or_default();
        vec![
            self.table.to_string(),
            self.row.clone(),
            self.quantity.to_string(),
            format!("{:e}", self.reference),
            opt(self.computed),
            opt(self.exact),
            self.deviation.map(|d| format!("{d:.3e}")).unwrap_or_default(),
            format!("{:e}", self.tolerance),
            match &self.status {
                CellStatus::Pass => "pass".into(),
                CellStatus::Fail => "fail".into(),
                CellStatus::Skipped(why) => format!("skipped: {why}"),
            },
        ]
    }
}

/// Writes header and rows to any writer.
pub fn write_csv<R: CsvRow, W: Write>(rows: &[R], out: W, digits: usize) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(R::header())?;
    for row in rows {
        w.write_record(row.record(digits))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes header and rows to `path` with the context's digit count.
pub fn emit_csv<R: CsvRow>(rows: &[R], path: &Path, ctx: &PrecisionContext) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(rows, file, ctx.digits() as usize).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_rows_give_header_only() {
        let mut buf = Vec::new();
        write_csv::<TableCell, _>(&[], &mut buf, 30).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "table,row,quantity,reference,computed,exact,deviation,tolerance,status\n");
    }

    #[test]
    fn bad_path_reports_it() {
        let p = Path::new("/nonexistent-dir/x.csv");
        match emit_csv::<TableCell>(&[], p, &PrecisionContext::default()) {
            Err(Error::Io { path, .. }) => assert_eq!(path, p),
            other => panic!("{other:?}"),
        }
    }
}
