//! Plain-text coefficient files.
//!
//! ```text
//! # any comment
//! n 1
//! N 128
//! base_width 1.0000000000000000000000000000000e+00
//! digits 30
//! k1 re im          (n = 1)
//! k1 k2 re im       (n = 2)
//! ```
//! Mantissas are written with 34 significant digits so that a dump/load
//! round trip is exact to the working precision. Missing indices load as 0.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex;

use super::{GridSpec, TorusFourier};
use crate::error::{Error, Result};
use crate::precision::{PrecisionContext, XReal};

const OUT_DIGITS: usize = 34;

pub fn write_coefficients<W: Write>(f: &TorusFourier, ctx: &PrecisionContext, mut w: W) -> std::io::Result<()> {
    let g = f.grid();
    writeln!(w, "n {}", g.dim())?;
    let sizes: Vec<String> = g.sizes().iter().map(|m| m.to_string()).collect();
    writeln!(w, "N {}", sizes.join(" "))?;
    writeln!(w, "base_width {}", f.base_width().to_sci_string(OUT_DIGITS))?;
    writeln!(w, "digits {}", ctx.digits())?;
    for (k, c) in f.iter() {
        if c.re.is_zero() && c.im.is_zero() {
            continue;
        }
        let idx = if g.dim() == 1 {
            format!("{}", k[0])
        } else {
            format!("{} {}", k[0], k[1])
        };
        writeln!(
            w,
            "{idx} {} {}",
            c.re.to_sci_string(OUT_DIGITS),
            c.im.to_sci_string(OUT_DIGITS)
        )?;
    }
    Ok(())
}

pub fn read_coefficients<R: Read>(r: R) -> Result<TorusFourier> {
    let reader = BufReader::new(r);
    let mut n: Option<usize> = None;
    let mut sizes: Option<Vec<usize>> = None;
    let mut bw: Option<XReal> = None;
    let mut f: Option<TorusFourier> = None;
    let perr = |line: usize, msg: String| Error::Parse(format!("line {line}: {msg}"));
    let num = |line: usize, s: &str| -> Result<XReal> {
        s.parse::<XReal>().map_err(|e| perr(line, format!("bad number {s:?}: {e}")))
    };
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| perr(lineno, e.to_string()))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        match parts[0] {
            "n" => n = Some(parts.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| perr(lineno, "bad n".into()))?),
            "N" => {
                let v: std::result::Result<Vec<usize>, _> = parts[1..].iter().map(|s| s.parse()).collect();
                sizes = Some(v.map_err(|e| perr(lineno, format!("bad N: {e}")))?);
            }
            "base_width" => bw = Some(num(lineno, parts.get(1).copied().unwrap_or(""))?),
            "digits" => {}
            _ => {
                if f.is_none() {
                    let (n, sizes, bw) = match (n, &sizes, bw) {
                        (Some(n), Some(s), Some(b)) => (n, s.clone(), b),
                        _ => return Err(perr(lineno, "coefficients before the n/N/base_width header".into())),
                    };
                    if sizes.len() != n {
                        return Err(perr(lineno, format!("N has {} sizes for n = {n}", sizes.len())));
                    }
                    let grid = GridSpec::new(&sizes)?;
                    f = Some(TorusFourier::zeros(grid, bw));
                }
                let tf = f.as_mut().expect("initialised");
                let dim = tf.dim();
                if parts.len() != dim + 2 {
                    return Err(perr(lineno, format!("expected {} fields, got {}", dim + 2, parts.len())));
                }
                let mut k = [0i64; 2];
                for (l, kl) in k.iter_mut().enumerate().take(dim) {
                    *kl = parts[l].parse().map_err(|e| perr(lineno, format!("bad index: {e}")))?;
                }
                if !tf.grid().contains(k) {
                    return Err(perr(lineno, format!("index {k:?} outside the grid")));
                }
                let c = Complex::new(num(lineno, parts[dim])?, num(lineno, parts[dim + 1])?);
                let slot = tf.grid().slot(k);
                tf.mantissas_mut()[slot] = c;
            }
        }
    }
    match f {
        Some(f) => Ok(f),
        None => match (n, sizes, bw) {
            (Some(n), Some(s), Some(b)) if s.len() == n => Ok(TorusFourier::zeros(GridSpec::new(&s)?, b)),
            _ => Err(Error::Parse("missing n/N/base_width header".into())),
        },
    }
}

pub fn dump_coefficients(f: &TorusFourier, ctx: &PrecisionContext, path: &Path) -> Result<()> {
    let io = |e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let file = File::create(path).map_err(io)?;
    let mut w = BufWriter::new(file);
    write_coefficients(f, ctx, &mut w).map_err(io)?;
    w.flush().map_err(io)
}

pub fn load_coefficients(path: &Path) -> Result<TorusFourier> {
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    read_coefficients(file)
}
