//! DGF1 text format.
//!
//! ```text
//! # optional comment lines
//! DGF1 n=2 depth=1 origin=0,0 side=1 weight
//! 1 2
//! 3 4
//! ```
//!
//! The header names the grid; the body holds exactly `2^{n·depth}`
//! whitespace-separated decimal values in lexicographic cell order (last
//! coordinate fastest). The trailing `weight` flag makes the reader reject
//! negative values.

use std::io::{BufRead, Write};

use crate::dyadic::{DyadicGrid, GridFunction};
use crate::error::{Error, Result};

const MAGIC: &str = "DGF1";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_header(line_no: usize, line: &str) -> Result<(DyadicGrid, bool)> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some(MAGIC) {
        return Err(parse_err(line_no, format!("expected `{MAGIC}` header")));
    }
    let (mut n, mut depth, mut origin, mut side, mut weight) = (None, None, None, None, false);
    for tok in tokens {
        if tok == "weight" {
            weight = true;
            continue;
        }
        let (key, val) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("malformed header field `{tok}`")))?;
        let bad = |what: &str| parse_err(line_no, format!("invalid {what} `{val}`"));
        match key {
            "n" => n = Some(val.parse::<usize>().map_err(|_| bad("n"))?),
            "depth" => depth = Some(val.parse::<u32>().map_err(|_| bad("depth"))?),
            "origin" => {
                let coords = val
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad("origin"))?;
                origin = Some(coords);
            }
            "side" => side = Some(val.parse::<f64>().map_err(|_| bad("side"))?),
            _ => return Err(parse_err(line_no, format!("unknown header field `{key}`"))),
        }
    }
    let missing = |f: &str| parse_err(line_no, format!("header is missing `{f}`"));
    let n = n.ok_or_else(|| missing("n"))?;
    let depth = depth.ok_or_else(|| missing("depth"))?;
    let origin = origin.ok_or_else(|| missing("origin"))?;
    let side = side.ok_or_else(|| missing("side"))?;
    let grid = DyadicGrid::new(n, depth, &origin, side).map_err(|e| parse_err(line_no, e.to_string()))?;
    Ok((grid, weight))
}

/// Reads a DGF1 function.
pub fn read_function<R: BufRead>(source: R) -> Result<GridFunction> {
    let mut header = None;
    let mut values = Vec::new();
    let mut last_line = 0;
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        last_line = line_no;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match &header {
            None => header = Some(parse_header(line_no, trimmed)?),
            Some((grid, _)) => {
                for tok in trimmed.split_whitespace() {
                    let v: f64 = tok
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("invalid value `{tok}`")))?;
                    if !v.is_finite() {
                        return Err(parse_err(line_no, format!("non-finite value `{tok}`")));
                    }
                    values.push(v);
                    if values.len() > grid.cell_count() {
                        return Err(parse_err(
                            line_no,
                            format!("more than {} values", grid.cell_count()),
                        ));
                    }
                }
            }
        }
    }
    let (grid, weight) = header.ok_or_else(|| parse_err(last_line.max(1), "missing DGF1 header"))?;
    if values.len() != grid.cell_count() {
        return Err(Error::ValueCount { expected: grid.cell_count(), found: values.len() });
    }
    let f = GridFunction::new(&grid, values)?;
    if weight {
        f.into_weight()
    } else {
        Ok(f)
    }
}

pub fn read_str(text: &str) -> Result<GridFunction> {
    read_function(text.as_bytes())
}

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `f` as DGF1; values use 17 significant digits, one row per run of
/// the last coordinate.
pub fn write_function<W: Write>(f: &GridFunction, mut sink: W) -> Result<()> {
    let g = f.grid();
    let origin: Vec<String> = g.origin().iter().map(|o| format!("{o:?}")).collect();
    write!(
        sink,
        "{MAGIC} n={} depth={} origin={} side={:?}",
        g.dim(),
        g.depth(),
        origin.join(","),
        g.side()
    )?;
    if f.is_weight() {
        write!(sink, " weight")?;
    }
    writeln!(sink)?;
    let row = 1usize << g.depth();
    for chunk in f.values().chunks(row) {
        let line: Vec<String> = chunk.iter().map(|&v| fmt_value(v)).collect();
        writeln!(sink, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn write_string(f: &GridFunction) -> String {
    let mut buf = Vec::new();
    write_function(f, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}
