//! Columnar text format for tabulated symbols and dense operators.
//!
//! Layout, with field order fixed:
//!
//! ```text
//! <tag>,n,N,Xi,name
//! <k-index>,<xi-index>,<re>,<im>
//! ...
//! ```
//!
//! Symbols use tag `symbol` with `k` a flat grid index and `xi` a flat
//! cube index; dense operators use tag `operator` with row/column
//! indices in the same two slots. Floats carry 17 significant digits so
//! round-trips are exact.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{FrequencyCube, IntBox, TorusGrid};

use super::{LatticeSymbol, SymbolData, SymbolTable};

pub const SYMBOL_TAG: &str = "symbol";
pub const OPERATOR_TAG: &str = "operator";

/// Parsed columnar file.
#[derive(Debug, Clone)]
pub struct ColumnarRecord {
    pub tag: String,
    pub dimension: usize,
    pub points_per_axis: usize,
    pub cutoff: i64,
    pub name: String,
    pub rows: Vec<(usize, usize, Complex64)>,
}

/// Render a columnar file from raw rows.
pub fn write_columnar(
    tag: &str,
    dimension: usize,
    points_per_axis: usize,
    cutoff: i64,
    name: &str,
    rows: impl Iterator<Item = (usize, usize, Complex64)>,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("{tag},{dimension},{points_per_axis},{cutoff},{name}\n"));
    for (k, xi, v) in rows {
        out.push_str(&format!("{k},{xi},{:.16e},{:.16e}\n", v.re, v.im));
    }
    out
}

/// Parse a columnar file.
pub fn read_columnar(text: &str) -> Result<ColumnarRecord> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Domain("empty columnar file".into()))?;
    let fields: Vec<&str> = header.splitn(5, ',').collect();
    if fields.len() != 5 {
        return Err(Error::Domain(format!(
            "columnar header needs 5 fields, got {}",
            fields.len()
        )));
    }
    let parse = |s: &str, what: &str| -> Result<i64> {
        s.trim()
            .parse::<i64>()
            .map_err(|_| Error::Domain(format!("bad {what} field '{s}' in columnar header")))
    };
    let record_tag = fields[0].to_string();
    let dimension = parse(fields[1], "dimension")? as usize;
    let points_per_axis = parse(fields[2], "grid size")? as usize;
    let cutoff = parse(fields[3], "cutoff")?;
    let name = fields[4].to_string();
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(Error::Domain(format!(
                "row {} needs 4 fields, got {}",
                lineno + 2,
                cols.len()
            )));
        }
        let k = parse(cols[0], "k-index")? as usize;
        let xi = parse(cols[1], "xi-index")? as usize;
        let re: f64 = cols[2].trim().parse().map_err(|_| {
            Error::Domain(format!("bad re field on row {}", lineno + 2))
        })?;
        let im: f64 = cols[3].trim().parse().map_err(|_| {
            Error::Domain(format!("bad im field on row {}", lineno + 2))
        })?;
        rows.push((k, xi, Complex64::new(re, im)));
    }
    Ok(ColumnarRecord {
        tag: record_tag,
        dimension,
        points_per_axis,
        cutoff,
        name,
        rows,
    })
}

/// Serialize a tabulated symbol. The valid box must still be the full
/// cube (differenced symbols carry shrunk boxes the header cannot
/// describe).
pub fn write_symbol_table(a: &LatticeSymbol) -> Result<String> {
    let Some(t) = a.table() else {
        return Err(Error::Domain(format!(
            "symbol '{}' is a closed form; tabulate it before serializing",
            a.name()
        )));
    };
    let cutoff = t.domain.hi[0];
    let is_cube = (0..t.domain.dimension())
        .all(|j| t.domain.lo[j] == -cutoff && t.domain.hi[j] == cutoff);
    if !is_cube || cutoff < 0 {
        return Err(Error::Domain(
            "only full-cube symbol tables serialize to the columnar format".into(),
        ));
    }
    let dlen = t.domain.len();
    let rows = (0..t.grid.len()).flat_map(move |k| {
        (0..dlen).map(move |xi| (k, xi, t.values[k * dlen + xi]))
    });
    Ok(write_columnar(
        SYMBOL_TAG,
        t.grid.dimension(),
        t.grid.points_per_axis(),
        cutoff,
        a.name(),
        rows,
    ))
}

/// Rebuild a tabulated symbol from its columnar form. The declared
/// order is not part of the format and comes back as zero.
pub fn read_symbol_table(text: &str) -> Result<LatticeSymbol> {
    let rec = read_columnar(text)?;
    if rec.tag != SYMBOL_TAG {
        return Err(Error::Domain(format!(
            "expected tag '{SYMBOL_TAG}', found '{}'",
            rec.tag
        )));
    }
    let grid = TorusGrid::new(rec.dimension, rec.points_per_axis)?;
    let cube = FrequencyCube::new(rec.dimension, rec.cutoff)?;
    let domain = IntBox::from_cube(&cube);
    let dlen = domain.len();
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len() * dlen];
    for (k, xi, v) in rec.rows {
        if k >= grid.len() || xi >= dlen {
            return Err(Error::Domain(format!(
                "row index ({k}, {xi}) outside grid x cube"
            )));
        }
        values[k * dlen + xi] = v;
    }
    Ok(LatticeSymbol::from_parts(
        rec.name,
        rec.dimension,
        0.0,
        SymbolData::Table(SymbolTable {
            grid,
            domain,
            values,
        }),
    ))
}
