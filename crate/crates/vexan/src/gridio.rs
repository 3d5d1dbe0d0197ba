//! Grid-function CSV import/export.
//!
//! The format is a 3-line header (`dim`, `N`, `L`) followed by the flat
//! row-major cell values, one per line:
//!
//! ```text
//! dim,1
//! N,64
//! L,4
//! 0.25
//! 0.5
//! ...
//! ```

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use vexan_core::discretize::{BoxDomain, GridFunction, UniformGrid};

pub fn write_grid_csv(path: &Path, f: &GridFunction) -> Result<()> {
    let grid = f.grid();
    let mut out = String::new();
    out.push_str(&format!("dim,{}\n", grid.dim()));
    out.push_str(&format!("N,{}\n", grid.points_per_axis()));
    out.push_str(&format!("L,{}\n", grid.domain().half_extent()));
    for v in f.values() {
        out.push_str(&format!("{v}\n"));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

pub fn read_grid_csv(path: &Path) -> Result<GridFunction> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let dim = header_value(lines.next(), "dim")? as usize;
    let n = header_value(lines.next(), "N")? as usize;
    let l = header_value(lines.next(), "L")?;
    let grid = UniformGrid::new(BoxDomain::new(dim, l)?, n)?;
    let mut values = Vec::with_capacity(grid.node_count());
    for (idx, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .with_context(|| format!("value on data line {}", idx + 1))?;
        values.push(v);
    }
    if values.len() != grid.node_count() {
        bail!(
            "expected {} values for dim={dim} N={n}, found {}",
            grid.node_count(),
            values.len()
        );
    }
    Ok(GridFunction::from_values(grid, values)?)
}

fn header_value(line: Option<&str>, key: &str) -> Result<f64> {
    let line = line.with_context(|| format!("missing header line {key:?}"))?;
    let (k, v) = line
        .split_once(',')
        .with_context(|| format!("malformed header line {line:?}"))?;
    if k.trim() != key {
        bail!("expected header key {key:?}, found {k:?}");
    }
    Ok(v.trim().parse()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_bits() {
        let grid = UniformGrid::new(BoxDomain::new(2, 1.5).unwrap(), 6).unwrap();
        let f = GridFunction::sample(grid, |x| x[0] * 0.317 + x[1].sin());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        write_grid_csv(&path, &f).unwrap();
        let g = read_grid_csv(&path).unwrap();
        assert_eq!(f.grid(), g.grid());
        for (a, b) in f.values().iter().zip(g.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "dim,1\nN,4\nL,1\n0.0\n1.0\n").unwrap();
        assert!(read_grid_csv(&path).is_err());
    }
}
