//! CSV and JSON artifact I/O.
//!
//! Two CSV schemas are used throughout:
//!
//! * potential files: `x,re_u,im_u`;
//! * scattering files: `z,re_a,im_a,re_rplus,im_rplus,re_rminus,im_rminus`.
//!
//! All floats are written with 17 significant digits so the artifacts
//! round-trip bit-exactly through the text form.

use anyhow::{bail, Context};
use dnls_ist::grids::{SpatialGrid, SpectralGrid};
use dnls_ist::C64;
use std::path::Path;

/// Grid-coordinate agreement required when reading files back.
const COORD_TOL: f64 = 1e-12;

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

/// Write a potential CSV (`x,re_u,im_u`).
pub fn write_potential_csv(path: &Path, grid: &SpatialGrid, values: &[C64]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(["x", "re_u", "im_u"])?;
    for (j, v) in values.iter().enumerate() {
        w.write_record([fmt(grid.node(j)), fmt(v.re), fmt(v.im)])?;
    }
    w.flush()?;
    Ok(())
}

/// Read a potential CSV, checking its nodes against the expected grid.
pub fn read_potential_csv(path: &Path, grid: &SpatialGrid) -> anyhow::Result<Vec<C64>> {
    let mut r = csv::Reader::from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut values = Vec::with_capacity(grid.point_count);
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != 3 {
            bail!("{}: row {} has {} fields, expected 3", path.display(), row + 2, rec.len());
        }
        let x: f64 = rec[0].parse().context("bad x value")?;
        let re: f64 = rec[1].parse().context("bad re_u value")?;
        let im: f64 = rec[2].parse().context("bad im_u value")?;
        if values.len() >= grid.point_count {
            bail!("{}: more rows than grid points ({})", path.display(), grid.point_count);
        }
        let expect = grid.node(values.len());
        if (x - expect).abs() > COORD_TOL * (1.0 + expect.abs()) {
            bail!(
                "{}: x = {x} at row {} does not match the configured grid node {expect}",
                path.display(),
                row + 2
            );
        }
        values.push(C64::new(re, im));
    }
    if values.len() != grid.point_count {
        bail!(
            "{}: {} rows, expected {}",
            path.display(),
            values.len(),
            grid.point_count
        );
    }
    Ok(values)
}

/// Write a scattering CSV (`z,re_a,im_a,re_rplus,im_rplus,re_rminus,im_rminus`).
pub fn write_scattering_csv(
    path: &Path,
    grid: &SpectralGrid,
    a: &[C64],
    r_plus: &[C64],
    r_minus: &[C64],
) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record([
        "z", "re_a", "im_a", "re_rplus", "im_rplus", "re_rminus", "im_rminus",
    ])?;
    for j in 0..grid.point_count {
        w.write_record([
            fmt(grid.node(j)),
            fmt(a[j].re),
            fmt(a[j].im),
            fmt(r_plus[j].re),
            fmt(r_plus[j].im),
            fmt(r_minus[j].re),
            fmt(r_minus[j].im),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Contents of a scattering CSV.
pub struct ScatteringFile {
    pub a: Vec<C64>,
    pub r_plus: Vec<C64>,
    pub r_minus: Vec<C64>,
}

/// Read a scattering CSV, checking its nodes against the expected grid.
pub fn read_scattering_csv(path: &Path, grid: &SpectralGrid) -> anyhow::Result<ScatteringFile> {
    let mut r = csv::Reader::from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut a = Vec::with_capacity(grid.point_count);
    let mut r_plus = Vec::with_capacity(grid.point_count);
    let mut r_minus = Vec::with_capacity(grid.point_count);
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != 7 {
            bail!("{}: row {} has {} fields, expected 7", path.display(), row + 2, rec.len());
        }
        let mut f = [0.0f64; 7];
        for (k, slot) in f.iter_mut().enumerate() {
            *slot = rec[k]
                .parse()
                .with_context(|| format!("bad numeric field {k} at row {}", row + 2))?;
        }
        if a.len() >= grid.point_count {
            bail!("{}: more rows than grid points ({})", path.display(), grid.point_count);
        }
        let expect = grid.node(a.len());
        if (f[0] - expect).abs() > COORD_TOL * (1.0 + expect.abs()) {
            bail!(
                "{}: z = {} at row {} does not match the configured grid node {expect}",
                path.display(),
                f[0],
                row + 2
            );
        }
        a.push(C64::new(f[1], f[2]));
        r_plus.push(C64::new(f[3], f[4]));
        r_minus.push(C64::new(f[5], f[6]));
    }
    if a.len() != grid.point_count {
        bail!("{}: {} rows, expected {}", path.display(), a.len(), grid.point_count);
    }
    Ok(ScatteringFile { a, r_plus, r_minus })
}

/// Serialize a report value as pretty JSON into `path`.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use dnls_ist::grids::make_grids;

    #[test]
    fn potential_csv_round_trips_bit_exactly() {
        let (xg, _) = make_grids(10.0, 16, 10.0, 16).unwrap();
        let vals: Vec<C64> = (0..16)
            .map(|j| C64::new((j as f64).sin() * 1e-3, (j as f64).cos() / 3.0))
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("u.csv");
        write_potential_csv(&p, &xg, &vals).unwrap();
        let back = read_potential_csv(&p, &xg).unwrap();
        assert_eq!(back, vals);
        // Wrong grid is refused.
        let (xg_bad, _) = make_grids(12.0, 16, 10.0, 16).unwrap();
        assert!(read_potential_csv(&p, &xg_bad).is_err());
    }

    #[test]
    fn scattering_csv_round_trips_bit_exactly() {
        let (_, zg) = make_grids(10.0, 16, 5.0, 16).unwrap();
        let a: Vec<C64> = (0..16).map(|j| C64::new(1.0, j as f64 * 1e-6)).collect();
        let rp: Vec<C64> = (0..16).map(|j| C64::new(0.1 / (1 + j) as f64, -0.2)).collect();
        let rm: Vec<C64> = zg
            .nodes()
            .iter()
            .zip(&rp)
            .map(|(&z, &r)| 4.0 * z * r)
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        write_scattering_csv(&p, &zg, &a, &rp, &rm).unwrap();
        let back = read_scattering_csv(&p, &zg).unwrap();
        assert_eq!(back.a, a);
        assert_eq!(back.r_plus, rp);
        assert_eq!(back.r_minus, rm);
    }
}
