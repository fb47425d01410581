//! CSV exchange of sampled profiles: `r|lambda|s,value_re,value_im`.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::abel::LineProfile;
use crate::analysis::SpectralProfile;
use crate::error::{Error, Result};
use crate::radial::RadialProfile;

fn write_columns<W: Write>(out: W, axis: &str, xs: &[f64], values: &[Complex64]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record([axis, "value_re", "value_im"])?;
    for (x, v) in xs.iter().zip(values) {
        writer.write_record([x.to_string(), v.re.to_string(), v.im.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_radial<W: Write>(out: W, u: &RadialProfile) -> Result<()> {
    write_columns(out, "r", u.nodes(), u.values())
}

pub fn write_spectral<W: Write>(out: W, f: &SpectralProfile) -> Result<()> {
    write_columns(out, "lambda", f.lambdas(), f.values())
}

pub fn write_line<W: Write>(out: W, w: &LineProfile) -> Result<()> {
    write_columns(out, "s", &w.nodes(), w.values())
}

pub fn write_radial_csv(path: &Path, u: &RadialProfile) -> Result<()> {
    write_radial(File::create(path)?, u)
}

pub fn write_spectral_csv(path: &Path, f: &SpectralProfile) -> Result<()> {
    write_spectral(File::create(path)?, f)
}

pub fn write_line_csv(path: &Path, w: &LineProfile) -> Result<()> {
    write_line(File::create(path)?, w)
}

/// Reads `(axis, value)` rows, checking the header's axis name.
pub fn read_columns(path: &Path, axis: &str) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let expected = [axis, "value_re", "value_im"];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h.trim() != e) {
        return Err(Error::Config(format!(
            "{}: expected header {axis},value_re,value_im",
            path.display()
        )));
    }
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record?;
        let parse = |i: usize| -> Result<f64> {
            record[i]
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{}: bad number '{}'", path.display(), &record[i])))
        };
        xs.push(parse(0)?);
        values.push(Complex64::new(parse(1)?, parse(2)?));
    }
    Ok((xs, values))
}

/// Reads a radial profile whose `r` column must match the nodes of `like`.
pub fn read_radial_csv(path: &Path, like: &RadialProfile) -> Result<RadialProfile> {
    let (rs, values) = read_columns(path, "r")?;
    let nodes = like.nodes();
    let matches = rs.len() == nodes.len()
        && rs.iter().zip(nodes).all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs().max(1.0));
    if !matches {
        return Err(Error::Config(format!(
            "{}: r column does not match the {}-node radial grid on [0, {}]",
            path.display(),
            nodes.len(),
            like.r_max()
        )));
    }
    RadialProfile::new(like.grid().clone(), values)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::radial::RadialGrid;

    #[test]
    fn radial_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        let grid = Arc::new(RadialGrid::new(3.0, 17).unwrap());
        let u = RadialProfile::from_fn(grid, |r| Complex64::new((-r * r).exp(), 0.1 * r.cos()));
        write_radial_csv(&path, &u).unwrap();
        let back = read_radial_csv(&path, &u).unwrap();
        assert_eq!(back.values(), u.values());
        let other = RadialProfile::zeros(Arc::new(RadialGrid::new(3.0, 33).unwrap()));
        assert!(matches!(read_radial_csv(&path, &other), Err(Error::Config(_))));
    }
}
