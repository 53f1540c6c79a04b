use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::profile::{ProfileSurface, Shape};
use crate::spline::{end_slope, CubicSpline};

const MIN_ROWS: usize = 16;

pub(super) fn build(rows: &[(f64, f64, f64)]) -> Result<ProfileSurface> {
    if rows.len() < MIN_ROWS {
        return Err(Error::TooFewSamples { min: MIN_ROWS, got: rows.len() });
    }
    if rows.iter().any(|r| !(r.0.is_finite() && r.1.is_finite() && r.2.is_finite())) {
        return Err(Error::Format("non-finite value in samples".into()));
    }
    if let Some(w) = rows.windows(2).find(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::Format(format!("s is not strictly increasing at s = {}", w[1].0)));
    }
    let f_scale = rows.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
    let n = rows.len();
    for end in [rows[0], rows[n - 1]] {
        if end.1.abs() > 1e-9 * f_scale.max(1.0) {
            return Err(Error::Format(format!("f must vanish at the poles, got f({}) = {}", end.0, end.1)));
        }
    }
    if let Some(r) = rows[1..n - 1].iter().find(|r| !(r.1 > 0.0)) {
        return Err(Error::Format(format!("interior f must be positive, got f({}) = {}", r.0, r.1)));
    }
    let s: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let f: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let g: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let spline = |y: &[f64]| -> Result<CubicSpline> {
        let start = end_slope(&s[..4], &y[..4]);
        let rs: Vec<f64> = s[n - 4..].iter().rev().copied().collect();
        let ry: Vec<f64> = y[n - 4..].iter().rev().copied().collect();
        let finish = end_slope(&rs, &ry);
        CubicSpline::clamped(&s, y, start, finish)
    };
    let shape = Shape::Sampled { f: spline(&f)?, g: spline(&g)? };
    Ok(ProfileSurface { s_min: s[0], s_max: s[n - 1], name: "samples".into(), params: vec![n as f64], shape })
}

/// Parses a profile sample table with header `s,f,g`.
pub fn read_profile_samples<R: Read>(reader: R) -> Result<Vec<(f64, f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Format(e.to_string()))?.clone();
    let names: Vec<&str> = headers.iter().collect();
    if names != ["s", "f", "g"] {
        return Err(Error::Format(format!("expected header s,f,g, found {}", names.join(","))));
    }
    let mut rows = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Format(e.to_string()))?;
        if record.len() != 3 {
            return Err(Error::Format(format!("row {} has {} fields", line + 2, record.len())));
        }
        let parse = |i: usize| -> Result<f64> {
            record[i].parse::<f64>().map_err(|e| Error::Format(format!("row {}: {e}", line + 2)))
        };
        rows.push((parse(0)?, parse(1)?, parse(2)?));
    }
    Ok(rows)
}

/// Writes samples in the format read by [`read_profile_samples`].
pub fn write_profile_samples<W: Write>(mut out: W, rows: &[(f64, f64, f64)]) -> Result<()> {
    writeln!(out, "s,f,g")?;
    for (s, f, g) in rows {
        writeln!(out, "{s:e},{f:e},{g:e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn ellipsoid_rows(b: f64, n: usize) -> Vec<(f64, f64, f64)> {
        (0..n)
            .map(|i| {
                let v = -FRAC_PI_2 + std::f64::consts::PI * i as f64 / (n - 1) as f64;
                let f = if i == 0 || i == n - 1 { 0.0 } else { v.cos() };
                (v, f, b * v.sin())
            })
            .collect()
    }

    #[test]
    fn too_few_rows_is_an_error() {
        assert!(matches!(build(&ellipsoid_rows(1.0, 10)), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn dense_sphere_samples_are_nearly_round() {
        let s = build(&ellipsoid_rows(1.0, 1001)).unwrap();
        let r = s.curvature_report(512).unwrap();
        assert!((r.delta - 1.0).abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn dense_ellipsoid_samples_keep_pinching() {
        let s = build(&ellipsoid_rows(2.0, 1001)).unwrap();
        let r = s.curvature_report(512).unwrap();
        assert!((r.delta - 1.0 / 16.0).abs() < 1e-3, "{r:?}");
    }

    #[test]
    fn negative_interior_radius_rejected() {
        let mut rows = ellipsoid_rows(1.0, 40);
        rows[20].1 = -0.1;
        assert!(matches!(build(&rows), Err(Error::Format(_))));
    }

    #[test]
    fn csv_round_trip() {
        let rows = ellipsoid_rows(1.5, 32);
        let mut buf = Vec::new();
        write_profile_samples(&mut buf, &rows).unwrap();
        let back = read_profile_samples(buf.as_slice()).unwrap();
        assert_eq!(rows, back);
        assert!(read_profile_samples("x,y\n1,2\n".as_bytes()).is_err());
    }
}
