//! Diagram files: one `x,y,z` vertex per line, a blank line between
//! components, `#` starts a comment.

use std::io::{BufRead, Write};

use super::curve::{MultiCurve, SphericalCurve};
use super::geometry::Vec3;
use crate::error::{Error, Result};

pub fn read_diagram<R: BufRead>(reader: R) -> Result<MultiCurve> {
    let mut components = Vec::new();
    let mut current: Vec<Vec3> = Vec::new();
    let mut flush = |current: &mut Vec<Vec3>, line: usize| -> Result<()> {
        if !current.is_empty() {
            let c = SphericalCurve::new(std::mem::take(current))
                .map_err(|e| Error::Parse(format!("component ending at line {line}: {e}")))?;
            components.push(c);
        }
        Ok(())
    };
    let mut line_no = 0;
    for line in reader.lines() {
        line_no += 1;
        let line = line?;
        let text = line.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            if line.trim().is_empty() {
                flush(&mut current, line_no)?;
            }
            continue;
        }
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("line {line_no}: expected x,y,z, got {text:?}")));
        }
        let mut xyz = [0.0; 3];
        for (slot, f) in xyz.iter_mut().zip(&fields) {
            *slot = f.parse::<f64>().map_err(|e| Error::Parse(format!("line {line_no}: {e}")))?;
        }
        current.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
    }
    flush(&mut current, line_no)?;
    if components.is_empty() {
        return Err(Error::Parse("diagram file has no vertices".into()));
    }
    Ok(MultiCurve { components })
}

pub fn write_diagram<W: Write>(mut out: W, m: &MultiCurve) -> Result<()> {
    for (i, c) in m.components.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        for v in c.vertices() {
            writeln!(out, "{:.17e},{:.17e},{:.17e}", v.x, v.y, v.z)?;
        }
    }
    Ok(())
}
