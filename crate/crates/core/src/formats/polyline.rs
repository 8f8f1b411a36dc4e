//! Polyline snapshots: one `i,x,y,z` line per vertex, loops separated by
//! blank lines. Lines starting with `#` are comments.

use std::fmt::Write as _;

use crate::ambient::{AmbientSpace, Vec3};
use crate::error::{Error, Result};
use crate::loops::DiscreteLoop;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Splits the text into vertex lists. Indices must count up from 0 within
/// each loop; coordinates must be finite.
pub fn parse_polyline(text: &str) -> Result<Vec<Vec<Vec3>>> {
    let mut loops = Vec::new();
    let mut current: Vec<Vec3> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if !current.is_empty() {
                loops.push(std::mem::take(&mut current));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(parse_err(line_no, format!("expected 4 comma-separated fields, found {}", fields.len())));
        }
        let index: usize = fields[0].parse().map_err(|_| parse_err(line_no, format!("bad vertex index `{}`", fields[0])))?;
        if index != current.len() {
            return Err(parse_err(line_no, format!("vertex index {index} out of sequence, expected {}", current.len())));
        }
        let mut p = Vec3::zeros();
        for (c, f) in fields[1..].iter().enumerate() {
            let v: f64 = f.parse().map_err(|_| parse_err(line_no, format!("bad coordinate `{f}`")))?;
            if !v.is_finite() {
                return Err(parse_err(line_no, "non-finite coordinate"));
            }
            p[c] = v;
        }
        current.push(p);
    }
    if !current.is_empty() {
        loops.push(current);
    }
    Ok(loops)
}

/// Parses and validates every loop in `space`.
pub fn read_loops(text: &str, space: AmbientSpace) -> Result<Vec<DiscreteLoop>> {
    parse_polyline(text)?.into_iter().map(|v| DiscreteLoop::new(space, v)).collect()
}

/// Writes loops with shortest round-trip float formatting.
pub fn write_polyline<'a>(loops: impl IntoIterator<Item = &'a DiscreteLoop>) -> String {
    let mut out = String::new();
    for (k, l) in loops.into_iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        for (i, v) in l.vertices().iter().enumerate() {
            let _ = writeln!(out, "{i},{:?},{:?},{:?}", v.x, v.y, v.z);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loops::circle;

    #[test]
    fn round_trip_is_exact() {
        let a = circle(AmbientSpace::Euclidean3, Vec3::new(0.1, -2.0, 1e-7), 1.3, 17).unwrap();
        let b = a.rotated(3).reversed();
        let text = write_polyline([&a, &b]);
        let back = read_loops(&text, AmbientSpace::Euclidean3).unwrap();
        assert_eq!(back, vec![a, b]);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(matches!(parse_polyline("0,1,2"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_polyline("0,0,0,0\n2,0,0,1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_polyline("0,nan,0,0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_polyline("0,x,0,0"), Err(Error::Parse { .. })));
        assert_eq!(parse_polyline("# header\n\n0,0,0,0\n1,1,0,0\n\n\n0,2,0,0\n").unwrap().len(), 2);
        assert!(parse_polyline("").unwrap().is_empty());
    }
}
