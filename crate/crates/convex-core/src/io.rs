//! ASCII OFF and OBJ import/export for polytopes.
//!
//! Export triangulates every facet and prints coordinates at full precision.
//! Import reads the vertex list and rebuilds the hull, so facet data in the
//! file only needs to be consistent with a convex body.

use std::fmt::Write as _;
use std::path::Path;

use crate::fmt::g17;
use crate::geom::{v3, Vec3};
use crate::{hull3d, Polytope, PolytopeError};

pub fn to_off(c: &Polytope) -> String {
    mesh_to_off(c.vertices(), &c.triangles())
}

/// OFF text for an arbitrary triangle mesh.
pub fn mesh_to_off(vertices: &[Vec3], tris: &[[usize; 3]]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "OFF");
    let _ = writeln!(s, "{} {} 0", vertices.len(), tris.len());
    for v in vertices {
        let _ = writeln!(s, "{} {} {}", g17(v.x), g17(v.y), g17(v.z));
    }
    for t in tris {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    s
}

pub fn to_obj(c: &Polytope) -> String {
    let mut s = String::new();
    for v in c.vertices() {
        let _ = writeln!(s, "v {} {} {}", g17(v.x), g17(v.y), g17(v.z));
    }
    for t in c.triangles() {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

fn parse_f(tok: Option<&str>, line: usize) -> Result<f64, PolytopeError> {
    let tok = tok.ok_or_else(|| PolytopeError::Parse(format!("line {line}: missing number")))?;
    tok.parse::<f64>()
        .map_err(|e| PolytopeError::Parse(format!("line {line}: {tok:?}: {e}")))
}

/// Parses the vertex block of an OFF file.
pub fn off_vertices(text: &str) -> Result<Vec<Vec3>, PolytopeError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, head) = lines.next().ok_or_else(|| PolytopeError::Parse("empty file".into()))?;
    let counts_line = if head == "OFF" {
        lines.next().ok_or_else(|| PolytopeError::Parse("missing counts".into()))?
    } else if let Some(rest) = head.strip_prefix("OFF") {
        (ln, rest.trim())
    } else {
        return Err(PolytopeError::Parse(format!("line {ln}: expected OFF header")));
    };
    let nv: usize = counts_line
        .1
        .split_whitespace()
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| PolytopeError::Parse(format!("line {}: bad counts", counts_line.0)))?;
    let mut out = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| PolytopeError::Parse("truncated vertex list".into()))?;
        let mut it = l.split_whitespace();
        out.push(v3(parse_f(it.next(), ln)?, parse_f(it.next(), ln)?, parse_f(it.next(), ln)?));
    }
    Ok(out)
}

pub fn obj_vertices(text: &str) -> Result<Vec<Vec3>, PolytopeError> {
    let mut out = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let mut it = l.split_whitespace();
        if it.next() == Some("v") {
            out.push(v3(parse_f(it.next(), i + 1)?, parse_f(it.next(), i + 1)?, parse_f(it.next(), i + 1)?));
        }
    }
    Ok(out)
}

pub fn from_off(text: &str) -> Result<Polytope, PolytopeError> {
    hull3d(&off_vertices(text)?)
}

pub fn from_obj(text: &str) -> Result<Polytope, PolytopeError> {
    hull3d(&obj_vertices(text)?)
}

/// Loads a body from an `.off` or `.obj` file, chosen by extension.
pub fn read_body(path: &Path) -> Result<Polytope, PolytopeError> {
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()) {
        Some(e) if e == "obj" => from_obj(&text),
        _ => from_off(&text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn off_round_trip_is_exact() {
        let c = shapes::fibonacci_sphere(50).unwrap();
        let back = from_off(&to_off(&c)).unwrap();
        assert_eq!(back.vertices(), c.vertices());
        let back = from_obj(&to_obj(&c)).unwrap();
        assert_eq!(back.vertices(), c.vertices());
    }

    #[test]
    fn off_header_variants() {
        let text = "OFF 4 0 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n";
        assert_eq!(from_off(text).unwrap().vertices().len(), 4);
        assert!(from_off("PLY\n").is_err());
        assert!(from_off("OFF\n4 0 0\n0 0 0\n").is_err());
    }
}
