//! ASCII mesh format.
//!
//! ```text
//! pneusoft-mesh v1
//! nodes <N>
//! <id> <x> <y> <z>          # N lines, ids 0..N in order
//! tet10 <M>
//! <n0> ... <n9>             # M lines
//! nodeset <name> <K>
//! <id>                      # K lines
//! faceset <name> <K>
//! <n0> ... <n5>             # K lines
//! ```
//!
//! `#` starts a comment, blank lines are ignored, line endings are LF.
//! Coordinates are written with 17 significant digits so that a save/load
//! round trip is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Mesh, MeshError, Point};

pub const HEADER: &str = "pneusoft-mesh v1";

/// Serializes a mesh to its ASCII form.
pub fn write_mesh(mesh: &Mesh) -> String {
    let mut s = String::with_capacity(64 * (mesh.nodes.len() + mesh.elements.len()));
    s.push_str(HEADER);
    s.push('\n');
    let _ = writeln!(s, "nodes {}", mesh.nodes.len());
    for (i, p) in mesh.nodes.iter().enumerate() {
        let _ = writeln!(s, "{} {:.16e} {:.16e} {:.16e}", i, p.x, p.y, p.z);
    }
    let _ = writeln!(s, "tet10 {}", mesh.elements.len());
    for e in &mesh.elements {
        let line: Vec<String> = e.iter().map(|n| n.to_string()).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    for (name, ids) in &mesh.node_sets {
        let _ = writeln!(s, "nodeset {} {}", name, ids.len());
        for id in ids {
            let _ = writeln!(s, "{id}");
        }
    }
    for (name, faces) in &mesh.face_sets {
        let _ = writeln!(s, "faceset {} {}", name, faces.len());
        for f in faces {
            let line: Vec<String> = f.iter().map(|n| n.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
    }
    s
}

pub fn save_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<(), MeshError> {
    fs::write(path, write_mesh(mesh))?;
    Ok(())
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<Mesh, MeshError> {
    let text = fs::read_to_string(path)?;
    parse_mesh(&text)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// Next non-empty line with comments stripped, plus its 1-based number.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }
}

fn perr(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_count(line: usize, tok: Option<&str>) -> Result<usize, MeshError> {
    tok.ok_or_else(|| perr(line, "missing count"))?
        .parse()
        .map_err(|_| perr(line, "count is not a non-negative integer"))
}

fn parse_ids<const N: usize>(line: usize, text: &str, node_count: usize) -> Result<[usize; N], MeshError> {
    let mut out = [0usize; N];
    let mut toks = text.split_whitespace();
    for slot in out.iter_mut() {
        let t = toks
            .next()
            .ok_or_else(|| perr(line, format!("expected {N} node ids")))?;
        let id: usize = t
            .parse()
            .map_err(|_| perr(line, format!("'{t}' is not a node id")))?;
        if id >= node_count {
            return Err(perr(line, format!("node id {id} out of range (mesh has {node_count} nodes)")));
        }
        *slot = id;
    }
    if toks.next().is_some() {
        return Err(perr(line, format!("expected exactly {N} node ids")));
    }
    Ok(out)
}

/// Parses the ASCII mesh format.
pub fn parse_mesh(text: &str) -> Result<Mesh, MeshError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (ln, header) = lines.next_content().ok_or_else(|| perr(1, "empty file"))?;
    if header != HEADER {
        return Err(perr(ln, format!("expected header '{HEADER}'")));
    }
    let mut mesh = Mesh::default();
    let mut have_nodes = false;
    while let Some((ln, line)) = lines.next_content() {
        let mut toks = line.split_whitespace();
        let keyword = toks.next().unwrap_or("");
        match keyword {
            "nodes" => {
                if have_nodes {
                    return Err(perr(ln, "duplicate nodes block"));
                }
                let n = parse_count(ln, toks.next())?;
                if toks.next().is_some() {
                    return Err(perr(ln, "malformed nodes header"));
                }
                mesh.nodes.reserve(n);
                for expected in 0..n {
                    let (ln, l) = lines
                        .next_content()
                        .ok_or_else(|| perr(ln, "unexpected end of file in nodes block"))?;
                    let v: Vec<&str> = l.split_whitespace().collect();
                    if v.len() != 4 {
                        return Err(perr(ln, "node line must be 'id x y z'"));
                    }
                    let id: usize = v[0].parse().map_err(|_| perr(ln, "bad node id"))?;
                    if id != expected {
                        return Err(perr(ln, format!("node id {id} out of order (expected {expected})")));
                    }
                    let mut c = [0.0; 3];
                    for k in 0..3 {
                        let x: f64 = v[k + 1]
                            .parse()
                            .map_err(|_| perr(ln, format!("bad coordinate '{}'", v[k + 1])))?;
                        if !x.is_finite() {
                            return Err(perr(ln, "non-finite coordinate"));
                        }
                        c[k] = x;
                    }
                    mesh.nodes.push(Point::new(c[0], c[1], c[2]));
                }
                have_nodes = true;
            }
            "tet10" => {
                if !have_nodes {
                    return Err(perr(ln, "tet10 block before nodes block"));
                }
                let m = parse_count(ln, toks.next())?;
                if toks.next().is_some() {
                    return Err(perr(ln, "malformed tet10 header"));
                }
                for _ in 0..m {
                    let (ln, l) = lines
                        .next_content()
                        .ok_or_else(|| perr(ln, "unexpected end of file in tet10 block"))?;
                    mesh.elements.push(parse_ids::<10>(ln, l, mesh.nodes.len())?);
                }
            }
            "nodeset" | "faceset" => {
                if !have_nodes {
                    return Err(perr(ln, format!("{keyword} block before nodes block")));
                }
                let name = toks
                    .next()
                    .ok_or_else(|| perr(ln, format!("malformed {keyword} header")))?
                    .to_string();
                let k = parse_count(ln, toks.next())?;
                if toks.next().is_some() {
                    return Err(perr(ln, format!("malformed {keyword} header")));
                }
                if keyword == "nodeset" {
                    let mut ids = Vec::with_capacity(k);
                    for _ in 0..k {
                        let (ln, l) = lines
                            .next_content()
                            .ok_or_else(|| perr(ln, "unexpected end of file in nodeset block"))?;
                        ids.push(parse_ids::<1>(ln, l, mesh.nodes.len())?[0]);
                    }
                    if mesh.node_sets.insert(name.clone(), ids).is_some() {
                        return Err(perr(ln, format!("duplicate nodeset '{name}'")));
                    }
                } else {
                    let mut faces = Vec::with_capacity(k);
                    for _ in 0..k {
                        let (ln, l) = lines
                            .next_content()
                            .ok_or_else(|| perr(ln, "unexpected end of file in faceset block"))?;
                        faces.push(parse_ids::<6>(ln, l, mesh.nodes.len())?);
                    }
                    if mesh.face_sets.insert(name.clone(), faces).is_some() {
                        return Err(perr(ln, format!("duplicate faceset '{name}'")));
                    }
                }
            }
            other => return Err(perr(ln, format!("unknown block '{other}'"))),
        }
    }
    if !have_nodes {
        return Err(perr(1, "missing nodes block"));
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::template::block_mesh;

    const SMALL: &str = "pneusoft-mesh v1\n# two nodes\nnodes 2\n0 0 0 0\n1 1.5 0 0\ntet10 0\nnodeset fixed 1\n0\n";

    #[test]
    fn empty_element_block_is_valid() {
        let m = parse_mesh(SMALL).unwrap();
        assert_eq!(m.node_count(), 2);
        assert_eq!(m.element_count(), 0);
        assert_eq!(m.node_set("fixed").unwrap(), &[0]);
    }

    #[test]
    fn element_index_out_of_range_reports_line() {
        let text = "pneusoft-mesh v1\nnodes 2\n0 0 0 0\n1 1 0 0\ntet10 1\n0 1 0 1 0 1 0 1 0 2\n";
        match parse_mesh(text) {
            Err(MeshError::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_header_and_coordinates() {
        assert!(matches!(parse_mesh("mesh v2\n"), Err(MeshError::Parse { line: 1, .. })));
        let t = "pneusoft-mesh v1\nnodes two\n";
        assert!(matches!(parse_mesh(t), Err(MeshError::Parse { line: 2, .. })));
        let t = "pneusoft-mesh v1\nnodes 1\n0 0 NaN 0\n";
        assert!(matches!(parse_mesh(t), Err(MeshError::Parse { line: 3, .. })));
        let t = "pneusoft-mesh v1\nnodes 1\n0 0 inf 0\n";
        assert!(matches!(parse_mesh(t), Err(MeshError::Parse { line: 3, .. })));
    }

    #[test]
    fn trailing_comment_is_ignored() {
        let t = "pneusoft-mesh v1\nnodes 1 # count\n0 0.5 0 0\n";
        assert_eq!(parse_mesh(t).unwrap().nodes[0].x, 0.5);
    }

    #[test]
    fn round_trip_is_exact() {
        let mut m = block_mesh(1.0, 0.3, 0.7, 0.2).unwrap();
        m.nodes[3].x = 0.1 + 0.2; // not representable as a short decimal
        let back = parse_mesh(&write_mesh(&m)).unwrap();
        assert_eq!(back, m);
    }
}
