//! DIMACS `.gr`, whitespace edge lists, and a checksummed binary cache.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{check_weight, Graph, NodeId};
use crate::error::{Error, Result};

pub const BINARY_MAGIC: [u8; 4] = *b"CLDG";
pub const BINARY_VERSION: u32 = 1;

pub fn load_dimacs_gr(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let g = read_dimacs_gr(BufReader::new(File::open(path)?))?;
    Ok(g.with_label(path.display().to_string()))
}

/// Parses the DIMACS shortest-path format: `c` comments, one `p sp n m`
/// line, and `a u v w` arcs with 1-based ids. Arcs are symmetrized and
/// duplicate pairs keep their minimum weight.
pub fn read_dimacs_gr(reader: impl BufRead) -> Result<Graph> {
    let mut header: Option<usize> = None;
    let mut arcs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let mut fields = line.split_whitespace();
        match fields.next() {
            None | Some("c") => continue,
            Some("p") => {
                if header.is_some() {
                    return Err(Error::parse(lineno, "duplicate problem line"));
                }
                if fields.next() != Some("sp") {
                    return Err(Error::parse(lineno, "expected `p sp <n> <m>`"));
                }
                let n = parse_field::<usize>(fields.next(), lineno, "node count")?;
                parse_field::<usize>(fields.next(), lineno, "arc count")?;
                header = Some(n);
            }
            Some("a") => {
                let n = header.ok_or_else(|| Error::parse(lineno, "arc before problem line"))?;
                let u = parse_field::<usize>(fields.next(), lineno, "tail id")?;
                let v = parse_field::<usize>(fields.next(), lineno, "head id")?;
                let w = parse_field::<f64>(fields.next(), lineno, "weight")?;
                for id in [u, v] {
                    if id == 0 || id > n {
                        return Err(Error::validation(format!(
                            "line {lineno}: node id {id} outside 1..={n}"
                        )));
                    }
                }
                check_weight(w).map_err(|e| Error::validation(format!("line {lineno}: {e}")))?;
                arcs.push((u - 1, v - 1, w));
            }
            Some(other) => {
                return Err(Error::parse(lineno, format!("unknown line type `{other}`")));
            }
        }
        if fields.next().is_some() {
            return Err(Error::parse(lineno, "trailing fields"));
        }
    }
    let n = header.ok_or_else(|| Error::parse(0, "missing problem line"))?;
    Graph::from_edges(n, arcs)
}

/// Writes both arcs of every edge; weights use the shortest round-trip
/// decimal form so a reload is bit-exact.
pub fn write_dimacs_gr(g: &Graph, mut out: impl Write) -> Result<()> {
    writeln!(out, "c undirected graph, both arcs listed")?;
    if let Some(label) = g.label() {
        writeln!(out, "c source {label}")?;
    }
    writeln!(out, "p sp {} {}", g.node_count(), 2 * g.edge_count())?;
    for u in 0..g.node_count() {
        for (v, w) in g.neighbors(u) {
            writeln!(out, "a {} {} {}", u + 1, v + 1, w)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn load_edge_list(path: impl AsRef<Path>, weighted: bool) -> Result<Graph> {
    let path = path.as_ref();
    let g = read_edge_list(BufReader::new(File::open(path)?), weighted)?;
    Ok(g.with_label(path.display().to_string()))
}

/// Parses `u v [w]` rows with 0-based ids; `#` and `%` start comments.
/// Unweighted rows get weight 1 as a placeholder. The node count is one
/// more than the largest id seen.
pub fn read_edge_list(reader: impl BufRead, weighted: bool) -> Result<Graph> {
    let mut edges: Vec<(NodeId, NodeId, f64)> = Vec::new();
    let mut max_id: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let u = parse_field::<usize>(fields.next(), lineno, "source id")?;
        let v = parse_field::<usize>(fields.next(), lineno, "target id")?;
        let w = if weighted {
            let w = parse_field::<f64>(fields.next(), lineno, "weight")?;
            check_weight(w).map_err(|e| Error::validation(format!("line {lineno}: {e}")))?;
            w
        } else {
            fields.next();
            1.0
        };
        if fields.next().is_some() {
            return Err(Error::parse(lineno, "trailing fields"));
        }
        if u >= u32::MAX as usize || v >= u32::MAX as usize {
            return Err(Error::validation(format!("line {lineno}: node id out of range")));
        }
        max_id = Some(max_id.unwrap_or(0).max(u).max(v));
        edges.push((u, v, w));
    }
    Graph::from_edges(max_id.map_or(0, |m| m + 1), edges)
}

/// Tab-separated `u v w`, one row per undirected edge.
pub fn write_edge_list(g: &Graph, mut out: impl Write) -> Result<()> {
    for (u, v, w) in g.edges() {
        writeln!(out, "{u}\t{v}\t{w}")?;
    }
    out.flush()?;
    Ok(())
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, line: usize, what: &str) -> Result<T> {
    let raw = field.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    raw.parse()
        .map_err(|_| Error::parse(line, format!("cannot parse {what} from `{raw}`")))
}

pub fn save_binary(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    write_binary(g, BufWriter::new(File::create(path)?))
}

pub fn load_binary(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let g = read_binary(BufReader::new(File::open(path)?))?;
    Ok(g.with_label(path.display().to_string()))
}

/// Layout (little endian): magic, `u32` version, `u64` n, `u64` m,
/// `n + 1` `u64` offsets, `2m` `u32` targets, `2m` `f64` weights, then the
/// SHA-256 of all preceding bytes.
pub fn write_binary(g: &Graph, mut out: impl Write) -> Result<()> {
    let mut buf = Vec::with_capacity(24 + 8 * g.offsets().len() + 12 * g.targets().len());
    buf.extend_from_slice(&BINARY_MAGIC);
    buf.extend_from_slice(&BINARY_VERSION.to_le_bytes());
    buf.extend_from_slice(&(g.node_count() as u64).to_le_bytes());
    buf.extend_from_slice(&(g.edge_count() as u64).to_le_bytes());
    for &o in g.offsets() {
        buf.extend_from_slice(&(o as u64).to_le_bytes());
    }
    for &t in g.targets() {
        buf.extend_from_slice(&t.to_le_bytes());
    }
    for &w in g.weights() {
        buf.extend_from_slice(&w.to_bits().to_le_bytes());
    }
    let digest = Sha256::digest(&buf);
    out.write_all(&buf)?;
    out.write_all(&digest)?;
    out.flush()?;
    Ok(())
}

pub fn read_binary(mut reader: impl Read) -> Result<Graph> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    if bytes.len() < 24 + 32 {
        return Err(Error::Corrupt("file too short".into()));
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    if body[..4] != BINARY_MAGIC {
        return Err(Error::Corrupt("bad magic".into()));
    }
    let version = u32::from_le_bytes(body[4..8].try_into().unwrap());
    if version != BINARY_VERSION {
        return Err(Error::Corrupt(format!("unsupported version {version}")));
    }
    if Sha256::digest(body).as_slice() != digest {
        return Err(Error::Corrupt("checksum mismatch".into()));
    }
    let n = u64::from_le_bytes(body[8..16].try_into().unwrap()) as usize;
    let m = u64::from_le_bytes(body[16..24].try_into().unwrap()) as usize;
    let expected = 24 + 8 * (n + 1) + 12 * 2 * m;
    if body.len() != expected {
        return Err(Error::Corrupt(format!(
            "length {} does not match header (expected {expected})",
            body.len()
        )));
    }
    let mut at = 24;
    let mut take = |len: usize| {
        let s = &body[at..at + len];
        at += len;
        s
    };
    let offsets = take(8 * (n + 1))
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()) as usize)
        .collect();
    let targets = take(4 * 2 * m)
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let weights = take(8 * 2 * m)
        .chunks_exact(8)
        .map(|c| f64::from_bits(u64::from_le_bytes(c.try_into().unwrap())))
        .collect();
    let g = Graph::from_csr(offsets, targets, weights).map_err(|e| Error::Corrupt(e.to_string()))?;
    if g.edge_count() != m {
        return Err(Error::Corrupt("edge count does not match header".into()));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dimacs(text: &str) -> Result<Graph> {
        read_dimacs_gr(text.as_bytes())
    }

    #[test]
    fn single_arc() {
        let g = dimacs("c tiny\np sp 2 1\na 1 2 5\n").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1, 5.0)]);
    }

    #[test]
    fn reverse_arc_collapses_to_min() {
        let g = dimacs("p sp 2 2\na 1 2 5\na 2 1 7\n").unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1, 5.0)]);
    }

    #[test]
    fn dimacs_errors() {
        match dimacs("p sp 2 1\na 1 x 5\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(dimacs("p sp 2 1\na 1 2 0\n"), Err(Error::Validation(_))));
        assert!(matches!(dimacs("p sp 2 1\na 1 3 1\n"), Err(Error::Validation(_))));
        assert!(matches!(dimacs("p sp 2 1\na 0 1 1\n"), Err(Error::Validation(_))));
        assert!(matches!(dimacs("a 1 2 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(dimacs("p sp 2 1\nq 1 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(dimacs("c nothing\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn edge_list_rows() {
        let g = read_edge_list("0 1 2.5\n1 2 1.0\n".as_bytes(), true).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));

        let g = read_edge_list("0 0 1.0\n".as_bytes(), true).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 0));

        let g = read_edge_list("0 1 3\n1 0 3\n".as_bytes(), true).unwrap();
        assert_eq!(g.edge_count(), 1);

        let g = read_edge_list("# snap\n0 4\n".as_bytes(), false).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (5, 1));
        assert_eq!(g.edge_weight(0, 4), Some(1.0));

        assert!(matches!(read_edge_list("0 1\n".as_bytes(), true), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_edge_list("0 1 -2\n".as_bytes(), true), Err(Error::Validation(_))));
    }

    #[test]
    fn binary_detects_corruption() {
        let g = Graph::from_edges(3, [(0, 1, 0.25), (1, 2, 1.5)]).unwrap();
        let mut bytes = Vec::new();
        write_binary(&g, &mut bytes).unwrap();
        assert_eq!(read_binary(bytes.as_slice()).unwrap(), g);

        let mut flipped = bytes.clone();
        flipped[30] ^= 1;
        assert!(matches!(read_binary(flipped.as_slice()), Err(Error::Corrupt(m)) if m.contains("checksum")));

        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert!(matches!(read_binary(magic.as_slice()), Err(Error::Corrupt(_))));

        assert!(matches!(read_binary(&bytes[..bytes.len() - 1]), Err(Error::Corrupt(_))));
    }
}
