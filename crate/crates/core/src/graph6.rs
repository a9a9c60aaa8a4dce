//! graph6 encoding and decoding (the standard >=6-bit format), plus the
//! one-root-per-line convention for rooted graphs.
//!
//! The encoding is bit-exact: `N(n)` followed by the upper-triangle bit
//! vector read column by column, packed into 6-bit groups offset by 63.

use crate::graph::Graph;
use crate::{Error, Result};

const MAX_N: usize = 258_047;

/// Encodes a graph as a graph6 line (no trailing newline).
pub fn encode(g: &Graph) -> String {
    let n = g.v();
    assert!(n <= MAX_N, "graph6 size cap");
    let mut bytes = Vec::new();
    if n <= 62 {
        bytes.push(63 + n as u8);
    } else {
        bytes.push(126);
        bytes.push(63 + ((n >> 12) & 0x3f) as u8);
        bytes.push(63 + ((n >> 6) & 0x3f) as u8);
        bytes.push(63 + (n & 0x3f) as u8);
    }
    let mut acc: u8 = 0;
    let mut nbits = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            nbits += 1;
            if nbits == 6 {
                bytes.push(63 + acc);
                acc = 0;
                nbits = 0;
            }
        }
    }
    if nbits > 0 {
        bytes.push(63 + (acc << (6 - nbits)));
    }
    String::from_utf8(bytes).unwrap()
}

/// Decodes a graph6 line; tolerates the optional `>>graph6<<` header.
pub fn decode(line: &str) -> Result<Graph> {
    let line = line.trim_end();
    let line = line.strip_prefix(">>graph6<<").unwrap_or(line);
    let bytes = line.as_bytes();
    if bytes.is_empty() {
        return Err(Error::Format("empty graph6 line".into()));
    }
    let pos;
    let n = if bytes[0] == 126 {
        if bytes.len() >= 2 && bytes[1] == 126 {
            return Err(Error::Format(
                "graph6 graphs beyond 258047 vertices unsupported".into(),
            ));
        }
        if bytes.len() < 4 {
            return Err(Error::Format("truncated graph6 size".into()));
        }
        let mut n = 0usize;
        for &b in &bytes[1..4] {
            if !(63..127).contains(&b) {
                return Err(Error::Format("invalid graph6 byte".into()));
            }
            n = (n << 6) | (b - 63) as usize;
        }
        pos = 4;
        n
    } else {
        if !(63..126).contains(&bytes[0]) {
            return Err(Error::Format("invalid graph6 size byte".into()));
        }
        pos = 1;
        (bytes[0] - 63) as usize
    };
    let nbits = n * (n - 1) / 2;
    let need = nbits.div_ceil(6);
    if bytes.len() - pos != need {
        return Err(Error::Format(format!(
            "graph6 body length {} != expected {}",
            bytes.len() - pos,
            need
        )));
    }
    let mut g = Graph::empty(n);
    let mut bit = 0usize;
    for &b in &bytes[pos..] {
        if !(63..127).contains(&b) {
            return Err(Error::Format("invalid graph6 byte".into()));
        }
        let v = b - 63;
        for shift in (0..6).rev() {
            if bit >= nbits {
                break;
            }
            if v >> shift & 1 == 1 {
                let (i, j) = unrank_column(bit);
                g.add_edge(i, j);
            }
            bit += 1;
        }
    }
    Ok(g)
}

/// Inverse of the column-major upper-triangle ordering: bit index -> (i, j).
fn unrank_column(mut idx: usize) -> (usize, usize) {
    let mut j = 1;
    while idx >= j {
        idx -= j;
        j += 1;
    }
    (idx, j)
}

/// Serializes a rooted graph: graph6 line plus a `root=<index>` line.
pub fn encode_rooted(g: &Graph, root: usize) -> String {
    format!("{}\nroot={}", encode(g), root)
}

/// Parses the two-line rooted form.
pub fn decode_rooted(text: &str) -> Result<(Graph, usize)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let g = decode(
        lines
            .next()
            .ok_or_else(|| Error::Format("missing graph6 line".into()))?,
    )?;
    let root_line = lines
        .next()
        .ok_or_else(|| Error::Format("missing root line".into()))?
        .trim();
    let root: usize = root_line
        .strip_prefix("root=")
        .ok_or_else(|| Error::Format("expected `root=<index>`".into()))?
        .parse()
        .map_err(|_| Error::Format("bad root index".into()))?;
    if root >= g.v() {
        return Err(Error::VertexOutOfRange {
            vertex: root,
            n: g.v(),
        });
    }
    Ok((g, root))
}

/// Serializes a nested pair: graph6 line plus `h=<i1> <i2> ...` (possibly
/// `h=` for the empty subgraph).
pub fn encode_pair(g: &Graph, h_vertices: &[usize]) -> String {
    let hs: Vec<String> = h_vertices.iter().map(|v| v.to_string()).collect();
    format!("{}\nh={}", encode(g), hs.join(" "))
}

pub fn decode_pair(text: &str) -> Result<(Graph, Vec<usize>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let g = decode(
        lines
            .next()
            .ok_or_else(|| Error::Format("missing graph6 line".into()))?,
    )?;
    let h_line = lines
        .next()
        .ok_or_else(|| Error::Format("missing h line".into()))?
        .trim();
    let body = h_line
        .strip_prefix("h=")
        .ok_or_else(|| Error::Format("expected `h=<indices>`".into()))?;
    let mut h = Vec::new();
    for tok in body.split_whitespace() {
        let v: usize = tok
            .parse()
            .map_err(|_| Error::Format("bad h index".into()))?;
        h.push(v);
    }
    Ok((g, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::Rng;

    #[test]
    fn known_vectors() {
        // triangle: n=3 -> 'B'; bits 111 padded to 111000 -> 56+63 = 'w'
        assert_eq!(encode(&Graph::complete(3)), "Bw");
        // single vertex and empty-on-two
        assert_eq!(encode(&Graph::empty(1)), "@");
        assert_eq!(encode(&Graph::empty(2)), "A?");
        // edge on two vertices: bit 1 -> 100000 -> 32+63 = '_'
        assert_eq!(encode(&Graph::complete(2)), "A_");
        // K4: 6 bits all set -> '~'-1 = 63+63 = 126? no: 111111 = 63, 63+63=126
        // is the escape byte, legal only in the body
        assert_eq!(encode(&Graph::complete(4)), "C~");
        assert_eq!(decode("C~").unwrap(), Graph::complete(4));
        // the 5-cycle, as quoted in the format's reference material
        assert_eq!(encode(&Graph::cycle(5)), "Dhc");
    }

    #[test]
    fn header_tolerated() {
        assert_eq!(decode(">>graph6<<Bw").unwrap(), Graph::complete(3));
    }

    #[test]
    fn round_trip_random() {
        let mut rng = Rng::seeded(7);
        for _ in 0..300 {
            let n = (rng.next_below(12) + 1) as usize;
            let mut g = Graph::empty(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.next_below(2) == 0 {
                        g.add_edge(u, v);
                    }
                }
            }
            let s = encode(&g);
            assert_eq!(decode(&s).unwrap(), g, "round trip failed for {s}");
        }
    }

    #[test]
    fn large_n_round_trip() {
        let mut g = Graph::empty(100);
        g.add_edge(0, 99);
        g.add_edge(50, 51);
        let s = encode(&g);
        assert!(s.starts_with('~'));
        assert_eq!(decode(&s).unwrap(), g);
    }

    #[test]
    fn rooted_and_pair_round_trip() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let (g2, r) = decode_rooted(&encode_rooted(&g, 2)).unwrap();
        assert_eq!((g2, r), (g.clone(), 2));
        let (g3, h) = decode_pair(&encode_pair(&g, &[0, 3])).unwrap();
        assert_eq!((g3, h), (g, vec![0, 3]));
        assert!(decode_rooted("Bw\nroot=9").is_err());
    }
}
