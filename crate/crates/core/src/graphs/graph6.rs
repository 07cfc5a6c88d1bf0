use super::{GraphError, SimpleGraph};

const HEADER: &str = ">>graph6<<";

fn err(msg: impl Into<String>) -> GraphError {
    GraphError::Graph6(msg.into())
}

fn encode_n(n: usize, out: &mut String) {
    let push6 = |out: &mut String, x: usize| out.push(char::from((x & 63) as u8 + 63));
    if n <= 62 {
        push6(out, n);
    } else if n <= 258_047 {
        out.push('~');
        for shift in [12, 6, 0] {
            push6(out, n >> shift);
        }
    } else {
        out.push_str("~~");
        for shift in [30, 24, 18, 12, 6, 0] {
            push6(out, n >> shift);
        }
    }
}

pub fn emit_graph6(g: &SimpleGraph) -> String {
    let n = g.n();
    let mut out = String::new();
    encode_n(n, &mut out);
    let mut acc = 0u8;
    let mut nbits = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | u8::from(g.has_edge(i, j));
            nbits += 1;
            if nbits == 6 {
                out.push(char::from(acc + 63));
                acc = 0;
                nbits = 0;
            }
        }
    }
    if nbits > 0 {
        out.push(char::from((acc << (6 - nbits)) + 63));
    }
    out
}

fn sextet(b: u8) -> Result<usize, GraphError> {
    if (63..=126).contains(&b) {
        Ok(usize::from(b - 63))
    } else {
        Err(err(format!(
            "byte {b:#04x} outside the printable range 63..=126"
        )))
    }
}

/// Parses one graph6 record. A leading `>>graph6<<` header and surrounding
/// whitespace are accepted.
pub fn parse_graph6(text: &str) -> Result<SimpleGraph, GraphError> {
    let text = text.trim();
    let text = text.strip_prefix(HEADER).unwrap_or(text);
    let bytes = text.as_bytes();
    if bytes.is_empty() {
        return Err(err("empty input"));
    }
    let (n, body) = if bytes[0] != 126 {
        (sextet(bytes[0])?, &bytes[1..])
    } else if bytes.len() >= 2 && bytes[1] == 126 {
        if bytes.len() < 8 {
            return Err(err("truncated 8-byte size field"));
        }
        let mut n = 0usize;
        for &b in &bytes[2..8] {
            n = (n << 6) | sextet(b)?;
        }
        (n, &bytes[8..])
    } else {
        if bytes.len() < 4 {
            return Err(err("truncated 4-byte size field"));
        }
        let mut n = 0usize;
        for &b in &bytes[1..4] {
            n = (n << 6) | sextet(b)?;
        }
        (n, &bytes[4..])
    };

    let nbits = n * n.saturating_sub(1) / 2;
    let expected = nbits.div_ceil(6);
    if body.len() != expected {
        return Err(err(format!(
            "{n} vertices need {expected} data bytes, found {}",
            body.len()
        )));
    }
    let mut g = SimpleGraph::new(n);
    let mut bit = 0;
    for j in 1..n {
        for i in 0..j {
            let x = sextet(body[bit / 6])?;
            if x >> (5 - bit % 6) & 1 == 1 {
                g.connect(i, j);
            }
            bit += 1;
        }
    }
    if let Some(&last) = body.last() {
        let x = sextet(last)?;
        let pad = expected * 6 - nbits;
        if x & ((1 << pad) - 1) != 0 {
            return Err(err("nonzero padding bits"));
        }
    }
    Ok(g)
}

/// Parses a newline-separated stream, skipping blank lines.
pub fn parse_graph6_lines(text: &str) -> Result<Vec<SimpleGraph>, GraphError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(parse_graph6)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn known_codes() {
        assert_eq!(emit_graph6(&SimpleGraph::complete(3)), "Bw");
        assert_eq!(emit_graph6(&SimpleGraph::new(1)), "@");
        assert_eq!(emit_graph6(&SimpleGraph::new(0)), "?");
        assert_eq!(parse_graph6("Bw").unwrap(), SimpleGraph::complete(3));
        assert_eq!(
            parse_graph6(">>graph6<<Bw\n").unwrap(),
            SimpleGraph::complete(3)
        );
        assert_eq!(parse_graph6("@").unwrap(), SimpleGraph::new(1));
        // P_4 as 0-1-2-3: bits (0,1)(0,2)(1,2)(0,3)(1,3)(2,3) = 101001
        assert_eq!(emit_graph6(&SimpleGraph::path(4)), "Ch");
    }

    #[test]
    fn malformed() {
        assert!(parse_graph6("").is_err());
        assert!(parse_graph6("   ").is_err());
        assert!(parse_graph6("B").is_err());
        assert!(parse_graph6("Bww").is_err());
        assert!(parse_graph6("B\x7f").is_err());
        assert!(parse_graph6("B!").is_err());
        // K_3 with a padding bit set
        assert!(parse_graph6("Bx").is_err());
        assert!(parse_graph6("~?").is_err());
    }

    #[test]
    fn long_size_forms() {
        let mut g = SimpleGraph::new(63);
        g.add_edge(0, 62).unwrap();
        let s = emit_graph6(&g);
        assert!(s.starts_with("~??~"));
        assert_eq!(parse_graph6(&s).unwrap(), g);

        let mut s = String::new();
        encode_n(258_048, &mut s);
        assert_eq!(s.len(), 8);
        assert!(s.starts_with("~~"));
    }

    #[test]
    fn random_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let n = rng.gen_range(0..=40);
            let mut g = SimpleGraph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.4) {
                        g.add_edge(u, v).unwrap();
                    }
                }
            }
            assert_eq!(parse_graph6(&emit_graph6(&g)).unwrap(), g);
        }
    }
}
