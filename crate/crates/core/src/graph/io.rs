//! MatrixMarket coordinate and whitespace edge-list readers and writers.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use super::{EdgeList, VertexId, Weight};
use crate::error::GraphError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    MatrixMarket,
    /// `src dst [weight]` per line, `#` comments.
    Tsv,
}

impl Format {
    /// Guesses from the file extension: `.mtx` is MatrixMarket, anything else
    /// is treated as a whitespace edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("mtx") => Format::MatrixMarket,
            _ => Format::Tsv,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mtx" | "matrix-market" | "matrixmarket" => Ok(Format::MatrixMarket),
            "tsv" | "txt" | "edgelist" => Ok(Format::Tsv),
            other => Err(format!("unknown graph format '{other}'")),
        }
    }
}

pub fn load_edge_list(path: &Path, format: Format) -> Result<EdgeList, GraphError> {
    let reader = BufReader::new(File::open(path)?);
    match format {
        Format::MatrixMarket => read_matrix_market(reader),
        Format::Tsv => read_tsv(reader),
    }
}

pub fn save_edge_list(path: &Path, format: Format, el: &EdgeList) -> Result<(), GraphError> {
    let mut w = BufWriter::new(File::create(path)?);
    match format {
        Format::MatrixMarket => write_matrix_market(&mut w, el)?,
        Format::Tsv => write_tsv(&mut w, el)?,
    }
    w.flush()?;
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_weight(tok: Option<&str>, line: usize) -> Result<Weight, GraphError> {
    let Some(tok) = tok else { return Ok(1.0) };
    let w: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("bad weight '{tok}'")))?;
    if !w.is_finite() {
        return Err(GraphError::NonFiniteWeight { line });
    }
    if w < 0.0 {
        return Err(GraphError::NegativeWeight { line, weight: w });
    }
    Ok(w as Weight)
}

/// Reads a MatrixMarket coordinate file. Ids are converted to 0-based, the
/// vertex count is `max(rows, cols)`, and `symmetric` files keep each stored
/// entry once. Pattern files and entries without a value get weight 1.
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<EdgeList, GraphError> {
    let mut lines = reader.lines().enumerate();
    let (_, banner) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file"))?;
    let banner = banner?;
    let fields: Vec<String> = banner
        .split_whitespace()
        .map(|s| s.to_ascii_lowercase())
        .collect();
    if fields.len() < 4 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(parse_err(1, "missing %%MatrixMarket matrix banner"));
    }
    if fields[2] != "coordinate" {
        return Err(parse_err(1, format!("unsupported layout '{}'", fields[2])));
    }
    if fields.len() > 3 && fields[3] == "complex" {
        return Err(parse_err(1, "complex matrices are not graphs"));
    }

    let mut header: Option<(usize, usize)> = None;
    let mut triples = Vec::new();
    let mut last_line = 1;
    for (idx, line) in lines {
        let lineno = idx + 1;
        last_line = lineno;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut toks = t.split_whitespace();
        match header {
            None => {
                let mut dims = [0usize; 3];
                for d in dims.iter_mut() {
                    let tok = toks
                        .next()
                        .ok_or_else(|| parse_err(lineno, "size line needs rows cols entries"))?;
                    *d = tok
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("bad size field '{tok}'")))?;
                }
                let n = dims[0].max(dims[1]);
                if n >= super::SENTINEL_ID as usize {
                    return Err(GraphError::TooManyVertices(n));
                }
                triples.reserve(dims[2]);
                header = Some((n, dims[2]));
            }
            Some((n, _)) => {
                let mut id = |name: &str| -> Result<VertexId, GraphError> {
                    let tok = toks
                        .next()
                        .ok_or_else(|| parse_err(lineno, format!("missing {name} index")))?;
                    let v: u64 = tok
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("bad {name} index '{tok}'")))?;
                    if v == 0 || v > n as u64 {
                        return Err(GraphError::VertexOutOfRange {
                            line: lineno,
                            id: v,
                            num_vertices: n,
                        });
                    }
                    Ok((v - 1) as VertexId)
                };
                let s = id("row")?;
                let d = id("column")?;
                let w = parse_weight(toks.next(), lineno)?;
                triples.push((s, d, w));
            }
        }
    }
    let (n, nnz) = header.ok_or_else(|| parse_err(last_line, "missing size line"))?;
    if triples.len() != nnz {
        return Err(parse_err(
            last_line,
            format!("declared {nnz} entries, found {}", triples.len()),
        ));
    }
    Ok(EdgeList {
        num_vertices: n,
        triples,
    })
}

/// Reads `src dst [weight]` lines with 0-based ids. The vertex count is one
/// more than the largest id seen, or the `# vertices N` comment if larger.
pub fn read_tsv<R: BufRead>(reader: R) -> Result<EdgeList, GraphError> {
    let mut triples = Vec::new();
    let mut max_id: Option<u64> = None;
    let mut declared = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let t = line.trim();
        if let Some(rest) = t.strip_prefix('#') {
            if let Some(n) = rest.trim().strip_prefix("vertices") {
                declared = n
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(lineno, "bad vertex count comment"))?;
            }
            continue;
        }
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut toks = t.split_whitespace();
        let mut id = |name: &str| -> Result<u64, GraphError> {
            let tok = toks
                .next()
                .ok_or_else(|| parse_err(lineno, format!("missing {name} id")))?;
            let v: u64 = tok
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad {name} id '{tok}'")))?;
            if v >= super::SENTINEL_ID as u64 - 1 {
                return Err(GraphError::VertexOutOfRange {
                    line: lineno,
                    id: v,
                    num_vertices: super::SENTINEL_ID as usize - 1,
                });
            }
            Ok(v)
        };
        let s = id("source")?;
        let d = id("target")?;
        let w = parse_weight(toks.next(), lineno)?;
        max_id = Some(max_id.unwrap_or(0).max(s).max(d));
        triples.push((s as VertexId, d as VertexId, w));
    }
    Ok(EdgeList {
        num_vertices: max_id.map_or(0, |m| m as usize + 1).max(declared),
        triples,
    })
}

/// Writes a `general` real coordinate file with 1-based ids.
pub fn write_matrix_market<W: Write>(w: &mut W, el: &EdgeList) -> std::io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", el.num_vertices, el.num_vertices, el.triples.len())?;
    for &(s, d, wt) in &el.triples {
        writeln!(w, "{} {} {}", s + 1, d + 1, wt)?;
    }
    Ok(())
}

/// Writes `src\tdst\tweight` lines. A header comment records the vertex count
/// since trailing isolated vertices are otherwise lost.
pub fn write_tsv<W: Write>(w: &mut W, el: &EdgeList) -> std::io::Result<()> {
    writeln!(w, "# vertices {}", el.num_vertices)?;
    for &(s, d, wt) in &el.triples {
        writeln!(w, "{s}\t{d}\t{wt}")?;
    }
    Ok(())
}
