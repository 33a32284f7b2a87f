//! hMetis `.hgr` and MatrixMarket coordinate readers and writers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Hypergraph, NodeId, Weight};
use crate::error::{Error, Result};

/// How a sparse matrix maps onto a hypergraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixOrientation {
    /// Rows are nodes, columns are hyperedges.
    #[default]
    RowsAreNodes,
    /// Columns are nodes, rows are hyperedges.
    ColumnsAreNodes,
}

pub fn load_hmetis(path: impl AsRef<Path>) -> Result<Hypergraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_hmetis(&text, &path.display().to_string())
}

/// Meaningful lines: trimmed, non-empty, not a `%` comment. Line numbers are 1-based.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'))
}

fn parse_int<T: std::str::FromStr>(tok: &str, src: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(src, line, format!("invalid {what} `{tok}`")))
}

pub fn parse_hmetis(text: &str, source_name: &str) -> Result<Hypergraph> {
    let src = source_name;
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(src, 1, "missing header line"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if !(2..=3).contains(&tokens.len()) {
        return Err(Error::parse(
            src,
            hline,
            "header must be `<num edges> <num nodes> [fmt]`",
        ));
    }
    let num_edges: usize = parse_int(tokens[0], src, hline, "edge count")?;
    let num_nodes: usize = parse_int(tokens[1], src, hline, "node count")?;
    let fmt = match tokens.get(2) {
        None => 0,
        Some(&"1") => 1,
        Some(&"10") => 10,
        Some(&"11") => 11,
        Some(other) => {
            return Err(Error::parse(
                src,
                hline,
                format!("unsupported fmt `{other}`"),
            ));
        }
    };
    let edge_weighted = fmt == 1 || fmt == 11;
    let node_weighted = fmt == 10 || fmt == 11;

    let mut edges = Vec::with_capacity(num_edges);
    for i in 0..num_edges {
        let (ln, line) = lines.next().ok_or_else(|| {
            Error::parse(
                src,
                text.lines().count(),
                format!("expected {num_edges} edge lines, found {i}"),
            )
        })?;
        let mut toks = line.split_whitespace();
        let weight: Weight = if edge_weighted {
            let w: Weight = parse_int(toks.next().unwrap_or(""), src, ln, "edge weight")?;
            if w < 1 {
                return Err(Error::parse(
                    src,
                    ln,
                    format!("non-positive edge weight {w}"),
                ));
            }
            w
        } else {
            1
        };
        let mut pins = Vec::new();
        for tok in toks {
            let p: usize = parse_int(tok, src, ln, "pin id")?;
            if p == 0 || p > num_nodes {
                return Err(Error::parse(
                    src,
                    ln,
                    format!("pin {p} out of range 1..={num_nodes}"),
                ));
            }
            pins.push(p - 1);
        }
        edges.push((pins, weight));
    }

    let mut node_weight = vec![1; num_nodes];
    if node_weighted {
        for (v, w) in node_weight.iter_mut().enumerate() {
            let (ln, line) = lines.next().ok_or_else(|| {
                Error::parse(
                    src,
                    text.lines().count(),
                    format!("expected {num_nodes} node weight lines, found {v}"),
                )
            })?;
            let parsed: Weight = parse_int(line, src, ln, "node weight")?;
            if parsed < 1 {
                return Err(Error::parse(
                    src,
                    ln,
                    format!("non-positive node weight {parsed}"),
                ));
            }
            *w = parsed;
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::parse(src, ln, "unexpected trailing content"));
    }
    Hypergraph::new(node_weight, edges)
}

/// Canonical hMetis text: fmt chosen from which weights differ from 1,
/// pins ascending, single spaces, trailing newline.
pub fn write_hmetis(h: &Hypergraph) -> String {
    let edge_weighted = h.edge_weights().iter().any(|&w| w != 1);
    let node_weighted = h.node_weights().iter().any(|&w| w != 1);
    let mut out = String::new();
    let _ = write!(out, "{} {}", h.num_edges(), h.num_nodes());
    match (edge_weighted, node_weighted) {
        (false, false) => {}
        (true, false) => out.push_str(" 1"),
        (false, true) => out.push_str(" 10"),
        (true, true) => out.push_str(" 11"),
    }
    out.push('\n');
    for e in 0..h.num_edges() {
        let mut first = true;
        if edge_weighted {
            let _ = write!(out, "{}", h.edge_weight(e));
            first = false;
        }
        for &p in h.pins(e) {
            if !first {
                out.push(' ');
            }
            let _ = write!(out, "{}", p + 1);
            first = false;
        }
        out.push('\n');
    }
    if node_weighted {
        for &w in h.node_weights() {
            let _ = writeln!(out, "{w}");
        }
    }
    out
}

pub fn load_matrix_market(
    path: impl AsRef<Path>,
    orientation: MatrixOrientation,
) -> Result<Hypergraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_market(&text, &path.display().to_string(), orientation)
}

/// Reads a coordinate MatrixMarket matrix as a hypergraph incidence matrix.
///
/// Numeric values are ignored; only positions matter. Symmetric storage is
/// expanded by mirroring off-diagonal entries.
pub fn parse_matrix_market(
    text: &str,
    source_name: &str,
    orientation: MatrixOrientation,
) -> Result<Hypergraph> {
    let src = source_name;
    let mut raw = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, banner) = raw
        .next()
        .ok_or_else(|| Error::parse(src, 1, "empty file"))?;
    let banner_lc = banner.to_ascii_lowercase();
    let fields: Vec<&str> = banner_lc.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(Error::parse(
            src,
            1,
            "missing `%%MatrixMarket matrix` banner",
        ));
    }
    if fields[2] != "coordinate" {
        return Err(Error::parse(
            src,
            1,
            format!(
                "unsupported format `{}`; only coordinate is accepted",
                fields[2]
            ),
        ));
    }
    if !matches!(fields[3], "real" | "integer" | "pattern" | "complex") {
        return Err(Error::parse(
            src,
            1,
            format!("unsupported field `{}`", fields[3]),
        ));
    }
    let mirror = match fields[4] {
        "general" => false,
        "symmetric" | "skew-symmetric" | "hermitian" => true,
        other => {
            return Err(Error::parse(
                src,
                1,
                format!("unsupported symmetry `{other}`"),
            ))
        }
    };

    let mut lines = raw.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (sl, size) = lines
        .next()
        .ok_or_else(|| Error::parse(src, 1, "missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    if dims.len() != 3 {
        return Err(Error::parse(
            src,
            sl,
            "size line must be `<rows> <cols> <nnz>`",
        ));
    }
    let rows: usize = parse_int(dims[0], src, sl, "row count")?;
    let cols: usize = parse_int(dims[1], src, sl, "column count")?;
    let nnz: usize = parse_int(dims[2], src, sl, "nonzero count")?;
    if rows == 0 || cols == 0 || nnz == 0 {
        return Err(Error::parse(src, sl, "empty matrix"));
    }

    let (num_nodes, num_edges) = match orientation {
        MatrixOrientation::RowsAreNodes => (rows, cols),
        MatrixOrientation::ColumnsAreNodes => (cols, rows),
    };
    let mut edges: Vec<Vec<NodeId>> = vec![Vec::new(); num_edges];
    let mut add = |i: usize, j: usize| match orientation {
        MatrixOrientation::RowsAreNodes => edges[j].push(i),
        MatrixOrientation::ColumnsAreNodes => edges[i].push(j),
    };
    for k in 0..nnz {
        let (ln, line) = lines.next().ok_or_else(|| {
            Error::parse(
                src,
                text.lines().count(),
                format!("expected {nnz} entries, found {k}"),
            )
        })?;
        let mut toks = line.split_whitespace();
        let i: usize = parse_int(toks.next().unwrap_or(""), src, ln, "row index")?;
        let j: usize = parse_int(toks.next().unwrap_or(""), src, ln, "column index")?;
        if i == 0 || i > rows || j == 0 || j > cols {
            return Err(Error::parse(
                src,
                ln,
                format!("entry ({i}, {j}) outside {rows}x{cols}"),
            ));
        }
        add(i - 1, j - 1);
        if mirror && i != j {
            if i > cols || j > rows {
                return Err(Error::parse(
                    src,
                    ln,
                    "symmetric storage requires a square matrix",
                ));
            }
            add(j - 1, i - 1);
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::parse(src, ln, "unexpected trailing content"));
    }
    Hypergraph::unweighted(num_nodes, edges)
}

/// Pattern matrix with one column per hyperedge (or per node when
/// `ColumnsAreNodes`), entries ordered column-major. Weights are not
/// representable and are omitted.
pub fn write_matrix_market(h: &Hypergraph, orientation: MatrixOrientation) -> String {
    let mut entries: Vec<(usize, usize)> = Vec::with_capacity(h.num_pins());
    for e in 0..h.num_edges() {
        for &v in h.pins(e) {
            entries.push(match orientation {
                MatrixOrientation::RowsAreNodes => (v, e),
                MatrixOrientation::ColumnsAreNodes => (e, v),
            });
        }
    }
    entries.sort_unstable_by_key(|&(i, j)| (j, i));
    let (rows, cols) = match orientation {
        MatrixOrientation::RowsAreNodes => (h.num_nodes(), h.num_edges()),
        MatrixOrientation::ColumnsAreNodes => (h.num_edges(), h.num_nodes()),
    };
    let mut out = String::from("%%MatrixMarket matrix coordinate pattern general\n");
    let _ = writeln!(out, "{rows} {cols} {}", entries.len());
    for (i, j) in entries {
        let _ = writeln!(out, "{} {}", i + 1, j + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_hgr() {
        let h = parse_hmetis("2 3\n1 2\n2 3\n", "t").unwrap();
        assert_eq!(h.num_nodes(), 3);
        assert_eq!(h.num_edges(), 2);
        assert!(h.node_weights().iter().all(|&w| w == 1));
        assert!(h.edge_weights().iter().all(|&w| w == 1));
    }

    #[test]
    fn edge_weight_is_first_token_with_fmt_1() {
        let h = parse_hmetis("1 2 1\n3 1 2\n", "t").unwrap();
        assert_eq!(h.edge_weight(0), 3);
        assert_eq!(h.pins(0), &[0, 1]);
    }

    #[test]
    fn node_weights_with_fmt_10_and_11() {
        let h = parse_hmetis("1 2 10\n1 2\n4\n5\n", "t").unwrap();
        assert_eq!(h.node_weights(), &[4, 5]);
        let h = parse_hmetis("% comment\n1 2 11\n2 1 2\n4\n5\n", "t").unwrap();
        assert_eq!(h.node_weights(), &[4, 5]);
        assert_eq!(h.edge_weight(0), 2);
    }

    #[test]
    fn pin_out_of_range_names_line() {
        let err = parse_hmetis("1 3\n1 4\n", "g.hgr").unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("pin 4"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_inputs() {
        for bad in [
            "",
            "x 3\n",
            "1 2 7\n1 2\n",
            "2 3\n1 2\n",
            "1 2 1\n0 1 2\n",
            "1 2 10\n1 2\n1\n0\n",
            "1 2\n1 2\n1 2\n",
        ] {
            assert!(
                matches!(parse_hmetis(bad, "t"), Err(Error::Parse { .. })),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn hgr_writer_is_canonical() {
        let h = Hypergraph::new(vec![1, 2, 1], vec![(vec![2, 0], 1), (vec![1, 2], 4)]).unwrap();
        assert_eq!(write_hmetis(&h), "2 3 11\n1 1 3\n4 2 3\n1\n2\n1\n");
        let u = Hypergraph::unweighted(3, vec![vec![1, 0]]).unwrap();
        assert_eq!(write_hmetis(&u), "1 3\n1 2\n");
    }

    #[test]
    fn mtx_rows_are_nodes() {
        let text = "%%MatrixMarket matrix coordinate real general\n% c\n3 2 4\n1 1 1.0\n2 1 2.0\n2 2 1\n3 2 5e3\n";
        let h = parse_matrix_market(text, "m", MatrixOrientation::RowsAreNodes).unwrap();
        assert_eq!(h.num_nodes(), 3);
        assert_eq!(h.pins(0), &[0, 1]);
        assert_eq!(h.pins(1), &[1, 2]);
        let t = parse_matrix_market(text, "m", MatrixOrientation::ColumnsAreNodes).unwrap();
        assert_eq!(t.num_nodes(), 2);
        assert_eq!(t.num_edges(), 1);
        assert_eq!(t.pins(0), &[0, 1]);
    }

    #[test]
    fn mtx_single_entry_column_dropped_and_duplicates_merged() {
        let text = "%%MatrixMarket matrix coordinate pattern general\n3 2 4\n1 1\n1 1\n2 1\n3 2\n";
        let h = parse_matrix_market(text, "m", MatrixOrientation::RowsAreNodes).unwrap();
        assert_eq!(h.num_edges(), 1);
        assert_eq!(h.pins(0), &[0, 1]);
    }

    #[test]
    fn mtx_symmetric_is_mirrored() {
        let text = "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 2\n2 1\n3 1\n";
        // Mirrored entries fill column 1 with rows 2 and 3; columns 2 and 3
        // hold only row 1 and drop out as single-pin edges.
        let h = parse_matrix_market(text, "m", MatrixOrientation::RowsAreNodes).unwrap();
        assert_eq!(h.num_edges(), 1);
        assert_eq!(h.pins(0), &[1, 2]);
        let t = parse_matrix_market(text, "m", MatrixOrientation::ColumnsAreNodes).unwrap();
        assert_eq!(t.num_edges(), 1);
        assert_eq!(t.pins(0), &[1, 2]);
    }

    #[test]
    fn mtx_errors() {
        let arr = "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n";
        assert!(parse_matrix_market(arr, "m", MatrixOrientation::RowsAreNodes).is_err());
        let empty = "%%MatrixMarket matrix coordinate real general\n2 2 0\n";
        assert!(parse_matrix_market(empty, "m", MatrixOrientation::RowsAreNodes).is_err());
        let oob = "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n3 1\n";
        assert!(parse_matrix_market(oob, "m", MatrixOrientation::RowsAreNodes).is_err());
    }

    #[test]
    fn mtx_writer_round_trips() {
        let h = Hypergraph::unweighted(4, vec![vec![0, 1], vec![1, 2, 3]]).unwrap();
        let text = write_matrix_market(&h, MatrixOrientation::RowsAreNodes);
        assert_eq!(
            text,
            "%%MatrixMarket matrix coordinate pattern general\n4 2 5\n1 1\n2 1\n2 2\n3 2\n4 2\n"
        );
        let back = parse_matrix_market(&text, "m", MatrixOrientation::RowsAreNodes).unwrap();
        assert_eq!(back, h);
    }
}
