//! Text file formats shared by the CLI and examples.
//!
//! - stream: one update per line, `+ i` or `- i` (0-based index)
//! - graph: header `n p seed`, then one `i j` line per edge (u-side i, v-side j)
//! - matrix: header `s n`, then s rows of n integers
//! - metric: dense distance matrix, one CSV row per point
//! - points: one point per line, whitespace-separated reals
//!
//! Parsers report the 1-based line number of the first offending line;
//! writers emit exactly what the parsers accept, so round-trips are
//! byte-stable.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::lab::SketchMatrix;
use crate::metric::{BipartiteGraph, FiniteMetric, FrequencyVector};

fn malformed(line: usize, reason: impl Into<String>) -> Error {
    Error::Malformed { line, reason: reason.into() }
}

/// Parses a turnstile stream: `+ i` inserts, `- i` deletes. Blank lines are
/// allowed; anything else is an error at its line number.
pub fn parse_stream<R: BufRead>(reader: R) -> Result<Vec<(usize, i64)>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let mut parts = text.split_whitespace();
        let sign = match parts.next() {
            Some("+") => 1i64,
            Some("-") => -1i64,
            Some(other) => return Err(malformed(lineno, format!("expected `+` or `-`, got `{other}`"))),
            None => continue,
        };
        let index: usize = match parts.next() {
            Some(tok) => tok
                .parse()
                .map_err(|_| malformed(lineno, format!("`{tok}` is not a valid index")))?,
            None => return Err(malformed(lineno, "missing index after sign")),
        };
        if let Some(extra) = parts.next() {
            return Err(malformed(lineno, format!("trailing token `{extra}`")));
        }
        out.push((index, sign));
    }
    Ok(out)
}

pub fn read_stream(path: impl AsRef<Path>) -> Result<Vec<(usize, i64)>> {
    parse_stream(BufReader::new(File::open(path)?))
}

pub fn emit_stream<W: Write>(mut w: W, updates: &[(usize, i64)]) -> Result<()> {
    for &(i, sign) in updates {
        if sign != 1 && sign != -1 {
            return Err(Error::param("updates", format!("stream files carry unit updates, got {sign}")));
        }
        writeln!(w, "{} {}", if sign == 1 { '+' } else { '-' }, i)?;
    }
    Ok(())
}

pub fn write_stream(path: impl AsRef<Path>, updates: &[(usize, i64)]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    emit_stream(&mut w, updates)?;
    Ok(w.flush()?)
}

/// Folds a stream into the frequency vector it denotes.
pub fn apply_stream(updates: &[(usize, i64)], n: usize, m_bound: i64) -> Result<FrequencyVector> {
    let mut x = FrequencyVector::new(n, m_bound)?;
    for &(i, sign) in updates {
        x.update(i, sign)?;
    }
    Ok(x)
}

pub fn parse_graph<R: BufRead>(reader: R) -> Result<BipartiteGraph> {
    let mut lines = reader.lines().enumerate();
    let (n, p, seed) = loop {
        let (idx, line) = match lines.next() {
            Some(v) => v,
            None => return Err(malformed(1, "empty graph file")),
        };
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(malformed(idx + 1, "header must be `n p seed`"));
        }
        let n: usize = toks[0]
            .parse()
            .map_err(|_| malformed(idx + 1, format!("`{}` is not a valid n", toks[0])))?;
        let p: f64 = toks[1]
            .parse()
            .map_err(|_| malformed(idx + 1, format!("`{}` is not a valid p", toks[1])))?;
        let seed: u64 = toks[2]
            .parse()
            .map_err(|_| malformed(idx + 1, format!("`{}` is not a valid seed", toks[2])))?;
        break (n, p, seed);
    };
    let mut edges = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(malformed(idx + 1, "edge lines must be `i j`"));
        }
        let i: usize = toks[0]
            .parse()
            .map_err(|_| malformed(idx + 1, format!("`{}` is not a valid u index", toks[0])))?;
        let j: usize = toks[1]
            .parse()
            .map_err(|_| malformed(idx + 1, format!("`{}` is not a valid v index", toks[1])))?;
        edges.push((i, j));
    }
    BipartiteGraph::from_edges(n, p, seed, &edges)
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<BipartiteGraph> {
    parse_graph(BufReader::new(File::open(path)?))
}

pub fn emit_graph<W: Write>(mut w: W, g: &BipartiteGraph) -> Result<()> {
    writeln!(w, "{} {} {}", g.n(), g.p(), g.seed())?;
    for (i, j) in g.edges() {
        writeln!(w, "{i} {j}")?;
    }
    Ok(())
}

pub fn write_graph(path: impl AsRef<Path>, g: &BipartiteGraph) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    emit_graph(&mut w, g)?;
    Ok(w.flush()?)
}

pub fn parse_matrix<R: BufRead>(reader: R) -> Result<SketchMatrix> {
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut want: Option<(usize, usize)> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let toks: Vec<&str> = text.split_whitespace().collect();
        match want {
            None => {
                if toks.len() != 2 {
                    return Err(malformed(lineno, "header must be `s n`"));
                }
                let s: usize = toks[0]
                    .parse()
                    .map_err(|_| malformed(lineno, format!("`{}` is not a valid s", toks[0])))?;
                let n: usize = toks[1]
                    .parse()
                    .map_err(|_| malformed(lineno, format!("`{}` is not a valid n", toks[1])))?;
                want = Some((s, n));
            }
            Some((s, n)) => {
                if rows.len() == s {
                    return Err(malformed(lineno, format!("more than {s} rows")));
                }
                if toks.len() != n {
                    return Err(malformed(lineno, format!("expected {n} entries, got {}", toks.len())));
                }
                let row = toks
                    .iter()
                    .map(|t| {
                        t.parse::<i64>()
                            .map_err(|_| malformed(lineno, format!("`{t}` is not an integer")))
                    })
                    .collect::<Result<Vec<i64>>>()?;
                rows.push(row);
            }
        }
    }
    match want {
        None => Err(malformed(1, "empty matrix file")),
        Some((s, _)) if rows.len() != s => {
            Err(malformed(rows.len() + 1, format!("expected {s} rows, got {}", rows.len())))
        }
        Some(_) => SketchMatrix::new(rows),
    }
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<SketchMatrix> {
    parse_matrix(BufReader::new(File::open(path)?))
}

pub fn emit_matrix<W: Write>(mut w: W, t: &SketchMatrix) -> Result<()> {
    writeln!(w, "{} {}", t.s(), t.n())?;
    for row in t.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn write_matrix(path: impl AsRef<Path>, t: &SketchMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    emit_matrix(&mut w, t)?;
    Ok(w.flush()?)
}

/// Dense metric: one CSV row per point. Infinities are not representable;
/// export through `dense_with_sentinel` first.
pub fn parse_dense_metric<R: BufRead>(reader: R) -> Result<FiniteMetric> {
    let mut entries: Vec<f64> = Vec::new();
    let mut n: Option<usize> = None;
    let mut rows = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let vals = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| malformed(lineno, format!("`{}` is not a number", t.trim())))
            })
            .collect::<Result<Vec<f64>>>()?;
        match n {
            None => n = Some(vals.len()),
            Some(n) if vals.len() != n => {
                return Err(malformed(lineno, format!("expected {n} columns, got {}", vals.len())));
            }
            _ => {}
        }
        rows += 1;
        entries.extend(vals);
    }
    let n = n.ok_or_else(|| malformed(1, "empty metric file"))?;
    if rows != n {
        return Err(malformed(rows + 1, format!("matrix must be square: {n} columns but {rows} rows")));
    }
    FiniteMetric::from_dense(n, entries)
}

pub fn read_dense_metric(path: impl AsRef<Path>) -> Result<FiniteMetric> {
    parse_dense_metric(BufReader::new(File::open(path)?))
}

pub fn emit_dense_metric<W: Write>(mut w: W, m: &FiniteMetric) -> Result<()> {
    let (dense, _connected) = m.dense_with_sentinel();
    let n = m.n();
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| dense[i * n + j].to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_dense_metric(path: impl AsRef<Path>, m: &FiniteMetric) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    emit_dense_metric(&mut w, m)?;
    Ok(w.flush()?)
}

/// Points or queries: one point per line, whitespace-separated reals, all
/// lines the same width.
pub fn parse_points<R: BufRead>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let vals = text
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| malformed(lineno, format!("`{t}` is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = out.first() {
            if vals.len() != first.len() {
                return Err(malformed(
                    lineno,
                    format!("expected {} coordinates, got {}", first.len(), vals.len()),
                ));
            }
        }
        out.push(vals);
    }
    Ok(out)
}

pub fn read_points(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    parse_points(BufReader::new(File::open(path)?))
}

pub fn emit_points<W: Write>(mut w: W, points: &[Vec<f64>]) -> Result<()> {
    for p in points {
        let row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn write_points(path: impl AsRef<Path>, points: &[Vec<f64>]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    emit_points(&mut w, points)?;
    Ok(w.flush()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding;
    use rand::Rng;
    use std::io::Cursor;

    #[test]
    fn stream_round_trips_to_identical_vector() {
        let mut rng = seeding::rng(5);
        let updates: Vec<(usize, i64)> = (0..300)
            .map(|_| (rng.random_range(0..50usize), if rng.random::<f64>() < 0.3 { -1 } else { 1 }))
            .collect();
        let mut buf = Vec::new();
        emit_stream(&mut buf, &updates).unwrap();
        let back = parse_stream(Cursor::new(&buf)).unwrap();
        assert_eq!(back, updates);
        let x1 = apply_stream(&updates, 50, 1 << 20).unwrap();
        let x2 = apply_stream(&back, 50, 1 << 20).unwrap();
        assert_eq!(x1.entries(), x2.entries());
        // byte-stable re-emit
        let mut buf2 = Vec::new();
        emit_stream(&mut buf2, &back).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn stream_errors_carry_line_numbers() {
        let cases = [
            ("+ 3\nx 4\n", 2, "expected `+` or `-`"),
            ("+ 3\n\n- notanumber\n", 3, "not a valid index"),
            ("+\n", 1, "missing index"),
            ("+ 1 2\n", 1, "trailing token"),
        ];
        for (text, line, msg) in cases {
            match parse_stream(Cursor::new(text)) {
                Err(Error::Malformed { line: l, reason }) => {
                    assert_eq!(l, line, "{text:?}");
                    assert!(reason.contains(msg), "{reason}");
                }
                other => panic!("expected malformed error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn graph_round_trip_is_exact() {
        let g = BipartiteGraph::gen(20, 0.13, 42).unwrap();
        let mut buf = Vec::new();
        emit_graph(&mut buf, &g).unwrap();
        let back = parse_graph(Cursor::new(&buf)).unwrap();
        assert_eq!(back.n(), g.n());
        assert_eq!(back.p(), g.p());
        assert_eq!(back.seed(), g.seed());
        assert_eq!(back.edges(), g.edges());
        let mut buf2 = Vec::new();
        emit_graph(&mut buf2, &back).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn matrix_round_trip_and_shape_errors() {
        let t = SketchMatrix::random(5, 9, 12, 3).unwrap();
        let mut buf = Vec::new();
        emit_matrix(&mut buf, &t).unwrap();
        let back = parse_matrix(Cursor::new(&buf)).unwrap();
        assert_eq!(back, t);

        assert!(matches!(
            parse_matrix(Cursor::new("2 3\n1 2 3\n")),
            Err(Error::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            parse_matrix(Cursor::new("1 2\n1 2 3\n")),
            Err(Error::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            parse_matrix(Cursor::new("1 2\n1 a\n")),
            Err(Error::Malformed { line: 2, .. })
        ));
    }

    #[test]
    fn dense_metric_round_trips_through_sentinel() {
        let edges: Vec<(usize, usize)> = (0..7).map(|i| (i, i + 1)).collect();
        let m = FiniteMetric::from_undirected_edges(8, &edges).unwrap();
        let mut buf = Vec::new();
        emit_dense_metric(&mut buf, &m).unwrap();
        let back = parse_dense_metric(Cursor::new(&buf)).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(back.dist(i, j), m.dist(i, j));
            }
        }
        assert!(matches!(
            parse_dense_metric(Cursor::new("0,1\n1,0\n2,2\n")),
            Err(Error::Malformed { .. })
        ));
    }

    #[test]
    fn points_enforce_uniform_width() {
        let pts = vec![vec![0.5, -1.25, 3.0], vec![2.0, 0.0, 9.5]];
        let mut buf = Vec::new();
        emit_points(&mut buf, &pts).unwrap();
        assert_eq!(parse_points(Cursor::new(&buf)).unwrap(), pts);
        assert!(matches!(
            parse_points(Cursor::new("1 2 3\n4 5\n")),
            Err(Error::Malformed { line: 2, .. })
        ));
    }

    use crate::error::Error;
}
