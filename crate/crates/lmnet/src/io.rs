//! JSONL sample files: one graph per line as `{"m": 3, "edges": [[0, 1], [1, 2]]}`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use lmnet_core::Graph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleLine {
    m: usize,
    edges: Vec<(usize, usize)>,
}

/// Parses JSONL from a reader. Blank lines are skipped; anything else must be
/// a valid graph with `i < j < m` for every edge and no repeats.
pub fn parse_samples(reader: impl BufRead) -> Result<Vec<Graph>> {
    let mut out = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let line = line.map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: SampleLine =
            serde_json::from_str(&line).map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
        if rec.m == 0 {
            return Err(Error::Parse { line: line_no, message: "m must be at least 1".into() });
        }
        let g = Graph::from_edges(rec.m, &rec.edges).map_err(|source| Error::Sample { line: line_no, source })?;
        out.push(g);
    }
    Ok(out)
}

pub fn read_samples(path: &Path) -> Result<Vec<Graph>> {
    let file = File::open(path).map_err(Error::io(path))?;
    parse_samples(BufReader::new(file))
}

/// Writes one line per graph, edges in lexicographic order.
pub fn write_samples_to(mut w: impl Write, graphs: &[Graph]) -> std::io::Result<()> {
    for g in graphs {
        let rec = SampleLine { m: g.vertex_count(), edges: g.edges().collect() };
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn write_samples(path: &Path, graphs: &[Graph]) -> Result<()> {
    let file = File::create(path).map_err(Error::io(path))?;
    write_samples_to(BufWriter::new(file), graphs).map_err(Error::io(path))
}
