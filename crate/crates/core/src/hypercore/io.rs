use std::fmt::Write as _;
use std::path::Path;

use log::warn;

use super::hypergraph::{Edge, Hypergraph};
use crate::error::{Error, Result};

/// What the lenient parser discarded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub duplicates: usize,
    pub singletons: usize,
}

/// Parses the text format:
///
/// ```text
/// # comment
/// nodes=5 max_order=3
/// 0,1
/// 1,2,4
/// ```
///
/// Repeated hyperedges are collapsed and order-1 hyperedges dropped, both with
/// a warning. Orders above `max_order` are an error.
pub fn parse_hypergraph(text: &str) -> Result<(Hypergraph, ParseReport)> {
    let mut report = ParseReport::default();
    let mut header: Option<(usize, usize)> = None;
    let mut h: Option<Hypergraph> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some(graph) = h.as_mut() else {
            let (n, k) = parse_header(line).map_err(|msg| Error::Parse { line: line_no, msg })?;
            header = Some((n, k));
            h = Some(Hypergraph::empty(n, k).map_err(|e| Error::Parse {
                line: line_no,
                msg: e.to_string(),
            })?);
            continue;
        };
        let nodes = line
            .split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad node index {:?}", t.trim()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sorted = nodes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() < 2 {
            warn!("line {line_no}: dropping order-1 hyperedge {nodes:?}");
            report.singletons += 1;
            continue;
        }
        let edge = Edge::new(&nodes).map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        let inserted = graph.insert(edge).map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        if !inserted {
            warn!("line {line_no}: collapsing repeated hyperedge {nodes:?}");
            report.duplicates += 1;
        }
    }
    match (h, header) {
        (Some(h), Some(_)) => Ok((h, report)),
        _ => Err(Error::Parse {
            line: 0,
            msg: "missing `nodes=N max_order=K` header".into(),
        }),
    }
}

fn parse_header(line: &str) -> std::result::Result<(usize, usize), String> {
    let mut n = None;
    let mut k = None;
    for tok in line.split_whitespace() {
        let (key, val) = tok
            .split_once('=')
            .ok_or_else(|| format!("expected key=value in header, got {tok:?}"))?;
        let v: usize = val.parse().map_err(|_| format!("bad header value {val:?}"))?;
        match key {
            "nodes" => n = Some(v),
            "max_order" => k = Some(v),
            other => return Err(format!("unknown header key {other:?}")),
        }
    }
    match (n, k) {
        (Some(n), Some(k)) => Ok((n, k)),
        _ => Err("header needs both nodes= and max_order=".into()),
    }
}

pub fn serialize_hypergraph(h: &Hypergraph) -> String {
    let mut out = format!("nodes={} max_order={}\n", h.n_nodes(), h.max_order());
    for e in h.iter() {
        let mut first = true;
        for &i in e.nodes() {
            if !first {
                out.push(',');
            }
            first = false;
            write!(out, "{i}").expect("write to string");
        }
        out.push('\n');
    }
    out
}

pub fn read_hypergraph(path: &Path) -> Result<(Hypergraph, ParseReport)> {
    parse_hypergraph(&std::fs::read_to_string(path)?)
}

pub fn write_hypergraph(path: &Path, h: &Hypergraph) -> Result<()> {
    std::fs::write(path, serialize_hypergraph(h))?;
    Ok(())
}
