//! Text formats: FASTA samples, sample locations, geo graphs and the
//! per-edge output table.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::cost::{CostMatrix, Sample};
use crate::error::{Error, Result};
use crate::geo_rw::GeoGraph;
use crate::mst::PhyloTree;
use crate::substitution::Alphabet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FastaRecord {
    pub id: String,
    /// Uppercased residues with whitespace removed.
    pub sequence: String,
    /// Line of the header.
    pub line: usize,
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

/// Splits FASTA text into records and checks ids and lengths.
pub fn parse_fasta_records(text: &str, source: &str) -> Result<Vec<FastaRecord>> {
    let mut records: Vec<FastaRecord> = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with(';') {
            continue;
        }
        if let Some(header) = s.strip_prefix('>') {
            let id = header.split_whitespace().next().unwrap_or("").to_string();
            if id.is_empty() {
                return Err(Error::parse(source, line, "empty record id"));
            }
            if !seen.insert(id.clone()) {
                return Err(Error::parse(source, line, format!("duplicate record id `{id}`")));
            }
            records.push(FastaRecord {
                id,
                sequence: String::new(),
                line,
            });
        } else {
            let rec = records
                .last_mut()
                .ok_or_else(|| Error::parse(source, line, "sequence data before the first header"))?;
            rec.sequence
                .extend(s.chars().filter(|c| !c.is_whitespace()).map(|c| c.to_ascii_uppercase()));
        }
    }
    if records.is_empty() {
        return Err(Error::parse(source, 1, "no FASTA records"));
    }
    let n = records[0].sequence.len();
    for r in &records {
        if r.sequence.is_empty() {
            return Err(Error::parse(source, r.line, format!("record `{}` has no sequence", r.id)));
        }
        if r.sequence.len() != n {
            return Err(Error::parse(
                source,
                r.line,
                format!(
                    "record `{}` has length {} but `{}` has length {n}",
                    r.id,
                    r.sequence.len(),
                    records[0].id
                ),
            ));
        }
    }
    Ok(records)
}

/// Parses FASTA text into samples over `alphabet`.
pub fn parse_fasta_str(text: &str, source: &str, alphabet: &Alphabet) -> Result<Vec<Sample>> {
    parse_fasta_records(text, source)?
        .into_iter()
        .map(|r| match alphabet.encode_str(&r.sequence) {
            Ok(seq) => Ok(Sample::new(r.id, seq, None)),
            Err((pos, c)) => Err(Error::parse(
                source,
                r.line,
                format!(
                    "record `{}`: symbol `{c}` at position {} is not in the alphabet {}",
                    r.id,
                    pos + 1,
                    String::from_utf8_lossy(alphabet.symbols())
                ),
            )),
        })
        .collect()
}

pub fn parse_fasta(path: &Path, alphabet: &Alphabet) -> Result<Vec<Sample>> {
    parse_fasta_str(&read(path)?, &display(path), alphabet)
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            None
        } else {
            Some((i + 1, l.split('\t').map(str::trim).collect()))
        }
    })
}

/// `sample_id<TAB>node` lines; returns id to `(node, line)`.
pub fn parse_locations_str(text: &str, source: &str) -> Result<BTreeMap<String, (usize, usize)>> {
    let mut out = BTreeMap::new();
    for (line, fields) in data_lines(text) {
        if fields.len() != 2 {
            return Err(Error::parse(source, line, "expected `sample_id<TAB>node`"));
        }
        let node: usize = fields[1]
            .parse()
            .map_err(|_| Error::parse(source, line, format!("`{}` is not a node id", fields[1])))?;
        if out.insert(fields[0].to_string(), (node, line)).is_some() {
            return Err(Error::parse(source, line, format!("duplicate location for `{}`", fields[0])));
        }
    }
    Ok(out)
}

pub fn parse_locations(path: &Path) -> Result<BTreeMap<String, (usize, usize)>> {
    parse_locations_str(&read(path)?, &display(path))
}

/// Sets every sample's location; all samples must be covered and every
/// node must exist in a graph of `node_count` nodes.
pub fn attach_locations(
    samples: &mut [Sample],
    locations: &BTreeMap<String, (usize, usize)>,
    node_count: usize,
    source: &str,
) -> Result<()> {
    for s in samples.iter_mut() {
        let &(node, line) = locations
            .get(&s.id)
            .ok_or_else(|| Error::domain(format!("{source}: no location for sample `{}`", s.id)))?;
        if node >= node_count {
            return Err(Error::parse(
                source,
                line,
                format!("node {node} is not in the geo graph (0..{node_count})"),
            ));
        }
        s.location = Some(node);
    }
    Ok(())
}

/// `u<TAB>v<TAB>weight` lines; duplicates summed; the graph must be
/// connected.
pub fn parse_geo_graph_str(text: &str, source: &str) -> Result<GeoGraph> {
    let mut edges = Vec::new();
    for (line, fields) in data_lines(text) {
        if fields.len() != 3 {
            return Err(Error::parse(source, line, "expected `u<TAB>v<TAB>weight`"));
        }
        let node = |f: &str| {
            f.parse::<usize>()
                .map_err(|_| Error::parse(source, line, format!("`{f}` is not a node id")))
        };
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(source, line, format!("`{}` is not a weight", fields[2])))?;
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::parse(source, line, format!("weight {w} must be positive")));
        }
        edges.push((node(fields[0])?, node(fields[1])?, w));
    }
    if edges.is_empty() {
        return Err(Error::parse(source, 1, "geo graph has no edges"));
    }
    let graph = GeoGraph::from_edges(edges)?;
    if let Some(v) = graph.unreachable_node() {
        return Err(Error::Disconnected(v));
    }
    Ok(graph)
}

pub fn parse_geo_graph(path: &Path) -> Result<GeoGraph> {
    parse_geo_graph_str(&read(path)?, &display(path))
}

pub fn write_fasta(samples: &[Sample], alphabet: &Alphabet) -> String {
    let mut out = String::new();
    for s in samples {
        let _ = writeln!(out, ">{}\n{}", s.id, alphabet.decode_seq(&s.sequence));
    }
    out
}

pub fn write_locations(samples: &[Sample]) -> String {
    let mut out = String::new();
    for s in samples {
        if let Some(x) = s.location {
            let _ = writeln!(out, "{}\t{x}", s.id);
        }
    }
    out
}

pub fn write_geo_graph(graph: &GeoGraph) -> String {
    let mut out = String::new();
    for &(u, v, w) in graph.edges() {
        let _ = writeln!(out, "{u}\t{v}\t{w}");
    }
    out
}

/// `parent child w phi_uv t_star` per tree edge; an unattained supremum
/// prints `t_star` as `inf`.
pub fn write_edges_tsv(tree: &PhyloTree, costs: &CostMatrix) -> String {
    let mut out = String::from("parent\tchild\tw\tphi_uv\tt_star\n");
    for (p, c) in tree.edges() {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            costs.ids()[p],
            costs.ids()[c],
            costs.weight(p, c),
            costs.phi(p, c),
            costs.t_star(p, c)
        );
    }
    out
}
