//! Line-oriented text format for hypernetworks.
//!
//! ```text
//! # comment
//! hypernet <name>
//! vertex <id> type <vtype> [dim <n>]
//! edge <id> type <etype> target <vid> sources <vid> [<vid> ...]
//! ```
//!
//! [`serialize`] writes vertices then hyperedges, each sorted by id, so
//! `serialize(parse(serialize(n)))` is byte-identical to `serialize(n)`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Hyperedge, Hypernetwork, ModelError, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

fn expect_keyword<'a>(
    tokens: &mut impl Iterator<Item = &'a str>,
    keyword: &str,
    line: usize,
) -> Result<(), ParseError> {
    match tokens.next() {
        Some(t) if t == keyword => Ok(()),
        Some(t) => Err(syntax(line, format!("expected `{keyword}`, found `{t}`"))),
        None => Err(syntax(line, format!("expected `{keyword}`"))),
    }
}

fn expect_value<'a>(
    tokens: &mut impl Iterator<Item = &'a str>,
    what: &str,
    line: usize,
) -> Result<&'a str, ParseError> {
    tokens.next().ok_or_else(|| syntax(line, format!("missing {what}")))
}

/// Strips a trailing `#` comment.
pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses and fully validates a hypernetwork.
pub fn parse(text: &str) -> Result<Hypernetwork, ParseError> {
    let (name, vertices, edges) = parse_parts(text)?;
    Ok(Hypernetwork::new(name, vertices, edges)?)
}

/// Parses without the type-consistency check, for inspection with
/// [`Hypernetwork::validate`].
pub fn parse_unchecked(text: &str) -> Result<Hypernetwork, ParseError> {
    let (name, vertices, edges) = parse_parts(text)?;
    Ok(Hypernetwork::from_parts(name, vertices, edges)?)
}

fn parse_parts(text: &str) -> Result<(String, Vec<Vertex>, Vec<Hyperedge>), ParseError> {
    let mut name: Option<String> = None;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut tokens = strip_comment(raw).split_whitespace();
        let Some(head) = tokens.next() else { continue };
        match head {
            "hypernet" => {
                let n = expect_value(&mut tokens, "hypernetwork name", line)?;
                if name.replace(n.to_string()).is_some() {
                    return Err(syntax(line, "duplicate `hypernet` line"));
                }
            }
            "vertex" => {
                let id = expect_value(&mut tokens, "vertex id", line)?;
                expect_keyword(&mut tokens, "type", line)?;
                let vtype = expect_value(&mut tokens, "vertex type", line)?;
                let mut vertex = Vertex::new(id, vtype);
                if let Some(t) = tokens.next() {
                    if t != "dim" {
                        return Err(syntax(line, format!("expected `dim`, found `{t}`")));
                    }
                    let d = expect_value(&mut tokens, "dimension", line)?;
                    vertex.dim = d
                        .parse::<usize>()
                        .ok()
                        .filter(|&d| d > 0)
                        .ok_or_else(|| syntax(line, format!("dimension must be a positive integer, found `{d}`")))?;
                }
                if let Some(t) = tokens.next() {
                    return Err(syntax(line, format!("unexpected token `{t}`")));
                }
                vertices.push(vertex);
            }
            "edge" => {
                let id = expect_value(&mut tokens, "hyperedge id", line)?;
                expect_keyword(&mut tokens, "type", line)?;
                let etype = expect_value(&mut tokens, "hyperedge type", line)?;
                expect_keyword(&mut tokens, "target", line)?;
                let target = expect_value(&mut tokens, "target vertex", line)?;
                expect_keyword(&mut tokens, "sources", line)?;
                let sources: Vec<&str> = tokens.collect();
                if sources.is_empty() {
                    return Err(syntax(line, "hyperedge needs at least one source"));
                }
                edges.push(Hyperedge::new(id, etype, sources, target));
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }
    Ok((name.unwrap_or_else(|| "hypernet".to_string()), vertices, edges))
}

pub fn serialize(net: &Hypernetwork) -> String {
    let mut out = String::new();
    writeln!(out, "hypernet {}", net.name()).unwrap();
    for v in net.vertices() {
        write!(out, "vertex {} type {}", v.id, v.vtype).unwrap();
        if v.dim != 1 {
            write!(out, " dim {}", v.dim).unwrap();
        }
        out.push('\n');
    }
    for h in net.edges() {
        writeln!(
            out,
            "edge {} type {} target {} sources {}",
            h.id,
            h.etype,
            h.target,
            h.sources.join(" ")
        )
        .unwrap();
    }
    out
}
