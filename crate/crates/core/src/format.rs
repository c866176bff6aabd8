//! Text formats for systems and peeling certificates.
//!
//! System file:
//!
//! ```text
//! system <a> <b> <m> <n>
//! 1: A = {0}; B = {1}
//! 2: A = {2}; B = {0}
//! ```
//!
//! `a` and `b` are declared size caps, pair indices are 1-based, element
//! labels 0-based and ascending. Blank lines and lines starting with `#` are
//! ignored.
//!
//! Certificate file: a `peel <a> <b>` header, the input system in the format
//! above, then for each level
//!
//! ```text
//! level <j> : M = {i,...}
//! removed <i> -> <x>
//! B <i> = {x,...}
//! repair <v> : <old> -> <new>
//! ```

use crate::peel::{PeelCertificate, PeelLevel, Repair};
use crate::set::ElementSet;
use crate::system::{SetPair, SetPairSystem};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

/// A system together with its declared size caps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemFile {
    pub a: usize,
    pub b: usize,
    pub system: SetPairSystem,
}

impl SystemFile {
    pub fn new(a: usize, b: usize, system: SetPairSystem) -> Self {
        Self { a, b, system }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        write_system(&mut out, self.a, self.b, &self.system);
        out
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = content_lines(text).peekable();
        let file = parse_system_block(&mut lines, text.lines().count() + 1)?;
        if let Some((no, line)) = lines.next() {
            return err(no, format!("unexpected trailing line `{line}`"));
        }
        Ok(file)
    }
}

fn write_system(out: &mut String, a: usize, b: usize, system: &SetPairSystem) {
    let _ = writeln!(out, "system {a} {b} {} {}", system.m(), system.n());
    for (i, p) in system.pairs().iter().enumerate() {
        let _ = writeln!(out, "{}: A = {}; B = {}", i + 1, p.a, p.b);
    }
}

/// Non-blank, non-comment lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_number(line: usize, token: &str, what: &str) -> Result<usize, ParseError> {
    token
        .trim()
        .parse()
        .or_else(|_| err(line, format!("expected {what}, found `{}`", token.trim())))
}

fn parse_index(line: usize, token: &str) -> Result<usize, ParseError> {
    match parse_number(line, token, "a pair index")? {
        0 => err(line, "pair indices start at 1"),
        i => Ok(i - 1),
    }
}

/// `{3,0,5}` in written order.
fn parse_list(line: usize, token: &str) -> Result<Vec<usize>, ParseError> {
    let token = token.trim();
    let inner = token
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .map_or_else(
            || err(line, format!("expected `{{...}}`, found `{token}`")),
            Ok,
        )?;
    inner
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse_number(line, t, "an element label"))
        .collect()
}

fn parse_set(line: usize, token: &str) -> Result<ElementSet, ParseError> {
    let labels = parse_list(line, token)?;
    let set: ElementSet = labels.iter().copied().collect();
    if set.len() != labels.len() {
        return err(line, format!("repeated element in `{}`", token.trim()));
    }
    Ok(set)
}

/// `key = value` with the given key.
fn keyed<'t>(line: usize, token: &'t str, key: &str) -> Result<&'t str, ParseError> {
    let (k, v) = token
        .split_once('=')
        .map_or_else(|| err(line, format!("expected `{key} = ...`")), Ok)?;
    if k.trim() != key {
        return err(
            line,
            format!("expected `{key} = ...`, found `{}`", k.trim()),
        );
    }
    Ok(v)
}

fn parse_system_block<'t>(
    lines: &mut std::iter::Peekable<impl Iterator<Item = (usize, &'t str)>>,
    eof_line: usize,
) -> Result<SystemFile, ParseError> {
    let Some((header_no, header)) = lines.next() else {
        return err(eof_line, "missing `system` header");
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "system" {
        return err(header_no, "expected header `system <a> <b> <m> <n>`");
    }
    let a = parse_number(header_no, fields[1], "the A-size cap")?;
    let b = parse_number(header_no, fields[2], "the B-size cap")?;
    let m = parse_number(header_no, fields[3], "the pair count")?;
    let n = parse_number(header_no, fields[4], "the ground-set size")?;

    let mut pairs = Vec::with_capacity(m);
    let mut pair_lines = Vec::with_capacity(m);
    for expected in 0..m {
        let Some((no, line)) = lines.next() else {
            return err(
                eof_line,
                format!("header declares {m} pairs, found {expected}"),
            );
        };
        let (index, body) = line
            .split_once(':')
            .map_or_else(|| err(no, "expected `<i>: A = {...}; B = {...}`"), Ok)?;
        let index = parse_index(no, index)?;
        if index != expected {
            return err(
                no,
                format!("expected pair {}, found pair {}", expected + 1, index + 1),
            );
        }
        let (a_part, b_part) = body
            .split_once(';')
            .map_or_else(|| err(no, "expected `A = {...}; B = {...}`"), Ok)?;
        let pair = SetPair {
            a: parse_set(no, keyed(no, a_part, "A")?)?,
            b: parse_set(no, keyed(no, b_part, "B")?)?,
        };
        if pair.a.len() > a {
            return err(
                no,
                format!("|A| = {} exceeds the declared cap {a}", pair.a.len()),
            );
        }
        if pair.b.len() > b {
            return err(
                no,
                format!("|B| = {} exceeds the declared cap {b}", pair.b.len()),
            );
        }
        pairs.push(pair);
        pair_lines.push(no);
    }
    if let Some(&(no, line)) = lines.peek() {
        if line
            .split_once(':')
            .is_some_and(|(i, _)| i.trim().parse::<usize>().is_ok())
        {
            return err(no, format!("header declares {m} pairs, found more"));
        }
    }
    let system = SetPairSystem::new(n, pairs).map_err(|e| {
        let pair = match e {
            crate::system::SystemError::LabelOutOfRange { pair, .. }
            | crate::system::SystemError::PairNotDisjoint { pair, .. } => pair,
            _ => 0,
        };
        ParseError {
            line: pair_lines.get(pair).copied().unwrap_or(header_no),
            message: e.to_string(),
        }
    })?;
    Ok(SystemFile { a, b, system })
}

/// Renders a certificate; the embedded system's caps are the peeling's `(a, b)`.
pub fn render_certificate(cert: &PeelCertificate) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "peel {} {}", cert.a, cert.b);
    write_system(&mut out, cert.a, cert.b, &cert.input);
    for level in &cert.levels {
        let m_set: Vec<String> = level.m_set.iter().map(|i| (i + 1).to_string()).collect();
        let _ = writeln!(out, "level {} : M = {{{}}}", level.j, m_set.join(","));
        for (i, x) in &level.removed {
            let _ = writeln!(out, "removed {} -> {x}", i + 1);
        }
        for (i, set) in &level.b_family {
            let _ = writeln!(out, "B {} = {set}", i + 1);
        }
        for r in &level.repairs {
            let _ = writeln!(out, "repair {} : {} -> {}", r.v + 1, r.old, r.new);
        }
    }
    out
}

/// Parses a certificate. Only syntax and the embedded system's
/// well-formedness are checked here; the peeling invariants are left to the
/// verifier.
pub fn parse_certificate(text: &str) -> Result<PeelCertificate, ParseError> {
    let eof_line = text.lines().count() + 1;
    let mut lines = content_lines(text).peekable();
    let Some((header_no, header)) = lines.next() else {
        return err(eof_line, "missing `peel` header");
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "peel" {
        return err(header_no, "expected header `peel <a> <b>`");
    }
    let a = parse_number(header_no, fields[1], "a")?;
    let b = parse_number(header_no, fields[2], "b")?;
    let input = parse_system_block(&mut lines, eof_line)?.system;

    let mut levels: Vec<PeelLevel> = Vec::new();
    for (no, line) in lines {
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        if keyword == "level" {
            let (j, m_part) = rest
                .split_once(':')
                .map_or_else(|| err(no, "expected `level <j> : M = {...}`"), Ok)?;
            let m_set = parse_list(no, keyed(no, m_part, "M")?)?
                .into_iter()
                .map(|i| {
                    i.checked_sub(1)
                        .map_or_else(|| err(no, "pair indices start at 1"), Ok)
                })
                .collect::<Result<_, _>>()?;
            levels.push(PeelLevel {
                j: parse_number(no, j, "a level number")?,
                m_set,
                removed: BTreeMap::new(),
                b_family: BTreeMap::new(),
                repairs: Vec::new(),
            });
            continue;
        }
        let Some(level) = levels.last_mut() else {
            return err(no, format!("`{keyword}` line before any `level` line"));
        };
        match keyword {
            "removed" => {
                let (i, x) = rest
                    .split_once("->")
                    .map_or_else(|| err(no, "expected `removed <i> -> <x>`"), Ok)?;
                let i = parse_index(no, i)?;
                let x = parse_number(no, x, "an element label")?;
                if level.removed.insert(i, x).is_some() {
                    return err(no, format!("pair {} removed twice", i + 1));
                }
            }
            "B" => {
                let (i, set) = rest
                    .split_once('=')
                    .map_or_else(|| err(no, "expected `B <i> = {...}`"), Ok)?;
                let i = parse_index(no, i)?;
                if level.b_family.insert(i, parse_set(no, set)?).is_some() {
                    return err(no, format!("B {} given twice", i + 1));
                }
            }
            "repair" => {
                let (v, change) = rest
                    .split_once(':')
                    .map_or_else(|| err(no, "expected `repair <v> : <old> -> <new>`"), Ok)?;
                let (old, new) = change
                    .split_once("->")
                    .map_or_else(|| err(no, "expected `<old> -> <new>`"), Ok)?;
                level.repairs.push(Repair {
                    v: parse_index(no, v)?,
                    old: parse_number(no, old, "an element label")?,
                    new: parse_number(no, new, "an element label")?,
                });
            }
            other => return err(no, format!("unknown line kind `{other}`")),
        }
    }
    Ok(PeelCertificate {
        input,
        a,
        b,
        levels,
    })
}
