//! Text set files: optional `#` comment lines, then one decimal integer per
//! line in strictly increasing order.
//!
//! ```text
//! # progression-free set
//! # n_limit=1000
//! # size=3
//! 1
//! 2
//! 4
//! ```
//!
//! A `# n_limit=<N>` comment, when present, fixes the range checked by the
//! parser; otherwise only zero is out of range.

use std::io::{self, Write};

use crate::apcore::CandidateSet;
use crate::error::SetError;

pub fn write_set<W: Write>(w: &mut W, set: &CandidateSet) -> io::Result<()> {
    writeln!(w, "# progression-free set")?;
    writeln!(w, "# n_limit={}", set.n_limit())?;
    writeln!(w, "# size={}", set.len())?;
    for v in set.elements() {
        writeln!(w, "{v}")?;
    }
    Ok(())
}

pub fn to_string(set: &CandidateSet) -> String {
    let mut buf = Vec::new();
    write_set(&mut buf, set).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

pub fn parse_set(text: &str) -> Result<CandidateSet, SetError> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut n_limit = None;
    let mut elements: Vec<u64> = Vec::new();
    if body.is_empty() {
        return Ok(CandidateSet::empty(0));
    }
    for (i, line) in body.split('\n').enumerate() {
        let line_no = i + 1;
        if elements.is_empty() {
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(v) = comment.trim().strip_prefix("n_limit=") {
                    n_limit = Some(parse_number(v, line_no)?);
                }
                continue;
            }
        }
        let value = parse_number(line, line_no)?;
        if let Some(&previous) = elements.last() {
            if value == previous {
                return Err(SetError::Duplicate { value });
            }
            if value < previous {
                return Err(SetError::Unsorted { previous, value });
            }
        }
        let limit = n_limit.unwrap_or(u64::MAX);
        if value == 0 || value > limit {
            return Err(SetError::OutOfRange { value, n_limit: limit });
        }
        elements.push(value);
    }
    let n = n_limit.unwrap_or_else(|| elements.last().copied().unwrap_or(0));
    CandidateSet::new(n, elements)
}

fn parse_number(text: &str, line: usize) -> Result<u64, SetError> {
    let bad = || SetError::Parse {
        line,
        text: text.to_string(),
    };
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    text.parse().map_err(|_| bad())
}
