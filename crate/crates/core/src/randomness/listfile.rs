//! List files: optional `#` comment lines, a header line `n k source_tag`,
//! then either one decimal value per line or the raw packed payload.

use std::io::{BufRead, Write};

use super::encoding::EncodedList;
use crate::error::{QkmError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListFormat {
    Decimal,
    Bits,
}

pub fn write_list<W: Write>(mut w: W, list: &EncodedList, format: ListFormat) -> Result<()> {
    let tag = if list.source_tag().is_empty() { "-" } else { list.source_tag() };
    if tag.contains(char::is_whitespace) {
        return Err(QkmError::Format(format!("source tag `{tag}` contains whitespace")));
    }
    writeln!(w, "{} {} {}", list.n(), list.k(), tag)?;
    match format {
        ListFormat::Decimal => {
            for v in list.decode() {
                writeln!(w, "{v}")?;
            }
        }
        ListFormat::Bits => w.write_all(list.payload())?,
    }
    w.flush()?;
    Ok(())
}

pub fn read_list<R: BufRead>(mut r: R, format: ListFormat) -> Result<EncodedList> {
    let mut header = String::new();
    loop {
        header.clear();
        if r.read_line(&mut header)? == 0 || !header.starts_with('#') {
            break;
        }
    }
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [n, k, tag] = fields[..] else {
        return Err(QkmError::Format(format!("bad header `{}`", header.trim_end())));
    };
    let n: usize = n.parse().map_err(|_| QkmError::Format(format!("bad count `{n}`")))?;
    let k: u32 = k.parse().map_err(|_| QkmError::Format(format!("bad width `{k}`")))?;
    let tag = if tag == "-" { "" } else { tag };
    match format {
        ListFormat::Decimal => {
            let mut values = Vec::with_capacity(n);
            for line in r.lines() {
                let line = line?;
                let t = line.trim();
                if t.is_empty() {
                    continue;
                }
                values.push(t.parse::<u64>().map_err(|_| QkmError::Format(format!("bad value `{t}`")))?);
            }
            if values.len() != n {
                return Err(QkmError::Format(format!("header says {n} values, found {}", values.len())));
            }
            EncodedList::encode(&values, Some(k), tag).map_err(|e| QkmError::Format(e.to_string()))
        }
        ListFormat::Bits => {
            let mut payload = Vec::new();
            r.read_to_end(&mut payload)?;
            EncodedList::from_payload(n, k, payload, tag)
        }
    }
}
