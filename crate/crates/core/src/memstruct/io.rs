//! Text format:
//!
//! ```text
//! # comment
//! nodes 3
//! mem 0 2        # 0 ∈ 2
//! label 2 {∅}
//! ```

use super::MemStructure;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct StructParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> StructParseError {
    StructParseError { line, message: message.into() }
}

impl FromStr for MemStructure {
    type Err = StructParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut s: Option<MemStructure> = None;
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            let num = |t: &str| t.parse::<usize>().map_err(|_| err(lineno, format!("bad node id `{t}`")));
            match kw {
                "nodes" => {
                    if s.is_some() {
                        return Err(err(lineno, "duplicate `nodes` line"));
                    }
                    s = Some(MemStructure::new(num(rest)?));
                }
                "mem" => {
                    let st = s.as_mut().ok_or_else(|| err(lineno, "`mem` before `nodes`"))?;
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(err(lineno, "expected `mem Z X`"));
                    }
                    st.add_edge(num(parts[0])?, num(parts[1])?)
                        .map_err(|e| err(lineno, e.to_string()))?;
                }
                "label" => {
                    let st = s.as_mut().ok_or_else(|| err(lineno, "`label` before `nodes`"))?;
                    let (id, name) = rest
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| err(lineno, "expected `label X name`"))?;
                    st.set_label(num(id)?, name.trim()).map_err(|e| err(lineno, e.to_string()))?;
                }
                other => return Err(err(lineno, format!("unknown directive `{other}`"))),
            }
        }
        s.ok_or_else(|| err(0, "missing `nodes` line"))
    }
}

impl fmt::Display for MemStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes {}", self.len())?;
        for (z, x) in self.edges() {
            writeln!(f, "mem {z} {x}")?;
        }
        for x in self.nodes() {
            if let Some(l) = self.label(x) {
                writeln!(f, "label {x} {l}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints() {
        let text = "# two empties and a pair\nnodes 3\n\nmem 0 2\nmem 1 2  # both\nlabel 2 pair\n";
        let s: MemStructure = text.parse().unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.contains(2, 0) && s.contains(2, 1));
        assert_eq!(s.label(2), Some("pair"));
        let back: MemStructure = s.to_string().parse().unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn reports_line_numbers() {
        assert_eq!("nodes 2\nmem 0 5\n".parse::<MemStructure>().unwrap_err().line, 2);
        assert_eq!("mem 0 1\n".parse::<MemStructure>().unwrap_err().line, 1);
        assert!("nodes x".parse::<MemStructure>().is_err());
        assert!("".parse::<MemStructure>().is_err());
        assert!("nodes 1\nfrob 0\n".parse::<MemStructure>().is_err());
    }
}
