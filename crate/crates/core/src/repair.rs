//! Recovering code from raw model output.

use crate::syntax::{parse_source, SyntaxError};

pub const DEFAULT_MAX_BACKTRACK: usize = 80;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no parseable prefix: {last}")]
pub struct RepairFailed {
    /// Diagnostic from the shortest prefix that was tried.
    pub last: SyntaxError,
}

/// Contents of the first ``` fenced block, language tag dropped. An
/// unclosed fence yields everything after it; text without a fence is
/// returned unchanged.
pub fn extract_code_block(raw: &str) -> String {
    let Some(open) = raw.find("```") else {
        return raw.to_string();
    };
    let after = &raw[open + 3..];
    let body = match after.find('\n') {
        Some(nl) => &after[nl + 1..],
        None => return String::new(),
    };
    let mut offset = 0;
    for line in body.split_inclusive('\n') {
        if line.trim_start().starts_with("```") {
            return body[..offset].to_string();
        }
        offset += line.len();
    }
    body.to_string()
}

/// Returns `code` if it parses, otherwise the longest line prefix that
/// parses after dropping between 1 and `max_backtrack` trailing lines. A
/// prefix always keeps at least one line.
pub fn backtrack_repair(code: &str, max_backtrack: usize) -> Result<String, RepairFailed> {
    let mut last = match parse_source(code) {
        Ok(_) => return Ok(code.to_string()),
        Err(e) => e,
    };
    let ends: Vec<usize> = code.match_indices('\n').map(|(i, _)| i).collect();
    // dropping k lines keeps the text before the k-th newline from the end
    for k in 1..=max_backtrack.min(ends.len()) {
        let prefix = &code[..ends[ends.len() - k]];
        match parse_source(prefix) {
            Ok(_) => return Ok(prefix.to_string()),
            Err(e) => last = e,
        }
    }
    Err(RepairFailed { last })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extraction() {
        assert_eq!(extract_code_block("hi\n```python\nx = 1\n```\nbye"), "x = 1\n");
        assert_eq!(extract_code_block("```\na\n```\n```\nb\n```"), "a\n");
        assert_eq!(extract_code_block("plain"), "plain");
        assert_eq!(extract_code_block("```py\nx = 1\ny = ("), "x = 1\ny = (");
    }

    #[test]
    fn repair_cases() {
        assert_eq!(backtrack_repair("x = 1\n", 80).unwrap(), "x = 1\n");
        assert_eq!(backtrack_repair("x = 1\ny = 'abc", 80).unwrap(), "x = 1");
        let garbage = format!("x = 1\n{}", "(\n".repeat(100));
        assert!(backtrack_repair(&garbage, DEFAULT_MAX_BACKTRACK).is_err());
        assert!(backtrack_repair("def f(", 80).is_err());
    }

    #[test]
    fn budget_counts_blank_lines() {
        let code = "x = 1\ny = (\n\n\n";
        assert!(backtrack_repair(code, 3).is_err());
        assert_eq!(backtrack_repair(code, 4).unwrap(), "x = 1");
    }
}
