//! Tracing a line of the original text into a regenerated text through a
//! longest-common-subsequence line diff.

use similar::{capture_diff_slices, Algorithm, DiffOp};

/// Line in `mutated` that corresponds to `original_line` (1-based) in
/// `original`. Lines inside an equal block shift by the block offset; lines
/// inside a replaced block map to the same offset within the replacement,
/// clamped to its last line; deleted lines map to the line that now follows
/// the deletion. The result is always within `1..=max(1, line count)`.
pub fn map_mutant_line(original: &str, mutated: &str, original_line: usize) -> usize {
    let old: Vec<&str> = original.lines().collect();
    let new: Vec<&str> = mutated.lines().collect();
    let upper = new.len().max(1);
    if original_line == 0 {
        return 1;
    }
    let idx = original_line - 1;
    if idx >= old.len() {
        return original_line.min(upper);
    }
    let mapped = capture_diff_slices(Algorithm::Lcs, &old, &new)
        .into_iter()
        .find_map(|op| match op {
            DiffOp::Equal { old_index, new_index, len } if (old_index..old_index + len).contains(&idx) => {
                Some(new_index + (idx - old_index))
            }
            DiffOp::Delete { old_index, old_len, new_index } if (old_index..old_index + old_len).contains(&idx) => {
                Some(new_index)
            }
            DiffOp::Replace { old_index, old_len, new_index, new_len }
                if (old_index..old_index + old_len).contains(&idx) =>
            {
                Some(new_index + (idx - old_index).min(new_len - 1))
            }
            _ => None,
        })
        .unwrap_or(idx);
    (mapped + 1).clamp(1, upper)
}
