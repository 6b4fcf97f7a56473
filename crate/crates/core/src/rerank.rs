//! Consensus reranking of code candidates against test suites.

use std::sync::Arc;

use serde::Serialize;

use crate::exec::{discover_tests, ExecError, Executor, Job, Status};
use crate::syntax::parse_source;

/// An identified source text: a code candidate or a test module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Named {
    pub id: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsensusMatrix {
    pub candidates: Vec<String>,
    pub suites: Vec<String>,
    pub grid: Vec<Vec<u8>>,
    pub scores: Vec<u32>,
}

impl ConsensusMatrix {
    pub fn from_grid(candidates: Vec<String>, suites: Vec<String>, grid: Vec<Vec<u8>>) -> Self {
        let scores = grid.iter().map(|row| row.iter().map(|&v| u32::from(v)).sum()).collect();
        ConsensusMatrix {
            candidates,
            suites,
            grid,
            scores,
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            grid: &'a [Vec<u8>],
            scores: &'a [u32],
            selected: &'a str,
        }
        let selected = &self.candidates[select_best(self)];
        let mut s = serde_json::to_string_pretty(&Report {
            grid: &self.grid,
            scores: &self.scores,
            selected,
        })
        .expect("report serialises");
        s.push('\n');
        s
    }
}

/// Index of the highest score, lowest index on ties.
pub fn select_best(matrix: &ConsensusMatrix) -> usize {
    let mut best = 0;
    for (i, &s) in matrix.scores.iter().enumerate() {
        if s > matrix.scores[best] {
            best = i;
        }
    }
    best
}

/// Cell (i, j) is 1 when candidate i passes every method of suite j. A suite
/// without methods contributes a zero column and a candidate that does not
/// parse gets a zero row; neither is executed.
pub fn build_consensus(exec: &Executor, candidates: &[Named], suites: &[Named]) -> Result<ConsensusMatrix, ExecError> {
    let methods: Vec<Vec<String>> = suites
        .iter()
        .map(|s| discover_tests(&s.source).into_iter().map(|m| m.id).collect())
        .collect();
    let modules: Vec<Arc<str>> = suites.iter().map(|s| Arc::from(s.source.as_str())).collect();
    let runnable: Vec<usize> = (0..candidates.len())
        .filter(|&i| parse_source(&candidates[i].source).is_ok())
        .collect();
    let batches: Vec<Vec<Job>> = runnable
        .iter()
        .map(|&i| {
            let code: Arc<str> = candidates[i].source.as_str().into();
            methods
                .iter()
                .enumerate()
                .flat_map(|(j, ms)| {
                    let code = code.clone();
                    let tests = modules[j].clone();
                    ms.iter().map(move |m| Job {
                        code: code.clone(),
                        tests: tests.clone(),
                        method: m.clone(),
                    })
                })
                .collect()
        })
        .collect();
    let results = exec.run_batches(&batches)?;
    let mut grid = vec![vec![0u8; suites.len()]; candidates.len()];
    for (&i, verdicts) in runnable.iter().zip(results) {
        let mut it = verdicts.into_iter();
        for (j, ms) in methods.iter().enumerate() {
            let mut all_pass = !ms.is_empty();
            for _ in ms {
                let v = it.next().expect("one verdict per job");
                all_pass &= v.status == Status::Pass;
            }
            grid[i][j] = u8::from(all_pass);
        }
    }
    Ok(ConsensusMatrix::from_grid(
        candidates.iter().map(|c| c.id.clone()).collect(),
        suites.iter().map(|s| s.id.clone()).collect(),
        grid,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_with_ties() {
        let m = ConsensusMatrix::from_grid(
            vec!["a".into(), "b".into()],
            vec!["s".into(), "t".into()],
            vec![vec![1, 1], vec![1, 0]],
        );
        assert_eq!(m.scores, [2, 1]);
        assert_eq!(select_best(&m), 0);
        let zero = ConsensusMatrix::from_grid(vec!["a".into(), "b".into()], vec!["s".into()], vec![vec![0], vec![0]]);
        assert_eq!(select_best(&zero), 0);
        assert!(m.to_json().contains("\"selected\": \"a\""));
    }
}
