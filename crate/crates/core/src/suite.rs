//! Mutation score, greedy suite selection and minimization, utility curves.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::exec::KillMatrix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SuiteError {
    #[error("mutation score is undefined for an empty mutant pool")]
    EmptyMutantPool,
    #[error("unknown test {0:?}")]
    UnknownTest(String),
    #[error("test {0:?} appears more than once")]
    DuplicateTest(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult {
    pub order: Vec<String>,
    pub gains: Vec<f64>,
    /// Covered mutants in matrix column order.
    pub covered: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub step: usize,
    pub test_id: String,
    pub marginal_gain: f64,
    pub cumulative_score: f64,
}

fn indices(matrix: &KillMatrix, ids: &[String]) -> Result<Vec<usize>, SuiteError> {
    ids.iter()
        .map(|id| matrix.test_index(id).ok_or_else(|| SuiteError::UnknownTest(id.clone())))
        .collect()
}

fn gain(row: &FixedBitSet, covered: &FixedBitSet, weights: &[f64]) -> f64 {
    row.difference(covered).map(|m| weights[m]).sum()
}

fn ratio(covered: &FixedBitSet, pool: usize) -> f64 {
    if pool == 0 {
        0.0
    } else {
        covered.count_ones(..) as f64 / pool as f64
    }
}

fn ids_of(matrix: &KillMatrix, covered: &FixedBitSet) -> Vec<String> {
    covered.ones().map(|m| matrix.mutants[m].clone()).collect()
}

/// Fraction of mutants killed by at least one test of `suite`.
pub fn mutation_score(matrix: &KillMatrix, suite: &[String]) -> Result<f64, SuiteError> {
    let idx = indices(matrix, suite)?;
    if matrix.mutants.is_empty() {
        return Err(SuiteError::EmptyMutantPool);
    }
    let mut covered = FixedBitSet::with_capacity(matrix.mutants.len());
    for t in idx {
        covered.union_with(&matrix.kill_row(t));
    }
    Ok(ratio(&covered, matrix.mutants.len()))
}

fn greedy(rows: &[(usize, FixedBitSet)], weights: &[f64], k: usize, width: usize) -> (Vec<usize>, Vec<f64>, FixedBitSet) {
    let mut covered = FixedBitSet::with_capacity(width);
    let mut picked = vec![false; rows.len()];
    let mut order = Vec::new();
    let mut gains = Vec::new();
    while order.len() < k {
        let mut best: Option<(usize, f64)> = None;
        for (i, (_, row)) in rows.iter().enumerate() {
            if picked[i] {
                continue;
            }
            let g = gain(row, &covered, weights);
            if best.is_none_or(|(_, bg)| g > bg) {
                best = Some((i, g));
            }
        }
        match best {
            Some((i, g)) if g > 0.0 => {
                picked[i] = true;
                covered.union_with(&rows[i].1);
                order.push(i);
                gains.push(g);
            }
            _ => break,
        }
    }
    (order, gains, covered)
}

/// Picks up to `k` tests, each maximizing the weighted gain over mutants not
/// yet covered. Ties go to the lowest test index; a zero best gain stops.
pub fn greedy_select(matrix: &KillMatrix, k: usize) -> SelectionResult {
    let rows: Vec<(usize, FixedBitSet)> = (0..matrix.tests.len()).map(|t| (t, matrix.kill_row(t))).collect();
    let (order, gains, covered) = greedy(&rows, &matrix.weights, k, matrix.mutants.len());
    SelectionResult {
        order: order.into_iter().map(|i| matrix.tests[rows[i].0].clone()).collect(),
        gains,
        covered: ids_of(matrix, &covered),
    }
}

/// A subset of `suite` with the same covered mutants and no test whose
/// removal would keep that coverage. Returned in matrix test order.
pub fn minimize_suite(matrix: &KillMatrix, suite: &[String]) -> Result<Vec<String>, SuiteError> {
    let mut idx = indices(matrix, suite)?;
    idx.sort_unstable();
    idx.dedup();
    let rows: Vec<(usize, FixedBitSet)> = idx.iter().map(|&t| (t, matrix.kill_row(t))).collect();
    let (order, _, covered) = greedy(&rows, &matrix.weights, usize::MAX, matrix.mutants.len());
    let mut keep: Vec<usize> = order.clone();
    for &i in order.iter().rev() {
        let mut without = FixedBitSet::with_capacity(matrix.mutants.len());
        for &j in &keep {
            if j != i {
                without.union_with(&rows[j].1);
            }
        }
        if without == covered {
            keep.retain(|&j| j != i);
        }
    }
    let mut tests: Vec<usize> = keep.into_iter().map(|i| rows[i].0).collect();
    tests.sort_unstable();
    Ok(tests.into_iter().map(|t| matrix.tests[t].clone()).collect())
}

/// Per-step weighted marginal gain and cumulative mutation score along
/// `order`. The score column is 0 for an empty mutant pool.
pub fn utility_curve(matrix: &KillMatrix, order: &[String]) -> Result<Vec<CurvePoint>, SuiteError> {
    let mut seen = HashSet::new();
    for id in order {
        if !seen.insert(id.as_str()) {
            return Err(SuiteError::DuplicateTest(id.clone()));
        }
    }
    let idx = indices(matrix, order)?;
    let mut covered = FixedBitSet::with_capacity(matrix.mutants.len());
    let mut out = Vec::with_capacity(idx.len());
    for (step, t) in idx.into_iter().enumerate() {
        let row = matrix.kill_row(t);
        let g = gain(&row, &covered, &matrix.weights);
        covered.union_with(&row);
        out.push(CurvePoint {
            step: step + 1,
            test_id: matrix.tests[t].clone(),
            marginal_gain: g,
            cumulative_score: ratio(&covered, matrix.mutants.len()),
        });
    }
    Ok(out)
}

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["step", "test_id", "marginal_gain", "cumulative_score"])
        .expect("in-memory write");
    for p in points {
        w.write_record([
            p.step.to_string(),
            p.test_id.clone(),
            p.marginal_gain.to_string(),
            p.cumulative_score.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

#[derive(Serialize)]
struct SelectionReport<'a> {
    order: &'a [String],
    gains: &'a [f64],
    score: f64,
}

/// `{order, gains, score}` where score is the mutation score of `order`
/// (0 for an empty mutant pool).
pub fn selection_json(matrix: &KillMatrix, order: &[String], gains: &[f64]) -> Result<String, SuiteError> {
    let score = match mutation_score(matrix, order) {
        Err(SuiteError::EmptyMutantPool) => 0.0,
        other => other?,
    };
    let mut s = serde_json::to_string_pretty(&SelectionReport { order, gains, score }).expect("report serialises");
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> KillMatrix {
        let k = |ms: &[usize]| (0..6).map(|m| ms.contains(&m)).collect::<Vec<_>>();
        KillMatrix::from_kills(
            ["T1", "T2", "T3", "T4"].map(String::from).to_vec(),
            (1..=6).map(|m| format!("m{m}")).collect(),
            vec![1.0; 6],
            &[k(&[0, 1]), k(&[1, 2]), k(&[0]), k(&[])],
        )
    }

    fn ids(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn scores() {
        let m = fixture();
        assert_eq!(mutation_score(&m, &[]).unwrap(), 0.0);
        assert_eq!(mutation_score(&m, &m.tests).unwrap(), 0.5);
        assert_eq!(mutation_score(&m, &ids(&["T9"])), Err(SuiteError::UnknownTest("T9".into())));
        let empty = KillMatrix::from_kills(ids(&["T"]), vec![], vec![], &[vec![]]);
        assert_eq!(mutation_score(&empty, &[]), Err(SuiteError::EmptyMutantPool));
    }

    #[test]
    fn greedy_examples() {
        let m = fixture();
        assert!(greedy_select(&m, 0).order.is_empty());
        let s = greedy_select(&m, 10);
        assert_eq!(s.order, ids(&["T1", "T2"]));
        assert_eq!(s.gains, [2.0, 1.0]);
        assert_eq!(s.covered, ids(&["m1", "m2", "m3"]));
    }

    #[test]
    fn minimize_examples() {
        let m = fixture();
        assert_eq!(minimize_suite(&m, &m.tests).unwrap(), ids(&["T1", "T2"]));
        assert_eq!(minimize_suite(&m, &ids(&["T4"])).unwrap(), Vec::<String>::new());
        assert_eq!(minimize_suite(&m, &ids(&["T3"])).unwrap(), ids(&["T3"]));
    }

    #[test]
    fn curve_in_index_order() {
        let m = fixture();
        let c = utility_curve(&m, &m.tests).unwrap();
        let gains: Vec<f64> = c.iter().map(|p| p.marginal_gain).collect();
        assert_eq!(gains, [2.0, 1.0, 0.0, 0.0]);
        assert_eq!(c[3].cumulative_score, 0.5);
        assert_eq!(utility_curve(&m, &ids(&["T1", "T1"])), Err(SuiteError::DuplicateTest("T1".into())));
        assert!(curve_csv(&c).starts_with("step,test_id,marginal_gain,cumulative_score\n1,T1,2,"));
    }
}
