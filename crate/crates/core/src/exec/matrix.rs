use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::{discover_tests, ExecError, Executor, Job, Status, TestMethod, Verdict};
use crate::mutation::Mutant;

/// `mutant_id` used in CSV rows that hold a test's verdict on the source.
pub const SOURCE_ROW: &str = "@source";
const SKIPPED: &str = "SKIPPED";
const HEADER: [&str; 4] = ["test_id", "mutant_id", "status", "duration_s"];

/// Verdicts of each test method against the source and each mutant. A cell
/// is `None` when it was not evaluated, which happens exactly for tests that
/// do not pass on the source.
#[derive(Debug, Clone, PartialEq)]
pub struct KillMatrix {
    pub tests: Vec<String>,
    pub mutants: Vec<String>,
    pub source_verdicts: Vec<Verdict>,
    pub grid: Vec<Vec<Option<Verdict>>>,
    pub weights: Vec<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum MatrixError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("row {row}: {message}")]
    Format { row: usize, message: String },
    #[error("test {0:?} has no {SOURCE_ROW} row")]
    MissingSource(String),
}

impl KillMatrix {
    /// A matrix where every test passes on the source and `kills[t][m]`
    /// says whether test `t` fails on mutant `m`.
    pub fn from_kills(tests: Vec<String>, mutants: Vec<String>, weights: Vec<f64>, kills: &[Vec<bool>]) -> Self {
        assert_eq!(kills.len(), tests.len(), "one kill row per test");
        assert_eq!(weights.len(), mutants.len(), "one weight per mutant");
        let grid = kills
            .iter()
            .map(|row| {
                assert_eq!(row.len(), mutants.len(), "one cell per mutant");
                row.iter()
                    .map(|&k| Some(Verdict::with_status(if k { Status::Fail } else { Status::Pass })))
                    .collect()
            })
            .collect();
        KillMatrix {
            source_verdicts: vec![Verdict::pass(); tests.len()],
            tests,
            mutants,
            grid,
            weights,
        }
    }

    pub fn test_index(&self, id: &str) -> Option<usize> {
        self.tests.iter().position(|t| t == id)
    }

    pub fn mutant_index(&self, id: &str) -> Option<usize> {
        self.mutants.iter().position(|m| m == id)
    }

    pub fn kills(&self, test: usize, mutant: usize) -> bool {
        self.source_verdicts[test].status == Status::Pass
            && self.grid[test][mutant].as_ref().is_some_and(|v| v.status.is_kill())
    }

    pub fn kill_row(&self, test: usize) -> FixedBitSet {
        let mut row = FixedBitSet::with_capacity(self.mutants.len());
        for m in 0..self.mutants.len() {
            if self.kills(test, m) {
                row.insert(m);
            }
        }
        row
    }

    pub fn killed_ids(&self, test: usize) -> Vec<String> {
        self.kill_row(test).ones().map(|m| self.mutants[m].clone()).collect()
    }

    pub fn weight_map(&self) -> HashMap<String, f64> {
        self.mutants.iter().cloned().zip(self.weights.iter().copied()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(HEADER).expect("in-memory write");
        let dur = |d: f64| format!("{d:.6}");
        for (t, test) in self.tests.iter().enumerate() {
            let sv = &self.source_verdicts[t];
            w.write_record([test.as_str(), SOURCE_ROW, sv.status.as_str(), &dur(sv.duration)])
                .expect("in-memory write");
            for (m, mutant) in self.mutants.iter().enumerate() {
                match &self.grid[t][m] {
                    Some(v) => w.write_record([test.as_str(), mutant.as_str(), v.status.as_str(), &dur(v.duration)]),
                    None => w.write_record([test.as_str(), mutant.as_str(), SKIPPED, &dur(0.0)]),
                }
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    /// Reads the CSV export. With a manifest, mutant order and weights come
    /// from it and rows naming other mutants are rejected; without one,
    /// mutants appear in first-seen order with weight 1.
    pub fn from_csv(text: &str, manifest: Option<&[Mutant]>) -> Result<Self, MatrixError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != HEADER {
            return Err(MatrixError::Format {
                row: 1,
                message: format!("expected header {}", HEADER.join(",")),
            });
        }
        let mut tests: Vec<String> = Vec::new();
        let mut test_pos: HashMap<String, usize> = HashMap::new();
        let (mut mutants, mut weights): (Vec<String>, Vec<f64>) = match manifest {
            Some(ms) => (ms.iter().map(|m| m.id.clone()).collect(), ms.iter().map(|m| m.weight).collect()),
            None => (Vec::new(), Vec::new()),
        };
        let mut mutant_pos: HashMap<String, usize> = mutants.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut source: HashMap<usize, Verdict> = HashMap::new();
        let mut cells: Vec<(usize, usize, Option<Verdict>)> = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = i + 2;
            let bad = |message: String| MatrixError::Format { row, message };
            if rec.len() != 4 {
                return Err(bad(format!("expected 4 fields, got {}", rec.len())));
            }
            let t = *test_pos.entry(rec[0].to_string()).or_insert_with(|| {
                tests.push(rec[0].to_string());
                tests.len() - 1
            });
            let duration: f64 = rec[3].parse().map_err(|_| bad(format!("bad duration {:?}", &rec[3])))?;
            let verdict = if &rec[2] == SKIPPED {
                None
            } else {
                let status: Status = rec[2].parse().map_err(bad)?;
                Some(Verdict {
                    status,
                    duration,
                    detail: None,
                })
            };
            if &rec[1] == SOURCE_ROW {
                let v = verdict.ok_or_else(|| bad("source row cannot be SKIPPED".into()))?;
                source.insert(t, v);
                continue;
            }
            let m = match mutant_pos.get(&rec[1]) {
                Some(&m) => m,
                None if manifest.is_some() => return Err(bad(format!("mutant {:?} not in manifest", &rec[1]))),
                None => {
                    mutants.push(rec[1].to_string());
                    weights.push(1.0);
                    mutant_pos.insert(rec[1].to_string(), mutants.len() - 1);
                    mutants.len() - 1
                }
            };
            cells.push((t, m, verdict));
        }
        let mut source_verdicts = Vec::with_capacity(tests.len());
        for (t, id) in tests.iter().enumerate() {
            source_verdicts.push(source.remove(&t).ok_or_else(|| MatrixError::MissingSource(id.clone()))?);
        }
        let mut grid = vec![vec![None; mutants.len()]; tests.len()];
        for (t, m, v) in cells {
            grid[t][m] = v;
        }
        Ok(KillMatrix {
            tests,
            mutants,
            source_verdicts,
            grid,
            weights,
        })
    }
}

pub(crate) fn build_for_methods(
    exec: &Executor,
    source: &str,
    mutants: &[Mutant],
    tests_module: &str,
    methods: &[TestMethod],
) -> Result<KillMatrix, ExecError> {
    let tests: Arc<str> = tests_module.into();
    let jobs_for = |code: Arc<str>, which: &[usize]| -> Vec<Job> {
        which
            .iter()
            .map(|&i| Job {
                code: code.clone(),
                tests: tests.clone(),
                method: methods[i].id.clone(),
            })
            .collect()
    };
    let all: Vec<usize> = (0..methods.len()).collect();
    let source_verdicts = exec
        .run_batches(&[jobs_for(source.into(), &all)])?
        .pop()
        .unwrap_or_default();
    let passing: Vec<usize> = all
        .iter()
        .copied()
        .filter(|&i| source_verdicts[i].status == Status::Pass)
        .collect();
    let mut grid = vec![vec![None; mutants.len()]; methods.len()];
    if !passing.is_empty() && !mutants.is_empty() {
        let batches: Vec<Vec<Job>> = mutants
            .iter()
            .map(|m| jobs_for(m.mutated_source.as_str().into(), &passing))
            .collect();
        for (m, verdicts) in exec.run_batches(&batches)?.into_iter().enumerate() {
            for (&t, v) in passing.iter().zip(verdicts) {
                grid[t][m] = Some(v);
            }
        }
    }
    Ok(KillMatrix {
        tests: methods.iter().map(|m| m.id.clone()).collect(),
        mutants: mutants.iter().map(|m| m.id.clone()).collect(),
        source_verdicts,
        grid,
        weights: mutants.iter().map(|m| m.weight).collect(),
    })
}

/// Runs every discovered test method on the source, then every source-passing
/// method on every mutant.
pub fn build_kill_matrix(
    exec: &Executor,
    source: &str,
    mutants: &[Mutant],
    tests_module: &str,
) -> Result<KillMatrix, ExecError> {
    build_for_methods(exec, source, mutants, tests_module, &discover_tests(tests_module))
}

/// Mutants killed by at least one smoke-test method; all mutants when no
/// smoke module is given.
pub fn prefilter_vulnerable(
    exec: &Executor,
    source: &str,
    mutants: &[Mutant],
    smoke: Option<&str>,
) -> Result<Vec<Mutant>, ExecError> {
    match smoke {
        None => Ok(mutants.to_vec()),
        Some(module) => prefilter_with_methods(exec, source, mutants, module, &discover_tests(module)),
    }
}

/// As [`prefilter_vulnerable`], restricted to the given methods of `module`.
pub fn prefilter_with_methods(
    exec: &Executor,
    source: &str,
    mutants: &[Mutant],
    module: &str,
    methods: &[TestMethod],
) -> Result<Vec<Mutant>, ExecError> {
    let matrix = build_for_methods(exec, source, mutants, module, methods)?;
    Ok(mutants
        .iter()
        .enumerate()
        .filter(|(m, _)| (0..matrix.tests.len()).any(|t| matrix.kills(t, *m)))
        .map(|(_, mutant)| mutant.clone())
        .collect())
}
