//! Batch experiments, success tables and function verification reports.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolfn::{
    algebraic_degree, is_bent, is_homogeneous, mobius_transform, nonlinearity, walsh_hadamard,
    AnfVector, TruthTable,
};
use crate::encodings::Encoding;
use crate::engine::{run_sst, EngineConfig, FitnessKind, RunResult};
use crate::error::{Error, Result};
use crate::fitness::{fit_bent, FitnessValue};

/// File holding every run record of a batch, one JSON object per line.
pub const RUNS_FILE: &str = "runs.jsonl";
/// Success table accumulated across batches sharing an output directory.
pub const SUCCESS_TABLE_FILE: &str = "success_table.csv";

/// `runs` independent engine runs; run `i` uses seed `base_seed + i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    /// The engine's own `seed` field is ignored.
    pub engine: EngineConfig,
    pub runs: usize,
    pub base_seed: u64,
    pub output_path: PathBuf,
}

impl ExperimentSpec {
    pub fn batch_dir(&self) -> PathBuf {
        self.output_path.join(&self.name)
    }

    pub fn row(&self) -> RowLabel {
        match self.engine.k {
            Some(k) if self.engine.encoding == Encoding::Wanf || self.engine.fitness == FitnessKind::BentK => {
                RowLabel::Terms(k)
            }
            _ => RowLabel::Unrestricted,
        }
    }

    pub fn column(&self) -> String {
        let mut label = self.engine.encoding.label().to_string();
        if self.engine.local_search.is_some() {
            label.push_str("/LS");
        }
        label
    }
}

#[derive(Clone, Debug)]
pub struct BatchOutcome {
    pub results: Vec<RunResult>,
    pub successes: usize,
    pub table: SuccessTable,
}

/// JSON line of one run record.
pub fn record_line(result: &RunResult) -> Result<String> {
    Ok(serde_json::to_string(result)?)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Runs a batch on up to `workers` threads. Each run writes its own record
/// file as soon as it finishes; once all runs are done the records are
/// concatenated into [`RUNS_FILE`] and the success table is updated. A
/// failing run aborts the batch and leaves the finished records in place.
pub fn run_experiment(spec: &ExperimentSpec, workers: usize) -> Result<BatchOutcome> {
    if spec.runs == 0 {
        return Err(Error::Config("runs must be at least 1".into()));
    }
    spec.engine.validate()?;
    let dir = spec.batch_dir();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<RunResult> = pool.install(|| {
        (0..spec.runs)
            .into_par_iter()
            .map(|i| {
                let mut config = spec.engine.clone();
                config.seed = spec.base_seed.wrapping_add(i as u64);
                let result = run_sst(&config)?;
                let mut line = record_line(&result)?;
                line.push('\n');
                write_file(&dir.join(format!("run_{i:03}.json")), &line)?;
                Ok(result)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut all = String::new();
    for r in &results {
        all.push_str(&record_line(r)?);
        all.push('\n');
    }
    write_file(&dir.join(RUNS_FILE), &all)?;

    let successes = results.iter().filter(|r| r.success).count();
    let table_path = spec.output_path.join(SUCCESS_TABLE_FILE);
    let mut table = if table_path.exists() {
        let text = fs::read_to_string(&table_path).map_err(|e| Error::io(&table_path, e))?;
        SuccessTable::from_csv(&text)?
    } else {
        SuccessTable::default()
    };
    table.insert(spec.engine.n, spec.row(), &spec.column(), successes, spec.runs);
    write_file(&table_path, &table.to_csv())?;

    Ok(BatchOutcome {
        results,
        successes,
        table,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowLabel {
    Unrestricted,
    Terms(usize),
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowLabel::Unrestricted => f.write_str("unrestricted"),
            RowLabel::Terms(k) => write!(f, "{k}"),
        }
    }
}

/// Standard column order; other labels sort after these alphabetically.
pub const COLUMNS: [&str; 6] = ["GP", "TT", "rANF", "wANF", "rANF/LS", "wANF/LS"];

/// Success counts keyed by `(n, row)` and encoding column.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuccessTable {
    cells: BTreeMap<(usize, RowLabel), BTreeMap<String, (usize, usize)>>,
}

impl SuccessTable {
    pub fn insert(&mut self, n: usize, row: RowLabel, column: &str, successes: usize, runs: usize) {
        self.cells
            .entry((n, row))
            .or_default()
            .insert(column.to_string(), (successes, runs));
    }

    pub fn get(&self, n: usize, row: RowLabel, column: &str) -> Option<(usize, usize)> {
        self.cells.get(&(n, row))?.get(column).copied()
    }

    fn columns(&self) -> Vec<String> {
        let mut extra: Vec<String> = self
            .cells
            .values()
            .flat_map(|c| c.keys().cloned())
            .filter(|c| !COLUMNS.contains(&c.as_str()))
            .collect();
        extra.sort();
        extra.dedup();
        COLUMNS.iter().map(|s| s.to_string()).chain(extra).collect()
    }

    /// Cells read `successes/runs`; weighted-ANF cells of unrestricted rows
    /// read `--` and cells never run are empty.
    pub fn to_csv(&self) -> String {
        let columns = self.columns();
        let mut out = format!("vars,weight,{}\n", columns.join(","));
        for ((n, row), cells) in &self.cells {
            let rendered: Vec<String> = columns
                .iter()
                .map(|c| match cells.get(c) {
                    Some((s, r)) => format!("{s}/{r}"),
                    None if *row == RowLabel::Unrestricted && c.starts_with("wANF") => "--".into(),
                    None => String::new(),
                })
                .collect();
            out.push_str(&format!("{n},{row},{}\n", rendered.join(",")));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        let columns: Vec<&str> = header.split(',').skip(2).collect();
        let mut table = SuccessTable::default();
        for (lineno, line) in lines.enumerate() {
            let bad = |msg: &str| Error::Parse {
                position: lineno + 1,
                message: format!("success table line {}: {msg}", lineno + 2),
            };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != columns.len() + 2 {
                return Err(bad("wrong number of fields"));
            }
            let n: usize = fields[0].parse().map_err(|_| bad("bad vars"))?;
            let row = match fields[1] {
                "unrestricted" => RowLabel::Unrestricted,
                k => RowLabel::Terms(k.parse().map_err(|_| bad("bad weight"))?),
            };
            for (col, cell) in columns.iter().zip(&fields[2..]) {
                if let Some((s, r)) = cell.split_once('/') {
                    let s = s.parse().map_err(|_| bad("bad count"))?;
                    let r = r.parse().map_err(|_| bad("bad run count"))?;
                    table.insert(n, row, col, s, r);
                }
            }
        }
        Ok(table)
    }
}

/// Properties of one function, as printed by `verify`.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub n: usize,
    pub target_degree: usize,
    pub degree: usize,
    pub homogeneous: bool,
    pub terms: usize,
    pub nonlinearity: u32,
    pub bent: bool,
    pub fit_bent: FitnessValue,
    pub anf: AnfVector,
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n: {}, bent: {}, nl: {}, degree: {}, homogeneous({}): {}, terms: {}, fit_bent: {}",
            self.n,
            self.bent,
            self.nonlinearity,
            self.degree,
            self.target_degree,
            self.homogeneous,
            self.terms,
            self.fit_bent
        )
    }
}

/// Input formats accepted by [`parse_function`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionFormat {
    /// Monomial form if the text mentions a variable, hex otherwise.
    Auto,
    Hex,
    Anf,
}

/// Reads a function from hex truth-table text or monomial-form ANF. For
/// ANF input `n` defaults to the largest variable index present.
pub fn parse_function(text: &str, format: FunctionFormat, n: Option<usize>) -> Result<TruthTable> {
    let text = text.trim();
    let anf_like = text.contains('x');
    match (format, anf_like) {
        (FunctionFormat::Hex, _) | (FunctionFormat::Auto, false) => {
            let tt = TruthTable::from_hex(text)?;
            if let Some(n) = n {
                if tt.n() != n {
                    return Err(Error::InvalidInput(format!(
                        "hex input describes n = {}, expected n = {n}",
                        tt.n()
                    )));
                }
            }
            Ok(tt)
        }
        _ => {
            let n = match n {
                Some(n) => n,
                None => max_variable(text).ok_or(Error::Parse {
                    position: 0,
                    message: "cannot infer n from an ANF without variables; pass n".into(),
                })?,
            };
            Ok(crate::boolfn::anf_to_truth_table(&AnfVector::parse_monomials(n, text)?))
        }
    }
}

fn max_variable(text: &str) -> Option<usize> {
    text.split(|c: char| !c.is_ascii_alphanumeric())
        .filter_map(|tok| tok.strip_prefix('x')?.parse::<usize>().ok())
        .max()
}

pub fn verify_function(tt: &TruthTable, d: usize) -> VerifyReport {
    let anf = mobius_transform(tt);
    let spec = walsh_hadamard(tt);
    VerifyReport {
        n: tt.n(),
        target_degree: d,
        degree: algebraic_degree(&anf),
        homogeneous: is_homogeneous(&anf, d),
        terms: anf.monomial_count(),
        nonlinearity: nonlinearity(&spec),
        bent: is_bent(&spec),
        fit_bent: fit_bent(tt),
        anf,
    }
}
