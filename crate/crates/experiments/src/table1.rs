//! Worst-case `P_C` for the color-class patterns of small minimal
//! coalitions, and the resulting lower bound `|C| - max P_C` on `ΔS`.
//!
//! Rows name class-size patterns; `1^r` pads the pattern with singleton
//! classes up to the coalition size. Values are computed by brute force
//! over recolorings and compared with the published table.

use anyhow::{bail, Result};
use kcut_core::solver::{max_pc_config, ConfigSpec};
use serde::{Deserialize, Serialize};

use crate::report::ExperimentReport;

pub const SIZES: [usize; 5] = [4, 5, 6, 7, 8];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Row {
    pub label: &'static str,
    /// Classes of size at least two; the rest are singletons.
    pub head: &'static [usize],
    /// Published `max P_C` for each size in [`SIZES`]; `None` where the
    /// pattern does not fit.
    pub published: [Option<usize>; 5],
}

pub const ROWS: [Row; 5] = [
    Row { label: "a.1", head: &[3], published: [Some(0), Some(2), Some(3), Some(3), Some(3)] },
    Row { label: "a.2", head: &[2, 2], published: [Some(0), Some(2), Some(2), Some(2), Some(2)] },
    Row { label: "b.1", head: &[4], published: [None, Some(0), Some(4), Some(5), Some(6)] },
    Row { label: "b.2", head: &[3, 2], published: [None, Some(0), Some(3), Some(4), Some(4)] },
    Row { label: "b.3", head: &[2, 2, 2], published: [None, None, Some(3), Some(3), Some(3)] },
];

impl Row {
    /// Class sizes at coalition size `size`, or `None` when the pattern
    /// does not fit or leaves the coalition a single color.
    pub fn pattern(&self, size: usize) -> Option<ConfigSpec> {
        let head: usize = self.head.iter().sum();
        if size < head {
            return None;
        }
        let mut classes = self.head.to_vec();
        classes.extend(std::iter::repeat(1).take(size - head));
        (classes.len() >= 2).then(|| ConfigSpec::new(classes))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub row: String,
    pub size: usize,
    pub class_sizes: Option<Vec<usize>>,
    pub max_pc: Option<usize>,
    pub bound: Option<i64>,
}

/// One table cell. Sizes outside `4..=8` are rejected.
pub fn cell(row: &Row, size: usize) -> Result<Cell> {
    if !SIZES.contains(&size) {
        bail!("coalition size {size} is outside the table's range 4..=8");
    }
    let spec = row.pattern(size);
    let max_pc = spec.as_ref().map(max_pc_config).transpose()?;
    Ok(Cell {
        row: row.label.to_string(),
        size,
        class_sizes: spec.map(|s| s.class_sizes),
        max_pc,
        bound: max_pc.map(|p| size as i64 - p as i64),
    })
}

pub fn run() -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("table1", &serde_json::json!({ "sizes": SIZES }));
    report.note("the last column is evaluated at |C| = 8 and stands for every |C| >= 8");
    report.note("n.a. marks patterns that do not fit the coalition size");
    for row in &ROWS {
        for (i, &size) in SIZES.iter().enumerate() {
            let c = cell(row, size)?;
            let expected_bound = row.published[i].map(|p| size as i64 - p as i64);
            report.check(format!("{} |C|={size} max P_C", row.label), row.published[i], c.max_pc);
            report.check(format!("{} |C|={size} bound", row.label), expected_bound, c.bound);
            report.records.push(serde_json::to_value(&c)?);
        }
    }
    Ok(report)
}

/// Plain-text rendering, `n.a.` for cells that do not fit.
pub fn render(report: &ExperimentReport) -> String {
    let mut out = String::from("row  ");
    for size in SIZES {
        out += &format!("  |C|={size:<2}");
    }
    out.push('\n');
    for row in &ROWS {
        out += &format!("{:<5}", row.label);
        for rec in report.records.iter().filter(|r| r["row"] == row.label) {
            let text = match (rec["max_pc"].as_u64(), rec["bound"].as_i64()) {
                (Some(p), Some(b)) => format!("{p}/{b}"),
                _ => "n.a.".to_string(),
            };
            out += &format!("  {text:<7}");
        }
        out.push('\n');
    }
    out += "(entries: max P_C / lower bound on delta S)\n";
    out
}
