//! Rendering of evaluation tables, parameter reports, and generation
//! results.

use bagorder_core::corpus::Vocab;
use bagorder_core::eval::{EvalReport, EvalRow, ParamReport};
use bagorder_core::search::GenerationResult;

fn row_cells(row: &EvalRow, label: &str) -> Vec<String> {
    let mut cells = vec![label.to_string(), row.total.to_string()];
    cells.extend(row.errors.iter().map(u64::to_string));
    cells
}

/// The error-distribution table as TSV: one column per configuration,
/// one row per sentence length, and a final totals row. This is the
/// pinned fixture format.
pub fn eval_errors_tsv(report: &EvalReport) -> String {
    let mut out = String::from("length\ttotal");
    for label in &report.labels {
        out.push('\t');
        out.push_str(label);
    }
    out.push('\n');
    for row in &report.rows {
        out.push_str(&row_cells(row, &row.length.to_string()).join("\t"));
        out.push('\n');
    }
    out.push_str(&row_cells(&report.totals(), "total").join("\t"));
    out.push('\n');
    out
}

/// The full machine-readable table: error, tie, and dead-search counts
/// per configuration.
pub fn eval_full_tsv(report: &EvalReport) -> String {
    let mut out = String::from("length\ttotal");
    for suffix in ["err", "tie", "dead"] {
        for label in &report.labels {
            out.push('\t');
            out.push_str(&format!("{label}_{suffix}"));
        }
    }
    out.push('\n');
    let totals = report.totals();
    let all_rows = report.rows.iter().map(|r| (r.length.to_string(), r));
    for (name, row) in all_rows.chain(std::iter::once(("total".to_string(), &totals))) {
        let mut cells = vec![name, row.total.to_string()];
        cells.extend(row.errors.iter().map(u64::to_string));
        cells.extend(row.ties.iter().map(u64::to_string));
        cells.extend(row.dead.iter().map(u64::to_string));
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}

fn aligned(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            line.push_str(&format!("{cell:>width$}", width = widths[c]));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Human-readable error table in the layout of the published results:
/// sentence length, test-sentence count, then one error column per
/// model. Tie and dead-search counts follow as separate blocks when any
/// occurred.
pub fn eval_aligned(report: &EvalReport) -> String {
    let mut header = vec!["length".to_string(), "total".to_string()];
    header.extend(report.labels.iter().cloned());
    let mut rows = vec![header.clone()];
    for row in &report.rows {
        rows.push(row_cells(row, &row.length.to_string()));
    }
    let totals = report.totals();
    rows.push(row_cells(&totals, "total"));
    let mut out = aligned(&rows);

    type Column = fn(&EvalRow) -> &Vec<u64>;
    let blocks: [(&str, Column); 2] = [("ties", |r| &r.ties), ("dead searches", |r| &r.dead)];
    for (name, pick) in blocks {
        if pick(&totals).iter().all(|&c| c == 0) {
            continue;
        }
        out.push('\n');
        out.push_str(name);
        out.push('\n');
        let mut block = vec![header.clone()];
        for row in &report.rows {
            let mut cells = vec![row.length.to_string(), row.total.to_string()];
            cells.extend(pick(row).iter().map(u64::to_string));
            block.push(cells);
        }
        let mut cells = vec!["total".to_string(), totals.total.to_string()];
        cells.extend(pick(&totals).iter().map(u64::to_string));
        block.push(cells);
        out.push_str(&aligned(&block));
    }
    out
}

/// One generation result as a TSV line: the arrangement's surface words
/// space-joined, its log score, the tie count, and the states expanded.
pub fn generation_tsv(result: &GenerationResult, vocab: &Vocab) -> String {
    let words: Vec<&str> = result
        .stripped()
        .iter()
        .map(|&t| vocab.surface(t).unwrap_or("?"))
        .collect();
    format!(
        "{}\t{}\t{}\t{}",
        words.join(" "),
        result.score,
        result.tie_count,
        result.expanded_states
    )
}

/// Aligned parameter-count table.
pub fn params_aligned(reports: &[ParamReport]) -> String {
    let mut rows = vec![vec![
        "model".to_string(),
        "parameters".to_string(),
        "bound".to_string(),
        "V".to_string(),
        "limit".to_string(),
    ]];
    for r in reports {
        rows.push(vec![
            r.label.clone(),
            r.distinct_parameters.to_string(),
            r.bound_note.to_string(),
            r.vocab_size.to_string(),
            r.limit.to_string(),
        ]);
    }
    aligned(&rows)
}
