//! Result files: summary tables, per-session records, box-plot and
//! scatter data, and mask evaluation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use segbench_core::interaction::SessionRecord;
use segbench_core::metrics::{alpha_beta, iou};

use crate::error::{BenchError, Result};
use crate::harness::{BoxRow, MatrixResult, RunSummary};
use crate::io::{load_mask, write_json};

pub const SUMMARY_HEADER: [&str; 7] = [
    "algorithm",
    "n_images",
    "iou_improvement",
    "initial_iou_mean",
    "refined_iou_mean",
    "compute_s_mean",
    "interaction_s_mean",
];

fn f6(v: f64) -> String {
    format!("{v:.6}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => BenchError::io(path, io),
        other => BenchError::UnsupportedFormat(format!("{other:?}")),
    })
}

pub fn write_summary_csv(summary: &RunSummary, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for r in &summary.rows {
        w.write_record([
            r.algorithm.clone(),
            r.n_images.to_string(),
            f6(r.iou_improvement),
            f6(r.initial_iou_mean),
            f6(r.refined_iou_mean),
            f6(r.compute_s_mean),
            f6(r.interaction_s_mean),
        ])?;
    }
    w.flush().map_err(|e| BenchError::io(path, e))
}

fn write_boxplot_csv(rows: &[BoxRow], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["algorithm", "min", "q1", "median", "q3", "max"])?;
    for r in rows {
        let s = &r.stats;
        w.write_record([r.algorithm.clone(), f6(s.min), f6(s.q1), f6(s.median), f6(s.q3), f6(s.max)])?;
    }
    w.flush().map_err(|e| BenchError::io(path, e))
}

fn write_alpha_beta_csv(summary: &RunSummary, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["algorithm", "image", "alpha", "beta"])?;
    for p in &summary.alpha_beta {
        w.write_record([p.algorithm.clone(), p.image.clone(), f6(p.alpha), f6(p.beta)])?;
    }
    w.flush().map_err(|e| BenchError::io(path, e))
}

/// Keeps ASCII alphanumerics, `-` and `_`; everything else becomes `_`.
pub fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

pub fn record_file_name(rec: &SessionRecord) -> String {
    format!(
        "{}__{}__{}.json",
        sanitize(&rec.algorithm_id),
        sanitize(&rec.protocol_id),
        sanitize(&rec.image_id)
    )
}

/// Writes every result file into `dir`. Fails with `EmptyResults` when no
/// cell produced a record.
pub fn write_results(result: &MatrixResult, dir: &Path) -> Result<()> {
    if result.records.is_empty() {
        return Err(BenchError::EmptyResults);
    }
    let records = dir.join("records");
    std::fs::create_dir_all(&records).map_err(|e| BenchError::io(&records, e))?;
    for rec in &result.records {
        write_json(rec, records.join(record_file_name(rec)))?;
    }
    let s = &result.summary;
    write_summary_csv(s, &dir.join("summary.csv"))?;
    write_json(s, dir.join("summary.json"))?;
    write_boxplot_csv(&s.boxplot_initial, &dir.join("boxplot_initial.csv"))?;
    write_boxplot_csv(&s.boxplot_refined, &dir.join("boxplot_refined.csv"))?;
    write_alpha_beta_csv(s, &dir.join("alpha_beta.csv"))
}

/// Fixed-width text rendering of the summary rows.
pub fn format_table(summary: &RunSummary) -> String {
    let width = summary.rows.iter().map(|r| r.algorithm.len()).chain([9]).max().unwrap_or(9);
    let mut out = format!(
        "{:<width$}  {:>4}  {:>9}  {:>9}  {:>9}  {:>10}  {:>10}\n",
        "algorithm", "n", "Δ IoU", "initial", "refined", "compute s", "interact s"
    );
    for r in &summary.rows {
        out.push_str(&format!(
            "{:<width$}  {:>4}  {:>9.4}  {:>9.4}  {:>9.4}  {:>10.4}  {:>10.2}\n",
            r.algorithm,
            r.n_images,
            r.iou_improvement,
            r.initial_iou_mean,
            r.refined_iou_mean,
            r.compute_s_mean,
            r.interaction_s_mean
        ));
    }
    for f in &summary.failed_cells {
        out.push_str(&format!("failed: {} {} {}: {}\n", f.algorithm, f.protocol, f.image, f.error));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub image: String,
    pub iou: f64,
    pub alpha: f64,
    pub beta: f64,
}

fn png_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| BenchError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("png")))
        .collect();
    files.sort();
    Ok(files)
}

/// Scores every mask in `gt_dir` against the prediction of the same file
/// name in `pred_dir`, or failing that `<id>.png` where `id` is the ground
/// truth stem without a `gt_` prefix.
pub fn evaluate_dirs(gt_dir: &Path, pred_dir: &Path) -> Result<Vec<EvalRow>> {
    let mut rows = Vec::new();
    for gt_path in png_files(gt_dir)? {
        let name = gt_path.file_name().unwrap_or_default();
        let stem = gt_path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        let id = stem.strip_prefix("gt_").unwrap_or(&stem).to_string();
        let pred_path = [pred_dir.join(name), pred_dir.join(format!("{id}.png"))]
            .into_iter()
            .find(|p| p.is_file())
            .ok_or_else(|| BenchError::MissingMask(id.clone()))?;
        let gt = load_mask(&gt_path)?;
        let pred = load_mask(&pred_path)?;
        let (alpha, beta) = alpha_beta(&gt, &pred).unwrap_or((f64::NAN, f64::NAN));
        rows.push(EvalRow {
            image: id,
            iou: iou(&gt, &pred)?,
            alpha,
            beta,
        });
    }
    if rows.is_empty() {
        return Err(BenchError::EmptyResults);
    }
    Ok(rows)
}

pub fn write_eval_csv(rows: &[EvalRow], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["image", "iou", "alpha", "beta"])?;
    for r in rows {
        w.write_record([r.image.clone(), f6(r.iou), f6(r.alpha), f6(r.beta)])?;
    }
    let mean = rows.iter().map(|r| r.iou).sum::<f64>() / rows.len() as f64;
    w.write_record(["mean".to_string(), f6(mean), String::new(), String::new()])?;
    w.flush().map_err(|e| BenchError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sanitize_replaces_path_characters() {
        assert_eq!(sanitize("hybrid(grabcut)"), "hybrid_grabcut_");
        assert_eq!(sanitize("../x y"), "___x_y");
        assert_eq!(sanitize("ml_forest-2"), "ml_forest-2");
    }

    #[test]
    fn empty_results_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let result = MatrixResult {
            records: vec![],
            summary: RunSummary {
                rows: vec![],
                boxplot_initial: vec![],
                boxplot_refined: vec![],
                alpha_beta: vec![],
                failed_cells: vec![],
            },
        };
        assert!(matches!(write_results(&result, dir.path()), Err(BenchError::EmptyResults)));
    }
}
