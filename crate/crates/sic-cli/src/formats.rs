//! Flat output formats: prediction CSV, report CSV, ROC point CSV, and the
//! playlist file.

use std::fs;
use std::path::Path;

use sic_core::metrics::{round3, RocCurve};
use sic_core::{EvalReport, Isrc, Label, Playlist, TrackPrediction};

use crate::error::{Error, Result};
use crate::experiment::{Aggregate, ExperimentOutcome};

pub const PREDICTIONS_HEADER: &str = "isrc,label,margin";
pub const REPORT_HEADER: &str = "experiment,repetition,class,precision,recall,fscore,accuracy";

/// Write per-track predictions as `isrc,label,margin`.
pub fn write_predictions(path: &Path, predictions: &[TrackPrediction]) -> Result<()> {
    let mut out = String::from(PREDICTIONS_HEADER);
    out.push('\n');
    for p in predictions {
        out.push_str(&format!("{},{},{}\n", p.isrc, p.predicted_label, p.margin));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read predictions back (the playlist command's input).
pub fn read_predictions(path: &Path) -> Result<Vec<TrackPrediction>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == PREDICTIONS_HEADER => {}
        _ => {
            return Err(Error::Document {
                path: path.into(),
                message: format!("expected header {PREDICTIONS_HEADER:?}"),
            })
        }
    }
    let mut predictions = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| Error::Document {
            path: path.into(),
            message: format!("line {}: {message}", i + 1),
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(bad(format!("expected 3 fields, got {}", fields.len())));
        }
        let isrc = Isrc::new(fields[0].trim()).map_err(|e| bad(e.to_string()))?;
        let label = Label::parse(fields[1].trim())
            .ok_or_else(|| bad(format!("unknown label {:?}", fields[1])))?;
        let margin: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad margin {:?}", fields[2])))?;
        predictions.push(TrackPrediction {
            isrc,
            predicted_label: label,
            margin,
            scores: (-margin, margin),
        });
    }
    Ok(predictions)
}

/// Newline-separated ISRCs under a one-line header.
pub fn write_playlist(path: &Path, playlist: &Playlist) -> Result<()> {
    let mut out = format!("# tag={} cap={}\n", playlist.tag, playlist.cap);
    for isrc in &playlist.entries {
        out.push_str(isrc.as_str());
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn fmt3(v: f64) -> String {
    format!("{:.3}", round3(v))
}

fn class_row(experiment: &str, repetition: &str, class: &str, p: f64, r: f64, f: f64, acc: f64) -> String {
    format!(
        "{experiment},{repetition},{class},{},{},{},{}\n",
        fmt3(p),
        fmt3(r),
        fmt3(f),
        fmt3(acc)
    )
}

/// The flat experiment CSV: one row per run per class, a global row per run,
/// then aggregate mean and std rows, all at 3-decimal rendering.
pub fn report_csv(experiment: &str, reports: &[EvalReport], aggregate: &Aggregate) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for (i, r) in reports.iter().enumerate() {
        let rep = i.to_string();
        for (class, label) in [("song", Label::Song), ("instrumental", Label::Instrumental)] {
            let m = r.class_metrics(label);
            out.push_str(&class_row(
                experiment, &rep, class, m.precision, m.recall, m.f_score, r.accuracy,
            ));
        }
        out.push_str(&format!(
            "{experiment},{rep},global,,,{},{}\n",
            fmt3(r.global_f_score),
            fmt3(r.accuracy)
        ));
    }
    for (stat, pick) in [
        ("mean", &(|s: &crate::experiment::MetricSummary| s.mean) as &dyn Fn(_) -> f64),
        ("std", &|s: &crate::experiment::MetricSummary| s.std),
    ] {
        for (class, idx) in [("song", 0usize), ("instrumental", 1usize)] {
            let (p, r, f) = &aggregate.per_class[idx];
            out.push_str(&class_row(
                experiment,
                stat,
                class,
                pick(p),
                pick(r),
                pick(f),
                pick(&aggregate.accuracy),
            ));
        }
        out.push_str(&format!(
            "{experiment},{stat},global,,,{},{}\n",
            fmt3(pick(&aggregate.global_f_score)),
            fmt3(pick(&aggregate.accuracy))
        ));
    }
    out
}

/// Two-column ROC points for external plotting.
pub fn roc_csv(roc: &RocCurve) -> String {
    let mut out = String::from("fpr,tpr\n");
    for (fpr, tpr) in &roc.points {
        out.push_str(&format!("{fpr:.6},{tpr:.6}\n"));
    }
    out
}

/// Write every artifact of one experiment run under `out_dir`:
/// `report_<model>.csv`, `report_<model>.json`, and when a ROC exists,
/// `roc_<model>.csv`.
pub fn write_experiment_outputs(
    out_dir: &Path,
    experiment: &str,
    outcome: &ExperimentOutcome,
    run_config: &crate::config::RunConfig,
) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let model = outcome.model.as_str();

    let csv_path = out_dir.join(format!("report_{model}.csv"));
    fs::write(
        &csv_path,
        report_csv(experiment, &outcome.reports, &outcome.aggregate),
    )
    .map_err(|e| Error::io(&csv_path, e))?;

    #[derive(serde::Serialize)]
    struct ReportDoc<'a> {
        schema: &'a str,
        experiment: &'a str,
        model: &'a str,
        config_hash: String,
        run_config: &'a crate::config::RunConfig,
        reports: &'a [EvalReport],
        aggregate: &'a Aggregate,
    }
    let doc = ReportDoc {
        schema: "report/1",
        experiment,
        model,
        config_hash: run_config.hash(),
        run_config,
        reports: &outcome.reports,
        aggregate: &outcome.aggregate,
    };
    let json_path = out_dir.join(format!("report_{model}.json"));
    let json = serde_json::to_string_pretty(&doc).map_err(|e| Error::Json {
        path: json_path.clone(),
        source: e,
    })?;
    fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))?;

    if let Some(roc) = &outcome.roc {
        let roc_path = out_dir.join(format!("roc_{model}.csv"));
        fs::write(&roc_path, roc_csv(roc)).map_err(|e| Error::io(&roc_path, e))?;
    }
    Ok(())
}

/// Parse a tag argument for the playlist command.
pub fn parse_tag(s: &str) -> std::result::Result<Label, String> {
    Label::from_str_loose(s)
}

trait LabelExt {
    fn from_str_loose(s: &str) -> std::result::Result<Label, String>;
}

impl LabelExt for Label {
    fn from_str_loose(s: &str) -> std::result::Result<Label, String> {
        Label::parse(s).ok_or_else(|| format!("unknown tag {s:?} (expected song or instrumental)"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sic_core::playlist::generate_playlist;
    use tempfile::tempdir;

    fn prediction(i: usize, label: Label, margin: f64) -> TrackPrediction {
        TrackPrediction {
            isrc: Isrc::new(&format!("ZZTST{i:07}")).unwrap(),
            predicted_label: label,
            margin,
            scores: (-margin, margin),
        }
    }

    #[test]
    fn predictions_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("predictions.csv");
        let preds = vec![
            prediction(0, Label::Song, -0.25),
            prediction(1, Label::Instrumental, 1.75),
        ];
        write_predictions(&path, &preds).unwrap();
        let loaded = read_predictions(&path).unwrap();
        assert_eq!(loaded, preds);
    }

    #[test]
    fn playlist_file_format() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("playlist.txt");
        let preds = vec![
            prediction(2, Label::Instrumental, 0.5),
            prediction(1, Label::Instrumental, 0.9),
        ];
        let playlist = generate_playlist(&preds, Label::Instrumental, 1000, 0.0).unwrap();
        write_playlist(&path, &playlist).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "# tag=Instrumental cap=1000\nZZTST0000001\nZZTST0000002\n");
    }

    #[test]
    fn report_csv_shape() {
        use sic_core::metrics::compute_metrics;
        let truth = vec![Label::Song, Label::Song, Label::Instrumental];
        let predicted = vec![Label::Song, Label::Instrumental, Label::Instrumental];
        let report = compute_metrics(&truth, &predicted, Label::Instrumental).unwrap();
        let aggregate = crate::experiment::aggregate_reports(std::slice::from_ref(&report));
        let csv = report_csv("cross-db-full", &[report], &aggregate);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], REPORT_HEADER);
        // 1 run x (2 class rows + 1 global) + mean x 3 + std x 3
        assert_eq!(lines.len(), 1 + 3 + 6);
        assert!(lines[1].starts_with("cross-db-full,0,song,"));
        assert!(lines[4].starts_with("cross-db-full,mean,song,"));
        // three-decimal rendering
        assert!(lines[1].ends_with("0.667"), "{}", lines[1]);
    }
}
