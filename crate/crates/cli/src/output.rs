//! CSV writers for run and sweep results.
//!
//! Numbers are written with Rust's `Display` for `f64`, which is the shortest
//! decimal that round-trips and never depends on locale. Missing values are
//! empty fields.

use std::io::Write;

use anyhow::Result;
use sortition_core::experiments::{activity_quality_correlation, z_score, RunSummary, SweepPoint};

/// Bumped whenever a column is added, removed or renamed.
pub const CSV_SCHEMA_VERSION: u32 = 1;

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Per-epoch series, one block of columns per run.
pub fn write_epochs<W: Write>(out: W, runs: &[&RunSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["epoch".to_string(), "population".to_string()];
    for run in runs {
        let m = run.mode.as_str();
        header.push(format!("n_active_{m}"));
        header.push(format!("mean_t_{m}"));
        header.push(format!("display_ema_mean_t_{m}"));
    }
    w.write_record(&header)?;
    let Some(first) = runs.first() else {
        w.flush()?;
        return Ok(());
    };
    for (i, rec) in first.epoch_records.iter().enumerate() {
        let mut row = vec![rec.epoch.to_string(), rec.population.to_string()];
        for run in runs {
            let r = &run.epoch_records[i];
            row.push(r.n_active.to_string());
            row.push(opt(r.mean_t_active));
            row.push(opt(r.display_ema_mean_t));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_participants<W: Write>(out: W, runs: &[&RunSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "mode",
        "participant_id",
        "median_quality",
        "join_epoch",
        "leave_epoch",
        "lifetime",
        "active_epochs",
        "activity_fraction",
    ])?;
    for run in runs {
        for p in &run.participants {
            w.write_record([
                run.mode.as_str().to_string(),
                p.id.to_string(),
                num(p.median_quality),
                p.join_epoch.to_string(),
                p.leave_epoch.map(|e| e.to_string()).unwrap_or_default(),
                p.lifetime.to_string(),
                p.active_epochs.to_string(),
                num(p.activity_fraction),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Long-format EMA trajectories: one row per participant and epoch.
pub fn write_trajectories<W: Write>(out: W, runs: &[&RunSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["mode", "epoch", "participant_id", "ema_quality", "active"])?;
    for run in runs {
        for rec in &run.epoch_records {
            for (id, q) in &rec.per_participant_ema {
                w.write_record([
                    run.mode.as_str().to_string(),
                    rec.epoch.to_string(),
                    id.to_string(),
                    num(*q),
                    u8::from(rec.active_ids.contains(id)).to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Scalar reductions of a run (and of the pair, when both modes ran).
pub fn write_summary<W: Write>(out: W, runs: &[&RunSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["metric", "value"])?;
    for run in runs {
        let m = run.mode.as_str();
        w.write_record([format!("time_avg_mean_t_{m}"), num(run.time_avg_mean_t)])?;
        let corr = activity_quality_correlation(run).ok();
        w.write_record([
            format!("activity_quality_correlation_{m}"),
            opt(corr.filter(|c| !c.degenerate).map(|c| c.coefficient)),
        ])?;
        w.write_record([
            format!("final_population_{m}"),
            run.final_population().to_string(),
        ])?;
    }
    if let [merit, random] = runs {
        w.write_record(["z".to_string(), num(z_score(merit, random)?)])?;
    }
    w.flush()?;
    Ok(())
}

/// Seed-averaged columns first, then one triple of columns per seed.
pub fn write_sweep<W: Write>(out: W, points: &[SweepPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["p", "mean_merit", "mean_random", "z"]
        .map(String::from)
        .to_vec();
    if let Some(first) = points.first() {
        for s in &first.per_seed {
            header.push(format!("mean_merit_seed{}", s.seed));
            header.push(format!("mean_random_seed{}", s.seed));
            header.push(format!("z_seed{}", s.seed));
        }
    }
    w.write_record(&header)?;
    for p in points {
        let mut row = vec![
            num(p.percentile_p),
            num(p.mean_merit),
            num(p.mean_random),
            num(p.z),
        ];
        for s in &p.per_seed {
            row.extend([num(s.mean_merit), num(s.mean_random), num(s.z)]);
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
