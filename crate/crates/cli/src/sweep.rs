//! Cartesian parameter sweeps. Each combination is solved independently on a
//! thread pool and its row is flushed as soon as it completes, so rows appear
//! in completion order; the `index` column gives the grid order.

use std::path::PathBuf;
use std::sync::Mutex;

use rayon::prelude::*;
use stefan_core::existence::certify_with;

use crate::commands::{prepare, run_solve, Context};
use crate::config::{parse, set_path, SweepAxis};
use crate::error::CliError;
use crate::output::{note, num};

pub const SWEEP_CSV: &str = "sweep.csv";
const RESULT_COLUMNS: [&str; 8] =
    ["lambda", "outer_residual", "stefan_residual", "inner_iterations", "certified", "status", "exit_code", "error"];

/// Row-major Cartesian product; the last axis varies fastest.
pub fn combinations(axes: &[SweepAxis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut row = prefix.clone();
                    row.push(*v);
                    row
                })
            })
            .collect()
    })
}

pub fn sweep(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let Some(plan) = &ctx.config().sweep else {
        return Err(CliError::Config("sweep: the configuration has no `sweep` block".into()));
    };
    if plan.parameters.is_empty() || plan.parameters.iter().any(|a| a.values.is_empty()) {
        return Err(CliError::Config("sweep: every parameter needs at least one value".into()));
    }
    let grid = combinations(&plan.parameters);
    // Reject bad paths before any work starts.
    let mut probe = ctx.loaded.raw.clone();
    for (axis, v) in plan.parameters.iter().zip(&grid[0]) {
        set_path(&mut probe, &axis.path, *v)?;
    }

    let path = ctx.out.path(SWEEP_CSV);
    let mut writer = ctx.out.csv_writer(SWEEP_CSV)?;
    let header: Vec<&str> =
        std::iter::once("index").chain(plan.parameters.iter().map(|a| a.path.as_str())).chain(RESULT_COLUMNS).collect();
    let fail = |e: csv::Error| CliError::Output(format!("{}: {e}", path.display()));
    writer.write_record(&header).map_err(fail)?;
    writer.flush().map_err(|e| CliError::io(&path, e))?;
    let writer = Mutex::new(writer);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Output(format!("thread pool: {e}")))?;
    let failures = Mutex::new(0_usize);
    pool.install(|| {
        grid.par_iter().enumerate().try_for_each(|(index, values)| {
            let mut record = vec![index.to_string()];
            record.extend(values.iter().map(|v| num(*v)));
            let result = run_point(ctx, &plan.parameters, values);
            if result.last().is_some_and(|e| !e.is_empty()) {
                *failures.lock().unwrap_or_else(|p| p.into_inner()) += 1;
            }
            record.extend(result);
            let mut w = writer.lock().unwrap_or_else(|p| p.into_inner());
            w.write_record(&record).map_err(fail)?;
            w.flush().map_err(|e| CliError::io(&path, e))
        })
    })?;
    let failures = failures.into_inner().unwrap_or_else(|p| p.into_inner());
    note(ctx.quiet, format!("{} points, {failures} failed", grid.len()));
    Ok(vec![path])
}

/// Result columns for one grid point; failures are recorded, not raised.
fn run_point(ctx: &Context, axes: &[SweepAxis], values: &[f64]) -> Vec<String> {
    let mut raw = ctx.loaded.raw.clone();
    let mut certified = None;
    let outcome = (|| {
        for (axis, v) in axes.iter().zip(values) {
            set_path(&mut raw, &axis.path, *v)?;
        }
        let mut config = parse(&raw)?;
        config.numerics.grid = ctx.config().numerics.grid;
        let p = prepare(&config, &ctx.loaded.base_dir)?;
        certified = Some(certify_with(&p.problem, p.settings.lambda_max));
        run_solve(&p)
    })();
    let (cert_flag, status) = match &certified {
        Some(c) => (c.certified.to_string(), format!("{:?}", c.status).to_lowercase()),
        None => (String::new(), String::new()),
    };
    match outcome {
        Ok(r) => vec![
            num(r.lambda),
            num(r.outer_residual),
            num(r.stefan_residual),
            r.inner_iterations.to_string(),
            cert_flag,
            status,
            "0".into(),
            String::new(),
        ],
        Err(e) => {
            vec![String::new(), String::new(), String::new(), String::new(), cert_flag, status, e.exit_code().to_string(), e.to_string()]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_are_row_major() {
        let axes = [
            SweepAxis { path: "a".into(), values: vec![1.0, 2.0] },
            SweepAxis { path: "b".into(), values: vec![10.0, 20.0, 30.0] },
        ];
        let grid = combinations(&axes);
        assert_eq!(grid.len(), 6);
        assert_eq!(grid[0], [1.0, 10.0]);
        assert_eq!(grid[1], [1.0, 20.0]);
        assert_eq!(grid[5], [2.0, 30.0]);
    }
}
