//! One function per subcommand, each returning the rows it would print.

use pok::fitting::{linear_fit, power_law_fit, FitModel, FitResult};
use pok::search::{
    conjecture_report, excluded_values, first_double_mode, mode_breakpoints, root_rk, scan_multimodal, unit_root,
    CeilingSource,
};
use pok::{kappa, mean, median, mode, pmf_series, variance, DistParams, Settings};

use crate::output::{format_intervals, format_set, read_rows, Cell, Table};
use crate::CliError;

pub fn cmd_pmf(k: usize, lambda: f64, n_max: Option<usize>) -> Result<Table, CliError> {
    let params = DistParams::new(k, lambda)?;
    let n_max = n_max.unwrap_or_else(|| params.default_n_max());
    let pmf = pmf_series(&params, n_max)?;
    let h = pok::h_series(&params, n_max)?;
    let mut t = Table::new(vec!["n", "pmf", "h"]);
    for n in 0..=n_max {
        t.push(vec![Cell::int(n), Cell::value(pmf.value(n)), Cell::value(h.value(n))]);
    }
    Ok(t)
}

pub fn cmd_stats(k: usize, lambda: f64, settings: &Settings) -> Result<Table, CliError> {
    let params = DistParams::new(k, lambda)?;
    let modes = mode(&params, settings)?;
    let mut t = Table::new(vec!["k", "lambda", "mean", "variance", "median", "modes", "peak_pmf"]);
    t.push(vec![
        Cell::int(k),
        Cell::lambda(lambda),
        Cell::value(mean(&params)),
        Cell::value(variance(&params)),
        Cell::int(median(&params, settings)?),
        Cell::text(format_set(&modes.modes)),
        Cell::value(modes.peak_value),
    ]);
    Ok(t)
}

pub fn cmd_root(ks: &[usize], settings: &Settings) -> Result<Table, CliError> {
    let mut t = Table::new(vec!["k", "r_k"]);
    for &k in ks {
        t.push(vec![Cell::int(k), Cell::lambda(root_rk(k, settings)?)]);
    }
    Ok(t)
}

pub fn cmd_unit_root(k: usize, n: usize, settings: &Settings) -> Result<Table, CliError> {
    let mut t = Table::new(vec!["k", "n", "lambda"]);
    t.push(vec![Cell::int(k), Cell::int(n), Cell::lambda(unit_root(k, n, settings)?)]);
    Ok(t)
}

/// Rows `(k, kappa, m_hat, lambda_hat, r_k, mean, mean - m_hat, ...)`.
///
/// With `skip_ties`, orders whose first double mode cannot be separated from
/// the runner-up are left out and returned separately instead of failing.
pub fn cmd_double_mode(ks: &[usize], skip_ties: bool, settings: &Settings) -> Result<(Table, Vec<usize>), CliError> {
    let mut t = Table::new(vec![
        "k",
        "kappa",
        "m_hat",
        "lambda_hat",
        "r_k",
        "mean",
        "mean_minus_mode",
        "runner_up",
        "runner_up_gap",
    ]);
    let mut skipped = Vec::new();
    for &k in ks {
        let r = match first_double_mode(k, settings) {
            Ok(r) => r,
            Err(pok::Error::PossibleTie { .. }) if skip_ties => {
                skipped.push(k);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let mu = r.mean();
        t.push(vec![
            Cell::int(k),
            Cell::int(kappa(k) as usize),
            Cell::int(r.m_hat),
            Cell::lambda(r.lambda_hat),
            Cell::lambda(r.r_k),
            Cell::value(mu),
            Cell::value(mu - r.m_hat as f64),
            Cell::int(r.runner_up),
            Cell::value(r.runner_up_gap),
        ]);
    }
    Ok((t, skipped))
}

pub fn cmd_excluded(ks: &[usize], n_upper: Option<usize>, settings: &Settings) -> Result<Table, CliError> {
    let mut t = Table::new(vec!["k", "excluded", "n_upper", "ceiling"]);
    for &k in ks {
        let r = excluded_values(k, n_upper, settings)?;
        let source = match r.ceiling_source {
            CeilingSource::ModeConjecture => "conjecture",
            CeilingSource::User => "user",
        };
        t.push(vec![
            Cell::int(k),
            Cell::text(format_intervals(&r.intervals, false)),
            Cell::int(r.n_upper),
            Cell::text(source),
        ]);
    }
    Ok(t)
}

/// Table number (1 to 4) that lists order `k`, if any.
pub fn table_number(k: usize) -> Option<usize> {
    match k {
        2..=14 => Some(1),
        15..=28 => Some(2),
        29..=37 => Some(3),
        38..=41 => Some(4),
        _ => None,
    }
}

/// The excluded-value tables: one row per order, one column per interval.
pub fn cmd_tables(ks: &[usize], settings: &Settings) -> Result<Table, CliError> {
    let mut t = Table::new(vec!["table", "k", "interval_1", "interval_2", "interval_3"]);
    for &k in ks {
        let table = table_number(k)
            .ok_or_else(|| CliError::Usage(format!("the excluded-value tables cover 2 <= k <= 41, got {k}")))?;
        let r = excluded_values(k, None, settings)?;
        if r.intervals.len() > 3 {
            return Err(CliError::Usage(format!("k = {k} has {} excluded intervals", r.intervals.len())));
        }
        let mut row = vec![Cell::int(table), Cell::int(k)];
        for i in 0..3 {
            let text = r
                .intervals
                .get(i)
                .map(|iv| format_intervals(std::slice::from_ref(iv), true))
                .unwrap_or_default();
            row.push(Cell::text(text));
        }
        t.push(row);
    }
    Ok(t)
}

pub fn cmd_breakpoints(k: usize, lambda_max: f64, settings: &Settings) -> Result<Table, CliError> {
    let map = mode_breakpoints(k, lambda_max, settings)?;
    let mut t = Table::new(vec!["k", "lambda", "tie_set", "mode_before", "mode_after"]);
    for (i, b) in map.breakpoints.iter().enumerate() {
        t.push(vec![
            Cell::int(k),
            Cell::lambda(b.lambda),
            Cell::text(format_set(&b.tie_set)),
            Cell::text(format_set(&map.mode_sets[i])),
            Cell::text(format_set(&map.mode_sets[i + 1])),
        ]);
    }
    Ok(t)
}

pub fn cmd_multimodal(k: usize, lambda_max: f64, arity: usize, settings: &Settings) -> Result<Table, CliError> {
    let found = scan_multimodal(k, lambda_max, arity, settings)?;
    let mut t = Table::new(vec!["k", "lambda", "tie_set"]);
    for b in found {
        t.push(vec![Cell::int(k), Cell::lambda(b.lambda), Cell::text(format_set(&b.tie_set))]);
    }
    Ok(t)
}

/// Fits `y` against `x` read from a CSV or JSON-lines file.
///
/// Columns default to the first two of the file.
pub fn cmd_fit(text: &str, model: FitModel, x: Option<&str>, y: Option<&str>) -> Result<Table, CliError> {
    let rows = read_rows(text)?;
    let first = rows.first().ok_or_else(|| CliError::Usage("fit input has no rows".into()))?;
    let pick = |name: Option<&str>, default: usize| -> Result<String, CliError> {
        match name {
            Some(n) => Ok(n.to_string()),
            None => first
                .get(default)
                .map(|(c, _)| c.clone())
                .ok_or_else(|| CliError::Usage("fit input needs at least two columns".into())),
        }
    };
    let (xc, yc) = (pick(x, 0)?, pick(y, 1)?);
    let mut points = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let get = |c: &str| -> Result<f64, CliError> {
            let v = row
                .iter()
                .find(|(name, _)| name == c)
                .ok_or_else(|| CliError::Usage(format!("row {}: missing column {c}", i + 1)))?;
            v.1.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("row {}: column {c} is not a number: {:?}", i + 1, v.1)))
        };
        points.push((get(&xc)?, get(&yc)?));
    }
    let fit = match model {
        FitModel::PowerLaw => power_law_fit(&points)?,
        FitModel::Linear => linear_fit(&points)?,
    };
    Ok(fit_table(&fit))
}

pub fn fit_table(fit: &FitResult) -> Table {
    let mut t = Table::new(vec!["model", "c0", "c1", "residual", "n_points", "x_min", "x_max"]);
    let model = match fit.model {
        FitModel::PowerLaw => "powerlaw",
        FitModel::Linear => "linear",
    };
    t.push(vec![
        Cell::text(model),
        Cell::value(fit.coefficients.0),
        Cell::value(fit.coefficients.1),
        Cell::value(fit.residual),
        Cell::int(fit.n_points),
        Cell::value(fit.domain.0),
        Cell::value(fit.domain.1),
    ]);
    t
}

/// Per-order conjecture checks; the flag is false if any check failed.
pub fn cmd_conjectures(ks: &[usize], settings: &Settings) -> Result<(Table, bool), CliError> {
    let mut t = Table::new(vec![
        "k",
        "mode_formula_checked",
        "mode_formula_failures",
        "single_interval",
        "k_plus_one_excluded",
        "m_hat",
        "excluded",
        "passed",
    ]);
    let mut all = true;
    for &k in ks {
        let r = conjecture_report(k, settings)?;
        let failures: Vec<usize> = r.mode_formula.iter().filter(|p| !p.1).map(|p| p.0).collect();
        let single = match r.single_interval {
            None => "n/a",
            Some(true) => "pass",
            Some(false) => "fail",
        };
        all &= r.passed();
        t.push(vec![
            Cell::int(k),
            Cell::int(r.mode_formula.len()),
            Cell::text(format_set(&failures)),
            Cell::text(single),
            Cell::Bool(r.k_plus_one_excluded),
            Cell::int(r.m_hat),
            Cell::text(format_intervals(&r.excluded.intervals, false)),
            Cell::Bool(r.passed()),
        ]);
    }
    Ok((t, all))
}
