//! Subcommand implementations.

use std::path::PathBuf;
use std::sync::Arc;

use laguerre_difmat::collocation::{collocate, FamilyTag, NodeFamily, NodeSet, ScaledCoeffs};
use laguerre_difmat::difmat::{classic_construction, derivative_form_construction, difmat, first_order};
use laguerre_difmat::solvers::{schrodinger_eigs, solve_bvp, BvpProblem, SchrodingerProblem};
use laguerre_difmat::Error;
use laguerre_oracle::{cache, oracle_first_order, Family, CACHE_ENV};
use serde_json::json;

use crate::output::{col, render_matrix, Cell, Meta, OutputSpec, Table};
use crate::Failure;

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParam(_) | Error::TooFewPoints { .. } | Error::Dimension(_) => Failure::Usage(e.to_string()),
            _ => Failure::Solver(e.to_string()),
        }
    }
}

fn family(tag: FamilyTag, alpha: Option<f64>) -> Result<NodeFamily, Failure> {
    let f = NodeFamily::from_tag(tag);
    Ok(match alpha {
        Some(a) => f.with_alpha(a)?,
        None => f,
    })
}

fn build(tag: FamilyTag, alpha: Option<f64>, npts: usize) -> Result<(Arc<NodeSet>, ScaledCoeffs), Failure> {
    let (s, c) = collocate(family(tag, alpha)?, npts)?;
    Ok((Arc::new(s), c))
}

fn meta(s: &NodeSet, npts: impl ToString, order: usize) -> Meta {
    Meta {
        family: s.family.tag().as_str().into(),
        alpha: s.alpha(),
        npts: npts.to_string(),
        order,
    }
}

pub fn nodes(tag: FamilyTag, alpha: Option<f64>, npts: usize, out: &OutputSpec) -> Result<String, Failure> {
    let (s, c) = build(tag, alpha, npts)?;
    let rows = s
        .nodes
        .iter()
        .zip(&c.values)
        .enumerate()
        .map(|(i, (&x, &v))| vec![Cell::Int(i as i64), Cell::Real(x), Cell::Real(v)])
        .collect();
    let table = Table {
        meta: meta(&s, npts, 0),
        columns: vec![col("index", "index"), col("node", "nodes"), col("coeff", "coeffs")],
        rows,
    };
    Ok(table.render(out))
}

pub enum Mode {
    Stable,
    Classic,
}

pub fn difmat_cmd(
    tag: FamilyTag,
    alpha: Option<f64>,
    npts: usize,
    order: usize,
    mode: Mode,
    out: &OutputSpec,
) -> Result<String, Failure> {
    if order == 0 {
        return Err(Failure::Usage("--order must be at least 1".into()));
    }
    let (s, c) = build(tag, alpha, npts)?;
    let m = meta(&s, npts, order);
    let (d, name) = match mode {
        Mode::Stable => (difmat(&s, &c, order)?, "stable"),
        Mode::Classic => match classic_construction(&s, order) {
            Ok(d) => (d, "classic"),
            Err(r) => {
                let report = json!({
                    "family": m.family,
                    "alpha": m.alpha,
                    "npts": npts,
                    "order": order,
                    "mode": "classic",
                    "breakdown": {
                        "stage": r.stage,
                        "row": r.row,
                        "col": r.col,
                        "value": r.value.to_string(),
                    },
                });
                let mut body = serde_json::to_string_pretty(&report).expect("json");
                body.push('\n');
                return Err(Failure::Breakdown {
                    report: body,
                    message: r.to_string(),
                });
            }
        },
    };
    Ok(render_matrix(&m, name, d.len(), d.len(), d.matrix.as_slice(), out))
}

/// `N`, `A:B` or `A:B:STEP`, inclusive.
pub fn parse_range(s: &str) -> Result<Vec<usize>, String> {
    let parts: Vec<usize> = s
        .split(':')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{p}` is not a non-negative integer"))
        })
        .collect::<Result<_, _>>()?;
    let (a, b, step) = match parts[..] {
        [n] => (n, n, 1),
        [a, b] => (a, b, 1),
        [a, b, step] => (a, b, step),
        _ => return Err("expected N, A:B or A:B:STEP".into()),
    };
    if step == 0 || b < a {
        return Err(format!("empty range `{s}`"));
    }
    Ok((a..=b).step_by(step).collect())
}

pub fn bvp(beta: f64, gamma: f64, npts: &str, out: &OutputSpec) -> Result<String, Failure> {
    let grid = parse_range(npts).map_err(Failure::Usage)?;
    let p = BvpProblem::damped_sine(gamma, beta);
    let mut rows = Vec::new();
    for &n in &grid {
        let s = solve_bvp(&p, n)?;
        rows.push(vec![Cell::Int(n as i64), Cell::Real(s.max_error.unwrap_or(f64::NAN))]);
    }
    let table = Table {
        meta: Meta {
            family: FamilyTag::AugmentedGauss.as_str().into(),
            alpha: 0.0,
            npts: npts.into(),
            order: 2,
        },
        columns: vec![col("npts", "npts_grid"), col("max_error", "max_error")],
        rows,
    };
    Ok(table.render(out))
}

pub fn schrodinger(p: SchrodingerProblem, npts: &str, out: &OutputSpec) -> Result<String, Failure> {
    let grid = parse_range(npts).map_err(Failure::Usage)?;
    let mut rows = Vec::new();
    for &n in &grid {
        for (i, e) in schrodinger_eigs(&p, n)?.iter().enumerate() {
            rows.push(vec![
                Cell::Int(n as i64),
                Cell::Int(i as i64 + 1),
                Cell::Real(e.value),
                Cell::Real(e.residual),
            ]);
        }
    }
    let table = Table {
        meta: Meta {
            family: FamilyTag::AugmentedGauss.as_str().into(),
            alpha: 0.0,
            npts: npts.into(),
            order: 2,
        },
        columns: vec![
            col("npts", "npts_grid"),
            col("index", "index"),
            col("eigenvalue", "eigenvalues"),
            col("residual", "residuals"),
        ],
        rows,
    };
    Ok(table.render(out))
}

fn missing_cache(detail: String, max_n: usize, step: usize) -> Failure {
    Failure::MissingCache(format!(
        "{detail}\nregenerate with: cargo run --release -p laguerre-oracle --bin oracle-cache -- <dir> {max_n} {step} \
         and point {CACHE_ENV} (or --cache) at <dir>"
    ))
}

/// Max relative errors of off-diagonal and diagonal entries.
fn errors(d: &[f64], reference: &[f64], n: usize) -> (f64, f64) {
    let (mut off, mut diag) = (0.0f64, 0.0f64);
    for k in 0..n {
        for j in 0..n {
            let r = reference[k * n + j];
            let e = if r == 0.0 {
                d[k * n + j].abs()
            } else {
                ((d[k * n + j] - r) / r).abs()
            };
            let e = if e.is_nan() { f64::INFINITY } else { e };
            if k == j {
                diag = diag.max(e);
            } else {
                off = off.max(e);
            }
        }
    }
    (off, diag)
}

pub fn stability_study(
    tag: FamilyTag,
    max_n: usize,
    step: usize,
    dir: Option<PathBuf>,
    out: &OutputSpec,
) -> Result<String, Failure> {
    if step == 0 {
        return Err(Failure::Usage("--step must be positive".into()));
    }
    let dir = dir
        .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
        .ok_or_else(|| {
            missing_cache(
                format!("no oracle cache directory (set {CACHE_ENV} or pass --cache)"),
                max_n,
                step,
            )
        })?;
    let ofam = Family::from_tag(tag.as_str()).expect("families agree");
    let alpha = NodeFamily::from_tag(tag).alpha();
    let mut rows = Vec::new();
    let mut npts = step.max(2);
    while npts <= max_n {
        let on = cache::read_nodes(&dir, ofam, alpha, npts)
            .map_err(|e| missing_cache(format!("oracle table for npts={npts}: {e}"), max_n, step))?;
        let reference = oracle_first_order(&on).to_f64();
        let (s, c) = build(tag, None, npts)?;
        let stable = first_order(&s, &c)?;
        let (off, diag) = errors(stable.matrix.as_slice(), &reference, npts);
        let mut row = vec![Cell::Int(npts as i64)];
        for attempt in [classic_construction(&s, 1), derivative_form_construction(&s, 1)] {
            match attempt {
                Ok(d) => {
                    row.push(Cell::Real(errors(d.matrix.as_slice(), &reference, npts).0));
                    row.push(Cell::Missing);
                }
                Err(r) => {
                    row.push(Cell::Missing);
                    row.push(Cell::Text(r.stage.replace(' ', "-")));
                }
            }
        }
        let mags = stable.matrix.as_slice().iter().map(|v| v.abs()).filter(|&v| v > 0.0);
        let (lo, hi) = mags.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let x = &s.nodes;
        let last = npts - 1;
        let log_inv_v: f64 = (0..last).map(|m| (x[last] - x[m]).abs().log10()).sum();
        let log_weight = -0.5 * x[last] / std::f64::consts::LN_10;
        let log_ctilde = c.values[last].abs().log10();
        row.extend([
            Cell::Real(off),
            Cell::Real(diag),
            Cell::Real(lo),
            Cell::Real(hi),
            Cell::Real(log_inv_v),
            Cell::Real(log_weight),
            Cell::Real(log_ctilde - log_weight),
            Cell::Real(log_ctilde),
        ]);
        rows.push(row);
        npts += step;
    }
    let table = Table {
        meta: Meta {
            family: tag.as_str().into(),
            alpha,
            npts: format!("{}:{max_n}:{step}", step.max(2)),
            order: 1,
        },
        columns: vec![
            col("npts", "npts_grid"),
            col("classic_error", "classic_error"),
            col("classic_breakdown", "classic_breakdown"),
            col("derivative_form_error", "derivative_form_error"),
            col("derivative_form_breakdown", "derivative_form_breakdown"),
            col("stable_offdiag_error", "stable_offdiag_error"),
            col("stable_diag_error", "stable_diag_error"),
            col("min_abs_entry", "min_abs_entry"),
            col("max_abs_entry", "max_abs_entry"),
            col("log10_inv_v", "log10_inv_v"),
            col("log10_weight", "log10_weight"),
            col("log10_inv_vtilde", "log10_inv_vtilde"),
            col("log10_ctilde", "log10_ctilde"),
        ],
        rows,
    };
    Ok(table.render(out))
}
