//! Experiment drivers. Each command turns an [`ExperimentConfig`] into a
//! [`Table`] and an exit status; emission is left to the caller.

pub mod config;
mod identities;
mod sweep;
pub mod table;

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::duality::{duality_check, ComplexMatrix};
use crate::gaussint::{residue_system, GaussInt};
use crate::sieve::{disk_support, SieveError};
use crate::spacing::{farey_points, k_euclid, k_euclid_bucketed, k_norm, k_sup, Ratio};
use crate::weylsum::{
    s2_squared_differenced, s2_squared_poisson, s_direct, sk_power_bound_rhs, WeylConfig, WeylError,
};

pub use config::{ConfigError, ExperimentConfig, Format};
pub use identities::cmd_identities;
pub use sweep::{cmd_report, cmd_sweep, SWEEP_COLUMNS};
pub use table::Table;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot read `{path}`: {message}")]
    Input { path: String, message: String },
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Input { .. } => EXIT_CONFIG,
            HarnessError::Output(_) => EXIT_FAILURE,
        }
    }
}

/// What went wrong across the rows of one command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Status {
    pub failed: bool,
    pub skipped: bool,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        if self.failed {
            EXIT_FAILURE
        } else if self.skipped {
            EXIT_BUDGET
        } else {
            EXIT_OK
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub status: Status,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    /// Writes the table to the configured output, or stdout.
    pub fn emit(&self, cfg: &ExperimentConfig) -> Result<(), HarnessError> {
        self.table
            .emit(cfg.format, cfg.out.as_deref().map(Path::new))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Identities,
    Sweep,
    Spacing,
    Weyl,
    Duality,
    Report,
}

pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<Outcome, HarnessError> {
    cfg.validate()?;
    match cmd {
        Command::Identities => Ok(cmd_identities(cfg)),
        Command::Sweep => Ok(cmd_sweep(cfg)),
        Command::Spacing => Ok(cmd_spacing(cfg)),
        Command::Weyl => Ok(cmd_weyl(cfg)),
        Command::Duality => Ok(cmd_duality(cfg)),
        Command::Report => cmd_report(cfg),
    }
}

pub(crate) fn elapsed_ms(cfg: &ExperimentConfig, start: Instant) -> u64 {
    if cfg.timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    }
}

/// `K` in every formulation over the configured families, `Q` and `N`.
pub fn cmd_spacing(cfg: &ExperimentConfig) -> Outcome {
    use table::{int, num, text};
    let mut t = Table::new(&[
        "family", "k", "Q", "N", "R", "K_euclid", "K_sup", "K_norm", "K_bucketed", "status",
    ]);
    let cells: Vec<_> = cfg
        .family
        .iter()
        .flat_map(|&f| cfg.q.iter().map(move |&q| (f, q)))
        .collect();
    let results: Vec<_> = cells
        .par_iter()
        .map(|&(f, q)| {
            let fam = cfg.moduli_family(f, q);
            farey_points(&fam, &cfg.budget()).map(|pts| {
                cfg.n
                    .iter()
                    .map(|&n| {
                        let r = Ratio::from_f64(n);
                        (pts.len(), k_euclid(&pts, r), k_sup(&pts, r), k_norm(&pts, r), k_euclid_bucketed(&pts, r))
                    })
                    .collect::<Vec<_>>()
            })
        })
        .collect();
    let mut status = Status::default();
    for (&(f, q), res) in cells.iter().zip(results) {
        let fam = cfg.moduli_family(f, q);
        let head = |n: f64| vec![text(fam.kind.label()), int(fam.kind.exponent() as u64), int(q), num(n)];
        match res {
            Ok(per_n) => {
                for (&n, (r, ke, ks, kn, kb)) in cfg.n.iter().zip(per_n) {
                    let ok = ke == kn && ke == kb && ks <= ke;
                    status.failed |= !ok;
                    let mut row = head(n);
                    row.extend([int(r as u64), int(ke), int(ks), int(kn), int(kb)]);
                    row.push(text(if ok { "ok" } else { "mismatch" }));
                    t.push(row);
                }
            }
            Err(e) => {
                status.skipped |= matches!(e, SieveError::Budget { .. });
                status.failed |= !matches!(e, SieveError::Budget { .. });
                for &n in &cfg.n {
                    let mut row = head(n);
                    row.extend(std::iter::repeat_n(serde_json::Value::Null, 5));
                    row.push(text(format!("skipped: {e}")));
                    t.push(row);
                }
            }
        }
    }
    Outcome { table: t, status }
}

/// Three `(q1, r1, j)` choices with `Q0/2^{1/k} < N(q1) ≤ Q0`, `(r1, q1) = 1`.
pub fn weyl_cases(k: u32, q0: f64) -> Vec<(GaussInt, GaussInt, GaussInt)> {
    let lower = q0 / 2f64.powf(1.0 / k as f64);
    let window: Vec<GaussInt> = disk_support(q0)
        .into_iter()
        .filter(|q| (q.norm() as f64) > lower && !q.is_zero() && q.canonical() == *q)
        .collect();
    let js = [GaussInt::new(1, 0), GaussInt::new(1, 1), GaussInt::new(2, -1)];
    (0..3)
        .filter_map(|i| {
            let q1 = *window.get((i * window.len()) / 3)?;
            let sys = residue_system(q1, true).ok()?;
            let r1 = sys.representatives[(i * 7 + 1) % sys.representatives.len()];
            Some((q1, r1, js[i]))
        })
        .collect()
}

/// The three forms of `|S|²` for `k = 2`, and the differenced upper bound for
/// `|S_k|^κ` at `k = 2` and at the configured `k`.
pub fn cmd_weyl(cfg: &ExperimentConfig) -> Outcome {
    use table::{int, num, text};
    let mut t = Table::new(&[
        "check", "k", "Q0", "q1", "r1", "j", "lhs", "differenced", "poisson", "rhs", "ratio", "discrepancy",
        "tolerance", "pass",
    ]);
    let mut status = Status::default();
    let inner_tol = 1e-12;
    for &q0 in &cfg.q0 {
        for (q1, r1, j) in weyl_cases(2, q0) {
            let head = vec![int(2), num(q0), text(q1.to_string()), text(r1.to_string()), text(j.to_string())];
            let res = WeylConfig::new(2, q0, q1, r1, j, inner_tol).and_then(|w| {
                let direct = s_direct(&w)?;
                let diff = s2_squared_differenced(&w, None)?;
                let pois = s2_squared_poisson(&w, None)?;
                let chain = sk_power_bound_rhs(&w, 1.0, cfg.max_cells, 0)?;
                Ok((direct, diff, pois, chain))
            });
            match res {
                Ok((direct, diff, pois, chain)) => {
                    let lhs = direct.value.norm_sqr();
                    let scale = lhs.max(diff.value.norm()).max(1e-300);
                    let disc = [
                        (diff.value.re - lhs).abs() + diff.value.im.abs(),
                        (pois.value - diff.value).norm(),
                        (pois.value.re - lhs).abs() + pois.value.im.abs(),
                    ]
                    .into_iter()
                    .fold(0.0, f64::max)
                        / scale;
                    let ok = disc <= cfg.tol_weyl;
                    status.failed |= !ok;
                    let mut row = vec![text("three_way")];
                    row.extend(head.clone());
                    row.extend([
                        num(lhs),
                        num(diff.value.re),
                        num(pois.value.re),
                        serde_json::Value::Null,
                        serde_json::Value::Null,
                        num(disc),
                        num(cfg.tol_weyl),
                        text(ok.to_string()),
                    ]);
                    t.push(row);
                    let dominated = lhs <= chain.rhs + chain.tail;
                    status.failed |= !dominated;
                    let mut row = vec![text("chain")];
                    row.extend(head);
                    row.extend([
                        num(lhs),
                        serde_json::Value::Null,
                        serde_json::Value::Null,
                        num(chain.rhs),
                        num(lhs / chain.rhs),
                        serde_json::Value::Null,
                        serde_json::Value::Null,
                        text(dominated.to_string()),
                    ]);
                    t.push(row);
                }
                Err(e) => {
                    weyl_error_row(&mut t, &mut status, "three_way", head, &e);
                }
            }
        }
    }
    if cfg.k >= 3 {
        for &q0 in &cfg.q0 {
            for (q1, r1, j) in weyl_cases(cfg.k, q0) {
                let head = vec![int(cfg.k as u64), num(q0), text(q1.to_string()), text(r1.to_string()), text(j.to_string())];
                let res = WeylConfig::new(cfg.k, q0, q1, r1, j, inner_tol).and_then(|w| {
                    let direct = s_direct(&w)?;
                    let chain = sk_power_bound_rhs(&w, cfg.eps, cfg.max_cells, 0)?;
                    Ok((direct, chain, w.kappa()))
                });
                match res {
                    Ok((direct, chain, kap)) => {
                        let lhs = direct.value.norm().powi(kap as i32);
                        let mut row = vec![text("chain")];
                        row.extend(head);
                        row.extend([
                            num(lhs),
                            serde_json::Value::Null,
                            serde_json::Value::Null,
                            num(chain.rhs),
                            num(lhs / chain.rhs),
                            serde_json::Value::Null,
                            serde_json::Value::Null,
                            text("n/a"),
                        ]);
                        t.push(row);
                    }
                    Err(e) => weyl_error_row(&mut t, &mut status, "chain", head, &e),
                }
            }
        }
    }
    Outcome { table: t, status }
}

fn weyl_error_row(t: &mut Table, status: &mut Status, check: &str, head: Vec<serde_json::Value>, e: &WeylError) {
    let budget = matches!(e, WeylError::Budget { .. });
    status.skipped |= budget;
    status.failed |= !budget;
    let mut row = vec![table::text(check)];
    row.extend(head);
    row.extend(std::iter::repeat_n(serde_json::Value::Null, 7));
    row.push(table::text(format!("skipped: {e}")));
    t.push(row);
}

/// Both dual best constants of `matrices` random complex matrices.
pub fn cmd_duality(cfg: &ExperimentConfig) -> Outcome {
    use table::{int, num, text};
    let mut t = Table::new(&[
        "seed", "rows", "cols", "forward", "backward", "frobenius_sq", "discrepancy", "tolerance", "pass",
    ]);
    let mut status = Status::default();
    let checks: Vec<_> = (0..cfg.matrices)
        .into_par_iter()
        .map(|seed| {
            let c = ComplexMatrix::random(cfg.rows, cfg.cols, seed);
            (seed, c.frobenius_sq(), duality_check(&c))
        })
        .collect();
    for (seed, frob, d) in checks {
        let ok = d.discrepancy <= cfg.tol_duality;
        status.failed |= !ok;
        t.push(vec![
            int(seed),
            int(cfg.rows as u64),
            int(cfg.cols as u64),
            num(d.forward.value),
            num(d.backward.value),
            num(frob),
            num(d.discrepancy),
            num(cfg.tol_duality),
            text(ok.to_string()),
        ]);
    }
    Outcome { table: t, status }
}
