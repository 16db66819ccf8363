use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Axis, FsConstraint, SweepConfig, SystemSize};
use super::output::{fmt_float, write_csv};
use super::revival::{count_intervals, detect_revivals, RevivalReport};
use crate::ed::{build_hamiltonian, Spectrum};
use crate::entanglement::log_negativity;
use crate::error::{Error, Result};
use crate::freefermion::{CorrelatorEngine, CorrelatorSet, GaussianEngine};
use crate::model::{classify_phase, lambda1_on_fs, lambda2_on_fs, ModelParams, Phase};
use crate::openquantum::{integrate, IntegratorSettings, Observation};
use crate::rdm::assemble;

/// One `(γ, λ1, λ2)` point of a scan. Infeasible points carry NaN in the
/// field the factorization constraint could not fix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamPoint {
    pub gamma: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub feasible: bool,
}

impl ParamPoint {
    fn params(&self, n_sites: usize) -> Result<ModelParams> {
        ModelParams::new(self.gamma, self.lambda1, self.lambda2, n_sites)
    }
}

/// Cartesian product of the grids, `γ` outermost, with the configured
/// factorization constraint applied.
pub fn param_points(cfg: &SweepConfig) -> Vec<ParamPoint> {
    let mut out = vec![];
    for g in cfg.gamma.values() {
        match cfg.fs {
            FsConstraint::None => {
                for l1 in cfg.lambda1.values() {
                    for l2 in cfg.lambda2.values() {
                        out.push(ParamPoint {
                            gamma: g,
                            lambda1: l1,
                            lambda2: l2,
                            feasible: true,
                        });
                    }
                }
            }
            FsConstraint::Lambda1 => {
                for l2 in cfg.lambda2.values() {
                    out.push(match lambda1_on_fs(g, l2) {
                        Ok(l1) => ParamPoint {
                            gamma: g,
                            lambda1: l1,
                            lambda2: l2,
                            feasible: true,
                        },
                        Err(_) => ParamPoint {
                            gamma: g,
                            lambda1: f64::NAN,
                            lambda2: l2,
                            feasible: false,
                        },
                    });
                }
            }
            FsConstraint::Lambda2 => {
                for l1 in cfg.lambda1.values() {
                    out.push(match lambda2_on_fs(g, l1) {
                        Ok(l2) => ParamPoint {
                            gamma: g,
                            lambda1: l1,
                            lambda2: l2,
                            feasible: true,
                        },
                        Err(_) => ParamPoint {
                            gamma: g,
                            lambda1: l1,
                            lambda2: f64::NAN,
                            feasible: false,
                        },
                    });
                }
            }
        }
    }
    out
}

/// Every nearest-neighbour pair: `(1,2), (N,1)` first, then `(i, i+1)` for `2 ≤ i ≤ N−1`.
pub fn default_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = vec![(1, 2), (n, 1)];
    pairs.extend((2..n).map(|i| (i, i + 1)));
    pairs
}

/// `𝓛` on a time × temperature grid for one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LnGrid {
    /// `ln[ti][bi]`.
    pub ln: Vec<Vec<f64>>,
    /// Ring size of the reported values.
    pub n_sites: usize,
    /// Largest correlator change in the last size doubling (0 for finite rings).
    pub delta: f64,
    pub converged: bool,
}

/// Correlators over `times × betas`: the exact projected ring, or the
/// unprojected Gaussian state for the thermodynamic proxy.
fn correlator_table(
    p: &ModelParams,
    cfg: &SweepConfig,
    times: &[f64],
    betas: &[f64],
    projected: bool,
) -> Result<Vec<Vec<CorrelatorSet>>> {
    let proto = cfg.protocol.protocol(p);
    if projected {
        let engine = CorrelatorEngine::new(p, &proto)?;
        times
            .iter()
            .map(|&t| {
                let slice = engine.at_time(t);
                betas.iter().map(|&b| slice.evaluate(b)).collect()
            })
            .collect()
    } else {
        let engine = GaussianEngine::new(p, &proto)?;
        times
            .iter()
            .map(|&t| {
                let slice = engine.at_time(t);
                betas.iter().map(|&b| slice.evaluate(b)).collect()
            })
            .collect()
    }
}

fn ln_of(c: &CorrelatorSet) -> Result<f64> {
    Ok(log_negativity(&assemble(c)?))
}

/// Evaluates one point at all `times` and `betas`. On the large-ring proxy
/// the ring is doubled until every correlator agrees with the previous size
/// within `cfg.thermo.tol`.
pub fn ln_grid(
    point: &ParamPoint,
    cfg: &SweepConfig,
    times: &[f64],
    betas: &[f64],
) -> Result<LnGrid> {
    if !point.feasible {
        return Err(Error::InvalidParams(format!(
            "no factorization point at gamma = {}",
            point.gamma
        )));
    }
    let (table, n_sites, delta, converged) = match cfg.size {
        SystemSize::Finite(n) => (
            correlator_table(&point.params(n)?, cfg, times, betas, true)?,
            n,
            0.0,
            true,
        ),
        SystemSize::Thermo => {
            let mut n = cfg.thermo.n_start.max(4).next_multiple_of(4);
            let mut prev = correlator_table(&point.params(n)?, cfg, times, betas, false)?;
            loop {
                let next_n = 2 * n;
                let next = correlator_table(&point.params(next_n)?, cfg, times, betas, false)?;
                let delta = prev
                    .iter()
                    .flatten()
                    .zip(next.iter().flatten())
                    .map(|(a, b)| a.max_abs_diff(b))
                    .fold(0.0, f64::max);
                if delta < cfg.thermo.tol || next_n >= cfg.thermo.n_max {
                    break (next, next_n, delta, delta < cfg.thermo.tol);
                }
                prev = next;
                n = next_n;
            }
        }
    };
    let ln = table
        .iter()
        .map(|row| row.iter().map(ln_of).collect::<Result<Vec<f64>>>())
        .collect::<Result<_>>()?;
    Ok(LnGrid {
        ln,
        n_sites,
        delta,
        converged,
    })
}

fn require_feasible(points: &[ParamPoint]) -> (Vec<ParamPoint>, Vec<ParamPoint>) {
    points.iter().partition(|p| p.feasible)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalRow {
    pub beta_s: f64,
    pub gamma: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub ln: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThermalSweep {
    #[serde(skip)]
    pub rows: Vec<ThermalRow>,
    pub reports: Vec<(ParamPoint, RevivalReport)>,
    pub infeasible: Vec<ParamPoint>,
    pub unconverged: usize,
}

/// `𝓛(β_S)` at `t = 0` for every point, with revival/collapse events.
pub fn thermal_beta_sweep(cfg: &SweepConfig) -> Result<ThermalSweep> {
    let (points, infeasible) = require_feasible(&param_points(cfg));
    let betas = cfg.beta_s.values();
    let grids: Vec<LnGrid> = points
        .par_iter()
        .map(|p| ln_grid(p, cfg, &[0.0], &betas))
        .collect::<Result<_>>()?;
    let mut rows = vec![];
    let mut reports = vec![];
    for (p, g) in points.iter().zip(&grids) {
        for (&b, &ln) in betas.iter().zip(&g.ln[0]) {
            rows.push(ThermalRow {
                beta_s: b,
                gamma: p.gamma,
                lambda1: p.lambda1,
                lambda2: p.lambda2,
                ln,
            });
        }
        reports.push((
            *p,
            detect_revivals(&betas, &g.ln[0], cfg.epsilon, &cfg.epsilon_sensitivity),
        ));
    }
    Ok(ThermalSweep {
        rows,
        reports,
        infeasible,
        unconverged: grids.iter().filter(|g| !g.converged).count(),
    })
}

impl ThermalSweep {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_csv(
            path,
            &["beta_s", "gamma", "lambda1", "lambda2", "ln"],
            self.rows.iter().map(|r| {
                [r.beta_s, r.gamma, r.lambda1, r.lambda2, r.ln]
                    .map(fmt_float)
                    .to_vec()
            }),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionCell {
    pub x: f64,
    pub y: f64,
    pub gamma: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub beta_s: f64,
    pub t: f64,
    pub ln: f64,
    pub zero: bool,
}

/// Zero cells along `x` for one `y` value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionRow {
    pub y: f64,
    pub zero_count: usize,
    pub zero_min: Option<f64>,
    pub zero_max: Option<f64>,
    /// Contiguous runs of zero cells.
    pub zero_intervals: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroRegionMap {
    pub x_axis: Axis,
    pub y_axis: Axis,
    #[serde(skip)]
    pub cells: Vec<RegionCell>,
    pub rows: Vec<RegionRow>,
    pub infeasible: Vec<ParamPoint>,
}

fn coordinate(axis: Axis, c: &RegionCell) -> f64 {
    match axis {
        Axis::Gamma => c.gamma,
        Axis::Lambda1 => c.lambda1,
        Axis::Lambda2 => c.lambda2,
        Axis::BetaS => c.beta_s,
        Axis::T => c.t,
    }
}

/// Cells of every feasible point at every `(t, β_S)`.
fn all_cells(cfg: &SweepConfig) -> Result<(Vec<RegionCell>, Vec<ParamPoint>)> {
    let (points, infeasible) = require_feasible(&param_points(cfg));
    let (times, betas) = (cfg.t.values(), cfg.beta_s.values());
    let grids: Vec<LnGrid> = points
        .par_iter()
        .map(|p| ln_grid(p, cfg, &times, &betas))
        .collect::<Result<_>>()?;
    let mut cells = vec![];
    for (p, g) in points.iter().zip(&grids) {
        for (ti, &t) in times.iter().enumerate() {
            for (bi, &b) in betas.iter().enumerate() {
                let ln = g.ln[ti][bi];
                cells.push(RegionCell {
                    x: 0.0,
                    y: 0.0,
                    gamma: p.gamma,
                    lambda1: p.lambda1,
                    lambda2: p.lambda2,
                    beta_s: b,
                    t,
                    ln,
                    zero: ln <= cfg.epsilon,
                });
            }
        }
    }
    Ok((cells, infeasible))
}

/// Marks `𝓛 ≤ ε` cells on the plane of `cfg.axes`; every other grid must be
/// a single value (fields fixed by the factorization constraint excepted).
pub fn zero_region_map(cfg: &SweepConfig) -> Result<ZeroRegionMap> {
    let (xa, ya) = cfg.axes;
    let derived = match cfg.fs {
        FsConstraint::None => None,
        FsConstraint::Lambda1 => Some(Axis::Lambda1),
        FsConstraint::Lambda2 => Some(Axis::Lambda2),
    };
    for (axis, len) in [
        (Axis::Gamma, cfg.gamma.len()),
        (Axis::Lambda1, cfg.lambda1.len()),
        (Axis::Lambda2, cfg.lambda2.len()),
        (Axis::BetaS, cfg.beta_s.len()),
        (Axis::T, cfg.t.len()),
    ] {
        if Some(axis) == derived {
            if axis == xa || axis == ya {
                return Err(Error::Config(format!(
                    "axis {} is fixed by the fs constraint",
                    axis.name()
                )));
            }
            continue;
        }
        if axis != xa && axis != ya && len != 1 {
            return Err(Error::Config(format!(
                "grid {} must be a single value off the scanned axes",
                axis.name()
            )));
        }
    }
    let (mut cells, infeasible) = all_cells(cfg)?;
    for c in &mut cells {
        c.x = coordinate(xa, c);
        c.y = coordinate(ya, c);
    }
    cells.sort_by(|a, b| {
        (a.y, a.x)
            .partial_cmp(&(b.y, b.x))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut ys: Vec<f64> = cells.iter().map(|c| c.y).collect();
    ys.dedup();
    let y_order: Vec<f64> = match ya {
        Axis::Gamma => cfg.gamma.values(),
        Axis::Lambda1 => cfg.lambda1.values(),
        Axis::Lambda2 => cfg.lambda2.values(),
        Axis::BetaS => cfg.beta_s.values(),
        Axis::T => cfg.t.values(),
    };
    let rows = y_order
        .iter()
        .filter(|y| ys.contains(y))
        .map(|&y| {
            let line: Vec<&RegionCell> = cells.iter().filter(|c| c.y == y).collect();
            let zeros: Vec<f64> = line.iter().filter(|c| c.zero).map(|c| c.x).collect();
            let flags: Vec<f64> = line
                .iter()
                .map(|c| if c.zero { 1.0 } else { 0.0 })
                .collect();
            RegionRow {
                y,
                zero_count: zeros.len(),
                zero_min: zeros.first().copied(),
                zero_max: zeros.last().copied(),
                zero_intervals: count_intervals(&flags, 0.5),
            }
        })
        .collect();
    Ok(ZeroRegionMap {
        x_axis: xa,
        y_axis: ya,
        cells,
        rows,
        infeasible,
    })
}

impl ZeroRegionMap {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_csv(
            path,
            // x and y repeat the two plane coordinates; the manifest names them
            &[
                "x", "y", "gamma", "lambda1", "lambda2", "beta_s", "t", "ln", "zero",
            ],
            self.cells.iter().map(|c| {
                let mut row = [c.x, c.y, c.gamma, c.lambda1, c.lambda2, c.beta_s, c.t, c.ln]
                    .map(fmt_float)
                    .to_vec();
                row.push(u8::from(c.zero).to_string());
                row
            }),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedSummary {
    pub point: ParamPoint,
    pub beta_s: f64,
    pub ln_t0: f64,
    pub max_ln: f64,
    /// Mean over the final `late_fraction` of the time window.
    pub late_mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedScan {
    #[serde(skip)]
    pub rows: Vec<(f64, ParamPoint, f64, f64)>,
    pub summaries: Vec<ClosedSummary>,
    /// Points without a real factorization field, excluded from the grid.
    pub infeasible: Vec<ParamPoint>,
}

/// `𝓛(t)` after the quench for every point and `β_S`.
pub fn closed_scan(cfg: &SweepConfig) -> Result<ClosedScan> {
    let (points, infeasible) = require_feasible(&param_points(cfg));
    let (times, betas) = (cfg.t.values(), cfg.beta_s.values());
    let grids: Vec<LnGrid> = points
        .par_iter()
        .map(|p| ln_grid(p, cfg, &times, &betas))
        .collect::<Result<_>>()?;
    let (t_lo, t_hi) = times
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| {
            (a.min(t), b.max(t))
        });
    let late_from = t_hi - cfg.late_fraction * (t_hi - t_lo);
    let mut rows = vec![];
    let mut summaries = vec![];
    for (p, g) in points.iter().zip(&grids) {
        for (bi, &b) in betas.iter().enumerate() {
            let series: Vec<(f64, f64)> = times
                .iter()
                .zip(&g.ln)
                .map(|(&t, row)| (t, row[bi]))
                .collect();
            rows.extend(series.iter().map(|&(t, ln)| (t, *p, b, ln)));
            let late: Vec<f64> = series
                .iter()
                .filter(|(t, _)| *t >= late_from)
                .map(|&(_, l)| l)
                .collect();
            let at0 = series
                .iter()
                .find(|(t, _)| *t == 0.0)
                .map_or(f64::NAN, |&(_, l)| l);
            summaries.push(ClosedSummary {
                point: *p,
                beta_s: b,
                ln_t0: at0,
                max_ln: series.iter().map(|&(_, l)| l).fold(0.0, f64::max),
                late_mean: late.iter().sum::<f64>() / late.len() as f64,
            });
        }
    }
    Ok(ClosedScan {
        rows,
        summaries,
        infeasible,
    })
}

impl ClosedScan {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_csv(
            path,
            &["t", "gamma", "lambda1", "lambda2", "beta_s", "ln"],
            self.rows.iter().map(|(t, p, b, ln)| {
                [*t, p.gamma, p.lambda1, p.lambda2, *b, *ln]
                    .map(fmt_float)
                    .to_vec()
            }),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnapshotCell {
    pub t: f64,
    pub gamma: f64,
    pub beta_s: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub ln: f64,
    pub nonzero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotSummary {
    pub t: f64,
    pub lambda2: f64,
    pub nonzero_fraction: f64,
    /// `(γ, number of disjoint 𝓛 > ε intervals in β_S)` per γ row.
    pub intervals: Vec<(f64, usize)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotGrid {
    #[serde(skip)]
    pub cells: Vec<SnapshotCell>,
    pub summaries: Vec<SnapshotSummary>,
    pub infeasible: Vec<ParamPoint>,
}

/// `𝓛 ≠ 0` masks on the `(β_S, γ)` plane at each time, one mask per `λ2`.
pub fn snapshot_grid(cfg: &SweepConfig) -> Result<SnapshotGrid> {
    if cfg.fs != FsConstraint::Lambda1 {
        return Err(Error::Config(
            "snapshot grids fix lambda1 by the fs constraint (fs = lambda1)".into(),
        ));
    }
    let (cells, infeasible) = all_cells(cfg)?;
    let cells: Vec<SnapshotCell> = cells
        .iter()
        .map(|c| SnapshotCell {
            t: c.t,
            gamma: c.gamma,
            beta_s: c.beta_s,
            lambda1: c.lambda1,
            lambda2: c.lambda2,
            ln: c.ln,
            nonzero: !c.zero,
        })
        .collect();
    let mut summaries = vec![];
    for t in cfg.t.values() {
        for l2 in cfg.lambda2.values() {
            let mask: Vec<&SnapshotCell> = cells
                .iter()
                .filter(|c| c.t == t && c.lambda2 == l2)
                .collect();
            if mask.is_empty() {
                continue;
            }
            let nonzero = mask.iter().filter(|c| c.nonzero).count();
            let intervals = cfg
                .gamma
                .values()
                .into_iter()
                .filter_map(|g| {
                    let row: Vec<&&SnapshotCell> = mask.iter().filter(|c| c.gamma == g).collect();
                    if row.is_empty() {
                        return None;
                    }
                    let mut row: Vec<(f64, f64)> = row.iter().map(|c| (c.beta_s, c.ln)).collect();
                    row.sort_by(|a, b| b.0.total_cmp(&a.0));
                    let ln: Vec<f64> = row.iter().map(|r| r.1).collect();
                    Some((g, count_intervals(&ln, cfg.epsilon)))
                })
                .collect();
            summaries.push(SnapshotSummary {
                t,
                lambda2: l2,
                nonzero_fraction: nonzero as f64 / mask.len() as f64,
                intervals,
            });
        }
    }
    Ok(SnapshotGrid {
        cells,
        summaries,
        infeasible,
    })
}

impl SnapshotGrid {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_csv(
            path,
            &[
                "t", "gamma", "beta_s", "lambda1", "lambda2", "ln", "nonzero",
            ],
            self.cells.iter().map(|c| {
                let mut row = [c.t, c.gamma, c.beta_s, c.lambda1, c.lambda2, c.ln]
                    .map(fmt_float)
                    .to_vec();
                row.push(u8::from(c.nonzero).to_string());
                row
            }),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSummary {
    pub pair: (usize, usize),
    pub max_ln: f64,
    pub t_at_max: f64,
    /// Time spent above `ε`, counted in observation intervals.
    pub support: f64,
    pub ln_final: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OpenPoint {
    pub point: ParamPoint,
    pub beta_s: f64,
    pub n_sites: usize,
    pub reflected: bool,
    pub pairs: Vec<(usize, usize)>,
    pub summaries: Vec<PairSummary>,
    pub max_trace_err: f64,
    pub min_eig: f64,
    #[serde(skip)]
    pub observations: Vec<Observation>,
}

impl OpenPoint {
    pub fn summary(&self, pair: (usize, usize)) -> Option<&PairSummary> {
        self.summaries.iter().find(|s| s.pair == pair)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OpenRun {
    pub settings: IntegratorSettings,
    pub points: Vec<OpenPoint>,
    pub infeasible: Vec<ParamPoint>,
}

fn summarize(
    pairs: &[(usize, usize)],
    obs: &[Observation],
    eps: f64,
    every: f64,
) -> Vec<PairSummary> {
    pairs
        .iter()
        .enumerate()
        .map(|(k, &pair)| {
            let (t_at_max, max_ln) =
                obs.iter()
                    .map(|o| (o.t, o.ln[k]))
                    .fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
            PairSummary {
                pair,
                max_ln,
                t_at_max,
                support: obs.iter().filter(|o| o.ln[k] > eps).count() as f64 * every,
                ln_final: obs.last().map_or(f64::NAN, |o| o.ln[k]),
            }
        })
        .collect()
}

/// Open trajectories from the thermal state of the pre-quench Hamiltonian,
/// one per feasible point and `β_S`.
pub fn open_run(cfg: &SweepConfig) -> Result<OpenRun> {
    let SystemSize::Finite(n) = cfg.size else {
        return Err(Error::Config("open_run needs a finite size".into()));
    };
    let pairs = cfg.pairs.clone().unwrap_or_else(|| default_pairs(n));
    let settings = IntegratorSettings {
        dt: cfg.dt,
        t_final: cfg.t_final,
        observe_every: cfg.observe_every,
        pairs: pairs.clone(),
        trace_tol: cfg.trace_tol,
        min_eig_tol: cfg.min_eig_tol,
        ..Default::default()
    };
    let (points, infeasible) = require_feasible(&param_points(cfg));
    let jobs: Vec<(ParamPoint, f64)> = points
        .iter()
        .flat_map(|p| cfg.beta_s.values().into_iter().map(move |b| (*p, b)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(point, beta)| {
            let p = point.params(n)?;
            let proto = cfg.protocol.protocol(&p);
            let rho0 = Spectrum::new(&build_hamiltonian(&p, proto.pre())?).thermal_state(beta)?;
            let h = build_hamiltonian(&p, proto.post())?;
            let traj = integrate(&rho0, &h, &cfg.bath, cfg.ladder, &settings)?;
            let obs = traj.observations;
            Ok(OpenPoint {
                point,
                beta_s: beta,
                n_sites: n,
                reflected: traj.reflected,
                summaries: summarize(
                    &pairs,
                    &obs,
                    cfg.epsilon,
                    (cfg.observe_every / cfg.dt).round().max(1.0) * cfg.dt,
                ),
                pairs: pairs.clone(),
                max_trace_err: obs.iter().map(|o| o.trace_err).fold(0.0, f64::max),
                min_eig: obs.iter().map(|o| o.min_eig).fold(f64::INFINITY, f64::min),
                observations: obs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OpenRun {
        settings,
        points: results,
        infeasible,
    })
}

impl OpenRun {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows = self.points.iter().flat_map(|pt| {
            pt.observations.iter().flat_map(move |o| {
                pt.pairs.iter().enumerate().map(move |(k, &(i, j))| {
                    let mut row = [
                        pt.point.gamma,
                        pt.point.lambda1,
                        pt.point.lambda2,
                        pt.beta_s,
                        o.t,
                    ]
                    .map(fmt_float)
                    .to_vec();
                    row.extend([i.to_string(), j.to_string()]);
                    row.extend([o.ln[k], o.trace_err, o.min_eig].map(fmt_float));
                    row
                })
            })
        });
        write_csv(
            path,
            &[
                "gamma",
                "lambda1",
                "lambda2",
                "beta_s",
                "t",
                "pair_i",
                "pair_j",
                "ln",
                "trace_err",
                "min_eig",
            ],
            rows,
        )
    }
}

/// Zero-temperature phase at every point (no factorization constraint).
pub fn phase_map(cfg: &SweepConfig) -> Result<Vec<(ParamPoint, Phase)>> {
    param_points(cfg)
        .into_iter()
        .filter(|p| p.feasible)
        .map(|p| Ok((p, classify_phase(&p.params(4)?))))
        .collect()
}
