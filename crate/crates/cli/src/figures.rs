//! Figure data with fixed grids (omega = 1), each paired with automated checks
//! of the qualitative behaviour the figure is meant to show.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::path::{Path, PathBuf};

use qie_core::closedform::{mean_work_hot_collective, mean_work_hot_independent, nsr_hot_asymptote};
use qie_core::metrics::{mode_comparison, ModeComparison, TUR_BOUND};
use qie_core::{probability_ratio, work_statistics_direct, CouplingMode, EngineSpec, Magnetization, WorkStatistics};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{spaced, Spacing};
use crate::error::{CliError, Result};
use crate::svg::{Heatmap, LinePlot, Scale, Series};
use crate::table::{Format, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig2,
    Fig3a,
    Fig3b,
    Fig4,
    Fig5,
    Fig6,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::Fig2,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Claim {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn claim(name: &str, passed: bool, detail: impl Into<String>) -> Claim {
    Claim {
        name: name.to_string(),
        passed,
        detail: detail.into(),
    }
}

pub struct FigureData {
    pub id: FigureId,
    /// `(suffix, table)`; written as `<id>_<suffix>.csv`.
    pub tables: Vec<(String, Table)>,
    pub plots: Vec<(String, String)>,
    pub claims: Vec<Claim>,
    /// Grid description for the manifest.
    pub grids: Vec<(String, String)>,
}

impl FigureData {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn table(&self, suffix: &str) -> Option<&Table> {
        self.tables.iter().find(|(s, _)| s == suffix).map(|(_, t)| t)
    }
}

fn spec(n: u32, beta: f64) -> Result<EngineSpec> {
    Ok(EngineSpec::new(n, 1.0, beta)?)
}

fn stats(n: u32, beta: f64, mode: CouplingMode) -> Result<WorkStatistics> {
    Ok(work_statistics_direct(&spec(n, beta)?, mode)?)
}

fn comparison(n: u32, beta: f64) -> Result<ModeComparison> {
    Ok(mode_comparison(&spec(n, beta)?, LN_2)?)
}

fn log_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    spaced(min, max, points, Spacing::Log)
}

fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> Result<U> + Sync + Send) -> Result<Vec<U>> {
    items.par_iter().map(f).collect()
}

/// Number of strict sign changes along a sequence.
fn sign_changes(v: &[f64]) -> usize {
    v.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count()
}

pub fn build(id: FigureId) -> Result<FigureData> {
    match id {
        FigureId::Fig2 => fig2(),
        FigureId::Fig3a => fig3a(),
        FigureId::Fig3b => fig3b(),
        FigureId::Fig4 => fig4(),
        FigureId::Fig5 => fig5(),
        FigureId::Fig6 => fig6(),
    }
}

pub const FIG2_BETA: (f64, f64, usize) = (0.01, 5.0, 200);
pub const FIG2_N: (u32, u32) = (2, 40);
pub const FIG2_T: (f64, f64, usize) = (0.1, 100.0, 100);

/// Where `lambda - 1` changes sign along one heatmap row, interpolated
/// linearly in `ln T` between the bracketing grid points.
pub fn unit_crossings(temps: &[f64], lambda: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..temps.len().saturating_sub(1) {
        let (a, b) = (lambda[i] - 1.0, lambda[i + 1] - 1.0);
        if (a > 0.0) != (b > 0.0) {
            let t = a / (a - b);
            let (la, lb) = (temps[i].ln(), temps[i + 1].ln());
            out.push((la + t * (lb - la)).exp());
        }
    }
    out
}

fn fig2() -> Result<FigureData> {
    let betas = log_grid(FIG2_BETA.0, FIG2_BETA.1, FIG2_BETA.2);
    let mut curves = Table::new(["n", "beta", "mean_work_collective", "mean_work_independent", "lambda_w"]);
    let mut claims = Vec::new();
    let mut plot = LinePlot {
        title: "Mean work per cycle".into(),
        x_label: "beta".into(),
        y_label: "<W>".into(),
        x_scale: Scale::Log,
        y_scale: Scale::Linear,
        series: Vec::new(),
        y_max: None,
    };
    for n in [3u32, 10] {
        let rows = par_map(&betas, |&b| Ok((comparison(n, b)?, b)))?;
        for (c, b) in &rows {
            curves.push(vec![
                n.into(),
                (*b).into(),
                c.collective.mean_work.into(),
                c.independent.mean_work.into(),
                c.lambda_w.into(),
            ]);
        }
        let diff: Vec<f64> = rows
            .iter()
            .map(|(c, _)| c.collective.mean_work - c.independent.mean_work)
            .collect();
        let (first, last) = (diff[0], diff[diff.len() - 1]);
        claims.push(claim(
            &format!("n{n}_collective_ahead_when_hot"),
            first > 0.0,
            format!("W_col - W_ind = {first:e} at beta = {}", betas[0]),
        ));
        claims.push(claim(
            &format!("n{n}_independent_ahead_when_cold"),
            last < 0.0,
            format!("W_col - W_ind = {last:e} at beta = {}", betas[betas.len() - 1]),
        ));
        let k = sign_changes(&diff);
        claims.push(claim(&format!("n{n}_single_crossing"), k == 1, format!("{k} sign changes")));
        plot.series.push(Series::new(
            format!("collective n={n}"),
            rows.iter().map(|(c, b)| (*b, c.collective.mean_work)).collect(),
        ));
        plot.series.push(
            Series::new(
                format!("independent n={n}"),
                rows.iter().map(|(c, b)| (*b, c.independent.mean_work)).collect(),
            )
            .dashed(),
        );
    }

    let temps = log_grid(FIG2_T.0, FIG2_T.1, FIG2_T.2);
    let ns: Vec<u32> = (FIG2_N.0..=FIG2_N.1).collect();
    let lambda: Vec<Vec<f64>> = par_map(&ns, |&n| {
        temps
            .iter()
            .map(|t| Ok(comparison(n, 1.0 / t)?.lambda_w.unwrap_or(f64::NAN)))
            .collect()
    })?;
    let mut heat = Table::new(["n", "temperature", "beta", "lambda_w"]);
    let mut contour = Table::new(["n", "temperature"]);
    let mut polyline = Vec::new();
    let mut bad_rows = Vec::new();
    let mut crossing = std::collections::BTreeMap::new();
    for (n, row) in ns.iter().zip(&lambda) {
        for (t, l) in temps.iter().zip(row) {
            heat.push(vec![(*n).into(), (*t).into(), (1.0 / t).into(), (*l).into()]);
        }
        let c = unit_crossings(&temps, row);
        if *n == 2 {
            // two qubits: only m = 1 pays, with a smaller collective partition function
            if row.iter().any(|l| *l < 1.0) {
                bad_rows.push(2);
            }
            continue;
        }
        if c.len() != 1 {
            bad_rows.push(*n);
        }
        if let Some(t) = c.first() {
            contour.push(vec![(*n).into(), (*t).into()]);
            polyline.push((*t, f64::from(*n)));
            crossing.insert(*n, *t);
        }
    }
    claims.push(claim(
        "contour_single_valued",
        bad_rows.is_empty(),
        format!(
            "lambda_w = 1 crossed exactly once for every n in 3..={}, never for n = 2; offending rows: {bad_rows:?}",
            FIG2_N.1
        ),
    ));
    let ladder: Vec<f64> = [4u32, 8, 16, 32].iter().filter_map(|n| crossing.get(n).copied()).collect();
    claims.push(claim(
        "advantage_needs_higher_temperature_for_larger_n",
        ladder.len() == 4 && ladder.windows(2).all(|w| w[1] > w[0]),
        format!("crossover temperatures at n = 4, 8, 16, 32: {ladder:?}"),
    ));

    let heatmap = Heatmap {
        title: "lambda_w over (T, n)".into(),
        x_label: "T".into(),
        y_label: "n".into(),
        x_scale: Scale::Log,
        x: temps,
        y: ns.iter().map(|n| f64::from(*n)).collect(),
        z: lambda,
        center: 1.0,
        contour: polyline,
        contour_label: "lambda_w = 1".into(),
    };

    Ok(FigureData {
        id: FigureId::Fig2,
        tables: vec![("curves".into(), curves), ("heatmap".into(), heat), ("contour".into(), contour)],
        plots: vec![("curves".into(), plot.render()), ("heatmap".into(), heatmap.render())],
        claims,
        grids: vec![
            ("curves".into(), format!("n in {{3, 10}}; beta: {} log-spaced points over [{}, {}]", FIG2_BETA.2, FIG2_BETA.0, FIG2_BETA.1)),
            (
                "heatmap".into(),
                format!(
                    "n = {}..={}; T: {} log-spaced points over [{}, {}]; contour by linear interpolation in ln T along each n row",
                    FIG2_N.0, FIG2_N.1, FIG2_T.2, FIG2_T.0, FIG2_T.1
                ),
            ),
        ],
    })
}

pub const FIG3A_BETAS: [f64; 3] = [0.0, 0.01, 0.05];
pub const FIG3A_N_MAX: u32 = 100;

fn fig3a() -> Result<FigureData> {
    let ns: Vec<u32> = (1..=FIG3A_N_MAX).collect();
    let mut table = Table::new(["n", "beta", "mean_work_collective", "mean_work_independent", "lambda_w"]);
    let mut claims = Vec::new();
    let mut plot = LinePlot {
        title: "Mean work against system size".into(),
        x_label: "n".into(),
        y_label: "<W>".into(),
        x_scale: Scale::Linear,
        y_scale: Scale::Linear,
        series: Vec::new(),
        y_max: None,
    };
    for beta in FIG3A_BETAS {
        let rows = par_map(&ns, |&n| comparison(n, beta))?;
        for (n, c) in ns.iter().zip(&rows) {
            table.push(vec![
                (*n).into(),
                beta.into(),
                c.collective.mean_work.into(),
                c.independent.mean_work.into(),
                c.lambda_w.into(),
            ]);
        }
        let ahead: Vec<bool> = rows
            .iter()
            .map(|c| c.collective.mean_work > c.independent.mean_work)
            .collect();
        if beta == 0.0 {
            claims.push(claim(
                "collective_ahead_at_infinite_temperature",
                ahead[1..].iter().all(|a| *a),
                "W_col > W_ind for every n in 2..=100 at beta = 0",
            ));
            let mut worst: f64 = 0.0;
            for (n, c) in ns.iter().zip(&rows) {
                let col = mean_work_hot_collective(*n, 1.0)?;
                let ind = mean_work_hot_independent(*n, 1.0)?;
                worst = worst
                    .max(((c.collective.mean_work - col) / col).abs())
                    .max(((c.independent.mean_work - ind) / ind).abs());
            }
            claims.push(claim(
                "infinite_temperature_closed_forms",
                worst < 1e-12,
                format!("worst relative deviation from the beta = 0 closed forms: {worst:e}"),
            ));
            let lw = |n: usize| rows[n - 1].lambda_w.unwrap_or(f64::NAN);
            claims.push(claim(
                "advantage_grows_with_n",
                lw(100) > lw(10) && lw(10) > lw(2),
                format!("lambda_w at n = 2, 10, 100: {}, {}, {}", lw(2), lw(10), lw(100)),
            ));
        } else if beta == 0.01 {
            claims.push(claim(
                "collective_ahead_while_n_beta_small",
                ahead[1..].iter().all(|a| *a),
                "W_col > W_ind for every n in 2..=100 at beta = 0.01",
            ));
        } else {
            let first_loss = ahead.iter().skip(1).position(|a| !a).map(|i| i + 2);
            claims.push(claim(
                "independent_overtakes_at_large_n",
                ahead[1..10].iter().all(|a| *a) && !ahead[ahead.len() - 1],
                format!("at beta = {beta}, collective first falls behind at n = {first_loss:?}"),
            ));
        }
        plot.series.push(Series::new(
            format!("collective beta={beta}"),
            ns.iter().zip(&rows).map(|(n, c)| (f64::from(*n), c.collective.mean_work)).collect(),
        ));
        plot.series.push(
            Series::new(
                format!("independent beta={beta}"),
                ns.iter().zip(&rows).map(|(n, c)| (f64::from(*n), c.independent.mean_work)).collect(),
            )
            .dashed(),
        );
    }
    Ok(FigureData {
        id: FigureId::Fig3a,
        tables: vec![("data".into(), table)],
        plots: vec![("plot".into(), plot.render())],
        claims,
        grids: vec![("data".into(), format!("n = 1..={FIG3A_N_MAX}; beta in {FIG3A_BETAS:?}"))],
    })
}

pub const FIG3B_N: u32 = 6;
pub const FIG3B_BETA: (f64, f64, usize) = (0.0, 2.0, 201);

fn fig3b() -> Result<FigureData> {
    let betas = spaced(FIG3B_BETA.0, FIG3B_BETA.1, FIG3B_BETA.2, Spacing::Linear);
    let levels = [1i64, 2, 3];
    let rows = par_map(&betas, |&b| {
        let s = spec(FIG3B_N, b)?;
        levels
            .iter()
            .map(|m| Ok(probability_ratio(&s, Magnetization::from_twice(2 * m))?))
            .collect::<Result<Vec<f64>>>()
    })?;
    let mut table = Table::new(["beta", "ratio_m1", "ratio_m2", "ratio_m3"]);
    for (b, r) in betas.iter().zip(&rows) {
        table.push(vec![(*b).into(), r[0].into(), r[1].into(), r[2].into()]);
    }
    let mut claims = Vec::new();
    let exact = [64.0 / 105.0, 64.0 / 42.0, 64.0 / 7.0];
    let worst = rows[0]
        .iter()
        .zip(exact)
        .map(|(a, e)| ((a - e) / e).abs())
        .fold(0.0, f64::max);
    claims.push(claim(
        "infinite_temperature_ratios",
        worst < 1e-12,
        format!("R_1, R_2, R_3 at beta = 0: {:?}; worst relative error {worst:e}", rows[0]),
    ));
    claims.push(claim(
        "upper_levels_favour_collective_when_hot",
        rows[0][2] > rows[0][1] && rows[0][1] > 1.0,
        "R_3 > R_2 > 1 at beta = 0",
    ));
    let monotone = (0..3).all(|k| rows.windows(2).all(|w| w[1][k] <= w[0][k] * (1.0 + 1e-14)));
    claims.push(claim(
        "ratios_fall_with_beta",
        monotone,
        "every R_m is non-increasing along the beta grid",
    ));
    claims.push(claim(
        "top_level_ratio_at_least_one",
        rows.iter().all(|r| r[2] >= 1.0 - 1e-14),
        "R_3 >= 1 over the whole grid",
    ));
    let plot = LinePlot {
        title: format!("Occupation ratio p_col / p_ind, n = {FIG3B_N}"),
        x_label: "beta".into(),
        y_label: "R_m".into(),
        x_scale: Scale::Linear,
        y_scale: Scale::Log,
        y_max: None,
        series: levels
            .iter()
            .enumerate()
            .map(|(k, m)| Series::new(format!("m = {m}"), betas.iter().zip(&rows).map(|(b, r)| (*b, r[k])).collect()))
            .collect(),
    };
    Ok(FigureData {
        id: FigureId::Fig3b,
        tables: vec![("data".into(), table)],
        plots: vec![("plot".into(), plot.render())],
        claims,
        grids: vec![(
            "data".into(),
            format!(
                "n = {FIG3B_N}; m in {{1, 2, 3}}; beta: {} linear points over [{}, {}]",
                FIG3B_BETA.2, FIG3B_BETA.0, FIG3B_BETA.1
            ),
        )],
    })
}

pub const FIG4_N_MAX: u32 = 100;
pub const FIG4_INSET_BETA: (f64, f64, usize) = (1e-3, 2.0, 200);
pub const FIG4_LARGE_N: u32 = 100_000;

fn fig4() -> Result<FigureData> {
    let ns: Vec<u32> = (1..=FIG4_N_MAX).collect();
    let rows = par_map(&ns, |&n| {
        Ok((
            stats(n, 0.0, CouplingMode::Collective)?.nsr.unwrap_or(f64::NAN),
            stats(n, 0.0, CouplingMode::Independent)?.nsr.unwrap_or(f64::NAN),
        ))
    })?;
    let mut main = Table::new(["n", "nsr_collective", "nsr_independent", "q_min_collective", "q_min_independent"]);
    for (n, (c, i)) in ns.iter().zip(&rows) {
        main.push(vec![(*n).into(), (*c).into(), (*i).into(), (LN_2 * c).into(), (LN_2 * i).into()]);
    }
    let mut claims = Vec::new();
    let nsr = |n: u32, k: usize| if k == 0 { rows[n as usize - 1].0 } else { rows[n as usize - 1].1 };
    claims.push(claim(
        "collective_less_noisy_when_hot",
        (2..=FIG4_N_MAX).all(|n| nsr(n, 0) < nsr(n, 1)),
        "nsr_col < nsr_ind for every n in 2..=100 at beta = 0",
    ));
    let odd_dips = (0..2).all(|k| (3..=19).step_by(2).all(|n| nsr(n, k) < nsr(n - 1, k) && nsr(n, k) < nsr(n + 1, k)));
    claims.push(claim(
        "odd_n_below_even_n",
        odd_dips,
        "for odd n in 3..=19 the nsr lies below both even neighbours, both modes",
    ));
    let gap = |n: u32, k: usize| (nsr(n, k) - nsr(n - 1, k)).abs();
    claims.push(claim(
        "parity_gap_closes",
        (0..2).all(|k| gap(100, k) < gap(10, k)),
        format!(
            "|nsr(10) - nsr(9)| = {:.4} / {:.4}, |nsr(100) - nsr(99)| = {:.4} / {:.4} (collective / independent)",
            gap(10, 0),
            gap(10, 1),
            gap(100, 0),
            gap(100, 1)
        ),
    ));
    let big_col = stats(FIG4_LARGE_N, 0.0, CouplingMode::Collective)?.nsr.unwrap_or(f64::NAN);
    let big_ind = stats(FIG4_LARGE_N, 0.0, CouplingMode::Independent)?.nsr.unwrap_or(f64::NAN);
    let ac = nsr_hot_asymptote(CouplingMode::Collective);
    let ai = nsr_hot_asymptote(CouplingMode::Independent);
    let (ec, ei) = (((big_col - ac) / ac).abs(), ((big_ind - ai) / ai).abs());
    claims.push(claim(
        "large_n_asymptotes",
        ec < 5e-3 && ei < 5e-3 && big_col < big_ind,
        format!("n = {FIG4_LARGE_N}: nsr_col = {big_col} (limit 5/3, rel {ec:e}); nsr_ind = {big_ind} (limit pi - 1, rel {ei:e})"),
    ));
    claims.push(claim(
        "minimum_uncertainty_below_bound",
        LN_2 * big_col < TUR_BOUND && LN_2 * big_ind < TUR_BOUND,
        format!("ln2 * nsr at n = {FIG4_LARGE_N}: {} / {}", LN_2 * big_col, LN_2 * big_ind),
    ));

    let betas = log_grid(FIG4_INSET_BETA.0, FIG4_INSET_BETA.1, FIG4_INSET_BETA.2);
    let mut inset = Table::new(["n", "beta", "nsr_collective", "nsr_independent"]);
    let mut inset_plot = LinePlot {
        title: "nsr against beta".into(),
        x_label: "beta".into(),
        y_label: "nsr".into(),
        x_scale: Scale::Log,
        y_scale: Scale::Log,
        series: Vec::new(),
        y_max: None,
    };
    for n in [20u32, 25] {
        let r = par_map(&betas, |&b| comparison(n, b))?;
        for (b, c) in betas.iter().zip(&r) {
            inset.push(vec![n.into(), (*b).into(), c.nsr_col().into(), c.nsr_ind().into()]);
        }
        let first = &r[0];
        let last = &r[r.len() - 1];
        claims.push(claim(
            &format!("inset_n{n}_collective_less_noisy_when_hot"),
            first.nsr_col() < first.nsr_ind(),
            format!("beta = {}: {:?} vs {:?}", betas[0], first.nsr_col(), first.nsr_ind()),
        ));
        claims.push(claim(
            &format!("inset_n{n}_collective_surpasses_when_cold"),
            last.nsr_col() > last.nsr_ind(),
            format!("beta = {}: {:?} vs {:?}", betas[betas.len() - 1], last.nsr_col(), last.nsr_ind()),
        ));
        inset_plot.series.push(Series::new(
            format!("collective n={n}"),
            betas.iter().zip(&r).filter_map(|(b, c)| c.nsr_col().map(|v| (*b, v))).collect(),
        ));
        inset_plot.series.push(
            Series::new(
                format!("independent n={n}"),
                betas.iter().zip(&r).filter_map(|(b, c)| c.nsr_ind().map(|v| (*b, v))).collect(),
            )
            .dashed(),
        );
    }

    let x = |k: usize| -> Vec<(f64, f64)> { ns.iter().map(|n| (f64::from(*n), nsr(*n, k))).collect() };
    let flat = |v: f64| vec![(1.0, v), (f64::from(FIG4_N_MAX), v)];
    let main_plot = LinePlot {
        title: "nsr at infinite temperature".into(),
        x_label: "n".into(),
        y_label: "nsr".into(),
        x_scale: Scale::Linear,
        y_scale: Scale::Linear,
        y_max: None,
        series: vec![
            Series::new("collective", x(0)),
            Series::new("independent", x(1)),
            Series::new("5/3", flat(ac)).dashed(),
            Series::new("pi - 1", flat(PI - 1.0)).dashed(),
        ],
    };
    Ok(FigureData {
        id: FigureId::Fig4,
        tables: vec![("main".into(), main), ("inset".into(), inset)],
        plots: vec![("main".into(), main_plot.render()), ("inset".into(), inset_plot.render())],
        claims,
        grids: vec![
            ("main".into(), format!("beta = 0; n = 1..={FIG4_N_MAX}; asymptote check at n = {FIG4_LARGE_N}")),
            (
                "inset".into(),
                format!(
                    "n in {{20, 25}}; beta: {} log-spaced points over [{}, {}]",
                    FIG4_INSET_BETA.2, FIG4_INSET_BETA.0, FIG4_INSET_BETA.1
                ),
            ),
        ],
    })
}

pub const FIG56_BETA: (f64, f64, usize) = (1e-3, 5.0, 199);

fn fig56_grid() -> Vec<f64> {
    let mut b = vec![0.0];
    b.extend(log_grid(FIG56_BETA.0, FIG56_BETA.1, FIG56_BETA.2));
    b
}

fn fig56_grid_note() -> String {
    format!(
        "n in {{25, 50}}; beta = 0 plus {} log-spaced points over [{}, {}]; erasure entropy ln 2",
        FIG56_BETA.2, FIG56_BETA.0, FIG56_BETA.1
    )
}

fn fig5() -> Result<FigureData> {
    let betas = fig56_grid();
    let mut table = Table::new(["n", "beta", "sigma_collective", "sigma_independent"]);
    let mut claims = Vec::new();
    let mut plot = LinePlot {
        title: "Entropy production per cycle".into(),
        x_label: "beta".into(),
        y_label: "Sigma".into(),
        x_scale: Scale::Log,
        y_scale: Scale::Linear,
        series: Vec::new(),
        y_max: None,
    };
    for n in [25u32, 50] {
        let r = par_map(&betas, |&b| comparison(n, b))?;
        for (b, c) in betas.iter().zip(&r) {
            table.push(vec![n.into(), (*b).into(), c.sigma_col().into(), c.sigma_ind().into()]);
        }
        let min = r.iter().map(|c| c.sigma_col().min(c.sigma_ind())).fold(f64::INFINITY, f64::min);
        claims.push(claim(
            &format!("n{n}_second_law"),
            min >= -1e-12,
            format!("smallest entropy production {min:e}"),
        ));
        claims.push(claim(
            &format!("n{n}_collective_produces_less_when_hot"),
            r[1].sigma_col() < r[1].sigma_ind(),
            format!("beta = {}: {} vs {}", betas[1], r[1].sigma_col(), r[1].sigma_ind()),
        ));
        plot.series.push(Series::new(
            format!("collective n={n}"),
            betas.iter().zip(&r).map(|(b, c)| (*b, c.sigma_col())).collect(),
        ));
        plot.series.push(
            Series::new(
                format!("independent n={n}"),
                betas.iter().zip(&r).map(|(b, c)| (*b, c.sigma_ind())).collect(),
            )
            .dashed(),
        );
    }
    Ok(FigureData {
        id: FigureId::Fig5,
        tables: vec![("data".into(), table)],
        plots: vec![("plot".into(), plot.render())],
        claims,
        grids: vec![("data".into(), fig56_grid_note())],
    })
}

fn fig6() -> Result<FigureData> {
    let betas = fig56_grid();
    let mut table = Table::new(["n", "beta", "q_collective", "q_independent"]);
    let mut claims = Vec::new();
    let mut plot = LinePlot {
        title: "Thermodynamic uncertainty (Q <= 4 shown)".into(),
        x_label: "beta".into(),
        y_label: "Q".into(),
        x_scale: Scale::Log,
        y_scale: Scale::Linear,
        series: Vec::new(),
        y_max: Some(4.0),
    };
    for n in [25u32, 50] {
        let r = par_map(&betas, |&b| comparison(n, b))?;
        for (b, c) in betas.iter().zip(&r) {
            table.push(vec![n.into(), (*b).into(), c.q_col().into(), c.q_ind().into()]);
        }
        let region: Vec<f64> = betas
            .iter()
            .zip(&r)
            .filter(|(_, c)| matches!((c.q_col(), c.q_ind()), (Some(qc), Some(qi)) if qc < qi && qi < TUR_BOUND))
            .map(|(b, _)| *b)
            .collect();
        claims.push(claim(
            &format!("n{n}_tur_violated_when_hot"),
            region.iter().any(|b| *b > 0.0),
            format!(
                "Q_col < Q_ind < 2 at {} grid points, largest beta {:?}",
                region.len(),
                region.last()
            ),
        ));
        let reversed = betas
            .iter()
            .zip(&r)
            .find(|(_, c)| matches!((c.q_col(), c.q_ind()), (Some(qc), Some(qi)) if qc > qi))
            .map(|(b, _)| *b);
        if n == 25 {
            claims.push(claim(
                "n25_collective_exceeds_when_cold",
                reversed.is_some(),
                format!("Q_col > Q_ind first at beta = {reversed:?}"),
            ));
        }
        plot.series.push(Series::new(
            format!("collective n={n}"),
            betas.iter().zip(&r).filter_map(|(b, c)| c.q_col().map(|q| (*b, q))).collect(),
        ));
        plot.series.push(
            Series::new(
                format!("independent n={n}"),
                betas.iter().zip(&r).filter_map(|(b, c)| c.q_ind().map(|q| (*b, q))).collect(),
            )
            .dashed(),
        );
    }
    plot.series.push(Series::new("Q = 2", vec![(betas[1], TUR_BOUND), (betas[betas.len() - 1], TUR_BOUND)]).dashed());
    Ok(FigureData {
        id: FigureId::Fig6,
        tables: vec![("data".into(), table)],
        plots: vec![("plot".into(), plot.render())],
        claims,
        grids: vec![("data".into(), fig56_grid_note())],
    })
}

#[derive(Serialize)]
struct Manifest<'a> {
    figure: FigureId,
    omega: f64,
    grids: std::collections::BTreeMap<&'a str, &'a str>,
    files: Vec<String>,
    claims: &'a [Claim],
    all_claims_passed: bool,
}

/// Writes tables, optional SVG plots and `<id>_manifest.json` into `dir`.
pub fn write(fig: &FigureData, dir: &Path, format: Format, svg: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = Vec::new();
    for (suffix, table) in &fig.tables {
        let path = dir.join(format!("{}_{suffix}.{}", fig.id, format.extension()));
        table.write_file(&path, format)?;
        files.push(path);
    }
    if svg {
        for (suffix, text) in &fig.plots {
            let path = dir.join(format!("{}_{suffix}.svg", fig.id));
            std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
            files.push(path);
        }
    }
    let manifest = Manifest {
        figure: fig.id,
        omega: 1.0,
        grids: fig.grids.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect(),
        files: files
            .iter()
            .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
            .collect(),
        claims: &fig.claims,
        all_claims_passed: fig.passed(),
    };
    let path = dir.join(format!("{}_manifest.json", fig.id));
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
    files.push(path);
    Ok(files)
}
