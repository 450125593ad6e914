//! `qie simulate`: a Monte Carlo run rendered as `key = value` lines, plus
//! optional per-cycle records.

use std::fmt::Write;

use qie_core::dynamics::BathSpec;
use qie_core::engine::{
    run_cycles, run_cycles_dynamical, run_cycles_dynamical_recorded, run_cycles_recorded, CycleRecord,
    SimulationReport,
};
use qie_core::{work_statistics_direct, CouplingMode, EngineSpec};

use crate::error::{CliError, Result};
use crate::table::{format_float, Cell, Table};

#[derive(Debug, Clone)]
pub struct SimulateSettings {
    pub n: u32,
    pub beta: f64,
    pub omega: f64,
    pub mode: CouplingMode,
    pub cycles: u64,
    pub seed: u64,
    /// Finite thermalization stroke of this duration instead of i.i.d. cycles.
    pub thermalization_time: Option<f64>,
    pub gamma: f64,
    pub record_cycles: bool,
}

pub struct SimulateOutput {
    pub text: String,
    pub records: Option<Table>,
}

fn kv(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key} = {value}");
}

fn records_table(records: &[CycleRecord]) -> Table {
    let mut t = Table::new(["cycle_index", "m_sampled", "measured_positive", "work_extracted"]);
    for r in records {
        t.push(vec![
            Cell::Int(r.cycle_index as i64),
            r.m_sampled.into(),
            Cell::Int(i64::from(r.measured_positive)),
            r.work_extracted.into(),
        ]);
    }
    t
}

fn report_lines(out: &mut String, r: &SimulationReport, exact_mean: f64, exact_var: f64) {
    kv(out, "n", r.spec.n);
    kv(out, "beta", format_float(r.spec.beta));
    kv(out, "omega", format_float(r.spec.omega));
    kv(out, "mode", r.mode);
    kv(out, "cycles", r.n_cycles);
    kv(out, "seed", r.seed);
    kv(out, "rng", r.rng);
    kv(out, "empirical_mean", format_float(r.empirical_mean));
    kv(out, "empirical_variance", format_float(r.empirical_variance));
    kv(out, "standard_error", format_float(r.standard_error));
    kv(out, "positive_fraction", format_float(r.positive_fraction));
    kv(out, "analytic_mean", format_float(exact_mean));
    kv(out, "analytic_variance", format_float(exact_var));
    let z = if r.standard_error > 0.0 {
        (r.empirical_mean - exact_mean) / r.standard_error
    } else {
        0.0
    };
    kv(out, "mean_z_score", format_float(z));
    let hist: Vec<String> = r.histogram.iter().map(u64::to_string).collect();
    kv(out, "histogram", hist.join(","));
}

pub fn simulate(s: &SimulateSettings) -> Result<SimulateOutput> {
    let spec = EngineSpec::new(s.n, s.omega, s.beta)?;
    let mut text = String::new();
    let records;
    match s.thermalization_time {
        None => {
            let exact = work_statistics_direct(&spec, s.mode)?;
            let report = if s.record_cycles {
                let (r, rec) = run_cycles_recorded(&spec, s.mode, s.cycles, s.seed)?;
                records = Some(records_table(&rec));
                r
            } else {
                records = None;
                run_cycles(&spec, s.mode, s.cycles, s.seed)?
            };
            kv(&mut text, "variant", "iid");
            report_lines(&mut text, &report, exact.mean, exact.variance);
        }
        Some(t) => {
            if s.mode != CouplingMode::Collective {
                return Err(CliError::Usage("--dynamical simulates the collective coupling only".into()));
            }
            let bath = BathSpec::new(s.beta, s.gamma, s.omega)?;
            let exact = work_statistics_direct(&spec, s.mode)?;
            let d = if s.record_cycles {
                let (d, rec) = run_cycles_dynamical_recorded(&spec, &bath, s.cycles, t, s.seed)?;
                records = Some(records_table(&rec));
                d
            } else {
                records = None;
                run_cycles_dynamical(&spec, &bath, s.cycles, t, s.seed)?
            };
            kv(&mut text, "variant", "dynamical");
            report_lines(&mut text, &d.report, exact.mean, exact.variance);
            kv(&mut text, "gamma", format_float(s.gamma));
            kv(&mut text, "thermalization_time", format_float(d.thermalization_time));
            let worst = d.thermalization_residuals.iter().cloned().fold(0.0, f64::max);
            kv(&mut text, "max_thermalization_residual", format_float(worst));
            kv(&mut text, "unsettled_cycles", d.unsettled_cycles);
        }
    }
    Ok(SimulateOutput { text, records })
}

/// Parses `key = value` report text back into pairs.
pub fn parse_report(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}
