//! Configuration-driven Monte Carlo harness: sweep an SNR grid, run the
//! requested algorithms on seeded sample-covariance instances, and emit the
//! results as CSV.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::beamformer::{
    derive_params, factorize_presumed, initial_point, solve_direct_form, solve_inner_socp,
    worst_case_denominator,
};
use crate::error::{Error, Result};
use crate::oracle::{mix_seed, multistart_minimize};
use crate::scenario::{
    evaluate_output_sinr, generate_snapshots, presumed_signal_covariance, sample_covariance,
    synthesize_truth, AngularDensity, ArrayGeometry, ScenarioConfig,
};

/// Algorithms the harness can run per instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    DirectForm,
    InnerSocp,
    Oracle,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::DirectForm => "direct_form",
            Algorithm::InnerSocp => "inner_socp",
            Algorithm::Oracle => "oracle",
        }
    }

    pub fn parse(s: &str) -> Option<Algorithm> {
        match s {
            "direct_form" => Some(Algorithm::DirectForm),
            "inner_socp" => Some(Algorithm::InnerSocp),
            "oracle" => Some(Algorithm::Oracle),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Full experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    pub snr_grid_db: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub output_path: String,
    pub oracle_starts: usize,
}

impl ExperimentConfig {
    /// Default sweep: the baseline scenario over SNR −10..30 dB in 5 dB
    /// steps with both solver routes.
    pub fn baseline(seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            scenario: ScenarioConfig::baseline(0.0, seed),
            snr_grid_db: (0..9).map(|i| -10.0 + 5.0 * i as f64).collect(),
            algorithms: vec![Algorithm::InnerSocp, Algorithm::DirectForm],
            output_path: "results.csv".into(),
            oracle_starts: 200,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.snr_grid_db.is_empty() {
            return Err(Error::InvalidArgument("empty SNR grid".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidArgument("no algorithms requested".into()));
        }
        if self.oracle_starts < 1 {
            return Err(Error::InvalidArgument("oracle_starts must be >= 1".into()));
        }
        Ok(())
    }
}

/// One (snr, run, algorithm) outcome.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub snr_db: f64,
    pub run: usize,
    pub algorithm: Algorithm,
    pub v14: f64,
    pub val13: f64,
    pub output_sinr_db: f64,
    pub outer_iters: usize,
    pub wall_ms: f64,
    pub status: String,
}

/// Run the full sweep. Deterministic up to the wall_ms column: each
/// (snr, run) pair draws its snapshots from the sub-seed
/// mix(seed, snr_index, run), so runs can execute in parallel and the
/// collected rows are sorted into (snr, run, algorithm) order afterwards.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let mut rows: Vec<ResultRow> = Vec::new();
    for (snr_index, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
        let mut scenario = cfg.scenario.clone();
        scenario.snr_db = snr_db;
        let (r_s_true, r_ipn_true) = synthesize_truth(&scenario)?;
        let rs_presumed = presumed_signal_covariance(&scenario)?;

        let run_results: Vec<Result<Vec<ResultRow>>> = (0..scenario.runs)
            .into_par_iter()
            .map(|run| {
                let sub_seed = mix_seed(scenario.seed, snr_index as u64, run as u64);
                let snaps =
                    generate_snapshots(&r_s_true, &r_ipn_true, scenario.snapshots, sub_seed)?;
                let rhat = sample_covariance(&snaps)?;
                let params = derive_params(&rhat, &rs_presumed);
                let q = factorize_presumed(&rs_presumed, None)?;
                let mut out = Vec::with_capacity(cfg.algorithms.len());
                let w0 = match initial_point(&q, params.eta) {
                    Ok(w0) => w0,
                    Err(Error::InfeasibleFactorBound { .. }) => {
                        for &alg in &cfg.algorithms {
                            out.push(blank_row(snr_db, run, alg, "infeasible"));
                        }
                        return Ok(out);
                    }
                    Err(e) => return Err(e),
                };
                for &alg in &cfg.algorithms {
                    let row = match alg {
                        Algorithm::InnerSocp => {
                            match solve_inner_socp(&rhat, &q, &params, &w0) {
                                Ok(res) => ResultRow {
                                    snr_db,
                                    run,
                                    algorithm: alg,
                                    v14: res.v14,
                                    val13: res.val13,
                                    output_sinr_db: sinr_db(
                                        &res.w13,
                                        &r_s_true,
                                        &r_ipn_true,
                                    ),
                                    outer_iters: res.trace.outer_iterations(),
                                    wall_ms: res.trace.total_ms(),
                                    status: status_of(res.converged).into(),
                                },
                                Err(_) => blank_row(snr_db, run, alg, "error"),
                            }
                        }
                        Algorithm::DirectForm => {
                            let den =
                                worst_case_denominator(&w0, &rhat, params.gamma).sqrt();
                            let w0d: Vec<_> = w0.iter().map(|c| c / den).collect();
                            match solve_direct_form(&rhat, &q, &params, &w0d) {
                                Ok(res) => ResultRow {
                                    snr_db,
                                    run,
                                    algorithm: alg,
                                    v14: res.v14,
                                    val13: res.val13,
                                    output_sinr_db: sinr_db(
                                        &res.w13,
                                        &r_s_true,
                                        &r_ipn_true,
                                    ),
                                    outer_iters: res.trace.outer_iterations(),
                                    wall_ms: res.trace.total_ms(),
                                    status: status_of(res.converged).into(),
                                },
                                Err(_) => blank_row(snr_db, run, alg, "error"),
                            }
                        }
                        Algorithm::Oracle => {
                            let start = Instant::now();
                            match multistart_minimize(
                                &rhat,
                                params.gamma,
                                &q,
                                params.eta,
                                cfg.oracle_starts,
                                sub_seed,
                            ) {
                                Ok(rep) => ResultRow {
                                    snr_db,
                                    run,
                                    algorithm: alg,
                                    v14: rep.best_value,
                                    val13: 1.0 / rep.best_value.sqrt(),
                                    output_sinr_db: sinr_db(
                                        &rep.best_w,
                                        &r_s_true,
                                        &r_ipn_true,
                                    ),
                                    outer_iters: rep.n_converged,
                                    wall_ms: start.elapsed().as_secs_f64() * 1e3,
                                    status: "optimal".into(),
                                },
                                Err(_) => blank_row(snr_db, run, alg, "error"),
                            }
                        }
                    };
                    out.push(row);
                }
                Ok(out)
            })
            .collect();
        for r in run_results {
            rows.extend(r?);
        }
    }
    rows.sort_by(|a, b| {
        a.snr_db
            .total_cmp(&b.snr_db)
            .then(a.run.cmp(&b.run))
            .then(a.algorithm.cmp(&b.algorithm))
    });
    Ok(rows)
}

fn status_of(converged: bool) -> &'static str {
    if converged {
        "optimal"
    } else {
        "max_outer"
    }
}

fn blank_row(snr_db: f64, run: usize, algorithm: Algorithm, status: &str) -> ResultRow {
    ResultRow {
        snr_db,
        run,
        algorithm,
        v14: f64::NAN,
        val13: f64::NAN,
        output_sinr_db: f64::NAN,
        outer_iters: 0,
        wall_ms: 0.0,
        status: status.into(),
    }
}

fn sinr_db(
    w: &[num_complex::Complex64],
    r_s: &crate::hermitian::HermitianMatrix,
    r_ipn: &crate::hermitian::HermitianMatrix,
) -> f64 {
    match evaluate_output_sinr(w, r_s, r_ipn) {
        Ok(s) => 10.0 * s.log10(),
        Err(_) => f64::NAN,
    }
}

pub const CSV_HEADER: &str = "snr_db,run,algorithm,v14,val13,output_sinr_db,outer_iters,wall_ms,status";

/// CSV text for the result rows: fixed header, floats at 17 significant
/// digits, rows already in (snr, run, algorithm) order from run_experiment.
pub fn csv_string(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            fmt_float(r.snr_db),
            r.run,
            r.algorithm,
            fmt_float(r.v14),
            fmt_float(r.val13),
            fmt_float(r.output_sinr_db),
            r.outer_iters,
            fmt_float(r.wall_ms),
            r.status
        ));
    }
    out
}

fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

/// Write the rows to a CSV file.
pub fn emit_csv(rows: &[ResultRow], path: &str) -> Result<()> {
    std::fs::write(path, csv_string(rows)).map_err(|source| Error::Io {
        path: path.to_string(),
        source,
    })
}

/// Mean val13 per SNR point (rows with non-finite val13 are skipped),
/// returned in grid order.
pub fn mean_val13_by_snr(rows: &[ResultRow]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64, usize)> = Vec::new();
    for r in rows {
        if !r.val13.is_finite() {
            continue;
        }
        match out.iter_mut().find(|(snr, _, _)| *snr == r.snr_db) {
            Some((_, sum, count)) => {
                *sum += r.val13;
                *count += 1;
            }
            None => out.push((r.snr_db, r.val13, 1)),
        }
    }
    out.into_iter()
        .map(|(snr, sum, count)| (snr, sum / count as f64))
        .collect()
}

/// Parse the plain-text key = value experiment config format.
///
/// Recognized keys (all optional; defaults are the baseline sweep):
///
/// ```text
/// seed = 1
/// runs = 100
/// snapshots = 50
/// n_sensors = 10
/// spacing_wavelengths = 0.5
/// noise_power = 1.0
/// inr_db = 20
/// grid_points = 720
/// snr_grid_db = -10, -5, 0, 5, 10, 15, 20, 25, 30
/// signal = gaussian 30 4            # kind center_deg spread_deg
/// presumed_signal = gaussian 34 6
/// interferer = uniform 10 10        # repeatable; replaces the default list
/// algorithms = inner_socp, direct_form
/// output_path = results.csv
/// oracle_starts = 200
/// ```
///
/// `#` starts a comment; blank lines are ignored.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::baseline(1);
    let mut interferers: Vec<AngularDensity> = Vec::new();
    let mut saw_interferer = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::ConfigParse {
            line: line_no,
            message: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |message: String| Error::ConfigParse {
            line: line_no,
            message,
        };
        match key {
            "seed" => cfg.scenario.seed = value.parse().map_err(|_| bad(format!("bad seed `{value}`")))?,
            "runs" => cfg.scenario.runs = value.parse().map_err(|_| bad(format!("bad runs `{value}`")))?,
            "snapshots" => {
                cfg.scenario.snapshots =
                    value.parse().map_err(|_| bad(format!("bad snapshots `{value}`")))?
            }
            "n_sensors" => {
                let n = value.parse().map_err(|_| bad(format!("bad n_sensors `{value}`")))?;
                cfg.scenario.geometry = ArrayGeometry::new(
                    n,
                    cfg.scenario.geometry.spacing_wavelengths,
                )
                .map_err(|e| bad(e.to_string()))?;
            }
            "spacing_wavelengths" => {
                let s = value.parse().map_err(|_| bad(format!("bad spacing `{value}`")))?;
                cfg.scenario.geometry = ArrayGeometry::new(cfg.scenario.geometry.n_sensors, s)
                    .map_err(|e| bad(e.to_string()))?;
            }
            "noise_power" => {
                cfg.scenario.noise_power =
                    value.parse().map_err(|_| bad(format!("bad noise_power `{value}`")))?
            }
            "inr_db" => {
                cfg.scenario.inr_db =
                    value.parse().map_err(|_| bad(format!("bad inr_db `{value}`")))?
            }
            "grid_points" => {
                cfg.scenario.grid_points =
                    value.parse().map_err(|_| bad(format!("bad grid_points `{value}`")))?
            }
            "snr_grid_db" => {
                cfg.snr_grid_db = value
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad(format!("bad snr_grid_db `{value}`")))?;
            }
            "signal" => cfg.scenario.signal = parse_density(value).map_err(|m| bad(m))?,
            "presumed_signal" => {
                cfg.scenario.presumed_signal = parse_density(value).map_err(|m| bad(m))?
            }
            "interferer" => {
                saw_interferer = true;
                interferers.push(parse_density(value).map_err(|m| bad(m))?);
            }
            "algorithms" => {
                cfg.algorithms = value
                    .split(',')
                    .map(|v| {
                        let v = v.trim();
                        Algorithm::parse(v).ok_or_else(|| format!("unknown algorithm `{v}`"))
                    })
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|m| bad(m))?;
            }
            "output_path" => cfg.output_path = value.to_string(),
            "oracle_starts" => {
                cfg.oracle_starts =
                    value.parse().map_err(|_| bad(format!("bad oracle_starts `{value}`")))?
            }
            other => {
                return Err(bad(format!("unknown key `{other}`")));
            }
        }
    }
    if saw_interferer {
        cfg.scenario.interferers = interferers;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// `kind center_deg spread_deg`, e.g. `gaussian 30 4`.
fn parse_density(value: &str) -> std::result::Result<AngularDensity, String> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(format!(
            "expected `kind center_deg spread_deg`, got `{value}`"
        ));
    }
    let center: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad center `{}`", parts[1]))?;
    let spread: f64 = parts[2]
        .parse()
        .map_err(|_| format!("bad spread `{}`", parts[2]))?;
    let built = match parts[0] {
        "gaussian" => AngularDensity::gaussian(center, spread, 1.0),
        "uniform" => AngularDensity::uniform(center, spread, 1.0),
        other => return Err(format!("unknown density kind `{other}`")),
    };
    built.map_err(|e| e.to_string())
}
