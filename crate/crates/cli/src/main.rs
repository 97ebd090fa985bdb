//! `bsq`: scattering data, leading-order asymptotics tables, and the
//! verification suites, driven by JSON configs.
//!
//! Exit codes: 0 success, 1 I/O or parse error, 2 hard failure of the
//! global-existence assumption, 3 more than 10% grid defects,
//! 4 verification failures.

use anyhow::Context;
use boussinesq_ist::asymptotics::{evaluate_grid, GridTable};
use boussinesq_ist::files::{read_json, write_json, InitialDataFile};
use boussinesq_ist::report::Report;
use boussinesq_ist::spectral::scattering::check_assumptions;
use boussinesq_ist::spectral::SpectralData;
use boussinesq_ist::suites::{self, Suite};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "bsq",
    about = "Boussinesq inverse-scattering toolkit: spectral data, Riemann-Hilbert verification, long-time asymptotics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// worker threads for grid evaluation (0 = library default)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Compute reflection coefficients from initial data and check the
    /// admissibility assumptions.
    Scatter {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the leading asymptotic term over a (zeta, t) grid.
    Asymptotics {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the verification suites.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// run a single suite (saddle | modulus | delta-jumps |
        /// dual-representation | jump-algebra | scattering | model-rhp |
        /// theorem-structure | format)
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Run the model Riemann-Hilbert suite alone.
    ModelRhp {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    /// optional mode tag, checked against the subcommand when present
    #[serde(default)]
    mode: Option<String>,
    /// path to the initial-data file (scatter mode)
    #[serde(default)]
    initial_data: Option<PathBuf>,
    /// path to a spectral cache (asymptotics mode)
    #[serde(default)]
    spectral_cache: Option<PathBuf>,
    /// synthetic-data seed (asymptotics/verify mode without a cache)
    #[serde(default)]
    synthetic_seed: Option<u64>,
    #[serde(default = "default_zeta_interval")]
    zeta_interval: [f64; 2],
    #[serde(default = "default_n_zeta")]
    n_zeta: usize,
    #[serde(default)]
    t_list: Option<Vec<f64>>,
    #[serde(default = "default_t_range")]
    t_range: [f64; 2],
    #[serde(default = "default_n_t")]
    n_t: usize,
    #[serde(default = "default_tol_iii")]
    assumption_iii_tol: f64,
    /// emit a python plot script next to the CSV
    #[serde(default)]
    plot_script: bool,
    /// write terms.json with per-point amplitude/phase/carrier snapshots
    #[serde(default)]
    dump_terms: bool,
    /// verification fixture: perturb one cached r2 node to break the
    /// reconstruction symmetry ("r2" is the only recognized value)
    #[serde(default)]
    inject_defect: Option<String>,
}

fn default_zeta_interval() -> [f64; 2] {
    [0.25, 0.45]
}
fn default_n_zeta() -> usize {
    3
}
fn default_t_range() -> [f64; 2] {
    [10.0, 1000.0]
}
fn default_n_t() -> usize {
    3
}
fn default_tol_iii() -> f64 {
    1e-6
}

impl RunConfig {
    fn zetas(&self) -> Vec<f64> {
        let [a, b] = self.zeta_interval;
        let n = self.n_zeta.max(1);
        (0..n)
            .map(|i| {
                if n == 1 {
                    0.5 * (a + b)
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    fn ts(&self) -> Vec<f64> {
        if let Some(list) = &self.t_list {
            return list.clone();
        }
        let [a, b] = self.t_range;
        let n = self.n_t.max(1);
        (0..n)
            .map(|i| {
                if n == 1 {
                    a
                } else {
                    a * (b / a).powf(i as f64 / (n - 1) as f64)
                }
            })
            .collect()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    #[cfg(feature = "parallel")]
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Scatter { config, out } => cmd_scatter(&config, &out),
        Command::Asymptotics { config, out } => cmd_asymptotics(&config, &out),
        Command::Verify {
            config,
            out,
            only,
            seed,
        } => cmd_verify(config.as_deref(), out.as_deref(), only.as_deref(), seed),
        Command::ModelRhp { out, seed } => {
            cmd_verify(None, out.as_deref(), Some("model-rhp"), seed)
        }
    }
}

fn load_config(path: &Path) -> anyhow::Result<RunConfig> {
    read_json::<RunConfig>(path).map_err(|e| anyhow::anyhow!("{e}"))
}

fn check_mode(cfg: &RunConfig, expected: &str) -> anyhow::Result<()> {
    if let Some(mode) = &cfg.mode {
        anyhow::ensure!(
            mode == expected,
            "config mode `{mode}` does not match subcommand `{expected}`"
        );
    }
    Ok(())
}

fn cmd_scatter(config: &Path, out: &Path) -> anyhow::Result<ExitCode> {
    let cfg = load_config(config)?;
    check_mode(&cfg, "scatter")?;
    let data_path = cfg
        .initial_data
        .as_ref()
        .context("config needs `initial_data` for scatter")?;
    let file: InitialDataFile = read_json(data_path).map_err(|e| anyhow::anyhow!("{e}"))?;
    let data = file
        .into_initial_data()
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    std::fs::create_dir_all(out)?;
    let report = check_assumptions(&data, cfg.assumption_iii_tol)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    write_json(&out.join("assumptions.json"), &report).map_err(|e| anyhow::anyhow!("{e}"))?;
    let sd = SpectralData::from_initial_data(&data).map_err(|e| anyhow::anyhow!("{e}"))?;
    let records = sd.to_cache_records().map_err(|e| anyhow::anyhow!("{e}"))?;
    write_json(&out.join("spectral_cache.json"), &records)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    println!(
        "scatter: {} cache records; assumptions: no-solitons={} generic={} global-existence={}",
        records.len(),
        report.pass_no_solitons,
        report.generic,
        report.pass_global_existence
    );
    if !report.pass_global_existence {
        eprintln!(
            "assumption (iii) failed: max |r1| on [0,i] = {:.3e} > {:.1e}",
            report.max_r1_on_segment, report.tol_iii
        );
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_asymptotics(config: &Path, out: &Path) -> anyhow::Result<ExitCode> {
    let cfg = load_config(config)?;
    check_mode(&cfg, "asymptotics")?;
    let sd = if let Some(cache) = &cfg.spectral_cache {
        let records: Vec<boussinesq_ist::files::CacheRecord> =
            read_json(cache).map_err(|e| anyhow::anyhow!("{e}"))?;
        SpectralData::from_cache_records(&records).map_err(|e| anyhow::anyhow!("{e}"))?
    } else {
        SpectralData::synthetic(cfg.synthetic_seed.unwrap_or(7))
    };
    let zetas = cfg.zetas();
    let ts = cfg.ts();
    let started = Instant::now();
    let table = evaluate_grid(&zetas, &ts, &sd);
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    std::fs::create_dir_all(out)?;
    let csv_path = out.join("result.csv");
    std::fs::write(&csv_path, table_to_csv(&table))?;
    write_json(
        &out.join("result.meta.json"),
        &serde_json::json!({
            "schema_version": 1,
            "columns": CSV_HEADER,
            "wall_time_ms": wall_ms,
            "rows": table.rows.len(),
            "defects": table.defects.len(),
            "warnings": table.warnings,
            "error_order": boussinesq_ist::asymptotics::ERROR_ORDER,
        }),
    )
    .map_err(|e| anyhow::anyhow!("{e}"))?;
    if !table.defects.is_empty() {
        write_json(&out.join("defects.json"), &table.defects)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
    }
    if cfg.plot_script {
        std::fs::write(out.join("plot.py"), PLOT_SCRIPT)?;
    }
    if cfg.dump_terms {
        let terms = boussinesq_ist::asymptotics::evaluate_terms(&zetas, &ts, &sd);
        write_json(&out.join("terms.json"), &terms).map_err(|e| anyhow::anyhow!("{e}"))?;
    }
    println!(
        "asymptotics: {} rows, {} defects, {:.1} ms",
        table.rows.len(),
        table.defects.len(),
        wall_ms
    );
    let total = table.rows.len() + table.defects.len();
    if total > 0 && table.defects.len() * 10 > total {
        eprintln!("more than 10% of grid points defected");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

const CSV_HEADER: &str = "zeta,t,x,u_leading,amp1,amp2,phase1,phase2,nu1,nu_hat2";

fn table_to_csv(table: &GridTable) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in &table.rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.zeta, r.t, r.x, r.u_leading, r.amp1, r.amp2, r.phase1, r.phase2, r.nu1, r.nu_hat2
        ));
    }
    s
}

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Render u_leading against x, one curve per t, from result.csv."""
import csv
import collections
import matplotlib.pyplot as plt

by_t = collections.defaultdict(list)
with open("result.csv") as fh:
    for row in csv.DictReader(fh):
        by_t[float(row["t"])].append((float(row["x"]), float(row["u_leading"])))

for t, pts in sorted(by_t.items()):
    pts.sort()
    plt.plot([p[0] for p in pts], [p[1] for p in pts], label=f"t = {t:g}")
plt.xlabel("x")
plt.ylabel("u (leading term)")
plt.legend()
plt.tight_layout()
plt.savefig("result.png", dpi=150)
print("wrote result.png")
"#;

fn cmd_verify(
    config: Option<&Path>,
    out: Option<&Path>,
    only: Option<&str>,
    seed: u64,
) -> anyhow::Result<ExitCode> {
    let cfg = match config {
        Some(p) => Some(load_config(p)?),
        None => None,
    };
    let seed = cfg
        .as_ref()
        .and_then(|c| c.synthetic_seed)
        .unwrap_or(seed);
    let mut report = Report::default();

    let inject = cfg
        .as_ref()
        .and_then(|c| c.inject_defect.as_deref())
        .map(str::to_owned);
    if let Some(kind) = &inject {
        anyhow::ensure!(kind == "r2", "unknown inject_defect kind: {kind}");
        // perturb one cached r2 node and run the reconstruction-symmetry check
        let sd = SpectralData::synthetic(seed);
        let mut records = sd.to_cache_records().map_err(|e| anyhow::anyhow!("{e}"))?;
        if let Some(rec) = records.iter_mut().find(|r| r.contour_id == "circle2") {
            rec.r2_re += 1e-3;
        }
        let broken =
            SpectralData::from_cache_records(&records).map_err(|e| anyhow::anyhow!("{e}"))?;
        let resid = suites::r2_symmetry_residual(&broken).map_err(|e| anyhow::anyhow!("{e}"))?;
        report.push(boussinesq_ist::report::CheckRecord::new(
            "r2_symmetry",
            None,
            resid,
            1e-6,
        ));
    }

    let sd = SpectralData::synthetic(seed);
    match only {
        Some(name) => {
            let suite = Suite::from_name(name)
                .with_context(|| format!("unknown suite `{name}`"))?;
            report.merge(suite.run(&sd));
        }
        None => {
            for s in Suite::all() {
                report.merge(s.run(&sd));
            }
        }
    }
    for r in &report.records {
        println!(
            "{} {:<46} residual {:>12.4e}  tol {:>9.1e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.check,
            r.residual,
            r.tol
        );
    }
    if let Some(out) = out {
        std::fs::create_dir_all(out)?;
        write_json(&out.join("verification.json"), &report)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
    }
    if report.all_pass() {
        Ok(ExitCode::SUCCESS)
    } else {
        let failures: Vec<&str> = report
            .failures()
            .iter()
            .map(|r| r.check.as_str())
            .collect();
        eprintln!("failing checks: {}", failures.join(", "));
        Ok(ExitCode::from(4))
    }
}
