use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rsf_core::casimir::{
    casimir_generators_closed_form, casimir_map, default_growth_step, extract_casimir_generators,
    growth_law_residual, solve_modes, uniform_samples, Sigma, VelocityProfile, INVARIANT_TOL,
};
use rsf_core::kinetics::{validity_report, GeneratorTrajectory};
use rsf_core::symplectic::CLASSICALITY_TOL;
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::CliError;

pub const CSV_HEADER: [&str; 19] = [
    "T",
    "re_fRp",
    "im_fRp",
    "re_fRm",
    "im_fRm",
    "re_fLp",
    "im_fLp",
    "re_fLm",
    "im_fLm",
    "phi",
    "n_density",
    "ccr_residual",
    "h",
    "gamma_up",
    "gamma_up_extracted",
    "gamma_down_extracted",
    "growth_residual",
    "classical_closed",
    "classical_open",
];

pub const GAMMA_LABEL_NOTE: &str = "gamma_up = W and gamma_down = W - Y_r; the alternative labelling \
     (gamma_down = W, gamma_up = W + Y_r) would report a nonzero annihilation rate for the vacuum-bath Casimir map";

const GENERATOR_TOL: f64 = 1e-7;
const ANNIHILATION_TOL: f64 = 1e-8;
const GROWTH_TOL: f64 = 1e-6;
/// Absolute floor of the growth check, in units of `ω`, for runs with no production.
const GROWTH_FLOOR: f64 = 1e-14;
const PRODUCTION_TOL: f64 = 1e-10;
const CONSTANT_PRODUCTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub t: f64,
    pub f_rp: [f64; 2],
    pub f_rm: [f64; 2],
    pub f_lp: [f64; 2],
    pub f_lm: [f64; 2],
    pub phi: f64,
    pub n_density: f64,
    pub ccr_residual: f64,
    pub h: f64,
    pub gamma_up: f64,
    pub gamma_up_extracted: f64,
    pub gamma_down_extracted: f64,
    pub growth_residual: f64,
    pub classical_closed: bool,
    pub classical_open: bool,
}

impl Row {
    fn fields(&self) -> Vec<String> {
        let floats = [
            self.t,
            self.f_rp[0],
            self.f_rp[1],
            self.f_rm[0],
            self.f_rm[1],
            self.f_lp[0],
            self.f_lp[1],
            self.f_lm[0],
            self.f_lm[1],
            self.phi,
            self.n_density,
            self.ccr_residual,
            self.h,
            self.gamma_up,
            self.gamma_up_extracted,
            self.gamma_down_extracted,
            self.growth_residual,
        ];
        let mut out: Vec<String> = floats.iter().map(|x| format!("{x:.16e}")).collect();
        out.push(self.classical_closed.to_string());
        out.push(self.classical_open.to_string());
        out
    }
}

pub fn csv_text(rows: &[Row]) -> String {
    let mut s = CSV_HEADER.join(",");
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{}", r.fields().join(","));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub final_photon_density: f64,
    pub max_ccr_residual: f64,
    pub max_helicity_residual: f64,
    pub max_symplectic_residual: f64,
    /// Every sample's map is classical for the closed system.
    pub classical_closed: bool,
    /// Every sample's map is classical for the open system.
    pub classical_open: bool,
    pub gamma_up_min: f64,
    pub growth_law_max_residual: f64,
    pub growth_law_max_abs_dn_dt: f64,
    pub max_h_deviation: f64,
    pub max_gamma_up_deviation: f64,
    pub max_abs_gamma_down_extracted: f64,
    pub generators_valid: bool,
    pub sigma: f64,
    pub endpoint_velocity_mismatch: bool,
    pub accepted_steps: usize,
    pub gamma_label_note: &'static str,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub rows: Vec<Row>,
    pub summary: Summary,
}

impl RunReport {
    pub fn ok(&self) -> bool {
        self.summary.violations.is_empty()
    }
}

pub fn run_casimir(config: &ScenarioConfig) -> Result<RunReport, CliError> {
    let s = config.scenario()?;
    let times = uniform_samples(s.t_end, config.samples);
    let sol = solve_modes(&s, &times, config.integrator())?;
    let growth = growth_law_residual(&sol, default_growth_step(&s))?;

    let mut rows = Vec::with_capacity(sol.len());
    let mut max_symplectic = 0.0f64;
    let (mut dh, mut dg) = (0.0f64, 0.0f64);
    let mut extracted = Vec::with_capacity(sol.len());
    for i in 0..sol.len() {
        let st = sol.state(i)?;
        let map = casimir_map(&sol, i)?;
        max_symplectic = max_symplectic.max(map.verify_symplectic());
        let closed = casimir_generators_closed_form(&sol, i)?;
        let ext = extract_casimir_generators(&sol, i)?.generators;
        dh = dh.max(closed.h().max_abs_diff(ext.h()));
        dg = dg.max(closed.gamma_up().max_abs_diff(ext.gamma_up()));
        let c = |z: rsf_core::C64| [z.re, z.im];
        rows.push(Row {
            t: times[i],
            f_rp: c(st.f_rp),
            f_rm: c(st.f_rm),
            f_lp: c(st.f_lp),
            f_lm: c(st.f_lm),
            phi: st.phi,
            n_density: st.f_rm.norm_sqr(),
            ccr_residual: st.ccr_residual(),
            h: closed.h()[(0, 0)].re,
            gamma_up: closed.gamma_up()[(0, 0)].re,
            gamma_up_extracted: ext.gamma_up()[(0, 0)].re,
            gamma_down_extracted: ext.gamma_down()[(0, 0)].re,
            growth_residual: growth.residuals[i],
            classical_closed: map.is_classical_closed(CLASSICALITY_TOL),
            classical_open: map.is_classical_open(CLASSICALITY_TOL),
        });
        extracted.push(ext);
    }
    let validity = validity_report(&GeneratorTrajectory::new(times.clone(), extracted)?);

    let max = |f: fn(&Row) -> f64| rows.iter().map(f).fold(0.0f64, |a, b| a.max(b));
    let summary = Summary {
        final_photon_density: rows.last().map_or(0.0, |r| r.n_density),
        max_ccr_residual: max(|r| r.ccr_residual),
        max_helicity_residual: sol.max_helicity_residual(),
        max_symplectic_residual: max_symplectic,
        classical_closed: rows.iter().all(|r| r.classical_closed),
        classical_open: rows.iter().all(|r| r.classical_open),
        gamma_up_min: rows.iter().map(|r| r.gamma_up).fold(f64::INFINITY, f64::min),
        growth_law_max_residual: max(|r| r.growth_residual),
        growth_law_max_abs_dn_dt: growth.max_abs_dn_dt,
        max_h_deviation: dh,
        max_gamma_up_deviation: dg,
        max_abs_gamma_down_extracted: max(|r| r.gamma_down_extracted.abs()),
        generators_valid: validity.valid,
        sigma: sol.sigma(),
        endpoint_velocity_mismatch: s.endpoint_velocity_mismatch(),
        accepted_steps: sol.n_accepted_steps(),
        gamma_label_note: GAMMA_LABEL_NOTE,
        violations: Vec::new(),
    };
    let constant_auto = matches!(s.profile, VelocityProfile::Constant { .. }) && s.sigma == Sigma::Auto;
    let violations = check(&summary, &rows, s.omega, constant_auto);
    Ok(RunReport {
        rows,
        summary: Summary { violations, ..summary },
    })
}

fn check(sm: &Summary, rows: &[Row], omega: f64, constant_auto: bool) -> Vec<String> {
    let mut v = Vec::new();
    let mut bound = |name: &str, value: f64, limit: f64| {
        if !(value <= limit) {
            v.push(format!("{name}: {value:.3e} exceeds {limit:.3e}"));
        }
    };
    bound("ccr_residual", sm.max_ccr_residual, INVARIANT_TOL);
    bound("helicity_residual", sm.max_helicity_residual, INVARIANT_TOL);
    bound("symplectic_residual", sm.max_symplectic_residual, INVARIANT_TOL);
    bound("h_deviation", sm.max_h_deviation, GENERATOR_TOL * omega);
    bound("gamma_up_deviation", sm.max_gamma_up_deviation, GENERATOR_TOL * omega);
    bound("gamma_down_extracted", sm.max_abs_gamma_down_extracted, ANNIHILATION_TOL * omega);
    bound(
        "growth_residual",
        sm.growth_law_max_residual,
        GROWTH_TOL * sm.growth_law_max_abs_dn_dt + GROWTH_FLOOR * omega,
    );
    if constant_auto {
        bound("constant_velocity_production", sm.final_photon_density, CONSTANT_PRODUCTION_TOL);
    }
    if let Some(r) = rows.iter().find(|r| !r.classical_open) {
        v.push(format!("classical_open failed at T = {}", r.t));
    }
    if let Some(r) = rows.iter().find(|r| r.n_density > PRODUCTION_TOL && r.classical_closed) {
        v.push(format!("classical_closed despite production {:.3e} at T = {}", r.n_density, r.t));
    }
    v
}

/// Output directory and prefix, `--out` taking precedence over the config.
pub fn output_target(config: &ScenarioConfig, out: Option<&Path>) -> (PathBuf, String) {
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    (dir, config.output.prefix.clone())
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialise") + "\n"
}

/// Writes `<prefix>.csv` and `<prefix>_summary.json`.
pub fn write_run(report: &RunReport, dir: &Path, prefix: &str) -> Result<PathBuf, CliError> {
    let csv = dir.join(format!("{prefix}.csv"));
    write_file(&csv, &csv_text(&report.rows))?;
    write_file(&dir.join(format!("{prefix}_summary.json")), &to_json(&report.summary))?;
    Ok(csv)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub index: usize,
    pub omega: f64,
    pub theta: f64,
    pub drive_frequency: Option<f64>,
    pub beta0: f64,
    pub file: String,
    pub ok: bool,
    pub final_photon_density: Option<f64>,
    pub error: Option<String>,
    #[serde(skip)]
    pub report: Option<RunReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub points: Vec<SweepPoint>,
    /// Index of the point with the largest final photon density.
    pub max_production_index: Option<usize>,
}

impl SweepReport {
    pub fn ok(&self) -> bool {
        self.points.iter().all(|p| p.ok)
    }
}

/// Runs every grid point on a pool of `jobs` threads. Point failures are recorded, not fatal.
pub fn run_sweep(config: &ScenarioConfig, jobs: usize) -> Result<SweepReport, CliError> {
    let grid = config.grid()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("jobs: {e}")))?;
    let prefix = &config.output.prefix;
    let points: Vec<SweepPoint> = pool.install(|| {
        grid.par_iter()
            .enumerate()
            .map(|(index, c)| {
                let profile = c.profile.to_profile();
                let drive = match profile {
                    VelocityProfile::Sinusoid { drive_frequency, .. } => Some(drive_frequency),
                    _ => None,
                };
                let result = run_casimir(c);
                let (ok, density, error, report) = match result {
                    Ok(r) => (
                        r.ok(),
                        Some(r.summary.final_photon_density),
                        (!r.ok()).then(|| r.summary.violations.join("; ")),
                        Some(r),
                    ),
                    Err(e) => (false, None, Some(e.to_string()), None),
                };
                SweepPoint {
                    index,
                    omega: c.omega,
                    theta: c.theta,
                    drive_frequency: drive,
                    beta0: profile.beta0(),
                    file: format!("{prefix}_{index:04}.csv"),
                    ok,
                    final_photon_density: density,
                    error,
                    report,
                }
            })
            .collect()
    });
    let max_production_index = points
        .iter()
        .filter_map(|p| p.final_photon_density.map(|d| (p.index, d)))
        .fold(None, |best: Option<(usize, f64)>, (i, d)| match best {
            Some((_, bd)) if bd >= d => best,
            _ => Some((i, d)),
        })
        .map(|(i, _)| i);
    Ok(SweepReport {
        points,
        max_production_index,
    })
}

/// Writes one CSV per successful point and `<prefix>_sweep.json`.
pub fn write_sweep(report: &SweepReport, dir: &Path, prefix: &str) -> Result<(), CliError> {
    for p in &report.points {
        if let Some(r) = &p.report {
            write_file(&dir.join(&p.file), &csv_text(&r.rows))?;
        }
    }
    write_file(&dir.join(format!("{prefix}_sweep.json")), &to_json(report))
}

pub const EXTRACT_HEADER: [&str; 9] = [
    "T",
    "h_closed",
    "gamma_up_closed",
    "h_extracted",
    "gamma_up_extracted",
    "gamma_down_extracted",
    "y_r",
    "d",
    "w",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractSummary {
    pub max_h_deviation: f64,
    pub max_gamma_up_deviation: f64,
    pub max_abs_gamma_down_extracted: f64,
    pub valid: bool,
    pub worst_validity: Option<(f64, f64)>,
    pub gamma_label_note: &'static str,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractReport {
    pub csv: String,
    pub summary: ExtractSummary,
}

/// Generator trajectory along the Casimir family: both generator paths per sample.
pub fn run_extract(config: &ScenarioConfig) -> Result<ExtractReport, CliError> {
    let s = config.scenario()?;
    let times = uniform_samples(s.t_end, config.samples);
    let sol = solve_modes(&s, &times, config.integrator())?;
    let mut csv = EXTRACT_HEADER.join(",");
    csv.push('\n');
    let (mut dh, mut dg, mut gd) = (0.0f64, 0.0f64, 0.0f64);
    let mut gens = Vec::with_capacity(sol.len());
    for (i, &t) in times.iter().enumerate() {
        let closed = casimir_generators_closed_form(&sol, i)?;
        let ex = extract_casimir_generators(&sol, i)?;
        let g = &ex.generators;
        dh = dh.max(closed.h().max_abs_diff(g.h()));
        dg = dg.max(closed.gamma_up().max_abs_diff(g.gamma_up()));
        gd = gd.max(g.gamma_down().max_abs());
        let vals = [
            t,
            closed.h()[(0, 0)].re,
            closed.gamma_up()[(0, 0)].re,
            g.h()[(0, 0)].re,
            g.gamma_up()[(0, 0)].re,
            g.gamma_down()[(0, 0)].re,
            ex.y_r[(0, 0)].re,
            ex.d[(0, 0)].re,
            ex.w[(0, 0)].re,
        ];
        let line: Vec<String> = vals.iter().map(|x| format!("{x:.16e}")).collect();
        let _ = writeln!(csv, "{}", line.join(","));
        gens.push(ex.generators);
    }
    let validity = validity_report(&GeneratorTrajectory::new(times, gens)?);
    let mut violations = Vec::new();
    for (name, value, limit) in [
        ("h_deviation", dh, GENERATOR_TOL * s.omega),
        ("gamma_up_deviation", dg, GENERATOR_TOL * s.omega),
        ("gamma_down_extracted", gd, ANNIHILATION_TOL * s.omega),
    ] {
        if !(value <= limit) {
            violations.push(format!("{name}: {value:.3e} exceeds {limit:.3e}"));
        }
    }
    Ok(ExtractReport {
        csv,
        summary: ExtractSummary {
            max_h_deviation: dh,
            max_gamma_up_deviation: dg,
            max_abs_gamma_down_extracted: gd,
            valid: validity.valid,
            worst_validity: validity.worst,
            gamma_label_note: GAMMA_LABEL_NOTE,
            violations,
        },
    })
}
