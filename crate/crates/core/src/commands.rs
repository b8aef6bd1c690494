//! Subcommands behind the `spinboson` binary. Each one writes its artifacts
//! plus a `manifest.txt` of derived quantities into the output directory and
//! returns the paths it wrote.

use std::path::{Path, PathBuf};

use crate::analysis::{
    detect_revival_with, extract_decay_rate, plan, sweep_rate_vs_alpha, PlanRow, SweepRow,
};
use crate::chain::{revival_time, ChainSpec, ModeSpectrum};
use crate::config::RunConfig;
use crate::coupling::{couplings, fit_alpha, smoothed_spectral_density, LaserKind};
use crate::error::{Error, Result};
use crate::niba::{evolve_with_spectrum, BathState};
use crate::output::{fmt_float, render_csv, render_manifest, write_text, Cell};

type Entries = Vec<(String, String)>;

fn entry(entries: &mut Entries, key: &str, value: impl Into<String>) {
    entries.push((key.to_string(), value.into()));
}

fn finish(
    command: &str,
    cfg: &RunConfig,
    out: &Path,
    mut written: Vec<PathBuf>,
    mut entries: Entries,
) -> Result<Vec<PathBuf>> {
    let names: Vec<String> = written
        .iter()
        .filter_map(|p| p.file_name())
        .map(|n| n.to_string_lossy().into_owned())
        .collect();
    entries.insert(0, ("artifacts".to_string(), names.join(",")));
    let path = out.join("manifest.txt");
    write_text(&path, &render_manifest(command, &cfg.echo(), &entries))?;
    written.push(path);
    Ok(written)
}

/// `modes.csv`: `n, omega, m_at_ion`, one row per mode, ascending.
pub fn cmd_modes(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let spectrum = ModeSpectrum::compute(&cfg.chain)?;
    let rows: Vec<Vec<Cell>> = (0..spectrum.len())
        .map(|n| {
            vec![
                (n + 1).into(),
                spectrum.omega[n].into(),
                spectrum.m_at_ion[n].into(),
            ]
        })
        .collect();
    let path = out.join("modes.csv");
    write_text(
        &path,
        &render_csv("modes", &cfg.echo(), &["n", "omega", "m_at_ion"], &rows),
    )?;

    let mut entries = Entries::new();
    entry(
        &mut entries,
        "omega_max",
        fmt_float(spectrum.max_frequency()),
    );
    entry(
        &mut entries,
        "mean_spacing",
        fmt_float(spectrum.mean_spacing),
    );
    if let Some(d0) = spectrum.d0 {
        entry(&mut entries, "d0", fmt_float(d0));
    }
    if let Some(v) = spectrum.velocity() {
        entry(&mut entries, "velocity", fmt_float(v));
    }
    if let Ok(r) = revival_time(&spectrum) {
        entry(&mut entries, "tau_rev", fmt_float(r.tau));
        if let Some(e) = r.estimate {
            entry(&mut entries, "tau_rev_estimate", fmt_float(e));
        }
    }
    finish("modes", cfg, out, vec![path], entries)
}

/// `jspec.csv`: `omega_lo, omega_hi, J`, plus the one-line fit report in `jspec_fit.txt`.
pub fn cmd_jspec(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let spectrum = ModeSpectrum::compute(&cfg.chain)?;
    let set = couplings(&spectrum, &cfg.laser);
    let sd = smoothed_spectral_density(&spectrum, &set)?;
    let fit = fit_alpha(&sd, cfg.fit_window(&spectrum))?;

    let rows: Vec<Vec<Cell>> = sd
        .bins
        .iter()
        .map(|b| vec![b.lo.into(), b.hi.into(), b.height.into()])
        .collect();
    let csv = out.join("jspec.csv");
    write_text(
        &csv,
        &render_csv("jspec", &cfg.echo(), &["omega_lo", "omega_hi", "J"], &rows),
    )?;
    let report = out.join("jspec_fit.txt");
    write_text(&report, &(fit.report() + "\n"))?;

    let mut entries = Entries::new();
    entry(&mut entries, "fit.alpha", fmt_float(fit.alpha));
    entry(
        &mut entries,
        "fit.exponent",
        fit.exponent.map_or_else(|| "nan".to_string(), fmt_float),
    );
    entry(&mut entries, "fit.window_lo", fmt_float(fit.window.lo));
    entry(&mut entries, "fit.window_hi", fmt_float(fit.window.hi));
    entry(&mut entries, "fit.bins", fit.bins_used.to_string());
    entry(&mut entries, "binned_weight", fmt_float(sd.binned_weight));
    finish("jspec", cfg, out, vec![csv, report], entries)
}

/// `p_of_t.csv` (`t, P`) and `kernel.csv` (`tau, K, Q1, Q2`), with the decay
/// fit and revival report in the manifest when the trace is long enough.
pub fn cmd_evolve(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let spectrum = ModeSpectrum::compute(&cfg.chain)?;
    let ev = evolve_with_spectrum(&cfg.evolve_config(&spectrum), &spectrum)?;
    let echo = cfg.echo();

    let rows: Vec<Vec<Cell>> = ev
        .trace
        .times()
        .zip(&ev.trace.p)
        .map(|(t, &p)| vec![t.into(), p.into()])
        .collect();
    let p_path = out.join("p_of_t.csv");
    write_text(&p_path, &render_csv("evolve", &echo, &["t", "P"], &rows))?;

    let k = &ev.kernel;
    let rows: Vec<Vec<Cell>> = (0..k.len())
        .map(|i| {
            vec![
                k.tau(i).into(),
                k.k_values[i].into(),
                k.q1[i].into(),
                k.q2[i].into(),
            ]
        })
        .collect();
    let k_path = out.join("kernel.csv");
    write_text(
        &k_path,
        &render_csv("evolve", &echo, &["tau", "K", "Q1", "Q2"], &rows),
    )?;

    let mut entries: Entries = ev.trace.metadata.clone();
    let p = &ev.trace.p;
    let min_p = p.iter().copied().fold(f64::INFINITY, f64::min);
    entry(&mut entries, "p_min", fmt_float(min_p));
    entry(
        &mut entries,
        "zero_crossings",
        p.windows(2)
            .filter(|w| w[0] * w[1] < 0.0)
            .count()
            .to_string(),
    );
    if let Some(t) = k.first_recurrence() {
        entry(&mut entries, "kernel.first_recurrence", fmt_float(t));
    }
    if let Some(r) = ev.revival {
        match extract_decay_rate(&ev.trace, r.tau) {
            Ok(fit) => {
                entry(&mut entries, "decay.gamma", fmt_float(fit.gamma));
                entry(&mut entries, "decay.method", fit.method.as_str());
                entry(&mut entries, "decay.residual", fmt_float(fit.residual));
                entry(&mut entries, "decay.window_lo", fmt_float(fit.window.0));
                entry(&mut entries, "decay.window_hi", fmt_float(fit.window.1));
                entry(&mut entries, "decay.measurable", fit.measurable.to_string());
            }
            Err(e) => entry(&mut entries, "decay.error", e.to_string()),
        }
        match detect_revival_with(&ev.trace, r.tau, &cfg.revival) {
            Ok(rep) => {
                entry(&mut entries, "revival.detected", rep.detected.to_string());
                entry(&mut entries, "revival.t_peak", fmt_float(rep.t_peak));
                entry(&mut entries, "revival.amplitude", fmt_float(rep.amplitude));
                entry(&mut entries, "revival.baseline", fmt_float(rep.baseline));
            }
            Err(e) => entry(&mut entries, "revival.error", e.to_string()),
        }
    }
    finish("evolve", cfg, out, vec![p_path, k_path], entries)
}

/// `sweep.csv`: `alpha, T, gamma, regime, method, residual, measurable`.
pub fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let spectrum = ModeSpectrum::compute(&cfg.chain)?;
    let base = cfg.evolve_config(&spectrum);
    let rows = sweep_rate_vs_alpha(&base, &cfg.alpha_grid, &cfg.t_list)?;
    let path = out.join("sweep.csv");
    write_text(&path, &sweep_csv(cfg, &rows))?;
    let mut entries = Entries::new();
    entry(&mut entries, "rows", rows.len().to_string());
    finish("sweep", cfg, out, vec![path], entries)
}

fn sweep_csv(cfg: &RunConfig, rows: &[SweepRow]) -> String {
    let cells: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| {
            vec![
                r.alpha.into(),
                r.temperature.into(),
                r.gamma.into(),
                r.regime.as_str().into(),
                r.method.as_str().into(),
                r.residual.into(),
                if r.measurable { "true" } else { "false" }.into(),
            ]
        })
        .collect();
    render_csv(
        "sweep",
        &cfg.echo(),
        &[
            "alpha",
            "T",
            "gamma",
            "regime",
            "method",
            "residual",
            "measurable",
        ],
        &cells,
    )
}

/// `plan.csv`: `alpha, omega_z_over_ER, N, omega_z_khz` over `analysis.n_list x analysis.alpha_grid`.
pub fn cmd_plan(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let chains: Vec<ChainSpec> = cfg
        .n_list
        .iter()
        .map(|&n| ChainSpec::new(n).map(|c| c.with_spacing(cfg.chain.spacing)))
        .collect::<Result<_>>()?;
    let rows = plan(&chains, &cfg.alpha_grid, cfg.recoil_khz)?;
    let path = out.join("plan.csv");
    write_text(&path, &plan_csv(cfg, &rows))?;

    let mut entries = Entries::new();
    let mut seen = Vec::new();
    for r in &rows {
        if !seen.contains(&r.n_ions) {
            seen.push(r.n_ions);
            entry(
                &mut entries,
                &format!("chain_constant.{}", r.n_ions),
                fmt_float(r.omega_z_over_er * r.alpha),
            );
        }
    }
    finish("plan", cfg, out, vec![path], entries)
}

fn plan_csv(cfg: &RunConfig, rows: &[PlanRow]) -> String {
    let cells: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| {
            vec![
                r.alpha.into(),
                r.omega_z_over_er.into(),
                r.n_ions.into(),
                r.khz.into(),
            ]
        })
        .collect();
    render_csv(
        "plan",
        &cfg.echo(),
        &["alpha", "omega_z_over_ER", "N", "omega_z_khz"],
        &cells,
    )
}

/// Fig. 5(a) alpha grid.
pub const FIGURE5_ALPHAS: [f64; 15] = [
    0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5,
];
/// Fig. 5(a) temperatures.
pub const FIGURE5_TEMPERATURES: [f64; 3] = [0.0, 1.0, 25.0];

/// Runs the caption parameters of a paper figure. The chain is fixed at
/// `N = 50` for figures 3 to 5; solver and detector settings come from `cfg`.
/// Each run writes into its own subdirectory of `out`.
pub fn cmd_figure(id: u32, cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let fig50 = || -> Result<RunConfig> {
        let mut c = cfg.clone();
        c.chain = ChainSpec::new(50)?.with_spacing(cfg.chain.spacing);
        c.laser.kind = LaserKind::TravellingWave;
        Ok(c)
    };
    match id {
        2 => {
            written.extend(cmd_modes(cfg, &out.join("modes"))?);
            for kind in [LaserKind::TravellingWave, LaserKind::StandingWaveLinear] {
                let mut c = cfg.clone();
                c.laser.kind = kind;
                written.extend(cmd_jspec(&c, &out.join(kind.as_str()))?);
            }
        }
        3 => {
            for (name, delta, alpha) in [("underdamped", 10.0, 2e-3), ("overdamped", 3.0, 4e-3)] {
                let mut c = fig50()?;
                c.laser.delta = delta;
                c.alpha_target = Some(alpha);
                c.bath = BathState::new(250.0)?;
                written.extend(cmd_evolve(&c, &out.join(name))?);
            }
        }
        4 => {
            for &alpha in &cfg.alpha_grid {
                let mut c = fig50()?;
                c.laser.delta = 10.0;
                c.alpha_target = Some(alpha);
                c.bath = BathState::zero();
                written.extend(cmd_evolve(&c, &out.join(format!("alpha_{alpha}")))?);
            }
        }
        5 => {
            let mut c = fig50()?;
            c.laser.delta = 10.0;
            c.alpha_grid = FIGURE5_ALPHAS.to_vec();
            c.t_list = FIGURE5_TEMPERATURES.to_vec();
            written.extend(cmd_sweep(&c, &out.join("sweep"))?);
            written.extend(cmd_plan(&c, &out.join("plan"))?);
        }
        _ => {
            return Err(Error::Config(format!(
                "figure: `{id}` is not one of 2, 3, 4, 5"
            )))
        }
    }
    Ok(written)
}
