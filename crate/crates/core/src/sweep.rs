//! Parameter sweeps over (μ, τ, τ_D), figure presets, and CSV/JSON output.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{ADParams, ChannelParams, ChannelSpec, DephasingParams, SGADParams};
use crate::error::{QslError, Result};
use crate::qsl::{qsl_time, DerivativeMode, QslQuery, DEFAULT_QUAD_STEPS};
use crate::states::InitialStateParams;

pub const PRESETS: [&str; 6] = ["fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b"];
pub const FIGURE_MUS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub params: ChannelParams,
    pub mu: Vec<f64>,
    pub tau: Vec<f64>,
    pub tau_d: Vec<f64>,
    pub initial: InitialStateParams,
    pub quad_steps: usize,
    pub deriv: DerivativeMode,
    /// Preset name, echoed in output metadata.
    pub preset: Option<String>,
}

impl SweepConfig {
    pub fn new(params: ChannelParams, mu: Vec<f64>, tau: Vec<f64>, tau_d: Vec<f64>) -> Self {
        Self {
            params,
            mu,
            tau,
            tau_d,
            initial: InitialStateParams::figure_default(),
            quad_steps: DEFAULT_QUAD_STEPS,
            deriv: DerivativeMode::Analytic,
            preset: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.initial.validate()?;
        for (name, list) in [("mu", &self.mu), ("tau", &self.tau), ("tau_d", &self.tau_d)] {
            if list.is_empty() {
                return Err(QslError::Config(format!("{name} list is empty")));
            }
        }
        for &mu in &self.mu {
            ChannelSpec::new(self.params, mu)?;
        }
        // One representative query checks the remaining scalar ranges.
        for &tau in &self.tau {
            for &tau_d in &self.tau_d {
                QslQuery::new(ChannelSpec::new(self.params, self.mu[0])?, self.initial, tau, tau_d)?
                    .with_quad_steps(self.quad_steps)?
                    .with_deriv(self.deriv)?;
            }
        }
        Ok(())
    }

    /// Grid points in lexicographic (μ, τ, τ_D) order.
    pub fn grid(&self) -> Vec<(f64, f64, f64)> {
        let mut g = Vec::with_capacity(self.mu.len() * self.tau.len() * self.tau_d.len());
        for &mu in &self.mu {
            for &tau in &self.tau {
                for &tau_d in &self.tau_d {
                    g.push((mu, tau, tau_d));
                }
            }
        }
        g
    }
}

/// Parameters of a named figure panel.
pub fn preset_params(name: &str) -> Result<ChannelParams> {
    Ok(match name {
        "fig1a" => ChannelParams::Dephasing(DephasingParams::new(0.1)?),
        "fig1b" => ChannelParams::Dephasing(DephasingParams::new(1.0)?),
        "fig2a" => ChannelParams::AmplitudeDamping(ADParams::new(2.0, 1.0)?),
        "fig2b" => ChannelParams::AmplitudeDamping(ADParams::new(0.2, 1.0)?),
        "fig3a" => ChannelParams::Sgad(SGADParams::new(1.0, 0.0, 1.0)?),
        "fig3b" => ChannelParams::Sgad(SGADParams::new(1.0, 1.0, 1.0)?),
        other => {
            return Err(QslError::Config(format!(
                "unknown preset '{other}' (expected one of {})",
                PRESETS.join(", ")
            )))
        }
    })
}

/// Main panel: τ = 1, τ_D ∈ linspace(0.01, 5, 100).
pub fn preset(name: &str) -> Result<SweepConfig> {
    let mut c = SweepConfig::new(preset_params(name)?, FIGURE_MUS.to_vec(), vec![1.0], linspace(0.01, 5.0, 100));
    c.preset = Some(name.to_string());
    Ok(c)
}

/// Inset: τ ∈ linspace(0, 5, 100), τ_D = 1.
pub fn inset_preset(name: &str) -> Result<SweepConfig> {
    let mut c = SweepConfig::new(preset_params(name)?, FIGURE_MUS.to_vec(), linspace(0.0, 5.0, 100), vec![1.0]);
    c.preset = Some(name.to_string());
    Ok(c)
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        _ => (0..count)
            .map(|k| {
                if k == count - 1 {
                    stop
                } else {
                    start + (stop - start) * k as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

/// Parses `a,b,c` or `start:stop:count`.
pub fn parse_values(s: &str) -> Result<Vec<f64>> {
    let bad = |what: &str| QslError::Config(format!("cannot parse '{s}': {what}"));
    let s = s.trim();
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("range must be start:stop:count"));
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad("start is not a number"))?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad("stop is not a number"))?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad("count is not an integer"))?;
        if count == 0 {
            return Err(bad("count must be positive"));
        }
        return Ok(linspace(start, stop, count));
    }
    let values = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| bad("not a number")))
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(bad("empty list"));
    }
    Ok(values)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: String,
    pub mu: f64,
    pub tau: f64,
    pub tau_d: f64,
    pub f: Option<f64>,
    pub ml_avg: Option<f64>,
    pub mt_avg: Option<f64>,
    pub tau_qsl: Option<f64>,
    pub active_bound: Option<String>,
    pub frozen: Option<bool>,
    pub quad_error: Option<f64>,
    pub error: Option<String>,
}

fn evaluate(config: &SweepConfig, mu: f64, tau: f64, tau_d: f64) -> SweepRow {
    let family = config.params.family().label().to_string();
    let result = ChannelSpec::new(config.params, mu)
        .and_then(|spec| QslQuery::new(spec, config.initial, tau, tau_d))
        .and_then(|q| q.with_quad_steps(config.quad_steps))
        .and_then(|q| q.with_deriv(config.deriv))
        .and_then(|q| qsl_time(&q));
    match result {
        Ok(r) => SweepRow {
            family,
            mu,
            tau,
            tau_d,
            f: Some(r.f),
            ml_avg: Some(r.ml_avg),
            mt_avg: Some(r.mt_avg),
            tau_qsl: Some(r.tau_qsl),
            active_bound: Some(r.active_bound.label().to_string()),
            frozen: Some(r.frozen),
            quad_error: Some(r.quad_error_estimate),
            error: None,
        },
        Err(e) => SweepRow {
            family,
            mu,
            tau,
            tau_d,
            f: None,
            ml_avg: None,
            mt_avg: None,
            tau_qsl: None,
            active_bound: None,
            frozen: None,
            quad_error: None,
            error: Some(e.to_string()),
        },
    }
}

/// One row per grid point, in grid order. Points are evaluated in parallel.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    Ok(config
        .grid()
        .into_par_iter()
        .map(|(mu, tau, tau_d)| evaluate(config, mu, tau, tau_d))
        .collect())
}

/// Sweep over τ at τ_D = 1 (the configured τ_D list is replaced).
pub fn run_inset_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let mut c = config.clone();
    c.tau_d = vec![1.0];
    run_sweep(&c)
}

fn metadata(config: &SweepConfig) -> Vec<String> {
    let params = serde_json::to_string(&config.params).expect("params serialize");
    let mut lines = vec![
        format!("# qsl-core {}", env!("CARGO_PKG_VERSION")),
        format!("# preset: {}", config.preset.as_deref().unwrap_or("custom")),
        format!("# channel: {params}"),
        format!("# initial: r={} alpha={}", config.initial.r, config.initial.alpha),
        format!("# quad_steps: {} (adaptive Simpson, relative tolerance 1e-6)", config.quad_steps),
        format!("# deriv: {}", serde_json::to_string(&config.deriv).expect("deriv serialize")),
    ];
    match config.params {
        ChannelParams::AmplitudeDamping(p) => lines.push(format!("# time unit: 1/gamma0 (gamma0={})", p.gamma0)),
        ChannelParams::Sgad(p) => lines.push(format!("# time unit: 1/omega (omega={})", p.omega)),
        ChannelParams::Dephasing(_) => {}
    }
    lines.push(format!(
        "# grid: {} mu x {} tau x {} tau_d",
        config.mu.len(),
        config.tau.len(),
        config.tau_d.len()
    ));
    lines
}

pub fn write_csv(rows: &[SweepRow], config: &SweepConfig, mut out: impl Write) -> Result<()> {
    let io = |e: std::io::Error| QslError::Config(format!("write failed: {e}"));
    for line in metadata(config) {
        writeln!(out, "{line}").map_err(io)?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "family",
        "mu",
        "tau",
        "tau_d",
        "f",
        "ml_avg",
        "mt_avg",
        "tau_qsl",
        "active_bound",
        "frozen",
        "quad_error",
        "error",
    ])
    .map_err(|e| QslError::Config(e.to_string()))?;
    let num = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.family.clone(),
            r.mu.to_string(),
            r.tau.to_string(),
            r.tau_d.to_string(),
            num(r.f),
            num(r.ml_avg),
            num(r.mt_avg),
            num(r.tau_qsl),
            r.active_bound.clone().unwrap_or_default(),
            r.frozen.map(|b| b.to_string()).unwrap_or_default(),
            num(r.quad_error),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(|e| QslError::Config(e.to_string()))?;
    }
    w.flush().map_err(io)
}

pub fn write_json(rows: &[SweepRow], mut out: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows).map_err(|e| QslError::Config(e.to_string()))?;
    writeln!(out).map_err(|e| QslError::Config(e.to_string()))
}

pub fn write_rows(rows: &[SweepRow], config: &SweepConfig, format: OutputFormat, out: impl Write) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(rows, config, out),
        OutputFormat::Json => write_json(rows, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_ranges() {
        assert_eq!(parse_values("0, 0.5,1").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_values("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_values("0:1").is_err());
        assert!(parse_values("a,b").is_err());
        assert!(parse_values("0:1:0").is_err());
    }

    #[test]
    fn linspace_hits_end_points() {
        let v = linspace(0.01, 5.0, 100);
        assert_eq!(v.len(), 100);
        assert_eq!(v[0], 0.01);
        assert_eq!(v[99], 5.0);
    }

    #[test]
    fn presets_have_expected_shape() {
        for name in PRESETS {
            let c = preset(name).unwrap();
            assert_eq!(c.grid().len(), 500);
            let i = inset_preset(name).unwrap();
            assert_eq!(i.tau.len(), 100);
            assert_eq!(i.tau_d, vec![1.0]);
        }
        assert!(preset("fig4").is_err());
    }

    #[test]
    fn grid_order_is_lexicographic() {
        let c = SweepConfig::new(preset_params("fig1a").unwrap(), vec![0.0, 1.0], vec![1.0, 2.0], vec![0.5, 1.0]);
        let g = c.grid();
        assert_eq!(g[0], (0.0, 1.0, 0.5));
        assert_eq!(g[1], (0.0, 1.0, 1.0));
        assert_eq!(g[2], (0.0, 2.0, 0.5));
        assert_eq!(g[4], (1.0, 1.0, 0.5));
    }

    #[test]
    fn invalid_config_rejected() {
        let c = SweepConfig::new(preset_params("fig1a").unwrap(), vec![1.5], vec![1.0], vec![1.0]);
        assert!(run_sweep(&c).is_err());
        let c = SweepConfig::new(preset_params("fig1a").unwrap(), vec![0.5], vec![1.0], vec![]);
        assert!(run_sweep(&c).is_err());
    }

    #[test]
    fn csv_has_metadata_and_rows() {
        let c = SweepConfig::new(preset_params("fig2a").unwrap(), vec![0.0, 1.0], vec![1.0], vec![0.5]);
        let rows = run_sweep(&c).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# qsl-core"));
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data.len(), 3);
        assert!(data[0].starts_with("family,mu,tau,tau_d,f"));
    }
}
