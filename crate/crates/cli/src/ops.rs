use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::json;
use wirechan::channel::ImpulseResponse;
use wirechan::gen::{generate_ensemble, GeneratorConfig, PdpFamily};
use wirechan::io;
use wirechan::link::{
    capacity, coverage_cdf, optimize_cp, sweep_cp, CapacityConfig, OfdmConfig, DEFAULT_M_GRID,
};
use wirechan::lptv::lptv_bank;
use wirechan::stats::normality::lognormality_battery;
use wirechan::stats::profiles::{builtin_profiles, parse_profiles, ScenarioProfile};
use wirechan::stats::regress::{robust_regress, LineForm};
use wirechan::units::db_to_linear;

use crate::args::{
    CapacityArgs, Cli, Command, CoverageArgs, EnsembleOpts, GenerateArgs, LinkOpts, LptvArgs,
    MetricsArgs, OutOpt, ProfileSelect, RegressArgs, SweepArgs, TestsArgs,
};

/// Environment variable consulted for the default output directory.
pub const OUT_DIR_VAR: &str = "WIRECHAN_OUT";

const VERSION: &str = env!("CARGO_PKG_VERSION");

pub enum CliError {
    /// Bad arguments or configuration; exits 1.
    Usage(String),
    /// Failure while doing the work; exits 2.
    Runtime(String),
}

impl From<wirechan::Error> for CliError {
    fn from(e: wirechan::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Capacity(a) => cmd_capacity(a),
        Command::Coverage(a) => cmd_coverage(a),
        Command::Regress(a) => cmd_regress(a),
        Command::Tests(a) => cmd_tests(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Lptv(a) => cmd_lptv(a),
    }
}

// ---- output plumbing ----

struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    fn resolve(opt: &OutOpt) -> Result<Self, CliError> {
        let root = opt
            .out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_VAR).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&root).map_err(|e| {
            CliError::Runtime(format!("cannot create output directory {}: {e}", root.display()))
        })?;
        Ok(OutDir { root, written: Vec::new() })
    }

    /// Complete-or-absent: the content lands under a temporary name and is
    /// renamed into place.
    fn write(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.root.join(name);
        let tmp = self.root.join(format!(".{name}.tmp"));
        fs::write(&tmp, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", tmp.display())))?;
        fs::rename(&tmp, &path)
            .map_err(|e| CliError::Runtime(format!("cannot move into {}: {e}", path.display())))?;
        self.written.push(name.to_string());
        println!("wrote {}", path.display());
        Ok(())
    }

    fn finish(mut self, command: &str, args: serde_json::Value) -> Result<(), CliError> {
        let manifest = json!({
            "command": command,
            "version": VERSION,
            "out_dir": self.root.display().to_string(),
            "args": args,
            "outputs": self.written,
        });
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        self.write("manifest.json", &format!("{text}\n"))
    }
}

// ---- shared resolution ----

fn builtin_names() -> String {
    builtin_profiles()
        .iter()
        .map(|p| p.name.clone())
        .collect::<Vec<_>>()
        .join(", ")
}

fn resolve_profile(sel: &ProfileSelect) -> Result<ScenarioProfile, CliError> {
    match (&sel.profile, &sel.config) {
        (_, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read profile config {}: {e}", path.display()))
            })?;
            let profiles = parse_profiles(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            match &sel.profile {
                Some(name) => profiles.into_iter().find(|p| &p.name == name).ok_or_else(|| {
                    CliError::Usage(format!(
                        "profile {name} is not defined in {}",
                        path.display()
                    ))
                }),
                None if profiles.len() == 1 => Ok(profiles.into_iter().next().unwrap()),
                None => {
                    let names: Vec<String> =
                        profiles.iter().map(|p| p.name.clone()).collect();
                    Err(CliError::Usage(format!(
                        "{} defines several profiles ({}); pick one with --profile",
                        path.display(),
                        names.join(", ")
                    )))
                }
            }
        }
        (Some(name), None) => wirechan::stats::profiles::builtin_profile(name)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown profile {name}; built-ins: {}",
                    builtin_names()
                ))
            }),
        (None, None) => Err(CliError::Usage(format!(
            "either --profile or --config is required; built-ins: {}",
            builtin_names()
        ))),
    }
}

fn parse_family(s: &str) -> Result<PdpFamily, CliError> {
    PdpFamily::from_str(s).map_err(|_| {
        let known: Vec<&str> = PdpFamily::ALL.iter().map(|f| f.name()).collect();
        CliError::Usage(format!("unknown PDP family {s}; expected one of {}", known.join(", ")))
    })
}

fn generator_config(opts: &EnsembleOpts) -> Result<GeneratorConfig, CliError> {
    let profile = resolve_profile(&opts.select)?;
    let mut config = GeneratorConfig::new(profile);
    config.family = parse_family(&opts.pdp)?;
    config.taps = opts.taps;
    config.exponential_decay = opts.decay;
    config.truncate_to_bounds = opts.truncate;
    config.seed = opts.seed;
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(config)
}

fn generator_manifest(config: &GeneratorConfig, count: usize) -> serde_json::Value {
    json!({
        "profile": config.profile,
        "pdp": config.family.name(),
        "count": count,
        "seed": config.seed,
        "taps": config.taps,
        "decay": config.exponential_decay,
        "truncate": config.truncate_to_bounds,
        "rmsds_floor_s": config.rmsds_floor_s,
    })
}

fn capacity_config(link: &LinkOpts) -> Result<CapacityConfig, CliError> {
    let mut cap = CapacityConfig::default();
    cap.gamma_db = link.gamma_db;
    cap.tx_psd_dbm_hz = link.tx_psd_dbm_hz;
    cap.noise_psd_dbm_hz = link.noise_psd_dbm_hz;
    cap.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cap)
}

fn read_channel(path: &Path) -> Result<ImpulseResponse<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        io::impulse_from_json(&text)
    } else {
        io::impulse_from_csv(&text)
    };
    parsed.map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

// ---- commands ----

fn cmd_generate(a: GenerateArgs) -> Result<(), CliError> {
    let config = generator_config(&a.ensemble)?;
    let mut out = OutDir::resolve(&a.out)?;
    let ensemble = generate_ensemble(&config, a.ensemble.count, config.seed)?;
    out.write("ensemble.csv", &io::ensemble_to_csv(&ensemble))?;
    for (i, r) in ensemble.realizations.iter().take(a.emit_channels).enumerate() {
        out.write(&format!("channel_{i:05}.csv"), &io::impulse_to_csv(&r.channel))?;
    }
    let mut args = generator_manifest(&config, a.ensemble.count);
    args["emit_channels"] = json!(a.emit_channels);
    out.finish("generate", args)
}

fn cmd_metrics(a: MetricsArgs) -> Result<(), CliError> {
    let h = read_channel(&a.channel)?;
    let mut out = OutDir::resolve(&a.out)?;
    let report = json!({
        "channel": a.channel.display().to_string(),
        "taps": h.len(),
        "tap_spacing_s": h.tap_spacing(),
        "gain": h.power_gain(),
        "gain_db": h.power_gain_db(),
        "attenuation_db": -h.power_gain_db(),
        "rmsds_s": h.rms_delay_spread(),
    });
    let text = serde_json::to_string_pretty(&report).expect("metrics serialize");
    out.write("metrics.json", &format!("{text}\n"))?;
    out.finish("metrics", json!({ "channel": a.channel.display().to_string() }))
}

fn cmd_capacity(a: CapacityArgs) -> Result<(), CliError> {
    let h = read_channel(&a.channel)?;
    let cap = capacity_config(&a.link)?;
    let mut out = OutDir::resolve(&a.out)?;
    let c = capacity(&h, &cap)?;
    out.write("capacity.json", &io::capacity_report_json(&cap, c))?;
    out.finish(
        "capacity",
        json!({ "channel": a.channel.display().to_string(), "link": cap }),
    )
}

fn cmd_coverage(a: CoverageArgs) -> Result<(), CliError> {
    let config = generator_config(&a.ensemble)?;
    let cap = capacity_config(&a.link)?;
    let mut out = OutDir::resolve(&a.out)?;
    let ensemble = generate_ensemble(&config, a.ensemble.count, config.seed)?;
    let cdf = coverage_cdf(&ensemble, &cap)?;
    out.write("cdf.csv", &io::cdf_to_csv(&cdf))?;
    let mut args = generator_manifest(&config, a.ensemble.count);
    args["link"] = json!(cap);
    out.finish("coverage", args)
}

fn cmd_regress(a: RegressArgs) -> Result<(), CliError> {
    let form = match a.form.as_str() {
        "linear" => LineForm::Linear,
        "log" => LineForm::Log,
        other => {
            return Err(CliError::Usage(format!(
                "unknown form {other}; expected linear or log"
            )))
        }
    };
    let config = generator_config(&a.ensemble)?;
    let mut out = OutDir::resolve(&a.out)?;
    let ensemble = generate_ensemble(&config, a.ensemble.count, config.seed)?;
    let gains_db = ensemble.gains_db();
    let rmsds_us: Vec<f64> = ensemble.rmsds_s().iter().map(|s| s * 1e6).collect();
    let line = robust_regress(&gains_db, &rmsds_us, form)?;
    let report = json!({ "count": ensemble.len(), "line": line });
    let text = serde_json::to_string_pretty(&report).expect("regression serializes");
    out.write("regression.json", &format!("{text}\n"))?;
    let mut args = generator_manifest(&config, a.ensemble.count);
    args["form"] = json!(a.form);
    out.finish("regress", args)
}

fn cmd_tests(a: TestsArgs) -> Result<(), CliError> {
    let config = generator_config(&a.ensemble)?;
    let mut out = OutDir::resolve(&a.out)?;
    let ensemble = generate_ensemble(&config, a.ensemble.count, config.seed)?;
    let gains: Vec<f64> = ensemble.gains_db().iter().map(|&db| db_to_linear(db)).collect();
    let reports = lognormality_battery(&gains)?;
    out.write("reports.json", &io::reports_to_json(&reports))?;
    if a.csv {
        out.write("reports.csv", &io::reports_to_csv(&reports))?;
    }
    let mut args = generator_manifest(&config, a.ensemble.count);
    args["csv"] = json!(a.csv);
    out.finish("tests", args)
}

fn parse_grid(text: &str, what: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("bad {what} entry: {tok}")))
        })
        .collect()
}

fn cmd_sweep(a: SweepArgs) -> Result<(), CliError> {
    let h = read_channel(&a.channel)?;
    let m_grid: Vec<usize> = if a.grid == "default" {
        DEFAULT_M_GRID.to_vec()
    } else {
        parse_grid(&a.grid, "--grid")?
    };
    let nu_grid = a.nu_grid.as_deref().map(|s| parse_grid(s, "--nu-grid")).transpose()?;
    let cap = capacity_config(&a.link)?;
    let mut base = OfdmConfig::for_channel(&h, m_grid[0], 0);
    base.tx_psd_dbm_hz = a.link.tx_psd_dbm_hz;
    base.noise_psd_dbm_hz = a.link.noise_psd_dbm_hz;
    let mut out = OutDir::resolve(&a.out)?;
    let points = sweep_cp(&h, &m_grid, nu_grid.as_deref(), &base, &cap)?;
    let best = optimize_cp(&h, &m_grid, nu_grid.as_deref(), &base, &cap)?;
    out.write("sweep.csv", &io::sweep_to_csv(&points, &best))?;
    out.finish(
        "sweep",
        json!({
            "channel": a.channel.display().to_string(),
            "m_grid": m_grid,
            "nu_grid": nu_grid,
            "link": cap,
        }),
    )
}

fn cmd_lptv(a: LptvArgs) -> Result<(), CliError> {
    let profile = resolve_profile(&a.select)?;
    let mut config = GeneratorConfig::new(profile);
    config.family = parse_family(&a.pdp)?;
    config.taps = a.taps;
    config.exponential_decay = a.decay;
    config.truncate_to_bounds = a.truncate;
    config.seed = a.seed;
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if a.period_s <= 0.0 || !a.period_s.is_finite() {
        return Err(CliError::Usage(format!("--period-s must be positive, got {}", a.period_s)));
    }
    let mut out = OutDir::resolve(&a.out)?;
    let bank = lptv_bank(&config, a.harmonics, a.step_db, a.period_s, a.seed)?;
    out.write("lptv.json", &io::lptv_to_json(&bank))?;
    let mut args = generator_manifest(&config, 1);
    args["harmonics"] = json!(a.harmonics);
    args["step_db"] = json!(a.step_db);
    args["period_s"] = json!(a.period_s);
    out.finish("lptv", args)
}
