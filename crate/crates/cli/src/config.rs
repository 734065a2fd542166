//! Run configuration files.
//!
//! TOML with the sections `[grid]`, `[sim]`, `[nonlinearity]`, `[forcing]`,
//! `[initial]`, `[diagnostics]` and `[output]`. Every section is optional and
//! falls back to the defaults below. Unknown keys are errors.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use torus_ns_core::grid::MAX_DIM;
use torus_ns_core::operators::leray_project;
use torus_ns_core::random::random_field;
use torus_ns_core::{snapshot, FourierField, ForcingSpec, NonlinearitySpec, PhysicalField, SimConfig, TorusGrid};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub n: usize,
    pub ell: f64,
    pub resolution: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 2, ell: TAU, resolution: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingConfig {
    #[default]
    Zero,
    SingleMode {
        component: usize,
        mode: Vec<i64>,
        coefficient: [f64; 2],
        #[serde(default)]
        frequency: f64,
    },
    /// Time-independent forcing read from a snapshot file.
    Snapshot { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub component: usize,
    pub k: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    #[default]
    Zero,
    /// Explicit Fourier modes; each entry also sets its Hermitian partner.
    Modes { modes: Vec<ModeEntry> },
    Snapshot { path: PathBuf },
    /// Band-limited random field, see [`random_field`].
    Random {
        seed: u64,
        amplitude: f64,
        #[serde(default = "yes")]
        project: bool,
    },
    /// `A (sin x cos y, −cos x sin y, 0, …)` in units of `2π/ℓ`.
    TaylorGreen {
        #[serde(default = "one")]
        amplitude: f64,
    },
}

fn yes() -> bool {
    true
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiagnosticsConfig {
    /// Extra Sobolev orders `s` reported as `hs_<s>` columns.
    pub sobolev: Vec<f64>,
    /// Snapshot cadence in steps; must be a multiple of `sim.diag_every`.
    pub snapshot_every: u64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self { sobolev: vec![2.0], snapshot_every: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub sim: SimConfig,
    pub nonlinearity: NonlinearitySpec,
    pub forcing: ForcingConfig,
    pub initial: InitialConfig,
    pub diagnostics: DiagnosticsConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig::default(),
            sim: SimConfig::default(),
            nonlinearity: NonlinearitySpec::Advection,
            forcing: ForcingConfig::default(),
            initial: InitialConfig::default(),
            diagnostics: DiagnosticsConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

fn check_mode(v: &mut Vec<String>, what: &str, n: usize, component: usize, k: &[i64], points: usize) {
    if component >= n {
        v.push(format!("{what}: component {component} out of range for n = {n}"));
    }
    if k.len() != n {
        v.push(format!("{what}: mode {k:?} must have {n} entries"));
    } else {
        let half = (points / 2) as i64;
        if k.iter().any(|kj| *kj < -half || *kj >= half) {
            v.push(format!("{what}: mode {k:?} outside the lattice [-{half}, {half})"));
        }
    }
}

impl RunConfig {
    /// Every semantic violation, empty when the configuration is usable.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let g = &self.grid;
        if let Err(e) = TorusGrid::new(g.n, g.ell, g.resolution) {
            v.push(format!("grid: {e}"));
        }
        v.extend(self.sim.violations().into_iter().map(|s| format!("sim: {s}")));
        if let Err(e) = self.nonlinearity.validate(g.n) {
            v.push(format!("nonlinearity: {e}"));
        }
        match &self.forcing {
            ForcingConfig::SingleMode { component, mode, coefficient, frequency } => {
                check_mode(&mut v, "forcing", g.n, *component, mode, g.resolution);
                if !(coefficient.iter().all(|c| c.is_finite()) && frequency.is_finite()) {
                    v.push("forcing: coefficient and frequency must be finite".into());
                }
            }
            ForcingConfig::Snapshot { path } if path.as_os_str().is_empty() => {
                v.push("forcing: snapshot path is empty".into());
            }
            _ => {}
        }
        match &self.initial {
            InitialConfig::Modes { modes } => {
                for (i, m) in modes.iter().enumerate() {
                    check_mode(&mut v, &format!("initial.modes[{i}]"), g.n, m.component, &m.k, g.resolution);
                    if !(m.re.is_finite() && m.im.is_finite()) {
                        v.push(format!("initial.modes[{i}]: coefficient must be finite"));
                    }
                }
            }
            InitialConfig::Snapshot { path } if path.as_os_str().is_empty() => {
                v.push("initial: snapshot path is empty".into());
            }
            InitialConfig::Random { seed, amplitude, .. } => {
                if *seed > i64::MAX as u64 {
                    v.push(format!("initial: seed {seed} exceeds {}", i64::MAX));
                }
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    v.push(format!("initial: amplitude must be finite and non-negative (got {amplitude})"));
                }
            }
            InitialConfig::TaylorGreen { amplitude } if !amplitude.is_finite() => {
                v.push(format!("initial: amplitude must be finite (got {amplitude})"));
            }
            _ => {}
        }
        let d = &self.diagnostics;
        if d.sobolev.iter().any(|s| !s.is_finite()) {
            v.push("diagnostics: sobolev orders must be finite".into());
        }
        if d.snapshot_every == 0 {
            v.push("diagnostics: snapshot_every must be at least 1".into());
        } else if self.sim.diag_every > 0 && !d.snapshot_every.is_multiple_of(self.sim.diag_every) {
            v.push(format!(
                "diagnostics: snapshot_every = {} is not a multiple of sim.diag_every = {}",
                d.snapshot_every, self.sim.diag_every
            ));
        }
        v
    }

    pub fn torus(&self) -> Result<TorusGrid, CliError> {
        TorusGrid::new(self.grid.n, self.grid.ell, self.grid.resolution).map_err(|e| CliError::Config(vec![e.to_string()]))
    }

    /// Override the random-initial-data seed (the `--seed` flag).
    pub fn with_seed(mut self, new_seed: u64) -> Self {
        if let InitialConfig::Random { seed, .. } = &mut self.initial {
            *seed = new_seed;
        }
        self
    }

    /// The archived form: every effective parameter, defaults included.
    pub fn echo(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(vec![format!("cannot serialize configuration: {e}")]))
    }

    /// Resolve relative snapshot paths against `base` (the config's directory).
    pub fn rebase_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let ForcingConfig::Snapshot { path } = &mut self.forcing {
            fix(path);
        }
        if let InitialConfig::Snapshot { path } = &mut self.initial {
            fix(path);
        }
    }

    pub fn forcing_spec(&self, grid: &TorusGrid) -> Result<ForcingSpec, CliError> {
        Ok(match &self.forcing {
            ForcingConfig::Zero => ForcingSpec::Zero,
            ForcingConfig::SingleMode { component, mode, coefficient, frequency } => ForcingSpec::SingleMode {
                component: *component,
                mode: mode.clone(),
                coefficient: (coefficient[0], coefficient[1]),
                frequency: *frequency,
            },
            ForcingConfig::Snapshot { path } => {
                let s = snapshot::load(path)?;
                grid.check_same(s.field.grid())?;
                s.field.ensure_components(grid.dim(), "forcing snapshot")?;
                ForcingSpec::Field(s.field)
            }
        })
    }

    pub fn initial_field(&self, grid: &TorusGrid) -> Result<FourierField, CliError> {
        let n = grid.dim();
        Ok(match &self.initial {
            InitialConfig::Zero => FourierField::zeros(*grid, n),
            InitialConfig::Modes { modes } => {
                let mut f = FourierField::zeros(*grid, n);
                for m in modes {
                    let mut k = [0i64; MAX_DIM];
                    k[..n].copy_from_slice(&m.k);
                    f.set_real_mode(m.component, &k, Complex64::new(m.re, m.im));
                }
                f
            }
            InitialConfig::Snapshot { path } => {
                let s = snapshot::load(path)?;
                grid.check_same(s.field.grid())?;
                s.field.ensure_components(n, "initial snapshot")?;
                s.field
            }
            InitialConfig::Random { seed, amplitude, project } => {
                let f = random_field(grid, n, *amplitude, *seed);
                if *project {
                    leray_project(&f)?
                } else {
                    f
                }
            }
            InitialConfig::TaylorGreen { amplitude } => taylor_green(grid, *amplitude, self.sim.mu, 0.0)?,
        })
    }
}

/// The decaying Taylor–Green vortex at time `t`; an exact solution of the
/// advection system with `a = 1` and `f = 0`.
pub fn taylor_green(grid: &TorusGrid, amplitude: f64, mu: f64, t: f64) -> Result<FourierField, CliError> {
    let s = grid.wavenumber_scale();
    let a = amplitude * (-2.0 * mu * s * s * t).exp();
    let n = grid.dim();
    let p = PhysicalField::from_fn(*grid, n, |x| {
        let mut u = vec![0.0; n];
        u[0] = a * (s * x[0]).sin() * (s * x[1]).cos();
        u[1] = -a * (s * x[0]).cos() * (s * x[1]).sin();
        u
    })?;
    Ok(torus_ns_core::forward_transform(&p))
}

/// Parse a configuration, reporting all problems at once.
pub fn parse_config_str(text: &str) -> Result<RunConfig, CliError> {
    let de = toml::de::Deserializer::parse(text).map_err(|e| CliError::Config(vec![e.to_string()]))?;
    let mut unknown = Vec::new();
    let parsed: Result<RunConfig, _> = serde_ignored::deserialize(de, |path| unknown.push(path.to_string()));
    let mut violations: Vec<String> = unknown.into_iter().map(|k| format!("unknown key `{k}`")).collect();
    match parsed {
        Ok(cfg) => {
            violations.extend(stray_variant_keys(text, &cfg));
            violations.extend(cfg.violations());
            if violations.is_empty() {
                Ok(cfg)
            } else {
                Err(CliError::Config(violations))
            }
        }
        Err(e) => {
            violations.push(e.to_string().trim_end().to_string());
            Err(CliError::Config(violations))
        }
    }
}

/// Keys inside the `kind`-tagged tables that the chosen variant does not
/// have. Serde drops these silently for variants without fields.
fn stray_variant_keys(text: &str, cfg: &RunConfig) -> Vec<String> {
    let Ok(raw) = text.parse::<toml::Table>() else { return Vec::new() };
    let known = |v: Result<toml::Value, toml::ser::Error>| match v {
        Ok(toml::Value::Table(t)) => t.keys().cloned().collect::<Vec<_>>(),
        _ => Vec::new(),
    };
    let sections = [
        ("nonlinearity", known(toml::Value::try_from(&cfg.nonlinearity))),
        ("forcing", known(toml::Value::try_from(&cfg.forcing))),
        ("initial", known(toml::Value::try_from(&cfg.initial))),
    ];
    let mut out = Vec::new();
    for (name, allowed) in sections {
        if let Some(toml::Value::Table(t)) = raw.get(name) {
            for k in t.keys().filter(|k| !allowed.contains(k)) {
                out.push(format!("unknown key `{name}.{k}`"));
            }
        }
    }
    out
}

/// Read and parse `path`; relative snapshot paths are taken relative to the
/// file's directory.
pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
    let mut cfg = parse_config_str(&text)?;
    if let Some(dir) = path.parent() {
        cfg.rebase_paths(dir);
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use torus_ns_core::Scheme;

    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse_config_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.sim.scheme, Scheme::Etdrk2);
        assert_eq!(cfg.grid.ell, TAU);
    }

    #[test]
    fn echo_round_trips() {
        let text = r#"
            [grid]
            n = 3
            resolution = 16
            [sim]
            mu = 0.05
            a = 0
            dt = 0.01
            [nonlinearity]
            kind = "svplechac"
            b = 0.3
            [initial]
            kind = "random"
            seed = 7
            amplitude = 0.25
            [forcing]
            kind = "single_mode"
            component = 1
            mode = [1, 0, -2]
            coefficient = [0.5, -0.125]
        "#;
        let cfg = parse_config_str(text).unwrap();
        let back = parse_config_str(&cfg.echo().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn all_violations_are_listed() {
        let text = r#"
            [grid]
            n = 5
            resoluton = 32
            [sim]
            a = 2
            mu = -1.0
            [diagnostics]
            snapshot_every = 15
        "#;
        let Err(CliError::Config(v)) = parse_config_str(text) else { panic!("accepted") };
        assert!(v.iter().any(|s| s.contains("unknown key `grid.resoluton`")), "{v:?}");
        assert!(v.iter().any(|s| s.contains("a must be 0 or 1")), "{v:?}");
        assert!(v.iter().any(|s| s.contains("mu must be positive")), "{v:?}");
        assert!(v.iter().any(|s| s.starts_with("grid:")), "{v:?}");
        assert!(v.iter().any(|s| s.contains("snapshot_every")), "{v:?}");
    }

    #[test]
    fn unknown_kind_fields_are_rejected() {
        let text = "[nonlinearity]\nkind = \"advection\"\nb = 0.5\n";
        assert!(matches!(parse_config_str(text), Err(CliError::Config(_))));
        let text = "[initial]\nkind = \"taylor_green\"\namplitude = 1.0\nseed = 3\n";
        assert!(matches!(parse_config_str(text), Err(CliError::Config(_))));
    }

    #[test]
    fn random_initial_data_depends_only_on_seed() {
        let cfg = parse_config_str("[initial]\nkind = \"random\"\nseed = 11\namplitude = 1.0\n").unwrap();
        let g = cfg.torus().unwrap();
        let a = cfg.initial_field(&g).unwrap();
        assert_eq!(a, cfg.initial_field(&g).unwrap());
        assert_ne!(a, cfg.clone().with_seed(12).initial_field(&g).unwrap());
    }
}
