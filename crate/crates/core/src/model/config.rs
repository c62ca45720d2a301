use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Separated,
    Radial,
    Planar,
}

/// Named initial-data family and its numeric parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub profile: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl InitialData {
    pub fn new(profile: &str) -> Self {
        Self { profile: profile.to_string(), params: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Radial {
        #[serde(default)]
        r_min: f64,
        r_max: f64,
        cells: usize,
    },
    Planar {
        half_width: f64,
        nx: usize,
        ny: usize,
    },
}

/// Numerical flux at cell faces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxKind {
    /// Local Lax–Friedrichs.
    Rusanov,
    /// Two-wave HLL.
    #[default]
    Hll,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// 1 (piecewise constant) or 2 (minmod-limited linear reconstruction).
    pub order: u8,
    pub flux: FluxKind,
    pub cfl: f64,
    /// ODE tolerance for separated trajectories and boundary traces.
    pub tol: f64,
    /// Detection fires when a gradient exceeds this multiple of the largest initial gradient.
    pub gradient_factor: f64,
    /// Absolute gradient threshold; overrides `gradient_factor` when set.
    pub gradient_threshold: Option<f64>,
    pub dt_floor: f64,
    /// `|ϑ|` truncation for separated trajectories.
    pub escape_threshold: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            order: 2,
            flux: FluxKind::Hll,
            cfl: 0.4,
            tol: 1e-10,
            gradient_factor: 1e3,
            gradient_threshold: None,
            dt_floor: 1e-9,
            escape_threshold: 1e6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputOptions {
    /// Spacing of recorded diagnostics; `None` records 100 evenly spaced outputs.
    pub interval: Option<f64>,
    /// Write a snapshot every this many outputs; 0 disables snapshots.
    pub snapshot_every: usize,
    /// Initial radii of tracked particle paths (radial runs).
    pub track_paths: Vec<f64>,
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self { interval: None, snapshot_every: 10, track_paths: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiagnosticOptions {
    /// `ε` in `ν = ‖U₀‖∞^{1/3 − ε}`.
    pub epsilon: f64,
    /// Support threshold relative to the initial perturbation amplitude.
    pub support_threshold: f64,
    /// Number of `T` samples in the weighted-momentum report; 0 disables it.
    pub report_samples: usize,
}

impl Default for DiagnosticOptions {
    fn default() -> Self {
        Self { epsilon: 0.05, support_threshold: 1e-8, report_samples: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub h_bar: f64,
    pub initial: InitialData,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    pub horizon: f64,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub output: OutputOptions,
    #[serde(default)]
    pub diagnostics: DiagnosticOptions,
}

/// Parameter names accepted by each profile, with `true` marking required ones.
fn profile_params(kind: ScenarioKind, profile: &str) -> Option<&'static [(&'static str, bool)]> {
    const BUMP: &[(&str, bool)] = &[
        ("h_amp", false),
        ("u_amp", false),
        ("v_amp", false),
        ("center", false),
        ("width", false),
    ];
    const H_BUMP: &[(&str, bool)] = &[("amplitude", true), ("center", false), ("width", false)];
    const INWARD: &[(&str, bool)] = &[
        ("u_max", true),
        ("inner", false),
        ("outer", false),
        ("h_amp", false),
        ("v_amp", false),
    ];
    const TRACE: &[(&str, bool)] = &[("g0", false), ("xi0", false), ("eta0", false), ("branch", false)];
    const SWIRL: &[(&str, bool)] = &[
        ("h_amp", false),
        ("u_amp", false),
        ("v_amp", false),
        ("swirl", false),
        ("radial", false),
        ("center_x", false),
        ("center_y", false),
        ("width", false),
    ];
    match (kind, profile) {
        (_, "rest") => Some(&[]),
        (ScenarioKind::Separated, "separated_trace") => Some(TRACE),
        (ScenarioKind::Radial, "separated_trace") => Some(TRACE),
        (ScenarioKind::Radial | ScenarioKind::Planar, "h_bump") => Some(H_BUMP),
        (ScenarioKind::Radial | ScenarioKind::Planar, "bump") => Some(BUMP),
        (ScenarioKind::Radial | ScenarioKind::Planar, "inward_bump") => Some(INWARD),
        (ScenarioKind::Planar, "offset_bump") => Some(SWIRL),
        _ => None,
    }
}

/// Radial extent `[inner, outer]` of the initial perturbation, if it has compact support.
pub fn perturbation_support(initial: &InitialData) -> Option<(f64, f64)> {
    match initial.profile.as_str() {
        "h_bump" | "bump" => {
            let c = initial.param("center", 1.0);
            let w = initial.param("width", 0.5);
            Some((c - w, c + w))
        }
        "inward_bump" => Some((initial.param("inner", 0.5), initial.param("outer", 1.0))),
        "offset_bump" => {
            let c = initial.param("center_x", 0.0).hypot(initial.param("center_y", 0.0));
            let w = initial.param("width", 0.5);
            Some(((c - w).max(0.0), c + w))
        }
        _ => None,
    }
}

const DEFAULT_CELLS_PER_UNIT: f64 = 200.0;
const DEFAULT_PLANAR_CELLS: usize = 128;
const CONE_MARGIN: f64 = 0.5;

/// Validates `cfg` and fills defaults (grid, output interval). Every violated constraint is
/// listed in the returned error.
pub fn validate_config(cfg: &ScenarioConfig) -> Result<ScenarioConfig> {
    let mut out = cfg.clone();
    let mut errs = Vec::new();

    if !(cfg.h_bar > 0.0 && cfg.h_bar.is_finite()) {
        errs.push(format!("h_bar must be positive, got {}", cfg.h_bar));
    }
    if !(cfg.horizon > 0.0 && cfg.horizon.is_finite()) {
        errs.push(format!("horizon must be positive and finite, got {}", cfg.horizon));
    }
    let s = &cfg.solver;
    if !(s.cfl > 0.0 && s.cfl <= 1.0) {
        errs.push(format!("cfl must lie in (0, 1], got {}", s.cfl));
    }
    if s.order != 1 && s.order != 2 {
        errs.push(format!("order must be 1 or 2, got {}", s.order));
    }
    if !(s.tol > 0.0) {
        errs.push(format!("tol must be positive, got {}", s.tol));
    }
    if !(s.gradient_factor > 1.0) {
        errs.push(format!("gradient_factor must exceed 1, got {}", s.gradient_factor));
    }
    if let Some(g) = s.gradient_threshold {
        if !(g > 0.0) {
            errs.push(format!("gradient_threshold must be positive, got {g}"));
        }
    }
    if !(s.dt_floor > 0.0) {
        errs.push(format!("dt_floor must be positive, got {}", s.dt_floor));
    }
    if !(s.escape_threshold > 1.0) {
        errs.push(format!("escape_threshold must exceed 1, got {}", s.escape_threshold));
    }
    if let Some(iv) = cfg.output.interval {
        if !(iv > 0.0) {
            errs.push(format!("output interval must be positive, got {iv}"));
        }
    }
    if cfg.output.track_paths.iter().any(|&x| !(x > 0.0)) {
        errs.push("tracked path radii must be positive".into());
    }
    let d = &cfg.diagnostics;
    if !(d.epsilon > 0.0 && d.epsilon < 1.0 / 3.0) {
        errs.push(format!("epsilon must lie in (0, 1/3), got {}", d.epsilon));
    }
    if !(d.support_threshold > 0.0) {
        errs.push(format!("support_threshold must be positive, got {}", d.support_threshold));
    }

    let init = &cfg.initial;
    match profile_params(cfg.kind, &init.profile) {
        None => errs.push(format!("unknown profile '{}' for {:?} scenario", init.profile, cfg.kind)),
        Some(allowed) => {
            for key in init.params.keys() {
                if !allowed.iter().any(|(name, _)| name == key) {
                    errs.push(format!("unknown parameter '{key}' for profile '{}'", init.profile));
                }
            }
            for (name, required) in allowed {
                if *required && !init.params.contains_key(*name) {
                    errs.push(format!("profile '{}' requires parameter '{name}'", init.profile));
                }
            }
            if init.params.values().any(|v| !v.is_finite()) {
                errs.push("profile parameters must be finite".into());
            }
        }
    }
    if init.profile == "separated_trace" && init.param("branch", 1.0) != 1.0 {
        errs.push("branch must be +1: only V = r(e^g - 1/2) is supported".into());
    }
    if matches!(init.profile.as_str(), "bump" | "h_bump" | "offset_bump") && !(init.param("width", 0.5) > 0.0) {
        errs.push("bump width must be positive".into());
    }
    let depth_amp = match init.profile.as_str() {
        "h_bump" => init.param("amplitude", 0.0),
        "bump" | "inward_bump" | "offset_bump" => init.param("h_amp", 0.0),
        _ => 0.0,
    };
    if cfg.h_bar + depth_amp < 0.0 {
        errs.push(format!("profile requests negative depth: h_bar {} + amplitude {depth_amp}", cfg.h_bar));
    }
    if init.profile == "inward_bump" {
        if init.param("u_max", 0.0) < 0.0 {
            errs.push("u_max must be non-negative (U0 = -u_max * bump <= 0)".into());
        }
        let (lo, hi) = (init.param("inner", 0.5), init.param("outer", 1.0));
        if !(lo > 0.0 && hi > lo) {
            errs.push(format!("inward bump needs 0 < inner < outer, got [{lo}, {hi}]"));
        }
    }

    let sigma = cfg.h_bar.max(0.0).sqrt();
    let support = perturbation_support(init);
    let reach = support.map(|(_, hi)| hi + sigma * cfg.horizon.max(0.0));
    match (cfg.kind, cfg.grid) {
        (ScenarioKind::Separated, Some(_)) => errs.push("separated scenarios take no grid".into()),
        (ScenarioKind::Separated, None) => {}
        (ScenarioKind::Radial, None) => {
            if init.profile == "separated_trace" {
                errs.push("separated_trace needs an explicit annulus grid with r_min > 0".into());
            } else if let Some(reach) = reach {
                let r_max = (reach + CONE_MARGIN).ceil();
                out.grid = Some(GridSpec::Radial {
                    r_min: 0.0,
                    r_max,
                    cells: (r_max * DEFAULT_CELLS_PER_UNIT) as usize,
                });
            } else {
                out.grid = Some(GridSpec::Radial { r_min: 0.0, r_max: 2.0, cells: 400 });
            }
        }
        (ScenarioKind::Radial, Some(GridSpec::Radial { r_min, r_max, cells })) => {
            if !(r_min >= 0.0) || !(r_max > r_min) {
                errs.push(format!("grid must be monotone with 0 <= r_min < r_max, got [{r_min}, {r_max}]"));
            }
            if cells < 8 {
                errs.push(format!("grid needs at least 8 cells, got {cells}"));
            }
            if init.profile == "separated_trace" {
                if !(r_min > 0.0) {
                    errs.push("separated_trace needs an annulus grid with r_min > 0".into());
                }
            } else if r_min != 0.0 {
                errs.push("far-field radial runs need r_min = 0".into());
            }
            if r_max > r_min && cells > 0 {
                let dr = (r_max - r_min) / cells as f64;
                if let Some((lo, hi)) = support {
                    if lo < r_min + 2.0 * dr || hi > r_max - 2.0 * dr {
                        errs.push(format!("perturbation support [{lo}, {hi}] touches the domain boundary"));
                    }
                }
                if let Some(reach) = reach {
                    if reach > r_max - 2.0 * dr {
                        errs.push(format!(
                            "support cone reaches r = {reach} by the horizon, beyond the domain edge {r_max}"
                        ));
                    }
                }
            }
        }
        (ScenarioKind::Planar, None) => {
            let half_width = reach.map_or(2.0, |r| (r + CONE_MARGIN).ceil());
            out.grid = Some(GridSpec::Planar { half_width, nx: DEFAULT_PLANAR_CELLS, ny: DEFAULT_PLANAR_CELLS });
        }
        (ScenarioKind::Planar, Some(GridSpec::Planar { half_width, nx, ny })) => {
            if !(half_width > 0.0) {
                errs.push(format!("half_width must be positive, got {half_width}"));
            }
            if nx < 8 || ny < 8 {
                errs.push(format!("planar grid needs at least 8x8 cells, got {nx}x{ny}"));
            }
            if half_width > 0.0 && nx > 0 {
                let dx = 2.0 * half_width / nx.max(ny) as f64;
                // The cone must clear the two-cell far-field ring on every side.
                if let Some(reach) = reach {
                    if reach > half_width - 2.0 * dx {
                        errs.push(format!(
                            "support cone reaches radius {reach} by the horizon, beyond the domain half-width {half_width}"
                        ));
                    }
                }
            }
        }
        (kind, Some(_)) => errs.push(format!("grid descriptor does not match {kind:?} scenario")),
    }
    if out.output.interval.is_none() && cfg.horizon > 0.0 {
        out.output.interval = Some(cfg.horizon / 100.0);
    }
    if errs.is_empty() {
        Ok(out)
    } else {
        Err(Error::InvalidConfig(errs))
    }
}
