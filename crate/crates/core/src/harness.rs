//! Config files, policy files, ρ sweeps and critical-ρ detection.
//!
//! All on-disk documents are JSON with a `schema_version` field (currently
//! `1`). Tensors are nested arrays in the axis order documented on each
//! field. Numbers are written in shortest round-trip form, so a
//! save-then-load cycle reproduces every `f64` bit for bit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::{self, DynamicsSettings};
use crate::error::{Error, Result};
use crate::game::{DistortionMatrix, GameInstance, ReceiverPolicy, SenderPolicy};
use crate::multi::{MultiGameInstance, MultiJoint, MultiReceiverPolicy};
use crate::prob::{FiniteSpace, JointPXZW, LogBase};
use crate::solver::{self, SolverSettings};

pub const SCHEMA_VERSION: u32 = 1;

/// Critical privacy ratio read off the five-symbol example's trade-off curve.
pub const REFERENCE_CRITICAL_RHO: f64 = 0.38;

/// Threshold separating "truthful" (zero-distortion) sweep points.
pub const ZERO_DISTORTION_TOL: f64 = 1e-3;

/// Bisection stops once the bracket is this narrow.
pub const CRITICAL_WIDTH: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Single,
    Multi,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Identity receiver plus the sender's best response to it.
    #[default]
    Explicit,
    /// Thresholded best-response dynamics from the default initial pair.
    Dynamics,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Explicit => "explicit",
            Method::Dynamics => "dynamics",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl SweepSpec {
    /// The default grid: 101 evenly spaced points on `[0, 1]`.
    pub fn unit_interval() -> Self {
        Self {
            start: 0.0,
            stop: 1.0,
            steps: 101,
            scale: Scale::Linear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start < 0.0 {
            return Err(Error::config("rho.start", "sweep bounds must be finite and >= 0"));
        }
        if self.start >= self.stop {
            return Err(Error::config("rho", "sweep needs start < stop"));
        }
        if self.steps < 2 {
            return Err(Error::config("rho.steps", "sweep needs at least 2 steps"));
        }
        if self.scale == Scale::Log && self.start <= 0.0 {
            return Err(Error::config("rho.start", "log-scale sweep needs start > 0"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let t = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.start + t * (self.stop - self.start),
                    Scale::Log => (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RhoSpec {
    Value(f64),
    Sweep(SweepSpec),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Labels {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<String>>,
}

/// A game description plus run settings.
///
/// The joint pmf is given either as `joint`, a nested array over
/// `(x, z, w)` (single) or `(x, z_1..z_n, w_1..w_n)` (multi), or as
/// `joint_xw`, a nested array over `(x, w)` / `(x, w_1..w_n)` for the case
/// where every measurement is exact (`Z = X`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub schema_version: u32,
    pub mode: Mode,
    pub x_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Labels>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint_xw: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distortion: Option<Vec<Vec<f64>>>,
    pub rho: RhoSpec,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub dynamics: DynamicsSettings,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub log_base: LogBase,
}

/// Reads a nested array of the given shape into a row-major vector.
fn flatten_nested(v: &Value, dims: &[usize], path: &str) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(dims.iter().product());
    fn walk(v: &Value, dims: &[usize], path: String, out: &mut Vec<f64>) -> Result<()> {
        match dims.split_first() {
            None => match v.as_f64() {
                Some(x) => {
                    out.push(x);
                    Ok(())
                }
                None => Err(Error::config(path, "expected a number")),
            },
            Some((&n, rest)) => {
                let arr = v
                    .as_array()
                    .ok_or_else(|| Error::config(path.clone(), "expected an array"))?;
                if arr.len() != n {
                    return Err(Error::config(
                        path,
                        format!("expected {n} entries, found {}", arr.len()),
                    ));
                }
                for (i, item) in arr.iter().enumerate() {
                    walk(item, rest, format!("{path}[{i}]"), out)?;
                }
                Ok(())
            }
        }
    }
    walk(v, dims, path.to_string(), &mut out)?;
    Ok(out)
}

fn at(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        e @ Error::Config { .. } => e,
        other => Error::config(path, other.to_string()),
    }
}

fn space(size: usize, labels: Option<&Vec<String>>, path: &str) -> Result<FiniteSpace> {
    match labels {
        Some(l) if l.len() != size => Err(Error::config(
            path,
            format!("{} labels for an alphabet of {size}", l.len()),
        )),
        Some(l) => FiniteSpace::with_labels(l.clone()).map_err(at(path)),
        None => FiniteSpace::new(size).map_err(at(path)),
    }
}

impl GameConfig {
    fn distortion_matrix(&self, x: &FiniteSpace) -> Result<DistortionMatrix> {
        match &self.distortion {
            None => Ok(DistortionMatrix::hamming(x)),
            Some(rows) => {
                if rows.len() != x.size() {
                    return Err(Error::config(
                        "distortion",
                        format!("expected {} rows, found {}", x.size(), rows.len()),
                    ));
                }
                DistortionMatrix::from_rows(rows).map_err(at("distortion"))
            }
        }
    }

    fn joint_source(&self) -> Result<(&Value, bool)> {
        match (&self.joint, &self.joint_xw) {
            (Some(j), None) => Ok((j, false)),
            (None, Some(j)) => Ok((j, true)),
            (Some(_), Some(_)) => Err(Error::config("joint", "give either `joint` or `joint_xw`, not both")),
            (None, None) => Err(Error::config("joint", "missing joint pmf (`joint` or `joint_xw`)")),
        }
    }

    /// The scalar privacy ratio, if the config holds one.
    pub fn scalar_rho(&self) -> Option<f64> {
        match self.rho {
            RhoSpec::Value(r) => Some(r),
            RhoSpec::Sweep(_) => None,
        }
    }

    /// Sweep grid; a scalar `rho` falls back to [`SweepSpec::unit_interval`].
    pub fn sweep_spec(&self) -> SweepSpec {
        match &self.rho {
            RhoSpec::Sweep(s) => s.clone(),
            RhoSpec::Value(_) => SweepSpec::unit_interval(),
        }
    }

    /// Single-sender game at privacy ratio `rho`.
    pub fn single_game(&self, rho: f64) -> Result<GameInstance> {
        if self.mode != Mode::Single {
            return Err(Error::config("mode", "expected a single-sender config"));
        }
        let labels = self.labels.clone().unwrap_or_default();
        let x = space(self.x_size, labels.x.as_ref(), "x_size")?;
        let nw = self
            .w_size
            .ok_or_else(|| Error::config("w_size", "required in single mode"))?;
        let w = space(nw, labels.w.as_ref(), "w_size")?;
        let y = space(self.y_size.unwrap_or(self.x_size), labels.y.as_ref(), "y_size")?;
        let (src, xw) = self.joint_source()?;
        let joint = if xw {
            let p = flatten_nested(src, &[x.size(), w.size()], "joint_xw")?;
            JointPXZW::from_xw_with_perfect_measurement(x.clone(), w, &p).map_err(at("joint_xw"))?
        } else {
            let p = flatten_nested(src, &[x.size(), x.size(), w.size()], "joint")?;
            JointPXZW::new(x.clone(), w, p).map_err(at("joint"))?
        };
        let d = self.distortion_matrix(&x)?;
        GameInstance::new(joint, d, y, rho).map_err(at("rho"))
    }

    /// Multi-sender game at privacy ratio `rho`.
    pub fn multi_game(&self, rho: f64) -> Result<MultiGameInstance> {
        if self.mode != Mode::Multi {
            return Err(Error::config("mode", "expected a multi-sender config"));
        }
        let x = space(self.x_size, None, "x_size")?;
        let w_sizes = self
            .w_sizes
            .as_ref()
            .ok_or_else(|| Error::config("w_sizes", "required in multi mode"))?;
        if w_sizes.is_empty() {
            return Err(Error::config("w_sizes", "at least one sender is required"));
        }
        let ws = w_sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| space(n, None, &format!("w_sizes[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let y_sizes = self.y_sizes.clone().unwrap_or_else(|| vec![self.x_size; ws.len()]);
        if y_sizes.len() != ws.len() {
            return Err(Error::config("y_sizes", "one message alphabet per sender"));
        }
        let ys = y_sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| space(n, None, &format!("y_sizes[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let n = ws.len();
        let (src, xw) = self.joint_source()?;
        let joint = if xw {
            let mut dims = vec![x.size()];
            dims.extend(w_sizes);
            let p = flatten_nested(src, &dims, "joint_xw")?;
            MultiJoint::with_perfect_measurements(x.clone(), ws, &p).map_err(at("joint_xw"))?
        } else {
            let mut dims = vec![x.size(); n + 1];
            dims.extend(w_sizes);
            let p = flatten_nested(src, &dims, "joint")?;
            MultiJoint::new(x.clone(), ws, p).map_err(at("joint"))?
        };
        let d = self.distortion_matrix(&x)?;
        MultiGameInstance::new(joint, d, ys, rho).map_err(at("rho"))
    }

    /// Full semantic validation: the game builds and every setting is in range.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        let rho = match &self.rho {
            RhoSpec::Value(r) => {
                if !(r.is_finite() && *r >= 0.0) {
                    return Err(Error::config("rho", "privacy ratio must be finite and >= 0"));
                }
                *r
            }
            RhoSpec::Sweep(s) => {
                s.validate()?;
                if self.mode == Mode::Multi {
                    return Err(Error::config("rho", "multi mode takes a scalar rho"));
                }
                s.start
            }
        };
        self.solver.validate().map_err(at("solver"))?;
        let eps = self.dynamics.epsilon;
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::config("dynamics.epsilon", "must be > 0"));
        }
        if self.dynamics.max_rounds == 0 {
            return Err(Error::config("dynamics.max_rounds", "must be >= 1"));
        }
        match self.mode {
            Mode::Single => {
                for f in ["w_sizes", "y_sizes"] {
                    let present = if f == "w_sizes" { self.w_sizes.is_some() } else { self.y_sizes.is_some() };
                    if present {
                        return Err(Error::config(f, "only valid in multi mode"));
                    }
                }
                self.single_game(rho).map(drop)
            }
            Mode::Multi => {
                if self.w_size.is_some() || self.y_size.is_some() || self.labels.is_some() {
                    return Err(Error::config("mode", "w_size, y_size and labels are single-mode fields"));
                }
                self.multi_game(rho).map(drop)
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Parses and fully validates a config document.
pub fn load_config(text: &str) -> Result<GameConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: GameConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::config(if path == "." { "<root>".to_string() } else { path }, e.into_inner().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub rho: f64,
    pub expected_distortion: f64,
    pub mutual_information: f64,
    pub potential: f64,
    pub iterations: usize,
    pub converged: bool,
    pub method: String,
}

/// Equilibrium extracted at one privacy ratio.
pub struct PointSolution {
    pub alpha: SenderPolicy,
    pub beta: ReceiverPolicy,
    pub iterations: usize,
    pub converged: bool,
}

/// Solves one sweep point with the given method.
pub fn solve_point(
    game: &GameInstance,
    method: Method,
    solver_settings: &SolverSettings,
    dyn_settings: &DynamicsSettings,
) -> Result<PointSolution> {
    match method {
        Method::Explicit => {
            let eq = solver::explicit_equilibrium(game, solver_settings)?;
            Ok(PointSolution {
                alpha: eq.alpha,
                beta: eq.beta,
                iterations: eq.iterations,
                converged: eq.converged,
            })
        }
        Method::Dynamics => {
            let (a0, b0) = dynamics::default_initial_pair(game);
            let r = dynamics::thresholded_dynamics(game, &a0, &b0, dyn_settings.epsilon, solver_settings)?;
            Ok(PointSolution {
                alpha: r.final_alpha,
                beta: r.final_beta,
                iterations: r.iterations_used,
                converged: r.reached_eps_nash,
            })
        }
    }
}

/// Seed for grid point `i`, derived from the config seed.
pub fn point_seed(seed: u64, i: usize) -> u64 {
    // SplitMix64 finalizer.
    let mut z = seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs the configured method at every grid point, in parallel. Rows come
/// back in grid order; a point whose solve fails is kept with
/// `converged = false` and NaN metrics.
pub fn run_sweep(cfg: &GameConfig, method: Method) -> Result<Vec<SweepRow>> {
    let base = cfg.single_game(0.0)?;
    if method == Method::Explicit && base.ny() != base.nx() {
        return Err(Error::config("y_size", "explicit method needs |Y| = |X|"));
    }
    let grid = cfg.sweep_spec().grid();
    grid.par_iter()
        .enumerate()
        .map(|(i, &rho)| {
            let game = base.with_rho(rho)?;
            let settings = SolverSettings {
                seed: point_seed(cfg.seed, i),
                ..cfg.solver.clone()
            };
            let row = match solve_point(&game, method, &settings, &cfg.dynamics) {
                Ok(sol) => SweepRow {
                    rho,
                    expected_distortion: game.expected_distortion(&sol.alpha, &sol.beta)?,
                    mutual_information: cfg.log_base.from_nats(game.leakage(&sol.alpha)?),
                    potential: game.potential(&sol.alpha, &sol.beta)?,
                    iterations: sol.iterations,
                    converged: sol.converged,
                    method: method.name().to_string(),
                },
                Err(e) => {
                    log::warn!("rho = {rho}: {e}");
                    SweepRow {
                        rho,
                        expected_distortion: f64::NAN,
                        mutual_information: f64::NAN,
                        potential: f64::NAN,
                        iterations: 0,
                        converged: false,
                        method: method.name().to_string(),
                    }
                }
            };
            Ok(row)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalRho {
    /// Unit in which the leakage term of the sender's cost is measured.
    pub base: LogBase,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Expected distortion of the explicit equilibrium when the sender weighs
/// leakage measured in `base` by `rho`.
fn explicit_distortion(base_game: &GameInstance, rho: f64, base: LogBase, settings: &SolverSettings) -> Result<f64> {
    // ρ·I_bits = (ρ/ln 2)·I_nats
    let rho_nats = base.from_nats(1.0) * rho;
    let g = base_game.with_rho(rho_nats)?;
    let eq = solver::explicit_equilibrium(&g, settings)?;
    g.expected_distortion(&eq.alpha, &eq.beta)
}

/// Smallest ρ at which the explicit equilibrium stops being truthful.
///
/// The grid locates the last point with `E{d} ≤ 1e-3` before the first point
/// above it; bisection then narrows that bracket to [`CRITICAL_WIDTH`] and
/// the midpoint is reported. `None` when the grid never crosses.
pub fn critical_rho(
    base_game: &GameInstance,
    grid: &[f64],
    base: LogBase,
    settings: &SolverSettings,
) -> Result<Option<CriticalRho>> {
    let values = grid
        .par_iter()
        .map(|&r| explicit_distortion(base_game, r, base, settings))
        .collect::<Result<Vec<_>>>()?;
    let Some(first_above) = values.iter().position(|&d| d > ZERO_DISTORTION_TOL) else {
        return Ok(None);
    };
    if first_above == 0 {
        return Ok(None);
    }
    let (mut lo, mut hi) = (grid[first_above - 1], grid[first_above]);
    while hi - lo > CRITICAL_WIDTH {
        let mid = 0.5 * (lo + hi);
        if explicit_distortion(base_game, mid, base, settings)? > ZERO_DISTORTION_TOL {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(CriticalRho {
        base,
        estimate: 0.5 * (lo + hi),
        lower: lo,
        upper: hi,
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalReport {
    pub nats: Option<CriticalRho>,
    pub bits: Option<CriticalRho>,
    pub reference: f64,
    /// Base whose estimate lies closest to [`REFERENCE_CRITICAL_RHO`].
    pub nearest_reference: Option<LogBase>,
}

pub fn critical_report(base_game: &GameInstance, grid: &[f64], settings: &SolverSettings) -> Result<CriticalReport> {
    let nats = critical_rho(base_game, grid, LogBase::Nats, settings)?;
    let bits = critical_rho(base_game, grid, LogBase::Bits, settings)?;
    let nearest_reference = [&nats, &bits]
        .into_iter()
        .flatten()
        .min_by(|a, b| {
            (a.estimate - REFERENCE_CRITICAL_RHO)
                .abs()
                .total_cmp(&(b.estimate - REFERENCE_CRITICAL_RHO).abs())
        })
        .map(|c| c.base);
    Ok(CriticalReport {
        nats,
        bits,
        reference: REFERENCE_CRITICAL_RHO,
        nearest_reference,
    })
}

/// `alpha.json` for a single sender.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SenderPolicyFile {
    pub schema_version: u32,
    /// Axis order of `alpha`; always `["y", "z", "w"]`.
    pub axes: Vec<String>,
    pub alpha: Vec<Vec<Vec<f64>>>,
}

/// `beta.json` for a single-sender game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverPolicyFile {
    pub schema_version: u32,
    /// Axis order of `beta`; always `["x_hat", "y"]`.
    pub axes: Vec<String>,
    pub beta: Vec<Vec<f64>>,
}

/// `alpha.json` for the multi-sender game: one `[y][z][w]` tensor per sender.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SenderPoliciesFile {
    pub schema_version: u32,
    pub axes: Vec<String>,
    pub senders: Vec<Vec<Vec<Vec<f64>>>>,
}

/// `beta.json` for the multi-sender game. Rows are estimates, columns are
/// message tuples flattened row-major over `(y_1, …, y_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiReceiverPolicyFile {
    pub schema_version: u32,
    pub y_dims: Vec<usize>,
    pub beta: Vec<Vec<f64>>,
}

fn axes(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn check_version(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::config("schema_version", format!("unsupported version {v}")));
    }
    Ok(())
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| Error::config(e.path().to_string(), e.into_inner().to_string()))
}

pub fn sender_policy_to_json(alpha: &SenderPolicy) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SenderPolicyFile {
        schema_version: SCHEMA_VERSION,
        axes: axes(&["y", "z", "w"]),
        alpha: alpha.to_nested(),
    })?)
}

pub fn sender_policy_from_json(text: &str) -> Result<SenderPolicy> {
    let f: SenderPolicyFile = parse(text)?;
    check_version(f.schema_version)?;
    SenderPolicy::from_nested(&f.alpha).map_err(at("alpha"))
}

pub fn receiver_policy_to_json(beta: &ReceiverPolicy) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ReceiverPolicyFile {
        schema_version: SCHEMA_VERSION,
        axes: axes(&["x_hat", "y"]),
        beta: beta.to_nested(),
    })?)
}

pub fn receiver_policy_from_json(text: &str) -> Result<ReceiverPolicy> {
    let f: ReceiverPolicyFile = parse(text)?;
    check_version(f.schema_version)?;
    ReceiverPolicy::from_nested(&f.beta).map_err(at("beta"))
}

pub fn sender_policies_to_json(alphas: &[SenderPolicy]) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SenderPoliciesFile {
        schema_version: SCHEMA_VERSION,
        axes: axes(&["y", "z", "w"]),
        senders: alphas.iter().map(SenderPolicy::to_nested).collect(),
    })?)
}

pub fn sender_policies_from_json(text: &str) -> Result<Vec<SenderPolicy>> {
    let f: SenderPoliciesFile = parse(text)?;
    check_version(f.schema_version)?;
    f.senders
        .iter()
        .enumerate()
        .map(|(i, t)| SenderPolicy::from_nested(t).map_err(at(&format!("senders[{i}]"))))
        .collect()
}

pub fn multi_receiver_policy_to_json(beta: &MultiReceiverPolicy) -> Result<String> {
    let tuples = beta.tuples();
    Ok(serde_json::to_string_pretty(&MultiReceiverPolicyFile {
        schema_version: SCHEMA_VERSION,
        y_dims: beta.y_dims().to_vec(),
        beta: beta.as_slice().chunks(tuples).map(<[f64]>::to_vec).collect(),
    })?)
}

pub fn multi_receiver_policy_from_json(text: &str) -> Result<MultiReceiverPolicy> {
    let f: MultiReceiverPolicyFile = parse(text)?;
    check_version(f.schema_version)?;
    MultiReceiverPolicy::new(f.beta.len(), f.y_dims, f.beta.concat()).map_err(at("beta"))
}
