//! Finite-alphabet probability primitives.
//!
//! Every container stores a dense, row-major `Vec<f64>`. Constructors
//! enforce normalization: totals within [`PMF_TOL`] are accepted as-is,
//! totals within [`RENORM_TOL`] are rescaled with a warning, anything else
//! is rejected.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a pmf.
pub const PMF_TOL: f64 = 1e-12;
/// Inputs whose total mass is off by less than this are renormalized.
pub const RENORM_TOL: f64 = 1e-9;
/// Largest alphabet accepted on any axis.
pub const MAX_SYMBOLS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSpace {
    size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl FiniteSpace {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidSpace("alphabet must have at least one symbol".into()));
        }
        if size > MAX_SYMBOLS {
            return Err(Error::InvalidSpace(format!(
                "alphabet of {size} symbols exceeds the limit of {MAX_SYMBOLS}"
            )));
        }
        Ok(Self { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut space = Self::new(labels.len())?;
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::InvalidSpace(format!("duplicate label `{label}`")));
            }
        }
        space.labels = Some(labels);
        Ok(space)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name of symbol `i`; 1-based index when unlabeled.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => (i + 1).to_string(),
        }
    }

    /// Same size, ignoring labels.
    pub fn same_size(&self, other: &FiniteSpace) -> bool {
        self.size == other.size
    }
}

/// Unit in which information values are reported.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Nats,
    Bits,
}

impl LogBase {
    /// Converts a value in nats to this unit.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Nats => nats,
            LogBase::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LogBase::Nats => "nats",
            LogBase::Bits => "bits",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Z,
    W,
}

/// One problem found by [`validate_joint`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    DimensionMismatch { expected: usize, found: usize },
    EntryOutOfRange { index: [usize; 3], value: f64 },
    SumDeviation { sum: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected} entries, found {found}")
            }
            Violation::EntryOutOfRange { index, value } => write!(
                f,
                "entry out of range at [{}][{}][{}]: {value}",
                index[0], index[1], index[2]
            ),
            Violation::SumDeviation { sum } => {
                write!(f, "normalization: entries sum to {sum}, expected 1")
            }
        }
    }
}

/// Checks a raw `[x][z][w]` tensor against the joint-pmf invariants.
/// An empty result means the tensor is a valid joint.
pub fn validate_joint(dims: [usize; 3], p: &[f64]) -> Vec<Violation> {
    let expected = dims.iter().product::<usize>();
    if expected != p.len() {
        return vec![Violation::DimensionMismatch {
            expected,
            found: p.len(),
        }];
    }
    let mut out = Vec::new();
    for (i, &v) in p.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            let w = i % dims[2];
            let z = (i / dims[2]) % dims[1];
            let x = i / (dims[1] * dims[2]);
            out.push(Violation::EntryOutOfRange {
                index: [x, z, w],
                value: v,
            });
        }
    }
    let sum: f64 = p.iter().sum();
    if !sum.is_finite() || (sum - 1.0).abs() > PMF_TOL {
        out.push(Violation::SumDeviation { sum });
    }
    out
}

/// Shared normalization policy for constructors.
pub(crate) fn normalize_mass(p: &mut [f64], what: &str) -> Result<()> {
    if let Some(bad) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidPmf(format!("{what}: entry out of range ({bad})")));
    }
    let sum: f64 = p.iter().sum();
    let dev = (sum - 1.0).abs();
    if dev <= PMF_TOL {
        return Ok(());
    }
    if dev <= RENORM_TOL {
        log::warn!("{what}: total mass {sum} renormalized to 1");
        p.iter_mut().for_each(|v| *v /= sum);
        return Ok(());
    }
    Err(Error::InvalidPmf(format!(
        "{what}: normalization failed, entries sum to {sum}"
    )))
}

/// Joint pmf `p(x, z, w)`; the measurement `Z` lives on the same alphabet as `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPXZW {
    x_space: FiniteSpace,
    z_space: FiniteSpace,
    w_space: FiniteSpace,
    p: Vec<f64>,
}

impl JointPXZW {
    pub fn new(x_space: FiniteSpace, w_space: FiniteSpace, mut p: Vec<f64>) -> Result<Self> {
        let dims = [x_space.size(), x_space.size(), w_space.size()];
        let n = dims.iter().product::<usize>();
        if p.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "joint has {} entries, expected {n}",
                p.len()
            )));
        }
        normalize_mass(&mut p, "joint p(x,z,w)")?;
        Ok(Self {
            z_space: x_space.clone(),
            x_space,
            w_space,
            p,
        })
    }

    /// Builds `p(x,z,w) = P{X=x, W=w}·1[z=x]` from a row-major `[x][w]` matrix.
    pub fn from_xw_with_perfect_measurement(
        x_space: FiniteSpace,
        w_space: FiniteSpace,
        pxw: &[f64],
    ) -> Result<Self> {
        let (nx, nw) = (x_space.size(), w_space.size());
        if pxw.len() != nx * nw {
            return Err(Error::ShapeMismatch(format!(
                "P(X,W) has {} entries, expected {}",
                pxw.len(),
                nx * nw
            )));
        }
        let mut p = vec![0.0; nx * nx * nw];
        for x in 0..nx {
            for w in 0..nw {
                p[(x * nx + x) * nw + w] = pxw[x * nw + w];
            }
        }
        Self::new(x_space, w_space, p)
    }

    pub fn x_space(&self) -> &FiniteSpace {
        &self.x_space
    }

    pub fn z_space(&self) -> &FiniteSpace {
        &self.z_space
    }

    pub fn w_space(&self) -> &FiniteSpace {
        &self.w_space
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.x_space.size(), self.z_space.size(), self.w_space.size()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    #[inline]
    pub fn get(&self, x: usize, z: usize, w: usize) -> f64 {
        let [_, nz, nw] = self.dims();
        self.p[(x * nz + z) * nw + w]
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_joint(self.dims(), &self.p)
    }

    /// Sums out every axis not listed in `axes`. Retained axes keep the
    /// canonical `X, Z, W` order regardless of the order given.
    pub fn marginal(&self, axes: &[Axis]) -> Result<Marginal> {
        if axes.is_empty() {
            return Err(Error::InvalidArgument("marginal needs at least one axis".into()));
        }
        let mut keep: Vec<Axis> = axes.to_vec();
        keep.sort();
        keep.dedup();
        let full = self.dims();
        let idx_of = |a: Axis| match a {
            Axis::X => 0,
            Axis::Z => 1,
            Axis::W => 2,
        };
        let dims: Vec<usize> = keep.iter().map(|&a| full[idx_of(a)]).collect();
        let mut p = vec![0.0; dims.iter().product()];
        for x in 0..full[0] {
            for z in 0..full[1] {
                for w in 0..full[2] {
                    let coord = [x, z, w];
                    let mut flat = 0;
                    for (k, &a) in keep.iter().enumerate() {
                        flat = flat * dims[k] + coord[idx_of(a)];
                    }
                    p[flat] += self.get(x, z, w);
                }
            }
        }
        Ok(Marginal { axes: keep, dims, p })
    }

    /// `P{X=x}`.
    pub fn px(&self) -> Vec<f64> {
        let [nx, nz, nw] = self.dims();
        (0..nx)
            .map(|x| self.p[x * nz * nw..(x + 1) * nz * nw].iter().sum())
            .collect()
    }

    /// `P{Z=z, W=w}`, row-major `[z][w]`.
    pub fn pzw(&self) -> Vec<f64> {
        let [nx, nz, nw] = self.dims();
        let mut out = vec![0.0; nz * nw];
        for x in 0..nx {
            for (o, v) in out.iter_mut().zip(&self.p[x * nz * nw..(x + 1) * nz * nw]) {
                *o += v;
            }
        }
        out
    }

    /// `P{X=x, W=w}`, row-major `[x][w]`.
    pub fn pxw(&self) -> Vec<f64> {
        let [nx, nz, nw] = self.dims();
        let mut out = vec![0.0; nx * nw];
        for x in 0..nx {
            for z in 0..nz {
                for w in 0..nw {
                    out[x * nw + w] += self.get(x, z, w);
                }
            }
        }
        out
    }
}

/// Result of [`JointPXZW::marginal`].
#[derive(Clone, Debug, PartialEq)]
pub struct Marginal {
    pub axes: Vec<Axis>,
    pub dims: Vec<usize>,
    pub p: Vec<f64>,
}

/// Two-variable pmf, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf2 {
    row_space: FiniteSpace,
    col_space: FiniteSpace,
    p: Vec<f64>,
}

impl Pmf2 {
    pub fn new(row_space: FiniteSpace, col_space: FiniteSpace, mut p: Vec<f64>) -> Result<Self> {
        let n = row_space.size() * col_space.size();
        if p.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "matrix has {} entries, expected {n}",
                p.len()
            )));
        }
        normalize_mass(&mut p, "pmf")?;
        Ok(Self {
            row_space,
            col_space,
            p,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nr = rows.len();
        let nc = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != nc) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Self::new(
            FiniteSpace::new(nr)?,
            FiniteSpace::new(nc)?,
            rows.concat(),
        )
    }

    /// Derived joints computed from already-valid inputs. Rounding drift is
    /// tolerated up to [`RENORM_TOL`] without a warning.
    pub(crate) fn derived(row_space: FiniteSpace, col_space: FiniteSpace, p: Vec<f64>) -> Self {
        debug_assert_eq!(p.len(), row_space.size() * col_space.size());
        debug_assert!((p.iter().sum::<f64>() - 1.0).abs() < RENORM_TOL);
        Self {
            row_space,
            col_space,
            p,
        }
    }

    pub fn rows(&self) -> usize {
        self.row_space.size()
    }

    pub fn cols(&self) -> usize {
        self.col_space.size()
    }

    pub fn row_space(&self) -> &FiniteSpace {
        &self.row_space
    }

    pub fn col_space(&self) -> &FiniteSpace {
        &self.col_space
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.p[r * self.cols() + c]
    }

    pub fn row_marginal(&self) -> Vec<f64> {
        self.p.chunks(self.cols()).map(|r| r.iter().sum()).collect()
    }

    pub fn col_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols()];
        for row in self.p.chunks(self.cols()) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }

    pub fn transpose(&self) -> Pmf2 {
        let (r, c) = (self.rows(), self.cols());
        let mut p = vec![0.0; r * c];
        for i in 0..r {
            for j in 0..c {
                p[j * r + i] = self.p[i * c + j];
            }
        }
        Pmf2 {
            row_space: self.col_space.clone(),
            col_space: self.row_space.clone(),
            p,
        }
    }
}

/// Mutual information in nats between the row and column variables.
pub fn mutual_information(joint: &Pmf2) -> Result<f64> {
    let v = mutual_information_raw(joint.as_slice(), joint.rows(), joint.cols())?;
    if v < -PMF_TOL {
        return Err(Error::InvariantViolation(format!(
            "mutual information evaluated to {v}"
        )));
    }
    Ok(v.max(0.0))
}

/// `∑ m·ln(m·S / (r·c))` over a nonnegative `rows × cols` matrix with total
/// mass `S` and row/column sums `r`, `c`. For a pmf this is the mutual
/// information; for other nonnegative matrices it is the degree-one
/// homogeneous extension `S·I(m/S)`, which keeps partial derivatives
/// meaningful off the simplex.
pub(crate) fn mutual_information_raw(m: &[f64], rows: usize, cols: usize) -> Result<f64> {
    let mut r = vec![0.0; rows];
    let mut c = vec![0.0; cols];
    for i in 0..rows {
        for j in 0..cols {
            let v = m[i * cols + j];
            r[i] += v;
            c[j] += v;
        }
    }
    let total: f64 = r.iter().sum();
    let mut acc = 0.0;
    for i in 0..rows {
        for j in 0..cols {
            let v = m[i * cols + j];
            if v <= 0.0 {
                continue;
            }
            if r[i] <= 0.0 || c[j] <= 0.0 {
                return Err(Error::InvariantViolation(format!(
                    "positive mass at ({i},{j}) with a zero marginal"
                )));
            }
            acc += v * (v * total / (r[i] * c[j])).ln();
        }
    }
    Ok(acc)
}

/// Shannon entropy in nats.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum::<f64>()
}
