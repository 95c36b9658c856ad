//! Policies and cost functionals of the single-sender game.
//!
//! Sender policy `α[y][z][w] = P{Y=y | Z=z, W=w}`, receiver policy
//! `β[x̂][y] = P{X̂=x̂ | Y=y}`. With `ξ` the expected distortion and `ζ` the
//! leakage `I(Y;W)`:
//!
//! * sender cost `U = ξ + ρ·ζ`
//! * receiver cost `V = ξ`
//! * potential `Ψ = ξ + ρ·ζ`

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{self, FiniteSpace, JointPXZW, Pmf2, PMF_TOL, RENORM_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionMatrix {
    size: usize,
    d: Vec<f64>,
}

impl DistortionMatrix {
    /// Row-major `[x][x̂]`, entries finite and nonnegative.
    pub fn new(size: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != size * size {
            return Err(Error::ShapeMismatch(format!(
                "distortion has {} entries, expected {}",
                d.len(),
                size * size
            )));
        }
        if let Some(v) = d.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "distortion entries must be finite and nonnegative, found {v}"
            )));
        }
        Ok(Self { size, d })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(Error::ShapeMismatch("distortion matrix must be square".into()));
        }
        Self::new(rows.len(), rows.concat())
    }

    /// Zero on the diagonal, one elsewhere: `E{d}` becomes the error probability.
    pub fn hamming(space: &FiniteSpace) -> Self {
        let n = space.size();
        let d = (0..n * n)
            .map(|i| if i / n == i % n { 0.0 } else { 1.0 })
            .collect();
        Self { size: n, d }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, x: usize, x_hat: usize) -> f64 {
        self.d[x * self.size + x_hat]
    }

    pub fn max_entry(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.d.chunks(self.size).map(<[f64]>::to_vec).collect()
    }
}

fn check_columns(what: &str, data: &[f64], n_out: usize, n_cond: usize) -> Result<()> {
    if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidPolicy(format!("{what}: entry {v} outside [0, 1]")));
    }
    for c in 0..n_cond {
        let s: f64 = (0..n_out).map(|o| data[o * n_cond + c]).sum();
        if (s - 1.0).abs() > PMF_TOL {
            return Err(Error::InvalidPolicy(format!(
                "{what}: conditional distribution {c} sums to {s}"
            )));
        }
    }
    Ok(())
}

/// Column renormalization for policies read from text; drift up to
/// [`RENORM_TOL`] is corrected, larger drift is left for validation to reject.
fn renormalize_columns(data: &mut [f64], n_out: usize, n_cond: usize) {
    for c in 0..n_cond {
        let s: f64 = (0..n_out).map(|o| data[o * n_cond + c]).sum();
        let dev = (s - 1.0).abs();
        if dev > PMF_TOL && dev <= RENORM_TOL {
            log::warn!("policy column {c} sums to {s}; renormalized");
            (0..n_out).for_each(|o| data[o * n_cond + c] /= s);
        }
    }
}

/// Sender policy tensor `α[y][z][w]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SenderPolicy {
    dims: [usize; 3],
    a: Vec<f64>,
}

impl SenderPolicy {
    pub fn new(dims: [usize; 3], mut a: Vec<f64>) -> Result<Self> {
        if a.len() != dims.iter().product::<usize>() || dims.contains(&0) {
            return Err(Error::ShapeMismatch(format!(
                "sender policy has {} entries for dims {dims:?}",
                a.len()
            )));
        }
        renormalize_columns(&mut a, dims[0], dims[1] * dims[2]);
        check_columns("sender policy", &a, dims[0], dims[1] * dims[2])?;
        Ok(Self { dims, a })
    }

    /// Every message equally likely regardless of `(z, w)`.
    pub fn uniform(ny: usize, nz: usize, nw: usize) -> Self {
        Self {
            dims: [ny, nz, nw],
            a: vec![1.0 / ny as f64; ny * nz * nw],
        }
    }

    /// `Y = Z` with probability one. Requires `ny == nz`.
    pub fn truth_telling(n: usize, nw: usize) -> Self {
        Self::from_fn([n, n, nw], |y, z, _| if y == z { 1.0 } else { 0.0 })
    }

    /// Builds a tensor from `f(y, z, w)`; columns are not checked.
    pub(crate) fn from_fn(dims: [usize; 3], f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut a = Vec::with_capacity(dims.iter().product());
        for y in 0..dims[0] {
            for z in 0..dims[1] {
                for w in 0..dims[2] {
                    a.push(f(y, z, w));
                }
            }
        }
        Self { dims, a }
    }

    pub(crate) fn from_raw(dims: [usize; 3], a: Vec<f64>) -> Self {
        debug_assert_eq!(a.len(), dims.iter().product::<usize>());
        Self { dims, a }
    }

    /// `[|Y|, |Z|, |W|]`
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    #[inline]
    pub fn get(&self, y: usize, z: usize, w: usize) -> f64 {
        self.a[(y * self.dims[1] + z) * self.dims[2] + w]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    /// Nested `[y][z][w]` arrays.
    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        let [_, nz, nw] = self.dims;
        self.a
            .chunks(nz * nw)
            .map(|blk| blk.chunks(nw).map(<[f64]>::to_vec).collect())
            .collect()
    }

    pub fn from_nested(t: &[Vec<Vec<f64>>]) -> Result<Self> {
        let (dims, flat) = flatten3(t)?;
        Self::new(dims, flat)
    }

    pub fn is_interior(&self) -> bool {
        self.a.iter().all(|&v| v > 0.0)
    }
}

pub(crate) fn flatten3(t: &[Vec<Vec<f64>>]) -> Result<([usize; 3], Vec<f64>)> {
    let d0 = t.len();
    let d1 = t.first().map_or(0, Vec::len);
    let d2 = t.first().and_then(|r| r.first()).map_or(0, Vec::len);
    let ragged = t
        .iter()
        .any(|r| r.len() != d1 || r.iter().any(|c| c.len() != d2));
    if ragged || d0 * d1 * d2 == 0 {
        return Err(Error::ShapeMismatch("ragged or empty rank-3 array".into()));
    }
    Ok(([d0, d1, d2], t.iter().flatten().flatten().copied().collect()))
}

/// Receiver policy matrix `β[x̂][y]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReceiverPolicy {
    dims: [usize; 2],
    b: Vec<f64>,
}

impl ReceiverPolicy {
    pub fn new(dims: [usize; 2], mut b: Vec<f64>) -> Result<Self> {
        if b.len() != dims[0] * dims[1] || dims.contains(&0) {
            return Err(Error::ShapeMismatch(format!(
                "receiver policy has {} entries for dims {dims:?}",
                b.len()
            )));
        }
        renormalize_columns(&mut b, dims[0], dims[1]);
        check_columns("receiver policy", &b, dims[0], dims[1])?;
        Ok(Self { dims, b })
    }

    /// `X̂ = Y`.
    pub fn identity(n: usize) -> Self {
        Self::deterministic(n, &(0..n).collect::<Vec<_>>())
    }

    /// Column `y` puts all its mass on `choice[y]`.
    pub fn deterministic(nx: usize, choice: &[usize]) -> Self {
        let ny = choice.len();
        let mut b = vec![0.0; nx * ny];
        for (y, &xh) in choice.iter().enumerate() {
            b[xh * ny + y] = 1.0;
        }
        Self { dims: [nx, ny], b }
    }

    pub fn constant(nx: usize, ny: usize, x_hat: usize) -> Self {
        Self::deterministic(nx, &vec![x_hat; ny])
    }

    /// `[|X̂|, |Y|]`
    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    #[inline]
    pub fn get(&self, x_hat: usize, y: usize) -> f64 {
        self.b[x_hat * self.dims[1] + y]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.b
    }

    pub fn to_nested(&self) -> Vec<Vec<f64>> {
        self.b.chunks(self.dims[1]).map(<[f64]>::to_vec).collect()
    }

    pub fn from_nested(rows: &[Vec<f64>]) -> Result<Self> {
        let ny = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ny) {
            return Err(Error::ShapeMismatch("ragged receiver policy".into()));
        }
        Self::new([rows.len(), ny], rows.concat())
    }

    /// For deterministic policies, the estimate chosen for each message.
    pub fn choices(&self) -> Option<Vec<usize>> {
        (0..self.dims[1])
            .map(|y| (0..self.dims[0]).find(|&xh| self.get(xh, y) == 1.0))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct GameInstance {
    joint: JointPXZW,
    distortion: DistortionMatrix,
    y_space: FiniteSpace,
    rho: f64,
}

impl GameInstance {
    pub fn new(
        joint: JointPXZW,
        distortion: DistortionMatrix,
        y_space: FiniteSpace,
        rho: f64,
    ) -> Result<Self> {
        if !rho.is_finite() || rho < 0.0 {
            return Err(Error::InvalidArgument(format!("privacy ratio must be >= 0, got {rho}")));
        }
        if distortion.size() != joint.x_space().size() {
            return Err(Error::ShapeMismatch(format!(
                "distortion is {0}x{0} but |X| = {1}",
                distortion.size(),
                joint.x_space().size()
            )));
        }
        Ok(Self {
            joint,
            distortion,
            y_space,
            rho,
        })
    }

    /// Hamming distortion and `Y` on the same alphabet as `X`.
    pub fn hamming(joint: JointPXZW, rho: f64) -> Result<Self> {
        let d = DistortionMatrix::hamming(joint.x_space());
        let y = joint.x_space().clone();
        Self::new(joint, d, y, rho)
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(
            self.joint.clone(),
            self.distortion.clone(),
            self.y_space.clone(),
            rho,
        )
    }

    pub fn joint(&self) -> &JointPXZW {
        &self.joint
    }

    pub fn distortion(&self) -> &DistortionMatrix {
        &self.distortion
    }

    pub fn y_space(&self) -> &FiniteSpace {
        &self.y_space
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn nx(&self) -> usize {
        self.joint.x_space().size()
    }

    pub fn ny(&self) -> usize {
        self.y_space.size()
    }

    pub fn nw(&self) -> usize {
        self.joint.w_space().size()
    }

    pub fn sender_dims(&self) -> [usize; 3] {
        [self.ny(), self.nx(), self.nw()]
    }

    pub fn receiver_dims(&self) -> [usize; 2] {
        [self.nx(), self.ny()]
    }

    pub fn check_sender(&self, alpha: &SenderPolicy) -> Result<()> {
        if alpha.dims() != self.sender_dims() {
            return Err(Error::ShapeMismatch(format!(
                "sender policy dims {:?}, game expects {:?}",
                alpha.dims(),
                self.sender_dims()
            )));
        }
        Ok(())
    }

    pub fn check_receiver(&self, beta: &ReceiverPolicy) -> Result<()> {
        if beta.dims() != self.receiver_dims() {
            return Err(Error::ShapeMismatch(format!(
                "receiver policy dims {:?}, game expects {:?}",
                beta.dims(),
                self.receiver_dims()
            )));
        }
        Ok(())
    }

    /// `P{X=x, Y=y}`, row-major `[x][y]`.
    pub(crate) fn pxy_raw(&self, a: &[f64]) -> Vec<f64> {
        let [nx, nz, nw] = self.joint.dims();
        let ny = self.ny();
        let p = self.joint.as_slice();
        let mut out = vec![0.0; nx * ny];
        for x in 0..nx {
            for y in 0..ny {
                let mut s = 0.0;
                for zw in 0..nz * nw {
                    s += a[y * nz * nw + zw] * p[x * nz * nw + zw];
                }
                out[x * ny + y] = s;
            }
        }
        out
    }

    /// `P{Y=y, W=w}`, row-major `[y][w]`.
    pub(crate) fn pyw_raw(&self, a: &[f64], pzw: &[f64]) -> Vec<f64> {
        let [_, nz, nw] = self.joint.dims();
        let ny = self.ny();
        let mut out = vec![0.0; ny * nw];
        for y in 0..ny {
            for z in 0..nz {
                for w in 0..nw {
                    out[y * nw + w] += a[(y * nz + z) * nw + w] * pzw[z * nw + w];
                }
            }
        }
        out
    }

    /// Joint law of `(X, Y)` induced by the sender policy.
    pub fn measurement_joint(&self, alpha: &SenderPolicy) -> Result<Pmf2> {
        self.check_sender(alpha)?;
        Ok(Pmf2::derived(
            self.joint.x_space().clone(),
            self.y_space.clone(),
            self.pxy_raw(alpha.as_slice()),
        ))
    }

    /// Joint law of `(Y, W)` induced by the sender policy.
    pub fn message_joint(&self, alpha: &SenderPolicy) -> Result<Pmf2> {
        self.check_sender(alpha)?;
        Ok(Pmf2::derived(
            self.y_space.clone(),
            self.joint.w_space().clone(),
            self.pyw_raw(alpha.as_slice(), &self.joint.pzw()),
        ))
    }

    /// `D[x][y] = ∑_x̂ d(x,x̂)·β[x̂][y]`: expected distortion when `X=x` and `Y=y`.
    pub(crate) fn distortion_given_message(&self, beta: &ReceiverPolicy) -> Vec<f64> {
        let (nx, ny) = (self.nx(), self.ny());
        let mut out = vec![0.0; nx * ny];
        for x in 0..nx {
            for xh in 0..nx {
                let d = self.distortion.get(x, xh);
                if d == 0.0 {
                    continue;
                }
                for y in 0..ny {
                    out[x * ny + y] += d * beta.get(xh, y);
                }
            }
        }
        out
    }

    /// Coefficients `c[y][z][w]` with `ξ(α, β) = ∑ c·α`.
    pub fn distortion_coefficients(&self, beta: &ReceiverPolicy) -> Result<Vec<f64>> {
        self.check_receiver(beta)?;
        let dm = self.distortion_given_message(beta);
        let [nx, nz, nw] = self.joint.dims();
        let ny = self.ny();
        let p = self.joint.as_slice();
        let mut c = vec![0.0; ny * nz * nw];
        for y in 0..ny {
            for x in 0..nx {
                let dxy = dm[x * ny + y];
                if dxy == 0.0 {
                    continue;
                }
                let src = &p[x * nz * nw..(x + 1) * nz * nw];
                for (ci, pi) in c[y * nz * nw..(y + 1) * nz * nw].iter_mut().zip(src) {
                    *ci += dxy * pi;
                }
            }
        }
        Ok(c)
    }

    /// `ξ(α, β) = E{d(X, X̂)}`.
    pub fn expected_distortion(&self, alpha: &SenderPolicy, beta: &ReceiverPolicy) -> Result<f64> {
        self.check_sender(alpha)?;
        self.check_receiver(beta)?;
        let pxy = self.pxy_raw(alpha.as_slice());
        let dm = self.distortion_given_message(beta);
        Ok(pxy.iter().zip(&dm).map(|(p, d)| p * d).sum::<f64>().max(0.0))
    }

    /// `ζ(α) = I(Y; W)` in nats.
    pub fn leakage(&self, alpha: &SenderPolicy) -> Result<f64> {
        prob::mutual_information(&self.message_joint(alpha)?)
    }

    /// `U(α, β) = ξ + ρ·ζ`.
    pub fn sender_cost(&self, alpha: &SenderPolicy, beta: &ReceiverPolicy) -> Result<f64> {
        Ok(self.expected_distortion(alpha, beta)? + self.rho * self.leakage(alpha)?)
    }

    /// `V(α, β) = ξ`.
    pub fn receiver_cost(&self, alpha: &SenderPolicy, beta: &ReceiverPolicy) -> Result<f64> {
        self.expected_distortion(alpha, beta)
    }

    /// `Ψ(α, β) = ξ + ρ·ζ`.
    pub fn potential(&self, alpha: &SenderPolicy, beta: &ReceiverPolicy) -> Result<f64> {
        self.sender_cost(alpha, beta)
    }

    /// `U` evaluated at an arbitrary nonnegative `[y][z][w]` tensor, with the
    /// leakage extended off the simplex by homogeneity (`S·I(P/S)` for a
    /// message joint of total mass `S`). Agrees with [`Self::sender_cost`] on
    /// valid policies; this is the function the analytic gradient
    /// differentiates.
    pub fn sender_cost_extended(&self, alpha: &[f64], beta: &ReceiverPolicy) -> Result<f64> {
        if alpha.len() != self.sender_dims().iter().product::<usize>() {
            return Err(Error::ShapeMismatch("sender tensor size".into()));
        }
        let c = self.distortion_coefficients(beta)?;
        let lin: f64 = c.iter().zip(alpha).map(|(c, a)| c * a).sum();
        let pyw = self.pyw_raw(alpha, &self.joint.pzw());
        Ok(lin + self.rho * prob::mutual_information_raw(&pyw, self.ny(), self.nw())?)
    }

    /// `P{X=x, X̂=x̂}`, rows `x`, columns `x̂`.
    pub fn induced_estimate_joint(
        &self,
        alpha: &SenderPolicy,
        beta: &ReceiverPolicy,
    ) -> Result<Pmf2> {
        self.check_sender(alpha)?;
        self.check_receiver(beta)?;
        let pxy = self.pxy_raw(alpha.as_slice());
        let (nx, ny) = (self.nx(), self.ny());
        let mut out = vec![0.0; nx * nx];
        for x in 0..nx {
            for xh in 0..nx {
                out[x * nx + xh] = (0..ny).map(|y| beta.get(xh, y) * pxy[x * ny + y]).sum();
            }
        }
        let space = self.joint.x_space().clone();
        Ok(Pmf2::derived(space.clone(), space, out))
    }

    /// `P{W=w, X̂=x̂}`, rows `w`, columns `x̂`.
    pub fn estimate_private_joint(
        &self,
        alpha: &SenderPolicy,
        beta: &ReceiverPolicy,
    ) -> Result<Pmf2> {
        let pyw = self.message_joint(alpha)?;
        self.check_receiver(beta)?;
        let (nx, ny, nw) = (self.nx(), self.ny(), self.nw());
        let mut out = vec![0.0; nw * nx];
        for w in 0..nw {
            for xh in 0..nx {
                out[w * nx + xh] = (0..ny).map(|y| beta.get(xh, y) * pyw.get(y, w)).sum();
            }
        }
        Ok(Pmf2::derived(
            self.joint.w_space().clone(),
            self.joint.x_space().clone(),
            out,
        ))
    }
}
