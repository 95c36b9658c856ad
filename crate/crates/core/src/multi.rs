//! The game with `n` senders.
//!
//! Sender `i` observes `(Z_i, W_i)` and reports `Y_i`; the receiver sees the
//! whole tuple `(Y_1, …, Y_n)`. Sender `i` pays `ξ′ + ρ·I(Y_i; W_i)`, the
//! receiver pays `ξ′`, and `Ψ′ = ξ′ + ρ·∑_i I(Y_i; W_i)` is a potential.
//!
//! The joint is kept with axes interleaved as `(x, z_1, w_1, …, z_n, w_n)`,
//! so contracting sender `i` against its policy turns the adjacent pair
//! `(z_i, w_i)` into a single `y_i` axis. Every cost is evaluated by
//! contracting one sender at a time; the full product over all variables
//! is never materialized.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{check_precision, DynamicsReport, Mover, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::game::{DistortionMatrix, SenderPolicy};
use crate::prob::{self, normalize_mass, FiniteSpace, PMF_TOL};
use crate::solver::{argmin_low, BestResponseResult, SenderProblem, SolverSettings};

/// Upper limit on the entries of any dense tensor in this module.
pub const MAX_TENSOR_ENTRIES: usize = 10_000_000;

fn guard(entries: usize) -> Result<()> {
    if entries > MAX_TENSOR_ENTRIES {
        return Err(Error::TooLarge {
            entries,
            limit: MAX_TENSOR_ENTRIES,
        });
    }
    Ok(())
}

fn checked_product(dims: impl IntoIterator<Item = usize>) -> Result<usize> {
    dims.into_iter().try_fold(1usize, |acc, d| {
        acc.checked_mul(d).ok_or(Error::TooLarge {
            entries: usize::MAX,
            limit: MAX_TENSOR_ENTRIES,
        })
    })
}

/// Joint pmf over `(x, z_1..z_n, w_1..w_n)`; every `Z_i` shares `X`'s alphabet.
#[derive(Clone, Debug)]
pub struct MultiJoint {
    x_space: FiniteSpace,
    w_spaces: Vec<FiniteSpace>,
    /// Interleaved `(x, z_1, w_1, …, z_n, w_n)`.
    p: Vec<f64>,
}

impl MultiJoint {
    /// `p` is row-major over `(x, z_1..z_n, w_1..w_n)`.
    pub fn new(x_space: FiniteSpace, w_spaces: Vec<FiniteSpace>, mut p: Vec<f64>) -> Result<Self> {
        if w_spaces.is_empty() {
            return Err(Error::InvalidArgument("at least one sender is required".into()));
        }
        let n = w_spaces.len();
        let nx = x_space.size();
        let mut dims = vec![nx; n + 1];
        dims.extend(w_spaces.iter().map(FiniteSpace::size));
        let total = checked_product(dims.iter().copied())?;
        guard(total)?;
        if p.len() != total {
            return Err(Error::ShapeMismatch(format!(
                "multi-sender joint has {} entries, expected {total}",
                p.len()
            )));
        }
        normalize_mass(&mut p, "multi-sender joint")?;

        // Permute (x, z.., w..) into (x, z1, w1, z2, w2, ..).
        let mut inter_dims = vec![nx];
        for w in &w_spaces {
            inter_dims.push(nx);
            inter_dims.push(w.size());
        }
        let mut out = vec![0.0; total];
        let mut idx = vec![0usize; 2 * n + 1];
        for (flat, &v) in p.iter().enumerate() {
            let mut rem = flat;
            for a in (0..=2 * n).rev() {
                idx[a] = rem % dims[a];
                rem /= dims[a];
            }
            let mut o = idx[0];
            for i in 0..n {
                o = o * inter_dims[2 * i + 1] + idx[1 + i];
                o = o * inter_dims[2 * i + 2] + idx[1 + n + i];
            }
            out[o] = v;
        }
        Ok(Self {
            x_space,
            w_spaces,
            p: out,
        })
    }

    /// Every sender measures `X` perfectly (`Z_i = X`); `pxw` is row-major
    /// over `(x, w_1..w_n)`.
    pub fn with_perfect_measurements(
        x_space: FiniteSpace,
        w_spaces: Vec<FiniteSpace>,
        pxw: &[f64],
    ) -> Result<Self> {
        let n = w_spaces.len();
        let nx = x_space.size();
        let nw_all = checked_product(w_spaces.iter().map(FiniteSpace::size))?;
        let zs = checked_product(std::iter::repeat(nx).take(n))?;
        guard(checked_product([nx, zs, nw_all])?)?;
        if pxw.len() != nx * nw_all {
            return Err(Error::ShapeMismatch(format!(
                "P(X,W..) has {} entries, expected {}",
                pxw.len(),
                nx * nw_all
            )));
        }
        let mut p = vec![0.0; nx * zs * nw_all];
        for x in 0..nx {
            let zdiag: usize = (0..n).fold(0, |acc, _| acc * nx + x);
            for wt in 0..nw_all {
                p[(x * zs + zdiag) * nw_all + wt] = pxw[x * nw_all + wt];
            }
        }
        Self::new(x_space, w_spaces, p)
    }

    pub fn n(&self) -> usize {
        self.w_spaces.len()
    }

    pub fn x_space(&self) -> &FiniteSpace {
        &self.x_space
    }

    pub fn w_spaces(&self) -> &[FiniteSpace] {
        &self.w_spaces
    }

    /// `P{Z_j = z, W_j = w}` for 0-based sender `j`, row-major `[z][w]`.
    pub fn zw_marginal(&self, j: usize) -> Vec<f64> {
        let nx = self.x_space.size();
        let zw = nx * self.w_spaces[j].size();
        let pre: usize = nx * self.w_spaces[..j].iter().map(|w| nx * w.size()).product::<usize>();
        let post: usize = self.w_spaces[j + 1..].iter().map(|w| nx * w.size()).product();
        let mut out = vec![0.0; zw];
        for a in 0..pre {
            for k in 0..zw {
                let base = (a * zw + k) * post;
                out[k] += self.p[base..base + post].iter().sum::<f64>();
            }
        }
        out
    }

    /// Collapses the joint to sender `j`'s single-sender view `p(x, z_j, w_j)`.
    pub fn single_view(&self, j: usize) -> Result<prob::JointPXZW> {
        let nx = self.x_space.size();
        let zw = nx * self.w_spaces[j].size();
        let pre: usize = self.w_spaces[..j].iter().map(|w| nx * w.size()).product();
        let post: usize = self.w_spaces[j + 1..].iter().map(|w| nx * w.size()).product();
        let mut out = vec![0.0; nx * zw];
        for x in 0..nx {
            for a in 0..pre {
                for k in 0..zw {
                    let base = ((x * pre + a) * zw + k) * post;
                    out[x * zw + k] += self.p[base..base + post].iter().sum::<f64>();
                }
            }
        }
        let sum: f64 = out.iter().sum();
        out.iter_mut().for_each(|v| *v /= sum);
        prob::JointPXZW::new(self.x_space.clone(), self.w_spaces[j].clone(), out)
    }
}

/// Receiver policy `β[x̂][y_1]…[y_n]`; message tuples are flattened row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiReceiverPolicy {
    nx: usize,
    y_dims: Vec<usize>,
    b: Vec<f64>,
}

impl MultiReceiverPolicy {
    pub fn new(nx: usize, y_dims: Vec<usize>, b: Vec<f64>) -> Result<Self> {
        let tuples = checked_product(y_dims.iter().copied())?;
        guard(checked_product([nx, tuples])?)?;
        if b.len() != nx * tuples || nx == 0 || tuples == 0 {
            return Err(Error::ShapeMismatch(format!(
                "receiver policy has {} entries, expected {}",
                b.len(),
                nx * tuples
            )));
        }
        if let Some(v) = b.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidPolicy(format!("receiver entry {v} outside [0, 1]")));
        }
        for t in 0..tuples {
            let s: f64 = (0..nx).map(|xh| b[xh * tuples + t]).sum();
            if (s - 1.0).abs() > PMF_TOL {
                return Err(Error::InvalidPolicy(format!("message tuple {t} sums to {s}")));
            }
        }
        Ok(Self { nx, y_dims, b })
    }

    /// Tuple `t` (row-major index) is decoded to `choice[t]`.
    pub fn deterministic(nx: usize, y_dims: Vec<usize>, choice: &[usize]) -> Result<Self> {
        let tuples = checked_product(y_dims.iter().copied())?;
        if choice.len() != tuples {
            return Err(Error::ShapeMismatch("one choice per message tuple".into()));
        }
        guard(checked_product([nx, tuples])?)?;
        let mut b = vec![0.0; nx * tuples];
        for (t, &xh) in choice.iter().enumerate() {
            b[xh * tuples + t] = 1.0;
        }
        Ok(Self { nx, y_dims, b })
    }

    pub fn constant(nx: usize, y_dims: Vec<usize>, x_hat: usize) -> Result<Self> {
        let tuples = checked_product(y_dims.iter().copied())?;
        Self::deterministic(nx, y_dims, &vec![x_hat; tuples])
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn y_dims(&self) -> &[usize] {
        &self.y_dims
    }

    pub fn tuples(&self) -> usize {
        self.b.len() / self.nx
    }

    #[inline]
    pub fn get(&self, x_hat: usize, tuple: usize) -> f64 {
        self.b[x_hat * self.tuples() + tuple]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.b
    }

    pub fn choices(&self) -> Option<Vec<usize>> {
        (0..self.tuples())
            .map(|t| (0..self.nx).find(|&xh| self.get(xh, t) == 1.0))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct MultiGameInstance {
    joint: MultiJoint,
    distortion: DistortionMatrix,
    y_spaces: Vec<FiniteSpace>,
    rho: f64,
}

/// Shape of a partially contracted tensor: after `x`, one slot per sender,
/// either still `(z_i, w_i)` or already `y_i`.
#[derive(Clone, Copy)]
enum Slot {
    Open(usize),
    Message(usize),
}

impl Slot {
    fn len(self) -> usize {
        match self {
            Slot::Open(n) | Slot::Message(n) => n,
        }
    }
}

/// `out[a][y][b] = ∑_k α[y][k]·t[a][k][b]`.
fn contract_slot(t: &[f64], pre: usize, k_len: usize, post: usize, alpha: &[f64], ny: usize) -> Vec<f64> {
    let mut out = vec![0.0; pre * ny * post];
    for a in 0..pre {
        for k in 0..k_len {
            let src = &t[(a * k_len + k) * post..(a * k_len + k + 1) * post];
            if src.iter().all(|&v| v == 0.0) {
                continue;
            }
            for y in 0..ny {
                let w = alpha[y * k_len + k];
                if w == 0.0 {
                    continue;
                }
                let dst = &mut out[(a * ny + y) * post..(a * ny + y + 1) * post];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
    }
    out
}

impl MultiGameInstance {
    pub fn new(
        joint: MultiJoint,
        distortion: DistortionMatrix,
        y_spaces: Vec<FiniteSpace>,
        rho: f64,
    ) -> Result<Self> {
        if !rho.is_finite() || rho < 0.0 {
            return Err(Error::InvalidArgument(format!("privacy ratio must be >= 0, got {rho}")));
        }
        if distortion.size() != joint.x_space().size() {
            return Err(Error::ShapeMismatch("distortion does not match |X|".into()));
        }
        if y_spaces.len() != joint.n() {
            return Err(Error::ShapeMismatch(format!(
                "{} message alphabets for {} senders",
                y_spaces.len(),
                joint.n()
            )));
        }
        let tuples = checked_product(y_spaces.iter().map(FiniteSpace::size))?;
        guard(checked_product([joint.x_space().size(), tuples])?)?;
        Ok(Self {
            joint,
            distortion,
            y_spaces,
            rho,
        })
    }

    /// Hamming distortion; every `Y_i` on `X`'s alphabet.
    pub fn hamming(joint: MultiJoint, rho: f64) -> Result<Self> {
        let d = DistortionMatrix::hamming(joint.x_space());
        let ys = vec![joint.x_space().clone(); joint.n()];
        Self::new(joint, d, ys, rho)
    }

    pub fn joint(&self) -> &MultiJoint {
        &self.joint
    }

    pub fn distortion(&self) -> &DistortionMatrix {
        &self.distortion
    }

    pub fn y_spaces(&self) -> &[FiniteSpace] {
        &self.y_spaces
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn n(&self) -> usize {
        self.joint.n()
    }

    pub fn nx(&self) -> usize {
        self.joint.x_space().size()
    }

    pub fn y_dims(&self) -> Vec<usize> {
        self.y_spaces.iter().map(FiniteSpace::size).collect()
    }

    /// `[|Y_j|, |X|, |W_j|]` for 0-based `j`.
    pub fn sender_dims(&self, j: usize) -> [usize; 3] {
        [self.y_spaces[j].size(), self.nx(), self.joint.w_spaces[j].size()]
    }

    fn check_senders(&self, alphas: &[SenderPolicy]) -> Result<()> {
        if alphas.len() != self.n() {
            return Err(Error::ShapeMismatch(format!(
                "{} sender policies for {} senders",
                alphas.len(),
                self.n()
            )));
        }
        for (j, a) in alphas.iter().enumerate() {
            if a.dims() != self.sender_dims(j) {
                return Err(Error::ShapeMismatch(format!(
                    "sender {} policy dims {:?}, expected {:?}",
                    j + 1,
                    a.dims(),
                    self.sender_dims(j)
                )));
            }
        }
        Ok(())
    }

    fn check_receiver(&self, beta: &MultiReceiverPolicy) -> Result<()> {
        if beta.nx() != self.nx() || beta.y_dims() != self.y_dims().as_slice() {
            return Err(Error::ShapeMismatch("receiver policy does not match the game".into()));
        }
        Ok(())
    }

    fn sender_index(&self, j: usize) -> Result<usize> {
        if j == 0 || j > self.n() {
            return Err(Error::InvalidArgument(format!(
                "sender index {j} outside 1..={}",
                self.n()
            )));
        }
        Ok(j - 1)
    }

    /// Contracts every sender except `skip` (0-based) against its policy.
    /// Returns the tensor and its slot layout after the leading `x` axis.
    fn contract(&self, alphas: &[SenderPolicy], skip: Option<usize>) -> (Vec<f64>, Vec<Slot>) {
        let nx = self.nx();
        let mut slots: Vec<Slot> = self
            .joint
            .w_spaces
            .iter()
            .map(|w| Slot::Open(nx * w.size()))
            .collect();
        let mut t = self.joint.p.clone();
        for i in 0..self.n() {
            if Some(i) == skip {
                continue;
            }
            let pre = nx * slots[..i].iter().map(|s| s.len()).product::<usize>();
            let post: usize = slots[i + 1..].iter().map(|s| s.len()).product();
            let ny = self.y_spaces[i].size();
            t = contract_slot(&t, pre, slots[i].len(), post, alphas[i].as_slice(), ny);
            slots[i] = Slot::Message(ny);
        }
        (t, slots)
    }

    /// `P{X=x, (Y_i)=t}`, rows `x`, columns the row-major message tuple.
    pub fn measurement_joint(&self, alphas: &[SenderPolicy]) -> Result<Vec<f64>> {
        self.check_senders(alphas)?;
        Ok(self.contract(alphas, None).0)
    }

    /// `D[x][t] = ∑_x̂ d(x,x̂)·β[x̂][t]`.
    fn distortion_given_messages(&self, beta: &MultiReceiverPolicy) -> Vec<f64> {
        let nx = self.nx();
        let tuples = beta.tuples();
        let mut out = vec![0.0; nx * tuples];
        for x in 0..nx {
            for xh in 0..nx {
                let d = self.distortion.get(x, xh);
                if d == 0.0 {
                    continue;
                }
                let row = &beta.as_slice()[xh * tuples..(xh + 1) * tuples];
                for (o, b) in out[x * tuples..(x + 1) * tuples].iter_mut().zip(row) {
                    *o += d * b;
                }
            }
        }
        out
    }

    /// `ξ′ = E{d(X, X̂)}`.
    pub fn expected_distortion(&self, alphas: &[SenderPolicy], beta: &MultiReceiverPolicy) -> Result<f64> {
        self.check_senders(alphas)?;
        self.check_receiver(beta)?;
        let pxy = self.contract(alphas, None).0;
        let dm = self.distortion_given_messages(beta);
        Ok(pxy.iter().zip(&dm).map(|(p, d)| p * d).sum::<f64>().max(0.0))
    }

    /// `ζ′_j = I(Y_j; W_j)` for 1-based sender `j`.
    pub fn leakage(&self, alphas: &[SenderPolicy], j: usize) -> Result<f64> {
        let i = self.sender_index(j)?;
        self.check_senders(alphas)?;
        let [ny, nz, nw] = self.sender_dims(i);
        let q = self.joint.zw_marginal(i);
        let a = alphas[i].as_slice();
        let mut pyw = vec![0.0; ny * nw];
        for y in 0..ny {
            for z in 0..nz {
                for w in 0..nw {
                    pyw[y * nw + w] += a[(y * nz + z) * nw + w] * q[z * nw + w];
                }
            }
        }
        let m = prob::Pmf2::derived(self.y_spaces[i].clone(), self.joint.w_spaces[i].clone(), pyw);
        prob::mutual_information(&m)
    }

    /// `I(Y_1, …, Y_n; W_j)`: what all messages together reveal about
    /// sender `j`'s private variable. Reported only; no player optimizes it.
    pub fn coalition_leakage(&self, alphas: &[SenderPolicy], j: usize) -> Result<f64> {
        let i = self.sender_index(j)?;
        let (t, slots) = {
            self.check_senders(alphas)?;
            self.contract(alphas, Some(i))
        };
        let nx = self.nx();
        let [ny, nz, nw] = self.sender_dims(i);
        let pre: usize = slots[..i].iter().map(|s| s.len()).product();
        let post: usize = slots[i + 1..].iter().map(|s| s.len()).product();
        // m[(a, y, b)][w], summed over x and z_j.
        let a_j = alphas[i].as_slice();
        let mut m = vec![0.0; pre * ny * post * nw];
        for x in 0..nx {
            for a in 0..pre {
                for z in 0..nz {
                    for w in 0..nw {
                        let base = (((x * pre + a) * nz + z) * nw + w) * post;
                        for y in 0..ny {
                            let coef = a_j[(y * nz + z) * nw + w];
                            if coef == 0.0 {
                                continue;
                            }
                            for b in 0..post {
                                m[((a * ny + y) * post + b) * nw + w] += coef * t[base + b];
                            }
                        }
                    }
                }
            }
        }
        let v = prob::mutual_information_raw(&m, pre * ny * post, nw)?;
        Ok(v.max(0.0))
    }

    pub fn receiver_cost(&self, alphas: &[SenderPolicy], beta: &MultiReceiverPolicy) -> Result<f64> {
        self.expected_distortion(alphas, beta)
    }

    /// `U_j = ξ′ + ρ·ζ′_j`, 1-based `j`.
    pub fn sender_cost(&self, alphas: &[SenderPolicy], beta: &MultiReceiverPolicy, j: usize) -> Result<f64> {
        Ok(self.expected_distortion(alphas, beta)? + self.rho * self.leakage(alphas, j)?)
    }

    /// `Ψ′ = ξ′ + ρ·∑_i ζ′_i`.
    pub fn potential(&self, alphas: &[SenderPolicy], beta: &MultiReceiverPolicy) -> Result<f64> {
        let mut total = self.expected_distortion(alphas, beta)?;
        for j in 1..=self.n() {
            total += self.rho * self.leakage(alphas, j)?;
        }
        Ok(total)
    }

    pub fn prior_optimal_estimate(&self) -> usize {
        let nx = self.nx();
        let stride = self.joint.p.len() / nx;
        let px: Vec<f64> = (0..nx)
            .map(|x| self.joint.p[x * stride..(x + 1) * stride].iter().sum())
            .collect();
        argmin_low((0..nx).map(|xh| (0..nx).map(|x| self.distortion.get(x, xh) * px[x]).sum::<f64>()))
    }

    /// Exact minimizer of `V` over deterministic decoders; lowest index on
    /// ties, prior-optimal estimate for tuples that are never sent.
    pub fn receiver_best_response(&self, alphas: &[SenderPolicy]) -> Result<MultiReceiverPolicy> {
        self.check_senders(alphas)?;
        let nx = self.nx();
        let pxy = self.contract(alphas, None).0;
        let tuples = pxy.len() / nx;
        let fallback = self.prior_optimal_estimate();
        let d = &self.distortion;
        let choice: Vec<usize> = (0..tuples)
            .map(|t| {
                let pt: f64 = (0..nx).map(|x| pxy[x * tuples + t]).sum();
                if pt <= 0.0 {
                    return fallback;
                }
                argmin_low((0..nx).map(|xh| (0..nx).map(|x| d.get(x, xh) * pxy[x * tuples + t]).sum::<f64>()))
            })
            .collect();
        MultiReceiverPolicy::deterministic(nx, self.y_dims(), &choice)
    }

    /// Coefficients `c[y_j][z_j][w_j]` with `ξ′ = ∑ c·α^(j)` when all other
    /// policies are held fixed.
    fn sender_coefficients(&self, alphas: &[SenderPolicy], beta: &MultiReceiverPolicy, i: usize) -> Vec<f64> {
        let (t, slots) = self.contract(alphas, Some(i));
        let dm = self.distortion_given_messages(beta);
        let nx = self.nx();
        let ny = self.y_spaces[i].size();
        let k_len = slots[i].len();
        let pre = nx * slots[..i].iter().map(|s| s.len()).product::<usize>();
        let post: usize = slots[i + 1..].iter().map(|s| s.len()).product();
        let mut c = vec![0.0; ny * k_len];
        for a in 0..pre {
            for y in 0..ny {
                let drow = &dm[(a * ny + y) * post..(a * ny + y + 1) * post];
                if drow.iter().all(|&v| v == 0.0) {
                    continue;
                }
                for k in 0..k_len {
                    let trow = &t[(a * k_len + k) * post..(a * k_len + k + 1) * post];
                    c[y * k_len + k] += drow.iter().zip(trow).map(|(d, p)| d * p).sum::<f64>();
                }
            }
        }
        c
    }

    /// Minimizer of `U_j` over sender `j`'s policies, others and `β` fixed.
    pub fn sender_best_response(
        &self,
        alphas: &[SenderPolicy],
        beta: &MultiReceiverPolicy,
        j: usize,
        settings: &SolverSettings,
    ) -> Result<BestResponseResult<SenderPolicy>> {
        let i = self.sender_index(j)?;
        self.check_senders(alphas)?;
        self.check_receiver(beta)?;
        let c = self.sender_coefficients(alphas, beta, i);
        let q = self.joint.zw_marginal(i);
        let dims = self.sender_dims(i);
        let problem = SenderProblem {
            dims,
            c: &c,
            q: &q,
            rho: self.rho,
        };
        let sol = problem.solve(settings)?;
        let policy = SenderPolicy::from_raw(dims, sol.a);
        let mut next = alphas.to_vec();
        next[i] = policy.clone();
        let cost = self.sender_cost(&next, beta, j)?;
        Ok(BestResponseResult {
            policy,
            cost,
            iterations: sol.iterations,
            converged: sol.converged,
            stationarity_gap: sol.gap,
        })
    }

    /// Uniform senders and the prior-optimal constant receiver.
    pub fn babbling(&self) -> Result<(Vec<SenderPolicy>, MultiReceiverPolicy)> {
        let alphas = (0..self.n())
            .map(|i| {
                let [ny, nz, nw] = self.sender_dims(i);
                SenderPolicy::uniform(ny, nz, nw)
            })
            .collect();
        let beta = MultiReceiverPolicy::constant(self.nx(), self.y_dims(), self.prior_optimal_estimate())?;
        Ok((alphas, beta))
    }

    /// Starting profile for dynamics: each sender reports its measurement
    /// verbatim (uniform when `|Y_j| ≠ |X|`) and the receiver best-responds.
    pub fn initial_profile(&self) -> Result<(Vec<SenderPolicy>, MultiReceiverPolicy)> {
        let alphas: Vec<_> = (0..self.n())
            .map(|i| {
                let [ny, nz, nw] = self.sender_dims(i);
                if ny == nz {
                    SenderPolicy::truth_telling(ny, nw)
                } else {
                    SenderPolicy::uniform(ny, nz, nw)
                }
            })
            .collect();
        let beta = self.receiver_best_response(&alphas)?;
        Ok((alphas, beta))
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct MultiNashReport {
    pub member: bool,
    pub epsilon: f64,
    pub receiver_gap: f64,
    /// `sender_gaps[j-1]` belongs to sender `j`.
    pub sender_gaps: Vec<f64>,
}

/// Per-player ε-Nash audit of a multi-sender profile.
pub fn epsilon_nash_check(
    g: &MultiGameInstance,
    alphas: &[SenderPolicy],
    beta: &MultiReceiverPolicy,
    epsilon: f64,
    settings: &SolverSettings,
) -> Result<MultiNashReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be > 0, got {epsilon}")));
    }
    let v = g.receiver_cost(alphas, beta)?;
    let br = g.receiver_best_response(alphas)?;
    let receiver_gap = (v - g.receiver_cost(alphas, &br)?).max(0.0);
    let mut sender_gaps = Vec::with_capacity(g.n());
    for j in 1..=g.n() {
        let u = g.sender_cost(alphas, beta, j)?;
        let br = g.sender_best_response(alphas, beta, j, settings)?;
        sender_gaps.push((u - br.cost).max(0.0));
    }
    Ok(MultiNashReport {
        member: receiver_gap <= epsilon && sender_gaps.iter().all(|&s| s <= epsilon),
        epsilon,
        receiver_gap,
        sender_gaps,
    })
}

pub type MultiReport = DynamicsReport<Vec<SenderPolicy>, MultiReceiverPolicy>;

fn multi_record(
    g: &MultiGameInstance,
    k: usize,
    mover: Mover,
    alphas: &[SenderPolicy],
    beta: &MultiReceiverPolicy,
    accepted: bool,
) -> Result<TrajectoryRecord> {
    let xi = g.expected_distortion(alphas, beta)?;
    let mut leak_sum = 0.0;
    let mut worst = f64::NEG_INFINITY;
    for j in 1..=g.n() {
        let z = g.leakage(alphas, j)?;
        leak_sum += z;
        worst = worst.max(xi + g.rho() * z);
    }
    Ok(TrajectoryRecord {
        k,
        mover,
        potential: xi + g.rho() * leak_sum,
        sender_cost: worst,
        receiver_cost: xi,
        accepted,
    })
}

/// Randomized best-response dynamics. Each round draws a player uniformly
/// from `{receiver, sender_1, …, sender_n}` with a generator seeded by
/// `seed`; the draw's best response is adopted only if it gains more than
/// ε. The run ends once every player has been drawn and declined since the
/// last adopted move, or after `max_rounds` rounds.
pub fn random_best_response_dynamics(
    g: &MultiGameInstance,
    alphas0: &[SenderPolicy],
    beta0: &MultiReceiverPolicy,
    epsilon: f64,
    settings: &SolverSettings,
    max_rounds: usize,
    seed: u64,
) -> Result<MultiReport> {
    check_precision(epsilon, settings)?;
    g.check_senders(alphas0)?;
    g.check_receiver(beta0)?;
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alphas = alphas0.to_vec();
    let mut beta = beta0.clone();
    let mut trajectory = vec![multi_record(g, 0, Mover::None, &alphas, &beta, false)?];
    let mut declined = vec![false; n + 1];
    let mut k = 0;
    let mut settled = false;
    while k < max_rounds {
        k += 1;
        let j = rng.gen_range(0..=n);
        let (mover, accepted) = if j == 0 {
            let candidate = g.receiver_best_response(&alphas)?;
            let gain = g.receiver_cost(&alphas, &beta)? - g.receiver_cost(&alphas, &candidate)?;
            let ok = gain > epsilon;
            if ok {
                beta = candidate;
            }
            (Mover::Receiver, ok)
        } else {
            let br = g.sender_best_response(&alphas, &beta, j, settings)?;
            let gain = g.sender_cost(&alphas, &beta, j)? - br.cost;
            let ok = gain > epsilon;
            if ok {
                alphas[j - 1] = br.policy;
            }
            (Mover::SenderJ(j), ok)
        };
        if accepted {
            declined.iter_mut().for_each(|d| *d = false);
        } else {
            declined[j] = true;
        }
        trajectory.push(multi_record(g, k, mover, &alphas, &beta, accepted)?);
        if declined.iter().all(|&d| d) {
            settled = true;
            break;
        }
    }
    Ok(DynamicsReport {
        trajectory,
        final_alpha: alphas,
        final_beta: beta,
        epsilon,
        reached_eps_nash: settled,
        iterations_used: k,
        iteration_bound: None,
    })
}

/// Round budget `10·(n+1)·⌈3 + Ψ′₀/ε⌉`.
pub fn default_round_budget(n: usize, psi0: f64, epsilon: f64) -> usize {
    10 * (n + 1) * (3.0 + psi0 / epsilon).ceil() as usize
}
