//! Best responses, closed-form equilibria and ε-Nash certification for the
//! single-sender game.
//!
//! The receiver's problem is linear in `β`, so its best response is an
//! exact per-message argmin. The sender's problem `min_α ξ(α,β) + ρ·ζ(α)`
//! is convex over a product of `|Z|·|W|` simplices and is solved by
//! exponentiated-gradient mirror descent (see [`SenderProblem`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GameInstance, ReceiverPolicy, SenderPolicy};
use crate::prob;

/// Relative slack under which two candidate costs count as a tie.
pub(crate) const TIE_TOL: f64 = 1e-12;
/// Iterates never drop below this mass, keeping `ln` terms finite.
const MIN_MASS: f64 = 1e-300;
const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-14;
const MAX_STEP: f64 = 1e14;
/// Consecutive sub-`obj_tol` decreases tolerated before giving up.
const STALL_ITERS: usize = 50;
/// Messages whose probability is at most this are treated as unused: their
/// gradient entries depend on a numerically meaningless composition.
const DEAD_MASS: f64 = 1e-10;
/// Entries below this count as sitting on the floor.
const RESEED_MASS: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub obj_tol: f64,
    pub step_init: f64,
    pub seed: u64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            grad_tol: 1e-8,
            obj_tol: 1e-12,
            step_init: 1.0,
            seed: 0,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be >= 1".into()));
        }
        for (name, v) in [
            ("grad_tol", self.grad_tol),
            ("obj_tol", self.obj_tol),
            ("step_init", self.step_init),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct BestResponseResult<P> {
    pub policy: P,
    pub cost: f64,
    pub iterations: usize,
    /// Set only when `stationarity_gap <= grad_tol`.
    pub converged: bool,
    pub stationarity_gap: f64,
}

/// Picks the lowest index whose value is within [`TIE_TOL`] of the minimum.
pub(crate) fn argmin_low(values: impl Iterator<Item = f64> + Clone) -> usize {
    let best = values.clone().fold(f64::INFINITY, f64::min);
    let slack = TIE_TOL * best.abs().max(1.0);
    values.into_iter().position(|v| v <= best + slack).unwrap_or(0)
}

/// Estimate minimizing `∑_x d(x,x̂)·P{X=x}`; the mode of `X` under Hamming distortion.
pub fn prior_optimal_estimate(g: &GameInstance) -> usize {
    let px = g.joint().px();
    let d = g.distortion();
    argmin_low((0..g.nx()).map(|xh| (0..g.nx()).map(|x| d.get(x, xh) * px[x]).sum::<f64>()))
}

/// Exact minimizer of `V(α, ·)`: each message is decoded to the estimate with
/// the smallest posterior expected distortion. Messages that are never sent
/// get the prior-optimal estimate.
pub fn receiver_best_response(g: &GameInstance, alpha: &SenderPolicy) -> Result<ReceiverPolicy> {
    g.check_sender(alpha)?;
    let (nx, ny) = (g.nx(), g.ny());
    let pxy = g.pxy_raw(alpha.as_slice());
    let d = g.distortion();
    let fallback = prior_optimal_estimate(g);
    let choice: Vec<usize> = (0..ny)
        .map(|y| {
            let py: f64 = (0..nx).map(|x| pxy[x * ny + y]).sum();
            if py <= 0.0 {
                return fallback;
            }
            argmin_low((0..nx).map(|xh| (0..nx).map(|x| d.get(x, xh) * pxy[x * ny + y]).sum::<f64>()))
        })
        .collect();
    Ok(ReceiverPolicy::deterministic(nx, &choice))
}

/// Convex sender subproblem `min_α ∑ c·α + ρ·I(Y;W)` over row-stochastic
/// blocks `α[·][z][w]`, where `q = P{Z=z, W=w}` drives the message joint
/// `P{Y=y, W=w} = ∑_z α[y][z][w]·q[z][w]`.
///
/// Shared by the single-sender best response and the per-sender best
/// responses of the multi-sender game.
pub(crate) struct SenderProblem<'a> {
    pub dims: [usize; 3],
    pub c: &'a [f64],
    pub q: &'a [f64],
    pub rho: f64,
}

/// Direction that moves mass onto an unused message `y`: `(block, m)`
/// pairs, where `m` is that block's share of the moved probability.
struct Revival {
    y: usize,
    gap: f64,
    moves: Vec<(usize, f64)>,
}

pub(crate) struct SenderSolution {
    pub a: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub gap: f64,
}

impl SenderProblem<'_> {
    fn blocks(&self) -> usize {
        self.dims[1] * self.dims[2]
    }

    fn pyw(&self, a: &[f64]) -> Vec<f64> {
        let [ny, nz, nw] = self.dims;
        let mut out = vec![0.0; ny * nw];
        for y in 0..ny {
            for z in 0..nz {
                for w in 0..nw {
                    out[y * nw + w] += a[(y * nz + z) * nw + w] * self.q[z * nw + w];
                }
            }
        }
        out
    }

    pub fn value(&self, a: &[f64]) -> Result<f64> {
        let lin: f64 = self.c.iter().zip(a).map(|(c, a)| c * a).sum();
        if self.rho == 0.0 {
            return Ok(lin);
        }
        let mi = prob::mutual_information_raw(&self.pyw(a), self.dims[0], self.dims[2])?;
        Ok(lin + self.rho * mi)
    }

    /// Partial derivatives `c + ρ·q[z][w]·ln(P{y,w}·S / (P{y}·P{w}))`.
    /// Entries whose message joint cell is empty are `-∞`.
    pub fn gradient(&self, a: &[f64]) -> Vec<f64> {
        let [ny, nz, nw] = self.dims;
        let mut g = self.c.to_vec();
        if self.rho == 0.0 {
            return g;
        }
        let pyw = self.pyw(a);
        let mut py = vec![0.0; ny];
        let mut pw = vec![0.0; nw];
        for y in 0..ny {
            for w in 0..nw {
                py[y] += pyw[y * nw + w];
                pw[w] += pyw[y * nw + w];
            }
        }
        let total: f64 = py.iter().sum();
        for y in 0..ny {
            for w in 0..nw {
                let m = pyw[y * nw + w];
                let log_ratio = if m > 0.0 {
                    (m * total / (py[y] * pw[w])).ln()
                } else {
                    f64::NEG_INFINITY
                };
                for z in 0..nz {
                    let q = self.q[z * nw + w];
                    if q > 0.0 {
                        g[(y * nz + z) * nw + w] += self.rho * q * log_ratio;
                    }
                }
            }
        }
        g
    }

    /// Which messages carry more than [`DEAD_MASS`]. With `ρ = 0` the
    /// gradient is exact everywhere and every message counts as live.
    fn live_messages(&self, a: &[f64]) -> Vec<bool> {
        let [ny, nz, nw] = self.dims;
        if self.rho == 0.0 {
            return vec![true; ny];
        }
        let stride = nz * nw;
        (0..ny)
            .map(|y| (0..stride).map(|b| a[y * stride + b] * self.q[b]).sum::<f64>() > DEAD_MASS)
            .collect()
    }

    /// Per-block first-order gaps `∑_y α·g − min_y g`, the minimum taken
    /// over live messages.
    fn block_gaps_with(&self, a: &[f64], g: &[f64], live: &[bool]) -> Vec<f64> {
        let stride = self.blocks();
        (0..stride)
            .map(|b| {
                let mut inner = 0.0;
                for y in 0..self.dims[0] {
                    let i = y * stride + b;
                    if a[i] > 0.0 {
                        inner += a[i] * g[i];
                    }
                }
                let gap = inner - g[self.live_argmin(g, b, live)];
                if gap.is_nan() {
                    f64::INFINITY
                } else {
                    gap.max(0.0)
                }
            })
            .collect()
    }

    /// Entry index of the lowest-gradient live message in block `b`.
    fn live_argmin(&self, g: &[f64], b: usize, live: &[bool]) -> usize {
        let stride = self.blocks();
        let any_live = live.iter().any(|&l| l);
        let y = argmin_low((0..self.dims[0]).map(|y| {
            if live[y] || !any_live {
                g[y * stride + b]
            } else {
                f64::INFINITY
            }
        }));
        y * stride + b
    }

    /// Best first-order rate at which mass can be moved into each unused
    /// message. Moving probability `m_w` into message `y` from the cheapest
    /// block with private value `w` changes the cost at rate
    /// `∑ m_w·a_w + ρ·∑ m_w·ln(m_w / P{W=w})`, whose minimum over
    /// distributions `m` is `−ρ·ln ∑_w P{W=w}·exp(−a_w/ρ)`.
    fn revivals(&self, a: &[f64], g: &[f64], live: &[bool]) -> Vec<Revival> {
        let [ny, nz, nw] = self.dims;
        let stride = nz * nw;
        if self.rho == 0.0 || live.iter().all(|&l| l) {
            return Vec::new();
        }
        // Average gradient of the mass a block gives up.
        let gbar: Vec<f64> = (0..stride)
            .map(|b| {
                (0..ny)
                    .map(|y| y * stride + b)
                    .filter(|&i| a[i] > 0.0)
                    .map(|i| a[i] * g[i])
                    .sum()
            })
            .collect();
        let mut pw = vec![0.0; nw];
        for b in 0..stride {
            pw[b % nw] += self.q[b];
        }
        (0..ny)
            .filter(|&y| !live[y])
            .filter_map(|y| {
                let mut best = vec![(f64::INFINITY, usize::MAX); nw];
                for b in (0..stride).filter(|&b| self.q[b] > 0.0) {
                    let u = (self.c[y * stride + b] - gbar[b]) / self.q[b];
                    if u < best[b % nw].0 {
                        best[b % nw] = (u, b);
                    }
                }
                let logits: Vec<f64> = (0..nw)
                    .map(|w| {
                        if pw[w] > 0.0 && best[w].0.is_finite() {
                            pw[w].ln() - best[w].0 / self.rho
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                    .collect();
                let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if !top.is_finite() {
                    return None;
                }
                let lse = top + logits.iter().map(|l| (l - top).exp()).sum::<f64>().ln();
                let moves = (0..nw)
                    .filter(|&w| logits[w].is_finite())
                    .map(|w| (best[w].1, (logits[w] - lse).exp()))
                    .collect();
                Some(Revival {
                    y,
                    gap: (self.rho * lse).max(0.0),
                    moves,
                })
            })
            .collect()
    }

    /// Largest live block gap and largest revival gap.
    fn stationarity(&self, a: &[f64], g: &[f64]) -> (f64, Option<Revival>) {
        let live = self.live_messages(a);
        let gap = self.block_gaps_with(a, g, &live).into_iter().fold(0.0, f64::max);
        let rev = self
            .revivals(a, g, &live)
            .into_iter()
            .max_by(|x, y| x.gap.total_cmp(&y.gap));
        (gap, rev)
    }

    /// Sum of live block gaps and revival gaps.
    pub fn gap_sum(&self, a: &[f64], g: &[f64]) -> f64 {
        let live = self.live_messages(a);
        let blocks: f64 = self.block_gaps_with(a, g, &live).iter().sum();
        blocks + self.revivals(a, g, &live).iter().map(|r| r.gap).sum::<f64>()
    }

    /// Line search along the revival direction: block `b` moves a share
    /// `t·m/q_b` of its mass onto the unused message.
    fn revival_step(&self, a: &[f64], f: f64, rev: &Revival) -> Result<Option<(Vec<f64>, f64)>> {
        let stride = self.blocks();
        let t_max = rev
            .moves
            .iter()
            .map(|&(b, m)| self.q[b] / m)
            .fold(f64::INFINITY, f64::min)
            .min(1.0);
        let mut t = t_max;
        while t >= MIN_STEP {
            let mut trial = a.to_vec();
            for &(b, m) in &rev.moves {
                let share = (t * m / self.q[b]).min(1.0);
                for y in 0..self.dims[0] {
                    trial[y * stride + b] *= 1.0 - share;
                }
                trial[rev.y * stride + b] += share;
            }
            let ft = self.value(&trial)?;
            if ft <= f - ARMIJO * t * rev.gap {
                return Ok(Some((trial, ft)));
            }
            t *= 0.5;
        }
        Ok(None)
    }

    fn mirror_step(&self, a: &[f64], g: &[f64], step: f64) -> Vec<f64> {
        let [ny, nz, nw] = self.dims;
        let stride = nz * nw;
        let mut out = a.to_vec();
        let mut logits = vec![0.0; ny];
        for b in 0..self.blocks() {
            let q = self.q[b];
            if q <= 0.0 {
                continue;
            }
            for (y, l) in logits.iter_mut().enumerate() {
                let i = y * stride + b;
                *l = a[i].ln() - step * g[i] / q;
            }
            let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut s = 0.0;
            for (y, l) in logits.iter().enumerate() {
                let v = (l - top).exp().max(MIN_MASS);
                out[y * stride + b] = v;
                s += v;
            }
            for y in 0..ny {
                out[y * stride + b] /= s;
            }
        }
        out
    }

    /// Moves each selected block toward its lowest-gradient live message,
    /// `α + γ(e − α)`, with `γ` backtracked from 1 under the Armijo rule.
    fn frank_wolfe_step(
        &self,
        a: &[f64],
        g: &[f64],
        f: f64,
        select: impl Fn(usize, usize) -> bool,
    ) -> Result<Option<(Vec<f64>, f64)>> {
        let [ny, nz, nw] = self.dims;
        let stride = nz * nw;
        let live = self.live_messages(a);
        let mut dir = vec![0.0; a.len()];
        let mut predicted = 0.0;
        for b in 0..self.blocks() {
            if self.q[b] <= 0.0 {
                continue;
            }
            let v = self.live_argmin(g, b, &live);
            if !select(b, v) {
                continue;
            }
            for y in 0..ny {
                let i = y * stride + b;
                dir[i] = f64::from(u8::from(i == v)) - a[i];
                predicted += g[i] * dir[i];
            }
        }
        if !(predicted < 0.0) {
            return Ok(None);
        }
        let mut gamma = 1.0;
        while gamma >= MIN_STEP {
            let trial: Vec<f64> = a.iter().zip(&dir).map(|(x, d)| (x + gamma * d).max(0.0)).collect();
            let ft = self.value(&trial)?;
            if ft <= f + ARMIJO * gamma * predicted {
                return Ok(Some((trial, ft)));
            }
            gamma *= 0.5;
        }
        Ok(None)
    }

    /// Tries to retire the lightest live message: every
    /// block hands that message's mass to its best other live message. The
    /// multiplicative update only shrinks such messages geometrically.
    fn drop_step(&self, a: &[f64], g: &[f64], f: f64) -> Result<Option<(Vec<f64>, f64)>> {
        let [ny, nz, nw] = self.dims;
        let stride = nz * nw;
        if self.rho == 0.0 {
            return Ok(None);
        }
        let mut live = self.live_messages(a);
        let mass: Vec<f64> = (0..ny)
            .map(|y| (0..stride).map(|b| a[y * stride + b] * self.q[b]).sum())
            .collect();
        let Some(y) = (0..ny)
            .filter(|&y| live[y])
            .min_by(|&i, &j| mass[i].total_cmp(&mass[j]))
        else {
            return Ok(None);
        };
        live[y] = false;
        if !live.iter().any(|&l| l) {
            return Ok(None);
        }
        let mut trial = a.to_vec();
        for b in (0..stride).filter(|&b| self.q[b] > 0.0) {
            let from = y * stride + b;
            let to = self.live_argmin(g, b, &live);
            trial[to] += trial[from] - MIN_MASS;
            trial[from] = MIN_MASS;
        }
        let ft = self.value(&trial)?;
        let noise = 8.0 * f64::EPSILON * (f.abs() + 1.0);
        Ok((ft < f - noise).then_some((trial, ft)))
    }

    /// Exponentiated-gradient descent from the uniform policy. Each block is
    /// updated as `α ∝ α·exp(−η·g/q)` (mirror map: entropy weighted by
    /// `q`), with a backtracking line search on the objective that doubles
    /// the step after every accepted move. A stalled or failed line search
    /// hands one iteration to [`Self::frank_wolfe_step`].
    pub fn solve(&self, settings: &SolverSettings) -> Result<SenderSolution> {
        settings.validate()?;
        let [ny, _, _] = self.dims;
        let mut a = vec![1.0 / ny as f64; self.c.len()];
        let mut f = self.value(&a)?;
        let mut step = settings.step_init;
        let mut gap = f64::INFINITY;
        let mut iterations = 0;
        let mut stagnant = 0;
        let mut best_gap = f64::INFINITY;
        // Set when the mirror step stops making progress; the next
        // iteration then takes a Frank-Wolfe step instead, which can revive
        // entries the multiplicative update has driven to the floor.
        let mut use_fw = false;

        while iterations < settings.max_iters {
            let g = self.gradient(&a);
            let (live_gap, revival) = self.stationarity(&a, &g);
            gap = revival.as_ref().map_or(live_gap, |r| r.gap.max(live_gap));
            if gap <= settings.grad_tol {
                break;
            }
            iterations += 1;

            if let Some(rev) = revival.filter(|r| r.gap > live_gap) {
                if let Some((trial, ft)) = self.revival_step(&a, f, &rev)? {
                    a = trial;
                    f = ft;
                    stagnant = 0;
                    continue;
                }
            }
            if let Some((trial, ft)) = self.drop_step(&a, &g, f)? {
                a = trial;
                f = ft;
                stagnant = 0;
                continue;
            }

            // The multiplicative update cannot lift an entry off the floor
            // in reasonable time, so blocks whose best live message sits
            // there get a Frank-Wolfe move of their own.
            let gaps = self.block_gaps_with(&a, &g, &self.live_messages(&a));
            let floored = |b: usize, v: usize| a[v] < RESEED_MASS && gaps[b] > settings.grad_tol;
            if (0..self.blocks()).any(|b| self.q[b] > 0.0 && floored(b, self.live_argmin(&g, b, &self.live_messages(&a)))) {
                if let Some((trial, ft)) = self.frank_wolfe_step(&a, &g, f, floored)? {
                    a = trial;
                    f = ft;
                    stagnant = 0;
                    continue;
                }
            }

            if use_fw {
                use_fw = false;
                match self.frank_wolfe_step(&a, &g, f, |_, _| true)? {
                    Some((trial, ft)) => {
                        a = trial;
                        f = ft;
                        stagnant = 0;
                        continue;
                    }
                    None => break,
                }
            }

            // Rounding floor on objective comparisons.
            let noise = 8.0 * f64::EPSILON * (f.abs() + 1.0);
            let mut accepted = None;
            while step >= MIN_STEP {
                let trial = self.mirror_step(&a, &g, step);
                let predicted: f64 = g
                    .iter()
                    .zip(trial.iter().zip(&a))
                    .filter(|(gi, _)| gi.is_finite())
                    .map(|(gi, (t, o))| gi * (t - o))
                    .sum();
                let ft = self.value(&trial)?;
                if ft <= f + ARMIJO * predicted {
                    step = (step * 2.0).min(MAX_STEP);
                    accepted = Some((trial, ft));
                    break;
                }
                if ft <= f + noise {
                    // No measurable decrease left: keep moving on the
                    // first-order signal without growing the step.
                    let new_gap = {
                        let gt = self.gradient(&trial);
                        let (lg, rev) = self.stationarity(&trial, &gt);
                        rev.map_or(lg, |r| r.gap.max(lg))
                    };
                    if new_gap < gap {
                        accepted = Some((trial, ft.min(f)));
                        break;
                    }
                }
                step *= 0.5;
            }
            let Some((trial, ft)) = accepted else {
                use_fw = true;
                step = settings.step_init;
                continue;
            };
            let decrease = f - ft;
            a = trial;
            f = ft;
            // Stalled: negligible decrease and no new low in the gap.
            let stalled = decrease <= settings.obj_tol * f.abs().max(1.0) && gap >= best_gap;
            best_gap = best_gap.min(gap);
            if stalled {
                stagnant += 1;
                if stagnant >= STALL_ITERS {
                    use_fw = true;
                }
            } else {
                stagnant = 0;
            }
        }
        if gap > settings.grad_tol {
            let g = self.gradient(&a);
            let (lg, rev) = self.stationarity(&a, &g);
            gap = rev.map_or(lg, |r| r.gap.max(lg));
        }
        Ok(SenderSolution {
            a,
            iterations,
            converged: gap <= settings.grad_tol,
            gap,
        })
    }
}

/// `∂U/∂α` at an interior policy. The leakage term is differentiated through
/// its homogeneous extension (see [`GameInstance::sender_cost_extended`]),
/// so entry `(y,z,w)` equals
/// `c[y][z][w] + ρ·P{Z=z,W=w}·ln(P{Y=y,W=w} / (P{Y=y}·P{W=w}))`.
pub fn sender_cost_gradient(
    g: &GameInstance,
    alpha: &SenderPolicy,
    beta: &ReceiverPolicy,
) -> Result<Vec<f64>> {
    g.check_sender(alpha)?;
    if !alpha.is_interior() {
        return Err(Error::Precondition(
            "gradient requires a strictly positive sender policy".into(),
        ));
    }
    let c = g.distortion_coefficients(beta)?;
    let q = g.joint().pzw();
    let problem = SenderProblem {
        dims: g.sender_dims(),
        c: &c,
        q: &q,
        rho: g.rho(),
    };
    Ok(problem.gradient(alpha.as_slice()))
}

/// Minimizer of `U(·, β)` over the sender's feasible set.
pub fn sender_best_response(
    g: &GameInstance,
    beta: &ReceiverPolicy,
    settings: &SolverSettings,
) -> Result<BestResponseResult<SenderPolicy>> {
    let c = g.distortion_coefficients(beta)?;
    let q = g.joint().pzw();
    let problem = SenderProblem {
        dims: g.sender_dims(),
        c: &c,
        q: &q,
        rho: g.rho(),
    };
    let sol = problem.solve(settings)?;
    if !sol.converged {
        log::debug!(
            "sender best response stopped after {} iterations with gap {:.3e}",
            sol.iterations,
            sol.gap
        );
    }
    let policy = SenderPolicy::from_raw(g.sender_dims(), sol.a);
    let cost = g.sender_cost(&policy, beta)?;
    Ok(BestResponseResult {
        policy,
        cost,
        iterations: sol.iterations,
        converged: sol.converged,
        stationarity_gap: sol.gap,
    })
}

/// Upper bound on `U(α,β) − min_α' U(α',β)` from first-order gaps; `None`
/// when the bound is infinite (some unused message cell would reduce the
/// leakage at an unbounded rate).
pub fn sender_suboptimality_bound(
    g: &GameInstance,
    alpha: &SenderPolicy,
    beta: &ReceiverPolicy,
) -> Result<Option<f64>> {
    g.check_sender(alpha)?;
    let c = g.distortion_coefficients(beta)?;
    let q = g.joint().pzw();
    let problem = SenderProblem {
        dims: g.sender_dims(),
        c: &c,
        q: &q,
        rho: g.rho(),
    };
    let grad = problem.gradient(alpha.as_slice());
    let total = problem.gap_sum(alpha.as_slice(), &grad);
    Ok(total.is_finite().then_some(total))
}

/// A strategy pair together with how the sender side was obtained.
#[derive(Clone, Debug)]
pub struct Equilibrium {
    pub alpha: SenderPolicy,
    pub beta: ReceiverPolicy,
    pub iterations: usize,
    pub converged: bool,
    pub stationarity_gap: f64,
}

/// Uniform sender, receiver fixed at the prior-optimal estimate.
pub fn babbling_equilibrium(g: &GameInstance) -> Equilibrium {
    let [ny, nz, nw] = g.sender_dims();
    Equilibrium {
        alpha: SenderPolicy::uniform(ny, nz, nw),
        beta: ReceiverPolicy::constant(g.nx(), ny, prior_optimal_estimate(g)),
        iterations: 0,
        converged: true,
        stationarity_gap: 0.0,
    }
}

/// When `Y` shares `X`'s alphabet: identity receiver, sender best response to it.
pub fn explicit_equilibrium(g: &GameInstance, settings: &SolverSettings) -> Result<Equilibrium> {
    if g.ny() != g.nx() {
        return Err(Error::Precondition(format!(
            "explicit equilibrium needs |Y| = |X|, got {} and {}",
            g.ny(),
            g.nx()
        )));
    }
    let beta = ReceiverPolicy::identity(g.nx());
    let br = sender_best_response(g, &beta, settings)?;
    Ok(Equilibrium {
        alpha: br.policy,
        beta,
        iterations: br.iterations,
        converged: br.converged,
        stationarity_gap: br.stationarity_gap,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NashReport {
    pub member: bool,
    pub epsilon: f64,
    /// `U(α,β) − U(α_br,β)`, clamped at zero; exact up to the solver tolerance.
    pub sender_gap: f64,
    /// `V(α,β) − min_β' V(α,β')`, exact.
    pub receiver_gap: f64,
    /// First-order upper bound on the true sender gap, when finite.
    pub sender_gap_bound: Option<f64>,
    /// Stationarity gap reached by the sender best-response solve.
    pub solver_stationarity: f64,
    pub solver_converged: bool,
}

/// Checks whether `(α, β)` is an ε-Nash equilibrium.
pub fn epsilon_nash_check(
    g: &GameInstance,
    alpha: &SenderPolicy,
    beta: &ReceiverPolicy,
    epsilon: f64,
    settings: &SolverSettings,
) -> Result<NashReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be > 0, got {epsilon}")));
    }
    let v = g.receiver_cost(alpha, beta)?;
    let beta_br = receiver_best_response(g, alpha)?;
    let receiver_gap = (v - g.receiver_cost(alpha, &beta_br)?).max(0.0);

    let u = g.sender_cost(alpha, beta)?;
    let br = sender_best_response(g, beta, settings)?;
    let sender_gap = (u - br.cost).max(0.0);
    let sender_gap_bound = sender_suboptimality_bound(g, alpha, beta)?;

    Ok(NashReport {
        member: sender_gap <= epsilon && receiver_gap <= epsilon,
        epsilon,
        sender_gap,
        receiver_gap,
        sender_gap_bound,
        solver_stationarity: br.stationarity_gap,
        solver_converged: br.converged,
    })
}
