//! Alternating best-response dynamics.
//!
//! Iteration `k` moves the receiver when `k` is odd and the sender when `k`
//! is even, starting at `k = 1`. Two drivers are provided:
//!
//! * [`best_response_dynamics`] adopts every strictly improving best
//!   response and stops once the iterate is an ε-Nash equilibrium.
//! * [`thresholded_dynamics`] adopts a best response only when it improves
//!   the mover's cost by more than ε, which bounds the run length by
//!   `⌈3 + Ψ(α⁰,β⁰)/ε⌉` iterations.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::game::{GameInstance, ReceiverPolicy, SenderPolicy};
use crate::solver::{self, SolverSettings};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mover {
    None,
    Receiver,
    Sender,
    /// 1-based sender index in the multi-sender game.
    SenderJ(usize),
}

impl fmt::Display for Mover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mover::None => f.write_str("none"),
            Mover::Receiver => f.write_str("receiver"),
            Mover::Sender => f.write_str("sender"),
            Mover::SenderJ(j) => write!(f, "sender_{j}"),
        }
    }
}

impl Serialize for Mover {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One row of a dynamics trajectory, in CSV column order.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryRecord {
    pub k: usize,
    pub mover: Mover,
    pub potential: f64,
    /// Single sender: `U`, equal to the potential. Multi-sender: the
    /// largest per-sender cost `max_j U_j`.
    pub sender_cost: f64,
    pub receiver_cost: f64,
    /// Whether the mover's best response was adopted on this step.
    pub accepted: bool,
}

#[derive(Clone, Debug)]
pub struct DynamicsReport<A, B> {
    pub trajectory: Vec<TrajectoryRecord>,
    pub final_alpha: A,
    pub final_beta: B,
    pub epsilon: f64,
    pub reached_eps_nash: bool,
    pub iterations_used: usize,
    pub iteration_bound: Option<usize>,
}

impl<A, B> DynamicsReport<A, B> {
    /// Number of steps whose best response was adopted.
    pub fn accepted_moves(&self) -> usize {
        self.trajectory.iter().filter(|r| r.accepted).count()
    }
}

pub type SingleReport = DynamicsReport<SenderPolicy, ReceiverPolicy>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsSettings {
    pub epsilon: f64,
    pub max_rounds: usize,
}

impl Default for DynamicsSettings {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            max_rounds: 1000,
        }
    }
}

/// Uniform sender; identity receiver when `|Y| = |X|`, otherwise the
/// prior-optimal constant receiver.
pub fn default_initial_pair(g: &GameInstance) -> (SenderPolicy, ReceiverPolicy) {
    let [ny, nz, nw] = g.sender_dims();
    let beta = if ny == g.nx() {
        ReceiverPolicy::identity(ny)
    } else {
        ReceiverPolicy::constant(g.nx(), ny, solver::prior_optimal_estimate(g))
    };
    (SenderPolicy::uniform(ny, nz, nw), beta)
}

/// Inner solves must be accurate to a tenth of ε so that an inexact best
/// response cannot hide an ε-improvement.
pub(crate) fn check_precision(epsilon: f64, settings: &SolverSettings) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be > 0, got {epsilon}")));
    }
    settings.validate()?;
    if settings.grad_tol > epsilon / 10.0 {
        return Err(Error::InvalidArgument(format!(
            "grad_tol {} must be at most epsilon/10 = {}",
            settings.grad_tol,
            epsilon / 10.0
        )));
    }
    Ok(())
}

fn record(
    g: &GameInstance,
    k: usize,
    mover: Mover,
    alpha: &SenderPolicy,
    beta: &ReceiverPolicy,
    accepted: bool,
) -> Result<TrajectoryRecord> {
    let xi = g.expected_distortion(alpha, beta)?;
    let u = xi + g.rho() * g.leakage(alpha)?;
    Ok(TrajectoryRecord {
        k,
        mover,
        potential: u,
        sender_cost: u,
        receiver_cost: xi,
        accepted,
    })
}

/// Outcome of one best-response step: the candidate and the mover's gain.
struct Step {
    alpha: Option<SenderPolicy>,
    beta: Option<ReceiverPolicy>,
    gain: f64,
}

fn step(
    g: &GameInstance,
    k: usize,
    alpha: &SenderPolicy,
    beta: &ReceiverPolicy,
    settings: &SolverSettings,
) -> Result<(Mover, Step)> {
    if k % 2 == 1 {
        let candidate = solver::receiver_best_response(g, alpha)?;
        let gain = g.receiver_cost(alpha, beta)? - g.receiver_cost(alpha, &candidate)?;
        Ok((
            Mover::Receiver,
            Step {
                alpha: None,
                beta: Some(candidate),
                gain,
            },
        ))
    } else {
        let br = solver::sender_best_response(g, beta, settings)?;
        let gain = g.sender_cost(alpha, beta)? - br.cost;
        Ok((
            Mover::Sender,
            Step {
                alpha: Some(br.policy),
                beta: None,
                gain,
            },
        ))
    }
}

/// Plain alternating best responses. A computed best response replaces the
/// mover's policy whenever it strictly lowers the mover's cost. The run
/// ends at the first iterate that passes [`solver::epsilon_nash_check`], or
/// after `max_rounds` iterations.
pub fn best_response_dynamics(
    g: &GameInstance,
    alpha0: &SenderPolicy,
    beta0: &ReceiverPolicy,
    epsilon: f64,
    settings: &SolverSettings,
    max_rounds: usize,
) -> Result<SingleReport> {
    check_precision(epsilon, settings)?;
    g.check_sender(alpha0)?;
    g.check_receiver(beta0)?;
    let mut alpha = alpha0.clone();
    let mut beta = beta0.clone();
    let mut trajectory = vec![record(g, 0, Mover::None, &alpha, &beta, false)?];
    let mut reached = solver::epsilon_nash_check(g, &alpha, &beta, epsilon, settings)?.member;
    let mut k = 0;
    while !reached && k < max_rounds {
        k += 1;
        let (mover, s) = step(g, k, &alpha, &beta, settings)?;
        let accepted = s.gain > 0.0;
        if accepted {
            if let Some(a) = s.alpha {
                alpha = a;
            }
            if let Some(b) = s.beta {
                beta = b;
            }
        }
        trajectory.push(record(g, k, mover, &alpha, &beta, accepted)?);
        reached = solver::epsilon_nash_check(g, &alpha, &beta, epsilon, settings)?.member;
    }
    Ok(DynamicsReport {
        trajectory,
        final_alpha: alpha,
        final_beta: beta,
        epsilon,
        reached_eps_nash: reached,
        iterations_used: k,
        iteration_bound: None,
    })
}

/// `⌈3 + Ψ(α⁰,β⁰)/ε⌉`.
pub fn iteration_bound(psi0: f64, epsilon: f64) -> usize {
    (3.0 + psi0 / epsilon).ceil() as usize
}

/// Best responses adopted only when they gain more than ε. The run stops
/// once two consecutive iterations adopt nothing; at that point neither
/// player can gain more than ε, so the pair is ε-Nash. Running past the
/// iteration bound is reported as [`Error::BoundExceeded`].
pub fn thresholded_dynamics(
    g: &GameInstance,
    alpha0: &SenderPolicy,
    beta0: &ReceiverPolicy,
    epsilon: f64,
    settings: &SolverSettings,
) -> Result<SingleReport> {
    check_precision(epsilon, settings)?;
    g.check_sender(alpha0)?;
    g.check_receiver(beta0)?;
    let mut alpha = alpha0.clone();
    let mut beta = beta0.clone();
    let first = record(g, 0, Mover::None, &alpha, &beta, false)?;
    let bound = iteration_bound(first.potential, epsilon);
    let mut trajectory = vec![first];
    let mut frozen_run = 0;
    let mut k = 0;
    while frozen_run < 2 {
        k += 1;
        if k > bound {
            return Err(Error::BoundExceeded {
                bound,
                iterations: k - 1,
            });
        }
        let (mover, s) = step(g, k, &alpha, &beta, settings)?;
        let accepted = s.gain > epsilon;
        if accepted {
            frozen_run = 0;
            if let Some(a) = s.alpha {
                alpha = a;
            }
            if let Some(b) = s.beta {
                beta = b;
            }
        } else {
            frozen_run += 1;
        }
        trajectory.push(record(g, k, mover, &alpha, &beta, accepted)?);
    }
    Ok(DynamicsReport {
        trajectory,
        final_alpha: alpha,
        final_beta: beta,
        epsilon,
        reached_eps_nash: true,
        iterations_used: k,
        iteration_bound: Some(bound),
    })
}
