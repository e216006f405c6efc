//! Extremal switching trajectories.
//!
//! Repeatedly applying the dominant member of the current state yields a
//! sequence whose final state dominates (or is dominated by) the final
//! state of every other switching sequence of the same length. Hence it
//! maximizes (minimizes) every coordinate-wise monotone objective at once,
//! using one scan of the set per step instead of `K^n` evaluations. The
//! construction never looks at an objective; objectives are evaluated on the
//! finished trajectory.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hourglass::{check_positive, dominant};
use crate::matset::{MatrixSet, MemberId, DEFAULT_LIMIT};
use crate::spectral::rho_extrema;
use crate::Direction;

/// Coordinate-wise monotone functions on the non-negative orthant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonotoneObjective {
    L1,
    L2,
    Linf,
    /// `sum_i w_i x_i` with `w_i > 0`.
    Weighted(Vec<f64>),
}

impl MonotoneObjective {
    pub const NORMS: [MonotoneObjective; 3] = [Self::L1, Self::L2, Self::Linf];

    /// Strictly increasing in every coordinate. `Linf` is monotone but not
    /// strictly so.
    pub fn is_strict(&self) -> bool {
        !matches!(self, MonotoneObjective::Linf)
    }

    pub fn name(&self) -> String {
        match self {
            MonotoneObjective::L1 => "l1".into(),
            MonotoneObjective::L2 => "l2".into(),
            MonotoneObjective::Linf => "linf".into(),
            MonotoneObjective::Weighted(w) => format!(
                "weighted:{}",
                w.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
            ),
        }
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            MonotoneObjective::L1 => x.iter().sum(),
            MonotoneObjective::L2 => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            MonotoneObjective::Linf => x.iter().copied().fold(0.0, f64::max),
            MonotoneObjective::Weighted(w) => w.iter().zip(x).map(|(a, b)| a * b).sum(),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if let MonotoneObjective::Weighted(w) = self {
            if w.len() != dim {
                return Err(Error::InvalidObjective(format!(
                    "{} weights for a {dim}-dimensional state",
                    w.len()
                )));
            }
            if let Some(v) = w.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                return Err(Error::InvalidObjective(format!("weight {v} is not positive")));
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for MonotoneObjective {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "l1" | "1" => Ok(Self::L1),
            "l2" | "2" => Ok(Self::L2),
            "linf" | "inf" => Ok(Self::Linf),
            _ => match lower.strip_prefix("weighted:") {
                Some(rest) => rest
                    .split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad weight `{t}`: {e}")))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map(Self::Weighted),
                None => Err(format!("unknown objective `{s}` (expected l1, l2, linf or weighted:w1,w2,...)")),
            },
        }
    }
}

/// Evaluates `obj` at a non-negative vector.
pub fn nu_eval(obj: &MonotoneObjective, x: &[f64]) -> Result<f64> {
    if let Some(index) = x.iter().position(|v| !(*v >= 0.0)) {
        return Err(Error::NegativeInput { index, value: x[index] });
    }
    obj.validate(x.len())?;
    Ok(obj.eval_unchecked(x))
}

#[derive(Debug, Clone, Default)]
pub struct TrajectoryOptions {
    /// Rescale each state to unit L1 norm and keep the scale in
    /// `log_scale`. Member choices are unaffected.
    pub renormalize: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObjectiveTrace {
    pub objective: String,
    /// Objective of the true (unnormalized) state at every step.
    pub values: Vec<f64>,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryResult {
    pub direction: Direction,
    pub steps: usize,
    /// `chosen[k]` is applied to `states[k]` to give `states[k + 1]`.
    pub chosen: Vec<MemberId>,
    pub states: Vec<Vec<f64>>,
    /// Natural log of the factor removed from each stored state.
    pub log_scale: Vec<f64>,
    /// Dominant-member scans performed; always equals `steps`.
    pub selection_passes: usize,
    pub objectives: Vec<ObjectiveTrace>,
}

impl TrajectoryResult {
    /// Evaluates an objective along the finished trajectory and records it.
    pub fn evaluate(&mut self, obj: &MonotoneObjective) -> Result<&ObjectiveTrace> {
        obj.validate(self.states[0].len())?;
        let values = self
            .states
            .iter()
            .zip(&self.log_scale)
            .map(|(x, s)| obj.eval_unchecked(x) * s.exp())
            .collect::<Vec<_>>();
        self.objectives.push(ObjectiveTrace {
            objective: obj.name(),
            evaluations: values.len(),
            values,
        });
        Ok(self.objectives.last().expect("just pushed"))
    }

    /// Final state with the removed scale restored.
    pub fn final_state(&self) -> Vec<f64> {
        let scale = self.log_scale[self.steps].exp();
        self.states[self.steps].iter().map(|v| v * scale).collect()
    }

    /// True states `x_0 .. x_n`.
    pub fn true_states(&self) -> Vec<Vec<f64>> {
        self.states
            .iter()
            .zip(&self.log_scale)
            .map(|(x, s)| x.iter().map(|v| v * s.exp()).collect())
            .collect()
    }
}

pub fn greedy_trajectory(
    set: &MatrixSet,
    x0: &[f64],
    steps: usize,
    direction: Direction,
) -> Result<TrajectoryResult> {
    greedy_trajectory_with(set, x0, steps, direction, &TrajectoryOptions::default())
}

/// Builds `x_{k+1} = A_{k+1} x_k` where `A_{k+1}` is the dominant maximizer
/// (minimizer) for `x_k`.
pub fn greedy_trajectory_with(
    set: &MatrixSet,
    x0: &[f64],
    steps: usize,
    direction: Direction,
    opts: &TrajectoryOptions,
) -> Result<TrajectoryResult> {
    if !set.is_square() {
        let (rows, cols) = set.dims();
        return Err(Error::NotSquare { rows, cols });
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("trajectory needs at least one step".into()));
    }
    check_positive(x0)?;
    let mut states = Vec::with_capacity(steps + 1);
    let mut log_scale = Vec::with_capacity(steps + 1);
    let mut chosen = Vec::with_capacity(steps);
    states.push(x0.to_vec());
    log_scale.push(0.0);
    for k in 0..steps {
        let cert = dominant(set, &states[k], direction).map_err(|e| match e {
            Error::NoDominantMatrix { x, candidate, offender, .. } => Error::NoDominantMatrix {
                x,
                candidate,
                offender,
                step: Some(k),
            },
            other => other,
        })?;
        let mut next = cert.image;
        let mut scale = log_scale[k];
        if opts.renormalize {
            let norm: f64 = next.iter().sum();
            if norm > 0.0 {
                next.iter_mut().for_each(|v| *v /= norm);
                scale += norm.ln();
            }
        }
        if next.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "state left the positive orthant at step {}: {next:?}",
                k + 1
            )));
        }
        chosen.push(cert.member);
        states.push(next);
        log_scale.push(scale);
    }
    Ok(TrajectoryResult {
        direction,
        steps,
        chosen,
        states,
        log_scale,
        selection_passes: steps,
        objectives: Vec::new(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilizationReport {
    pub trajectory: TrajectoryResult,
    /// `(|x_n|_1 / |x_0|_1)^(1/n)`.
    pub decay_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stabilizable: Option<bool>,
}

/// Fastest-decaying trajectory from `x0`, with its empirical L1 decay rate
/// next to the smallest member spectral radius when that is computable.
pub fn stabilizing_sequence(set: &MatrixSet, x0: &[f64], steps: usize) -> Result<StabilizationReport> {
    let mut trajectory = greedy_trajectory_with(
        set,
        x0,
        steps,
        Direction::Min,
        &TrajectoryOptions { renormalize: true },
    )?;
    let l1 = trajectory.evaluate(&MonotoneObjective::L1)?;
    // decay from log-scale to stay finite for long horizons
    let first = l1.values[0].ln();
    let last = trajectory.states[steps].iter().sum::<f64>().ln() + trajectory.log_scale[steps];
    let decay_rate = ((last - first) / steps as f64).exp();
    let rho_min = match set.kind() {
        crate::matset::SetKind::Iru(_) if !set.cardinality().within(DEFAULT_LIMIT) => {
            crate::spectral::iru_greedy_extremum(set, Direction::Min).ok().map(|g| g.value)
        }
        _ => rho_extrema(set, DEFAULT_LIMIT).ok().map(|e| e.rho_min),
    };
    Ok(StabilizationReport {
        trajectory,
        decay_rate,
        stabilizable: rho_min.map(|r| r < 1.0),
        rho_min,
    })
}
