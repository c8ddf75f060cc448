//! Fixed-step RK4 for hybrid systems with sample-resolution guard checks.

use super::SimError;

/// Continuous dynamics per discrete mode, plus the mode-switching logic.
pub trait HybridDynamics {
    fn state_dim(&self) -> usize;

    /// Mode at the start of a run.
    fn initial_mode(&self, x0: &[f64]) -> usize;

    /// Writes `dx/dt` for `mode` at `(t, x)` into `dx`.
    fn derivative(&self, mode: usize, t: f64, x: &[f64], dx: &mut [f64]);

    /// Mode after a completed step landing at `(t, x)`.
    fn next_mode(&self, mode: usize, t: f64, x: &[f64]) -> usize;
}

/// States and modes recorded at every step of an integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub modes: Vec<usize>,
}

impl Trajectory {
    /// Column `k` of the state over time.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[k]).collect()
    }
}

/// Number of samples over `[t0, t0 + horizon]` at step `h`.
pub fn sample_count(horizon: f64, h: f64) -> usize {
    (horizon / h + 1e-9).floor() as usize + 1
}

/// Integrates from `x0` at `t0` for `horizon` time units with step `h`.
/// Sample `i` is at `t0 + i·h`. After each step the guard is checked and
/// the mode may change before the next step.
pub fn integrate_rk4<D: HybridDynamics + ?Sized>(
    dynamics: &D,
    x0: &[f64],
    t0: f64,
    horizon: f64,
    h: f64,
) -> Result<Trajectory, SimError> {
    if !(h > 0.0 && h.is_finite()) || !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(SimError::InvalidStep { h, horizon });
    }
    let dim = dynamics.state_dim();
    if x0.len() != dim {
        return Err(SimError::DimensionMismatch {
            what: "initial state",
            expected: dim,
            got: x0.len(),
        });
    }
    let n = sample_count(horizon, h);
    let mut times = Vec::with_capacity(n);
    let mut states = Vec::with_capacity(n);
    let mut modes = Vec::with_capacity(n);

    let mut x = x0.to_vec();
    let mut mode = dynamics.initial_mode(x0);
    let (mut k1, mut k2, mut k3, mut k4) = (
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
    );
    let mut tmp = vec![0.0; dim];

    times.push(t0);
    states.push(x.clone());
    modes.push(mode);
    for i in 1..n {
        let t = t0 + (i - 1) as f64 * h;
        dynamics.derivative(mode, t, &x, &mut k1);
        for d in 0..dim {
            tmp[d] = x[d] + 0.5 * h * k1[d];
        }
        dynamics.derivative(mode, t + 0.5 * h, &tmp, &mut k2);
        for d in 0..dim {
            tmp[d] = x[d] + 0.5 * h * k2[d];
        }
        dynamics.derivative(mode, t + 0.5 * h, &tmp, &mut k3);
        for d in 0..dim {
            tmp[d] = x[d] + h * k3[d];
        }
        dynamics.derivative(mode, t + h, &tmp, &mut k4);
        for d in 0..dim {
            x[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        }
        let t_next = t0 + i as f64 * h;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NonFinite { time: t_next });
        }
        mode = dynamics.next_mode(mode, t_next, &x);
        times.push(t_next);
        states.push(x.clone());
        modes.push(mode);
    }
    Ok(Trajectory {
        times,
        states,
        modes,
    })
}
