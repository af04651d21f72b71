//! Limited-memory BFGS minimizer with Armijo backtracking.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LbfgsSettings {
    pub memory: usize,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub relative_tolerance: f64,
    pub window: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GradientTolerance,
    RelativeChange,
    /// No step along the search direction lowers the objective any further.
    Stalled,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub(crate) struct LbfgsResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub initial_value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub termination: Termination,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minimizes `f`, which returns the value and writes the gradient into its
/// second argument. Every accepted step strictly lowers the value.
pub(crate) fn minimize<F>(mut f: F, x0: Vec<f64>, s: &LbfgsSettings) -> LbfgsResult
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0;
    let mut g = vec![0.0; n];
    let mut value = f(&x, &mut g);
    let initial_value = value;
    let mut evaluations = 1;
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(s.memory);
    let mut recent: VecDeque<f64> = VecDeque::with_capacity(s.window + 1);
    recent.push_back(value);

    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;

    while iterations < s.max_iterations {
        let gnorm = norm(&g);
        if gnorm < s.gradient_tolerance {
            termination = Termination::GradientTolerance;
            break;
        }

        // two-loop recursion
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(history.len());
        for (sk, yk, rho) in history.iter().rev() {
            let a = rho * dot(sk, &d);
            for (di, yi) in d.iter_mut().zip(yk) {
                *di -= a * yi;
            }
            alphas.push(a);
        }
        let gamma = match history.back() {
            Some((sk, yk, _)) => dot(sk, yk) / dot(yk, yk),
            None => 1.0 / gnorm,
        };
        for di in d.iter_mut() {
            *di *= gamma;
        }
        for ((sk, yk, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(yk, &d);
            for (di, si) in d.iter_mut().zip(sk) {
                *di += (a - b) * si;
            }
        }
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            history.clear();
            d = g.iter().map(|v| -v / gnorm).collect();
            slope = -gnorm;
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            for i in 0..n {
                x_new[i] = x[i] + step * d[i];
            }
            let v = f(&x_new, &mut g_new);
            evaluations += 1;
            if v.is_finite() && v <= value + 1e-4 * step * slope && v < value {
                accepted = Some(v);
                break;
            }
            step *= 0.5;
        }
        let Some(v_new) = accepted else {
            termination = Termination::Stalled;
            break;
        };
        iterations += 1;

        let sk: Vec<f64> = (0..n).map(|i| x_new[i] - x[i]).collect();
        let yk: Vec<f64> = (0..n).map(|i| g_new[i] - g[i]).collect();
        let sy = dot(&sk, &yk);
        if sy > 1e-16 * norm(&sk) * norm(&yk) && sy > 0.0 {
            if history.len() == s.memory {
                history.pop_front();
            }
            history.push_back((sk, yk, 1.0 / sy));
        }
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        value = v_new;

        recent.push_back(value);
        if recent.len() > s.window + 1 {
            recent.pop_front();
        }
        if recent.len() == s.window + 1 {
            let old = recent[0];
            if (old - value).abs() <= s.relative_tolerance * value.abs().max(f64::MIN_POSITIVE) {
                termination = Termination::RelativeChange;
                break;
            }
        }
    }

    LbfgsResult {
        gradient_norm: norm(&g),
        x,
        value,
        initial_value,
        iterations,
        evaluations,
        termination,
    }
}
