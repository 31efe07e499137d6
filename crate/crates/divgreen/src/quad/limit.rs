//! Limit detection for scale-indexed sequences (delta -> 0 or k -> infinity).

use serde::{Deserialize, Serialize};

use crate::scalar::{lit, Scalar};

/// Geometric scale sequence `initial * ratio^i`, `i < steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleSchedule<T> {
    pub initial: T,
    pub ratio: T,
    pub steps: usize,
    pub tol: T,
    pub cap: T,
}

impl<T: Scalar> Default for ScaleSchedule<T> {
    fn default() -> Self {
        ScaleSchedule { initial: lit(0.5), ratio: lit(0.5), steps: 24, tol: lit(1e-6), cap: lit(1e9) }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScheduleError {
    #[error("schedule ratio must lie strictly between 0 and 1")]
    Ratio,
    #[error("schedule needs at least 3 steps")]
    Steps,
    #[error("schedule tolerance and initial scale must be positive")]
    Positive,
}

impl<T: Scalar> ScaleSchedule<T> {
    pub fn validate(&self) -> Result<(), ScheduleError> {
        if !(self.ratio > T::zero() && self.ratio < T::one()) {
            return Err(ScheduleError::Ratio);
        }
        if self.steps < 3 {
            return Err(ScheduleError::Steps);
        }
        if !(self.tol > T::zero() && self.initial > T::zero() && self.cap > T::zero()) {
            return Err(ScheduleError::Positive);
        }
        Ok(())
    }

    pub fn scale(&self, i: usize) -> T {
        self.initial * self.ratio.powi(i as i32)
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_initial(mut self, initial: T) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitStatus {
    Converged,
    Diverging,
    NoLimit,
    BudgetExhausted,
}

impl LimitStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            LimitStatus::Converged => "converged",
            LimitStatus::Diverging => "diverging",
            LimitStatus::NoLimit => "no-limit",
            LimitStatus::BudgetExhausted => "budget-exhausted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitResult<T> {
    pub value: T,
    pub error_bound: T,
    pub status: LimitStatus,
    /// (scale, partial value) pairs in evaluation order.
    pub trace: Vec<(T, T)>,
}

impl<T: Scalar> LimitResult<T> {
    pub fn converged(&self) -> bool {
        self.status == LimitStatus::Converged
    }

    /// A result known exactly without evaluating any sequence.
    pub fn exact(value: T) -> Self {
        LimitResult { value, error_bound: T::zero(), status: LimitStatus::Converged, trace: vec![] }
    }
}

/// Incremental limit detector.
///
/// Converged: two consecutive differences below tolerance, either of the raw values or of
/// their Aitken extrapolants. Diverging: beyond the cap, or the last five differences share
/// a sign, exceed tolerance and do not decay (successive ratio >= 0.95, the slope test that
/// catches logarithmic growth; growing ratios are only trusted at the end of the budget). At the end of the budget, a spread above tolerance over
/// the last five non-monotone values means no limit.
#[derive(Clone, Debug)]
pub struct LimitTracker<T> {
    sched: ScaleSchedule<T>,
    trace: Vec<(T, T)>,
    aitken: Vec<Option<T>>,
    done: Option<LimitResult<T>>,
}

impl<T: Scalar> LimitTracker<T> {
    pub fn new(sched: ScaleSchedule<T>) -> Self {
        LimitTracker { sched, trace: Vec::new(), aitken: Vec::new(), done: None }
    }

    pub fn set_tol(&mut self, tol: T) {
        self.sched.tol = tol;
    }

    pub fn result(&self) -> Option<&LimitResult<T>> {
        self.done.as_ref()
    }

    fn diff(&self, i: usize) -> T {
        self.trace[i].1 - self.trace[i - 1].1
    }

    fn finish_with(&mut self, value: T, error_bound: T, status: LimitStatus) -> Option<LimitResult<T>> {
        let r = LimitResult { value, error_bound, status, trace: self.trace.clone() };
        self.done = Some(r.clone());
        Some(r)
    }

    /// Feeds the next partial value; returns the verdict once one is reached.
    pub fn push(&mut self, scale: T, value: T) -> Option<LimitResult<T>> {
        if let Some(r) = &self.done {
            return Some(r.clone());
        }
        self.trace.push((scale, value));
        let i = self.trace.len() - 1;
        let tol = self.sched.tol;
        if !value.is_finite() || value.abs() > self.sched.cap {
            return self.finish_with(value, T::infinity(), LimitStatus::Diverging);
        }
        // Aitken extrapolant of the current value.
        let a = if i >= 2 {
            let d1 = self.diff(i);
            let d0 = self.diff(i - 1);
            let den = d1 - d0;
            let q = if d0 != T::zero() { d1 / d0 } else { T::zero() };
            if den.abs() > T::epsilon() * value.abs().max(T::one()) && q.abs() < lit(0.95) {
                Some(value - d1 * d1 / den)
            } else if d1 == T::zero() && d0 == T::zero() {
                Some(value)
            } else {
                None
            }
        } else {
            None
        };
        self.aitken.push(a);
        if i >= 2 {
            let (d1, d0) = (self.diff(i).abs(), self.diff(i - 1).abs());
            if d1 <= tol && d0 <= tol {
                return self.finish_with(value, d1, LimitStatus::Converged);
            }
        }
        // Early verdict only for steady (logarithm-like) growth; faster growth may be a
        // transient and is judged at the end of the budget.
        if i >= 5 && self.slope_diverging(lit(1.25)) {
            return self.finish_with(value, T::infinity(), LimitStatus::Diverging);
        }
        if i >= 4 {
            if let (Some(a2), Some(a1), Some(a0)) = (self.aitken[i], self.aitken[i - 1], self.aitken[i - 2]) {
                let e1 = (a2 - a1).abs();
                let e0 = (a1 - a0).abs();
                if e1 <= tol && e0 <= tol {
                    return self.finish_with(a2, e1.max(e0), LimitStatus::Converged);
                }
            }
        }
        None
    }

    /// Last five differences share a sign, exceed tolerance, and successive ratios lie in
    /// `[0.95, max_ratio]`.
    fn slope_diverging(&self, max_ratio: T) -> bool {
        let n = self.trace.len();
        if n < 6 {
            return false;
        }
        let tol = self.sched.tol;
        let ds: Vec<T> = (n - 5..n).map(|j| self.diff(j)).collect();
        let same_sign = ds.iter().all(|d| *d > tol) || ds.iter().all(|d| *d < -tol);
        same_sign && ds.windows(2).all(|w| w[1] / w[0] >= lit(0.95) && w[1] / w[0] <= max_ratio)
    }

    /// Verdict at the end of the budget.
    pub fn finish(&mut self) -> LimitResult<T> {
        if let Some(r) = &self.done {
            return r.clone();
        }
        let n = self.trace.len();
        if self.slope_diverging(T::infinity()) {
            let v = self.trace[n - 1].1;
            return self.finish_with(v, T::infinity(), LimitStatus::Diverging).unwrap();
        }
        if n < 2 {
            let v = self.trace.last().map(|t| t.1).unwrap_or(T::zero());
            return self.finish_with(v, T::infinity(), LimitStatus::BudgetExhausted).unwrap();
        }
        let last = self.trace[n - 1].1;
        let err = self.diff(n - 1).abs();
        let k = n.min(5);
        let window: Vec<T> = self.trace[n - k..].iter().map(|t| t.1).collect();
        let ds: Vec<T> = window.windows(2).map(|w| w[1] - w[0]).collect();
        let monotone = ds.iter().all(|d| *d >= T::zero()) || ds.iter().all(|d| *d <= T::zero());
        let (lo, hi) = window.iter().fold((T::infinity(), T::neg_infinity()), |(l, h), v| (l.min(*v), h.max(*v)));
        let status = if !monotone && hi - lo > self.sched.tol { LimitStatus::NoLimit } else { LimitStatus::BudgetExhausted };
        self.finish_with(last, err, status).unwrap()
    }
}

/// Evaluates `seq` along the schedule until a verdict is reached.
pub fn limit_extrapolate<T: Scalar, F: FnMut(T) -> T>(mut seq: F, s: &ScaleSchedule<T>) -> LimitResult<T> {
    let mut tr = LimitTracker::new(*s);
    for i in 0..s.steps {
        let h = s.scale(i);
        if let Some(r) = tr.push(h, seq(h)) {
            return r;
        }
    }
    tr.finish()
}

/// Fallible variant: an evaluation error aborts the sequence.
pub fn try_limit_extrapolate<T: Scalar, E, F: FnMut(T) -> Result<T, E>>(
    mut seq: F,
    s: &ScaleSchedule<T>,
) -> Result<LimitResult<T>, E> {
    let mut tr = LimitTracker::new(*s);
    for i in 0..s.steps {
        let h = s.scale(i);
        if let Some(r) = tr.push(h, seq(h)?) {
            return Ok(r);
        }
    }
    Ok(tr.finish())
}

/// Componentwise limits of a vector sequence sharing the same evaluations.
pub fn try_limit_extrapolate_vec<T: Scalar, E, F: FnMut(T) -> Result<Vec<T>, E>>(
    mut seq: F,
    s: &ScaleSchedule<T>,
    dim: usize,
) -> Result<Vec<LimitResult<T>>, E> {
    let mut trs: Vec<LimitTracker<T>> = (0..dim).map(|_| LimitTracker::new(*s)).collect();
    for i in 0..s.steps {
        if trs.iter().all(|t| t.result().is_some()) {
            break;
        }
        let h = s.scale(i);
        let v = seq(h)?;
        for (t, x) in trs.iter_mut().zip(v) {
            t.push(h, x);
        }
    }
    Ok(trs.iter_mut().map(|t| t.finish()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_sequence_converges_to_zero() {
        let r = limit_extrapolate(|d: f64| d, &ScaleSchedule::default());
        assert_eq!(r.status, LimitStatus::Converged);
        assert!(r.value.abs() <= 1e-6);
        assert!(r.error_bound <= 1e-6);
    }

    #[test]
    fn log_growth_diverges() {
        let r = limit_extrapolate(|d: f64| 0.5 * ((1.0 / d).powi(2) + 1.0).ln(), &ScaleSchedule::default());
        assert_eq!(r.status, LimitStatus::Diverging);
    }

    #[test]
    fn bounded_oscillation_has_no_limit() {
        let r = limit_extrapolate(|d: f64| (1.0 / d).sin(), &ScaleSchedule::default());
        assert_eq!(r.status, LimitStatus::NoLimit);
    }
}
