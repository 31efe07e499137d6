//! Arc-length quadrature over reduced-boundary curves.

use crate::geometry::{BoundaryCurve, Piece, Point};
use crate::quad::gk::{adaptive, max_abs, Tol};
use crate::quad::limit::{LimitStatus, LimitTracker, ScaleSchedule};
use crate::scalar::{lit, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveEstimate<T, const N: usize> {
    pub value: [T; N],
    pub error: T,
    pub status: LimitStatus,
}

/// Integral of `f(point, outward normal)` over one piece, restricted to arc lengths `[s0, s1]`.
pub fn integrate_piece<T: Scalar, const N: usize, F: Fn(Point<T>, Point<T>) -> [T; N]>(
    f: &F,
    piece: &Piece<T>,
    s0: T,
    s1: T,
    tol: Tol<T>,
) -> ([T; N], T) {
    let mut g = |s: T| f(piece.point_at(s), piece.normal_at(s));
    let e = adaptive(&mut g, s0, s1, tol, 400);
    (e.value, e.error)
}

/// Integral over `[a, b]` where the integrand may blow up at `a`: dyadic truncations
/// `[a + L 2^-j, b]` are fed to the limit detector.
fn toward_endpoint<T: Scalar, const N: usize, G: FnMut(T) -> [T; N]>(
    g: &mut G,
    a: T,
    b: T,
    tol: Tol<T>,
    reversed: bool,
) -> CurveEstimate<T, N> {
    let len = b - a;
    let sched = ScaleSchedule { initial: len, ratio: lit(0.5), steps: 60, tol: tol.abs, cap: lit(1e12) };
    let mut trs: Vec<LimitTracker<T>> = (0..N).map(|_| LimitTracker::new(sched)).collect();
    let mut sum = [T::zero(); N];
    let mut err = T::zero();
    for j in 0..60 {
        let hi = len * lit::<T>(0.5).powi(j);
        let lo = hi * lit(0.5);
        let (p0, p1) = if reversed { (b - hi, b - lo) } else { (a + lo, a + hi) };
        let e = adaptive(g, p0, p1, Tol::new(tol.abs * lit(0.1), tol.rel), 200);
        err += e.error;
        for i in 0..N {
            sum[i] += e.value[i];
        }
        let target = tol.target(max_abs(&sum));
        let mut done = true;
        for (i, t) in trs.iter_mut().enumerate() {
            if t.result().is_none() {
                t.set_tol(target);
                t.push(lo, sum[i]);
            }
            done &= t.result().is_some();
        }
        if done {
            break;
        }
    }
    let mut value = [T::zero(); N];
    let mut status = LimitStatus::Converged;
    for (i, t) in trs.iter_mut().enumerate() {
        let r = t.finish();
        value[i] = r.value;
        err += r.error_bound;
        if r.status != LimitStatus::Converged {
            status = r.status;
        }
    }
    CurveEstimate { value, error: err, status }
}

/// Integral of `f(point, outward normal)` over the curve with respect to arc length.
///
/// Points in `singular` that lie on the curve split the pieces there and are approached
/// dyadically; a non-integrable blow-up yields status `Diverging`.
pub fn integrate_curve<T: Scalar, const N: usize, F: Fn(Point<T>, Point<T>) -> [T; N]>(
    f: &F,
    c: &BoundaryCurve<T>,
    tol: Tol<T>,
    singular: &[Point<T>],
) -> CurveEstimate<T, N> {
    let mut value = [T::zero(); N];
    let mut error = T::zero();
    let mut status = LimitStatus::Converged;
    let total_len = c.length().max(T::min_positive_value());
    for piece in &c.pieces {
        let len = piece.length();
        let on_tol = len * lit(1e-12);
        let mut cuts: Vec<T> = singular
            .iter()
            .filter_map(|p| {
                let (q, s) = piece.nearest(*p);
                (q.dist(*p) <= on_tol).then_some(s)
            })
            .collect();
        cuts.push(T::zero());
        cuts.push(len);
        crate::geometry::region::sort_dedup(&mut cuts, on_tol);
        let sing: Vec<T> = cuts
            .iter()
            .copied()
            .filter(|s| singular.iter().any(|p| piece.point_at(*s).dist(*p) <= on_tol.max(lit(1e-14))))
            .collect();
        let is_sing = |s: T| sing.iter().any(|t| (*t - s).abs() <= on_tol);
        let ptol = Tol::new(tol.abs * len / total_len, tol.rel);
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mut g = |s: T| f(piece.point_at(s), piece.normal_at(s));
            let est = match (is_sing(a), is_sing(b)) {
                (false, false) => {
                    let e = adaptive(&mut g, a, b, ptol, 400);
                    CurveEstimate { value: e.value, error: e.error, status: LimitStatus::Converged }
                }
                (true, false) => toward_endpoint(&mut g, a, b, ptol, false),
                (false, true) => toward_endpoint(&mut g, a, b, ptol, true),
                (true, true) => {
                    let m = (a + b) * lit(0.5);
                    let l = toward_endpoint(&mut g, a, m, ptol, false);
                    let r = toward_endpoint(&mut g, m, b, ptol, true);
                    let mut v = l.value;
                    for i in 0..N {
                        v[i] += r.value[i];
                    }
                    let st = if l.status != LimitStatus::Converged { l.status } else { r.status };
                    CurveEstimate { value: v, error: l.error + r.error, status: st }
                }
            };
            for i in 0..N {
                value[i] += est.value[i];
            }
            error += est.error;
            if est.status != LimitStatus::Converged && status != LimitStatus::Diverging {
                status = est.status;
            }
        }
    }
    CurveEstimate { value, error, status }
}
