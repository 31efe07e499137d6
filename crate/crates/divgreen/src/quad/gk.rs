//! Globally adaptive Gauss-Kronrod (7/15) quadrature on intervals, vector valued.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::scalar::{lit, Scalar};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for the odd Kronrod nodes 1, 3, 5 and the centre.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tol<T> {
    pub abs: T,
    pub rel: T,
}

impl<T: Scalar> Tol<T> {
    pub fn new(abs: T, rel: T) -> Self {
        Tol { abs, rel }
    }

    pub fn target(&self, value: T) -> T {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<T, const N: usize> {
    pub value: [T; N],
    pub error: T,
    pub evals: usize,
    pub converged: bool,
}

pub(crate) fn max_abs<T: Scalar, const N: usize>(v: &[T; N]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

fn gk15<T: Scalar, const N: usize, F: FnMut(T) -> [T; N]>(f: &mut F, a: T, b: T) -> ([T; N], T) {
    let c = (a + b) * lit(0.5);
    let h = (b - a) * lit(0.5);
    let fc = f(c);
    let mut k = [T::zero(); N];
    let mut g = [T::zero(); N];
    for i in 0..N {
        k[i] = fc[i] * lit(WGK[7]);
        g[i] = fc[i] * lit(WG[3]);
    }
    for j in 0..7 {
        let dx = h * lit(XGK[j]);
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for i in 0..N {
            let s = f1[i] + f2[i];
            k[i] += s * lit(WGK[j]);
            if j % 2 == 1 {
                g[i] += s * lit(WG[j / 2]);
            }
        }
    }
    let mut err = T::zero();
    for i in 0..N {
        k[i] *= h;
        g[i] *= h;
        err = err.max((k[i] - g[i]).abs());
    }
    (k, err)
}

struct Seg<T, const N: usize> {
    a: T,
    b: T,
    val: [T; N],
    err: T,
}

struct Key<T>(T, usize);

impl<T: PartialOrd> PartialEq for Key<T> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl<T: PartialOrd> Eq for Key<T> {}
impl<T: PartialOrd> PartialOrd for Key<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T: PartialOrd> Ord for Key<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.partial_cmp(&o.0).unwrap_or(Ordering::Equal).then(o.1.cmp(&self.1))
    }
}

/// Adaptive integration of `f` over `[a, b]`, bisecting the worst interval first.
pub fn adaptive<T: Scalar, const N: usize, F: FnMut(T) -> [T; N]>(
    f: &mut F,
    a: T,
    b: T,
    tol: Tol<T>,
    max_segments: usize,
) -> Estimate<T, N> {
    if !(b > a) {
        return Estimate { value: [T::zero(); N], error: T::zero(), evals: 0, converged: true };
    }
    let (v0, e0) = gk15(f, a, b);
    let mut segs = vec![Seg { a, b, val: v0, err: e0 }];
    let mut heap = BinaryHeap::new();
    heap.push(Key(e0, 0));
    let mut evals = 15;
    let mut total = v0;
    let mut total_err = e0;
    let min_width = (b - a) * lit(1e-12);
    while total_err > tol.target(max_abs(&total)) && segs.len() < max_segments {
        let Some(Key(_, idx)) = heap.pop() else { break };
        let (sa, sb) = (segs[idx].a, segs[idx].b);
        if sb - sa <= min_width {
            continue;
        }
        let m = (sa + sb) * lit(0.5);
        let (v1, e1) = gk15(f, sa, m);
        let (v2, e2) = gk15(f, m, sb);
        evals += 30;
        for i in 0..N {
            total[i] += v1[i] + v2[i] - segs[idx].val[i];
        }
        total_err += e1 + e2 - segs[idx].err;
        segs[idx] = Seg { a: sa, b: m, val: v1, err: e1 };
        heap.push(Key(e1, idx));
        segs.push(Seg { a: m, b: sb, val: v2, err: e2 });
        heap.push(Key(e2, segs.len() - 1));
    }
    // Resum in a fixed order so results do not depend on the refinement history.
    segs.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap_or(Ordering::Equal));
    let mut value = [T::zero(); N];
    let mut error = T::zero();
    for s in &segs {
        for i in 0..N {
            value[i] += s.val[i];
        }
        error += s.err;
    }
    let converged = error <= tol.target(max_abs(&value));
    Estimate { value, error, evals, converged }
}

/// Like [`adaptive`] but with a quadratic change of variables clustering nodes at
/// endpoints flagged as singular, which tames algebraic and logarithmic endpoint blow-up.
pub fn adaptive_endpoints<T: Scalar, const N: usize, F: FnMut(T) -> [T; N]>(
    f: &mut F,
    a: T,
    b: T,
    sing_a: bool,
    sing_b: bool,
    tol: Tol<T>,
    max_segments: usize,
) -> Estimate<T, N> {
    if !(b > a) {
        return Estimate { value: [T::zero(); N], error: T::zero(), evals: 0, converged: true };
    }
    let w = b - a;
    let two = lit::<T>(2.0);
    match (sing_a, sing_b) {
        (false, false) => adaptive(f, a, b, tol, max_segments),
        (true, false) => {
            // A node that rounds onto the singular endpoint carries no mass.
            let mut g = |u: T| {
                let t = a + w * u * u;
                if t == a {
                    return [T::zero(); N];
                }
                f(t).map(|x| x * two * w * u)
            };
            adaptive(&mut g, T::zero(), T::one(), tol, max_segments)
        }
        (false, true) => {
            let mut g = |u: T| {
                let t = b - w * u * u;
                if t == b {
                    return [T::zero(); N];
                }
                f(t).map(|x| x * two * w * u)
            };
            adaptive(&mut g, T::zero(), T::one(), tol, max_segments)
        }
        (true, true) => {
            let m = (a + b) * lit(0.5);
            let half = Tol { abs: tol.abs * lit(0.5), rel: tol.rel };
            let l = adaptive_endpoints(f, a, m, true, false, half, max_segments);
            let r = adaptive_endpoints(f, m, b, false, true, half, max_segments);
            let mut value = l.value;
            for i in 0..N {
                value[i] += r.value[i];
            }
            Estimate { value, error: l.error + r.error, evals: l.evals + r.evals, converged: l.converged && r.converged }
        }
    }
}

/// Scalar convenience wrapper around [`adaptive`].
pub fn integrate<T: Scalar, F: FnMut(T) -> T>(mut f: F, a: T, b: T, tol: Tol<T>) -> Estimate<T, 1> {
    let mut g = |x: T| [f(x)];
    adaptive(&mut g, a, b, tol, 2000)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact_in_one_panel() {
        let e = integrate(|x: f64| x.powi(10), 0.0, 1.0, Tol::new(1e-14, 0.0));
        assert!((e.value[0] - 1.0 / 11.0).abs() < 1e-15);
        assert_eq!(e.evals, 15);
    }

    #[test]
    fn sqrt_endpoint_with_substitution() {
        let mut f = |x: f64| [x.sqrt().recip()];
        let e = adaptive_endpoints(&mut f, 0.0, 1.0, true, false, Tol::new(1e-12, 0.0), 500);
        assert!((e.value[0] - 2.0).abs() < 1e-11);
    }

    #[test]
    fn log_endpoint() {
        let e = integrate(|x: f64| x.ln(), 0.0, 1.0, Tol::new(1e-10, 0.0));
        assert!((e.value[0] + 1.0).abs() < 1e-9);
        assert!(e.converged);
    }
}
