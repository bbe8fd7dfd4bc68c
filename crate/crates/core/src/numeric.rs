//! Shared numeric kernels: binomial tails, normal distribution helpers,
//! Gauss-Hermite quadrature, and adaptive Simpson integration.
//!
//! All transcendental functions route through `libm` so results are identical
//! with and without the `std` feature and across platforms.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

pub(crate) const SQRT_2: f64 = core::f64::consts::SQRT_2;

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

/// Integer power by repeated squaring; `powi(0.0, 0) == 1.0` so binomial
/// terms at the endpoints of [0, 1] come out exact.
pub(crate) fn powi(x: f64, mut n: u32) -> f64 {
    let mut base = x;
    let mut acc = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        base *= base;
        n >>= 1;
    }
    acc
}

#[inline]
pub(crate) fn fmax(a: f64, b: f64) -> f64 {
    if a > b {
        a
    } else {
        b
    }
}

#[inline]
pub(crate) fn fmin(a: f64, b: f64) -> f64 {
    if a < b {
        a
    } else {
        b
    }
}

/// Standard normal density.
#[inline]
pub(crate) fn normal_pdf(x: f64) -> f64 {
    exp(-0.5 * x * x) / sqrt(2.0 * PI)
}

/// Standard normal CDF via the complementary error function; accurate in
/// both tails.
#[inline]
pub(crate) fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Inverse standard normal CDF: Acklam's rational approximation polished
/// with one Newton step against `normal_cdf`. Relative error is at the
/// level of the CDF itself (~1e-15) away from the extreme tails.
pub(crate) fn inverse_normal_cdf(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = sqrt(-2.0 * ln(p));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = sqrt(-2.0 * ln(1.0 - p));
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    let density = normal_pdf(x);
    if density > 1e-280 {
        x - (normal_cdf(x) - p) / density
    } else {
        x
    }
}

/// Binomial coefficient as f64 via the multiplicative recurrence; exact for
/// the small arguments used here and better than 1e-15 relative through
/// `trials = 63`.
pub(crate) fn binomial_coefficient(trials: u32, k: u32) -> f64 {
    debug_assert!(k <= trials);
    let k = k.min(trials - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (trials - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Upper binomial tail `Pr[Bin(trials, p) >= k_min]` by direct summation of
/// exact-coefficient terms. Exact at `p = 0` and `p = 1`.
pub(crate) fn binomial_tail(trials: u32, k_min: u32, p: f64) -> f64 {
    if k_min == 0 {
        return 1.0;
    }
    if k_min > trials {
        return 0.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in k_min..=trials {
        sum += binomial_coefficient(trials, j) * powi(p, j) * powi(1.0 - p, trials - j);
    }
    fmin(sum, 1.0)
}

/// Gauss-Hermite rule for the physicists' weight `exp(-x^2)`.
///
/// Nodes are the roots of the degree-`n` Hermite polynomial, located by
/// Newton iteration over the orthonormal three-term recurrence with the
/// classical outside-in initial guesses. An expectation under
/// `Normal(m, v)` is `sum(w_i * f(m + sqrt(2 v) * x_i)) / sqrt(pi)`.
pub(crate) struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = (n + 1) / 2;
        let mut z = 0.0;
        for i in 0..half {
            z = match i {
                0 => sqrt((2 * n + 1) as f64) - 1.85575 * pow((2 * n + 1) as f64, -1.0 / 6.0),
                1 => z - 1.14 * pow(n as f64, 0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut deriv = 0.0;
            for _ in 0..100 {
                let mut p1 = pow(PI, -0.25);
                let mut p2 = 0.0;
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = z * sqrt(2.0 / j as f64) * p2 - sqrt((j - 1) as f64 / j as f64) * p3;
                }
                deriv = sqrt(2.0 * n as f64) * p2;
                let step = p1 / deriv;
                z -= step;
                if abs(step) <= 1e-15 * (1.0 + abs(z)) {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            let w = 2.0 / (deriv * deriv);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussHermite { nodes, weights }
    }

    /// Expectation of `f` under `Normal(mean, variance)`.
    pub fn normal_expectation(&self, mean: f64, variance: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let scale = sqrt(2.0 * variance);
        let mut total = 0.0;
        for (&x, &w) in self.nodes.iter().zip(self.weights.iter()) {
            total += w * f(mean + scale * x);
        }
        total / sqrt(PI)
    }
}

/// Adaptive Simpson integration. Returns `Err(evaluations)` when the depth
/// cap is hit before the local error estimate falls under the tolerance.
pub(crate) fn adaptive_simpson(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64, usize> {
    struct State<'a, F> {
        f: &'a mut F,
        evals: usize,
    }
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: FnMut(f64) -> f64>(
        st: &mut State<'_, F>,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64, ()> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (st.f)(lm);
        let frm = (st.f)(rm);
        st.evals += 2;
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if abs(delta) <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(());
        }
        let l = recurse(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
        let r = recurse(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
        Ok(l + r)
    }

    if a == b {
        return Ok(0.0);
    }
    let mut st = State { f, evals: 3 };
    let fa = (st.f)(a);
    let m = 0.5 * (a + b);
    let fm = (st.f)(m);
    let fb = (st.f)(b);
    let whole = simpson(fa, fm, fb, a, b);
    match recurse(&mut st, a, b, fa, fm, fb, whole, tol, max_depth) {
        Ok(v) => Ok(v),
        Err(()) => Err(st.evals),
    }
}
