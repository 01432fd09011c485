//! Whittaker W-function evaluation.
//!
//! `W_(alpha,beta)(y)` solves `W'' + (-1/4 + alpha/y + (1/4 - beta^2)/y^2) W = 0`
//! and is the solution normalized by `y^(-alpha) e^(y/2) W -> 1` as
//! `y -> infinity`. Four strategies cover the parameter families that occur
//! in spectral identities, and they deliberately overlap so each can check
//! the others:
//!
//! * `beta = +-(alpha - 1/2)`: the elementary closed form `y^alpha e^(-y/2)`.
//! * `alpha = 0`, `beta = i tau`: the Bessel relation
//!   `W = sqrt(y/pi) K_(i tau)(y/2)`.
//! * `alpha = k >= ell >= 1` integers, `beta = ell - 1/2`: a finite Laguerre
//!   sum.
//! * everything else: power series along a descending chain of centers,
//!   seeded by the asymptotic expansion at a start point far enough out
//!   that optimal truncation reaches working precision.

use num_complex::Complex;

use crate::quad::Compensated;
use crate::real::Real;
use crate::special::factorial;
use crate::{Error, Result};

/// Index pair of a Whittaker function.
#[derive(Clone, Copy, Debug)]
pub struct WhittakerParams<T: Real> {
    /// First index; an integer or zero in the identities this crate checks.
    pub alpha: Complex<T>,
    /// Second index; purely imaginary or a half-integer in practice.
    pub beta: Complex<T>,
}

/// Evaluation family, in dispatch precedence order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WhittakerFamily {
    /// `beta = +-(alpha - 1/2)`; elementary closed form.
    ExactElementary,
    /// `alpha = 0`, `beta` purely imaginary; Bessel integral.
    BesselImaginary,
    /// `alpha = k >= ell >= 1`, `beta = ell - 1/2`; finite Laguerre sum.
    LaguerreFinite {
        /// First index.
        k: u32,
        /// Half-integer offset, `beta = ell - 1/2`.
        ell: u32,
    },
    /// Integer `alpha` with purely imaginary `beta`; series path.
    IntegerImaginary {
        /// First index.
        k: i32,
    },
    /// No special structure; series path.
    General,
}

/// Evaluation result with accuracy metadata.
#[derive(Clone, Copy, Debug)]
pub struct WhittakerValue<T: Real> {
    /// The function value.
    pub value: Complex<T>,
    /// Estimated achieved relative error.
    pub achieved_rel_err: f64,
    /// Set when the estimate exceeds the requested tolerance.
    pub accuracy_warning: bool,
}

impl<T: Real> WhittakerParams<T> {
    /// Arbitrary index pair.
    pub fn new(alpha: Complex<T>, beta: Complex<T>) -> Self {
        WhittakerParams { alpha, beta }
    }

    /// Integer first index with purely imaginary second index `i r`.
    pub fn spectral(k: i32, r: T) -> Self {
        WhittakerParams {
            alpha: Complex::new(T::from_f64(k as f64), T::zero()),
            beta: Complex::new(T::zero(), r),
        }
    }

    /// Integer indices `alpha = k`, `beta = ell - 1/2`.
    pub fn discrete_series(k: u32, ell: u32) -> Self {
        WhittakerParams {
            alpha: Complex::new(T::from_f64(k as f64), T::zero()),
            beta: Complex::new(T::from_f64(ell as f64 - 0.5), T::zero()),
        }
    }

    /// Classifies the parameters into the first matching family.
    pub fn family(&self) -> WhittakerFamily {
        let half = Complex::new(T::from_f64(0.5), T::zero());
        let shifted = self.alpha - half;
        if self.beta == shifted || self.beta == -shifted {
            return WhittakerFamily::ExactElementary;
        }
        let alpha_int = self.alpha.im.is_zero()
            && self.alpha.re.fract().is_zero()
            && self.alpha.re.abs() < T::from_f64(2.0e9);
        if self.alpha.re.is_zero() && self.alpha.im.is_zero() && self.beta.re.is_zero() {
            return WhittakerFamily::BesselImaginary;
        }
        if alpha_int && self.beta.im.is_zero() {
            let k = self.alpha.re.as_f64();
            let ell = self.beta.re.as_f64() + 0.5;
            if k >= 1.0 && ell >= 1.0 && ell.fract() == 0.0 && k >= ell {
                return WhittakerFamily::LaguerreFinite { k: k as u32, ell: ell as u32 };
            }
        }
        if alpha_int && self.beta.re.is_zero() {
            return WhittakerFamily::IntegerImaginary { k: self.alpha.re.as_f64() as i32 };
        }
        WhittakerFamily::General
    }
}

/// `y` threshold past which `|W| <= 2 y^(Re alpha) e^(-y/2)` is guaranteed:
/// the asymptotic tail is below 1 there, so the leading term dominates.
pub fn decay_threshold<T: Real>(p: &WhittakerParams<T>) -> f64 {
    let a = p.alpha.norm().as_f64();
    let b = p.beta.norm().as_f64();
    40.0f64.max(4.0 * ((a + 0.5) * (a + 0.5) + b * b))
}

fn exact_elementary<T: Real>(alpha: Complex<T>, y: T) -> Complex<T> {
    let half = T::from_f64(0.5);
    (alpha * y.ln() - Complex::new(half * y, T::zero())).exp()
}

/// Finite Laguerre-sum evaluation for `alpha = k >= ell >= 1`,
/// `beta = ell - 1/2`; returns the value and a cancellation-based error
/// estimate.
fn laguerre_finite<T: Real>(k: u32, ell: u32, y: T) -> (T, f64) {
    // (-1)^(k-l) (k-l)! (k+l-1)! sum over m of
    //   (-1)^m y^(l+m) e^(-y/2) / ((k-l-m)! (2l+m-1)! m!)
    let n = k - ell;
    let mut acc = Compensated::<T>::default();
    let mut max_term = T::zero();
    let pref = factorial::<T>(n) * factorial::<T>(k + ell - 1) * (-y * T::from_f64(0.5)).exp();
    for m in 0..=n {
        let mut t = pref * y.powi((ell + m) as i32)
            / (factorial::<T>(n - m) * factorial::<T>(2 * ell + m - 1) * factorial::<T>(m));
        if (n - m) % 2 == 1 {
            t = -t;
        }
        if t.abs() > max_term {
            max_term = t.abs();
        }
        acc.add(t);
    }
    let value = acc.total();
    let cancel = (max_term.as_f64() / value.abs().as_f64().max(1e-300)).max(1.0);
    let err = cancel * (n as f64 + 1.0) * T::unit_roundoff().as_f64();
    (value, err)
}

/// Start point for the asymptotic seed: far enough out that the optimally
/// truncated series reaches working precision. An imaginary second index
/// shifts the reachable precision by `pi |Im beta|`, so that enters
/// linearly.
fn series_start_point<T: Real>(alpha: Complex<T>, beta: Complex<T>) -> f64 {
    let p = T::BITS as f64 * core::f64::consts::LN_2 + 8.0;
    let bi = beta.im.as_f64().abs();
    let a = alpha.norm().as_f64();
    let br = beta.re.as_f64().abs();
    40.0f64.max(1.12 * (p + core::f64::consts::PI * bi) + 2.0 * (a + br) + 8.0)
}

/// Asymptotic expansion of `W` and `W'` at large `y` with optimal
/// truncation. Returns the value pair and the smallest term ratio reached,
/// which bounds the relative truncation error.
fn asymptotic_series<T: Real>(
    alpha: Complex<T>,
    beta: Complex<T>,
    y: T,
) -> (Complex<T>, Complex<T>, f64) {
    let half = T::from_f64(0.5);
    let mut t1 = Compensated::<Complex<T>>::default();
    let mut t2 = Compensated::<Complex<T>>::default();
    let one = Complex::new(T::one(), T::zero());
    let mut a = one;
    t1.add(a);
    let mut best = 1.0f64;
    let beta2 = beta * beta;
    let floor = T::unit_roundoff().as_f64() * 0.25;
    for s in 0..400u32 {
        let sf = T::from_f64(s as f64);
        let shift = Complex::new(sf + half, T::zero()) - alpha;
        let next = a * (shift * shift - beta2) / (-(sf + T::one()) * y);
        let curo = a.norm().as_f64();
        let nexto = next.norm().as_f64();
        if nexto >= curo {
            break;
        }
        a = next;
        t1.add(a);
        t2.add(a * T::from_f64((s + 1) as f64) / y);
        best = nexto;
        if nexto < floor {
            break;
        }
    }
    let sum1 = t1.total();
    let sum2 = t2.total();
    let pref = exact_elementary(alpha, y);
    let w = pref * sum1;
    let dlog = Complex::new(-half, T::zero()) + alpha / y;
    let wp = pref * (dlog * sum1 - sum2);
    (w, wp, best / sum1.norm().as_f64().max(1e-300))
}

struct SeriesCenter<T: Real> {
    c: T,
    /// Taylor coefficients scaled by `(c/3)^n`, so the step to `2c/3`
    /// evaluates at unit argument and storage never overflows for tiny `c`.
    coeff: Vec<Complex<T>>,
}

impl<T: Real> SeriesCenter<T> {
    /// Builds scaled coefficients from values `(w, wp)` at the center by
    /// the differential-equation recurrence.
    fn build(
        alpha: Complex<T>,
        beta: Complex<T>,
        c: T,
        w: Complex<T>,
        wp: Complex<T>,
        tol: f64,
    ) -> Result<SeriesCenter<T>> {
        let q = Complex::new(T::from_f64(0.25), T::zero()) - beta * beta;
        let c2 = c * c;
        let third = T::from_ratio(1, 3);
        let ninth = T::from_ratio(1, 9);
        // scaled recurrence constants
        let a0 = (Complex::new(c2 * T::from_f64(0.25), T::zero()) - alpha * c - q) * ninth;
        let b0 = (Complex::new(c2 * T::from_f64(0.5), T::zero()) - alpha * c) * T::from_ratio(1, 27);
        let c0 = Complex::new(c2 * T::from_ratio(1, 324), T::zero());
        let mut d: Vec<Complex<T>> = Vec::with_capacity(80);
        d.push(w);
        d.push(wp * (c * third));
        let scale0 = w.norm().as_f64().max(d[1].norm().as_f64()).max(1e-300);
        let mut n = 0usize;
        loop {
            // coefficient for h^(n+2), n counted from 0
            let nf = T::from_f64(n as f64);
            let mut num = a0 * d[n] - d[n + 1] * (T::from_ratio(2, 3) * (nf + T::one()) * nf)
                - d[n] * (nf * (nf - T::one()) * ninth);
            if n >= 1 {
                num = num + b0 * d[n - 1];
            }
            if n >= 2 {
                num = num + c0 * d[n - 2];
            }
            let next = num / ((nf + T::from_f64(2.0)) * (nf + T::one()));
            d.push(next);
            n += 1;
            let len = d.len();
            if len >= 24 {
                let t1 = d[len - 1].norm().as_f64();
                let t2 = d[len - 2].norm().as_f64();
                if t1.max(t2) < tol * scale0 * 0.01 {
                    break;
                }
            }
            if len >= 200 {
                return Err(Error::no_convergence(
                    "Whittaker series coefficients did not decay within 200 terms",
                ));
            }
        }
        Ok(SeriesCenter { c, coeff: d })
    }

    /// Sums the series and its derivative at `y = c + h`, `|h| <= c/3`.
    fn eval(&self, y: T) -> (Complex<T>, Complex<T>) {
        let s = (y - self.c) * T::from_f64(3.0) / self.c;
        let mut acc = Compensated::<Complex<T>>::default();
        let mut dacc = Compensated::<Complex<T>>::default();
        let mut spow = T::one();
        acc.add(self.coeff[0]);
        for (n, &d) in self.coeff.iter().enumerate().skip(1) {
            dacc.add(d * (spow * T::from_f64(n as f64)));
            spow = spow * s;
            acc.add(d * spow);
        }
        let w = acc.total();
        let wp = dacc.total() * (T::from_f64(3.0) / self.c);
        (w, wp)
    }
}

/// Power-series evaluator for one index pair over a `y` interval.
///
/// Construction marches from an asymptotic seed down a chain of centers in
/// geometric ratio 2/3, storing Taylor coefficients at each; evaluation
/// then sums the series at the nearest center above the query point. The
/// downward direction follows the growing solution, so the march is
/// numerically stable. Build once per index pair and reuse across
/// quadrature nodes.
pub struct WhittakerOdeTrack<T: Real> {
    params: WhittakerParams<T>,
    centers: Vec<SeriesCenter<T>>,
    y_lo: T,
    /// Estimated relative accuracy of the track.
    pub achieved_rel_err: f64,
}

impl<T: Real> WhittakerOdeTrack<T> {
    /// Builds a track valid on `[y_lo, infinity)`; queries above the seed
    /// point fall back to the asymptotic expansion directly.
    pub fn build(
        params: WhittakerParams<T>,
        y_lo: T,
        y_hi: T,
        rel_tol: f64,
    ) -> Result<WhittakerOdeTrack<T>> {
        if y_lo <= T::zero() || y_hi < y_lo {
            return Err(Error::domain("track requires 0 < y_lo <= y_hi"));
        }
        let tol = rel_tol.max(T::unit_roundoff().as_f64() * 4.0);
        // the chain never starts above the asymptotic start point: queries
        // beyond the top center use the expansion directly, which is at
        // full accuracy there, and larger centers would need series terms
        // spanning the e^(c/6) growth across a step
        let mut y0 = series_start_point(params.alpha, params.beta);
        let mut seed = None;
        for _ in 0..4 {
            let (w, wp, reached) = asymptotic_series(params.alpha, params.beta, T::from_f64(y0));
            if reached <= tol {
                seed = Some((w, wp, reached));
                break;
            }
            y0 *= 1.4;
        }
        let (w, wp, seed_err) = seed.ok_or_else(|| {
            Error::no_convergence("asymptotic seed did not reach tolerance; start point too small")
        })?;
        let mut centers = Vec::new();
        let mut c = T::from_f64(y0);
        let mut cur = (w, wp);
        loop {
            let center = SeriesCenter::build(params.alpha, params.beta, c, cur.0, cur.1, tol)?;
            let next_c = c * T::from_ratio(2, 3);
            let stepped = center.eval(next_c);
            centers.push(center);
            if c <= y_lo {
                break;
            }
            c = next_c;
            cur = stepped;
        }
        let steps = centers.len() as f64;
        let achieved = seed_err + steps * T::unit_roundoff().as_f64() * 8.0;
        Ok(WhittakerOdeTrack { params, centers, y_lo, achieved_rel_err: achieved })
    }

    /// The index pair the track was built for.
    pub fn params(&self) -> &WhittakerParams<T> {
        &self.params
    }

    /// Evaluates `W` at `y`.
    pub fn eval(&self, y: T) -> Result<Complex<T>> {
        Ok(self.eval_with_derivative(y)?.0)
    }

    /// Evaluates `(W, W')` at `y`.
    pub fn eval_with_derivative(&self, y: T) -> Result<(Complex<T>, Complex<T>)> {
        if y < self.y_lo * T::from_f64(1.0 - 1e-12) {
            return Err(Error::domain(format!(
                "query y = {} below track floor {}",
                y, self.y_lo
            )));
        }
        let top = self.centers[0].c;
        if y > top {
            let (w, wp, _) = asymptotic_series(self.params.alpha, self.params.beta, y);
            return Ok((w, wp));
        }
        // smallest center >= y; centers are sorted descending
        let idx = self.centers.partition_point(|ctr| ctr.c >= y);
        let j = idx.saturating_sub(1);
        Ok(self.centers[j].eval(y))
    }
}

/// Evaluates `W_(alpha,beta)(y)` by the best strategy for the parameter
/// family, with accuracy metadata.
pub fn whittaker_w<T: Real>(
    params: &WhittakerParams<T>,
    y: T,
    rel_tol: f64,
) -> Result<WhittakerValue<T>> {
    if y <= T::zero() {
        return Err(Error::domain("whittaker_w requires y > 0"));
    }
    let ur = T::unit_roundoff().as_f64();
    match params.family() {
        WhittakerFamily::ExactElementary => {
            // evenness in beta makes both sign cases the same formula
            let value = exact_elementary(params.alpha, y);
            Ok(WhittakerValue { value, achieved_rel_err: 4.0 * ur, accuracy_warning: false })
        }
        WhittakerFamily::BesselImaginary => {
            let tau = params.beta.im;
            let k = crate::special::bessel_k_imag(tau, y * T::from_f64(0.5), rel_tol)?;
            let value = (y / T::PI()).sqrt() * k;
            // the integral loses a factor e^(pi tau / 2) to cancellation
            let floor = (core::f64::consts::FRAC_PI_2 * tau.as_f64().abs()).exp() * ur * 64.0;
            let achieved = rel_tol.max(floor);
            Ok(WhittakerValue {
                value: Complex::new(value, T::zero()),
                achieved_rel_err: achieved,
                accuracy_warning: achieved > rel_tol,
            })
        }
        WhittakerFamily::LaguerreFinite { k, ell } => {
            let (value, err) = laguerre_finite(k, ell, y);
            Ok(WhittakerValue {
                value: Complex::new(value, T::zero()),
                achieved_rel_err: err,
                accuracy_warning: err > rel_tol,
            })
        }
        WhittakerFamily::IntegerImaginary { .. } | WhittakerFamily::General => {
            let track = WhittakerOdeTrack::build(*params, y, y, rel_tol)?;
            let value = track.eval(y)?;
            let achieved = track.achieved_rel_err;
            Ok(WhittakerValue {
                value,
                achieved_rel_err: achieved,
                accuracy_warning: achieved > rel_tol,
            })
        }
    }
}

/// Convergence diagnostic `y^(-alpha) e^(y/2) W_(alpha,beta)(y)`, which
/// tends to 1 as `y` grows.
pub fn asymptotic_normalization<T: Real>(
    params: &WhittakerParams<T>,
    y: T,
    rel_tol: f64,
) -> Result<Complex<T>> {
    let w = whittaker_w(params, y, rel_tol)?;
    let half = T::from_f64(0.5);
    let inv_pref = (Complex::new(half * y, T::zero()) - params.alpha * y.ln()).exp();
    Ok(w.value * inv_pref)
}
