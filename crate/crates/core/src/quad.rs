//! Quadrature primitives: Gauss-Legendre panels, adaptive bisection,
//! geometric panel decompositions of the half line, and trapezoid
//! refinement for integrands with super-algebraic trapezoid convergence.
//!
//! Everything is generic over the scalar type [`Real`] and over the
//! integrand codomain, so the same driver integrates real- and
//! complex-valued functions.

use core::ops::{Add, Mul, Sub};

use num_traits::Zero;

use crate::real::Real;
use crate::{Error, Result};

/// Codomain of an integrand: a vector space over the scalar `T`.
pub trait LinearSpace<T>:
    Copy + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self>
{
    /// A norm-like magnitude used for error control.
    fn magnitude(&self) -> f64;
}

impl<T: Real> LinearSpace<T> for T {
    fn magnitude(&self) -> f64 {
        self.as_f64().abs()
    }
}

impl<T: Real> LinearSpace<T> for num_complex::Complex<T> {
    fn magnitude(&self) -> f64 {
        self.re.as_f64().hypot(self.im.as_f64())
    }
}

/// Compensated (Kahan) accumulator over any [`LinearSpace`].
#[derive(Clone, Copy)]
pub struct Compensated<V> {
    sum: V,
    carry: V,
}

impl<V: Zero> Default for Compensated<V> {
    fn default() -> Self {
        Compensated { sum: V::zero(), carry: V::zero() }
    }
}

impl<V> Compensated<V> {
    /// Adds a term, tracking the rounding carry.
    pub fn add<T>(&mut self, v: V)
    where
        V: LinearSpace<T>,
    {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    /// Current compensated total.
    pub fn total(self) -> V {
        self.sum
    }
}

/// Gauss-Legendre rule on `[-1, 1]`.
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Builds an `n`-point rule by Newton iteration on the Legendre
    /// polynomial, with Chebyshev-angle seeds.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "rule order must be at least 2");
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let nf = T::from_f64(n as f64);
        for i in 0..n {
            let seed = (T::PI() * T::from_f64(i as f64 + 0.75)) / T::from_f64(n as f64 + 0.5);
            let mut x = seed.cos();
            let mut converged = false;
            let mut pd = T::one();
            for _ in 0..60 {
                let (p, pm1) = legendre_pair(n, x);
                pd = nf * (x * p - pm1) / (x * x - T::one());
                let dx = p / pd;
                x = x - dx;
                if dx.abs() <= T::unit_roundoff() * T::from_f64(4.0) {
                    converged = true;
                }
                if converged {
                    break;
                }
            }
            let w = T::from_f64(2.0) / ((T::one() - x * x) * pd * pd);
            nodes.push(x);
            weights.push(w);
        }
        GaussLegendre { nodes, weights }
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// True when the rule is empty (never for constructed rules).
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]` with a single panel.
    pub fn integrate<V, F>(&self, a: T, b: T, mut f: F) -> V
    where
        V: LinearSpace<T>,
        F: FnMut(T) -> V,
    {
        let half = (b - a) * T::from_f64(0.5);
        let mid = (a + b) * T::from_f64(0.5);
        let mut acc = Compensated::<V>::default();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(f(mid + half * x) * w);
        }
        acc.total() * half
    }

    /// Nodes mapped to `[a, b]`, paired with scaled weights.
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (b - a) * T::from_f64(0.5);
        let mid = (a + b) * T::from_f64(0.5);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, w * half))
    }
}

fn legendre_pair<T: Real>(n: usize, x: T) -> (T, T) {
    let mut pm1 = T::one();
    let mut p = x;
    for k in 1..n {
        let kf = T::from_f64(k as f64);
        let next = ((T::from_f64(2.0) * kf + T::one()) * x * p - kf * pm1)
            / (kf + T::one());
        pm1 = p;
        p = next;
    }
    (p, pm1)
}

/// Panel decomposition scheme for half-line integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PanelScheme {
    /// Geometric panels on a logarithmic axis, Gauss-Legendre in each.
    DyadicGauss,
    /// Trapezoid refinement after the same logarithmic change of variable.
    DoubleExponential,
}

/// Controls for half-line quadrature of Whittaker-type integrands.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureConfig {
    /// Target relative error of the integral.
    pub rel_tol: f64,
    /// Panel strategy.
    pub panel_scheme: PanelScheme,
    /// Lower endpoint is `2^u_min_exponent`.
    pub u_min_exponent: i32,
    /// Upper endpoint of integration.
    pub u_max: f64,
    /// Hard cap on the panel count.
    pub max_panels: usize,
}

impl QuadratureConfig {
    /// Defaults appropriate for a scalar with `bits` of significand.
    pub fn for_bits(bits: u32) -> Self {
        let (rel_tol, u_min_exponent, u_max) = if bits > 60 {
            (1e-30, -100, 140.0)
        } else {
            (1e-13, -64, 90.0)
        };
        QuadratureConfig {
            rel_tol,
            panel_scheme: PanelScheme::DyadicGauss,
            u_min_exponent,
            u_max,
            max_panels: 4096,
        }
    }

    /// Verifies that `u_max` leaves at most `rel_tol / 10` of an integrand
    /// bounded by `exp(-rate u) u^max_index` beyond it. Integrands built
    /// from one Whittaker-type factor use `rate = 0.5`; products of two
    /// such factors decay at `rate = 1.0`.
    pub fn check_tail_reach(&self, rate: f64, max_index: f64) -> Result<()> {
        let log_tail = -rate * self.u_max + max_index * self.u_max.ln();
        let budget = (self.rel_tol / 10.0).ln();
        if log_tail >= budget {
            return Err(Error::domain(format!(
                "u_max = {} leaves an exp(-{rate} u) u^{max_index} tail of e^{log_tail:.1}, above the rel_tol/10 budget e^{budget:.1}",
                self.u_max
            )));
        }
        Ok(())
    }
}

/// Smallest `u_max` (with a 5 percent margin) satisfying
/// [`QuadratureConfig::check_tail_reach`] for the given envelope, found by
/// fixed-point iteration of `u = (max_index ln u - ln(rel_tol/10)) / rate`.
pub fn tail_reach_u_max(rate: f64, max_index: f64, rel_tol: f64) -> f64 {
    let budget = (rel_tol / 10.0).ln();
    let mut u: f64 = 40.0;
    for _ in 0..8 {
        u = ((max_index * u.ln() - budget) / rate).max(8.0);
    }
    u * 1.05
}

/// Integrates `f` over `[a, b]` adaptively: each panel is accepted when a
/// finer rule agrees to `max(rel_tol * |panel|, abs_tol)`, otherwise the
/// panel is bisected. Deterministic left-to-right processing.
pub fn adaptive<T, V, F>(a: T, b: T, rel_tol: f64, abs_tol: f64, f: &mut F) -> Result<V>
where
    T: Real,
    V: LinearSpace<T>,
    F: FnMut(T) -> V,
{
    let coarse = GaussLegendre::<T>::new(16);
    let fine = GaussLegendre::<T>::new(24);
    let mut total = Compensated::<V>::default();
    let mut stack = vec![(a, b, 0u32)];
    let mut panels = 0usize;
    while let Some((lo, hi, depth)) = stack.pop() {
        panels += 1;
        if panels > 200_000 {
            return Err(Error::no_convergence("adaptive quadrature panel budget exhausted"));
        }
        let c = coarse.integrate(lo, hi, &mut *f);
        let fv = fine.integrate(lo, hi, &mut *f);
        let err = (fv - c).magnitude();
        let accept = (rel_tol * fv.magnitude()).max(abs_tol);
        if err <= accept || depth >= 48 {
            if depth >= 48 && err > accept * 1e3 {
                return Err(Error::no_convergence(
                    "adaptive quadrature failed to converge on a panel",
                ));
            }
            total.add(fv);
        } else {
            let mid = (lo + hi) * T::from_f64(0.5);
            // push right first so the left half is processed next
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    Ok(total.total())
}

/// Integrates `f(u)` over `[u_min, u_max]` after the substitution
/// `u = exp(v)`, using geometric panels of the given width in `v` and a
/// fixed Gauss-Legendre rule per panel. The integrand is called with `u`
/// and must include any `du/u` measure itself; the substitution Jacobian
/// `u` is applied here.
pub fn log_axis_panels<T, V, F>(
    cfg: &QuadratureConfig,
    gl: &GaussLegendre<T>,
    panel_width: f64,
    mut f: F,
) -> Result<V>
where
    T: Real,
    V: LinearSpace<T>,
    F: FnMut(T) -> V,
{
    let v_lo = T::from_f64(cfg.u_min_exponent as f64) * T::LN_2();
    let v_hi = T::from_f64(cfg.u_max).ln();
    let span = (v_hi - v_lo).as_f64();
    if span <= 0.0 {
        return Err(Error::domain("log axis: empty integration range"));
    }
    let n_panels = (span / panel_width).ceil() as usize;
    if n_panels > cfg.max_panels {
        return Err(Error::domain(format!(
            "log axis: {n_panels} panels exceed the cap {}",
            cfg.max_panels
        )));
    }
    let step = (v_hi - v_lo) / T::from_f64(n_panels as f64);
    let mut acc = Compensated::<V>::default();
    for i in 0..n_panels {
        let a = v_lo + step * T::from_f64(i as f64);
        let b = v_lo + step * T::from_f64(i as f64 + 1.0);
        let panel: V = gl.integrate(a, b, |v: T| {
            let u = v.exp();
            f(u) * u
        });
        acc.add(panel);
    }
    Ok(acc.total())
}

/// Result of [`log_axis_panels_pair`]: the same panel partition summed
/// with two Gauss rules, plus the accumulated magnitude of all node
/// contributions for roundoff-floor estimates.
#[derive(Clone, Copy, Debug)]
pub struct PanelPair<V> {
    /// Integral under the coarse rule.
    pub coarse: V,
    /// Integral under the fine rule; the better of the two estimates.
    pub fine: V,
    /// Sum of `|f(u)| * u * w` over the fine rule's nodes, an upper bound
    /// on the magnitude the compensated sums had to traverse.
    pub magnitude: f64,
}

/// Variant of [`log_axis_panels`] that evaluates every panel under two
/// Gauss rules of different order on one shared partition, so the caller
/// can use the disagreement as an error estimate without re-evaluating
/// any shared setup. The integrand contract is the same: `f` receives `u`
/// and must include the `du/u` measure itself.
pub fn log_axis_panels_pair<T, V, F>(
    cfg: &QuadratureConfig,
    n_coarse: usize,
    n_fine: usize,
    panel_width: f64,
    mut f: F,
) -> Result<PanelPair<V>>
where
    T: Real,
    V: LinearSpace<T>,
    F: FnMut(T) -> V,
{
    let gl_c = GaussLegendre::<T>::new(n_coarse);
    let gl_f = GaussLegendre::<T>::new(n_fine);
    let v_lo = T::from_f64(cfg.u_min_exponent as f64) * T::LN_2();
    let v_hi = T::from_f64(cfg.u_max).ln();
    let span = (v_hi - v_lo).as_f64();
    if span <= 0.0 {
        return Err(Error::domain("log axis: empty integration range"));
    }
    let n_panels = (span / panel_width).ceil() as usize;
    if n_panels > cfg.max_panels {
        return Err(Error::domain(format!(
            "log axis: {n_panels} panels exceed the cap {}",
            cfg.max_panels
        )));
    }
    let step = (v_hi - v_lo) / T::from_f64(n_panels as f64);
    let mut acc_c = Compensated::<V>::default();
    let mut acc_f = Compensated::<V>::default();
    let mut mag = 0.0_f64;
    for i in 0..n_panels {
        let a = v_lo + step * T::from_f64(i as f64);
        let b = v_lo + step * T::from_f64(i as f64 + 1.0);
        acc_c.add(gl_c.integrate(a, b, |v: T| {
            let u = v.exp();
            f(u) * u
        }));
        let mut panel_f = Compensated::<V>::default();
        for (v, w) in gl_f.mapped(a, b) {
            let u = v.exp();
            let contribution = f(u) * (u * w);
            mag += contribution.magnitude();
            panel_f.add(contribution);
        }
        acc_f.add(panel_f.total());
    }
    Ok(PanelPair { coarse: acc_c.total(), fine: acc_f.total(), magnitude: mag })
}

/// Trapezoid rule on `[a, b]` with interval halving until two successive
/// levels agree to `max(rel_tol * |value|, abs_tol)`. Suited to integrands
/// whose trapezoid error decays super-algebraically (periodic or
/// bell-shaped after substitution).
pub fn trapezoid_refine<T, V, F>(
    a: T,
    b: T,
    init_points: usize,
    rel_tol: f64,
    abs_tol: f64,
    max_levels: u32,
    mut f: F,
) -> Result<V>
where
    T: Real,
    V: LinearSpace<T>,
    F: FnMut(T) -> V,
{
    let mut n = init_points.max(4);
    let width = b - a;
    let mut h = width / T::from_f64(n as f64);
    let mut acc = Compensated::<V>::default();
    acc.add((f(a) + f(b)) * T::from_f64(0.5));
    for i in 1..n {
        acc.add(f(a + h * T::from_f64(i as f64)));
    }
    let mut prev = acc.total() * h;
    for _ in 0..max_levels {
        // add midpoints of the current grid
        let mut mid = Compensated::<V>::default();
        for i in 0..n {
            mid.add(f(a + h * T::from_f64(i as f64 + 0.5)));
        }
        n *= 2;
        h = h * T::from_f64(0.5);
        let cur = prev * T::from_f64(0.5) + mid.total() * h;
        let err = (cur - prev).magnitude();
        if err <= (rel_tol * cur.magnitude()).max(abs_tol) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::no_convergence("trapezoid refinement hit the level cap"))
}
