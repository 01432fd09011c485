//! Terminating generalized hypergeometric sums.
//!
//! A series `pFq(a_1,...,a_p; b_1,...,b_q; z)` terminates when some
//! numerator parameter is a nonpositive integer `-K`; the sum then has at
//! most `K + 1` nonzero terms and is a polynomial identity rather than a
//! limit. This module evaluates exactly those sums, with compensated
//! floating summation at any supported precision and, for test fixtures
//! with Gaussian-rational parameters, an overflow-checked exact
//! accumulator.

use num_complex::Complex;

use crate::quad::Compensated;
use crate::real::Real;
use crate::{Error, Result};

/// Largest accepted termination index; longer sums indicate a misuse.
const MAX_TERMINATION: u64 = 100_000;

/// Parameter set for a terminating `pFq`.
#[derive(Clone, Debug)]
pub struct HypergeometricSpec<T: Real> {
    /// Numerator parameters `a_i`; at least one must be a nonpositive
    /// integer for the sum to terminate.
    pub numerator_params: Vec<Complex<T>>,
    /// Denominator parameters `b_j`; none may be a nonpositive integer
    /// that vanishes before the terminating numerator does.
    pub denominator_params: Vec<Complex<T>>,
    /// Series argument; the spectral identities in this crate use `1`.
    pub argument: Complex<T>,
}

/// Recognizes a nonpositive-integer parameter and returns `n` with
/// `value = -n`. Exact comparison is intentional: terminating parameters
/// are constructed from integers, never from rounded arithmetic.
fn nonpositive_integer_index<T: Real>(z: Complex<T>) -> Option<u64> {
    if !z.im.is_zero() {
        return None;
    }
    if z.re > T::zero() || !z.re.fract().is_zero() {
        return None;
    }
    let n = (-z.re).as_f64();
    if n > 1.8e19 {
        return None;
    }
    Some(n as u64)
}

impl<T: Real> HypergeometricSpec<T> {
    /// Spec with unit argument, the default throughout the crate.
    pub fn at_unit(
        numerator_params: Vec<Complex<T>>,
        denominator_params: Vec<Complex<T>>,
    ) -> Self {
        HypergeometricSpec {
            numerator_params,
            denominator_params,
            argument: Complex::new(T::one(), T::zero()),
        }
    }

    /// Spec with an explicit argument.
    pub fn with_argument(
        numerator_params: Vec<Complex<T>>,
        denominator_params: Vec<Complex<T>>,
        argument: Complex<T>,
    ) -> Self {
        HypergeometricSpec { numerator_params, denominator_params, argument }
    }

    /// Smallest `K` with some numerator parameter equal to `-K`.
    pub fn termination_index(&self) -> Result<u64> {
        let k = self
            .numerator_params
            .iter()
            .filter_map(|&a| nonpositive_integer_index(a))
            .min()
            .ok_or_else(|| {
                Error::domain("pfq_terminating requires a nonpositive-integer numerator parameter")
            })?;
        if k > MAX_TERMINATION {
            return Err(Error::domain(format!(
                "termination index {k} exceeds the supported maximum {MAX_TERMINATION}"
            )));
        }
        Ok(k)
    }

    /// Termination index after checking that no denominator Pochhammer
    /// vanishes within the summation range.
    pub fn validate(&self) -> Result<u64> {
        let k = self.termination_index()?;
        for (j, &b) in self.denominator_params.iter().enumerate() {
            if let Some(n) = nonpositive_integer_index(b) {
                if n < k {
                    return Err(Error::domain(format!(
                        "denominator parameter b_{} = -{n} vanishes at term {} before termination at {k}",
                        j + 1,
                        n + 1
                    )));
                }
            }
        }
        Ok(k)
    }
}

/// Evaluates a terminating `pFq` by running the term ratio
/// `t_(m+1)/t_m = z * prod(a_i + m) / (prod(b_j + m) (m + 1))` with
/// compensated summation.
pub fn pfq_terminating<T: Real>(spec: &HypergeometricSpec<T>) -> Result<Complex<T>> {
    let k = spec.validate()?;
    let mut term = Complex::new(T::one(), T::zero());
    let mut acc = Compensated::<Complex<T>>::default();
    acc.add(term);
    for m in 0..k {
        let mf = T::from_f64(m as f64);
        let mut ratio = spec.argument / (mf + T::one());
        for &a in &spec.numerator_params {
            ratio = ratio * (a + mf);
        }
        for &b in &spec.denominator_params {
            ratio = ratio / (b + mf);
        }
        term = term * ratio;
        if term.re.is_zero() && term.im.is_zero() {
            break;
        }
        acc.add(term);
    }
    Ok(acc.total())
}

/// Builds the terminating `4F3` attached to the weight-`k` pairing of two
/// principal-series vectors with spectral parameters `alpha`, `beta` against
/// exponent parameter `gamma`:
/// numerators `-k, k, 1/4 + i(-alpha+beta+gamma)/2, 1/4 + i(alpha+beta+gamma)/2`,
/// denominators `1/2, 1/2 + i beta, 1/2 + i gamma`, unit argument.
pub fn four_f3_weight_spec<T: Real>(
    k: i32,
    alpha: T,
    beta: T,
    gamma: T,
) -> HypergeometricSpec<T> {
    let quarter = T::from_f64(0.25);
    let half = T::from_f64(0.5);
    let hmix = (gamma + beta - alpha) * half;
    let hsum = (gamma + beta + alpha) * half;
    HypergeometricSpec::at_unit(
        vec![
            Complex::new(T::from_f64(-(k as f64)), T::zero()),
            Complex::new(T::from_f64(k as f64), T::zero()),
            Complex::new(quarter, hmix),
            Complex::new(quarter, hsum),
        ],
        vec![
            Complex::new(half, T::zero()),
            Complex::new(half, beta),
            Complex::new(half, gamma),
        ],
    )
}

/// Growth envelope `1 + ((1 + |2r - t|)/(1 + |r|))^|k|` that the
/// weight-`k` `4F3` at `(alpha, beta, gamma) = (r, -r, t)` is bounded by,
/// up to a constant depending only on `k`.
pub fn four_f3_envelope(k: i32, r: f64, t: f64) -> f64 {
    let base = (1.0 + (2.0 * r - t).abs()) / (1.0 + r.abs());
    1.0 + base.powi(k.abs())
}

/// Gaussian-rational scalar `(re + im i) / den` over `i128`, used for the
/// exact accumulation path. Arithmetic is overflow-checked; `None` from any
/// operation means the computation left the representable range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GaussRational {
    re: i128,
    im: i128,
    den: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl GaussRational {
    /// Builds `(re + im i)/den`, reducing to lowest terms; `den` must be
    /// nonzero.
    pub fn new(re: i128, im: i128, den: i128) -> GaussRational {
        assert!(den != 0, "zero denominator");
        let mut g = gcd(gcd(re, im), den);
        if g == 0 {
            g = 1;
        }
        let sign = if den < 0 { -1 } else { 1 };
        GaussRational { re: sign * re / g, im: sign * im / g, den: sign * den / g }
    }

    /// The rational integer `n`.
    pub fn from_int(n: i64) -> GaussRational {
        GaussRational { re: n as i128, im: 0, den: 1 }
    }

    fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    fn nonpositive_integer_index(self) -> Option<u64> {
        if self.im == 0 && self.den == 1 && self.re <= 0 {
            Some((-self.re) as u64)
        } else {
            None
        }
    }

    fn checked_add(self, other: GaussRational) -> Option<GaussRational> {
        let re = self.re.checked_mul(other.den)?.checked_add(other.re.checked_mul(self.den)?)?;
        let im = self.im.checked_mul(other.den)?.checked_add(other.im.checked_mul(self.den)?)?;
        let den = self.den.checked_mul(other.den)?;
        Some(GaussRational::new(re, im, den))
    }

    fn checked_mul(self, other: GaussRational) -> Option<GaussRational> {
        let re = self.re.checked_mul(other.re)?.checked_sub(self.im.checked_mul(other.im)?)?;
        let im = self.re.checked_mul(other.im)?.checked_add(self.im.checked_mul(other.re)?)?;
        let den = self.den.checked_mul(other.den)?;
        Some(GaussRational::new(re, im, den))
    }

    fn checked_div(self, other: GaussRational) -> Option<GaussRational> {
        if other.is_zero() {
            return None;
        }
        let norm = other.re.checked_mul(other.re)?.checked_add(other.im.checked_mul(other.im)?)?;
        let re = self.re.checked_mul(other.re)?.checked_add(self.im.checked_mul(other.im)?)?;
        let im = self.im.checked_mul(other.re)?.checked_sub(self.re.checked_mul(other.im)?)?;
        let den = self.den.checked_mul(norm)?;
        let scale = other.den;
        Some(GaussRational::new(re.checked_mul(scale)?, im.checked_mul(scale)?, den))
    }

    /// Lossless embedding into a floating complex scalar.
    pub fn to_complex<T: Real>(self) -> Complex<T> {
        let d = T::from_i128_near(self.den);
        Complex::new(T::from_i128_near(self.re) / d, T::from_i128_near(self.im) / d)
    }
}

/// Exact evaluation of a terminating `pFq` with Gaussian-rational
/// parameters. Returns `None` when the sum does not terminate, a
/// denominator Pochhammer vanishes in range, or `i128` arithmetic
/// overflows; callers fall back to the floating path.
pub fn pfq_terminating_exact(
    numerator_params: &[GaussRational],
    denominator_params: &[GaussRational],
    argument: GaussRational,
) -> Option<GaussRational> {
    let k = numerator_params
        .iter()
        .filter_map(|a| a.nonpositive_integer_index())
        .min()?;
    if k > MAX_TERMINATION {
        return None;
    }
    for b in denominator_params {
        if let Some(n) = b.nonpositive_integer_index() {
            if n < k {
                return None;
            }
        }
    }
    let mut term = GaussRational::from_int(1);
    let mut sum = term;
    for m in 0..k {
        let mr = GaussRational::from_int(m as i64);
        let mut ratio = argument.checked_div(GaussRational::from_int(m as i64 + 1))?;
        for a in numerator_params {
            ratio = ratio.checked_mul(a.checked_add(mr)?)?;
        }
        for b in denominator_params {
            ratio = ratio.checked_div(b.checked_add(mr)?)?;
        }
        term = term.checked_mul(ratio)?;
        if term.is_zero() {
            break;
        }
        sum = sum.checked_add(term)?;
    }
    Some(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::Dd;
    use proptest::prelude::*;

    fn c64(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn numerator_zero_gives_one() {
        let spec = HypergeometricSpec::at_unit(
            vec![c64(0.0, 0.0), c64(2.3, 1.1)],
            vec![c64(0.7, -0.2)],
        );
        let v = pfq_terminating(&spec).unwrap();
        assert_eq!(v, c64(1.0, 0.0));
    }

    #[test]
    fn two_f1_at_minus_one_is_two_terms() {
        // 2F1(-1, b; c; z) = 1 - b z / c
        let b = c64(2.0, 1.0);
        let cc = c64(0.5, -1.0);
        let z = c64(0.3, 0.0);
        let spec = HypergeometricSpec::with_argument(vec![c64(-1.0, 0.0), b], vec![cc], z);
        let got = pfq_terminating(&spec).unwrap();
        let want = c64(1.0, 0.0) - b * z / cc;
        assert!((got - want).norm() < 1e-15);
    }

    #[test]
    fn weight_one_four_f3_matches_hand_assembled_sum() {
        let spec = four_f3_weight_spec(1, 1.0f64, -1.0, 2.0);
        let got = pfq_terminating(&spec).unwrap();
        // two terms: 1 + (-1)(1)(1/4)(1/4 + i) / ((1/2)(1/2 - i)(1/2 + 2i))
        let num = c64(-1.0, 0.0) * c64(1.0, 0.0) * c64(0.25, 0.0) * c64(0.25, 1.0);
        let den = c64(0.5, 0.0) * c64(0.5, -1.0) * c64(0.5, 2.0);
        let want = c64(1.0, 0.0) + num / den;
        assert!((got - want).norm() < 1e-15, "got {got} want {want}");
    }

    #[test]
    fn denominator_pole_before_termination_is_an_error() {
        let spec = HypergeometricSpec::at_unit(
            vec![c64(-4.0, 0.0), c64(1.5, 0.0)],
            vec![c64(-2.0, 0.0)],
        );
        let err = pfq_terminating(&spec).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("b_1"), "message should identify the parameter: {msg}");
    }

    #[test]
    fn denominator_pole_past_termination_is_accepted() {
        let spec = HypergeometricSpec::at_unit(
            vec![c64(-2.0, 0.0), c64(1.5, 0.0)],
            vec![c64(-5.0, 0.0)],
        );
        assert!(pfq_terminating(&spec).is_ok());
    }

    #[test]
    fn missing_terminating_parameter_is_an_error() {
        let spec =
            HypergeometricSpec::at_unit(vec![c64(0.5, 0.0), c64(1.5, 1.0)], vec![c64(2.0, 0.0)]);
        assert!(pfq_terminating(&spec).is_err());
    }

    #[test]
    fn termination_index_is_minimum_over_candidates() {
        let spec = HypergeometricSpec::at_unit(
            vec![c64(-7.0, 0.0), c64(-3.0, 0.0), c64(1.5, 0.5)],
            vec![c64(2.0, 0.0)],
        );
        assert_eq!(spec.termination_index().unwrap(), 3);
    }

    #[test]
    fn exact_rational_path_matches_float_path() {
        // 3F2((-3, (3+2i)/2, 1/3); ((1-i)/3, 5/2); 1)
        let a = [
            GaussRational::from_int(-3),
            GaussRational::new(3, 2, 2),
            GaussRational::new(1, 0, 3),
        ];
        let b = [GaussRational::new(1, -1, 3), GaussRational::new(5, 0, 2)];
        let exact = pfq_terminating_exact(&a, &b, GaussRational::from_int(1)).unwrap();
        let spec = HypergeometricSpec::at_unit(
            a.iter().map(|g| g.to_complex::<Dd>()).collect(),
            b.iter().map(|g| g.to_complex::<Dd>()).collect(),
        );
        let float = pfq_terminating(&spec).unwrap();
        let want = exact.to_complex::<Dd>();
        let err = (float - want).norm().as_f64() / want.norm().as_f64();
        assert!(err < 1e-30, "rel err {err:e}");
    }

    #[test]
    fn exact_rational_arithmetic_reduces() {
        let x = GaussRational::new(2, 4, -6);
        assert_eq!(x, GaussRational::new(-1, -2, 3));
        let y = x.checked_mul(GaussRational::new(0, 1, 1)).unwrap();
        assert_eq!(y, GaussRational::new(2, -1, 3));
    }

    #[test]
    fn envelope_bounds_four_f3_on_sample_grid() {
        // constants measured over the grid r,t in [0,40] step 1.25; the
        // implied constant genuinely grows with k (about 2.5^k here)
        let c_k = [0.6f64, 1.1, 2.0, 5.0, 12.5, 31.0, 75.0];
        for k in 0..=6 {
            for &r in &[0.0f64, 2.5, 5.0, 13.75, 20.0, 40.0] {
                for &t in &[0.0f64, 2.5, 5.0, 20.0, 40.0] {
                    let spec = four_f3_weight_spec(k, r, -r, t);
                    let v = pfq_terminating(&spec).unwrap().norm();
                    let env = four_f3_envelope(k, r, t);
                    let ratio = v / env;
                    assert!(
                        ratio < c_k[k as usize],
                        "k={k} r={r} t={t} ratio={ratio}"
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn permutation_invariance(
            k in 0i32..6,
            are in -2.0f64..2.0, aim in -2.0f64..2.0,
            b1re in 0.3f64..2.0, b1im in -2.0f64..2.0,
            b2re in 0.3f64..2.0, b2im in -2.0f64..2.0,
        ) {
            let a = vec![c64(-(k as f64), 0.0), c64(are, aim), c64(0.25, 0.5)];
            let b = vec![c64(b1re, b1im), c64(b2re, b2im)];
            let forward = pfq_terminating(&HypergeometricSpec::at_unit(a.clone(), b.clone())).unwrap();
            let mut ar = a.clone();
            ar.rotate_left(1);
            let mut br = b.clone();
            br.reverse();
            let shuffled = pfq_terminating(&HypergeometricSpec::at_unit(ar, br)).unwrap();
            let scale = forward.norm().max(1.0);
            prop_assert!((forward - shuffled).norm() / scale < 1e-11);
        }

        #[test]
        fn sum_has_at_most_k_plus_one_terms(k in 0i32..8) {
            // appending a second terminating parameter farther out must not
            // change the value, because the sum already stopped at k
            let a1 = vec![c64(-(k as f64), 0.0), c64(k as f64, 0.0), c64(0.25, 0.7)];
            let a2 = {
                let mut v = a1.clone();
                v.push(c64(-(k as f64) - 3.0, 0.0));
                v
            };
            let b = vec![c64(0.5, 0.0), c64(0.5, 1.3)];
            let b2 = {
                let mut v = b.clone();
                // extra denominator compensating the extra numerator's scale
                v.push(c64(-(k as f64) - 3.0, 0.0));
                v
            };
            let lhs = pfq_terminating(&HypergeometricSpec::at_unit(a1, b)).unwrap();
            let rhs = pfq_terminating(&HypergeometricSpec::at_unit(a2, b2)).unwrap();
            let scale = lhs.norm().max(1.0);
            prop_assert!((lhs - rhs).norm() / scale < 1e-11);
        }
    }
}
