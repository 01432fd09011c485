//! Automorphic-form data: normalization constants for shifted forms,
//! Fourier coefficients, fixture ingestion, and pointwise evaluation of
//! Maass, holomorphic, and Eisenstein expansions.
//!
//! Evaluators work at unit `rho(1)` unless told otherwise; every identity
//! checked downstream is homogeneous in that constant, and the physical
//! value is recovered from the adjoint L-value when needed. Coefficients
//! are unitary Hecke eigenvalues `lambda(n)` with `lambda(1) = 1`.

use std::path::Path;

use num_complex::Complex;

use crate::quad::{Compensated, GaussLegendre};
use crate::real::Real;
use crate::special::{cgamma, factorial, incomplete_gamma_upper, real_power};
use crate::whittaker::{whittaker_w, WhittakerParams};
use crate::{Error, Result, SeriesValue};

/// Branch selector for the raising constants and for Fourier modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    /// The `+` branch (positive Fourier modes, `y > 0`).
    Plus,
    /// The `-` branch (negative Fourier modes, `y < 0`).
    Minus,
}

impl Sign {
    /// Sign of a nonzero integer.
    pub fn of(n: i64) -> Sign {
        if n >= 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// The opposite branch.
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// `+1` or `-1` in the scalar type.
    pub fn scalar<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

/// Reflection parity of a Maass form under `z -> -conj(z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    /// Eigenvalue `+1`; cosine expansion.
    Even,
    /// Eigenvalue `-1`; sine expansion.
    Odd,
}

impl Parity {
    /// The exponent `kappa` in `sgn(n)^kappa` (0 or 1).
    pub fn kappa(self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    /// `+1` or `-1` in the scalar type.
    pub fn scalar<T: Real>(self) -> T {
        match self {
            Parity::Even => T::one(),
            Parity::Odd => -T::one(),
        }
    }

    fn parse(text: &str) -> Result<Parity> {
        match text {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(Error::parse(format!("parity {other:?}"))),
        }
    }
}

/// Raising constant `(-1)^k Gamma(1/2 + ir) / Gamma(1/2 +- k + ir)`
/// relating a shifted Maass form's weight-`2k` Whittaker coefficient to
/// its weight-zero one; `sign` selects the branch in the denominator.
///
/// Both branches collapse to finite products through the gamma
/// recurrence, so no transcendental evaluation is involved and the
/// recurrence identities hold to working precision by construction.
/// Negative `k` reduces through the symmetry `D^+(-k) = D^-(k)`.
pub fn d_k_r<T: Real>(k: i32, r: T, sign: Sign) -> Complex<T> {
    let (k, sign) = if k < 0 { (-k, sign.flip()) } else { (k, sign) };
    let half = T::from_f64(0.5);
    let parity = if k % 2 == 0 { T::one() } else { -T::one() };
    let mut acc = Complex::new(parity, T::zero());
    match sign {
        Sign::Plus => {
            let mut denom = Complex::new(T::one(), T::zero());
            for j in 0..k {
                denom = denom * Complex::new(half + T::from_f64(j as f64), r);
            }
            acc / denom
        }
        Sign::Minus => {
            for j in 1..=k {
                acc = acc * Complex::new(half - T::from_f64(j as f64), r);
            }
            acc
        }
    }
}

/// Bottom-normalization constant
/// `(-1)^(k-ell) sqrt(Gamma(2 ell) / (Gamma(k+ell) Gamma(k-ell+1)))`
/// attached to the weight-`2k` shift of a holomorphic form of weight
/// `2 ell`. Requires `k >= ell >= 1`.
///
/// The gamma ratio is accumulated as the integer product
/// `Gamma(k+ell)/Gamma(2 ell) = prod_(j=2 ell)^(k+ell-1) j` times
/// `(k-ell)!`, avoiding overflow of the individual gamma values.
pub fn c_k_l<T: Real>(k: u32, ell: u32) -> Result<T> {
    if ell == 0 || k < ell {
        return Err(Error::domain(format!(
            "c_k_l: need k >= ell >= 1, got k={k}, ell={ell}"
        )));
    }
    let mut inv_sq = T::one();
    for j in (2 * ell)..(k + ell) {
        inv_sq = inv_sq * T::from_f64(j as f64);
    }
    inv_sq = inv_sq * factorial::<T>(k - ell);
    let sign = if (k - ell) % 2 == 0 {
        T::one()
    } else {
        -T::one()
    };
    Ok(sign / inv_sq.sqrt())
}

/// Documented cap for [`tau_coefficients`]; keeps every intermediate of
/// the eta-power convolution inside `i128` with a wide margin.
pub const TAU_MAX_N: usize = 400_000;

/// Exact Ramanujan tau values `tau(1), ..., tau(n_max)` from the weight-12
/// discriminant expansion `q prod (1 - q^m)^24`.
///
/// The cube `prod (1 - q^m)^3 = sum_k (-1)^k (2k+1) q^(k(k+1)/2)` is
/// sparse with about `sqrt(2 n_max)` terms, so the 24th power costs seven
/// convolutions of a dense series against that sparse cube. Every pass is
/// preceded by a worst-case `i128` overflow check on the running
/// coefficients, after which raw arithmetic is safe.
pub fn tau_coefficients(n_max: usize) -> Result<Vec<i128>> {
    if n_max == 0 {
        return Err(Error::domain("tau_coefficients requires n_max >= 1"));
    }
    if n_max > TAU_MAX_N {
        return Err(Error::domain(format!(
            "tau_coefficients: n_max = {n_max} exceeds the supported cap {TAU_MAX_N}"
        )));
    }
    let len = n_max;
    let mut cube: Vec<(usize, i128)> = Vec::new();
    let mut k = 0usize;
    loop {
        let e = k * (k + 1) / 2;
        if e >= len {
            break;
        }
        let c = (2 * k + 1) as i128;
        cube.push((e, if k % 2 == 0 { c } else { -c }));
        k += 1;
    }
    let weight_sum: u128 = cube.iter().map(|&(_, c)| c.unsigned_abs()).sum();

    let mut acc = vec![0i128; len];
    for &(e, c) in &cube {
        acc[e] = c;
    }
    for pass in 0..7 {
        let max_abs = acc.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        let bound = max_abs.checked_mul(weight_sum);
        if bound.is_none() || bound.unwrap() > i128::MAX as u128 {
            return Err(Error::domain(format!(
                "tau_coefficients: pass {pass} would overflow i128 at n_max = {n_max}"
            )));
        }
        let mut next = vec![0i128; len];
        for &(e, c) in &cube {
            for i in 0..len - e {
                let a = acc[i];
                if a != 0 {
                    next[i + e] += a * c;
                }
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Access to a stored range of unitary Hecke eigenvalues.
pub trait HeckeEigenvalues<T: Real> {
    /// Eigenvalue `lambda(n)`; errors past the stored range, naming the
    /// required index.
    fn lambda(&self, n: u64) -> Result<T>;
    /// Largest stored index.
    fn max_n(&self) -> u64;
    /// Claimed absolute accuracy of the stored values.
    fn coeff_precision(&self) -> f64;
}

fn lambda_at<T: Real>(hecke: &[T], n: u64, what: &str) -> Result<T> {
    if n == 0 {
        return Err(Error::domain(format!("{what}: lambda(0) is undefined")));
    }
    hecke.get((n - 1) as usize).copied().ok_or_else(|| {
        Error::domain(format!(
            "{what}: stored eigenvalues end at n = {}, need n = {n}",
            hecke.len()
        ))
    })
}

/// Spectral data for a Maass cusp form on the modular surface: positive
/// spectral parameter `r`, reflection parity, unitary Hecke eigenvalues,
/// and optionally the adjoint L-value at 1.
#[derive(Clone, Debug)]
pub struct MaassFormData<T> {
    r: T,
    parity: Parity,
    hecke: Vec<T>,
    l1ad: Option<T>,
    coeff_precision: f64,
}

impl<T: Real> MaassFormData<T> {
    /// Validates and wraps the data; `hecke[0]` must be `lambda(1) = 1`.
    pub fn new(r: T, parity: Parity, hecke: Vec<T>, coeff_precision: f64) -> Result<Self> {
        if !(r > T::zero()) {
            return Err(Error::domain("MaassFormData: spectral parameter must be positive"));
        }
        if !(coeff_precision > 0.0) {
            return Err(Error::domain("MaassFormData: coeff_precision must be positive"));
        }
        let lead = hecke.first().copied().ok_or_else(|| {
            Error::domain("MaassFormData: no coefficients; lambda(1) = 1 is required")
        })?;
        if (lead - T::one()).abs().as_f64() > coeff_precision.max(1e-12) {
            return Err(Error::domain(format!(
                "MaassFormData: lambda(1) = {} but must be 1",
                lead.as_f64()
            )));
        }
        Ok(MaassFormData { r, parity, hecke, l1ad: None, coeff_precision })
    }

    /// Spectral parameter `r` (eigenvalue `1/4 + r^2`).
    pub fn r(&self) -> T {
        self.r
    }

    /// Reflection parity.
    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Attaches the adjoint L-value at 1.
    pub fn with_l1ad(mut self, value: T) -> Self {
        self.l1ad = Some(value);
        self
    }

    /// Adjoint L-value at 1, when known.
    pub fn l1ad(&self) -> Option<T> {
        self.l1ad
    }

    /// First-coefficient normalization
    /// `rho(1)^2 = cosh(pi r) / (2 L(1, ad))` of the unit-norm form.
    pub fn rho1_squared(&self) -> Result<T> {
        let l1ad = self.l1ad.ok_or_else(|| {
            Error::domain("rho1_squared needs the adjoint L-value; attach it with with_l1ad")
        })?;
        Ok((T::PI() * self.r).cosh() / (T::from_f64(2.0) * l1ad))
    }
}

impl<T: Real> HeckeEigenvalues<T> for MaassFormData<T> {
    fn lambda(&self, n: u64) -> Result<T> {
        lambda_at(&self.hecke, n, "MaassFormData")
    }

    fn max_n(&self) -> u64 {
        self.hecke.len() as u64
    }

    fn coeff_precision(&self) -> f64 {
        self.coeff_precision
    }
}

/// Data for a holomorphic Hecke cusp form of weight `2 ell` on the full
/// modular group, in the unitary normalization.
#[derive(Clone, Debug)]
pub struct HolomorphicFormData<T> {
    ell: u32,
    hecke: Vec<T>,
    l1ad: Option<T>,
    coeff_precision: f64,
}

impl<T: Real> HolomorphicFormData<T> {
    /// Validates and wraps the data; `hecke[0]` must be `lambda(1) = 1`.
    pub fn new(ell: u32, hecke: Vec<T>, coeff_precision: f64) -> Result<Self> {
        if ell == 0 {
            return Err(Error::domain("HolomorphicFormData: ell must be at least 1"));
        }
        if !(coeff_precision > 0.0) {
            return Err(Error::domain("HolomorphicFormData: coeff_precision must be positive"));
        }
        let lead = hecke.first().copied().ok_or_else(|| {
            Error::domain("HolomorphicFormData: no coefficients; lambda(1) = 1 is required")
        })?;
        if (lead - T::one()).abs().as_f64() > coeff_precision.max(1e-12) {
            return Err(Error::domain(format!(
                "HolomorphicFormData: lambda(1) = {} but must be 1",
                lead.as_f64()
            )));
        }
        Ok(HolomorphicFormData { ell, hecke, l1ad: None, coeff_precision })
    }

    /// The discriminant form (weight 12), with eigenvalues
    /// `tau(n) / n^(11/2)` from the exact integer expansion, rounded once
    /// into the working scalar.
    pub fn delta(n_max: usize) -> Result<Self> {
        let tau = tau_coefficients(n_max)?;
        let hecke = tau
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let n = T::from_f64((i + 1) as f64);
                T::from_i128_near(t) / n.powi(11).sqrt()
            })
            .collect();
        let prec = 8.0 * T::unit_roundoff().as_f64();
        HolomorphicFormData::new(6, hecke, prec).map(|f| HolomorphicFormData { ell: 6, ..f })
    }

    /// Half the weight: the form has weight `2 ell`.
    pub fn ell(&self) -> u32 {
        self.ell
    }

    /// Attaches the adjoint L-value at 1.
    pub fn with_l1ad(mut self, value: T) -> Self {
        self.l1ad = Some(value);
        self
    }

    /// Adjoint L-value at 1, when known.
    pub fn l1ad(&self) -> Option<T> {
        self.l1ad
    }

    /// First-coefficient normalization
    /// `rho(1)^2 = pi / (2 Gamma(2 ell) L(1, ad))` of the unit-norm form.
    pub fn rho1_squared(&self) -> Result<T> {
        let l1ad = self.l1ad.ok_or_else(|| {
            Error::domain("rho1_squared needs the adjoint L-value; attach it with with_l1ad")
        })?;
        let gamma_2ell = factorial::<T>(2 * self.ell - 1);
        Ok(T::PI() / (T::from_f64(2.0) * gamma_2ell * l1ad))
    }
}

impl<T: Real> HeckeEigenvalues<T> for HolomorphicFormData<T> {
    fn lambda(&self, n: u64) -> Result<T> {
        lambda_at(&self.hecke, n, "HolomorphicFormData")
    }

    fn max_n(&self) -> u64 {
        self.hecke.len() as u64
    }

    fn coeff_precision(&self) -> f64 {
        self.coeff_precision
    }
}

/// Parameters of a unitary Eisenstein series shifted to weight `2k`.
#[derive(Clone, Copy, Debug)]
pub struct EisensteinParams<T> {
    /// Spectral parameter in `1/2 + it`; must be nonzero.
    pub t: T,
    /// Half the weight.
    pub k: i32,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Checks Hecke multiplicativity
/// `lambda(m) lambda(n) = sum over d | gcd(m, n) of lambda(m n / d^2)`
/// for all `m, n <= max_n` with `m n` inside the stored range, returning
/// the worst absolute residual. A residual beyond ten times the claimed
/// coefficient precision (scaled by the divisor count) is an error naming
/// the offending pair.
pub fn hecke_validate<T: Real, F: HeckeEigenvalues<T>>(form: &F, max_n: u64) -> Result<f64> {
    let stored = form.max_n();
    let mut worst = 0.0f64;
    for m in 2..=max_n {
        for n in m..=max_n {
            if m * n > stored {
                continue;
            }
            let mut rhs = T::zero();
            let mut divisors = 0u32;
            let g = gcd(m, n);
            let mut d = 1u64;
            while d <= g {
                if g % d == 0 {
                    rhs += form.lambda(m * n / (d * d))?;
                    divisors += 1;
                }
                d += 1;
            }
            let lhs = form.lambda(m)? * form.lambda(n)?;
            let resid = (lhs - rhs).abs().as_f64();
            let tol = 10.0 * form.coeff_precision() * (2.0 + divisors as f64);
            if resid > tol {
                return Err(Error::domain(format!(
                    "Hecke relation fails at (m, n) = ({m}, {n}): residual {resid:.3e} \
                     exceeds {tol:.3e}"
                )));
            }
            worst = worst.max(resid);
        }
    }
    Ok(worst)
}

/// Fixture file layout: `key value` header lines (`type`, `r` or `ell`,
/// `parity`, `coeff_precision`, optional `l1ad`) followed by `n value`
/// coefficient lines; `#` starts a comment and blank lines separate
/// records.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormFormat {
    /// The whitespace key/value layout described on [`FormFormat`].
    KeyValue,
}

/// A parsed, validated fixture record.
#[derive(Clone, Debug)]
pub enum FormRecord<T> {
    /// A Maass cusp form.
    Maass(MaassFormData<T>),
    /// A holomorphic cusp form.
    Holomorphic(HolomorphicFormData<T>),
}

/// Reads and validates every record in a fixture file. Decimal fields are
/// parsed exactly into the working scalar (no locale); each record's
/// Hecke relations are checked up to `m, n <= 30` before it is returned,
/// so a malformed table fails here, naming the offending pair.
pub fn ingest_forms<T: Real>(path: &Path, format: FormFormat) -> Result<Vec<FormRecord<T>>> {
    let FormFormat::KeyValue = format;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::missing_fixture(format!("{}: {e}", path.display())))?;
    let origin = path.display().to_string();
    let mut records = Vec::new();
    for block in text.split("\n\n") {
        if block
            .lines()
            .all(|l| l.split('#').next().unwrap_or("").trim().is_empty())
        {
            continue;
        }
        let record = parse_record::<T>(block, &origin)?;
        let max_sweep = match &record {
            FormRecord::Maass(f) => 30.min((f.max_n() as f64).sqrt() as u64),
            FormRecord::Holomorphic(f) => 30.min((f.max_n() as f64).sqrt() as u64),
        };
        match &record {
            FormRecord::Maass(f) => {
                hecke_validate(f, max_sweep)
                    .map_err(|e| Error::domain(format!("{origin}: {e}")))?;
            }
            FormRecord::Holomorphic(f) => {
                hecke_validate(f, max_sweep)
                    .map_err(|e| Error::domain(format!("{origin}: {e}")))?;
            }
        }
        records.push(record);
    }
    if records.is_empty() {
        return Err(Error::parse(format!("{origin}: no records")));
    }
    Ok(records)
}

fn parse_record<T: Real>(block: &str, origin: &str) -> Result<FormRecord<T>> {
    let mut kind: Option<String> = None;
    let mut r: Option<T> = None;
    let mut ell: Option<u32> = None;
    let mut parity: Option<Parity> = None;
    let mut precision: Option<f64> = None;
    let mut l1ad: Option<T> = None;
    let mut coeffs: Vec<(u64, T)> = Vec::new();

    for raw in block.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let key = it.next().unwrap();
        let rest = it.next().ok_or_else(|| Error::parse(format!("{origin}: line {line:?}")))?;
        if it.next().is_some() {
            return Err(Error::parse(format!("{origin}: trailing tokens on {line:?}")));
        }
        if let Ok(n) = key.parse::<u64>() {
            let value = T::parse_full(rest)
                .map_err(|_| Error::parse(format!("{origin}: coefficient line {line:?}")))?;
            coeffs.push((n, value));
            continue;
        }
        match key {
            "type" => kind = Some(rest.to_string()),
            "r" => {
                r = Some(T::parse_full(rest).map_err(|_| {
                    Error::parse(format!("{origin}: r value {rest:?}"))
                })?)
            }
            "ell" => {
                ell = Some(rest.parse::<u32>().map_err(|_| {
                    Error::parse(format!("{origin}: ell value {rest:?}"))
                })?)
            }
            "parity" => parity = Some(Parity::parse(rest)?),
            "coeff_precision" => {
                precision = Some(rest.parse::<f64>().map_err(|_| {
                    Error::parse(format!("{origin}: coeff_precision value {rest:?}"))
                })?)
            }
            "l1ad" => {
                l1ad = Some(T::parse_full(rest).map_err(|_| {
                    Error::parse(format!("{origin}: l1ad value {rest:?}"))
                })?)
            }
            other => return Err(Error::parse(format!("{origin}: unknown key {other:?}"))),
        }
    }

    coeffs.sort_by_key(|&(n, _)| n);
    let mut hecke = Vec::with_capacity(coeffs.len());
    for (want, &(n, v)) in coeffs.iter().enumerate() {
        let want = want as u64 + 1;
        if n != want {
            return Err(Error::parse(format!(
                "{origin}: coefficient index {n} where {want} was expected (gap or duplicate)"
            )));
        }
        hecke.push(v);
    }

    let precision = precision
        .ok_or_else(|| Error::parse(format!("{origin}: missing coeff_precision")))?;
    let kind = kind.ok_or_else(|| Error::parse(format!("{origin}: missing type")))?;
    match kind.as_str() {
        "maass" => {
            let r = r.ok_or_else(|| Error::parse(format!("{origin}: maass record missing r")))?;
            let parity = parity
                .ok_or_else(|| Error::parse(format!("{origin}: maass record missing parity")))?;
            let mut form = MaassFormData::new(r, parity, hecke, precision)?;
            if let Some(v) = l1ad {
                form = form.with_l1ad(v);
            }
            Ok(FormRecord::Maass(form))
        }
        "holomorphic" => {
            let ell = ell
                .ok_or_else(|| Error::parse(format!("{origin}: holomorphic record missing ell")))?;
            let mut form = HolomorphicFormData::new(ell, hecke, precision)?;
            if let Some(v) = l1ad {
                form = form.with_l1ad(v);
            }
            Ok(FormRecord::Holomorphic(form))
        }
        other => Err(Error::parse(format!("{origin}: unknown type {other:?}"))),
    }
}

/// Height floor for the pointwise evaluators; below this the expansions
/// need so many modes that the geometric tail estimate degrades.
pub const MIN_EVAL_HEIGHT: f64 = 0.02;

fn unit_phase<T: Real>(turns: T) -> Complex<T> {
    let theta = T::from_f64(2.0) * T::PI() * turns;
    Complex::new(theta.cos(), theta.sin())
}

fn eval_whittaker_tol<T: Real>() -> f64 {
    2f64.powi(13 - T::BITS as i32)
}

struct TailModel {
    envelope_power: f64,
    two_pi_y: f64,
    prefactor: f64,
}

impl TailModel {
    fn new(k_abs: u32, y: f64, prefactor: f64) -> TailModel {
        TailModel { envelope_power: k_abs as f64, two_pi_y: 2.0 * core::f64::consts::PI * y, prefactor }
    }

    /// Smallest mode count whose geometric tail ratio stays below 0.9.
    fn required_terms(&self) -> u32 {
        let slack = self.two_pi_y - 0.105;
        if slack <= 0.0 {
            u32::MAX
        } else {
            (self.envelope_power / slack).ceil().max(1.0) as u32
        }
    }

    fn ratio(&self, n: f64) -> f64 {
        self.envelope_power * (1.0 + 1.0 / (n + 1.0)).ln() - self.two_pi_y
    }

    /// Geometric bound on everything past mode `n`, using the observed
    /// coefficient scale.
    fn tail_after(&self, n: u32, coeff_scale: f64) -> f64 {
        let np = (n + 1) as f64;
        let u = 2.0 * self.two_pi_y * np;
        let log_env = self.envelope_power * u.ln() - u / 2.0 - 0.5 * np.ln();
        let ratio = self.ratio(np).exp();
        if ratio >= 1.0 {
            return f64::INFINITY;
        }
        self.prefactor * coeff_scale * log_env.exp() / (1.0 - ratio)
    }
}

fn check_contraction(model: &TailModel, n_terms: u32, what: &str) -> Result<()> {
    if model.ratio(n_terms as f64) >= -0.105 {
        return Err(Error::domain(format!(
            "{what}: {n_terms} modes cannot contract the tail at this height; \
             need at least {} modes",
            model.required_terms()
        )));
    }
    Ok(())
}

/// Evaluates the weight-`2k` shift of a Maass form at `z` by its two-sided
/// Fourier-Whittaker expansion with `n_terms` modes per sign and the given
/// `rho(1)` (pass 1 for the unit normalization).
///
/// The returned tail field is an a-posteriori estimate combining the
/// geometric mode envelope past the cutoff with the worst relative error
/// reported by the Whittaker evaluator.
pub fn eval_maass_shifted<T: Real>(
    form: &MaassFormData<T>,
    k: i32,
    z: Complex<T>,
    n_terms: u32,
    rho1: T,
) -> Result<SeriesValue<T>> {
    let y = z.im;
    let x = z.re;
    if y.as_f64() < MIN_EVAL_HEIGHT {
        return Err(Error::domain(format!(
            "eval_maass_shifted: Im z = {:.4} is below the floor {MIN_EVAL_HEIGHT}",
            y.as_f64()
        )));
    }
    if n_terms == 0 {
        return Err(Error::domain("eval_maass_shifted: n_terms must be positive"));
    }
    let dp = d_k_r(k, form.r, Sign::Plus);
    let dm = d_k_r(k, form.r, Sign::Minus);
    let model = TailModel::new(k.unsigned_abs(), y.as_f64(), dp.norm().as_f64() + dm.norm().as_f64());
    check_contraction(&model, n_terms, "eval_maass_shifted")?;

    let eps = form.parity.scalar::<T>();
    let plus = WhittakerParams::spectral(k, form.r);
    let minus = WhittakerParams::spectral(-k, form.r);
    let wtol = eval_whittaker_tol::<T>();
    let four_pi = T::from_f64(4.0) * T::PI();

    let mut acc = Compensated::<Complex<T>>::default();
    let mut coeff_scale = 0.0f64;
    let mut worst_rel = 0.0f64;
    for n in 1..=n_terms {
        let lam = form.lambda(u64::from(n))?;
        let nn = T::from_f64(f64::from(n));
        let u = four_pi * nn * y;
        if u.as_f64() > 1400.0 {
            break;
        }
        let wp = whittaker_w(&plus, u, wtol)?;
        let wm = whittaker_w(&minus, u, wtol)?;
        worst_rel = worst_rel.max(wp.achieved_rel_err).max(wm.achieved_rel_err);
        let coeff = rho1 * lam / nn.sqrt();
        let phase = unit_phase(nn * x);
        let term = (wp.value * dp * phase + wm.value * dm * phase.conj() * eps) * coeff;
        acc.add(term);
        coeff_scale = coeff_scale.max(lam.as_f64().abs());
    }
    let value = acc.total();
    let tail = model.tail_after(n_terms, coeff_scale.max(1.0) * rho1.as_f64().abs())
        + worst_rel * value.norm().as_f64();
    Ok(SeriesValue { value, tail })
}

/// Evaluates the weight-`2k` shift of a holomorphic form of weight
/// `2 ell` at `z` (`k >= ell`), or the conjugate-side shift for
/// `k <= -ell`, with `n_terms` modes and the given `rho(1)`.
///
/// Negative weights carry `e(-nx)` in place of `e(nx)`, which for real
/// coefficient data is the complex conjugate of the positive side.
pub fn eval_hol_shifted<T: Real>(
    form: &HolomorphicFormData<T>,
    k: i32,
    z: Complex<T>,
    n_terms: u32,
    rho1: T,
) -> Result<SeriesValue<T>> {
    let y = z.im;
    let x = z.re;
    if y.as_f64() < MIN_EVAL_HEIGHT {
        return Err(Error::domain(format!(
            "eval_hol_shifted: Im z = {:.4} is below the floor {MIN_EVAL_HEIGHT}",
            y.as_f64()
        )));
    }
    if n_terms == 0 {
        return Err(Error::domain("eval_hol_shifted: n_terms must be positive"));
    }
    let k_abs = k.unsigned_abs();
    if k_abs < form.ell {
        return Err(Error::domain(format!(
            "eval_hol_shifted: |k| = {k_abs} is below the lowest shift ell = {}",
            form.ell
        )));
    }
    let c = c_k_l::<T>(k_abs, form.ell)?;
    let model = TailModel::new(k_abs, y.as_f64(), c.as_f64().abs());
    check_contraction(&model, n_terms, "eval_hol_shifted")?;

    let params = WhittakerParams::discrete_series(k_abs, form.ell);
    let wtol = eval_whittaker_tol::<T>();
    let four_pi = T::from_f64(4.0) * T::PI();
    let x_sign = if k >= 0 { T::one() } else { -T::one() };

    let mut acc = Compensated::<Complex<T>>::default();
    let mut coeff_scale = 0.0f64;
    let mut worst_rel = 0.0f64;
    for n in 1..=n_terms {
        let lam = form.lambda(u64::from(n))?;
        let nn = T::from_f64(f64::from(n));
        let u = four_pi * nn * y;
        if u.as_f64() > 1400.0 {
            break;
        }
        let w = whittaker_w(&params, u, wtol)?;
        worst_rel = worst_rel.max(w.achieved_rel_err);
        let coeff = rho1 * c * lam / nn.sqrt();
        let phase = unit_phase(nn * x * x_sign);
        acc.add(w.value * phase * coeff);
        coeff_scale = coeff_scale.max(lam.as_f64().abs());
    }
    let value = acc.total();
    let tail = model.tail_after(n_terms, coeff_scale.max(1.0) * rho1.as_f64().abs())
        + worst_rel * value.norm().as_f64();
    Ok(SeriesValue { value, tail })
}

/// Evaluates the weight-`2k` unitary Eisenstein series at `1/2 + it`,
/// including the two constant-term powers with the scattering ratio of
/// completed zetas and the divisor-sum Fourier modes.
pub fn eval_eisenstein<T: Real>(
    params: &EisensteinParams<T>,
    z: Complex<T>,
    n_terms: u32,
) -> Result<SeriesValue<T>> {
    let y = z.im;
    let x = z.re;
    let t = params.t;
    let k = params.k;
    if t.is_zero() {
        return Err(Error::domain(
            "eval_eisenstein: t = 0 sits on the pole of the completed zeta in the constant term",
        ));
    }
    if y.as_f64() < MIN_EVAL_HEIGHT {
        return Err(Error::domain(format!(
            "eval_eisenstein: Im z = {:.4} is below the floor {MIN_EVAL_HEIGHT}",
            y.as_f64()
        )));
    }
    let two_t = t + t;
    let xi_plus = crate::lfun::xi_completed(Complex::new(T::one(), two_t))?;
    let xi_minus = crate::lfun::xi_completed(Complex::new(T::one(), -two_t))?;
    let dp = d_k_r(k, t, Sign::Plus);
    let dm = d_k_r(k, t, Sign::Minus);
    let parity = if k % 2 == 0 { T::one() } else { -T::one() };

    let half = T::from_f64(0.5);
    let s_plus = Complex::new(half, t);
    let s_minus = Complex::new(half, -t);
    let scattering = dp * dm * (xi_minus / xi_plus) * parity;
    let constant = real_power(y, s_plus) + scattering * real_power(y, s_minus);

    let model = TailModel::new(
        k.unsigned_abs(),
        y.as_f64(),
        (dp.norm().as_f64() + dm.norm().as_f64()) / xi_plus.norm().as_f64(),
    );
    check_contraction(&model, n_terms, "eval_eisenstein")?;

    let plus = WhittakerParams::spectral(k, t);
    let minus = WhittakerParams::spectral(-k, t);
    let wtol = eval_whittaker_tol::<T>();
    let four_pi = T::from_f64(4.0) * T::PI();

    let mut acc = Compensated::<Complex<T>>::default();
    let mut coeff_scale = 0.0f64;
    let mut worst_rel = 0.0f64;
    for n in 1..=n_terms {
        let lam = crate::lfun::lambda_divisor(u64::from(n), t)?;
        let nn = T::from_f64(f64::from(n));
        let u = four_pi * nn * y;
        if u.as_f64() > 1400.0 {
            break;
        }
        let wp = whittaker_w(&plus, u, wtol)?;
        let wm = whittaker_w(&minus, u, wtol)?;
        worst_rel = worst_rel.max(wp.achieved_rel_err).max(wm.achieved_rel_err);
        let coeff = lam / nn.sqrt();
        let phase = unit_phase(nn * x);
        let term = (wp.value * dp * phase + wm.value * dm * phase.conj()) * coeff / xi_plus;
        acc.add(term);
        coeff_scale = coeff_scale.max(lam.as_f64().abs());
    }
    let series = acc.total();
    let value = constant + series;
    let tail = model.tail_after(n_terms, coeff_scale.max(1.0))
        + worst_rel * series.norm().as_f64();
    Ok(SeriesValue { value, tail })
}

/// Independent weight-zero Eisenstein oracle through the incomplete-gamma
/// lattice representation of the associated Epstein zeta: with
/// `Q(m, n) = |m z + n|^2 / y`,
///
/// `Lambda_Q(s) = 1/(2(s-1)) - 1/(2s)
///   + (1/2) sum over (m, n) != 0 of
///     [(pi Q)^(-s) Gamma(s, pi Q) + (pi Q)^(s-1) Gamma(1-s, pi Q)]`
///
/// and `E(z, s) = pi^s Lambda_Q(s) / (Gamma(s) zeta(2s))`. The lattice sum
/// converges like a theta series, so successive square shells are added
/// until their contribution falls below `rel_tol`.
pub fn eisenstein_epstein_oracle<T: Real>(
    z: Complex<T>,
    s: Complex<T>,
    rel_tol: f64,
) -> Result<Complex<T>> {
    let y = z.im;
    if !(y > T::zero()) {
        return Err(Error::domain("eisenstein_epstein_oracle: Im z must be positive"));
    }
    if s.im.is_zero() && (s.re.is_zero() || s.re.is_one()) {
        return Err(Error::domain(
            "eisenstein_epstein_oracle: s = 0 and s = 1 are the constant-term poles",
        ));
    }
    let one = Complex::new(T::one(), T::zero());
    let pi = T::PI();
    let s1 = one - s;
    let q_of = |m: i64, n: i64| -> T {
        let re = T::from_f64(m as f64) * z.re + T::from_f64(n as f64);
        let im = T::from_f64(m as f64) * y;
        (re * re + im * im) / y
    };

    let mut lattice = Compensated::<Complex<T>>::default();
    let mut total_scale = 0.0f64;
    let mut settled = 0u32;
    let mut converged = false;
    for shell in 1..=60i64 {
        let mut shell_sum = Complex::new(T::zero(), T::zero());
        let mut visit = |m: i64, n: i64| -> Result<()> {
            let xq = pi * q_of(m, n);
            let g1 = incomplete_gamma_upper(s, xq)? * real_power(xq, -s);
            let g2 = incomplete_gamma_upper(s1, xq)? * real_power(xq, s - one);
            shell_sum = shell_sum + g1 + g2;
            Ok(())
        };
        for m in -shell..=shell {
            visit(m, shell)?;
            visit(m, -shell)?;
        }
        for n in (1 - shell)..shell {
            visit(shell, n)?;
            visit(-shell, n)?;
        }
        lattice.add(shell_sum * T::from_f64(0.5));
        total_scale = total_scale.max(lattice.clone().total().norm().as_f64());
        if shell_sum.norm().as_f64() <= rel_tol * total_scale.max(1e-300) {
            settled += 1;
            if settled >= 2 {
                converged = true;
                break;
            }
        } else {
            settled = 0;
        }
    }
    if !converged {
        return Err(Error::no_convergence(
            "eisenstein_epstein_oracle: lattice shells did not settle within 60",
        ));
    }
    let half = T::from_f64(0.5);
    let lam_q = Complex::new(half, T::zero()) / (s - one) - Complex::new(half, T::zero()) / s
        + lattice.total();
    let two_s = s + s;
    let denom = cgamma(s) * crate::lfun::zeta(two_s)?;
    Ok(lam_q * real_power(pi, s) / denom)
}

/// Quadrature plan for truncated fundamental-domain integrals: uniform
/// midpoint nodes in `x` and geometric Gauss-Legendre panels in `y`
/// running from the unit arc up to the truncation height.
#[derive(Clone, Copy, Debug)]
pub struct FdQuadratureConfig {
    /// Cusp truncation height.
    pub y_max: f64,
    /// Midpoint nodes across each `x` section.
    pub x_nodes: u32,
    /// Geometric panels between the arc and the truncation height.
    pub y_panels: u32,
    /// Gauss-Legendre order inside each panel.
    pub gl_order: u32,
    /// Fourier modes retained in each Whittaker column.
    pub n_terms: u32,
}

impl Default for FdQuadratureConfig {
    fn default() -> Self {
        FdQuadratureConfig { y_max: 8.0, x_nodes: 64, y_panels: 32, gl_order: 12, n_terms: 24 }
    }
}

/// Truncated Petersson norm of the unit-`rho(1)` expansion with
/// quadrature and cusp-tail diagnostics, and the adjoint L-value implied
/// by the normalization identity.
#[derive(Clone, Copy, Debug)]
pub struct FdNormReport<T> {
    /// The truncated integral of the squared modulus over the domain.
    pub norm: T,
    /// Discrepancy against a half-resolution pass.
    pub quad_error: f64,
    /// Estimated mass above the truncation height.
    pub cusp_tail: f64,
    /// Adjoint L-value from inverting the first-coefficient identity.
    pub l1ad: T,
}

/// Fundamental-domain Petersson norm at unit `rho(1)`.
pub trait PeterssonNormed<T: Real> {
    /// Integrates the squared modulus over the truncated fundamental
    /// domain and inverts the normalization identity to `L(1, ad)`.
    fn petersson_norm(&self, cfg: &FdQuadratureConfig) -> Result<FdNormReport<T>>;
}

fn fd_norm_pass<T, C, D>(
    y_max: f64,
    x_nodes: u32,
    y_panels: u32,
    gl_order: u32,
    column: &C,
    density: &D,
) -> Result<T>
where
    T: Real,
    C: Fn(T) -> Result<Vec<T>>,
    D: Fn(&[T], T) -> T,
{
    let y_lo = T::from_f64(0.75).sqrt();
    let ratio = (T::from_f64(y_max) / y_lo).powf(T::one() / T::from_f64(f64::from(y_panels)));
    let gl = GaussLegendre::<T>::new(gl_order as usize);
    let gl_x = GaussLegendre::<T>::new(x_nodes as usize);
    let half = T::from_f64(0.5);
    let two = T::from_f64(2.0);
    let mut acc = Compensated::<T>::default();
    let mut lo = y_lo;
    for _ in 0..y_panels {
        let hi = lo * ratio;
        for (yk, wk) in gl.mapped(lo, hi) {
            let col = column(yk)?;
            let x_min = if yk < T::one() {
                (T::one() - yk * yk).sqrt()
            } else {
                T::zero()
            };
            if half - x_min <= T::zero() {
                continue;
            }
            // Full rows take uniform nodes, exact for trigonometric
            // polynomials below the mode cutoff; rows clipped by the
            // unit arc take Gauss-Legendre nodes instead.
            let ix = if x_min.is_zero() {
                let step = half / T::from_f64(f64::from(x_nodes));
                let mut row = Compensated::<T>::default();
                for i in 0..x_nodes {
                    let x = step * T::from_f64(i as f64 + 0.5);
                    row.add(density(&col, x));
                }
                row.total() * step * two
            } else {
                let mut row = Compensated::<T>::default();
                for (xk, wxk) in gl_x.mapped(x_min, half) {
                    row.add(density(&col, xk) * wxk);
                }
                row.total() * two
            };
            acc.add(ix * wk / (yk * yk));
        }
        lo = hi;
    }
    Ok(acc.total())
}

fn fd_norm_with<T, C, D>(
    cfg: &FdQuadratureConfig,
    column: C,
    density: D,
    cusp_modes: impl Fn(u32) -> f64,
) -> Result<(T, f64, f64)>
where
    T: Real,
    C: Fn(T) -> Result<Vec<T>>,
    D: Fn(&[T], T) -> T,
{
    let fine = fd_norm_pass::<T, C, D>(
        cfg.y_max,
        cfg.x_nodes,
        cfg.y_panels,
        cfg.gl_order,
        &column,
        &density,
    )?;
    // The x-direction is exact by construction, so the comparison pass
    // refines only the y-quadrature.
    let coarse = fd_norm_pass::<T, C, D>(
        cfg.y_max,
        cfg.x_nodes,
        (cfg.y_panels / 2).max(4),
        (cfg.gl_order / 2).max(4),
        &column,
        &density,
    )?;
    let quad_error = (fine - coarse).abs().as_f64();

    // Mode-wise bound on the neglected cusp region: each mode decays at
    // least like e^(-2 pi n (y - Y)) past the truncation height.
    let col_top = column(T::from_f64(cfg.y_max))?;
    let mut cusp_tail = 0.0f64;
    for (i, c) in col_top.iter().enumerate() {
        let n = (i + 1) as f64;
        let c2 = c.as_f64() * c.as_f64();
        cusp_tail += cusp_modes(i as u32 + 1) * c2
            / (4.0 * core::f64::consts::PI * n * cfg.y_max * cfg.y_max);
    }
    Ok((fine, quad_error, cusp_tail))
}

impl<T: Real> PeterssonNormed<T> for MaassFormData<T> {
    fn petersson_norm(&self, cfg: &FdQuadratureConfig) -> Result<FdNormReport<T>> {
        let params = WhittakerParams::spectral(0, self.r);
        let wtol = eval_whittaker_tol::<T>();
        let four_pi = T::from_f64(4.0) * T::PI();
        let column = |y: T| -> Result<Vec<T>> {
            let mut col = Vec::with_capacity(cfg.n_terms as usize);
            for n in 1..=cfg.n_terms {
                let nn = T::from_f64(f64::from(n));
                let u = four_pi * nn * y;
                if u.as_f64() > 1400.0 {
                    break;
                }
                let w = whittaker_w(&params, u, wtol)?;
                col.push(self.lambda(u64::from(n))? / nn.sqrt() * w.value.re);
            }
            Ok(col)
        };
        let two_pi = T::from_f64(2.0) * T::PI();
        let parity = self.parity;
        let density = move |col: &[T], x: T| -> T {
            let mut s = T::zero();
            for (i, c) in col.iter().enumerate() {
                let arg = two_pi * T::from_f64((i + 1) as f64) * x;
                s += *c
                    * match parity {
                        Parity::Even => arg.cos(),
                        Parity::Odd => arg.sin(),
                    };
            }
            T::from_f64(4.0) * s * s
        };
        let (norm, quad_error, cusp_tail) = fd_norm_with(cfg, column, density, |_| 2.0)?;
        let l1ad = (T::PI() * self.r).cosh() * norm * T::from_f64(0.5);
        Ok(FdNormReport { norm, quad_error, cusp_tail, l1ad })
    }
}

impl<T: Real> PeterssonNormed<T> for HolomorphicFormData<T> {
    fn petersson_norm(&self, cfg: &FdQuadratureConfig) -> Result<FdNormReport<T>> {
        let params = WhittakerParams::discrete_series(self.ell, self.ell);
        let wtol = eval_whittaker_tol::<T>();
        let four_pi = T::from_f64(4.0) * T::PI();
        let column = |y: T| -> Result<Vec<T>> {
            let mut col = Vec::with_capacity(cfg.n_terms as usize);
            for n in 1..=cfg.n_terms {
                let nn = T::from_f64(f64::from(n));
                let u = four_pi * nn * y;
                if u.as_f64() > 1400.0 {
                    break;
                }
                let w = whittaker_w(&params, u, wtol)?;
                col.push(self.lambda(u64::from(n))? / nn.sqrt() * w.value.re);
            }
            Ok(col)
        };
        let two_pi = T::from_f64(2.0) * T::PI();
        let density = move |col: &[T], x: T| -> T {
            let mut re = T::zero();
            let mut im = T::zero();
            for (i, c) in col.iter().enumerate() {
                let arg = two_pi * T::from_f64((i + 1) as f64) * x;
                re += *c * arg.cos();
                im += *c * arg.sin();
            }
            re * re + im * im
        };
        let (norm, quad_error, cusp_tail) = fd_norm_with(cfg, column, density, |_| 1.0)?;
        let gamma_2ell = factorial::<T>(2 * self.ell - 1);
        let l1ad = T::PI() * norm / (T::from_f64(2.0) * gamma_2ell);
        Ok(FdNormReport { norm, quad_error, cusp_tail, l1ad })
    }
}

/// Finite-difference consistency report for the ladder operators on a
/// Maass form's tower of shifts.
#[derive(Clone, Copy, Debug)]
pub struct LadderReport {
    /// Relative error of `R_(2k) phi_k = (1/2 + k + ir) phi_(k+1)`.
    pub raising_rel_err: f64,
    /// Relative error of `L_(2k) phi_k = (1/2 - k + ir) phi_(k-1)`.
    pub lowering_rel_err: f64,
    /// Relative error of the weight-zero eigenvalue `1/4 + r^2`
    /// (populated only at `k = 0`).
    pub laplacian_rel_err: Option<f64>,
    /// Relative error of the round trip
    /// `L_(2k+2) R_(2k) phi_k = -((k + 1/2)^2 + r^2) phi_k`.
    pub composite_rel_err: f64,
    /// Set when the step is small enough that central differences are
    /// dominated by rounding noise.
    pub step_warning: bool,
}

/// Applies the raising and lowering operators
/// `R_(2k) = iy (d/dx - i d/dy) + k` and `L_(2k) = -iy (d/dx + i d/dy) - k`
/// by central differences of step `h` and compares against the
/// normalized neighbor shifts.
pub fn raising_lowering_check<T: Real>(
    form: &MaassFormData<T>,
    k: i32,
    z: Complex<T>,
    h: T,
    n_terms: u32,
) -> Result<LadderReport> {
    let eval = |kk: i32, zz: Complex<T>| -> Result<Complex<T>> {
        Ok(eval_maass_shifted(form, kk, zz, n_terms, T::one())?.value)
    };
    let two = T::from_f64(2.0);
    let iu = Complex::new(T::zero(), T::one());
    let ex = Complex::new(h, T::zero());
    let ey = Complex::new(T::zero(), h);
    let y = z.im;
    let r = form.r;
    let kt = T::from_f64(f64::from(k));
    let half = T::from_f64(0.5);

    let center = eval(k, z)?;
    let dx = (eval(k, z + ex)? - eval(k, z - ex)?) / (two * h);
    let dy = (eval(k, z + ey)? - eval(k, z - ey)?) / (two * h);

    let raising = (dx - iu * dy) * iu * y + center * kt;
    let want_r = Complex::new(half + kt, r) * eval(k + 1, z)?;
    let raising_rel_err = ((raising - want_r).norm() / want_r.norm()).as_f64();

    let lowering = (dx + iu * dy) * (-iu) * y - center * kt;
    let want_l = Complex::new(half - kt, r) * eval(k - 1, z)?;
    let lowering_rel_err = ((lowering - want_l).norm() / want_l.norm()).as_f64();

    let laplacian_rel_err = if k == 0 {
        let h2 = h * h;
        let dxx = (eval(0, z + ex)? - center * two + eval(0, z - ex)?) / h2;
        let dyy = (eval(0, z + ey)? - center * two + eval(0, z - ey)?) / h2;
        let lap = (dxx + dyy) * (-(y * y));
        let want = center * (T::from_f64(0.25) + r * r);
        Some(((lap - want).norm() / want.norm()).as_f64())
    } else {
        None
    };

    // Round trip with a wider step: R at five stencil points, then the
    // lowering operator at weight 2k + 2 across them.
    let h_wide = h * T::from_f64(4.0);
    let exw = Complex::new(h_wide, T::zero());
    let eyw = Complex::new(T::zero(), h_wide);
    let r_op = |zz: Complex<T>| -> Result<Complex<T>> {
        let c = eval(k, zz)?;
        let gx = (eval(k, zz + ex)? - eval(k, zz - ex)?) / (two * h);
        let gy = (eval(k, zz + ey)? - eval(k, zz - ey)?) / (two * h);
        Ok((gx - iu * gy) * iu * zz.im + c * kt)
    };
    let r0 = r_op(z)?;
    let rx = (r_op(z + exw)? - r_op(z - exw)?) / (two * h_wide);
    let ry = (r_op(z + eyw)? - r_op(z - eyw)?) / (two * h_wide);
    let kt1 = kt + T::one();
    let composite = (rx + iu * ry) * (-iu) * y - r0 * kt1;
    let want_c = center * (-((kt + half) * (kt + half) + r * r));
    let composite_rel_err = ((composite - want_c).norm() / want_c.norm()).as_f64();

    let noise_floor = T::unit_roundoff().as_f64().powf(1.0 / 3.0) * 4.0;
    Ok(LadderReport {
        raising_rel_err,
        lowering_rel_err,
        laplacian_rel_err,
        composite_rel_err,
        step_warning: h.as_f64() < noise_floor,
    })
}

/// Checks that the lowering operator annihilates the lowest holomorphic
/// shift: returns `|L_(2 ell) f_ell| / |f_ell|` at `z` by central
/// differences of step `h`; the quotient is `O(h^2)` for consistent data.
pub fn hol_annihilation_check<T: Real>(
    form: &HolomorphicFormData<T>,
    z: Complex<T>,
    h: T,
    n_terms: u32,
) -> Result<f64> {
    let ell = form.ell as i32;
    let eval = |zz: Complex<T>| -> Result<Complex<T>> {
        Ok(eval_hol_shifted(form, ell, zz, n_terms, T::one())?.value)
    };
    let two = T::from_f64(2.0);
    let iu = Complex::new(T::zero(), T::one());
    let ex = Complex::new(h, T::zero());
    let ey = Complex::new(T::zero(), h);
    let center = eval(z)?;
    let dx = (eval(z + ex)? - eval(z - ex)?) / (two * h);
    let dy = (eval(z + ey)? - eval(z - ey)?) / (two * h);
    let lowered = (dx + iu * dy) * (-iu) * z.im - center * T::from_f64(f64::from(ell));
    Ok((lowered.norm() / center.norm()).as_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::cgamma;

    #[test]
    fn raising_constant_weight_zero_is_unity() {
        for r in [0.0_f64, 0.7, 9.5337] {
            for sign in [Sign::Plus, Sign::Minus] {
                let d = d_k_r(0, r, sign);
                assert_eq!(d.re, 1.0);
                assert_eq!(d.im, 0.0);
            }
        }
    }

    #[test]
    fn raising_constant_weight_one_at_spectral_zero() {
        let d = d_k_r::<f64>(1, 0.0, Sign::Plus);
        assert!((d.re + 2.0).abs() <= 1e-15);
        assert_eq!(d.im, 0.0);
    }

    #[test]
    fn raising_constant_matches_gamma_recurrence_oracle() {
        let lhs = d_k_r::<f64>(2, 1.0, Sign::Minus);
        let rhs = cgamma(Complex::new(0.5_f64, 1.0)) / cgamma(Complex::new(-1.5_f64, 1.0));
        assert!((lhs - rhs).norm() <= 1e-13 * rhs.norm());
    }

    #[test]
    fn raising_constant_recurrence_sweep() {
        for &r in &[0.0_f64, 0.3, 1.0, 9.5337] {
            for k in 0..8 {
                let step = Complex::new(0.5 + k as f64, r);
                let plus = d_k_r(k + 1, r, Sign::Plus) * step + d_k_r(k, r, Sign::Plus);
                assert!(plus.norm() <= 1e-14 * d_k_r::<f64>(k, r, Sign::Plus).norm());
                let back = Complex::new(-0.5 - k as f64, r);
                let minus = d_k_r(k + 1, r, Sign::Minus) + d_k_r(k, r, Sign::Minus) * back;
                assert!(minus.norm() <= 1e-14 * d_k_r::<f64>(k + 1, r, Sign::Minus).norm());
            }
        }
    }

    #[test]
    fn raising_constant_negative_weight_flips_branch() {
        let a = d_k_r::<f64>(-3, 0.4, Sign::Plus);
        let b = d_k_r::<f64>(3, 0.4, Sign::Minus);
        assert_eq!(a, b);
    }

    #[test]
    fn bottom_constant_diagonal_is_unity() {
        assert_eq!(c_k_l::<f64>(1, 1).unwrap(), 1.0);
        assert_eq!(c_k_l::<f64>(6, 6).unwrap(), 1.0);
    }

    #[test]
    fn bottom_constant_first_shift() {
        let c = c_k_l::<f64>(7, 6).unwrap();
        assert!((c + 1.0 / 12.0_f64.sqrt()).abs() <= 1e-16);
    }

    #[test]
    fn bottom_constant_factorial_oracle() {
        let c = c_k_l::<f64>(8, 6).unwrap();
        let exact = factorial::<f64>(11) / (factorial::<f64>(13) * factorial::<f64>(2));
        assert!(c > 0.0);
        assert!((c * c - exact).abs() <= 4e-16 * exact);
    }

    #[test]
    fn bottom_constant_rejects_bad_order() {
        assert!(c_k_l::<f64>(5, 6).is_err());
        assert!(c_k_l::<f64>(3, 0).is_err());
    }

    #[test]
    fn tau_anchor_values() {
        let tau = tau_coefficients(12).unwrap();
        assert_eq!(
            tau,
            vec![
                1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612,
                -370944
            ]
        );
    }

    #[test]
    fn tau_hecke_relations() {
        let tau = tau_coefficients(64).unwrap();
        let t = |n: usize| tau[n - 1];
        assert_eq!(t(6), t(2) * t(3));
        assert_eq!(t(12), t(3) * t(4));
        assert_eq!(t(4), t(2) * t(2) - (1i128 << 11) * t(1));
        assert_eq!(t(9), t(3) * t(3) - 3i128.pow(11));
        assert_eq!(t(35), t(5) * t(7));
    }

    #[test]
    fn tau_rejects_out_of_range() {
        assert!(tau_coefficients(0).is_err());
        assert!(tau_coefficients(TAU_MAX_N + 1).is_err());
    }

    #[test]
    fn delta_form_passes_hecke_validation() {
        let f = HolomorphicFormData::<f64>::delta(1000).unwrap();
        let worst = hecke_validate(&f, 30).unwrap();
        assert!(worst < 1e-13, "worst residual {worst:.3e}");
    }

    fn synthetic_maass(r: f64, parity: Parity, n_max: usize) -> MaassFormData<f64> {
        // Multiplicative by construction: primes get placeholder angles,
        // prime powers follow the rank-one Hecke recursion.
        let mut lam = vec![0.0f64; n_max + 1];
        lam[1] = 1.0;
        let mut spf = vec![0usize; n_max + 1];
        for i in 2..=n_max {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n_max {
                    if spf[j] == 0 {
                        spf[j] = i;
                    }
                    j += i;
                }
            }
        }
        for n in 2..=n_max {
            let p = spf[n];
            let mut m = n;
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if m > 1 {
                lam[n] = lam[m] * lam[n / m];
                continue;
            }
            // n = p^e
            let theta = 2.0 * core::f64::consts::PI * ((p as f64) * 0.6180339887498949).fract();
            let lp = 2.0 * theta.cos();
            if e == 1 {
                lam[n] = lp;
            } else {
                let pe1 = n / p;
                let pe2 = pe1 / p;
                lam[n] = lp * lam[pe1] - lam[pe2];
            }
        }
        MaassFormData::new(r, parity, lam[1..].to_vec(), 1e-13).unwrap()
    }

    #[test]
    fn synthetic_sequence_is_multiplicative() {
        let f = synthetic_maass(9.5337, Parity::Even, 900);
        let worst = hecke_validate(&f, 30).unwrap();
        assert!(worst < 1e-12, "worst residual {worst:.3e}");
    }

    #[test]
    fn hecke_validate_names_corrupted_pair() {
        let mut f = synthetic_maass(9.5337, Parity::Even, 64);
        f.hecke[5] += 1e-3; // lambda(6)
        let err = hecke_validate(&f, 6).unwrap_err().to_string();
        assert!(err.contains("(2, 3)"), "got {err}");
    }

    #[test]
    fn hol_expansion_matches_q_series_oracle() {
        // At the lowest shift the Whittaker factor is elementary and the
        // expansion telescopes to (4 pi y)^ell times the q-series.
        let f = HolomorphicFormData::<f64>::delta(64).unwrap();
        let z = Complex::new(0.3f64, 0.8);
        let got = eval_hol_shifted(&f, 6, z, 40, 1.0).unwrap();
        let tau = tau_coefficients(40).unwrap();
        let mut q_sum = Complex::new(0.0f64, 0.0);
        for n in (1..=40usize).rev() {
            let two_pi_n = 2.0 * core::f64::consts::PI * n as f64;
            let q_n = Complex::from_polar((-two_pi_n * z.im).exp(), two_pi_n * z.re);
            q_sum += Complex::new(tau[n - 1] as f64, 0.0) * q_n;
        }
        let want = q_sum * (4.0 * core::f64::consts::PI * z.im).powi(6);
        assert!((got.value - want).norm() <= 1e-12 * want.norm());
        assert!(got.tail < 1e-12);
    }

    #[test]
    fn hol_negative_weight_is_conjugate() {
        let f = HolomorphicFormData::<f64>::delta(48).unwrap();
        let z = Complex::new(0.17f64, 0.6);
        let plus = eval_hol_shifted(&f, 7, z, 30, 1.0).unwrap().value;
        let minus = eval_hol_shifted(&f, -7, z, 30, 1.0).unwrap().value;
        assert!((minus - plus.conj()).norm() <= 1e-14 * plus.norm());
    }

    #[test]
    fn hol_rejects_shift_below_ell() {
        let f = HolomorphicFormData::<f64>::delta(8).unwrap();
        let z = Complex::new(0.0f64, 1.0);
        assert!(eval_hol_shifted(&f, 5, z, 4, 1.0).is_err());
    }

    #[test]
    fn maass_expansion_parity_and_periodicity() {
        for parity in [Parity::Even, Parity::Odd] {
            let f = synthetic_maass(9.5337, parity, 128);
            let z = Complex::new(0.31f64, 0.83);
            let v = eval_maass_shifted(&f, 0, z, 24, 1.0).unwrap().value;
            let shifted = eval_maass_shifted(&f, 0, z + Complex::new(1.0, 0.0), 24, 1.0)
                .unwrap()
                .value;
            assert!((shifted - v).norm() <= 1e-12 * v.norm().max(1e-6));
            let mirrored = eval_maass_shifted(&f, 0, Complex::new(-z.re, z.im), 24, 1.0)
                .unwrap()
                .value;
            let want = v * parity.scalar::<f64>();
            assert!((mirrored - want).norm() <= 1e-12 * v.norm().max(1e-6));
        }
    }

    #[test]
    fn maass_tail_estimate_bounds_extension() {
        // The reported tail at a short cutoff must dominate what the
        // extra modes of a longer run actually contribute.
        let f = synthetic_maass(9.5337, Parity::Even, 256);
        let z = Complex::new(0.27f64, 0.24);
        let short = eval_maass_shifted(&f, 1, z, 30, 1.0).unwrap();
        let long = eval_maass_shifted(&f, 1, z, 120, 1.0).unwrap();
        let moved = (long.value - short.value).norm();
        assert!(moved <= short.tail, "moved {moved:.3e} vs tail {:.3e}", short.tail);
        assert!(long.tail < short.tail);
    }

    #[test]
    fn maass_rejects_low_points_and_names_required_terms() {
        let f = synthetic_maass(9.5337, Parity::Even, 64);
        let low = Complex::new(0.1f64, 0.001);
        assert!(eval_maass_shifted(&f, 0, low, 16, 1.0).is_err());
    }

    #[test]
    fn eisenstein_matches_lattice_oracle_at_i() {
        let params = EisensteinParams { t: 0.5f64, k: 0 };
        let z = Complex::new(0.0f64, 1.0);
        let got = eval_eisenstein(&params, z, 16).unwrap();
        let want = Complex::new(
            0.950144677526394774061305634226f64,
            -0.995153095616290088721957027341,
        );
        assert!(
            (got.value - want).norm() <= 1e-12 * want.norm(),
            "rel {:.3e}",
            (got.value - want).norm() / want.norm()
        );
        let oracle = eisenstein_epstein_oracle(z, Complex::new(0.5f64, 0.5), 1e-13).unwrap();
        assert!((oracle - want).norm() <= 1e-12 * want.norm());
    }

    #[test]
    fn epstein_oracle_is_modular() {
        let s = Complex::new(0.5f64, 0.7);
        let z = Complex::new(0.3f64, 0.8);
        let base = eisenstein_epstein_oracle(z, s, 1e-12).unwrap();
        let translated = eisenstein_epstein_oracle(z + Complex::new(1.0, 0.0), s, 1e-12).unwrap();
        let inverted = eisenstein_epstein_oracle(-z.inv(), s, 1e-12).unwrap();
        assert!((translated - base).norm() <= 1e-11 * base.norm());
        assert!((inverted - base).norm() <= 1e-11 * base.norm());
    }

    #[test]
    fn eisenstein_raising_consistency_by_finite_differences() {
        // R_(2k) E_(2k) = (1/2 + k + it) E_(2k+2) termwise in the
        // expansion, constant term included.
        let t = 0.5f64;
        let z = Complex::new(0.21f64, 1.1);
        let h = 1e-4f64;
        let eval = |k: i32, zz: Complex<f64>| {
            eval_eisenstein(&EisensteinParams { t, k }, zz, 20).unwrap().value
        };
        let ex = Complex::new(h, 0.0);
        let ey = Complex::new(0.0, h);
        let iu = Complex::new(0.0f64, 1.0);
        let k = 0i32;
        let dx = (eval(k, z + ex) - eval(k, z - ex)) / (2.0 * h);
        let dy = (eval(k, z + ey) - eval(k, z - ey)) / (2.0 * h);
        let raising = (dx - iu * dy) * iu * z.im + eval(k, z) * k as f64;
        let want = Complex::new(0.5 + k as f64, t) * eval(k + 1, z);
        assert!(
            (raising - want).norm() <= 1e-6 * want.norm(),
            "rel {:.3e}",
            (raising - want).norm() / want.norm()
        );
    }

    #[test]
    fn ladder_identities_on_synthetic_expansion() {
        let f = synthetic_maass(2.7, Parity::Odd, 96);
        let z = Complex::new(0.13f64, 0.95);
        let report = raising_lowering_check(&f, 0, z, 1e-3, 20).unwrap();
        assert!(report.raising_rel_err < 1e-5, "raising {:.3e}", report.raising_rel_err);
        assert!(report.lowering_rel_err < 1e-5, "lowering {:.3e}", report.lowering_rel_err);
        let lap = report.laplacian_rel_err.unwrap();
        assert!(lap < 1e-4, "laplacian {lap:.3e}");
        assert!(report.composite_rel_err < 1e-3, "composite {:.3e}", report.composite_rel_err);
        assert!(!report.step_warning);

        let up = raising_lowering_check(&f, 1, z, 1e-3, 20).unwrap();
        assert!(up.raising_rel_err < 1e-5);
        assert!(up.lowering_rel_err < 1e-5);
        assert!(up.laplacian_rel_err.is_none());
    }

    #[test]
    fn ladder_step_warning_fires() {
        let f = synthetic_maass(2.7, Parity::Even, 48);
        let z = Complex::new(0.1f64, 1.0);
        let report = raising_lowering_check(&f, 0, z, 1e-9, 12).unwrap();
        assert!(report.step_warning);
    }

    #[test]
    fn hol_lowest_shift_is_annihilated() {
        let f = HolomorphicFormData::<f64>::delta(64).unwrap();
        let z = Complex::new(0.23f64, 0.9);
        let quotient = hol_annihilation_check(&f, z, 1e-3, 30).unwrap();
        assert!(quotient < 1e-5, "quotient {quotient:.3e}");
    }

    #[test]
    fn rho1_squared_two_routes_agree() {
        // cosh(pi r)/(2 L) equals pi/(2 |Gamma(1/2 + ir)|^2 L).
        let r = 9.5337f64;
        let f = synthetic_maass(r, Parity::Even, 4).with_l1ad(1.7);
        let direct = f.rho1_squared().unwrap();
        let gamma_pair = (cgamma(Complex::new(0.5f64, r)) * cgamma(Complex::new(0.5f64, -r))).re;
        let via_gamma = core::f64::consts::PI / (2.0 * gamma_pair * 1.7);
        assert!((direct - via_gamma).abs() <= 1e-12 * direct.abs());
    }

    #[test]
    fn ingest_roundtrip_and_validation() {
        let dir = std::env::temp_dir();
        let path = dir.join("periodlab_forms_roundtrip.txt");
        let f = synthetic_maass(9.5337, Parity::Odd, 36);
        let mut text = String::from("type maass\nr 9.5337\nparity odd\ncoeff_precision 1e-12\n");
        for n in 1..=36u64 {
            text.push_str(&format!("{n} {:.17e}\n", f.lambda(n).unwrap()));
        }
        std::fs::write(&path, &text).unwrap();
        let records = ingest_forms::<f64>(&path, FormFormat::KeyValue).unwrap();
        assert_eq!(records.len(), 1);
        match &records[0] {
            FormRecord::Maass(g) => {
                assert_eq!(g.parity(), Parity::Odd);
                assert!((g.r() - 9.5337).abs() < 1e-15);
                assert!((g.lambda(12).unwrap() - f.lambda(12).unwrap()).abs() < 1e-15);
            }
            FormRecord::Holomorphic(_) => panic!("wrong record type"),
        }
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn ingest_rejects_malformed_tables() {
        let dir = std::env::temp_dir();
        let bad_number = dir.join("periodlab_forms_badnum.txt");
        std::fs::write(
            &bad_number,
            "type maass\nr 1.0\nparity even\ncoeff_precision 1e-6\n1 1.0\n2 not_a_number\n",
        )
        .unwrap();
        assert!(ingest_forms::<f64>(&bad_number, FormFormat::KeyValue).is_err());
        std::fs::remove_file(&bad_number).ok();

        let gap = dir.join("periodlab_forms_gap.txt");
        std::fs::write(
            &gap,
            "type maass\nr 1.0\nparity even\ncoeff_precision 1e-6\n1 1.0\n3 0.5\n",
        )
        .unwrap();
        let err = ingest_forms::<f64>(&gap, FormFormat::KeyValue).unwrap_err().to_string();
        assert!(err.contains("index 3"), "got {err}");
        std::fs::remove_file(&gap).ok();

        let broken = dir.join("periodlab_forms_nonmult.txt");
        std::fs::write(
            &broken,
            "type maass\nr 1.0\nparity even\ncoeff_precision 1e-9\n1 1.0\n2 0.5\n3 0.25\n\
             4 -0.75\n5 0.1\n6 0.9\n7 0.0\n8 -0.1\n9 -0.9375\n",
        )
        .unwrap();
        let err = ingest_forms::<f64>(&broken, FormFormat::KeyValue).unwrap_err().to_string();
        assert!(err.contains("(2, 3)"), "got {err}");
        std::fs::remove_file(&broken).ok();
    }

    #[test]
    fn petersson_norm_is_stable_under_height_doubling() {
        let f = HolomorphicFormData::<f64>::delta(32).unwrap();
        let base = FdQuadratureConfig::default();
        let taller = FdQuadratureConfig { y_max: 16.0, y_panels: 40, ..base };
        let a = f.petersson_norm(&base).unwrap();
        let b = f.petersson_norm(&taller).unwrap();
        let rel = (a.norm - b.norm).abs() / a.norm;
        assert!(rel < 1e-8, "rel {rel:.3e}");
        assert!(a.cusp_tail < 1e-10);
        assert!(a.quad_error < 1e-6 * a.norm);
    }
}
