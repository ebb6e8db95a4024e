//! Classical and exceptional (X_m) Jacobi polynomials, the denominator
//! polynomial `xi_m`, the orthogonality weight and norms.
//!
//! All polynomials here are in `y = cosh(2 rho)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::RealPolynomial;
use crate::quadrature::{integrate_panels, GaussLegendre};
use crate::specfun::{gamma_ratio, pochhammer_real, ComplexValue};

const SINGULAR_TOL: f64 = 1e-10;

/// Model parameters `lambda = (g, h)` and the deformation index `m`.
///
/// Every derived quantity is recomputed from `(g, h, m)`:
///
/// * `A = (h - g - 2m)/2`, `B = (g + h)/2`
/// * `alpha = g + m - 1/2 = B - A - 1/2`, `beta = -h + m - 1/2 = -B - A - 1/2`
/// * `nu_B = (h - g)/2`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    g: f64,
    h: f64,
    m: usize,
}

impl FamilyParams {
    pub fn new(g: f64, h: f64, m: usize) -> Result<Self> {
        if !(g.is_finite() && h.is_finite()) {
            return Err(Error::InvalidParams("g and h must be finite".into()));
        }
        if !(g > 0.0) {
            return Err(Error::InvalidParams(format!("g must be positive, got {g}")));
        }
        if !(h > g) {
            return Err(Error::InvalidParams(format!("h must exceed g, got g={g}, h={h}")));
        }
        if !(h - g > 2.0 * m as f64) {
            return Err(Error::InvalidParams(format!(
                "h-g must exceed 2m (h-g = {}, m = {m})",
                h - g
            )));
        }
        Ok(Self { g, h, m })
    }

    /// Parameters without the admissibility checks. Used for the shifted
    /// `lambda + k delta` sets that appear inside identities.
    pub(crate) fn unchecked(g: f64, h: f64, m: usize) -> Self {
        Self { g, h, m }
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mf(&self) -> f64 {
        self.m as f64
    }

    pub fn a(&self) -> f64 {
        (self.h - self.g - 2.0 * self.mf()) / 2.0
    }

    pub fn b(&self) -> f64 {
        (self.g + self.h) / 2.0
    }

    pub fn alpha(&self) -> f64 {
        self.g + self.mf() - 0.5
    }

    pub fn beta(&self) -> f64 {
        -self.h + self.mf() - 0.5
    }

    pub fn nu_b(&self) -> f64 {
        (self.h - self.g) / 2.0
    }

    /// Same `(g, h)` with another deformation index.
    pub fn with_m(&self, m: usize) -> Result<Self> {
        Self::new(self.g, self.h, m)
    }

    /// `lambda + delta = (g + 1, h - 1)` at the same `m`.
    pub fn shifted(&self) -> Self {
        Self::unchecked(self.g + 1.0, self.h - 1.0, self.m)
    }

    /// Largest bound-state index: the largest integer strictly below `A`.
    pub fn max_nu(&self) -> usize {
        (self.a().ceil() as usize).saturating_sub(1)
    }

    /// Bound-state indices `0..=max_nu`.
    pub fn bound_indices(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.max_nu()
    }

    pub fn is_bound_index(&self, nu: usize) -> bool {
        (nu as f64) < self.a()
    }

    fn require_bound_index(&self, nu: usize) -> Result<()> {
        if self.is_bound_index(nu) {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "nu = {nu} is not a bound state (need nu < A = {})",
                self.a()
            )))
        }
    }
}

/// Classical Jacobi polynomial `P_n^{(a,b)}(y)`.
///
/// Uses the three-term recurrence; if one of its denominators
/// `2k(k+a+b)(2k+a+b-2)` vanishes for an intermediate degree the explicit
/// sum [`jacobi_explicit_sum`] is used instead. The explicit sum contains no
/// divisions by parameter-dependent factors, so every real `(a, b)` is
/// supported.
pub fn jacobi_classical(n: usize, a: f64, b: f64) -> RealPolynomial {
    if n == 0 {
        return RealPolynomial::one();
    }
    let mut p0 = RealPolynomial::one();
    let mut p1 = RealPolynomial::linear((a - b) / 2.0, (a + b + 2.0) / 2.0);
    for k in 2..=n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let den = 2.0 * kf * (kf + a + b) * (s - 2.0);
        let scale = 2.0 * kf * (kf + a.abs() + b.abs()) * (s.abs() + 2.0);
        if den.abs() <= 1e-12 * scale {
            return jacobi_explicit_sum(n, a, b);
        }
        let lin = RealPolynomial::linear((s - 1.0) * (a * a - b * b), (s - 1.0) * s * (s - 2.0));
        let c0 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * s;
        let p2 = (&(&lin * &p1) - &p0.scale(c0)).scale(1.0 / den);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `P_n^{(a,b)}(y) = (1/n!) sum_p C(n,p) (a+p+1)_{n-p} (a+b+n+1)_p ((y-1)/2)^p`,
/// the hypergeometric sum written with rising factorials.
pub fn jacobi_explicit_sum(n: usize, a: f64, b: f64) -> RealPolynomial {
    let mut coeffs_t = Vec::with_capacity(n + 1);
    let mut binom = 1.0;
    let mut n_fact = 1.0;
    for j in 1..=n {
        n_fact *= j as f64;
    }
    for p in 0..=n {
        if p > 0 {
            binom = binom * (n - p + 1) as f64 / p as f64;
        }
        let c = binom * pochhammer_real(a + p as f64 + 1.0, n - p) * pochhammer_real(a + b + n as f64 + 1.0, p);
        coeffs_t.push(c / n_fact);
    }
    // t = (y - 1)/2
    RealPolynomial::new(coeffs_t).compose_affine(-0.5, 0.5)
}

fn jacobi_or_zero(n: i64, a: f64, b: f64) -> RealPolynomial {
    if n < 0 {
        RealPolynomial::zero()
    } else {
        jacobi_classical(n as usize, a, b)
    }
}

/// `xi_l(y; g, h) = P_l^{(-g-l-1/2, -h+l-3/2)}(y)`, zero for `l < 0`.
pub fn xi_poly(l: i64, g: f64, h: f64) -> RealPolynomial {
    let lf = l as f64;
    jacobi_or_zero(l, -g - lf - 0.5, -h + lf - 1.5)
}

/// The denominator polynomial `xi_m(y; lambda)` of the family.
pub fn xi_m(params: &FamilyParams) -> RealPolynomial {
    xi_poly(params.m as i64, params.g, params.h)
}

fn check_factor(factor: &'static str, value: f64) -> Result<f64> {
    if value.abs() < SINGULAR_TOL {
        Err(Error::CoefficientSingularity { factor, value })
    } else {
        Ok(value)
    }
}

/// The X_m Jacobi polynomial of degree `nu + m`, built from classical Jacobi
/// pieces with `(alpha, beta)` taken from `params`:
///
/// ```text
/// [ P_m^{(-a-2,b)} + 2nu(m-a+b-1) P_{m-1}^{(-a,b)} / ((2m-a+b-2)(2nu+a+b))
///   - nu(b+m-1) P_{m-2}^{(-a,b)} / ((a+nu-m+1)(2m-a+b-2)) ] P_nu^{(a,b)}
/// + (m-a+b-1)(a+nu) / ((a+nu-m+1)(2nu+a+b)) P_{m-1}^{(-a,b)} P_{nu-1}^{(a,b)}
/// ```
pub fn xm_jacobi(nu: usize, params: &FamilyParams) -> Result<RealPolynomial> {
    let (al, be) = (params.alpha(), params.beta());
    let m = params.m as i64;
    let mf = params.mf();
    let nf = nu as f64;

    let p_nu = jacobi_classical(nu, al, be);
    let p_nu1 = jacobi_or_zero(nu as i64 - 1, al, be);
    let first = jacobi_or_zero(m, -al - 2.0, be);
    let q1 = jacobi_or_zero(m - 1, -al, be);
    let q2 = jacobi_or_zero(m - 2, -al, be);

    let mut bracket = first;
    if nu > 0 && !q1.is_zero() {
        let d1 = check_factor("2m-alpha+beta-2", 2.0 * mf - al + be - 2.0)?;
        let d2 = check_factor("2nu+alpha+beta", 2.0 * nf + al + be)?;
        bracket = &bracket + &q1.scale(2.0 * nf * (mf - al + be - 1.0) / (d1 * d2));
    }
    if nu > 0 && !q2.is_zero() {
        let d1 = check_factor("alpha+nu-m+1", al + nf - mf + 1.0)?;
        let d2 = check_factor("2m-alpha+beta-2", 2.0 * mf - al + be - 2.0)?;
        bracket = &bracket - &q2.scale(nf * (be + mf - 1.0) / (d1 * d2));
    }
    let mut out = &bracket * &p_nu;
    if !p_nu1.is_zero() && !q1.is_zero() {
        let d1 = check_factor("alpha+nu-m+1", al + nf - mf + 1.0)?;
        let d2 = check_factor("2nu+alpha+beta", 2.0 * nf + al + be)?;
        let coef = (mf - al + be - 1.0) * (al + nf) / (d1 * d2);
        out = &out + &(&q1 * &p_nu1).scale(coef);
    }
    Ok(out)
}

/// Expanded m = 2 form of [`xm_jacobi`], written out in `x = y` with
/// explicit coefficients:
///
/// ```text
/// [ a(b+2)/2 + (a-b-2)(a-b-1)/8 - (a-b-1)(b-a+2)/8 x^2
///   + ((a-b-1)(a+b+2)/4 - nu(b-a+1)(a-b-2)/((b-a+2)(b+a+2nu))) x
///   - nu(b-a+1)(a+b)/((b-a+2)(b+a+2nu)) - nu(b+1)/((a+nu-1)(b-a+2)) ] P_nu
/// - (b-a+1)(a+nu)/(2(a+nu-1)(a+b+2nu)) [(a-b-2)x + (a+b)] P_{nu-1}
/// ```
pub fn xm_jacobi_x2_expanded(nu: usize, params: &FamilyParams) -> Result<RealPolynomial> {
    if params.m != 2 {
        return Err(Error::Parameter(format!("expanded X_2 form needs m = 2, got {}", params.m)));
    }
    let (a, b) = (params.alpha(), params.beta());
    let n = nu as f64;
    let d_ba2 = check_factor("beta-alpha+2", b - a + 2.0)?;
    let d_s = check_factor("alpha+beta+2nu", a + b + 2.0 * n)?;
    let d_an1 = check_factor("alpha+nu-1", a + n - 1.0)?;

    let c2 = -(a - b - 1.0) * (b - a + 2.0) / 8.0;
    let c1 = (a - b - 1.0) * (a + b + 2.0) / 4.0 - n * (b - a + 1.0) * (a - b - 2.0) / (d_ba2 * d_s);
    let c0 = a * (b + 2.0) / 2.0 + (a - b - 2.0) * (a - b - 1.0) / 8.0
        - n * (b - a + 1.0) * (a + b) / (d_ba2 * d_s)
        - n * (b + 1.0) / (d_an1 * d_ba2);
    let bracket = RealPolynomial::new(vec![c0, c1, c2]);
    let k = -(b - a + 1.0) * (a + n) / (2.0 * d_an1 * d_s);
    let second = RealPolynomial::linear(a + b, a - b - 2.0).scale(k);

    let p_nu = jacobi_classical(nu, a, b);
    let p_nu1 = jacobi_or_zero(nu as i64 - 1, a, b);
    Ok(&(&bracket * &p_nu) + &(&second * &p_nu1))
}

/// `P_{m,nu} = a_{m,nu} P_nu(y; lambda + m delta) + b_{m,nu} P_{nu-1}(y; lambda + m delta)`
/// with
///
/// ```text
/// a = xi_m(g+1,h-1) + 2nu(-g-h+m-1) xi_{m-1}(g,h-2) / ((-g-h+2m-2)(g-h+2nu+2m-1))
///     - nu(-2h+4m-3) xi_{m-2}(g+1,h-3) / ((2g+2nu+1)(-g-h+2m-2))
/// b = (-g-h+m-1)(2g+2nu+2m-1) xi_{m-1}(g,h-2) / ((2g+2nu+1)(g-h+2nu+2m-1))
/// ```
///
/// and `P_nu(y; lambda) = P_nu^{(g-1/2, -h-1/2)}(y)`; `xi_{-1} = xi_{-2} = P_{-1} = 0`.
pub fn pmn_via_ab(nu: usize, params: &FamilyParams) -> Result<RealPolynomial> {
    params.require_bound_index(nu)?;
    let (g, h) = (params.g, params.h);
    let m = params.m as i64;
    let mf = params.mf();
    let n = nu as f64;

    let xi_m_shift = xi_poly(m, g + 1.0, h - 1.0);
    let xi_m1 = xi_poly(m - 1, g, h - 2.0);
    let xi_m2 = xi_poly(m - 2, g + 1.0, h - 3.0);

    let mut a_coef = xi_m_shift;
    if nu > 0 && !xi_m1.is_zero() {
        let d1 = check_factor("-g-h+2m-2", -g - h + 2.0 * mf - 2.0)?;
        let d2 = check_factor("g-h+2nu+2m-1", g - h + 2.0 * n + 2.0 * mf - 1.0)?;
        a_coef = &a_coef + &xi_m1.scale(2.0 * n * (-g - h + mf - 1.0) / (d1 * d2));
    }
    if nu > 0 && !xi_m2.is_zero() {
        let d1 = check_factor("2g+2nu+1", 2.0 * g + 2.0 * n + 1.0)?;
        let d2 = check_factor("-g-h+2m-2", -g - h + 2.0 * mf - 2.0)?;
        a_coef = &a_coef - &xi_m2.scale(n * (-2.0 * h + 4.0 * mf - 3.0) / (d1 * d2));
    }

    let (al, be) = (params.alpha(), params.beta());
    let p_nu = jacobi_classical(nu, al, be);
    let mut out = &a_coef * &p_nu;
    if nu > 0 && !xi_m1.is_zero() {
        let d1 = check_factor("2g+2nu+1", 2.0 * g + 2.0 * n + 1.0)?;
        let d2 = check_factor("g-h+2nu+2m-1", g - h + 2.0 * n + 2.0 * mf - 1.0)?;
        let b_coef = xi_m1.scale((-g - h + mf - 1.0) * (2.0 * g + 2.0 * n + 2.0 * mf - 1.0) / (d1 * d2));
        out = &out + &(&b_coef * &jacobi_classical(nu - 1, al, be));
    }
    Ok(out)
}

pub(crate) fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

pub(crate) fn ln_cosh(x: f64) -> f64 {
    let ax = x.abs();
    ax - std::f64::consts::LN_2 + (-2.0 * ax).exp().ln_1p()
}

/// `ln(phi_m^2)` with `phi_m = exp(omega_0(rho; lambda + m delta)) / xi_m(cosh 2rho; lambda)`.
pub fn ln_weight_phi_squared(params: &FamilyParams, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain(rho));
    }
    let y = (2.0 * rho).cosh();
    let xi = xi_m(params).eval(y);
    if xi == 0.0 || !xi.is_finite() {
        return Err(Error::DenominatorZero(y));
    }
    let (gs, hs) = (params.g + params.mf(), params.h - params.mf());
    Ok(2.0 * (gs * ln_sinh(rho) - hs * ln_cosh(rho)) - 2.0 * xi.abs().ln())
}

/// Orthogonality weight `phi_m(rho)^2`.
pub fn weight_phi_squared(params: &FamilyParams, rho: f64) -> Result<f64> {
    ln_weight_phi_squared(params, rho).map(f64::exp)
}

/// Which argument pair feeds `h_nu` inside `h_{m,nu}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormArguments {
    /// `h_nu(g + m, h - m)`, the pair matching the shifted spectrum. Default.
    Shifted,
    /// `h_nu(g + m, g - m)` as printed in the original display.
    Printed,
}

/// `h_nu(g, h) = Gamma(nu+g+1/2) Gamma(h-g-nu+1) / (2 nu! (h-g-2nu) Gamma(h-nu+1/2))`.
pub fn norm_h_classical(nu: usize, g: f64, h: f64) -> Result<f64> {
    let n = nu as f64;
    let c = |x: f64| ComplexValue::new(x, 0.0);
    let ratio = gamma_ratio(&[c(n + g + 0.5), c(h - g - n + 1.0)], &[c(n + 1.0), c(h - n + 0.5)])?;
    Ok(ratio.re / (2.0 * (h - g - 2.0 * n)))
}

/// Closed-form norm `h_{m,nu}(g,h)`.
pub fn norm_h(nu: usize, params: &FamilyParams) -> Result<f64> {
    norm_h_with(nu, params, NormArguments::Shifted)
}

pub fn norm_h_with(nu: usize, params: &FamilyParams, args: NormArguments) -> Result<f64> {
    params.require_bound_index(nu)?;
    let (g, h, m, n) = (params.g, params.h, params.mf(), nu as f64);
    let second = match args {
        NormArguments::Shifted => h - m,
        NormArguments::Printed => g - m,
    };
    let base = norm_h_classical(nu, g + m, second)?;
    Ok(base * (n + g + m + 0.5) * (h - n - 2.0 * m + 0.5) / ((n + g + 0.5) * (h - n - m + 0.5)))
}

/// Panel Gauss-Legendre setup for integrals over `rho in [0, r_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub r_max: f64,
    pub panels: usize,
    pub nodes_per_panel: usize,
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_max > 0.0) || self.panels < 1 || self.nodes_per_panel < 2 {
            return Err(Error::Parameter(format!("invalid quadrature config {self:?}")));
        }
        Ok(())
    }

    /// Cutoff where the most slowly decaying bound-state integrand,
    /// `phi^2 y^{2(max_nu+m)}`, has dropped below `1e-18` of its peak
    /// (which also puts the bare weight far below `1e-16` of its maximum).
    pub fn auto(params: &FamilyParams) -> Result<Self> {
        let deg = (params.max_nu() + params.m) as f64;
        let envelope = |rho: f64| -> Result<f64> {
            Ok(ln_weight_phi_squared(params, rho)? + 2.0 * deg * (2.0 * rho).cosh().ln())
        };
        let mut peak = f64::NEG_INFINITY;
        let mut rho = 0.05;
        loop {
            let e = envelope(rho)?;
            peak = peak.max(e);
            if e < peak - 18.0 * std::f64::consts::LN_10 && rho > 1.0 {
                break;
            }
            rho += 0.25;
            if rho > 200.0 {
                return Err(Error::Parameter("weight does not decay within rho = 200".into()));
            }
        }
        Ok(Self {
            r_max: rho,
            panels: (2.0 * rho).ceil() as usize,
            nodes_per_panel: 20,
        })
    }
}

/// Quadrature value with its refinement diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// `int |integrand|`, the scale used for relative statements about `value`.
    pub abs_integral: f64,
    pub panels_used: usize,
    /// Set when the last panel doubling still moved the value by more than
    /// `1e-9` of `abs_integral`.
    pub warning: Option<QuadratureWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureWarning {
    pub relative_change: f64,
}

fn integrand_parts(params: &FamilyParams, pv: &RealPolynomial, pq: &RealPolynomial, rho: f64) -> f64 {
    if rho <= 0.0 {
        return 0.0;
    }
    let y = (2.0 * rho).cosh();
    let (a, b) = (pv.eval(y), pq.eval(y));
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    match ln_weight_phi_squared(params, rho) {
        Ok(lw) => (a * b).signum() * (lw + a.abs().ln() + b.abs().ln()).exp(),
        Err(_) => f64::NAN,
    }
}

/// `int_0^inf phi_m^2 P_{m,nu} P_{m,q} d rho` by panel Gauss-Legendre on
/// `[0, r_max]`, doubling the panel count until the value is stable to
/// `1e-10` relative to the absolute integral (at most six doublings).
pub fn orthogonality_integral(
    nu: usize,
    q: usize,
    params: &FamilyParams,
    quad: &QuadratureConfig,
) -> Result<QuadratureResult> {
    quad.validate()?;
    params.require_bound_index(nu)?;
    params.require_bound_index(q)?;
    let pv = pmn_via_ab(nu, params)?;
    let pq = pmn_via_ab(q, params)?;
    let rule = GaussLegendre::new(quad.nodes_per_panel);
    let f = |rho: f64| integrand_parts(params, &pv, &pq, rho);
    let fabs = |rho: f64| integrand_parts(params, &pv, &pq, rho).abs();

    let mut panels = quad.panels;
    let mut value = integrate_panels(&rule, 0.0, quad.r_max, panels, false, f);
    let mut change = f64::INFINITY;
    let mut abs_integral = integrate_panels(&rule, 0.0, quad.r_max, panels, false, fabs);
    for _ in 0..6 {
        let finer = integrate_panels(&rule, 0.0, quad.r_max, 2 * panels, false, f);
        abs_integral = integrate_panels(&rule, 0.0, quad.r_max, 2 * panels, false, fabs);
        change = (finer - value).abs() / abs_integral.max(f64::MIN_POSITIVE);
        value = finer;
        panels *= 2;
        if change < 1e-10 {
            break;
        }
    }
    if !value.is_finite() {
        return Err(Error::DenominatorZero(f64::NAN));
    }
    Ok(QuadratureResult {
        value,
        abs_integral,
        panels_used: panels,
        warning: (change > 1e-9).then_some(QuadratureWarning { relative_change: change }),
    })
}

/// Full Gram matrix over the bound-state indices, entries computed in parallel.
pub fn gram_matrix(params: &FamilyParams, quad: &QuadratureConfig) -> Result<Vec<Vec<f64>>> {
    let n = params.max_nu() + 1;
    let entries: Vec<Result<f64>> = (0..n * n)
        .into_par_iter()
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            if j < i {
                return Ok(f64::NAN);
            }
            orthogonality_integral(i, j, params, quad).map(|r| r.value)
        })
        .collect();
    let mut out = vec![vec![0.0; n]; n];
    for (ij, e) in entries.into_iter().enumerate() {
        let (i, j) = (ij / n, ij % n);
        if j >= i {
            let v = e?;
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}

/// Number of sign changes of `p` on a logarithmic grid of `points` values of
/// `y - 1` spanning `[y_lo, y_hi]`. A lower end at or below 1 starts the
/// grid at `y = 1 + 1e-12`.
pub fn sign_changes_log_grid(p: &RealPolynomial, y_lo: f64, y_hi: f64, points: usize) -> usize {
    let (lo, hi) = ((y_lo - 1.0).max(1e-12).ln(), (y_hi - 1.0).ln());
    let mut prev = 0.0f64;
    let mut changes = 0;
    for i in 0..points {
        let t = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let v = p.eval(1.0 + t.exp());
        if v != 0.0 {
            if prev != 0.0 && v.signum() != prev.signum() {
                changes += 1;
            }
            prev = v;
        }
    }
    changes
}
