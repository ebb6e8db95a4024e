//! Closed-form s-wave S-matrix of the deformed family and the asymptotic
//! coefficient routes it is assembled from.
//!
//! `k` is the wavenumber in the rescaled coordinate (continuum energy `k^2`).
//! All S values here are `exp(2 i delta)` for a regular solution behaving as
//! `sin(kr + delta)`; the amplitude of `e^{ikr}` relative to `e^{-ikr}` in the
//! Jost-type expansion is therefore `-S`.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use crate::error::{Error, Result};
use crate::orthopoly::FamilyParams;
use crate::specfun::{gamma_ratio, hyp2f1_negative_axis, ComplexValue, SeriesControl};

/// Smallest wavenumber accepted on the real axis.
pub const K_MIN: f64 = 1e-4;

/// Allowed deviation of `|S|` from one in [`phase_shift`].
pub const UNITARITY_TOL: f64 = 1e-6;

fn cx(re: f64, im: f64) -> ComplexValue {
    ComplexValue::new(re, im)
}

fn check_k(k: f64) -> Result<()> {
    if k >= K_MIN && k.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("k must be >= {K_MIN}, got {k}")))
    }
}

/// `exp(-4 i k ln 2)`, valid for complex `k`.
fn two_pow_m4ik(k: ComplexValue) -> ComplexValue {
    (-4.0 * cx(0.0, 1.0) * k * LN_2).exp()
}

/// Undeformed amplitude at complex `k`:
///
/// ```text
/// -Gamma(2ik) Gamma(-A-ik) Gamma(B-ik+1/2) 2^{-4ik} / (Gamma(-A+ik) Gamma(-2ik) Gamma(B+ik+1/2))
/// ```
pub fn s_gpt_complex(a: f64, b: f64, k: ComplexValue) -> Result<ComplexValue> {
    let ik = cx(0.0, 1.0) * k;
    let ratio = gamma_ratio(
        &[2.0 * ik, -a - ik, b - ik + 0.5],
        &[-a + ik, -2.0 * ik, b + ik + 0.5],
    )?;
    Ok(-ratio * two_pow_m4ik(k))
}

pub fn s_gpt(a: f64, b: f64, k: f64) -> Result<ComplexValue> {
    check_k(k)?;
    s_gpt_complex(a, b, cx(k, 0.0))
}

/// m-dependent factor in its expanded form,
///
/// ```text
/// [B^2 - (ik-1/2)^2 + (B-ik+1/2)(1-m)] / [B^2 - (ik+1/2)^2 + (B+ik+1/2)(1-m)]
/// ```
pub fn bracket_complex(params: &FamilyParams, k: ComplexValue) -> Result<ComplexValue> {
    let ik = cx(0.0, 1.0) * k;
    let (b, m) = (params.b(), params.mf());
    let num = b * b - (ik - 0.5) * (ik - 0.5) + (b - ik + 0.5) * (1.0 - m);
    let den = b * b - (ik + 0.5) * (ik + 0.5) + (b + ik + 0.5) * (1.0 - m);
    let scale = 1.0 + b * b + k.norm_sqr();
    if den.norm() < 1e-6 * scale {
        return Err(Error::BracketZero(den.norm()));
    }
    Ok(num / den)
}

pub fn bracket(params: &FamilyParams, k: f64) -> Result<ComplexValue> {
    check_k(k)?;
    bracket_complex(params, cx(k, 0.0))
}

/// `(B-ik+1/2)(B+ik+1/2-m) / ((B+ik+1/2)(B-ik+1/2-m))`, the factorized bracket.
pub fn bracket_factorized(params: &FamilyParams, k: ComplexValue) -> ComplexValue {
    let ik = cx(0.0, 1.0) * k;
    let (b, m) = (params.b(), params.mf());
    (b - ik + 0.5) * (b + ik + 0.5 - m) / ((b + ik + 0.5) * (b - ik + 0.5 - m))
}

/// The m = 2 bracket written out: `[B^2-(ik-1/2)^2-(B-ik+1/2)] / [B^2-(ik+1/2)^2-(B+ik+1/2)]`.
pub fn bracket_x2(params: &FamilyParams, k: ComplexValue) -> ComplexValue {
    let ik = cx(0.0, 1.0) * k;
    let b = params.b();
    (b * b - (ik - 0.5) * (ik - 0.5) - (b - ik + 0.5)) / (b * b - (ik + 0.5) * (ik + 0.5) - (b + ik + 0.5))
}

/// Closed-form S of the deformed potential at complex `k`.
pub fn s_xm_complex(params: &FamilyParams, k: ComplexValue) -> Result<ComplexValue> {
    Ok(s_gpt_complex(params.a(), params.b(), k)? * bracket_complex(params, k)?)
}

/// Closed-form S of the deformed potential.
pub fn s_xm(params: &FamilyParams, k: f64) -> Result<ComplexValue> {
    check_k(k)?;
    s_xm_complex(params, cx(k, 0.0))
}

/// Reading of the m-dependent term of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QReading {
    /// `Q = ab + m (B+ik-1/2) / ((B+ik-m+1/2)(2ik-1)) ed`; reproduces the
    /// closed form for every m and the explicit m = 2 route.
    #[default]
    Corrected,
    /// `Q = ab + m(m-2B-1)(B+ik-1/2) / ((B+ik-im+1/2)(2ik-1)) ed`.
    PrintedImaginary,
    /// `Q = ab + m(m-2B-1)(B+ik-1/2) / ((B+ik-m+1/2)(2ik-1)) ed`.
    PrintedRealShift,
}

/// Constants of the large-r expansion of the scattering solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticCoefficients {
    pub a: ComplexValue,
    pub b: ComplexValue,
    pub c: ComplexValue,
    pub d: ComplexValue,
    pub e: ComplexValue,
    pub p_coef: ComplexValue,
    pub q_coef: ComplexValue,
}

impl AsymptoticCoefficients {
    /// `-(a c / P) 2^{-4ik}`.
    pub fn s_via_p(&self, k: f64) -> ComplexValue {
        -self.a * self.c / self.p_coef * two_pow_m4ik(cx(k, 0.0))
    }

    /// `-(a c / Q) 2^{-4ik}`.
    pub fn s_via_q(&self, k: f64) -> ComplexValue {
        -self.a * self.c / self.q_coef * two_pow_m4ik(cx(k, 0.0))
    }
}

/// `a, b, c, d, e` for the parameters' `A`, `B`:
///
/// ```text
/// a = G(B+ik+1/2) / (G(A+ik+1) G(B-A+1/2))
/// b = G(B-A+1/2) G(-2ik) / (G(-A-ik) G(B-ik+1/2))
/// c = G(B-A+1/2) G(2ik) / (G(-A+ik) G(B+ik+1/2))
/// d = G(B+ik-1/2) / (G(A+ik) G(B-A+1/2))
/// e = G(B-A+1/2) G(2-2ik) / (G(1-A-ik) G(B-ik+3/2))
/// ```
fn base_coefficients(params: &FamilyParams, k: f64) -> Result<[ComplexValue; 5]> {
    check_k(k)?;
    let (a, b) = (params.a(), params.b());
    let ik = cx(0.0, k);
    let r = |x: f64| cx(x, 0.0);
    let bma = r(b - a + 0.5);
    Ok([
        gamma_ratio(&[b + ik + 0.5], &[a + ik + 1.0, bma])?,
        gamma_ratio(&[bma, -2.0 * ik], &[-a - ik, b - ik + 0.5])?,
        gamma_ratio(&[bma, 2.0 * ik], &[-a + ik, b + ik + 0.5])?,
        gamma_ratio(&[b + ik - 0.5], &[a + ik, bma])?,
        gamma_ratio(&[bma, 2.0 - 2.0 * ik], &[1.0 - a - ik, b - ik + 1.5])?,
    ])
}

fn nonzero(value: ComplexValue, what: &'static str) -> Result<ComplexValue> {
    if value.norm() < 1e-14 {
        Err(Error::CoefficientSingularity {
            factor: what,
            value: value.norm(),
        })
    } else {
        Ok(value)
    }
}

fn p_route(params: &FamilyParams, k: f64, [a, b, _c, d, e]: [ComplexValue; 5]) -> Result<ComplexValue> {
    let ik = cx(0.0, k);
    let bb = params.b();
    let den = nonzero((bb + ik - 1.5) * (2.0 * ik - 1.0), "(B+ik-3/2)(2ik-1)")?;
    Ok(((bb + ik - 1.5) * (2.0 * ik - 1.0) * a * b + 2.0 * (bb + ik - 0.5) * e * d) / den)
}

fn q_route(params: &FamilyParams, k: f64, [a, b, _c, d, e]: [ComplexValue; 5], reading: QReading) -> Result<ComplexValue> {
    let ik = cx(0.0, k);
    let (bb, m) = (params.b(), params.mf());
    let (factor, shift) = match reading {
        QReading::Corrected => (m, cx(-m, 0.0)),
        QReading::PrintedImaginary => (m * (m - 2.0 * bb - 1.0), cx(0.0, -m)),
        QReading::PrintedRealShift => (m * (m - 2.0 * bb - 1.0), cx(-m, 0.0)),
    };
    let den = nonzero((bb + ik + shift + 0.5) * (2.0 * ik - 1.0), "(B+ik-m+1/2)(2ik-1)")?;
    Ok(a * b + factor * (bb + ik - 0.5) / den * e * d)
}

/// Coefficients of the m = 2 member; `p_coef` is
/// `((B+ik-3/2)(2ik-1) ab + 2(B+ik-1/2) ed) / ((B+ik-3/2)(2ik-1))`.
pub fn asymptotic_coeffs_x2(params: &FamilyParams, k: f64) -> Result<AsymptoticCoefficients> {
    if params.m() != 2 {
        return Err(Error::Parameter(format!("X_2 coefficients need m = 2, got {}", params.m())));
    }
    asymptotic_coeffs_xm(params, k)
}

/// Coefficients of a general member with the corrected `Q`.
pub fn asymptotic_coeffs_xm(params: &FamilyParams, k: f64) -> Result<AsymptoticCoefficients> {
    asymptotic_coeffs_xm_with(params, k, QReading::Corrected)
}

pub fn asymptotic_coeffs_xm_with(params: &FamilyParams, k: f64, reading: QReading) -> Result<AsymptoticCoefficients> {
    let base = base_coefficients(params, k)?;
    let [a, b, c, d, e] = base;
    Ok(AsymptoticCoefficients {
        a,
        b,
        c,
        d,
        e,
        p_coef: p_route(params, k, base)?,
        q_coef: q_route(params, k, base, reading)?,
    })
}

/// `delta = arg(s)/2` in `(-pi/2, pi/2]`.
pub fn phase_shift(s: ComplexValue) -> Result<f64> {
    let dev = (s.norm() - 1.0).abs();
    if !(dev <= UNITARITY_TOL) {
        return Err(Error::NonUnitary(dev));
    }
    let mut delta = 0.5 * s.arg();
    if delta <= -FRAC_PI_2 {
        delta += PI;
    }
    Ok(delta)
}

/// Removes jumps of `pi` between consecutive phase shifts.
pub fn unwrap_phases(reduced: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(reduced.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for &d in reduced {
        if let Some(p) = prev {
            let step = d + offset - p;
            offset -= PI * (step / PI).round();
        }
        let v = d + offset;
        out.push(v);
        prev = Some(v);
    }
    out
}

/// One row of an S-matrix table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SMatrixSample {
    pub k: f64,
    pub s_value: ComplexValue,
    /// `arg(S)/2` reduced to `(-pi/2, pi/2]`.
    pub phase_shift: f64,
    /// Phase shift made continuous in k, starting from the reduced value at
    /// the first k.
    pub phase_unwrapped: f64,
    /// `(phase_unwrapped - phase_shift) / pi`.
    pub winding: i64,
}

/// S-matrix samples at the given wavenumbers (ascending), evaluated in
/// parallel and unwrapped in order.
pub fn smatrix_table(params: &FamilyParams, ks: &[f64]) -> Result<Vec<SMatrixSample>> {
    let values: Vec<(f64, ComplexValue, f64)> = ks
        .par_iter()
        .map(|&k| {
            let s = s_xm(params, k)?;
            Ok((k, s, phase_shift(s)?))
        })
        .collect::<Result<_>>()?;
    let reduced: Vec<f64> = values.iter().map(|v| v.2).collect();
    let unwrapped = unwrap_phases(&reduced);
    Ok(values
        .into_iter()
        .zip(unwrapped)
        .map(|((k, s_value, phase_shift), phase_unwrapped)| SMatrixSample {
            k,
            s_value,
            phase_shift,
            phase_unwrapped,
            winding: ((phase_unwrapped - phase_shift) / PI).round() as i64,
        })
        .collect())
}

/// Evenly spaced wavenumbers `k_min, k_min + step, ...` up to `k_max`.
pub fn k_grid(k_min: f64, k_max: f64, k_step: f64) -> Result<Vec<f64>> {
    if !(k_min >= K_MIN) {
        return Err(Error::Parameter(format!("k_min = {k_min} must be at least {K_MIN}")));
    }
    if !(k_step > 0.0) {
        return Err(Error::Parameter(format!("k_step = {k_step} must be positive")));
    }
    if !(k_max >= k_min) {
        return Err(Error::Parameter(format!("empty k range: k_max = {k_max} < k_min = {k_min}")));
    }
    let n = ((k_max - k_min) / k_step + 1e-9).floor() as usize;
    Ok((0..=n).map(|j| k_min + j as f64 * k_step).collect())
}

/// Wavenumbers `kappa_nu = A - nu` of the bound-state poles at `k = i kappa`.
pub fn bound_state_pole_kappas(params: &FamilyParams) -> Vec<f64> {
    params.bound_indices().map(|nu| params.a() - nu as f64).collect()
}

/// Regular continuum solution of the undeformed (m = 0) well in the rescaled
/// coordinate, up to normalization:
///
/// ```text
/// (cosh r - 1)^{(B-A)/2} (cosh r + 1)^{-(B+A)/2} F(-A+ik, -A-ik; B-A+1/2; (1 - cosh r)/2)
/// ```
///
/// Real for real `k`.
pub fn gpt_regular_solution(a: f64, b: f64, k: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(r));
    }
    let y = r.cosh();
    let f = hyp2f1_negative_axis(
        cx(-a, k),
        cx(-a, -k),
        cx(b - a + 0.5, 0.0),
        (1.0 - y) / 2.0,
        SeriesControl::default(),
    )?;
    let pre = (0.5 * (b - a) * (y - 1.0).ln() - 0.5 * (b + a) * (y + 1.0).ln()).exp();
    Ok(pre * f.re)
}
