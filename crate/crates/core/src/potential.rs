//! Deformed prepotential, the potential family, bound-state energies and
//! eigenfunctions.
//!
//! Two coordinates are used:
//!
//! * `rho`, in which polynomials take the argument `cosh 2rho` and the raw
//!   energies are `E_{m,nu} = 4 nu (h - g - 2m - nu)`;
//! * the rescaled `r = 2 rho`, with `V^(r) = V_m(r/2)/4` and
//!   `E^_nu = E_{m,nu}/4 = nu (2A - nu)`. There `V^(inf) = A^2`, so
//!   `V^ - A^2` vanishes at infinity, bound states sit at `-(A - nu)^2` and the
//!   continuum at `k^2`.
//!
//! [`prepotential_omega`] and [`potential_vm`] take `rho`;
//! [`eigenfunction_value`] and [`rescaled_potential`] take `r`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::orthopoly::{jacobi_classical, ln_cosh, ln_sinh, norm_h, xi_m, xi_poly, xm_jacobi, FamilyParams};
use crate::poly::RealPolynomial;

/// `omega_m` and its first two derivatives with respect to `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaDerivs {
    pub omega: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Sign in front of `omega''` in the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SusySign {
    /// `omega'^2 + omega''`: annihilates `exp(omega)`, ground state at zero.
    Plus,
    /// `omega'^2 - omega''`, the partner Hamiltonian.
    Minus,
}

/// Prepotential of one family member with its `xi_m` polynomials cached.
///
/// `omega_m(rho) = omega_0(rho; g+m, h-m) + ln|xi_m(y; g+1, h-1)| - ln|xi_m(y; g, h)|`,
/// `omega_0(rho; g, h) = g ln sinh rho - h ln cosh rho`, `y = cosh 2rho`.
#[derive(Debug, Clone)]
pub struct Prepotential {
    params: FamilyParams,
    xi_shift: RealPolynomial,
    xi: RealPolynomial,
}

impl Prepotential {
    pub fn new(params: &FamilyParams) -> Self {
        Self {
            params: *params,
            xi_shift: xi_poly(params.m() as i64, params.g() + 1.0, params.h() - 1.0),
            xi: xi_m(params),
        }
    }

    pub fn params(&self) -> &FamilyParams {
        &self.params
    }

    fn check_rho(rho: f64) -> Result<()> {
        if rho > 0.0 && rho.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(rho))
        }
    }

    pub fn omega(&self, rho: f64) -> Result<f64> {
        Self::check_rho(rho)?;
        let y = (2.0 * rho).cosh();
        let (p1, p0) = (self.xi_shift.eval(y), self.xi.eval(y));
        if p1 == 0.0 || p0 == 0.0 {
            return Err(Error::DenominatorZero(y));
        }
        let (gs, hs) = (self.params.g() + self.params.mf(), self.params.h() - self.params.mf());
        Ok(gs * ln_sinh(rho) - hs * ln_cosh(rho) + p1.abs().ln() - p0.abs().ln())
    }

    /// Closed-form derivatives via the chain rule with `dy/drho = 2 sinh 2rho`.
    pub fn derivs(&self, rho: f64) -> Result<OmegaDerivs> {
        let omega = self.omega(rho)?;
        let y = (2.0 * rho).cosh();
        let s2 = (2.0 * rho).sinh();
        let logd = |p: &RealPolynomial| {
            let (v, d, dd) = p.eval_with_derivs(y);
            let l = d / v;
            (l, dd / v - l * l)
        };
        let (l1, dl1) = logd(&self.xi_shift);
        let (l0, dl0) = logd(&self.xi);
        let (gs, hs) = (self.params.g() + self.params.mf(), self.params.h() - self.params.mf());
        let (t, c) = (rho.tanh(), 1.0 / rho.tanh());
        let sech2 = 1.0 - t * t;
        let csch2 = c * c - 1.0;
        let d1 = gs * c - hs * t + 2.0 * s2 * (l1 - l0);
        let d2 = -gs * csch2 - hs * sech2 + 4.0 * y * (l1 - l0) + 4.0 * s2 * s2 * (dl1 - dl0);
        Ok(OmegaDerivs { omega, d1, d2 })
    }

    /// `omega'^2 +/- omega''` at `rho`.
    pub fn potential_with(&self, rho: f64, sign: SusySign) -> Result<f64> {
        let d = self.derivs(rho)?;
        Ok(match sign {
            SusySign::Plus => d.d1 * d.d1 + d.d2,
            SusySign::Minus => d.d1 * d.d1 - d.d2,
        })
    }

    pub fn potential(&self, rho: f64) -> Result<f64> {
        self.potential_with(rho, SusySign::Plus)
    }

    /// `V^(r) - A^2` in the rescaled coordinate; vanishes at infinity.
    pub fn scattering_potential(&self, r: f64) -> Result<f64> {
        let a = self.params.a();
        Ok(self.potential(0.5 * r)? / 4.0 - a * a)
    }
}

/// `omega_m(rho; lambda)`.
pub fn prepotential_omega(params: &FamilyParams, rho: f64) -> Result<f64> {
    Prepotential::new(params).omega(rho)
}

pub fn omega_derivs(params: &FamilyParams, rho: f64) -> Result<OmegaDerivs> {
    Prepotential::new(params).derivs(rho)
}

/// `V_m(rho) = omega_m'^2 + omega_m''`.
pub fn potential_vm(params: &FamilyParams, rho: f64) -> Result<f64> {
    Prepotential::new(params).potential(rho)
}

/// `V^(r) = V_m(r/2)/4`, tending to `A^2`.
pub fn rescaled_potential(params: &FamilyParams, r: f64) -> Result<f64> {
    potential_vm(params, 0.5 * r).map(|v| v / 4.0)
}

/// `lim_{rho -> inf} V_m = (g - h + 2m)^2 = 4 A^2`.
pub fn potential_plateau(params: &FamilyParams) -> f64 {
    4.0 * params.a() * params.a()
}

/// Raw energy `4 nu (h - g - nu)` of the undeformed well with parameters `(g, h)`.
pub fn gpt_energy(nu: usize, g: f64, h: f64) -> f64 {
    let n = nu as f64;
    4.0 * n * (h - g - n)
}

/// `omega_m'(lambda)^2 - omega_m''(lambda) - omega_m'(lambda+delta)^2
///  - omega_m''(lambda+delta) - E_1(lambda + m delta)`.
///
/// The shifted parameters are evaluated even when they no longer carry a
/// bound state; the identity only needs both `xi_m` to be nonzero.
pub fn shape_invariance_residual(params: &FamilyParams, rho: f64) -> Result<f64> {
    let here = Prepotential::new(params).derivs(rho)?;
    let there = Prepotential::new(&params.shifted()).derivs(rho)?;
    let e1 = gpt_energy(1, params.g() + params.mf(), params.h() - params.mf());
    Ok(here.d1 * here.d1 - here.d2 - there.d1 * there.d1 - there.d2 - e1)
}

/// One bound level in both energy conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub nu: usize,
    /// `4 nu (h - g - 2m - nu)`.
    pub energy_raw: f64,
    /// `energy_raw / 4 - A^2 = -(A - nu)^2`.
    pub energy_scattering: f64,
}

/// Bound levels `nu = 0..=max_nu`, lowest first.
pub fn bound_energies(params: &FamilyParams) -> Vec<SpectrumEntry> {
    let a = params.a();
    params
        .bound_indices()
        .map(|nu| {
            let n = nu as f64;
            SpectrumEntry {
                nu,
                energy_raw: 4.0 * n * (params.h() - params.g() - 2.0 * params.mf() - n),
                energy_scattering: -(a - n) * (a - n),
            }
        })
        .collect()
}

/// Denominator used by an eigenfunction evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Denominator {
    /// `xi_m(cosh r) = P_m^{(-alpha-1, beta-1)}(cosh r)`.
    Xi,
    /// `P_m^{(-alpha-1, -beta-1)}(cosh r)`, as printed next to the wave
    /// function; kept to show that it does not give an eigenfunction.
    Printed,
}

/// A normalized bound state in the rescaled coordinate:
///
/// ```text
/// psi(r) = N 2^{-A} sinh^{g+m}(r/2) cosh^{-(h-m)}(r/2) P^_{nu+m}(cosh r) / xi_m(cosh r)
/// ```
///
/// with `N = [2^{h-g-2m-1} / h_{m,nu}]^{1/2}` giving `int psi^2 dr = 1`.
#[derive(Debug, Clone)]
pub struct EigenfunctionSpec {
    pub nu: usize,
    pub params: FamilyParams,
    pub normalization: f64,
    numerator: RealPolynomial,
    xi: RealPolynomial,
    printed: RealPolynomial,
}

impl EigenfunctionSpec {
    pub fn new(nu: usize, params: &FamilyParams) -> Result<Self> {
        let h = norm_h(nu, params)?;
        let normalization = (2f64.powf(params.h() - params.g() - 2.0 * params.mf() - 1.0) / h).sqrt();
        let (al, be) = (params.alpha(), params.beta());
        Ok(Self {
            nu,
            params: *params,
            normalization,
            numerator: xm_jacobi(nu, params)?,
            xi: xi_m(params),
            printed: jacobi_classical(params.m(), -al - 1.0, -be - 1.0),
        })
    }

    /// `kappa = A - nu`, the decay rate of the tail.
    pub fn kappa(&self) -> f64 {
        self.params.a() - self.nu as f64
    }

    /// `E^_nu = nu (2A - nu)` in the rescaled convention.
    pub fn energy_rescaled(&self) -> f64 {
        let n = self.nu as f64;
        n * (2.0 * self.params.a() - n)
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        self.value_with(r, Denominator::Xi)
    }

    pub fn value_with(&self, r: f64, denominator: Denominator) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(r));
        }
        let (gs, hs) = (self.params.g() + self.params.mf(), self.params.h() - self.params.mf());
        let den_poly = match denominator {
            Denominator::Xi => &self.xi,
            Denominator::Printed => &self.printed,
        };
        let ln_pref = self.normalization.ln() - self.params.a() * std::f64::consts::LN_2;
        if r < 1e-6 {
            // sinh(r/2) ~ r/2, polynomials at cosh r ~ 1
            let den = den_poly.eval(1.0);
            if den == 0.0 {
                return Err(Error::DenominatorZero(1.0));
            }
            return Ok((ln_pref + gs * (0.5 * r).ln()).exp() * self.numerator.eval(1.0) / den);
        }
        let y = r.cosh();
        let den = den_poly.eval(y);
        if den == 0.0 {
            return Err(Error::DenominatorZero(y));
        }
        let num = self.numerator.eval(y);
        if num == 0.0 {
            return Ok(0.0);
        }
        let ln_abs = ln_pref + gs * ln_sinh(0.5 * r) - hs * ln_cosh(0.5 * r) + num.abs().ln() - den.abs().ln();
        Ok((num / den).signum() * ln_abs.exp())
    }
}

pub fn eigenfunction_value(spec: &EigenfunctionSpec, r: f64) -> Result<f64> {
    spec.value(r)
}

/// Variant of the eigenvalue equation checked by [`schrodinger_residual_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidualVariant {
    pub sign: SusySign,
    pub denominator: Denominator,
}

impl Default for ResidualVariant {
    fn default() -> Self {
        Self {
            sign: SusySign::Plus,
            denominator: Denominator::Xi,
        }
    }
}

/// `max |-psi'' + V^ psi - E^ psi| / max |psi|` over a uniform grid in `r`
/// starting at 0.1, with `psi''` from the fourth-order five-point stencil.
///
/// A step of `1e-3` keeps the stencil truncation error around `1e-9` of the
/// wave function scale for the low-lying states; the grid ends once the tail
/// `exp(-kappa r)` has dropped by `e^{-40}`.
pub fn schrodinger_residual(spec: &EigenfunctionSpec, grid_step: f64) -> Result<f64> {
    schrodinger_residual_with(spec, grid_step, ResidualVariant::default())
}

pub fn schrodinger_residual_with(spec: &EigenfunctionSpec, grid_step: f64, variant: ResidualVariant) -> Result<f64> {
    if !(grid_step > 0.0 && grid_step < 0.05) {
        return Err(Error::InvalidGrid(format!("grid step {grid_step} outside (0, 0.05)")));
    }
    let pre = Prepotential::new(&spec.params);
    let r0 = 0.1;
    let r_end = (r0 + 40.0 / spec.kappa()).min(80.0);
    let n = ((r_end - r0) / grid_step).ceil() as usize;
    let psi: Vec<f64> = (0..n + 5)
        .map(|i| spec.value_with(r0 + (i as f64 - 2.0) * grid_step, variant.denominator))
        .collect::<Result<_>>()?;
    let scale = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let e = spec.energy_rescaled();
    let h2 = grid_step * grid_step;
    let mut worst = 0.0f64;
    for i in 2..n + 3 {
        let r = r0 + (i as f64 - 2.0) * grid_step;
        let d2 = (-psi[i - 2] + 16.0 * psi[i - 1] - 30.0 * psi[i] + 16.0 * psi[i + 1] - psi[i + 2]) / (12.0 * h2);
        let v = pre.potential_with(0.5 * r, variant.sign)? / 4.0;
        worst = worst.max((-d2 + (v - e) * psi[i]).abs());
    }
    Ok(worst / scale)
}

/// Sign changes of `f` sampled at `points` equally spaced values in `(lo, hi]`.
pub fn count_sign_changes<F: Fn(f64) -> Result<f64>>(f: F, lo: f64, hi: f64, points: usize) -> Result<usize> {
    let mut prev = 0.0f64;
    let mut count = 0;
    for i in 1..=points {
        let v = f(lo + (hi - lo) * i as f64 / points as f64)?;
        if v != 0.0 {
            if prev != 0.0 && v.signum() != prev.signum() {
                count += 1;
            }
            prev = v;
        }
    }
    Ok(count)
}
