//! Numerov integration of the radial equation `psi'' = (V(r) - E) psi` in the
//! rescaled coordinate, bound states by shooting and phase shifts by
//! asymptotic matching.
//!
//! The family's potential enters as `V^(r) - A^2` (see [`crate::potential`]),
//! so bound states have `E = -(A - nu)^2` and the continuum `E = k^2`.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::orthopoly::FamilyParams;
use crate::potential::Prepotential;
use crate::scattering::{k_grid, phase_shift, s_xm, smatrix_table};

/// Plateau threshold for `|V(r) - V(inf)|`.
pub const PLATEAU_TOL: f64 = 1e-10;

/// Largest condition number `1/|sin k(r2 - r1)|` accepted in phase extraction.
pub const MAX_CONDITION: f64 = 100.0;

const RENORM_THRESHOLD: f64 = 1e100;

/// Uniform grid `r_i = r_min + i step`, `i = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub step: f64,
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self {
            r_min: 1e-3,
            r_max: 35.0,
            step: 1e-3,
        }
    }
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, step: f64) -> Result<Self> {
        let g = Self { r_min, r_max, step };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_max > self.r_min && self.step > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "need 0 < r_min < r_max and step > 0, got {self:?}"
            )));
        }
        let count = (self.r_max - self.r_min) / self.step;
        if (count - count.round()).abs() > 1e-6 {
            return Err(Error::InvalidGrid(format!(
                "(r_max - r_min)/step = {count} is not an integer"
            )));
        }
        if count.round() < 100.0 {
            return Err(Error::InvalidGrid(format!("only {} intervals, need at least 100", count.round())));
        }
        Ok(())
    }

    /// Number of intervals.
    pub fn intervals(&self) -> usize {
        ((self.r_max - self.r_min) / self.step).round() as usize
    }

    pub fn len(&self) -> usize {
        self.intervals() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn r(&self, i: usize) -> f64 {
        self.r_min + i as f64 * self.step
    }

    /// Nearest grid index to `r`, clamped to the grid.
    pub fn index_of(&self, r: f64) -> usize {
        (((r - self.r_min) / self.step).round().max(0.0) as usize).min(self.intervals())
    }

    /// Same start and step, `r_max` raised to the first grid point at or
    /// beyond `r_max`.
    pub fn extended_to(&self, r_max: f64) -> Self {
        if r_max <= self.r_max {
            return *self;
        }
        let n = ((r_max - self.r_min) / self.step).ceil();
        Self {
            r_max: self.r_min + n * self.step,
            ..*self
        }
    }
}

/// Values of a solution on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
}

impl GridFunction {
    /// Value at the grid point nearest to `r`.
    pub fn at(&self, r: f64) -> f64 {
        self.values[self.grid.index_of(r)]
    }

    /// Sign changes over the whole grid.
    pub fn node_count(&self) -> usize {
        count_nodes(&self.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Least-squares slope of `ln|psi|` against `ln r` over points `1..=n`.
    pub fn log_slope(&self, n: usize) -> f64 {
        let pts: Vec<(f64, f64)> = (1..=n)
            .map(|i| (self.grid.r(i).ln(), self.values[i].abs().ln()))
            .collect();
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    }
}

fn count_nodes(values: &[f64]) -> usize {
    let mut prev = 0.0f64;
    let mut count = 0;
    for &v in values {
        if v != 0.0 {
            if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
                count += 1;
            }
            prev = v;
        }
    }
    count
}

/// Small-r data of a regular solution: `psi ~ r^s (1 + c r^2)` where
/// `V(r) = s(s-1)/r^2 + v0 + O(r^2)` and `c = (v0 - E)/(4s + 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Indicial {
    pub s: f64,
    pub v0: f64,
}

impl Indicial {
    pub fn start_value(&self, r: f64, e: f64) -> f64 {
        r.powf(self.s) * (1.0 + (self.v0 - e) / (4.0 * self.s + 2.0) * r * r)
    }
}

/// Potential sampled on a grid together with its small-r data.
#[derive(Debug, Clone)]
pub struct SampledPotential {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub indicial: Indicial,
}

impl SampledPotential {
    pub fn from_fn<F: Fn(f64) -> f64 + Sync>(grid: RadialGrid, indicial: Indicial, v: F) -> Result<Self> {
        grid.validate()?;
        let values: Vec<f64> = (0..grid.len()).into_par_iter().map(|i| v(grid.r(i))).collect();
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid(format!("potential not finite at r = {}", grid.r(i))));
        }
        Ok(Self { grid, values, indicial })
    }

    /// `V^(r) - A^2` of the family member.
    pub fn family(params: &FamilyParams, grid: RadialGrid) -> Result<Self> {
        if grid.r_min.powf(params.g() + params.mf()) < 1e-280 {
            return Err(Error::InvalidGrid(format!(
                "r_min^(g+m) = {}^{} underflows",
                grid.r_min,
                params.g() + params.mf()
            )));
        }
        let indicial = family_indicial(params)?;
        let pre = Prepotential::new(params);
        let values: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|i| pre.scattering_potential(grid.r(i)))
            .collect::<Result<_>>()?;
        grid.validate()?;
        Ok(Self { grid, values, indicial })
    }
}

/// `s = g + m` and `v0 = lim_{r->0} (V^ - A^2 - s(s-1)/r^2)`, the latter by
/// Richardson extrapolation from `r = 0.01, 0.02`.
pub fn family_indicial(params: &FamilyParams) -> Result<Indicial> {
    let s = params.g() + params.mf();
    let pre = Prepotential::new(params);
    let reg = |r: f64| -> Result<f64> { Ok(pre.scattering_potential(r)? - s * (s - 1.0) / (r * r)) };
    let v0 = (4.0 * reg(0.01)? - reg(0.02)?) / 3.0;
    Ok(Indicial { s, v0 })
}

/// Numerov recurrence on `f = V - E`, filling `psi[i0 + 2..]` from
/// `psi[i0]`, `psi[i0 + 1]`. Rescales the prefix whenever `|psi|` exceeds
/// `1e100`.
fn numerov_fill(f: &[f64], h: f64, psi: &mut [f64], i0: usize) {
    let c = h * h / 12.0;
    for i in i0 + 1..psi.len() - 1 {
        let next = (2.0 * psi[i] * (1.0 + 5.0 * c * f[i]) - psi[i - 1] * (1.0 - c * f[i - 1])) / (1.0 - c * f[i + 1]);
        psi[i + 1] = next;
        if next.abs() > RENORM_THRESHOLD {
            let s = 1.0 / next.abs();
            for v in psi[..=i + 1].iter_mut() {
                *v *= s;
            }
        }
    }
}

/// First index at which the Numerov weights are safely positive; points
/// closer to the origin than that take the small-r expansion.
fn safe_start(f: &[f64], h: f64) -> usize {
    let c = h * h / 12.0;
    f.iter().position(|&x| c * x.abs() < 0.1).unwrap_or(0)
}

/// Outward solution at energy `e` on `pot`'s grid (or its first `len` points).
fn outward(pot: &SampledPotential, e: f64, len: usize) -> Vec<f64> {
    let h = pot.grid.step;
    let f: Vec<f64> = pot.values[..len].iter().map(|v| v - e).collect();
    let i0 = safe_start(&f, h).min(len.saturating_sub(2));
    let mut psi = vec![0.0; len];
    for (i, p) in psi.iter_mut().enumerate().take(i0 + 2) {
        *p = pot.indicial.start_value(pot.grid.r(i), e);
    }
    numerov_fill(&f, h, &mut psi, i0);
    psi
}

/// Regular solution at energy `e` for a sampled potential.
///
/// Starts from `psi ~ r^s (1 + c r^2)` at `r_min` and `r_min + step`, which
/// equals `r^s` to relative order `r_min^2`. Points where the Numerov weight
/// `1 - step^2 |V - E| / 12` would fall below 0.9 (a strong centrifugal term
/// against a coarse step) also take the expansion.
pub fn numerov_solve(pot: &SampledPotential, e: f64) -> Result<GridFunction> {
    let values = outward(pot, e, pot.grid.len());
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Overflow(pot.grid.r(i)));
    }
    Ok(GridFunction { grid: pot.grid, values })
}

/// Regular solution of the family's radial equation at energy `e`
/// (scattering convention).
///
/// The log-log slope over the first ten points is checked against the
/// indicial exponent `g + m`.
pub fn numerov_integrate(params: &FamilyParams, e: f64, grid: RadialGrid) -> Result<GridFunction> {
    let pot = SampledPotential::family(params, grid)?;
    let gf = numerov_solve(&pot, e)?;
    let slope = gf.log_slope(10);
    let s = pot.indicial.s;
    if (slope - s).abs() > 0.05 * s.max(1.0) {
        return Err(Error::Parameter(format!(
            "start-up slope {slope} disagrees with indicial exponent {s}"
        )));
    }
    Ok(gf)
}

/// Shooting controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingConfig {
    pub grid: RadialGrid,
    /// Energies sampled across the window before bisection.
    pub scan_points: usize,
    pub max_bisections: usize,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            grid: RadialGrid::default(),
            scan_points: 400,
            max_bisections: 200,
        }
    }
}

/// Result of a shooting run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShootingOutcome {
    pub energies: Vec<f64>,
    /// Node counts of the outward solution just below and just above each
    /// energy.
    pub node_counts: Vec<(usize, usize)>,
    /// Sub-intervals whose sign change could not be refined.
    pub failed_brackets: Vec<(f64, f64)>,
}

/// Matching function of the shooting method.
///
/// Outward and inward solutions meet at the outer classical turning point;
/// the inward one starts as `exp(-kappa r)` at `r_max`. The value is their
/// Numerov Casoratian in the variable `z = (1 - step^2 (V - E)/12) psi`,
/// which does not depend on the matching index, divided by positive norms.
/// It is continuous in `E` and changes sign exactly at eigenvalues.
pub fn shooting_mismatch(pot: &SampledPotential, e: f64) -> f64 {
    let h = pot.grid.step;
    let (c, out, inw) = matched_parts(pot, e);
    let w = 1.0 - h * h / 12.0 * (pot.values[c] - e);
    let w1 = 1.0 - h * h / 12.0 * (pot.values[c + 1] - e);
    let (zo0, zo1) = (w * out[c], w1 * out[c + 1]);
    let (zi0, zi1) = (w * inw[0], w1 * inw[1]);
    (zo1 * zi0 - zo0 * zi1) / (zo0.hypot(zo1) * zi0.hypot(zi1))
}

/// Matching index `c`, the outward solution on `0..=c+1` and the inward one
/// on `c..n` (indexed from `c`).
fn matched_parts(pot: &SampledPotential, e: f64) -> (usize, Vec<f64>, Vec<f64>) {
    let n = pot.grid.len();
    let h = pot.grid.step;
    let kappa = (-e).max(0.0).sqrt();
    let c = pot
        .values
        .iter()
        .rposition(|&v| v - e < 0.0)
        .unwrap_or(n / 2)
        .clamp(10, n - 12);

    let out = outward(pot, e, c + 2);

    // reversed frame: index j <-> grid point n - 1 - j
    let f_rev: Vec<f64> = pot.values[c..].iter().rev().map(|v| v - e).collect();
    let mut rev = vec![0.0; n - c];
    rev[0] = 1.0;
    rev[1] = (kappa * h).exp();
    numerov_fill(&f_rev, h, &mut rev, 0);
    rev.reverse();
    (c, out, rev)
}

/// Outward and inward solutions at `e`, scaled to agree at the outer
/// turning point and joined there. At an eigenvalue this is the bound state;
/// pure outward integration would pick up the growing solution as
/// `exp(2 kappa r)`.
pub fn matched_solution(pot: &SampledPotential, e: f64) -> Result<GridFunction> {
    let n = pot.grid.len();
    let (c, out, inw) = matched_parts(pot, e);
    if out[c] == 0.0 || inw[0] == 0.0 {
        return Err(Error::Parameter("matching point is a node".into()));
    }
    let scale = out[c] / inw[0];
    let mut values = out[..=c].to_vec();
    values.extend(inw[1..].iter().map(|v| v * scale));
    debug_assert_eq!(values.len(), n);
    Ok(GridFunction { grid: pot.grid, values })
}

/// Node count of the outward solution over the full grid.
pub fn outward_node_count(pot: &SampledPotential, e: f64) -> usize {
    count_nodes(&outward(pot, e, pot.grid.len()))
}

/// Bound states of a sampled potential in `window`, by scanning the matching
/// function and bisecting each sign change to `tol`.
pub fn shoot_sampled(pot: &SampledPotential, window: (f64, f64), tol: f64, cfg: &ShootingConfig) -> Result<ShootingOutcome> {
    let (lo, hi) = window;
    if !(lo < hi && hi < 0.0 && tol > 0.0) {
        return Err(Error::Parameter(format!("invalid shooting window ({lo}, {hi}) or tol {tol}")));
    }
    let n = cfg.scan_points.max(2);
    let es: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let ds: Vec<f64> = es.par_iter().map(|&e| shooting_mismatch(pot, e)).collect();

    let mut brackets = Vec::new();
    for i in 0..n {
        if ds[i] == 0.0 {
            brackets.push((es[i], es[i]));
        } else if ds[i] * ds[i + 1] < 0.0 {
            brackets.push((es[i], es[i + 1]));
        }
    }

    let refined: Vec<std::result::Result<f64, (f64, f64)>> = brackets
        .par_iter()
        .map(|&(a, b)| {
            if a == b {
                return Ok(a);
            }
            let (mut a, mut b) = (a, b);
            let mut da = shooting_mismatch(pot, a);
            for _ in 0..cfg.max_bisections {
                if b - a <= tol {
                    break;
                }
                let mid = 0.5 * (a + b);
                let dm = shooting_mismatch(pot, mid);
                if !dm.is_finite() {
                    return Err((a, b));
                }
                if (dm < 0.0) == (da < 0.0) {
                    a = mid;
                    da = dm;
                } else {
                    b = mid;
                }
            }
            if b - a <= tol {
                Ok(0.5 * (a + b))
            } else {
                Err((a, b))
            }
        })
        .collect();

    let mut out = ShootingOutcome {
        energies: Vec::new(),
        node_counts: Vec::new(),
        failed_brackets: Vec::new(),
    };
    for r in refined {
        match r {
            Ok(e) => {
                let d = (1e-4 * (hi - lo)).min(1e-4);
                out.node_counts.push((outward_node_count(pot, e - d), outward_node_count(pot, e + d)));
                out.energies.push(e);
            }
            Err(b) => out.failed_brackets.push(b),
        }
    }
    Ok(out)
}

/// Default window `(-A^2 - 1, -1e-4)`. The ground state sits exactly at
/// `-A^2`, so the window extends below it; nothing lies further down.
pub fn default_window(params: &FamilyParams) -> (f64, f64) {
    let a2 = params.a() * params.a();
    (-a2 - 1.0, -1e-4)
}

/// Bound energies (scattering convention) of the family member in `window`,
/// sorted ascending.
pub fn shoot_bound_states(params: &FamilyParams, window: (f64, f64), tol: f64) -> Result<Vec<f64>> {
    let out = shoot_bound_states_with(params, window, tol, &ShootingConfig::default())?;
    if let Some(&(lo, hi)) = out.failed_brackets.first() {
        return Err(Error::NoBracket { lo, hi });
    }
    Ok(out.energies)
}

pub fn shoot_bound_states_with(params: &FamilyParams, window: (f64, f64), tol: f64, cfg: &ShootingConfig) -> Result<ShootingOutcome> {
    if window.1 >= 0.0 {
        return Err(Error::Parameter(format!(
            "window ({}, {}) must end below the threshold 0",
            window.0, window.1
        )));
    }
    let pot = SampledPotential::family(params, cfg.grid)?;
    shoot_sampled(&pot, window, tol, cfg)
}

/// Two-point matching setup in the plateau, and its result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseExtraction {
    pub r1: f64,
    pub r2: f64,
    /// Phase shift in `(-pi/2, pi/2]`; zero in an unfilled hint.
    pub delta: f64,
    /// `1 / |sin k (r2 - r1)|`.
    pub condition_number: f64,
    /// Relative misfit of `sin(kr + delta)` at a third point
    /// `r1 + pi/(4k)`.
    pub third_point_residual: f64,
}

impl PhaseExtraction {
    /// Matching points `r2 = r_max - 1` and `r1 = r2 - pi/(2k)`.
    pub fn hint(grid: &RadialGrid, k: f64) -> Self {
        let r2 = grid.r_max - 1.0;
        let r1 = r2 - FRAC_PI_2 / k;
        Self {
            r1,
            r2,
            delta: 0.0,
            condition_number: 1.0,
            third_point_residual: 0.0,
        }
    }
}

/// Start of the plateau: the first grid point after the last one where
/// `|V| >= PLATEAU_TOL`.
pub fn plateau_start(pot: &SampledPotential) -> Result<f64> {
    match pot.values.iter().rposition(|v| v.abs() >= PLATEAU_TOL) {
        None => Ok(pot.grid.r_min),
        Some(i) if i + 1 < pot.grid.len() => Ok(pot.grid.r(i + 1)),
        Some(i) => Err(Error::NoPlateau {
            r: pot.grid.r(i),
            deviation: pot.values[i].abs(),
        }),
    }
}

/// Smallest `r` past which `|V^ - A^2| < PLATEAU_TOL` for the family
/// member, scanning in steps of 0.25 up to `r = 500`.
pub fn family_plateau_start(params: &FamilyParams) -> Result<f64> {
    let pre = Prepotential::new(params);
    let mut last_bad = 0.0;
    let mut r = 0.25;
    while r <= 500.0 {
        if pre.scattering_potential(r)?.abs() >= PLATEAU_TOL {
            last_bad = r;
        } else if r - last_bad > 10.0 {
            return Ok(last_bad + 0.25);
        }
        r += 0.25;
    }
    Err(Error::NoPlateau {
        r: last_bad,
        deviation: pre.scattering_potential(last_bad)?.abs(),
    })
}

/// Phase shift from `psi ~ sin(kr + delta)` at the hint's two points:
/// with `R = psi(r1)/psi(r2)`,
/// `tan delta = (R sin kr2 - sin kr1) / (cos kr1 - R cos kr2)`.
pub fn extract_phase_shift(psi: &GridFunction, k: f64, hint: &PhaseExtraction) -> Result<PhaseExtraction> {
    let g = &psi.grid;
    let (i1, i2) = (g.index_of(hint.r1), g.index_of(hint.r2));
    let (r1, r2) = (g.r(i1), g.r(i2));
    if !(r1 < r2) {
        return Err(Error::Parameter(format!("need r1 < r2, got {r1}, {r2}")));
    }
    let cond = 1.0 / (k * (r2 - r1)).sin().abs();
    if !(cond < MAX_CONDITION) {
        return Err(Error::IllConditioned(cond));
    }
    let (p1, p2) = (psi.values[i1], psi.values[i2]);
    if p1 == 0.0 || p2 == 0.0 {
        return Err(Error::Parameter("wave function vanishes at a matching point".into()));
    }
    let ratio = p1 / p2;
    let num = ratio * (k * r2).sin() - (k * r1).sin();
    let den = (k * r1).cos() - ratio * (k * r2).cos();
    let mut delta = (num / den).atan();
    if delta <= -FRAC_PI_2 {
        delta += PI;
    }

    // amplitude from the two-point fit, then the misfit at r3
    let (s1, s2) = ((k * r1 + delta).sin(), (k * r2 + delta).sin());
    let amp = if s1.abs() > s2.abs() { p1 / s1 } else { p2 / s2 };
    let i3 = g.index_of(r1 + 0.25 * PI / k);
    let r3 = g.r(i3);
    let residual = (psi.values[i3] - amp * (k * r3 + delta).sin()).abs() / amp.abs();
    Ok(PhaseExtraction {
        r1,
        r2,
        delta,
        condition_number: cond,
        third_point_residual: residual,
    })
}

/// Grid reaching far enough past the plateau for the matching points at `k`.
pub fn phase_grid(params: &FamilyParams, k: f64, base: &RadialGrid) -> Result<RadialGrid> {
    let plateau = family_plateau_start(params)?;
    Ok(base.extended_to(plateau + FRAC_PI_2 / k + 1.5))
}

/// Numerov phase shift of the family member at wavenumber `k`, with the grid
/// extended as needed and the plateau checked at both matching points.
pub fn numerov_phase_shift(params: &FamilyParams, k: f64, base: &RadialGrid) -> Result<PhaseExtraction> {
    let grid = phase_grid(params, k, base)?;
    let pot = SampledPotential::family(params, grid)?;
    phase_shift_sampled(&pot, k)
}

/// Phase shift for an already sampled potential; fails with `NoPlateau` if
/// the matching points are not in the plateau.
pub fn phase_shift_sampled(pot: &SampledPotential, k: f64) -> Result<PhaseExtraction> {
    let hint = PhaseExtraction::hint(&pot.grid, k);
    let plateau = plateau_start(pot)?;
    if hint.r1 < plateau {
        let i = pot.grid.index_of(hint.r1);
        return Err(Error::NoPlateau {
            r: hint.r1,
            deviation: pot.values[i].abs(),
        });
    }
    let psi = numerov_solve(pot, k * k)?;
    extract_phase_shift(&psi, k, &hint)
}

/// `|x|` of `x` reduced to `(-pi, pi]`.
fn circular_abs(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI { 2.0 * PI - y } else { y }
}

/// Circular distance between two phase shifts: `|2(a - b)|` on the circle,
/// halved.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    0.5 * circular_abs(2.0 * (a - b))
}

/// Analytic phase shift at `k`, unwrapped by continuity from `k = 0.01`.
pub fn analytic_phase_unwrapped(params: &FamilyParams, k: f64) -> Result<f64> {
    if k <= 0.01 {
        return phase_shift(s_xm(params, k)?);
    }
    let n = ((k - 0.01) / 0.005).ceil().max(1.0);
    let ks = k_grid(0.01, k, (k - 0.01) / n)?;
    let mut ks = ks;
    if let Some(last) = ks.last_mut() {
        *last = k;
    }
    let table = smatrix_table(params, &ks)?;
    Ok(table.last().map(|s| s.phase_unwrapped).unwrap_or(0.0))
}

/// Per-k comparison of numerical and closed-form phase shifts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyRecord {
    pub k: f64,
    pub delta_numeric: f64,
    pub delta_analytic: f64,
    pub diff: f64,
    pub r1: f64,
    pub r2: f64,
    pub r_max: f64,
    pub condition_number: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    /// Parameters of the integrated potential.
    pub numeric_params: FamilyParams,
    /// Parameters of the closed-form S.
    pub analytic_params: FamilyParams,
    pub grid: RadialGrid,
    pub records: Vec<VerifyRecord>,
    pub max_diff: f64,
}

/// Numerov phase shifts of `params` against the closed form of the same
/// member. Every `k` must be at least 0.1: below that the matching points
/// move out beyond `r ~ 16` past the plateau and the phase converges slowly.
pub fn verify_s_matrix(params: &FamilyParams, k_list: &[f64], grid: &RadialGrid) -> Result<VerifyReport> {
    compare_phase_shifts(params, params, k_list, grid)
}

/// Numerov phase shifts of `numeric` against the closed form of `analytic`.
pub fn compare_phase_shifts(
    numeric: &FamilyParams,
    analytic: &FamilyParams,
    k_list: &[f64],
    grid: &RadialGrid,
) -> Result<VerifyReport> {
    grid.validate()?;
    if let Some(k) = k_list.iter().find(|&&k| !(k >= 0.1)) {
        return Err(Error::Parameter(format!("verification needs k >= 0.1, got {k}")));
    }
    let records: Vec<VerifyRecord> = k_list
        .par_iter()
        .map(|&k| {
            let pe = numerov_phase_shift(numeric, k, grid)?;
            let an = analytic_phase_unwrapped(analytic, k)?;
            Ok(VerifyRecord {
                k,
                delta_numeric: pe.delta,
                delta_analytic: an,
                diff: phase_distance(pe.delta, an),
                r1: pe.r1,
                r2: pe.r2,
                r_max: phase_grid(numeric, k, grid)?.r_max,
                condition_number: pe.condition_number,
            })
        })
        .collect::<Result<_>>()?;
    let max_diff = records.iter().fold(0.0f64, |m, r| m.max(r.diff));
    Ok(VerifyReport {
        numeric_params: *numeric,
        analytic_params: *analytic,
        grid: *grid,
        records,
        max_diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::EigenfunctionSpec;
    use crate::scattering::gpt_regular_solution;

    fn params(g: f64, h: f64, m: usize) -> FamilyParams {
        FamilyParams::new(g, h, m).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::new(1e-3, 35.0, 1e-3).is_ok());
        assert!(RadialGrid::new(1e-3, 0.05, 1e-3).is_err());
        assert!(RadialGrid::new(0.0, 35.0, 1e-3).is_err());
        assert!(RadialGrid::new(1e-3, 35.0, 3e-3 + 1e-5).is_err());
        let g = RadialGrid::default().extended_to(40.2);
        assert!(g.r_max >= 40.2 && g.validate().is_ok());
    }

    #[test]
    fn free_particle_is_sine() {
        let grid = RadialGrid::new(1e-3, 20.001, 1e-3).unwrap();
        let k = 1.3;
        let pot = SampledPotential::from_fn(grid, Indicial { s: 1.0, v0: 0.0 }, |_| 0.0).unwrap();
        let psi = numerov_solve(&pot, k * k).unwrap();
        let mut worst = 0.0f64;
        for (i, v) in psi.values.iter().enumerate() {
            let exact = (k * grid.r(i)).sin() / k;
            worst = worst.max((v - exact).abs());
        }
        assert!(worst < 1e-8 / k, "{worst}");
        let pe = extract_phase_shift(&psi, k, &PhaseExtraction::hint(&grid, k)).unwrap();
        assert!(pe.delta.abs() < 1e-8);
        assert!(pe.third_point_residual < 1e-8);
    }

    #[test]
    fn hard_core_phase() {
        let grid = RadialGrid::new(1e-3, 30.001, 1e-3).unwrap();
        let k = 0.5;
        let pot = SampledPotential::from_fn(grid, Indicial { s: 1.0, v0: 1e6 }, |r| if r < 1.0 { 1e6 } else { 0.0 }).unwrap();
        let pe = phase_shift_sampled(&pot, k).unwrap();
        assert!(phase_distance(pe.delta, -k) < 1e-3, "{}", pe.delta);
    }

    #[test]
    fn ill_conditioned_points_rejected() {
        let grid = RadialGrid::new(1e-3, 20.001, 1e-3).unwrap();
        let pot = SampledPotential::from_fn(grid, Indicial { s: 1.0, v0: 0.0 }, |_| 0.0).unwrap();
        let psi = numerov_solve(&pot, 1.0).unwrap();
        let hint = PhaseExtraction {
            r1: 10.0,
            r2: 10.0 + PI,
            ..PhaseExtraction::hint(&grid, 1.0)
        };
        assert!(matches!(extract_phase_shift(&psi, 1.0, &hint), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn fourth_order_convergence() {
        // all runs start at r = 1 from one fine reference solution, so only
        // the propagation error of the recurrence differs between them
        let p = params(1.0, 10.0, 1);
        let e = 1.0;
        let reference = {
            let grid = RadialGrid::new(1e-3, 1.1, 2.5e-4).unwrap();
            numerov_solve(&SampledPotential::family(&p, grid).unwrap(), e).unwrap()
        };
        let pre = Prepotential::new(&p);
        let run = |h: f64| {
            let grid = RadialGrid::new(1.0, 10.0, h).unwrap();
            let f: Vec<f64> = (0..grid.len()).map(|i| pre.scattering_potential(grid.r(i)).unwrap() - e).collect();
            let mut psi = vec![0.0; grid.len()];
            psi[0] = reference.at(1.0);
            psi[1] = reference.at(1.0 + h);
            numerov_fill(&f, h, &mut psi, 0);
            psi
        };
        let (a, b, c) = (run(0.02), run(0.01), run(0.005));
        let mut dev_a = 0.0f64;
        let mut dev_b = 0.0f64;
        for i in 0..a.len() {
            let (va, vb, vc) = (a[i], b[2 * i], c[4 * i]);
            let limit = vc + (vc - vb) / 15.0;
            dev_a = dev_a.max((va - limit).abs());
            dev_b = dev_b.max((vb - limit).abs());
        }
        let ratio = dev_a / dev_b;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn indicial_slope_checked() {
        let p = params(1.0, 10.0, 2);
        let gf = numerov_integrate(&p, 1.0, RadialGrid::default()).unwrap();
        assert!((gf.log_slope(10) - 3.0).abs() < 1e-3);
    }

    #[test]
    fn plateau_of_test_family() {
        let r = family_plateau_start(&params(1.0, 10.0, 0)).unwrap();
        assert!((25.0..32.0).contains(&r), "{r}");
        let pot = SampledPotential::family(&params(1.0, 10.0, 0), RadialGrid::default()).unwrap();
        assert!((plateau_start(&pot).unwrap() - r).abs() < 0.5);
    }

    #[test]
    fn eigenfunction_reproduced() {
        let p = params(1.0, 10.0, 1);
        let spec = EigenfunctionSpec::new(0, &p).unwrap();
        let e = -spec.kappa() * spec.kappa();
        let pot = SampledPotential::family(&p, RadialGrid::default()).unwrap();
        let gf = matched_solution(&pot, e).unwrap();
        let scale = spec.value(1.0).unwrap() / gf.at(1.0);
        for i in 0..=45 {
            let r = 0.5 + 0.1 * i as f64;
            let exact = spec.value(gf.grid.r(gf.grid.index_of(r))).unwrap();
            assert!((gf.at(r) * scale - exact).abs() < 1e-5 * exact.abs(), "r={r}");
        }
    }

    #[test]
    fn gpt_hypergeometric_solution_matches_numerov() {
        let p = params(1.0, 10.0, 0);
        let k = 1.3;
        let gf = numerov_integrate(&p, k * k, RadialGrid::default()).unwrap();
        let scale = gpt_regular_solution(p.a(), p.b(), k, 1.0).unwrap() / gf.at(1.0);
        for i in 0..40 {
            let r = 0.5 + 0.25 * i as f64;
            let exact = gpt_regular_solution(p.a(), p.b(), k, gf.grid.r(gf.grid.index_of(r))).unwrap();
            assert!((gf.at(r) * scale - exact).abs() < 1e-6 * exact.abs().max(1e-3 * scale.abs().recip().min(1.0)), "r={r}");
        }
    }

    #[test]
    fn gpt_phase_matches_closed_form() {
        let p = params(1.0, 10.0, 0);
        let pe = numerov_phase_shift(&p, 1.3, &RadialGrid::default()).unwrap();
        let s = crate::scattering::s_gpt(p.a(), p.b(), 1.3).unwrap();
        assert!(phase_distance(pe.delta, 0.5 * s.arg()) < 1e-3);
    }

    #[test]
    fn shooting_gpt_baseline() {
        let p = params(1.0, 10.0, 0);
        let found = shoot_bound_states(&p, default_window(&p), 1e-9).unwrap();
        let expected: Vec<f64> = (0..5).map(|nu| -(4.5 - nu as f64).powi(2)).collect();
        assert_eq!(found.len(), expected.len());
        for (f, e) in found.iter().zip(&expected) {
            assert!((f - e).abs() < 1e-7, "{f} vs {e}");
        }
    }

    #[test]
    fn shooting_window_checked() {
        let p = params(1.0, 10.0, 2);
        assert!(shoot_bound_states(&p, (-1.0, 0.5), 1e-8).is_err());
        assert!(shoot_bound_states(&p, (-1.0, -2.0), 1e-8).is_err());
    }

    #[test]
    fn phase_distance_is_circular() {
        assert!(phase_distance(FRAC_PI_2 - 1e-3, -FRAC_PI_2 + 1e-3) < 2.1e-3);
        assert!((phase_distance(0.3, 0.1) - 0.2).abs() < 1e-15);
    }
}
