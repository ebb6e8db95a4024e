//! Acceptance checks. Prints one `PASS`/`FAIL` line per criterion and exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use xmjacobi::orthopoly::{gram_matrix, norm_h, pmn_via_ab, xm_jacobi, FamilyParams, QuadratureConfig};
use xmjacobi::potential::{count_sign_changes, schrodinger_residual, shape_invariance_residual, EigenfunctionSpec};
use xmjacobi::radial::{compare_phase_shifts, default_window, shoot_bound_states, RadialGrid};
use xmjacobi::scattering::{asymptotic_coeffs_x2, asymptotic_coeffs_xm, s_gpt, s_gpt_complex, s_xm, s_xm_complex};

type Outcome = Result<(f64, f64), String>;

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn p(g: f64, h: f64, m: usize) -> FamilyParams {
    FamilyParams::new(g, h, m).unwrap()
}

/// Pairs wide enough to admit m up to 5.
const WIDE: [(f64, f64); 3] = [(1.0, 14.0), (2.0, 15.5), (0.5, 12.5)];
const NARROW: [(f64, f64); 3] = [(1.0, 10.0), (2.0, 9.0), (0.5, 8.5)];

fn sweep() -> impl Iterator<Item = f64> {
    (1..=1000).map(|j| 0.01 * j as f64)
}

fn m0_reduction() -> Outcome {
    let mut worst = 0.0f64;
    for (g, h) in WIDE {
        let fp = p(g, h, 0);
        for k in sweep() {
            let d = (s_xm(&fp, k).map_err(|e| e.to_string())? - s_gpt(fp.a(), fp.b(), k).map_err(|e| e.to_string())?).norm();
            worst = worst.max(d);
        }
    }
    Ok((worst, 1e-12))
}

fn unitarity() -> Outcome {
    let mut worst = 0.0f64;
    for (g, h) in WIDE {
        for m in 0..=5 {
            let fp = p(g, h, m);
            for k in sweep() {
                worst = worst.max((s_xm(&fp, k).map_err(|e| e.to_string())?.norm() - 1.0).abs());
            }
        }
    }
    Ok((worst, 1e-10))
}

fn route_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for (g, h) in NARROW {
        let fp = p(g, h, 2);
        for _ in 0..50 {
            let k: f64 = rng.gen_range(0.05..10.0);
            let closed = s_xm(&fp, k).map_err(|e| e.to_string())?;
            let via_p = asymptotic_coeffs_x2(&fp, k).map_err(|e| e.to_string())?.s_via_p(k);
            let via_q = asymptotic_coeffs_xm(&fp, k).map_err(|e| e.to_string())?.s_via_q(k);
            worst = worst.max((via_p - closed).norm()).max((via_q - closed).norm()).max((via_p - via_q).norm());
        }
    }
    Ok((worst, 1e-11))
}

fn ode_cross_validation() -> Outcome {
    let ks = [0.5, 1.0, 2.0, 4.0];
    let grid = RadialGrid::default();
    let mut worst = 0.0f64;
    for m in 0..=2 {
        let fp = p(1.0, 10.0, m);
        worst = worst.max(compare_phase_shifts(&fp, &fp, &ks, &grid).map_err(|e| e.to_string())?.max_diff);
    }
    // an m-mismatched comparison must be visibly wrong
    let control = compare_phase_shifts(&p(1.0, 10.0, 1), &p(1.0, 10.0, 2), &ks, &grid)
        .map_err(|e| e.to_string())?
        .max_diff;
    if control <= 1e-2 {
        return Err(format!("negative control only reached {control:.3e} rad"));
    }
    println!("    negative control (m=1 potential vs m=2 closed form): max diff {control:.3e} rad");
    Ok((worst, 1e-3))
}

fn spectrum_shooting() -> Outcome {
    let mut worst = 0.0f64;
    for m in 0..=2 {
        let fp = p(1.0, 10.0, m);
        let a = (10.0 - 1.0 - 2.0 * m as f64) / 2.0;
        let nu_b = (10.0 - 1.0) / 2.0;
        let count = (nu_b - m as f64).floor() as usize + 1;
        let found = shoot_bound_states(&fp, default_window(&fp), 1e-10).map_err(|e| e.to_string())?;
        if found.len() != count {
            return Err(format!("m={m}: found {} states, expected {count}", found.len()));
        }
        for (nu, e) in found.iter().enumerate() {
            worst = worst.max((e + (a - nu as f64).powi(2)).abs());
        }
    }
    Ok((worst, 1e-6))
}

fn shape_invariance() -> Outcome {
    let mut worst = 0.0f64;
    for (g, h) in NARROW {
        for m in 0..=3 {
            let fp = p(g, h, m);
            for i in 0..=500 {
                let r = 0.1 + 9.9 * i as f64 / 500.0;
                worst = worst.max(shape_invariance_residual(&fp, r).map_err(|e| e.to_string())?.abs());
            }
        }
    }
    Ok((worst, 1e-8))
}

fn eigenfunction_residual() -> Outcome {
    let cases: Vec<(FamilyParams, usize)> = NARROW
        .iter()
        .flat_map(|&(g, h)| (0..=2).map(move |m| p(g, h, m)))
        .flat_map(|fp| fp.bound_indices().map(move |nu| (fp, nu)))
        .collect();
    let results: Vec<Result<f64, String>> = cases
        .par_iter()
        .map(|&(fp, nu)| {
            let spec = EigenfunctionSpec::new(nu, &fp).map_err(|e| e.to_string())?;
            let nodes = count_sign_changes(|r| spec.value(r), 1e-3, 30.0, 30_000).map_err(|e| e.to_string())?;
            if nodes != nu {
                return Err(format!("{fp:?} nu={nu}: {nodes} nodes"));
            }
            schrodinger_residual(&spec, 1e-3).map_err(|e| e.to_string())
        })
        .collect();
    let mut worst = 0.0f64;
    for r in results {
        worst = worst.max(r?);
    }
    Ok((worst, 1e-5))
}

fn orthogonality() -> Outcome {
    let mut worst = 0.0f64;
    for (g, h) in NARROW {
        for m in 0..=3 {
            let fp = p(g, h, m);
            let quad = QuadratureConfig::auto(&fp).map_err(|e| e.to_string())?;
            let gram = gram_matrix(&fp, &quad).map_err(|e| e.to_string())?;
            for i in 0..gram.len() {
                let closed = norm_h(i, &fp).map_err(|e| e.to_string())?;
                worst = worst.max((gram[i][i] - closed).abs() / closed);
                for j in 0..gram.len() {
                    if i != j {
                        worst = worst.max(gram[i][j].abs() / (gram[i][i] * gram[j][j]).sqrt());
                    }
                }
            }
        }
    }
    Ok((worst, 1e-8))
}

fn dual_construction() -> Outcome {
    let mut worst = 0.0f64;
    for (g, h) in NARROW {
        for m in 1..=3 {
            let fp = p(g, h, m);
            for nu in fp.bound_indices() {
                let a = xm_jacobi(nu, &fp).map_err(|e| e.to_string())?;
                let b = pmn_via_ab(nu, &fp).map_err(|e| e.to_string())?;
                let ys: Vec<f64> = (0..400).map(|i| 1.0 + 0.1 * i as f64).collect();
                let scale = ys.iter().fold(0.0f64, |s, &y| s.max(a.eval(y).abs()));
                let ratios: Vec<f64> = ys
                    .iter()
                    .filter(|&&y| a.eval(y).abs() > 1e-3 * scale)
                    .map(|&y| b.eval(y) / a.eval(y))
                    .collect();
                let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
                let spread = ratios.iter().fold(0.0f64, |s, r| s.max((r - mean).abs())) / mean.abs();
                worst = worst.max(spread);
            }
        }
    }
    Ok((worst, 1e-9))
}

/// m-dependent factor written out directly from its factorized form.
fn bracket_oracle(b: f64, m: f64, k: Complex64) -> Complex64 {
    let ik = Complex64::i() * k;
    (b - ik + 0.5) * (b + ik + 0.5 - m) / ((b + ik + 0.5) * (b - ik + 0.5 - m))
}

fn pole_structure() -> Outcome {
    let mut smallest = f64::INFINITY;
    let mut worst_extra = 0.0f64;
    for (g, h) in NARROW {
        for m in 0..=3 {
            let fp = p(g, h, m);
            for nu in fp.bound_indices() {
                let kappa = fp.a() - nu as f64;
                for offset in [Complex64::new(1e-4, 0.0), Complex64::new(0.0, 1e-4), Complex64::new(0.0, -1e-4)] {
                    let k = Complex64::new(0.0, kappa) + offset;
                    let s = s_xm_complex(&fp, k).map_err(|e| e.to_string())?;
                    smallest = smallest.min(s.norm());
                }
            }
            // between the inherited poles the ratio to S_GPT is the bracket,
            // which must stay finite on the whole segment 0 < Im k < A
            let n = 20_000;
            for i in 1..n {
                let k = Complex64::new(0.0, fp.a() * i as f64 / n as f64);
                let (Ok(sx), Ok(sg)) = (s_xm_complex(&fp, k), s_gpt_complex(fp.a(), fp.b(), k)) else {
                    continue;
                };
                if !sg.is_finite() || sg.norm() == 0.0 {
                    continue;
                }
                let ratio = sx / sg;
                let oracle = bracket_oracle(fp.b(), fp.mf(), k);
                if !ratio.is_finite() || (ratio - oracle).norm() > 1e-8 * oracle.norm().max(1.0) {
                    return Err(format!("{fp:?}: S/S_GPT deviates from bracket at k = {k}"));
                }
                worst_extra = worst_extra.max(oracle.norm());
            }
        }
    }
    println!("    min |S| near bound-state poles {smallest:.3e}; max |S/S_GPT| on 0 < Im k < A {worst_extra:.3e}");
    if worst_extra > 1e3 {
        return Err(format!("extra pole: |S/S_GPT| reached {worst_extra:.3e}"));
    }
    Ok((1e3 / smallest, 1.0))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "m=0 reduction to S_GPT", budget: Duration::from_secs(1), run: m0_reduction },
        Criterion { id: 2, name: "unitarity m=0..5", budget: Duration::from_secs(5), run: unitarity },
        Criterion { id: 3, name: "P/Q/closed-form route equivalence m=2", budget: Duration::from_secs(1), run: route_equivalence },
        Criterion { id: 4, name: "Numerov phase shifts vs closed form", budget: Duration::from_secs(30), run: ode_cross_validation },
        Criterion { id: 5, name: "shooting recovers bound spectrum", budget: Duration::from_secs(60), run: spectrum_shooting },
        Criterion { id: 6, name: "shape invariance residual", budget: Duration::from_secs(1), run: shape_invariance },
        Criterion { id: 7, name: "eigenfunction residual and nodes", budget: Duration::from_secs(10), run: eigenfunction_residual },
        Criterion { id: 8, name: "Gram matrix vs closed-form norms", budget: Duration::from_secs(20), run: orthogonality },
        Criterion { id: 9, name: "dual polynomial construction", budget: Duration::from_secs(1), run: dual_construction },
        Criterion { id: 10, name: "pole structure (value is 1e3/min|S|)", budget: Duration::from_secs(5), run: pole_structure },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok((value, tol)) => (value < tol, format!("value {value:.3e} < {tol:.0e}")),
            Err(msg) => (false, msg),
        };
        let in_time = elapsed <= c.budget;
        let verdict = if ok && in_time { "PASS" } else { "FAIL" };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!(
            "{verdict} criterion {:>2}: {} | {detail} | {:.2}s (budget {}s)",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
