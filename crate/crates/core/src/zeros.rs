//! Lee-Yang zeros: roots of the fugacity polynomial and the correlator
//! zero-times they imply.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ProbeParams, ThermalParams};
use crate::sector::{horner, LeeYangPolynomial};

pub const DEFAULT_MAX_ITERATIONS: usize = 200;
/// Roots closer than this are reported as one multiple root.
pub const CLUSTER_DISTANCE: f64 = 1e-8;
/// Accepted backward error |P(q)| / Σ|c_k||q|^k of a polished root.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// |Re h̃_zero − (h + λ)| below which a zero is reachable in real time.
pub const REACHABILITY_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_WINDINGS: u32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// Backward error of each root on the scaled coefficients.
    pub residuals: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub iterations: usize,
}

/// |P(z)| / Σ|c_k||z|^k
pub fn backward_error(coeffs: &[f64], z: Complex64) -> f64 {
    let r = z.norm();
    let scale = coeffs
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * r + c.abs());
    if scale == 0.0 {
        0.0
    } else {
        horner(coeffs, z).norm() / scale
    }
}

/// P(z) and P'(z).
fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect()
}

/// Guesses on a circle of radius (|c₀|/|c_N|)^{1/N}, rotated off the real axis.
fn initial_guesses(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let radius = (coeffs[0].abs() / coeffs[n].abs()).powf(1.0 / n as f64);
    (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect()
}

fn aberth(coeffs: &[f64], max_iterations: usize) -> (Vec<Complex64>, usize, bool) {
    let mut z = initial_guesses(coeffs);
    let n = z.len();
    let mut converged = vec![false; n];
    for iter in 1..=max_iterations {
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let (p, dp) = eval_with_derivative(coeffs, z[i]);
            if p.norm() == 0.0 {
                converged[i] = true;
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                continue;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                converged[i] = true;
            }
        }
        if converged.iter().all(|&c| c) {
            return (z, iter, true);
        }
    }
    (z, max_iterations, false)
}

/// Newton on `coeffs`, keeping the iterate with the smallest backward error.
fn newton_polish(coeffs: &[f64], start: Complex64) -> Complex64 {
    let mut best = start;
    let mut best_err = backward_error(coeffs, start);
    let mut z = start;
    for _ in 0..8 {
        if best_err == 0.0 {
            break;
        }
        let (p, dp) = eval_with_derivative(coeffs, z);
        let step = p / dp;
        if !step.is_finite() {
            break;
        }
        z -= step;
        let err = backward_error(coeffs, z);
        if err < best_err {
            best = z;
            best_err = err;
        }
    }
    best
}

/// Groups roots whose Newton inclusion disks overlap. The disk radius
/// N(|P| + γΣ|c_k||z|^k)/|P'| counts Horner rounding as part of the residual,
/// so approximations of one multiple root land in one group.
fn inclusion_groups(coeffs: &[f64], roots: &[Complex64]) -> Vec<(Vec<usize>, f64)> {
    let n = roots.len();
    let gamma = 4.0 * n as f64 * f64::EPSILON;
    let radii: Vec<f64> = roots
        .iter()
        .map(|&z| {
            let (p, dp) = eval_with_derivative(coeffs, z);
            let r = z.norm();
            let scale = coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c.abs());
            n as f64 * (p.norm() + gamma * scale) / dp.norm()
        })
        .collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (roots[i] - roots[j]).norm() <= radii[i] + radii[j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(Vec<usize>, f64)> = Vec::new();
    let mut label = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if label[r] == usize::MAX {
            label[r] = groups.len();
            groups.push((Vec::new(), 0.0));
        }
        let g = &mut groups[label[r]];
        g.0.push(i);
        g.1 = g.1.max(radii[i]);
    }
    groups
}

/// Collapses a cluster of `m` approximations of one multiple root onto their
/// centroid, then polishes it as a simple root of P^{(m−1)}.
fn refine_cluster(coeffs: &[f64], members: &[Complex64], radius: f64) -> Option<Complex64> {
    let m = members.len();
    let centroid = members.iter().sum::<Complex64>() / m as f64;
    let mut d = coeffs.to_vec();
    for _ in 1..m {
        d = derivative(&d);
    }
    let refined = newton_polish(&d, centroid);
    let before = backward_error(coeffs, centroid);
    let after = backward_error(coeffs, refined);
    if (refined - centroid).norm() <= radius && after <= before.max(1e-14) {
        Some(refined)
    } else if before <= RESIDUAL_TOLERANCE {
        Some(centroid)
    } else {
        None
    }
}

/// All roots of Σ c_k q^k by Aberth–Ehrlich iteration on the scaled
/// coefficients, then Newton polish and multiple-root cluster refinement.
pub fn find_polynomial_roots(poly: &LeeYangPolynomial) -> Result<RootSet> {
    find_roots_of(poly.scaled_coefficients(), DEFAULT_MAX_ITERATIONS)
}

/// Root finder on raw real coefficients, lowest power first.
pub fn find_roots_of(coeffs: &[f64], max_iterations: usize) -> Result<RootSet> {
    let mut coeffs = coeffs.to_vec();
    while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
        coeffs.pop();
    }
    if coeffs.len() < 2 {
        return Err(Error::ZeroDegree);
    }
    let (raw, iterations, _) = aberth(&coeffs, max_iterations);
    let mut roots: Vec<Complex64> = raw.iter().map(|&z| newton_polish(&coeffs, z)).collect();

    for (group, radius) in inclusion_groups(&coeffs, &roots) {
        if group.len() < 2 {
            continue;
        }
        let members: Vec<Complex64> = group.iter().map(|&i| roots[i]).collect();
        if let Some(c) = refine_cluster(&coeffs, &members, radius) {
            for &i in &group {
                roots[i] = c;
            }
        }
    }

    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let residuals: Vec<f64> = roots.iter().map(|&z| backward_error(&coeffs, z)).collect();
    let worst_residual = residuals.iter().copied().fold(0.0, f64::max);
    if !(worst_residual < RESIDUAL_TOLERANCE) {
        return Err(Error::NoConvergence {
            iterations,
            worst_residual,
            residuals,
        });
    }
    let multiplicities = roots
        .iter()
        .map(|a| roots.iter().filter(|b| (a - *b).norm() < CLUSTER_DISTANCE).count())
        .collect();
    Ok(RootSet {
        roots,
        residuals,
        multiplicities,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeeYangZero {
    pub q: Complex64,
    /// Principal branch: (ln|q| + i arg q) / 2β.
    pub h_tilde: Complex64,
    /// arg q in (−π, π].
    pub phase: f64,
    pub modulus_deviation: f64,
    pub residual: f64,
}

pub fn roots_to_fields(roots: &RootSet, thermal: &ThermalParams) -> Vec<LeeYangZero> {
    roots
        .roots
        .iter()
        .zip(&roots.residuals)
        .map(|(&q, &residual)| {
            let phase = if q.im == 0.0 && q.re < 0.0 { PI } else { q.arg() };
            LeeYangZero {
                q,
                h_tilde: Complex64::new(q.norm().ln(), phase) / (2.0 * thermal.beta),
                phase,
                modulus_deviation: (q.norm() - 1.0).abs(),
                residual,
            }
        })
        .collect()
}

pub fn unit_circle_check(zeros: &[LeeYangZero]) -> f64 {
    zeros
        .iter()
        .map(|z| z.modulus_deviation)
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroTime {
    /// Index into the zero list this time came from.
    pub source: usize,
    pub winding: u32,
    /// For unreachable zeros: the time the zero would occur at once the bath
    /// field is moved to `required_h`.
    pub tau: f64,
    pub reachable: bool,
    /// Bath field h for which Re h̃ = h + λ hits this zero.
    pub required_h: f64,
    /// |C(τ)| once verified against the correlator.
    pub residual: Option<f64>,
}

/// Spacing between successive zero times of the same Lee-Yang zero, πℏ/(2|λ|).
pub fn zero_time_period(probe: &ProbeParams, thermal: &ThermalParams) -> f64 {
    PI * thermal.hbar / (2.0 * probe.lambda.abs())
}

/// Real times at which q(τ) = e^{2β(h+λ)} e^{−4iλτ/ℏ} lands on a zero.
///
/// Reachable zeros yield `windings` times each, τ ≥ 0, sorted ascending over
/// all zeros. Unreachable zeros yield one entry each (winding 0).
pub fn zero_times(
    zeros: &[LeeYangZero],
    bath_field: f64,
    probe: &ProbeParams,
    thermal: &ThermalParams,
    windings: u32,
) -> Result<Vec<ZeroTime>> {
    if probe.lambda == 0.0 {
        return Err(Error::ProbeDecoupled);
    }
    let period = zero_time_period(probe, thermal);
    let mut out = Vec::new();
    for (source, z) in zeros.iter().enumerate() {
        let required_h = z.h_tilde.re - probe.lambda;
        let reachable = (z.h_tilde.re - (bath_field + probe.lambda)).abs() < REACHABILITY_TOLERANCE;
        // −4λτ/ℏ ≡ arg q (mod 2π)
        let first = (-thermal.hbar * z.phase / (4.0 * probe.lambda)).rem_euclid(period);
        let count = if reachable { windings } else { 1 };
        out.extend((0..count).map(|n| ZeroTime {
            source,
            winding: n,
            tau: first + n as f64 * period,
            reachable,
            required_h,
            residual: None,
        }));
    }
    out.sort_by(|a, b| {
        b.reachable
            .cmp(&a.reachable)
            .then(a.tau.total_cmp(&b.tau))
            .then(a.source.cmp(&b.source))
    });
    Ok(out)
}
