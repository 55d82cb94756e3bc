//! Probe-spin two-time correlator C(τ) = ⟨σ₀⁺(t+τ)σ₀⁻(t)⟩, computed two ways.
//!
//! The closed form reduces the probe trace analytically:
//!
//! ```text
//! C(τ) = e^{βh₀ − 2ih₀τ/ℏ} Z(β, h̃) / Z_T,    h̃ = h + λ − 2iλτ/(βℏ)
//! Z_T  = e^{βh₀} Z(β, h+λ) + e^{−βh₀} Z(β, h−λ)
//! ```
//!
//! The oracle builds H_T on all N+1 spins, evolves σ₀^± by dense unitary
//! conjugation and takes the thermal trace. It never touches the sector code.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    build_total_hamiltonian, site_operator, Pauli, ProbeParams, SpinModel, ThermalParams,
};
use crate::scaled::{log_sum_exp, ScaledComplex};
use crate::sector::{
    evaluate_partition, lee_yang_polynomial, sector_spectra, ComplexField, LeeYangPolynomial,
};

/// |C| below this marks a located minimum as a true zero.
pub const ZERO_THRESHOLD: f64 = 1e-6;
/// Golden-section refinement stops once the bracket is narrower than this.
pub const REFINE_WIDTH: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelatorQuery {
    pub model: SpinModel,
    pub probe: ProbeParams,
    pub thermal: ThermalParams,
    pub t: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Oracle => "oracle",
        }
    }
}

pub trait Correlator: Sync {
    fn evaluate(&self, t: f64, tau: f64) -> Complex64;
}

/// Closed-form evaluator; spectra and Z_T are computed once.
#[derive(Debug, Clone)]
pub struct ClosedFormCorrelator {
    poly: LeeYangPolynomial,
    bath_field: f64,
    probe: ProbeParams,
    thermal: ThermalParams,
    ln_total: f64,
}

impl ClosedFormCorrelator {
    pub fn new(model: &SpinModel, probe: &ProbeParams, thermal: &ThermalParams) -> Result<Self> {
        let poly = lee_yang_polynomial(&sector_spectra(model)?, thermal);
        let h = model.bath_field();
        let bh0 = thermal.beta * probe.h0;
        let up = evaluate_partition(&poly, &ComplexField::real(h + probe.lambda));
        let down = evaluate_partition(&poly, &ComplexField::real(h - probe.lambda));
        let ln_total = log_sum_exp([bh0 + up.ln_abs, -bh0 + down.ln_abs]);
        Ok(Self {
            poly,
            bath_field: h,
            probe: *probe,
            thermal: *thermal,
            ln_total,
        })
    }

    pub fn polynomial(&self) -> &LeeYangPolynomial {
        &self.poly
    }

    /// ln Z_T
    pub fn ln_total_partition(&self) -> f64 {
        self.ln_total
    }

    pub fn evaluate_scaled(&self, tau: f64) -> ScaledComplex {
        let ThermalParams { beta, hbar } = self.thermal;
        let field = ComplexField::from_probe(self.bath_field, self.probe.lambda, tau, &self.thermal);
        let z = evaluate_partition(&self.poly, &field);
        let prefactor = ScaledComplex::new(
            beta * self.probe.h0,
            -2.0 * self.probe.h0 * tau / hbar,
        );
        prefactor * z / ScaledComplex::new(self.ln_total, 0.0)
    }
}

impl Correlator for ClosedFormCorrelator {
    fn evaluate(&self, _t: f64, tau: f64) -> Complex64 {
        self.evaluate_scaled(tau).to_complex()
    }
}

/// Full-space evaluator: one eigendecomposition of H_T, then matrix phases.
#[derive(Debug, Clone)]
pub struct OracleCorrelator {
    energies: DVector<f64>,
    vectors: DMatrix<Complex64>,
    rho: DMatrix<Complex64>,
    raise: DMatrix<Complex64>,
    lower: DMatrix<Complex64>,
    hbar: f64,
}

impl OracleCorrelator {
    pub fn new(model: &SpinModel, probe: &ProbeParams, thermal: &ThermalParams) -> Result<Self> {
        let ht = build_total_hamiltonian(model, probe)?;
        let probe_site = model.n_sites();
        let n = probe_site + 1;
        let x = site_operator(n, probe_site, Pauli::X)?.into_matrix();
        let y = site_operator(n, probe_site, Pauli::Y)?.into_matrix();
        let i = Complex64::new(0.0, 1.0);
        let half = Complex64::new(0.5, 0.0);
        let raise = (&x + &y * i) * half;
        let lower = (&x - &y * i) * half;

        let eig = SymmetricEigen::new(ht.into_matrix());
        let e_min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let weights = eig
            .eigenvalues
            .map(|e| (-thermal.beta * (e - e_min)).exp());
        let norm: f64 = weights.iter().sum();
        let diag = DMatrix::from_diagonal(&weights.map(|w| Complex64::new(w / norm, 0.0)));
        let rho = &eig.eigenvectors * diag * eig.eigenvectors.adjoint();
        Ok(Self {
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
            rho,
            raise,
            lower,
            hbar: thermal.hbar,
        })
    }

    /// e^{−iH_T s/ℏ}
    fn propagator(&self, s: f64) -> DMatrix<Complex64> {
        let phases = self
            .energies
            .map(|e| Complex64::from_polar(1.0, -e * s / self.hbar));
        &self.vectors * DMatrix::from_diagonal(&phases) * self.vectors.adjoint()
    }

    /// U(s)† A U(s)
    fn heisenberg(&self, op: &DMatrix<Complex64>, s: f64) -> DMatrix<Complex64> {
        let u = self.propagator(s);
        u.adjoint() * op * u
    }
}

impl Correlator for OracleCorrelator {
    fn evaluate(&self, t: f64, tau: f64) -> Complex64 {
        let product = self.heisenberg(&self.raise, t + tau) * self.heisenberg(&self.lower, t);
        (&self.rho * product).trace()
    }
}

pub fn closed_form_correlator(query: &CorrelatorQuery) -> Result<Complex64> {
    let c = ClosedFormCorrelator::new(&query.model, &query.probe, &query.thermal)?;
    Ok(c.evaluate(query.t, query.tau))
}

pub fn oracle_correlator(query: &CorrelatorQuery) -> Result<Complex64> {
    let c = OracleCorrelator::new(&query.model, &query.probe, &query.thermal)?;
    Ok(c.evaluate(query.t, query.tau))
}

fn build(
    method: Method,
    model: &SpinModel,
    probe: &ProbeParams,
    thermal: &ThermalParams,
) -> Result<Box<dyn Correlator>> {
    Ok(match method {
        Method::ClosedForm => Box::new(ClosedFormCorrelator::new(model, probe, thermal)?),
        Method::Oracle => Box::new(OracleCorrelator::new(model, probe, thermal)?),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelatorTrace {
    pub tau_grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub model: SpinModel,
    pub probe: ProbeParams,
    pub thermal: ThermalParams,
    pub t: f64,
    pub method: Method,
}

impl CorrelatorTrace {
    /// Adds independent Gaussian noise of standard deviation `amplitude` to
    /// the real and imaginary part of every sample.
    pub fn with_additive_noise(mut self, amplitude: f64, seed: u64) -> Self {
        if amplitude > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let normal = Normal::new(0.0, amplitude).expect("finite amplitude");
            for v in &mut self.values {
                *v += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
            }
        }
        self
    }
}

/// Evenly spaced grid including both endpoints.
pub fn linear_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub fn scan_correlator(
    model: &SpinModel,
    probe: &ProbeParams,
    thermal: &ThermalParams,
    t: f64,
    tau_grid: &[f64],
    method: Method,
) -> Result<CorrelatorTrace> {
    if tau_grid.is_empty()
        || tau_grid.iter().any(|x| !x.is_finite())
        || tau_grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::InvalidGrid);
    }
    let evaluator = build(method, model, probe, thermal)?;
    let values = tau_grid
        .par_iter()
        .map(|&tau| evaluator.evaluate(t, tau))
        .collect();
    Ok(CorrelatorTrace {
        tau_grid: tau_grid.to_vec(),
        values,
        model: model.clone(),
        probe: *probe,
        thermal: *thermal,
        t,
        method,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelatorMinimum {
    pub tau: f64,
    pub abs_c: f64,
    pub is_zero: bool,
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, width: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > width {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}

/// Interior local minima of |C| on the trace grid, each refined by
/// golden-section search on the trace's own evaluator.
pub fn locate_correlator_zeros(trace: &CorrelatorTrace) -> Result<Vec<CorrelatorMinimum>> {
    if trace.values.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let abs: Vec<f64> = trace.values.iter().map(|v| v.norm()).collect();
    // flat traces (λ = 0) differ only by rounding; ignore such wiggles
    let dips = |lo: f64, hi: f64| lo < hi * (1.0 - 1e-12);
    let candidates: Vec<usize> = (1..abs.len().saturating_sub(1))
        .filter(|&i| dips(abs[i], abs[i - 1]) && abs[i] <= abs[i + 1])
        .collect();
    if candidates.is_empty() {
        return Ok(Vec::new());
    }
    let evaluator = build(trace.method, &trace.model, &trace.probe, &trace.thermal)?;
    let f = |tau: f64| evaluator.evaluate(trace.t, tau).norm();
    Ok(candidates
        .into_iter()
        .map(|i| {
            let tau = golden_section(f, trace.tau_grid[i - 1], trace.tau_grid[i + 1], REFINE_WIDTH);
            let abs_c = f(tau);
            CorrelatorMinimum {
                tau,
                abs_c,
                is_zero: abs_c < ZERO_THRESHOLD,
            }
        })
        .collect())
}
