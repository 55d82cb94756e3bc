//! Magnetization-sector decomposition of the bath partition function.
//!
//! Because H' conserves Σσᶻ, the trace splits over sectors with `k` up spins:
//!
//! ```text
//! Z(β, h̃) = Σ_k W_k e^{βh̃(2k − N)} = e^{−βh̃N} Σ_k W_k q^k,   q = e^{2βh̃}
//! ```
//!
//! with W_k = Σ_{E ∈ sector k} e^{−βE}. The field never enters a matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    build_bath_interaction, ModelKind, SpinModel, ThermalParams, SECTOR_MAX_SITES,
};
use crate::scaled::{log_sum_exp, ScaledComplex};

/// Eigenvalues of H' in each sector, indexed by number of up spins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorSpectrum {
    pub n_sites: usize,
    pub sectors: Vec<Vec<f64>>,
}

impl SectorSpectrum {
    /// All eigenvalues, ascending.
    pub fn full_spectrum(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.sectors.iter().flatten().copied().collect();
        all.sort_by(f64::total_cmp);
        all
    }
}

/// Basis states with exactly `k` of `n` bits set, ascending.
pub(crate) fn sector_states(n: usize, k: usize) -> Vec<usize> {
    (0..1usize << n)
        .filter(|b| b.count_ones() as usize == k)
        .collect()
}

fn sector_block(model: &SpinModel, states: &[usize]) -> DMatrix<f64> {
    let dim = states.len();
    let mut block = DMatrix::zeros(dim, dim);
    for (col, &b) in states.iter().enumerate() {
        block[(col, col)] = model.diagonal_energy(b);
        for c in model.couplings() {
            if ((b >> c.i) & 1) != ((b >> c.j) & 1) {
                // (σˣσˣ + σʸσʸ) swaps an antiparallel pair with amplitude 2
                let target = b ^ ((1 << c.i) | (1 << c.j));
                let row = states
                    .binary_search(&target)
                    .expect("flip-flop stays in sector");
                block[(row, col)] += -2.0 * c.strength;
            }
        }
    }
    block
}

fn sector_eigenvalues(model: &SpinModel, k: usize) -> Vec<f64> {
    let states = sector_states(model.n_sites(), k);
    let mut ev: Vec<f64> = match model.kind() {
        ModelKind::IsingZz => states.iter().map(|&b| model.diagonal_energy(b)).collect(),
        ModelKind::Heisenberg => {
            let block = sector_block(model, &states);
            let trace = block.trace();
            let ev: Vec<f64> = SymmetricEigen::new(block).eigenvalues.iter().copied().collect();
            debug_assert!(
                (ev.iter().sum::<f64>() - trace).abs() <= 1e-9 * (1.0 + trace.abs()),
                "sector {k}: eigenvalue sum disagrees with block trace"
            );
            ev
        }
    };
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn sector_spectra(model: &SpinModel) -> Result<SectorSpectrum> {
    let n = model.n_sites();
    if n > SECTOR_MAX_SITES {
        return Err(Error::DimensionCap {
            sites: n,
            cap: SECTOR_MAX_SITES,
            what: "sector diagonalization",
        });
    }
    let sectors = (0..=n)
        .into_par_iter()
        .map(|k| sector_eigenvalues(model, k))
        .collect();
    Ok(SectorSpectrum { n_sites: n, sectors })
}

/// Σ_k W_k q^k with the sector weights held in log space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeeYangPolynomial {
    beta: f64,
    ln_weights: Vec<f64>,
    ln_scale: f64,
    scaled: Vec<f64>,
}

impl LeeYangPolynomial {
    /// Builds the polynomial directly from ln W_k, lowest power first.
    pub fn from_ln_weights(beta: f64, ln_weights: Vec<f64>) -> Self {
        let ln_scale = ln_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scaled = ln_weights.iter().map(|w| (w - ln_scale).exp()).collect();
        Self {
            beta,
            ln_weights,
            ln_scale,
            scaled,
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn degree(&self) -> usize {
        self.ln_weights.len() - 1
    }

    pub fn ln_weights(&self) -> &[f64] {
        &self.ln_weights
    }

    /// W_k; entries may overflow to infinity for extreme β.
    pub fn weights(&self) -> Vec<f64> {
        self.ln_weights.iter().map(|w| w.exp()).collect()
    }

    /// ln max_k W_k
    pub fn ln_scale(&self) -> f64 {
        self.ln_scale
    }

    /// W_k / max W, all in (0, 1].
    pub fn scaled_coefficients(&self) -> &[f64] {
        &self.scaled
    }

    /// Σ c_k q^k on the scaled coefficients.
    pub fn eval_scaled(&self, q: Complex64) -> Complex64 {
        horner(&self.scaled, q)
    }
}

pub(crate) fn horner(coeffs: &[f64], x: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

pub fn lee_yang_polynomial(spectra: &SectorSpectrum, thermal: &ThermalParams) -> LeeYangPolynomial {
    let beta = thermal.beta;
    let ln_weights = spectra
        .sectors
        .iter()
        .map(|energies| log_sum_exp(energies.iter().map(|e| -beta * e)))
        .collect();
    LeeYangPolynomial::from_ln_weights(beta, ln_weights)
}

/// Complex magnetic field h̃.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexField(pub Complex64);

impl ComplexField {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::NonFinite("complex field"));
        }
        Ok(Self(Complex64::new(re, im)))
    }

    pub fn real(h: f64) -> Self {
        Self(Complex64::new(h, 0.0))
    }

    /// h̃ = h + λ − i·2λτ/(βℏ), the field seen by the bath in the probe correlator.
    pub fn from_probe(h: f64, lambda: f64, tau: f64, thermal: &ThermalParams) -> Self {
        Self(Complex64::new(
            h + lambda,
            -2.0 * lambda * tau / (thermal.beta * thermal.hbar),
        ))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

/// Z(β, h̃) = e^{−βh̃N} P(e^{2βh̃}).
///
/// Horner runs in q when |q| ≤ 1 and in 1/q on the reversed coefficients
/// otherwise, so every power stays bounded by one.
pub fn evaluate_partition(poly: &LeeYangPolynomial, field: &ComplexField) -> ScaledComplex {
    let n = poly.degree() as f64;
    let bh = poly.beta * field.0;
    let z = 2.0 * bh;
    let (sum, prefactor) = if z.re <= 0.0 {
        (horner(&poly.scaled, z.exp()), -bh * n)
    } else {
        let rev: Vec<f64> = poly.scaled.iter().rev().copied().collect();
        (horner(&rev, (-z).exp()), bh * n)
    };
    let s = ScaledComplex::from_complex(sum);
    ScaledComplex::new(
        s.ln_abs + prefactor.re + poly.ln_scale,
        s.arg + prefactor.im,
    )
}

/// Literal trace Σ_n e^{−βE_n} ⟨n|e^{βh̃Σσᶻ}|n⟩ over a full-space
/// eigendecomposition of H'. Shares nothing with the sector path.
pub fn brute_force_partition(
    model: &SpinModel,
    thermal: &ThermalParams,
    field: &ComplexField,
) -> Result<ScaledComplex> {
    let n = model.n_sites();
    let h = build_bath_interaction(model)?;
    let eig = SymmetricEigen::new(h.into_matrix());
    let beta = thermal.beta;
    let bh = beta * field.0;

    let e_min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = beta * field.0.re.abs() * n as f64;
    let diag_phase: Vec<Complex64> = (0..1usize << n)
        .map(|b| {
            let m = 2.0 * b.count_ones() as f64 - n as f64;
            (bh * m - shift).exp()
        })
        .collect();

    let mut total = Complex64::new(0.0, 0.0);
    for (col, &e) in eig.eigenvalues.iter().enumerate() {
        let boltz = (-beta * (e - e_min)).exp();
        let expect: Complex64 = eig
            .eigenvectors
            .column(col)
            .iter()
            .zip(&diag_phase)
            .map(|(v, ph)| ph * v.norm_sqr())
            .sum();
        total += expect * boltz;
    }
    let s = ScaledComplex::from_complex(total);
    Ok(ScaledComplex::new(s.ln_abs - beta * e_min + shift, s.arg))
}
