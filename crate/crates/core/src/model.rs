//! Spin-1/2 bath models and their dense operators in the σᶻ product basis.
//!
//! Basis state `b` has site `j` up (σᶻ = +1) iff bit `j` of `b` is set, so the
//! total magnetization of `b` is `2 * popcount(b) - n`. When a probe spin is
//! attached it occupies the highest bit.

use std::collections::HashSet;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest bath handled by magnetization-sector diagonalization.
pub const SECTOR_MAX_SITES: usize = 14;

/// Largest system (bath plus probe) materialized as a dense full-space matrix.
pub const FULL_SPACE_MAX_SITES: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// H' = −Σ J σᶻσᶻ
    IsingZz,
    /// H' = −Σ J (σˣσˣ + σʸσʸ + σᶻσᶻ)
    Heisenberg,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::IsingZz => "ising_zz",
            ModelKind::Heisenberg => "heisenberg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub strength: f64,
}

/// Bath of `n_sites` spins with H = H' − h Σσᶻ.
///
/// Couplings are stored with `i < j`; input pairs in either order are accepted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinModel {
    n_sites: usize,
    kind: ModelKind,
    couplings: Vec<Coupling>,
    bath_field: f64,
}

impl SpinModel {
    pub fn new(
        n_sites: usize,
        kind: ModelKind,
        couplings: impl IntoIterator<Item = (usize, usize, f64)>,
        bath_field: f64,
    ) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::NoSites);
        }
        if !bath_field.is_finite() {
            return Err(Error::NonFinite("field_h"));
        }
        let mut seen = HashSet::new();
        let mut stored = Vec::new();
        for (a, b, strength) in couplings {
            if a >= n_sites || b >= n_sites {
                return Err(Error::CouplingOutOfRange(a, b, n_sites));
            }
            if a == b {
                return Err(Error::SelfCoupling(a));
            }
            if !strength.is_finite() {
                return Err(Error::NonFinite("coupling"));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((i, j)) {
                return Err(Error::DuplicateCoupling(i, j));
            }
            stored.push(Coupling { i, j, strength });
        }
        Ok(Self {
            n_sites,
            kind,
            couplings: stored,
            bath_field,
        })
    }

    /// Two bath spins coupled by `j`: the bath of the three-spin triangle cluster.
    pub fn triangle_bath(j: f64, bath_field: f64) -> Result<Self> {
        Self::new(2, ModelKind::IsingZz, [(0, 1, j)], bath_field)
    }

    /// Nearest-neighbour ring (open chain for `n_sites == 2`).
    pub fn ring(n_sites: usize, kind: ModelKind, j: f64, bath_field: f64) -> Result<Self> {
        let bonds: Vec<_> = match n_sites {
            0 | 1 => Vec::new(),
            2 => vec![(0, 1, j)],
            n => (0..n).map(|s| (s, (s + 1) % n, j)).collect(),
        };
        Self::new(n_sites, kind, bonds, bath_field)
    }

    pub fn chain(n_sites: usize, kind: ModelKind, j: f64, bath_field: f64) -> Result<Self> {
        let bonds: Vec<_> = (1..n_sites).map(|s| (s - 1, s, j)).collect();
        Self::new(n_sites, kind, bonds, bath_field)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn bath_field(&self) -> f64 {
        self.bath_field
    }

    pub fn with_bath_field(&self, bath_field: f64) -> Self {
        Self {
            bath_field,
            ..self.clone()
        }
    }

    pub fn is_ferromagnetic(&self) -> bool {
        self.couplings.iter().all(|c| c.strength >= 0.0)
    }

    /// Diagonal matrix element ⟨b|H'|b⟩ = −Σ J s_i s_j.
    pub(crate) fn diagonal_energy(&self, basis: usize) -> f64 {
        self.couplings
            .iter()
            .map(|c| {
                let aligned = ((basis >> c.i) & 1) == ((basis >> c.j) & 1);
                if aligned {
                    -c.strength
                } else {
                    c.strength
                }
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeParams {
    pub lambda: f64,
    pub h0: f64,
}

impl ProbeParams {
    pub fn new(lambda: f64, h0: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::NonFinite("lambda"));
        }
        if !h0.is_finite() {
            return Err(Error::NonFinite("h0"));
        }
        Ok(Self { lambda, h0 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalParams {
    pub beta: f64,
    pub hbar: f64,
}

impl ThermalParams {
    pub fn new(beta: f64) -> Result<Self> {
        Self::with_hbar(beta, 1.0)
    }

    pub fn with_hbar(beta: f64, hbar: f64) -> Result<Self> {
        for (name, value) in [("beta", beta), ("hbar", hbar)] {
            if !value.is_finite() {
                return Err(Error::NonFinite(name));
            }
            if value <= 0.0 {
                return Err(Error::NonPositive { name, value });
            }
        }
        Ok(Self { beta, hbar })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Single-site matrix in the operator basis order (index 0 = down, 1 = up).
    pub fn matrix(self) -> Matrix2<Complex64> {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => Matrix2::new(l, o, o, l),
            Pauli::X => Matrix2::new(o, l, l, o),
            // σʸ|↑⟩ = i|↓⟩, σʸ|↓⟩ = −i|↑⟩
            Pauli::Y => Matrix2::new(o, i, -i, o),
            Pauli::Z => Matrix2::new(-l, o, o, l),
        }
    }

    /// Image of the single-site basis state `bit` as (amplitude, new bit).
    fn act(self, bit: usize) -> (Complex64, usize) {
        let m = self.matrix();
        let row = if m[(0, bit)].norm() > 0.0 { 0 } else { 1 };
        (m[(row, bit)], row)
    }
}

/// Dense Hermitian operator on `n_sites` spins.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianOperator {
    n_sites: usize,
    matrix: DMatrix<Complex64>,
}

impl HamiltonianOperator {
    fn zeros(n_sites: usize) -> Result<Self> {
        if n_sites > FULL_SPACE_MAX_SITES {
            return Err(Error::DimensionCap {
                sites: n_sites,
                cap: FULL_SPACE_MAX_SITES,
                what: "full-space operators",
            });
        }
        let dim = 1usize << n_sites;
        Ok(Self {
            n_sites,
            matrix: DMatrix::zeros(dim, dim),
        })
    }

    pub fn from_matrix(n_sites: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << n_sites;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch(matrix.nrows(), dim));
        }
        Ok(Self { n_sites, matrix })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    /// Adds `coefficient · ⊗ factors` (identity on unlisted sites).
    fn add_pauli_term(&mut self, coefficient: f64, factors: &[(usize, Pauli)]) {
        for col in 0..self.dimension() {
            let mut amp = Complex64::new(coefficient, 0.0);
            let mut row = col;
            for &(site, p) in factors {
                let (a, bit) = p.act((row >> site) & 1);
                amp *= a;
                row = (row & !(1 << site)) | (bit << site);
            }
            self.matrix[(row, col)] += amp;
        }
    }

    /// Largest entry of |M − M†|.
    pub fn hermiticity_error(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_diagonal(&self) -> bool {
        let m = &self.matrix;
        (0..m.nrows()).all(|r| (0..m.ncols()).all(|c| r == c || m[(r, c)].norm() == 0.0))
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Single-site Pauli operator embedded on `n_sites` spins.
pub fn site_operator(n_sites: usize, site: usize, pauli: Pauli) -> Result<HamiltonianOperator> {
    if site >= n_sites {
        return Err(Error::CouplingOutOfRange(site, site, n_sites));
    }
    let mut op = HamiltonianOperator::zeros(n_sites)?;
    op.add_pauli_term(1.0, &[(site, pauli)]);
    Ok(op)
}

fn add_bath_terms(op: &mut HamiltonianOperator, model: &SpinModel) {
    for c in model.couplings() {
        let (i, j, coeff) = (c.i, c.j, -c.strength);
        op.add_pauli_term(coeff, &[(i, Pauli::Z), (j, Pauli::Z)]);
        if model.kind() == ModelKind::Heisenberg {
            op.add_pauli_term(coeff, &[(i, Pauli::X), (j, Pauli::X)]);
            op.add_pauli_term(coeff, &[(i, Pauli::Y), (j, Pauli::Y)]);
        }
    }
}

/// H' only; the −hΣσᶻ term is never materialized.
pub fn build_bath_interaction(model: &SpinModel) -> Result<HamiltonianOperator> {
    let mut op = HamiltonianOperator::zeros(model.n_sites())?;
    add_bath_terms(&mut op, model);
    Ok(op)
}

pub fn total_sz_operator(n_sites: usize) -> Result<HamiltonianOperator> {
    if n_sites == 0 {
        return Err(Error::NoSites);
    }
    let mut op = HamiltonianOperator::zeros(n_sites)?;
    for site in 0..n_sites {
        op.add_pauli_term(1.0, &[(site, Pauli::Z)]);
    }
    Ok(op)
}

/// Largest entry magnitude of AB − BA.
pub fn commutator_norm(a: &HamiltonianOperator, b: &HamiltonianOperator) -> Result<f64> {
    if a.dimension() != b.dimension() {
        return Err(Error::DimensionMismatch(a.dimension(), b.dimension()));
    }
    let comm = a.matrix() * b.matrix() - b.matrix() * a.matrix();
    Ok(comm.iter().fold(0.0f64, |m, z| m.max(z.norm())))
}

/// H_T = H' − hΣσᶻ − h₀σᶻ₀ − λσᶻ₀Σσᶻ on N+1 spins, probe at site N.
pub fn build_total_hamiltonian(
    model: &SpinModel,
    probe: &ProbeParams,
) -> Result<HamiltonianOperator> {
    let n = model.n_sites();
    let probe_site = n;
    let mut op = HamiltonianOperator::zeros(n + 1)?;
    add_bath_terms(&mut op, model);
    for j in 0..n {
        op.add_pauli_term(-model.bath_field(), &[(j, Pauli::Z)]);
        op.add_pauli_term(-probe.lambda, &[(probe_site, Pauli::Z), (j, Pauli::Z)]);
    }
    op.add_pauli_term(-probe.h0, &[(probe_site, Pauli::Z)]);
    Ok(op)
}
