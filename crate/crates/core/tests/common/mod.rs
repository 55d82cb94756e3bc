#![allow(dead_code)]

use leeyang::{ModelKind, ProbeParams, SpinModel, ThermalParams};
use rand::Rng;

pub struct Instance {
    pub model: SpinModel,
    pub probe: ProbeParams,
    pub thermal: ThermalParams,
}

/// Random bath on up to `max_sites` spins; each pair coupled with probability 0.7.
pub fn random_model<R: Rng>(
    rng: &mut R,
    kind: ModelKind,
    max_sites: usize,
    coupling: (f64, f64),
    field: f64,
) -> SpinModel {
    let n = rng.random_range(1..=max_sites);
    let mut bonds = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(0.7) {
                bonds.push((i, j, rng.random_range(coupling.0..=coupling.1)));
            }
        }
    }
    SpinModel::new(n, kind, bonds, field).unwrap()
}

/// β ∈ [0.1, 3]; J, λ, h, h₀ ∈ [−2, 2]; ℏ = 1.
pub fn random_instance<R: Rng>(rng: &mut R, kind: ModelKind, max_sites: usize) -> Instance {
    let h = rng.random_range(-2.0..=2.0);
    let model = random_model(rng, kind, max_sites, (-2.0, 2.0), h);
    let probe = ProbeParams::new(rng.random_range(-2.0..=2.0), rng.random_range(-2.0..=2.0)).unwrap();
    let thermal = ThermalParams::new(rng.random_range(0.1..=3.0)).unwrap();
    Instance { model, probe, thermal }
}

pub fn rel_err(a: num_complex::Complex64, b: num_complex::Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-30)
}
