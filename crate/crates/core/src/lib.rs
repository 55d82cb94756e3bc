//! Lee-Yang zeros of a spin-1/2 bath with conserved Σσᶻ, and the real times
//! at which a σᶻ-coupled probe spin's two-time correlator vanishes.

pub mod cli;
pub mod correlator;
pub mod error;
pub mod model;
pub mod scaled;
pub mod sector;
pub mod zeros;

pub use correlator::{
    closed_form_correlator, locate_correlator_zeros, oracle_correlator, scan_correlator,
    ClosedFormCorrelator, Correlator, CorrelatorMinimum, CorrelatorQuery, CorrelatorTrace,
    Method, OracleCorrelator,
};
pub use error::{Error, Result};
pub use model::{
    build_bath_interaction, build_total_hamiltonian, commutator_norm, site_operator, total_sz_operator,
    HamiltonianOperator, ModelKind, Pauli, ProbeParams, SpinModel, ThermalParams,
};
pub use scaled::ScaledComplex;
pub use sector::{
    brute_force_partition, evaluate_partition, lee_yang_polynomial, sector_spectra,
    ComplexField, LeeYangPolynomial, SectorSpectrum,
};
pub use zeros::{
    find_polynomial_roots, roots_to_fields, unit_circle_check, zero_times, LeeYangZero, RootSet,
    ZeroTime,
};
