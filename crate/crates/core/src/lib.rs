//! Quantized fluctuational electrodynamics for planar layered media at
//! normal incidence.
//!
//! Coupled electric and magnetic Green's functions, local, nonlocal and
//! interference densities of states, effective photon numbers, the spectral
//! Poynting flux and net emission, plus runnable checks of the exact
//! identities these quantities satisfy.

pub mod coefficients;
pub mod dos;
pub mod error;
pub mod fixtures;
pub mod greens;
pub mod model;
pub mod observables;
pub mod quadrature;
pub mod verify;

pub use coefficients::{
    build_ladder, cumulative_transmission, fresnel, CoefficientLadder, Family, FamilyLadder,
    SingleInterfaceCoeffs,
};
pub use num_complex::Complex64;

pub use dos::{
    ifdos, ldos, ldos_integral, ldos_unit, nldos, FieldType, IfdosSample, IntegrationOptions, LdosRoute, LdosSample,
    LayerIntegrals, NldosSample, SourceProfile, SpectralSolver,
};
pub use error::{Error, Result};
pub use greens::{greens_tensor, xi, Approach, GreensSample, LayeredGreens, Point, ScaledGreens};
pub use model::{
    bose_einstein, refractive_index, FrequencySample, Layer, NoiseNormalization, PhysicalConstants, Stack,
    ELECTRON_VOLT,
};
pub use observables::{
    fluctuations, net_emission, photon_number, poynting, steady_state_temperature, FluctuationSample, FluxSample,
    LadderKernel, PhotonNumbers, SpectralBand,
};
pub use quadrature::{Estimate, QuadratureSpec};
pub use verify::{
    canonical_battery, check_equilibrium, check_exchange_consistency, check_green_identity, check_ifdos_zero,
    check_poynting_continuity, check_reciprocity, run_battery, BatterySpec, CheckReport,
};
