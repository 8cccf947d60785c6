//! Thermal observables: photon numbers, field fluctuations, spectral
//! Poynting flux, net emission, ladder-operator kernels and the steady-state
//! temperature of an absorbing layer.
//!
//! Every quantity is a sum over source layers of a per-layer integral times
//! that layer's Bose–Einstein occupation, so one [`SourceProfile`] per field
//! point serves all of them.

use std::collections::HashMap;

use crate::dos::{nldos, FieldType, IntegrationOptions, SourceProfile, SpectralSolver};
use crate::error::{Error, Result};
use crate::greens::{Approach, Point};
use crate::model::{bose_einstein, PhysicalConstants, Stack};
use crate::quadrature::{integrate, QuadratureSpec};

/// Densities below this (s/m³) are treated as vanished.
const LDOS_UNDERFLOW: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonNumbers {
    pub n_e: f64,
    pub n_m: f64,
    pub n_tot: f64,
}

impl PhotonNumbers {
    pub fn get(&self, j: FieldType) -> f64 {
        match j {
            FieldType::Electric => self.n_e,
            FieldType::Magnetic => self.n_m,
            FieldType::Total => self.n_tot,
        }
    }
}

/// Spectral field fluctuations and energy density, per unit angular frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationSample {
    /// V²/m² per rad/s.
    pub e_sq: f64,
    /// A²/m² per rad/s.
    pub h_sq: f64,
    /// J/m³ per rad/s.
    pub u: f64,
}

/// Spectral Poynting flux and net emission at one point, with the L1 scales
/// their cancellations are judged against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxSample {
    /// W/m² per rad/s.
    pub s: f64,
    /// W/m³ per rad/s.
    pub q: f64,
    pub s_scale: f64,
    pub q_scale: f64,
}

impl SpectralSolver {
    /// Bose–Einstein occupation of every layer.
    pub fn occupations(&self) -> Vec<f64> {
        let w = self.omega();
        self.stack()
            .layers()
            .iter()
            .map(|l| bose_einstein(w, l.temperature, self.consts()))
            .collect()
    }

    pub fn photon_numbers(&self, x: f64) -> Result<PhotonNumbers> {
        self.photon_numbers_from(&self.profile(x)?)
    }

    pub fn photon_numbers_from(&self, profile: &SourceProfile) -> Result<PhotonNumbers> {
        let eta = self.occupations();
        let n = |j| -> Result<f64> {
            let rho = profile.rho(j);
            if !(rho > LDOS_UNDERFLOW) || !rho.is_finite() {
                return Err(Error::DegenerateLdos {
                    x: profile.x,
                    omega: profile.omega,
                });
            }
            Ok(profile.weighted(j, &eta) / rho)
        };
        Ok(PhotonNumbers {
            n_e: n(FieldType::Electric)?,
            n_m: n(FieldType::Magnetic)?,
            n_tot: n(FieldType::Total)?,
        })
    }

    /// Relative gap between `n_tot` and the LDOS-weighted mean of `n_e` and
    /// `n_m`. The two agree by construction; this is a diagnostic only.
    pub fn photon_number_mean_gap(&self, profile: &SourceProfile) -> Result<f64> {
        let n = self.photon_numbers_from(profile)?;
        let we = profile.eps_abs * profile.rho(FieldType::Electric);
        let wm = profile.mu_abs * profile.rho(FieldType::Magnetic);
        let mean = (we * n.n_e + wm * n.n_m) / (we + wm);
        Ok(if n.n_tot == 0.0 { mean.abs() } else { (n.n_tot - mean).abs() / n.n_tot })
    }

    pub fn fluctuations(&self, x: f64) -> Result<FluctuationSample> {
        self.fluctuations_from(&self.profile(x)?)
    }

    pub fn fluctuations_from(&self, profile: &SourceProfile) -> Result<FluctuationSample> {
        let n = self.photon_numbers_from(profile)?;
        let c = self.consts();
        let hw = c.hbar * self.omega();
        Ok(FluctuationSample {
            e_sq: hw / c.eps0 * profile.rho(FieldType::Electric) * (n.n_e + 0.5),
            h_sq: hw / c.mu0 * profile.rho(FieldType::Magnetic) * (n.n_m + 0.5),
            u: hw * profile.rho(FieldType::Total) * (n.n_tot + 0.5),
        })
    }

    pub fn poynting(&self, x: f64) -> Result<f64> {
        Ok(self.flux(x)?.s)
    }

    pub fn net_emission(&self, x: f64) -> Result<f64> {
        Ok(self.flux(x)?.q)
    }

    pub fn flux(&self, x: f64) -> Result<FluxSample> {
        self.flux_from(&self.profile(x)?)
    }

    pub fn flux_at(&self, field: Point) -> Result<FluxSample> {
        self.flux_from(&self.profile_at(field)?)
    }

    pub fn flux_from(&self, profile: &SourceProfile) -> Result<FluxSample> {
        let eta = self.occupations();
        let c = self.consts();
        let w = self.omega();
        let (s, s_abs) = profile.flux_weighted(&eta);
        let hwc = c.hbar * w * c.c;

        let layer = &self.floored_greens().stack().layers()[profile.layer];
        let eta_x = eta[profile.layer];
        let pre = c.hbar * w * w;
        let mut q = 0.0;
        let mut q_scale = 0.0;
        for (j, loss) in [
            (FieldType::Electric, layer.epsilon.im),
            (FieldType::Magnetic, layer.mu.im),
        ] {
            let rho = profile.rho(j);
            let absorbed = profile.weighted(j, &eta);
            q += pre * loss * (eta_x * rho - absorbed);
            q_scale += pre * loss * (eta_x * rho + absorbed);
        }
        Ok(FluxSample {
            s: hwc * s,
            q,
            s_scale: hwc * s_abs,
            q_scale,
        })
    }

    pub fn ladder_kernel(&self, x: f64, j: FieldType) -> Result<LadderKernel<'_>> {
        let field = self.floored_greens().point(x);
        let profile = self.profile_at(field)?;
        let rho = profile.rho(j);
        if !(rho > LDOS_UNDERFLOW) || !rho.is_finite() {
            return Err(Error::DegenerateLdos { x, omega: self.omega() });
        }
        let layer_norms = profile
            .layer_weights(j)
            .into_iter()
            .map(|(e, m)| (e / rho, m / rho))
            .collect();
        Ok(LadderKernel {
            solver: self,
            field,
            j,
            rho,
            layer_norms,
        })
    }
}

/// Weight profiles `w_e(x')`, `w_m(x')` of the ladder operator for field
/// type `j` at a fixed field point.
#[derive(Debug, Clone)]
pub struct LadderKernel<'a> {
    solver: &'a SpectralSolver,
    field: Point,
    pub j: FieldType,
    /// The LDOS the weights are normalized by.
    pub rho: f64,
    layer_norms: Vec<(f64, f64)>,
}

impl LadderKernel<'_> {
    pub fn x(&self) -> f64 {
        self.field.x
    }

    /// `(w_e, w_m)` at source position `x'`.
    pub fn weights(&self, xprime: f64) -> (f64, f64) {
        let g = self.solver.floored_greens();
        let src = g.point(xprime);
        let sample = g.sample_at(self.field, src, Approach::Symmetric);
        let layers = g.stack().layers();
        let nl = nldos(
            &sample,
            &layers[src.layer],
            &layers[self.field.layer],
            self.solver.omega(),
            self.solver.consts(),
        );
        let (e, m) = nl.field(self.j);
        ((e / self.rho).sqrt(), (m / self.rho).sqrt())
    }

    /// `(∫ w_e², ∫ w_m²)` over each source layer.
    pub fn layer_norms(&self) -> &[(f64, f64)] {
        &self.layer_norms
    }

    pub fn norm(&self) -> f64 {
        self.layer_norms.iter().map(|(e, m)| e + m).sum()
    }
}

pub fn photon_number(
    stack: &Stack,
    omega: f64,
    x: f64,
    j: FieldType,
    consts: &PhysicalConstants,
    options: IntegrationOptions,
) -> Result<f64> {
    Ok(SpectralSolver::new(stack, omega, consts, options)?
        .photon_numbers(x)?
        .get(j))
}

pub fn fluctuations(
    stack: &Stack,
    omega: f64,
    x: f64,
    consts: &PhysicalConstants,
    options: IntegrationOptions,
) -> Result<FluctuationSample> {
    SpectralSolver::new(stack, omega, consts, options)?.fluctuations(x)
}

pub fn poynting(stack: &Stack, omega: f64, x: f64, consts: &PhysicalConstants, options: IntegrationOptions) -> Result<f64> {
    SpectralSolver::new(stack, omega, consts, options)?.poynting(x)
}

pub fn net_emission(
    stack: &Stack,
    omega: f64,
    x: f64,
    consts: &PhysicalConstants,
    options: IntegrationOptions,
) -> Result<f64> {
    SpectralSolver::new(stack, omega, consts, options)?.net_emission(x)
}

/// Angular-frequency band `[omega_min, omega_max]` in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBand {
    pub omega_min: f64,
    pub omega_max: f64,
}

impl SpectralBand {
    pub fn from_ev(min_ev: f64, max_ev: f64, consts: &PhysicalConstants) -> Self {
        Self {
            omega_min: consts.omega_from_ev(min_ev),
            omega_max: consts.omega_from_ev(max_ev),
        }
    }
}

/// Bracket searched by the steady-state solver, in kelvin.
pub const STEADY_STATE_BRACKET: (f64, f64) = (1.0, 1e4);

/// Temperature of `probe` at which its band-integrated net emission vanishes,
/// all other layers held at their configured temperatures.
pub fn steady_state_temperature(
    stack: &Stack,
    probe: usize,
    band: SpectralBand,
    consts: &PhysicalConstants,
    options: IntegrationOptions,
) -> Result<f64> {
    let layer = stack.layer(probe)?;
    if stack.is_lead(probe) {
        return Err(Error::InvalidArgument(format!(
            "probe layer {probe} is semi-infinite; steady state needs a finite layer"
        )));
    }
    if layer.epsilon.im == 0.0 && layer.mu.im == 0.0 {
        return Err(Error::LosslessProbe { layer: probe });
    }
    if !(band.omega_min > 0.0 && band.omega_max > band.omega_min && band.omega_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "spectral band must satisfy 0 < min < max, got [{}, {}]",
            band.omega_min, band.omega_max
        )));
    }
    let (a, b) = stack.bounds(probe);

    // Per frequency: coefficient of each layer's occupation in the power
    // leaving the probe, S(b-) - S(a+).
    let coupling = |omega: f64| -> Result<Vec<f64>> {
        let solver = SpectralSolver::new(stack, omega, consts, options)?;
        let left = solver.profile_at(Point { x: a, layer: probe })?;
        let right = solver.profile_at(Point { x: b, layer: probe })?;
        let hwc = consts.hbar * omega * consts.c;
        Ok(left
            .layers
            .iter()
            .zip(&right.layers)
            .map(|(l, r)| hwc * (r.flux() - l.flux()))
            .collect())
    };

    let mut cache: HashMap<u64, Vec<f64>> = HashMap::new();
    let mut failure: Option<Error> = None;
    let temps: Vec<f64> = stack.layers().iter().map(|l| l.temperature).collect();

    let mut residual = |t: f64| -> Result<f64> {
        let mut eval = |omega: f64| -> [f64; 2] {
            let key = omega.to_bits();
            if !cache.contains_key(&key) {
                match coupling(omega) {
                    Ok(d) => {
                        cache.insert(key, d);
                    }
                    Err(e) => {
                        failure.get_or_insert(e);
                        return [0.0; 2];
                    }
                }
            }
            let d = &cache[&key];
            let mut p = 0.0;
            let mut scale = 0.0;
            for (l, dl) in d.iter().enumerate() {
                let temp = if l == probe { t } else { temps[l] };
                let eta = bose_einstein(omega, temp, consts);
                p += dl * eta;
                scale += (dl * eta).abs();
            }
            [p, scale]
        };
        let scale = integrate(|w| [eval(w)[1]], band.omega_min, band.omega_max, &options.quad)?;
        let spec = QuadratureSpec {
            abs_tol: options.quad.rel_tol * scale.value[0],
            ..options.quad
        };
        let est = integrate(|w| [eval(w)[0]], band.omega_min, band.omega_max, &spec)?;
        if let Some(e) = failure.take() {
            return Err(e);
        }
        Ok(est.value[0])
    };

    let (mut lo, mut hi) = STEADY_STATE_BRACKET;
    let r_lo = residual(lo)?;
    let r_hi = residual(hi)?;
    if !(r_lo < 0.0 && r_hi > 0.0) {
        return Err(Error::NoSignChange { low: lo, high: hi });
    }
    while hi - lo > 1e-6 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if residual(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
