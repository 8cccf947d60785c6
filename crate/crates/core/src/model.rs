//! Layered-structure data model.
//!
//! Layers are indexed from 0 (the left semi-infinite lead) to `N` (the right
//! lead); interface `i` separates layer `i` from layer `i + 1` and sits at
//! `interfaces()[i]`. A stack with no interfaces is a homogeneous space.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Electron-volt in joules (exact, SI 2019).
pub const ELECTRON_VOLT: f64 = 1.602_176_634e-19;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Speed of light in vacuum (m/s).
    pub c: f64,
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Vacuum permittivity (F/m).
    pub eps0: f64,
    /// Vacuum permeability (H/m).
    pub mu0: f64,
    /// Boltzmann constant (J/K).
    pub kb: f64,
    /// Transverse quantization area (m^2).
    pub area: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

impl PhysicalConstants {
    pub const CODATA_2018: Self = Self {
        c: 299_792_458.0,
        hbar: 1.054_571_817e-34,
        eps0: 8.854_187_812_8e-12,
        mu0: 1.256_637_062_12e-6,
        kb: 1.380_649e-23,
        area: 1.0,
    };

    pub fn validate(&self) -> Result<()> {
        let all = [self.c, self.hbar, self.eps0, self.mu0, self.kb, self.area];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidConstants(
                "every constant must be finite and strictly positive".into(),
            ));
        }
        let closure = self.c * self.c * self.eps0 * self.mu0;
        if (closure - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConstants(format!(
                "c^2 eps0 mu0 = {closure} differs from 1"
            )));
        }
        Ok(())
    }

    pub fn omega_from_ev(&self, energy_ev: f64) -> f64 {
        energy_ev * ELECTRON_VOLT / self.hbar
    }

    pub fn ev_from_omega(&self, omega: f64) -> f64 {
        omega * self.hbar / ELECTRON_VOLT
    }
}

/// A homogeneous material slab or semi-infinite lead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// Thickness in metres; `None` marks a semi-infinite lead.
    pub thickness: Option<f64>,
    /// Relative permittivity.
    pub epsilon: Complex64,
    /// Relative permeability.
    pub mu: Complex64,
    /// Temperature in kelvin.
    pub temperature: f64,
}

impl Layer {
    pub fn lead(epsilon: Complex64, mu: Complex64, temperature: f64) -> Self {
        Self {
            thickness: None,
            epsilon,
            mu,
            temperature,
        }
    }

    pub fn slab(thickness: f64, epsilon: Complex64, mu: Complex64, temperature: f64) -> Self {
        Self {
            thickness: Some(thickness),
            epsilon,
            mu,
            temperature,
        }
    }

    pub fn vacuum_lead(temperature: f64) -> Self {
        Self::lead(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), temperature)
    }

    pub fn is_lossless(&self) -> bool {
        self.epsilon.im == 0.0 && self.mu.im == 0.0
    }

    /// Squared noise-current amplitudes of this layer at `omega`.
    pub fn noise(&self, omega: f64, consts: &PhysicalConstants) -> NoiseNormalization {
        NoiseNormalization::new(self, omega, consts)
    }

    fn validate(&self, index: usize) -> Result<()> {
        let bad = |reason: String| Error::InvalidLayer { index, reason };
        if !(self.epsilon.re.is_finite() && self.epsilon.im.is_finite()) {
            return Err(bad("epsilon is not finite".into()));
        }
        if !(self.mu.re.is_finite() && self.mu.im.is_finite()) {
            return Err(bad("mu is not finite".into()));
        }
        if self.epsilon.im < 0.0 {
            return Err(bad(format!(
                "Im(epsilon) = {} is negative (active medium)",
                self.epsilon.im
            )));
        }
        if self.mu.im < 0.0 {
            return Err(bad(format!(
                "Im(mu) = {} is negative (active medium)",
                self.mu.im
            )));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(bad(format!("temperature {} K is invalid", self.temperature)));
        }
        if self.epsilon == Complex64::new(0.0, 0.0) || self.mu == Complex64::new(0.0, 0.0) {
            return Err(Error::DegenerateMedium { index });
        }
        Ok(())
    }
}

/// Ordered layers with interface positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stack {
    layers: Vec<Layer>,
    interfaces: Vec<f64>,
}

impl Stack {
    /// Builds a stack whose first interface sits at `first_interface`;
    /// the remaining interface positions follow from the slab thicknesses.
    pub fn new(layers: Vec<Layer>, first_interface: f64) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidStack("a stack needs at least one layer".into()));
        }
        if !first_interface.is_finite() {
            return Err(Error::InvalidStack("first interface position is not finite".into()));
        }
        let last = layers.len() - 1;
        let mut interfaces = Vec::with_capacity(last);
        let mut position = first_interface;
        for (index, layer) in layers.iter().enumerate() {
            layer.validate(index)?;
            let is_lead = index == 0 || index == last;
            match (is_lead, layer.thickness) {
                (true, Some(_)) => {
                    return Err(Error::InvalidLayer {
                        index,
                        reason: "outer layers must be semi-infinite".into(),
                    })
                }
                (false, None) => {
                    return Err(Error::InvalidLayer {
                        index,
                        reason: "interior layers need a finite thickness".into(),
                    })
                }
                (false, Some(d)) if !(d.is_finite() && d > 0.0) => {
                    return Err(Error::InvalidLayer {
                        index,
                        reason: format!("thickness {d} m must be finite and positive"),
                    })
                }
                _ => {}
            }
            if index < last {
                if index > 0 {
                    position += layer.thickness.unwrap_or_default();
                }
                interfaces.push(position);
            }
        }
        Ok(Self { layers, interfaces })
    }

    /// Builds a stack from explicit interface positions. Interior thicknesses
    /// are derived from the positions.
    pub fn from_interfaces(media: Vec<Layer>, interfaces: Vec<f64>) -> Result<Self> {
        if media.len() != interfaces.len() + 1 {
            return Err(Error::InvalidStack(format!(
                "{} layers need {} interfaces, got {}",
                media.len(),
                media.len().saturating_sub(1),
                interfaces.len()
            )));
        }
        if interfaces.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidStack("interface positions must be finite".into()));
        }
        if interfaces.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidStack(
                "interface positions must be strictly increasing".into(),
            ));
        }
        let last = media.len() - 1;
        let layers = media
            .into_iter()
            .enumerate()
            .map(|(i, mut layer)| {
                layer.thickness = if i == 0 || i == last {
                    None
                } else {
                    Some(interfaces[i] - interfaces[i - 1])
                };
                layer
            })
            .collect();
        Self::new(layers, interfaces.first().copied().unwrap_or(0.0))
    }

    pub fn homogeneous(epsilon: Complex64, mu: Complex64, temperature: f64) -> Result<Self> {
        Self::new(vec![Layer::lead(epsilon, mu, temperature)], 0.0)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer(&self, index: usize) -> Result<&Layer> {
        self.layers.get(index).ok_or(Error::LayerIndex {
            index,
            layers: self.layers.len(),
        })
    }

    pub fn interfaces(&self) -> &[f64] {
        &self.interfaces
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn num_interfaces(&self) -> usize {
        self.interfaces.len()
    }

    pub fn is_lead(&self, index: usize) -> bool {
        index == 0 || index + 1 == self.layers.len()
    }

    /// Left and right boundary of layer `index`, with infinities for leads.
    pub fn bounds(&self, index: usize) -> (f64, f64) {
        let left = if index == 0 {
            f64::NEG_INFINITY
        } else {
            self.interfaces[index - 1]
        };
        let right = if index == self.interfaces.len() {
            f64::INFINITY
        } else {
            self.interfaces[index]
        };
        (left, right)
    }

    /// Index of the layer containing `x`. A point exactly on an interface
    /// belongs to the layer on its left.
    pub fn locate(&self, x: f64) -> usize {
        self.interfaces.partition_point(|&xi| xi < x)
    }

    /// Copy with every nominally lossless lead given `i * delta` extra loss
    /// in both epsilon and mu.
    pub fn with_lead_loss_floor(&self, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lead loss floor must be finite and nonnegative, got {delta}"
            )));
        }
        let mut out = self.clone();
        let last = out.layers.len() - 1;
        for index in [0, last] {
            let layer = &mut out.layers[index];
            if layer.is_lossless() {
                layer.epsilon.im += delta;
                layer.mu.im += delta;
            }
        }
        Ok(out)
    }

    /// Electromagnetic dual: epsilon and mu swapped in every layer.
    pub fn dual(&self) -> Self {
        let mut out = self.clone();
        for layer in &mut out.layers {
            std::mem::swap(&mut layer.epsilon, &mut layer.mu);
        }
        out
    }

    pub fn with_uniform_temperature(&self, temperature: f64) -> Self {
        let mut out = self.clone();
        for layer in &mut out.layers {
            layer.temperature = temperature;
        }
        out
    }

    pub fn with_temperature(&self, index: usize, temperature: f64) -> Result<Self> {
        self.layer(index)?;
        let mut out = self.clone();
        out.layers[index].temperature = temperature;
        out.layers[index].validate(index)?;
        Ok(out)
    }

    /// Mirror image about the centre of the interface span.
    pub fn mirrored(&self) -> Self {
        let layers: Vec<Layer> = self.layers.iter().rev().copied().collect();
        let (lo, hi) = match (self.interfaces.first(), self.interfaces.last()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => (0.0, 0.0),
        };
        let interfaces = self.interfaces.iter().rev().map(|x| lo + hi - x).collect();
        Self { layers, interfaces }
    }
}

/// Complex refractive index `sqrt(epsilon * mu)` on the branch with
/// `Im(n) >= 0`, and `Re(n) > 0` when the imaginary part vanishes.
pub fn refractive_index(epsilon: Complex64, mu: Complex64) -> Result<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    if epsilon == zero || mu == zero {
        return Err(Error::DegenerateMedium { index: 0 });
    }
    let n = (epsilon * mu).sqrt();
    let flip = n.im < 0.0 || (n.im == 0.0 && n.re < 0.0);
    Ok(if flip { -n } else { n })
}

/// Bose-Einstein occupation `1 / (exp(hbar omega / kB T) - 1)`; zero at `T = 0`.
pub fn bose_einstein(omega: f64, temperature: f64, consts: &PhysicalConstants) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = consts.hbar * omega / (consts.kb * temperature);
    1.0 / x.exp_m1()
}

/// Per-frequency optical data of every layer.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySample {
    pub omega: f64,
    /// Vacuum wavenumber `omega / c`.
    pub k0: f64,
    pub n: Vec<Complex64>,
    pub k: Vec<Complex64>,
    /// Energy propagation velocity `c / Re(n)`.
    pub v: Vec<f64>,
}

impl FrequencySample {
    pub fn new(stack: &Stack, omega: f64, consts: &PhysicalConstants) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "angular frequency must be positive, got {omega}"
            )));
        }
        let k0 = omega / consts.c;
        let n = stack
            .layers()
            .iter()
            .enumerate()
            .map(|(index, l)| {
                refractive_index(l.epsilon, l.mu).map_err(|_| Error::DegenerateMedium { index })
            })
            .collect::<Result<Vec<_>>>()?;
        let k = n.iter().map(|&n| n * k0).collect();
        let v = n.iter().map(|n| consts.c / n.re).collect();
        Ok(Self { omega, k0, n, k, v })
    }

    pub fn from_photon_energy(
        stack: &Stack,
        energy_ev: f64,
        consts: &PhysicalConstants,
    ) -> Result<Self> {
        Self::new(stack, consts.omega_from_ev(energy_ev), consts)
    }
}

/// Squared magnitudes of the electric and magnetic noise-current amplitudes.
/// The phases are left undetermined and never enter an observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseNormalization {
    /// `|j0e|^2 = 4 pi hbar omega^2 eps0 Im(epsilon) / S`.
    pub j0e_sq: f64,
    /// `|j0m|^2 = 4 pi hbar omega^2 mu0 Im(mu) / S`.
    pub j0m_sq: f64,
}

impl NoiseNormalization {
    pub fn new(layer: &Layer, omega: f64, consts: &PhysicalConstants) -> Self {
        let base = 4.0 * std::f64::consts::PI * consts.hbar * omega * omega / consts.area;
        Self {
            j0e_sq: base * consts.eps0 * layer.epsilon.im,
            j0m_sq: base * consts.mu0 * layer.mu.im,
        }
    }

    pub fn j0e(&self) -> f64 {
        self.j0e_sq.sqrt()
    }

    pub fn j0m(&self) -> f64 {
        self.j0m_sq.sqrt()
    }
}
