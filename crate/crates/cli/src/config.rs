//! Run configuration: a TOML document with units spelled out in key names.
//!
//! ```toml
//! quantity = "ldos"
//!
//! [[layers]]                 # semi-infinite: no thickness
//! eps_re = 1.0
//!
//! [[layers]]
//! thickness_um = 1.0
//! eps_re = 10.0
//!
//! [[layers]]
//! eps_re = 1.0
//!
//! [frequency]
//! energy_eV = 0.119
//!
//! [positions]
//! min_um = -1.0
//! max_um = 2.0
//! count = 31
//! ```

use anyhow::{anyhow, bail, Context, Result};
use qfed::{Layer, PhysicalConstants, Stack};
use serde::{Deserialize, Serialize};

const UM: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Ldos,
    Nldos,
    Ifdos,
    PhotonNumber,
    Fluctuations,
    Poynting,
    NetEmission,
    SteadyTemperature,
    Verify,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Ldos => "ldos",
            Quantity::Nldos => "nldos",
            Quantity::Ifdos => "ifdos",
            Quantity::PhotonNumber => "photon-number",
            Quantity::Fluctuations => "fluctuations",
            Quantity::Poynting => "poynting",
            Quantity::NetEmission => "net-emission",
            Quantity::SteadyTemperature => "steady-temperature",
            Quantity::Verify => "verify",
        }
    }

    fn needs_sources(self) -> bool {
        matches!(self, Quantity::Nldos | Quantity::Ifdos)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LdosUnits {
    /// Multiples of `2 / (pi c S)`.
    #[default]
    Plot,
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LdosRouteChoice {
    #[default]
    ImaginaryPart,
    Integral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thickness_um: Option<f64>,
    pub eps_re: f64,
    #[serde(default)]
    pub eps_im: f64,
    #[serde(default = "one")]
    pub mu_re: f64,
    #[serde(default)]
    pub mu_im: f64,
    #[serde(default, rename = "temperature_K")]
    pub temperature_k: f64,
}

fn one() -> f64 {
    1.0
}

impl LayerSpec {
    fn to_layer(&self) -> Layer {
        Layer {
            thickness: self.thickness_um.map(|d| d * UM),
            epsilon: qfed::Complex64::new(self.eps_re, self.eps_im),
            mu: qfed::Complex64::new(self.mu_re, self.mu_im),
            temperature: self.temperature_k,
        }
    }
}

/// Either one photon energy or a linear sweep.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySpec {
    #[serde(default, rename = "energy_eV", skip_serializing_if = "Option::is_none")]
    pub energy_ev: Option<f64>,
    #[serde(default, rename = "min_eV", skip_serializing_if = "Option::is_none")]
    pub min_ev: Option<f64>,
    #[serde(default, rename = "max_eV", skip_serializing_if = "Option::is_none")]
    pub max_ev: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

impl FrequencySpec {
    pub fn energies_ev(&self) -> Result<Vec<f64>> {
        let v = match (self.energy_ev, self.min_ev, self.max_ev, self.count) {
            (Some(e), None, None, None) => vec![e],
            (None, Some(a), Some(b), Some(n)) => linspace(a, b, n),
            _ => bail!("frequency: give either energy_eV, or min_eV, max_eV and count"),
        };
        if let Some(bad) = v.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            bail!("frequency: photon energy {bad} eV must be positive");
        }
        Ok(v)
    }
}

/// Either an explicit list or a linear grid, in micrometres.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub list_um: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

impl GridSpec {
    pub fn points_m(&self, what: &str) -> Result<Vec<f64>> {
        let um = match (&self.list_um, self.min_um, self.max_um, self.count) {
            (Some(list), None, None, None) => list.clone(),
            (None, Some(a), Some(b), Some(n)) => linspace(a, b, n),
            _ => bail!("{what}: give either list_um, or min_um, max_um and count"),
        };
        if um.iter().any(|x| !x.is_finite()) {
            bail!("{what}: positions must be finite");
        }
        Ok(um.into_iter().map(|x| x * UM).collect())
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteadySpec {
    /// Zero-based index of the absorbing layer.
    pub probe_layer: usize,
    #[serde(rename = "band_min_eV")]
    pub band_min_ev: f64,
    #[serde(rename = "band_max_eV")]
    pub band_max_ev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericOptions {
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
    #[serde(default)]
    pub ldos_units: LdosUnits,
    #[serde(default)]
    pub ldos_route: LdosRouteChoice,
}

fn default_delta() -> f64 {
    1e-9
}

fn default_quad_tol() -> f64 {
    1e-8
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self {
            delta: default_delta(),
            quad_tol: default_quad_tol(),
            ldos_units: LdosUnits::default(),
            ldos_route: LdosRouteChoice::default(),
        }
    }
}

impl NumericOptions {
    pub fn integration(&self) -> qfed::IntegrationOptions {
        qfed::IntegrationOptions {
            delta: self.delta,
            quad: qfed::QuadratureSpec::with_rel_tol(self.quad_tol),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub quantity: Quantity,
    /// Position of the first interface.
    #[serde(default)]
    pub first_interface_um: f64,
    pub layers: Vec<LayerSpec>,
    #[serde(default)]
    pub frequency: FrequencySpec,
    #[serde(default)]
    pub positions: GridSpec,
    /// Source positions for the two-point kernels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sources: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady: Option<SteadySpec>,
    #[serde(default)]
    pub options: NumericOptions,
}

impl RunConfig {
    pub fn stack(&self) -> Result<Stack> {
        let layers = self.layers.iter().map(LayerSpec::to_layer).collect();
        Stack::new(layers, self.first_interface_um * UM).map_err(|e| match e {
            qfed::Error::InvalidLayer { index, reason } => anyhow!("layers[{index}]: {reason}"),
            qfed::Error::DegenerateMedium { index } => anyhow!("layers[{index}]: epsilon or mu is zero"),
            other => anyhow!(other),
        })
    }

    pub fn energies_ev(&self) -> Result<Vec<f64>> {
        if self.quantity == Quantity::SteadyTemperature && self.frequency == FrequencySpec::default() {
            return Ok(Vec::new());
        }
        self.frequency.energies_ev()
    }

    pub fn positions_m(&self) -> Result<Vec<f64>> {
        if self.positions == GridSpec::default() && matches!(self.quantity, Quantity::SteadyTemperature | Quantity::Verify) {
            return Ok(Vec::new());
        }
        self.positions.points_m("positions")
    }

    pub fn sources_m(&self) -> Result<Vec<f64>> {
        match &self.sources {
            Some(s) => s.points_m("sources"),
            None => bail!("quantity {} needs a [sources] grid", self.quantity.name()),
        }
    }

    /// Full validation, run before any computation.
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            bail!("layers: at least one layer is required");
        }
        for (i, l) in self.layers.iter().enumerate() {
            if let Some(d) = l.thickness_um {
                if !(d > 0.0 && d.is_finite()) {
                    bail!("layers[{i}]: thickness_um = {d} must be positive");
                }
            }
        }
        self.stack()?;
        if !(self.options.delta >= 0.0 && self.options.delta.is_finite()) {
            bail!("options.delta must be a finite non-negative number");
        }
        qfed::QuadratureSpec::with_rel_tol(self.options.quad_tol)
            .validate()
            .context("options.quad_tol")?;
        PhysicalConstants::default().validate()?;
        self.energies_ev()?;
        self.positions_m()?;
        if self.quantity.needs_sources() {
            self.sources_m()?;
        }
        if self.quantity == Quantity::SteadyTemperature {
            let s = self
                .steady
                .as_ref()
                .ok_or_else(|| anyhow!("quantity steady-temperature needs a [steady] section"))?;
            if s.probe_layer >= self.layers.len() {
                bail!("steady.probe_layer = {} is out of range", s.probe_layer);
            }
            if !(s.band_min_ev > 0.0 && s.band_max_ev > s.band_min_ev) {
                bail!("steady: need 0 < band_min_eV < band_max_eV");
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| anyhow!("config: {e}"))?;
    cfg.validate()?;
    Ok(cfg)
}

/// The mirror cavity with a centred emitter at 300 K, as a config document.
pub fn cavity_config(emitter: qfed::fixtures::Emitter, quantity: Quantity) -> RunConfig {
    let stack = qfed::fixtures::cavity(emitter, 300.0);
    let layers = stack
        .layers()
        .iter()
        .map(|l| LayerSpec {
            thickness_um: l.thickness.map(|d| (d / UM * 1e9).round() / 1e9),
            eps_re: l.epsilon.re,
            eps_im: l.epsilon.im,
            mu_re: l.mu.re,
            mu_im: l.mu.im,
            temperature_k: l.temperature,
        })
        .collect();
    let (a, b) = qfed::fixtures::cavity_gap();
    RunConfig {
        quantity,
        first_interface_um: 0.0,
        layers,
        frequency: FrequencySpec {
            energy_ev: Some(qfed::fixtures::CAVITY_PHOTON_ENERGY_EV),
            ..Default::default()
        },
        positions: GridSpec {
            list_um: None,
            min_um: Some(a / UM),
            max_um: Some(b / UM),
            count: Some(101),
        },
        sources: None,
        steady: None,
        options: NumericOptions::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qfed::fixtures::Emitter;

    #[test]
    fn minimal_vacuum() {
        let cfg = parse_config(
            r#"
quantity = "ldos"
[[layers]]
eps_re = 1.0
[frequency]
energy_eV = 0.1
[positions]
list_um = [0.0]
"#,
        )
        .unwrap();
        let s = cfg.stack().unwrap();
        assert_eq!(s.num_interfaces(), 0);
        assert_eq!(cfg.options, NumericOptions::default());
        assert_eq!(cfg.layers[0].mu_re, 1.0);
    }

    #[test]
    fn cavity_round_trip() {
        let cfg = cavity_config(Emitter::Magnetic, Quantity::PhotonNumber);
        cfg.validate().unwrap();
        let text = cfg.to_toml().unwrap();
        let back = parse_config(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_toml().unwrap(), text);
        // thicknesses are rounded to the femtometre for readability
        let (s, f) = (back.stack().unwrap(), qfed::fixtures::cavity(Emitter::Magnetic, 300.0));
        for (a, b) in s.layers().iter().zip(f.layers()) {
            assert_eq!((a.epsilon, a.mu, a.temperature), (b.epsilon, b.mu, b.temperature));
        }
        for (a, b) in s.interfaces().iter().zip(f.interfaces()) {
            assert!((a - b).abs() < 1e-18);
        }
    }

    #[test]
    fn negative_thickness_names_the_layer() {
        let err = parse_config(
            r#"
quantity = "ldos"
[[layers]]
eps_re = 1.0
[[layers]]
thickness_um = -1.0
eps_re = 2.0
[[layers]]
eps_re = 1.0
[frequency]
energy_eV = 0.1
[positions]
list_um = [0.0]
"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("layers[1]"), "{err}");
    }

    #[test]
    fn unknown_keys_rejected_with_location() {
        let err = parse_config(
            r#"
quantity = "ldos"
[[layers]]
eps_re = 1.0
epsilon = 3
"#,
        )
        .unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("epsilon") && msg.contains("line"), "{msg}");
    }

    #[test]
    fn frequency_and_grid_forms() {
        let f = FrequencySpec {
            min_ev: Some(0.1),
            max_ev: Some(0.2),
            count: Some(3),
            ..Default::default()
        };
        assert_eq!(f.energies_ev().unwrap(), vec![0.1, 0.15000000000000002, 0.2]);
        let both = FrequencySpec {
            energy_ev: Some(0.1),
            count: Some(3),
            ..Default::default()
        };
        assert!(both.energies_ev().is_err());
        let g = GridSpec {
            list_um: Some(vec![]),
            ..Default::default()
        };
        assert!(g.points_m("positions").unwrap().is_empty());
    }

    #[test]
    fn missing_sources_rejected() {
        let mut cfg = cavity_config(Emitter::Empty, Quantity::Nldos);
        assert!(cfg.validate().is_err());
        cfg.sources = Some(GridSpec {
            list_um: Some(vec![6.0]),
            ..Default::default()
        });
        cfg.validate().unwrap();
    }
}
