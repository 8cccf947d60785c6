//! Nonlocal, local and interference densities of states.
//!
//! Point kernels are evaluated with the exact material parameters. Anything
//! that integrates over source positions runs on a copy of the stack whose
//! lossless leads carry a small loss floor, so that the semi-infinite tails
//! converge; those tails are summed in closed form.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::Family;
use crate::error::{Error, Result};
use crate::greens::{Approach, GreensSample, LayeredGreens, Point};
use crate::model::{Layer, PhysicalConstants, Stack};
use crate::quadrature::{integrate_pieces, Estimate, QuadratureSpec};

/// Field type selecting one of the three densities of states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldType {
    Electric,
    Magnetic,
    Total,
}

impl FieldType {
    pub const ALL: [FieldType; 3] = [FieldType::Electric, FieldType::Magnetic, FieldType::Total];
}

impl From<Family> for FieldType {
    fn from(f: Family) -> Self {
        match f {
            Family::Electric => FieldType::Electric,
            Family::Magnetic => FieldType::Magnetic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LdosRoute {
    ImaginaryPart,
    Integral,
}

/// NLDOS contributions at `(x, omega, x')`, split by source type (s/m³ per m).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NldosSample {
    pub e_from_e: f64,
    pub e_from_m: f64,
    pub m_from_e: f64,
    pub m_from_m: f64,
    pub tot_from_e: f64,
    pub tot_from_m: f64,
}

impl NldosSample {
    pub fn field(&self, j: FieldType) -> (f64, f64) {
        match j {
            FieldType::Electric => (self.e_from_e, self.e_from_m),
            FieldType::Magnetic => (self.m_from_e, self.m_from_m),
            FieldType::Total => (self.tot_from_e, self.tot_from_m),
        }
    }

    pub fn total(&self, j: FieldType) -> f64 {
        let (a, b) = self.field(j);
        a + b
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdosSample {
    pub rho_e: f64,
    pub rho_m: f64,
    pub rho_tot: f64,
    pub route: LdosRoute,
}

impl LdosSample {
    pub fn get(&self, j: FieldType) -> f64 {
        match j {
            FieldType::Electric => self.rho_e,
            FieldType::Magnetic => self.rho_m,
            FieldType::Total => self.rho_tot,
        }
    }
}

/// Signed interference density of states at `(x, omega, x')`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IfdosSample {
    pub value: f64,
    pub e_part: f64,
    pub m_part: f64,
}

/// The density-of-states unit used in plots, `2 / (pi c S)`.
pub fn ldos_unit(consts: &PhysicalConstants) -> f64 {
    2.0 / (PI * consts.c * consts.area)
}

fn nldos_prefactor(omega: f64, consts: &PhysicalConstants) -> f64 {
    2.0 * omega.powi(3) / (PI * consts.c.powi(4) * consts.area)
}

fn ifdos_prefactor(omega: f64, consts: &PhysicalConstants) -> f64 {
    2.0 * omega * omega / (PI * consts.c.powi(4) * consts.area)
}

/// NLDOS components from a Green's-function sample; `source` supplies the
/// loss at `x'`, `field` the weights `|eps(x)|/2` and `|mu(x)|/2`.
pub fn nldos(g: &GreensSample, source: &Layer, field: &Layer, omega: f64, consts: &PhysicalConstants) -> NldosSample {
    let pre = nldos_prefactor(omega, consts);
    let (ei, mi) = (source.epsilon.im, source.mu.im);
    let e_from_e = pre * ei * g.g_ee.norm_sqr();
    let e_from_m = pre * mi * g.g_em.norm_sqr();
    let m_from_e = pre * ei * g.g_me.norm_sqr();
    let m_from_m = pre * mi * g.g_mm.norm_sqr();
    let (we, wm) = (0.5 * field.epsilon.norm(), 0.5 * field.mu.norm());
    NldosSample {
        e_from_e,
        e_from_m,
        m_from_e,
        m_from_m,
        tot_from_e: we * e_from_e + wm * m_from_e,
        tot_from_m: we * e_from_m + wm * m_from_m,
    }
}

/// IFDOS divided by the field-point `Re n`; kept separate so that absorbing
/// field points with vanishing `Re n` need no special casing.
fn ifdos_reduced(g: &GreensSample, source: &Layer, omega: f64, consts: &PhysicalConstants) -> (f64, f64) {
    let pre = ifdos_prefactor(omega, consts);
    let iw = Complex64::new(0.0, omega);
    let e = pre * source.epsilon.im * (iw * g.g_ee * g.g_me.conj()).re;
    let m = pre * source.mu.im * (iw * g.g_mm * g.g_em.conj()).re;
    (e, m)
}

pub fn ifdos(g: &GreensSample, source: &Layer, omega: f64, n_r: f64, consts: &PhysicalConstants) -> IfdosSample {
    let (e, m) = ifdos_reduced(g, source, omega, consts);
    let (e_part, m_part) = (n_r * e, n_r * m);
    IfdosSample {
        value: e_part + m_part,
        e_part,
        m_part,
    }
}

/// Options for every quantity that integrates over source positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationOptions {
    /// Loss added to `eps` and `mu` of leads that are lossless in both.
    pub delta: f64,
    pub quad: QuadratureSpec,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            delta: 1e-9,
            quad: QuadratureSpec::default(),
        }
    }
}

impl IntegrationOptions {
    pub fn with_delta(delta: f64) -> Self {
        Self {
            delta,
            ..Self::default()
        }
    }
}

/// Integrate `f(source point, approach)` over the whole axis, layer by layer.
///
/// `cuts` are field positions where the integrand kinks; each is a forced
/// breakpoint and the lead tails start beyond the outermost one. Layers for
/// which `skip` is true contribute zero.
pub(crate) fn integrate_axis<const M: usize, F>(
    greens: &LayeredGreens,
    cuts: &[f64],
    quad: &QuadratureSpec,
    skip: impl Fn(&Layer) -> bool,
    mut f: F,
) -> Result<Vec<Estimate<M>>>
where
    F: FnMut(Point, Approach) -> [f64; M],
{
    let stack = greens.stack();
    let n = stack.num_layers();
    let mut out = Vec::with_capacity(n);
    for l in 0..n {
        let layer = &stack.layers()[l];
        let (a, b) = stack.bounds(l);
        if stack.is_lead(l) {
            let im_k = greens.freq().k[l].im;
            if !(im_k > 0.0) {
                return Err(Error::LosslessLead {
                    side: if l == 0 { "left" } else { "right" },
                });
            }
        }
        if skip(layer) {
            out.push(Estimate::zero());
            continue;
        }
        // field positions owned by this layer (interfaces belong to the left)
        let mut inner: Vec<f64> = cuts.iter().copied().filter(|&c| c > a && c <= b).collect();
        inner.sort_by(f64::total_cmp);
        inner.dedup();
        let lo = if a.is_finite() {
            a
        } else {
            inner.first().copied().unwrap_or(b)
        };
        let hi = if b.is_finite() {
            b
        } else {
            inner.last().copied().unwrap_or(a)
        };
        let mut points = vec![lo];
        points.extend(inner.iter().copied().filter(|&c| c > lo && c < hi));
        if hi > lo {
            points.push(hi);
        }
        let mut est = integrate_pieces(
            |y| {
                f(
                    Point { x: y, layer: l },
                    Approach::Symmetric,
                )
            },
            &points,
            quad,
        )?;
        let two_im_k = 2.0 * greens.freq().k[l].im;
        let mut tail = |x: f64, approach: Approach| {
            let v = f(Point { x, layer: l }, approach);
            for i in 0..M {
                est.value[i] += v[i] / two_im_k;
                est.abs[i] += v[i].abs() / two_im_k;
            }
            est.evaluations += 1;
        };
        if !a.is_finite() {
            tail(lo, Approach::Below);
        }
        if !b.is_finite() {
            tail(hi, Approach::Above);
        }
        out.push(est);
    }
    Ok(out)
}

/// Source-resolved integrals of the density-of-states kernels over one layer.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LayerIntegrals {
    pub e_from_e: f64,
    pub e_from_m: f64,
    pub m_from_e: f64,
    pub m_from_m: f64,
    /// `∫ rho_IF / Re n(x)` split into its two brackets, and its L1 mass.
    pub flux_e: f64,
    pub flux_m: f64,
    pub flux_abs: f64,
}

impl LayerIntegrals {
    fn from_array(v: [f64; 7]) -> Self {
        Self {
            e_from_e: v[0],
            e_from_m: v[1],
            m_from_e: v[2],
            m_from_m: v[3],
            flux_e: v[4],
            flux_m: v[5],
            flux_abs: v[6],
        }
    }

    pub fn flux(&self) -> f64 {
        self.flux_e + self.flux_m
    }
}

/// Everything the integral route knows about one field point: per-source-layer
/// NLDOS and IFDOS integrals, from which photon numbers, fluxes and kernels
/// follow as occupation-weighted sums.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceProfile {
    pub x: f64,
    pub layer: usize,
    pub omega: f64,
    pub eps_abs: f64,
    pub mu_abs: f64,
    /// `Re n` at the field point.
    pub n_r: f64,
    pub layers: Vec<LayerIntegrals>,
}

impl SourceProfile {
    /// `∫ rho_NL,j` over each source layer, split by (electric, magnetic) source.
    pub fn layer_weights(&self, j: FieldType) -> Vec<(f64, f64)> {
        let (we, wm) = (0.5 * self.eps_abs, 0.5 * self.mu_abs);
        self.layers
            .iter()
            .map(|li| match j {
                FieldType::Electric => (li.e_from_e, li.e_from_m),
                FieldType::Magnetic => (li.m_from_e, li.m_from_m),
                FieldType::Total => (
                    we * li.e_from_e + wm * li.m_from_e,
                    we * li.e_from_m + wm * li.m_from_m,
                ),
            })
            .collect()
    }

    pub fn rho(&self, j: FieldType) -> f64 {
        self.layer_weights(j).iter().map(|(e, m)| e + m).sum()
    }

    pub fn ldos(&self) -> LdosSample {
        LdosSample {
            rho_e: self.rho(FieldType::Electric),
            rho_m: self.rho(FieldType::Magnetic),
            rho_tot: self.rho(FieldType::Total),
            route: LdosRoute::Integral,
        }
    }

    /// `∫ rho_NL,j eta dx'` for per-layer occupations `eta`.
    pub fn weighted(&self, j: FieldType, eta: &[f64]) -> f64 {
        self.layer_weights(j)
            .iter()
            .zip(eta)
            .map(|((e, m), n)| (e + m) * n)
            .sum()
    }

    /// `(∫ rho_IF dx', ∫ |rho_IF| dx')`.
    pub fn ifdos_integral(&self) -> (f64, f64) {
        let signed: f64 = self.layers.iter().map(LayerIntegrals::flux).sum();
        let abs: f64 = self.layers.iter().map(|l| l.flux_abs).sum();
        (self.n_r * signed, self.n_r * abs)
    }

    /// `∫ (rho_IF / Re n) eta dx'`; times `hbar omega c` this is the flux.
    pub fn flux_weighted(&self, eta: &[f64]) -> (f64, f64) {
        self.layers.iter().zip(eta).fold((0.0, 0.0), |(s, a), (l, n)| {
            (s + l.flux() * n, a + l.flux_abs * n.abs())
        })
    }
}

/// Densities of states and profiles for one stack at one frequency.
#[derive(Debug, Clone)]
pub struct SpectralSolver {
    exact: LayeredGreens,
    floored: LayeredGreens,
    consts: PhysicalConstants,
    options: IntegrationOptions,
}

impl SpectralSolver {
    pub fn new(stack: &Stack, omega: f64, consts: &PhysicalConstants, options: IntegrationOptions) -> Result<Self> {
        consts.validate()?;
        options.quad.validate()?;
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "angular frequency must be positive, got {omega}"
            )));
        }
        let exact = LayeredGreens::new(stack, omega, consts)?;
        let floored = LayeredGreens::new(&stack.with_lead_loss_floor(options.delta)?, omega, consts)?;
        Ok(Self {
            exact,
            floored,
            consts: *consts,
            options,
        })
    }

    pub fn omega(&self) -> f64 {
        self.exact.freq().omega
    }

    pub fn consts(&self) -> &PhysicalConstants {
        &self.consts
    }

    pub fn options(&self) -> &IntegrationOptions {
        &self.options
    }

    pub fn stack(&self) -> &Stack {
        self.exact.stack()
    }

    /// Green's functions with the exact material parameters.
    pub fn greens(&self) -> &LayeredGreens {
        &self.exact
    }

    /// Green's functions on the loss-floored stack used for integrals.
    pub fn floored_greens(&self) -> &LayeredGreens {
        &self.floored
    }

    pub fn nldos(&self, x: f64, xprime: f64) -> NldosSample {
        let g = self.exact.sample(x, xprime);
        let s = self.stack();
        nldos(
            &g,
            &s.layers()[s.locate(xprime)],
            &s.layers()[s.locate(x)],
            self.omega(),
            &self.consts,
        )
    }

    pub fn ifdos(&self, x: f64, xprime: f64) -> IfdosSample {
        let g = self.exact.sample(x, xprime);
        let s = self.stack();
        let n_r = self.exact.freq().n[s.locate(x)].re;
        ifdos(&g, &s.layers()[s.locate(xprime)], self.omega(), n_r, &self.consts)
    }

    /// LDOS from the imaginary parts of the coincident Green's functions.
    pub fn ldos(&self, x: f64) -> LdosSample {
        self.ldos_at(self.exact.point(x))
    }

    pub fn ldos_at(&self, p: Point) -> LdosSample {
        let g = self.exact.sample_at(p, p, Approach::Symmetric);
        let w = self.omega();
        let pre = 2.0 * w / (PI * self.consts.c.powi(2) * self.consts.area);
        let layer = &self.stack().layers()[p.layer];
        let rho_e = pre * g.g_ee.im;
        let rho_m = pre * g.g_mm.im;
        LdosSample {
            rho_e,
            rho_m,
            rho_tot: 0.5 * layer.epsilon.norm() * rho_e + 0.5 * layer.mu.norm() * rho_m,
            route: LdosRoute::ImaginaryPart,
        }
    }

    pub fn ldos_integral(&self, x: f64) -> Result<LdosSample> {
        Ok(self.profile(x)?.ldos())
    }

    pub fn profile(&self, x: f64) -> Result<SourceProfile> {
        self.profile_at(self.floored.point(x))
    }

    /// Source-resolved integrals at a field point with an explicit layer, so
    /// either side of an interface can be addressed.
    pub fn profile_at(&self, field: Point) -> Result<SourceProfile> {
        let stack = self.floored.stack();
        if field.layer >= stack.num_layers() {
            return Err(Error::LayerIndex {
                index: field.layer,
                layers: stack.num_layers(),
            });
        }
        let omega = self.omega();
        let consts = &self.consts;
        let fl = &stack.layers()[field.layer];
        let per_layer = integrate_axis::<7, _>(
            &self.floored,
            &[field.x],
            &self.options.quad,
            |l| l.epsilon.im == 0.0 && l.mu.im == 0.0,
            |src, approach| {
                let g = self.floored.sample_at(field, src, approach);
                let sl = &stack.layers()[src.layer];
                let nl = nldos(&g, sl, fl, omega, consts);
                let (fe, fm) = ifdos_reduced(&g, sl, omega, consts);
                [nl.e_from_e, nl.e_from_m, nl.m_from_e, nl.m_from_m, fe, fm, (fe + fm).abs()]
            },
        )?;
        Ok(SourceProfile {
            x: field.x,
            layer: field.layer,
            omega,
            eps_abs: fl.epsilon.norm(),
            mu_abs: fl.mu.norm(),
            n_r: self.floored.freq().n[field.layer].re,
            layers: per_layer.into_iter().map(|e| LayerIntegrals::from_array(e.value)).collect(),
        })
    }
}

/// Imaginary-part LDOS at `x`.
pub fn ldos(stack: &Stack, omega: f64, x: f64, consts: &PhysicalConstants) -> Result<LdosSample> {
    let g = LayeredGreens::new(stack, omega, consts)?;
    let p = g.point(x);
    let s = g.sample_at(p, p, Approach::Symmetric);
    let pre = 2.0 * omega / (PI * consts.c.powi(2) * consts.area);
    let layer = &stack.layers()[p.layer];
    let (rho_e, rho_m) = (pre * s.g_ee.im, pre * s.g_mm.im);
    Ok(LdosSample {
        rho_e,
        rho_m,
        rho_tot: 0.5 * layer.epsilon.norm() * rho_e + 0.5 * layer.mu.norm() * rho_m,
        route: LdosRoute::ImaginaryPart,
    })
}

/// Integral-route LDOS at `x`.
pub fn ldos_integral(
    stack: &Stack,
    omega: f64,
    x: f64,
    consts: &PhysicalConstants,
    options: IntegrationOptions,
) -> Result<LdosSample> {
    SpectralSolver::new(stack, omega, consts, options)?.ldos_integral(x)
}
