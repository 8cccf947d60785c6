//! The exact relations between the computed quantities, packaged as
//! runnable checks with residuals and pass thresholds.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::Family;
use crate::dos::{integrate_axis, FieldType, IntegrationOptions, SpectralSolver};
use crate::error::Result;
use crate::fixtures;
use crate::greens::{Approach, LayeredGreens, Point};
use crate::model::{bose_einstein, PhysicalConstants, Stack};

pub const GREEN_IDENTITY_TOL: f64 = 1e-6;
pub const RECIPROCITY_TOL: f64 = 1e-10;
pub const IFDOS_ZERO_TOL: f64 = 1e-8;
pub const EQUILIBRIUM_TOL: f64 = 1e-6;
pub const CONTINUITY_TOL: f64 = 1e-8;
pub const EXCHANGE_CONSISTENCY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// False when the check did not apply to its input.
    pub ran: bool,
    pub context: String,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64, context: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            ran: true,
            context: context.into(),
        }
    }

    pub fn not_run(name: impl Into<String>, tolerance: f64, context: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            residual: f64::NAN,
            tolerance,
            passed: false,
            ran: false,
            context: context.into(),
        }
    }

    /// A check fails only if it ran and exceeded its tolerance.
    pub fn failed(&self) -> bool {
        self.ran && !self.passed
    }

    fn worst(name: &str, tolerance: f64, context: String, residuals: impl IntoIterator<Item = f64>) -> Self {
        let r = residuals.into_iter().fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) });
        Self::new(name, r, tolerance, context)
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn describe(stack: &Stack, omega: f64, consts: &PhysicalConstants) -> String {
    format!(
        "{} layers, hbar*omega = {:.6} eV",
        stack.num_layers(),
        consts.ev_from_omega(omega)
    )
}

fn identity_name(family: Family) -> &'static str {
    match family {
        Family::Electric => "green-identity-electric",
        Family::Magnetic => "green-identity-magnetic",
    }
}

/// Relative residual of the Green integral identity at one `(x, x')` pair,
/// evaluated on the loss-floored stack.
pub fn green_identity_residual(solver: &SpectralSolver, x: f64, xprime: f64, family: Family) -> Result<f64> {
    let g = solver.floored_greens();
    let stack = g.stack();
    let (p, pp) = (g.point(x), g.point(xprime));
    let k0 = g.freq().k0;
    let per_layer = integrate_axis::<2, _>(
        g,
        &[x, xprime],
        &solver.options().quad,
        |l| l.epsilon.im == 0.0 && l.mu.im == 0.0,
        |src, approach| {
            let a = g.sample_at(p, src, approach);
            let b = g.sample_at(pp, src, approach);
            let l = &stack.layers()[src.layer];
            let v = match family {
                Family::Electric => l.epsilon.im * a.g_ee * b.g_ee.conj() + l.mu.im * a.g_em * b.g_em.conj(),
                Family::Magnetic => l.epsilon.im * a.g_me * b.g_me.conj() + l.mu.im * a.g_mm * b.g_mm.conj(),
            };
            [v.re, v.im]
        },
    )?;
    let lhs = per_layer
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, e| acc + Complex64::new(e.value[0], e.value[1]))
        * (k0 * k0);
    let direct = g.sample_at(p, pp, Approach::Symmetric);
    let rhs = match family {
        Family::Electric => direct.g_ee.im,
        Family::Magnetic => direct.g_mm.im,
    };
    Ok((lhs - rhs).norm() / rhs.abs())
}

pub fn check_green_identity(solver: &SpectralSolver, x: f64, xprime: f64, family: Family) -> Result<CheckReport> {
    let r = green_identity_residual(solver, x, xprime, family)?;
    Ok(CheckReport::new(
        identity_name(family),
        r,
        GREEN_IDENTITY_TOL,
        format!(
            "{}, x = {x:e} m, x' = {xprime:e} m",
            describe(solver.stack(), solver.omega(), solver.consts())
        ),
    ))
}

/// Worst of the three reciprocity residuals over the given pairs.
pub fn check_reciprocity(greens: &LayeredGreens, pairs: &[(f64, f64)], consts: &PhysicalConstants) -> CheckReport {
    let residuals = pairs.iter().map(|&(x, xp)| {
        let a = greens.sample(x, xp);
        let b = greens.sample(xp, x);
        rel(a.g_ee, b.g_ee)
            .max(rel(a.g_mm, b.g_mm))
            .max(rel(a.g_me, -b.g_em))
    });
    CheckReport::worst(
        "reciprocity",
        RECIPROCITY_TOL,
        format!(
            "{}, {} pairs",
            describe(greens.stack(), greens.freq().omega, consts),
            pairs.len()
        ),
        residuals,
    )
}

/// Derivative-route `G_mm` against the magnetic-family value at `x != x'`.
pub fn check_exchange_consistency(greens: &LayeredGreens, pairs: &[(f64, f64)], consts: &PhysicalConstants) -> CheckReport {
    let residuals = pairs
        .iter()
        .filter(|(x, xp)| x != xp)
        .map(|&(x, xp)| rel(greens.g_mm_from_electric(x, xp), greens.sample(x, xp).g_mm));
    CheckReport::worst(
        "exchange-consistency",
        EXCHANGE_CONSISTENCY_TOL,
        format!(
            "{}, {} pairs",
            describe(greens.stack(), greens.freq().omega, consts),
            pairs.len()
        ),
        residuals,
    )
}

pub fn ifdos_zero_residual(solver: &SpectralSolver, x: f64) -> Result<f64> {
    let (signed, abs) = solver.profile(x)?.ifdos_integral();
    Ok(if abs > 0.0 { signed.abs() / abs } else { signed.abs() })
}

pub fn check_ifdos_zero(solver: &SpectralSolver, x: f64) -> Result<CheckReport> {
    Ok(CheckReport::new(
        "ifdos-zero",
        ifdos_zero_residual(solver, x)?,
        IFDOS_ZERO_TOL,
        format!("{}, x = {x:e} m", describe(solver.stack(), solver.omega(), solver.consts())),
    ))
}

/// Uniform-temperature stacks must show `n_j = eta`, `s = 0` and `q = 0`
/// everywhere; other stacks report not-run.
pub fn check_equilibrium(solver: &SpectralSolver, grid: &[f64]) -> Result<CheckReport> {
    let stack = solver.stack();
    let context = format!("{}, {} points", describe(stack, solver.omega(), solver.consts()), grid.len());
    let t = stack.layers()[0].temperature;
    if stack.layers().iter().any(|l| l.temperature != t) {
        return Ok(CheckReport::not_run("equilibrium", EQUILIBRIUM_TOL, context + ", non-uniform temperature"));
    }
    let eta = bose_einstein(solver.omega(), t, solver.consts());
    let scaled = |v: f64, scale: f64| if scale > 0.0 { v.abs() / scale } else { v.abs() };
    let mut worst = 0.0f64;
    for &x in grid {
        let profile = solver.profile(x)?;
        let n = solver.photon_numbers_from(&profile)?;
        for j in FieldType::ALL {
            worst = worst.max(scaled(n.get(j) - eta, eta));
        }
        let f = solver.flux_from(&profile)?;
        worst = worst.max(scaled(f.s, f.s_scale)).max(scaled(f.q, f.q_scale));
    }
    Ok(CheckReport::new("equilibrium", worst, EQUILIBRIUM_TOL, context))
}

/// Largest two-sided flux mismatch over all interfaces. The mismatch is
/// relative to the local flux, or to its L1 scale where the flux itself is
/// numerically zero.
pub fn check_poynting_continuity(solver: &SpectralSolver) -> Result<CheckReport> {
    let stack = solver.stack();
    let mut worst = 0.0f64;
    for (i, &x) in stack.interfaces().iter().enumerate() {
        let l = solver.flux_at(Point { x, layer: i })?;
        let r = solver.flux_at(Point { x, layer: i + 1 })?;
        let l1 = l.s_scale.max(r.s_scale);
        let local = l.s.abs().max(r.s.abs());
        let scale = if local > 1e-6 * l1 { local } else { l1 };
        if scale > 0.0 {
            worst = worst.max((l.s - r.s).abs() / scale);
        }
    }
    Ok(CheckReport::new(
        "poynting-continuity",
        worst,
        CONTINUITY_TOL,
        format!(
            "{}, {} interfaces",
            describe(stack, solver.omega(), solver.consts()),
            stack.num_interfaces()
        ),
    ))
}

/// Sample sizes of the battery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatterySpec {
    pub seed: u64,
    pub identity_pairs: usize,
    pub reciprocity_pairs: usize,
    pub field_points: usize,
    /// Margin around the outermost interfaces from which points are drawn.
    pub margin: f64,
    /// Temperature used for the equilibrium check.
    pub equilibrium_temperature: f64,
}

impl Default for BatterySpec {
    fn default() -> Self {
        Self {
            seed: fixtures::RANDOM_SEED,
            identity_pairs: 20,
            reciprocity_pairs: 100,
            field_points: 5,
            margin: 2e-6,
            equilibrium_temperature: 300.0,
        }
    }
}

/// Every check on one stack, run concurrently. Reports are labelled and
/// returned in a fixed order.
pub fn run_battery(
    label: &str,
    stack: &Stack,
    omega: f64,
    consts: &PhysicalConstants,
    options: IntegrationOptions,
    spec: &BatterySpec,
) -> Result<Vec<CheckReport>> {
    let solver = SpectralSolver::new(stack, omega, consts, options)?;
    let equilibrium = SpectralSolver::new(
        &stack.with_uniform_temperature(spec.equilibrium_temperature),
        omega,
        consts,
        options,
    )?;
    let window = fixtures::sampling_window(stack, spec.margin);
    let identity_pairs = fixtures::random_pairs(spec.seed, spec.identity_pairs, window);
    let reciprocity_pairs = fixtures::random_pairs(spec.seed ^ 0x9e37_79b9, spec.reciprocity_pairs, window);
    let field_points: Vec<f64> = fixtures::random_pairs(spec.seed ^ 0x7f4a_7c15, spec.field_points, window)
        .into_iter()
        .map(|(x, _)| x)
        .collect();

    type Job<'a> = Box<dyn Fn() -> Result<CheckReport> + Send + Sync + 'a>;
    let identity = |family: Family| -> Job<'_> {
        let (solver, pairs) = (&solver, &identity_pairs);
        Box::new(move || {
            let residuals = pairs
                .par_iter()
                .map(|&(x, xp)| green_identity_residual(solver, x, xp, family))
                .collect::<Result<Vec<_>>>()?;
            Ok(CheckReport::worst(
                identity_name(family),
                GREEN_IDENTITY_TOL,
                format!("{}, {} pairs", describe(stack, omega, consts), pairs.len()),
                residuals,
            ))
        })
    };
    let jobs: Vec<Job<'_>> = vec![
        identity(Family::Electric),
        identity(Family::Magnetic),
        Box::new(|| Ok(check_reciprocity(solver.greens(), &reciprocity_pairs, consts))),
        Box::new(|| Ok(check_exchange_consistency(solver.greens(), &reciprocity_pairs, consts))),
        Box::new(|| {
            let residuals = field_points
                .par_iter()
                .map(|&x| ifdos_zero_residual(&solver, x))
                .collect::<Result<Vec<_>>>()?;
            Ok(CheckReport::worst(
                "ifdos-zero",
                IFDOS_ZERO_TOL,
                format!("{}, {} points", describe(stack, omega, consts), field_points.len()),
                residuals,
            ))
        }),
        Box::new(|| check_equilibrium(&equilibrium, &field_points)),
        Box::new(|| check_poynting_continuity(&solver)),
    ];
    let mut reports = jobs.par_iter().map(|job| job()).collect::<Result<Vec<_>>>()?;
    for r in &mut reports {
        r.name = format!("{label}/{}", r.name);
    }
    Ok(reports)
}

/// The battery on the three canonical fixtures at the cavity photon energy.
pub fn canonical_battery(
    consts: &PhysicalConstants,
    options: IntegrationOptions,
    spec: &BatterySpec,
) -> Result<Vec<CheckReport>> {
    let omega = consts.omega_from_ev(fixtures::CAVITY_PHOTON_ENERGY_EV);
    let cases = [
        ("homogeneous", fixtures::homogeneous_lossy(300.0)),
        ("cavity", fixtures::cavity(fixtures::Emitter::Magnetic, 300.0)),
        ("random", fixtures::random_lossy(spec.seed)),
    ];
    let mut out = Vec::new();
    for (label, stack) in &cases {
        out.extend(run_battery(label, stack, omega, consts, options, spec)?);
    }
    Ok(out)
}
