//! Globally adaptive Gauss–Kronrod (10/21) quadrature for small
//! vector-valued integrands on finite intervals.
//!
//! All components share one subdivision tree; an interval is converged when
//! every component's error estimate sits below `rel_tol` times that
//! component's absolute mass (or below `abs_tol`).

#![allow(clippy::excessive_precision)]

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-30,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "quadrature relative tolerance must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol >= 0.0) || self.max_subdivisions == 0 {
            return Err(Error::InvalidArgument(
                "quadrature needs abs_tol >= 0 and a positive subdivision budget".into(),
            ));
        }
        Ok(())
    }
}

/// Integral estimate per component, with error and absolute mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<const M: usize> {
    pub value: [f64; M],
    pub error: [f64; M],
    pub abs: [f64; M],
    pub evaluations: usize,
}

impl<const M: usize> Estimate<M> {
    pub fn zero() -> Self {
        Self {
            value: [0.0; M],
            error: [0.0; M],
            abs: [0.0; M],
            evaluations: 0,
        }
    }

    pub fn accumulate(&mut self, other: &Self) {
        for i in 0..M {
            self.value[i] += other.value[i];
            self.error[i] += other.error[i];
            self.abs[i] += other.abs[i];
        }
        self.evaluations += other.evaluations;
    }
}

#[derive(Clone, Copy)]
struct Panel<const M: usize> {
    a: f64,
    b: f64,
    value: [f64; M],
    error: [f64; M],
    abs: [f64; M],
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * resabs;
        if min_err > err {
            err = min_err;
        }
    }
    err
}

fn gauss_kronrod<const M: usize, F>(f: &mut F, a: f64, b: f64) -> Panel<M>
where
    F: FnMut(f64) -> [f64; M],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = [0.0; M];
    let mut gauss = [0.0; M];
    let mut resabs = [0.0; M];
    for i in 0..M {
        kron[i] = fc[i] * WGK[10];
        resabs[i] = fc[i].abs() * WGK[10];
    }
    let mut f1 = [[0.0; M]; 10];
    let mut f2 = [[0.0; M]; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let lo = f(center - dx);
        let hi = f(center + dx);
        for i in 0..M {
            kron[i] += WGK[j] * (lo[i] + hi[i]);
            resabs[i] += WGK[j] * (lo[i].abs() + hi[i].abs());
            // the odd Kronrod nodes are the 10-point Gauss nodes
            if j % 2 == 1 {
                gauss[i] += WG[j / 2] * (lo[i] + hi[i]);
            }
        }
        f1[j] = lo;
        f2[j] = hi;
    }
    let mut value = [0.0; M];
    let mut error = [0.0; M];
    let mut abs = [0.0; M];
    for i in 0..M {
        let mean = 0.5 * kron[i];
        let mut resasc = WGK[10] * (fc[i] - mean).abs();
        for j in 0..10 {
            resasc += WGK[j] * ((f1[j][i] - mean).abs() + (f2[j][i] - mean).abs());
        }
        value[i] = kron[i] * half;
        abs[i] = resabs[i] * half.abs();
        error[i] = rescale_error((kron[i] - gauss[i]) * half, abs[i], resasc * half.abs());
    }
    Panel {
        a,
        b,
        value,
        error,
        abs,
    }
}

/// Adaptive integral of `f` over the finite interval `[a, b]`.
pub fn integrate<const M: usize, F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate<M>>
where
    F: FnMut(f64) -> [f64; M],
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "quadrature bounds must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Estimate::zero());
    }
    let mut panels = vec![gauss_kronrod(&mut f, a, b)];
    let mut evaluations = 21;
    loop {
        let mut total = Estimate::<M>::zero();
        for p in &panels {
            for i in 0..M {
                total.value[i] += p.value[i];
                total.error[i] += p.error[i];
                total.abs[i] += p.abs[i];
            }
        }
        let tol: [f64; M] = std::array::from_fn(|i| (spec.rel_tol * total.abs[i]).max(spec.abs_tol));
        let ratio = |p: &Panel<M>| -> f64 {
            (0..M)
                .map(|i| {
                    if tol[i] > 0.0 {
                        p.error[i] / tol[i]
                    } else if p.error[i] > 0.0 {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                })
                .fold(0.0, f64::max)
        };
        let converged = (0..M).all(|i| total.error[i] <= tol[i]);
        if converged {
            total.evaluations = evaluations;
            return Ok(total);
        }
        if panels.len() >= spec.max_subdivisions {
            let worst = (0..M)
                .map(|i| total.error[i] / tol[i].max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max);
            return Err(Error::QuadratureNonConvergence {
                a,
                b,
                subdivisions: panels.len(),
                error: worst,
            });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .map(|(i, p)| (i, ratio(p)))
            .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        let worst = panels.swap_remove(idx);
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // interval can no longer be bisected in floating point
            return Err(Error::QuadratureNonConvergence {
                a,
                b,
                subdivisions: panels.len() + 1,
                error: ratio(&worst),
            });
        }
        panels.push(gauss_kronrod(&mut f, worst.a, mid));
        panels.push(gauss_kronrod(&mut f, mid, worst.b));
        evaluations += 42;
    }
}

/// Adaptive integral over `[points[0], points[last]]` with forced breakpoints.
pub fn integrate_pieces<const M: usize, F>(mut f: F, points: &[f64], spec: &QuadratureSpec) -> Result<Estimate<M>>
where
    F: FnMut(f64) -> [f64; M],
{
    let mut total = Estimate::zero();
    for w in points.windows(2) {
        total.accumulate(&integrate(&mut f, w[0], w[1], spec)?);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let spec = QuadratureSpec::default();
        let est = integrate(|x| [x * x, x.powi(7) - 1.0], 0.0, 2.0, &spec).unwrap();
        assert!((est.value[0] - 8.0 / 3.0).abs() < 1e-14);
        assert!((est.value[1] - (32.0 - 2.0)).abs() < 1e-12);
        assert_eq!(est.evaluations, 21);
    }

    #[test]
    fn oscillatory_decaying_integrand() {
        // int_0^L e^{-a x} cos(b x) dx against its closed form
        let (a, b, l) = (0.3, 40.0, 10.0);
        let spec = QuadratureSpec::default();
        let est = integrate(|x| [(-a * x).exp() * (b * x).cos()], 0.0, l, &spec).unwrap();
        let exact = {
            let e = (-a * l).exp();
            (a - e * (a * (b * l).cos() - b * (b * l).sin())) / (a * a + b * b)
        };
        assert!((est.value[0] - exact).abs() < 1e-9 * est.abs[0]);
    }

    #[test]
    fn kink_with_breakpoint() {
        let spec = QuadratureSpec::default();
        let est = integrate_pieces(|x: f64| [(x - 0.3).abs()], &[0.0, 0.3, 1.0], &spec).unwrap();
        assert!((est.value[0] - (0.045 + 0.245)).abs() < 1e-15);
    }

    #[test]
    fn reversed_and_empty_intervals() {
        let spec = QuadratureSpec::default();
        let fwd = integrate(|x: f64| [x.sin()], 0.0, 1.0, &spec).unwrap();
        let rev = integrate(|x: f64| [x.sin()], 1.0, 0.0, &spec).unwrap();
        assert!((fwd.value[0] + rev.value[0]).abs() < 1e-15);
        assert_eq!(integrate(|_| [1.0], 2.0, 2.0, &spec).unwrap().value, [0.0]);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let spec = QuadratureSpec {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_subdivisions: 3,
        };
        let err = integrate(|x: f64| [(1.0 / (x + 1e-9)).sin()], 0.0, 1.0, &spec).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn nonfinite_bounds_rejected() {
        let spec = QuadratureSpec::default();
        assert!(integrate(|_| [1.0], 0.0, f64::INFINITY, &spec).is_err());
        assert!(QuadratureSpec::with_rel_tol(0.0).validate().is_err());
    }
}
