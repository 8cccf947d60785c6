//! Scaled Green's functions of a planar stack and the four field Green's
//! functions built from them.
//!
//! Every scaled Green's function is a short sum of plane-wave products
//! `A exp(i a x) exp(i b x')`, so all derivatives are taken term by term.
//! The only non-smooth piece is the direct term `exp(i k |x - x'|)`, whose
//! first derivatives jump at `x = x'`.

use num_complex::Complex64;

use crate::coefficients::{build_ladder, CoefficientLadder, Family};
use crate::error::{Error, Result};
use crate::model::{FrequencySample, PhysicalConstants, Stack};

/// A position tagged with the layer whose material parameters apply there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub layer: usize,
}

/// Which one-sided limit to take when the source sits on the field point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    /// Average of the two one-sided limits.
    Symmetric,
    /// Source approaches from below (`x' < x`).
    Below,
    /// Source approaches from above (`x' > x`).
    Above,
}

impl Approach {
    fn sign(self) -> f64 {
        match self {
            Approach::Symmetric => 0.0,
            Approach::Below => 1.0,
            Approach::Above => -1.0,
        }
    }
}

/// Value and derivatives of a scaled Green's function at `(x, x')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledGreens {
    pub family: Family,
    pub value: Complex64,
    pub d_dx: Complex64,
    pub d_dxprime: Complex64,
    /// Mixed second derivative; excludes the delta distribution at `x = x'`.
    pub d2_dx_dxprime: Complex64,
}

/// The four Green's functions at one `(x, omega, x')` triple, in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensSample {
    pub g_ee: Complex64,
    pub g_em: Complex64,
    pub g_me: Complex64,
    pub g_mm: Complex64,
    pub coincident: bool,
}

#[derive(Clone, Copy)]
struct Term {
    amp: Complex64,
    ax: Complex64,
    axp: Complex64,
}

#[derive(Default)]
struct Accum {
    value: Complex64,
    d_dx: Complex64,
    d_dxprime: Complex64,
    d2: Complex64,
}

impl Accum {
    fn add(&mut self, t: Term) {
        self.value += t.amp;
        self.d_dx += t.ax * t.amp;
        self.d_dxprime += t.axp * t.amp;
        self.d2 += t.ax * t.axp * t.amp;
    }
}

fn wave(k: Complex64, arg: f64) -> Complex64 {
    (Complex64::i() * k * arg).exp()
}

/// Green's-function evaluator for one stack at one frequency.
#[derive(Debug, Clone)]
pub struct LayeredGreens {
    stack: Stack,
    freq: FrequencySample,
    ladder: CoefficientLadder,
}

impl LayeredGreens {
    pub fn new(stack: &Stack, omega: f64, consts: &PhysicalConstants) -> Result<Self> {
        let freq = FrequencySample::new(stack, omega, consts)?;
        let ladder = build_ladder(stack, &freq)?;
        Ok(Self {
            stack: stack.clone(),
            freq,
            ladder,
        })
    }

    pub fn from_parts(stack: &Stack, freq: &FrequencySample, ladder: &CoefficientLadder) -> Result<Self> {
        if freq.n.len() != stack.num_layers() || ladder.num_layers() != stack.num_layers() {
            return Err(Error::InvalidArgument(
                "ladder and frequency sample must belong to the stack".into(),
            ));
        }
        Ok(Self {
            stack: stack.clone(),
            freq: freq.clone(),
            ladder: ladder.clone(),
        })
    }

    pub fn stack(&self) -> &Stack {
        &self.stack
    }

    pub fn freq(&self) -> &FrequencySample {
        &self.freq
    }

    pub fn ladder(&self) -> &CoefficientLadder {
        &self.ladder
    }

    pub fn point(&self, x: f64) -> Point {
        Point {
            x,
            layer: self.stack.locate(x),
        }
    }

    /// Scaled Green's function with the layers located from the positions.
    pub fn xi(&self, x: f64, xprime: f64, family: Family) -> ScaledGreens {
        self.xi_at(self.point(x), self.point(xprime), family, Approach::Symmetric)
    }

    pub fn xi_at(&self, field: Point, source: Point, family: Family, approach: Approach) -> ScaledGreens {
        let mut acc = Accum::default();
        let lad = self.ladder.family(family);
        let ls = source.layer;
        let lf = field.layer;
        let k = self.freq.k[ls];
        let ik = Complex64::i() * k;
        let (a, b) = self.stack.bounds(ls);
        let has_left = ls > 0;
        let has_right = ls + 1 < self.stack.num_layers();
        let nu = lad.nu[ls];

        if lf == ls {
            let (x, xp) = (field.x, source.x);
            let s = if x == xp {
                approach.sign()
            } else {
                (x - xp).signum()
            };
            let direct = wave(k, (x - xp).abs());
            acc.value += direct;
            acc.d_dx += ik * s * direct;
            acc.d_dxprime -= ik * s * direct;
            // both one-sided limits of the mixed derivative coincide
            acc.d2 += k * k * direct;
            if has_right {
                let r = lad.refl_right[ls];
                acc.add(Term {
                    amp: nu * r * wave(k, (b - x) + (b - xp)),
                    ax: -ik,
                    axp: -ik,
                });
                if has_left {
                    let rp = lad.refl_left[ls];
                    let d = b - a;
                    acc.add(Term {
                        amp: nu * r * rp * wave(k, 2.0 * d - (x - xp)),
                        ax: -ik,
                        axp: ik,
                    });
                    acc.add(Term {
                        amp: nu * r * rp * wave(k, 2.0 * d + (x - xp)),
                        ax: ik,
                        axp: -ik,
                    });
                }
            }
            if has_left {
                let rp = lad.refl_left[ls];
                acc.add(Term {
                    amp: nu * rp * wave(k, (x - a) + (xp - a)),
                    ax: ik,
                    axp: ik,
                });
            }
        } else {
            let kf = self.freq.k[lf];
            let ikf = Complex64::i() * kf;
            let (af, bf) = self.stack.bounds(lf);
            let transmission = self
                .ladder
                .cumulative_transmission(lf, ls, family)
                .expect("layer indices come from the same stack");
            let mut source_terms: [(Complex64, Complex64); 2] = Default::default();
            let mut field_terms: [(Complex64, Complex64); 2] = Default::default();
            let (mut ns, mut nf) = (0, 0);
            if lf > ls {
                // right-going amplitude leaving the source layer at its right boundary
                source_terms[ns] = (nu * wave(k, b - source.x), -ik);
                ns += 1;
                if has_left {
                    let rp = lad.refl_left[ls];
                    source_terms[ns] = (nu * rp * wave(k, source.x - a + (b - a)), ik);
                    ns += 1;
                }
                field_terms[nf] = (wave(kf, field.x - af), ikf);
                nf += 1;
                if lf + 1 < self.stack.num_layers() {
                    let r = lad.refl_right[lf];
                    field_terms[nf] = (r * wave(kf, 2.0 * (bf - af) - (field.x - af)), -ikf);
                    nf += 1;
                }
            } else {
                // left-going amplitude leaving the source layer at its left boundary
                source_terms[ns] = (nu * wave(k, source.x - a), ik);
                ns += 1;
                if has_right {
                    let r = lad.refl_right[ls];
                    source_terms[ns] = (nu * r * wave(k, b - source.x + (b - a)), -ik);
                    ns += 1;
                }
                field_terms[nf] = (wave(kf, bf - field.x), -ikf);
                nf += 1;
                if lf > 0 {
                    let rp = lad.refl_left[lf];
                    field_terms[nf] = (rp * wave(kf, field.x - af + (bf - af)), ikf);
                    nf += 1;
                }
            }
            for &(sa, axp) in &source_terms[..ns] {
                for &(fa, ax) in &field_terms[..nf] {
                    acc.add(Term {
                        amp: transmission * sa * fa,
                        ax,
                        axp,
                    });
                }
            }
        }

        let pre = Complex64::i() / (2.0 * k);
        ScaledGreens {
            family,
            value: pre * acc.value,
            d_dx: pre * acc.d_dx,
            d_dxprime: pre * acc.d_dxprime,
            d2_dx_dxprime: pre * acc.d2,
        }
    }

    /// All four Green's functions with the layers located from the positions.
    pub fn sample(&self, x: f64, xprime: f64) -> GreensSample {
        self.sample_at(self.point(x), self.point(xprime), Approach::Symmetric)
    }

    pub fn sample_at(&self, field: Point, source: Point, approach: Approach) -> GreensSample {
        let xe = self.xi_at(field, source, Family::Electric, approach);
        let xm = self.xi_at(field, source, Family::Magnetic, approach);
        let k0 = self.freq.k0;
        let src = &self.stack.layers()[source.layer];
        let fld = &self.stack.layers()[field.layer];
        GreensSample {
            g_ee: src.mu * xe.value,
            g_em: -xe.d_dxprime / k0,
            g_me: src.mu * xe.d_dx / (k0 * fld.mu),
            g_mm: src.epsilon * xm.value,
            coincident: field.x == source.x,
        }
    }

    /// `G_mm` from the mixed second derivative of `G_ee`; valid for `x != x'`
    /// where the delta term vanishes.
    pub fn g_mm_from_electric(&self, x: f64, xprime: f64) -> Complex64 {
        let field = self.point(x);
        let xe = self.xi_at(field, self.point(xprime), Family::Electric, Approach::Symmetric);
        let k0 = self.freq.k0;
        xe.d2_dx_dxprime / (k0 * k0 * self.stack.layers()[field.layer].mu)
    }
}

/// Scaled Green's function `xi_j(x, omega, x')` from a prebuilt ladder.
pub fn xi(
    stack: &Stack,
    ladder: &CoefficientLadder,
    freq: &FrequencySample,
    x: f64,
    xprime: f64,
    family: Family,
) -> Result<ScaledGreens> {
    Ok(LayeredGreens::from_parts(stack, freq, ladder)?.xi(x, xprime, family))
}

/// `G_ee`, `G_em`, `G_me` and `G_mm` at `(x, omega, x')`.
pub fn greens_tensor(stack: &Stack, freq: &FrequencySample, x: f64, xprime: f64) -> Result<GreensSample> {
    let ladder = build_ladder(stack, freq)?;
    Ok(LayeredGreens::from_parts(stack, freq, &ladder)?.sample(x, xprime))
}
