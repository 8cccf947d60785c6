//! Single-interface Fresnel coefficients and the recursive multilayer
//! reflection/transmission ladder.
//!
//! Two coefficient families exist at normal incidence. The electric family
//! enforces continuity of `E` and `(1/mu) dE/dx`; the magnetic family is its
//! dual with `epsilon` in place of `mu`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{refractive_index, FrequencySample, Layer, Stack};

/// Pole detection threshold for lossless layers.
const POLE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Electric,
    Magnetic,
}

impl Family {
    pub const BOTH: [Family; 2] = [Family::Electric, Family::Magnetic];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Electric => "electric",
            Family::Magnetic => "magnetic",
        })
    }
}

/// Amplitude coefficients of one interface; primed values are for incidence
/// from the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleInterfaceCoeffs {
    pub r_e: Complex64,
    pub t_e: Complex64,
    pub r_m: Complex64,
    pub t_m: Complex64,
    pub r_e_prime: Complex64,
    pub t_e_prime: Complex64,
    pub r_m_prime: Complex64,
    pub t_m_prime: Complex64,
}

impl SingleInterfaceCoeffs {
    pub fn reflection(&self, family: Family) -> (Complex64, Complex64) {
        match family {
            Family::Electric => (self.r_e, self.r_e_prime),
            Family::Magnetic => (self.r_m, self.r_m_prime),
        }
    }

    pub fn transmission(&self, family: Family) -> (Complex64, Complex64) {
        match family {
            Family::Electric => (self.t_e, self.t_e_prime),
            Family::Magnetic => (self.t_m, self.t_m_prime),
        }
    }
}

fn pair(
    w1: Complex64,
    n1: Complex64,
    w2: Complex64,
    n2: Complex64,
) -> Option<(Complex64, Complex64)> {
    let den = w2 * n1 + w1 * n2;
    if den.norm() == 0.0 || !den.is_finite() {
        return None;
    }
    Some(((w2 * n1 - w1 * n2) / den, (2.0 * w2 * n1) / den))
}

pub(crate) fn fresnel_with_indices(
    left: &Layer,
    n1: Complex64,
    right: &Layer,
    n2: Complex64,
    interface: usize,
) -> Result<SingleInterfaceCoeffs> {
    let singular = |family| Error::FresnelSingular { interface, family };
    let (r_e, t_e) = pair(left.mu, n1, right.mu, n2).ok_or(singular(Family::Electric))?;
    let (r_e_prime, t_e_prime) =
        pair(right.mu, n2, left.mu, n1).ok_or(singular(Family::Electric))?;
    let (r_m, t_m) = pair(left.epsilon, n1, right.epsilon, n2).ok_or(singular(Family::Magnetic))?;
    let (r_m_prime, t_m_prime) =
        pair(right.epsilon, n2, left.epsilon, n1).ok_or(singular(Family::Magnetic))?;
    Ok(SingleInterfaceCoeffs {
        r_e,
        t_e,
        r_m,
        t_m,
        r_e_prime,
        t_e_prime,
        r_m_prime,
        t_m_prime,
    })
}

/// Fresnel coefficients between two media at normal incidence.
pub fn fresnel(left: &Layer, right: &Layer) -> Result<SingleInterfaceCoeffs> {
    let n1 = refractive_index(left.epsilon, left.mu)?;
    let n2 = refractive_index(right.epsilon, right.mu)?;
    fresnel_with_indices(left, n1, right, n2, 0)
}

/// Multilayer coefficients of one family at one frequency.
///
/// `refl_right[l]` is the reflection seen from inside layer `l` looking at its
/// right boundary and `refl_left[l]` the one looking at its left boundary, both
/// referenced to that boundary; they vanish for the right and left lead
/// respectively. `trans_right[i]` carries a right-going wave from layer `i`
/// into layer `i + 1` across interface `i` and `trans_left[i]` the reverse.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyLadder {
    pub family: Family,
    pub r: Vec<Complex64>,
    pub t: Vec<Complex64>,
    pub r_prime: Vec<Complex64>,
    pub t_prime: Vec<Complex64>,
    pub refl_right: Vec<Complex64>,
    pub refl_left: Vec<Complex64>,
    pub trans_right: Vec<Complex64>,
    pub trans_left: Vec<Complex64>,
    /// Multiple-reflection resummation factor of each layer.
    pub nu: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientLadder {
    pub electric: FamilyLadder,
    pub magnetic: FamilyLadder,
    /// One-pass propagation factor `exp(i k_l d_l)`; zero for the leads.
    pub phase: Vec<Complex64>,
}

impl CoefficientLadder {
    pub fn family(&self, family: Family) -> &FamilyLadder {
        match family {
            Family::Electric => &self.electric,
            Family::Magnetic => &self.magnetic,
        }
    }

    pub fn num_layers(&self) -> usize {
        self.phase.len()
    }

    /// Cumulative amplitude from source layer `from` into field layer `to`.
    pub fn cumulative_transmission(&self, to: usize, from: usize, family: Family) -> Result<Complex64> {
        let layers = self.num_layers();
        for index in [to, from] {
            if index >= layers {
                return Err(Error::LayerIndex { index, layers });
            }
        }
        if to == from {
            return Err(Error::InvalidArgument(
                "cumulative transmission needs distinct layers".into(),
            ));
        }
        let ladder = self.family(family);
        Ok(if to > from {
            (from + 1..to).fold(ladder.trans_right[from], |acc, q| {
                acc * ladder.trans_right[q] * self.phase[q]
            })
        } else {
            (to..from - 1).rev().fold(ladder.trans_left[from - 1], |acc, q| {
                acc * ladder.trans_left[q] * self.phase[q + 1]
            })
        })
    }
}

/// Cumulative transmission, see [`CoefficientLadder::cumulative_transmission`].
pub fn cumulative_transmission(
    ladder: &CoefficientLadder,
    to: usize,
    from: usize,
    family: Family,
) -> Result<Complex64> {
    ladder.cumulative_transmission(to, from, family)
}

/// Builds both coefficient families for `stack` at the frequency of `freq`.
pub fn build_ladder(stack: &Stack, freq: &FrequencySample) -> Result<CoefficientLadder> {
    let layers = stack.layers();
    if freq.n.len() != layers.len() {
        return Err(Error::InvalidArgument(
            "frequency sample was built for a different stack".into(),
        ));
    }
    let phase: Vec<Complex64> = layers
        .iter()
        .zip(&freq.k)
        .map(|(layer, k)| match layer.thickness {
            Some(d) => (Complex64::i() * k * d).exp(),
            None => Complex64::new(0.0, 0.0),
        })
        .collect();
    let coeffs = (0..stack.num_interfaces())
        .map(|i| fresnel_with_indices(&layers[i], freq.n[i], &layers[i + 1], freq.n[i + 1], i))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoefficientLadder {
        electric: family_ladder(stack, &coeffs, &phase, Family::Electric)?,
        magnetic: family_ladder(stack, &coeffs, &phase, Family::Magnetic)?,
        phase,
    })
}

fn check_pole(den: Complex64, layer: usize, lossless: bool, family: Family) -> Result<()> {
    if !den.is_finite() || den.norm() == 0.0 || (lossless && den.norm() < POLE_FLOOR) {
        return Err(Error::ResonancePole { layer, family });
    }
    Ok(())
}

fn family_ladder(
    stack: &Stack,
    coeffs: &[SingleInterfaceCoeffs],
    phase: &[Complex64],
    family: Family,
) -> Result<FamilyLadder> {
    let layers = stack.layers();
    let count = layers.len();
    let interfaces = coeffs.len();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let phase2: Vec<Complex64> = phase.iter().map(|p| p * p).collect();
    let lossless = |l: usize| layers[l].is_lossless();

    let (r, r_prime): (Vec<_>, Vec<_>) = coeffs.iter().map(|c| c.reflection(family)).unzip();
    let (t, t_prime): (Vec<_>, Vec<_>) = coeffs.iter().map(|c| c.transmission(family)).unzip();

    // Right-to-left sweep from the empty right lead.
    let mut refl_right = vec![zero; count];
    for i in (0..interfaces).rev() {
        let ahead = refl_right[i + 1] * phase2[i + 1];
        let den = one + r[i] * ahead;
        check_pole(den, i + 1, lossless(i + 1), family)?;
        refl_right[i] = (r[i] + ahead) / den;
    }
    // Left-to-right sweep from the empty left lead.
    let mut refl_left = vec![zero; count];
    for i in 0..interfaces {
        let behind = refl_left[i] * phase2[i];
        let den = one + r_prime[i] * behind;
        check_pole(den, i, lossless(i), family)?;
        refl_left[i + 1] = (r_prime[i] + behind) / den;
    }

    let mut nu = vec![one; count];
    for l in 0..count {
        if stack.is_lead(l) {
            continue;
        }
        let den = one - refl_left[l] * refl_right[l] * phase2[l];
        check_pole(den, l, lossless(l), family)?;
        nu[l] = one / den;
    }

    let trans_right = (0..interfaces)
        .map(|i| {
            let den = nu[i] * (one - refl_left[i] * r[i] * phase2[i]);
            check_pole(den, i, lossless(i), family)?;
            Ok(t[i] * nu[i + 1] / den)
        })
        .collect::<Result<Vec<_>>>()?;
    let trans_left = (0..interfaces)
        .map(|i| {
            let den = nu[i + 1] * (one - refl_right[i + 1] * r_prime[i] * phase2[i + 1]);
            check_pole(den, i + 1, lossless(i + 1), family)?;
            Ok(t_prime[i] * nu[i] / den)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(FamilyLadder {
        family,
        r,
        t,
        r_prime,
        t_prime,
        refl_right,
        refl_left,
        trans_right,
        trans_left,
        nu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PhysicalConstants;
    use approx::assert_relative_eq;

    const UM: f64 = 1e-6;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn slab_stack(eps: Complex64, mu: Complex64, d: f64) -> Stack {
        Stack::new(
            vec![
                Layer::vacuum_lead(0.0),
                Layer::slab(d, eps, mu, 0.0),
                Layer::vacuum_lead(0.0),
            ],
            0.0,
        )
        .unwrap()
    }

    fn ladder_for(stack: &Stack, ev: f64) -> (FrequencySample, CoefficientLadder) {
        let consts = PhysicalConstants::default();
        let f = FrequencySample::from_photon_energy(stack, ev, &consts).unwrap();
        let l = build_ladder(stack, &f).unwrap();
        (f, l)
    }

    #[test]
    fn fresnel_vacuum_to_dielectric() {
        let k = fresnel(&Layer::vacuum_lead(0.0), &Layer::lead(c(10.0, 0.0), c(1.0, 0.0), 0.0))
            .unwrap();
        assert!((k.r_e - c(-0.519_494, 0.0)).norm() < 1e-6);
        assert!((k.t_e - c(0.480_506, 0.0)).norm() < 1e-6);
        assert!((k.r_m - c(0.519_494, 0.0)).norm() < 1e-6);
        assert!((k.t_m - c(1.519_494, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn fresnel_matched_and_identical() {
        let v = Layer::vacuum_lead(0.0);
        let matched = Layer::lead(c(3.0, 0.4), c(3.0, 0.4), 0.0);
        let k = fresnel(&v, &matched).unwrap();
        assert!(k.r_e.norm() < 1e-15 && k.r_m.norm() < 1e-15);
        let same = Layer::lead(c(2.5, 0.3), c(1.2, 0.1), 0.0);
        let k = fresnel(&same, &same).unwrap();
        assert_eq!(k.r_e, c(0.0, 0.0));
        assert_eq!(k.t_m, c(1.0, 0.0));
    }

    #[test]
    fn single_interface_ladder_equals_fresnel() {
        let stack = Stack::new(
            vec![Layer::vacuum_lead(0.0), Layer::lead(c(10.0, 0.0), c(1.0, 0.0), 0.0)],
            0.0,
        )
        .unwrap();
        let (_, l) = ladder_for(&stack, 0.119);
        assert_eq!(l.electric.refl_right[0], l.electric.r[0]);
        assert!((l.electric.refl_right[0] - c(-0.519_494, 0.0)).norm() < 1e-6);
        assert_eq!(l.electric.refl_right[1], c(0.0, 0.0));
        assert_eq!(l.electric.refl_left[0], c(0.0, 0.0));
    }

    /// Independent reflectance oracle: direct summation of the multiply
    /// reflected partial waves inside the slab.
    fn airy_series(r12: Complex64, t12: Complex64, t21: Complex64, r21: Complex64, r23: Complex64, p2: Complex64, terms: usize) -> Complex64 {
        let mut total = r12;
        let mut wave = t12 * r23 * p2 * t21;
        for _ in 0..terms {
            total += wave;
            wave *= r21 * r23 * p2;
        }
        total
    }

    #[test]
    fn cavity_wall_reflectance() {
        let stack = slab_stack(c(10.0, 0.0), c(1.0, 0.0), 1.0 * UM);
        let (_, l) = ladder_for(&stack, 0.119);
        let reflectance = l.electric.refl_right[0].norm_sqr();
        assert!((reflectance - 0.64).abs() < 0.005, "{reflectance}");
        let e = &l.electric;
        let series = airy_series(e.r[0], e.t[0], e.t_prime[0], e.r_prime[0], e.r[1], l.phase[1] * l.phase[1], 200);
        assert!((series.norm_sqr() - 0.643).abs() < 5e-4, "{}", series.norm_sqr());
        assert_relative_eq!(series.norm_sqr(), reflectance, max_relative = 1e-12);
    }

    #[test]
    fn nu_identity_holds() {
        let stack = Stack::new(
            vec![
                Layer::lead(c(1.0, 0.01), c(1.0, 0.0), 0.0),
                Layer::slab(0.7 * UM, c(3.0, 0.2), c(1.1, 0.05), 0.0),
                Layer::slab(1.3 * UM, c(2.0, 0.0), c(1.0, 0.0), 0.0),
                Layer::slab(0.4 * UM, c(5.0, 0.5), c(1.3, 0.2), 0.0),
                Layer::lead(c(2.0, 0.1), c(1.0, 0.0), 0.0),
            ],
            0.0,
        )
        .unwrap();
        let (_, l) = ladder_for(&stack, 0.2);
        for f in Family::BOTH {
            let lad = l.family(f);
            for layer in 1..4 {
                let p2 = l.phase[layer] * l.phase[layer];
                let check = lad.nu[layer] * (1.0 - lad.refl_left[layer] * lad.refl_right[layer] * p2);
                assert!((check - 1.0).norm() < 1e-12);
            }
            // Transmission recursion agrees with the direct interface form
            // t / (1 - r' R e^{2ikd}) of the layer ahead.
            for i in 0..4 {
                let ahead = lad.refl_right[i + 1] * l.phase[i + 1] * l.phase[i + 1];
                let direct = lad.t[i] / (1.0 - lad.r_prime[i] * ahead);
                assert!((lad.trans_right[i] - direct).norm() < 1e-12 * direct.norm());
                let behind = lad.refl_left[i] * l.phase[i] * l.phase[i];
                let direct = lad.t_prime[i] / (1.0 - lad.r[i] * behind);
                assert!((lad.trans_left[i] - direct).norm() < 1e-12 * direct.norm());
            }
        }
    }

    #[test]
    fn cumulative_transmission_cases() {
        let vac = Stack::new(
            vec![
                Layer::vacuum_lead(0.0),
                Layer::slab(1.0 * UM, c(1.0, 0.0), c(1.0, 0.0), 0.0),
                Layer::slab(2.0 * UM, c(1.0, 0.0), c(1.0, 0.0), 0.0),
                Layer::vacuum_lead(0.0),
            ],
            0.0,
        )
        .unwrap();
        let (_, l) = ladder_for(&vac, 0.1);
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    // all-vacuum: only propagation phases of the intervening layers
                    let t = l.cumulative_transmission(a, b, Family::Electric).unwrap();
                    let (lo, hi) = if a > b { (b + 1, a) } else { (a + 1, b) };
                    let phase: Complex64 = (lo..hi).map(|q| l.phase[q]).product();
                    assert!((t - phase).norm() < 1e-14);
                }
            }
        }
        assert_eq!(
            l.cumulative_transmission(2, 1, Family::Magnetic).unwrap(),
            l.magnetic.trans_right[1]
        );
        assert_eq!(
            l.cumulative_transmission(1, 2, Family::Magnetic).unwrap(),
            l.magnetic.trans_left[1]
        );
        assert!(l.cumulative_transmission(1, 1, Family::Electric).is_err());
        assert!(l.cumulative_transmission(7, 1, Family::Electric).is_err());
    }

    #[test]
    fn lossy_slab_attenuates_transmission() {
        let stack = |loss| {
            Stack::new(
                vec![
                    Layer::vacuum_lead(0.0),
                    Layer::slab(1.0 * UM, c(2.0, loss), c(1.0, 0.0), 0.0),
                    Layer::vacuum_lead(0.0),
                ],
                0.0,
            )
            .unwrap()
        };
        let (_, lossless) = ladder_for(&stack(0.0), 0.15);
        let (_, lossy) = ladder_for(&stack(0.3), 0.15);
        let t0 = lossless.cumulative_transmission(2, 0, Family::Electric).unwrap();
        let t1 = lossy.cumulative_transmission(2, 0, Family::Electric).unwrap();
        assert!(t1.norm() < t0.norm());
    }

    #[test]
    fn lossless_two_port_conserves_energy() {
        let stack = Stack::new(
            vec![
                Layer::vacuum_lead(0.0),
                Layer::slab(0.8 * UM, c(6.0, 0.0), c(1.0, 0.0), 0.0),
                Layer::slab(1.7 * UM, c(2.0, 0.0), c(1.5, 0.0), 0.0),
                Layer::lead(c(2.25, 0.0), c(1.0, 0.0), 0.0),
            ],
            0.0,
        )
        .unwrap();
        let (f, l) = ladder_for(&stack, 0.13);
        // electric family: power ratio uses Re(n/mu) of the leads
        let e = &l.electric;
        let t_total = l.cumulative_transmission(3, 0, Family::Electric).unwrap();
        let ratio = (f.n[3] / stack.layers()[3].mu).re / (f.n[0] / stack.layers()[0].mu).re;
        let sum = e.refl_right[0].norm_sqr() + ratio * t_total.norm_sqr();
        assert!((sum - 1.0).abs() < 1e-9, "{sum}");
    }

    #[test]
    fn pole_guard() {
        assert!(check_pole(c(1e-16, 0.0), 1, true, Family::Electric).is_err());
        assert!(check_pole(c(1e-16, 0.0), 1, false, Family::Electric).is_ok());
        assert!(check_pole(c(0.0, 0.0), 1, false, Family::Electric).is_err());
        assert!(check_pole(c(f64::NAN, 0.0), 1, false, Family::Magnetic).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn layer_strategy() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
            (1.0f64..8.0, 0.0f64..0.5, 0.5f64..3.0, 0.0f64..0.5, 0.2f64..3.0)
        }

        proptest! {
            #[test]
            fn interface_relations(a in layer_strategy(), b in layer_strategy()) {
                let l1 = Layer::lead(c(a.0, a.1), c(a.2, a.3), 0.0);
                let l2 = Layer::lead(c(b.0, b.1), c(b.2, b.3), 0.0);
                let k = fresnel(&l1, &l2).unwrap();
                for f in Family::BOTH {
                    let (r, rp) = k.reflection(f);
                    let (t, tp) = k.transmission(f);
                    prop_assert!((t - (1.0 + r)).norm() <= 1e-12 * t.norm().max(1.0));
                    prop_assert!((tp - (1.0 + rp)).norm() <= 1e-12 * tp.norm().max(1.0));
                    prop_assert!((rp + r).norm() <= 1e-12 * r.norm().max(1.0));
                }
            }

            #[test]
            fn passive_reflectance_bounded(layers in proptest::collection::vec(layer_strategy(), 1..5), ev in 0.05f64..0.5) {
                let mut v = vec![Layer::vacuum_lead(0.0)];
                v.extend(layers.iter().map(|p| Layer::slab(p.4 * UM, c(p.0, p.1), c(p.2, p.3), 0.0)));
                v.push(Layer::vacuum_lead(0.0));
                let stack = Stack::new(v, 0.0).unwrap();
                let consts = PhysicalConstants::default();
                let f = FrequencySample::from_photon_energy(&stack, ev, &consts).unwrap();
                if let Ok(l) = build_ladder(&stack, &f) {
                    for fam in Family::BOTH {
                        prop_assert!(l.family(fam).refl_right[0].norm_sqr() <= 1.0 + 1e-10);
                    }
                }
            }

            #[test]
            fn duality_swaps_families(layers in proptest::collection::vec(layer_strategy(), 1..4), ev in 0.05f64..0.5) {
                let mut v = vec![Layer::lead(c(1.5, 0.1), c(1.0, 0.02), 0.0)];
                v.extend(layers.iter().map(|p| Layer::slab(p.4 * UM, c(p.0, p.1), c(p.2, p.3), 0.0)));
                v.push(Layer::lead(c(2.0, 0.0), c(1.2, 0.0), 0.0));
                let stack = Stack::new(v, 0.0).unwrap();
                let dual = stack.dual();
                let consts = PhysicalConstants::default();
                let f = FrequencySample::from_photon_energy(&stack, ev, &consts).unwrap();
                let fd = FrequencySample::from_photon_energy(&dual, ev, &consts).unwrap();
                let l = build_ladder(&stack, &f).unwrap();
                let ld = build_ladder(&dual, &fd).unwrap();
                prop_assert_eq!(&l.electric.refl_right, &ld.magnetic.refl_right);
                prop_assert_eq!(&l.magnetic.trans_left, &ld.electric.trans_left);
                prop_assert_eq!(&l.electric.nu, &ld.magnetic.nu);
            }
        }
    }
}
