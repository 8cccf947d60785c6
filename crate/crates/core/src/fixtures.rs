//! Canonical stacks: a homogeneous lossy medium, the mirror cavity with a
//! thin emitter at its centre, and a seeded random lossy stack.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Layer, Stack};

const UM: f64 = 1e-6;

/// Photon energy at which the cavity walls reflect 64 % of the power.
pub const CAVITY_PHOTON_ENERGY_EV: f64 = 0.119;

pub const CAVITY_WALL_EPSILON: f64 = 10.0;
pub const CAVITY_WALL_THICKNESS: f64 = 1.0 * UM;
pub const CAVITY_GAP: f64 = 10.0 * UM;
pub const CAVITY_EMITTER_THICKNESS: f64 = 1.0 * UM;
/// Position of the cavity centre (the left wall starts at `x = 0`).
pub const CAVITY_CENTER: f64 = CAVITY_WALL_THICKNESS + 0.5 * CAVITY_GAP;
/// A detector position in the right lead, outside the cavity.
pub const CAVITY_DETECTOR: f64 = 2.0 * CAVITY_WALL_THICKNESS + CAVITY_GAP + 2.0 * UM;
pub const EMITTER_LOSS: Complex64 = Complex64::new(1.1, 0.1);

/// Default seed of the random fixture.
pub const RANDOM_SEED: u64 = 0x5eed_f1e1d;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Emitter {
    /// Emitter layer left as vacuum.
    Empty,
    /// `eps = 1.1 + 0.1i`, `mu = 1`.
    Electric,
    /// `eps = 1`, `mu = 1.1 + 0.1i`.
    Magnetic,
}

impl Emitter {
    fn media(self) -> (Complex64, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        match self {
            Emitter::Empty => (one, one),
            Emitter::Electric => (EMITTER_LOSS, one),
            Emitter::Magnetic => (one, EMITTER_LOSS),
        }
    }
}

/// A single cavity wall in vacuum, occupying `[0, 1 µm]`.
pub fn cavity_wall() -> Stack {
    Stack::new(
        vec![
            Layer::vacuum_lead(0.0),
            Layer::slab(
                CAVITY_WALL_THICKNESS,
                Complex64::new(CAVITY_WALL_EPSILON, 0.0),
                Complex64::new(1.0, 0.0),
                0.0,
            ),
            Layer::vacuum_lead(0.0),
        ],
        0.0,
    )
    .expect("valid wall")
}

/// Two walls around a vacuum gap with a centred emitter layer (layer 3) at
/// `emitter_temperature`; every other layer is at 0 K.
pub fn cavity(emitter: Emitter, emitter_temperature: f64) -> Stack {
    let one = Complex64::new(1.0, 0.0);
    let wall = Layer::slab(
        CAVITY_WALL_THICKNESS,
        Complex64::new(CAVITY_WALL_EPSILON, 0.0),
        one,
        0.0,
    );
    let half_gap = 0.5 * (CAVITY_GAP - CAVITY_EMITTER_THICKNESS);
    let (eps, mu) = emitter.media();
    Stack::new(
        vec![
            Layer::vacuum_lead(0.0),
            wall,
            Layer::slab(half_gap, one, one, 0.0),
            Layer::slab(CAVITY_EMITTER_THICKNESS, eps, mu, emitter_temperature),
            Layer::slab(half_gap, one, one, 0.0),
            wall,
            Layer::vacuum_lead(0.0),
        ],
        0.0,
    )
    .expect("valid cavity")
}

/// Index of the emitter layer in [`cavity`].
pub const CAVITY_EMITTER_LAYER: usize = 3;

/// Interior of the cavity gap, wall to wall.
pub fn cavity_gap() -> (f64, f64) {
    (CAVITY_WALL_THICKNESS, CAVITY_WALL_THICKNESS + CAVITY_GAP)
}

pub fn homogeneous_lossy(temperature: f64) -> Stack {
    Stack::homogeneous(Complex64::new(2.2, 0.3), Complex64::new(1.4, 0.15), temperature).expect("valid medium")
}

/// Five layers (two leads, three slabs), every one lossy in both channels,
/// with temperatures drawn from [0, 600] K.
pub fn random_lossy(seed: u64) -> Stack {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let medium = |rng: &mut ChaCha8Rng| {
        let eps = Complex64::new(rng.gen_range(1.0..6.0), rng.gen_range(0.05..0.6));
        let mu = Complex64::new(rng.gen_range(0.8..2.0), rng.gen_range(0.02..0.3));
        let t = rng.gen_range(0.0..600.0);
        (eps, mu, t)
    };
    let mut layers = Vec::with_capacity(5);
    let (e, m, t) = medium(&mut rng);
    layers.push(Layer::lead(e, m, t));
    for _ in 0..3 {
        let d = rng.gen_range(0.3..2.0) * UM;
        let (e, m, t) = medium(&mut rng);
        layers.push(Layer::slab(d, e, m, t));
    }
    let (e, m, t) = medium(&mut rng);
    layers.push(Layer::lead(e, m, t));
    Stack::new(layers, 0.0).expect("valid random stack")
}

/// Span covering all interfaces plus `margin` on each side (±`margin` for
/// a homogeneous stack).
pub fn sampling_window(stack: &Stack, margin: f64) -> (f64, f64) {
    match (stack.interfaces().first(), stack.interfaces().last()) {
        (Some(&a), Some(&b)) => (a - margin, b + margin),
        _ => (-margin, margin),
    }
}

/// `count` position pairs drawn uniformly from `window`.
pub fn random_pairs(seed: u64, count: usize, window: (f64, f64)) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (rng.gen_range(window.0..window.1), rng.gen_range(window.0..window.1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cavity_geometry() {
        let s = cavity(Emitter::Magnetic, 300.0);
        let expected = [0.0, 1.0, 5.5, 6.5, 11.0, 12.0];
        for (x, e) in s.interfaces().iter().zip(expected) {
            assert!((x / UM - e).abs() < 1e-12);
        }
        assert_eq!(s.locate(CAVITY_CENTER), CAVITY_EMITTER_LAYER);
        assert_eq!(s.layers()[CAVITY_EMITTER_LAYER].mu, EMITTER_LOSS);
        assert_eq!(s.locate(CAVITY_DETECTOR), 6);
        assert!(cavity(Emitter::Empty, 300.0).layers().iter().all(Layer::is_lossless));
    }

    #[test]
    fn random_fixture_is_reproducible_and_lossy() {
        let a = random_lossy(RANDOM_SEED);
        assert_eq!(a, random_lossy(RANDOM_SEED));
        assert_ne!(a, random_lossy(RANDOM_SEED + 1));
        assert_eq!(a.num_layers(), 5);
        assert!(a.layers().iter().all(|l| l.epsilon.im > 0.0 && l.mu.im > 0.0));
        let pairs = random_pairs(7, 10, sampling_window(&a, 1e-6));
        assert_eq!(pairs, random_pairs(7, 10, sampling_window(&a, 1e-6)));
    }
}
