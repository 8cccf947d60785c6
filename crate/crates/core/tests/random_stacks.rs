//! Identities that must hold for any passive lossy stack, sampled with
//! proptest over layer count, thickness, materials and probe positions.

use num_complex::Complex64;
use proptest::prelude::*;
use qfed::verify::{green_identity_residual, ifdos_zero_residual};
use qfed::{Family, FieldType, IntegrationOptions, Layer, PhysicalConstants, SpectralSolver, Stack};

const UM: f64 = 1e-6;

fn medium() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.5f64..6.0, 0.02f64..0.8, 0.6f64..2.5, 0.0f64..0.4)
}

prop_compose! {
    fn lossy_stack()(
        media in prop::collection::vec(medium(), 2..6),
        widths in prop::collection::vec(0.2f64..2.5, 4),
        temps in prop::collection::vec(0.0f64..800.0, 6),
    ) -> Stack {
        let n = media.len();
        let layers = media
            .iter()
            .enumerate()
            .map(|(i, &(er, ei, mr, mi))| {
                let (eps, mu) = (Complex64::new(er, ei), Complex64::new(mr, mi));
                if i == 0 || i == n - 1 {
                    Layer::lead(eps, mu, temps[i])
                } else {
                    Layer::slab(widths[i - 1] * UM, eps, mu, temps[i])
                }
            })
            .collect();
        Stack::new(layers, 0.0).unwrap()
    }
}

fn solver(stack: &Stack, ev: f64) -> SpectralSolver {
    let c = PhysicalConstants::default();
    SpectralSolver::new(stack, c.omega_from_ev(ev), &c, IntegrationOptions::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn green_identity_holds(stack in lossy_stack(), ev in 0.05f64..0.4, x in -3.0f64..8.0, xp in -3.0f64..8.0) {
        let sv = solver(&stack, ev);
        for fam in Family::BOTH {
            let r = green_identity_residual(&sv, x * UM, xp * UM, fam).unwrap();
            prop_assert!(r < 1e-6, "{fam}: {r}");
        }
    }

    #[test]
    fn ifdos_integrates_to_zero(stack in lossy_stack(), ev in 0.05f64..0.4, x in -3.0f64..8.0) {
        let r = ifdos_zero_residual(&solver(&stack, ev), x * UM).unwrap();
        prop_assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn photon_numbers_bounded_by_sources(stack in lossy_stack(), ev in 0.05f64..0.4, x in -3.0f64..8.0) {
        let sv = solver(&stack, ev);
        let eta = sv.occupations();
        let lo = eta.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = eta.iter().copied().fold(0.0, f64::max);
        let n = sv.photon_numbers(x * UM).unwrap();
        for j in FieldType::ALL {
            let v = n.get(j);
            prop_assert!(v >= lo * (1.0 - 1e-9) && v <= hi * (1.0 + 1e-9), "{j:?}: {v} not in [{lo}, {hi}]");
        }
    }

    #[test]
    fn routes_agree(stack in lossy_stack(), ev in 0.05f64..0.4, x in -3.0f64..8.0) {
        let sv = solver(&stack, ev);
        let im = sv.ldos(x * UM);
        let int = sv.ldos_integral(x * UM).unwrap();
        prop_assert!((im.rho_e - int.rho_e).abs() <= 1e-6 * im.rho_e);
        prop_assert!((im.rho_m - int.rho_m).abs() <= 1e-6 * im.rho_m);
    }
}
