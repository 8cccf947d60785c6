//! Evaluates a configured quantity over its (energy, position) grid.

use anyhow::{Context, Result};
use qfed::verify::{run_battery, BatterySpec, CheckReport};
use qfed::{IntegrationOptions, PhysicalConstants, SpectralBand, SpectralSolver, Stack};
use rayon::prelude::*;

use crate::config::{LdosRouteChoice, LdosUnits, Quantity, RunConfig};
use crate::table::{Cell, Meta, ResultTable};

const UM: f64 = 1e-6;

/// A finished sweep and the number of identity checks that ran and failed.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub table: ResultTable,
    pub failed_checks: usize,
}

struct Plan {
    stack: Stack,
    energies: Vec<f64>,
    positions: Vec<f64>,
    sources: Vec<f64>,
    consts: PhysicalConstants,
    options: IntegrationOptions,
    /// Divisor applied to density-of-states values.
    dos_scale: f64,
    dos_unit: &'static str,
}

impl Plan {
    fn new(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let consts = PhysicalConstants::default();
        let (dos_scale, dos_unit) = match cfg.options.ldos_units {
            LdosUnits::Plot => (qfed::ldos_unit(&consts), "2/(pi c S)"),
            LdosUnits::Si => (1.0, "s/m^3"),
        };
        Ok(Self {
            stack: cfg.stack()?,
            energies: cfg.energies_ev()?,
            positions: cfg.positions_m()?,
            sources: if matches!(cfg.quantity, Quantity::Nldos | Quantity::Ifdos) {
                cfg.sources_m()?
            } else {
                Vec::new()
            },
            consts,
            options: cfg.options.integration(),
            dos_scale,
            dos_unit,
        })
    }

    fn solver(&self, ev: f64) -> Result<SpectralSolver> {
        SpectralSolver::new(&self.stack, self.consts.omega_from_ev(ev), &self.consts, self.options)
            .with_context(|| format!("at photon energy {ev} eV"))
    }

    /// Rows for every `(energy, x)` pair in energy-major order.
    fn over_grid<F>(&self, row: F) -> Result<Vec<Vec<Cell>>>
    where
        F: Fn(&SpectralSolver, f64, f64) -> Result<Vec<Vec<Cell>>> + Sync,
    {
        let blocks = self
            .energies
            .par_iter()
            .map(|&ev| {
                let solver = self.solver(ev)?;
                let rows = self
                    .positions
                    .par_iter()
                    .map(|&x| row(&solver, ev, x).with_context(|| format!("at x = {} um, photon energy {ev} eV", x / UM)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(rows.into_iter().flatten().collect::<Vec<_>>())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(blocks.into_iter().flatten().collect())
    }
}

fn lead(ev: f64, x: f64) -> Vec<Cell> {
    vec![ev.into(), (x / UM).into()]
}

fn columns<'a>(head: &[(&'a str, &'a str)], tail: &[(&'a str, &'a str)]) -> Vec<(&'a str, &'a str)> {
    head.iter().chain(tail).copied().collect()
}

fn report_row(ev: f64, r: &CheckReport) -> Vec<Cell> {
    vec![
        ev.into(),
        r.name.clone().into(),
        r.residual.into(),
        r.tolerance.into(),
        r.passed.into(),
        r.ran.into(),
        r.context.clone().into(),
    ]
}

pub const REPORT_COLUMNS: [(&str, &str); 7] = [
    ("energy_eV", "eV"),
    ("check", ""),
    ("residual", "1"),
    ("tolerance", "1"),
    ("passed", ""),
    ("ran", ""),
    ("context", ""),
];

/// Table of check reports; `energy_eV` is the photon energy they ran at.
pub fn report_table(meta: Meta, blocks: &[(f64, Vec<CheckReport>)]) -> Result<SweepOutput> {
    let mut table = ResultTable::new(meta, &REPORT_COLUMNS);
    let mut failed_checks = 0;
    for (ev, reports) in blocks {
        for r in reports {
            failed_checks += usize::from(r.failed());
            table.push(report_row(*ev, r))?;
        }
    }
    Ok(SweepOutput { table, failed_checks })
}

/// Runs the sweep described by `cfg`.
pub fn run_sweep(cfg: &RunConfig) -> Result<SweepOutput> {
    let plan = Plan::new(cfg)?;
    let meta = Meta::for_config(cfg)?;
    let grid = [("energy_eV", "eV"), ("x_um", "um")];
    let u = plan.dos_unit;
    let per_m = match cfg.options.ldos_units {
        LdosUnits::Plot => "2/(pi c S)/m",
        LdosUnits::Si => "s/m^4",
    };
    let s = plan.dos_scale;

    let (cols, rows) = match cfg.quantity {
        Quantity::Ldos => {
            let route = cfg.options.ldos_route;
            let rows = plan.over_grid(|sv, ev, x| {
                let l = match route {
                    LdosRouteChoice::ImaginaryPart => sv.ldos(x),
                    LdosRouteChoice::Integral => sv.ldos_integral(x)?,
                };
                let mut r = lead(ev, x);
                r.extend([l.rho_e / s, l.rho_m / s, l.rho_tot / s].map(Cell::from));
                Ok(vec![r])
            })?;
            (columns(&grid, &[("rho_e", u), ("rho_m", u), ("rho_tot", u)]), rows)
        }
        Quantity::Nldos => {
            let sources = &plan.sources;
            let rows = plan.over_grid(|sv, ev, x| {
                Ok(sources
                    .iter()
                    .map(|&xp| {
                        let n = sv.nldos(x, xp);
                        let mut r = lead(ev, x);
                        r.push((xp / UM).into());
                        r.extend(
                            [n.e_from_e, n.e_from_m, n.m_from_e, n.m_from_m, n.tot_from_e, n.tot_from_m]
                                .map(|v| Cell::from(v / s)),
                        );
                        r
                    })
                    .collect())
            })?;
            let cols = columns(
                &grid,
                &[
                    ("xprime_um", "um"),
                    ("e_from_e", per_m),
                    ("e_from_m", per_m),
                    ("m_from_e", per_m),
                    ("m_from_m", per_m),
                    ("tot_from_e", per_m),
                    ("tot_from_m", per_m),
                ],
            );
            (cols, rows)
        }
        Quantity::Ifdos => {
            let sources = &plan.sources;
            let rows = plan.over_grid(|sv, ev, x| {
                Ok(sources
                    .iter()
                    .map(|&xp| {
                        let f = sv.ifdos(x, xp);
                        let mut r = lead(ev, x);
                        r.push((xp / UM).into());
                        r.extend([f.value, f.e_part, f.m_part].map(|v| Cell::from(v / s)));
                        r
                    })
                    .collect())
            })?;
            let cols = columns(&grid, &[("xprime_um", "um"), ("ifdos", per_m), ("e_part", per_m), ("m_part", per_m)]);
            (cols, rows)
        }
        Quantity::PhotonNumber => {
            let rows = plan.over_grid(|sv, ev, x| {
                let n = sv.photon_numbers(x)?;
                let mut r = lead(ev, x);
                r.extend([n.n_e, n.n_m, n.n_tot].map(Cell::from));
                Ok(vec![r])
            })?;
            (columns(&grid, &[("n_e", "1"), ("n_m", "1"), ("n_tot", "1")]), rows)
        }
        Quantity::Fluctuations => {
            let rows = plan.over_grid(|sv, ev, x| {
                let f = sv.fluctuations(x)?;
                let mut r = lead(ev, x);
                r.extend([f.e_sq, f.h_sq, f.u].map(Cell::from));
                Ok(vec![r])
            })?;
            let cols = columns(
                &grid,
                &[("e_sq", "V^2 s/m^2"), ("h_sq", "A^2 s/m^2"), ("u", "J s/m^3")],
            );
            (cols, rows)
        }
        Quantity::Poynting => {
            let rows = plan.over_grid(|sv, ev, x| {
                let mut r = lead(ev, x);
                r.push(sv.poynting(x)?.into());
                Ok(vec![r])
            })?;
            (columns(&grid, &[("s", "J/m^2")]), rows)
        }
        Quantity::NetEmission => {
            let rows = plan.over_grid(|sv, ev, x| {
                let mut r = lead(ev, x);
                r.push(sv.net_emission(x)?.into());
                Ok(vec![r])
            })?;
            (columns(&grid, &[("q", "J/m^3")]), rows)
        }
        Quantity::SteadyTemperature => {
            let st = cfg.steady.as_ref().context("missing [steady] section")?;
            let band = SpectralBand::from_ev(st.band_min_ev, st.band_max_ev, &plan.consts);
            let t = qfed::steady_state_temperature(&plan.stack, st.probe_layer, band, &plan.consts, plan.options)
                .with_context(|| format!("steady state of layer {}", st.probe_layer))?;
            let row = vec![
                (st.probe_layer as f64).into(),
                st.band_min_ev.into(),
                st.band_max_ev.into(),
                t.into(),
            ];
            let cols = vec![("probe_layer", ""), ("band_min_eV", "eV"), ("band_max_eV", "eV"), ("T", "K")];
            (cols, vec![row])
        }
        Quantity::Verify => {
            let spec = BatterySpec::default();
            let blocks = plan
                .energies
                .iter()
                .map(|&ev| {
                    let omega = plan.consts.omega_from_ev(ev);
                    run_battery("config", &plan.stack, omega, &plan.consts, plan.options, &spec)
                        .map(|r| (ev, r))
                        .with_context(|| format!("identity checks at photon energy {ev} eV"))
                })
                .collect::<Result<Vec<_>>>()?;
            return report_table(meta, &blocks);
        }
    };

    let mut table = ResultTable::new(meta, &cols);
    for r in rows {
        table.push(r)?;
    }
    Ok(SweepOutput { table, failed_checks: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{cavity_config, GridSpec};
    use qfed::fixtures::Emitter;

    fn number(c: &Cell) -> f64 {
        match c {
            Cell::Number(v) => *v,
            other => panic!("not a number: {other:?}"),
        }
    }

    #[test]
    fn cavity_ldos_columns_and_order() {
        let mut cfg = cavity_config(Emitter::Empty, Quantity::Ldos);
        cfg.positions = GridSpec {
            list_um: Some(vec![3.0, 6.0, 9.0]),
            ..Default::default()
        };
        let out = run_sweep(&cfg).unwrap();
        let t = &out.table;
        assert_eq!(t.columns, ["energy_eV", "x_um", "rho_e", "rho_m", "rho_tot"]);
        assert_eq!(t.rows.len(), 3);
        let xs: Vec<f64> = t.rows.iter().map(|r| number(&r[1])).collect();
        assert_eq!(xs, [3.0, 6.0, 9.0]);
        // electric node, magnetic antinode at the centre
        let centre = &t.rows[1];
        assert!(number(&centre[2]) < number(&centre[3]));
        for r in &t.rows {
            let (e, m, tot) = (number(&r[2]), number(&r[3]), number(&r[4]));
            // vacuum gap: the total density is the mean of the two
            assert!((0.5 * (e + m) - tot).abs() <= 1e-12 * tot);
        }
    }

    #[test]
    fn units_switch_scales_values() {
        let mut cfg = cavity_config(Emitter::Empty, Quantity::Ldos);
        cfg.positions = GridSpec {
            list_um: Some(vec![-2.0]),
            ..Default::default()
        };
        let plot = run_sweep(&cfg).unwrap().table;
        cfg.options.ldos_units = LdosUnits::Si;
        let si = run_sweep(&cfg).unwrap().table;
        let unit = qfed::ldos_unit(&PhysicalConstants::default());
        let (a, b) = (number(&plot.rows[0][4]), number(&si.rows[0][4]));
        assert!((a * unit - b).abs() <= 1e-14 * b);
    }

    #[test]
    fn routes_agree_through_the_sweep() {
        let mut cfg = cavity_config(Emitter::Magnetic, Quantity::Ldos);
        cfg.positions = GridSpec {
            list_um: Some(vec![2.0, 6.0]),
            ..Default::default()
        };
        let a = run_sweep(&cfg).unwrap().table;
        cfg.options.ldos_route = LdosRouteChoice::Integral;
        let b = run_sweep(&cfg).unwrap().table;
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            for k in 2..5 {
                let (u, v) = (number(&ra[k]), number(&rb[k]));
                assert!((u - v).abs() <= 1e-6 * u, "{u} vs {v}");
            }
        }
    }

    #[test]
    fn empty_grid_gives_header_only() {
        let mut cfg = cavity_config(Emitter::Magnetic, Quantity::PhotonNumber);
        cfg.positions = GridSpec {
            list_um: Some(vec![]),
            ..Default::default()
        };
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.table.columns.len(), 5);
        assert!(out.table.rows.is_empty());
    }

    #[test]
    fn two_point_kernels_expand_sources() {
        let mut cfg = cavity_config(Emitter::Electric, Quantity::Ifdos);
        cfg.positions = GridSpec {
            list_um: Some(vec![6.0, 14.0]),
            ..Default::default()
        };
        cfg.sources = Some(GridSpec {
            min_um: Some(5.5),
            max_um: Some(6.5),
            count: Some(3),
            ..Default::default()
        });
        let t = run_sweep(&cfg).unwrap().table;
        assert_eq!(t.rows.len(), 6);
        assert_eq!(number(&t.rows[3][1]), 14.0);
        assert_eq!(number(&t.rows[3][2]), 5.5);
    }

    #[test]
    fn lead_probe_error_names_the_layer() {
        let mut cfg = cavity_config(Emitter::Magnetic, Quantity::SteadyTemperature);
        cfg.steady = Some(crate::config::SteadySpec {
            probe_layer: 0,
            band_min_ev: 0.1,
            band_max_ev: 0.2,
        });
        let err = run_sweep(&cfg).unwrap_err();
        assert!(format!("{err:#}").contains("layer 0"), "{err:#}");
    }

    #[test]
    fn failed_checks_are_counted_but_skipped_ones_are_not() {
        let meta = Meta::new("verify", "", PhysicalConstants::default());
        let reports = vec![
            CheckReport::new("ok", 1e-12, 1e-8, ""),
            CheckReport::new("bad", 1e-3, 1e-8, ""),
            CheckReport::not_run("skipped", 1e-8, "non-uniform temperature"),
        ];
        let out = report_table(meta, &[(0.1, reports)]).unwrap();
        assert_eq!(out.failed_checks, 1);
        assert_eq!(out.table.rows.len(), 3);
        assert_eq!(out.table.rows[2][5], Cell::Flag(false));
    }
}
