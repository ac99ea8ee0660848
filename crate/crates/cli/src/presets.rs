//! Bundled configs, one set per figure id.

use crate::config::{
    Axis, BellSign, Chain, CompareConfig, CouplingsConfig, Experiment, ExperimentConfig, FluxQubitConfig,
    Grid, Initial, LzConfig, PumpConfig, QuenchConfig, SpectrumConfig, Sweep, TrimerConfig,
};
use topochain::effective::LZPath;
use topochain::fluxcircuit::FluxQubitSpec;
use topochain::{DisorderSpec, ModelKind, Param, Schedule};

/// A figure id with a one-line description.
#[derive(Debug, Clone, Copy)]
pub struct Figure {
    pub id: &'static str,
    pub description: &'static str,
}

pub const FIGURES: [Figure; 11] = [
    Figure { id: "pumping", description: "edge-state pumping on the Rice-Mele chain, T=100, 14 sites" },
    Figure { id: "rm", description: "instantaneous spectrum along the pumping cycle" },
    Figure { id: "lz1", description: "two-level paths around and through the critical point" },
    Figure { id: "lz2", description: "full chain against the two-level model on the topological window" },
    Figure { id: "optimization", description: "spectrum and three-cycle pumping for u=0.25 sin, a=0.5(1-cos)" },
    Figure { id: "trimer", description: "instantaneous spectrum of the trimer transfer schedule" },
    Figure { id: "ssh3edges", description: "static trimer chain a=b=1, c=2 with four in-gap states" },
    Figure { id: "belltransfer", description: "Bell-state transfer on 21 sites, both signs, T=1000" },
    Figure { id: "energylevel", description: "SSH spectrum versus a in [0, 2] at b=1, 14 sites" },
    Figure { id: "trivial", description: "quenches of the disordered topological and uniform chains" },
    Figure { id: "circuit", description: "flux-qubit levels, couplings and gap tunability" },
];

pub fn figure_ids() -> Vec<&'static str> {
    FIGURES.iter().map(|f| f.id).collect()
}

const SEED: u64 = 42;

fn ssh(a: f64, b: f64) -> Chain {
    Chain::constant(ModelKind::Ssh, 7, &[(Param::A, a), (Param::B, b)])
}

fn cfg(e: Experiment) -> ExperimentConfig {
    ExperimentConfig::new(e)
}

fn pump_config(schedule: Schedule) -> PumpConfig {
    PumpConfig {
        chain: Chain::from_schedule(ModelKind::RiceMele, 7, &schedule),
        initial: Some(Initial { sites: vec![1], amplitudes: None }),
        records_per_cycle: Some(200),
        integrator: None,
    }
}

fn spectrum_along(kind: ModelKind, cells: usize, schedule: Schedule) -> SpectrumConfig {
    SpectrumConfig { chain: Chain::from_schedule(kind, cells, &schedule), n_times: Some(201), sweep: None }
}

fn lz_path(path: LZPath) -> ExperimentConfig {
    cfg(Experiment::Lz(LzConfig { path: Some(path), initial: None, compare: None, n_records: Some(401), integrator: None }))
}

fn quench_config(a: f64, b: f64) -> ExperimentConfig {
    cfg(Experiment::Quench(QuenchConfig {
        chain: ssh(a, b),
        flip_site: Some(1),
        t1: 100.0,
        n_records: Some(1001),
        disorder: Some(DisorderSpec::everywhere(0.01, SEED)),
        integrator: None,
    }))
    .with_seed(SEED)
}

/// Named configs making up a figure, or `None` for an unknown id.
pub fn figure(id: &str) -> Option<Vec<(&'static str, ExperimentConfig)>> {
    let sets = match id {
        "pumping" => vec![("pump", cfg(Experiment::Pump(pump_config(Schedule::standard_pump(100.0, 1)))))],
        "rm" => vec![(
            "spectrum",
            cfg(Experiment::Spectrum(spectrum_along(ModelKind::RiceMele, 7, Schedule::standard_pump(100.0, 1)))),
        )],
        "lz1" => vec![
            ("path_a", lz_path(LZPath::arc(1.0, 200.0))),
            ("path_b", lz_path(LZPath::line(1.0, 0.0, 200.0))),
            ("path_c", lz_path(LZPath::line(1.0, std::f64::consts::FRAC_PI_4, 200.0))),
        ],
        "lz2" => vec![(
            "reduction",
            cfg(Experiment::Lz(LzConfig {
                path: None,
                initial: None,
                compare: Some(CompareConfig {
                    chain: Chain::from_schedule(ModelKind::RiceMele, 7, &Schedule::optimized_pump(100.0, 1)),
                    window: [0.0, 10.0],
                }),
                n_records: Some(201),
                integrator: None,
            })),
        )],
        "optimization" => vec![
            (
                "spectrum",
                cfg(Experiment::Spectrum(spectrum_along(ModelKind::RiceMele, 7, Schedule::optimized_pump(100.0, 1)))),
            ),
            ("pump", cfg(Experiment::Pump(pump_config(Schedule::optimized_pump(100.0, 3))))),
        ],
        "trimer" => vec![(
            "spectrum",
            cfg(Experiment::Spectrum(spectrum_along(ModelKind::Trimer, 7, Schedule::trimer_transfer(1000.0, 1)))),
        )],
        "ssh3edges" => vec![(
            "spectrum",
            cfg(Experiment::Spectrum(SpectrumConfig {
                chain: Chain::constant(
                    ModelKind::Trimer,
                    8,
                    &[(Param::A, 1.0), (Param::B, 1.0), (Param::C, 2.0), (Param::U, 0.0), (Param::V, 0.0), (Param::W, 0.0)],
                ),
                n_times: None,
                sweep: None,
            })),
        )],
        "belltransfer" => vec![(
            "transfer",
            cfg(Experiment::Trimer(TrimerConfig {
                cells: Some(7),
                period: Some(1000.0),
                cycles: Some(3),
                signs: Some(vec![BellSign::Plus, BellSign::Minus]),
                records_per_cycle: Some(200),
                integrator: None,
            })),
        )],
        "energylevel" => vec![(
            "spectrum",
            cfg(Experiment::Spectrum(SpectrumConfig {
                chain: ssh(0.0, 1.0),
                n_times: None,
                sweep: Some(Sweep { param: Param::A, start: 0.0, stop: 2.0, points: 201 }),
            })),
        )],
        "trivial" => vec![("topological", quench_config(0.1, 1.0)), ("uniform", quench_config(1.0, 1.0))],
        "circuit" => vec![(
            "sweep",
            cfg(Experiment::FluxQubit(FluxQubitConfig {
                circuit: Some(FluxQubitSpec::default()),
                f_alpha: 0.1,
                f_eps_range: [-1.0, 1.0],
                sweep_points: 21,
                levels: 4,
                gap_sweep: Some(Grid::new(0.0, 0.6, 13)),
            })),
        )],
        _ => return None,
    };
    Some(sets)
}

/// Config used by a bare subcommand without `--config`.
pub fn default_config(command: crate::config::Command) -> ExperimentConfig {
    use crate::config::Command;
    let first = |id: &str| figure(id).expect("bundled figure").remove(0).1;
    match command {
        Command::Spectrum => cfg(Experiment::Spectrum(SpectrumConfig { chain: ssh(0.1, 1.0), n_times: None, sweep: None })),
        Command::Pump => first("pumping"),
        Command::Quench => first("trivial"),
        Command::Lz => first("lz1"),
        Command::Trimer => first("belltransfer"),
        Command::Couplings => cfg(Experiment::Couplings(CouplingsConfig {
            bare: 1.0,
            alpha_1: Axis::Grid(Grid::new(0.0, 2.0, 21)),
            alpha_2: Axis::Grid(Grid::new(0.0, 2.0, 21)),
        })),
        Command::FluxQubit => first("circuit"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_id_has_configs() {
        for id in figure_ids() {
            assert!(!figure(id).unwrap().is_empty(), "{id}");
        }
        assert!(figure("nope").is_none());
    }
}
