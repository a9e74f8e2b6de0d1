use antitree_core::engine::{lyapunov_estimate, run_ensemble};
use antitree_core::geometry::{zd_brute_force, zd_points_with_zeros_shifted, zd_shell_counts};
use antitree_core::harmonic::mc_moments;
use antitree_core::spectral::{classify_law, density_estimate, essential_spectrum, rho_free_theory, DensityOptions};
use antitree_core::{GrowthLaw, IntervalSet, PotentialDistribution, StreamKey};
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig};
use crate::output::{Field, Table};
use crate::CliError;

pub const LYAPUNOV_HEADER: [&str; 9] =
    ["E", "lambda", "d", "C", "N", "trials", "slope_mean", "slope_stderr", "gamma_theory"];
pub const DENSITY_HEADER: [&str; 3] = ["E", "rho_hat", "rho_free_theory"];
pub const PHASE_HEADER: [&str; 8] = ["E", "lambda", "d", "C", "verdict", "gamma", "decay_kind", "decay_constant"];
pub const HARMONIC_HEADER: [&str; 11] =
    ["n", "m1", "m1_stderr", "m1_bound", "m2", "m2_stderr", "m2_lo", "m2_hi", "m3", "exact_m1", "exact_m2"];
pub const GEOMETRY_HEADER: [&str; 7] = ["d", "n", "k", "formula", "brute_force", "shifted_formula", "shifted_mismatch"];
pub const SPECTRUM_HEADER: [&str; 6] = ["lambda", "set", "lo", "hi", "lo_closed", "hi_closed"];

pub fn header(e: Experiment) -> &'static [&'static str] {
    match e {
        Experiment::PhaseDiagram => &PHASE_HEADER,
        Experiment::Lyapunov => &LYAPUNOV_HEADER,
        Experiment::Density => &DENSITY_HEADER,
        Experiment::HarmonicCheck => &HARMONIC_HEADER,
        Experiment::GeometryAudit => &GEOMETRY_HEADER,
        Experiment::SpectrumSets => &SPECTRUM_HEADER,
    }
}

/// Grid coordinates of one unit of work and how it ended.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub coords: Vec<(&'static str, f64)>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub cells: Vec<Cell>,
}

impl Outcome {
    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.error.is_some()).count()
    }
}

type CellResult = Result<Vec<Vec<Field>>, String>;

fn collect(header: &[&'static str], results: Vec<(Vec<(&'static str, f64)>, CellResult)>) -> Outcome {
    let mut table = Table::new(header);
    let mut cells = Vec::with_capacity(results.len());
    for (coords, r) in results {
        match r {
            Ok(rows) => {
                rows.into_iter().for_each(|row| table.push(row));
                cells.push(Cell { coords, error: None });
            }
            Err(e) => cells.push(Cell { coords, error: Some(e) }),
        }
    }
    Outcome { table, cells }
}

/// Resolved inputs shared by the experiment drivers.
pub struct Setup {
    pub dist: Option<PotentialDistribution>,
    pub law: GrowthLaw,
    pub energies: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub key: StreamKey,
}

impl Setup {
    pub fn new(config: &ExperimentConfig, base: &std::path::Path) -> Result<Self, CliError> {
        Ok(Self {
            dist: config.distribution.as_ref().map(|d| d.build()).transpose()?,
            law: config.growth.build(base)?,
            energies: config.energy.points(),
            lambdas: config.lambda.points(),
            key: StreamKey::new(config.seed),
        })
    }

    fn dist(&self) -> &PotentialDistribution {
        self.dist.as_ref().expect("validated: distribution present")
    }

    fn grid(&self) -> Vec<(u64, u64, f64, f64)> {
        let mut out = Vec::with_capacity(self.energies.len() * self.lambdas.len());
        for (il, &l) in self.lambdas.iter().enumerate() {
            for (ie, &e) in self.energies.iter().enumerate() {
                out.push((ie as u64, il as u64, e, l));
            }
        }
        out
    }
}

pub fn run(experiment: Experiment, config: &ExperimentConfig, setup: &Setup) -> Outcome {
    match experiment {
        Experiment::PhaseDiagram => phase_diagram(setup),
        Experiment::Lyapunov => lyapunov(config, setup),
        Experiment::Density => density(config, setup),
        Experiment::HarmonicCheck => harmonic_check(config, setup),
        Experiment::GeometryAudit => geometry_audit(config),
        Experiment::SpectrumSets => spectrum_sets(setup),
    }
}

fn phase_diagram(setup: &Setup) -> Outcome {
    let dist = setup.dist();
    let results = setup
        .grid()
        .into_par_iter()
        .map(|(_, _, e, l)| {
            let c = classify_law(dist, l, &setup.law, e);
            let row = vec![
                Field::Float(e),
                Field::Float(l),
                Field::Float(c.d),
                Field::Float(c.c),
                Field::Text(c.verdict.name().into()),
                Field::opt(c.gamma),
                Field::Text(c.decay_kind.name().into()),
                Field::opt(c.decay_constant),
            ];
            (vec![("E", e), ("lambda", l)], Ok(vec![row]))
        })
        .collect();
    collect(&PHASE_HEADER, results)
}

fn lyapunov(config: &ExperimentConfig, setup: &Setup) -> Outcome {
    let dist = setup.dist();
    let results = setup
        .grid()
        .into_par_iter()
        .map(|(ie, il, e, l)| {
            let key = setup.key.path(&[ie, il]);
            let r = (|| {
                let gamma = dist.effective_quantities(e, l)?.gamma;
                let records = run_ensemble(dist, &setup.law, e, l, config.n, key, config.trials, &[])?;
                let (mean, se) = lyapunov_estimate(&records)?;
                let c = classify_law(dist, l, &setup.law, e);
                Ok::<_, antitree_core::Error>(vec![vec![
                    Field::Float(e),
                    Field::Float(l),
                    Field::Float(c.d),
                    Field::Float(c.c),
                    Field::Int(config.n as u128),
                    Field::Int(config.trials as u128),
                    Field::Float(mean),
                    Field::Float(se),
                    Field::Float(gamma),
                ]])
            })();
            (vec![("E", e), ("lambda", l)], r.map_err(|e| e.to_string()))
        })
        .collect();
    collect(&LYAPUNOV_HEADER, results)
}

fn density(config: &ExperimentConfig, setup: &Setup) -> Outcome {
    let dist = setup.dist();
    let lambda = setup.lambdas[0];
    let opts = DensityOptions::new(config.n, config.trials);
    let results = setup
        .energies
        .par_iter()
        .map(|&e| {
            // Streams are keyed by trial only, so energies share disorder.
            let r = density_estimate(dist, lambda, &setup.law, &[e], &opts, setup.key)
                .map(|est| vec![vec![Field::Float(e), Field::Float(est.rho_hat[0]), Field::Float(rho_free_theory(e))]]);
            (vec![("E", e), ("lambda", lambda)], r.map_err(|e| e.to_string()))
        })
        .collect();
    collect(&DENSITY_HEADER, results)
}

fn harmonic_check(config: &ExperimentConfig, setup: &Setup) -> Outcome {
    let dist = setup.dist();
    let (e, l) = (setup.energies[0], setup.lambdas[0]);
    let results = config
        .harmonic_sizes()
        .into_par_iter()
        .map(|n| {
            let r = mc_moments(dist, e, l, n, config.trials, setup.key.child(n)).map(|rep| {
                let (m1, se1) = rep.m1();
                let (m2, se2) = rep.m2();
                let exact = rep.exact.as_ref();
                vec![vec![
                    Field::Int(n as u128),
                    Field::Float(m1),
                    Field::Float(se1),
                    Field::Float(rep.bounds.m1_upper),
                    Field::Float(m2),
                    Field::Float(se2),
                    Field::Float(rep.bounds.m2_lo),
                    Field::Float(rep.bounds.m2_hi),
                    Field::Float(rep.m3().0),
                    Field::opt(exact.map(|x| x.moments[0])),
                    Field::opt(exact.map(|x| x.moments[1])),
                ]]
            });
            (vec![("n", n as f64)], r.map_err(|e| e.to_string()))
        })
        .collect();
    collect(&HARMONIC_HEADER, results)
}

/// Largest shell index the brute-force enumeration accepts.
const BRUTE_FORCE_MAX_N: u64 = 12;

fn geometry_audit(config: &ExperimentConfig) -> Outcome {
    let d = config.growth.d.expect("validated: integer d") as u32;
    let results = (1..=config.n)
        .into_par_iter()
        .map(|n| {
            let r = (|| {
                let formula = zd_shell_counts(d, n)?;
                let brute = if n <= BRUTE_FORCE_MAX_N { Some(zd_brute_force(d, n)?) } else { None };
                Ok::<_, antitree_core::Error>(
                    (0..=d)
                        .map(|k| {
                            let f = formula.by_zero_count[k as usize];
                            let shifted = zd_points_with_zeros_shifted(d, n, k);
                            vec![
                                Field::Int(d as u128),
                                Field::Int(n as u128),
                                Field::Int(k as u128),
                                Field::Int(f),
                                brute.as_ref().map_or(Field::Missing, |b| Field::Int(b.by_zero_count[k as usize])),
                                Field::Int(shifted),
                                Field::Bool(shifted != f),
                            ]
                        })
                        .collect(),
                )
            })();
            (vec![("n", n as f64)], r.map_err(|e| e.to_string()))
        })
        .collect();
    collect(&GEOMETRY_HEADER, results)
}

fn set_rows(lambda: f64, name: &str, set: &IntervalSet) -> Vec<Vec<Field>> {
    set.intervals()
        .iter()
        .map(|iv| {
            vec![
                Field::Float(lambda),
                Field::Text(name.into()),
                Field::Float(iv.lo),
                Field::Float(iv.hi),
                Field::Bool(iv.lo_closed),
                Field::Bool(iv.hi_closed),
            ]
        })
        .collect()
}

fn spectrum_sets(setup: &Setup) -> Outcome {
    let dist = setup.dist();
    let c = match setup.law {
        GrowthLaw::UniformPower { c, .. } => Some(c),
        GrowthLaw::Custom(_) => None,
    };
    let results = setup
        .lambdas
        .par_iter()
        .map(|&l| {
            let mut rows = set_rows(l, "I", &dist.i_lambda(l));
            if let Some(c) = c {
                rows.extend(set_rows(l, "J", &dist.j_lambda(l, c)));
            }
            rows.extend(set_rows(l, "essential", &essential_spectrum(dist, l)));
            (vec![("lambda", l)], Ok(rows))
        })
        .collect();
    collect(&SPECTRUM_HEADER, results)
}
