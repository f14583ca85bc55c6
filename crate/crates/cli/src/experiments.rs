use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use probrep_core::antisym::{self, robustness_gap_table, GapTableConfig};
use probrep_core::metrics::damped_family_demo;
use probrep_core::nets::{build_net, net_size_bound, MAX_DIM, MIN_EPSILON};
use probrep_core::random::{derive_seed, rng_from_seed};
use probrep_core::scrambling::{self, random_product_net, scramble_search};
use probrep_core::spectral::{airplane_scan, random_witness, witness_pair, AIRPLANE_MAX_N};
use probrep_gpt::{
    adaptive_distance, product_family_distance, tomography_report, PRODUCT_MAX_N,
    TOMOGRAPHY_MAX_LEN,
};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::table::{ColumnType as T, ResultTable};

/// Every parameter key the driver understands.
pub const KEYS: &[&str] = &[
    "n",
    "n_max",
    "samples",
    "epsilon",
    "seed",
    "max_tries",
    "tolerance",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExperimentInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub keys: &'static [&'static str],
    pub randomized: bool,
}

pub const REGISTRY: &[ExperimentInfo] = &[
    ExperimentInfo {
        name: "antisym",
        summary: "antisymmetric state: product-measurement gap and trace distance to I/d ⊗ σ",
        keys: &["n_max", "samples", "seed"],
        randomized: true,
    },
    ExperimentInfo {
        name: "airplane",
        summary: "exact minimum spectral distance between triangular and flat spectra",
        keys: &["n"],
        randomized: false,
    },
    ExperimentInfo {
        name: "scramble",
        summary: "search for a unitary meeting every threshold of a random product net",
        keys: &["n", "samples", "max_tries", "seed"],
        randomized: true,
    },
    ExperimentInfo {
        name: "nets",
        summary: "greedy ε-net on pure states with a covering certificate",
        keys: &["n", "epsilon", "samples", "seed"],
        randomized: true,
    },
    ExperimentInfo {
        name: "keylock",
        summary: "exact adaptive and product distances in the key/lock theory",
        keys: &["n"],
        randomized: false,
    },
    ExperimentInfo {
        name: "damped",
        summary: "damped measurement family against the trace distance",
        keys: &["n"],
        randomized: false,
    },
    ExperimentInfo {
        name: "witness",
        summary: "state pairs realizing random traceless witnesses",
        keys: &["n", "samples", "seed", "tolerance"],
        randomized: true,
    },
    ExperimentInfo {
        name: "tomography",
        summary: "local tomography of truncated key/lock systems",
        keys: &["n"],
        randomized: false,
    },
];

pub fn lookup(name: &str) -> Option<&'static ExperimentInfo> {
    REGISTRY.iter().find(|e| e.name == name)
}

/// Largest `n` the keylock experiment accepts; both distances must be
/// computable.
pub const KEYLOCK_MAX_N: usize = PRODUCT_MAX_N;
pub const DAMPED_MAX_DIM: usize = 64;
pub const WITNESS_MAX_DIM: usize = 16;

/// A validated, typed experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    Antisym {
        n_max: usize,
        samples: usize,
        seed: u64,
    },
    Airplane {
        n: usize,
    },
    Scramble {
        n: u32,
        net_size: usize,
        max_tries: usize,
        seed: u64,
    },
    Nets {
        dim: usize,
        epsilon: f64,
        probes: usize,
        seed: u64,
    },
    Keylock {
        n: usize,
    },
    Damped {
        dim: usize,
    },
    Witness {
        dim: usize,
        samples: usize,
        seed: u64,
        tolerance: f64,
    },
    Tomography {
        max_len: usize,
    },
}

struct Reader<'a> {
    params: &'a BTreeMap<String, String>,
    problems: Vec<String>,
}

impl Reader<'_> {
    fn int(&mut self, key: &str, default: Option<u64>, min: u64, max: u64) -> u64 {
        let Some(text) = self.params.get(key) else {
            return default.unwrap_or_else(|| {
                self.problems
                    .push(format!("missing required parameter {key}"));
                min
            });
        };
        match text.parse::<u64>() {
            Ok(v) if v < min => {
                self.problems
                    .push(format!("{key} = {v} is below the minimum {min}"));
                min
            }
            Ok(v) if v > max => {
                self.problems
                    .push(format!("{key} = {v} exceeds the cap {max}"));
                min
            }
            Ok(v) => v,
            Err(_) => {
                self.problems
                    .push(format!("{key} must be a nonnegative integer, got {text:?}"));
                min
            }
        }
    }

    fn real(&mut self, key: &str, default: f64, min: f64, max: f64) -> f64 {
        let Some(text) = self.params.get(key) else {
            return default;
        };
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= min && v <= max => v,
            Ok(v) => {
                self.problems
                    .push(format!("{key} = {v} is outside [{min}, {max}]"));
                default
            }
            Err(_) => {
                self.problems
                    .push(format!("{key} must be a number, got {text:?}"));
                default
            }
        }
    }

    fn seed(&mut self, experiment: &str) -> u64 {
        if !self.params.contains_key("seed") {
            self.problems.push(format!(
                "experiment {experiment} is randomized and needs a seed"
            ));
            return 0;
        }
        self.int("seed", None, 0, u64::MAX)
    }
}

/// Types the configuration, or lists everything wrong with it.
pub fn plan(config: &ExperimentConfig) -> Result<Plan, CliError> {
    let info = lookup(&config.experiment)
        .ok_or_else(|| CliError::UnknownExperiment(config.experiment.clone()))?;
    let mut r = Reader {
        params: &config.parameters,
        problems: Vec::new(),
    };
    for key in config.parameters.keys() {
        if !KEYS.contains(&key.as_str()) {
            r.problems.push(format!("unknown parameter {key}"));
        } else if !info.keys.contains(&key.as_str()) {
            r.problems.push(format!(
                "parameter {key} is not used by experiment {}",
                info.name
            ));
        }
    }
    let name = info.name;
    let plan = match name {
        "antisym" => Plan::Antisym {
            n_max: r.int("n_max", Some(3), 1, antisym::MAX_N as u64) as usize,
            samples: r.int("samples", Some(20), 1, 100_000) as usize,
            seed: r.seed(name),
        },
        "airplane" => Plan::Airplane {
            n: r.int("n", None, 1, AIRPLANE_MAX_N as u64) as usize,
        },
        "scramble" => Plan::Scramble {
            n: r.int("n", Some(4), 1, scrambling::MAX_N as u64) as u32,
            net_size: r.int("samples", Some(50), 1, 100_000) as usize,
            max_tries: r.int("max_tries", Some(100), 1, 1_000_000) as usize,
            seed: r.seed(name),
        },
        "nets" => Plan::Nets {
            dim: r.int("n", Some(2), 2, MAX_DIM as u64) as usize,
            epsilon: r.real("epsilon", 0.5, MIN_EPSILON, 2f64.sqrt()),
            probes: r.int("samples", Some(100_000), 1, 10_000_000) as usize,
            seed: r.seed(name),
        },
        "keylock" => Plan::Keylock {
            n: r.int("n", None, 0, KEYLOCK_MAX_N as u64) as usize,
        },
        "damped" => Plan::Damped {
            dim: r.int("n", Some(8), 2, DAMPED_MAX_DIM as u64) as usize,
        },
        "witness" => Plan::Witness {
            dim: r.int("n", Some(4), 2, WITNESS_MAX_DIM as u64) as usize,
            samples: r.int("samples", Some(1000), 1, 1_000_000) as usize,
            seed: r.seed(name),
            tolerance: r.real("tolerance", 1e-10, 0.0, 1.0),
        },
        "tomography" => Plan::Tomography {
            max_len: r.int("n", Some(3), 0, TOMOGRAPHY_MAX_LEN as u64) as usize,
        },
        _ => unreachable!("registry and planner disagree on {name}"),
    };
    if r.problems.is_empty() {
        Ok(plan)
    } else {
        Err(CliError::InvalidConfig(r.problems))
    }
}

/// Everything `run` would reject before starting; empty when the config
/// is acceptable.
pub fn validate(config: &ExperimentConfig) -> Vec<String> {
    match plan(config) {
        Ok(_) => Vec::new(),
        Err(CliError::InvalidConfig(problems)) => problems,
        Err(e) => vec![e.to_string()],
    }
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Runs a validated configuration and returns its table.
pub fn execute(config: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let plan = plan(config)?;
    let table = match plan {
        Plan::Antisym {
            n_max,
            samples,
            seed,
        } => {
            let mut t = ResultTable::new(
                config,
                &[
                    ("n", T::Integer),
                    ("d_product", T::Real),
                    ("gap", T::Rational),
                    ("delta_upper", T::Real),
                    ("delta_converged", T::Boolean),
                ],
            );
            let mut gap_config = GapTableConfig {
                samples,
                seed,
                ..GapTableConfig::default()
            };
            gap_config.optimizer.seed = derive_seed(seed, 1);
            for row in robustness_gap_table(n_max, &gap_config)? {
                t.push(vec![
                    row.n.into(),
                    row.d_product.into(),
                    rational(1, 1 << row.n).into(),
                    row.delta.into(),
                    row.delta_converged.into(),
                ]);
            }
            t
        }
        Plan::Airplane { n } => {
            let scan = airplane_scan(n)?;
            let bound = rational(2, 11);
            let mut t = ResultTable::new(
                config,
                &[
                    ("n", T::Integer),
                    ("min", T::Rational),
                    ("min_real", T::Real),
                    ("argmin", T::Integer),
                    ("half_min", T::Real),
                    ("above_2_11", T::Boolean),
                ],
            );
            t.push(vec![
                n.into(),
                scan.min.clone().into(),
                scan.min_f64().into(),
                scan.argmin.into(),
                (scan.min_f64() / 2.0).into(),
                (scan.min >= bound).into(),
            ]);
            t
        }
        Plan::Scramble {
            n,
            net_size,
            max_tries,
            seed,
        } => {
            let net = random_product_net(n, net_size, derive_seed(seed, 0));
            let report = scramble_search(n, &net, max_tries, derive_seed(seed, 1), None)?;
            let mut t = ResultTable::new(
                config,
                &[
                    ("n", T::Integer),
                    ("dim", T::Integer),
                    ("net_size", T::Integer),
                    ("tries", T::Integer),
                    ("found", T::Boolean),
                    ("max_ratio", T::Real),
                    ("delta_n", T::Real),
                    ("d_bound", T::Real),
                    ("unitary_seed", T::Integer),
                ],
            );
            t.push(vec![
                (n as usize).into(),
                report.dim.into(),
                net_size.into(),
                report.tries.into(),
                report.found.into(),
                report.max_ratio.into(),
                report.delta_n.into(),
                report.d_bound.into(),
                report.unitary_seed.into(),
            ]);
            t
        }
        Plan::Nets {
            dim,
            epsilon,
            probes,
            seed,
        } => {
            let net = build_net(dim, epsilon, derive_seed(seed, 0))?;
            let cert = net.certify(probes, derive_seed(seed, 1));
            let mut t = ResultTable::new(
                config,
                &[
                    ("dim", T::Integer),
                    ("epsilon", T::Real),
                    ("points", T::Integer),
                    ("size_bound", T::Real),
                    ("probes", T::Integer),
                    ("worst_distance", T::Real),
                    ("uncovered", T::Integer),
                    ("passed", T::Boolean),
                ],
            );
            t.push(vec![
                dim.into(),
                epsilon.into(),
                net.len().into(),
                net_size_bound(dim, epsilon).into(),
                probes.into(),
                cert.worst_distance.into(),
                cert.uncovered.into(),
                cert.passed().into(),
            ]);
            t
        }
        Plan::Keylock { n } => {
            let mut t = ResultTable::new(
                config,
                &[
                    ("n", T::Integer),
                    ("adaptive", T::Rational),
                    ("product", T::Rational),
                ],
            );
            t.push(vec![
                n.into(),
                adaptive_distance(n)?.into(),
                product_family_distance(n)?.into(),
            ]);
            t
        }
        Plan::Damped { dim } => {
            let mut t = ResultTable::new(
                config,
                &[
                    ("n", T::Integer),
                    ("d_damped", T::Real),
                    ("delta", T::Real),
                    ("exp_minus_2n", T::Real),
                ],
            );
            for row in damped_family_demo(dim)? {
                t.push(vec![
                    row.n.into(),
                    row.d_damped.into(),
                    row.delta.into(),
                    (-2.0 * row.n as f64).exp().into(),
                ]);
            }
            t
        }
        Plan::Witness {
            dim,
            samples,
            seed,
            tolerance,
        } => {
            let mut rng = rng_from_seed(seed);
            let mut worst: f64 = 0.0;
            let mut valid = 0usize;
            for _ in 0..samples {
                let w = random_witness(dim, &mut rng);
                // Pointer outside the support of A, so both states need the extra level.
                let (rho, sigma) = witness_pair(&w, dim)?;
                let a = w.operator().embed(dim + 1)?;
                let residual = (rho.operator() - sigma.operator()).max_abs_diff(&a);
                worst = worst.max(residual);
                if residual <= tolerance {
                    valid += 1;
                }
            }
            let mut t = ResultTable::new(
                config,
                &[
                    ("dim", T::Integer),
                    ("samples", T::Integer),
                    ("max_residual", T::Real),
                    ("within_tolerance", T::Integer),
                    ("passed", T::Boolean),
                ],
            );
            t.push(vec![
                dim.into(),
                samples.into(),
                worst.into(),
                valid.into(),
                (valid == samples).into(),
            ]);
            t
        }
        Plan::Tomography { max_len } => {
            let mut t = ResultTable::new(
                config,
                &[
                    ("max_len", T::Integer),
                    ("joint_states", T::Integer),
                    ("key_dimension", T::Integer),
                    ("lock_dimension", T::Integer),
                    ("product_rank", T::Integer),
                    ("joint_rank", T::Integer),
                    ("passed", T::Boolean),
                ],
            );
            for len in 0..=max_len {
                let r = tomography_report(len)?;
                t.push(vec![
                    len.into(),
                    r.joint_states.into(),
                    r.key_dimension.into(),
                    r.lock_dimension.into(),
                    r.product_rank.into(),
                    r.joint_rank.into(),
                    r.passed().into(),
                ]);
            }
            t
        }
    };
    Ok(table)
}
