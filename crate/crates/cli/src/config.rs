//! JSON run configuration.

use serde::{Deserialize, Serialize};

use fhj_core::hamiltonian::SpeedField;
use fhj_core::{
    FractionalOrder, HamiltonianSpec, InitialProfile, ProblemSpec, Stepping, TimeGrid, TorusGrid, VelocityField,
};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Oracle,
    Verify,
    Refine,
    SpecialfunTable,
}

/// Hamiltonians selectable from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianConfig {
    /// `H = b·p` with constant `b`.
    Transport { velocity: Vec<f64> },
    /// `H = b(x)·p`, `b_i = mean_i + amplitude_i sin(2π x_i)`.
    TransportSinusoidal { mean: Vec<f64>, amplitude: Vec<f64> },
    /// `H = c|p| + λr`.
    Eikonal {
        speed: f64,
        #[serde(default)]
        lambda: f64,
    },
    /// `H = (mean + amplitude sin 2πx)|p| + λr`.
    EikonalSinusoidal {
        mean: f64,
        amplitude: f64,
        #[serde(default)]
        lambda: f64,
    },
    /// `H ≡ value`.
    Constant { value: f64 },
}

impl Default for HamiltonianConfig {
    fn default() -> Self {
        Self::Transport { velocity: vec![1.0] }
    }
}

impl HamiltonianConfig {
    pub fn build(&self) -> fhj_core::Result<HamiltonianSpec> {
        match self {
            Self::Transport { velocity } => HamiltonianSpec::transport(VelocityField::Constant(velocity.clone())),
            Self::TransportSinusoidal { mean, amplitude } => HamiltonianSpec::transport(VelocityField::Sinusoidal {
                mean: mean.clone(),
                amplitude: amplitude.clone(),
            }),
            Self::Eikonal { speed, lambda } => HamiltonianSpec::eikonal(SpeedField::Constant(*speed), *lambda),
            Self::EikonalSinusoidal {
                mean,
                amplitude,
                lambda,
            } => HamiltonianSpec::eikonal(
                SpeedField::Sinusoidal {
                    mean: *mean,
                    amplitude: *amplitude,
                },
                *lambda,
            ),
            Self::Constant { value } => Ok(HamiltonianSpec::constant(*value)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    /// `amplitude · Π sin(2π wavenumber x_k)`.
    Sine {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one_u32")]
        wavenumber: u32,
    },
    Constant {
        value: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn one_u32() -> u32 {
    1
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self::Sine {
            amplitude: 1.0,
            wavenumber: 1,
        }
    }
}

impl InitialConfig {
    pub fn build(&self) -> InitialProfile {
        match self {
            Self::Sine { amplitude, wavenumber } => InitialProfile::Sine {
                amplitude: *amplitude,
                wavenumber: *wavenumber,
            },
            Self::Constant { value } => InitialProfile::Constant(*value),
        }
    }
}

/// Serialized form of a [`ProblemSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default = "default_alpha")]
    pub alpha: FractionalOrder,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_time_steps")]
    pub time_steps: usize,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default)]
    pub hamiltonian: HamiltonianConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    /// Defaults to the Hamiltonian's `lip_p`.
    #[serde(default)]
    pub viscosity_theta: Option<f64>,
    #[serde(default = "default_cfl_safety")]
    pub cfl_safety: f64,
    #[serde(default)]
    pub stepping: Stepping,
}

fn default_alpha() -> FractionalOrder {
    FractionalOrder::new(0.5).expect("0.5 is a valid order")
}

fn default_horizon() -> f64 {
    0.5
}

fn default_time_steps() -> usize {
    512
}

fn default_dim() -> usize {
    1
}

fn default_nodes() -> usize {
    256
}

fn default_cfl_safety() -> f64 {
    0.9
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            alpha: default_alpha(),
            horizon: default_horizon(),
            time_steps: default_time_steps(),
            dim: default_dim(),
            nodes: default_nodes(),
            hamiltonian: HamiltonianConfig::default(),
            initial: InitialConfig::default(),
            viscosity_theta: None,
            cfl_safety: default_cfl_safety(),
            stepping: Stepping::default(),
        }
    }
}

impl ProblemConfig {
    /// Builds the problem. Step-size restrictions are left to the solver.
    pub fn build(&self) -> fhj_core::Result<ProblemSpec> {
        let h = self.hamiltonian.build()?;
        let mut p = ProblemSpec::new(
            self.alpha,
            TimeGrid::new(self.horizon, self.time_steps)?,
            TorusGrid::new(self.dim, self.nodes)?,
            h,
            self.initial.build(),
        )?
        .with_cfl_safety(self.cfl_safety)
        .with_stepping(self.stepping);
        if let Some(theta) = self.viscosity_theta {
            p = p.with_theta(theta);
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// When present, must agree with the subcommand.
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub problem: ProblemConfig,
    #[serde(default)]
    pub output_path: Option<String>,
    #[serde(default)]
    pub seed: u64,
}

/// Parses and validates a JSON config; errors name the offending field.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Config(format!("{path}: {inner}"))
    })?;
    cfg.problem
        .build()
        .map_err(|e| CliError::Config(format!("problem: {e}")))?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_an_empty_config() {
        let cfg = parse_config("{}").unwrap();
        assert_eq!(cfg.problem, ProblemConfig::default());
        assert_eq!(cfg.problem.alpha.value(), 0.5);
        assert_eq!((cfg.problem.nodes, cfg.problem.time_steps), (256, 512));
        assert_eq!(cfg.problem.cfl_safety, 0.9);
        assert_eq!(cfg.seed, 0);
    }

    #[test]
    fn hamiltonian_variants_parse() {
        let text = r#"{"problem": {"hamiltonian": {"kind": "eikonal_sinusoidal", "mean": 1, "amplitude": 0.5}}}"#;
        let cfg = parse_config(text).unwrap();
        let h = cfg.problem.hamiltonian.build().unwrap();
        assert!((h.lip_p - 1.5).abs() < 1e-15);
        let text = r#"{"problem": {"hamiltonian": {"kind": "constant", "value": -1}, "stepping": "explicit"}}"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.problem.stepping, Stepping::Explicit);
    }

    #[test]
    fn errors_carry_the_field_path() {
        let e = parse_config(r#"{"problem": {"nodes": "many"}}"#).unwrap_err();
        assert!(e.to_string().contains("problem.nodes"), "{e}");
        let e = parse_config(r#"{"problem": {"hamiltonian": {"kind": "transport", "speed": 1}}}"#).unwrap_err();
        assert!(e.to_string().contains("problem.hamiltonian"), "{e}");
    }
}
