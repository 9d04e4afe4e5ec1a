//! Experiment configuration: JSON files or inline flags, validated before a run.

use hyperlab_core::constructions::LatticeCosetSet;
use hyperlab_core::density::{Thresholds, Window};
use hyperlab_core::dynamics::SemigroupJson;
use hyperlab_core::linalg::{Field, Mode, ScalarJson, Surd, VectorJson};
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_RADIUS: f64 = 2.0;
pub const DEFAULT_SCHEDULE: [u64; 3] = [50, 100, 200];
pub const DEFAULT_RANDOM_STARTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Kronecker,
    Orbit,
    Probe,
    Normalform,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Kronecker => "kronecker",
            CommandKind::Orbit => "orbit",
            CommandKind::Probe => "probe",
            CommandKind::Normalform => "normalform",
        }
    }
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_random_starts() -> usize {
    DEFAULT_RANDOM_STARTS
}

/// One experiment. Unknown keys are rejected; `resolve` fills every default in place.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<LatticeCosetSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semigroup: Option<SemigroupJson>,
    /// Orbit start; defaults to `e₁` for `orbit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<VectorJson>,
    /// User subspace for `probe`, given by spanning vectors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<Vec<VectorJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Vec<[f64; 2]>>,
    /// Window in orthonormal M-coordinates; defaults to `[−2, 2]^{dim_ℝ M}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace_window: Option<Vec<[f64; 2]>>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<u64>>,
    /// Per-generator budget weights; bound `i` at budget `K` is `ceil(wᵢK)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub points_csv: bool,
    #[serde(default)]
    pub seed: u64,
    /// Extra random starting vectors checked against the `u_η` probe.
    #[serde(default = "default_random_starts")]
    pub random_starts: usize,
}

impl ExperimentConfig {
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            set: None,
            semigroup: None,
            start: None,
            subspace: None,
            window: None,
            subspace_window: None,
            epsilon: DEFAULT_EPSILON,
            schedule: None,
            weights: None,
            thresholds: Thresholds::default(),
            mode: Mode::Float,
            points_csv: false,
            seed: 0,
            random_starts: DEFAULT_RANDOM_STARTS,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Real dimension of the sampled space.
    pub fn ambient_dim(&self) -> Result<usize> {
        match self.command {
            CommandKind::Kronecker => {
                let set = self.set.as_ref().ok_or_else(|| CliError::Config("kronecker needs a set".into()))?;
                Ok(match set {
                    LatticeCosetSet::AAlpha { alpha_primes } => alpha_primes.len(),
                    LatticeCosetSet::AAlphaBeta { alpha_primes, .. } => 2 * alpha_primes.len(),
                    LatticeCosetSet::A2 { .. } => 4,
                    LatticeCosetSet::B { .. } => 2,
                    LatticeCosetSet::ZModule { generators } => generators.first().map_or(0, Vec::len),
                })
            }
            _ => {
                let g = self.semigroup.as_ref().ok_or_else(|| {
                    CliError::Config(format!("{} needs a semigroup descriptor", self.command.name()))
                })?;
                let first = g.generators.first().ok_or_else(|| CliError::Config("semigroup has no generators".into()))?;
                Ok(first.n * g.field.width())
            }
        }
    }

    /// Checks everything that can be checked without running, then fills defaults.
    pub fn resolve(mut self) -> Result<Self> {
        let dim = self.ambient_dim()?;
        if dim == 0 {
            return Err(CliError::Config("ambient dimension is zero".into()));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(CliError::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        let w = self.window.get_or_insert_with(|| vec![[-DEFAULT_RADIUS, DEFAULT_RADIUS]; dim]);
        if w.len() != dim {
            return Err(CliError::Config(format!("window has {} axes, the space has {dim}", w.len())));
        }
        check_window(w)?;
        if let Some(sw) = &self.subspace_window {
            check_window(sw)?;
        }
        let fallback = match &self.set {
            Some(LatticeCosetSet::B { angle_count, .. }) if self.command == CommandKind::Kronecker => {
                let a = *angle_count as u64;
                vec![a / 4, a / 2, a]
            }
            _ => DEFAULT_SCHEDULE.to_vec(),
        };
        let s = self.schedule.get_or_insert(fallback);
        if s.len() < 3 || s.windows(2).any(|p| p[0] >= p[1]) {
            return Err(CliError::Config("schedule needs at least 3 strictly increasing budgets".into()));
        }
        let t = &self.thresholds;
        if !(0.0..=1.0).contains(&t.dense) || !(0.0..=1.0).contains(&t.not_dense) || !(t.plateau >= 0.0) {
            return Err(CliError::Config("thresholds must lie in [0, 1]".into()));
        }
        if self.command != CommandKind::Kronecker {
            let g = self.semigroup.as_ref().expect("checked by ambient_dim");
            let n = g.generators[0].n;
            if let Some(wts) = &self.weights {
                if wts.len() != g.generators.len() {
                    return Err(CliError::Config(format!(
                        "{} weights for {} generators",
                        wts.len(),
                        g.generators.len()
                    )));
                }
            }
            if self.command == CommandKind::Orbit && self.start.is_none() {
                let mut entries = vec![ScalarJson::Text("0".into()); n];
                entries[0] = ScalarJson::Text("1".into());
                self.start = Some(VectorJson { field: g.field, n, entries });
            }
            if let Some(v) = &self.start {
                if v.n != n || v.field != g.field {
                    return Err(CliError::Config("start vector does not match the semigroup".into()));
                }
            }
        } else if self.weights.is_some() {
            return Err(CliError::Config("weights apply to semigroup commands only".into()));
        }
        Ok(self)
    }

    pub fn window(&self) -> Result<Window> {
        let w = self.window.as_ref().ok_or_else(|| CliError::Config("window unresolved".into()))?;
        Ok(Window::new(w.iter().map(|b| (b[0], b[1])).collect())?)
    }

    pub fn schedule(&self) -> &[u64] {
        self.schedule.as_deref().unwrap_or(&DEFAULT_SCHEDULE)
    }
}

fn check_window(w: &[[f64; 2]]) -> Result<()> {
    for b in w {
        if !(b[0].is_finite() && b[1].is_finite() && b[0] < b[1]) {
            return Err(CliError::Config(format!("bad window interval [{}, {}]", b[0], b[1])));
        }
    }
    Ok(())
}

/// `2,3,5` → `[2, 3, 5]`.
pub fn parse_u64_list(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| CliError::Config(format!("'{t}' is not a nonnegative integer"))))
        .collect()
}

pub fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Config(format!("'{t}' is not a number"))))
        .collect()
}

/// `0,1x0,1` → `[[0, 1], [0, 1]]`.
pub fn parse_window(text: &str) -> Result<Vec<[f64; 2]>> {
    text.split('x')
        .map(|axis| match parse_f64_list(axis)?.as_slice() {
            [lo, hi] => Ok([*lo, *hi]),
            _ => Err(CliError::Config(format!("window axis '{axis}' needs lo,hi"))),
        })
        .collect()
}

/// `1,0;√2,√3` → generator rows of scalar strings. Each entry must parse as a surd.
pub fn parse_generators(text: &str) -> Result<Vec<Vec<String>>> {
    let rows: Vec<Vec<String>> = text
        .split(';')
        .map(|row| row.split(',').map(|t| t.trim().to_string()).collect())
        .collect();
    for t in rows.iter().flatten() {
        Surd::parse(t).map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(rows)
}

/// Real vector from comma-separated scalars.
pub fn parse_vector(text: &str) -> Result<VectorJson> {
    let entries: Vec<ScalarJson> = text.split(',').map(|t| ScalarJson::Text(t.trim().to_string())).collect();
    for e in &entries {
        e.to_scalar().map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(VectorJson { field: Field::Real, n: entries.len(), entries })
}

/// True when a scalar token is a decimal literal, whose exactness as input is unverified.
pub fn is_decimal(token: &str) -> bool {
    token.contains('.') || token.contains('e') || token.contains('E')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_and_lists_parse() {
        assert_eq!(parse_window("0,1x-2,2").unwrap(), vec![[0.0, 1.0], [-2.0, 2.0]]);
        assert_eq!(parse_u64_list("2, 3").unwrap(), vec![2, 3]);
        assert!(parse_window("0,1,2").is_err());
        assert!(parse_u64_list("2,x").is_err());
    }

    #[test]
    fn generators_accept_surd_syntax() {
        let g = parse_generators("1,0;√2,sqrt(3)").unwrap();
        assert_eq!(g, vec![vec!["1".to_string(), "0".into()], vec!["√2".into(), "sqrt(3)".into()]]);
        assert!(parse_generators("1,pi").is_err());
        assert!(is_decimal("1.414"));
        assert!(!is_decimal("√2"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = ExperimentConfig::from_json(r#"{"command":"kronecker","bogus":1}"#).unwrap_err();
        assert!(e.to_string().contains("bogus"));
    }

    #[test]
    fn defaults_are_filled() {
        let text = r#"{"command":"kronecker","set":{"kind":"A_alpha","alpha_primes":[2,3]}}"#;
        let c = ExperimentConfig::from_json(text).unwrap().resolve().unwrap();
        assert_eq!(c.window.as_ref().unwrap().len(), 2);
        assert_eq!(c.schedule(), &DEFAULT_SCHEDULE);
        let bad = r#"{"command":"kronecker","set":{"kind":"A_alpha","alpha_primes":[2,3]},"schedule":[3,2,1]}"#;
        assert!(ExperimentConfig::from_json(bad).unwrap().resolve().is_err());
    }
}
