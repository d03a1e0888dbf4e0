//! Line-oriented experiment plans.
//!
//! ```text
//! # comparison at d = 30
//! fn = sphere, ackley
//! dim = 30
//! algos = so, de, sa
//! iters = 500
//! trials = 10
//! seed = 7
//! out = results
//! ```
//!
//! `fn` and `dim` are required. `algos` defaults to every algorithm. A repeated key
//! replaces the earlier value and produces a warning.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use zopt_core::objectives::registry;

use crate::error::{HarnessError, Result};

pub const DEFAULT_ITERS: usize = 500;
pub const DEFAULT_TRIALS: usize = 10;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_OUT: &str = "results";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    /// The sampling-based zoom optimizer.
    So,
    Pso,
    De,
    Bfgs,
    Sa,
    Shc,
    Adam,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::So,
        Algorithm::Pso,
        Algorithm::De,
        Algorithm::Bfgs,
        Algorithm::Sa,
        Algorithm::Shc,
        Algorithm::Adam,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::So => "so",
            Algorithm::Pso => "pso",
            Algorithm::De => "de",
            Algorithm::Bfgs => "bfgs",
            Algorithm::Sa => "sa",
            Algorithm::Shc => "shc",
            Algorithm::Adam => "adam",
        }
    }
}

impl FromStr for Algorithm {
    type Err = zopt_core::Error;

    fn from_str(s: &str) -> zopt_core::Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| zopt_core::Error::UnknownAlgorithm(s.to_string()))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub functions: Vec<String>,
    pub dims: Vec<usize>,
    pub algos: Vec<Algorithm>,
    pub iters: usize,
    pub trials: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl ExperimentPlan {
    /// Plan with default iterations, trials, seed and output directory.
    pub fn new(functions: Vec<String>, dims: Vec<usize>, algos: Vec<Algorithm>) -> Self {
        Self {
            functions,
            dims,
            algos,
            iters: DEFAULT_ITERS,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            out: PathBuf::from(DEFAULT_OUT),
        }
    }

    /// Checks counts and that every function exists at every dimension.
    pub fn validate(&self) -> Result<()> {
        if self.functions.is_empty() {
            return Err(HarnessError::MissingKey("fn"));
        }
        if self.dims.is_empty() {
            return Err(HarnessError::MissingKey("dim"));
        }
        if self.algos.is_empty() {
            return Err(HarnessError::Invalid("no algorithms selected".into()));
        }
        if self.iters == 0 || self.trials == 0 {
            return Err(HarnessError::Invalid("iters and trials must be at least 1".into()));
        }
        for f in &self.functions {
            for &d in &self.dims {
                registry(f, d)?;
            }
        }
        Ok(())
    }

    pub fn run_count(&self) -> usize {
        self.functions.len() * self.dims.len() * self.algos.len() * self.trials
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPlan {
    pub plan: ExperimentPlan,
    pub warnings: Vec<String>,
}

pub fn split_list(value: &str) -> Vec<String> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

fn parse_number<T: FromStr>(value: &str, key: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| HarnessError::Plan {
        line,
        message: format!("'{value}' is not a valid value for {key}"),
    })
}

/// Parses and validates a plan. Errors carry the 1-based line number of the offending key.
pub fn parse_plan(text: &str) -> Result<ParsedPlan> {
    let mut plan = ExperimentPlan::new(Vec::new(), Vec::new(), Algorithm::ALL.to_vec());
    let mut warnings = Vec::new();
    let mut seen: Vec<(String, usize)> = Vec::new();
    let (mut fn_line, mut dim_line) = (0, 0);

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(HarnessError::Plan { line, message: format!("expected key = value, got '{content}'") });
        };
        let (key, value) = (key.trim(), value.trim());
        if let Some((_, first)) = seen.iter().find(|(k, _)| k == key) {
            warnings.push(format!("line {line}: '{key}' repeats line {first}; the later value wins"));
        }
        seen.push((key.to_string(), line));
        match key {
            "fn" => {
                plan.functions = split_list(value);
                fn_line = line;
            }
            "dim" => {
                plan.dims = split_list(value)
                    .iter()
                    .map(|v| parse_number(v, key, line))
                    .collect::<Result<_>>()?;
                dim_line = line;
            }
            "algos" => {
                if split_list(value).is_empty() {
                    return Err(HarnessError::Plan { line, message: "algos must name at least one algorithm".into() });
                }
                plan.algos = split_list(value)
                    .iter()
                    .map(|v| v.parse().map_err(|e: zopt_core::Error| HarnessError::Plan { line, message: e.to_string() }))
                    .collect::<Result<_>>()?;
            }
            "iters" => plan.iters = parse_number(value, key, line)?,
            "trials" => plan.trials = parse_number(value, key, line)?,
            "seed" => plan.seed = parse_number(value, key, line)?,
            "out" => plan.out = PathBuf::from(value),
            other => return Err(HarnessError::Plan { line, message: format!("unknown key '{other}'") }),
        }
    }

    if plan.functions.is_empty() {
        return Err(HarnessError::MissingKey("fn"));
    }
    if plan.dims.is_empty() {
        return Err(HarnessError::MissingKey("dim"));
    }
    // attribute lookup failures to the line that caused them
    for f in &plan.functions {
        if let Err(e) = f.parse::<zopt_core::FunctionKind>() {
            return Err(HarnessError::Plan { line: fn_line, message: e.to_string() });
        }
        for &d in &plan.dims {
            if let Err(e) = registry(f, d) {
                return Err(HarnessError::Plan { line: dim_line, message: e.to_string() });
            }
        }
    }
    if plan.iters == 0 || plan.trials == 0 {
        let key = if plan.iters == 0 { "iters" } else { "trials" };
        let line = seen.iter().rev().find(|(k, _)| k == key).map_or(0, |(_, l)| *l);
        return Err(HarnessError::Plan { line, message: format!("{key} must be at least 1") });
    }
    plan.validate()?;
    Ok(ParsedPlan { plan, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_plan_gets_defaults() {
        let p = parse_plan("fn=sphere\ndim=2\nalgos=so").unwrap();
        assert_eq!(p.plan.functions, vec!["sphere"]);
        assert_eq!(p.plan.dims, vec![2]);
        assert_eq!(p.plan.algos, vec![Algorithm::So]);
        assert_eq!((p.plan.iters, p.plan.trials, p.plan.seed), (500, 10, 0));
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn lists_comments_and_blank_lines() {
        let text = "# header\n\nfn = sphere, ackley  # two\ndim = 2,5\nalgos = so,de\niters = 7\ntrials=3\nseed=99\nout = /tmp/x\n";
        let p = parse_plan(text).unwrap().plan;
        assert_eq!(p.functions, vec!["sphere", "ackley"]);
        assert_eq!(p.dims, vec![2, 5]);
        assert_eq!(p.algos, vec![Algorithm::So, Algorithm::De]);
        assert_eq!((p.iters, p.trials, p.seed), (7, 3, 99));
        assert_eq!(p.out, PathBuf::from("/tmp/x"));
        assert_eq!(p.run_count(), 2 * 2 * 2 * 3);
    }

    #[test]
    fn empty_text_has_no_function() {
        assert!(matches!(parse_plan("").unwrap_err(), HarnessError::MissingKey("fn")));
        assert!(matches!(parse_plan("# only a comment\n").unwrap_err(), HarnessError::MissingKey("fn")));
    }

    #[test]
    fn duplicate_keys_last_wins() {
        let p = parse_plan("fn=sphere\ndim=2\niters=5\niters=9").unwrap();
        assert_eq!(p.plan.iters, 9);
        assert_eq!(p.warnings.len(), 1);
        assert!(p.warnings[0].contains("line 4") && p.warnings[0].contains("line 3"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let line_of = |text: &str| match parse_plan(text).unwrap_err() {
            HarnessError::Plan { line, .. } => line,
            other => panic!("unexpected {other}"),
        };
        assert_eq!(line_of("fn=sphere\ndim=2\ncolour=red"), 3);
        assert_eq!(line_of("fn=sphere\ndim=two"), 2);
        assert_eq!(line_of("fn=nosuch\ndim=2"), 1);
        assert_eq!(line_of("fn=sphere\n\ndim=2\nalgos=so,gd"), 4);
        assert_eq!(line_of("fn=sphere\ndim=2\nnonsense"), 3);
        assert_eq!(line_of("fn=sphere\ndim=2\ntrials=0"), 3);
        assert_eq!(line_of("fn=sphere\ndim=0"), 2);
    }

    #[test]
    fn algorithm_ids_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.id().parse::<Algorithm>().unwrap(), a);
        }
        assert!("gd".parse::<Algorithm>().is_err());
    }
}
