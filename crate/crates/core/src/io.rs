//! Versioned JSON file formats for machines and counterexamples, and formula
//! files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{parse_hyperltl, HyperFormula, LogicError, Syntax};
use crate::model::{Counterexample, Guard, Lasso, Letter, ModelError, MooreMachine};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoadError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{line}:{column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format version {0}, expected {FORMAT_VERSION}")]
    Version(u32),
    #[error("trace `{trace}` position {position}: {message}")]
    Letter {
        trace: String,
        position: usize,
        message: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

impl From<serde_json::Error> for LoadError {
    fn from(e: serde_json::Error) -> Self {
        let full = e.to_string();
        // serde_json appends " at line L column C"
        let message = match full.rfind(" at line ") {
            Some(i) => full[..i].to_string(),
            None => full,
        };
        LoadError::Json {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    pub id: String,
    #[serde(default)]
    pub label: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub from: String,
    pub guard: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineFile {
    pub format: u32,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub states: Vec<StateEntry>,
    pub initial: String,
    pub transitions: Vec<TransitionEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LassoEntry {
    pub prefix: Vec<Vec<String>>,
    pub period: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceFile {
    pub format: u32,
    pub traces: BTreeMap<String, LassoEntry>,
}

impl MachineFile {
    pub fn build(&self) -> Result<MooreMachine, LoadError> {
        check_version(self.format)?;
        let transitions = self
            .transitions
            .iter()
            .map(|t| Ok((t.from.clone(), Guard::parse(&t.guard)?, t.to.clone())))
            .collect::<Result<Vec<_>, ModelError>>()?;
        Ok(MooreMachine::from_guards(
            self.inputs.clone(),
            self.outputs.clone(),
            self.states.iter().map(|s| (s.id.clone(), s.label.clone())).collect(),
            &self.initial,
            transitions,
        )?)
    }
}

impl TraceFile {
    pub fn from_counterexample(cex: &Counterexample) -> TraceFile {
        let ap = cex.alphabet();
        let names = |ls: &[Letter]| -> Vec<Vec<String>> {
            ls.iter()
                .map(|&l| ap.names(l).into_iter().map(String::from).collect())
                .collect()
        };
        TraceFile {
            format: FORMAT_VERSION,
            traces: cex
                .traces()
                .iter()
                .map(|(v, t)| {
                    (
                        v.clone(),
                        LassoEntry {
                            prefix: names(t.prefix()),
                            period: names(t.period()),
                        },
                    )
                })
                .collect(),
        }
    }

    /// The counterexample over `machine`'s alphabet; traces are validated.
    pub fn build(&self, machine: &MooreMachine) -> Result<Counterexample, LoadError> {
        check_version(self.format)?;
        let ap = machine.alphabet();
        let mut traces = BTreeMap::new();
        for (var, entry) in &self.traces {
            let letters = |ls: &[Vec<String>], offset: usize| -> Result<Vec<Letter>, LoadError> {
                ls.iter()
                    .enumerate()
                    .map(|(i, names)| {
                        ap.letter(names.iter().map(String::as_str))
                            .map_err(|message| LoadError::Letter {
                                trace: var.clone(),
                                position: offset + i,
                                message,
                            })
                    })
                    .collect()
            };
            let lasso = Lasso::new(
                letters(&entry.prefix, 0)?,
                letters(&entry.period, entry.prefix.len())?,
            )?;
            traces.insert(var.clone(), lasso);
        }
        let cex = Counterexample::new(ap.clone(), traces);
        cex.validate(machine)?;
        Ok(cex)
    }
}

fn check_version(v: u32) -> Result<(), LoadError> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(LoadError::Version(v))
    }
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|e| LoadError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn parse_machine(text: &str) -> Result<MooreMachine, LoadError> {
    serde_json::from_str::<MachineFile>(text)?.build()
}

pub fn parse_counterexample(text: &str, machine: &MooreMachine) -> Result<Counterexample, LoadError> {
    serde_json::from_str::<TraceFile>(text)?.build(machine)
}

pub fn load_machine(path: &Path) -> Result<MooreMachine, LoadError> {
    parse_machine(&read(path)?)
}

pub fn load_counterexample(path: &Path, machine: &MooreMachine) -> Result<Counterexample, LoadError> {
    parse_counterexample(&read(path)?, machine)
}

pub fn load_formula(path: &Path, syntax: Syntax) -> Result<HyperFormula, LoadError> {
    Ok(parse_hyperltl(&read(path)?, syntax)?)
}

pub fn counterexample_json(cex: &Counterexample) -> String {
    serde_json::to_string_pretty(&TraceFile::from_counterexample(cex)).expect("trace files serialize")
}
