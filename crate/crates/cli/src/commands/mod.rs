pub mod plane;
pub mod poly;
pub mod tree;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;
use crate::svg::Figure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    NoConvergence,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Holds => 0,
            Status::Fails => 1,
            Status::NoConvergence => 3,
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Holds
        } else {
            Status::Fails
        }
    }
}

pub struct Outcome {
    pub result: Value,
    pub status: Status,
    pub figure: Figure,
}

impl Outcome {
    pub fn new<T: Serialize>(result: &T, status: Status, figure: Figure) -> Result<Self, CliError> {
        Ok(Outcome { result: serde_json::to_value(result)?, status, figure })
    }
}

/// Recompute a saved report from its embedded configuration.
pub fn rerun(command: &str, config: Value) -> Result<Outcome, CliError> {
    fn cfg<T: serde::de::DeserializeOwned>(v: Value) -> Result<T, CliError> {
        serde_json::from_value(v).map_err(|e| CliError::input(format!("report config: {e}")))
    }
    match command {
        "index" => plane::index(&cfg(config)?),
        "variation" => plane::variation(&cfg(config)?),
        "fmot" => plane::fmot(&cfg(config)?),
        "fixed-points" => plane::fixed_points(&cfg(config)?),
        "scramble" => plane::scramble(&cfg(config)?),
        "dendrite" => tree::dendrite(&cfg(config)?),
        "lamination" => tree::lamination(&cfg(config)?),
        "ray" => poly::ray(&cfg(config)?),
        "puzzle" => poly::puzzle(&cfg(config)?),
        other => Err(CliError::input(format!("unknown report command '{other}'"))),
    }
}
