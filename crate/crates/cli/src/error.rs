use std::fmt;

use planefix::dendrite::DendriteError;
use planefix::geometry::GeomError;
use planefix::index_var::IndexError;
use planefix::lamination::LaminationError;
use planefix::map::MapError;
use planefix::map_analysis::AnalysisError;
use planefix::poly::PolyError;
use planefix::polydyn::PolyDynError;

/// Failure classes, one per nonzero exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or unreadable input (exit 2).
    Input(String),
    /// A checked property or hypothesis does not hold (exit 1).
    Property(String),
    /// A numerical procedure did not converge (exit 3).
    Numerical(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Property(_) => 1,
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn input(msg: impl fmt::Display) -> Self {
        CliError::Input(msg.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Property(m) => write!(f, "property fails: {m}"),
            CliError::Numerical(m) => write!(f, "no convergence: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<MapError> for CliError {
    fn from(e: MapError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<IndexError> for CliError {
    fn from(e: IndexError) -> Self {
        let m = e.to_string();
        match e {
            IndexError::NoPartition(_) | IndexError::CannotCloseArc => CliError::Property(m),
            IndexError::JunctionTouchesImageOfEndpoints => CliError::Numerical(m),
            IndexError::Map(_)
            | IndexError::Geom(_)
            | IndexError::ImageHitsBasepoint(_)
            | IndexError::FixedPointOnCurve(_)
            | IndexError::PreconditionViolated(_) => CliError::Input(m),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        let m = e.to_string();
        match e {
            AnalysisError::NotIsolated | AnalysisError::BoundaryFixedPoint => CliError::Numerical(m),
            AnalysisError::HypothesisFailed(..) => CliError::Property(m),
            AnalysisError::Index(ie) => ie.into(),
            _ => CliError::Input(m),
        }
    }
}

impl From<DendriteError> for CliError {
    fn from(e: DendriteError) -> Self {
        let m = e.to_string();
        match e {
            DendriteError::HypothesisFailed(_) | DendriteError::NoFixedPoint(_) | DendriteError::NotFixed => {
                CliError::Property(m)
            }
            _ => CliError::Input(m),
        }
    }
}

impl From<LaminationError> for CliError {
    fn from(e: LaminationError) -> Self {
        let m = e.to_string();
        match e {
            LaminationError::NoValidPairing(..)
            | LaminationError::NotCompatible(..)
            | LaminationError::InvariantFailed(..) => CliError::Property(m),
            LaminationError::Dendrite(d) => d.into(),
            _ => CliError::Input(m),
        }
    }
}

impl From<PolyDynError> for CliError {
    fn from(e: PolyDynError) -> Self {
        let m = e.to_string();
        match e {
            PolyDynError::NewtonDivergence { .. } | PolyDynError::RayUnresolved(_) => CliError::Numerical(m),
            PolyDynError::ConditionFailed(..) => CliError::Property(m),
            PolyDynError::Analysis(a) => a.into(),
            _ => CliError::Input(m),
        }
    }
}
