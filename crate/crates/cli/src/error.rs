//! One error type for the whole command layer, with the process exit
//! code derived from it: user mistakes exit 1, resource exhaustion
//! exits 2.

use hfgen::broadnum::BroadError;
use hfgen::genengine::GenError;
use hfgen::hfset::HfError;
use hfgen::ordinal::OrdError;
use hfgen::spection::SpectError;
use hfgen::universes::UniverseError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: u32, col: u32, msg: String },
    #[error("unresolved {kind} name `{name}`")]
    Unresolved { kind: &'static str, name: String },
    #[error("arity mismatch: {detail}")]
    ArityMismatch { detail: String },
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Hf(#[from] HfError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Broad(#[from] BroadError),
    #[error(transparent)]
    Ord(#[from] OrdError),
    #[error(transparent)]
    Spect(#[from] SpectError),
    #[error(transparent)]
    Universe(#[from] UniverseError),
}

impl CliError {
    pub fn syntax(line: u32, col: u32, msg: impl Into<String>) -> CliError {
        CliError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    /// Process exit code: 2 for exhausted budgets and desk-scale
    /// refusals, 1 for everything else. Truncated-but-successful runs
    /// never reach here; the engines report those through flags.
    pub fn exit_code(&self) -> i32 {
        if self.is_resource() {
            2
        } else {
            1
        }
    }

    fn is_resource(&self) -> bool {
        match self {
            CliError::Hf(e) => hf_is_resource(e),
            CliError::Gen(e) => gen_is_resource(e),
            CliError::Broad(e) => broad_is_resource(e),
            CliError::Ord(e) => ord_is_resource(e),
            CliError::Spect(e) => spect_is_resource(e),
            CliError::Universe(e) => universe_is_resource(e),
            _ => false,
        }
    }
}

fn hf_is_resource(e: &HfError) -> bool {
    matches!(e, HfError::NodeBudget { .. })
}

fn gen_is_resource(e: &GenError) -> bool {
    match e {
        GenError::BudgetExceeded { .. } => true,
        GenError::Hf(h) => hf_is_resource(h),
        GenError::Encode(enc) => match enc {
            hfgen::encodings::EncodeError::Hf(h) => hf_is_resource(h),
            _ => false,
        },
        _ => false,
    }
}

fn broad_is_resource(e: &BroadError) -> bool {
    match e {
        BroadError::BudgetExceeded { .. } => true,
        BroadError::Hf(h) => hf_is_resource(h),
        BroadError::Encode(enc) => match enc {
            hfgen::encodings::EncodeError::Hf(h) => hf_is_resource(h),
            _ => false,
        },
        _ => false,
    }
}

fn ord_is_resource(e: &OrdError) -> bool {
    match e {
        OrdError::StageTooDeep(_) | OrdError::TooLarge { .. } | OrdError::RegularityRefused(_) => {
            true
        }
        OrdError::Hf(h) => hf_is_resource(h),
        _ => false,
    }
}

fn spect_is_resource(e: &SpectError) -> bool {
    match e {
        SpectError::FuelExhausted { .. } => true,
        SpectError::Hf(h) => hf_is_resource(h),
        SpectError::Engine(g) => gen_is_resource(g),
        _ => false,
    }
}

fn universe_is_resource(e: &UniverseError) -> bool {
    match e {
        UniverseError::Engine(g) => gen_is_resource(g),
        UniverseError::Hf(h) => hf_is_resource(h),
        UniverseError::Encode(enc) => match enc {
            hfgen::encodings::EncodeError::Hf(h) => hf_is_resource(h),
            _ => false,
        },
        _ => false,
    }
}
