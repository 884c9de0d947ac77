//! CLI error taxonomy and the exit-code contract: 0 success, 1 usage error,
//! 2 data error, 3 numerical failure. Every error prints as a single
//! machine-greppable line `error[<class>]: <message>` on standard error.

use qal_core::campaign::{CampaignError, StepError};
use qal_core::kernels::KernelError;
use qal_core::regress::RegressError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("error[usage]: {0}")]
    Usage(String),
    #[error("error[data]: {0}")]
    Data(String),
    #[error("error[numerical]: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn data(message: impl Into<String>) -> CliError {
        CliError::Data(message.into())
    }

    pub fn usage(message: impl Into<String>) -> CliError {
        CliError::Usage(message.into())
    }
}

fn regress_is_numerical(e: &RegressError) -> bool {
    matches!(
        e,
        RegressError::SvrConvergence { .. }
            | RegressError::NonPsdKernel { .. }
            | RegressError::NotPositiveDefinite
            | RegressError::DegenerateResample
    )
}

impl From<CampaignError> for CliError {
    fn from(e: CampaignError) -> Self {
        match &e {
            CampaignError::Step { source, .. } => {
                let numerical = match source {
                    StepError::Regress(r) => regress_is_numerical(r),
                    StepError::Kernel(KernelError::Linalg(_)) => true,
                    _ => false,
                };
                if numerical {
                    CliError::Numerical(e.to_string())
                } else {
                    CliError::Data(e.to_string())
                }
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<RegressError> for CliError {
    fn from(e: RegressError) -> Self {
        if regress_is_numerical(&e) {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        match e {
            KernelError::Linalg(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<qal_core::descriptors::DescriptorError> for CliError {
    fn from(e: qal_core::descriptors::DescriptorError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<qal_core::qsim::QsimError> for CliError {
    fn from(e: qal_core::qsim::QsimError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
