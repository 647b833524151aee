use std::fmt;
use std::path::Path;

use rolecsp::grammar::constraint_to_value;
use rolecsp::ingestion::IngestError;
use rolecsp::SolverError;

/// Failure carrying its process exit code: 2 input, 3 infeasible, 4 endpoint.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Infeasible(String),
    Endpoint(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Endpoint(_) => 4,
        }
    }

    pub fn input(message: impl fmt::Display) -> Self {
        CliError::Input(message.to_string())
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Infeasible(m) | CliError::Endpoint(m) => f.write_str(m),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e.infeasible_detail() {
            Some(d) => CliError::Infeasible(format!(
                "[{}] {e}\noffending constraint (round {}): {}",
                e.code(),
                d.round,
                constraint_to_value(&d.constraint)
            )),
            None => CliError::Input(format!("[{}] {e}", e.code())),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Endpoint(_) | IngestError::ExtractionInvalid { .. } => {
                CliError::Endpoint(format!("[{}] {e}", e.code()))
            }
            _ => CliError::Input(format!("[{}] {e}", e.code())),
        }
    }
}
