use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

impl From<byzsel::Error> for CliError {
    fn from(e: byzsel::Error) -> Self {
        match e {
            byzsel::Error::InvalidValue { index, value } => CliError::Input(format!(
                "values[{index}] = {value} is invalid: values must be finite and non-negative"
            )),
            other => CliError::Input(other.to_string()),
        }
    }
}
