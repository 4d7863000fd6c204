use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter or input lies outside the domain the model accepts.
    /// `field` is the parameter name as used in scenario configuration.
    #[error("{field} = {value}: {reason}")]
    Domain {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A buck converter cannot raise its input voltage.
    #[error("infeasible for a buck converter: requested output {vout} V exceeds input {vin} V")]
    Infeasible { vin: f64, vout: f64 },

    /// A configuration error inside one scenario section.
    #[error("{section}.{source}")]
    Section {
        section: &'static str,
        #[source]
        source: Box<Error>,
    },

    /// A failure inside the simulation loop, tagged with the step index.
    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(field: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            field,
            value,
            reason,
        }
    }

    /// The offending configuration field, if the error carries one.
    pub fn field(&self) -> Option<&'static str> {
        match self {
            Error::Domain { field, .. } => Some(field),
            Error::Infeasible { .. } => None,
            Error::Section { source, .. } | Error::Step { source, .. } => source.field(),
        }
    }
}

/// Returns `Err` unless `value` is finite and satisfies `ok`.
pub(crate) fn ensure(
    field: &'static str,
    value: f64,
    ok: bool,
    reason: &'static str,
) -> Result<()> {
    if value.is_finite() && ok {
        Ok(())
    } else {
        Err(Error::domain(field, value, reason))
    }
}
