//! Command-line pipeline around `hsd-core`: file formats, run
//! configuration, and the `preprocess`/`fit-vocab`/`train`/`evaluate`/
//! `predict`/`report` commands.

pub mod commands;
pub mod config;
pub mod io;

pub use commands::UsageError;

/// Exit-code policy: 1 usage error, 2 data error, 3 numeric failure.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    if let Some(core_err) = err.downcast_ref::<hsd_core::Error>() {
        return match core_err {
            hsd_core::Error::NumericFailure { .. } | hsd_core::Error::CheckFailed { .. } => 3,
            _ => 2,
        };
    }
    2
}
