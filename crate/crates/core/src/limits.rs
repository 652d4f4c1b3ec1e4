//! Capacity caps, overridable through the environment.

use crate::error::{Error, Result};

/// Environment variable overriding the largest admissible modulus.
pub const MAX_Q_ENV: &str = "MOLLIFIER_MAX_Q";
/// Environment variable overriding the largest admissible sieve length.
pub const MAX_SIEVE_ENV: &str = "MOLLIFIER_MAX_SIEVE";

pub const DEFAULT_MAX_Q: u64 = 100_000;
pub const DEFAULT_MAX_SIEVE: u64 = 20_000_000;

fn env_cap(var: &str, default: u64) -> u64 {
    std::env::var(var)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(default)
}

pub fn max_q() -> u64 {
    env_cap(MAX_Q_ENV, DEFAULT_MAX_Q)
}

pub fn max_sieve() -> u64 {
    env_cap(MAX_SIEVE_ENV, DEFAULT_MAX_SIEVE)
}

pub(crate) fn check(what: &'static str, value: u64, cap: u64) -> Result<()> {
    if value > cap {
        Err(Error::Capacity { what, value, cap })
    } else {
        Ok(())
    }
}
