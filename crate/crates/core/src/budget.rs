//! Memory guard for materialized enumerations.
//!
//! `QGRASS_BUDGET_MB` bounds how many items (subspaces, matrix entries,
//! enumerated cochains) a single computation may materialize. One megabyte of
//! budget buys [`ITEMS_PER_MB`] items.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const ITEMS_PER_MB: u64 = 8192;
pub const DEFAULT_BUDGET_MB: u64 = 2048;

/// Item limit derived from `QGRASS_BUDGET_MB` (read once per process).
pub fn max_items() -> u64 {
    static LIMIT: OnceLock<u64> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var("QGRASS_BUDGET_MB")
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
            .unwrap_or(DEFAULT_BUDGET_MB)
            .saturating_mul(ITEMS_PER_MB)
    })
}

/// Fails with [`Error::BudgetExceeded`] when `needed` items exceed the limit.
pub fn check(what: &'static str, needed: u128) -> Result<()> {
    check_against(what, needed, max_items())
}

pub fn check_against(what: &'static str, needed: u128, limit: u64) -> Result<()> {
    if needed > limit as u128 {
        return Err(Error::BudgetExceeded {
            what,
            needed: needed.to_string(),
            limit: limit.to_string(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn over_limit_is_rejected() {
        assert!(check_against("x", 10, 10).is_ok());
        let e = check_against("subspaces", 11, 10).unwrap_err();
        assert!(e.is_budget());
        assert!(e.to_string().contains("subspaces"));
    }
}
