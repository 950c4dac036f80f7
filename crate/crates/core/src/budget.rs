//! Compile-count and wall-clock budgets shared by the repair stages.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exhausted {
    #[error("compile budget exhausted")]
    Compiles,
    #[error("deadline exceeded")]
    Deadline,
}

/// Tracks how many analyzer runs ("compiles") remain and when the wall-clock
/// deadline passes. The deadline is checked at compile boundaries: every
/// stage loop re-checks before doing more work, so an expired budget stops
/// the pipeline within one compile of the deadline.
#[derive(Debug, Clone)]
pub struct Budget {
    max_compiles: u32,
    used: u32,
    deadline: Option<Instant>,
}

impl Budget {
    pub fn new(max_compiles: u32, deadline: Option<Instant>) -> Self {
        Budget {
            max_compiles,
            used: 0,
            deadline,
        }
    }

    pub fn unlimited() -> Self {
        Budget {
            max_compiles: u32::MAX,
            used: 0,
            deadline: None,
        }
    }

    pub fn compiles_used(&self) -> u32 {
        self.used
    }

    pub fn deadline(&self) -> Option<Instant> {
        self.deadline
    }

    /// Reserve one compile, failing if the budget is already spent.
    pub fn try_compile(&mut self) -> Result<(), Exhausted> {
        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                return Err(Exhausted::Deadline);
            }
        }
        if self.used >= self.max_compiles {
            return Err(Exhausted::Compiles);
        }
        self.used += 1;
        Ok(())
    }
}
