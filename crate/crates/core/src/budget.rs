use std::env;

use crate::error::{Error, Result};

/// Environment variable overriding the matrix memory cap, in bytes.
pub const MEM_CAP_ENV: &str = "TILEDSCAN_MEM_CAP";

/// Upper bound on the bytes the dense n x n matrices may occupy. Exceeding
/// it yields `CapacityExceeded` before anything is allocated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryBudget {
    cap: u64,
}

impl Default for MemoryBudget {
    fn default() -> Self {
        MemoryBudget {
            cap: Self::DEFAULT_CAP,
        }
    }
}

impl MemoryBudget {
    pub const DEFAULT_CAP: u64 = 4 << 30;

    pub fn new(cap: u64) -> Self {
        MemoryBudget { cap }
    }

    /// Reads `TILEDSCAN_MEM_CAP`, falling back to 4 GiB when unset.
    pub fn from_env() -> Result<Self> {
        match env::var(MEM_CAP_ENV) {
            Ok(raw) => raw
                .trim()
                .parse::<u64>()
                .map(MemoryBudget::new)
                .map_err(|_| {
                    Error::invalid(
                        "mem_cap",
                        format!("{MEM_CAP_ENV}={raw:?} is not a byte count"),
                    )
                }),
            Err(env::VarError::NotPresent) => Ok(Self::default()),
            Err(e) => Err(Error::invalid("mem_cap", e.to_string())),
        }
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn check(&self, required: u64) -> Result<()> {
        if required > self.cap {
            Err(Error::CapacityExceeded {
                required,
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }

    /// Distance matrix (4 bytes per entry) plus neighborhood matrix
    /// (charged 1 byte per entry).
    pub fn materialized_bytes(n: usize) -> u64 {
        let n = n as u64;
        n.saturating_mul(n).saturating_mul(5)
    }

    /// Bit-packed neighborhood matrix only.
    pub fn packed_bytes(n: usize) -> u64 {
        let words = n.div_ceil(64) as u64;
        (n as u64).saturating_mul(words).saturating_mul(8)
    }
}
