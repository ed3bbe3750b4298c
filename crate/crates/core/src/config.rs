use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_PRECISION: u32 = 30;
pub const MIN_L_MAX: u64 = 24;

#[derive(Clone, Debug, Serialize)]
pub struct Config {
    /// Working precision in decimal digits.
    pub precision: u32,
    pub l_max: u64,
    pub height_cap: i64,
    /// Heegner table override; `None` uses the environment or the bundled table.
    pub table_path: Option<PathBuf>,
    pub emit_json: bool,
    /// Run a specific case instead of the automatic choice.
    pub force_case: Option<u8>,
    /// How often a failed reconstruction may double the precision.
    pub escalations: u32,
    /// Primes a certificate must not name, for finding further primes.
    #[serde(skip)]
    pub exclude: Vec<rug::Integer>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            precision: 50,
            l_max: 5000,
            height_cap: 1024,
            table_path: None,
            emit_json: false,
            force_case: None,
            escalations: 2,
            exclude: Vec::new(),
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.precision < MIN_PRECISION {
            return Err(Error::InvalidInput(format!("precision must be at least {MIN_PRECISION} digits")));
        }
        if self.l_max < MIN_L_MAX {
            return Err(Error::InvalidInput(format!("l_max must be at least {MIN_L_MAX}")));
        }
        if self.height_cap < 8 {
            return Err(Error::InvalidInput("height cap must be at least 8".into()));
        }
        if let Some(c) = self.force_case {
            if !(1..=3).contains(&c) {
                return Err(Error::InvalidInput(format!("case must be 1, 2 or 3, not {c}")));
            }
        }
        Ok(())
    }

    pub fn heegner_options(&self) -> crate::cm::HeegnerOptions {
        crate::cm::HeegnerOptions {
            digits: self.precision,
            height_cap: self.height_cap,
            escalations: self.escalations,
        }
    }
}
