use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// How a verifier covers its domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    /// Seeded deterministic sample; the seed is recorded in certificates.
    Sampled { seed: u64, trials: usize },
}

impl Mode {
    pub fn rng(&self) -> ChaCha8Rng {
        match *self {
            Mode::Exhaustive => ChaCha8Rng::seed_from_u64(0),
            Mode::Sampled { seed, .. } => ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn is_exhaustive(&self) -> bool {
        matches!(self, Mode::Exhaustive)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exhaustive => write!(f, "exhaustive"),
            Mode::Sampled { seed, trials } => write!(f, "sampled(seed={seed},trials={trials})"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    /// Accepts `exhaustive`, `sampled`, or `sampled:<seed>:<trials>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(Mode::Exhaustive),
            "sampled" => Ok(Mode::Sampled { seed: 1, trials: 10_000 }),
            _ => {
                let bad = || Error::Format(format!("bad mode {s:?}"));
                let rest = s.strip_prefix("sampled:").ok_or_else(bad)?;
                let (seed, trials) = rest.split_once(':').ok_or_else(bad)?;
                Ok(Mode::Sampled {
                    seed: seed.parse().map_err(|_| bad())?,
                    trials: trials.parse().map_err(|_| bad())?,
                })
            }
        }
    }
}
