use super::lyapunov::LyapunovSeries;
use crate::{Error, Result};

/// Successive negative samples required to call the chaotic transient over.
pub const DEFAULT_CONSECUTIVE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChaosClass {
    /// Negative from the first sample on.
    NoChaos,
    /// A chaotic prefix followed by sustained negative exponents.
    Transient,
    /// No sustained negative run before the horizon (right-censored).
    StillChaotic,
}

impl ChaosClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ChaosClass::NoChaos => "no_chaos",
            ChaosClass::Transient => "transient",
            ChaosClass::StillChaotic => "still_chaotic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransientChaos {
    /// Length of the chaotic prefix in map steps.
    pub length: usize,
    pub class: ChaosClass,
}

/// Start time of the first run of `consecutive` negative exponents.
///
/// A run must be complete within the series. Without one, the trajectory is
/// still chaotic and the length is the horizon (or the time reached, for a
/// truncated series).
pub fn transient_chaos_length(lle: &LyapunovSeries, consecutive: usize) -> Result<TransientChaos> {
    if consecutive == 0 {
        return Err(Error::Precondition("consecutive must be at least 1".into()));
    }
    let values = &lle.raw.values;
    let mut run = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < 0.0 {
            run += 1;
            if run == consecutive {
                let start = i + 1 - consecutive;
                let length = lle.raw.times[start];
                let class = if start == 0 {
                    ChaosClass::NoChaos
                } else {
                    ChaosClass::Transient
                };
                return Ok(TransientChaos { length, class });
            }
        } else {
            run = 0;
        }
    }
    let length = if lle.truncated() {
        lle.raw.times.last().map_or(0, |t| t + lle.tau)
    } else {
        lle.horizon
    };
    Ok(TransientChaos {
        length,
        class: ChaosClass::StillChaotic,
    })
}
