//! Discrete simulation time with a mandatory finite horizon.
//!
//! A simulation only approximates its target over a bounded span, so the
//! horizon is fixed at construction and there is deliberately no unbounded or
//! "run to convergence" mode anywhere in this crate. Needing more periods
//! means constructing a new, longer run, never mutating this one.

use std::fmt;

/// Step counter bounded by a finite horizon.
///
/// One step is one market period; every rate in the model (idea arrival,
/// birth, profit) is per step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimulationClock {
    t: u32,
    horizon: u32,
}

/// Errors raised by clock construction and stepping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClockError {
    /// The requested horizon is not a positive step count.
    HorizonInvalid { requested: u32 },
    /// The clock already sits at its horizon; the run must stop here.
    HorizonExceeded { horizon: u32 },
}

impl fmt::Display for ClockError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClockError::HorizonInvalid { requested } => {
                write!(f, "horizon must be at least 1, got {requested}")
            }
            ClockError::HorizonExceeded { horizon } => {
                write!(f, "cannot advance past the horizon ({horizon} steps)")
            }
        }
    }
}

impl std::error::Error for ClockError {}

impl SimulationClock {
    /// Create a clock at step 0 with the given finite horizon.
    pub fn new(horizon: u32) -> Result<Self, ClockError> {
        if horizon < 1 {
            return Err(ClockError::HorizonInvalid { requested: horizon });
        }
        Ok(Self { t: 0, horizon })
    }

    /// Advance by exactly one step. Fails at the horizon.
    pub fn advance(self) -> Result<Self, ClockError> {
        if self.t >= self.horizon {
            return Err(ClockError::HorizonExceeded {
                horizon: self.horizon,
            });
        }
        Ok(Self {
            t: self.t + 1,
            horizon: self.horizon,
        })
    }

    /// Current step index, `0 ..= horizon`.
    pub fn step(&self) -> u32 {
        self.t
    }

    /// Total step count fixed at construction.
    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    /// True once the final step has been taken.
    pub fn at_horizon(&self) -> bool {
        self.t == self.horizon
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_clock_starts_at_zero() {
        let clock = SimulationClock::new(10).unwrap();
        assert_eq!(clock.step(), 0);
        assert_eq!(clock.horizon(), 10);
    }

    #[test]
    fn zero_horizon_is_rejected() {
        assert_eq!(
            SimulationClock::new(0),
            Err(ClockError::HorizonInvalid { requested: 0 })
        );
    }

    #[test]
    fn advance_increments_by_one() {
        let clock = SimulationClock::new(10).unwrap().advance().unwrap();
        assert_eq!(clock.step(), 1);
        assert_eq!(clock.horizon(), 10);
    }

    #[test]
    fn advancing_past_horizon_fails() {
        let mut clock = SimulationClock::new(10).unwrap();
        for expected in 1..=10 {
            clock = clock.advance().unwrap();
            assert_eq!(clock.step(), expected);
        }
        assert!(clock.at_horizon());
        assert_eq!(
            clock.advance(),
            Err(ClockError::HorizonExceeded { horizon: 10 })
        );
    }

    #[test]
    fn long_horizons_are_accepted() {
        let clock = SimulationClock::new(500).unwrap();
        assert_eq!(clock.horizon(), 500);
    }
}
