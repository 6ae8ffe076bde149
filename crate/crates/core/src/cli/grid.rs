use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Inclusive angle grid in degrees, written `start:stop:step` or as a single
/// angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("bad angle grid `{spec}`: {reason}")]
pub struct GridError {
    pub spec: String,
    pub reason: String,
}

/// Grids longer than this are refused.
pub const MAX_POINTS: usize = 100_000;

impl AngleGrid {
    pub fn single(deg: f64) -> Self {
        AngleGrid { start: deg, stop: deg, step: 1.0 }
    }

    /// Grid points from `start` up to `stop`; `stop` is included when it
    /// lies on the grid (within `1e-9` of a step).
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        // Round away accumulated binary noise so 0.1-steps print cleanly.
        (0..n).map(|k| ((self.start + k as f64 * self.step) * 1e9).round() / 1e9).collect()
    }
}

impl Default for AngleGrid {
    fn default() -> Self {
        AngleGrid { start: 0.0, stop: 180.0, step: 5.0 }
    }
}

impl fmt::Display for AngleGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start == self.stop {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}:{}:{}", self.start, self.stop, self.step)
        }
    }
}

impl FromStr for AngleGrid {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, GridError> {
        let bad = |reason: &str| GridError { spec: s.to_string(), reason: reason.to_string() };
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |p: &str| {
            p.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| bad(&format!("`{p}` is not a number")))
        };
        let grid = match parts.as_slice() {
            [x] => AngleGrid::single(num(x)?),
            [a, b, c] => AngleGrid { start: num(a)?, stop: num(b)?, step: num(c)? },
            _ => return Err(bad("expected start:stop:step or a single angle")),
        };
        if grid.step <= 0.0 {
            return Err(bad("step must be positive"));
        }
        if grid.stop < grid.start {
            return Err(bad("stop is below start"));
        }
        if (grid.stop - grid.start) / grid.step >= MAX_POINTS as f64 {
            return Err(bad(&format!("more than {MAX_POINTS} points")));
        }
        Ok(grid)
    }
}
