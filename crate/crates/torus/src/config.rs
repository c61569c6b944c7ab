use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TorusError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("net construction failed: {0}")]
    Net(String),
    #[error("face adjustment failed for marker {marker:?}, axis {axis}, {side} side: {reason}")]
    Adjustment {
        marker: Vec<i64>,
        axis: usize,
        side: &'static str,
        reason: String,
    },
    #[error("verification scan failed: {0}")]
    Verification(String),
    #[error("refinement failed: {0}")]
    Refinement(String),
}

/// Parameters of one simulation run. All lengths are in half-units
/// (a lattice step is 2 half-units).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TorusConfig {
    /// Dimension, at least 2.
    pub n: usize,
    /// Side of the torus in half-units (even, so the lattice wraps cleanly).
    pub m: i64,
    /// Minimal face margin aimed for between parallel faces of nearby boxes.
    pub l: i64,
    /// Radius of the dense marker net (odd, so box faces land on odd levels).
    pub r1: i64,
    /// Radius controlling the sparse subnet and the layer ball.
    pub r2: i64,
    /// Seed for the pseudorandom net saturation phase.
    pub seed: u64,
}

impl TorusConfig {
    /// Default parameter sets per dimension.
    pub fn defaults(n: usize, seed: u64) -> Result<Self, TorusError> {
        let cfg = match n {
            2 | 3 => TorusConfig {
                n,
                m: 1480,
                l: 4,
                r1: 41,
                r2: 329,
                seed,
            },
            4 => TorusConfig {
                n,
                m: 760,
                l: 2,
                r1: 21,
                r2: 169,
                seed,
            },
            _ => {
                return Err(TorusError::Config(format!(
                    "no default parameters for dimension {n}"
                )))
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every arithmetic precondition the construction relies on.
    pub fn validate(&self) -> Result<(), TorusError> {
        let err = |msg: String| Err(TorusError::Config(msg));
        if self.n < 2 {
            return err(format!("dimension must be at least 2, got {}", self.n));
        }
        if self.m <= 0 || self.m % 2 != 0 {
            return err(format!("torus side must be positive and even, got {}", self.m));
        }
        if self.r1 <= 0 || self.r1 % 2 == 0 {
            return err(format!(
                "net radius r1 must be positive and odd so faces land between lattice points, got {}",
                self.r1
            ));
        }
        if self.l < 2 || self.l % 2 != 0 {
            return err(format!(
                "face margin l must be a positive even number of half-units, got {}",
                self.l
            ));
        }
        if self.r1 < 10 * self.l {
            return err(format!(
                "net radius r1 = {} leaves no adjustment room; need r1 >= 10*l = {}",
                self.r1,
                10 * self.l
            ));
        }
        if self.r2 < 8 * self.r1 {
            return err(format!(
                "subnet radius r2 = {} too small; need r2 >= 8*r1 = {}",
                self.r2,
                8 * self.r1
            ));
        }
        if self.m < 4 * (self.r1 + self.r2) {
            return err(format!(
                "torus side m = {} too small; need m >= 4*(r1+r2) = {}",
                self.m,
                4 * (self.r1 + self.r2)
            ));
        }
        Ok(())
    }

    pub fn torus(&self) -> Torus {
        Torus {
            n: self.n,
            m: self.m,
        }
    }
}

/// The ambient discrete torus: `n` axes, each of circumference `m` half-units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Torus {
    pub n: usize,
    pub m: i64,
}

impl Torus {
    /// Signed representative of `d` in `(-m/2, m/2]`.
    #[inline]
    pub fn wrap_diff(&self, d: i64) -> i64 {
        let mut r = d.rem_euclid(self.m);
        if r > self.m / 2 {
            r -= self.m;
        }
        r
    }

    /// Sup-metric distance between two torus points.
    #[inline]
    pub fn dist(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut best = 0;
        for i in 0..self.n {
            let d = self.wrap_diff(a[i] - b[i]).abs();
            if d > best {
                best = d;
            }
        }
        best
    }

    /// Coordinate normalized into `[0, m)`.
    #[inline]
    pub fn norm(&self, x: i64) -> i64 {
        x.rem_euclid(self.m)
    }

    /// Point normalized into `[0, m)^n`.
    pub fn norm_point(&self, p: &[i64]) -> Vec<i64> {
        p.iter().map(|&x| self.norm(x)).collect()
    }

    /// Offset of `b` relative to `a` using nearest representatives.
    pub fn rel(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        (0..self.n).map(|i| self.wrap_diff(b[i] - a[i])).collect()
    }

    pub fn volume(&self) -> i64 {
        let mut v = 1i64;
        for _ in 0..self.n {
            v = v.checked_mul(self.m).expect("torus volume overflows i64");
        }
        v
    }
}
