use std::fmt;
use std::str::FromStr;

use crate::numeric::{linspace, logspace};

/// `lo:hi:count` (linear) or `lo:hi:count:log`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub log: bool,
}

impl RangeSpec {
    pub fn values(&self) -> Vec<f64> {
        match (self.count, self.log) {
            (1, _) => vec![self.lo],
            (_, true) => logspace(self.lo, self.hi, self.count),
            (_, false) => linspace(self.lo, self.hi, self.count),
        }
    }
}

impl FromStr for RangeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let log = match parts.as_slice() {
            [_, _, _] => false,
            [_, _, _, "log"] => true,
            [_, _, _, other] => return Err(format!("unknown spacing '{other}', expected 'log'")),
            _ => return Err(format!("expected lo:hi:count[:log], got '{s}'")),
        };
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("'{x}' is not a finite number"))
        };
        let (lo, hi) = (num(parts[0])?, num(parts[1])?);
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| format!("'{}' is not a count", parts[2]))?;
        if count == 0 {
            return Err("count must be positive".into());
        }
        if log && !(lo > 0.0 && hi > 0.0) {
            return Err("log spacing needs positive endpoints".into());
        }
        Ok(Self { lo, hi, count, log })
    }
}

impl fmt::Display for RangeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.count)?;
        if self.log {
            write!(f, ":log")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_linear_and_log() {
        let r: RangeSpec = "0.5:2:16".parse().unwrap();
        assert_eq!(r.values().len(), 16);
        assert_eq!(r.values()[0], 0.5);
        assert_eq!(r.values()[15], 2.0);
        let l: RangeSpec = "1e-3:1e-1:3:log".parse().unwrap();
        let v = l.values();
        assert!((v[1] - 1e-2).abs() < 1e-15);
        assert_eq!(l.to_string(), "0.001:0.1:3:log");
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["1:2", "1:2:0", "a:2:3", "1:2:3:lin", "0:1:3:log", "1:2:3:log:x", "1:inf:2"] {
            assert!(bad.parse::<RangeSpec>().is_err(), "{bad}");
        }
    }
}
