//! Parameter grids: `lo:hi:geom:n`, `lo:hi:lin:n`, or a comma list.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;

/// A parsed grid that remembers its source text, so the config echo
/// reproduces it exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    source: String,
    values: Vec<f64>,
}

impl Grid {
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn number(s: &str) -> Result<f64, CliError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("not a number: {s:?}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!(
            "grid values must be finite, got {s:?}"
        )))
    }
}

impl FromStr for Grid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        let values = match parts.as_slice() {
            [lo, hi, kind, n] => {
                let (lo, hi) = (number(lo)?, number(hi)?);
                let n: usize = n
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad point count in {s:?}")))?;
                if n < 2 {
                    return Err(CliError::Usage(format!(
                        "a range needs at least 2 points: {s:?}"
                    )));
                }
                let frac = |i: usize| i as f64 / (n - 1) as f64;
                match kind.trim() {
                    "geom" => {
                        if !(lo > 0.0 && hi > 0.0) {
                            return Err(CliError::Usage(format!(
                                "geometric ranges need positive ends: {s:?}"
                            )));
                        }
                        // exact end points; interior points by the log interpolation
                        (0..n)
                            .map(|i| match i {
                                0 => lo,
                                _ if i == n - 1 => hi,
                                _ => (lo.ln() + frac(i) * (hi.ln() - lo.ln())).exp(),
                            })
                            .collect()
                    }
                    "lin" => (0..n)
                        .map(|i| {
                            if i == n - 1 {
                                hi
                            } else {
                                lo + frac(i) * (hi - lo)
                            }
                        })
                        .collect(),
                    other => {
                        return Err(CliError::Usage(format!(
                            "range kind must be geom or lin, got {other:?}"
                        )))
                    }
                }
            }
            [_] => s.split(',').map(number).collect::<Result<Vec<_>, _>>()?,
            _ => {
                return Err(CliError::Usage(format!(
                    "expected lo:hi:geom:n, lo:hi:lin:n or a list, got {s:?}"
                )))
            }
        };
        Ok(Grid {
            source: s.to_string(),
            values,
        })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
