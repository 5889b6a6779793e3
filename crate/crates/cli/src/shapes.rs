//! Built-in signal shapes, shared by `--signal` strings and target files.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use zakfrft::{Error, Result, SignalExpr};

fn lo_half() -> f64 {
    -0.5
}
fn hi_half() -> f64 {
    0.5
}
fn lo_one() -> f64 {
    -1.0
}
fn hi_one() -> f64 {
    1.0
}
fn unit() -> f64 {
    1.0
}
fn four() -> u32 {
    4
}

/// `{"shape": "triangle", "a": -1, "b": 1}`; omitted bounds take the defaults below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Shape {
    Gaussian {
        #[serde(default = "unit")]
        u: f64,
    },
    Box {
        #[serde(default = "lo_half")]
        a: f64,
        #[serde(default = "hi_half")]
        b: f64,
    },
    Bump {
        #[serde(default = "lo_one")]
        a: f64,
        #[serde(default = "hi_one")]
        b: f64,
    },
    Triangle {
        #[serde(default = "lo_one")]
        a: f64,
        #[serde(default = "hi_one")]
        b: f64,
    },
    RaisedCosine {
        #[serde(default = "lo_half")]
        a: f64,
        #[serde(default = "hi_half")]
        b: f64,
        #[serde(default = "four")]
        power: u32,
    },
}

impl Shape {
    pub fn signal(&self) -> Result<SignalExpr> {
        let f = match *self {
            Shape::Gaussian { u } => SignalExpr::gaussian(u),
            Shape::Box { a, b } => SignalExpr::boxcar(a, b),
            Shape::Bump { a, b } => SignalExpr::bump(a, b),
            Shape::Triangle { a, b } => SignalExpr::triangle(a, b),
            Shape::RaisedCosine { a, b, power } => SignalExpr::raised_cosine(a, b, power),
        };
        f.validate()?;
        Ok(f)
    }
}

/// `name[:param...]`, for example `box:-1:1`, `gaussian:2`, `raised-cosine:0:1:6`.
pub fn parse_shape(text: &str) -> Result<Shape> {
    let mut parts = text.split(':');
    let name = parts.next().unwrap_or_default();
    let params: Vec<&str> = parts.collect();
    let num = |i: usize, default: f64| -> Result<f64> {
        match params.get(i) {
            None => Ok(default),
            Some(s) => parse_real(s),
        }
    };
    let arity = |max: usize| -> Result<()> {
        if params.len() > max {
            Err(Error::InvalidInput(format!("{name} takes at most {max} parameters: {text:?}")))
        } else {
            Ok(())
        }
    };
    let shape = match name {
        "gaussian" => {
            arity(1)?;
            Shape::Gaussian { u: num(0, 1.0)? }
        }
        "box" => {
            arity(2)?;
            Shape::Box {
                a: num(0, -0.5)?,
                b: num(1, 0.5)?,
            }
        }
        "bump" => {
            arity(2)?;
            Shape::Bump {
                a: num(0, -1.0)?,
                b: num(1, 1.0)?,
            }
        }
        "triangle" => {
            arity(2)?;
            Shape::Triangle {
                a: num(0, -1.0)?,
                b: num(1, 1.0)?,
            }
        }
        "raised-cosine" => {
            arity(3)?;
            let power = match params.get(2) {
                None => 4,
                Some(s) => s
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("raised-cosine power {s:?} is not a non-negative integer")))?,
            };
            Shape::RaisedCosine {
                a: num(0, -0.5)?,
                b: num(1, 0.5)?,
                power,
            }
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "unknown shape {name:?} (gaussian|box|bump|triangle|raised-cosine)"
            )))
        }
    };
    Ok(shape)
}

/// A real number, optionally as a multiple of pi: `0.3`, `pi`, `-pi/2`, `3pi/5`, `0.25pi`.
pub fn parse_real(text: &str) -> Result<f64> {
    let bad = || Error::InvalidInput(format!("{text:?} is not a number"));
    let s = text.trim();
    let v = if let Some(pos) = s.find("pi") {
        let (coef, rest) = (&s[..pos], &s[pos + 2..]);
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
        };
        let d = match rest {
            "" => 1.0,
            r => r.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
        };
        c * PI / d
    } else {
        s.parse::<f64>().map_err(|_| bad())?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(text.to_string()))
    }
}

pub fn parse_list<T>(text: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    text.split(',').filter(|s| !s.trim().is_empty()).map(|s| item(s.trim())).collect()
}

/// `a:b:n`, `n >= 2`.
pub fn parse_range(text: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(Error::InvalidInput(format!("range {text:?} is not a:b:n")));
    };
    let n: usize = n.parse().map_err(|_| Error::InvalidInput(format!("range count {n:?} is not an integer")))?;
    Ok((parse_real(a)?, parse_real(b)?, n))
}
