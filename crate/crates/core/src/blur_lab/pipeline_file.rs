//! Line-oriented pipeline descriptions.
//!
//! ```text
//! # comment
//! gaussian sigma=9
//! motion l=30 theta=1.2
//! rotational alpha=1.1 cx=256 cy=256
//! saltpepper frac=0.1 seed=42 region x=0 y=256 w=512 h=256
//! ```
//!
//! `cx`/`cy` default to the image centre and `samples` to 64. A salt-and-pepper
//! step without `seed=` takes the caller's default seed.

use std::collections::BTreeMap;

use super::{BlurKind, BlurPipeline, BlurSpec, DEFAULT_ROTATION_SAMPLES};
use crate::error::{Error, Result};
use crate::imagecore::Rect;

pub fn parse_pipeline(text: &str, default_seed: u64) -> Result<BlurPipeline> {
    let mut steps = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let step = parse_step(line, default_seed).map_err(|msg| Error::Pipeline { line: idx + 1, msg })?;
        step.validate().map_err(|e| Error::Pipeline {
            line: idx + 1,
            msg: e.to_string(),
        })?;
        steps.push(step);
    }
    if steps.is_empty() {
        return Err(Error::Pipeline {
            line: 0,
            msg: "pipeline has no steps".into(),
        });
    }
    BlurPipeline::new(steps)
}

type Params = BTreeMap<String, String>;

fn parse_params<'a>(tokens: impl Iterator<Item = &'a str>) -> std::result::Result<Params, String> {
    let mut out = Params::new();
    for tok in tokens {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, found `{tok}`"))?;
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(format!("duplicate key `{k}`"));
        }
    }
    Ok(out)
}

fn take<T: std::str::FromStr>(p: &mut Params, key: &str) -> std::result::Result<Option<T>, String> {
    p.remove(key)
        .map(|v| v.parse::<T>().map_err(|_| format!("bad value `{v}` for `{key}`")))
        .transpose()
}

fn require<T: std::str::FromStr>(p: &mut Params, key: &str) -> std::result::Result<T, String> {
    take(p, key)?.ok_or_else(|| format!("missing `{key}=`"))
}

fn parse_step(line: &str, default_seed: u64) -> std::result::Result<BlurSpec, String> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let (main, region_tokens) = match tokens.iter().position(|&t| t == "region") {
        Some(i) => (&tokens[..i], Some(&tokens[i + 1..])),
        None => (&tokens[..], None),
    };
    let (name, rest) = main.split_first().ok_or("empty step")?;
    let mut p = parse_params(rest.iter().copied())?;
    let kind = match *name {
        "gaussian" => BlurKind::Gaussian {
            sigma: require(&mut p, "sigma")?,
        },
        "motion" => BlurKind::Motion {
            length: require(&mut p, "l")?,
            theta: take(&mut p, "theta")?.unwrap_or(0.0),
        },
        "rotational" => {
            let alpha = require(&mut p, "alpha")?;
            let cx: Option<f64> = take(&mut p, "cx")?;
            let cy: Option<f64> = take(&mut p, "cy")?;
            let center = match (cx, cy) {
                (Some(x), Some(y)) => Some((x, y)),
                (None, None) => None,
                _ => return Err("give both `cx=` and `cy=` or neither".into()),
            };
            BlurKind::Rotational {
                alpha,
                center,
                samples: take(&mut p, "samples")?.unwrap_or(DEFAULT_ROTATION_SAMPLES),
            }
        }
        "saltpepper" | "salt_pepper" => BlurKind::SaltPepper {
            fraction: require(&mut p, "frac")?,
            seed: take(&mut p, "seed")?.unwrap_or(default_seed),
        },
        other => return Err(format!("unknown step `{other}`")),
    };
    if let Some(k) = p.keys().next() {
        return Err(format!("unexpected key `{k}` for `{name}`"));
    }
    let region = match region_tokens {
        None => None,
        Some(toks) => {
            let mut r = parse_params(toks.iter().copied())?;
            let rect = Rect {
                x: require(&mut r, "x")?,
                y: require(&mut r, "y")?,
                w: require(&mut r, "w")?,
                h: require(&mut r, "h")?,
            };
            if let Some(k) = r.keys().next() {
                return Err(format!("unexpected region key `{k}`"));
            }
            Some(rect)
        }
    };
    Ok(BlurSpec { kind, region })
}
