use std::fmt;
use std::fs::File;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::profile::{read_profile_samples, ProfileSurface};

/// Textual surface selector: `sphere`, `ellipsoid:b=..`, `sdelta:delta=..,eps=..` or `file:<path>`.
#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceSpec {
    Sphere,
    Ellipsoid { b: f64 },
    Pinched { delta: f64, eps: f64 },
    File(PathBuf),
}

impl SurfaceSpec {
    pub fn build(&self) -> Result<ProfileSurface> {
        match self {
            SurfaceSpec::Sphere => Ok(ProfileSurface::sphere()),
            SurfaceSpec::Ellipsoid { b } => ProfileSurface::ellipsoid(*b),
            SurfaceSpec::Pinched { delta, eps } => ProfileSurface::pinched_sphere(*delta, *eps),
            SurfaceSpec::File(path) => {
                let rows = read_profile_samples(File::open(path)?)?;
                ProfileSurface::from_samples(&rows)
            }
        }
    }
}

fn key_values(body: &str) -> Result<Vec<(String, f64)>> {
    body.split(',')
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, found `{kv}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("`{v}` is not a number")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn take(kvs: &[(String, f64)], key: &str) -> Result<f64> {
    kvs.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::Parse(format!("missing parameter `{key}`")))
}

fn only(kvs: &[(String, f64)], allowed: &[&str]) -> Result<()> {
    match kvs.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        Some((k, _)) => Err(Error::Parse(format!("unknown parameter `{k}`"))),
        None => Ok(()),
    }
}

impl FromStr for SurfaceSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (kind, body) = text.split_once(':').unwrap_or((text, ""));
        match kind {
            "sphere" if body.is_empty() => Ok(SurfaceSpec::Sphere),
            "ellipsoid" => {
                let kvs = key_values(body)?;
                only(&kvs, &["b"])?;
                Ok(SurfaceSpec::Ellipsoid { b: take(&kvs, "b")? })
            }
            "sdelta" => {
                let kvs = key_values(body)?;
                only(&kvs, &["delta", "eps"])?;
                Ok(SurfaceSpec::Pinched { delta: take(&kvs, "delta")?, eps: take(&kvs, "eps")? })
            }
            "file" if !body.is_empty() => Ok(SurfaceSpec::File(PathBuf::from(body))),
            _ => Err(Error::Parse(format!("unrecognized surface `{text}`"))),
        }
    }
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceSpec::Sphere => write!(out, "sphere"),
            SurfaceSpec::Ellipsoid { b } => write!(out, "ellipsoid:b={b}"),
            SurfaceSpec::Pinched { delta, eps } => write!(out, "sdelta:delta={delta},eps={eps}"),
            SurfaceSpec::File(p) => write!(out, "file:{}", p.display()),
        }
    }
}
