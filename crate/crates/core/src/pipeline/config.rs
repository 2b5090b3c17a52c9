//! Run configuration shared by all subcommands.
//!
//! A config file holds flat `key=value` lines using the long flag names
//! without their dashes (`intrinsics=100,100,80,60`, `y-offset=-40`, ...).
//! Values given on the command line take precedence over the file.

use std::io::{BufRead, BufReader, Read};
use std::path::PathBuf;
use std::time::Duration;

use thiserror::Error;

use crate::depth::{CloudFilterConfig, FovConfig};
use crate::geometry::{Intrinsics, Pose};

pub const DEFAULT_WATCH_INTERVAL: Duration = Duration::from_secs(10);

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("config line {line}: {reason}")]
    Line { line: usize, reason: String },
    #[error("--{key}: {reason}")]
    Value { key: String, reason: String },
    #[error("missing required setting --{0}")]
    Missing(&'static str),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub intrinsics: Option<Intrinsics>,
    pub depth_mm: Option<f64>,
    pub threshold_c: Option<f64>,
    pub pose: Option<Pose>,
    pub beta_deg: Option<f64>,
    pub y_offset_mm: Option<f64>,
    pub intensity_min: Option<f64>,
    pub seed: Option<u64>,
    pub interval: Option<Duration>,
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("{:?} is not a finite number", f.trim()))
        })
        .collect()
}

/// Parses `fx,fy,cx,cy`.
pub fn parse_intrinsics(s: &str) -> Result<Intrinsics, String> {
    match parse_list(s)?.as_slice() {
        &[fx, fy, cx, cy] => Intrinsics::new(fx, fy, cx, cy).map_err(|e| e.to_string()),
        v => Err(format!("expected fx,fy,cx,cy, got {} values", v.len())),
    }
}

/// Parses `x,y,z` in mm.
pub fn parse_pose(s: &str) -> Result<Pose, String> {
    match parse_list(s)?.as_slice() {
        &[x, y, z] => Ok(Pose::new(x, y, z)),
        v => Err(format!("expected x,y,z, got {} values", v.len())),
    }
}

pub fn parse_finite(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("{s:?} is not a finite number"))
}

/// Seconds, fractional allowed.
pub fn parse_interval(s: &str) -> Result<Duration, String> {
    let secs = parse_finite(s)?;
    if secs <= 0.0 {
        return Err(format!("interval must be positive, got {secs}"));
    }
    Ok(Duration::from_secs_f64(secs))
}

impl RunConfig {
    pub fn parse<R: Read>(source: R) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for (idx, line) in BufReader::new(source).lines().enumerate() {
            let line_no = idx + 1;
            let line = line.map_err(|e| ConfigError::Line {
                line: line_no,
                reason: e.to_string(),
            })?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Line {
                line: line_no,
                reason: format!("expected key=value, got {line:?}"),
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|reason| ConfigError::Line {
                    line: line_no,
                    reason,
                })?;
        }
        Ok(cfg)
    }

    /// Sets one value by its flag name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let with_key = |r: String| format!("{key}: {r}");
        match key {
            "in" => self.input = Some(PathBuf::from(value)),
            "out" => self.output = Some(PathBuf::from(value)),
            "intrinsics" => self.intrinsics = Some(parse_intrinsics(value).map_err(with_key)?),
            "depth" => self.depth_mm = Some(parse_finite(value).map_err(with_key)?),
            "threshold" => self.threshold_c = Some(parse_finite(value).map_err(with_key)?),
            "pose" => self.pose = Some(parse_pose(value).map_err(with_key)?),
            "beta" => self.beta_deg = Some(parse_finite(value).map_err(with_key)?),
            "y-offset" => self.y_offset_mm = Some(parse_finite(value).map_err(with_key)?),
            "intensity-min" => self.intensity_min = Some(parse_finite(value).map_err(with_key)?),
            "seed" => {
                self.seed = Some(
                    value
                        .parse()
                        .map_err(|_| with_key(format!("{value:?} is not an unsigned integer")))?,
                )
            }
            "interval" => self.interval = Some(parse_interval(value).map_err(with_key)?),
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Values present in `over` replace those in `self`.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        RunConfig {
            input: over.input.or(self.input),
            output: over.output.or(self.output),
            intrinsics: over.intrinsics.or(self.intrinsics),
            depth_mm: over.depth_mm.or(self.depth_mm),
            threshold_c: over.threshold_c.or(self.threshold_c),
            pose: over.pose.or(self.pose),
            beta_deg: over.beta_deg.or(self.beta_deg),
            y_offset_mm: over.y_offset_mm.or(self.y_offset_mm),
            intensity_min: over.intensity_min.or(self.intensity_min),
            seed: over.seed.or(self.seed),
            interval: over.interval.or(self.interval),
        }
    }

    pub fn require_intrinsics(&self) -> Result<Intrinsics, ConfigError> {
        self.intrinsics.ok_or(ConfigError::Missing("intrinsics"))
    }

    pub fn require_threshold(&self) -> Result<f64, ConfigError> {
        self.threshold_c.ok_or(ConfigError::Missing("threshold"))
    }

    pub fn require_depth(&self) -> Result<f64, ConfigError> {
        self.depth_mm.ok_or(ConfigError::Missing("depth"))
    }

    pub fn require_input(&self) -> Result<&PathBuf, ConfigError> {
        self.input.as_ref().ok_or(ConfigError::Missing("in"))
    }

    pub fn pose_or_origin(&self) -> Pose {
        self.pose.unwrap_or_default()
    }

    pub fn fov(&self) -> Result<FovConfig, ConfigError> {
        FovConfig::new(
            self.beta_deg.unwrap_or(FovConfig::DEFAULT_BETA_DEG),
            self.y_offset_mm.unwrap_or(0.0),
        )
        .map_err(|e| ConfigError::Value {
            key: "beta".into(),
            reason: e.to_string(),
        })
    }

    pub fn cloud_filter(&self) -> Result<CloudFilterConfig, ConfigError> {
        CloudFilterConfig::new(
            self.intensity_min
                .unwrap_or(CloudFilterConfig::DEFAULT_INTENSITY_MIN),
        )
        .map_err(|e| ConfigError::Value {
            key: "intensity-min".into(),
            reason: e.to_string(),
        })
    }

    pub fn interval_or_default(&self) -> Duration {
        self.interval.unwrap_or(DEFAULT_WATCH_INTERVAL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_and_overlays_flags() {
        let text =
            "# rig\nintrinsics=100,100,80,60\nthreshold=44.45\npose=1,2,3\nbeta=55\ninterval=0.5\n";
        let file = RunConfig::parse(text.as_bytes()).unwrap();
        assert_eq!(
            file.intrinsics,
            Some(Intrinsics::new(100.0, 100.0, 80.0, 60.0).unwrap())
        );
        assert_eq!(file.pose, Some(Pose::new(1.0, 2.0, 3.0)));
        assert_eq!(file.interval, Some(Duration::from_millis(500)));

        let mut flags = RunConfig::default();
        flags.set("threshold", "50").unwrap();
        let merged = file.overlay(flags);
        assert_eq!(merged.threshold_c, Some(50.0));
        assert_eq!(merged.beta_deg, Some(55.0));
        assert_eq!(merged.fov().unwrap().beta_deg(), 55.0);
    }

    #[test]
    fn defaults() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.fov().unwrap(), FovConfig::default());
        assert_eq!(cfg.cloud_filter().unwrap(), CloudFilterConfig::default());
        assert_eq!(cfg.interval_or_default(), Duration::from_secs(10));
        assert_eq!(cfg.pose_or_origin(), Pose::default());
        assert_eq!(
            cfg.require_intrinsics(),
            Err(ConfigError::Missing("intrinsics"))
        );
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(
            RunConfig::parse("colour=blue\n".as_bytes()),
            Err(ConfigError::Line { line: 1, .. })
        ));
        assert!(matches!(
            RunConfig::parse("\nintrinsics=1,2,3\n".as_bytes()),
            Err(ConfigError::Line { line: 2, .. })
        ));
        assert!(matches!(
            RunConfig::parse("depth\n".as_bytes()),
            Err(ConfigError::Line { line: 1, .. })
        ));
        assert!(parse_intrinsics("0,100,80,60").is_err());
        assert!(parse_pose("1,2").is_err());
        assert!(parse_interval("0").is_err());
    }
}
