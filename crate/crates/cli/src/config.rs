//! Run configuration: flat `key = value` lines, then an optional `[initial]`
//! section with one `k amplitude phase` line per mode. `#` starts a comment.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use capwave::dispersion::SIGMA_WATER_25C;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Dot,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Dot => "dot",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            _ => Err(format!("unknown format `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialMode {
    pub k: i64,
    pub amplitude: f64,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sigma: f64,
    pub kmax: u32,
    pub epsilon: f64,
    /// In units of the characteristic time `1 / (max|Z| max|B|)`.
    pub t_end: f64,
    pub tol: f64,
    pub samples: usize,
    pub cluster_id: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub initial: Vec<InitialMode>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sigma: SIGMA_WATER_25C,
            kmax: 100,
            epsilon: 1e-3,
            t_end: 50.0,
            tol: 1e-10,
            samples: 1000,
            cluster_id: None,
            out: None,
            format: None,
            initial: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        let mut in_initial = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: String| CliError::Config { line, msg };
            let s = raw.split('#').next().unwrap_or("").trim();
            if s.is_empty() {
                continue;
            }
            if s.starts_with('[') {
                if s != "[initial]" {
                    return Err(err(format!("unknown section {s}")));
                }
                in_initial = true;
                continue;
            }
            if in_initial {
                let f: Vec<&str> = s.split_whitespace().collect();
                if f.len() != 3 {
                    return Err(err("expected `k amplitude phase`".into()));
                }
                cfg.initial.push(InitialMode {
                    k: num(f[0]).map_err(err)?,
                    amplitude: num(f[1]).map_err(err)?,
                    phase: num(f[2]).map_err(err)?,
                });
                continue;
            }
            let (key, value) = s
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err("expected `key = value`".into()))?;
            match key {
                "sigma" => cfg.sigma = num(value).map_err(err)?,
                "kmax" => cfg.kmax = num(value).map_err(err)?,
                "epsilon" => cfg.epsilon = num(value).map_err(err)?,
                "t_end" => cfg.t_end = num(value).map_err(err)?,
                "tol" => cfg.tol = num(value).map_err(err)?,
                "samples" => cfg.samples = num(value).map_err(err)?,
                "cluster_id" => cfg.cluster_id = Some(num(value).map_err(err)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                "format" => cfg.format = Some(value.parse().map_err(err)?),
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |what: &str| Err(CliError::Usage(format!("{what} must be positive")));
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad("sigma");
        }
        if self.kmax == 0 {
            return bad("kmax");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(CliError::Usage("epsilon must lie in (0, 1)".into()));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end");
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad("tol");
        }
        if self.samples < 2 {
            return Err(CliError::Usage("samples must be at least 2".into()));
        }
        for m in &self.initial {
            if m.k <= 0 {
                return Err(CliError::Usage(format!(
                    "initial wavenumber {} must be positive",
                    m.k
                )));
            }
            if !(m.amplitude >= 0.0 && m.amplitude.is_finite()) || !m.phase.is_finite() {
                return Err(CliError::Usage(format!(
                    "bad initial condition for k = {}",
                    m.k
                )));
            }
        }
        Ok(())
    }

    /// `key = value` lines, shared by the config file and output headers.
    pub fn header_lines(&self) -> Vec<String> {
        let mut v = vec![
            format!("sigma = {:?}", self.sigma),
            format!("kmax = {}", self.kmax),
            format!("epsilon = {:?}", self.epsilon),
            format!("t_end = {:?}", self.t_end),
            format!("tol = {:?}", self.tol),
            format!("samples = {}", self.samples),
        ];
        if let Some(id) = self.cluster_id {
            v.push(format!("cluster_id = {id}"));
        }
        if let Some(p) = &self.out {
            v.push(format!("out = {}", p.display()));
        }
        if let Some(f) = self.format {
            v.push(format!("format = {}", f.as_str()));
        }
        v
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.header_lines() {
            writeln!(f, "{l}")?;
        }
        if !self.initial.is_empty() {
            writeln!(f, "\n[initial]")?;
            for m in &self.initial {
                writeln!(f, "{} {:?} {:?}", m.k, m.amplitude, m.phase)?;
            }
        }
        Ok(())
    }
}

fn num<T: FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("cannot parse `{s}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let text = "# run\nsigma = 1.0\nkmax=50 # small\nformat = json\n\n[initial]\n3 0.5 0\n5 0.25 -1.5\n";
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.sigma, 1.0);
        assert_eq!(c.kmax, 50);
        assert_eq!(c.format, Some(Format::Json));
        assert_eq!(c.initial.len(), 2);
        assert_eq!(
            c.initial[1],
            InitialMode {
                k: 5,
                amplitude: 0.25,
                phase: -1.5
            }
        );
        assert_eq!(c.epsilon, 1e-3);
    }

    #[test]
    fn reports_line_numbers() {
        match RunConfig::parse("sigma = 1\nbogus = 2\n") {
            Err(CliError::Config { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            RunConfig::parse("[initial]\n3 0.5\n"),
            Err(CliError::Config { line: 2, .. })
        ));
        assert!(matches!(
            RunConfig::parse("sigma = -1\n"),
            Err(CliError::Usage(_))
        ));
    }
}
