//! Run configuration: working field, localization set, caps and seed.
//!
//! Sources, later ones winning: built-in defaults, the `FROBRING_FIELD`
//! environment variable, a `key=value` config file, command-line flags.

use anyhow::{bail, Context, Result};
use frobring_core::ratfun::Localization;
use frobring_core::textio::parse_fp_poly;
use frobring_core::{FieldSpec, Poly};
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: Arc<FieldSpec>,
    pub s_polys: Vec<Poly>,
    pub seed: u64,
    pub height_cap: usize,
    pub structured: bool,
}

impl RunConfig {
    pub fn defaults() -> Result<RunConfig> {
        let field = std::env::var("FROBRING_FIELD").unwrap_or_else(|_| "p=2".to_string());
        let spec = FieldSpec::parse(&field)
            .with_context(|| format!("bad FROBRING_FIELD `{field}`"))?;
        let s_polys = vec![parse_fp_poly("z", spec.p())?];
        Ok(RunConfig {
            spec,
            s_polys,
            seed: 1,
            height_cap: 4,
            structured: false,
        })
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {} is not key=value", lineno + 1);
            };
            self.apply_kv(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "field" => self.set_field(value)?,
            "s" => self.set_s(value)?,
            "seed" => self.seed = value.parse().context("bad seed")?,
            "height_cap" => self.height_cap = value.parse().context("bad height_cap")?,
            "structured" => self.structured = value.parse().context("bad structured flag")?,
            other => bail!("unknown config key `{other}`"),
        }
        Ok(())
    }

    pub fn set_field(&mut self, value: &str) -> Result<()> {
        self.spec = FieldSpec::parse(value).with_context(|| format!("bad field `{value}`"))?;
        // re-parse S over the (possibly new) characteristic
        let texts: Vec<String> = self.s_polys.iter().map(|s| s.to_string()).collect();
        self.s_polys.clear();
        for t in texts {
            self.s_polys.push(parse_fp_poly(&t, self.spec.p())?);
        }
        Ok(())
    }

    pub fn set_s(&mut self, value: &str) -> Result<()> {
        let mut out = Vec::new();
        for part in value.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            out.push(parse_fp_poly(part, self.spec.p())?);
        }
        self.s_polys = out;
        Ok(())
    }

    pub fn localization(&self) -> Result<Localization> {
        Ok(Localization::new(&self.spec, self.s_polys.clone())?)
    }
}
