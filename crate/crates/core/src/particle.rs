//! Particle catalog.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::constants::*;
use crate::error::{ensure, Error, Result};

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ParticleSpec {
    pub name: String,
    pub mass_kg: f64,
    /// Free-decay lifetime; `None` means stable on experiment time scales.
    #[serde(default)]
    pub lifetime_s: Option<f64>,
    /// Annihilates on contact with matter (antimatter and positronium).
    #[serde(default)]
    pub annihilates: bool,
}

impl ParticleSpec {
    pub fn validate(&self) -> Result<()> {
        ensure(self.mass_kg.is_finite() && self.mass_kg > 0.0, || {
            format!("particle {}: mass must be positive", self.name)
        })?;
        if let Some(t) = self.lifetime_s {
            ensure(t.is_finite() && t > 0.0, || {
                format!("particle {}: lifetime must be positive", self.name)
            })?;
        }
        Ok(())
    }

    /// Survival factor exp(-t/tau) for free decay.
    pub fn survival(&self, t: f64) -> f64 {
        self.lifetime_s.map_or(1.0, |tau| (-t / tau).exp())
    }
}

#[derive(Debug, Clone)]
pub struct Catalog {
    entries: BTreeMap<String, ParticleSpec>,
}

#[derive(Deserialize)]
struct CatalogFile {
    particle: Vec<ParticleSpec>,
}

fn spec(name: &str, mass_kg: f64, lifetime_s: Option<f64>, annihilates: bool) -> ParticleSpec {
    ParticleSpec { name: name.into(), mass_kg, lifetime_s, annihilates }
}

impl Default for Catalog {
    fn default() -> Self {
        let ps = 2.0 * M_ELECTRON;
        let list = [
            // Neutron beta decay (~880 s) is neglected at the <100 s time scales involved.
            spec("n", M_NEUTRON, None, false),
            spec("H", M_HYDROGEN, None, false),
            spec("Hbar", M_HYDROGEN, None, true),
            spec("Mu", M_MUON + M_ELECTRON, Some(TAU_MUON), false),
            spec("Ps1S", ps, Some(TAU_PS_1S), true),
            spec("Ps2S", ps, Some(TAU_PS_2S), true),
            spec("Ps33", ps, Some(TAU_PS_RYDBERG), true),
        ];
        Self { entries: list.into_iter().map(|p| (p.name.clone(), p)).collect() }
    }
}

impl Catalog {
    /// Resolves a name or common alias.
    pub fn get(&self, name: &str) -> Result<&ParticleSpec> {
        let key = match name {
            "neutron" => "n",
            "hydrogen" => "H",
            "antihydrogen" | "H̄" | "hbar" => "Hbar",
            "muonium" | "mu" => "Mu",
            "Ps" | "ps" => "Ps1S",
            other => other,
        };
        self.entries.get(key).ok_or_else(|| Error::UnknownParticle(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Adds or replaces entries from TOML text with `[[particle]]` tables.
    pub fn merge_toml(&mut self, text: &str, origin: &str) -> Result<()> {
        let file: CatalogFile = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            line: e.span().map_or(0, |s| 1 + text[..s.start].matches('\n').count()),
            msg: e.message().to_string(),
        })?;
        for p in file.particle {
            p.validate()?;
            self.entries.insert(p.name.clone(), p);
        }
        Ok(())
    }

    pub fn with_overrides(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut cat = Self::default();
        cat.merge_toml(&text, &path.display().to_string())?;
        Ok(cat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aliases_resolve() {
        let c = Catalog::default();
        assert_eq!(c.get("antihydrogen").unwrap().name, "Hbar");
        assert!(c.get("Hbar").unwrap().annihilates);
        assert!(c.get("quark").is_err());
    }

    #[test]
    fn override_replaces_lifetime() {
        let mut c = Catalog::default();
        c.merge_toml("[[particle]]\nname = \"Mu\"\nmass_kg = 1.9e-28\nlifetime_s = 1.0\n", "t").unwrap();
        assert_eq!(c.get("Mu").unwrap().lifetime_s, Some(1.0));
        let bad = c.merge_toml("[[particle]]\nname = \"X\"\nmass_kg = -1.0\n", "t");
        assert!(bad.is_err());
    }
}
