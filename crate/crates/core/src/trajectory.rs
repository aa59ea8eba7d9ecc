//! Time-sampled sequences of spectral fields.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cnsf;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::ops;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Picard,
    Etd,
    HeatFlow,
}

/// Fields at strictly increasing times, the first of which is `t = 0`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    grid: GridSpec,
    times: Vec<f64>,
    fields: Vec<SpectralField>,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    grid: GridSpec,
    provenance: Provenance,
    times: Vec<f64>,
    files: Vec<String>,
}

impl Trajectory {
    pub fn new(initial: SpectralField, provenance: Provenance) -> Self {
        Self {
            grid: *initial.grid(),
            times: vec![0.0],
            fields: vec![initial],
            provenance,
        }
    }

    /// `e^{tΔ} a` at `t = 0` and every listed time.
    pub fn heat_flow(a: &SpectralField, times: &[f64]) -> Result<Self> {
        let mut tr = Self::new(a.clone(), Provenance::HeatFlow);
        for &t in times {
            tr.push(t, ops::heat_propagate(a, t)?)?;
        }
        Ok(tr)
    }

    pub fn push(&mut self, t: f64, field: SpectralField) -> Result<()> {
        if *field.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let last = *self.times.last().unwrap();
        if !(t > last) || !t.is_finite() {
            return Err(Error::InvalidParams(format!(
                "trajectory times must increase: {t} after {last}"
            )));
        }
        self.times.push(t);
        self.fields.push(field);
        Ok(())
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn initial(&self) -> &SpectralField {
        &self.fields[0]
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &SpectralField)> {
        self.times.iter().copied().zip(&self.fields)
    }

    /// Replaces the field at sample `i > 0`.
    pub fn replace(&mut self, i: usize, field: SpectralField) -> Result<()> {
        if i == 0 || i >= self.len() {
            return Err(Error::InvalidParams(format!("cannot replace sample {i}")));
        }
        if *field.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        self.fields[i] = field;
        Ok(())
    }

    /// Field stored at exactly time `t`.
    pub fn at(&self, t: f64) -> Option<&SpectralField> {
        self.times.iter().position(|&s| s == t).map(|i| &self.fields[i])
    }

    /// Writes `manifest.json` and one CNSF file per sample into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut files = Vec::with_capacity(self.len());
        for (i, f) in self.fields.iter().enumerate() {
            let name = format!("u_{i:05}.cnsf");
            cnsf::write(dir.join(&name), f)?;
            files.push(name);
        }
        let m = Manifest {
            grid: self.grid,
            provenance: self.provenance,
            times: self.times.clone(),
            files,
        };
        fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&m)?)?;
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let m: Manifest = serde_json::from_slice(&fs::read(dir.join("manifest.json"))?)?;
        if m.files.len() != m.times.len() || m.times.first() != Some(&0.0) {
            return Err(Error::InvalidParams("inconsistent trajectory manifest".into()));
        }
        let mut tr = Self::new(cnsf::read(dir.join(&m.files[0]))?, m.provenance);
        for (t, name) in m.times.iter().zip(&m.files).skip(1) {
            tr.push(*t, cnsf::read(dir.join(name))?)?;
        }
        if tr.grid != m.grid {
            return Err(Error::GridMismatch);
        }
        Ok(tr)
    }
}
