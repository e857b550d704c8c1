use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{short_digest, SolverSettings};
use super::fit::PowerLawFit;
use crate::evolve::FrameMode;
use crate::field::GridField;
use crate::states::SpecRecord;
use crate::tof::{DistributionDistance, TofDistribution};
use crate::units::{MassPair, UnitSystem};

/// Summary of one current-based arrival distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurrentStats {
    pub mean_t: f64,
    pub std_t: f64,
    pub clipped_negativity: f64,
    pub captured_fraction: f64,
    pub window: (f64, f64),
    pub flux_warning: bool,
}

impl From<&TofDistribution> for CurrentStats {
    fn from(d: &TofDistribution) -> Self {
        CurrentStats {
            mean_t: d.mean_t,
            std_t: d.std_t,
            clipped_negativity: d.clipped_negativity,
            captured_fraction: d.captured_fraction,
            window: d.window,
            flux_warning: d.flux_warning,
        }
    }
}

/// One evaluated (state, mass, frame) point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub digest: String,
    pub label: String,
    pub mode: FrameMode,
    pub spec: SpecRecord,
    pub mass: MassPair,
    pub field_strength: f64,
    pub mean_p0: f64,
    pub epsilon: f64,
    pub t_ehrenfest: f64,
    pub sigma_full: f64,
    pub sigma_asymptotic: f64,
    /// Mean-position crossing of the spectral solver, when it ran.
    pub t_solver: Option<f64>,
    pub current: Option<CurrentStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceRecord {
    pub first: String,
    pub second: String,
    pub distance: DistributionDistance,
}

/// Unit system, solver settings, version and threading behind a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_digest: String,
    pub unit: UnitSystem,
    pub solver: SolverSettings,
    pub code_version: String,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub records: Vec<RunRecord>,
    pub distances: Vec<DistanceRecord>,
    pub fits: Vec<PowerLawFit>,
    pub flags: BTreeMap<String, bool>,
    pub values: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub manifest: Manifest,
    #[serde(skip)]
    pub distributions: Vec<(String, TofDistribution)>,
    #[serde(skip)]
    pub snapshots: Vec<Snapshots>,
}

/// Stored wavefunctions of one run, when the solver was asked to keep them.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshots {
    pub label: String,
    pub times: Vec<f64>,
    pub fields: Vec<GridField>,
}

/// Digest of a single run: the config digest extended by the run label.
pub fn run_digest(config_digest: &str, label: &str) -> String {
    short_digest(format!("{config_digest}/{label}").as_bytes())
}

impl ExperimentReport {
    pub fn new(experiment: &str, manifest: Manifest) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            records: Vec::new(),
            distances: Vec::new(),
            fits: Vec::new(),
            flags: BTreeMap::new(),
            values: BTreeMap::new(),
            warnings: Vec::new(),
            manifest,
            distributions: Vec::new(),
            snapshots: Vec::new(),
        }
    }

    pub fn record(&self, label: &str) -> Option<&RunRecord> {
        self.records.iter().find(|r| r.label == label)
    }

    pub fn distribution(&self, label: &str) -> Option<&TofDistribution> {
        self.distributions.iter().find(|(l, _)| l == label).map(|(_, d)| d)
    }

    pub fn flag(&self, name: &str) -> Option<bool> {
        self.flags.get(name).copied()
    }

    /// Orders records and tables so output is independent of completion order.
    pub fn sort(&mut self) {
        self.records.sort_by(|a, b| a.digest.cmp(&b.digest).then(a.label.cmp(&b.label)));
        self.distances
            .sort_by(|a, b| (&a.first, &a.second).cmp(&(&b.first, &b.second)));
        self.fits.sort_by(|a, b| a.name.cmp(&b.name));
        self.distributions.sort_by(|a, b| a.0.cmp(&b.0));
        self.snapshots.sort_by(|a, b| a.label.cmp(&b.label));
    }

    pub fn records_csv(&self) -> String {
        let mut out = String::from(
            "digest,label,mode,kind,z0,delta,delta0,c_plus_re,c_plus_im,c_minus_re,c_minus_im,\
             m_inertial,m_gravitational,field_strength,mean_p0,epsilon,t_ehrenfest,sigma_full,\
             sigma_asymptotic,t_solver,current_mean_t,current_std_t,clipped_negativity,\
             captured_fraction,window_lo,window_hi,flux_warning,config_digest\n",
        );
        for r in &self.records {
            let s = &r.spec;
            let _ = write!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.digest,
                r.label,
                r.mode,
                s.kind,
                s.z0,
                s.delta,
                s.delta0,
                s.c_plus_re,
                s.c_plus_im,
                s.c_minus_re,
                s.c_minus_im,
                r.mass.m_inertial,
                r.mass.m_gravitational,
                r.field_strength,
                r.mean_p0,
                r.epsilon,
                r.t_ehrenfest,
                r.sigma_full,
                r.sigma_asymptotic,
                opt(r.t_solver),
            );
            match &r.current {
                Some(c) => {
                    let _ = write!(
                        out,
                        ",{},{},{},{},{},{},{}",
                        c.mean_t,
                        c.std_t,
                        c.clipped_negativity,
                        c.captured_fraction,
                        c.window.0,
                        c.window.1,
                        c.flux_warning
                    );
                }
                None => out.push_str(",,,,,,,"),
            }
            let _ = writeln!(out, ",{}", self.manifest.config_digest);
        }
        out
    }

    pub fn distances_csv(&self) -> String {
        let mut out = String::from("first,second,l1,ks,config_digest\n");
        for d in &self.distances {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                d.first, d.second, d.distance.l1, d.distance.ks, self.manifest.config_digest
            );
        }
        out
    }

    pub fn fits_csv(&self) -> String {
        let mut out = String::from("name,exponent,stderr,prefactor,points,config_digest\n");
        for f in &self.fits {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                f.name, f.exponent, f.stderr, f.prefactor, f.points, self.manifest.config_digest
            );
        }
        out
    }

    /// Writes every table as `{experiment}[_{table}]_{digest}.csv`, one
    /// `{t, density, cumulative}` CSV plus summary JSON per distribution, and
    /// returns the paths written. The JSON manifest is left to the caller.
    pub fn write_tables(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let digest = &self.manifest.config_digest;
        let exp = &self.experiment;
        let mut written = Vec::new();
        let mut put = |name: String, body: String| -> io::Result<()> {
            let path = dir.join(name);
            fs::write(&path, body)?;
            written.push(path);
            Ok(())
        };
        put(format!("{exp}_{digest}.csv"), self.records_csv())?;
        if !self.distances.is_empty() {
            put(format!("{exp}_distances_{digest}.csv"), self.distances_csv())?;
        }
        if !self.fits.is_empty() {
            put(format!("{exp}_fits_{digest}.csv"), self.fits_csv())?;
        }
        for (label, d) in &self.distributions {
            put(format!("{exp}_tof-{label}_{digest}.csv"), distribution_csv(d, digest))?;
            put(
                format!("{exp}_tof-{label}_{digest}.json"),
                distribution_summary(d, digest).to_string(),
            )?;
        }
        Ok(written)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `t,density,cumulative` rows at full round-trip precision.
pub fn distribution_csv(d: &TofDistribution, config_digest: &str) -> String {
    let mut out = format!("# config_digest={config_digest}\nt,density,cumulative\n");
    for ((t, rho), c) in d.times.iter().zip(&d.density).zip(d.cumulative()) {
        let _ = writeln!(out, "{t},{rho},{c}");
    }
    out
}

pub fn distribution_summary(d: &TofDistribution, config_digest: &str) -> serde_json::Value {
    serde_json::json!({
        "config_digest": config_digest,
        "mean_t": d.mean_t,
        "std_t": d.std_t,
        "clipped_negativity": d.clipped_negativity,
        "window": [d.window.0, d.window.1],
    })
}
