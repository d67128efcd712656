//! File formats: curve JSON, trajectory directories, CSV and JSON reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::flow::{FlowControls, Frame, StopReason, Trajectory};
use crate::spectral::ModeEvolution;

/// `{ "dim": n, "points": [[x, y, ...], ...], "meta": {...} }`; the closing
/// edge is implicit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveFile {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
}

impl CurveFile {
    pub fn from_curve(curve: &Curve<f64>, meta: BTreeMap<String, String>) -> Self {
        Self {
            dim: curve.dim(),
            points: curve.points().map(|p| p.to_vec()).collect(),
            meta,
        }
    }

    pub fn to_curve(&self) -> Result<Curve<f64>> {
        if let Some((i, p)) = self.points.iter().enumerate().find(|(_, p)| p.len() != self.dim) {
            return Err(Error::InvalidCurve(format!("point {i} has {} coordinates, dim is {}", p.len(), self.dim)));
        }
        Curve::new(self.dim, self.points.concat())
    }
}

pub fn read_curve(path: &Path) -> Result<Curve<f64>> {
    let file: CurveFile = serde_json::from_slice(&fs::read(path)?)?;
    file.to_curve()
}

pub fn write_curve(path: &Path, curve: &Curve<f64>, meta: BTreeMap<String, String>) -> Result<()> {
    write_json(path, &CurveFile::from_curve(curve, meta))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn write_csv_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// `manifest.json` of a trajectory directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub dim: usize,
    pub n_points: usize,
    pub controls: FlowControls,
    pub t_estimate: Option<f64>,
    pub stop_reason: StopReason,
    pub steps: usize,
    pub n_frames: usize,
    pub extinction_point: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<serde_json::Value>,
}

/// Writes `manifest.json` and `frames.csv` (one row per frame: `t`, `dt`,
/// then the flattened vertex coordinates).
pub fn write_trajectory(dir: &Path, traj: &Trajectory<f64>, scenario: Option<serde_json::Value>) -> Result<()> {
    fs::create_dir_all(dir)?;
    let first = &traj.frames[0].curve;
    let manifest = Manifest {
        dim: first.dim(),
        n_points: first.len(),
        controls: traj.controls,
        t_estimate: traj.t_estimate,
        stop_reason: traj.stopped_reason,
        steps: traj.steps(),
        n_frames: traj.frames.len(),
        extinction_point: traj.extinction_point.clone(),
        scenario,
    };
    write_json(&dir.join("manifest.json"), &manifest)?;

    let mut w = csv::Writer::from_path(dir.join("frames.csv"))?;
    let mut header = vec!["t".to_string(), "dt".to_string()];
    for i in 0..manifest.n_points {
        for k in 0..manifest.dim {
            header.push(format!("p{i}_{k}"));
        }
    }
    w.write_record(&header)?;
    for f in &traj.frames {
        let mut row = Vec::with_capacity(header.len());
        row.push(format!("{:?}", f.t));
        row.push(format!("{:?}", f.dt));
        row.extend(f.curve.coords().iter().map(|v| format!("{v:?}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a directory written by [`write_trajectory`]. The per-step history
/// is not persisted, so `dt_history` comes back empty.
pub fn read_trajectory(dir: &Path) -> Result<(Trajectory<f64>, Manifest)> {
    let manifest: Manifest = serde_json::from_slice(&fs::read(dir.join("manifest.json"))?)?;
    let mut r = csv::Reader::from_path(dir.join("frames.csv"))?;
    let width = 2 + manifest.n_points * manifest.dim;
    let mut frames = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != width {
            return Err(Error::InvalidParameter(format!("frames.csv row has {} fields, expected {width}", rec.len())));
        }
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| Error::InvalidParameter(format!("bad number {s:?}: {e}"))))
            .collect::<Result<_>>()?;
        let curve = Curve::new(manifest.dim, vals[2..].to_vec())?;
        frames.push(Frame::new(vals[0], vals[1], curve));
    }
    if frames.is_empty() {
        return Err(Error::InvalidParameter("frames.csv has no frames".into()));
    }
    let traj = Trajectory {
        frames,
        dt_history: Vec::new(),
        t_estimate: manifest.t_estimate,
        extinction_point: manifest.extinction_point.clone(),
        stopped_reason: manifest.stop_reason,
        controls: manifest.controls,
    };
    Ok((traj, manifest))
}

#[derive(Serialize)]
struct ModeRow {
    tau: f64,
    c_minus1: f64,
    c_0: f64,
    tail_norm: f64,
    total_norm: f64,
}

/// Mode series CSV: `tau, c_minus1, c_0, tail_norm, total_norm`.
pub fn write_modes_csv(path: &Path, modes: &ModeEvolution<f64>) -> Result<()> {
    let rows: Vec<ModeRow> = modes
        .tau
        .iter()
        .zip(&modes.splits)
        .map(|(&tau, s)| ModeRow {
            tau,
            c_minus1: s.c_minus1,
            c_0: s.c_0,
            tail_norm: s.tail_norm,
            total_norm: s.total_norm,
        })
        .collect();
    write_csv_rows(path, &rows)
}
