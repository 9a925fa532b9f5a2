//! Plain-text exports of trajectories.

use std::io::Write;
use std::path::Path;

use super::Trajectory;
use crate::error::Result;

/// Long-format CSV: one row per snapshot and cell with columns `t, x, <fields...>`.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string(), "x".to_string()];
    header.extend(traj.field_names.iter().cloned());
    w.write_record(&header)?;
    let xs = traj.grid.centers();
    let mut row: Vec<String> = Vec::with_capacity(header.len());
    for (t, state) in traj.times.iter().zip(&traj.states) {
        for (i, x) in xs.iter().enumerate() {
            row.clear();
            row.push(t.to_string());
            row.push(x.to_string());
            row.extend(state.iter().map(|f| f[i].to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn save_trajectory_csv(traj: &Trajectory, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_trajectory_csv(traj, std::io::BufWriter::new(file))
}
