//! Winding-number recovery from a single wrapped sensor image.

mod edges;
mod floodfill;
pub mod maxflow;
mod mrf;

pub use edges::{detect_wrap_edges, WrapEdgeMask};
pub use floodfill::{count_conflicts, unwrap_floodfill, FloodFillReport};
pub use mrf::{mrf_energy, unwrap_mrf, unwrap_mrf_from, MrfConfig, MrfReport};

use serde::{Deserialize, Serialize};

use crate::codec::{reconstruct, SensorImage};
use crate::error::Result;
use crate::image::{IrradianceImage, WindingMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", rename_all = "lowercase")]
pub enum Solver {
    /// Edge detection followed by region growing. `tau = None` uses `I_max / 2`.
    FloodFill {
        tau: Option<f64>,
    },
    Mrf(MrfConfig),
}

impl Default for Solver {
    fn default() -> Self {
        Solver::FloodFill { tau: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub solver: String,
    pub conflicts: usize,
    pub negative_offset: u32,
    pub ceiling_clamped: usize,
    pub residual_edges: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_trace: Option<Vec<f64>>,
}

/// Recovers winding numbers with `solver`.
pub fn solve_winding(sensor: &SensorImage, solver: &Solver) -> Result<(WindingMap, DecodeReport)> {
    match solver {
        Solver::FloodFill { tau } => {
            let tau = tau.unwrap_or(sensor.params().i_max / 2.0);
            let edges = detect_wrap_edges(sensor, tau)?;
            let (winding, r) = unwrap_floodfill(sensor, &edges)?;
            Ok((
                winding,
                DecodeReport {
                    solver: "floodfill".into(),
                    conflicts: r.conflicts,
                    negative_offset: r.negative_offset,
                    ceiling_clamped: 0,
                    residual_edges: r.conflicts,
                    energy_trace: None,
                },
            ))
        }
        Solver::Mrf(config) => {
            let (winding, r) = unwrap_mrf(sensor, config)?;
            Ok((
                winding,
                DecodeReport {
                    solver: "mrf".into(),
                    conflicts: r.init.conflicts,
                    negative_offset: r.init.negative_offset,
                    ceiling_clamped: r.ceiling_clamped,
                    residual_edges: r.residual_edges,
                    energy_trace: Some(r.energy_trace),
                },
            ))
        }
    }
}

/// Recovers winding numbers and reconstructs the HDR image.
pub fn decode(sensor: &SensorImage, solver: &Solver) -> Result<(IrradianceImage, DecodeReport)> {
    let (winding, report) = solve_winding(sensor, solver)?;
    Ok((reconstruct(sensor, &winding)?, report))
}
