//! Grid data behind the standard figures.
//!
//! | id    | content                                                    |
//! |-------|------------------------------------------------------------|
//! | fig1  | tripartite GHZ, A inertial, B at `w`, C at `r`, grid 0..3  |
//! | fig2  | tripartite W, same layout                                  |
//! | fig3  | tripartite W subsystem coherences at four `(w, r)` points  |
//! | fig4a | GHZ, n = 1, 2, 3 accelerated at a common `r`, grid 0..5    |
//! | fig4b | W, one accelerated observer, N = 3..6                      |
//! | fig4c | W, one inertial observer, N = 3..6                         |
//! | fig4d | W, N = 40, n = 1, 10, 20, 30, 39                           |

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::table::{Cell, Table};
use crate::analysis::{closed_coherence, closed_subsystem_coherence, SweepTemplate};
use crate::coherence::SeriesTolerance;
use crate::rindler::AccelerationParameter;
use crate::states::{Family, ScenarioConfig};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4a,
    Fig4b,
    Fig4c,
    Fig4d,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::Fig1,
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4a,
        FigureId::Fig4b,
        FigureId::Fig4c,
        FigureId::Fig4d,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
            FigureId::Fig4c => "fig4c",
            FigureId::Fig4d => "fig4d",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                Error::Argument(format!(
                    "unknown figure `{s}`, expected one of fig1, fig2, fig3, fig4a, fig4b, fig4c, fig4d"
                ))
            })
    }
}

/// The `(w, r)` parameter sets of the four subsystem panels.
pub const FIG3_PANELS: [(&str, f64, f64); 4] = [
    ("a", 0.0, 0.0),
    ("b", 10.0, 10.0),
    ("c", 10.0, 1.0),
    ("d", 0.5, 5.0),
];

fn steps(max: f64, step: f64) -> Vec<f64> {
    let n = (max / step).round() as usize;
    (0..=n).map(|i| i as f64 * step).collect()
}

fn tripartite(family: Family, w: f64, r: f64) -> Result<ScenarioConfig> {
    ScenarioConfig::trailing(family, 3, &[w, r])
}

fn surface(family: Family, tol: &SeriesTolerance) -> Result<Table> {
    let axis = steps(3.0, 0.1);
    let pairs: Vec<(f64, f64)> = axis
        .iter()
        .flat_map(|&w| axis.iter().map(move |&r| (w, r)))
        .collect();
    let values = pairs
        .par_iter()
        .map(|&(w, r)| Ok(closed_coherence(&tripartite(family, w, r)?, tol)?.value))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(["w", "r", "C"]);
    for ((w, r), c) in pairs.into_iter().zip(values) {
        table.push(vec![Cell::Num(w), Cell::Num(r), Cell::Num(c)]);
    }
    Ok(table)
}

fn fig3(tol: &SeriesTolerance) -> Result<Table> {
    let mut table = Table::new([
        "panel", "w", "r", "C_ABC", "C_AB", "C_AC", "C_BC", "residual",
    ]);
    for (panel, w, r) in FIG3_PANELS {
        let cfg = tripartite(Family::W, w, r)?;
        let names = cfg.region_i_modes();
        let total = closed_coherence(&cfg, tol)?.value;
        let mut pairs = Vec::new();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            pairs.push(closed_subsystem_coherence(&cfg, &[&names[i], &names[j]], tol)?.value);
        }
        let residual = (pairs.iter().sum::<f64>() - total).abs();
        let mut row = vec![
            Cell::Text(panel.into()),
            Cell::Num(w),
            Cell::Num(r),
            Cell::Num(total),
        ];
        row.extend(pairs.into_iter().map(Cell::Num));
        row.push(Cell::Num(residual));
        table.push(row);
    }
    Ok(table)
}

fn curves(family: Family, sets: &[(usize, usize)], tol: &SeriesTolerance) -> Result<Table> {
    let grid = steps(5.0, 0.1);
    let jobs: Vec<(usize, usize, f64)> = sets
        .iter()
        .flat_map(|&(parties, n)| grid.iter().map(move |&r| (parties, n, r)))
        .collect();
    let values = jobs
        .par_iter()
        .map(|&(parties, accelerated, r)| {
            let t = SweepTemplate {
                family,
                parties,
                accelerated,
            };
            Ok(t.closed_at(AccelerationParameter::new(r)?, tol)?.value)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(["N", "n", "r", "C"]);
    for ((parties, n, r), c) in jobs.into_iter().zip(values) {
        table.push(vec![
            Cell::Int(parties as i64),
            Cell::Int(n as i64),
            Cell::Num(r),
            Cell::Num(c),
        ]);
    }
    Ok(table)
}

/// Builds the table for one figure.
pub fn figure_table(id: FigureId, tol: &SeriesTolerance) -> Result<Table> {
    match id {
        FigureId::Fig1 => surface(Family::Ghz, tol),
        FigureId::Fig2 => surface(Family::W, tol),
        FigureId::Fig3 => fig3(tol),
        FigureId::Fig4a => curves(Family::Ghz, &[(3, 1), (3, 2), (3, 3)], tol),
        FigureId::Fig4b => curves(Family::W, &[(3, 1), (4, 1), (5, 1), (6, 1)], tol),
        FigureId::Fig4c => curves(Family::W, &[(3, 2), (4, 3), (5, 4), (6, 5)], tol),
        FigureId::Fig4d => curves(
            Family::W,
            &[(40, 1), (40, 10), (40, 20), (40, 30), (40, 39)],
            tol,
        ),
    }
}
