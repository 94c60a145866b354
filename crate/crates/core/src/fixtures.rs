//! Bundled data from the published evaluation of fourteen DNA sequence
//! analysis tool families.
//!
//! * `SCORES_CSV`: the published single-grade ratings, each encoded as the
//!   score where that grade has membership 1.
//! * `MATRICES_JSON`: three expert pairwise matrices. The original matrices
//!   were never released; these are constructed to pass the consistency gate
//!   and to reproduce the published top and bottom rankings.
//! * `PRIORS_CSV`: the published prior weights.
//! * `ENTROPY_TABLE_CSV`: the published entropy table, in the entropy export layout.
//! * `WINDOW_BPAS_JSON`: the six published window fusions as mass functions,
//!   with the unlisted remainder assigned to θ.

pub const SCORES_CSV: &str = include_str!("../fixtures/published/scores.csv");
pub const MATRICES_JSON: &str = include_str!("../fixtures/published/matrices.json");
pub const PRIORS_CSV: &str = include_str!("../fixtures/published/priors.csv");
pub const ENTROPY_TABLE_CSV: &str = include_str!("../fixtures/published/entropy_table.csv");
pub const WINDOW_BPAS_JSON: &str = include_str!("../fixtures/published/window_bpas.json");

/// Published window row labels, in order.
pub const WINDOW_LABELS: [&str; 6] = [
    "B1, B2, B3, B4",
    "B3, B4, B5, B6",
    "B5, B6, B7, B8",
    "B7, B8, B9, B10",
    "B9, B10, B11, B12",
    "B11, B12, B13, B14",
];

/// Published `Average` row: `(subset codes, mass)` for the nonzero cells.
pub const WINDOW_AVERAGE: [(&[&str], f64); 5] = [
    (&["H"], 0.1),
    (&["VL", "L"], 0.01),
    (&["L", "M"], 0.01),
    (&["M", "H"], 0.05),
    (&["H", "VH"], 0.05),
];

/// Tolerance on each published `Average` cell (two printed decimals).
pub const WINDOW_AVERAGE_TOLERANCE: f64 = 0.005;
