//! Set distances, band statistics, determinant winding, gap filling and
//! eigenvector diagnostics.

mod hausdorff;
mod lemma;
mod stats;
mod winding;

pub use hausdorff::{hausdorff_distance, Metric};
pub use lemma::{admissible_windows, decay_rate, lemma_main_verify, DecayFit, FixtureState, LemmaMainReport, Parity, SymmetricFixture, DECAY_FLOOR};
pub use stats::{band_stats, cantor_trend, gap_filling_check, BandStatistics, CantorTrend, GapFillingReport, TrendRow, BAND_SOLVER_CAP};
pub use winding::{det_winding, WindingReport, WINDING_MAX_DEPTH};
