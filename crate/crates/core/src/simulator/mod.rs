//! Sampling of stationary SaS fields on dyadic skeletons, partial maxima,
//! and the scale function `b(T)`.

pub mod bt;
pub mod field;
pub mod grid;
pub mod maxima;
pub mod stable;

pub use bt::{
    bt_alpha_exact_indicator, bt_alpha_numeric, bt_exact_indicator, bt_numeric, bt_rate_exact,
    union_length_exact, DEFAULT_BT_BUDGET,
};
pub use field::{
    cell_mesh, kernel_norm_alpha, kernel_norm_p, replication_rng, series_terms, simulate_field,
    FieldSample, Method, SamplePoint, SeriesTruncation, SimulationOptions,
};
pub use grid::{ladder_offsets, GridSpec, OffsetSet, DEFAULT_POINT_BUDGET};
pub use maxima::{meta_path, partial_maxima, DatasetMeta, MaximaDataset, CSV_HEADER};
pub use stable::{sample_standard_sas, tail_constant};
