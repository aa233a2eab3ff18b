//! Overestimation measurements, parameter sweeps and table reproduction.

mod breakdown;
mod csv_out;
mod sweep;
mod tables;

pub use breakdown::{breakdown, breakdown_with, divisor_sum, Breakdown};
pub use csv_out::{emit_csv, write_csv, CsvRow};
pub use sweep::{
    assign_pair, sweep_delta, sweep_omega, DeltaRow, DeltaRule, OmegaPoint, OmegaRow, OmegaSource, PairMethod,
    SweepSpec, METHOD1_K, METHOD1_QUOTIENTS, METHOD2_K, SWEEP_MAX_POINTS_2D,
};
pub use tables::{
    reproduce_table, table4_column, CellStatus, TableCaps, TableCell, NORM_TOLERANCE, PRINT_TOLERANCE, TABLE1,
    TABLE2, TABLE3_1D, TABLE3_2D, TABLE4,
};
