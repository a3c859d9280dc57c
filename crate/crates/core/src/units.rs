//! Decibel conversions used throughout the crate.

use crate::Real;

pub fn db_to_linear<T: Real>(db: T) -> T {
    T::of(10.0).powf(db / T::of(10.0))
}

pub fn linear_to_db<T: Real>(linear: T) -> T {
    T::of(10.0) * linear.log10()
}

/// dBm/Hz to a linear power density in mW/Hz. Ratios of quantities converted
/// this way are dimensionless, which is all the link math needs.
pub fn dbm_to_linear<T: Real>(dbm: T) -> T {
    db_to_linear(dbm)
}
