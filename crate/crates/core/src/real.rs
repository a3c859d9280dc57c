use num_traits::{Float, FloatConst, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Real scalar the channel math is generic over.
///
/// Implemented for `f32` and `f64`. `FftNum` carries the `Send + Sync +
/// FromPrimitive` bounds the transform path needs.
pub trait Real: Float + FloatConst + NumAssign + ToPrimitive + FftNum {
    /// Conversion from an `f64` constant. Panics only for values outside the
    /// target type's range, which never holds for the literals used here.
    fn of(x: f64) -> Self {
        num_traits::FromPrimitive::from_f64(x).expect("constant representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("real scalar converts to f64")
    }
}

impl<T> Real for T where T: Float + FloatConst + NumAssign + ToPrimitive + FftNum {}
