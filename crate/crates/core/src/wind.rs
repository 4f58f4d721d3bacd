use core::fmt;


/// Quantized wind speed in tenths of m/s.
///
/// SCADA wind is stored to one decimal, so binning by the integer number of
/// tenths is exact and never compares floats for equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WindBin(pub i32);

impl WindBin {
    pub fn from_speed(wind: f64) -> Self {
        WindBin((wind * 10.0).round() as i32)
    }

    pub fn speed(self) -> f64 {
        f64::from(self.0) / 10.0
    }
}

impl fmt::Display for WindBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let t = self.0.unsigned_abs();
        write!(f, "{sign}{}.{}", t / 10, t % 10)
    }
}
