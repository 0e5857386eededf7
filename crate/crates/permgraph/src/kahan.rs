/// Compensated (Kahan) summation for event clocks.
///
/// Simulation horizons are O(10) but a clock can accumulate hundreds of
/// thousands of exponential holding times; compensation keeps the drift at
/// the last-bit level.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new(value: f64) -> Self {
        KahanSum { sum: value, comp: 0.0 }
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}
