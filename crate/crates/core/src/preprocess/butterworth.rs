//! Digital Butterworth low-pass design as cascaded biquads.

use std::f64::consts::PI;

/// Second-order section with `a0` normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Biquad {
    pub fn dc_gain(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (self.a[0] + self.a[1] + self.a[2])
    }

    /// Transposed direct-form II state that holds the output at steady
    /// state for a constant unit input.
    fn steady_state(&self) -> [f64; 2] {
        let g = self.dc_gain();
        let z2 = self.b[2] - self.a[2] * g;
        let z1 = self.b[1] - self.a[1] * g + z2;
        [z1, z2]
    }
}

/// Low-pass Butterworth of even `order`, bilinear transform with the
/// cutoff prewarped so the -3 dB point lands exactly at `cutoff_hz`.
pub fn design_lowpass(order: usize, cutoff_hz: f64, rate_hz: f64) -> Vec<Biquad> {
    debug_assert!(order.is_multiple_of(2) && order > 0);
    let k = (PI * cutoff_hz / rate_hz).tan();
    let k2 = k * k;
    (0..order / 2)
        .map(|i| {
            // analog pole pair damping: 2ζ = 2 sin((2i+1)π / 2N)
            let two_zeta = 2.0 * ((2 * i + 1) as f64 * PI / (2 * order) as f64).sin();
            let a0 = 1.0 + two_zeta * k + k2;
            let gain = k2 / a0;
            Biquad {
                b: [gain, 2.0 * gain, gain],
                a: [1.0, 2.0 * (k2 - 1.0) / a0, (1.0 - two_zeta * k + k2) / a0],
            }
        })
        .collect()
}

/// |H(f)| of the analog-prototype response as mapped by the bilinear
/// transform (exact for the designed digital filter).
pub fn magnitude_response(order: usize, cutoff_hz: f64, rate_hz: f64, f_hz: f64) -> f64 {
    let ratio = (PI * f_hz / rate_hz).tan() / (PI * cutoff_hz / rate_hz).tan();
    1.0 / (1.0 + ratio.powi(2 * order as i32)).sqrt()
}

/// Runs the cascade in place. The state of every section starts at the
/// steady state for a constant input equal to `initial`.
pub fn sosfilt(sections: &[Biquad], data: &mut [f64], initial: f64) {
    let mut level = initial;
    for s in sections {
        let zi = s.steady_state();
        let (mut z1, mut z2) = (zi[0] * level, zi[1] * level);
        for x in data.iter_mut() {
            let input = *x;
            let y = s.b[0] * input + z1;
            z1 = s.b[1] * input - s.a[1] * y + z2;
            z2 = s.b[2] * input - s.a[2] * y;
            *x = y;
        }
        level *= s.dc_gain();
    }
}

/// Forward-backward filtering with odd (point) reflection of `pad`
/// samples at both ends.
pub fn sosfiltfilt(sections: &[Biquad], data: &[f64], pad: usize) -> Vec<f64> {
    let n = data.len();
    debug_assert!(n > pad);
    let (first, last) = (data[0], data[n - 1]);
    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend((1..=pad).rev().map(|i| 2.0 * first - data[i]));
    ext.extend_from_slice(data);
    ext.extend((1..=pad).map(|i| 2.0 * last - data[n - 1 - i]));

    let start = ext[0];
    sosfilt(sections, &mut ext, start);
    ext.reverse();
    let start = ext[0];
    sosfilt(sections, &mut ext, start);
    ext.reverse();
    ext[pad..pad + n].to_vec()
}
