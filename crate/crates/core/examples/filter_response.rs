// Low-pass design and its measured response.
//
// Prints the second-order sections of the default 3 Hz, order-4 design at
// 100 Hz, then compares the zero-phase amplitude measured on pure tones
// with the analytic squared Butterworth magnitude.

use gaitcf::preprocess::{design_lowpass, lowpass_values, magnitude_response, FilterSpec};

fn tone_amplitude(v: &[f64], rate: f64, f: f64) -> f64 {
    let w = 2.0 * std::f64::consts::PI * f / rate;
    let (s, c) = v.iter().enumerate().fold((0.0, 0.0), |(s, c), (k, x)| {
        (s + x * (w * k as f64).sin(), c + x * (w * k as f64).cos())
    });
    2.0 * (s * s + c * c).sqrt() / v.len() as f64
}

fn main() {
    let rate = 100.0;
    let spec = FilterSpec::default();
    for (i, s) in design_lowpass(spec.order, spec.cutoff_hz, rate).iter().enumerate() {
        println!("section {i}: b = {:?}  a = {:?}", s.b, s.a);
    }

    println!("\n{:>8} {:>14} {:>14}", "f (Hz)", "measured dB", "analytic dB");
    for f in [0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 10.0, 20.0] {
        let x: Vec<f64> = (0..3000)
            .map(|k| (2.0 * std::f64::consts::PI * f * k as f64 / rate).sin())
            .collect();
        let y = lowpass_values(&x, rate, &spec).unwrap();
        let measured = tone_amplitude(&y[1000..2000], rate, f);
        let analytic = magnitude_response(spec.order, spec.cutoff_hz, rate, f).powi(2);
        println!("{f:>8.1} {:>14.3} {:>14.3}", 20.0 * measured.log10(), 20.0 * analytic.log10());
    }
}
