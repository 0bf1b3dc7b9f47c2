// Step counting and initial-contact localization on one synthetic trace.

use gaitcf::activity::Activity;
use gaitcf::pipeline::{process_series, DetectionConfig};
use gaitcf::synth::{generate_activity, Extent, GaitProfile, Morphology};

fn main() {
    let mut profile = GaitProfile::for_activity(Morphology::TdLike, Activity::FreeWalk, 11).unwrap();
    profile.noise_snr_db = 20.0;
    let (series, truth) = generate_activity(&profile, Activity::FreeWalk, Extent::Duration(15.0)).unwrap();

    let processed = process_series(&series, &DetectionConfig::default()).unwrap();
    println!("injected steps {}, detected {}", truth.step_count, processed.step_count());

    println!("\n{:>4} {:>8} {:>8} {:>8} {:>8} {:>8}", "step", "TO (s)", "IC (s)", "true IC", "peak g", "dur s");
    for (seg, &t_ic) in processed.segments.iter().zip(&truth.ic_times_s) {
        println!(
            "{:>4} {:>8.2} {:>8.2} {:>8.2} {:>8.3} {:>8.3}",
            seg.index,
            processed.t[seg.to_idx],
            processed.t[seg.ic_idx],
            t_ic,
            seg.ic_peak_g,
            seg.duration_s
        );
    }
}
