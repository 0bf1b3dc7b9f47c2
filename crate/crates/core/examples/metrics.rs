// Agreement statistics on a handful of hand-entered pairs.

use gaitcf::activity::Activity;
use gaitcf::metrics::{
    adjusted_r2, error_rate, error_rate_literal, mean_sd, pct_error, pearson, EstimatePair, Quantity, Source,
};

fn main() {
    let observed = [100.0, 200.0, 340.0, 410.0, 515.0];
    let calculated = [110.0, 190.0, 338.0, 418.0, 509.0];
    let pairs: Vec<EstimatePair> = observed
        .iter()
        .zip(&calculated)
        .map(|(&o, &c)| EstimatePair {
            subject_id: "demo".into(),
            cohort: None,
            activity: Activity::SixMwt,
            quantity: Quantity::Distance,
            source: Source::System,
            observed: o,
            calculated: c,
        })
        .collect();

    println!("error rate        {:.4}%", error_rate(&pairs).unwrap());
    println!("literal form      {:.4}%  (auditing only)", error_rate_literal(&pairs).unwrap());
    let pct: Vec<f64> = pairs.iter().filter_map(pct_error).collect();
    let m = mean_sd(&pct).unwrap();
    println!("pct error         mean {:+.3}%  SD {:.3}%", m.mean, m.sd);
    let c = pearson(&observed, &calculated).unwrap();
    println!("pearson           r = {:.5}, p = {:.3e}", c.r, c.p);
    println!("adjusted R2       {:.5}", adjusted_r2(&observed, &calculated, 1).unwrap());
}
