//! Track a robot along the diagonal trajectory with the grid localizer and
//! show how the posterior argmax follows the motion.
//!
//! Run with: cargo run --example localize_em

use cdoa_loc::channel::ChannelModel;
use cdoa_loc::harness::{
    generate_trajectory, run_trial, ExperimentConfig, Method, TrajectoryKind,
};

fn main() {
    let config = ExperimentConfig::default();
    let layout = config.layout.build(&config.workspace).unwrap();
    let model = ChannelModel { noise_std_dbm: 2.0, ..ChannelModel::default() };
    let trajectory =
        generate_trajectory(&config.workspace, &TrajectoryKind::Diagonal, 0.25).unwrap();

    let result = run_trial(
        Method::CdoaEm,
        &layout,
        &model,
        &trajectory,
        &config.hyperparams,
        &config.workspace,
        42,
    )
    .unwrap();

    println!(
        "diagonal trajectory, noise 2 dBm, grid resolution {} m",
        config.hyperparams.em_resolution
    );
    println!("{:>6} {:>18} {:>18} {:>9}", "wp", "truth", "estimate", "err (m)");
    for (i, wp) in result.estimates.iter().enumerate().step_by(6) {
        match wp.estimate {
            Some(est) => println!(
                "{:>6} {:>18} {:>18} {:>9.3}",
                i,
                wp.truth.to_string(),
                est.to_string(),
                est.distance_to(wp.truth)
            ),
            None => println!(
                "{:>6} {:>18} {:>18} {:>9}",
                i,
                wp.truth.to_string(),
                "(skipped)",
                "-"
            ),
        }
    }
    println!(
        "\nRMSE {:.3} m | mean TPI {:.3} ms | skipped waypoints {}",
        result.rmse,
        result.mean_tpi_seconds * 1e3,
        result.missing
    );
    println!("(skips happen where the field is symmetric and the gradient vanishes)");
}
