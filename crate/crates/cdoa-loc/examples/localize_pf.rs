//! Track a robot along the boundary trajectory with the CDOA particle
//! filter and print the per-segment errors.
//!
//! Run with: cargo run --example localize_pf

use cdoa_loc::channel::ChannelModel;
use cdoa_loc::harness::{
    generate_trajectory, run_trial, ExperimentConfig, Method, TrajectoryKind,
};

fn main() {
    let config = ExperimentConfig::default();
    let layout = config.layout.build(&config.workspace).unwrap();
    let model = ChannelModel { noise_std_dbm: 2.0, ..ChannelModel::default() };
    let trajectory =
        generate_trajectory(&config.workspace, &TrajectoryKind::Boundary, 0.25).unwrap();

    let result = run_trial(
        Method::CdoaPf,
        &layout,
        &model,
        &trajectory,
        &config.hyperparams,
        &config.workspace,
        42,
    )
    .unwrap();

    println!("boundary trajectory, noise 2 dBm, {} waypoints", trajectory.waypoints.len());
    println!("{:>6} {:>18} {:>18} {:>9}", "wp", "truth", "estimate", "err (m)");
    for (i, wp) in result.estimates.iter().enumerate().step_by(8) {
        match wp.estimate {
            Some(est) => println!(
                "{:>6} {:>18} {:>18} {:>9.3}",
                i,
                wp.truth.to_string(),
                est.to_string(),
                est.distance_to(wp.truth)
            ),
            None => println!("{:>6} {:>18} {:>18} {:>9}", i, wp.truth.to_string(), "-", "-"),
        }
    }
    println!(
        "\nRMSE {:.3} m | mean TPI {:.3} ms | skipped waypoints {}",
        result.rmse,
        result.mean_tpi_seconds * 1e3,
        result.missing
    );
}
