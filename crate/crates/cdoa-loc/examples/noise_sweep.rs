//! RMSE of every method as the RSSI noise grows from 1 to 4 dBm, emitted as
//! plot-ready CSV on stdout.
//!
//! Run with: cargo run --release --example noise_sweep

use cdoa_loc::channel::ChannelModel;
use cdoa_loc::harness::{
    generate_trajectory, run_trials, ExperimentConfig, Method, TrajectoryKind,
};

fn main() {
    let config = ExperimentConfig::default();
    let layout = config.layout.build(&config.workspace).unwrap();
    let trajectory =
        generate_trajectory(&config.workspace, &TrajectoryKind::Diagonal, 0.25).unwrap();
    let seeds = 5;

    println!("method,noise_dbm,mean_rmse_m");
    for method in Method::ALL {
        for noise in [1.0, 2.0, 3.0, 4.0] {
            let model = ChannelModel { noise_std_dbm: noise, ..ChannelModel::default() };
            let results = run_trials(
                method,
                &layout,
                &model,
                &trajectory,
                &config.hyperparams,
                &config.workspace,
                42,
                seeds,
            )
            .unwrap();
            let mean = results.iter().map(|r| r.rmse).sum::<f64>() / results.len() as f64;
            println!("{method},{noise},{mean:.4}");
        }
    }
}
