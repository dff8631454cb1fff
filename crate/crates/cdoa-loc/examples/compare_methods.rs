//! Run every registered localizer under identical seeds and print the
//! accuracy/efficiency comparison table.
//!
//! Run with: cargo run --release --example compare_methods

use cdoa_loc::channel::ChannelModel;
use cdoa_loc::harness::{
    compute_metrics, generate_trajectory, render_markdown, run_trials, ExperimentConfig, Method,
    TrajectoryKind,
};

fn main() {
    let config = ExperimentConfig::default();
    let layout = config.layout.build(&config.workspace).unwrap();
    let model = ChannelModel { noise_std_dbm: 2.0, ..ChannelModel::default() };
    let trajectory =
        generate_trajectory(&config.workspace, &TrajectoryKind::Cross, 0.25).unwrap();
    let trials = 5;

    let mut results = Vec::new();
    for method in Method::ALL {
        results.extend(
            run_trials(
                method,
                &layout,
                &model,
                &trajectory,
                &config.hyperparams,
                &config.workspace,
                42,
                trials,
            )
            .unwrap(),
        );
    }

    let summaries = compute_metrics(&results).unwrap();
    println!(
        "cross-coverage trajectory, noise 2 dBm, {trials} paired trials per method\n"
    );
    print!("{}", render_markdown(&summaries));
}
