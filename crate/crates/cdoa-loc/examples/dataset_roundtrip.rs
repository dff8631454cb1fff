//! Export a simulated walk as a canonical CSV dataset, ingest it back, and
//! localize from the recorded readings.
//!
//! Run with: cargo run --release --example dataset_roundtrip

use cdoa_loc::channel::ChannelModel;
use cdoa_loc::geom::Position;
use cdoa_loc::harness::{
    evaluate_dataset, generate_trajectory, ingest_dataset, write_snapshot_csv, ExperimentConfig,
    Method, TrajectoryKind,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let config = ExperimentConfig::default();
    let layout = config.layout.build(&config.workspace).unwrap();
    let model = ChannelModel { noise_std_dbm: 2.0, ..ChannelModel::default() };
    let trajectory =
        generate_trajectory(&config.workspace, &TrajectoryKind::Cross, 0.25).unwrap();

    // Record one pass over the trajectory as a dataset.
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let snapshots: Vec<(_, Option<Position>)> = trajectory
        .waypoints
        .iter()
        .enumerate()
        .map(|(i, &robot)| {
            let snap = model
                .sample_window(&layout, robot, 1, i as f64, &mut rng)
                .unwrap();
            (snap, Some(robot))
        })
        .collect();

    let dir = std::env::temp_dir().join("cdoa-loc-dataset-roundtrip");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("walk.csv");
    write_snapshot_csv(&path, &layout, &snapshots).unwrap();
    println!("wrote {} rows to {}", snapshots.len() * layout.len(), path.display());

    let ingested = ingest_dataset(&path, &layout).unwrap();
    assert_eq!(ingested.snapshots, snapshots);
    println!(
        "re-ingested {} snapshots ({} rows used, {} diagnosed) - byte-exact round trip",
        ingested.snapshots.len(),
        ingested.rows_used,
        ingested.diagnostics.len()
    );

    for method in [Method::CdoaPf, Method::Trilateration] {
        let result = evaluate_dataset(
            method,
            &layout,
            &model,
            &ingested.snapshots,
            &config.hyperparams,
            &config.workspace,
            7,
        )
        .unwrap();
        println!("{method}: RMSE {:.3} m over the recorded walk", result.rmse);
    }
}
