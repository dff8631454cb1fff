//! Sweep a noiseless transmitter around a ring and compare the CDOA bearing
//! against the true centroid-to-robot bearing.
//!
//! Run with: cargo run --example bearing_sweep

use cdoa_loc::cdoa::{cdoa_from_gradient, gradient_rect4};
use cdoa_loc::channel::{ChannelModel, RssiSnapshot};
use cdoa_loc::geom::{angular_error, NodeLayout, Position, Workspace};

fn main() {
    let workspace = Workspace::new(0.0, 6.0, 0.0, 6.0).unwrap();
    let layout = NodeLayout::rectangular(&workspace, 40.0).unwrap();
    let model = ChannelModel::default();
    let center = layout.centroid();

    println!("ring radius 1 m around the centroid, noiseless channel");
    println!("{:>8} {:>12} {:>12} {:>10}", "deg", "true (rad)", "cdoa (rad)", "err (rad)");
    let mut worst: f64 = 0.0;
    for deg in (0..360).step_by(15) {
        let theta = (deg as f64).to_radians();
        let robot = Position::new(center.x + theta.cos(), center.y + theta.sin());
        let readings: Vec<f64> = layout
            .positions()
            .map(|node| model.noiseless_rssi(robot.distance_to(node)))
            .collect();
        let snap = RssiSnapshot::new(&layout, readings, 0.0, 1).unwrap();
        let bearing = cdoa_from_gradient(gradient_rect4(&layout, &snap).unwrap()).unwrap();
        let truth = center.bearing_to(robot);
        let err = angular_error(bearing, truth);
        worst = worst.max(err.abs());
        println!(
            "{:>8} {:>12.4} {:>12.4} {:>10.4}",
            deg,
            truth.radians(),
            bearing.radians(),
            err
        );
    }
    println!("\nworst bearing error on the ring: {worst:.4} rad");
}
