//! Coverage planning with the analytical bounds: achievable area for a given
//! sensing range and the node budget for replicated workspaces.
//!
//! Run with: cargo run --example coverage_planning

use cdoa_loc::coverage::{nodes_required, rect_coverage_area, square_coverage_area};

fn main() {
    println!("square workspace coverage vs sensing range");
    println!("{:>10} {:>14}", "range (m)", "area (m^2)");
    for r in [5.0, 10.0, 20.0, 40.0] {
        println!("{:>10} {:>14.1}", r, square_coverage_area(r));
    }

    println!("\nrectangular coverage at r = 10 m vs aspect factor k");
    println!("{:>6} {:>14}", "k", "area (m^2)");
    for k in [0.25, 0.5, 1.0, 2.0, 4.0] {
        println!("{:>6} {:>14.2}", k, rect_coverage_area(10.0, k));
    }
    println!("(maximum at k = 1: the square layout)");

    println!("\nnode budget for replicated unit workspaces");
    println!("{:>6} {:>8}", "units", "nodes");
    for n in 1..=6 {
        println!("{:>6} {:>8}", n, nodes_required(n));
    }
}
