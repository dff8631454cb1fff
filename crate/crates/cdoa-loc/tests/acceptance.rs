//! Acceptance suite: every release gate in one place, one test per
//! criterion, each printing a pass/fail line (visible with
//! `cargo test --test acceptance -- --nocapture`).
//!
//! The comparison protocol (criteria 1, 2 and 5) is executed once and
//! shared: 6x6 m workspace, path loss exponent 3, noise standard deviation
//! swept over 1-4 dBm, boundary/cross/diagonal trajectories, 20 paired
//! seeds, every registered method under default hyperparameters.

mod common;

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use cdoa_loc::baselines::{trilaterate_distances, PfEkfConfig, PfEkfLocalizer};
use cdoa_loc::cdoa::{cdoa_from_gradient, gradient_rect4};
use cdoa_loc::channel::{ChannelModel, RssiSnapshot};
use cdoa_loc::coverage::{nodes_required, rect_coverage_area, square_coverage_area};
use cdoa_loc::geom::{angular_error, Angle, NodeLayout, Position, Workspace};
use cdoa_loc::harness::{
    ablate_particles, evaluate_dataset, generate_trajectory, ingest_dataset, run_trial,
    run_trials, write_snapshot_csv, ExperimentConfig, Method, TrajectoryKind,
};
use cdoa_loc::localizers::{
    cdoa_likelihood, cdoa_log_likelihood, normalize_weights, BearingModel, MeasurementWindow,
    ParticleFilter, ParticleFilterConfig,
};

use common::{
    bootstrap_prob_mean_le_zero, isotonic_residual, mann_kendall_s, mean, pooled_std,
};

const BASE_SEED: u64 = 20_000;

fn ws6() -> Workspace {
    Workspace::new(0.0, 6.0, 0.0, 6.0).unwrap()
}

fn layout6() -> NodeLayout {
    NodeLayout::rectangular(&ws6(), 40.0).unwrap()
}

struct MethodStats {
    method: Method,
    /// Grand-mean RMSE per seed, averaged over the 12 protocol cells.
    per_seed_rmse: Vec<f64>,
    mean_rmse: f64,
    mean_tpi_ms: f64,
}

struct SharedProtocol {
    stats: Vec<MethodStats>,
    wall: Duration,
}

impl SharedProtocol {
    fn for_method(&self, method: Method) -> &MethodStats {
        self.stats.iter().find(|s| s.method == method).expect("method present")
    }
}

/// Table-style comparison run shared by criteria 1, 2 and 5.
fn shared_protocol() -> &'static SharedProtocol {
    static RUN: OnceLock<SharedProtocol> = OnceLock::new();
    RUN.get_or_init(|| {
        let started = Instant::now();
        let config = ExperimentConfig::default();
        let layout = config.layout.build(&config.workspace).unwrap();
        let seeds = 20usize;

        let trajectories: Vec<_> = [
            TrajectoryKind::Boundary,
            TrajectoryKind::Cross,
            TrajectoryKind::Diagonal,
        ]
        .iter()
        .map(|kind| generate_trajectory(&config.workspace, kind, 0.25).unwrap())
        .collect();

        let mut stats = Vec::new();
        for method in Method::ALL {
            let mut per_seed = vec![Vec::new(); seeds];
            let mut tpis = Vec::new();
            for trajectory in &trajectories {
                for noise in [1.0, 2.0, 3.0, 4.0] {
                    let model =
                        ChannelModel { noise_std_dbm: noise, ..ChannelModel::default() };
                    let results = run_trials(
                        method,
                        &layout,
                        &model,
                        trajectory,
                        &config.hyperparams,
                        &config.workspace,
                        BASE_SEED,
                        seeds,
                    )
                    .unwrap();
                    for (i, r) in results.iter().enumerate() {
                        per_seed[i].push(r.rmse);
                        tpis.push(r.mean_tpi_seconds * 1e3);
                    }
                }
            }
            let per_seed_rmse: Vec<f64> = per_seed.iter().map(|v| mean(v)).collect();
            stats.push(MethodStats {
                method,
                mean_rmse: mean(&per_seed_rmse),
                per_seed_rmse,
                mean_tpi_ms: mean(&tpis),
            });
        }
        SharedProtocol { stats, wall: started.elapsed() }
    })
}

#[test]
fn criterion_1_simulation_rmse_reproduction() {
    let run = shared_protocol();
    let em = run.for_method(Method::CdoaEm).mean_rmse;
    let pf = run.for_method(Method::CdoaPf).mean_rmse;
    let tri = run.for_method(Method::Trilateration).mean_rmse;
    let wcl = run.for_method(Method::Wcl).mean_rmse;
    let wall = run.wall;

    let pass = em <= 0.30
        && pf <= 0.35
        && (0.5..=2.5).contains(&tri)
        && (1.2..=4.0).contains(&wcl)
        && wall < Duration::from_secs(300);
    println!(
        "criterion 1 (simulation RMSE reproduction): {} - cdoa-em {em:.3} m (<=0.30), \
         cdoa-pf {pf:.3} m (<=0.35), trilateration {tri:.3} m (in [0.5, 2.5]), \
         wcl {wcl:.3} m (in [1.2, 4.0]), protocol wall time {:.0?} (< 300 s)",
        if pass { "PASS" } else { "FAIL" },
        wall
    );
    assert!(em <= 0.30, "cdoa-em mean RMSE {em}");
    assert!(pf <= 0.35, "cdoa-pf mean RMSE {pf}");
    assert!((0.5..=2.5).contains(&tri), "trilateration mean RMSE {tri}");
    assert!((1.2..=4.0).contains(&wcl), "wcl mean RMSE {wcl}");
    assert!(wall < Duration::from_secs(300), "protocol took {wall:?}");
}

#[test]
fn criterion_2_accuracy_ordering() {
    let run = shared_protocol();
    // Expected accuracy chain, best first. The two CDOA methods tie at the
    // head; each later link may swap with its neighbor by at most one
    // pooled standard deviation of the per-seed grand means.
    let chain = [
        Method::CdoaEm,
        Method::CdoaPf,
        Method::IRssi,
        Method::DRssi,
        Method::PfEkf,
        Method::Trilateration,
        Method::Wcl,
    ];
    let mut report = String::new();
    let mut ok = true;
    for pair in chain.windows(2) {
        let a = run.for_method(pair[0]);
        let b = run.for_method(pair[1]);
        let tolerance = pooled_std(&a.per_seed_rmse, &b.per_seed_rmse);
        let within = a.mean_rmse <= b.mean_rmse + tolerance;
        ok &= within;
        report.push_str(&format!(
            "{} {:.3} {} {} {:.3} (tol {:.3}); ",
            a.method,
            a.mean_rmse,
            if a.mean_rmse <= b.mean_rmse { "<" } else { ">" },
            b.method,
            b.mean_rmse,
            tolerance
        ));
    }
    println!(
        "criterion 2 (accuracy ordering): {} - {report}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "{report}");
}

struct NoisePair {
    method: Method,
    diffs: Vec<f64>, // per-seed RMSE(4 dBm) - RMSE(1 dBm)
}

fn noise_contrast() -> &'static Vec<NoisePair> {
    static RUN: OnceLock<Vec<NoisePair>> = OnceLock::new();
    RUN.get_or_init(|| {
        let config = ExperimentConfig::default();
        let layout = config.layout.build(&config.workspace).unwrap();
        let trajectory =
            generate_trajectory(&config.workspace, &TrajectoryKind::Diagonal, 0.25).unwrap();
        let seeds = 50usize;
        Method::ALL
            .iter()
            .map(|&method| {
                let rmse_at = |noise: f64| {
                    let model =
                        ChannelModel { noise_std_dbm: noise, ..ChannelModel::default() };
                    run_trials(
                        method,
                        &layout,
                        &model,
                        &trajectory,
                        &config.hyperparams,
                        &config.workspace,
                        BASE_SEED,
                        seeds,
                    )
                    .unwrap()
                    .iter()
                    .map(|r| r.rmse)
                    .collect::<Vec<f64>>()
                };
                let low = rmse_at(1.0);
                let high = rmse_at(4.0);
                let diffs = high.iter().zip(&low).map(|(h, l)| h - l).collect();
                NoisePair { method, diffs }
            })
            .collect()
    })
}

#[test]
fn criterion_3_noise_monotonicity() {
    let runs = noise_contrast();
    let mut report = String::new();
    let mut ok = true;
    for pair in runs {
        let p = bootstrap_prob_mean_le_zero(&pair.diffs, 10_000, 77);
        let within = p < 0.05;
        ok &= within;
        report.push_str(&format!(
            "{} d{:+.3} p={:.4}; ",
            pair.method,
            mean(&pair.diffs),
            p
        ));
    }
    println!(
        "criterion 3 (noise monotonicity, 4 dBm > 1 dBm at 95%): {} - {report}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "{report}");
}

#[test]
fn criterion_4_particle_ablation() {
    let config = ExperimentConfig::default();
    let layout = config.layout.build(&config.workspace).unwrap();
    let trajectory =
        generate_trajectory(&config.workspace, &TrajectoryKind::Cross, 0.25).unwrap();
    let model = ChannelModel { noise_std_dbm: 2.0, ..ChannelModel::default() };
    let counts = [50usize, 100, 200, 500];
    let points = ablate_particles(
        &counts,
        &layout,
        &model,
        &trajectory,
        &config.hyperparams,
        &config.workspace,
        BASE_SEED,
        20,
    )
    .unwrap();

    let on_curve: Vec<f64> = points.iter().map(|p| p.mean_on()).collect();
    let range = on_curve.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - on_curve.iter().copied().fold(f64::INFINITY, f64::min);
    let residual = isotonic_residual(&on_curve);
    let monotone_ok = residual < 0.10 * range;

    // Odometry on must dominate odometry off at every count (paired, 95%).
    let mut dominance_ok = true;
    let mut dominance = String::new();
    for p in &points {
        let diffs: Vec<f64> = p
            .rmse_odometry_off
            .iter()
            .zip(&p.rmse_odometry_on)
            .map(|(off, on)| off - on)
            .collect();
        let prob = bootstrap_prob_mean_le_zero(&diffs, 10_000, 78);
        dominance_ok &= prob < 0.05;
        dominance.push_str(&format!("n{}: p={:.4}; ", p.particles, prob));
    }

    let ok = monotone_ok && dominance_ok;
    println!(
        "criterion 4 (particle ablation): {} - curve {:?}, isotonic residual {:.4} \
         (< {:.4}), odometry dominance {dominance}",
        if ok { "PASS" } else { "FAIL" },
        on_curve.iter().map(|v| (v * 1e3).round() / 1e3).collect::<Vec<_>>(),
        residual,
        0.10 * range
    );
    assert!(monotone_ok, "isotonic residual {residual} vs range {range}");
    assert!(dominance_ok, "{dominance}");
}

#[test]
fn criterion_5_efficiency_ordering() {
    let config = ExperimentConfig::default();
    // Table resolutions for the 6x6 workspace.
    assert_eq!(config.hyperparams.em_resolution, 0.05);
    assert_eq!(config.hyperparams.pf_resolution, 0.08);

    let run = shared_protocol();
    let pf = run.for_method(Method::CdoaPf).mean_tpi_ms;
    let em = run.for_method(Method::CdoaEm).mean_tpi_ms;
    let tri = run.for_method(Method::Trilateration).mean_tpi_ms;
    let wcl = run.for_method(Method::Wcl).mean_tpi_ms;

    let ok = pf < em && tri < pf && wcl < pf;
    println!(
        "criterion 5 (TPI ordering): {} - wcl {wcl:.4} ms, trilateration {tri:.4} ms, \
         cdoa-pf {pf:.4} ms, cdoa-em {em:.4} ms",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(pf < em, "cdoa-pf {pf} ms vs cdoa-em {em} ms");
    assert!(tri < pf, "trilateration {tri} ms vs cdoa-pf {pf} ms");
    assert!(wcl < pf, "wcl {wcl} ms vs cdoa-pf {pf} ms");
}

#[test]
fn criterion_6_bearing_fidelity() {
    let layout = layout6();
    let model = ChannelModel::default();
    let center = layout.centroid();
    let mut worst: f64 = 0.0;
    for deg in 0..360 {
        let theta = (deg as f64).to_radians();
        let robot = Position::new(center.x + theta.cos(), center.y + theta.sin());
        let readings: Vec<f64> = layout
            .positions()
            .map(|node| model.noiseless_rssi(robot.distance_to(node)))
            .collect();
        let snap = RssiSnapshot::new(&layout, readings, 0.0, 1).unwrap();
        let bearing = cdoa_from_gradient(gradient_rect4(&layout, &snap).unwrap()).unwrap();
        worst = worst.max(angular_error(bearing, center.bearing_to(robot)).abs());
    }
    let ok = worst < 0.1;
    println!(
        "criterion 6 (noiseless bearing fidelity, 360 bearings at 1 m): {} - worst {worst:.4} rad (< 0.1)",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "worst bearing error {worst}");
}

#[test]
fn criterion_7_oracle_equivalences() {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // (a) Window likelihood product vs an independent log-domain oracle.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let centroid = Position::new(3.0, 3.0);
    let mut worst_rel: f64 = 0.0;
    for _ in 0..200 {
        let sigma = 0.15 + rng.gen::<f64>();
        let mut window = MeasurementWindow::new(5, sigma).unwrap();
        for _ in 0..5 {
            let angle = Angle::new(rng.gen::<f64>() * 6.0 - 3.0);
            window.push(
                cdoa_loc::cdoa::CdoaMeasurement {
                    timestamp: 0.0,
                    angle,
                    raw_angle: angle,
                    robot_hint: None,
                },
                nalgebra::Vector2::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
            );
        }
        let candidate = Position::new(rng.gen::<f64>() * 6.0, rng.gen::<f64>() * 6.0);
        let model = BearingModel::Centroid(centroid);

        let mut oracle_log = 0.0;
        let latest = window.latest_cumulative_displacement();
        for e in window.entries() {
            let hist = candidate - (latest - e.cumulative_displacement);
            let expected = (hist.y - centroid.y).atan2(hist.x - centroid.x);
            let err = angular_error(e.measurement.angle, Angle::new(expected));
            oracle_log += -(sigma * (2.0 * std::f64::consts::PI).sqrt()).ln()
                - err * err / (2.0 * sigma * sigma);
        }
        let direct = cdoa_likelihood(candidate, &window, &model).unwrap();
        let via_log = cdoa_log_likelihood(candidate, &window, &model).unwrap().log_sum;
        worst_rel = worst_rel.max((direct - oracle_log.exp()).abs() / oracle_log.exp());
        worst_rel = worst_rel.max((via_log - oracle_log).abs() / oracle_log.abs().max(1e-300));
    }
    assert!(worst_rel < 1e-12, "likelihood oracle mismatch {worst_rel}");

    // (b) Rectangular gradient vs the hand-evaluated central difference on
    // 1000 random snapshots.
    let layout = layout6();
    let mut worst_grad: f64 = 0.0;
    for _ in 0..1000 {
        let readings: Vec<f64> = (0..4).map(|_| -90.0 + 60.0 * rng.gen::<f64>()).collect();
        let snap = RssiSnapshot::new(&layout, readings.clone(), 0.0, 1).unwrap();
        let g = gradient_rect4(&layout, &snap).unwrap();
        let (s1, s2, s3, s4) = (readings[0], readings[1], readings[2], readings[3]);
        let gx = (s3 - s2) / 12.0 + (s4 - s1) / 12.0;
        let gy = (s2 - s1) / 12.0 + (s3 - s4) / 12.0;
        worst_grad = worst_grad.max((g.x - gx).abs().max((g.y - gy).abs()));
    }
    assert!(worst_grad < 1e-12, "gradient oracle mismatch {worst_grad}");

    // (c) PF-EKF update recursion vs an independent scalar-per-axis Kalman
    // filter (diagonal F = H = I case decouples the axes).
    let mut filt =
        PfEkfLocalizer::new(PfEkfConfig::default(), ChannelModel::default(), ws6(), 7).unwrap();
    let defaults = PfEkfConfig::default();
    let (q, r) = (defaults.q[0][0], defaults.r[0][0]);
    let mut state = [0.0f64; 2];
    let mut cov = [defaults.init_cov[0][0]; 2];
    let mut worst_kalman: f64 = 0.0;
    let mut first = true;
    for i in 0..50 {
        let t = i as f64 * 0.17;
        let obs = nalgebra::Vector2::new(3.0 + t.sin(), 2.5 + 0.8 * (0.7 * t).cos());
        filt.ekf_update(obs);
        if first {
            state = [obs.x, obs.y];
            first = false;
            continue;
        }
        for axis in 0..2 {
            let predicted_cov = cov[axis] + q;
            let gain = predicted_cov / (predicted_cov + r);
            state[axis] += gain * ([obs.x, obs.y][axis] - state[axis]);
            cov[axis] = predicted_cov * (1.0 - gain);
        }
        let got = filt.covariance();
        worst_kalman = worst_kalman.max((got[(0, 0)] - cov[0]).abs());
        worst_kalman = worst_kalman.max((got[(1, 1)] - cov[1]).abs());
    }
    assert!(worst_kalman < 1e-9, "kalman oracle mismatch {worst_kalman}");

    // (d) Trilateration recovers exact-geometry targets to 1e-6 m.
    let anchors: Vec<Position> = layout.positions().collect();
    let mut worst_tri: f64 = 0.0;
    for _ in 0..100 {
        let target = Position::new(0.3 + 5.4 * rng.gen::<f64>(), 0.3 + 5.4 * rng.gen::<f64>());
        let distances: Vec<f64> = anchors.iter().map(|a| a.distance_to(target)).collect();
        let result =
            trilaterate_distances(&anchors, &distances, Position::new(3.0, 3.0), None).unwrap();
        worst_tri = worst_tri.max(result.position.distance_to(target));
    }
    assert!(worst_tri < 1e-6, "trilateration exactness {worst_tri}");

    println!(
        "criterion 7 (oracle equivalences): PASS - likelihood rel {worst_rel:.2e} (<1e-12), \
         gradient {worst_grad:.2e} (<1e-12), kalman {worst_kalman:.2e} (<1e-9), \
         trilateration {worst_tri:.2e} m (<1e-6)"
    );
}

#[test]
fn criterion_8_coverage_formulas() {
    assert_eq!(square_coverage_area(10.0), 50.0);
    assert_eq!(nodes_required(1), 4);
    assert_eq!(nodes_required(2), 6);
    // Dense aspect sweep: the square is optimal.
    let r = 7.0;
    let at_one = rect_coverage_area(r, 1.0);
    let mut k: f64 = 0.01;
    let mut max_elsewhere = f64::NEG_INFINITY;
    while k <= 100.0 {
        if (k - 1.0).abs() > 1e-12 {
            max_elsewhere = max_elsewhere.max(rect_coverage_area(r, k));
        }
        k *= 1.005;
    }
    assert!(at_one >= max_elsewhere);
    println!(
        "criterion 8 (coverage formulas): PASS - square(10)=50, nodes(1)=4, nodes(2)=6, \
         rect max at k=1 ({at_one:.3} >= {max_elsewhere:.3})"
    );
}

#[test]
fn criterion_9_filter_hygiene() {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Particle count conserved and weights normalized across many steps.
    let mut pf = ParticleFilter::new(
        ParticleFilterConfig { n_particles: 128, ..Default::default() },
        ws6(),
        BearingModel::Centroid(Position::new(3.0, 3.0)),
        5,
    )
    .unwrap();
    for i in 0..60 {
        let angle = Angle::new((i as f64 * 0.23).sin());
        let m = cdoa_loc::cdoa::CdoaMeasurement {
            timestamp: i as f64,
            angle,
            raw_angle: angle,
            robot_hint: None,
        };
        let _ = pf.step(&m, Some(nalgebra::Vector2::new(0.05, 0.02)));
        assert_eq!(pf.particles().len(), 128, "particle count changed");
        let total: f64 = pf.particles().iter().map(|p| p.weight).sum();
        assert!((total - 1.0).abs() < 1e-9, "weights sum {total}");
    }

    // normalize_weights on arbitrary positives.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let weights: Vec<f64> = (0..500).map(|_| rng.gen::<f64>() * 3.0 + 1e-9).collect();
    let normalized = normalize_weights(&weights).unwrap();
    let total: f64 = normalized.iter().sum();
    assert!((total - 1.0).abs() < 1e-9);

    // FIFO window bounded by its capacity over 10x capacity pushes.
    let capacity = 7;
    let mut window = MeasurementWindow::new(capacity, 0.3).unwrap();
    for i in 0..(10 * capacity) {
        let angle = Angle::new(i as f64 * 1e-3);
        window.push(
            cdoa_loc::cdoa::CdoaMeasurement {
                timestamp: i as f64,
                angle,
                raw_angle: angle,
                robot_hint: None,
            },
            nalgebra::Vector2::zeros(),
        );
        assert!(window.len() <= capacity);
    }
    assert_eq!(window.len(), capacity);

    // Same-seed bit-exact replay of a full noisy trial.
    let config = ExperimentConfig::default();
    let layout = config.layout.build(&config.workspace).unwrap();
    let trajectory =
        generate_trajectory(&config.workspace, &TrajectoryKind::Cross, 0.25).unwrap();
    let model = ChannelModel { noise_std_dbm: 3.0, ..ChannelModel::default() };
    let trial = |seed| {
        run_trial(
            Method::CdoaPf,
            &layout,
            &model,
            &trajectory,
            &config.hyperparams,
            &config.workspace,
            seed,
        )
        .unwrap()
    };
    let (a, b) = (trial(123), trial(123));
    assert_eq!(a.rmse.to_bits(), b.rmse.to_bits());
    for (x, y) in a.estimates.iter().zip(&b.estimates) {
        match (x.estimate, y.estimate) {
            (Some(p), Some(q)) => {
                assert_eq!(p.x.to_bits(), q.x.to_bits());
                assert_eq!(p.y.to_bits(), q.y.to_bits());
            }
            (None, None) => {}
            _ => panic!("replay diverged on missing waypoints"),
        }
    }

    println!(
        "criterion 9 (filter hygiene): PASS - particle count conserved, weights sum to 1, \
         window FIFO bounded, same-seed replay bit-exact"
    );
}

#[test]
fn criterion_10_dataset_path_integrity() {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    let config = ExperimentConfig::default();
    let layout = config.layout.build(&config.workspace).unwrap();
    let model = ChannelModel { noise_std_dbm: 2.0, ..ChannelModel::default() };
    let trajectory =
        generate_trajectory(&config.workspace, &TrajectoryKind::Boundary, 0.25).unwrap();

    // Synthesize a recorded walk, export, re-ingest: must match exactly.
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let snapshots: Vec<_> = trajectory
        .waypoints
        .iter()
        .enumerate()
        .map(|(i, &robot)| {
            let snap = model.sample_window(&layout, robot, 1, i as f64, &mut rng).unwrap();
            (snap, Some(robot))
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("synthetic.csv");
    write_snapshot_csv(&path, &layout, &snapshots).unwrap();
    let ingested = ingest_dataset(&path, &layout).unwrap();
    assert_eq!(ingested.snapshots, snapshots, "round trip not exact");
    assert_eq!(ingested.rows_total, ingested.rows_used);
    assert!(ingested.diagnostics.is_empty());

    // The replay pipeline localizes from the recorded readings.
    let result = evaluate_dataset(
        Method::CdoaPf,
        &layout,
        &model,
        &ingested.snapshots,
        &config.hyperparams,
        &config.workspace,
        9,
    )
    .unwrap();
    assert!(result.rmse.is_finite() && result.rmse < 2.0, "replay rmse {}", result.rmse);

    // The published per-dataset RMSE columns are intentionally not
    // reproduced here: the data files are not part of this artifact. The
    // pipeline itself is validated on synthetic recordings instead.
    println!(
        "criterion 10 (dataset path integrity): PASS - export/ingest exact over {} snapshots, \
         replay RMSE {:.3} m on synthetic data (public dataset columns out of scope)",
        snapshots.len(),
        result.rmse
    );
}

/// Protocol regression from the harness contract: the per-method RMSE curve
/// rises with noise (Mann-Kendall trend over 100 trials: 4 levels x 25
/// seeds).
#[test]
fn noise_trend_mann_kendall() {
    let config = ExperimentConfig::default();
    let layout = config.layout.build(&config.workspace).unwrap();
    let trajectory =
        generate_trajectory(&config.workspace, &TrajectoryKind::Diagonal, 0.25).unwrap();
    let mut curve = Vec::new();
    for noise in [1.0, 2.0, 3.0, 4.0] {
        let model = ChannelModel { noise_std_dbm: noise, ..ChannelModel::default() };
        let results = run_trials(
            Method::Trilateration,
            &layout,
            &model,
            &trajectory,
            &config.hyperparams,
            &config.workspace,
            BASE_SEED,
            25,
        )
        .unwrap();
        curve.push(mean(&results.iter().map(|r| r.rmse).collect::<Vec<_>>()));
    }
    let s = mann_kendall_s(&curve);
    assert!(s >= 5, "Mann-Kendall S = {s} for curve {curve:?}");
}
