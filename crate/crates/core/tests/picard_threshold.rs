use std::path::Path;

use shockstrip::config::DatumKind;
use shockstrip::{pipeline, ExperimentConfig};

#[test]
fn large_data_pushes_the_launch_time_later() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/classical.cfg");
    let dir = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::from_file(&path).unwrap();
    c.out = dir.path().to_path_buf();
    c.datum = DatumKind::DerivBump;
    c.amplitude = 10.0;
    c.t_end = 2.0;
    c.samples = 10;
    c.snapshots.clear();
    c.run_linop_checks = false;
    let p = pipeline::run(&c).unwrap().picard.unwrap();
    assert!(p.tstar > c.trial_times[0], "T* = {}", p.tstar);
    assert!(p.converged && p.sigma_hat <= 0.9);
}
