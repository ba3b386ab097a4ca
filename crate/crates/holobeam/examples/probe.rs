//! Config scan: find regimes where the elimination policy beats the
//! baselines at matched budgets.

use holobeam::config::{ExperimentConfig, Policy, UserModel};
use holobeam::harness::run_experiment;

fn scan(label: &str, cfg: &ExperimentConfig) {
    let result = run_experiment(cfg).unwrap();
    let hmt = cfg.cell_hmt(cfg.pilot_powers_dbm[0], cfg.distances_m[0]);
    println!(
        "== {label}  G/s2={:.1} K={}",
        hmt.g() / hmt.noise_power,
        (2.0 * hmt.kx()).ceil() as usize + 1
    );
    for &n in &cfg.budgets {
        let mut line = format!("  n={n:5}");
        for p in [Policy::Holobeam, Policy::SeqHalving, Policy::Uniform] {
            let s = result
                .get(p, n, cfg.pilot_powers_dbm[0], cfg.distances_m[0])
                .unwrap();
            line.push_str(&format!(
                "  {}: err={:.3} rate={:.3}",
                p.name(),
                s.error_rate,
                s.mean_rate
            ));
        }
        println!("{line}");
    }
}

fn main() {
    let budgets = vec![100, 200, 500, 1000, 2000, 4000, 8000];

    // K=21 grids at increasing SNR (30 cm panel at 10 GHz)
    for d0 in [15.0, 25.0, 40.0] {
        let cfg = ExperimentConfig {
            aperture_width: 0.3,
            aperture_length: 0.3,
            wavelength: 0.03,
            element_pitch: 0.0075,
            distances_m: vec![d0],
            budgets: budgets.clone(),
            trials: 600,
            user_model: UserModel::Fixed {
                alpha1: 0.3496,
                alpha2: 0.0448,
            },
            ..ExperimentConfig::default()
        };
        scan(&format!("K=21 midlobe d0={d0}"), &cfg);
    }

    // K=11 grids (15 cm panel at 10 GHz): wide lobes relative to the grid
    for d0 in [10.0, 18.0, 30.0] {
        let cfg = ExperimentConfig {
            aperture_width: 0.15,
            aperture_length: 0.15,
            wavelength: 0.03,
            element_pitch: 0.0075,
            distances_m: vec![d0],
            budgets: budgets.clone(),
            trials: 600,
            user_model: UserModel::Fixed {
                alpha1: 0.2992,
                alpha2: 0.0896,
            },
            ..ExperimentConfig::default()
        };
        scan(&format!("K=11 midlobe d0={d0}"), &cfg);
    }

    // uniform users at the K=11 mid-SNR point
    let cfg = ExperimentConfig {
        aperture_width: 0.15,
        aperture_length: 0.15,
        wavelength: 0.03,
        element_pitch: 0.0075,
        distances_m: vec![18.0],
        budgets: budgets.clone(),
        trials: 600,
        ..ExperimentConfig::default()
    };
    scan("K=11 uniform users d0=18", &cfg);
}
