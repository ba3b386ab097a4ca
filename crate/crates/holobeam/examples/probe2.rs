//! Per-trial debugging of the elimination policy at one config.

use holobeam::bandit::{beta_i_holobeam, FrozenAxisEnv};
use holobeam::channel::{HmtConfig, RssEnvironment, UserLocation};
use holobeam::grid::{discrete_optimum, restricted_mean_profile, Axis, PhaseGrid};

fn main() {
    let hmt = HmtConfig {
        aperture_width: 0.1,
        aperture_length: 0.1,
        distance: 20.0,
        ..HmtConfig::default()
    };
    let user = UserLocation::new(0.348, 0.0448).unwrap();
    let grid = PhaseGrid::build(hmt.kx()).unwrap();
    let opt = discrete_optimum(&hmt, &user, &grid, &grid).unwrap();
    println!("k* = ({}, {}), G/s2 = {:.1}", opt.k1, opt.k2, hmt.g() / hmt.noise_power);

    let init = grid.midpoint_index();
    println!("init idx {} value {}", init, grid.value(init));

    // phase-1 profile values in noise units
    let prof = restricted_mean_profile(&hmt, &user, &grid, Axis::Beta1, grid.value(init));
    println!("phase-1 profile (mu/s2 - 1):");
    for (k, v) in prof.iter().enumerate() {
        print!(" {k}:{:.2}", v / hmt.noise_power - 1.0);
    }
    println!();

    // many phase-1 runs, count correct
    let budgets = [250u64, 1000];
    for &b in &budgets {
        let mut correct = 0;
        let trials = 400;
        for seed in 0..trials {
            let mut env = RssEnvironment::new(hmt.clone(), user, seed).unwrap();
            let mut view = FrozenAxisEnv::new(&mut env, &grid, Axis::Beta1, grid.value(init));
            let pick = beta_i_holobeam(&mut view, b).unwrap();
            if pick == opt.k1 {
                correct += 1;
            }
        }
        println!("phase-1 n_half={b}: correct {correct}/{trials}");
    }

    // per-batch trace of one run: emulate by printing what the pulls see
    let mut env = RssEnvironment::new(hmt.clone(), user, 7).unwrap();
    let mut view = FrozenAxisEnv::new(&mut env, &grid, Axis::Beta1, grid.value(init));
    let pick = beta_i_holobeam(&mut view, 250).unwrap();
    println!("single run pick = {pick}");
}
