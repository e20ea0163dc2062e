#![no_main]

use abstokes::Scenario;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(scenario) = Scenario::from_json_slice(data) else { return };
    let _ = scenario.field();
    let _ = scenario.quadrature_config();
    if let Ok(grid) = scenario.sweep_grid() {
        assert!(grid.iter().all(|x| x.is_finite()));
    }
    if let Some(g) = &scenario.geometry {
        let _ = g.patch();
        let _ = g.annular_patch();
        let _ = g.encircling_patch();
        let _ = g.arms();
        let _ = g.uniform_arms(1.0);
    }
});
