#![no_main]

use abstokes::FluxProfile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(profile) = serde_json::from_slice::<FluxProfile>(data) else { return };
    if profile.validate().is_err() {
        return;
    }
    for t in [0.0, 0.5, 1.0, 10.0] {
        let _ = profile.eval_b(t);
        let _ = profile.eval_b_dot(t);
        let _ = profile.running_integral(t);
        let _ = profile.avg_b(t);
    }
    let kinks = profile.kinks();
    assert!(kinks.windows(2).all(|w| w[0] <= w[1]));
});
