#![no_main]

use abstokes::Scenario;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(scenario) = Scenario::from_json_slice(data) else { return };
    // anything accepted must survive its own serialization unchanged
    let text = serde_json::to_string(&scenario).expect("scenario serializes");
    let again = Scenario::from_json_str(&text).expect("serialized scenario parses");
    assert_eq!(again, scenario);
});
