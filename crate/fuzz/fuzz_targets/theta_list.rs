#![no_main]

use libfuzzer_sys::fuzz_target;
use stored_light::config::parse_theta_list;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(list) = parse_theta_list(text) {
        assert!(!list.is_empty());
        assert!(list.iter().all(|t| t.is_finite()));
    }
});
