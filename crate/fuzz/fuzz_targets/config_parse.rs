#![no_main]

use libfuzzer_sys::fuzz_target;
use stored_light::config::{parse_config, parse_entries, protocol_config, Scale};
use stored_light::Variant;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = parse_entries(text);
    for v in [Variant::CaseA, Variant::CaseB] {
        if let Ok(cfg) = parse_config(text, protocol_config(v, Scale::Desk)) {
            // anything accepted must survive a render/parse round trip
            let again = parse_config(&cfg.to_config_string(), protocol_config(v, Scale::Full)).unwrap();
            assert_eq!(again, cfg);
        }
    }
});
