#![no_main]

use libfuzzer_sys::fuzz_target;
use pinchlab::harness::CampaignConfig;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = serde_json::from_str::<CampaignConfig>(text) else {
        return;
    };
    let _ = cfg.validate();
    let _ = serde_json::to_string(&cfg);
});
