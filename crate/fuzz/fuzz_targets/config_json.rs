#![no_main]

use libfuzzer_sys::fuzz_target;
use preisach_cli::config::WeightingSpec;
use preisach_cli::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ExperimentConfig::from_json(text) {
        // grid configs would read from disk
        if !matches!(cfg.weighting, WeightingSpec::Grid { .. }) {
            let _ = cfg.resolve();
        }
    }
});
