#![no_main]
use amo_cli::config::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = ExperimentConfig::from_json(s) {
        let text = cfg.to_json();
        let again = ExperimentConfig::from_json(&text).expect("serialized config must parse");
        assert_eq!(again.to_json(), text);
    }
});
