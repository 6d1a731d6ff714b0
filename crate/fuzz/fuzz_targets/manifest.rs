#![no_main]
use amo_core::localization::ExperimentManifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(m) = serde_json::from_slice::<ExperimentManifest>(data) else { return };
    let _ = m.alpha.value();
    // large boxes only cost memory
    if m.box_size <= 4096 {
        if m.operator().is_ok() {
            let _ = m.select_states();
        }
    }
});
