#![no_main]
use amo_core::arithmetic::ExpansionJson;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(doc) = serde_json::from_slice::<ExpansionJson>(data) else { return };
    if let Ok(x) = doc.clone().into_expansion() {
        assert_eq!(x.to_json().partial_quotients, doc.partial_quotients);
    }
});
