#![no_main]

use libfuzzer_sys::fuzz_target;
use oasw_core::classifier::GbdtModel;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(model) = GbdtModel::from_json(text) {
        if model.schema_width <= 4096 {
            let p = model.predict(&vec![0.0; model.schema_width]).unwrap();
            assert!(p.probability > 0.0 && p.probability < 1.0);
        }
        let _ = GbdtModel::from_json(&model.to_json()).unwrap();
    }
});
