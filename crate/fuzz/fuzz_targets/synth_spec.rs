#![no_main]

use libfuzzer_sys::fuzz_target;
use oasw_cli::parse_synth_spec;
use oasw_core::stream::generate_synthetic;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok((spec, length)) = parse_synth_spec(text) {
        if length <= 20_000 && spec.dims <= 64 {
            let stream = generate_synthetic(&spec, length).unwrap();
            assert_eq!(stream.len(), length);
        }
    }
});
