#![no_main]

use libfuzzer_sys::fuzz_target;
use oasw_core::stream::{CsvLoader, CsvOptions};

fuzz_target!(|data: &[u8]| {
    let mut loader = CsvLoader::new(CsvOptions::new("label", ["1"]));
    if let Ok(stream) = loader.load_reader(data) {
        // whatever loads must survive a write and a reload
        let mut out = Vec::new();
        stream.write_csv(&mut out, &[]).unwrap();
        let again = CsvLoader::new(CsvOptions::new("label", ["1"])).load_reader(&out[..]).unwrap();
        assert_eq!(again.len(), stream.len());
    }
});
