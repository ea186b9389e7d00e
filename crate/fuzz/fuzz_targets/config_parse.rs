#![no_main]

use hetcov_cli::config::Config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = Config::parse(text) {
        // an accepted file must print back to the same values
        let echoed = cfg.values.to_text();
        let again = Config::parse(&echoed).expect("echo parses");
        assert_eq!(again.values, cfg.values);
        let _ = cfg.validate();
    }
});
