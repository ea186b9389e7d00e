#![no_main]

use hetcov_cli::output::read_curve;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = read_curve(data);
});
