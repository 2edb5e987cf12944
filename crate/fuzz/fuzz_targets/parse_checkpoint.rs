#![no_main]

use libfuzzer_sys::fuzz_target;
use wormnet::cvnn::{parse_checkpoint, write_checkpoint};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(net) = parse_checkpoint(text) {
        let again = parse_checkpoint(&write_checkpoint(&net)).expect("written checkpoint must parse");
        assert_eq!(write_checkpoint(&again), write_checkpoint(&net));
    }
});
