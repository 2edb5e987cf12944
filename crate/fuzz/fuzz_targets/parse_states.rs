#![no_main]

use libfuzzer_sys::fuzz_target;
use wormnet::io::{parse_states, write_states};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((k, states)) = parse_states(text) {
        let (k2, again) = parse_states(&write_states(&states, k)).expect("written states must parse");
        assert_eq!(k, k2);
        assert_eq!(states, again);
    }
});
