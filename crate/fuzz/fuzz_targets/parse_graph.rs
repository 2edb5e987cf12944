#![no_main]

use libfuzzer_sys::fuzz_target;
use wormnet::io::{parse_graph, write_graph};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_graph(text) {
        let again = parse_graph(&write_graph(&g)).expect("written graph must parse");
        assert_eq!(write_graph(&again), write_graph(&g));
    }
});
