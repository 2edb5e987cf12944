#![no_main]

use libfuzzer_sys::fuzz_target;
use wormnet::datagen::{parse_sensor_graph, SensorRule};

fuzz_target!(|data: &[u8]| {
    let Some((&r, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let rule = if r & 1 == 0 {
        SensorRule::EdgeList
    } else {
        SensorRule::Distance { radius: f64::from(r >> 1) }
    };
    let _ = parse_sensor_graph(text, rule);
});
