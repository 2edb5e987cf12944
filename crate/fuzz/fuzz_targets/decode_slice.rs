#![no_main]

use libfuzzer_sys::fuzz_target;
use num_complex::Complex64;
use wormnet::state::{decode_lenient, decode_slice, encode_status};

fuzz_target!(|data: &[u8]| {
    let Some((&k, rest)) = data.split_first() else { return };
    let k = usize::from(k % 9);
    let z: Vec<Complex64> = rest
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    let lenient = decode_lenient(&z, k);
    if let Ok(state) = decode_slice(&z, k) {
        assert!(lenient.iter().all(Option::is_some));
        let m = encode_status(&state, k).expect("decoded state must encode");
        assert_eq!(m.as_slice(), &z[..]);
    }
});
