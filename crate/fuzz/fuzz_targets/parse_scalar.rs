#![no_main]

use std::cmp::Ordering;

use libfuzzer_sys::fuzz_target;
use sll_core::scalar::PowerScalar;

fuzz_target!(|text: &str| {
    if let Ok(x) = PowerScalar::parse(text) {
        let back = PowerScalar::parse(&x.to_string()).expect("printed scalars parse");
        assert_eq!(back.cmp_exact(&x), Ordering::Equal);
    }
});
