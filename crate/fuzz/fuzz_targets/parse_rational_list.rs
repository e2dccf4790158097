#![no_main]

use libfuzzer_sys::fuzz_target;
use sll_core::flow::WeightVector;
use sll_core::scalar::format_rational;
use sll_core::scalar::rational::parse_rational_list;

fuzz_target!(|text: &str| {
    let Ok(xs) = parse_rational_list(text) else { return };
    let joined = xs.iter().map(format_rational).collect::<Vec<_>>().join(",");
    assert_eq!(parse_rational_list(&joined).ok(), Some(xs));
    // weights go through the same list parser
    let _ = WeightVector::parse(text);
});
