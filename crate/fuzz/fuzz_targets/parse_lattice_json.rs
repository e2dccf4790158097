#![no_main]

use libfuzzer_sys::fuzz_target;
use sll_core::lattice::json::{from_json, parse_lattice_json, to_json};

fuzz_target!(|text: &str| {
    if let Ok(lat) = parse_lattice_json(text) {
        let again = from_json(&to_json(&lat)).expect("serialized lattice reloads");
        assert!(again.same_lattice(&lat).unwrap_or(false));
    }
});
