#![no_main]

use libfuzzer_sys::fuzz_target;
use preisach::{MemoryInterface, SupportBox};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let bx = SupportBox::new(-2.0, 2.0, -2.0, 2.0).unwrap();
    if let Ok(iface) = MemoryInterface::from_json(text, bx) {
        assert!(iface.is_canonical());
        let again = MemoryInterface::from_json(&iface.to_json(), bx).expect("written interface parses");
        assert_eq!(again.corners(), iface.corners());
        let _ = iface.push_extremum(0.5).push_extremum(-0.5);
    }
});
