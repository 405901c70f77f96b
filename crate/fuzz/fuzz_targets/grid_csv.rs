#![no_main]

use libfuzzer_sys::fuzz_target;
use preisach::GridField;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = GridField::from_csv(text) {
        let again = GridField::from_csv(&grid.to_csv()).expect("written grid parses");
        assert_eq!(again, grid);
    }
});
