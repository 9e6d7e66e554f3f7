#![no_main]
use libfuzzer_sys::fuzz_target;
use loggas::process::{Shape, TestFunction2D};

fuzz_target!(|data: &str| {
    if let Ok(grid) = loggas::io::parse_grid_json(data) {
        if let Ok(phi) = TestFunction2D::new(Shape::Grid(grid)) {
            let _ = phi.evaluate(0.0, 0.0);
        }
    }
});
