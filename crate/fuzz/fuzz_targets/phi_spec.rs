#![no_main]
use libfuzzer_sys::fuzz_target;
use loggas::process::TestFunction2D;

fuzz_target!(|data: &str| {
    if let Ok(phi) = data.parse::<TestFunction2D>() {
        let t = phi.support_half_width();
        assert!(t >= 1.0 && t.is_finite());
        let _ = phi.evaluate(0.3, -0.7);
    }
});
