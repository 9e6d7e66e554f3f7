#![no_main]
use libfuzzer_sys::fuzz_target;
use loggas::gibbs::Potential;

fuzz_target!(|data: &str| {
    if let Ok(v) = data.parse::<Potential>() {
        let _ = v.evaluate(1.5);
        let _ = v.growth_ok();
    }
});
