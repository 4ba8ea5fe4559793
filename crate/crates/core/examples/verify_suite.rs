//! The quick oracle suite, as run by `pneusoft verify --quick`.

use pneusoft::material::HyperelasticParams;
use pneusoft::verify::run_verify;

fn main() {
    for r in run_verify(&HyperelasticParams::default(), true) {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
}
