//! Bundled example games.

use crate::game::GameInstance;
use crate::prob::{FiniteSpace, JointPXZW};

/// Five-symbol example with `Z = X`: `P{X=x, W=w}` has 0.14 on the diagonal
/// and small off-diagonal mass, so `X` and `W` are strongly correlated.
pub const FIVE_SYMBOL_PXW: [[f64; 5]; 5] = [
    [0.14, 0.02, 0.01, 0.01, 0.02],
    [0.02, 0.14, 0.02, 0.01, 0.01],
    [0.01, 0.02, 0.14, 0.02, 0.01],
    [0.01, 0.01, 0.02, 0.14, 0.02],
    [0.02, 0.01, 0.01, 0.02, 0.14],
];

/// On-disk config for the five-symbol example, as shipped.
pub const FIVE_SYMBOL_JSON: &str = include_str!("../presets/five_symbol.json");

/// Joint `p(x,z,w) = P{X=x,W=w}·1[z=x]` of the five-symbol example.
pub fn five_symbol_joint() -> JointPXZW {
    let s = FiniteSpace::new(5).expect("5 symbols");
    let flat: Vec<f64> = FIVE_SYMBOL_PXW.iter().flatten().copied().collect();
    JointPXZW::from_xw_with_perfect_measurement(s.clone(), s, &flat).expect("valid preset")
}

/// The five-symbol example with Hamming distortion and `Y` on `X`'s alphabet.
pub fn five_symbol_game(rho: f64) -> GameInstance {
    GameInstance::hamming(five_symbol_joint(), rho).expect("valid preset")
}

/// Looks up a bundled config by name (`five_symbol` or `five_symbol.json`).
pub fn config_text(name: &str) -> Option<&'static str> {
    match name.trim_end_matches(".json") {
        "five_symbol" => Some(FIVE_SYMBOL_JSON),
        _ => None,
    }
}
