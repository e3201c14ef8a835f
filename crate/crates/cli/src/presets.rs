//! Figure presets: named `key = value` files shipped in `presets/`.

use crate::config::parse_pairs;
use crate::error::CliError;

pub const PRESETS: [(&str, &str); 12] = [
    ("fig1", include_str!("../presets/fig1.conf")),
    ("fig2", include_str!("../presets/fig2.conf")),
    ("fig3", include_str!("../presets/fig3.conf")),
    ("fig4", include_str!("../presets/fig4.conf")),
    ("fig5", include_str!("../presets/fig5.conf")),
    ("fig6", include_str!("../presets/fig6.conf")),
    ("fig7", include_str!("../presets/fig7.conf")),
    ("fig8", include_str!("../presets/fig8.conf")),
    ("fig9", include_str!("../presets/fig9.conf")),
    ("fig10", include_str!("../presets/fig10.conf")),
    ("fig11", include_str!("../presets/fig11.conf")),
    ("fig12", include_str!("../presets/fig12.conf")),
];

pub fn preset_text(name: &str) -> Result<&'static str, CliError> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            CliError::Validation(format!("unknown preset {name:?}; available: {}", names.join(", ")))
        })
}

pub fn preset_pairs(name: &str) -> Result<Vec<(String, String)>, CliError> {
    parse_pairs(preset_text(name)?)
}

/// First comment line of a preset.
pub fn describe(text: &str) -> &str {
    text.lines()
        .next()
        .and_then(|l| l.strip_prefix('#'))
        .map_or("", str::trim)
}
