//! Jute fiber breaking strength at gauge lengths of 10 mm and 20 mm
//! (Xia et al., 2009), 30 observations each.

use crate::distribution::Sample;

pub const JUTE_10MM: [f64; 30] = [
    693.73, 704.66, 323.83, 778.17, 123.06, 637.66, 383.43, 151.48, 108.94, 50.16, //
    671.49, 183.16, 257.44, 727.23, 291.27, 101.15, 376.42, 163.40, 141.38, 700.74, //
    262.90, 353.24, 422.11, 43.93, 590.48, 212.13, 303.90, 506.60, 530.55, 177.25,
];

pub const JUTE_20MM: [f64; 30] = [
    71.46, 419.02, 284.64, 585.57, 456.60, 113.85, 187.85, 688.16, 662.66, 45.58, //
    578.62, 756.70, 594.29, 166.49, 99.72, 707.36, 765.14, 187.13, 145.96, 350.70, //
    547.44, 116.99, 375.81, 581.60, 119.86, 48.01, 200.16, 36.75, 244.53, 83.55,
];

/// Names accepted by [`embedded`].
pub const NAMES: [&str; 2] = ["jute10", "jute20"];

pub fn embedded(name: &str) -> Option<Sample> {
    let values = match name {
        "jute10" => JUTE_10MM,
        "jute20" => JUTE_20MM,
        _ => return None,
    };
    Some(Sample::new(name, values.to_vec()).expect("embedded data is valid"))
}
