//! Schemes shipped with the crate.

use crate::io::parse;
use crate::scheme::Scheme;

/// Text of the hand-transcribed (2,2,3) rank-11 scheme.
pub const RANK11_2X2X3: &str = include_str!("../data/2x2x3_rank11.json");

/// Text of Strassen's (2,2,2) rank-7 scheme in normal form.
pub const STRASSEN_2X2X2: &str = include_str!("../data/2x2x2_rank7_strassen.json");

/// The bundled (2,2,3:11) scheme.
pub fn rank11_2x2x3() -> Scheme {
    parse(RANK11_2X2X3).expect("bundled file parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meta_ops::strassen;

    #[test]
    fn bundled_files_parse() {
        assert_eq!(rank11_2x2x3().rank(), 11);
        assert_eq!(parse(STRASSEN_2X2X2).unwrap(), strassen());
    }
}
