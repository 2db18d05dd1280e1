//! JSON description of twist profiles.
//!
//! ```json
//! {"kind": "ramp", "amplitude": 10.0, "r0": 0.9, "k": 2}
//! {"kind": "samples", "r": [0, 0.5, 1], "f": [6, 2, 0], "interpolation": "linear"}
//! ```
//! Any form accepts an optional `"truncate": i`.

use echlab_core::twist::profile::{Piece, ProfileError, TwistProfile};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Zero {
        #[serde(default)]
        truncate: Option<u32>,
    },
    Constant {
        c: f64,
        #[serde(default)]
        truncate: Option<u32>,
    },
    Power {
        c: f64,
        k: i32,
        #[serde(default)]
        truncate: Option<u32>,
    },
    Ramp {
        amplitude: f64,
        r0: f64,
        k: u32,
        #[serde(default)]
        truncate: Option<u32>,
    },
    Pieces {
        pieces: Vec<PieceSpec>,
        #[serde(default)]
        truncate: Option<u32>,
    },
    Samples {
        r: Vec<f64>,
        f: Vec<f64>,
        #[serde(default = "linear")]
        interpolation: String,
        #[serde(default)]
        truncate: Option<u32>,
    },
}

fn linear() -> String {
    "linear".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub lo: f64,
    pub hi: f64,
    /// (exponent, coefficient) pairs.
    pub terms: Vec<(i32, f64)>,
}

impl ProfileSpec {
    pub fn build(&self) -> Result<TwistProfile, String> {
        let err = |e: ProfileError| e.to_string();
        let (base, cut) = match self {
            ProfileSpec::Zero { truncate } => (Ok(TwistProfile::zero()), truncate),
            ProfileSpec::Constant { c, truncate } => (TwistProfile::constant(*c).map_err(err), truncate),
            ProfileSpec::Power { c, k, truncate } => (TwistProfile::power(*c, *k).map_err(err), truncate),
            ProfileSpec::Ramp { amplitude, r0, k, truncate } => {
                (TwistProfile::ramp(*amplitude, *r0, *k).map_err(err), truncate)
            }
            ProfileSpec::Pieces { pieces, truncate } => {
                let p = pieces.iter().map(|p| Piece::new(p.lo, p.hi, p.terms.clone())).collect();
                (TwistProfile::new(p).map_err(err), truncate)
            }
            ProfileSpec::Samples { r, f, interpolation, truncate } => {
                if interpolation != "linear" {
                    return Err(format!("unsupported interpolation {interpolation:?}; use \"linear\""));
                }
                (TwistProfile::from_samples(r, f).map_err(err), truncate)
            }
        };
        let base = base?;
        match cut {
            Some(0) => Err("truncate index must be at least 1".into()),
            Some(i) => base.truncate(*i).map_err(err),
            None => Ok(base),
        }
    }
}

pub fn parse_profile(text: &str) -> Result<TwistProfile, String> {
    let spec: ProfileSpec = serde_json::from_str(text).map_err(|e| format!("profile schema: {e}"))?;
    spec.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        let f = parse_profile(r#"{"kind":"constant","c":3.0}"#).unwrap();
        assert_eq!(f.eval(0.5), 3.0);
        let f = parse_profile(r#"{"kind":"power","c":1,"k":-3,"truncate":2}"#).unwrap();
        assert_eq!(f.eval(0.1), 8.0);
        let f = parse_profile(r#"{"kind":"pieces","pieces":[{"lo":0,"hi":1,"terms":[[0,2.0],[1,-2.0]]}]}"#).unwrap();
        assert_eq!(f.eval(0.25), 1.5);
        assert!(parse_profile(r#"{"kind":"samples","r":[0,1],"f":[1,0],"interpolation":"cubic"}"#).is_err());
        assert!(parse_profile(r#"{"kind":"nope"}"#).is_err());
    }
}
