//! JSON documents for orbit pools and towers.
//!
//! ```json
//! {
//!   "orbits": [{"id": 1, "action": 1.0, "theta": "1/3"}, {"id": 2, "action": 1.4, "theta": 0.4142}],
//!   "curves": [{
//!     "genus": 0, "c_tau": 0,
//!     "alpha": [[1, 2]], "beta": [[2, 1]],
//!     "positive_ends": [{"orbit": 1, "mults": [2], "c0_present": false}],
//!     "negative_ends": [{"orbit": 2, "mults": [1], "c0_present": false}]
//!   }]
//! }
//! ```
//! `theta` is a JSON number or any string accepted on the command line
//! (`"1/3"`, `"sqrt2"`); JSON integers and `p/q` strings are exact. Curves are
//! listed bottom to top: curve i has beta equal to the alpha of curve i − 1.

use echlab_core::orbit::{CurveData, EndGroup, OrbitKind, OrbitSet, SimpleOrbit, Tower};
use echlab_core::{Rational, Rotation};
use serde::{Deserialize, Serialize};

use crate::num::parse_value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Theta {
    Int(i64),
    Num(f64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSpec {
    pub id: u32,
    pub action: f64,
    pub theta: Theta,
    /// "elliptic", "positive_hyperbolic" or "negative_hyperbolic"; inferred when absent.
    #[serde(default)]
    pub kind: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndSpec {
    pub orbit: u32,
    pub mults: Vec<u32>,
    pub c0_present: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub genus: u32,
    #[serde(default)]
    pub c_tau: i64,
    pub alpha: Vec<(u32, u32)>,
    pub beta: Vec<(u32, u32)>,
    #[serde(default)]
    pub positive_ends: Vec<EndSpec>,
    #[serde(default)]
    pub negative_ends: Vec<EndSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub orbits: Vec<OrbitSpec>,
    #[serde(default)]
    pub curves: Vec<CurveSpec>,
}

fn rotation(t: &Theta) -> Result<Rotation, String> {
    Ok(match t {
        Theta::Int(n) => Rotation::Exact(Rational::from_integer(*n)),
        Theta::Num(x) => Rotation::real(*x),
        Theta::Text(s) => parse_value(s)?.rotation(),
    })
}

fn theta_of(r: &Rotation) -> Theta {
    match r {
        Rotation::Exact(q) if *q.denom() == 1 => Theta::Int(*q.numer()),
        Rotation::Exact(q) => Theta::Text(format!("{}/{}", q.numer(), q.denom())),
        Rotation::Real(x) => Theta::Num(*x),
    }
}

fn kind_name(k: OrbitKind) -> &'static str {
    match k {
        OrbitKind::Elliptic => "elliptic",
        OrbitKind::PositiveHyperbolic => "positive_hyperbolic",
        OrbitKind::NegativeHyperbolic => "negative_hyperbolic",
    }
}

fn end_specs(v: &[EndGroup]) -> Vec<EndSpec> {
    v.iter().map(|g| EndSpec { orbit: g.orbit, mults: g.mults.clone(), c0_present: g.c0_present }).collect()
}

impl CurveSpec {
    pub fn from_curve(c: &CurveData) -> CurveSpec {
        let set = |s: &OrbitSet| s.entries().iter().map(|(o, m)| (o.id, *m)).collect();
        CurveSpec {
            genus: c.genus,
            c_tau: c.c_tau,
            alpha: set(&c.alpha),
            beta: set(&c.beta),
            positive_ends: end_specs(&c.positive_ends),
            negative_ends: end_specs(&c.negative_ends),
        }
    }
}

impl Document {
    /// Orbits referenced by the curves, sorted by id, followed by the curves.
    pub fn from_curves(curves: &[CurveData]) -> Document {
        let mut orbits: Vec<SimpleOrbit> = Vec::new();
        for c in curves {
            for (o, _) in c.alpha.entries().iter().chain(c.beta.entries()) {
                if !orbits.iter().any(|x| x.id == o.id) {
                    orbits.push(o.clone());
                }
            }
        }
        orbits.sort_by_key(|o| o.id);
        Document {
            orbits: orbits
                .iter()
                .map(|o| OrbitSpec {
                    id: o.id,
                    action: o.action,
                    theta: theta_of(&o.theta),
                    kind: Some(kind_name(o.kind).to_string()),
                })
                .collect(),
            curves: curves.iter().map(CurveSpec::from_curve).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Document, String> {
        serde_json::from_str(text).map_err(|e| format!("orbit document schema: {e}"))
    }

    pub fn orbits(&self) -> Result<Vec<SimpleOrbit>, String> {
        self.orbits
            .iter()
            .map(|o| {
                let theta = rotation(&o.theta)?;
                let r = match o.kind.as_deref() {
                    None => SimpleOrbit::new(o.id, o.action, theta),
                    Some(k) => {
                        let kind = match k {
                            "elliptic" => OrbitKind::Elliptic,
                            "positive_hyperbolic" => OrbitKind::PositiveHyperbolic,
                            "negative_hyperbolic" => OrbitKind::NegativeHyperbolic,
                            other => return Err(format!("unknown orbit kind {other:?}")),
                        };
                        SimpleOrbit::with_kind(o.id, o.action, theta, kind)
                    }
                };
                r.map_err(|e| format!("orbit {}: {e}", o.id))
            })
            .collect()
    }

    pub fn tower(&self) -> Result<Tower, String> {
        let pool = self.orbits()?;
        let find = |id: u32| pool.iter().find(|o| o.id == id).cloned().ok_or(format!("unknown orbit id {id}"));
        let set = |v: &[(u32, u32)]| -> Result<OrbitSet, String> {
            let entries = v.iter().map(|&(id, m)| Ok((find(id)?, m))).collect::<Result<Vec<_>, String>>()?;
            OrbitSet::new(entries).map_err(|e| e.to_string())
        };
        let ends = |v: &[EndSpec]| -> Vec<EndGroup> {
            v.iter().map(|e| EndGroup { orbit: e.orbit, mults: e.mults.clone(), c0_present: e.c0_present }).collect()
        };
        let mut curves = Vec::new();
        for (i, c) in self.curves.iter().enumerate() {
            let curve = CurveData::new(
                c.genus,
                ends(&c.positive_ends),
                ends(&c.negative_ends),
                c.c_tau,
                set(&c.alpha)?,
                set(&c.beta)?,
            )
            .map_err(|e| format!("curve {i}: {e}"))?;
            curves.push(curve);
        }
        Tower::new(curves).map_err(|e| e.to_string())
    }
}
