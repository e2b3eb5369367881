//! Declarative, seeded families of test functions.
//!
//! Random members use Xoshiro256++ seeded through SplitMix64
//! ([`GENERATOR_ID`]). The stream for member `i` on the `n`-cube is
//!
//! ```text
//! s1 = splitmix64_next(state = seed)
//! s2 = splitmix64_next(state = s1 ^ i)
//! s3 = splitmix64_next(state = s2 ^ n)
//! rng = xoshiro256++ seeded from splitmix64(state = s3)
//! ```
//!
//! where `splitmix64_next` is the first output of SplitMix64 (increment
//! `0x9e3779b97f4a7c15`, mixers `0xbf58476d1ce4e5b9`, `0x94d049bb133111eb`,
//! shifts 30/27/31). Each value is `(next_u64() >> 11) * 2^-53` in `[0, 1)`,
//! drawn for `x = 0, 1, ..., 2^n - 1` in order; signed members map `u` to
//! `2u - 1`.

use std::fmt;
use std::str::FromStr;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};
use serde::{Deserialize, Serialize};

use crate::cube::CubeFunction;
use crate::error::{invalid, Error, Result};

pub const GENERATOR_ID: &str = "xoshiro256++/splitmix64-seeded/u53-uniform";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyMember {
    Delta,
    RandomUniform,
    RandomSigned,
    /// Indicator of the Hamming sphere of radius `k` about the origin.
    SphereIndicator { k: usize },
    /// Indicator of `{x : x(1) = 0}`.
    HalfcubeIndicator,
    /// A fixed function; only used on its own dimension.
    Custom { name: String, function: CubeFunction },
}

impl FamilyMember {
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for FamilyMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Delta => f.write_str("delta"),
            Self::RandomUniform => f.write_str("random_uniform"),
            Self::RandomSigned => f.write_str("random_signed"),
            Self::SphereIndicator { k } => write!(f, "sphere_indicator:{k}"),
            Self::HalfcubeIndicator => f.write_str("halfcube_indicator"),
            Self::Custom { name, .. } => write!(f, "custom:{name}"),
        }
    }
}

impl FromStr for FamilyMember {
    type Err = Error;

    /// Parses the labels produced by `Display`, except `custom`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "delta" => return Ok(Self::Delta),
            "random_uniform" => return Ok(Self::RandomUniform),
            "random_signed" => return Ok(Self::RandomSigned),
            "halfcube_indicator" => return Ok(Self::HalfcubeIndicator),
            _ => {}
        }
        if let Some(k) = s.strip_prefix("sphere_indicator:") {
            let k = k
                .parse()
                .map_err(|_| invalid(format!("bad sphere radius in {s:?}")))?;
            return Ok(Self::SphereIndicator { k });
        }
        Err(invalid(format!("unknown family member {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFamily {
    pub seed: u64,
    pub members: Vec<FamilyMember>,
}

/// A member realized on a given cube.
#[derive(Clone, Debug)]
pub struct Instance {
    pub label: String,
    pub function: CubeFunction,
}

impl TestFamily {
    pub fn new(seed: u64, members: Vec<FamilyMember>) -> Result<Self> {
        if members.is_empty() {
            return Err(invalid("test family is empty"));
        }
        Ok(Self { seed, members })
    }

    /// Point mass, two random functions, sphere indicators of radius 1 and 2
    /// and the half cube.
    pub fn standard(seed: u64) -> Self {
        Self {
            seed,
            members: vec![
                FamilyMember::Delta,
                FamilyMember::RandomUniform,
                FamilyMember::RandomSigned,
                FamilyMember::SphereIndicator { k: 1 },
                FamilyMember::SphereIndicator { k: 2 },
                FamilyMember::HalfcubeIndicator,
            ],
        }
    }

    /// Members that are nonnegative by construction.
    pub fn nonnegative(&self) -> Self {
        Self {
            seed: self.seed,
            members: self
                .members
                .iter()
                .filter(|m| match m {
                    FamilyMember::RandomSigned => false,
                    FamilyMember::Custom { function, .. } => function.is_nonnegative(),
                    _ => true,
                })
                .cloned()
                .collect(),
        }
    }

    /// Comma-separated member labels, e.g. `delta,sphere_indicator:2`.
    pub fn parse_members(seed: u64, list: &str) -> Result<Self> {
        let members = list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>>>()?;
        Self::new(seed, members)
    }

    /// Realizes every member applicable on the `n`-cube. Sphere indicators
    /// with `k > n` and custom functions of another dimension are skipped.
    pub fn expand(&self, n: usize) -> Result<Vec<Instance>> {
        let mut out = Vec::with_capacity(self.members.len());
        for (index, member) in self.members.iter().enumerate() {
            let function = match member {
                FamilyMember::Delta => CubeFunction::delta(n)?,
                FamilyMember::RandomUniform | FamilyMember::RandomSigned => {
                    let mut rng = member_rng(self.seed, index, n);
                    let signed = matches!(member, FamilyMember::RandomSigned);
                    CubeFunction::from_fn(n, |_| {
                        let u = unit_interval(&mut rng);
                        if signed {
                            2.0 * u - 1.0
                        } else {
                            u
                        }
                    })?
                }
                FamilyMember::SphereIndicator { k } => {
                    if *k > n {
                        continue;
                    }
                    CubeFunction::indicator(n, |x| x.count_ones() as usize == *k)?
                }
                FamilyMember::HalfcubeIndicator => CubeFunction::indicator(n, |x| x & 1 == 0)?,
                FamilyMember::Custom { function, .. } => {
                    if function.dim() != n {
                        continue;
                    }
                    function.clone()
                }
            };
            out.push(Instance {
                label: member.label(),
                function,
            });
        }
        Ok(out)
    }
}

fn splitmix_first(state: u64) -> u64 {
    SplitMix64::seed_from_u64(state).next_u64()
}

/// The generator for member `index` on the `n`-cube.
pub fn member_rng(seed: u64, index: usize, n: usize) -> Xoshiro256PlusPlus {
    let s = splitmix_first(seed);
    let s = splitmix_first(s ^ index as u64);
    let s = splitmix_first(s ^ n as u64);
    Xoshiro256PlusPlus::seed_from_u64(s)
}

/// A uniformly random subset of `round(density 2^n)` points, as an
/// indicator: a partial Fisher-Yates shuffle of `0..2^n` driven by
/// `member_rng(seed, draw, n)`, taking index `i + floor(u (2^n - i))` at
/// step `i`.
pub fn random_set(n: usize, density: f64, seed: u64, draw: usize) -> Result<CubeFunction> {
    if !(0.0..=1.0).contains(&density) {
        return Err(invalid(format!("density must lie in [0, 1], got {density}")));
    }
    let len = CubeFunction::zeros(n)?.len();
    let size = (density * len as f64).round() as usize;
    let mut points: Vec<usize> = (0..len).collect();
    let mut rng = member_rng(seed, draw, n);
    for i in 0..size {
        let j = i + ((unit_interval(&mut rng) * (len - i) as f64) as usize).min(len - i - 1);
        points.swap(i, j);
    }
    let mut values = vec![0.0; len];
    for &x in &points[..size] {
        values[x] = 1.0;
    }
    CubeFunction::new(n, values)
}

/// `(next_u64 >> 11) * 2^-53`.
pub fn unit_interval(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_matches_reference() {
        // First SplitMix64 output for state 0 (reference implementation).
        assert_eq!(splitmix_first(0), 0xe220a8397b1dcdaf);
    }

    #[test]
    fn expansion_is_deterministic() {
        let fam = TestFamily::standard(42);
        let a = fam.expand(8).unwrap();
        let b = fam.expand(8).unwrap();
        assert_eq!(a.len(), 6);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.label, y.label);
            assert_eq!(x.function, y.function);
        }
        let other = TestFamily::standard(43).expand(8).unwrap();
        assert_ne!(a[1].function, other[1].function);
        // Different n and different member index give unrelated streams.
        assert_ne!(a[1].function.values()[..16], fam.expand(9).unwrap()[1].function.values()[..16]);
        assert_ne!(a[1].function.values()[0], a[2].function.values()[0] * 0.5 + 0.5);
    }

    #[test]
    fn members_have_expected_shapes() {
        let fam = TestFamily::standard(1);
        let inst = fam.expand(6).unwrap();
        assert_eq!(inst[0].function, CubeFunction::delta(6).unwrap());
        assert!(inst[1].function.values().iter().all(|v| (0.0..1.0).contains(v)));
        assert!(inst[2].function.values().iter().all(|v| (-1.0..1.0).contains(v)));
        assert!(inst[2].function.values().iter().any(|&v| v < 0.0));
        assert_eq!(inst[3].function.sum(), 6.0);
        assert_eq!(inst[4].function.sum(), 15.0);
        assert_eq!(inst[5].function.sum(), 32.0);
        assert_eq!(inst[5].function.values()[1], 0.0);
        assert_eq!(fam.nonnegative().members.len(), 5);
    }

    #[test]
    fn random_sets() {
        let a = random_set(10, 0.125, 9, 0).unwrap();
        assert_eq!(a.sum(), 128.0);
        assert_eq!(a, random_set(10, 0.125, 9, 0).unwrap());
        assert_ne!(a, random_set(10, 0.125, 9, 1).unwrap());
        assert_eq!(random_set(4, 0.0, 1, 0).unwrap().sum(), 0.0);
        assert_eq!(random_set(4, 1.0, 1, 0).unwrap().sum(), 16.0);
        assert!(random_set(4, 1.5, 1, 0).is_err());
    }

    #[test]
    fn parse_round_trip() {
        let fam = TestFamily::parse_members(7, "delta, sphere_indicator:3,halfcube_indicator").unwrap();
        let labels: Vec<String> = fam.members.iter().map(|m| m.label()).collect();
        assert_eq!(labels, ["delta", "sphere_indicator:3", "halfcube_indicator"]);
        assert!(TestFamily::parse_members(7, "").is_err());
        assert!(TestFamily::parse_members(7, "gaussian").is_err());
        // Radius larger than the cube is skipped.
        assert_eq!(fam.expand(2).unwrap().len(), 2);
    }

    #[test]
    fn json_round_trip() {
        let fam = TestFamily::new(
            3,
            vec![
                FamilyMember::SphereIndicator { k: 2 },
                FamilyMember::Custom {
                    name: "ones".into(),
                    function: CubeFunction::constant(3, 1.0).unwrap(),
                },
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&fam).unwrap();
        assert!(json.contains("\"kind\":\"sphere_indicator\""));
        let back: TestFamily = serde_json::from_str(&json).unwrap();
        assert_eq!(back, fam);
        assert_eq!(fam.expand(3).unwrap().len(), 2);
        assert_eq!(fam.expand(4).unwrap().len(), 1);
    }
}
