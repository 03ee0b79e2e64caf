use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// The bundled configuration for twists of the conductor-11 curve.
pub const E11_CONFIG: &str = include_str!("../../configs/e11.cfg");

/// `[c1, c2, c3, c4, c6]` of `y² + c1 xy + c3 y = x³ + c2 x² + c4 x + c6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weierstrass {
    pub c1: i64,
    pub c2: i64,
    pub c3: i64,
    pub c4: i64,
    pub c6: i64,
}

impl Weierstrass {
    pub const fn new(c1: i64, c2: i64, c3: i64, c4: i64, c6: i64) -> Self {
        Self { c1, c2, c3, c4, c6 }
    }

    /// Discriminant of the model.
    pub fn discriminant(&self) -> i128 {
        let [a1, a2, a3, a4, a6] = [self.c1, self.c2, self.c3, self.c4, self.c6].map(i128::from);
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }
}

/// Arithmetic inputs of a family of quadratic twists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFamilyParams {
    pub conductor: u64,
    pub weierstrass: Weierstrass,
    pub kappa_e: f64,
    pub a_minus_half: f64,
    pub r1: f64,
    /// Stored for completeness; nothing downstream reads it.
    pub r2: Option<f64>,
    pub delta: f64,
    /// Sign of the functional equation, `±1`.
    pub omega: i8,
    /// Optional default for the discriminant bound `X`.
    pub x_bound: Option<f64>,
}

const KEYS: [&str; 13] = [
    "conductor", "c1", "c2", "c3", "c4", "c6", "kappa_E", "a_minus_half", "r1", "r2", "delta",
    "omega", "X_bound",
];

impl CurveFamilyParams {
    /// Twists of `y² + y = x³ - x²`, as bundled in [`E11_CONFIG`].
    pub fn e11() -> Self {
        Self::parse(E11_CONFIG).expect("bundled config is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if !primal::is_prime(self.conductor) {
            return Err(Error::Config(format!(
                "conductor {} is not prime",
                self.conductor
            )));
        }
        for (name, v) in [
            ("kappa_E", self.kappa_e),
            ("a_minus_half", self.a_minus_half),
            ("r1", self.r1),
            ("delta", self.delta),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(x) = self.x_bound {
            if !(x > 1.0) {
                return Err(Error::Config(format!("X_bound must exceed 1, got {x}")));
            }
        }
        if self.omega.abs() != 1 {
            return Err(Error::Config(format!("omega must be ±1, got {}", self.omega)));
        }
        if self.weierstrass.discriminant() == 0 {
            return Err(Error::Config("singular Weierstrass model".into()));
        }
        Ok(())
    }

    /// Parses `key = value` lines. `#` starts a comment; keys are
    /// case-sensitive and may appear once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key '{k}'", i + 1)));
            }
            if map.insert(k, v.trim()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key '{k}'", i + 1)));
            }
        }
        fn get<T: std::str::FromStr>(map: &BTreeMap<&str, &str>, k: &str) -> Result<Option<T>> {
            map.get(k)
                .map(|v| {
                    v.parse::<T>()
                        .map_err(|_| Error::Config(format!("bad value '{v}' for {k}")))
                })
                .transpose()
        }
        fn need<T: std::str::FromStr>(map: &BTreeMap<&str, &str>, k: &str) -> Result<T> {
            get(map, k)?.ok_or_else(|| Error::Config(format!("missing key {k}")))
        }
        let p = Self {
            conductor: need(&map, "conductor")?,
            weierstrass: Weierstrass::new(
                need(&map, "c1")?,
                need(&map, "c2")?,
                need(&map, "c3")?,
                need(&map, "c4")?,
                need(&map, "c6")?,
            ),
            kappa_e: need(&map, "kappa_E")?,
            a_minus_half: need(&map, "a_minus_half")?,
            r1: need(&map, "r1")?,
            r2: get(&map, "r2")?,
            delta: need(&map, "delta")?,
            omega: need(&map, "omega")?,
            x_bound: get(&map, "X_bound")?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_e11() {
        let p = CurveFamilyParams::e11();
        assert_eq!(p.conductor, 11);
        assert_eq!(p.weierstrass, Weierstrass::new(0, -1, 1, 0, 0));
        assert_eq!(p.weierstrass.discriminant(), -11);
        assert_eq!(p.omega, 1);
        assert_eq!(p.r2, None);
        assert_eq!(p.x_bound, Some(400000.0));
    }

    #[test]
    fn rejects_bad_configs() {
        let good = E11_CONFIG;
        for (from, to) in [
            ("conductor = 11", "conductor = 12"),
            ("delta = 0.185116", "delta = -1"),
            ("omega = 1", "omega = 2"),
            ("c6 = 0", "c6 = 0\nc6 = 1"),
            ("r1 = 2.8600", "r1 = abc"),
            ("kappa_E = 6.346046521", ""),
            ("c1 = 0", "c1 = 0\nc7 = 3"),
        ] {
            let bad = good.replace(from, to);
            assert!(
                matches!(CurveFamilyParams::parse(&bad), Err(Error::Config(_))),
                "{from} -> {to}"
            );
        }
        let with_r2 = format!("{good}\nr2 = 0.5\n");
        assert_eq!(CurveFamilyParams::parse(&with_r2).unwrap().r2, Some(0.5));
        // y² = x³ is singular
        let cusp = good.replace("c2 = -1", "c2 = 0").replace("c3 = 1", "c3 = 0");
        assert!(CurveFamilyParams::parse(&cusp).is_err());
    }
}
