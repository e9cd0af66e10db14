//! Finitely presented algebras, Kähler differentials and the two-term cotangent complex.

use std::fmt;

use serde_json::{json, Value};

use super::coeffs::{require_lci, PolyCoeffs};
use super::poly::Poly;
use crate::dold_kan::{Coeffs, FreeComplex};
use crate::error::{Error, Result};
use crate::linalg::RingSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regularity {
    /// A polynomial ring.
    Smooth,
    /// The relations, in the given order, form a regular sequence (asserted, not verified).
    RegularSequence,
    Unknown,
}

impl Regularity {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "smooth" => Ok(Regularity::Smooth),
            "regseq" => Ok(Regularity::RegularSequence),
            "unknown" => Ok(Regularity::Unknown),
            _ => Err(Error::Parse(format!("unknown regularity {s:?}"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regularity::Smooth => "smooth",
            Regularity::RegularSequence => "regseq",
            Regularity::Unknown => "unknown",
        }
    }
}

/// `k[x_1..x_n]/(f_1..f_c)` over a ground ring `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraPresentation {
    ring: RingSpec,
    vars: Vec<String>,
    rels: Vec<Poly>,
    regularity: Regularity,
    var_weights: Vec<i64>,
}

impl AlgebraPresentation {
    pub fn new(ring: RingSpec, vars: Vec<String>, rels: Vec<Poly>, regularity: Regularity) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for v in &vars {
            if !seen.insert(v) {
                return Err(Error::Parse(format!("variable {v:?} listed twice")));
            }
        }
        if regularity == Regularity::Smooth && !rels.is_empty() {
            return Err(Error::pre("a smooth presentation has no relations"));
        }
        if rels.iter().any(|f| f.terms().values().any(|c| ring.reduce(c).is_err())) {
            return Err(Error::Parse(format!("relation coefficients must lie in {ring}")));
        }
        let rels = rels.into_iter().map(|f| f.reduce(ring)).collect::<Vec<_>>();
        let var_weights = vec![1; vars.len()];
        Ok(AlgebraPresentation { ring, vars, rels, regularity, var_weights })
    }

    pub fn parse_parts(ring: &str, vars: &[&str], rels: &[&str], regularity: &str) -> Result<Self> {
        let ring = RingSpec::parse(ring)?;
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let rels = rels.iter().map(|s| Poly::parse(s, &vars)).collect::<Result<Vec<_>>>()?;
        Self::new(ring, vars, rels, Regularity::parse(regularity)?)
    }

    /// The built-in examples: `Fp-over-Z` (with the given prime), `Zx`, `Zxy`, `hypersurface-x2`.
    pub fn preset(name: &str, p: u64) -> Result<Self> {
        match name {
            "Fp-over-Z" => {
                RingSpec::fp(p)?;
                Self::parse_parts("Z", &[], &[&p.to_string()], "regseq")
            }
            "Zx" => Self::parse_parts("Z", &["x"], &[], "smooth"),
            "Zxy" => Self::parse_parts("Z", &["x", "y"], &[], "smooth"),
            "hypersurface-x2" => Self::parse_parts("Z", &["x"], &["x^2"], "regseq"),
            _ => Err(Error::Parse(format!("unknown preset {name:?}"))),
        }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn relations(&self) -> &[Poly] {
        &self.rels
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }

    pub fn var_weights(&self) -> &[i64] {
        &self.var_weights
    }

    /// Degree of each relation for the variable weights (0 for constants).
    pub fn relation_degrees(&self) -> Vec<i64> {
        self.rels.iter().map(|f| f.weighted_degree(&self.var_weights).unwrap_or(0).max(0)).collect()
    }

    pub fn relations_homogeneous(&self) -> bool {
        self.rels.iter().all(|f| f.is_homogeneous(&self.var_weights))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring.to_string(),
            "vars": self.vars,
            "rels": self.rels.iter().map(|f| f.format(&self.vars)).collect::<Vec<_>>(),
            "regularity": self.regularity.as_str(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let ring = v["ring"].as_str().ok_or_else(|| Error::Parse("presentation: missing ring".into()))?;
        let strings = |key: &str| -> Result<Vec<String>> {
            match &v[key] {
                Value::Null => Ok(Vec::new()),
                Value::Array(a) => a
                    .iter()
                    .map(|x| x.as_str().map(str::to_string).ok_or_else(|| Error::Parse(format!("presentation: {key} must hold strings"))))
                    .collect(),
                _ => Err(Error::Parse(format!("presentation: {key} must be a list"))),
            }
        };
        let vars = strings("vars")?;
        let rels = strings("rels")?;
        let reg = v["regularity"].as_str().unwrap_or(if rels.is_empty() { "smooth" } else { "unknown" });
        let vr: Vec<&str> = vars.iter().map(String::as_str).collect();
        let rr: Vec<&str> = rels.iter().map(String::as_str).collect();
        Self::parse_parts(ring, &vr, &rr, reg)
    }
}

impl fmt::Display for AlgebraPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.ring, self.vars.join(","))?;
        if !self.rels.is_empty() {
            let rs: Vec<String> = self.rels.iter().map(|r| r.format(&self.vars)).collect();
            write!(f, "/({})", rs.join(", "))?;
        }
        Ok(())
    }
}

/// A module over a presented ring: free on `generators` modulo the rows of `relations`.
#[derive(Clone, Debug)]
pub struct ModulePresentation {
    pub ring: PolyCoeffs,
    pub vars: Vec<String>,
    pub generators: Vec<String>,
    pub relations: Vec<Vec<Poly>>,
}

impl ModulePresentation {
    pub fn is_free(&self) -> bool {
        self.relations.iter().all(|r| r.iter().all(Poly::is_zero))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring.ring().to_string(),
            "generators": self.generators,
            "relations": self.relations.iter().map(|r| r.iter().map(|p| p.format(&self.vars)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for ModulePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generators.is_empty() {
            return write!(f, "0");
        }
        write!(f, "<{}>", self.generators.join(", "))?;
        let rows: Vec<String> = self
            .relations
            .iter()
            .filter(|r| r.iter().any(|p| !p.is_zero()))
            .map(|r| {
                let parts: Vec<String> = r
                    .iter()
                    .zip(&self.generators)
                    .filter(|(p, _)| !p.is_zero())
                    .map(|(p, g)| if p.terms().len() > 1 { format!("({})*{g}", p.format(&self.vars)) } else { format!("{}*{g}", p.format(&self.vars)) })
                    .collect();
                parts.join(" + ")
            })
            .collect();
        if !rows.is_empty() {
            write!(f, "/({})", rows.join(", "))?;
        }
        Ok(())
    }
}

/// `Ω¹`: generators `dx_i` modulo the rows `df_j`, over the presented ring.
pub fn kahler(p: &AlgebraPresentation) -> Result<ModulePresentation> {
    let ring = PolyCoeffs::quotient(p)?;
    let generators = p.vars.iter().map(|v| format!("d{v}")).collect();
    let relations = p.rels.iter().map(|f| (0..p.vars.len()).map(|i| ring.reduce(&f.derivative(i))).collect()).collect();
    Ok(ModulePresentation { ring, vars: p.vars.clone(), generators, relations })
}

/// The cotangent complex `[I/I² → Ω¹ ⊗ R]` in degrees 1 and 0 over `R`.
///
/// Internal degrees: `dx_i` has the weight of `x_i`, the class of `f_j` has the degree of `f_j`.
pub fn cotangent_complex(p: &AlgebraPresentation) -> Result<FreeComplex<PolyCoeffs>> {
    require_lci(p)?;
    let ring = PolyCoeffs::quotient(p)?;
    let n = p.vars.len();
    let c = p.rels.len();
    let mut out = FreeComplex::zero(ring.clone());
    if n > 0 {
        out.ranks.insert(0, n);
        out.weights.insert(0, p.var_weights.clone());
    }
    if c > 0 {
        out.ranks.insert(1, c);
        out.weights.insert(1, p.relation_degrees());
        if n > 0 {
            let cols = p
                .rels
                .iter()
                .map(|f| {
                    (0..n)
                        .filter_map(|i| {
                            let e = ring.reduce(&f.derivative(i));
                            (!ring.is_zero(&e)).then_some((i, e))
                        })
                        .collect()
                })
                .collect();
            out.d.insert(1, cols);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dalg::coeffs::realize;

    #[test]
    fn kahler_examples() {
        let zx = AlgebraPresentation::preset("Zx", 2).unwrap();
        let o = kahler(&zx).unwrap();
        assert!(o.is_free());
        assert_eq!(o.to_string(), "<dx>");
        let fp = AlgebraPresentation::preset("Fp-over-Z", 3).unwrap();
        assert_eq!(kahler(&fp).unwrap().to_string(), "0");
        let h = AlgebraPresentation::preset("hypersurface-x2", 2).unwrap();
        assert_eq!(kahler(&h).unwrap().to_string(), "<dx>/(2*x*dx)");
    }

    #[test]
    fn cotangent_examples() {
        let fp = AlgebraPresentation::preset("Fp-over-Z", 5).unwrap();
        let l = cotangent_complex(&fp).unwrap();
        let r = realize(&l, None).unwrap();
        assert_eq!(r.complex.ring(), RingSpec::fp(5).unwrap());
        assert_eq!(r.complex.homology().to_string(), "H_1 = F_5");
        let h = AlgebraPresentation::preset("hypersurface-x2", 2).unwrap();
        let l = cotangent_complex(&h).unwrap();
        assert_eq!(l.d[&1][0], vec![(0, Poly::parse("2*x", h.vars()).unwrap())]);
        let unknown = AlgebraPresentation::parse_parts("Z", &["x"], &["x^2"], "unknown").unwrap();
        assert!(matches!(cotangent_complex(&unknown), Err(Error::Precondition(_))));
    }

    #[test]
    fn json_round_trip() {
        let h = AlgebraPresentation::parse_parts("Z", &["x", "y"], &["x^2 - 3*y"], "regseq").unwrap();
        let back = AlgebraPresentation::from_json(&h.to_json()).unwrap();
        assert_eq!(back, h);
        assert!(AlgebraPresentation::from_json(&json!({"ring": "Z", "vars": ["x"], "rels": ["x^"]})).is_err());
    }
}
