//! JSON forms of the scalar tower.
//!
//! A polynomial is `{"vars": [...], "terms": [{"exps": [...], "num": "…", "den": "…"}]}`
//! with integers as decimal strings. On input a bare integer or a rational
//! string such as `"-3/2"` is accepted as a constant. A fraction is either a
//! polynomial or `{"num": poly, "den": poly}`. Text polynomials such as
//! `"x1^2 - 3/2*t1"` are accepted on input too.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::mpoly::{MPoly, Mono, Var};
use super::ratio::Ratio;
use super::rfrac::RFrac;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    exps: Vec<u16>,
    num: String,
    #[serde(default = "one_string")]
    den: String,
}

fn one_string() -> String {
    "1".into()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyJson {
    vars: Vec<String>,
    terms: Vec<TermJson>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PolyInput {
    Full(PolyJson),
    Text(String),
    Int(i64),
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum In {
            Text(String),
            Int(i64),
        }
        match In::deserialize(d)? {
            In::Text(s) => s.parse().map_err(D::Error::custom),
            In::Int(n) => Ok(Ratio::from_int(n)),
        }
    }
}

impl Serialize for MPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let vars = self.vars();
        let terms = self
            .terms()
            .iter()
            .map(|(m, c)| TermJson {
                exps: vars.iter().map(|&v| m.exp(v)).collect(),
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect();
        PolyJson {
            vars: vars.iter().map(Var::to_string).collect(),
            terms,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match PolyInput::deserialize(d)? {
            PolyInput::Int(n) => Ok(MPoly::int(n)),
            PolyInput::Text(s) => s.parse().map_err(D::Error::custom),
            PolyInput::Full(p) => {
                let vars = p
                    .vars
                    .iter()
                    .map(|v| Var::parse(v))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(D::Error::custom)?;
                for (i, v) in vars.iter().enumerate() {
                    if vars[..i].contains(v) {
                        return Err(D::Error::custom(format!("duplicate variable `{v}`")));
                    }
                }
                let mut terms = Vec::with_capacity(p.terms.len());
                for t in p.terms {
                    if t.exps.len() != vars.len() {
                        return Err(D::Error::custom(format!(
                            "exponent vector has length {} but there are {} variables",
                            t.exps.len(),
                            vars.len()
                        )));
                    }
                    let mut m = Mono::one();
                    for (v, e) in vars.iter().zip(t.exps) {
                        m.0[v.slot()] = e;
                    }
                    let c: Ratio = format!("{}/{}", t.num, t.den)
                        .parse()
                        .map_err(D::Error::custom)?;
                    terms.push((m, c));
                }
                Ok(MPoly::from_terms(terms))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FracJson {
    num: MPoly,
    den: MPoly,
}

impl Serialize for RFrac {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.as_poly() {
            Some(p) => p.serialize(s),
            None => FracJson {
                num: self.num().clone(),
                den: self.den().clone(),
            }
            .serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for RFrac {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum In {
            Frac(FracJson),
            Poly(MPoly),
        }
        match In::deserialize(d)? {
            In::Poly(p) => Ok(RFrac::from_poly(p)),
            In::Frac(f) => RFrac::new(f.num, f.den).map_err(D::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_wire_format() {
        let p = &MPoly::x(0).pow(2).scale(&Ratio::new(3, 2)) - &MPoly::t(0);
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(
            v,
            serde_json::json!({
                "vars": ["x1", "t1"],
                "terms": [
                    {"exps": [0, 1], "num": "-1", "den": "1"},
                    {"exps": [2, 0], "num": "3", "den": "2"}
                ]
            })
        );
        let back: MPoly = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn shorthand_constants() {
        let p: MPoly = serde_json::from_str("\"-7/3\"").unwrap();
        assert_eq!(p, MPoly::constant(Ratio::new(-7, 3)));
        let q: MPoly = serde_json::from_str("4").unwrap();
        assert_eq!(q, MPoly::int(4));
    }

    #[test]
    fn big_integers_survive() {
        let json = r#"{"vars": [], "terms": [{"exps": [], "num": "340282366920938463463374607431768211457", "den": "3"}]}"#;
        let p: MPoly = serde_json::from_str(json).unwrap();
        let out = serde_json::to_string(&p).unwrap();
        assert!(out.contains("340282366920938463463374607431768211457"));
    }

    #[test]
    fn malformed_polynomials_are_rejected() {
        let arity = r#"{"vars": ["x1"], "terms": [{"exps": [1, 2], "num": "1", "den": "1"}]}"#;
        assert!(serde_json::from_str::<MPoly>(arity).is_err());
        let var = r#"{"vars": ["q1"], "terms": []}"#;
        assert!(serde_json::from_str::<MPoly>(var).is_err());
        let zero_den = r#"{"vars": [], "terms": [{"exps": [], "num": "1", "den": "0"}]}"#;
        assert!(serde_json::from_str::<MPoly>(zero_den).is_err());
    }

    #[test]
    fn fraction_wire_format() {
        let f = RFrac::new(MPoly::one(), &MPoly::x(0) + &MPoly::one()).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: RFrac = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let g: RFrac = serde_json::from_str("\"1/2\"").unwrap();
        assert_eq!(g, RFrac::constant(Ratio::new(1, 2)));
    }
}
