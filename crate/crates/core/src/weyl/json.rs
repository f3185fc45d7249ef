//! `{"terms":[{"y":a,"x":b,"re":"p/q","im":"r/s"}, ...]}`

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::WeylElement;
use crate::scalar::{format_rational, parse_rational, GaussRational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylTermJson {
    pub y: u32,
    pub x: u32,
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

fn zero_string() -> String {
    "0".to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylJson {
    pub terms: Vec<WeylTermJson>,
}

impl From<&WeylElement> for WeylJson {
    fn from(e: &WeylElement) -> Self {
        WeylJson {
            terms: e
                .terms()
                .map(|(&(y, x), c)| WeylTermJson { y, x, re: format_rational(c.re()), im: format_rational(c.im()) })
                .collect(),
        }
    }
}

impl TryFrom<&WeylJson> for WeylElement {
    type Error = crate::scalar::ScalarError;

    /// Repeated monomials are summed.
    fn try_from(j: &WeylJson) -> Result<Self, Self::Error> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            let c = GaussRational::new(parse_rational(&t.re)?, parse_rational(&t.im)?);
            terms.push(((t.y, t.x), c));
        }
        Ok(WeylElement::from_terms(terms))
    }
}

impl Serialize for WeylElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        WeylJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeylElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = WeylJson::deserialize(d)?;
        WeylElement::try_from(&j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_format() {
        let e = &WeylElement::monomial(GaussRational::from_ratio(-3, 2), 2, 1) + &WeylElement::monomial(GaussRational::i(), 0, 0);
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"terms":[{"y":0,"x":0,"re":"0","im":"1"},{"y":2,"x":1,"re":"-3/2","im":"0"}]}"#);
        let back: WeylElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn lenient_input() {
        let back: WeylElement = serde_json::from_str(r#"{"terms":[{"y":1,"x":0,"re":"2"},{"y":1,"x":0,"re":"-2"},{"y":0,"x":1,"re":"6/4"}]}"#).unwrap();
        assert_eq!(back, WeylElement::monomial(GaussRational::from_ratio(3, 2), 0, 1));
        assert!(serde_json::from_str::<WeylElement>(r#"{"terms":[{"y":0,"x":0,"re":"0.5"}]}"#).is_err());
    }
}
