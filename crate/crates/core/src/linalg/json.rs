//! Canonical JSON encoding of a matrix: `{"n": 2, "re": [[..],[..]], "im": [[..],[..]]}`.
//!
//! Arrays are row-major `n x n`. Decoding rejects ragged arrays, a mismatched
//! `n` and non-finite entries.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::{SquareMatrix, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalMatrix {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&SquareMatrix> for CanonicalMatrix {
    fn from(m: &SquareMatrix) -> Self {
        let rows = m.rows();
        Self {
            n: m.n(),
            re: rows.iter().map(|r| r.iter().map(|z| z.re).collect()).collect(),
            im: rows.iter().map(|r| r.iter().map(|z| z.im).collect()).collect(),
        }
    }
}

impl TryFrom<CanonicalMatrix> for SquareMatrix {
    type Error = Error;

    fn try_from(c: CanonicalMatrix) -> Result<Self> {
        if c.n == 0 {
            return Err(Error::MalformedMatrix("n must be positive".into()));
        }
        if c.re.len() != c.n || c.im.len() != c.n {
            return Err(Error::MalformedMatrix(format!(
                "expected {} rows, got re: {}, im: {}",
                c.n,
                c.re.len(),
                c.im.len()
            )));
        }
        let rows = c
            .re
            .iter()
            .zip(&c.im)
            .enumerate()
            .map(|(r, (re, im))| {
                if re.len() != c.n || im.len() != c.n {
                    return Err(Error::MalformedMatrix(format!("row {r} is ragged")));
                }
                Ok(re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect())
            })
            .collect::<Result<Vec<Vec<C64>>>>()?;
        SquareMatrix::from_rows(&rows)
    }
}

impl Serialize for SquareMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CanonicalMatrix::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SquareMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let c = CanonicalMatrix::deserialize(deserializer)?;
        SquareMatrix::try_from(c).map_err(serde::de::Error::custom)
    }
}

pub fn to_json(m: &SquareMatrix) -> String {
    serde_json::to_string(m).expect("matrix serialization cannot fail")
}

pub fn from_json(s: &str) -> Result<SquareMatrix> {
    serde_json::from_str(s).map_err(|e| Error::MalformedMatrix(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn encodes_canonical_layout() {
        let m = SquareMatrix::from_array([[C64::new(0.0, -3.0), C64::new(5.0, 0.0)], [C64::new(5.0, 0.0), C64::new(0.0, 3.0)]]);
        assert_eq!(to_json(&m), r#"{"n":2,"re":[[0.0,5.0],[5.0,0.0]],"im":[[-3.0,0.0],[0.0,3.0]]}"#);
    }

    #[test]
    fn rejects_ragged_and_mismatched() {
        assert!(from_json(r#"{"n":2,"re":[[1,0],[0]],"im":[[0,0],[0,0]]}"#).is_err());
        assert!(from_json(r#"{"n":3,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]}"#).is_err());
        assert!(from_json(r#"{"n":1,"re":[[1]]}"#).is_err());
        assert!(from_json(r#"{"n":1,"re":[[1e999]],"im":[[0]]}"#).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip_is_bit_exact(entries in prop::collection::vec(-1e6f64..1e6, 18)) {
            let m = SquareMatrix::from_fn(3, |r, c| C64::new(entries[2 * (3 * r + c)], entries[2 * (3 * r + c) + 1]));
            let back = from_json(&to_json(&m)).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
