//! Serde adapters writing `f64` as decimal strings so values round-trip bit-exactly.

use serde::{Deserialize, Deserializer, Serializer};

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Text(String),
    Number(f64),
}

fn parse<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
    match r {
        Repr::Number(v) => Ok(v),
        Repr::Text(s) => s
            .parse::<f64>()
            .map_err(|_| E::custom(format!("`{s}` is not a number"))),
    }
}

pub fn to_string(v: f64) -> String {
    format!("{v:?}")
}

pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&to_string(*v))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    parse(Repr::deserialize(d)?)
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| to_string(*x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Repr>::deserialize(d)?
            .into_iter()
            .map(parse::<D::Error>)
            .collect()
    }
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_some(&to_string(*x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<Repr>::deserialize(d)?
            .map(parse::<D::Error>)
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Probe {
        #[serde(with = "super")]
        x: f64,
        #[serde(with = "super::vec")]
        v: Vec<f64>,
        #[serde(with = "super::option")]
        o: Option<f64>,
    }

    proptest! {
        #[test]
        fn bit_exact_round_trip(x in any::<f64>().prop_filter("finite", |v| v.is_finite()),
                                v in prop::collection::vec(-1e300f64..1e300, 0..5)) {
            let p = Probe { x, v, o: Some(x) };
            let text = serde_json::to_string(&p).unwrap();
            let back: Probe = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back.x.to_bits(), x.to_bits());
            prop_assert_eq!(back, p);
        }
    }
}
