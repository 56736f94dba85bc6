//! Non-finite values as the strings `"inf"`, `"-inf"`, `"nan"`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr {
    Num(f64),
    Tag(String),
}

pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    match *v {
        x if x.is_finite() => Repr::Num(x),
        x if x.is_nan() => Repr::Tag("nan".into()),
        x if x > 0.0 => Repr::Tag("inf".into()),
        _ => Repr::Tag("-inf".into()),
    }
    .serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    match Repr::deserialize(d)? {
        Repr::Num(x) => Ok(x),
        Repr::Tag(t) => t.parse().map_err(serde::de::Error::custom),
    }
}
