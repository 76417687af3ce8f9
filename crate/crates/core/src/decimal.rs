//! Serde adapters writing big integers as exact decimal strings.

use rug::Integer;
use serde::{de, Deserialize, Deserializer, Serializer};

use crate::ntheory::parse_integer;

pub fn serialize<S: Serializer>(n: &Integer, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Integer, D::Error> {
    let s = String::deserialize(d)?;
    parse_integer(&s).ok_or_else(|| de::Error::custom(format!("not a decimal integer: {s:?}")))
}

pub mod vec {
    use super::*;
    use serde::Serialize;

    pub fn serialize<S: Serializer>(v: &[Integer], s: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(Integer::to_string).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Integer>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|s| parse_integer(&s).ok_or_else(|| de::Error::custom(format!("not a decimal integer: {s:?}"))))
            .collect()
    }
}
