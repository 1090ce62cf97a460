//! Serde helpers that store doubles as the hex of their IEEE-754 bits, so
//! snapshots restore every value bit-for-bit.

use serde::{de, Deserialize, Deserializer, Serializer};

fn encode(x: f64) -> String {
    format!("{:016x}", x.to_bits())
}

fn decode<E: de::Error>(s: &str) -> Result<f64, E> {
    u64::from_str_radix(s, 16)
        .map(f64::from_bits)
        .map_err(|_| E::custom(format!("`{s}` is not a 16-digit hex double")))
}

pub mod scalar {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&encode(*x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        decode(&s)
    }
}

pub mod vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&encode(*x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<String>::deserialize(d)?.iter().map(|s| decode(s)).collect()
    }
}
