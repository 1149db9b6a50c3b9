//! Exact rational values and their `"num/den"` string form.
//!
//! Budget comparisons are branch conditions of the algorithm, so nothing in
//! this crate ever evaluates them in floating point.

use num_rational::Rational64;

use crate::error::{Error, Result};

/// Exact rational, normalized integer fraction.
pub type Ratio = Rational64;

pub fn ratio_int(v: i64) -> Ratio {
    Ratio::from_integer(v)
}

pub fn ratio(numer: i64, denom: i64) -> Ratio {
    Ratio::new(numer, denom)
}

/// Canonical `"num/den"` form, denominator always present.
pub fn ratio_to_string(r: &Ratio) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` (or a bare integer).
pub fn ratio_from_str(s: &str) -> Result<Ratio> {
    let parse_int = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| Error::BadConfig(format!("not a rational: `{s}`")))
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den == 0 {
                return Err(Error::BadConfig(format!("zero denominator: `{s}`")));
            }
            Ok(Ratio::new(parse_int(num)?, den))
        }
        None => Ok(Ratio::from_integer(parse_int(s)?)),
    }
}

/// Serde adapter serializing a [`Ratio`] as its `"num/den"` string.
pub mod ratio_str {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use super::{ratio_from_str, ratio_to_string, Ratio};

    pub fn serialize<S: Serializer>(r: &Ratio, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&ratio_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio, D::Error> {
        let s = String::deserialize(d)?;
        ratio_from_str(&s).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        let r = ratio(5, 2);
        assert_eq!(ratio_to_string(&r), "5/2");
        assert_eq!(ratio_from_str("5/2").unwrap(), r);
        assert_eq!(ratio_from_str("10/4").unwrap(), r);
        assert_eq!(ratio_from_str("7").unwrap(), ratio_int(7));
        assert_eq!(ratio_to_string(&ratio_int(0)), "0/1");
        assert!(ratio_from_str("1/0").is_err());
        assert!(ratio_from_str("x").is_err());
    }
}
