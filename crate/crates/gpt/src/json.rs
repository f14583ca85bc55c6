//! Mixtures as JSON arrays of `{label, num, den}`; joint entries carry
//! `key` and `lock` labels instead. `⊥` is written `"bot"`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{GptError, Result};
use crate::state::{JointState, KeyState, LockLabel, LockState, Mixture};

#[derive(Debug, Serialize, Deserialize)]
struct Entry {
    label: String,
    num: String,
    den: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct JointEntry {
    key: String,
    lock: String,
    num: String,
    den: String,
}

fn split(w: &BigRational) -> (String, String) {
    (w.numer().to_string(), w.denom().to_string())
}

fn join(num: &str, den: &str) -> Result<BigRational> {
    let parse = |s: &str| {
        s.parse::<BigInt>()
            .map_err(|e| GptError::Parse(format!("{s:?}: {e}")))
    };
    let den = parse(den)?;
    if den == BigInt::from(0) {
        return Err(GptError::Parse("zero denominator".into()));
    }
    Ok(BigRational::new(parse(num)?, den))
}

fn parse_lock(s: &str) -> Result<LockLabel> {
    if s == "bot" {
        Ok(LockLabel::Bottom)
    } else {
        Ok(LockLabel::Key(s.parse()?))
    }
}

fn to_string<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string(v).map_err(|e| GptError::Parse(e.to_string()))
}

fn from_str<'a, T: Deserialize<'a>>(s: &'a str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| GptError::Parse(e.to_string()))
}

fn simple_to_json<T>(m: &Mixture<T>) -> Result<String>
where
    T: Ord + Clone + std::fmt::Debug + std::fmt::Display,
{
    let entries: Vec<Entry> = m
        .iter()
        .map(|(label, w)| {
            let (num, den) = split(w);
            Entry {
                label: label.to_string(),
                num,
                den,
            }
        })
        .collect();
    to_string(&entries)
}

pub fn key_state_to_json(s: &KeyState) -> Result<String> {
    simple_to_json(s)
}

pub fn lock_state_to_json(s: &LockState) -> Result<String> {
    simple_to_json(s)
}

pub fn key_state_from_json(text: &str) -> Result<KeyState> {
    let entries: Vec<Entry> = from_str(text)?;
    Mixture::new(
        entries
            .iter()
            .map(|e| Ok((e.label.parse::<BitString>()?, join(&e.num, &e.den)?)))
            .collect::<Result<_>>()?,
    )
}

pub fn lock_state_from_json(text: &str) -> Result<LockState> {
    let entries: Vec<Entry> = from_str(text)?;
    Mixture::new(
        entries
            .iter()
            .map(|e| Ok((parse_lock(&e.label)?, join(&e.num, &e.den)?)))
            .collect::<Result<_>>()?,
    )
}

pub fn joint_state_to_json(s: &JointState) -> Result<String> {
    let entries: Vec<JointEntry> = s
        .iter()
        .map(|((k, l), w)| {
            let (num, den) = split(w);
            JointEntry {
                key: k.to_string(),
                lock: l.to_string(),
                num,
                den,
            }
        })
        .collect();
    to_string(&entries)
}

pub fn joint_state_from_json(text: &str) -> Result<JointState> {
    let entries: Vec<JointEntry> = from_str(text)?;
    Mixture::new(
        entries
            .iter()
            .map(|e| {
                Ok((
                    (e.key.parse::<BitString>()?, parse_lock(&e.lock)?),
                    join(&e.num, &e.den)?,
                ))
            })
            .collect::<Result<_>>()?,
    )
}
