//! Finite subsets of `{1..N}` or of a [`FieldSpace`], with a sorted
//! member list and a membership bitmap kept in exact agreement.
//!
//! The on-disk format is line-oriented text: a header
//! `#ambient interval N=<N>` or `#ambient field q=<q> n=<n>` followed
//! by one decimal element index per line in ascending order.

use crate::error::{Error, Result};
use crate::fq::FieldSpace;
use std::io::{BufRead, Write};

/// Dense bitmap over a universe of indices.
#[derive(Clone, Debug)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(nbits: u64) -> BitSet {
        BitSet {
            words: vec![0u64; ((nbits + 63) / 64) as usize],
        }
    }

    #[inline]
    pub fn set(&mut self, i: u64) {
        self.words[(i >> 6) as usize] |= 1u64 << (i & 63);
    }

    #[inline]
    pub fn clear(&mut self, i: u64) {
        self.words[(i >> 6) as usize] &= !(1u64 << (i & 63));
    }

    #[inline]
    pub fn get(&self, i: u64) -> bool {
        (self.words[(i >> 6) as usize] >> (i & 63)) & 1 != 0
    }
}

/// The universe a set lives in.
#[derive(Clone, Debug, PartialEq)]
pub enum Ambient {
    /// The integer interval `{1, …, N}`.
    Interval { n: u64 },
    Field(FieldSpace),
}

impl Ambient {
    /// Number of elements in the universe.
    pub fn universe_size(&self) -> u64 {
        match self {
            Ambient::Interval { n } => *n,
            Ambient::Field(s) => s.size(),
        }
    }

    /// Size of the index space a bitmap must cover (interval indices are 1-based).
    fn bit_capacity(&self) -> u64 {
        match self {
            Ambient::Interval { n } => n + 1,
            Ambient::Field(s) => s.size(),
        }
    }

    fn index_valid(&self, v: u64) -> bool {
        match self {
            Ambient::Interval { n } => v >= 1 && v <= *n,
            Ambient::Field(s) => v < s.size(),
        }
    }

    /// All universe indices in canonical order.
    pub fn iter_universe(&self) -> impl Iterator<Item = u64> + '_ {
        match self {
            Ambient::Interval { n } => 1..=*n,
            Ambient::Field(s) => {
                if s.size() == 0 {
                    1..=0
                } else {
                    0..=s.size() - 1
                }
            }
        }
    }

    pub fn field(&self) -> Option<&FieldSpace> {
        match self {
            Ambient::Field(s) => Some(s),
            Ambient::Interval { .. } => None,
        }
    }
}

/// A subset of its ambient, with members sorted ascending.
#[derive(Clone, Debug)]
pub struct GroundSet {
    ambient: Ambient,
    members: Vec<u64>,
    bits: BitSet,
}

impl GroundSet {
    /// Build from arbitrary member indices; sorts, rejects duplicates and
    /// out-of-range values.
    pub fn from_members(ambient: Ambient, mut members: Vec<u64>) -> Result<GroundSet> {
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DomainError("duplicate member".into()));
        }
        if let Some(&v) = members.iter().find(|&&v| !ambient.index_valid(v)) {
            return Err(Error::DomainError(format!(
                "member {} outside the ambient universe",
                v
            )));
        }
        let mut bits = BitSet::new(ambient.bit_capacity());
        for &v in &members {
            bits.set(v);
        }
        Ok(GroundSet {
            ambient,
            members,
            bits,
        })
    }

    /// The whole universe as a set.
    pub fn full(ambient: Ambient) -> GroundSet {
        let members: Vec<u64> = ambient.iter_universe().collect();
        let mut bits = BitSet::new(ambient.bit_capacity());
        for &v in &members {
            bits.set(v);
        }
        GroundSet {
            ambient,
            members,
            bits,
        }
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn contains(&self, v: u64) -> bool {
        self.ambient.index_valid(v) && self.bits.get(v)
    }

    pub(crate) fn bits(&self) -> &BitSet {
        &self.bits
    }

    /// Subset with the given members removed (ambient kept).
    pub fn without(&self, removed: &[u64]) -> GroundSet {
        let mut gone = BitSet::new(self.ambient.bit_capacity());
        for &v in removed {
            gone.set(v);
        }
        let members: Vec<u64> = self
            .members
            .iter()
            .copied()
            .filter(|&v| !gone.get(v))
            .collect();
        GroundSet::from_members(self.ambient.clone(), members)
            .expect("filtered members are valid")
    }

    // --- text format ---

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        match &self.ambient {
            Ambient::Interval { n } => writeln!(w, "#ambient interval N={}", n)?,
            Ambient::Field(s) => writeln!(w, "#ambient field q={} n={}", s.q(), s.n())?,
        }
        for &v in &self.members {
            writeln!(w, "{}", v)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("format is ascii")
    }

    pub fn read_from(r: &mut impl BufRead) -> Result<GroundSet> {
        let mut lines = r.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or(Error::Parse {
                line: 1,
                msg: "empty file".into(),
            })
            .and_then(|(i, l)| l.map(|l| (i, l)).map_err(Error::Io))?;
        let ambient = parse_header(&header)?;
        let mut members = Vec::new();
        let mut prev: Option<u64> = None;
        for (i, line) in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: u64 = line.parse().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("expected a decimal index, found {:?}", line),
            })?;
            if let Some(p) = prev {
                if v <= p {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: format!("indices must be strictly increasing ({} after {})", v, p),
                    });
                }
            }
            if !ambient.index_valid(v) {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("index {} outside the ambient universe", v),
                });
            }
            prev = Some(v);
            members.push(v);
        }
        GroundSet::from_members(ambient, members)
    }

    pub fn from_text(text: &str) -> Result<GroundSet> {
        GroundSet::read_from(&mut text.as_bytes())
    }
}

fn parse_header(header: &str) -> Result<Ambient> {
    let bad = |msg: &str| Error::Parse {
        line: 1,
        msg: msg.into(),
    };
    let rest = header
        .strip_prefix("#ambient ")
        .ok_or_else(|| bad("header must start with `#ambient `"))?;
    let mut parts = rest.split_whitespace();
    match parts.next() {
        Some("interval") => {
            let n = parts
                .next()
                .and_then(|kv| kv.strip_prefix("N="))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| bad("interval header needs N=<N>"))?;
            if parts.next().is_some() {
                return Err(bad("trailing tokens in header"));
            }
            Ok(Ambient::Interval { n })
        }
        Some("field") => {
            let q = parts
                .next()
                .and_then(|kv| kv.strip_prefix("q="))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| bad("field header needs q=<q>"))?;
            let n = parts
                .next()
                .and_then(|kv| kv.strip_prefix("n="))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| bad("field header needs n=<n>"))?;
            if parts.next().is_some() {
                return Err(bad("trailing tokens in header"));
            }
            Ok(Ambient::Field(FieldSpace::make(q, n)?))
        }
        _ => Err(bad("ambient must be `interval` or `field`")),
    }
}

/// `{1..N}` as a ground set.
pub fn interval_set(n: u64) -> GroundSet {
    GroundSet::full(Ambient::Interval { n })
}
