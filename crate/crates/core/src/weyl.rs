//! Rational Weyl algebra descriptors, the divisibility order between them, and
//! divisibility chains used as finite stand-ins for the ultraproduct.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_rational, is_integer, parse_rational, rational_gcd, to_f64, Rational};

/// A rational Weyl algebra `A(a, b)` generated by `U^a`, `V^b` with `U^a V^b = q V^b U^a`,
/// where `q = e^{2πi M/N}` and `M/N` is `a·b·ħ/2π` in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraDescriptor {
    a: Rational,
    b: Rational,
    hbar_over_2pi: Rational,
    m: BigInt,
    n: BigInt,
    q_angle: Rational,
}

impl AlgebraDescriptor {
    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn hbar_over_2pi(&self) -> &Rational {
        &self.hbar_over_2pi
    }

    /// Numerator of `a·b·ħ/2π` in lowest terms.
    pub fn m(&self) -> &BigInt {
        &self.m
    }

    /// Order of the root of unity `q`; the dimension of every irreducible module.
    pub fn n(&self) -> &BigInt {
        &self.n
    }

    /// `M/N` reduced into `[0, 1)`.
    pub fn q_angle(&self) -> &Rational {
        &self.q_angle
    }

    /// `N` as a machine integer, if it fits.
    pub fn dim(&self) -> Result<usize> {
        self.n
            .to_usize()
            .ok_or_else(|| Error::InvalidParameter(format!("dimension {} does not fit in memory", self.n)))
    }

    /// `M mod N` as a machine integer (the exponent of `q` in `e^{2πi/N}` units).
    pub fn m_mod_n(&self) -> Result<usize> {
        self.m
            .mod_floor(&self.n)
            .to_usize()
            .ok_or_else(|| Error::InvalidParameter("M mod N overflows".into()))
    }

    /// The real Planck constant `ħ = 2π · (ħ/2π)`.
    pub fn hbar(&self) -> f64 {
        std::f64::consts::TAU * to_f64(&self.hbar_over_2pi)
    }

    pub fn a_f64(&self) -> f64 {
        to_f64(&self.a)
    }

    pub fn b_f64(&self) -> f64 {
        to_f64(&self.b)
    }

    pub fn is_commutative(&self) -> bool {
        self.n.is_one()
    }
}

impl fmt::Display for AlgebraDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "A({}, {}; ħ/2π={})",
            format_rational(&self.a),
            format_rational(&self.b),
            format_rational(&self.hbar_over_2pi)
        )
    }
}

/// Builds the descriptor of `A(a, b)` at the given `ħ/2π`.
pub fn make_algebra(a: &Rational, b: &Rational, hbar_over_2pi: &Rational) -> Result<AlgebraDescriptor> {
    for (name, value) in [("a", a), ("b", b), ("hbar_over_2pi", hbar_over_2pi)] {
        if value <= &Rational::zero() {
            return Err(Error::InvalidParameter(format!(
                "{name} must be positive, got {}",
                format_rational(value)
            )));
        }
    }
    let product = a * b * hbar_over_2pi;
    let m = product.numer().clone();
    let n = product.denom().clone();
    let q_angle = Rational::new(m.mod_floor(&n), n.clone());
    Ok(AlgebraDescriptor {
        a: a.clone(),
        b: b.clone(),
        hbar_over_2pi: hbar_over_2pi.clone(),
        m,
        n,
        q_angle,
    })
}

fn same_planck(x: &AlgebraDescriptor, y: &AlgebraDescriptor) -> Result<()> {
    if x.hbar_over_2pi != y.hbar_over_2pi {
        return Err(Error::IncompatiblePlanck(
            format_rational(&x.hbar_over_2pi),
            format_rational(&y.hbar_over_2pi),
        ));
    }
    Ok(())
}

/// `true` iff `sub ⊆ parent`, i.e. `U^{a_sub}` is a power of `U^{a_parent}` and likewise for `V`.
pub fn is_subalgebra(sub: &AlgebraDescriptor, parent: &AlgebraDescriptor) -> Result<bool> {
    same_planck(sub, parent)?;
    Ok(is_integer(&(&sub.a / &parent.a)) && is_integer(&(&sub.b / &parent.b)))
}

/// Smallest algebra containing both arguments.
pub fn join(x: &AlgebraDescriptor, y: &AlgebraDescriptor) -> Result<AlgebraDescriptor> {
    same_planck(x, y)?;
    make_algebra(&rational_gcd(&x.a, &y.a), &rational_gcd(&x.b, &y.b), &x.hbar_over_2pi)
}

/// Denominator schedule `ν_n` for chain entry `n = 1, 2, …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// `ν_n = n!`
    Factorial,
    /// `ν_n` = the n-th distinct value of `lcm(1..k)`.
    Lcm,
    /// `ν_n = 2^n`
    Doubling,
}

impl Schedule {
    pub fn name(self) -> &'static str {
        match self {
            Schedule::Factorial => "factorial",
            Schedule::Lcm => "lcm",
            Schedule::Doubling => "doubling",
        }
    }

    /// The first `depth` denominators.
    pub fn denominators(self, depth: usize) -> Vec<BigInt> {
        match self {
            Schedule::Factorial => {
                let mut acc = BigInt::one();
                (1..=depth)
                    .map(|n| {
                        acc *= n;
                        acc.clone()
                    })
                    .collect()
            }
            Schedule::Doubling => (1..=depth).map(|n| BigInt::one() << n).collect(),
            Schedule::Lcm => {
                let mut out: Vec<BigInt> = Vec::with_capacity(depth);
                let mut acc = BigInt::one();
                let mut k = 1u64;
                while out.len() < depth {
                    acc = acc.lcm(&BigInt::from(k));
                    if out.last() != Some(&acc) {
                        out.push(acc.clone());
                    }
                    k += 1;
                }
                out
            }
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "factorial" => Ok(Schedule::Factorial),
            "lcm" => Ok(Schedule::Lcm),
            "doubling" => Ok(Schedule::Doubling),
            other => Err(Error::InvalidParameter(format!("unknown schedule '{other}'"))),
        }
    }
}

/// `<schedule>:<depth>`, e.g. `doubling:6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainSpec {
    pub schedule: Schedule,
    pub depth: usize,
}

impl Default for ChainSpec {
    fn default() -> Self {
        ChainSpec {
            schedule: Schedule::Doubling,
            depth: 6,
        }
    }
}

impl FromStr for ChainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, depth) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter(format!("chain must look like schedule:depth, got '{s}'")))?;
        let depth: usize = depth
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad chain depth '{depth}'")))?;
        if depth == 0 {
            return Err(Error::InvalidParameter("chain depth must be at least 1".into()));
        }
        Ok(ChainSpec {
            schedule: name.parse()?,
            depth,
        })
    }
}

impl fmt::Display for ChainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.schedule, self.depth)
    }
}

/// An increasing divisibility chain of algebras with constant ratio `a/b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitChain {
    pub entries: Vec<AlgebraDescriptor>,
    pub h_ratio: Rational,
    pub schedule_name: String,
}

impl LimitChain {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dims(&self) -> Vec<BigInt> {
        self.entries.iter().map(|e| e.n.clone()).collect()
    }
}

/// Builds the chain `b_n = 1/ν_n`, `a_n = h·b_n` for `n = 1..=depth`.
pub fn build_chain(
    h_ratio: &Rational,
    depth: usize,
    hbar_over_2pi: &Rational,
    schedule: Schedule,
) -> Result<LimitChain> {
    if depth == 0 {
        return Err(Error::InvalidParameter("chain depth must be at least 1".into()));
    }
    if h_ratio <= &Rational::zero() {
        return Err(Error::InvalidParameter("h_ratio must be positive".into()));
    }
    let entries = schedule
        .denominators(depth)
        .into_iter()
        .map(|nu| {
            let b = Rational::new(BigInt::one(), nu);
            let a = h_ratio * &b;
            make_algebra(&a, &b, hbar_over_2pi)
        })
        .collect::<Result<Vec<_>>>()?;
    for pair in entries.windows(2) {
        let (earlier, later) = (&pair[0], &pair[1]);
        if !is_subalgebra(earlier, later)? {
            return Err(Error::Internal(format!("{earlier} is not contained in {later}")));
        }
        if later.n <= earlier.n {
            return Err(Error::Internal(format!(
                "schedule {schedule} gives non-increasing N ({} then {})",
                earlier.n, later.n
            )));
        }
    }
    Ok(LimitChain {
        entries,
        h_ratio: h_ratio.clone(),
        schedule_name: schedule.name().to_string(),
    })
}

fn big_json(n: &BigInt) -> serde_json::Value {
    match n.to_u64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(n.to_string()),
    }
}

impl Serialize for AlgebraDescriptor {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("AlgebraDescriptor", 5)?;
        s.serialize_field("a", &format_rational(&self.a))?;
        s.serialize_field("b", &format_rational(&self.b))?;
        s.serialize_field("hbar_over_2pi", &format_rational(&self.hbar_over_2pi))?;
        s.serialize_field("M", &big_json(&self.m))?;
        s.serialize_field("N", &big_json(&self.n))?;
        s.end()
    }
}

#[derive(Deserialize)]
struct DescriptorRecord {
    a: String,
    b: String,
    hbar_over_2pi: String,
    #[serde(rename = "M")]
    m: serde_json::Value,
    #[serde(rename = "N")]
    n: serde_json::Value,
}

impl<'de> Deserialize<'de> for AlgebraDescriptor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rec = DescriptorRecord::deserialize(deserializer)?;
        let parse = |s: &str| parse_rational(s).map_err(D::Error::custom);
        let desc = make_algebra(&parse(&rec.a)?, &parse(&rec.b)?, &parse(&rec.hbar_over_2pi)?)
            .map_err(D::Error::custom)?;
        if rec.m != big_json(&desc.m) || rec.n != big_json(&desc.n) {
            return Err(D::Error::custom(format!(
                "stored M/N ({}, {}) disagree with a·b·ħ/2π = {}/{}",
                rec.m, rec.n, desc.m, desc.n
            )));
        }
        Ok(desc)
    }
}

impl Serialize for LimitChain {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("LimitChain", 4)?;
        s.serialize_field("schedule", &self.schedule_name)?;
        s.serialize_field("depth", &self.entries.len())?;
        s.serialize_field("h_ratio", &format_rational(&self.h_ratio))?;
        s.serialize_field("entries", &self.entries)?;
        s.end()
    }
}
