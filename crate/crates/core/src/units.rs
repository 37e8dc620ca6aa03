//! Runtime physical units.
//!
//! A [`Unit`] is a decimal scale relative to coherent SI together with the
//! exponents of the seven SI base dimensions. Units are plain values: any
//! combination can be formed at runtime and no unit needs to be known in
//! advance.
//!
//! The scale is kept as a normalized `mantissa * 10^pow10` pair so that
//! products and quotients of decimal-prefixed units (angstrom, microsecond)
//! stay exact.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Symbols of the SI base dimensions, in exponent-vector order.
pub const BASE_SYMBOLS: [&str; 7] = ["m", "kg", "s", "A", "K", "mol", "cd"];

const EXACT_POW10: [f64; 23] = [
    1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9, 1e10, 1e11, 1e12, 1e13, 1e14, 1e15, 1e16, 1e17, 1e18,
    1e19, 1e20, 1e21, 1e22,
];

fn pow10(p: i32) -> f64 {
    let mag = p.unsigned_abs() as usize;
    let base = if mag < EXACT_POW10.len() { EXACT_POW10[mag] } else { 10f64.powi(mag as i32) };
    if p >= 0 {
        base
    } else {
        1.0 / base
    }
}

/// Display-only tag for dimensionless units with a distinct name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Alias {
    Plain,
    Counts,
    Rad,
}

#[derive(Clone, Copy, Debug)]
pub struct Unit {
    exps: [i8; 7],
    pow10: i32,
    mantissa: f64,
    alias: Alias,
}

const fn base(index: usize, pow10: i32) -> Unit {
    let mut exps = [0i8; 7];
    exps[index] = 1;
    Unit { exps, pow10, mantissa: 1.0, alias: Alias::Plain }
}

const fn dimensionless_with(alias: Alias) -> Unit {
    Unit { exps: [0; 7], pow10: 0, mantissa: 1.0, alias }
}

impl Unit {
    pub const DIMENSIONLESS: Unit = dimensionless_with(Alias::Plain);
    /// Dimensionless, displayed as `counts`.
    pub const COUNTS: Unit = dimensionless_with(Alias::Counts);
    /// Dimensionless, displayed as `rad`.
    pub const RAD: Unit = dimensionless_with(Alias::Rad);
    pub const M: Unit = base(0, 0);
    pub const KG: Unit = base(1, 0);
    pub const S: Unit = base(2, 0);
    pub const A: Unit = base(3, 0);
    pub const K: Unit = base(4, 0);
    pub const MOL: Unit = base(5, 0);
    pub const CD: Unit = base(6, 0);
    pub const ANGSTROM: Unit = base(0, -10);
    pub const US: Unit = base(2, -6);

    /// Builds a unit from a positive scale factor and base-dimension exponents.
    pub fn new(scale: f64, exps: [i8; 7]) -> Result<Unit> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Unit(format!("scale must be positive and finite, got {scale}")));
        }
        let mut p = scale.log10().floor() as i32;
        let mut mantissa = scale / pow10(p);
        // log10 may land one decade off near exact powers of ten.
        if mantissa >= 10.0 {
            p += 1;
            mantissa = scale / pow10(p);
        } else if mantissa < 1.0 {
            p -= 1;
            mantissa = scale / pow10(p);
        }
        Ok(Unit { exps, pow10: p, mantissa, alias: Alias::Plain })
    }

    fn from_parts(exps: [i8; 7], mantissa: f64, pow10: i32) -> Result<Unit> {
        let (mantissa, pow10) = normalize(mantissa, pow10)?;
        Ok(Unit { exps, pow10, mantissa, alias: Alias::Plain })
    }

    pub fn exps(&self) -> [i8; 7] {
        self.exps
    }

    /// Multiplier converting a value in this unit to coherent SI.
    pub fn scale(&self) -> f64 {
        if self.mantissa == 1.0 {
            pow10(self.pow10)
        } else {
            self.mantissa * pow10(self.pow10)
        }
    }

    /// True when the exponent vectors agree, i.e. a scale conversion exists.
    pub fn is_compatible(&self, other: &Unit) -> bool {
        self.exps == other.exps
    }

    pub fn is_dimensionless(&self) -> bool {
        self.exps == [0; 7] && self.pow10 == 0 && self.mantissa == 1.0
    }

    fn is_plain_one(&self) -> bool {
        self.is_dimensionless() && self.alias == Alias::Plain
    }

    fn compose_alias(a: &Unit, b: &Unit) -> Alias {
        if b.is_plain_one() {
            a.alias
        } else if a.is_plain_one() {
            b.alias
        } else {
            Alias::Plain
        }
    }

    pub fn mul(&self, other: &Unit) -> Result<Unit> {
        let mut exps = [0i8; 7];
        for (i, e) in exps.iter_mut().enumerate() {
            *e = self.exps[i].checked_add(other.exps[i]).ok_or_else(|| {
                Error::UnitOverflow(format!("{self} * {other} (dimension {})", BASE_SYMBOLS[i]))
            })?;
        }
        let pow10 = self
            .pow10
            .checked_add(other.pow10)
            .ok_or_else(|| Error::UnitOverflow(format!("{self} * {other} (scale)")))?;
        let mut out = Unit::from_parts(exps, self.mantissa * other.mantissa, pow10)?;
        out.alias = Unit::compose_alias(self, other);
        Ok(out)
    }

    pub fn div(&self, other: &Unit) -> Result<Unit> {
        let mut exps = [0i8; 7];
        for (i, e) in exps.iter_mut().enumerate() {
            *e = self.exps[i].checked_sub(other.exps[i]).ok_or_else(|| {
                Error::UnitOverflow(format!("{self} / {other} (dimension {})", BASE_SYMBOLS[i]))
            })?;
        }
        let pow10 = self
            .pow10
            .checked_sub(other.pow10)
            .ok_or_else(|| Error::UnitOverflow(format!("{self} / {other} (scale)")))?;
        let mut out = Unit::from_parts(exps, self.mantissa / other.mantissa, pow10)?;
        out.alias = if other.is_plain_one() { self.alias } else { Alias::Plain };
        Ok(out)
    }

    pub fn pow(&self, n: i32) -> Result<Unit> {
        if n == 0 {
            return Ok(Unit::DIMENSIONLESS);
        }
        if n == 1 {
            return Ok(*self);
        }
        let overflow = || Error::UnitOverflow(format!("({self})^{n}"));
        let mut exps = [0i8; 7];
        for (i, e) in exps.iter_mut().enumerate() {
            let v = i32::from(self.exps[i]).checked_mul(n).ok_or_else(overflow)?;
            *e = i8::try_from(v).map_err(|_| overflow())?;
        }
        let pow10 = self.pow10.checked_mul(n).ok_or_else(overflow)?;
        let mut out = Unit::from_parts(exps, self.mantissa.powi(n), pow10)?;
        if self.is_dimensionless() {
            out.alias = self.alias;
        }
        Ok(out)
    }

    pub fn sqrt(&self) -> Result<Unit> {
        if let Some(i) = self.exps.iter().position(|e| e % 2 != 0) {
            return Err(Error::Unit(format!(
                "cannot take square root of {self}: odd exponent for {}",
                BASE_SYMBOLS[i]
            )));
        }
        let exps = self.exps.map(|e| e / 2);
        let (mantissa, pow10) = if self.pow10 % 2 == 0 {
            (self.mantissa.sqrt(), self.pow10 / 2)
        } else {
            ((self.mantissa * 10.0).sqrt(), (self.pow10 - 1) / 2)
        };
        let mut out = Unit::from_parts(exps, mantissa, pow10)?;
        if self.is_dimensionless() {
            out.alias = self.alias;
        }
        Ok(out)
    }

    /// Parses a unit expression using the standard symbol table.
    pub fn parse(text: &str) -> Result<Unit> {
        NamedUnitTable::standard().parse(text)
    }
}

fn normalize(mut mantissa: f64, mut pow10: i32) -> Result<(f64, i32)> {
    if !(mantissa.is_finite() && mantissa > 0.0) {
        return Err(Error::Unit(format!("invalid unit scale mantissa {mantissa}")));
    }
    while mantissa >= 10.0 {
        mantissa /= 10.0;
        pow10 = pow10.checked_add(1).ok_or_else(|| Error::UnitOverflow("scale".into()))?;
    }
    while mantissa < 1.0 {
        mantissa *= 10.0;
        pow10 = pow10.checked_sub(1).ok_or_else(|| Error::UnitOverflow("scale".into()))?;
    }
    Ok((mantissa, pow10))
}

// `counts` and `rad` compare equal to `dimensionless`; the alias is display only.
impl PartialEq for Unit {
    fn eq(&self, other: &Self) -> bool {
        self.exps == other.exps
            && self.pow10 == other.pow10
            && self.mantissa.to_bits() == other.mantissa.to_bits()
    }
}

impl Eq for Unit {}

impl Hash for Unit {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.exps.hash(state);
        self.pow10.hash(state);
        self.mantissa.to_bits().hash(state);
    }
}

impl Default for Unit {
    fn default() -> Self {
        Unit::DIMENSIONLESS
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&NamedUnitTable::standard().format(self))
    }
}

impl std::str::FromStr for Unit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Unit> {
        Unit::parse(s)
    }
}

/// Symbol table used for parsing and formatting unit strings.
///
/// Entries can be added at runtime with [`NamedUnitTable::insert`].
#[derive(Clone, Debug)]
pub struct NamedUnitTable {
    entries: Vec<(String, Unit)>,
}

impl NamedUnitTable {
    pub fn standard() -> &'static NamedUnitTable {
        static TABLE: OnceLock<NamedUnitTable> = OnceLock::new();
        TABLE.get_or_init(|| NamedUnitTable {
            entries: [
                ("dimensionless", Unit::DIMENSIONLESS),
                ("counts", Unit::COUNTS),
                ("rad", Unit::RAD),
                ("m", Unit::M),
                ("kg", Unit::KG),
                ("s", Unit::S),
                ("A", Unit::A),
                ("K", Unit::K),
                ("mol", Unit::MOL),
                ("cd", Unit::CD),
                ("angstrom", Unit::ANGSTROM),
                ("us", Unit::US),
            ]
            .into_iter()
            .map(|(s, u)| (s.to_string(), u))
            .collect(),
        })
    }

    /// Adds (or replaces) a named symbol.
    pub fn insert(&mut self, symbol: &str, unit: Unit) -> Result<()> {
        if symbol.is_empty() || !symbol.chars().all(|c| c.is_alphabetic() || c == '_') {
            return Err(Error::Parse(format!("invalid unit symbol '{symbol}'")));
        }
        match self.entries.iter_mut().find(|(s, _)| s == symbol) {
            Some(entry) => entry.1 = unit,
            None => self.entries.push((symbol.to_string(), unit)),
        }
        Ok(())
    }

    pub fn get(&self, symbol: &str) -> Option<Unit> {
        self.entries.iter().find(|(s, _)| s == symbol).map(|(_, u)| *u)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, Unit)> {
        self.entries.iter().map(|(s, u)| (s.as_str(), *u))
    }

    /// Parses `SYMBOL ('*' SYMBOL)* ('/' SYMBOL)*`, each factor optionally
    /// raised to an integer power with `^n`. A bare decimal number is
    /// accepted as a scale factor.
    pub fn parse(&self, text: &str) -> Result<Unit> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::Parse("empty unit string".into()));
        }
        let mut result = Unit::DIMENSIONLESS;
        let mut first = true;
        let mut rest = text;
        let mut divide = false;
        loop {
            let end = rest.find(['*', '/']).unwrap_or(rest.len());
            let token = rest[..end].trim();
            let factor = self.parse_factor(token, text)?;
            result = if first {
                factor
            } else if divide {
                result.div(&factor)?
            } else {
                result.mul(&factor)?
            };
            first = false;
            if end == rest.len() {
                break;
            }
            divide = rest.as_bytes()[end] == b'/';
            rest = &rest[end + 1..];
        }
        Ok(result)
    }

    fn parse_factor(&self, token: &str, text: &str) -> Result<Unit> {
        if token.is_empty() {
            return Err(Error::Parse(format!("missing unit symbol in '{text}'")));
        }
        let (sym, power) = match token.split_once('^') {
            Some((s, p)) => {
                let p: i32 = p
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("invalid exponent '{}' in '{text}'", p.trim())))?;
                (s.trim(), p)
            }
            None => (token, 1),
        };
        let unit = match self.get(sym) {
            Some(u) => u,
            None => {
                parse_number(sym).ok_or_else(|| Error::Parse(format!("unknown unit symbol '{sym}'")))??
            }
        };
        unit.pow(power)
    }

    /// Formats a unit, preferring a table symbol that matches exactly.
    pub fn format(&self, unit: &Unit) -> String {
        if let Some((name, _)) = self.entries.iter().find(|(_, u)| u == unit && u.alias == unit.alias) {
            return name.clone();
        }
        canonical(unit)
    }
}

fn parse_number(token: &str) -> Option<Result<Unit>> {
    if !token.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        return None;
    }
    // Split mantissa and decimal exponent so that formatted scales parse back exactly.
    let (mant, exp) = match token.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (token, 0),
    };
    let mant: f64 = mant.parse().ok()?;
    Some(Unit::from_parts([0; 7], mant, exp))
}

/// Product form over base symbols, using `angstrom`/`us` to absorb decimal
/// scale when possible and an explicit numeric factor otherwise.
fn canonical(unit: &Unit) -> String {
    let mut angstrom = 0i32;
    let mut micro = 0i32;
    let mut prefix = None;
    if unit.mantissa == 1.0 && unit.pow10 != 0 {
        let mut best: Option<(i32, i32)> = None;
        for a in -8..=8i32 {
            for b in -8..=8i32 {
                if -10 * a - 6 * b == unit.pow10
                    && best.is_none_or(|(ba, bb)| a.abs() + b.abs() < ba.abs() + bb.abs())
                {
                    best = Some((a, b));
                }
            }
        }
        match best {
            Some((a, b)) => {
                angstrom = a;
                micro = b;
            }
            None => prefix = Some(format!("{}e{}", unit.mantissa, unit.pow10)),
        }
    } else if unit.mantissa != 1.0 {
        prefix = Some(format!("{}e{}", unit.mantissa, unit.pow10));
    }
    let e = unit.exps.map(i32::from);
    let terms = [
        ("m", e[0] - angstrom),
        ("angstrom", angstrom),
        ("kg", e[1]),
        ("s", e[2] - micro),
        ("us", micro),
        ("A", e[3]),
        ("K", e[4]),
        ("mol", e[5]),
        ("cd", e[6]),
    ];
    let term = |sym: &str, p: i32| {
        if p == 1 {
            sym.to_string()
        } else {
            format!("{sym}^{p}")
        }
    };
    let mut num: Vec<String> = prefix.into_iter().collect();
    num.extend(terms.iter().filter(|t| t.1 > 0).map(|&(s, p)| term(s, p)));
    let den: Vec<String> = terms.iter().filter(|t| t.1 < 0).map(|&(s, p)| term(s, -p)).collect();
    if num.is_empty() {
        if den.is_empty() {
            return "dimensionless".into();
        }
        return terms.iter().filter(|t| t.1 < 0).map(|&(s, p)| term(s, p)).collect::<Vec<_>>().join("*");
    }
    let mut out = num.join("*");
    for d in den {
        out.push('/');
        out.push_str(&d);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplication_composes() {
        let m2 = Unit::M.mul(&Unit::M).unwrap();
        assert_eq!(m2.exps(), [2, 0, 0, 0, 0, 0, 0]);
        assert_eq!(m2.scale(), 1.0);
        assert_eq!(Unit::US.mul(&Unit::DIMENSIONLESS).unwrap(), Unit::US);
        let a2 = Unit::ANGSTROM.mul(&Unit::ANGSTROM).unwrap();
        assert_eq!(a2.scale(), 1e-20);
        assert_eq!(a2.exps(), m2.exps());
    }

    #[test]
    fn division() {
        let v = Unit::M.div(&Unit::S).unwrap();
        assert_eq!(v.exps(), [1, 0, -1, 0, 0, 0, 0]);
        let ratio = Unit::COUNTS.div(&Unit::COUNTS).unwrap();
        assert_eq!(ratio, Unit::DIMENSIONLESS);
        assert_eq!(ratio.to_string(), "dimensionless");
        let r = Unit::ANGSTROM.div(&Unit::M).unwrap();
        assert_eq!(r.exps(), [0; 7]);
        assert_eq!(r.scale(), 1e-10);
    }

    #[test]
    fn powers() {
        assert_eq!(Unit::M.pow(2).unwrap(), Unit::M.mul(&Unit::M).unwrap());
        assert_eq!(Unit::ANGSTROM.pow(0).unwrap(), Unit::DIMENSIONLESS);
        let us2 = Unit::US.pow(2).unwrap();
        assert_eq!(us2.scale(), 1e-12);
        assert_eq!(us2.exps(), [0, 0, 2, 0, 0, 0, 0]);
    }

    #[test]
    fn square_root() {
        assert_eq!(Unit::M.pow(2).unwrap().sqrt().unwrap(), Unit::M);
        assert!(matches!(Unit::M.sqrt(), Err(Error::Unit(_))));
        let a2 = Unit::new(1e-20, [2, 0, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!(a2.sqrt().unwrap(), Unit::ANGSTROM);
    }

    #[test]
    fn exponent_overflow_is_an_error() {
        let big = Unit::M.pow(100).unwrap();
        assert!(matches!(big.mul(&big), Err(Error::UnitOverflow(_))));
        assert!(matches!(Unit::M.pow(200), Err(Error::UnitOverflow(_))));
        let small = Unit::M.pow(-100).unwrap();
        assert!(matches!(small.div(&big), Err(Error::UnitOverflow(_))));
    }

    #[test]
    fn parse_examples() {
        let a = Unit::parse("angstrom").unwrap();
        assert_eq!(a.scale(), 1e-10);
        assert_eq!(a.exps(), [1, 0, 0, 0, 0, 0, 0]);
        let acc = Unit::parse("m/s^2").unwrap();
        assert_eq!(acc.exps(), [1, 0, -2, 0, 0, 0, 0]);
        match Unit::parse("furlong") {
            Err(Error::Parse(msg)) => assert!(msg.contains("furlong")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Unit::parse("m*").is_err());
        assert!(Unit::parse("m^x").is_err());
    }

    #[test]
    fn aliases_are_display_distinct_but_equal() {
        assert_eq!(Unit::COUNTS, Unit::DIMENSIONLESS);
        assert_eq!(Unit::RAD, Unit::DIMENSIONLESS);
        assert_eq!(Unit::COUNTS.to_string(), "counts");
        assert_eq!(Unit::RAD.to_string(), "rad");
        assert_eq!(Unit::COUNTS.mul(&Unit::DIMENSIONLESS).unwrap().to_string(), "counts");
        assert_eq!(Unit::parse("counts").unwrap().to_string(), "counts");
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(Unit::M.pow(2).unwrap().to_string(), "m^2");
        assert_eq!(Unit::parse("m/s^2").unwrap().to_string(), "m/s^2");
        assert_eq!(Unit::ANGSTROM.pow(2).unwrap().to_string(), "angstrom^2");
        assert_eq!(Unit::S.pow(-1).unwrap().to_string(), "s^-1");
        assert_eq!(Unit::ANGSTROM.div(&Unit::M).unwrap().to_string(), "angstrom/m");
        let odd = Unit::new(1e-5, [0, 0, 2, 0, 0, 0, 0]).unwrap().sqrt().unwrap();
        let text = odd.to_string();
        assert_eq!(Unit::parse(&text).unwrap(), odd, "{text}");
    }

    #[test]
    fn user_extensible_table() {
        let mut table = NamedUnitTable::standard().clone();
        let furlong = Unit::new(201.168, [1, 0, 0, 0, 0, 0, 0]).unwrap();
        table.insert("furlong", furlong).unwrap();
        let speed = table.parse("furlong/s").unwrap();
        assert!((speed.scale() - 201.168).abs() < 1e-12);
        assert_eq!(table.format(&furlong), "furlong");
        assert!(table.insert("bad sym", furlong).is_err());
    }

    #[test]
    fn scale_must_be_positive() {
        assert!(Unit::new(0.0, [0; 7]).is_err());
        assert!(Unit::new(-1.0, [0; 7]).is_err());
        assert!(Unit::new(f64::NAN, [0; 7]).is_err());
    }
}
