//! Sources of rotation numbers: exact surds, decimal literals with a bit
//! budget, and digit generators.

use super::{QuadSurd, Sign, DEFAULT_BITS};
use crate::bigreal::BigCtx;
use crate::error::{Error, Result};
use astro_float::BigFloat;

/// Named digit generators.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    /// Eventually periodic nearest-integer digits.
    Periodic {
        name: String,
        a_minus1: i64,
        eps0: Sign,
        preperiod: Vec<(u64, Sign)>,
        period: Vec<(u64, Sign)>,
    },
    /// `a_{n+1} = ceil(exp(1/beta_n))` with all signs `+1`; a non-Brjuno number.
    TowerNonBrjuno { a0: u64 },
    /// Standard digits `1, 3, 21, ...` with `a~_{i+1} = ceil(exp(a~_i))`; a
    /// Brjuno number that is not of Herman type.
    StdTowerBnotH,
}

impl Generator {
    pub fn golden() -> Self {
        Generator::Periodic {
            name: "golden".into(),
            a_minus1: 1,
            eps0: Sign::Minus,
            preperiod: vec![],
            period: vec![(3, Sign::Minus)],
        }
    }

    pub fn sqrt2() -> Self {
        Generator::Periodic {
            name: "sqrt2".into(),
            a_minus1: 0,
            eps0: Sign::Plus,
            preperiod: vec![],
            period: vec![(2, Sign::Plus)],
        }
    }

    /// Parse `name[,key=value...]`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut parts = spec.split(',').map(str::trim);
        let name = parts.next().unwrap_or_default();
        let params: Vec<(&str, &str)> = parts
            .filter(|p| !p.is_empty())
            .map(|p| p.split_once('=').unwrap_or((p, "")))
            .collect();
        let g = match name {
            "golden" => Generator::golden(),
            "sqrt2" => Generator::sqrt2(),
            "tower-nonbrjuno" => {
                let mut a0 = 2u64;
                for (k, v) in &params {
                    match *k {
                        "a0" => {
                            a0 = v
                                .parse()
                                .map_err(|_| Error::Parse(format!("bad a0 value {v:?}")))?
                        }
                        _ => return Err(Error::Parse(format!("unknown parameter {k:?}"))),
                    }
                }
                if a0 < 2 {
                    return Err(Error::Parse("a0 must be at least 2".into()));
                }
                return Ok(Generator::TowerNonBrjuno { a0 });
            }
            "std-tower-BnotH" => Generator::StdTowerBnotH,
            _ => return Err(Error::Parse(format!("unknown generator {name:?}"))),
        };
        if !params.is_empty() {
            return Err(Error::Parse(format!("generator {name} takes no parameters")));
        }
        Ok(g)
    }

    pub fn name(&self) -> String {
        match self {
            Generator::Periodic { name, .. } => name.clone(),
            Generator::TowerNonBrjuno { a0 } if *a0 == 2 => "tower-nonbrjuno".into(),
            Generator::TowerNonBrjuno { a0 } => format!("tower-nonbrjuno,a0={a0}"),
            Generator::StdTowerBnotH => "std-tower-BnotH".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlphaSource {
    /// A decimal literal treated as exact to `bits` relative bits.
    Decimal { literal: String, bits: usize },
    Surd(QuadSurd),
    Generator(Generator),
}

/// An irrational rotation number together with the working precision.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationNumber {
    source: AlphaSource,
    bits: usize,
}

impl RotationNumber {
    pub fn surd(s: QuadSurd) -> Self {
        RotationNumber {
            source: AlphaSource::Surd(s),
            bits: DEFAULT_BITS,
        }
    }

    pub fn decimal(literal: &str, bits: usize) -> Result<Self> {
        let t = literal.trim();
        let ok = !t.is_empty()
            && t.chars()
                .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'))
            && t.chars().any(|c| c.is_ascii_digit());
        if !ok {
            return Err(Error::Parse(format!("not a decimal literal: {literal:?}")));
        }
        if bits < 64 {
            return Err(Error::Domain("precision budget must be at least 64 bits".into()));
        }
        Ok(RotationNumber {
            source: AlphaSource::Decimal {
                literal: t.to_string(),
                bits,
            },
            bits,
        })
    }

    pub fn generator(g: Generator) -> Self {
        RotationNumber {
            source: AlphaSource::Generator(g),
            bits: DEFAULT_BITS,
        }
    }

    pub fn golden() -> Self {
        RotationNumber::surd(QuadSurd::from_i64(-1, 1, 5, 2).expect("valid surd"))
    }

    pub fn sqrt2() -> Self {
        RotationNumber::surd(QuadSurd::from_i64(-1, 1, 2, 1).expect("valid surd"))
    }

    /// Override the working precision (surd and generator sources).
    pub fn with_bits(mut self, bits: usize) -> Self {
        if !matches!(self.source, AlphaSource::Decimal { .. }) {
            self.bits = bits.max(64);
        }
        self
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn source(&self) -> &AlphaSource {
        &self.source
    }

    pub fn desc(&self) -> String {
        match &self.source {
            AlphaSource::Decimal { literal, bits } => format!("dec:{literal}@{bits}"),
            AlphaSource::Surd(s) => {
                let (p, q, d, r) = s.parts();
                format!("surd:{p},{q},{d},{r}")
            }
            AlphaSource::Generator(g) => format!("gen:{}", g.name()),
        }
    }

    /// The value at `bits` of precision; deterministic bit pattern.
    pub fn value(&self, bits: usize) -> BigFloat {
        let mut ctx = BigCtx::new(bits);
        match &self.source {
            AlphaSource::Decimal { literal, .. } => ctx.parse(literal),
            AlphaSource::Surd(s) => s.eval(&mut ctx),
            AlphaSource::Generator(g) => super::towers::generator_value(g, bits),
        }
    }

    pub fn value_f64(&self) -> f64 {
        crate::bigreal::to_f64(&self.value(128))
    }
}
