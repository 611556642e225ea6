//! Reynolds-number exponents of the upper bounds compared across models
//! (constants omitted). Entries are exact rationals.

use std::fmt;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub const fn new(num: i64, den: i64) -> Self {
        Self { num, den }
    }

    pub const ZERO: Rational = Rational::new(0, 1);

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `a/b + c/d` reduced.
    pub fn add(self, other: Rational) -> Rational {
        let num = self.num * other.den + other.num * self.den;
        let den = self.den * other.den;
        let g = gcd(num.abs(), den.abs()).max(1);
        Rational::new(num / g, den / g)
    }

    pub fn div_int(self, n: i64) -> Rational {
        let num = self.num;
        let den = self.den * n;
        let g = gcd(num.abs(), den.abs()).max(1);
        Rational::new(num / g, den / g)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LogFactor {
    None,
    /// `ln Re`.
    LnRe,
    /// `(ln Re)^{1/N}`.
    LnReRootN,
}

/// `Re^{constant + per_n/N} · log factor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Exponent {
    pub constant: Rational,
    pub per_n: Rational,
    pub log: LogFactor,
}

impl Exponent {
    const fn plain(num: i64, den: i64) -> Self {
        Self {
            constant: Rational::new(num, den),
            per_n: Rational::ZERO,
            log: LogFactor::None,
        }
    }

    /// The power of `Re` at a given `N` (ignored when there is no `1/N` term).
    pub fn at(&self, n: i64) -> Rational {
        if self.per_n.num == 0 {
            self.constant
        } else {
            self.constant.add(self.per_n.div_int(n))
        }
    }

    /// `Re^{at(n)} × log factor`; `None` when the log factor is not positive.
    pub fn evaluate(&self, re: f64, n: i64) -> Option<f64> {
        let power = re.powf(self.at(n).value());
        match self.log {
            LogFactor::None => Some(power),
            LogFactor::LnRe => (re.ln() > 0.0).then(|| power * re.ln()),
            LogFactor::LnReRootN => (re.ln() > 0.0).then(|| power * re.ln().powf(1.0 / n as f64)),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Re^({}", self.constant)?;
        if self.per_n.num != 0 {
            let (num, den) = (-self.per_n.num, self.per_n.den);
            if den == 1 {
                write!(f, " - {num}/N")?;
            } else {
                write!(f, " - {num}/({den}N)")?;
            }
        }
        write!(f, ")")?;
        match self.log {
            LogFactor::None => Ok(()),
            LogFactor::LnRe => write!(f, " ln Re"),
            LogFactor::LnReRootN => write!(f, " (ln Re)^(1/N)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Column {
    Ns,
    NsAlpha,
    Bardina,
    LerayAlpha,
    MlAlpha,
}

impl Column {
    pub const ALL: [Column; 5] = [Column::Ns, Column::NsAlpha, Column::Bardina, Column::LerayAlpha, Column::MlAlpha];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Row {
    /// `ℓ λ_k⁻¹`.
    EllLambdaKInv,
    Hbar1,
    Hbar2,
    Hbar3,
    /// Attractor dimension.
    DF,
    /// `ℓ²⟨κ_{N,r}²⟩`.
    KappaNr,
    /// `ℓ²⟨κ_{1,0}²⟩`.
    Kappa10,
    /// `⟨‖ū‖_∞²⟩`.
    SupUbarSq,
    /// `⟨‖∇ū‖_∞⟩`.
    SupGradUbar,
    /// `ℓ²⟨κ_{N,0}²⟩`.
    KappaN0,
}

impl Row {
    pub const ALL: [Row; 10] = [
        Row::EllLambdaKInv,
        Row::Hbar1,
        Row::Hbar2,
        Row::Hbar3,
        Row::DF,
        Row::KappaNr,
        Row::Kappa10,
        Row::SupUbarSq,
        Row::SupGradUbar,
        Row::KappaN0,
    ];
}

/// `None` where the table has no entry.
pub fn exponent(column: Column, row: Row) -> Option<Exponent> {
    use Column::*;
    let p = Exponent::plain;
    let kappa_n0 = |c: (i64, i64), d: (i64, i64)| Exponent {
        constant: Rational::new(c.0, c.1),
        per_n: Rational::new(d.0, d.1),
        log: LogFactor::LnReRootN,
    };
    match row {
        Row::EllLambdaKInv => Some(match column {
            Ns => p(3, 4),
            NsAlpha | Bardina | MlAlpha => p(5, 8),
            LerayAlpha => p(7, 12),
        }),
        Row::Hbar1 => Some(match column {
            Ns => p(3, 1),
            NsAlpha | Bardina | MlAlpha => p(5, 2),
            LerayAlpha => p(7, 3),
        }),
        Row::Hbar2 => match column {
            Ns => None,
            NsAlpha | Bardina | MlAlpha => Some(p(3, 1)),
            LerayAlpha => Some(p(8, 3)),
        },
        Row::Hbar3 => match column {
            Ns | NsAlpha | Bardina => None,
            LerayAlpha => Some(p(3, 1)),
            MlAlpha => Some(p(7, 1)),
        },
        Row::DF => match column {
            Ns => None,
            NsAlpha | MlAlpha => Some(p(9, 4)),
            Bardina => Some(p(9, 5)),
            LerayAlpha => Some(p(9, 7)),
        },
        Row::KappaNr => match column {
            Ns => None,
            NsAlpha | Bardina => Some(p(11, 4)),
            LerayAlpha => Some(p(17, 4)),
            MlAlpha => Some(p(5, 2)),
        },
        Row::Kappa10 => Some(Exponent {
            constant: Rational::new(1, 1),
            per_n: Rational::ZERO,
            log: LogFactor::LnRe,
        }),
        Row::SupUbarSq => match column {
            Ns => None,
            NsAlpha | Bardina | MlAlpha => Some(p(11, 4)),
            LerayAlpha => Some(p(5, 2)),
        },
        Row::SupGradUbar => match column {
            Ns => None,
            NsAlpha | Bardina => Some(p(35, 16)),
            LerayAlpha => Some(p(17, 12)),
            MlAlpha => Some(p(5, 2)),
        },
        Row::KappaN0 => match column {
            Ns => None,
            NsAlpha | Bardina => Some(kappa_n0((11, 4), (-7, 4))),
            LerayAlpha => Some(kappa_n0((17, 12), (-5, 12))),
            MlAlpha => Some(kappa_n0((5, 2), (-3, 2))),
        },
    }
}

/// One serialisable entry per `(row, column)` pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableEntry {
    pub row: Row,
    pub column: Column,
    pub exponent: Option<Exponent>,
    pub display: String,
}

pub fn full_table() -> Vec<TableEntry> {
    let mut out = Vec::new();
    for row in Row::ALL {
        for column in Column::ALL {
            let e = exponent(column, row);
            out.push(TableEntry {
                row,
                column,
                exponent: e,
                display: e.map_or_else(|| "-".to_string(), |e| e.to_string()),
            });
        }
    }
    out
}
