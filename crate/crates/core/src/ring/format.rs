//! Canonical text, TeX-like and JSON encodings of elements.
//!
//! Text: `-3/2·th1^-1·e{1,2}·h[1,1]^2·z[0,2]`; terms are joined with ` + `
//! / ` - ` in canonical monomial order, the zero element prints as `0`.
//! The parser also accepts `*` as the factor separator.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use super::monomial::{mono_mul, Monomial};
use super::{Element, ScalarField, TruncationParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextStyle {
    Plain,
    Tex,
}

fn coeff_text(c: &BigRational, style: TextStyle) -> String {
    match style {
        TextStyle::Plain => {
            if c.is_integer() {
                c.numer().to_string()
            } else {
                format!("{}/{}", c.numer(), c.denom())
            }
        }
        TextStyle::Tex => {
            if c.is_integer() {
                c.numer().to_string()
            } else {
                format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
            }
        }
    }
}

pub(crate) fn monomial_text(mono: &Monomial, style: TextStyle) -> String {
    let mut factors = Vec::new();
    for &(l, exp) in mono.theta_exps() {
        factors.push(match (style, exp) {
            (TextStyle::Plain, 1) => format!("th{l}"),
            (TextStyle::Plain, _) => format!("th{l}^{exp}"),
            (TextStyle::Tex, 1) => format!("\\theta_{{{l}}}"),
            (TextStyle::Tex, _) => format!("\\theta_{{{l}}}^{{{exp}}}"),
        });
    }
    if let Some(set) = mono.e_set() {
        let body = set
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(",");
        factors.push(match style {
            TextStyle::Plain => format!("e{{{body}}}"),
            TextStyle::Tex if set.is_empty() => "e_{\\emptyset}".to_string(),
            TextStyle::Tex => format!("e_{{\\{{{body}\\}}}}"),
        });
    }
    for &((k, l), exp) in mono.h_exps() {
        factors.push(match (style, exp) {
            (TextStyle::Plain, 1) => format!("h[{k},{l}]"),
            (TextStyle::Plain, _) => format!("h[{k},{l}]^{exp}"),
            (TextStyle::Tex, 1) => format!("h_{{{k},{l}}}"),
            (TextStyle::Tex, _) => format!("h_{{{k},{l}}}^{{{exp}}}"),
        });
    }
    for &(k, l) in mono.zeta_slots() {
        factors.push(match style {
            TextStyle::Plain => format!("z[{k},{l}]"),
            TextStyle::Tex => format!("\\zeta_{{{k},{l}}}"),
        });
    }
    if factors.is_empty() {
        return "1".to_string();
    }
    match style {
        TextStyle::Plain => factors.join("·"),
        TextStyle::Tex => factors.join(" "),
    }
}

fn term_text(mono: &Monomial, c: &BigRational, style: TextStyle) -> String {
    let body = monomial_text(mono, style);
    let magnitude = c.abs();
    if mono.is_one() {
        return coeff_text(&magnitude, style);
    }
    if magnitude.is_one() {
        return body;
    }
    match style {
        TextStyle::Plain => format!("{}·{}", coeff_text(&magnitude, style), body),
        TextStyle::Tex => format!("{} {}", coeff_text(&magnitude, style), body),
    }
}

pub(crate) fn element_text(e: &Element, style: TextStyle) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (mono, c)) in e.terms().enumerate() {
        let negative = c.is_negative();
        match (i, negative) {
            (0, false) => {}
            (0, true) => out.push('-'),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        out.push_str(&term_text(mono, c, style));
    }
    out
}

impl Element {
    pub fn to_text(&self) -> String {
        element_text(self, TextStyle::Plain)
    }

    pub fn to_tex(&self) -> String {
        element_text(self, TextStyle::Tex)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ElementJson::from(self)).expect("element JSON")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&ElementJson::from(self)).expect("element JSON")
    }
}

struct NumericKeys<V>(Vec<(String, V)>);

impl<V: Serialize> Serialize for NumericKeys<V> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct TermOut {
    coeff: String,
    theta: NumericKeys<i32>,
    e: Option<Vec<u32>>,
    h: NumericKeys<u32>,
    zeta: Vec<[u32; 2]>,
}

#[derive(Serialize)]
struct ElementJson {
    params: TruncationParams,
    field: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
    terms: Vec<TermOut>,
}

impl From<&Element> for ElementJson {
    fn from(e: &Element) -> Self {
        let terms = e
            .terms()
            .map(|(mono, c)| TermOut {
                coeff: coeff_text(c, TextStyle::Plain),
                theta: NumericKeys(
                    mono.theta_exps()
                        .iter()
                        .map(|&(l, x)| (l.to_string(), x))
                        .collect(),
                ),
                e: mono.e_set().map(|s| s.to_vec()),
                h: NumericKeys(
                    mono.h_exps()
                        .iter()
                        .map(|&((k, l), x)| (format!("{k},{l}"), x))
                        .collect(),
                ),
                zeta: mono.zeta_slots().iter().map(|&(k, l)| [k, l]).collect(),
            })
            .collect();
        let (field, p) = match e.field() {
            ScalarField::Rational => ("Q", None),
            ScalarField::Prime(p) => ("Fp", Some(p)),
        };
        ElementJson {
            params: e.params(),
            field,
            p,
            terms,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermIn {
    coeff: String,
    #[serde(default)]
    theta: BTreeMap<String, i32>,
    #[serde(default)]
    e: Option<Vec<u32>>,
    #[serde(default)]
    h: BTreeMap<String, u32>,
    #[serde(default)]
    zeta: Vec<[u32; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementIn {
    params: TruncationParams,
    field: String,
    #[serde(default)]
    p: Option<u64>,
    terms: Vec<TermIn>,
}

fn parse_coeff(text: &str, position: usize) -> Result<BigRational> {
    let bad = |message: &str| Error::Parse {
        position,
        token: text.to_string(),
        message: message.to_string(),
    };
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num: BigInt = num.trim().parse().map_err(|_| bad("bad numerator"))?;
    let den: BigInt = den.trim().parse().map_err(|_| bad("bad denominator"))?;
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

/// Parses the JSON encoding produced by [`Element::to_json_string`]. Missing
/// `theta`/`e`/`h`/`zeta` keys default to empty (`e` to absent).
pub fn parse_element_json(text: &str) -> Result<Element> {
    let raw: ElementIn = serde_json::from_str(text).map_err(|err| {
        let position = line_col_offset(text, err.line(), err.column());
        Error::Parse {
            position,
            token: token_at(text, position),
            message: err.to_string(),
        }
    })?;
    let params = TruncationParams::new(raw.params.n, raw.params.k, raw.params.m)?;
    let field = match (raw.field.as_str(), raw.p) {
        ("Q", None) => ScalarField::Rational,
        ("Fp", Some(p)) => ScalarField::prime(p)?,
        (other, _) => {
            return Err(Error::Parse {
                position: 0,
                token: other.to_string(),
                message: "field must be \"Q\" or \"Fp\" with \"p\"".to_string(),
            })
        }
    };
    let mut out = Element::zero(params, field);
    for (idx, term) in raw.terms.into_iter().enumerate() {
        let coeff = parse_coeff(&term.coeff, idx)?;
        let mut theta = Vec::new();
        for (k, v) in term.theta {
            let l: u32 = k.parse().map_err(|_| Error::Parse {
                position: idx,
                token: k.clone(),
                message: "theta key must be a column index".to_string(),
            })?;
            theta.push((l, v));
        }
        let mut h = Vec::new();
        for (k, v) in term.h {
            let slot = k
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                .ok_or_else(|| Error::Parse {
                    position: idx,
                    token: k.clone(),
                    message: "h key must look like \"k,l\"".to_string(),
                })?;
            h.push((slot, v));
        }
        let word: Vec<_> = term.zeta.iter().map(|&[k, l]| (k, l)).collect();
        let mut mono = Monomial::one().with_theta(theta).with_h(h);
        if let Some(set) = &term.e {
            mono = mono.with_e(set);
        }
        if let Some((sign, mono)) = mono.with_zeta_word(&word) {
            let c = BigRational::from_integer(sign.as_i64().into()) * coeff;
            out.try_add_assign(&Element::term(mono, c, params, field)?)?;
        }
    }
    Ok(out)
}

fn line_col_offset(text: &str, line: usize, column: usize) -> usize {
    let mut offset = 0;
    for (i, l) in text.split_inclusive('\n').enumerate() {
        if i + 1 == line {
            return offset + column.saturating_sub(1);
        }
        offset += l.len();
    }
    offset
}

fn token_at(text: &str, position: usize) -> String {
    text.get(position..)
        .map(|rest| {
            rest.chars()
                .take_while(|c| !c.is_whitespace())
                .take(16)
                .collect()
        })
        .unwrap_or_default()
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Parse {
            position: self.pos,
            token: token_at(self.text, self.pos),
            message: message.to_string(),
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{token}`")))
        }
    }

    fn digits(&mut self) -> &'a str {
        let rest = self.rest();
        let len = rest.bytes().take_while(|b| b.is_ascii_digit()).count();
        self.pos += len;
        &rest[..len]
    }

    fn uint(&mut self) -> Result<u32> {
        let start = self.pos;
        let d = self.digits();
        d.parse().map_err(|_| {
            self.pos = start;
            self.error("expected an unsigned integer")
        })
    }

    fn int(&mut self) -> Result<i32> {
        let neg = self.eat("-");
        let v = self.uint()? as i32;
        Ok(if neg { -v } else { v })
    }

    fn index_pair(&mut self) -> Result<(u32, u32)> {
        self.expect("[")?;
        let k = self.uint()?;
        self.expect(",")?;
        let l = self.uint()?;
        self.expect("]")?;
        Ok((k, l))
    }

    fn factor(&mut self) -> Result<Monomial> {
        if self.eat("th") {
            let l = self.uint()?;
            let exp = if self.eat("^") { self.int()? } else { 1 };
            return Ok(Monomial::theta(l, exp));
        }
        if self.eat("e{") {
            let mut set = Vec::new();
            if !self.eat("}") {
                loop {
                    set.push(self.uint()?);
                    if self.eat("}") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            return Ok(Monomial::e(&set));
        }
        if self.rest().starts_with("h[") {
            self.pos += 1;
            let (k, l) = self.index_pair()?;
            let exp = if self.eat("^") { self.uint()? } else { 1 };
            return Ok(Monomial::h(k, l, exp));
        }
        if self.rest().starts_with("z[") {
            self.pos += 1;
            let (k, l) = self.index_pair()?;
            return Ok(Monomial::zeta(k, l));
        }
        Err(self.error("expected a generator (th, e{..}, h[..], z[..])"))
    }

    fn separator(&mut self) -> bool {
        self.eat("·") || self.eat("*")
    }
}

/// Parses the canonical text encoding into `B(n, K, m)` over `field`.
///
/// Factors may come in any order; products are formed in the ring, so a
/// repeated `ζ` or two `e` factors give a zero term.
pub fn parse_text(text: &str, params: TruncationParams, field: ScalarField) -> Result<Element> {
    let mut cur = Cursor { text, pos: 0 };
    let mut out = Element::zero(params, field);
    cur.skip_ws();
    if cur.rest() == "0" {
        return Ok(out);
    }
    let mut first = true;
    loop {
        cur.skip_ws();
        let negative = if cur.eat("-") {
            true
        } else if first || cur.eat("+") {
            false
        } else {
            return Err(cur.error("expected `+` or `-` between terms"));
        };
        first = false;
        cur.skip_ws();
        let start = cur.pos;
        let mut coeff = BigRational::one();
        let mut need_factor = true;
        if cur.rest().starts_with(|c: char| c.is_ascii_digit()) {
            let num = cur.digits().to_string();
            let text_coeff = if cur.eat("/") {
                format!("{num}/{}", cur.digits())
            } else {
                num
            };
            coeff = parse_coeff(&text_coeff, start)?;
            need_factor = cur.separator();
        }
        let mut mono = Some((1i64, Monomial::one()));
        if need_factor {
            loop {
                let at = cur.pos;
                let f = cur.factor()?;
                if !f.fits(&TruncationParams { m: u32::MAX, ..params }) {
                    cur.pos = at;
                    return Err(cur.error(&format!("generator outside {params}")));
                }
                mono = mono.and_then(|(s, m)| {
                    let unbounded = TruncationParams { m: u32::MAX, ..params };
                    mono_mul(&m, &f, &unbounded).map(|(sg, prod)| (s * sg.as_i64(), prod))
                });
                if !cur.separator() {
                    break;
                }
            }
        }
        if let Some((sign, mono)) = mono {
            let c = coeff * BigRational::from_integer(BigInt::from(if negative { -sign } else { sign }));
            out.try_add_assign(&Element::term(mono, c, params, field).or_else(|e| match e {
                Error::OutOfBounds { .. } => Ok(Element::zero(params, field)),
                other => Err(other),
            })?)?;
        }
        cur.skip_ws();
        if cur.rest().is_empty() {
            break;
        }
    }
    Ok(out)
}
