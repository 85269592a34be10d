//! The plain-text instance document.
//!
//! ```text
//! # comment
//! label: ex41
//! sellers: 1
//! buyers: 3
//! goods: 3
//! matrix:
//! 1 0 1
//! 1 1 0
//! 0 1 1
//! ```
//!
//! `label` and `seed` are optional and do not affect the instance hash.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::ValuationMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub sellers: usize,
    pub valuation: ValuationMatrix,
    pub label: Option<String>,
    pub seed: Option<u64>,
}

impl Instance {
    pub fn new(sellers: usize, valuation: ValuationMatrix) -> Result<Self> {
        if sellers == 0 || sellers > u8::MAX as usize {
            return Err(Error::input("the number of sellers must be between 1 and 255"));
        }
        Ok(Instance {
            sellers,
            valuation,
            label: None,
            seed: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn buyers(&self) -> usize {
        self.valuation.num_buyers()
    }

    pub fn goods(&self) -> usize {
        self.valuation.num_goods()
    }

    /// The label if any, otherwise a prefix of the hash.
    pub fn name(&self) -> String {
        match &self.label {
            Some(label) => label.clone(),
            None => self.hash()[..12].to_string(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser::default().run(text)
    }

    /// The document form; `parse(emit(x)) == x`.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        if let Some(label) = &self.label {
            writeln!(out, "label: {label}").unwrap();
        }
        if let Some(seed) = self.seed {
            writeln!(out, "seed: {seed}").unwrap();
        }
        out.push_str(&self.canonical_text());
        out
    }

    /// The document without label or seed.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "sellers: {}", self.sellers).unwrap();
        writeln!(out, "buyers: {}", self.buyers()).unwrap();
        writeln!(out, "goods: {}", self.goods()).unwrap();
        out.push_str("matrix:\n");
        for row in self.valuation.to_rows() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    /// Lowercase hex SHA-256 of [`Instance::canonical_text`].
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_text().as_bytes()))
    }
}

#[derive(Default)]
struct Parser {
    sellers: Option<usize>,
    buyers: Option<usize>,
    goods: Option<usize>,
    label: Option<String>,
    seed: Option<u64>,
    rows: Option<Vec<Vec<u8>>>,
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

impl Parser {
    fn run(mut self, text: &str) -> Result<Instance> {
        let mut last = 0;
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            last = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rows) = &self.rows {
                let expected = self.buyers.unwrap_or(0);
                if rows.len() < expected {
                    self.push_row(line, content)?;
                    continue;
                }
                return Err(parse_error(line, format!("unexpected content after {expected} matrix rows")));
            }
            let Some((key, value)) = content.split_once(':') else {
                return Err(parse_error(line, format!("expected `field: value`, found {content:?}")));
            };
            self.field(line, key.trim(), value.trim())?;
        }
        self.finish(last)
    }

    fn field(&mut self, line: usize, key: &str, value: &str) -> Result<()> {
        let count = |value: &str| {
            value
                .parse::<usize>()
                .map_err(|_| parse_error(line, format!("{key}: expected a non-negative integer, found {value:?}")))
        };
        let duplicate = || parse_error(line, format!("duplicate field {key:?}"));
        match key {
            "sellers" | "buyers" | "goods" => {
                let n = count(value)?;
                if n == 0 {
                    return Err(parse_error(line, format!("{key} must be positive")));
                }
                let slot = match key {
                    "sellers" => &mut self.sellers,
                    "buyers" => &mut self.buyers,
                    _ => &mut self.goods,
                };
                if slot.replace(n).is_some() {
                    return Err(duplicate());
                }
            }
            "label" => {
                if value.is_empty() {
                    return Err(parse_error(line, "label must not be empty"));
                }
                if self.label.replace(value.to_string()).is_some() {
                    return Err(duplicate());
                }
            }
            "seed" => {
                let seed = value
                    .parse::<u64>()
                    .map_err(|_| parse_error(line, format!("seed: expected an integer, found {value:?}")))?;
                if self.seed.replace(seed).is_some() {
                    return Err(duplicate());
                }
            }
            "matrix" => {
                if !value.is_empty() {
                    return Err(parse_error(line, "matrix rows start on the next line"));
                }
                if self.buyers.is_none() || self.goods.is_none() {
                    return Err(parse_error(line, "buyers and goods must precede the matrix"));
                }
                self.rows = Some(Vec::new());
            }
            _ => return Err(parse_error(line, format!("unknown field {key:?}"))),
        }
        Ok(())
    }

    fn push_row(&mut self, line: usize, content: &str) -> Result<()> {
        let goods = self.goods.unwrap_or(0);
        let rows = self.rows.as_mut().expect("inside the matrix");
        let buyer = rows.len();
        let mut row = Vec::with_capacity(goods);
        for (good, token) in content.split_whitespace().enumerate() {
            let value: i64 = token
                .parse()
                .map_err(|_| parse_error(line, format!("matrix entry {token:?} is not an integer")))?;
            if value != 0 && value != 1 {
                let detail = Error::NonBinary { buyer, good, value };
                return Err(parse_error(line, detail.to_string()));
            }
            row.push(value as u8);
        }
        if row.len() != goods {
            return Err(parse_error(
                line,
                format!("dimension mismatch: row {buyer} has {} entries, goods is {goods}", row.len()),
            ));
        }
        rows.push(row);
        Ok(())
    }

    fn finish(self, last: usize) -> Result<Instance> {
        let end = last.max(1);
        let missing = |field: &str| parse_error(end, format!("missing field {field:?}"));
        let sellers = self.sellers.ok_or_else(|| missing("sellers"))?;
        let buyers = self.buyers.ok_or_else(|| missing("buyers"))?;
        self.goods.ok_or_else(|| missing("goods"))?;
        let rows = self.rows.ok_or_else(|| missing("matrix"))?;
        if rows.len() != buyers {
            return Err(parse_error(
                end,
                format!("dimension mismatch: matrix has {} rows, buyers is {buyers}", rows.len()),
            ));
        }
        let valuation = ValuationMatrix::from_rows(&rows).map_err(|e| parse_error(end, e.to_string()))?;
        let mut instance = Instance::new(sellers, valuation).map_err(|e| parse_error(end, e.to_string()))?;
        instance.label = self.label;
        instance.seed = self.seed;
        Ok(instance)
    }
}
