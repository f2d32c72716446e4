//! The plain-text family registry: parsing, validation and the embedded
//! default data.
//!
//! The format is line-oriented `key = value` records introduced by
//! `[family X]` (or `[family X misprint]`) section headers. Coefficient
//! expressions use the CLI scalar grammar. On load, the six relations built
//! from the sigma matrix are compared against the stored relation strings;
//! any disagreement is a malformed registry.

use std::collections::BTreeMap;

use doex_core::algebra::{Bidegree, Letter};
use doex_core::family::{Cancellation, CenterClaim, FamilySpec, ParamChoice, SigmaMatrix, Variant};
use doex_core::params::{ConstraintSet, MinimalPoly, ParamName, Scalar};
use num_rational::BigRational;

use crate::expr::{parse_element, parse_rational, parse_scalar};

/// Embedded default registry.
pub const DEFAULT_REGISTRY: &str = include_str!("../data/families.reg");

/// Environment variable naming the default registry path.
pub const REGISTRY_ENV: &str = "DOEX_REGISTRY";

#[derive(Clone, Debug)]
pub struct RegistryError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for RegistryError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "malformed registry (line {}): {}", self.line, self.message)
    }
}

impl std::error::Error for RegistryError {}

#[derive(Clone, Debug)]
pub struct Registry {
    pub version: u32,
    pub families: Vec<FamilySpec>,
}

impl Registry {
    /// Parse and validate registry text.
    pub fn parse(text: &str) -> Result<Registry, RegistryError> {
        let mut version = 0u32;
        let mut families = Vec::new();
        let mut current: Option<Builder> = None;
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(header) = line.strip_prefix('[') {
                let header = header.strip_suffix(']').ok_or_else(|| err(lineno, "unclosed section header"))?;
                if let Some(b) = current.take() {
                    families.push(b.finish()?);
                }
                current = Some(Builder::new(header, lineno)?);
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(lineno, "expected 'key = value'"))?;
            let key = key.trim();
            let value = value.trim();
            match &mut current {
                None => {
                    if key == "version" {
                        version = value
                            .parse()
                            .map_err(|_| err(lineno, "version must be an integer"))?;
                    } else {
                        return Err(err(lineno, "unexpected key before the first family section"));
                    }
                }
                Some(b) => b.set(key, value, lineno)?,
            }
        }
        if let Some(b) = current.take() {
            families.push(b.finish()?);
        }
        validate(&families)?;
        Ok(Registry { version, families })
    }

    /// The embedded registry, known to be well formed.
    pub fn load_default() -> Registry {
        Registry::parse(DEFAULT_REGISTRY).expect("embedded registry is valid")
    }

    pub fn get(&self, label: char, variant: Variant) -> Option<&FamilySpec> {
        self.families
            .iter()
            .find(|f| f.label == label && f.variant == variant)
    }

    /// The 26 standard families, in label order.
    pub fn standard(&self) -> Vec<&FamilySpec> {
        let mut v: Vec<&FamilySpec> = self
            .families
            .iter()
            .filter(|f| f.variant == Variant::Standard)
            .collect();
        v.sort_by_key(|f| f.label);
        v
    }
}

fn err(line: usize, message: impl Into<String>) -> RegistryError {
    RegistryError {
        line,
        message: message.into(),
    }
}

fn validate(families: &[FamilySpec]) -> Result<(), RegistryError> {
    // every standard label A..Z exactly once
    for label in 'A'..='Z' {
        let n = families
            .iter()
            .filter(|f| f.label == label && f.variant == Variant::Standard)
            .count();
        if n == 0 {
            return Err(err(0, format!("family {label} is missing")));
        }
        if n > 1 {
            return Err(err(0, format!("family {label} appears {n} times")));
        }
    }
    Ok(())
}

struct ClaimBuilder {
    table: u8,
    desc: String,
    assignments: Vec<(ParamName, BigRational)>,
    extra_constraints: ConstraintSet,
    generators: Vec<String>,
    relations: Vec<String>,
    scan_bound: Option<Bidegree>,
    assumptions: Vec<String>,
}

impl ClaimBuilder {
    fn new() -> ClaimBuilder {
        ClaimBuilder {
            table: 0,
            desc: String::new(),
            assignments: Vec::new(),
            extra_constraints: ConstraintSet::empty(),
            generators: Vec::new(),
            relations: Vec::new(),
            scan_bound: None,
            assumptions: Vec::new(),
        }
    }
}

struct Builder {
    line: usize,
    label: char,
    variant: Variant,
    p: Option<(Scalar, Scalar)>,
    q: Option<(Scalar, Scalar)>,
    sigma: BTreeMap<(usize, usize), [[Scalar; 2]; 2]>,
    rels: BTreeMap<(Letter, Letter), String>,
    constraints: ConstraintSet,
    choices: Vec<ParamChoice>,
    nonzero: Vec<Scalar>,
    generic: Vec<Scalar>,
    avoid: Vec<Scalar>,
    assumptions: Vec<String>,
    condition: String,
    cancellation: Cancellation,
    claims: BTreeMap<u32, ClaimBuilder>,
}

impl Builder {
    fn new(header: &str, line: usize) -> Result<Builder, RegistryError> {
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() < 2 || parts[0] != "family" {
            return Err(err(line, "section header must be [family X] or [family X misprint]"));
        }
        let label_str = parts[1];
        if label_str.len() != 1 || !label_str.chars().next().unwrap().is_ascii_uppercase() {
            return Err(err(line, "family label must be a single letter A..Z"));
        }
        let variant = match parts.get(2) {
            None => Variant::Standard,
            Some(&"misprint") => Variant::Misprint,
            Some(other) => return Err(err(line, format!("unknown variant '{other}'"))),
        };
        Ok(Builder {
            line,
            label: label_str.chars().next().unwrap(),
            variant,
            p: None,
            q: None,
            sigma: BTreeMap::new(),
            rels: BTreeMap::new(),
            constraints: ConstraintSet::empty(),
            choices: Vec::new(),
            nonzero: Vec::new(),
            generic: Vec::new(),
            avoid: Vec::new(),
            assumptions: Vec::new(),
            condition: String::new(),
            cancellation: Cancellation::No,
            claims: BTreeMap::new(),
        })
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), RegistryError> {
        if let Some(rest) = key.strip_prefix("claim.") {
            return self.set_claim(rest, value, line);
        }
        match key {
            "P" => self.p = Some(parse_pair(value, line)?),
            "Q" => self.q = Some(parse_pair(value, line)?),
            "sigma11" => {
                self.sigma.insert((1, 1), parse_block(value, line)?);
            }
            "sigma12" => {
                self.sigma.insert((1, 2), parse_block(value, line)?);
            }
            "sigma21" => {
                self.sigma.insert((2, 1), parse_block(value, line)?);
            }
            "sigma22" => {
                self.sigma.insert((2, 2), parse_block(value, line)?);
            }
            "rel.x2x1" => {
                self.rels.insert((Letter::X2, Letter::X1), value.to_string());
            }
            "rel.y2y1" => {
                self.rels.insert((Letter::Y2, Letter::Y1), value.to_string());
            }
            "rel.y1x1" => {
                self.rels.insert((Letter::Y1, Letter::X1), value.to_string());
            }
            "rel.y1x2" => {
                self.rels.insert((Letter::Y1, Letter::X2), value.to_string());
            }
            "rel.y2x1" => {
                self.rels.insert((Letter::Y2, Letter::X1), value.to_string());
            }
            "rel.y2x2" => {
                self.rels.insert((Letter::Y2, Letter::X2), value.to_string());
            }
            "constraint" => {
                let (name, mp) = parse_constraint(value, line)?;
                self.constraints.insert(name, mp);
            }
            "choose" => self.choices.push(parse_choice(value, line)?),
            "nonzero" => self
                .nonzero
                .push(parse_scalar(value).map_err(|m| err(line, m))?),
            "generic" => self
                .generic
                .push(parse_scalar(value).map_err(|m| err(line, m))?),
            "avoid" => self
                .avoid
                .push(parse_scalar(value).map_err(|m| err(line, m))?),
            "assume" => self.assumptions.push(value.to_string()),
            "condition" => self.condition = value.to_string(),
            "cancellation" => {
                self.cancellation = match value {
                    "no" => Cancellation::No,
                    "unconditional" => Cancellation::Unconditional,
                    "generic" => Cancellation::Generic,
                    other => return Err(err(line, format!("unknown cancellation '{other}'"))),
                }
            }
            other => return Err(err(line, format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    fn set_claim(&mut self, rest: &str, value: &str, line: usize) -> Result<(), RegistryError> {
        let (idx, field) = rest
            .split_once('.')
            .ok_or_else(|| err(line, "claim keys look like claim.N.field"))?;
        let idx: u32 = idx
            .parse()
            .map_err(|_| err(line, "claim index must be an integer"))?;
        let claim = self.claims.entry(idx).or_insert_with(ClaimBuilder::new);
        match field {
            "table" => {
                claim.table = value
                    .parse()
                    .map_err(|_| err(line, "claim table must be 1 or 2"))?
            }
            "desc" => claim.desc = value.to_string(),
            "set" => {
                let (name, v) = value
                    .split_once('=')
                    .ok_or_else(|| err(line, "claim set looks like 'name = value'"))?;
                let name = ParamName::parse(name.trim())
                    .ok_or_else(|| err(line, format!("unknown parameter '{}'", name.trim())))?;
                let v = parse_rational(v.trim()).map_err(|m| err(line, m))?;
                claim.assignments.push((name, v));
            }
            "constraint" => {
                let (name, mp) = parse_constraint(value, line)?;
                claim.extra_constraints.insert(name, mp);
            }
            "gen" => claim.generators.push(value.to_string()),
            "rel" => claim.relations.push(value.to_string()),
            "scan" => {
                let (a, b) = value
                    .split_once(',')
                    .ok_or_else(|| err(line, "scan bound looks like 'a, b'"))?;
                let a: u32 = a.trim().parse().map_err(|_| err(line, "bad scan bound"))?;
                let b: u32 = b.trim().parse().map_err(|_| err(line, "bad scan bound"))?;
                claim.scan_bound = Some(Bidegree::new(a, b));
            }
            "assume" => claim.assumptions.push(value.to_string()),
            other => return Err(err(line, format!("unknown claim field '{other}'"))),
        }
        Ok(())
    }

    fn finish(self) -> Result<FamilySpec, RegistryError> {
        let line = self.line;
        let (p12, p11) = self.p.ok_or_else(|| err(line, "missing P"))?;
        let (q12, q11) = self.q.ok_or_else(|| err(line, "missing Q"))?;
        for ij in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            if !self.sigma.contains_key(&ij) {
                return Err(err(line, format!("missing sigma{}{}", ij.0, ij.1)));
            }
        }
        // assemble the 4x4 from the blocks: row (i,s), column (j,t)
        let zero = Scalar::zero;
        let mut rows: [[Scalar; 4]; 4] = [
            [zero(), zero(), zero(), zero()],
            [zero(), zero(), zero(), zero()],
            [zero(), zero(), zero(), zero()],
            [zero(), zero(), zero(), zero()],
        ];
        for ((i, j), block) in &self.sigma {
            for s in 1..=2usize {
                for t in 1..=2usize {
                    rows[2 * (i - 1) + (s - 1)][2 * (j - 1) + (t - 1)] =
                        block[s - 1][t - 1].clone();
                }
            }
        }
        let mut claims = Vec::new();
        for (_, cb) in self.claims {
            if cb.table != 1 && cb.table != 2 {
                return Err(err(line, "every claim needs table = 1 or table = 2"));
            }
            let parse_cs = self.constraints.merged(&cb.extra_constraints);
            let mut generators = Vec::new();
            for g in &cb.generators {
                generators.push(parse_element(g, &parse_cs).map_err(|e| err(line, e.to_string()))?);
            }
            let mut relations = Vec::new();
            for r in &cb.relations {
                relations.push(parse_element(r, &parse_cs).map_err(|e| err(line, e.to_string()))?);
            }
            claims.push(CenterClaim {
                table: cb.table,
                desc: cb.desc,
                assignments: cb.assignments,
                extra_constraints: cb.extra_constraints,
                generators,
                relations,
                scan_bound: cb.scan_bound,
                assumptions: cb.assumptions,
            });
        }
        let fs = FamilySpec {
            label: self.label,
            variant: self.variant,
            p12,
            p11,
            q12,
            q11,
            sigma: SigmaMatrix::from_rows(rows),
            constraints: self.constraints,
            choices: self.choices,
            nonzero: self.nonzero,
            generic: self.generic,
            avoid: self.avoid,
            assumptions: self.assumptions,
            condition: self.condition,
            cancellation: self.cancellation,
            claims,
        };
        // cross-check: relations built from sigma match the stored strings
        if self.rels.len() != 6 {
            return Err(err(line, "all six relations must be present"));
        }
        let rules = fs.rule_map();
        for (lhs, text) in &self.rels {
            let parsed =
                parse_element(text, &fs.constraints).map_err(|e| err(line, e.to_string()))?;
            if !rules[lhs].eq_element(&parsed, &fs.constraints) {
                return Err(err(
                    line,
                    format!(
                        "family {}: relation {}*{} disagrees with the sigma matrix (sigma gives {}, stored {})",
                        fs.name(),
                        lhs.0,
                        lhs.1,
                        rules[lhs].render(),
                        parsed.render()
                    ),
                ));
            }
        }
        Ok(fs)
    }
}

fn parse_pair(value: &str, line: usize) -> Result<(Scalar, Scalar), RegistryError> {
    let inner = value
        .strip_prefix('(')
        .and_then(|v| v.strip_suffix(')'))
        .ok_or_else(|| err(line, "pair looks like (a, b)"))?;
    let (a, b) = inner
        .split_once(',')
        .ok_or_else(|| err(line, "pair looks like (a, b)"))?;
    Ok((
        parse_scalar(a.trim()).map_err(|m| err(line, m))?,
        parse_scalar(b.trim()).map_err(|m| err(line, m))?,
    ))
}

fn parse_block(value: &str, line: usize) -> Result<[[Scalar; 2]; 2], RegistryError> {
    let inner = value
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .ok_or_else(|| err(line, "block looks like [a, b; c, d]"))?;
    let (top, bottom) = inner
        .split_once(';')
        .ok_or_else(|| err(line, "block looks like [a, b; c, d]"))?;
    let parse_row = |row: &str| -> Result<[Scalar; 2], RegistryError> {
        let (a, b) = row
            .split_once(',')
            .ok_or_else(|| err(line, "block row looks like 'a, b'"))?;
        Ok([
            parse_scalar(a.trim()).map_err(|m| err(line, m))?,
            parse_scalar(b.trim()).map_err(|m| err(line, m))?,
        ])
    };
    Ok([parse_row(top)?, parse_row(bottom)?])
}

/// Parse `name^2 = rhs` or `name = rhs` into a minimal polynomial.
fn parse_constraint(value: &str, line: usize) -> Result<(ParamName, MinimalPoly), RegistryError> {
    let (lhs, rhs) = value
        .split_once('=')
        .ok_or_else(|| err(line, "constraint looks like 'p^2 = -1' or 'p = 1'"))?;
    let lhs = lhs.trim();
    let rhs = rhs.trim();
    if let Some(name) = lhs.strip_suffix("^2") {
        let name = ParamName::parse(name.trim())
            .ok_or_else(|| err(line, format!("unknown parameter '{}'", name.trim())))?;
        let rhs_scalar = parse_scalar(rhs).map_err(|m| err(line, m))?;
        // rhs must be linear in `name` with rational coefficients
        let poly = rhs_scalar.numerator();
        if !rhs_scalar.denominator().is_one() {
            return Err(err(line, "constraint right-hand side must be polynomial"));
        }
        let mut c1 = BigRational::from_integer(0.into());
        let mut c0 = BigRational::from_integer(0.into());
        for (m, c) in poly.terms() {
            let deg_name = m.0[name.index()];
            if m.degree() != u32::from(deg_name) {
                return Err(err(line, "constraint may involve only its own parameter"));
            }
            match deg_name {
                0 => c0 = c.clone(),
                1 => c1 = c.clone(),
                _ => return Err(err(line, "constraint right-hand side must be linear")),
            }
        }
        let mp = MinimalPoly::quadratic(c1, c0)
            .map_err(|_| err(line, "constraint polynomial is reducible over the rationals"))?;
        Ok((name, mp))
    } else {
        let name = ParamName::parse(lhs)
            .ok_or_else(|| err(line, format!("unknown parameter '{lhs}'")))?;
        let v = parse_rational(rhs).map_err(|m| err(line, m))?;
        Ok((name, MinimalPoly::linear(v)))
    }
}

/// Parse `p in {-1, 1}`.
fn parse_choice(value: &str, line: usize) -> Result<ParamChoice, RegistryError> {
    let (name, rest) = value
        .split_once(" in ")
        .ok_or_else(|| err(line, "choice looks like 'p in {-1, 1}'"))?;
    let name = ParamName::parse(name.trim())
        .ok_or_else(|| err(line, format!("unknown parameter '{}'", name.trim())))?;
    let inner = rest
        .trim()
        .strip_prefix('{')
        .and_then(|v| v.strip_suffix('}'))
        .ok_or_else(|| err(line, "choice looks like 'p in {-1, 1}'"))?;
    let mut values = Vec::new();
    for part in inner.split(',') {
        values.push(parse_rational(part.trim()).map_err(|m| err(line, m))?);
    }
    Ok(ParamChoice { name, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_registry_loads_and_validates() {
        let reg = Registry::load_default();
        assert_eq!(reg.version, 1);
        assert_eq!(reg.standard().len(), 26);
        // the misprint variant of Z is present alongside the standard one
        assert!(reg.get('Z', Variant::Misprint).is_some());
        assert!(reg.get('Z', Variant::Standard).is_some());
    }

    #[test]
    fn family_details_survive_loading() {
        let reg = Registry::load_default();
        let d = reg.get('D', Variant::Standard).unwrap();
        assert_eq!(d.choices.len(), 1);
        assert_eq!(d.choices[0].name, ParamName::P);
        assert_eq!(d.claims.len(), 2);
        let b = reg.get('B', Variant::Standard).unwrap();
        assert!(b.constraints.get(ParamName::P).is_some());
        let o = reg.get('O', Variant::Standard).unwrap();
        assert_eq!(o.nonzero.len(), 1);
        assert_eq!(o.claims.len(), 2);
    }

    #[test]
    fn duplicate_family_rejected() {
        let mut text = String::from("version = 1\n");
        let one = DEFAULT_REGISTRY
            .split("[family B]")
            .next()
            .unwrap()
            .split("[family A]")
            .nth(1)
            .unwrap();
        text.push_str("[family A]");
        text.push_str(one);
        text.push_str("[family A]");
        text.push_str(one);
        let e = Registry::parse(&text).unwrap_err();
        assert!(e.message.contains("appears") || e.message.contains("missing"));
    }

    #[test]
    fn sigma_relation_mismatch_rejected() {
        // flip one relation sign in family A's record
        let text = DEFAULT_REGISTRY.replace(
            "rel.y1x2 = x2*y1 + x1*y2",
            "rel.y1x2 = x2*y1 - x1*y2",
        );
        let e = Registry::parse(&text).unwrap_err();
        assert!(e.message.contains("disagrees"), "{}", e.message);
    }

    #[test]
    fn constraint_parsing() {
        let (name, mp) = parse_constraint("p^2 = -p - 1", 1).unwrap();
        assert_eq!(name, ParamName::P);
        assert_eq!(mp.degree, 2);
        assert!(parse_constraint("p^2 = 1", 1).is_err()); // reducible
        let (_, mp) = parse_constraint("f = 2", 1).unwrap();
        assert_eq!(mp.degree, 1);
    }
}
