//! Family data for the 26 classified algebras: the parameter pairs `P`, `Q`,
//! the 4x4 coefficient matrix of the mixing relations, validity conditions and
//! structured center claims, plus the compatibility checker that certifies a
//! matrix actually defines a double extension.
//!
//! The mixing relations read off the matrix as
//! `y_i x_s = sum_{j,t} a_{ijst} x_t y_j`; the non-mixing relations are
//! `x2 x1 = q12 x1 x2 + q11 x1^2` and `y2 y1 = p12 y1 y2 + p11 y1^2`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_rational::BigRational;

use crate::algebra::{Bidegree, Element, Letter, Word};
use crate::params::{ArithError, ConstraintSet, ParamName, Scalar};
use crate::rewrite::{normal_form, RewriteError, RewriteSystem, DEFAULT_MAX_STEPS};

/// The 16 mixing coefficients `a_{ijst}`, stored as the 4x4 matrix whose rows
/// are indexed by `(i, s)` and columns by `(j, t)` in the order
/// `(1,1), (1,2), (2,1), (2,2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaMatrix {
    entries: [[Scalar; 4]; 4],
}

impl SigmaMatrix {
    pub fn from_rows(entries: [[Scalar; 4]; 4]) -> SigmaMatrix {
        SigmaMatrix { entries }
    }

    /// The coefficient `a_{ijst}`, indices in `1..=2`.
    pub fn entry(&self, i: usize, j: usize, s: usize, t: usize) -> &Scalar {
        &self.entries[2 * (i - 1) + (s - 1)][2 * (j - 1) + (t - 1)]
    }

    pub fn row(&self, r: usize) -> &[Scalar; 4] {
        &self.entries[r]
    }

    /// Determinant of the 4x4 matrix, computed exactly.
    pub fn det(&self, cs: &ConstraintSet) -> Scalar {
        let rows: Vec<Vec<Scalar>> = self.entries.iter().map(|r| r.to_vec()).collect();
        det_n(&rows, cs)
    }
}

fn det_n(rows: &[Vec<Scalar>], cs: &ConstraintSet) -> Scalar {
    let n = rows.len();
    if n == 1 {
        return rows[0][0].clone();
    }
    let mut out = Scalar::zero();
    for (col, pivot) in rows[0].iter().enumerate() {
        if pivot.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Scalar>> = rows[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != col)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let mut term = pivot.mul(&det_n(&minor, cs), cs);
        if col % 2 == 1 {
            term = term.neg();
        }
        out = out.add(&term, cs);
    }
    out
}

/// Whether a record carries the corrected relations or a deliberately kept
/// misprinted variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Standard,
    Misprint,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::Misprint => "misprint",
        }
    }
}

/// A finite menu of admissible rational values for one parameter.
#[derive(Clone, Debug)]
pub struct ParamChoice {
    pub name: ParamName,
    pub values: Vec<BigRational>,
}

/// Cancellation eligibility of a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cancellation {
    /// Not known to be cancellative from a trivial center.
    No,
    /// Trivial center holds without parameter hypotheses.
    Unconditional,
    /// Trivial center holds under the family's genericity hypotheses.
    Generic,
}

/// One structured claim from the center or central-subalgebra tables.
#[derive(Clone, Debug)]
pub struct CenterClaim {
    /// 1 for an exact-center claim, 2 for a central-subalgebra claim.
    pub table: u8,
    pub desc: String,
    /// Rational parameter values this claim is verified at.
    pub assignments: Vec<(ParamName, BigRational)>,
    /// Extra algebraic constraints for this claim (e.g. a cube-root-of-unity
    /// minimal polynomial).
    pub extra_constraints: ConstraintSet,
    /// Claimed central generators (symbolic; specialized at verification).
    pub generators: Vec<Element>,
    /// Relations among the generators that must vanish in normal form.
    pub relations: Vec<Element>,
    /// For table-1 claims: confirm, up to this bound, that the kernel is
    /// spanned by products of the claimed generators.
    pub scan_bound: Option<Bidegree>,
    /// Genericity assumptions the claim rests on, recorded verbatim.
    pub assumptions: Vec<String>,
}

/// Machine-readable encoding of one classified family.
#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub label: char,
    pub variant: Variant,
    /// `P = (p12, p11)`.
    pub p12: Scalar,
    pub p11: Scalar,
    /// `Q = (q12, q11)`.
    pub q12: Scalar,
    pub q11: Scalar,
    pub sigma: SigmaMatrix,
    /// Always-on algebraic constraints (irreducible minimal polynomials).
    pub constraints: ConstraintSet,
    /// Finite parameter menus that must be specialized before numeric runs.
    pub choices: Vec<ParamChoice>,
    /// Validity conditions `expr != 0` from the classification.
    pub nonzero: Vec<Scalar>,
    /// Expressions assumed not to be roots of unity in generic statements.
    pub generic: Vec<Scalar>,
    /// Extra expressions whose vanishing locus random specializations must
    /// avoid.
    pub avoid: Vec<Scalar>,
    /// Free-text assumptions attached to generic statements.
    pub assumptions: Vec<String>,
    /// The conditions column, verbatim.
    pub condition: String,
    pub cancellation: Cancellation,
    pub claims: Vec<CenterClaim>,
}

impl FamilySpec {
    pub fn name(&self) -> String {
        use alloc::format;
        match self.variant {
            Variant::Standard => format!("{}", self.label),
            Variant::Misprint => format!("{} (misprint variant)", self.label),
        }
    }

    /// Parameters that actually occur in this family's data.
    pub fn params_used(&self) -> Vec<ParamName> {
        let mut out: Vec<ParamName> = Vec::new();
        let mut push_all = |s: &Scalar| {
            for p in s.params_present() {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        };
        push_all(&self.p12);
        push_all(&self.p11);
        push_all(&self.q12);
        push_all(&self.q11);
        for r in 0..4 {
            for e in self.sigma.row(r) {
                push_all(e);
            }
        }
        out.sort();
        out
    }

    /// The six rule right-hand sides read off `P`, `Q` and the sigma matrix.
    pub fn rule_map(&self) -> BTreeMap<(Letter, Letter), Element> {
        let cs = &self.constraints;
        let term = |c: &Scalar, a: Letter, b: Letter| {
            Element::term(Word::from_letters([a, b].to_vec()), c.clone())
        };
        let mut rules = BTreeMap::new();
        // x2 x1 = q12 x1 x2 + q11 x1^2
        rules.insert(
            (Letter::X2, Letter::X1),
            term(&self.q12, Letter::X1, Letter::X2)
                .add(&term(&self.q11, Letter::X1, Letter::X1), cs),
        );
        // y2 y1 = p12 y1 y2 + p11 y1^2
        rules.insert(
            (Letter::Y2, Letter::Y1),
            term(&self.p12, Letter::Y1, Letter::Y2)
                .add(&term(&self.p11, Letter::Y1, Letter::Y1), cs),
        );
        let x = [Letter::X1, Letter::X2];
        let y = [Letter::Y1, Letter::Y2];
        for i in 1..=2usize {
            for s in 1..=2usize {
                let mut rhs = Element::zero();
                for j in 1..=2usize {
                    for t in 1..=2usize {
                        rhs =
                            rhs.add(&term(self.sigma.entry(i, j, s, t), x[t - 1], y[j - 1]), cs);
                    }
                }
                rules.insert((y[i - 1], x[s - 1]), rhs);
            }
        }
        rules
    }

    /// Build the rewrite system with the family's constraints active.
    pub fn build_rewrite_system(&self) -> Result<RewriteSystem, RewriteError> {
        RewriteSystem::new(self.rule_map(), self.constraints.clone())
    }

    /// Build the rewrite system with rational values substituted for some
    /// parameters and optional extra constraints merged in.
    pub fn specialized_system(
        &self,
        assignment: &BTreeMap<ParamName, BigRational>,
        extra: &ConstraintSet,
    ) -> Result<RewriteSystem, SpecializeError> {
        let cs = self.constraints.merged(extra);
        let mut rules = BTreeMap::new();
        for (k, v) in self.rule_map() {
            let v = v
                .specialize(assignment, &cs)
                .map_err(SpecializeError::Arith)?;
            rules.insert(k, v);
        }
        RewriteSystem::new(rules, cs).map_err(SpecializeError::Rewrite)
    }

    /// Render the six defining relations in the natural style of the tables,
    /// e.g. `y1*x2 = -p^2*x2*y1 + x1*y2`.
    pub fn render_relations(&self) -> Vec<(String, String)> {
        let mut out = Vec::with_capacity(6);
        out.push((
            String::from("x2*x1"),
            render_combination(&[&self.q12, &self.q11], &["x1*x2", "x1^2"]),
        ));
        out.push((
            String::from("y2*y1"),
            render_combination(&[&self.p12, &self.p11], &["y1*y2", "y1^2"]),
        ));
        let names = ["x1*y1", "x2*y1", "x1*y2", "x2*y2"];
        for i in 1..=2usize {
            for s in 1..=2usize {
                use alloc::format;
                let lhs = format!("y{i}*x{s}");
                // table order: x1y1, x2y1, x1y2, x2y2
                let coeffs = [
                    self.sigma.entry(i, 1, s, 1),
                    self.sigma.entry(i, 1, s, 2),
                    self.sigma.entry(i, 2, s, 1),
                    self.sigma.entry(i, 2, s, 2),
                ];
                out.push((lhs, render_combination(&coeffs, &names)));
            }
        }
        out
    }
}

/// Errors from specializing a family.
#[derive(Clone, Debug)]
pub enum SpecializeError {
    Arith(ArithError),
    Rewrite(RewriteError),
}

impl fmt::Display for SpecializeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecializeError::Arith(e) => write!(f, "{e}"),
            SpecializeError::Rewrite(e) => write!(f, "{e}"),
        }
    }
}

/// Natural rendering of `sum c_k * m_k`, folding signs and unit coefficients.
fn render_combination(coeffs: &[&Scalar], monomials: &[&str]) -> String {
    let mut s = String::new();
    for (c, m) in coeffs.iter().zip(monomials) {
        if c.is_zero() {
            continue;
        }
        let rendered = c.render();
        let (neg, body) = match rendered.strip_prefix('-') {
            Some(rest) => (true, String::from(rest)),
            None => (false, rendered),
        };
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else if neg {
            s.push_str(" - ");
        } else {
            s.push_str(" + ");
        }
        if body == "1" {
            s.push_str(m);
        } else if body.contains(' ') || body.contains('/') {
            s.push('(');
            s.push_str(&body);
            s.push_str(")*");
            s.push_str(m);
        } else {
            s.push_str(&body);
            s.push('*');
            s.push_str(m);
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

// ----- compatibility checker -----

/// A 2x2 scalar matrix representing one graded map on the degree-1 part of
/// the x-subalgebra: `m(x_s) = sum_t M[s][t] x_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Map2([[Scalar; 2]; 2]);

impl Map2 {
    fn zero() -> Map2 {
        Map2([
            [Scalar::zero(), Scalar::zero()],
            [Scalar::zero(), Scalar::zero()],
        ])
    }

    fn from_sigma(sigma: &SigmaMatrix, i: usize, j: usize) -> Map2 {
        Map2([
            [
                sigma.entry(i, j, 1, 1).clone(),
                sigma.entry(i, j, 1, 2).clone(),
            ],
            [
                sigma.entry(i, j, 2, 1).clone(),
                sigma.entry(i, j, 2, 2).clone(),
            ],
        ])
    }

    fn matmul(&self, other: &Map2, cs: &ConstraintSet) -> Map2 {
        let mut out = Map2::zero();
        for s in 0..2 {
            for t in 0..2 {
                let mut acc = Scalar::zero();
                for k in 0..2 {
                    acc = acc.add(&self.0[s][k].mul(&other.0[k][t], cs), cs);
                }
                out.0[s][t] = acc;
            }
        }
        out
    }

    fn scale(&self, c: &Scalar, cs: &ConstraintSet) -> Map2 {
        let mut out = self.clone();
        for row in out.0.iter_mut() {
            for e in row.iter_mut() {
                *e = e.mul(c, cs);
            }
        }
        out
    }

    fn add(&self, other: &Map2, cs: &ConstraintSet) -> Map2 {
        let mut out = self.clone();
        for (row, orow) in out.0.iter_mut().zip(other.0.iter()) {
            for (e, oe) in row.iter_mut().zip(orow.iter()) {
                *e = e.add(oe, cs);
            }
        }
        out
    }

    fn sub(&self, other: &Map2, cs: &ConstraintSet) -> Map2 {
        self.add(&other.scale(&Scalar::from_integer(-1), cs), cs)
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|r| r.iter().all(|e| e.is_zero()))
    }

    /// Value on `x_s` (s in 1..=2) as a degree-1 element.
    fn apply(&self, s: usize, cs: &ConstraintSet) -> Element {
        Element::term(Word::letter(Letter::X1), self.0[s - 1][0].clone()).add(
            &Element::term(Word::letter(Letter::X2), self.0[s - 1][1].clone()),
            cs,
        )
    }
}

/// Composition as operators: `compose(a, b)` applies `b` first, then `a`.
fn compose(a: &Map2, b: &Map2, cs: &ConstraintSet) -> Map2 {
    b.matmul(a, cs)
}

/// One violated identity, with the residual on the generator it fails at.
#[derive(Clone, Debug)]
pub struct IdentityFailure {
    pub identity: String,
    pub generator: Letter,
    pub residual: Element,
}

/// Result of the compatibility check of one family.
#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub family: String,
    pub det: Scalar,
    pub det_nonzero: bool,
    /// Residuals of the multiplicativity identity
    /// `sigma(x2 x1) = q11 sigma(x1 x1) + q12 sigma(x1 x2)`, by entry `(i,j)`.
    pub mult_failures: Vec<(usize, usize, Element)>,
    pub identity_failures: Vec<IdentityFailure>,
}

impl ConsistencyReport {
    pub fn ok(&self) -> bool {
        self.det_nonzero && self.mult_failures.is_empty() && self.identity_failures.is_empty()
    }
}

/// Verify that the family data satisfies the compatibility system: the
/// multiplicativity identity on the x-relation, the trimmed operator
/// identities on `x1` and `x2`, and invertibility of the sigma matrix.
pub fn check_consistency(fs: &FamilySpec) -> Result<ConsistencyReport, RewriteError> {
    let cs = &fs.constraints;
    let sys = fs.build_rewrite_system()?;
    let sigma_of = |s: usize| -> [[Element; 2]; 2] {
        // sigma(x_s) as a 2x2 matrix of degree-1 elements, entry (i,j).
        let e = |i: usize, j: usize| Map2::from_sigma(&fs.sigma, i, j).apply(s, cs);
        [[e(1, 1), e(1, 2)], [e(2, 1), e(2, 2)]]
    };
    let matmul_el = |a: &[[Element; 2]; 2], b: &[[Element; 2]; 2]| -> [[Element; 2]; 2] {
        let mut out: [[Element; 2]; 2] = [
            [Element::zero(), Element::zero()],
            [Element::zero(), Element::zero()],
        ];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Element::zero();
                for k in 0..2 {
                    acc = acc.add(&a[i][k].mul(&b[k][j], cs), cs);
                }
                out[i][j] = acc;
            }
        }
        out
    };

    // sigma(x2)sigma(x1) - q11 sigma(x1)sigma(x1) - q12 sigma(x1)sigma(x2) = 0 in R
    let s1 = sigma_of(1);
    let s2 = sigma_of(2);
    let lhs = matmul_el(&s2, &s1);
    let r11 = matmul_el(&s1, &s1);
    let r12 = matmul_el(&s1, &s2);
    let mut mult_failures = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let combo = lhs[i][j]
                .sub(&r11[i][j].scalar_mul(&fs.q11, cs), cs)
                .sub(&r12[i][j].scalar_mul(&fs.q12, cs), cs);
            let residual = normal_form(&combo, &sys, DEFAULT_MAX_STEPS)?;
            if !residual.is_zero() {
                mult_failures.push((i + 1, j + 1, residual));
            }
        }
    }

    // Trimmed operator identities on x1, x2.
    let m11 = Map2::from_sigma(&fs.sigma, 1, 1);
    let m12 = Map2::from_sigma(&fs.sigma, 1, 2);
    let m21 = Map2::from_sigma(&fs.sigma, 2, 1);
    let m22 = Map2::from_sigma(&fs.sigma, 2, 2);
    let p11 = &fs.p11;
    let p12 = &fs.p12;
    let p11sq = p11.mul(p11, cs);
    let p11p12 = p11.mul(p12, cs);
    let p12sq = p12.mul(p12, cs);

    let iii = compose(&m21, &m11, cs)
        .add(&compose(&m22, &m11, cs).scale(p11, cs), cs)
        .sub(&compose(&m11, &m11, cs).scale(p11, cs), cs)
        .sub(&compose(&m12, &m11, cs).scale(&p11sq, cs), cs)
        .sub(&compose(&m11, &m21, cs).scale(p12, cs), cs)
        .sub(&compose(&m12, &m21, cs).scale(&p11p12, cs), cs);
    let iv = compose(&m21, &m12, cs)
        .add(&compose(&m22, &m11, cs).scale(p12, cs), cs)
        .sub(&compose(&m11, &m12, cs).scale(p11, cs), cs)
        .sub(&compose(&m12, &m11, cs).scale(&p11p12, cs), cs)
        .sub(&compose(&m11, &m22, cs).scale(p12, cs), cs)
        .sub(&compose(&m12, &m21, cs).scale(&p12sq, cs), cs);
    let v = compose(&m22, &m12, cs)
        .sub(&compose(&m12, &m12, cs).scale(p11, cs), cs)
        .sub(&compose(&m12, &m22, cs).scale(p12, cs), cs);

    let mut identity_failures = Vec::new();
    for (name, residual) in [("III", &iii), ("IV", &iv), ("V", &v)] {
        if residual.is_zero() {
            continue;
        }
        for s in 1..=2usize {
            let val = residual.apply(s, cs);
            if !val.is_zero() {
                identity_failures.push(IdentityFailure {
                    identity: String::from(name),
                    generator: if s == 1 { Letter::X1 } else { Letter::X2 },
                    residual: val,
                });
            }
        }
    }

    let det = fs.sigma.det(cs);
    Ok(ConsistencyReport {
        family: fs.name(),
        det: det.clone(),
        det_nonzero: !det.is_zero(),
        mult_failures,
        identity_failures,
    })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use num_bigint::BigInt;

    fn sc(n: i64) -> Scalar {
        Scalar::from_integer(n)
    }

    fn sym(p: ParamName) -> Scalar {
        Scalar::param(p)
    }

    fn empty_family(label: char) -> FamilySpec {
        FamilySpec {
            label,
            variant: Variant::Standard,
            p12: sc(1),
            p11: sc(0),
            q12: sc(1),
            q11: sc(0),
            sigma: SigmaMatrix::from_rows([
                [sc(1), sc(0), sc(0), sc(0)],
                [sc(0), sc(1), sc(0), sc(0)],
                [sc(0), sc(0), sc(1), sc(0)],
                [sc(0), sc(0), sc(0), sc(1)],
            ]),
            constraints: ConstraintSet::empty(),
            choices: Vec::new(),
            nonzero: Vec::new(),
            generic: Vec::new(),
            avoid: Vec::new(),
            assumptions: Vec::new(),
            condition: String::new(),
            cancellation: Cancellation::No,
            claims: Vec::new(),
        }
    }

    /// Q = (-1, 0), P = (p, 0), mixing rules y1x1 = -p x1y1,
    /// y1x2 = -p^2 x2y1 + x1y2, y2x1 = p x1y2, y2x2 = x1y1 + x2y2,
    /// with p left symbolic.
    pub(crate) fn family_d_symbolic() -> FamilySpec {
        let p = || sym(ParamName::P);
        let mut fs = empty_family('D');
        fs.p12 = p();
        fs.q12 = sc(-1);
        let psq = p().mul(&p(), &ConstraintSet::empty());
        fs.sigma = SigmaMatrix::from_rows([
            [p().neg(), sc(0), sc(0), sc(0)],
            [sc(0), psq.neg(), sc(1), sc(0)],
            [sc(0), sc(0), p(), sc(0)],
            [sc(1), sc(0), sc(0), sc(1)],
        ]);
        fs.choices = alloc::vec![ParamChoice {
            name: ParamName::P,
            values: alloc::vec![
                BigRational::from_integer(BigInt::from(-1)),
                BigRational::from_integer(BigInt::from(1))
            ],
        }];
        fs
    }

    /// Family D with p substituted.
    pub(crate) fn family_d_at(p: i64) -> FamilySpec {
        let fs = family_d_symbolic();
        let mut assignment = BTreeMap::new();
        assignment.insert(ParamName::P, BigRational::from_integer(BigInt::from(p)));
        specialize_family(&fs, &assignment)
    }

    /// Substitute rational values into every scalar of a family record.
    pub(crate) fn specialize_family(
        fs: &FamilySpec,
        assignment: &BTreeMap<ParamName, BigRational>,
    ) -> FamilySpec {
        let cs = &fs.constraints;
        let sp = |s: &Scalar| s.specialize(assignment, cs).unwrap();
        let rows: [[Scalar; 4]; 4] =
            core::array::from_fn(|r| core::array::from_fn(|c| sp(&fs.sigma.row(r)[c])));
        FamilySpec {
            p12: sp(&fs.p12),
            p11: sp(&fs.p11),
            q12: sp(&fs.q12),
            q11: sp(&fs.q11),
            sigma: SigmaMatrix::from_rows(rows),
            ..fs.clone()
        }
    }

    /// P = Q = (p, 0) with p^2 = -1; mixing rules y1x1 = x2y2, y1x2 = x1y2,
    /// y2x1 = -x2y1, y2x2 = x1y1.
    pub(crate) fn family_b(constrained: bool) -> FamilySpec {
        use crate::params::MinimalPoly;
        let mut fs = empty_family('B');
        fs.p12 = sym(ParamName::P);
        fs.q12 = sym(ParamName::P);
        fs.sigma = SigmaMatrix::from_rows([
            [sc(0), sc(0), sc(0), sc(1)],
            [sc(0), sc(0), sc(1), sc(0)],
            [sc(0), sc(-1), sc(0), sc(0)],
            [sc(1), sc(0), sc(0), sc(0)],
        ]);
        if constrained {
            fs.constraints = ConstraintSet::empty().with(
                ParamName::P,
                MinimalPoly::quadratic(
                    BigRational::from_integer(BigInt::from(0)),
                    BigRational::from_integer(BigInt::from(-1)),
                )
                .unwrap(),
            );
        }
        fs
    }

    /// Q = P = (-1, 0); mixing rules y1x1 = x1y1 + f x2y2,
    /// y1x2 = -x2y1 + x1y2, y2x1 = f x2y1 - x1y2, y2x2 = x1y1 + x2y2.
    pub(crate) fn family_o() -> FamilySpec {
        let f = || sym(ParamName::F);
        let mut fs = empty_family('O');
        fs.p12 = sc(-1);
        fs.q12 = sc(-1);
        fs.sigma = SigmaMatrix::from_rows([
            [sc(1), sc(0), sc(0), f()],
            [sc(0), sc(-1), sc(1), sc(0)],
            [sc(0), f(), sc(-1), sc(0)],
            [sc(1), sc(0), sc(0), sc(1)],
        ]);
        fs.nonzero = alloc::vec![f().add(&sc(1), &ConstraintSet::empty())];
        fs.generic = alloc::vec![sc(1).sub(&f(), &ConstraintSet::empty())];
        fs
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::rewrite::nf_commutator;

    #[test]
    fn rules_read_off_sigma() {
        let fs = family_d_symbolic();
        let rules = fs.rule_map();
        let cs = &fs.constraints;
        // y2 x2 = x1 y1 + x2 y2
        let expected = Element::word(Word::from_letters([Letter::X1, Letter::Y1].to_vec())).add(
            &Element::word(Word::from_letters([Letter::X2, Letter::Y2].to_vec())),
            cs,
        );
        assert!(rules[&(Letter::Y2, Letter::X2)].eq_element(&expected, cs));
        // y2 y1 = p y1 y2
        let expected = Element::term(
            Word::from_letters([Letter::Y1, Letter::Y2].to_vec()),
            Scalar::param(ParamName::P),
        );
        assert!(rules[&(Letter::Y2, Letter::Y1)].eq_element(&expected, cs));
    }

    #[test]
    fn render_relations_natural_style() {
        let fs = family_d_symbolic();
        let rels = fs.render_relations();
        let text: Vec<String> = rels
            .iter()
            .map(|(l, r)| alloc::format!("{l} = {r}"))
            .collect();
        assert_eq!(text[0], "x2*x1 = -x1*x2");
        assert_eq!(text[1], "y2*y1 = p*y1*y2");
        assert_eq!(text[2], "y1*x1 = -p*x1*y1");
        assert_eq!(text[3], "y1*x2 = -p^2*x2*y1 + x1*y2");
        assert_eq!(text[4], "y2*x1 = p*x1*y2");
        assert_eq!(text[5], "y2*x2 = x1*y1 + x2*y2");
    }

    #[test]
    fn consistency_of_specialized_d() {
        // both choices pass; det = p^4 evaluates to 1
        for p in [1i64, -1] {
            let report = check_consistency(&family_d_at(p)).unwrap();
            assert!(report.ok(), "p = {p}: {report:?}");
            assert_eq!(report.det, Scalar::from_integer(1));
        }
    }

    #[test]
    fn consistency_of_b_requires_its_constraint() {
        let constrained = check_consistency(&family_b(true)).unwrap();
        assert!(constrained.ok());
        let unconstrained = check_consistency(&family_b(false)).unwrap();
        assert!(!unconstrained.ok());
        // identity IV is the one that needs p^2 = -1
        assert!(unconstrained
            .identity_failures
            .iter()
            .any(|f| f.identity == "IV"));
    }

    #[test]
    fn family_o_consistent_symbolically() {
        let report = check_consistency(&family_o()).unwrap();
        assert!(report.ok(), "{report:?}");
    }

    #[test]
    fn specialized_system_runs() {
        let fs = family_d_symbolic();
        let mut assignment = BTreeMap::new();
        assignment.insert(
            ParamName::P,
            BigRational::from_integer(num_bigint::BigInt::from(1)),
        );
        let sys = fs
            .specialized_system(&assignment, &ConstraintSet::empty())
            .unwrap();
        let x1sq = Element::word(Word::from_letters([Letter::X1, Letter::X1].to_vec()));
        for g in Letter::ALL {
            let c = nf_commutator(&x1sq, &Element::letter(g), &sys, 1000).unwrap();
            assert!(c.is_zero(), "x1^2 should be central, [x1^2,{g}] != 0");
        }
    }
}
