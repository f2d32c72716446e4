//! Exact arithmetic in the fraction field of `Q[q12, q11, p12, p11, f, g, p, q]`
//! modulo per-parameter minimal-polynomial constraints.
//!
//! A [`ConstraintSet`] assigns to a parameter a monic minimal polynomial of
//! degree at most 2, e.g. `p^2 = -1` or `p^2 = -p - 1`. Degree-2 polynomials
//! must be irreducible over `Q`, so the quotient by a single constraint is a
//! field and inverses can be computed by conjugate multiplication. Polynomials
//! are kept reduced (every constrained exponent below the degree of its
//! minimal polynomial) and scalars are kept as gcd-reduced fractions whose
//! denominator is free of constrained parameters, has integer coefficients of
//! content 1 and a positive leading coefficient under the registry-ordered
//! deglex term order. Equality of canonical forms is then syntactic.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Number of names in the fixed parameter registry.
pub const NUM_PARAMS: usize = 8;

/// A symbolic parameter name from the fixed registry.
///
/// The declaration order is the registry order used for canonical forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum ParamName {
    Q12,
    Q11,
    P12,
    P11,
    F,
    G,
    P,
    Q,
}

impl ParamName {
    pub const ALL: [ParamName; NUM_PARAMS] = [
        ParamName::Q12,
        ParamName::Q11,
        ParamName::P12,
        ParamName::P11,
        ParamName::F,
        ParamName::G,
        ParamName::P,
        ParamName::Q,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::Q12 => "q12",
            ParamName::Q11 => "q11",
            ParamName::P12 => "p12",
            ParamName::P11 => "p11",
            ParamName::F => "f",
            ParamName::G => "g",
            ParamName::P => "p",
            ParamName::Q => "q",
        }
    }

    pub fn parse(s: &str) -> Option<ParamName> {
        ParamName::ALL.iter().copied().find(|p| p.as_str() == s)
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Exponent vector over the parameter registry.
///
/// Ordered by degree first, then lexicographically with earlier registry names
/// more significant (deglex). The maximum of a polynomial's support under this
/// order is its leading monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mono(pub [u16; NUM_PARAMS]);

impl Mono {
    pub fn one() -> Mono {
        Mono([0; NUM_PARAMS])
    }

    pub fn param(name: ParamName) -> Mono {
        let mut e = [0u16; NUM_PARAMS];
        e[name.index()] = 1;
        Mono(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut e = [0u16; NUM_PARAMS];
        for (i, slot) in e.iter_mut().enumerate() {
            *slot = self.0[i]
                .checked_add(other.0[i])
                .expect("monomial exponent overflow");
        }
        Mono(e)
    }

    /// Exact division; `None` when some exponent of `other` exceeds ours.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        let mut e = [0u16; NUM_PARAMS];
        for (i, slot) in e.iter_mut().enumerate() {
            *slot = self.0[i].checked_sub(other.0[i])?;
        }
        Some(Mono(e))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A monic minimal polynomial for one parameter.
///
/// Degree 2 reads `name^2 = lin1 * name + lin0`, degree 1 reads `name = lin0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalPoly {
    pub degree: u8,
    pub lin1: BigRational,
    pub lin0: BigRational,
}

impl MinimalPoly {
    /// `name^2 = c1 * name + c0`; rejects reducible polynomials.
    pub fn quadratic(c1: BigRational, c0: BigRational) -> Result<MinimalPoly, ArithError> {
        // x^2 - c1 x - c0 is reducible over Q iff c1^2 + 4 c0 is a rational square.
        let disc = &c1 * &c1 + BigRational::from_integer(BigInt::from(4)) * &c0;
        if rational_is_square(&disc) {
            return Err(ArithError::ReducibleConstraint);
        }
        Ok(MinimalPoly {
            degree: 2,
            lin1: c1,
            lin0: c0,
        })
    }

    /// `name = c0` (direct substitution).
    pub fn linear(c0: BigRational) -> MinimalPoly {
        MinimalPoly {
            degree: 1,
            lin1: BigRational::zero(),
            lin0: c0,
        }
    }

    /// Whether a rational value satisfies the polynomial.
    pub fn is_satisfied_by(&self, v: &BigRational) -> bool {
        if self.degree == 1 {
            v == &self.lin0
        } else {
            v * v == &self.lin1 * v + &self.lin0
        }
    }
}

fn rational_is_square(r: &BigRational) -> bool {
    if r.is_negative() {
        return false;
    }
    let (n, d) = (r.numer(), r.denom());
    n.sqrt().pow(2u32) == *n && d.sqrt().pow(2u32) == *d
}

/// Per-parameter minimal-polynomial constraints.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    rules: BTreeMap<ParamName, MinimalPoly>,
}

impl ConstraintSet {
    pub fn empty() -> ConstraintSet {
        ConstraintSet::default()
    }

    pub fn with(mut self, name: ParamName, mp: MinimalPoly) -> ConstraintSet {
        self.rules.insert(name, mp);
        self
    }

    pub fn insert(&mut self, name: ParamName, mp: MinimalPoly) {
        self.rules.insert(name, mp);
    }

    pub fn remove(&mut self, name: ParamName) -> Option<MinimalPoly> {
        self.rules.remove(&name)
    }

    pub fn get(&self, name: ParamName) -> Option<&MinimalPoly> {
        self.rules.get(&name)
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ParamName, &MinimalPoly)> {
        self.rules.iter()
    }

    /// Merge another set, later entries overriding.
    pub fn merged(&self, other: &ConstraintSet) -> ConstraintSet {
        let mut rules = self.rules.clone();
        for (k, v) in &other.rules {
            rules.insert(*k, v.clone());
        }
        ConstraintSet { rules }
    }
}

/// Errors from scalar arithmetic and specialization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArithError {
    DivisionByZero,
    ConstraintViolated(ParamName),
    DenominatorVanishes,
    ReducibleConstraint,
}

impl fmt::Display for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::DivisionByZero => write!(f, "division by zero"),
            ArithError::ConstraintViolated(p) => {
                write!(f, "assignment violates the constraint on {p}")
            }
            ArithError::DenominatorVanishes => write!(f, "denominator vanishes at the assignment"),
            ArithError::ReducibleConstraint => {
                write!(f, "minimal polynomial is reducible over the rationals")
            }
        }
    }
}

/// Sparse polynomial over the parameter registry with exact rational
/// coefficients. No zero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, BigRational>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::one(), c);
        }
        Poly { terms }
    }

    pub fn param(name: ParamName) -> Poly {
        Poly::term(Mono::param(name), BigRational::one())
    }

    pub fn term(m: Mono, c: BigRational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Mono::one())
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&Mono::one()))
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.is_zero() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            self.terms.get(&Mono::one()).cloned()
        } else {
            None
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &BigRational)> {
        self.terms.iter()
    }

    fn insert_add(&mut self, m: Mono, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_add(*m, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    /// Raw product; exponents are not reduced here.
    pub fn mul_raw(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_add(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn mul(&self, other: &Poly, cs: &ConstraintSet) -> Poly {
        self.mul_raw(other).reduced(cs)
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (*m, k * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32, cs: &ConstraintSet) -> Poly {
        let mut out = Poly::one();
        for _ in 0..n {
            out = out.mul(self, cs);
        }
        out
    }

    /// Reduce every constrained exponent below the degree of its minimal
    /// polynomial. The result equals the input in the quotient ring.
    pub fn reduced(&self, cs: &ConstraintSet) -> Poly {
        if cs.is_empty() {
            return self.clone();
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (rm, rp) = reduce_mono(m, cs);
            match rp {
                None => out.insert_add(rm, c.clone()),
                Some(p) => {
                    for (m2, c2) in &p.terms {
                        out.insert_add(rm.mul(m2), c * c2);
                    }
                }
            }
        }
        out
    }

    pub fn leading(&self) -> Option<(&Mono, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn max_exponent(&self, name: ParamName) -> u16 {
        self.terms
            .keys()
            .map(|m| m.0[name.index()])
            .max()
            .unwrap_or(0)
    }

    pub fn contains_param(&self, name: ParamName) -> bool {
        self.max_exponent(name) > 0
    }

    pub fn params_present(&self) -> Vec<ParamName> {
        ParamName::ALL
            .iter()
            .copied()
            .filter(|p| self.contains_param(*p))
            .collect()
    }

    fn contains_constrained(&self, cs: &ConstraintSet) -> bool {
        cs.iter().any(|(p, _)| self.contains_param(*p))
    }

    /// Rational content: gcd of numerators over lcm of denominators, with the
    /// sign of the leading coefficient.
    pub fn content(&self) -> BigRational {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        if num_gcd.is_zero() {
            return BigRational::zero();
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        if let Some((_, lc)) = self.leading() {
            if lc.is_negative() {
                content = -content;
            }
        }
        content
    }

    /// Substitute rational values for some parameters.
    pub fn substitute(&self, assignment: &BTreeMap<ParamName, BigRational>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut e = m.0;
            for (name, v) in assignment {
                let k = e[name.index()];
                if k > 0 {
                    let mut vp = BigRational::one();
                    for _ in 0..k {
                        vp *= v;
                    }
                    coeff *= vp;
                    e[name.index()] = 0;
                }
            }
            out.insert_add(Mono(e), coeff);
        }
        out
    }

    /// Decompose as a polynomial in the constrained parameters: maps each
    /// constrained-exponent pattern to its coefficient, a polynomial in free
    /// parameters only.
    fn split_constrained(&self, cs: &ConstraintSet) -> BTreeMap<Mono, Poly> {
        let mut out: BTreeMap<Mono, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut theta = [0u16; NUM_PARAMS];
            let mut free = m.0;
            for (name, _) in cs.iter() {
                let i = name.index();
                theta[i] = free[i];
                free[i] = 0;
            }
            out.entry(Mono(theta))
                .or_default()
                .insert_add(Mono(free), c.clone());
        }
        out
    }
}

/// Reduce a single monomial: returns the free residual monomial and, when a
/// constrained parameter had excess exponent, the replacement polynomial for
/// the excess part.
fn reduce_mono(m: &Mono, cs: &ConstraintSet) -> (Mono, Option<Poly>) {
    let mut residual = *m;
    let mut replacement: Option<Poly> = None;
    for (name, mp) in cs.iter() {
        let i = name.index();
        let e = residual.0[i];
        if mp.degree == 1 {
            if e == 0 {
                continue;
            }
            residual.0[i] = 0;
            let mut v = BigRational::one();
            for _ in 0..e {
                v *= &mp.lin0;
            }
            let factor = Poly::constant(v);
            replacement = Some(match replacement {
                None => factor,
                Some(r) => r.mul_raw(&factor),
            });
        } else if e >= 2 {
            residual.0[i] = 0;
            // theta^e = a_e * theta + b_e via the linear recurrence
            // a_{k+1} = c1 a_k + b_k, b_{k+1} = c0 a_k starting at theta^1.
            let mut a = BigRational::one();
            let mut b = BigRational::zero();
            for _ in 1..e {
                let na = &mp.lin1 * &a + &b;
                let nb = &mp.lin0 * &a;
                a = na;
                b = nb;
            }
            let mut factor = Poly::zero();
            factor.insert_add(Mono::param(*name), a);
            factor.insert_add(Mono::one(), b);
            replacement = Some(match replacement {
                None => factor,
                Some(r) => r.mul_raw(&factor),
            });
        }
    }
    // Replacement factors carry each constrained parameter to exponent at
    // most 1, so a single pass suffices.
    (residual, replacement)
}

/// Reduce a polynomial modulo the active constraints (spec operation).
pub fn reduce_poly(poly: &Poly, cs: &ConstraintSet) -> Poly {
    poly.reduced(cs)
}

// ----- polynomial gcd over the free parameters -----
//
// Primitive pseudo-remainder sequences, recursing on the highest registry
// variable present. Inputs must be free of constrained parameters.

fn poly_degree_in(p: &Poly, name: ParamName) -> u16 {
    p.max_exponent(name)
}

/// Coefficient of `name^k` in `p`, as a polynomial in the other variables.
fn poly_coeff_in(p: &Poly, name: ParamName, k: u16) -> Poly {
    let i = name.index();
    let mut out = Poly::zero();
    for (m, c) in &p.terms {
        if m.0[i] == k {
            let mut e = m.0;
            e[i] = 0;
            out.insert_add(Mono(e), c.clone());
        }
    }
    out
}

fn poly_mul_var_pow(p: &Poly, name: ParamName, k: u16) -> Poly {
    let i = name.index();
    Poly {
        terms: p
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.0;
                e[i] += k;
                (Mono(e), c.clone())
            })
            .collect(),
    }
}

/// Exact multivariate division: `a / b` when it divides exactly, else `None`.
pub fn poly_div_exact(a: &Poly, b: &Poly) -> Option<Poly> {
    if b.is_zero() {
        return None;
    }
    let mut rem = a.clone();
    let mut quot = Poly::zero();
    let (bm, bc) = {
        let (m, c) = b.leading()?;
        (*m, c.clone())
    };
    while !rem.is_zero() {
        let (rm, rc) = {
            let (m, c) = rem.leading().unwrap();
            (*m, c.clone())
        };
        let qm = rm.div(&bm)?;
        let qc = rc / &bc;
        let mut t = Poly::zero();
        t.insert_add(qm, qc);
        rem = rem.sub(&t.mul_raw(b));
        quot = quot.add(&t);
    }
    Some(quot)
}

fn poly_primitive(p: &Poly) -> Poly {
    let c = p.content();
    if c.is_zero() || c.is_one() {
        return p.clone();
    }
    p.scale(&c.recip())
}

/// Gcd of two polynomials in the free parameters, returned primitive with a
/// positive leading coefficient. gcd(0, a) = primitive(a).
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return poly_primitive(b);
    }
    if b.is_zero() {
        return poly_primitive(a);
    }
    let mut vars: Vec<ParamName> = ParamName::ALL
        .iter()
        .copied()
        .filter(|v| a.contains_param(*v) || b.contains_param(*v))
        .collect();
    match vars.pop() {
        None => Poly::one(),
        Some(v) => {
            let ca = poly_content_in(a, v);
            let cb = poly_content_in(b, v);
            let cont = poly_gcd(&ca, &cb);
            let pa = poly_div_exact(a, &ca).expect("content divides");
            let pb = poly_div_exact(b, &cb).expect("content divides");
            let pp = primitive_prs(&pa, &pb, v);
            poly_primitive(&cont.mul_raw(&pp))
        }
    }
}

/// Content with respect to one variable: gcd of the coefficient polynomials.
fn poly_content_in(p: &Poly, v: ParamName) -> Poly {
    let d = poly_degree_in(p, v);
    let mut g = Poly::zero();
    for k in 0..=d {
        let c = poly_coeff_in(p, v, k);
        if !c.is_zero() {
            g = poly_gcd(&g, &c);
        }
    }
    g
}

fn primitive_part_in(p: &Poly, v: ParamName) -> Poly {
    let c = poly_content_in(p, v);
    poly_div_exact(p, &c).expect("content divides")
}

fn primitive_prs(a: &Poly, b: &Poly, v: ParamName) -> Poly {
    let mut f = a.clone();
    let mut g = b.clone();
    if poly_degree_in(&f, v) < poly_degree_in(&g, v) {
        core::mem::swap(&mut f, &mut g);
    }
    loop {
        if g.is_zero() {
            return primitive_part_in(&f, v);
        }
        let r = pseudo_rem(&f, &g, v);
        f = g;
        g = if r.is_zero() {
            Poly::zero()
        } else {
            primitive_part_in(&r, v)
        };
    }
}

/// Pseudo-remainder of `a` by `b` in the variable `v`:
/// `lc(b)^(da-db+1) * a = q*b + r` with `deg_v r < deg_v b`.
fn pseudo_rem(a: &Poly, b: &Poly, v: ParamName) -> Poly {
    let db = poly_degree_in(b, v);
    let lb = poly_coeff_in(b, v, db);
    let mut r = a.clone();
    loop {
        let dr = poly_degree_in(&r, v);
        if r.is_zero() || dr < db {
            return r;
        }
        let lr = poly_coeff_in(&r, v, dr);
        // r <- lb * r - lr * v^(dr-db) * b
        let t = poly_mul_var_pow(&lr.mul_raw(b), v, dr - db);
        r = r.mul_raw(&lb).sub(&t);
    }
}

// ----- scalars -----

/// An exact element of the constrained parameter field: a canonical fraction
/// of reduced polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Scalar {
        Scalar {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn from_integer(n: i64) -> Scalar {
        Scalar::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(r: BigRational) -> Scalar {
        Scalar {
            num: Poly::constant(r),
            den: Poly::one(),
        }
    }

    pub fn param(name: ParamName) -> Scalar {
        Scalar {
            num: Poly::param(name),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly, cs: &ConstraintSet) -> Scalar {
        Scalar {
            num: p.reduced(cs),
            den: Poly::one(),
        }
        .canonical(cs)
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if !self.den.is_one() {
            return None;
        }
        self.num.as_constant()
    }

    pub fn params_present(&self) -> Vec<ParamName> {
        let mut v = self.num.params_present();
        for p in self.den.params_present() {
            if !v.contains(&p) {
                v.push(p);
            }
        }
        v
    }

    fn canonical(mut self, cs: &ConstraintSet) -> Scalar {
        if self.num.is_zero() {
            return Scalar::zero();
        }
        debug_assert!(
            !self.den.contains_constrained(cs),
            "denominator must be free of constrained parameters"
        );
        // Cancel the polynomial gcd of all free-parameter coefficient blocks
        // of the numerator against the denominator.
        if !self.den.is_constant() {
            let mut g = self.den.clone();
            for coeff in self.num.split_constrained(cs).values() {
                g = poly_gcd(&g, coeff);
                if g.is_constant() {
                    break;
                }
            }
            if !g.is_constant() {
                self.num = poly_div_exact(&self.num, &g).expect("gcd divides numerator");
                self.den = poly_div_exact(&self.den, &g).expect("gcd divides denominator");
            }
        }
        // Normalize the denominator to integer content 1 with positive leading
        // coefficient; fold the adjustment into the numerator.
        let c = self.den.content();
        if !c.is_one() {
            self.den = self.den.scale(&c.recip());
            self.num = self.num.scale(&c.recip());
        }
        self
    }

    pub fn add(&self, other: &Scalar, cs: &ConstraintSet) -> Scalar {
        let num = self
            .num
            .mul(&other.den, cs)
            .add(&other.num.mul(&self.den, cs));
        let den = self.den.mul_raw(&other.den);
        Scalar { num, den }.canonical(cs)
    }

    pub fn sub(&self, other: &Scalar, cs: &ConstraintSet) -> Scalar {
        self.add(&other.neg(), cs)
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Scalar, cs: &ConstraintSet) -> Scalar {
        let num = self.num.mul(&other.num, cs);
        let den = self.den.mul_raw(&other.den);
        Scalar { num, den }.canonical(cs)
    }

    pub fn mul_rational(&self, r: &BigRational) -> Scalar {
        if r.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            num: self.num.scale(r),
            den: self.den.clone(),
        }
    }

    pub fn div(&self, other: &Scalar, cs: &ConstraintSet) -> Result<Scalar, ArithError> {
        if other.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let mut num = self.num.mul(&other.den, cs);
        let mut den = self.den.mul(&other.num, cs);
        // Rationalize: eliminate constrained parameters from the denominator
        // by conjugate multiplication, one parameter at a time.
        for (name, mp) in cs.iter() {
            if !den.contains_param(*name) {
                continue;
            }
            debug_assert_eq!(mp.degree, 2, "degree-1 constraints are substituted away");
            let a = poly_coeff_in(&den, *name, 0);
            let b = poly_coeff_in(&den, *name, 1);
            // conjugate = a + c1*b - b*theta ; den * conjugate = a^2 + c1*a*b - c0*b^2
            let conj = a
                .add(&b.scale(&mp.lin1))
                .sub(&poly_mul_var_pow(&b, *name, 1));
            num = num.mul(&conj, cs);
            den = a
                .mul_raw(&a)
                .add(&a.mul_raw(&b).scale(&mp.lin1))
                .sub(&b.mul_raw(&b).scale(&mp.lin0));
            den = den.reduced(cs);
        }
        if den.is_zero() {
            // The divisor is a zero divisor in the quotient ring.
            return Err(ArithError::DivisionByZero);
        }
        Ok(Scalar { num, den }.canonical(cs))
    }

    pub fn inv(&self, cs: &ConstraintSet) -> Result<Scalar, ArithError> {
        Scalar::one().div(self, cs)
    }

    pub fn pow(&self, n: u32, cs: &ConstraintSet) -> Scalar {
        let mut out = Scalar::one();
        for _ in 0..n {
            out = out.mul(self, cs);
        }
        out
    }

    /// Equality in the quotient field: `a - b` normalizes to zero.
    pub fn eq_scalar(&self, other: &Scalar, cs: &ConstraintSet) -> bool {
        if self == other {
            return true;
        }
        self.sub(other, cs).is_zero()
    }

    /// Substitute exact rational values for parameters. Assigned parameters
    /// must be unconstrained or satisfy their minimal polynomial.
    pub fn specialize(
        &self,
        assignment: &BTreeMap<ParamName, BigRational>,
        cs: &ConstraintSet,
    ) -> Result<Scalar, ArithError> {
        for (name, v) in assignment {
            if let Some(mp) = cs.get(*name) {
                if !mp.is_satisfied_by(v) {
                    return Err(ArithError::ConstraintViolated(*name));
                }
            }
        }
        let num = self.num.substitute(assignment).reduced(cs);
        let den = self.den.substitute(assignment).reduced(cs);
        if den.is_zero() {
            return Err(ArithError::DenominatorVanishes);
        }
        Ok(Scalar { num, den }.canonical(cs))
    }

    /// Render in canonical text form: numerator polynomial, and `/(den)` when
    /// the denominator is not 1.
    pub fn render(&self) -> String {
        if self.den.is_one() {
            render_poly(&self.num)
        } else {
            let mut s = String::new();
            s.push('(');
            s.push_str(&render_poly(&self.num));
            s.push_str(")/(");
            s.push_str(&render_poly(&self.den));
            s.push(')');
            s
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn render_rational(r: &BigRational) -> String {
    use alloc::format;
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn render_mono(m: &Mono) -> String {
    use alloc::format;
    let mut parts: Vec<String> = Vec::new();
    for name in ParamName::ALL {
        let e = m.0[name.index()];
        if e == 1 {
            parts.push(format!("{name}"));
        } else if e > 1 {
            parts.push(format!("{name}^{e}"));
        }
    }
    parts.join("*")
}

/// Render a polynomial with terms in descending order (leading term first).
pub fn render_poly(p: &Poly) -> String {
    if p.is_zero() {
        return String::from("0");
    }
    let mut s = String::new();
    for (i, (m, c)) in p.terms.iter().rev().enumerate() {
        let neg = c.is_negative();
        let abs = if neg { -c.clone() } else { c.clone() };
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else if neg {
            s.push_str(" - ");
        } else {
            s.push_str(" + ");
        }
        if m.is_one() {
            s.push_str(&render_rational(&abs));
        } else if abs.is_one() {
            s.push_str(&render_mono(m));
        } else {
            s.push_str(&render_rational(&abs));
            s.push('*');
            s.push_str(&render_mono(m));
        }
    }
    s
}

/// The q-integer `[m]_q = 1 + q + ... + q^(m-1)`, with `[0]_q = 0`.
pub fn q_integer(m: u32, q: &Scalar, cs: &ConstraintSet) -> Scalar {
    let mut out = Scalar::zero();
    for j in 0..m {
        out = out.add(&q.pow(j, cs), cs);
    }
    out
}

/// The q-factorial `[m]_q! = [1]_q [2]_q ... [m]_q`, with `[0]_q! = 1`.
pub fn q_factorial(m: u32, q: &Scalar, cs: &ConstraintSet) -> Scalar {
    let mut out = Scalar::one();
    for j in 1..=m {
        out = out.mul(&q_integer(j, q, cs), cs);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn cs_p_sq_minus_one() -> ConstraintSet {
        // p^2 = -1
        ConstraintSet::empty().with(
            ParamName::P,
            MinimalPoly::quadratic(rat(0, 1), rat(-1, 1)).unwrap(),
        )
    }

    fn cs_p_primitive_cube() -> ConstraintSet {
        // p^2 = -p - 1
        ConstraintSet::empty().with(
            ParamName::P,
            MinimalPoly::quadratic(rat(-1, 1), rat(-1, 1)).unwrap(),
        )
    }

    #[test]
    fn reduce_cube_with_p_sq_minus_one() {
        // p^3 = -p
        let cs = cs_p_sq_minus_one();
        let p3 = Poly::param(ParamName::P).pow(3, &ConstraintSet::empty());
        let reduced = reduce_poly(&p3, &cs);
        assert_eq!(reduced, Poly::param(ParamName::P).neg());
    }

    #[test]
    fn reduce_square_with_cube_root_constraint() {
        // p^2 -> -p - 1
        let cs = cs_p_primitive_cube();
        let p2 = Poly::param(ParamName::P).mul_raw(&Poly::param(ParamName::P));
        let reduced = reduce_poly(&p2, &cs);
        let expected = Poly::param(ParamName::P).neg().add(&Poly::constant(rat(-1, 1)));
        assert_eq!(reduced, expected);
    }

    #[test]
    fn reduce_no_constraints_is_identity() {
        let q12_sq = Poly::param(ParamName::Q12).pow(2, &ConstraintSet::empty());
        assert_eq!(reduce_poly(&q12_sq, &ConstraintSet::empty()), q12_sq);
    }

    #[test]
    fn reduce_is_idempotent() {
        let cs = cs_p_primitive_cube();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = random_poly(&mut rng);
            let once = reduce_poly(&p, &cs);
            assert_eq!(reduce_poly(&once, &cs), once);
        }
    }

    #[test]
    fn square_of_one_minus_f() {
        let cs = ConstraintSet::empty();
        let one_minus_f = Scalar::one().sub(&Scalar::param(ParamName::F), &cs);
        let sq = one_minus_f.mul(&one_minus_f, &cs);
        // 1 - 2f + f^2
        let expected = Scalar::one()
            .sub(&Scalar::param(ParamName::F).mul_rational(&rat(2, 1)), &cs)
            .add(&Scalar::param(ParamName::F).pow(2, &cs), &cs);
        assert_eq!(sq, expected);
        assert!(!sq.eq_scalar(&Scalar::one(), &cs));
    }

    #[test]
    fn p_times_p_is_minus_one() {
        let cs = cs_p_sq_minus_one();
        let p = Scalar::param(ParamName::P);
        assert_eq!(p.mul(&p, &cs), Scalar::from_integer(-1));
    }

    #[test]
    fn inverse_of_one_plus_p_under_cube_constraint() {
        // 1 / (1 + p) = -p since (1+p)(-p) = -p - p^2 = -p + p + 1 = 1.
        let cs = cs_p_primitive_cube();
        let one_plus_p = Scalar::one().add(&Scalar::param(ParamName::P), &cs);
        let inv = one_plus_p.inv(&cs).unwrap();
        assert_eq!(inv, Scalar::param(ParamName::P).neg());
        assert!(inv.mul(&one_plus_p, &cs).is_one());
    }

    #[test]
    fn division_by_zero_reported() {
        let cs = ConstraintSet::empty();
        assert_eq!(
            Scalar::one().div(&Scalar::zero(), &cs),
            Err(ArithError::DivisionByZero)
        );
    }

    #[test]
    fn f_over_f_is_one() {
        let cs = ConstraintSet::empty();
        let f = Scalar::param(ParamName::F);
        assert!(f.div(&f, &cs).unwrap().is_one());
    }

    #[test]
    fn specialize_examples() {
        let cs = ConstraintSet::empty();
        // p -> 1 in -p
        let minus_p = Scalar::param(ParamName::P).neg();
        let mut a = BTreeMap::new();
        a.insert(ParamName::P, rat(1, 1));
        assert_eq!(
            minus_p.specialize(&a, &cs).unwrap(),
            Scalar::from_integer(-1)
        );
        // f -> 2 in (1 - f)
        let one_minus_f = Scalar::one().sub(&Scalar::param(ParamName::F), &cs);
        let mut b = BTreeMap::new();
        b.insert(ParamName::F, rat(2, 1));
        assert_eq!(
            one_minus_f.specialize(&b, &cs).unwrap(),
            Scalar::from_integer(-1)
        );
        // f -> 2 in 1/(f - 2) vanishes
        let f_minus_2 = Scalar::param(ParamName::F).sub(&Scalar::from_integer(2), &cs);
        let inv = Scalar::one().div(&f_minus_2, &cs).unwrap();
        assert_eq!(
            inv.specialize(&b, &cs),
            Err(ArithError::DenominatorVanishes)
        );
    }

    #[test]
    fn specialize_rejects_constraint_violation() {
        let cs = cs_p_sq_minus_one();
        let p = Scalar::param(ParamName::P);
        let mut a = BTreeMap::new();
        a.insert(ParamName::P, rat(1, 1));
        assert_eq!(
            p.specialize(&a, &cs),
            Err(ArithError::ConstraintViolated(ParamName::P))
        );
    }

    #[test]
    fn q_integer_and_factorial() {
        let cs = ConstraintSet::empty();
        let q = Scalar::param(ParamName::Q);
        // [3]_q = 1 + q + q^2
        let expected = Scalar::one()
            .add(&q, &cs)
            .add(&q.pow(2, &cs), &cs);
        assert_eq!(q_integer(3, &q, &cs), expected);
        assert!(q_factorial(0, &q, &cs).is_one());
        assert_eq!(q_integer(0, &q, &cs), Scalar::zero());
        // [4]_q at q = 2 is 15
        let mut a = BTreeMap::new();
        a.insert(ParamName::Q, rat(2, 1));
        assert_eq!(
            q_integer(4, &q, &cs).specialize(&a, &cs).unwrap(),
            Scalar::from_integer(15)
        );
    }

    #[test]
    fn q_factorial_recurrence() {
        let cs = ConstraintSet::empty();
        let q = Scalar::param(ParamName::Q);
        for m in 1..=10u32 {
            let lhs = q_factorial(m, &q, &cs);
            let rhs = q_factorial(m - 1, &q, &cs).mul(&q_integer(m, &q, &cs), &cs);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn reducible_constraint_rejected() {
        // p^2 = 1 factors as (p-1)(p+1)
        assert_eq!(
            MinimalPoly::quadratic(rat(0, 1), rat(1, 1)),
            Err(ArithError::ReducibleConstraint)
        );
    }

    #[test]
    fn gcd_cancellation_in_fractions() {
        let cs = ConstraintSet::empty();
        let f = Scalar::param(ParamName::F);
        // (f^2 - 1) / (f - 1) = f + 1
        let num = f.pow(2, &cs).sub(&Scalar::one(), &cs);
        let den = f.sub(&Scalar::one(), &cs);
        let q = num.div(&den, &cs).unwrap();
        assert_eq!(q, f.add(&Scalar::one(), &cs));
    }

    fn random_scalar(rng: &mut impl Rng) -> Scalar {
        Scalar::from_poly(random_poly(rng), &ConstraintSet::empty())
    }

    fn random_poly(rng: &mut impl Rng) -> Poly {
        let mut p = Poly::zero();
        for _ in 0..rng.gen_range(1..4) {
            let mut e = [0u16; NUM_PARAMS];
            for slot in e.iter_mut() {
                if rng.gen_bool(0.3) {
                    *slot = rng.gen_range(0..3);
                }
            }
            p.insert_add(Mono(e), rat(rng.gen_range(-4..5), rng.gen_range(1..4)));
        }
        p
    }

    #[test]
    fn ring_axioms_on_random_scalars() {
        let cs = cs_p_sq_minus_one();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..200 {
            let a = random_scalar(&mut rng);
            let b = random_scalar(&mut rng);
            let c = random_scalar(&mut rng);
            let ab_c = a.mul(&b, &cs).mul(&c, &cs);
            let a_bc = a.mul(&b.mul(&c, &cs), &cs);
            assert!(ab_c.eq_scalar(&a_bc, &cs));
            let lhs = a.mul(&b.add(&c, &cs), &cs);
            let rhs = a.mul(&b, &cs).add(&a.mul(&c, &cs), &cs);
            assert!(lhs.eq_scalar(&rhs, &cs));
            let assoc_add = a.add(&b, &cs).add(&c, &cs);
            let assoc_add2 = a.add(&b.add(&c, &cs), &cs);
            assert!(assoc_add.eq_scalar(&assoc_add2, &cs));
        }
    }

    #[test]
    fn specialize_is_multiplicative() {
        let cs = ConstraintSet::empty();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let a = random_scalar(&mut rng);
            let b = random_scalar(&mut rng);
            for seed in 0..3 {
                let mut assignment = BTreeMap::new();
                for name in ParamName::ALL {
                    assignment.insert(name, rat(rng.gen_range(1..7) + seed, 1));
                }
                let lhs = a.mul(&b, &cs).specialize(&assignment, &cs).unwrap();
                let rhs = a
                    .specialize(&assignment, &cs)
                    .unwrap()
                    .mul(&b.specialize(&assignment, &cs).unwrap(), &cs);
                assert!(lhs.eq_scalar(&rhs, &cs));
            }
        }
    }
}
