//! Degree-by-degree computation of centers: centrality linear systems over
//! the parameter field, exact kernel extraction, normality witnesses,
//! power-centrality, verification of claimed centers and central
//! subalgebras, and the cancellation report.
//!
//! Rewriting preserves the bidegree, so centrality is decided componentwise:
//! a generic element of one bidegree is central iff its coefficient vector
//! lies in the kernel of the linear system collecting, for each of the four
//! generators, the normal-form commutator coefficients.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::{enumerate_pbw, Bidegree, Element, Letter, PbwMonomial, Word};
use crate::family::{Cancellation, CenterClaim, FamilySpec, SpecializeError};
use crate::params::{poly_gcd, ConstraintSet, Mono, ParamName, Poly, Scalar, NUM_PARAMS};
use crate::rewrite::{nf_commutator, normal_form, RewriteError, RewriteSystem};

/// Result of checking one element against the four generators.
#[derive(Clone, Debug)]
pub struct CentralityReport {
    /// Nonzero commutators `(generator, NF([e, g]))`; empty means central.
    pub nonzero: Vec<(Letter, Element)>,
}

impl CentralityReport {
    pub fn is_central(&self) -> bool {
        self.nonzero.is_empty()
    }
}

/// Check centrality of an element by direct commutation with the generators.
pub fn is_central(
    e: &Element,
    sys: &RewriteSystem,
    max_steps: u32,
) -> Result<CentralityReport, RewriteError> {
    let mut nonzero = Vec::new();
    for g in Letter::ALL {
        let c = nf_commutator(e, &Element::letter(g), sys, max_steps)?;
        if !c.is_zero() {
            nonzero.push((g, c));
        }
    }
    Ok(CentralityReport { nonzero })
}

/// The linear system imposed by centrality of a generic element of one
/// bidegree. Columns are indexed by the PBW monomials of that bidegree, rows
/// by pairs (generator, normal monomial of the commutator).
#[derive(Clone, Debug)]
pub struct CentralitySystem {
    pub bidegree: Bidegree,
    pub cols: Vec<PbwMonomial>,
    pub rows: Vec<(Letter, Word)>,
    pub matrix: Vec<Vec<Scalar>>,
}

/// Assemble the centrality system at one bidegree.
pub fn centrality_system(
    sys: &RewriteSystem,
    bd: Bidegree,
    max_steps: u32,
) -> Result<CentralitySystem, RewriteError> {
    let cols = enumerate_pbw(bd);
    let mut per_col: Vec<Vec<(Letter, Element)>> = Vec::with_capacity(cols.len());
    for m in &cols {
        let e = Element::pbw(*m);
        let mut comms = Vec::with_capacity(4);
        for g in Letter::ALL {
            comms.push((g, nf_commutator(&e, &Element::letter(g), sys, max_steps)?));
        }
        per_col.push(comms);
    }
    let mut row_index: BTreeMap<(Letter, Word), usize> = BTreeMap::new();
    for col in &per_col {
        for (g, c) in col {
            for (w, _) in c.terms() {
                let key = (*g, w.clone());
                let next = row_index.len();
                row_index.entry(key).or_insert(next);
            }
        }
    }
    let rows: Vec<(Letter, Word)> = {
        let mut v: Vec<(&(Letter, Word), &usize)> = row_index.iter().collect();
        v.sort_by_key(|(_, i)| **i);
        v.into_iter().map(|(k, _)| k.clone()).collect()
    };
    let mut matrix = alloc::vec![alloc::vec![Scalar::zero(); cols.len()]; rows.len()];
    for (u, col) in per_col.iter().enumerate() {
        for (g, c) in col {
            for (w, coeff) in c.terms() {
                let r = row_index[&(*g, w.clone())];
                matrix[r][u] = coeff.clone();
            }
        }
    }
    Ok(CentralitySystem {
        bidegree: bd,
        cols,
        rows,
        matrix,
    })
}

/// Size heuristic for pivot selection: prefer entries with few terms.
fn scalar_size(s: &Scalar) -> usize {
    s.numerator().num_terms() + 4 * s.denominator().num_terms()
}

/// Exact kernel basis of a matrix over the parameter field.
///
/// Elimination picks the smallest available pivot; the returned vectors are
/// denominator-cleared, content-normalized and sign-normalized, so basis
/// coefficients are polynomials with content 1.
pub fn kernel_basis(matrix: &[Vec<Scalar>], ncols: usize, cs: &ConstraintSet) -> Vec<Vec<Scalar>> {
    let mut m: Vec<Vec<Scalar>> = matrix.to_vec();
    let nrows = m.len();
    let mut pivot_of_col: Vec<Option<usize>> = alloc::vec![None; ncols];
    let mut used_row = alloc::vec![false; nrows];
    for col in 0..ncols {
        let mut best: Option<(usize, usize)> = None;
        for (r, row) in m.iter().enumerate() {
            if used_row[r] || row[col].is_zero() {
                continue;
            }
            let size = scalar_size(&row[col]);
            if best.map(|(_, s)| size < s).unwrap_or(true) {
                best = Some((r, size));
            }
        }
        let Some((prow, _)) = best else { continue };
        used_row[prow] = true;
        pivot_of_col[col] = Some(prow);
        let pivot = m[prow][col].clone();
        for r in 0..nrows {
            if r == prow || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].div(&pivot, cs).expect("pivot is nonzero");
            for c in 0..ncols {
                let delta = factor.mul(&m[prow][c], cs);
                m[r][c] = m[r][c].sub(&delta, cs);
            }
        }
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = alloc::vec![Scalar::zero(); ncols];
        v[free] = Scalar::one();
        for (col, prow) in pivot_of_col.iter().enumerate() {
            let Some(prow) = prow else { continue };
            let coeff = &m[*prow][free];
            if coeff.is_zero() {
                continue;
            }
            let pivot = &m[*prow][col];
            v[col] = coeff.div(pivot, cs).expect("pivot is nonzero").neg();
        }
        normalize_vector(&mut v, cs);
        basis.push(v);
    }
    basis
}

/// Clear denominators, divide by the polynomial content and normalize the
/// sign of the first nonzero entry's leading coefficient.
fn normalize_vector(v: &mut [Scalar], cs: &ConstraintSet) {
    loop {
        let Some(den) = v
            .iter()
            .find(|s| !s.denominator().is_one())
            .map(|s| s.denominator().clone())
        else {
            break;
        };
        let factor = Scalar::from_poly(den, cs);
        for e in v.iter_mut() {
            *e = e.mul(&factor, cs);
        }
    }
    // polynomial content over the free parameters
    let mut g = Poly::zero();
    for e in v.iter() {
        if e.is_zero() {
            continue;
        }
        for block in split_free_blocks(e.numerator(), cs) {
            g = poly_gcd(&g, &block);
        }
    }
    if !g.is_zero() && !g.is_constant() {
        let factor = Scalar::from_poly(g, cs);
        for e in v.iter_mut() {
            *e = e.div(&factor, cs).expect("content divides");
        }
    }
    // rational content
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    for e in v.iter() {
        for (_, c) in e.numerator().terms() {
            num_gcd = num_integer::Integer::gcd(&num_gcd, c.numer());
            den_lcm = num_integer::Integer::lcm(&den_lcm, c.denom());
        }
    }
    if !num_gcd.is_zero() {
        let mut content = BigRational::new(num_gcd, den_lcm);
        if let Some(first) = v.iter().find(|e| !e.is_zero()) {
            if let Some((_, lc)) = first.numerator().leading() {
                if lc.is_negative() {
                    content = -content;
                }
            }
        }
        if !content.is_one() {
            let inv = content.recip();
            for e in v.iter_mut() {
                *e = e.mul_rational(&inv);
            }
        }
    }
}

/// Split a polynomial into its coefficient blocks over the constrained
/// parameters; each block is free of constrained parameters.
fn split_free_blocks(p: &Poly, cs: &ConstraintSet) -> Vec<Poly> {
    let constrained: Vec<ParamName> = cs.iter().map(|(n, _)| *n).collect();
    if constrained.is_empty() {
        return alloc::vec![p.clone()];
    }
    let mut blocks: BTreeMap<Mono, Poly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut theta = [0u16; NUM_PARAMS];
        let mut free = m.0;
        for name in &constrained {
            let i = name.index();
            theta[i] = free[i];
            free[i] = 0;
        }
        let entry = blocks.entry(Mono(theta)).or_default();
        *entry = entry.add(&Poly::term(Mono(free), c.clone()));
    }
    blocks.into_values().collect()
}

/// The kernel of the centrality system at one bidegree, as elements.
/// Every returned element is rechecked by direct commutation.
pub fn center_bidegree(
    sys: &RewriteSystem,
    bd: Bidegree,
    max_steps: u32,
) -> Result<Vec<Element>, RewriteError> {
    let system = centrality_system(sys, bd, max_steps)?;
    let cs = sys.constraints();
    let basis = kernel_basis(&system.matrix, system.cols.len(), cs);
    let mut out = Vec::with_capacity(basis.len());
    for v in basis {
        let mut e = Element::zero();
        for (m, c) in system.cols.iter().zip(v) {
            e.insert_add(m.to_word(), c, cs);
        }
        let recheck = is_central(&e, sys, max_steps)?;
        debug_assert!(recheck.is_central(), "kernel element failed recheck");
        if recheck.is_central() {
            out.push(e);
        }
    }
    Ok(out)
}

/// One scanned bidegree with its kernel basis.
#[derive(Clone, Debug)]
pub struct ScanEntry {
    pub bidegree: Bidegree,
    pub basis: Vec<Element>,
    /// Whether the whole kernel lies in the span of products of central
    /// elements found at strictly smaller bidegrees.
    pub explained_by_products: bool,
}

/// Scan report: kernel bases for every bidegree within the bound.
#[derive(Clone, Debug)]
pub struct CenterReport {
    pub bound: Bidegree,
    pub assumptions: Vec<String>,
    pub entries: Vec<ScanEntry>,
}

impl CenterReport {
    /// Whether every nonconstant bidegree has a trivial kernel.
    pub fn only_constants(&self) -> bool {
        self.entries.iter().all(|e| e.basis.is_empty())
    }

    /// All central elements found, with their bidegrees.
    pub fn found(&self) -> Vec<(Bidegree, Element)> {
        let mut out = Vec::new();
        for e in &self.entries {
            for b in &e.basis {
                out.push((e.bidegree, b.clone()));
            }
        }
        out
    }
}

/// Scan all bidegrees `(i, j) <= bound` componentwise (excluding `(0,0)`),
/// lowest total degree first.
pub fn center_scan(
    sys: &RewriteSystem,
    bound: Bidegree,
    max_steps: u32,
) -> Result<CenterReport, RewriteError> {
    let mut bds: Vec<Bidegree> = Vec::new();
    for i in 0..=bound.x {
        for j in 0..=bound.y {
            if i + j > 0 {
                bds.push(Bidegree::new(i, j));
            }
        }
    }
    bds.sort_by_key(|b| (b.total(), b.x));
    let cs = sys.constraints();
    let mut entries = Vec::new();
    let mut pool: Vec<(Bidegree, Element)> = Vec::new();
    for bd in bds {
        let basis = center_bidegree(sys, bd, max_steps)?;
        let explained = if basis.is_empty() {
            true
        } else {
            let span = enumerate_products(&pool, bd, sys, max_steps)?;
            basis.iter().all(|b| in_span(&span, b, bd, cs))
        };
        for b in &basis {
            pool.push((bd, b.clone()));
        }
        entries.push(ScanEntry {
            bidegree: bd,
            basis,
            explained_by_products: explained,
        });
    }
    Ok(CenterReport {
        bound,
        assumptions: Vec::new(),
        entries,
    })
}

/// Normal forms of all products of pool elements with total bidegree exactly
/// `target`. Pool elements must be bihomogeneous.
pub fn enumerate_products(
    pool: &[(Bidegree, Element)],
    target: Bidegree,
    sys: &RewriteSystem,
    max_steps: u32,
) -> Result<Vec<Element>, RewriteError> {
    fn rec(
        pool: &[(Bidegree, Element)],
        idx: usize,
        remaining: Bidegree,
        acc: &Element,
        sys: &RewriteSystem,
        max_steps: u32,
        out: &mut Vec<Element>,
    ) -> Result<(), RewriteError> {
        if remaining.x == 0 && remaining.y == 0 {
            out.push(normal_form(acc, sys, max_steps)?);
            return Ok(());
        }
        if idx >= pool.len() {
            return Ok(());
        }
        let cs = sys.constraints();
        let (bd, e) = &pool[idx];
        rec(pool, idx + 1, remaining, acc, sys, max_steps, out)?;
        if bd.x == 0 && bd.y == 0 {
            return Ok(());
        }
        let mut cur = acc.clone();
        let mut rem = remaining;
        while bd.x <= rem.x && bd.y <= rem.y {
            cur = cur.mul(e, cs);
            rem = Bidegree::new(rem.x - bd.x, rem.y - bd.y);
            rec(pool, idx + 1, rem, &cur, sys, max_steps, out)?;
            if rem.x == 0 && rem.y == 0 {
                break;
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    rec(pool, 0, target, &Element::one(), sys, max_steps, &mut out)?;
    Ok(out)
}

/// Whether `target` lies in the linear span of `elements` at one bidegree.
/// All inputs must be in normal form.
pub fn in_span(elements: &[Element], target: &Element, bd: Bidegree, cs: &ConstraintSet) -> bool {
    let cols = enumerate_pbw(bd);
    let index: BTreeMap<Word, usize> = cols
        .iter()
        .enumerate()
        .map(|(i, m)| (m.to_word(), i))
        .collect();
    let to_vec = |e: &Element| -> Option<Vec<Scalar>> {
        let mut v = alloc::vec![Scalar::zero(); cols.len()];
        for (w, c) in e.terms() {
            let i = *index.get(w)?;
            v[i] = c.clone();
        }
        Some(v)
    };
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for e in elements {
        match to_vec(e) {
            Some(v) => rows.push(v),
            None => return false,
        }
    }
    let Some(t) = to_vec(target) else {
        return false;
    };
    let r0 = rank(&rows, cols.len(), cs);
    rows.push(t);
    rank(&rows, cols.len(), cs) == r0
}

/// Rank over the parameter field by plain elimination.
pub fn rank(matrix: &[Vec<Scalar>], ncols: usize, cs: &ConstraintSet) -> usize {
    let mut m: Vec<Vec<Scalar>> = matrix.to_vec();
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(prow) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, prow);
        let pivot = m[r][col].clone();
        for i in (r + 1)..m.len() {
            if m[i][col].is_zero() {
                continue;
            }
            let factor = m[i][col].div(&pivot, cs).expect("pivot nonzero");
            for c in col..ncols {
                let delta = factor.mul(&m[r][c], cs);
                m[i][c] = m[i][c].sub(&delta, cs);
            }
        }
        r += 1;
    }
    r
}

/// A normal-element certificate: `NF(g*w) = lambda_g * NF(w*g)` per generator.
#[derive(Clone, Debug)]
pub struct NormalityWitness {
    pub lambdas: Vec<(Letter, Scalar)>,
}

impl NormalityWitness {
    pub fn lambda(&self, g: Letter) -> &Scalar {
        &self
            .lambdas
            .iter()
            .find(|(l, _)| *l == g)
            .expect("all four generators present")
            .1
    }
}

/// Solve `NF(g*w) = lambda_g * NF(w*g)` coefficientwise; a witness exists iff
/// the ratio is consistent for all four generators.
pub fn check_normality(
    w: &Element,
    sys: &RewriteSystem,
    max_steps: u32,
) -> Result<Option<NormalityWitness>, RewriteError> {
    let cs = sys.constraints();
    let mut lambdas = Vec::with_capacity(4);
    for g in Letter::ALL {
        let ge = Element::letter(g);
        let a = normal_form(&ge.mul(w, cs), sys, max_steps)?;
        let b = normal_form(&w.mul(&ge, cs), sys, max_steps)?;
        if b.is_zero() {
            if a.is_zero() {
                lambdas.push((g, Scalar::one()));
                continue;
            }
            return Ok(None);
        }
        let (w0, b0) = b.terms().next().expect("b nonzero");
        let a0 = a.coeff(w0);
        let Ok(lambda) = a0.div(b0, cs) else {
            return Ok(None);
        };
        if !a.eq_element(&b.scalar_mul(&lambda, cs), cs) {
            return Ok(None);
        }
        lambdas.push((g, lambda));
    }
    Ok(Some(NormalityWitness { lambdas }))
}

/// Two-route power-centrality check: direct commutation of `w^n`, and the
/// normality route `lambda_g^n = 1`.
#[derive(Clone, Debug)]
pub struct PowerCentralReport {
    pub n: u32,
    pub direct_central: bool,
    pub offending: Vec<(Letter, Element)>,
    pub witness: Option<NormalityWitness>,
    /// `Some(true)` iff a witness exists and every `lambda_g^n = 1`.
    pub lambda_route: Option<bool>,
}

impl PowerCentralReport {
    /// The two routes must agree whenever both apply.
    pub fn consistent(&self) -> bool {
        self.lambda_route
            .map(|lr| lr == self.direct_central)
            .unwrap_or(true)
    }
}

pub fn verify_power_central(
    w: &Element,
    n: u32,
    sys: &RewriteSystem,
    max_steps: u32,
) -> Result<PowerCentralReport, RewriteError> {
    let cs = sys.constraints();
    let wn = normal_form(&w.pow(n, cs), sys, max_steps)?;
    let report = is_central(&wn, sys, max_steps)?;
    let witness = check_normality(w, sys, max_steps)?;
    let lambda_route = witness.as_ref().map(|wit| {
        wit.lambdas
            .iter()
            .all(|(_, l)| l.pow(n, cs).eq_scalar(&Scalar::one(), cs))
    });
    Ok(PowerCentralReport {
        n,
        direct_central: report.is_central(),
        offending: report.nonzero,
        witness,
        lambda_route,
    })
}

/// Per-generator outcome of a table claim.
#[derive(Clone, Debug)]
pub struct GeneratorCheck {
    pub rendered: String,
    pub central: bool,
    pub offending: Vec<(Letter, Element)>,
}

/// Per-relation outcome of a table claim.
#[derive(Clone, Debug)]
pub struct RelationCheck {
    pub rendered: String,
    pub holds: bool,
    pub residual: Element,
}

/// Scan-versus-span comparison at one bidegree.
#[derive(Clone, Debug)]
pub struct ScanComparison {
    pub bidegree: Bidegree,
    pub kernel_dim: usize,
    pub kernel_in_span: bool,
}

/// Outcome of verifying one table row.
#[derive(Clone, Debug)]
pub struct TableEntryReport {
    pub family: String,
    pub table: u8,
    pub desc: String,
    pub assumptions: Vec<String>,
    pub generators: Vec<GeneratorCheck>,
    pub relations: Vec<RelationCheck>,
    /// For exact-center claims: the scan bound and per-bidegree comparison.
    pub scan: Option<(Bidegree, Vec<ScanComparison>)>,
}

impl TableEntryReport {
    pub fn confirmed(&self) -> bool {
        self.generators.iter().all(|g| g.central)
            && self.relations.iter().all(|r| r.holds)
            && self
                .scan
                .as_ref()
                .map(|(_, cmps)| cmps.iter().all(|c| c.kernel_in_span))
                .unwrap_or(true)
    }

    /// The first offending commutator, for falsification messages.
    pub fn first_offense(&self) -> Option<(&str, Letter, &Element)> {
        self.generators.iter().find_map(|g| {
            g.offending
                .first()
                .map(|(l, e)| (g.rendered.as_str(), *l, e))
        })
    }
}

/// Errors from table verification.
#[derive(Clone, Debug)]
pub enum VerifyError {
    Specialize(SpecializeError),
    Rewrite(RewriteError),
}

impl core::fmt::Display for VerifyError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            VerifyError::Specialize(e) => write!(f, "{e}"),
            VerifyError::Rewrite(e) => write!(f, "{e}"),
        }
    }
}

impl From<RewriteError> for VerifyError {
    fn from(e: RewriteError) -> VerifyError {
        VerifyError::Rewrite(e)
    }
}

/// Verify one structured claim: every claimed generator must be central and
/// every claimed relation must vanish in normal form; exact-center claims
/// additionally scan up to the claim's bound and confirm the kernel is
/// spanned by products of the claimed generators.
pub fn verify_table_entry(
    fs: &FamilySpec,
    claim: &CenterClaim,
    default_bound: Bidegree,
    max_steps: u32,
) -> Result<TableEntryReport, VerifyError> {
    let assignment: BTreeMap<ParamName, BigRational> = claim.assignments.iter().cloned().collect();
    let sys = fs
        .specialized_system(&assignment, &claim.extra_constraints)
        .map_err(VerifyError::Specialize)?;
    let cs = sys.constraints();

    let mut generators = Vec::new();
    let mut spec_gens: Vec<Element> = Vec::new();
    for g in &claim.generators {
        let g = g
            .specialize(&assignment, cs)
            .map_err(|e| VerifyError::Specialize(SpecializeError::Arith(e)))?;
        let g = normal_form(&g, &sys, max_steps)?;
        let report = is_central(&g, &sys, max_steps)?;
        generators.push(GeneratorCheck {
            rendered: g.render(),
            central: report.is_central(),
            offending: report.nonzero,
        });
        spec_gens.push(g);
    }

    let mut relations = Vec::new();
    for r in &claim.relations {
        let r = r
            .specialize(&assignment, cs)
            .map_err(|e| VerifyError::Specialize(SpecializeError::Arith(e)))?;
        let residual = normal_form(&r, &sys, max_steps)?;
        relations.push(RelationCheck {
            rendered: r.render(),
            holds: residual.is_zero(),
            residual,
        });
    }

    let scan = if claim.table == 1 {
        let bound = claim.scan_bound.unwrap_or(default_bound);
        let homogeneous: Option<Vec<(Bidegree, Element)>> = spec_gens
            .iter()
            .map(|g| g.bidegree().map(|bd| (bd, g.clone())))
            .collect();
        let report = center_scan(&sys, bound, max_steps)?;
        let mut cmps = Vec::new();
        for entry in &report.entries {
            let ok = match &homogeneous {
                Some(pool) => {
                    if entry.basis.is_empty() {
                        true
                    } else {
                        let span = enumerate_products(pool, entry.bidegree, &sys, max_steps)?;
                        entry
                            .basis
                            .iter()
                            .all(|b| in_span(&span, b, entry.bidegree, cs))
                    }
                }
                // a non-bihomogeneous generator cannot span bihomogeneous
                // kernels; only an empty kernel passes
                None => entry.basis.is_empty(),
            };
            cmps.push(ScanComparison {
                bidegree: entry.bidegree,
                kernel_dim: entry.basis.len(),
                kernel_in_span: ok,
            });
        }
        Some((bound, cmps))
    } else {
        None
    };

    let mut assumptions = claim.assumptions.clone();
    if let Some((bound, _)) = &scan {
        use alloc::format;
        assumptions.push(format!("exactness certified up to bidegree {bound} only"));
    }

    Ok(TableEntryReport {
        family: fs.name(),
        table: claim.table,
        desc: claim.desc.clone(),
        assumptions,
        generators,
        relations,
        scan,
    })
}

/// Verdict of the cancellation report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CancellationVerdict {
    /// Trivial center up to the bound and the family qualifies.
    UniversallyCancellative { assumptions: Vec<String> },
    /// Central elements were found, or the family does not qualify.
    NoVerdict,
}

#[derive(Clone, Debug)]
pub struct CancellationReport {
    pub family: String,
    pub bound: Bidegree,
    pub verdict: CancellationVerdict,
    pub central_found: Vec<(Bidegree, Element)>,
}

/// Scan for central elements up to `bound`; when none exist and the family
/// qualifies for a trivial-center argument, report the cancellation verdict.
pub fn cancellation_report(
    fs: &FamilySpec,
    assignment: &BTreeMap<ParamName, BigRational>,
    bound: Bidegree,
    max_steps: u32,
) -> Result<CancellationReport, VerifyError> {
    let sys = fs
        .specialized_system(assignment, &ConstraintSet::empty())
        .map_err(VerifyError::Specialize)?;
    let scan = center_scan(&sys, bound, max_steps)?;
    let found = scan.found();
    let verdict = if found.is_empty() {
        match fs.cancellation {
            Cancellation::Unconditional => CancellationVerdict::UniversallyCancellative {
                assumptions: Vec::new(),
            },
            Cancellation::Generic => {
                let mut assumptions = fs.assumptions.clone();
                for g in &fs.generic {
                    use alloc::format;
                    assumptions.push(format!("{} is not a root of unity", g.render()));
                }
                CancellationVerdict::UniversallyCancellative { assumptions }
            }
            Cancellation::No => CancellationVerdict::NoVerdict,
        }
    } else {
        CancellationVerdict::NoVerdict
    };
    Ok(CancellationReport {
        family: fs.name(),
        bound,
        verdict,
        central_found: found,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::fixtures::{family_d_at, family_o};

    fn el(letters: &[Letter]) -> Element {
        Element::word(Word::from_letters(letters.to_vec()))
    }

    #[test]
    fn d_centrality_examples() {
        for p in [1i64, -1] {
            let sys = family_d_at(p).build_rewrite_system().unwrap();
            let cs = sys.constraints();
            let x1sq = el(&[Letter::X1, Letter::X1]);
            assert!(is_central(&x1sq, &sys, 1000).unwrap().is_central());
            // z = y2^2 + p y1^2
            let z = el(&[Letter::Y2, Letter::Y2]).add(
                &el(&[Letter::Y1, Letter::Y1]).scalar_mul(&Scalar::from_integer(p), cs),
                cs,
            );
            assert!(is_central(&z, &sys, 1000).unwrap().is_central());
            // x1 alone is not central; at p = 1 the witness is [x1, y1],
            // at p = -1 it is [x1, y2]
            let report = is_central(&Element::letter(Letter::X1), &sys, 1000).unwrap();
            assert!(!report.is_central());
            let witness = if p == 1 { Letter::Y1 } else { Letter::Y2 };
            assert!(report.nonzero.iter().any(|(g, _)| *g == witness));
        }
    }

    #[test]
    fn d_kernel_dimensions() {
        let sys = family_d_at(1).build_rewrite_system().unwrap();
        let cs = sys.constraints();
        // (0,2) kernel is one-dimensional, spanned by y1^2 + y2^2 at p = 1
        let basis = center_bidegree(&sys, Bidegree::new(0, 2), 1000).unwrap();
        assert_eq!(basis.len(), 1);
        let z = el(&[Letter::Y1, Letter::Y1]).add(&el(&[Letter::Y2, Letter::Y2]), cs);
        assert!(in_span(&basis, &z, Bidegree::new(0, 2), cs));
        // (1,0) kernel is zero
        assert!(center_bidegree(&sys, Bidegree::new(1, 0), 1000)
            .unwrap()
            .is_empty());
        // (2,2) kernel is one-dimensional, spanned by x1^2 (y2^2 + y1^2)
        let basis = center_bidegree(&sys, Bidegree::new(2, 2), 1000).unwrap();
        assert_eq!(basis.len(), 1);
        let prod = el(&[Letter::X1, Letter::X1]).mul(&z, cs);
        let prod = normal_form(&prod, &sys, 1000).unwrap();
        assert!(in_span(&basis, &prod, Bidegree::new(2, 2), cs));
    }

    #[test]
    fn d_scan_marks_products() {
        let sys = family_d_at(-1).build_rewrite_system().unwrap();
        let report = center_scan(&sys, Bidegree::new(2, 2), 1000).unwrap();
        assert!(!report.only_constants());
        for entry in &report.entries {
            match (entry.bidegree.x, entry.bidegree.y) {
                (2, 0) | (0, 2) => {
                    assert_eq!(entry.basis.len(), 1);
                    assert!(!entry.explained_by_products);
                }
                (2, 2) => {
                    assert_eq!(entry.basis.len(), 1);
                    assert!(entry.explained_by_products);
                }
                _ => assert!(entry.basis.is_empty(), "at {}", entry.bidegree),
            }
        }
    }

    #[test]
    fn o_normality_witness() {
        let fs = family_o();
        let sys = fs.build_rewrite_system().unwrap();
        let cs = sys.constraints();
        let f = Scalar::param(ParamName::F);
        // w = x1^2 - f x2^2
        let w = el(&[Letter::X1, Letter::X1]).sub(&el(&[Letter::X2, Letter::X2]).scalar_mul(&f, cs), cs);
        let witness = check_normality(&w, &sys, 1000).unwrap().unwrap();
        let one_minus_f = Scalar::one().sub(&f, cs);
        assert!(witness.lambda(Letter::X1).is_one());
        assert!(witness.lambda(Letter::X2).is_one());
        assert!(witness.lambda(Letter::Y1).eq_scalar(&one_minus_f, cs));
        assert!(witness.lambda(Letter::Y2).eq_scalar(&one_minus_f, cs));
        // x1 alone has no witness
        assert!(check_normality(&Element::letter(Letter::X1), &sys, 1000)
            .unwrap()
            .is_none());
    }

    #[test]
    fn o_power_centrality_at_f_two() {
        let fs = family_o();
        let mut assignment = BTreeMap::new();
        assignment.insert(ParamName::F, BigRational::from_integer(BigInt::from(2)));
        let sys = fs
            .specialized_system(&assignment, &ConstraintSet::empty())
            .unwrap();
        let cs = sys.constraints();
        let w = el(&[Letter::X1, Letter::X1]).sub(
            &el(&[Letter::X2, Letter::X2])
                .rational_mul(&BigRational::from_integer(BigInt::from(2))),
            cs,
        );
        let sq = verify_power_central(&w, 2, &sys, 2000).unwrap();
        assert!(sq.direct_central);
        assert_eq!(sq.lambda_route, Some(true));
        assert!(sq.consistent());
        let first = verify_power_central(&w, 1, &sys, 2000).unwrap();
        assert!(!first.direct_central);
        assert_eq!(first.lambda_route, Some(false));
        assert!(first.consistent());
    }

    #[test]
    fn kernel_of_simple_matrix() {
        let cs = ConstraintSet::empty();
        // x + y = 0 over two unknowns: kernel spanned by (1, -1)
        let m = alloc::vec![alloc::vec![Scalar::one(), Scalar::one()]];
        let basis = kernel_basis(&m, 2, &cs);
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        assert!(v[0].add(&v[1], &cs).is_zero());
        assert!(!v[0].is_zero());
    }
}
