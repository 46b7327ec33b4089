//! Lie algebroids presented by a frame, anchor components and structure
//! functions, their sections, and the Cartesian product `Tℝᵏ × A`.
//!
//! Frame indices are 0-based in code. For a product algebroid the frame is
//! `∂/∂t¹..∂/∂tᵏ` followed by `e₁..e_n`, so section coefficient vectors have
//! length `k + n`.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{MPoly, RFrac, Var, MAX_CHART, MAX_SIMPLEX};
use crate::error::{AcsError, Result};
use crate::random::{random_frac, random_section};

#[derive(Debug, PartialEq)]
struct AlgebroidData {
    rank: usize,
    chart_dim: usize,
    /// `anchor[i][mu]`: the `x_mu` component of `ρ(e_i)`.
    anchor: Vec<Vec<MPoly>>,
    /// `structure[(i * n + j) * n + k] = c^k_{ij}`.
    structure: Vec<MPoly>,
    /// Non-zero structure entries as `(i, j, k)`.
    nonzero: Vec<(usize, usize, usize)>,
}

/// A Lie algebroid over a chart (or over a point when `chart_dim = 0`).
/// Cloning is cheap; product algebroids share the base data.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebroidSpec {
    data: Arc<AlgebroidData>,
    simplex_arity: usize,
}

/// A section as its coefficient vector in the algebroid frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Section {
    coeffs: Vec<RFrac>,
}

/// Components of a vector field on the chart (and simplex) variables.
#[derive(Clone, Debug, Default)]
pub struct VectorField {
    comps: Vec<(Var, RFrac)>,
}

impl VectorField {
    pub fn apply(&self, f: &RFrac) -> RFrac {
        let mut acc = RFrac::zero();
        for (v, c) in &self.comps {
            let d = f.derive(*v);
            if !d.is_zero() {
                acc = &acc + &(c * &d);
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }
}

impl Section {
    pub fn new(coeffs: Vec<RFrac>) -> Section {
        Section { coeffs }
    }

    pub fn zero(len: usize) -> Section {
        Section {
            coeffs: vec![RFrac::zero(); len],
        }
    }

    pub fn unit(len: usize, idx: usize) -> Section {
        let mut s = Section::zero(len);
        s.coeffs[idx] = RFrac::one();
        s
    }

    pub fn coeffs(&self) -> &[RFrac] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(RFrac::is_zero)
    }

    pub fn coeff(&self, i: usize) -> &RFrac {
        &self.coeffs[i]
    }

    pub fn scale(&self, f: &RFrac) -> Section {
        Section {
            coeffs: self.coeffs.iter().map(|c| c * f).collect(),
        }
    }

    pub fn add(&self, other: &Section) -> Section {
        debug_assert_eq!(self.len(), other.len());
        Section {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Section) -> Section {
        debug_assert_eq!(self.len(), other.len());
        Section {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Section {
        Section {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// The `A`-part of a section of `Tℝᵏ × A`.
    pub fn a_part(&self, k: usize) -> Section {
        Section {
            coeffs: self.coeffs[k..].to_vec(),
        }
    }

    /// The `∂/∂t` part of a section of `Tℝᵏ × A`.
    pub fn t_part(&self, k: usize) -> &[RFrac] {
        &self.coeffs[..k]
    }

    /// `0 × a` as a section of `Tℝᵏ × A`.
    pub fn lift(&self, k: usize) -> Section {
        let mut coeffs = vec![RFrac::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Section { coeffs }
    }

    pub fn map_coeffs<F: Fn(&RFrac) -> Result<RFrac>>(&self, f: F) -> Result<Section> {
        Ok(Section {
            coeffs: self.coeffs.iter().map(f).collect::<Result<_>>()?,
        })
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

fn only_chart_vars(p: &MPoly, m: usize) -> bool {
    p.vars()
        .iter()
        .all(|v| matches!(v, Var::X(i) if (*i as usize) < m))
}

impl AlgebroidSpec {
    /// `anchor` is `n × m`; `structure(i, j, k)` yields `c^k_{ij}`.
    pub fn new(
        rank: usize,
        chart_dim: usize,
        anchor: Vec<Vec<MPoly>>,
        mut structure: impl FnMut(usize, usize, usize) -> MPoly,
    ) -> Result<AlgebroidSpec> {
        let n = rank;
        let mut table = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    table.push(structure(i, j, k));
                }
            }
        }
        AlgebroidSpec::from_tables(rank, chart_dim, anchor, table)
    }

    pub fn from_tables(
        rank: usize,
        chart_dim: usize,
        anchor: Vec<Vec<MPoly>>,
        structure: Vec<MPoly>,
    ) -> Result<AlgebroidSpec> {
        if rank == 0 {
            return Err(AcsError::InvalidArgument(
                "algebroid rank must be positive".into(),
            ));
        }
        if chart_dim > MAX_CHART {
            return Err(AcsError::InvalidArgument(format!(
                "chart dimension {chart_dim} exceeds {MAX_CHART}"
            )));
        }
        if anchor.len() != rank || anchor.iter().any(|row| row.len() != chart_dim) {
            return Err(AcsError::DimensionMismatch(format!(
                "anchor must be {rank} x {chart_dim}"
            )));
        }
        if structure.len() != rank * rank * rank {
            return Err(AcsError::DimensionMismatch(
                "structure table must have n^3 entries".into(),
            ));
        }
        for p in anchor.iter().flatten().chain(structure.iter()) {
            if !only_chart_vars(p, chart_dim) {
                return Err(AcsError::InvalidArgument(format!(
                    "structure data `{p}` uses variables outside x1..x{chart_dim}"
                )));
            }
        }
        let n = rank;
        let nonzero = (0..n * n * n)
            .filter(|&idx| !structure[idx].is_zero())
            .map(|idx| (idx / (n * n), (idx / n) % n, idx % n))
            .collect();
        Ok(AlgebroidSpec {
            data: Arc::new(AlgebroidData {
                rank,
                chart_dim,
                anchor,
                structure,
                nonzero,
            }),
            simplex_arity: 0,
        })
    }

    pub fn rank(&self) -> usize {
        self.data.rank
    }

    pub fn chart_dim(&self) -> usize {
        self.data.chart_dim
    }

    pub fn simplex_arity(&self) -> usize {
        self.simplex_arity
    }

    pub fn frame_len(&self) -> usize {
        self.simplex_arity + self.data.rank
    }

    pub fn is_point(&self) -> bool {
        self.data.chart_dim == 0
    }

    pub fn structure(&self, i: usize, j: usize, k: usize) -> &MPoly {
        let n = self.data.rank;
        &self.data.structure[(i * n + j) * n + k]
    }

    pub fn anchor(&self, i: usize, mu: usize) -> &MPoly {
        &self.data.anchor[i][mu]
    }

    pub fn anchor_table(&self) -> &[Vec<MPoly>] {
        &self.data.anchor
    }

    /// True if the structure functions are all constants.
    pub fn has_constant_structure(&self) -> bool {
        self.data.structure.iter().all(MPoly::is_constant)
    }

    /// The base algebroid `A` underlying `Tℝᵏ × A`.
    pub fn base(&self) -> AlgebroidSpec {
        AlgebroidSpec {
            data: Arc::clone(&self.data),
            simplex_arity: 0,
        }
    }

    /// `Tℝᵏ × A`.
    pub fn product_with_trivial(&self, k: usize) -> Result<AlgebroidSpec> {
        if self.simplex_arity != 0 {
            return Err(AcsError::InvalidArgument(
                "product with a product algebroid".into(),
            ));
        }
        if k == 0 || k > MAX_SIMPLEX {
            return Err(AcsError::InvalidArgument(format!(
                "simplex arity must be in 1..={MAX_SIMPLEX}"
            )));
        }
        Ok(AlgebroidSpec {
            data: Arc::clone(&self.data),
            simplex_arity: k,
        })
    }

    /// Same base with a different simplex arity (0 gives the base).
    pub fn with_arity(&self, k: usize) -> Result<AlgebroidSpec> {
        if k == 0 {
            Ok(self.base())
        } else {
            self.base().product_with_trivial(k)
        }
    }

    pub fn frame(&self, idx: usize) -> Section {
        Section::unit(self.frame_len(), idx)
    }

    /// `∂/∂t^{s+1}` in a product algebroid.
    pub fn dt(&self, s: usize) -> Section {
        assert!(s < self.simplex_arity);
        self.frame(s)
    }

    pub fn check_section(&self, a: &Section) -> Result<()> {
        if a.len() != self.frame_len() {
            return Err(AcsError::DimensionMismatch(format!(
                "section has {} coefficients, algebroid frame has {}",
                a.len(),
                self.frame_len()
            )));
        }
        Ok(())
    }

    /// `ρ(a)` as a vector field.
    pub fn anchor_field(&self, a: &Section) -> VectorField {
        let k = self.simplex_arity;
        let mut comps = Vec::new();
        for (s, c) in a.t_part(k).iter().enumerate() {
            if !c.is_zero() {
                comps.push((Var::T(s as u8), c.clone()));
            }
        }
        for mu in 0..self.data.chart_dim {
            let mut acc = RFrac::zero();
            for i in 0..self.data.rank {
                let f = a.coeff(k + i);
                let rho = &self.data.anchor[i][mu];
                if !f.is_zero() && !rho.is_zero() {
                    acc = &acc + &(f * &RFrac::from_poly(rho.clone()));
                }
            }
            if !acc.is_zero() {
                comps.push((Var::X(mu as u8), acc));
            }
        }
        VectorField { comps }
    }

    /// `ρ(a)(f)`.
    pub fn anchor_apply(&self, a: &Section, f: &RFrac) -> Result<RFrac> {
        self.check_section(a)?;
        Ok(self.anchor_field(a).apply(f))
    }

    /// `[a, b]`, extended from the frame by the Leibniz rule; `∂/∂t` slots
    /// bracket to zero with everything.
    pub fn bracket(&self, a: &Section, b: &Section) -> Result<Section> {
        self.check_section(a)?;
        self.check_section(b)?;
        let k = self.simplex_arity;
        let n = self.data.rank;
        let va = self.anchor_field(a);
        let vb = self.anchor_field(b);
        let mut out: Vec<RFrac> = Vec::with_capacity(k + n);
        for s in 0..k + n {
            out.push(&va.apply(b.coeff(s)) - &vb.apply(a.coeff(s)));
        }
        for &(i, j, l) in &self.data.nonzero {
            let (f, g) = (a.coeff(k + i), b.coeff(k + j));
            if f.is_zero() || g.is_zero() {
                continue;
            }
            let c = RFrac::from_poly(self.structure(i, j, l).clone());
            out[k + l] = &out[k + l] + &(&(f * g) * &c);
        }
        Ok(Section::new(out))
    }

    /// Exhaustive frame checks plus randomized section checks of the Lie
    /// algebroid axioms, all to exact zero.
    pub fn verify_axioms(&self, samples: usize, seed: u64) -> AxiomReport {
        let mut report = AxiomReport::default();
        let n = self.data.rank;
        let base = self.base();

        // antisymmetry of structure functions
        let mut witness = None;
        'outer: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let s = self.structure(i, j, k) + self.structure(j, i, k);
                    if !s.is_zero() {
                        witness = Some(format!(
                            "c^{}_{{{},{}}} + c^{}_{{{},{}}} = {s}",
                            k + 1,
                            i + 1,
                            j + 1,
                            k + 1,
                            j + 1,
                            i + 1
                        ));
                        break 'outer;
                    }
                }
            }
        }
        report.push("antisymmetry", witness);

        // Jacobi on all ordered frame triples
        let frame: Vec<Section> = (0..n).map(|i| base.frame(i)).collect();
        let mut witness = None;
        'jac: for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    match jacobiator(&base, &frame[i], &frame[j], &frame[l]) {
                        Ok(s) if s.is_zero() => {}
                        Ok(s) => {
                            witness = Some(format!(
                                "frame (e{}, e{}, e{}): jacobiator {s}",
                                i + 1,
                                j + 1,
                                l + 1
                            ));
                            break 'jac;
                        }
                        Err(e) => {
                            witness = Some(e.to_string());
                            break 'jac;
                        }
                    }
                }
            }
        }
        report.push("jacobi-frame", witness);

        // anchor is a bracket homomorphism, tested on coordinate functions
        let coords: Vec<RFrac> = (0..self.data.chart_dim)
            .map(|mu| RFrac::from_poly(MPoly::x(mu)))
            .collect();
        let mut witness = None;
        'hom: for i in 0..n {
            for j in 0..n {
                if let Some(w) = anchor_hom_defect(&base, &frame[i], &frame[j], &coords) {
                    witness = Some(format!("frame (e{}, e{}): {w}", i + 1, j + 1));
                    break 'hom;
                }
            }
        }
        report.push("anchor-homomorphism-frame", witness);

        // randomized checks on polynomial sections
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut anti, mut jac, mut leib, mut hom) = (None, None, None, None);
        for sample in 0..samples {
            let a = random_section(&base, &mut rng, 2);
            let b = random_section(&base, &mut rng, 2);
            let c = random_section(&base, &mut rng, 2);
            let f = random_frac(&base, &mut rng, 2);
            let tag = |what: &str| {
                format!("sample {sample}: {what} (a = {a}, b = {b}, c = {c}, f = {f})")
            };
            if anti.is_none() {
                let ab = base
                    .bracket(&a, &b)
                    .and_then(|ab| Ok(ab.add(&base.bracket(&b, &a)?)));
                if !matches!(ab, Ok(ref s) if s.is_zero()) {
                    anti = Some(tag("[a,b] + [b,a] != 0"));
                }
            }
            if jac.is_none() && !matches!(jacobiator(&base, &a, &b, &c), Ok(ref s) if s.is_zero()) {
                jac = Some(tag("jacobiator != 0"));
            }
            if leib.is_none() {
                let lhs = base.bracket(&a, &b.scale(&f));
                let rhs = base
                    .bracket(&a, &b)
                    .and_then(|ab| Ok(ab.scale(&f).add(&b.scale(&base.anchor_apply(&a, &f)?))));
                if !matches!((lhs, rhs), (Ok(l), Ok(r)) if l == r) {
                    leib = Some(tag("[a, f b] != f [a,b] + rho(a)(f) b"));
                }
            }
            if hom.is_none() {
                let test_fns = [f.clone(), random_frac(&base, &mut rng, 3)];
                if let Some(w) = anchor_hom_defect(&base, &a, &b, &test_fns) {
                    hom = Some(tag(&w));
                }
            }
        }
        report.push("antisymmetry-random", anti);
        report.push("jacobi-random", jac);
        report.push("leibniz-random", leib);
        report.push("anchor-homomorphism-random", hom);
        report
    }
}

fn jacobiator(alg: &AlgebroidSpec, a: &Section, b: &Section, c: &Section) -> Result<Section> {
    let t1 = alg.bracket(a, &alg.bracket(b, c)?)?;
    let t2 = alg.bracket(b, &alg.bracket(c, a)?)?;
    let t3 = alg.bracket(c, &alg.bracket(a, b)?)?;
    Ok(t1.add(&t2).add(&t3))
}

fn anchor_hom_defect(
    alg: &AlgebroidSpec,
    a: &Section,
    b: &Section,
    fns: &[RFrac],
) -> Option<String> {
    let ab = match alg.bracket(a, b) {
        Ok(s) => s,
        Err(e) => return Some(e.to_string()),
    };
    let (va, vb, vab) = (
        alg.anchor_field(a),
        alg.anchor_field(b),
        alg.anchor_field(&ab),
    );
    for f in fns {
        let lhs = vab.apply(f);
        let rhs = &va.apply(&vb.apply(f)) - &vb.apply(&va.apply(f));
        if lhs != rhs {
            return Some(format!(
                "rho([a,b])({f}) = {lhs} but [rho(a), rho(b)]({f}) = {rhs}"
            ));
        }
    }
    None
}

/// One named identity check.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, serde::Serialize)]
pub struct AxiomReport {
    pub checks: Vec<CheckOutcome>,
}

impl AxiomReport {
    pub(crate) fn push(&mut self, name: &str, witness: Option<String>) {
        self.checks.push(CheckOutcome {
            name: name.into(),
            passed: witness.is_none(),
            witness,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn into_result(self) -> Result<()> {
        match self.first_failure() {
            None => Ok(()),
            Some(c) => Err(AcsError::AxiomFailure {
                identity: c.name.clone(),
                witness: c.witness.clone().unwrap_or_default(),
            }),
        }
    }
}
