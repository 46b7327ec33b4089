//! The verification suite: every identity that can be checked on a fixture,
//! run group by group with seeded random probes.
//!
//! Groups run in the order of [`GROUPS`]. Once any check has failed, every
//! check in a later group is recorded as skipped.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::algebroid::Section;
use crate::arith::Ratio;
use crate::bundle::Metric;
use crate::chern::{
    adjoint_ch_parity_form, adjoint_cs_parity_form, affine_curvature_polynomial_residual,
    affine_time_curvature_residual, ch_form, cs2_explicit_form, cs_form,
    curvature_adjoint_residual, face_directions_residual, face_restriction_residual,
    face_slots_residual, flat_pair_form, independence_residual_form, metric_connection,
    pair_curvature_form, parity_chain_form, secondary_class_rep, transgression_residual_form,
    wz_form,
};
use crate::cohomology::{build_complex, dense_form, CEComplex, Exactness};
use crate::connection::{
    affine_combination, flatness_probe, leibniz_check, metric_adjoint, metric_probe,
    ConnectionExpr, Setting,
};
use crate::error::Result;
use crate::fixture::Fixture;
use crate::forms::{form_eval, stokes_check, FormExpr, FormValue};
use crate::random::{random_frac, random_section, rng_from_seed};

pub const GROUPS: [&str; 6] = [
    "axioms",
    "leibniz",
    "curvature",
    "forms",
    "chern-simons",
    "cohomology",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    pub p_max: usize,
    pub k_max: usize,
    pub degree_cap: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 7,
            samples: 5,
            p_max: 2,
            k_max: 2,
            degree_cap: 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub group: &'static str,
    pub identity: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Not serialized, so reports stay byte-identical across runs.
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub fixture: String,
    pub config: SuiteConfig,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    /// True when no check failed; skipped checks do not count.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn matching<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a CheckRecord> {
        self.checks
            .iter()
            .filter(move |c| c.name.starts_with(prefix))
    }

    pub fn total_time(&self) -> Duration {
        self.checks.iter().map(|c| c.elapsed).sum()
    }

    /// One JSON object per check, in run order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&serde_json::to_string(c).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "fixture {} (seed {}, samples {})",
            self.fixture, self.config.seed, self.config.samples
        );
        let _ = writeln!(
            out,
            "{:<14} {:>6} {:>6} {:>8}",
            "group", "pass", "fail", "skipped"
        );
        for g in GROUPS {
            let of = |s: Status| {
                self.checks
                    .iter()
                    .filter(|c| c.group == g && c.status == s)
                    .count()
            };
            let (p, f, s) = (of(Status::Pass), of(Status::Fail), of(Status::Skipped));
            if p + f + s > 0 {
                let _ = writeln!(out, "{g:<14} {p:>6} {f:>6} {s:>8}");
            }
        }
        let _ = writeln!(
            out,
            "{:<14} {:>6} {:>6} {:>8}",
            "total",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped)
        );
        for c in self.failures() {
            let _ = writeln!(
                out,
                "FAIL {}: {}",
                c.name,
                c.witness.as_deref().unwrap_or("")
            );
        }
        out
    }
}

enum Verdict {
    Pass(Option<String>),
    Fail(String),
}

fn pass() -> Result<Verdict> {
    Ok(Verdict::Pass(None))
}

fn from_witness(w: Option<String>) -> Verdict {
    match w {
        None => Verdict::Pass(None),
        Some(w) => Verdict::Fail(w),
    }
}

/// FNV-1a, so a check's probes depend only on the seed and its own name.
fn name_hash(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

struct Runner<'a> {
    cfg: &'a SuiteConfig,
    records: Vec<CheckRecord>,
    group: &'static str,
    blocked: Option<String>,
}

impl Runner<'_> {
    fn begin(&mut self, group: &'static str) {
        self.group = group;
        if self.blocked.is_none() {
            self.blocked = self
                .records
                .iter()
                .find(|r| r.status == Status::Fail)
                .map(|r| format!("prerequisite {} failed", r.name));
        }
    }

    fn check<F>(&mut self, name: String, identity: &str, f: F)
    where
        F: FnOnce(u64) -> Result<Verdict>,
    {
        let start = Instant::now();
        let (status, witness, note) = match &self.blocked {
            Some(reason) => (Status::Skipped, None, Some(reason.clone())),
            None => match f(self.cfg.seed ^ name_hash(&name)) {
                Ok(Verdict::Pass(note)) => (Status::Pass, None, note),
                Ok(Verdict::Fail(w)) => (Status::Fail, Some(w), None),
                Err(e) => (Status::Fail, Some(format!("error: {e}")), None),
            },
        };
        self.records.push(CheckRecord {
            name,
            group: self.group,
            identity: identity.to_string(),
            status,
            witness,
            note,
            elapsed: start.elapsed(),
        });
    }
}

fn join_args(args: &[Section]) -> String {
    args.iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Evaluates `f` on `samples` random tuples of `n_args` sections.
fn probe<F>(set: &Setting, n_args: usize, cfg: &SuiteConfig, seed: u64, f: F) -> Result<Verdict>
where
    F: Fn(&[Section]) -> Result<FormValue>,
{
    let mut rng = rng_from_seed(seed);
    for sample in 0..cfg.samples {
        let args: Vec<Section> = (0..n_args)
            .map(|_| random_section(&set.alg, &mut rng, cfg.degree_cap))
            .collect();
        let v = f(&args)?;
        if !v.is_zero() {
            return Ok(Verdict::Fail(format!(
                "sample {sample}: args [{}] give residual {v}",
                join_args(&args)
            )));
        }
    }
    pass()
}

fn form_probe(form: &FormExpr, set: &Setting, cfg: &SuiteConfig, seed: u64) -> Result<Verdict> {
    let deg = form.degree()?;
    probe(set, deg, cfg, seed, |args| form_eval(form, set, args))
}

fn end(m: crate::bundle::EndMat) -> FormValue {
    FormValue::End(m)
}

/// Non-tensorial constructors first, so that lists built from the front
/// always contain one when the fixture has any.
fn ordered_connections(fx: &Fixture) -> Vec<(String, ConnectionExpr)> {
    let (mut first, rest): (Vec<_>, Vec<_>) = fx
        .connections
        .iter()
        .map(|(n, c)| (n.clone(), c.clone()))
        .partition(|(_, c)| c.has_nontensorial_part());
    first.extend(rest);
    first
}

/// Up to `count` windows of `len` consecutive entries, cyclically.
fn windows(
    conns: &[(String, ConnectionExpr)],
    len: usize,
    count: usize,
) -> Vec<Vec<(String, ConnectionExpr)>> {
    if conns.len() < len || len == 0 {
        return Vec::new();
    }
    (0..count.min(conns.len()))
        .map(|i| {
            (0..len)
                .map(|j| conns[(i + j) % conns.len()].clone())
                .collect()
        })
        .collect()
}

fn label(list: &[(String, ConnectionExpr)]) -> String {
    list.iter()
        .map(|(n, _)| n.as_str())
        .collect::<Vec<_>>()
        .join(",")
}

fn exprs(list: &[(String, ConnectionExpr)]) -> Vec<ConnectionExpr> {
    list.iter().map(|(_, c)| c.clone()).collect()
}

fn lambda(c0: &ConnectionExpr, c1: &ConnectionExpr) -> FormExpr {
    FormExpr::diff(c1.clone(), c0.clone())
}

fn sign(e: usize) -> Ratio {
    Ratio::from_int(if e % 2 == 0 { 1 } else { -1 })
}

pub fn run_suite(fx: &Fixture, cfg: &SuiteConfig) -> SuiteReport {
    let mut r = Runner {
        cfg,
        records: Vec::new(),
        group: GROUPS[0],
        blocked: None,
    };
    let set = fx.setting();
    let conns = ordered_connections(fx);
    let metrics: Vec<(String, Metric)> = fx
        .metrics
        .iter()
        .map(|(n, m)| (n.clone(), m.clone()))
        .collect();
    let pairs = windows(&conns, 2, 3);
    let triples = windows(&conns, 3, 2);

    r.begin("axioms");
    let start = Instant::now();
    let axioms = fx.algebroid.verify_axioms(cfg.samples, cfg.seed);
    let per = start.elapsed() / axioms.checks.len().max(1) as u32;
    for c in axioms.checks {
        let identity = match c.name.split('-').next().unwrap_or("") {
            "antisymmetry" => "[a, b] = −[b, a]",
            "jacobi" => "[a, [b, c]] + [b, [c, a]] + [c, [a, b]] = 0",
            "leibniz" => "[a, f b] = f [a, b] + ρ(a)(f) b",
            _ => "ρ([a, b]) = [ρ(a), ρ(b)]",
        };
        r.check(format!("axioms/{}", c.name), identity, |_| {
            Ok(from_witness(c.witness))
        });
        if let Some(last) = r.records.last_mut() {
            last.elapsed = per;
        }
    }

    r.begin("leibniz");
    for (name, c) in &conns {
        r.check(
            format!("leibniz/{name}"),
            "∇_a(f s) = f ∇_a s + ρ(a)(f) s",
            |seed| {
                let rep = leibniz_check(c, &set, cfg.samples, seed);
                Ok(from_witness(
                    rep.first_failure()
                        .map(|f| f.witness.clone().unwrap_or_default()),
                ))
            },
        );
    }

    r.begin("curvature");
    for (name, c) in &conns {
        for (hn, h) in &metrics {
            r.check(
                format!("curvature/adjoint/{name}/{hn}"),
                "R^{∇^h} = −(R^∇)*",
                |seed| {
                    probe(&set, 2, cfg, seed, |a| {
                        Ok(end(curvature_adjoint_residual(c, h, &set, &a[0], &a[1])?))
                    })
                },
            );
        }
    }
    for pair in &pairs {
        let (c0, c1) = (&pair[0].1, &pair[1].1);
        let l = label(pair);
        r.check(
            format!("curvature/pair/{l}"),
            "R^{∇¹} − R^{∇⁰} = d^{∇̄⁰}λ + [λ, λ]",
            |seed| form_probe(&pair_curvature_form(c0, c1), &set, cfg, seed),
        );
        r.check(
            format!("curvature/affine-time/{l}"),
            "R^{aff}(∂/∂t, a) = λ(a)",
            |seed| {
                probe(&set, 1, cfg, seed, |a| {
                    Ok(end(affine_time_curvature_residual(c0, c1, &set, &a[0])?))
                })
            },
        );
        r.check(
            format!("curvature/affine-polynomial/{l}"),
            "R^{aff}(a, b) = (1−t) R⁰(a, b) + t R¹(a, b) + (t²−t) [λ(a), λ(b)]",
            |seed| {
                probe(&set, 2, cfg, seed, |a| {
                    Ok(end(affine_curvature_polynomial_residual(
                        c0, c1, &set, &a[0], &a[1],
                    )?))
                })
            },
        );
    }
    for triple in &triples {
        let cs = exprs(triple);
        let l = label(triple);
        r.check(
            format!("curvature/face-restriction/{l}"),
            "R^{∇^{0..k}}(a, b)∘σ_j = R^{∇^{0..ĵ..k}}(a, b)",
            |seed| {
                probe(&set, 2, cfg, seed, |a| {
                    let mut acc = crate::bundle::EndMat::zero(set.rank);
                    for j in 0..3 {
                        acc = acc.add(&face_restriction_residual(&cs, j, &set, &a[0], &a[1])?);
                    }
                    Ok(end(acc))
                })
            },
        );
        r.check(
            format!("curvature/face-slots/{l}"),
            "R^{∇^{0..k}}(∂/∂t^s, a)∘σ_j = R^{∇^{0..ĵ..k}}(∂/∂t^{s'}, a) for j ≥ 1, s ≠ j",
            |seed| {
                probe(&set, 1, cfg, seed, |a| {
                    let mut acc = face_slots_residual(&cs, 1, 2, &set, &a[0])?;
                    acc = acc.add(&face_slots_residual(&cs, 2, 1, &set, &a[0])?);
                    Ok(end(acc))
                })
            },
        );
        r.check(
            format!("curvature/face-directions/{l}"),
            "R^{∇^{0..k}}(dσ_j(∂/∂t^z), a)∘σ_j = R^{∇^{0..ĵ..k}}(∂/∂t^z, a)",
            |seed| {
                probe(&set, 1, cfg, seed, |a| {
                    let mut acc = crate::bundle::EndMat::zero(set.rank);
                    for j in 0..3 {
                        acc = acc.add(&face_directions_residual(&cs, j, 1, &set, &a[0])?);
                    }
                    Ok(end(acc))
                })
            },
        );
    }

    r.begin("forms");
    for (name, c) in &conns {
        r.check(
            format!("forms/bianchi/{name}"),
            "d^{∇̄}R^∇ = 0",
            |seed| {
                form_probe(
                    &FormExpr::cov_diff(c.clone(), FormExpr::curv(c.clone())),
                    &set,
                    cfg,
                    seed,
                )
            },
        );
    }
    for pair in &pairs {
        let (c0, c1) = (&pair[0].1, &pair[1].1);
        let l = label(pair);
        let lam = lambda(c0, c1);
        let curv = FormExpr::curv(c0.clone());
        r.check(
            format!("forms/trace-commutes/{l}"),
            "d Tr_* ω = Tr_* d^{∇̄}ω",
            |seed| {
                for omega in [
                    lam.clone(),
                    curv.clone(),
                    FormExpr::wedge(lam.clone(), lam.clone()),
                ] {
                    let res = FormExpr::sub(
                        FormExpr::d(FormExpr::trace(omega.clone())),
                        FormExpr::trace(FormExpr::cov_diff(c0.clone(), omega)),
                    );
                    if let Verdict::Fail(w) = form_probe(&res, &set, cfg, seed)? {
                        return Ok(Verdict::Fail(w));
                    }
                }
                pass()
            },
        );
        r.check(
            format!("forms/antiderivation/{l}"),
            "d(α∧β) = dα∧β + (−1)^{|α|} α∧dβ",
            |seed| {
                let alpha = FormExpr::trace(lam.clone());
                let beta = ch_form(c1, 1);
                let scalar = FormExpr::sum(vec![
                    FormExpr::d(FormExpr::wedge(alpha.clone(), beta.clone())),
                    FormExpr::scale(
                        sign(1),
                        FormExpr::wedge(FormExpr::d(alpha.clone()), beta.clone()),
                    ),
                    FormExpr::wedge(alpha, FormExpr::d(beta)),
                ]);
                let dl = |f: FormExpr| FormExpr::cov_diff(c0.clone(), f);
                let endo = FormExpr::sum(vec![
                    dl(FormExpr::wedge(lam.clone(), curv.clone())),
                    FormExpr::scale(sign(1), FormExpr::wedge(dl(lam.clone()), curv.clone())),
                    FormExpr::wedge(lam.clone(), dl(curv.clone())),
                ]);
                for res in [scalar, endo] {
                    if let Verdict::Fail(w) = form_probe(&res, &set, cfg, seed)? {
                        return Ok(Verdict::Fail(w));
                    }
                }
                pass()
            },
        );
        r.check(format!("forms/d-squared/{l}"), "d∘d = 0", |seed| {
            let mut rng = rng_from_seed(seed);
            let f = FormExpr::ConstFn(random_frac(&set.alg, &mut rng, cfg.degree_cap + 1));
            for omega in [f, FormExpr::trace(lam.clone()), ch_form(c0, 1)] {
                if let Verdict::Fail(w) =
                    form_probe(&FormExpr::d(FormExpr::d(omega)), &set, cfg, seed)?
                {
                    return Ok(Verdict::Fail(w));
                }
            }
            pass()
        });
        r.check(
            format!("forms/cyclicity/{l}"),
            "Tr_*(α∧β) = (−1)^{|α||β|} Tr_*(β∧α)",
            |seed| {
                let tr = |a: &FormExpr, b: &FormExpr| {
                    FormExpr::trace(FormExpr::wedge(a.clone(), b.clone()))
                };
                let rl = FormExpr::sub(tr(&lam, &curv), tr(&curv, &lam));
                let ll = FormExpr::sum(vec![tr(&lam, &lam), tr(&lam, &lam)]);
                for res in [rl, ll] {
                    if let Verdict::Fail(w) = form_probe(&res, &set, cfg, seed)? {
                        return Ok(Verdict::Fail(w));
                    }
                }
                pass()
            },
        );
    }
    if !conns.is_empty() {
        for k in 1..=cfg.k_max.clamp(1, 3) {
            let list: Vec<ConnectionExpr> =
                (0..=k).map(|i| conns[i % conns.len()].1.clone()).collect();
            for i in 0..STOKES_FORMS {
                r.check(
                    format!("forms/stokes/k{k}/{i}"),
                    "∫_{Δᵏ} dω + (−1)^{k+1} d ∫_{Δᵏ} ω = Σ_j (−1)^j ∫_{Δ^{k−1}} σ_j^* ω",
                    |seed| {
                        let omega = stokes_form(i, &list, &set, k, cfg, seed)?;
                        let n_args = omega.degree()? + 1 - k;
                        probe(
                            &set,
                            n_args,
                            &SuiteConfig {
                                samples: cfg.samples.min(2),
                                ..cfg.clone()
                            },
                            seed,
                            |a| Ok(FormValue::Scalar(stokes_check(&omega, k, &set, a)?)),
                        )
                    },
                );
            }
        }
    }

    r.begin("chern-simons");
    let p_range = 1..=cfg.p_max.max(1);
    for p in p_range.clone() {
        for (name, c) in &conns {
            r.check(
                format!("chern-simons/ch-closed/{name}/p{p}"),
                "d ch_p(∇) = 0",
                |seed| {
                    form_probe(
                        &transgression_residual_form(&[c.clone()], p)?,
                        &set,
                        cfg,
                        seed,
                    )
                },
            );
        }
        for pair in &pairs {
            let l = label(pair);
            r.check(
                format!("chern-simons/independence/{l}/p{p}"),
                "ch_p(∇¹) − ch_p(∇⁰) = d cs_p(∇⁰, ∇¹)",
                |seed| {
                    form_probe(
                        &independence_residual_form(&pair[0].1, &pair[1].1, p)?,
                        &set,
                        cfg,
                        seed,
                    )
                },
            );
        }
    }
    for p in p_range.clone() {
        for k in 1..=cfg.k_max.min(2 * p) {
            for list in windows(&conns, k + 1, if k == 3 { 1 } else { 2 }) {
                let cs = exprs(&list);
                r.check(
                    format!("chern-simons/transgression/{}/p{p}k{k}", label(&list)),
                    "(−1)^{k+1} d cs_p(∇⁰..∇ᵏ) = Σ_j (−1)^j cs_p(∇⁰..∇̂ʲ..∇ᵏ)",
                    |seed| form_probe(&transgression_residual_form(&cs, p)?, &set, cfg, seed),
                );
            }
        }
    }
    for pair in &pairs {
        let (c0, c1) = (&pair[0].1, &pair[1].1);
        let l = label(pair);
        r.check(
            format!("chern-simons/cs1-trace/{l}"),
            "cs₁(∇, ∇ + θ) = Tr θ",
            |seed| {
                let res = FormExpr::sub(
                    cs_form(&[c0.clone(), c1.clone()], 1)?,
                    FormExpr::trace(lambda(c0, c1)),
                );
                form_probe(&res, &set, cfg, seed)
            },
        );
        if cfg.p_max >= 2 {
            r.check(
                format!("chern-simons/cs2-explicit/{l}"),
                "cs₂(∇, ∇ + θ) = Tr(2θ∧R^∇ + θ∧d^{∇̄}θ + ⅔ θ∧θ∧θ)",
                |seed| {
                    let res = FormExpr::sub(
                        cs_form(&[c0.clone(), c1.clone()], 2)?,
                        cs2_explicit_form(c0, &lambda(c0, c1)),
                    );
                    form_probe(&res, &set, cfg, seed)
                },
            );
        }
    }
    let flats: Vec<(String, ConnectionExpr)> = conns
        .iter()
        .filter(|(_, c)| matches!(flatness_probe(c, &set, cfg.samples, cfg.seed), Ok(None)))
        .cloned()
        .collect();
    let mut flat_pairs = windows(&flats, 2, 2);
    if let (Some(f), Some((hn, h))) = (flats.first(), metrics.first()) {
        flat_pairs.push(vec![
            f.clone(),
            (format!("{}^{hn}", f.0), metric_adjoint(&f.1, h)),
        ]);
    }
    for pair in &flat_pairs {
        let l = label(pair);
        for p in p_range.clone() {
            r.check(
                format!("chern-simons/flat-pair/{l}/p{p}"),
                "cs_p(∇⁰, ∇¹) = (−1)^{p+1} p!(p−1)!/(2p−1)! Tr_*(λ^{2p−1}) for flat ∇⁰, ∇¹",
                |seed| {
                    let res = FormExpr::sub(
                        cs_form(&[pair[0].1.clone(), pair[1].1.clone()], p)?,
                        flat_pair_form(&pair[0].1, &pair[1].1, p),
                    );
                    form_probe(&res, &set, cfg, seed)
                },
            );
        }
    }
    if cfg.p_max >= 2 {
        for (fname, f) in flats.iter().take(2) {
            for (oname, other) in conns.iter().filter(|(n, _)| n != fname).take(2) {
                r.check(
                    format!("chern-simons/wz/{fname},{oname}"),
                    "cs₂(∇, ∇ + θ) = Tr(θ∧d^{∇̄}θ + ⅔ θ∧θ∧θ) for flat ∇",
                    |seed| {
                        let theta = lambda(f, other);
                        let res = FormExpr::sub(
                            cs_form(&[f.clone(), other.clone()], 2)?,
                            wz_form(f, &theta),
                        );
                        form_probe(&res, &set, cfg, seed)
                    },
                );
            }
        }
    }
    for (hn, h) in &metrics {
        for p in p_range.clone() {
            for (name, c) in &conns {
                r.check(
                    format!("chern-simons/adjoint-parity/{name}/{hn}/p{p}"),
                    "ch_p(∇^h) = (−1)^p ch_p(∇)",
                    |seed| form_probe(&adjoint_ch_parity_form(c, h, p), &set, cfg, seed),
                );
            }
            for pair in &pairs {
                r.check(
                    format!("chern-simons/adjoint-parity-pair/{}/{hn}/p{p}", label(pair)),
                    "cs_p(∇₀^h, ∇₁^h) = (−1)^p cs_p(∇₀, ∇₁)",
                    |seed| {
                        form_probe(
                            &adjoint_cs_parity_form(&pair[0].1, &pair[1].1, h, p)?,
                            &set,
                            cfg,
                            seed,
                        )
                    },
                );
            }
            for (fname, f) in &flats {
                r.check(
                    format!("chern-simons/secondary-closed/{fname}/{hn}/p{p}"),
                    "d cs_p(∇, ∇^h) = 0 for flat ∇",
                    |seed| {
                        form_probe(
                            &FormExpr::d(secondary_class_rep(f, h, p)?.form),
                            &set,
                            cfg,
                            seed,
                        )
                    },
                );
                r.check(
                    format!("chern-simons/parity-chain/{fname}/{hn}/p{p}"),
                    "cs_p(∇, ∇^h) = (1 + (−1)^{p+1}) cs_p(∇, ∇_m) − d cs_p(∇, ∇^h, ∇_m)",
                    |seed| {
                        let m = metric_connection(f, h);
                        if let Some(w) = metric_probe(&m, h, &set, cfg.samples, seed)? {
                            return Ok(Verdict::Fail(format!("∇_m is not metric: {w}")));
                        }
                        form_probe(&parity_chain_form(f, &m, h, p)?, &set, cfg, seed)
                    },
                );
            }
        }
    }

    if fx.algebroid.is_point() {
        r.begin("cohomology");
        let cx = build_complex(&fx.algebroid, None);
        let cxr = || cx.as_ref().map_err(Clone::clone);
        r.check("cohomology/d-squared".into(), "d_CE ∘ d_CE = 0", |_| {
            Ok(from_witness(cxr()?.d_squared_witness()))
        });
        r.check(
            "cohomology/betti".into(),
            "Σ (−1)^k b_k = Σ (−1)^k C(n, k)",
            |_| {
                let cx = cxr()?;
                let b = cx.betti_numbers();
                let chi: i64 = b
                    .iter()
                    .enumerate()
                    .map(|(k, v)| if k % 2 == 0 { *v as i64 } else { -(*v as i64) })
                    .sum();
                let note = format!("betti = {b:?}");
                Ok(if chi == 0 {
                    Verdict::Pass(Some(note))
                } else {
                    Verdict::Fail(format!("Euler characteristic {chi}, {note}"))
                })
            },
        );
        for pair in &pairs {
            let (c0, c1) = (&pair[0].1, &pair[1].1);
            let l = label(pair);
            r.check(
                format!("cohomology/dense-differential/{l}"),
                "the dense table of dω is d_CE of the table of ω",
                |_| {
                    let cx = cxr()?;
                    let omega = FormExpr::trace(lambda(c0, c1));
                    let lhs = dense_form(&FormExpr::d(omega.clone()), &set)?;
                    let rhs = cx.apply_d(1, &dense_form(&omega, &set)?)?;
                    Ok(if lhs == rhs {
                        Verdict::Pass(None)
                    } else {
                        Verdict::Fail(format!("dense dω = {lhs:?}, d_CE = {rhs:?}"))
                    })
                },
            );
            for p in p_range.clone() {
                r.check(
                    format!("cohomology/ch-class/{l}/p{p}"),
                    "[ch_p(∇¹)] = [ch_p(∇⁰)]",
                    |_| {
                        let form = FormExpr::sub(ch_form(c1, p), ch_form(c0, p));
                        exactness_verdict(cxr()?, &form, &set)
                    },
                );
            }
        }
        for (fname, f) in &flats {
            for (hn, h) in &metrics {
                for p in p_range.clone().filter(|p| p % 2 == 0) {
                    r.check(
                        format!("cohomology/parity-exact/{fname}/{hn}/p{p}"),
                        "[cs_p(∇, ∇^h)] = 0 for even p",
                        |_| exactness_verdict(cxr()?, &secondary_class_rep(f, h, p)?.form, &set),
                    );
                }
            }
            for pair in metrics.windows(2) {
                let ((h1n, h1), (h2n, h2)) = (&pair[0], &pair[1]);
                for p in p_range.clone() {
                    r.check(
                        format!("cohomology/metric-independence/{fname}/{h1n},{h2n}/p{p}"),
                        "[cs_p(∇, ∇^{h₁})] = [cs_p(∇, ∇^{h₂})]",
                        |_| {
                            let form = FormExpr::sub(
                                secondary_class_rep(f, h1, p)?.form,
                                secondary_class_rep(f, h2, p)?.form,
                            );
                            exactness_verdict(cxr()?, &form, &set)
                        },
                    );
                }
            }
        }
    }

    SuiteReport {
        fixture: fx.name.clone(),
        config: cfg.clone(),
        checks: r.records,
    }
}

/// Number of random forms per simplex dimension in the Stokes checks.
pub const STOKES_FORMS: usize = 10;

/// The `i`-th random scalar form on `Tℝᵏ × A`, built from functions, their
/// differentials and Chern forms of the affine combination.
fn stokes_form(
    i: usize,
    list: &[ConnectionExpr],
    set: &Setting,
    k: usize,
    cfg: &SuiteConfig,
    seed: u64,
) -> Result<FormExpr> {
    let prod = set.with_arity(k)?;
    let mut rng = rng_from_seed(seed);
    let mut rand_fn = || FormExpr::ConstFn(random_frac(&prod.alg, &mut rng, cfg.degree_cap));
    let (f, g) = (rand_fn(), rand_fn());
    let aff = affine_combination(list)?;
    let lam = FormExpr::diff(aff.clone(), list[0].clone().lift(k));
    let w = FormExpr::wedge;
    let mut omega = match i % STOKES_FORMS {
        0 => w(f, FormExpr::d(g)),
        1 => FormExpr::d(f),
        2 => w(f, FormExpr::trace(lam)),
        3 => w(FormExpr::d(f), FormExpr::d(g)),
        4 => ch_form(&aff, 1),
        5 => w(f, ch_form(&aff, 1)),
        6 => FormExpr::trace(w(lam, FormExpr::curv(aff))),
        7 => ch_form(&aff, 2),
        8 => w(f, ch_form(&aff, 2)),
        _ => w(FormExpr::d(f), ch_form(&aff, 1)),
    };
    // integrals over Δᵏ need degree at least k
    while omega.degree()? < k {
        omega = w(FormExpr::d(rand_fn()), omega);
    }
    Ok(omega)
}

fn exactness_verdict(cx: &CEComplex, form: &FormExpr, set: &Setting) -> Result<Verdict> {
    let deg = form.degree()?;
    if deg > cx.dimension() {
        return Ok(Verdict::Pass(Some(format!(
            "degree {deg} exceeds the rank; the cochain space is zero"
        ))));
    }
    let dense = dense_form(form, set)?;
    Ok(match cx.is_exact(deg, &dense)? {
        Exactness::Exact { primitive } => {
            let shown: Vec<String> = primitive.iter().map(|v| v.to_string()).collect();
            Verdict::Pass(Some(format!("primitive [{}]", shown.join(", "))))
        }
        Exactness::NotExact {
            rank_d,
            rank_augmented,
        } => Verdict::Fail(format!(
            "cochain {:?} is not exact: rank d = {rank_d}, rank [d | ω] = {rank_augmented}",
            dense.iter().map(|v| v.to_string()).collect::<Vec<_>>()
        )),
    })
}

/// Runs the suite on every fixture in `fixtures`, keyed by fixture name.
pub fn run_all(fixtures: &[Fixture], cfg: &SuiteConfig) -> BTreeMap<String, SuiteReport> {
    fixtures
        .iter()
        .map(|fx| (fx.name.clone(), run_suite(fx, cfg)))
        .collect()
}
