//! Fixture files: an algebroid, a bundle rank, named metrics, connections
//! and forms. Trees may refer to each other by name; references are
//! resolved at load time.
//!
//! ```json
//! {
//!   "name": "so3",
//!   "algebroid": {"rank": 3, "chart_dim": 0, "anchor": [[], [], []],
//!                 "structure": {"(1,2,3)": 1, "(2,1,3)": -1}},
//!   "bundle": {"rank": 3},
//!   "metrics": {"h1": [[1, 0, 0], [0, 2, 0], [0, 0, 3]]},
//!   "connections": {"ad": "Adjoint",
//!                   "ad_h1": {"MetricAdjoint": {"base": {"Ref": "ad"}, "metric": "h1"}}},
//!   "forms": {}
//! }
//! ```

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebroid::AlgebroidSpec;
use crate::arith::MPoly;
use crate::bundle::{BundleSpec, Metric};
use crate::connection::{ConnectionExpr, MetricArg, Setting};
use crate::error::{AcsError, Result};
use crate::forms::FormExpr;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebroidJson {
    rank: usize,
    chart_dim: usize,
    #[serde(default)]
    anchor: Vec<Vec<MPoly>>,
    #[serde(default)]
    structure: BTreeMap<String, MPoly>,
}

fn parse_triple(key: &str, n: usize) -> std::result::Result<(usize, usize, usize), String> {
    let inner = key
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| format!("structure key `{key}` is not of the form (i,j,k)"))?;
    let parts: Vec<usize> = inner
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad index in structure key `{key}`"))
        })
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [i, j, k] if (1..=n).contains(&i) && (1..=n).contains(&j) && (1..=n).contains(&k) => {
            Ok((i - 1, j - 1, k - 1))
        }
        [_, _, _] => Err(format!(
            "structure key `{key}` has an index outside 1..={n}"
        )),
        _ => Err(format!("structure key `{key}` needs three indices")),
    }
}

impl Serialize for AlgebroidSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.rank();
        let mut structure = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = self.structure(i, j, k);
                    if !c.is_zero() {
                        structure.insert(format!("({},{},{})", i + 1, j + 1, k + 1), c.clone());
                    }
                }
            }
        }
        AlgebroidJson {
            rank: n,
            chart_dim: self.chart_dim(),
            anchor: self.anchor_table().to_vec(),
            structure,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgebroidSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let j = AlgebroidJson::deserialize(d)?;
        let n = j.rank;
        let anchor = if j.anchor.is_empty() {
            vec![vec![MPoly::zero(); j.chart_dim]; n]
        } else {
            j.anchor
        };
        let mut table = vec![MPoly::zero(); n * n * n];
        for (key, c) in j.structure {
            let (a, b, k) = parse_triple(&key, n).map_err(D::Error::custom)?;
            table[(a * n + b) * n + k] = c;
        }
        AlgebroidSpec::from_tables(n, j.chart_dim, anchor, table).map_err(D::Error::custom)
    }
}

/// The on-disk form, before references are resolved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureFile {
    #[serde(default)]
    pub name: String,
    pub algebroid: AlgebroidSpec,
    pub bundle: BundleSpec,
    #[serde(default)]
    pub metrics: BTreeMap<String, Metric>,
    #[serde(default)]
    pub connections: BTreeMap<String, ConnectionExpr>,
    #[serde(default)]
    pub forms: BTreeMap<String, FormExpr>,
}

/// A validated fixture with all references resolved.
#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub name: String,
    pub algebroid: AlgebroidSpec,
    pub bundle: BundleSpec,
    pub metrics: BTreeMap<String, Metric>,
    pub connections: BTreeMap<String, ConnectionExpr>,
    pub forms: BTreeMap<String, FormExpr>,
    pub source: FixtureFile,
}

impl Fixture {
    pub fn setting(&self) -> Setting {
        Setting::new(self.algebroid.clone(), self.bundle.rank)
    }

    pub fn connection(&self, name: &str) -> Result<&ConnectionExpr> {
        self.connections
            .get(name)
            .ok_or_else(|| AcsError::UnresolvedRef(name.to_string()))
    }

    pub fn metric(&self, name: &str) -> Result<&Metric> {
        self.metrics
            .get(name)
            .ok_or_else(|| AcsError::UnresolvedRef(name.to_string()))
    }

    pub fn form(&self, name: &str) -> Result<&FormExpr> {
        self.forms
            .get(name)
            .ok_or_else(|| AcsError::UnresolvedRef(name.to_string()))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.source).expect("fixtures serialize")
    }
}

struct Resolver<'a> {
    file: &'a FixtureFile,
    stack: Vec<String>,
    pointer: String,
}

impl Resolver<'_> {
    fn dangling(&self, kind: &str, name: &str) -> AcsError {
        AcsError::Schema {
            pointer: self.pointer.clone(),
            message: format!("dangling {kind} reference `{name}`"),
        }
    }

    fn enter(&mut self, key: String) -> Result<()> {
        if self.stack.contains(&key) {
            return Err(AcsError::Schema {
                pointer: self.pointer.clone(),
                message: format!("cyclic reference through `{key}`"),
            });
        }
        self.stack.push(key);
        Ok(())
    }

    fn conn(&mut self, c: &ConnectionExpr) -> Result<ConnectionExpr> {
        use ConnectionExpr as C;
        Ok(match c {
            C::Ref(name) => {
                let target = self
                    .file
                    .connections
                    .get(name)
                    .ok_or_else(|| self.dangling("connection", name))?;
                self.enter(format!("connection:{name}"))?;
                let out = self.conn(target)?;
                self.stack.pop();
                out
            }
            C::Christoffel { .. } | C::Adjoint => c.clone(),
            C::PlusForm { base, theta } => C::PlusForm {
                base: Box::new(self.conn(base)?),
                theta: Box::new(self.form(theta)?),
            },
            C::MetricAdjoint { base, metric } => {
                let m = match metric {
                    MetricArg::Inline(m) => m.clone(),
                    MetricArg::Named(n) => self
                        .file
                        .metrics
                        .get(n)
                        .ok_or_else(|| self.dangling("metric", n))?
                        .clone(),
                };
                C::MetricAdjoint {
                    base: Box::new(self.conn(base)?),
                    metric: MetricArg::Inline(m),
                }
            }
            C::AffineCombination { connections } => C::AffineCombination {
                connections: connections
                    .iter()
                    .map(|x| self.conn(x))
                    .collect::<Result<_>>()?,
            },
            C::Lift { base, k } => C::Lift {
                base: Box::new(self.conn(base)?),
                k: *k,
            },
            C::JetCorrection {
                base,
                frame_index,
                chart_var,
                t,
            } => C::JetCorrection {
                base: Box::new(self.conn(base)?),
                frame_index: *frame_index,
                chart_var: *chart_var,
                t: t.clone(),
            },
            C::BasepointCorrection {
                base,
                frame_index,
                point,
                t,
            } => C::BasepointCorrection {
                base: Box::new(self.conn(base)?),
                frame_index: *frame_index,
                point: point.clone(),
                t: t.clone(),
            },
        })
    }

    fn form(&mut self, f: &FormExpr) -> Result<FormExpr> {
        use FormExpr as F;
        let bx = |r: &mut Self, x: &FormExpr| -> Result<Box<FormExpr>> { Ok(Box::new(r.form(x)?)) };
        Ok(match f {
            F::Ref(name) => {
                let target = self
                    .file
                    .forms
                    .get(name)
                    .ok_or_else(|| self.dangling("form", name))?;
                self.enter(format!("form:{name}"))?;
                let out = self.form(target)?;
                self.stack.pop();
                out
            }
            F::ConstFn(_) | F::ConstEnd(_) => f.clone(),
            F::Diff { plus, minus } => F::Diff {
                plus: Box::new(self.conn(plus)?),
                minus: Box::new(self.conn(minus)?),
            },
            F::Curv(c) => F::Curv(Box::new(self.conn(c)?)),
            F::Wedge(a, b) => F::Wedge(bx(self, a)?, bx(self, b)?),
            F::Power { form, p } => F::Power {
                form: bx(self, form)?,
                p: *p,
            },
            F::TraceStar(a) => F::TraceStar(bx(self, a)?),
            F::CovDiff { connection, form } => F::CovDiff {
                connection: Box::new(self.conn(connection)?),
                form: bx(self, form)?,
            },
            F::ScalarDiff(a) => F::ScalarDiff(bx(self, a)?),
            F::SigmaPullback { form, j, k } => F::SigmaPullback {
                form: bx(self, form)?,
                j: *j,
                k: *k,
            },
            F::LieBracketForm(a) => F::LieBracketForm(bx(self, a)?),
            F::Sum(ts) => F::Sum(ts.iter().map(|t| self.form(t)).collect::<Result<_>>()?),
            F::Scale { c, form } => F::Scale {
                c: c.clone(),
                form: bx(self, form)?,
            },
            F::SimplexIntegral { form, k } => F::SimplexIntegral {
                form: bx(self, form)?,
                k: *k,
            },
        })
    }
}

impl FixtureFile {
    /// Resolves references and checks shapes; does not check the algebroid axioms.
    pub fn resolve(&self) -> Result<Fixture> {
        let r = self.bundle.rank;
        BundleSpec::new(r)?;
        for (name, m) in &self.metrics {
            if m.rank() != r {
                return Err(AcsError::Schema {
                    pointer: format!("/metrics/{name}"),
                    message: format!("metric is {0}x{0}, bundle rank is {r}", m.rank()),
                });
            }
        }
        let mut connections = BTreeMap::new();
        for (name, c) in &self.connections {
            let mut res = Resolver {
                file: self,
                stack: vec![format!("connection:{name}")],
                pointer: format!("/connections/{name}"),
            };
            let resolved = res.conn(c)?;
            resolved.native_arity().map_err(|e| AcsError::Schema {
                pointer: res.pointer.clone(),
                message: e.to_string(),
            })?;
            connections.insert(name.clone(), resolved);
        }
        let mut forms = BTreeMap::new();
        for (name, f) in &self.forms {
            let mut res = Resolver {
                file: self,
                stack: vec![format!("form:{name}")],
                pointer: format!("/forms/{name}"),
            };
            let resolved = res.form(f)?;
            resolved.signature().map_err(|e| AcsError::Schema {
                pointer: res.pointer.clone(),
                message: e.to_string(),
            })?;
            forms.insert(name.clone(), resolved);
        }
        Ok(Fixture {
            name: self.name.clone(),
            algebroid: self.algebroid.clone(),
            bundle: self.bundle,
            metrics: self.metrics.clone(),
            connections,
            forms,
            source: self.clone(),
        })
    }
}

pub const LOAD_AXIOM_SAMPLES: usize = 4;
pub const LOAD_AXIOM_SEED: u64 = 0;

/// Parses and resolves a fixture without checking the algebroid axioms.
pub fn parse_fixture_unchecked(json: &str) -> Result<Fixture> {
    let de = &mut serde_json::Deserializer::from_str(json);
    let file: FixtureFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let pointer = if path == "." {
            String::new()
        } else {
            format!("/{}", path.replace('.', "/"))
        };
        AcsError::Schema {
            pointer,
            message: e.into_inner().to_string(),
        }
    })?;
    file.resolve()
}

/// Parses, resolves and checks the algebroid axioms.
pub fn parse_fixture(json: &str) -> Result<Fixture> {
    let fx = parse_fixture_unchecked(json)?;
    fx.algebroid
        .verify_axioms(LOAD_AXIOM_SAMPLES, LOAD_AXIOM_SEED)
        .into_result()?;
    Ok(fx)
}

pub fn load_fixture(path: &Path) -> Result<Fixture> {
    parse_fixture(&std::fs::read_to_string(path)?)
}

pub fn load_fixture_unchecked(path: &Path) -> Result<Fixture> {
    parse_fixture_unchecked(&std::fs::read_to_string(path)?)
}

/// Names of connections that mention a given set of constructors, in order.
pub fn names_matching(fx: &Fixture, pred: impl Fn(&ConnectionExpr) -> bool) -> Vec<String> {
    fx.connections
        .iter()
        .filter(|(_, c)| pred(c))
        .map(|(n, _)| n.clone())
        .collect()
}

/// Distinct names, preserving first occurrence.
pub fn dedup(names: Vec<String>) -> Vec<String> {
    let mut seen = HashSet::new();
    names
        .into_iter()
        .filter(|n| seen.insert(n.clone()))
        .collect()
}
