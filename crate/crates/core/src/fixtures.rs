//! Built-in fixtures. The JSON files under `fixtures/` are these, serialized.

use std::collections::BTreeMap;

use crate::algebroid::AlgebroidSpec;
use crate::arith::{MPoly, RFrac, Ratio};
use crate::bundle::{BundleSpec, EndMat, Metric};
use crate::connection::{ConnectionExpr, MetricArg, Setting};
use crate::fixture::{Fixture, FixtureFile};
use crate::forms::FormExpr;

pub const NAMES: [&str; 7] = [
    "abelian3",
    "so3",
    "nonabelian2",
    "chart2",
    "foliation",
    "chart3",
    "chart1",
];

fn x(i: usize) -> MPoly {
    MPoly::x(i)
}

fn c(n: i64) -> MPoly {
    MPoly::int(n)
}

fn pm(rows: Vec<Vec<MPoly>>) -> EndMat {
    EndMat::from_rows(
        rows.into_iter()
            .map(|r| r.into_iter().map(RFrac::from_poly).collect())
            .collect(),
    )
    .expect("square matrix")
}

fn point_algebra(n: usize, entries: &[((usize, usize, usize), i64)]) -> AlgebroidSpec {
    let mut table = vec![MPoly::zero(); n * n * n];
    for &((i, j, k), v) in entries {
        table[((i - 1) * n + (j - 1)) * n + (k - 1)] = c(v);
        table[((j - 1) * n + (i - 1)) * n + (k - 1)] = c(-v);
    }
    AlgebroidSpec::from_tables(n, 0, vec![vec![]; n], table).expect("valid point algebra")
}

pub fn abelian(n: usize) -> AlgebroidSpec {
    point_algebra(n, &[])
}

/// `[e₁, e₂] = e₃` and cyclic.
pub fn so3() -> AlgebroidSpec {
    point_algebra(3, &[((1, 2, 3), 1), ((2, 3, 1), 1), ((3, 1, 2), 1)])
}

/// `[e₁, e₂] = e₁`.
pub fn nonabelian2() -> AlgebroidSpec {
    point_algebra(2, &[((1, 2, 1), 1)])
}

/// `TU` for a chart `U ⊂ ℝᵐ` in the coordinate frame.
pub fn tangent_chart(m: usize) -> AlgebroidSpec {
    let anchor = (0..m)
        .map(|i| {
            (0..m)
                .map(|mu| if i == mu { c(1) } else { MPoly::zero() })
                .collect()
        })
        .collect();
    AlgebroidSpec::from_tables(m, m, anchor, vec![MPoly::zero(); m * m * m])
        .expect("valid tangent algebroid")
}

/// `ρ(e₁) = ∂/∂x¹`, `ρ(e₂) = 0`, zero bracket.
pub fn foliation() -> AlgebroidSpec {
    let anchor = vec![
        vec![c(1), MPoly::zero()],
        vec![MPoly::zero(), MPoly::zero()],
    ];
    AlgebroidSpec::from_tables(2, 2, anchor, vec![MPoly::zero(); 8])
        .expect("valid foliation algebroid")
}

fn r(name: &str) -> Box<ConnectionExpr> {
    Box::new(ConnectionExpr::Ref(name.into()))
}

fn half_way_to(target: &str, from: &str) -> ConnectionExpr {
    ConnectionExpr::PlusForm {
        base: r(from),
        theta: Box::new(FormExpr::scale(
            Ratio::new(1, 2),
            FormExpr::Diff {
                plus: r(target),
                minus: r(from),
            },
        )),
    }
}

fn metric_adj(base: &str, metric: &str) -> ConnectionExpr {
    ConnectionExpr::MetricAdjoint {
        base: r(base),
        metric: MetricArg::Named(metric.into()),
    }
}

fn file(name: &str, alg: AlgebroidSpec, rank: usize) -> FixtureFile {
    FixtureFile {
        name: name.into(),
        algebroid: alg,
        bundle: BundleSpec { rank },
        metrics: BTreeMap::new(),
        connections: BTreeMap::new(),
        forms: BTreeMap::new(),
    }
}

fn ints(rows: &[&[i64]]) -> EndMat {
    EndMat::from_ints(rows)
}

fn metric(rows: &[&[i64]]) -> Metric {
    Metric::new(ints(rows)).expect("valid metric")
}

fn insert_conn(f: &mut FixtureFile, name: &str, c: ConnectionExpr) {
    f.connections.insert(name.into(), c);
}

pub fn abelian3_file() -> FixtureFile {
    let mut f = file("abelian3", abelian(3), 3);
    f.metrics
        .insert("h".into(), metric(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 3]]));
    insert_conn(&mut f, "trivial", ConnectionExpr::trivial(3, 3));
    insert_conn(
        &mut f,
        "gamma",
        ConnectionExpr::christoffel(vec![
            ints(&[&[1, 0, 0], &[0, 2, 1], &[0, 0, -1]]),
            ints(&[&[0, 1, 0], &[1, 0, 0], &[0, 1, 1]]),
            ints(&[&[2, 0, 1], &[0, 0, 0], &[-1, 0, 1]]),
        ]),
    );
    insert_conn(&mut f, "gamma_h", metric_adj("gamma", "h"));
    f
}

pub fn so3_file() -> FixtureFile {
    let mut f = file("so3", so3(), 3);
    f.metrics
        .insert("h1".into(), metric(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 3]]));
    f.metrics
        .insert("h2".into(), metric(&[&[2, 1, 0], &[1, 2, 0], &[0, 0, 1]]));
    insert_conn(&mut f, "ad", ConnectionExpr::Adjoint);
    insert_conn(&mut f, "trivial", ConnectionExpr::trivial(3, 3));
    insert_conn(
        &mut f,
        "gamma",
        ConnectionExpr::christoffel(vec![
            ints(&[&[1, 0, 2], &[0, -1, 1], &[1, 1, 0]]),
            ints(&[&[0, 1, 0], &[2, 0, -1], &[0, 1, 1]]),
            ints(&[&[1, -1, 0], &[0, 0, 1], &[-2, 0, 1]]),
        ]),
    );
    insert_conn(&mut f, "ad_h1", metric_adj("ad", "h1"));
    insert_conn(&mut f, "ad_h2", metric_adj("ad", "h2"));
    insert_conn(&mut f, "ad_m1", half_way_to("ad_h1", "ad"));
    insert_conn(
        &mut f,
        "ad_theta",
        ConnectionExpr::PlusForm {
            base: r("ad"),
            theta: Box::new(FormExpr::Ref("theta".into())),
        },
    );
    f.forms.insert(
        "theta".into(),
        FormExpr::wedge(
            FormExpr::ConstEnd(ints(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]])),
            FormExpr::Diff {
                plus: r("gamma"),
                minus: r("trivial"),
            },
        ),
    );
    f.forms.insert(
        "ch2_gamma".into(),
        FormExpr::trace(FormExpr::power(FormExpr::Curv(r("gamma")), 2)),
    );
    f
}

pub fn nonabelian2_file() -> FixtureFile {
    let mut f = file("nonabelian2", nonabelian2(), 2);
    f.metrics.insert("h".into(), metric(&[&[2, 1], &[1, 1]]));
    f.metrics.insert("h2".into(), metric(&[&[1, 0], &[0, 3]]));
    insert_conn(&mut f, "ad", ConnectionExpr::Adjoint);
    insert_conn(&mut f, "trivial", ConnectionExpr::trivial(2, 2));
    insert_conn(
        &mut f,
        "gamma",
        ConnectionExpr::christoffel(vec![ints(&[&[1, 2], &[0, 1]]), ints(&[&[0, -1], &[1, 2]])]),
    );
    insert_conn(&mut f, "ad_h", metric_adj("ad", "h"));
    insert_conn(&mut f, "ad_m", half_way_to("ad_h", "ad"));
    f
}

pub fn chart2_file() -> FixtureFile {
    let mut f = file("chart2", tangent_chart(2), 2);
    let one_plus_x2 = &c(1) + &x(0).pow(2);
    f.metrics.insert(
        "h".into(),
        Metric::new(pm(vec![vec![one_plus_x2, x(0)], vec![x(0), c(1)]])).expect("det 1"),
    );
    insert_conn(&mut f, "ad", ConnectionExpr::Adjoint);
    insert_conn(&mut f, "trivial", ConnectionExpr::trivial(2, 2));
    insert_conn(
        &mut f,
        "gamma",
        ConnectionExpr::christoffel(vec![
            pm(vec![vec![x(0), c(1)], vec![MPoly::zero(), x(1)]]),
            pm(vec![vec![MPoly::zero(), &x(0) * &x(1)], vec![c(-1), c(1)]]),
        ]),
    );
    insert_conn(
        &mut f,
        "jet",
        ConnectionExpr::JetCorrection {
            base: r("gamma"),
            frame_index: 1,
            chart_var: 2,
            t: ints(&[&[0, 1], &[1, 0]]),
        },
    );
    insert_conn(
        &mut f,
        "basepoint",
        ConnectionExpr::BasepointCorrection {
            base: r("trivial"),
            frame_index: 2,
            point: vec![Ratio::from_int(1), Ratio::from_int(-1)],
            t: ints(&[&[1, 0], &[2, -1]]),
        },
    );
    insert_conn(&mut f, "ad_h", metric_adj("ad", "h"));
    f.forms.insert(
        "lambda".into(),
        FormExpr::Diff {
            plus: r("jet"),
            minus: r("gamma"),
        },
    );
    f
}

pub fn foliation_file() -> FixtureFile {
    let mut f = file("foliation", foliation(), 2);
    let one_plus_y2 = &c(1) + &x(1).pow(2);
    f.metrics.insert(
        "h".into(),
        Metric::new(pm(vec![
            vec![c(1), MPoly::zero()],
            vec![MPoly::zero(), one_plus_y2],
        ]))
        .expect("positive"),
    );
    insert_conn(&mut f, "ad", ConnectionExpr::Adjoint);
    insert_conn(&mut f, "trivial", ConnectionExpr::trivial(2, 2));
    insert_conn(
        &mut f,
        "gamma",
        ConnectionExpr::christoffel(vec![
            pm(vec![vec![x(1), MPoly::zero()], vec![c(1), x(0)]]),
            pm(vec![vec![c(1), x(0)], vec![MPoly::zero(), MPoly::zero()]]),
        ]),
    );
    insert_conn(
        &mut f,
        "jet",
        ConnectionExpr::JetCorrection {
            base: r("ad"),
            frame_index: 1,
            chart_var: 1,
            t: ints(&[&[1, 1], &[0, 1]]),
        },
    );
    insert_conn(
        &mut f,
        "basepoint",
        ConnectionExpr::BasepointCorrection {
            base: r("gamma"),
            frame_index: 1,
            point: vec![Ratio::zero(), Ratio::from_int(1)],
            t: ints(&[&[0, 1], &[-1, 0]]),
        },
    );
    f
}

pub fn chart3_file() -> FixtureFile {
    let mut f = file("chart3", tangent_chart(3), 3);
    insert_conn(&mut f, "trivial", ConnectionExpr::trivial(3, 3));
    let z = MPoly::zero;
    insert_conn(
        &mut f,
        "gamma",
        ConnectionExpr::christoffel(vec![
            pm(vec![
                vec![z(), x(1), c(1)],
                vec![c(-1), z(), z()],
                vec![z(), c(1), x(2)],
            ]),
            pm(vec![
                vec![c(1), z(), z()],
                vec![z(), x(0), c(1)],
                vec![x(2), z(), z()],
            ]),
            pm(vec![
                vec![z(), z(), c(1)],
                vec![x(0), c(1), z()],
                vec![z(), c(-1), z()],
            ]),
        ]),
    );
    f.forms.insert(
        "theta".into(),
        FormExpr::Diff {
            plus: r("gamma"),
            minus: r("trivial"),
        },
    );
    f
}

pub fn chart1_file() -> FixtureFile {
    let mut f = file("chart1", tangent_chart(1), 1);
    insert_conn(&mut f, "trivial", ConnectionExpr::trivial(1, 1));
    insert_conn(
        &mut f,
        "gamma",
        ConnectionExpr::christoffel(vec![pm(vec![vec![x(0)]])]),
    );
    f
}

pub fn file_by_name(name: &str) -> Option<FixtureFile> {
    Some(match name {
        "abelian3" => abelian3_file(),
        "so3" => so3_file(),
        "nonabelian2" => nonabelian2_file(),
        "chart2" => chart2_file(),
        "foliation" => foliation_file(),
        "chart3" => chart3_file(),
        "chart1" => chart1_file(),
        _ => return None,
    })
}

pub fn by_name(name: &str) -> Option<Fixture> {
    file_by_name(name).map(|f| f.resolve().expect("built-in fixtures resolve"))
}

pub fn all() -> Vec<Fixture> {
    NAMES
        .iter()
        .map(|n| by_name(n).expect("known name"))
        .collect()
}

pub fn all_algebroids() -> Vec<(String, AlgebroidSpec)> {
    all().into_iter().map(|f| (f.name, f.algebroid)).collect()
}

/// Every fixture's setting and resolved connections.
pub fn connection_zoo() -> Vec<(String, Setting, Vec<(String, ConnectionExpr)>)> {
    all()
        .into_iter()
        .map(|f| {
            let set = f.setting();
            let conns = f.connections.into_iter().collect();
            (f.name, set, conns)
        })
        .collect()
}

pub fn connection_zoo_for(name: &str) -> Vec<(String, ConnectionExpr)> {
    by_name(name)
        .expect("known fixture")
        .connections
        .into_iter()
        .collect()
}

/// A metric on the bundle of a setting: constant over a point, with a
/// polynomial off-diagonal entry over a chart.
pub fn sample_metric(set: &Setting) -> Metric {
    let r = set.rank;
    let chart = set.alg.chart_dim() > 0;
    let h = EndMat::from_fn(r, |i, j| {
        if i == j {
            if chart && i == 0 && r > 1 {
                RFrac::from_poly(&c(1) + &x(0).pow(2))
            } else {
                RFrac::int(i as i64 + 1)
            }
        } else if chart && (i, j) == (0, 1) || (i, j) == (1, 0) && chart {
            RFrac::from_poly(x(0))
        } else {
            RFrac::zero()
        }
    });
    Metric::new(h).expect("sample metric is non-degenerate")
}
