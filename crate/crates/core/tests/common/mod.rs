#![allow(dead_code)]

use cbm_core::{parse_system, GateNode, Role, SystemModel};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

pub const T_M: f64 = 100.0;

/// Random small model: 2-6 components under a random tree of OR, AND,
/// VOTING, FDEP and two-unit SPARE gates. Every component fails a fresh
/// mission with probability between 0.05 and 0.6.
pub fn random_model(seed: u64, missions: usize) -> SystemModel {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=6u32);
    let mut ids: Vec<u32> = (1..=n).collect();
    ids.shuffle(&mut rng);
    let mut spares = Vec::new();
    let tree = random_node(&mut rng, &ids, &mut spares);

    let components: Vec<Value> = (1..=n)
        .map(|id| {
            let shape: f64 = rng.gen_range(1.0..2.5);
            let p: f64 = rng.gen_range(0.05..0.6);
            let scale = T_M / (-(1.0 - p).ln()).powf(1.0 / shape);
            let (role, q) = if spares.contains(&id) {
                if rng.gen_bool(0.5) {
                    ("cold-spare", 0.0)
                } else {
                    ("warm-spare", rng.gen_range(0.1..0.9))
                }
            } else {
                ("starting", 1.0)
            };
            json!({
                "id": id, "shape": shape, "scale": scale, "role": role, "dormancy": q,
                "cm_cost": 100.0, "pm_cost": 40.0, "cms_investment": 10.0,
                "max_min_repairs": rng.gen_range(0..4u32),
            })
        })
        .collect();
    let doc = json!({
        "name": format!("random-{seed}"),
        "components": components,
        "tree": tree,
        "scenario": {
            "t_life": T_M * missions as f64, "t_m": T_M, "iterations": 1,
            "system_failure_cost": 1000.0, "operating_cost": 10.0,
            "degraded_factor": 0.2, "seed": seed,
        },
    });
    parse_system(&doc.to_string()).expect("generated model is valid")
}

fn random_node(rng: &mut ChaCha20Rng, ids: &[u32], spares: &mut Vec<u32>) -> Value {
    if ids.len() == 1 {
        return json!({"basic": ids[0]});
    }
    if ids.len() == 2 && rng.gen_bool(0.3) {
        spares.push(ids[1]);
        return json!({"gate": "SPARE", "primary": {"basic": ids[0]}, "spares": [{"basic": ids[1]}]});
    }
    // Split into 2..=len non-empty consecutive groups.
    let n_children = rng.gen_range(2..=ids.len());
    let mut cuts: Vec<usize> = (1..ids.len()).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts[..n_children - 1].to_vec();
    cuts.sort_unstable();
    let mut groups = Vec::new();
    let mut start = 0;
    for c in cuts.into_iter().chain(std::iter::once(ids.len())) {
        groups.push(&ids[start..c]);
        start = c;
    }
    let children: Vec<Value> = groups.iter().map(|g| random_node(rng, g, spares)).collect();
    match rng.gen_range(0..4) {
        0 => json!({"gate": "OR", "children": children}),
        1 => json!({"gate": "AND", "children": children}),
        2 => {
            let k = rng.gen_range(1..=children.len());
            json!({"gate": "VOTING", "k": k, "children": children})
        }
        _ => {
            let mut it = children.into_iter();
            let trigger = it.next().unwrap();
            json!({"gate": "FDEP", "trigger": trigger, "dependents": it.collect::<Vec<_>>()})
        }
    }
}

pub fn weibull_cdf(t: f64, scale: f64, shape: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        -(-(t / scale).powf(shape)).exp_m1()
    }
}

fn weibull_quantile(u: f64, scale: f64, shape: f64) -> f64 {
    scale * (-(-u).ln_1p()).powf(1.0 / shape)
}

/// Probability a fresh SPARE pair fails within `t_m`: the primary fails at
/// `t`, and the spare has either failed dormant (`t_s <= q t`) or cannot
/// cover the rest (`t_s <= t_m - t`). Integrated over the primary's
/// probability scale with composite Simpson.
fn spare_pair_failure(model: &SystemModel, primary: usize, spare: usize, t_m: f64) -> f64 {
    let p = &model.components[primary];
    let s = &model.components[spare];
    let q = s.dormant_aging();
    let upper = weibull_cdf(t_m, p.scale, p.shape);
    let g = |u: f64| {
        let t = weibull_quantile(u, p.scale, p.shape).min(t_m);
        weibull_cdf((q * t).max(t_m - t), s.scale, s.shape)
    };
    let n = 4000;
    let h = upper / n as f64;
    let mut acc = g(0.0) + g(upper);
    for i in 1..n {
        acc += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Exact single-mission system failure probability for fresh components,
/// by enumeration over independent events: every component outside a SPARE
/// gate, plus one event per SPARE gate.
pub fn exact_mission_failure(model: &SystemModel) -> f64 {
    let t_m = model.scenario.t_m;
    let mut probs: Vec<f64> = Vec::new();
    let mut event_of = vec![usize::MAX; model.n_components()];
    let mut spare_events: Vec<(usize, usize)> = Vec::new();
    collect_events(
        &model.tree,
        model,
        t_m,
        &mut probs,
        &mut event_of,
        &mut spare_events,
    );
    let n = probs.len();
    let mut total = 0.0;
    for mask in 0u32..(1 << n) {
        let failed = |e: usize| mask & (1 << e) != 0;
        let weight: f64 = (0..n)
            .map(|e| if failed(e) { probs[e] } else { 1.0 - probs[e] })
            .product();
        if eval(&model.tree, &event_of, &spare_events, &failed) {
            total += weight;
        }
    }
    total
}

fn collect_events(
    node: &GateNode,
    model: &SystemModel,
    t_m: f64,
    probs: &mut Vec<f64>,
    event_of: &mut [usize],
    spare_events: &mut Vec<(usize, usize)>,
) {
    match node {
        GateNode::Basic(id) => {
            let c = &model.components[id.index()];
            assert_eq!(c.role, Role::Starting);
            event_of[id.index()] = probs.len();
            probs.push(weibull_cdf(t_m, c.scale, c.shape));
        }
        GateNode::Spare {
            primary, spares, ..
        } => {
            let (GateNode::Basic(p), [GateNode::Basic(s)]) = (primary.as_ref(), spares.as_slice())
            else {
                panic!("oracle handles basic two-unit SPARE gates only")
            };
            spare_events.push((p.index(), probs.len()));
            probs.push(spare_pair_failure(model, p.index(), s.index(), t_m));
        }
        other => {
            for c in other.children() {
                collect_events(c, model, t_m, probs, event_of, spare_events);
            }
        }
    }
}

fn eval(
    node: &GateNode,
    event_of: &[usize],
    spare_events: &[(usize, usize)],
    failed: &dyn Fn(usize) -> bool,
) -> bool {
    let kids = |n: &GateNode| -> Vec<bool> {
        n.children()
            .into_iter()
            .map(|c| eval(c, event_of, spare_events, failed))
            .collect()
    };
    match node {
        GateNode::Basic(id) => failed(event_of[id.index()]),
        GateNode::Spare { primary, .. } => {
            let GateNode::Basic(p) = primary.as_ref() else {
                unreachable!()
            };
            let e = spare_events
                .iter()
                .find(|(pi, _)| *pi == p.index())
                .unwrap()
                .1;
            failed(e)
        }
        GateNode::Or { .. } | GateNode::Fdep { .. } => kids(node).into_iter().any(|b| b),
        GateNode::And { .. } => kids(node).into_iter().all(|b| b),
        GateNode::Voting { k, .. } => kids(node).into_iter().filter(|&b| b).count() >= *k,
    }
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// One-sample KS statistic against a continuous CDF.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value at the 1% level.
pub const KS_C_1PCT: f64 = 1.628;
