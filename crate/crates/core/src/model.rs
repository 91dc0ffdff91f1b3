//! Static system description: components, the dynamic fault tree, cost
//! constants and scenario parameters, plus the JSON system-file schema.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::ModelError;
use crate::modules::{self, ModuleDef};

/// One-based component identifier, dense over `1..=N_comp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComponentId(pub u32);

impl ComponentId {
    /// Zero-based index into per-component arrays.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(index: usize) -> Self {
        ComponentId(index as u32 + 1)
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    /// Active from the start of every mission.
    Starting,
    /// Standby unit that does not age while dormant.
    ColdSpare,
    /// Standby unit that ages at `dormancy` times the mission clock while dormant.
    WarmSpare,
}

impl Role {
    pub fn is_spare(self) -> bool {
        !matches!(self, Role::Starting)
    }

    fn as_str(self) -> &'static str {
        match self {
            Role::Starting => "starting",
            Role::ColdSpare => "cold-spare",
            Role::WarmSpare => "warm-spare",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub id: ComponentId,
    #[serde(default)]
    pub label: String,
    /// Weibull shape.
    pub shape: f64,
    /// Weibull scale, hours.
    pub scale: f64,
    /// Dormancy factor q. Starting components age at rate 1 regardless.
    pub dormancy: f64,
    pub role: Role,
    pub cm_cost: f64,
    pub pm_cost: f64,
    pub cms_investment: f64,
    pub max_min_repairs: u32,
    /// Source exponential failure rate (per hour) the Weibull scale was
    /// converted from, when the dataset records it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_rate: Option<f64>,
}

impl ComponentSpec {
    /// Aging rate while the component is dormant (1 for starting units).
    pub fn dormant_aging(&self) -> f64 {
        match self.role {
            Role::Starting => 1.0,
            Role::ColdSpare => 0.0,
            Role::WarmSpare => self.dormancy,
        }
    }

    /// Weibull mean time to failure, `scale * Γ(1 + 1/shape)`.
    pub fn mttf(&self) -> f64 {
        self.scale * statrs::function::gamma::gamma(1.0 + 1.0 / self.shape)
    }
}

/// A node of the dynamic fault tree.
#[derive(Debug, Clone, PartialEq)]
pub enum GateNode {
    Basic(ComponentId),
    Or {
        label: Option<String>,
        children: Vec<GateNode>,
    },
    And {
        label: Option<String>,
        children: Vec<GateNode>,
    },
    Voting {
        label: Option<String>,
        k: usize,
        children: Vec<GateNode>,
    },
    /// Standby redundancy: spares take over in declared order.
    Spare {
        label: Option<String>,
        primary: Box<GateNode>,
        spares: Vec<GateNode>,
    },
    /// Functional dependency: the gate fails when the trigger or any
    /// dependent fails.
    Fdep {
        label: Option<String>,
        trigger: Box<GateNode>,
        dependents: Vec<GateNode>,
    },
}

impl GateNode {
    pub fn kind_name(&self) -> &'static str {
        match self {
            GateNode::Basic(_) => "BASIC",
            GateNode::Or { .. } => "OR",
            GateNode::And { .. } => "AND",
            GateNode::Voting { .. } => "VOTING",
            GateNode::Spare { .. } => "SPARE",
            GateNode::Fdep { .. } => "FDEP",
        }
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            GateNode::Basic(_) => None,
            GateNode::Or { label, .. }
            | GateNode::And { label, .. }
            | GateNode::Voting { label, .. }
            | GateNode::Spare { label, .. }
            | GateNode::Fdep { label, .. } => label.as_deref(),
        }
    }

    /// Direct children, in evaluation order (primary/trigger first).
    pub fn children(&self) -> Vec<&GateNode> {
        match self {
            GateNode::Basic(_) => Vec::new(),
            GateNode::Or { children, .. }
            | GateNode::And { children, .. }
            | GateNode::Voting { children, .. } => children.iter().collect(),
            GateNode::Spare {
                primary, spares, ..
            } => std::iter::once(primary.as_ref()).chain(spares).collect(),
            GateNode::Fdep {
                trigger,
                dependents,
                ..
            } => std::iter::once(trigger.as_ref())
                .chain(dependents)
                .collect(),
        }
    }

    /// Component ids of every BASIC leaf below this node, in tree order.
    pub fn leaves(&self) -> Vec<ComponentId> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<ComponentId>) {
        match self {
            GateNode::Basic(id) => out.push(*id),
            _ => {
                for c in self.children() {
                    c.collect_leaves(out);
                }
            }
        }
    }

    /// Static structure function: is this node failed given a set of failed
    /// components? SPARE is failed when its primary and all spares are.
    pub fn is_failed_static(&self, failed: &dyn Fn(ComponentId) -> bool) -> bool {
        match self {
            GateNode::Basic(id) => failed(*id),
            GateNode::Or { children, .. } => children.iter().any(|c| c.is_failed_static(failed)),
            GateNode::And { children, .. } => children.iter().all(|c| c.is_failed_static(failed)),
            GateNode::Voting { k, children, .. } => {
                children
                    .iter()
                    .filter(|c| c.is_failed_static(failed))
                    .count()
                    >= *k
            }
            GateNode::Spare {
                primary, spares, ..
            } => {
                primary.is_failed_static(failed)
                    && spares.iter().all(|s| s.is_failed_static(failed))
            }
            GateNode::Fdep {
                trigger,
                dependents,
                ..
            } => {
                trigger.is_failed_static(failed)
                    || dependents.iter().any(|d| d.is_failed_static(failed))
            }
        }
    }

    pub(crate) fn to_value(&self) -> Value {
        let mut obj = Map::new();
        match self {
            GateNode::Basic(id) => return json!({ "basic": id.0 }),
            GateNode::Or { children, .. } | GateNode::And { children, .. } => {
                obj.insert("gate".into(), self.kind_name().into());
                obj.insert("children".into(), nodes_to_value(children));
            }
            GateNode::Voting { k, children, .. } => {
                obj.insert("gate".into(), "VOTING".into());
                obj.insert("k".into(), (*k).into());
                obj.insert("children".into(), nodes_to_value(children));
            }
            GateNode::Spare {
                primary, spares, ..
            } => {
                obj.insert("gate".into(), "SPARE".into());
                obj.insert("primary".into(), primary.to_value());
                obj.insert("spares".into(), nodes_to_value(spares));
            }
            GateNode::Fdep {
                trigger,
                dependents,
                ..
            } => {
                obj.insert("gate".into(), "FDEP".into());
                obj.insert("trigger".into(), trigger.to_value());
                obj.insert("dependents".into(), nodes_to_value(dependents));
            }
        }
        if let Some(label) = self.label() {
            obj.insert("label".into(), label.into());
        }
        Value::Object(obj)
    }

    pub(crate) fn from_value(value: &Value, path: &str) -> Result<GateNode, Violation> {
        let obj = value
            .as_object()
            .ok_or_else(|| Violation::new(path, "gate node must be a JSON object"))?;
        if let Some(id) = obj.get("basic") {
            let id = id
                .as_u64()
                .filter(|&v| v >= 1 && v <= u32::MAX as u64)
                .ok_or_else(|| {
                    Violation::new(path, "\"basic\" must be a positive integer component id")
                })?;
            return Ok(GateNode::Basic(ComponentId(id as u32)));
        }
        let gate = obj
            .get("gate")
            .and_then(Value::as_str)
            .ok_or_else(|| Violation::new(path, "node needs either \"basic\" or \"gate\""))?;
        let label = obj.get("label").and_then(Value::as_str).map(str::to_owned);
        let list = |key: &str| -> Result<Vec<GateNode>, Violation> {
            let arr = obj.get(key).and_then(Value::as_array).ok_or_else(|| {
                Violation::new(path, format!("{gate} gate needs a \"{key}\" array"))
            })?;
            arr.iter()
                .enumerate()
                .map(|(i, v)| GateNode::from_value(v, &format!("{path}/{key}/{i}")))
                .collect()
        };
        let single = |key: &str| -> Result<Box<GateNode>, Violation> {
            let v = obj.get(key).ok_or_else(|| {
                Violation::new(path, format!("{gate} gate needs a \"{key}\" node"))
            })?;
            GateNode::from_value(v, &format!("{path}/{key}")).map(Box::new)
        };
        match gate {
            "OR" => Ok(GateNode::Or {
                label,
                children: list("children")?,
            }),
            "AND" => Ok(GateNode::And {
                label,
                children: list("children")?,
            }),
            "VOTING" => {
                let k = obj
                    .get("k")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| Violation::new(path, "VOTING gate needs an integer \"k\""))?;
                Ok(GateNode::Voting {
                    label,
                    k: k as usize,
                    children: list("children")?,
                })
            }
            "SPARE" => Ok(GateNode::Spare {
                label,
                primary: single("primary")?,
                spares: list("spares")?,
            }),
            "FDEP" => Ok(GateNode::Fdep {
                label,
                trigger: single("trigger")?,
                dependents: list("dependents")?,
            }),
            "PAND" | "SEQ" => Err(Violation::new(
                path,
                format!("{gate} gates are not supported; only OR, AND, VOTING, SPARE and FDEP"),
            )),
            other => Err(Violation::new(
                path,
                format!("unknown gate type \"{other}\""),
            )),
        }
    }
}

fn nodes_to_value(nodes: &[GateNode]) -> Value {
    Value::Array(nodes.iter().map(GateNode::to_value).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Desired operating life, hours.
    pub t_life: f64,
    /// Mission length, hours.
    pub t_m: f64,
    pub iterations: usize,
    pub system_failure_cost: f64,
    /// Value of one operating hour, dollars.
    pub operating_cost: f64,
    /// Fraction of the hourly value lost while degraded.
    pub degraded_factor: f64,
    pub seed: u64,
}

impl ScenarioConfig {
    /// Missions per lifetime, `t_life / t_m`, when that ratio is a positive
    /// integer.
    pub fn missions(&self) -> Option<usize> {
        if self.t_m.is_nan() || self.t_m <= 0.0 || self.t_life.is_nan() || self.t_life <= 0.0 {
            return None;
        }
        let n = self.t_life / self.t_m;
        let r = n.round();
        if r >= 1.0 && (n - r).abs() <= 1e-9 * r {
            Some(r as usize)
        } else {
            None
        }
    }
}

/// A validated system: components, fault tree, scenario and the derived
/// module decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    pub name: String,
    pub components: Vec<ComponentSpec>,
    pub tree: GateNode,
    pub scenario: ScenarioConfig,
    /// `criticality[i]` is true when component `i + 1` forms a module alone.
    pub criticality: Vec<bool>,
    pub modules: Vec<ModuleDef>,
}

impl SystemModel {
    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, id: ComponentId) -> &ComponentSpec {
        &self.components[id.index()]
    }

    pub fn missions(&self) -> usize {
        self.scenario
            .missions()
            .expect("validated model has integer mission count")
    }

    pub fn critical_components(&self) -> Vec<ComponentId> {
        self.criticality
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(i, _)| ComponentId::from_index(i))
            .collect()
    }

    pub fn to_value(&self) -> Value {
        json!({
            "name": self.name,
            "components": self.components,
            "tree": self.tree.to_value(),
            "scenario": self.scenario,
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("model serializes")
    }

    /// SHA-256 of the canonical (compact) serialization.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(&self.to_value()).expect("model serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

/// One invariant breach, located by a JSON-pointer-like path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl Violation {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation::new(path, message));
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// The parsed but not yet validated content of a system file.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemDocument {
    pub name: String,
    pub components: Vec<ComponentSpec>,
    pub tree: GateNode,
    pub scenario: ScenarioConfig,
}

#[derive(Deserialize)]
struct RawComponent {
    id: u32,
    #[serde(default)]
    label: String,
    shape: f64,
    scale: f64,
    #[serde(default)]
    dormancy: Option<f64>,
    role: Role,
    cm_cost: f64,
    pm_cost: f64,
    cms_investment: f64,
    max_min_repairs: u32,
    #[serde(default)]
    failure_rate: Option<f64>,
}

impl SystemDocument {
    /// Parses the JSON text into a document. Structural problems (bad JSON,
    /// missing keys, unsupported gates) are errors; semantic invariants are
    /// left to [`validate_document`].
    pub fn from_json(text: &str) -> Result<SystemDocument, ModelError> {
        let root: Value = serde_json::from_str(text)?;
        let obj = root.as_object().ok_or_else(|| {
            ModelError::Invalid(single_violation("", "system file must be a JSON object"))
        })?;
        let mut report = ValidationReport::default();

        let name = obj
            .get("name")
            .and_then(Value::as_str)
            .unwrap_or("")
            .to_owned();

        let mut components = Vec::new();
        match obj.get("components").and_then(Value::as_array) {
            None => report.push("/components", "missing \"components\" array"),
            Some(arr) => {
                for (i, v) in arr.iter().enumerate() {
                    match serde_json::from_value::<RawComponent>(v.clone()) {
                        Ok(raw) => components.push(ComponentSpec {
                            id: ComponentId(raw.id),
                            label: raw.label,
                            shape: raw.shape,
                            scale: raw.scale,
                            dormancy: raw.dormancy.unwrap_or(match raw.role {
                                Role::Starting => 1.0,
                                Role::ColdSpare => 0.0,
                                Role::WarmSpare => f64::NAN,
                            }),
                            role: raw.role,
                            cm_cost: raw.cm_cost,
                            pm_cost: raw.pm_cost,
                            cms_investment: raw.cms_investment,
                            max_min_repairs: raw.max_min_repairs,
                            failure_rate: raw.failure_rate,
                        }),
                        Err(e) => report.push(format!("/components/{i}"), e.to_string()),
                    }
                }
            }
        }

        let tree = match obj.get("tree") {
            None => {
                report.push("/tree", "missing \"tree\"");
                None
            }
            Some(v) => match GateNode::from_value(v, "/tree") {
                Ok(t) => Some(t),
                Err(v) => {
                    report.violations.push(v);
                    None
                }
            },
        };

        let scenario = match obj.get("scenario") {
            None => {
                report.push("/scenario", "missing \"scenario\"");
                None
            }
            Some(v) => match serde_json::from_value::<ScenarioConfig>(v.clone()) {
                Ok(s) => Some(s),
                Err(e) => {
                    report.push("/scenario", e.to_string());
                    None
                }
            },
        };

        match (tree, scenario) {
            (Some(tree), Some(scenario)) if report.is_empty() => Ok(SystemDocument {
                name,
                components,
                tree,
                scenario,
            }),
            _ => Err(ModelError::Invalid(report)),
        }
    }
}

fn single_violation(path: &str, message: &str) -> ValidationReport {
    ValidationReport {
        violations: vec![Violation::new(path, message)],
    }
}

/// Checks every invariant of a document; an empty report means the model is
/// simulable.
pub fn validate_document(doc: &SystemDocument) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = doc.components.len();

    // Components: dense ids, parameter domains, role/dormancy agreement.
    let mut seen: BTreeMap<u32, usize> = BTreeMap::new();
    for (pos, c) in doc.components.iter().enumerate() {
        let path = format!("/components/{pos}");
        if let Some(prev) = seen.insert(c.id.0, pos) {
            report.push(
                &path,
                format!(
                    "duplicate component id {} (also at /components/{prev})",
                    c.id
                ),
            );
        }
        if c.id.0 == 0 || c.id.0 as usize > n {
            report.push(&path, format!("component id {} outside 1..={n}", c.id));
        } else if c.id.index() != pos {
            report.push(&path, format!("component id {} listed out of order", c.id));
        }
        if !(c.shape > 0.0 && c.shape.is_finite()) {
            report.push(&path, "shape must be > 0");
        }
        if !(c.scale > 0.0 && c.scale.is_finite()) {
            report.push(&path, "scale must be > 0");
        }
        for (name, v) in [
            ("cm_cost", c.cm_cost),
            ("pm_cost", c.pm_cost),
            ("cms_investment", c.cms_investment),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                report.push(&path, format!("{name} must be >= 0"));
            }
        }
        if c.pm_cost > c.cm_cost {
            report.push(&path, "pm_cost must not exceed cm_cost");
        }
        match c.role {
            Role::ColdSpare if c.dormancy != 0.0 => report.push(&path, "cold-spare must have q=0"),
            Role::WarmSpare if !(c.dormancy > 0.0 && c.dormancy < 1.0) => {
                report.push(&path, "warm-spare must have 0 < q < 1")
            }
            Role::Starting if !(0.0..=1.0).contains(&c.dormancy) => {
                report.push(&path, "dormancy must lie in [0, 1]")
            }
            _ => {}
        }
        if let Some(rate) = c.failure_rate {
            if !(rate > 0.0 && rate.is_finite()) {
                report.push(&path, "failure_rate must be > 0");
            }
        }
    }

    // Tree: arity, references, leaf uniqueness, spare roles.
    let mut leaf_paths: BTreeMap<u32, String> = BTreeMap::new();
    check_node(doc, &doc.tree, "/tree", false, &mut leaf_paths, &mut report);
    for c in &doc.components {
        if c.id.0 >= 1 && c.id.0 as usize <= n && !leaf_paths.contains_key(&c.id.0) {
            report.push(
                format!("/components/{}", c.id.index()),
                format!("component {} does not appear in the tree", c.id),
            );
        }
    }

    // Scenario.
    let s = &doc.scenario;
    if s.missions().is_none() {
        report.push("/scenario", "t_life / t_m must be a positive integer");
    }
    if !(0.0..=1.0).contains(&s.degraded_factor) {
        report.push("/scenario/degraded_factor", "must lie in [0, 1]");
    }
    for (name, v) in [
        ("system_failure_cost", s.system_failure_cost),
        ("operating_cost", s.operating_cost),
    ] {
        if !(v >= 0.0 && v.is_finite()) {
            report.push(format!("/scenario/{name}"), "must be >= 0");
        }
    }
    if s.iterations == 0 {
        report.push("/scenario/iterations", "must be >= 1");
    }
    report
}

fn check_node(
    doc: &SystemDocument,
    node: &GateNode,
    path: &str,
    as_spare: bool,
    leaf_paths: &mut BTreeMap<u32, String>,
    report: &mut ValidationReport,
) {
    let n = doc.components.len();
    match node {
        GateNode::Basic(id) => {
            if id.0 == 0 || id.0 as usize > n {
                report.push(path, format!("dangling reference to component {id}"));
                return;
            }
            if let Some(prev) = leaf_paths.insert(id.0, path.to_owned()) {
                report.push(
                    path,
                    format!("duplicate leaf: component {id} already referenced at {prev}"),
                );
            }
            let role = doc
                .components
                .get(id.index())
                .filter(|c| c.id == *id)
                .or_else(|| doc.components.iter().find(|c| c.id == *id))
                .map(|c| c.role);
            match role {
                Some(r) if as_spare && !r.is_spare() => report.push(
                    path,
                    format!("component {id} is a SPARE gate spare but has role starting"),
                ),
                Some(r) if !as_spare && r.is_spare() => report.push(
                    path,
                    format!(
                        "component {id} has role {} but is not a spare of a SPARE gate",
                        r.as_str()
                    ),
                ),
                _ => {}
            }
            return;
        }
        GateNode::Or { children, .. } | GateNode::And { children, .. } => {
            if children.is_empty() {
                report.push(path, format!("{} gate has no children", node.kind_name()));
            }
        }
        GateNode::Voting { k, children, .. } => {
            if *k < 1 || *k > children.len() {
                report.push(
                    path,
                    format!("VOTING k={k} must lie in 1..={}", children.len()),
                );
            }
        }
        GateNode::Spare { spares, .. } => {
            if spares.is_empty() {
                report.push(path, "SPARE gate has no spares");
            }
            for (i, s) in spares.iter().enumerate() {
                if !matches!(s, GateNode::Basic(_)) {
                    report.push(
                        format!("{path}/spares/{i}"),
                        "SPARE spares must be BASIC components",
                    );
                }
            }
        }
        GateNode::Fdep { dependents, .. } => {
            if dependents.is_empty() {
                report.push(path, "FDEP gate has no dependents");
            }
        }
    }
    match node {
        GateNode::Spare {
            primary, spares, ..
        } => {
            check_node(
                doc,
                primary,
                &format!("{path}/primary"),
                false,
                leaf_paths,
                report,
            );
            for (i, s) in spares.iter().enumerate() {
                if matches!(s, GateNode::Basic(_)) {
                    check_node(
                        doc,
                        s,
                        &format!("{path}/spares/{i}"),
                        true,
                        leaf_paths,
                        report,
                    );
                }
            }
        }
        GateNode::Fdep {
            trigger,
            dependents,
            ..
        } => {
            check_node(
                doc,
                trigger,
                &format!("{path}/trigger"),
                false,
                leaf_paths,
                report,
            );
            for (i, d) in dependents.iter().enumerate() {
                check_node(
                    doc,
                    d,
                    &format!("{path}/dependents/{i}"),
                    false,
                    leaf_paths,
                    report,
                );
            }
        }
        GateNode::Or { children, .. }
        | GateNode::And { children, .. }
        | GateNode::Voting { children, .. } => {
            for (i, c) in children.iter().enumerate() {
                check_node(
                    doc,
                    c,
                    &format!("{path}/children/{i}"),
                    false,
                    leaf_paths,
                    report,
                );
            }
        }
        GateNode::Basic(_) => unreachable!(),
    }
}

/// Validates a built model (same invariants as the document check, plus
/// agreement of the stored criticality flags with the decomposition).
pub fn validate(model: &SystemModel) -> ValidationReport {
    let doc = SystemDocument {
        name: model.name.clone(),
        components: model.components.clone(),
        tree: model.tree.clone(),
        scenario: model.scenario.clone(),
    };
    let mut report = validate_document(&doc);
    if report.is_empty() {
        match modules::decompose_tree(&model.tree, model.components.len()) {
            Ok(mods) => {
                let derived = modules::criticality(&mods, model.components.len());
                if derived != model.criticality {
                    report.push(
                        "/criticality",
                        "criticality flags disagree with module decomposition",
                    );
                }
            }
            Err(e) => report.push("/tree", e.to_string()),
        }
    }
    report
}

/// Parses, validates and decomposes a system file.
pub fn parse_system(text: &str) -> Result<SystemModel, ModelError> {
    let doc = SystemDocument::from_json(text)?;
    build_model(doc)
}

/// Validates a document and derives its modules and criticality flags.
pub fn build_model(doc: SystemDocument) -> Result<SystemModel, ModelError> {
    let report = validate_document(&doc);
    if !report.is_empty() {
        return Err(ModelError::Invalid(report));
    }
    let modules = modules::decompose_tree(&doc.tree, doc.components.len())?;
    let criticality = modules::criticality(&modules, doc.components.len());
    Ok(SystemModel {
        name: doc.name,
        components: doc.components,
        tree: doc.tree,
        scenario: doc.scenario,
        criticality,
        modules,
    })
}
