//! Module decomposition of the fault tree.
//!
//! A module is an independent subtree whose failure alone causes the top
//! event. Starting from the root, OR gates are flattened; every non-OR node
//! reached through OR gates only becomes a module. Modules are numbered in
//! depth-first, left-to-right order of the tree.

use serde::Serialize;

use crate::error::DecompositionError;
use crate::model::{ComponentId, GateNode, SystemModel};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModuleDef {
    /// One-based module number.
    pub index: usize,
    /// Sorted member component ids.
    pub members: Vec<ComponentId>,
    #[serde(skip)]
    pub subtree: GateNode,
}

impl ModuleDef {
    pub fn is_singleton(&self) -> bool {
        self.members.len() == 1
    }
}

/// Decomposes a model's tree. Pure; equal to the decomposition stored on the
/// model at build time.
pub fn decompose(model: &SystemModel) -> Result<Vec<ModuleDef>, DecompositionError> {
    decompose_tree(&model.tree, model.n_components())
}

pub fn decompose_tree(
    tree: &GateNode,
    n_components: usize,
) -> Result<Vec<ModuleDef>, DecompositionError> {
    let mut roots = Vec::new();
    collect_module_roots(tree, &mut roots);

    let mut owner: Vec<Option<usize>> = vec![None; n_components];
    let mut modules = Vec::with_capacity(roots.len());
    for (j, root) in roots.into_iter().enumerate() {
        let mut members = root.leaves();
        for id in &members {
            let slot = owner
                .get_mut(id.index())
                .ok_or(DecompositionError::UnknownComponent(*id))?;
            match slot {
                Some(prev) => {
                    return Err(DecompositionError::SharedComponent {
                        component: *id,
                        first: *prev + 1,
                        second: j + 1,
                    })
                }
                None => *slot = Some(j),
            }
        }
        members.sort();
        modules.push(ModuleDef {
            index: j + 1,
            members,
            subtree: root.clone(),
        });
    }
    if let Some(i) = owner.iter().position(Option::is_none) {
        return Err(DecompositionError::Unassigned(ComponentId::from_index(i)));
    }
    Ok(modules)
}

fn collect_module_roots<'a>(node: &'a GateNode, out: &mut Vec<&'a GateNode>) {
    match node {
        GateNode::Or { children, .. } => {
            for c in children {
                collect_module_roots(c, out);
            }
        }
        other => out.push(other),
    }
}

/// `flags[i]` is true when component `i + 1` forms a singleton module.
pub fn criticality(modules: &[ModuleDef], n_components: usize) -> Vec<bool> {
    let mut flags = vec![false; n_components];
    for m in modules.iter().filter(|m| m.is_singleton()) {
        flags[m.members[0].index()] = true;
    }
    flags
}

/// Zero-based module position of every component.
pub fn module_of(modules: &[ModuleDef], n_components: usize) -> Vec<usize> {
    let mut out = vec![usize::MAX; n_components];
    for (j, m) in modules.iter().enumerate() {
        for id in &m.members {
            out[id.index()] = j;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(i: u32) -> GateNode {
        GateNode::Basic(ComponentId(i))
    }

    fn or(children: Vec<GateNode>) -> GateNode {
        GateNode::Or {
            label: None,
            children,
        }
    }

    fn and(children: Vec<GateNode>) -> GateNode {
        GateNode::And {
            label: None,
            children,
        }
    }

    fn ids(v: &[u32]) -> Vec<ComponentId> {
        v.iter().map(|&i| ComponentId(i)).collect()
    }

    #[test]
    fn single_critical_component() {
        let mods = decompose_tree(&or(vec![b(1)]), 1).unwrap();
        assert_eq!(mods.len(), 1);
        assert_eq!(mods[0].members, ids(&[1]));
        assert_eq!(criticality(&mods, 1), vec![true]);
    }

    #[test]
    fn and_pair_plus_critical() {
        let tree = or(vec![and(vec![b(1), b(2)]), b(3)]);
        let mods = decompose_tree(&tree, 3).unwrap();
        assert_eq!(mods[0].members, ids(&[1, 2]));
        assert_eq!(mods[1].members, ids(&[3]));
        assert_eq!(criticality(&mods, 3), vec![false, false, true]);
    }

    /// Brute-force oracle: enumerate all failure sets of the 3-component tree
    /// and confirm each module's members form a cut set on their own.
    #[test]
    fn modules_are_cut_sets_by_enumeration() {
        let tree = or(vec![and(vec![b(1), b(2)]), b(3)]);
        let mods = decompose_tree(&tree, 3).unwrap();
        let cut_sets: Vec<u32> = (0u32..8)
            .filter(|mask| tree.is_failed_static(&|id| mask & (1 << (id.0 - 1)) != 0))
            .collect();
        assert_eq!(cut_sets, vec![0b011, 0b100, 0b101, 0b110, 0b111]);
        for m in &mods {
            let mask = m.members.iter().fold(0u32, |acc, id| acc | 1 << (id.0 - 1));
            assert!(
                cut_sets.contains(&mask),
                "module {} is not a cut set",
                m.index
            );
        }
    }

    #[test]
    fn nested_or_gates_are_flattened_in_tree_order() {
        let tree = or(vec![or(vec![b(3), and(vec![b(1), b(2)])]), or(vec![b(4)])]);
        let mods = decompose_tree(&tree, 4).unwrap();
        let members: Vec<_> = mods.iter().map(|m| m.members.clone()).collect();
        assert_eq!(members, vec![ids(&[3]), ids(&[1, 2]), ids(&[4])]);
        assert_eq!(module_of(&mods, 4), vec![1, 1, 0, 2]);
    }

    #[test]
    fn non_or_root_is_one_module() {
        let tree = and(vec![b(1), b(2)]);
        let mods = decompose_tree(&tree, 2).unwrap();
        assert_eq!(mods.len(), 1);
        assert_eq!(mods[0].members, ids(&[1, 2]));
    }

    #[test]
    fn shared_component_is_named() {
        let tree = or(vec![and(vec![b(1), b(2)]), and(vec![b(2), b(3)])]);
        let err = decompose_tree(&tree, 3).unwrap_err();
        assert_eq!(
            err,
            DecompositionError::SharedComponent {
                component: ComponentId(2),
                first: 1,
                second: 2
            }
        );
        assert!(err.to_string().contains("component 2"));
    }

    #[test]
    fn unassigned_component() {
        let err = decompose_tree(&or(vec![b(1)]), 2).unwrap_err();
        assert_eq!(err, DecompositionError::Unassigned(ComponentId(2)));
    }
}
