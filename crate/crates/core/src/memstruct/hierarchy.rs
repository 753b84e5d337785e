//! Cumulative hierarchy stages built with powers: stage 0 is empty, stage
//! `j+1` holds every node whose extension lies inside the stages so far.
//! Limit stages never occur at finite scale.

use super::{MemStructure, NodeSet, StructError};

pub fn hierarchy_stages(s: &MemStructure, steps: usize) -> Result<Vec<NodeSet>, StructError> {
    if steps == 0 {
        return Err(StructError::InvalidArgument("hierarchy needs at least one step".into()));
    }
    let mut stages = vec![NodeSet::new()];
    let mut closure = vec![false; s.len()];
    for _ in 0..steps {
        let next: NodeSet =
            s.nodes().filter(|&z| s.members(z).iter().all(|&m| closure[m])).collect();
        for &z in &next {
            closure[z] = true;
        }
        stages.push(next);
    }
    Ok(stages)
}

/// `x` appears in some stage `≤ |S|`; that many steps always reach the fixpoint.
pub fn in_hierarchy(s: &MemStructure, x: usize) -> Result<bool, StructError> {
    if x >= s.len() {
        return Err(StructError::NodeOutOfRange { node: x, len: s.len() });
    }
    let stages = hierarchy_stages(s, s.len().max(1))?;
    Ok(stages.iter().any(|st| st.contains(&x)))
}
