//! Walk representation, cost accounting, feasibility validation and the
//! JSON document shared by all solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Task,
    Recharge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub node: NodeId,
    pub kind: StepKind,
}

/// A walk through the instance: travel legs between consecutive steps,
/// with the battery resetting at every depot step. Starts and ends at a
/// depot.
#[derive(Debug, Clone, PartialEq)]
pub struct Walk {
    steps: Vec<Step>,
}

impl Walk {
    /// Build a walk from a node sequence. Step kinds are derived from the
    /// instance's depot set and consecutive duplicate depot visits are
    /// collapsed so that zero-length legs cannot inflate recharge counts.
    pub fn from_nodes<I: IntoIterator<Item = NodeId>>(instance: &Instance, nodes: I) -> Walk {
        let mut steps: Vec<Step> = Vec::new();
        for node in nodes {
            let kind = if instance.is_depot(node) {
                StepKind::Recharge
            } else {
                StepKind::Task
            };
            if let Some(last) = steps.last() {
                if last.node == node && kind == StepKind::Recharge {
                    continue;
                }
            }
            steps.push(Step { node, kind });
        }
        Walk { steps }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.steps.iter().map(|s| s.node)
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Total length and recharge count of a walk. The count is the number of
/// depot visits after the first: the robot starts fully charged.
pub fn walk_cost(instance: &Instance, walk: &Walk) -> (f64, usize) {
    let mut cost = 0.0;
    let mut depot_visits = 0usize;
    let mut prev: Option<NodeId> = None;
    for step in walk.steps() {
        if let Some(p) = prev {
            cost += instance.dist(p, step.node);
        }
        if step.kind == StepKind::Recharge {
            depot_visits += 1;
        }
        prev = Some(step.node);
    }
    (cost, depot_visits.saturating_sub(1))
}

/// Why a walk failed validation.
#[derive(Debug, Clone, PartialEq)]
pub enum WalkViolation {
    Empty,
    EndpointNotDepot { node: NodeId },
    /// A maximal sub-walk between consecutive depot visits exceeds the
    /// discharge budget; indices are step positions.
    LegTooLong {
        from_step: usize,
        to_step: usize,
        length: f64,
    },
    MissingVertices(Vec<NodeId>),
    KindMismatch { node: NodeId },
}

impl std::fmt::Display for WalkViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WalkViolation::Empty => write!(f, "walk is empty"),
            WalkViolation::EndpointNotDepot { node } => {
                write!(f, "walk endpoint {node} is not a depot")
            }
            WalkViolation::LegTooLong {
                from_step,
                to_step,
                length,
            } => write!(
                f,
                "sub-walk between depot visits at steps {from_step}..{to_step} has length {length}"
            ),
            WalkViolation::MissingVertices(vs) => {
                write!(f, "walk misses {} task vertices (first: {:?})", vs.len(), vs.first())
            }
            WalkViolation::KindMismatch { node } => {
                write!(f, "step kind disagrees with node role at node {node}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Feasible,
    Infeasible(WalkViolation),
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible)
    }
}

/// Check that a walk starts and ends at depots, never travels more than
/// the discharge budget between consecutive depot visits, and visits every
/// task vertex. Unknown node ids are an error, not a verdict.
pub fn validate_walk(instance: &Instance, walk: &Walk) -> Result<Verdict> {
    if walk.is_empty() {
        return Ok(Verdict::Infeasible(WalkViolation::Empty));
    }
    for step in walk.steps() {
        if step.node >= instance.n_total() {
            return Err(Error::UnknownNode(step.node));
        }
        let is_depot = instance.is_depot(step.node);
        let expect = if is_depot {
            StepKind::Recharge
        } else {
            StepKind::Task
        };
        if step.kind != expect {
            return Ok(Verdict::Infeasible(WalkViolation::KindMismatch {
                node: step.node,
            }));
        }
    }
    let steps = walk.steps();
    let first = steps[0];
    let last = steps[steps.len() - 1];
    if first.kind != StepKind::Recharge {
        return Ok(Verdict::Infeasible(WalkViolation::EndpointNotDepot {
            node: first.node,
        }));
    }
    if last.kind != StepKind::Recharge {
        return Ok(Verdict::Infeasible(WalkViolation::EndpointNotDepot {
            node: last.node,
        }));
    }

    let tol = instance.tolerance();
    let budget = instance.discharge_time + tol;
    let mut since_depot = 0.0f64;
    let mut leg_start = 0usize;
    for i in 1..steps.len() {
        since_depot += instance.dist(steps[i - 1].node, steps[i].node);
        if steps[i].kind == StepKind::Recharge {
            if since_depot > budget {
                return Ok(Verdict::Infeasible(WalkViolation::LegTooLong {
                    from_step: leg_start,
                    to_step: i,
                    length: since_depot,
                }));
            }
            since_depot = 0.0;
            leg_start = i;
        } else if since_depot > budget {
            // Already over budget before reaching any depot.
            return Ok(Verdict::Infeasible(WalkViolation::LegTooLong {
                from_step: leg_start,
                to_step: i,
                length: since_depot,
            }));
        }
    }

    let mut seen = vec![false; instance.n_total()];
    for step in steps {
        seen[step.node] = true;
    }
    let missing: Vec<NodeId> = instance
        .tasks()
        .iter()
        .copied()
        .filter(|&v| !seen[v])
        .collect();
    if !missing.is_empty() {
        return Ok(Verdict::Infeasible(WalkViolation::MissingVertices(missing)));
    }
    Ok(Verdict::Feasible)
}

/// Per-solve summary attached to every walk.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub algorithm: String,
    pub cost: f64,
    pub recharges: usize,
    pub runtime_ms: u64,
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
    /// Set by the exact solver: whether the result is proven optimal.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl SolveReport {
    pub fn new(algorithm: &str, cost: f64, recharges: usize) -> Self {
        SolveReport {
            algorithm: algorithm.to_string(),
            cost,
            recharges,
            runtime_ms: 0,
            feasible: true,
            violation: None,
            optimal: None,
            notes: Vec::new(),
        }
    }
}

/// A walk together with its report.
#[derive(Debug, Clone)]
pub struct Solution {
    pub walk: Walk,
    pub report: SolveReport,
}

impl Solution {
    /// Assemble a solution, computing cost/recharges and running the
    /// validator.
    pub fn assemble(instance: &Instance, algorithm: &str, walk: Walk) -> Result<Solution> {
        let (cost, recharges) = walk_cost(instance, &walk);
        let verdict = validate_walk(instance, &walk)?;
        let mut report = SolveReport::new(algorithm, cost, recharges);
        report.feasible = verdict.is_feasible();
        if let Verdict::Infeasible(v) = verdict {
            report.violation = Some(v.to_string());
        }
        Ok(Solution { walk, report })
    }
}

/// Serialized walk document; field set is the contract between the
/// solvers, the validator, the CLI and the plot emitter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WalkDocument {
    pub instance_name: String,
    pub algorithm: String,
    pub steps: Vec<WalkDocumentStep>,
    pub cost: f64,
    pub recharges: usize,
    pub feasible: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WalkDocumentStep {
    /// External 1-based node id.
    pub node: usize,
    pub kind: StepKind,
}

impl WalkDocument {
    pub fn from_solution(instance: &Instance, solution: &Solution) -> WalkDocument {
        WalkDocument {
            instance_name: instance.name.clone(),
            algorithm: solution.report.algorithm.clone(),
            steps: solution
                .walk
                .steps()
                .iter()
                .map(|s| WalkDocumentStep {
                    node: instance.external_id(s.node),
                    kind: s.kind,
                })
                .collect(),
            cost: solution.report.cost,
            recharges: solution.report.recharges,
            feasible: solution.report.feasible,
        }
    }

    pub fn to_walk(&self, instance: &Instance) -> Result<Walk> {
        let mut nodes = Vec::with_capacity(self.steps.len());
        for s in &self.steps {
            nodes.push(instance.from_external_id(s.node)?);
        }
        Ok(Walk::from_nodes(instance, nodes))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("walk document serializes")
    }

    pub fn from_json(text: &str) -> Result<WalkDocument> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{build_from_points, DepotSelection, WeightMode};

    fn line_instance(depot_ids: Vec<u32>, xs: &[f64], d: f64) -> Instance {
        let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x, 0.0)).collect();
        build_from_points("t", &pts, &DepotSelection::Explicit(depot_ids), d, 0.0, WeightMode::Real)
            .unwrap()
    }

    #[test]
    fn cost_and_recharges_single_visit() {
        let inst = line_instance(vec![1], &[0.0, 3.0], 10.0);
        let w = Walk::from_nodes(&inst, vec![0]);
        assert_eq!(walk_cost(&inst, &w), (0.0, 0));
    }

    #[test]
    fn cost_and_recharges_out_and_back() {
        let inst = line_instance(vec![1], &[0.0, 3.0], 10.0);
        let w = Walk::from_nodes(&inst, vec![0, 1, 0]);
        assert_eq!(walk_cost(&inst, &w), (6.0, 1));
    }

    #[test]
    fn cost_and_recharges_two_depots() {
        // q1 -> v -> q2 -> q1 with legs 3, 4, 5 on explicit geometry.
        let pts = [(0.0, 0.0), (3.0, 4.0), (3.0, 0.0)];
        let inst = build_from_points(
            "tri",
            &pts,
            &DepotSelection::Explicit(vec![1, 2]),
            20.0,
            0.0,
            WeightMode::Real,
        )
        .unwrap();
        let w = Walk::from_nodes(&inst, vec![0, 2, 1, 0]);
        let (cost, recharges) = walk_cost(&inst, &w);
        assert_eq!(cost, 12.0);
        assert_eq!(recharges, 2);
    }

    #[test]
    fn consecutive_duplicate_depots_collapse() {
        let inst = line_instance(vec![1], &[0.0, 3.0], 10.0);
        let w = Walk::from_nodes(&inst, vec![0, 0, 1, 0, 0]);
        assert_eq!(w.steps().len(), 3);
        assert_eq!(walk_cost(&inst, &w), (6.0, 1));
    }

    #[test]
    fn boundary_leg_exactly_d_is_feasible() {
        let inst = line_instance(vec![1], &[0.0, 5.0], 10.0);
        let w = Walk::from_nodes(&inst, vec![0, 1, 0]);
        assert!(validate_walk(&inst, &w).unwrap().is_feasible());
    }

    #[test]
    fn over_budget_leg_is_reported() {
        // Integer weights: distance 6 out-and-back exceeds D = 11.
        let pts = [(0.0, 0.0), (6.0, 0.0)];
        let inst = build_from_points(
            "ib",
            &pts,
            &DepotSelection::Explicit(vec![1]),
            11.0,
            0.0,
            WeightMode::Integer,
        )
        .unwrap();
        let w = Walk::from_nodes(&inst, vec![0, 1, 0]);
        match validate_walk(&inst, &w).unwrap() {
            Verdict::Infeasible(WalkViolation::LegTooLong { length, .. }) => {
                assert_eq!(length, 12.0)
            }
            other => panic!("expected a long-leg violation, got {other:?}"),
        }
    }

    #[test]
    fn missing_vertex_is_reported() {
        let inst = line_instance(vec![1], &[0.0, 2.0, 4.0], 20.0);
        let w = Walk::from_nodes(&inst, vec![0, 1, 0]);
        match validate_walk(&inst, &w).unwrap() {
            Verdict::Infeasible(WalkViolation::MissingVertices(vs)) => assert_eq!(vs, vec![2]),
            other => panic!("expected missing vertices, got {other:?}"),
        }
    }

    #[test]
    fn endpoints_must_be_depots() {
        let inst = line_instance(vec![1], &[0.0, 2.0], 20.0);
        let w = Walk::from_nodes(&inst, vec![0, 1]);
        assert!(matches!(
            validate_walk(&inst, &w).unwrap(),
            Verdict::Infeasible(WalkViolation::EndpointNotDepot { node: 1 })
        ));
    }

    #[test]
    fn unknown_node_is_an_error() {
        let inst = line_instance(vec![1], &[0.0, 2.0], 20.0);
        let w = Walk {
            steps: vec![Step {
                node: 99,
                kind: StepKind::Task,
            }],
        };
        assert!(matches!(
            validate_walk(&inst, &w),
            Err(Error::UnknownNode(99))
        ));
    }

    #[test]
    fn walk_document_roundtrip() {
        let inst = line_instance(vec![1], &[0.0, 3.0], 10.0);
        let sol = Solution::assemble(&inst, "test", Walk::from_nodes(&inst, vec![0, 1, 0])).unwrap();
        let doc = WalkDocument::from_solution(&inst, &sol);
        let parsed = WalkDocument::from_json(&doc.to_json()).unwrap();
        let back = parsed.to_walk(&inst).unwrap();
        assert_eq!(back, sol.walk);
        assert_eq!(parsed.cost, 6.0);
        assert_eq!(parsed.recharges, 1);
    }
}
