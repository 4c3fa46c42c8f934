//! Central-fiber bookkeeping and the degeneration recursion.
//!
//! A homogeneous system `L^n(d, m^{4^h 9^k})` degenerates onto a central
//! fiber made of `b` planes glued to a blown-up K3 along (-1)-curves. With
//! the default twist equal to `m`, each step places four (or nine) points on
//! every plane and leaves the system `L^n(d, m^{4^{h-1} 9^k})` on the K3
//! part; iterating reaches the single-point leaf `L^n(d, m)`, the open
//! hypothesis. Certificates record every integer so a verifier can re-derive
//! them from the system fields alone.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::numerics::SystemClass;
use crate::oracle::OracleReport;

/// A homogeneous system: `r = 4^h * 9^k9` points of common multiplicity `m`.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HomogeneousSystem {
    pub n: u64,
    pub d: u64,
    pub m: u64,
    pub h: u32,
    pub k9: u32,
}

impl HomogeneousSystem {
    pub fn new(n: u64, d: u64, m: u64, h: u32, k9: u32) -> Result<Self, Error> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidClass(alloc::format!(
                "n must be even and >= 2, got {n}"
            )));
        }
        if d == 0 || m == 0 {
            return Err(Error::InvalidClass(String::from(
                "homogeneous systems need d >= 1 and m >= 1",
            )));
        }
        let s = Self { n, d, m, h, k9 };
        s.point_count()?; // reject exponent overflow early
        Ok(s)
    }

    /// `4^h * 9^k9`.
    pub fn point_count(&self) -> Result<u64, Error> {
        let four = 4u64
            .checked_pow(self.h)
            .ok_or(Error::Overflow("point count"))?;
        let nine = 9u64
            .checked_pow(self.k9)
            .ok_or(Error::Overflow("point count"))?;
        four.checked_mul(nine).ok_or(Error::Overflow("point count"))
    }

    pub fn is_leaf(&self) -> bool {
        self.h == 0 && self.k9 == 0
    }

    /// `v = d^2 n/2 + 1 - r * m(m+1)/2`, computed without materializing the
    /// multiplicity vector.
    pub fn virtual_dim(&self) -> Result<i128, Error> {
        let r = self.point_count()? as i128;
        let d = self.d as i128;
        let conds = (self.m as i128)
            .checked_mul(self.m as i128 + 1)
            .map(|x| x / 2)
            .and_then(|c| c.checked_mul(r))
            .ok_or(Error::Overflow("homogeneous virtual_dim"))?;
        d.checked_mul(d)
            .and_then(|dd| dd.checked_mul(self.n as i128 / 2))
            .and_then(|x| x.checked_add(1))
            .and_then(|x| x.checked_sub(conds))
            .ok_or(Error::Overflow("homogeneous virtual_dim"))
    }

    /// Materializes the multiplicity vector; refused beyond desk scale.
    pub fn to_class(&self) -> Result<SystemClass, Error> {
        let r = self.point_count()?;
        if r > 1_000_000 {
            return Err(Error::Overflow("point count too large to materialize"));
        }
        SystemClass::new(self.n, self.d, alloc::vec![self.m; r as usize])
    }
}

impl core::fmt::Display for HomogeneousSystem {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "L^{}({},{}^(4^{} 9^{}))",
            self.n, self.d, self.m, self.h, self.k9
        )
    }
}

/// How the points of one step distribute onto the planes.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Distribution {
    pub b: u64,
    pub per_plane: u64,
    pub placed: u64,
    pub residual: u64,
}

/// Uniform distribution of `per_plane` points onto each of `b` planes.
pub fn distribute_points(r: u64, b: u64, per_plane: u64) -> Result<Distribution, Error> {
    if per_plane != 4 && per_plane != 9 {
        return Err(Error::UnsupportedPlaneCount(per_plane));
    }
    let placed = b
        .checked_mul(per_plane)
        .ok_or(Error::Overflow("distribute_points"))?;
    if placed > r {
        return Err(Error::PlanBudget {
            needed: placed,
            available: r,
        });
    }
    Ok(Distribution {
        b,
        per_plane,
        placed,
        residual: r - placed,
    })
}

/// Restriction of the limit bundle to the central fiber: degree `twist` on
/// each plane, and on the K3 part the class with multiplicity `twist` at the
/// `b` blown-up points plus the residual multiplicities of `l` (those of its
/// points not specialized onto the planes; the first `placed` entries are
/// the specialized ones).
pub fn central_fiber_restrict(
    l: &SystemClass,
    twist: u64,
    b: u64,
    placed: u64,
) -> Result<(u64, SystemClass), Error> {
    if b == 0 {
        return Err(Error::InvalidClass(String::from("need at least one plane")));
    }
    let mults = l.normalized();
    let mults = mults.mults();
    if placed as usize > mults.len() {
        return Err(Error::PlanBudget {
            needed: placed,
            available: mults.len() as u64,
        });
    }
    let mut s_mults = alloc::vec![twist; b as usize];
    s_mults.extend_from_slice(&mults[placed as usize..]);
    let s_part = SystemClass::new(l.n(), l.d(), s_mults)?.normalized();
    Ok((twist, s_part))
}

/// Expected dimension of the homogeneous planar system `L_2(deg, m^count)`,
/// `max(-1, deg(deg+3)/2 - count*m(m+1)/2)`. For 4 or 9 points this equals
/// the actual dimension (these systems are never special) and serves as
/// ground truth for the planar parts.
pub fn planar_expected_dim(deg: u64, m: u64, count: u64) -> Result<i128, Error> {
    if count != 4 && count != 9 {
        return Err(Error::UnsupportedPlaneCount(count));
    }
    Ok(planar_virtual_dim(deg, m, count).max(-1))
}

/// The planar virtual count `deg(deg+3)/2 - count*m(m+1)/2`, unclamped.
pub fn planar_virtual_dim(deg: u64, m: u64, count: u64) -> i128 {
    let deg = deg as i128;
    let m = m as i128;
    deg * (deg + 3) / 2 - (count as i128) * m * (m + 1) / 2
}

/// The plan for one degeneration step.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralFiberPlan {
    pub b: u64,
    pub twist: u64,
    pub per_plane_points: u64,
    /// Degree of the system on each plane (equals the twist by the
    /// restriction formulas).
    pub planar_degree: u64,
    /// Common multiplicity of the points placed on each plane.
    pub planar_mult: u64,
    pub residual: u64,
    /// The system left on the K3 part.
    pub s_part: HomogeneousSystem,
    /// Sections of degree `twist` on each double line: `twist + 1` matching
    /// conditions per plane.
    pub matching_budget: u64,
}

/// Plans one step: exhaust the 4-factors first, then the 9-factors; the
/// twist equals the common multiplicity, making the K3 part literally the
/// homogeneous system with one exponent removed.
pub fn plan_step(h: &HomogeneousSystem) -> Result<CentralFiberPlan, Error> {
    if h.is_leaf() {
        return Err(Error::NotReducible);
    }
    let r = h.point_count()?;
    let (per_plane, child) = if h.h >= 1 {
        (4u64, HomogeneousSystem { h: h.h - 1, ..*h })
    } else {
        (9u64, HomogeneousSystem { k9: h.k9 - 1, ..*h })
    };
    let b = child.point_count()?;
    let dist = distribute_points(r, b, per_plane)?;
    debug_assert_eq!(dist.residual, 0);
    let twist = h.m;
    Ok(CentralFiberPlan {
        b,
        twist,
        per_plane_points: per_plane,
        planar_degree: twist,
        planar_mult: h.m,
        residual: dist.residual,
        s_part: child,
        matching_budget: twist + 1,
    })
}

/// The checkable arithmetic shadow of one step.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepAudit {
    pub v_parent: i128,
    pub v_s_part: i128,
    pub v_planar_each: i128,
    pub planar_expected_each: i128,
    /// `b * (twist + 1)` sections available along the double lines.
    pub gluing_budget: i128,
    /// `v_parent - v_s_part - b*(v_planar + 1)`: recorded, never asserted to
    /// vanish (the matching argument is outside this crate's scope).
    pub gluing_correction: i128,
    pub ledger_note: String,
    pub ok: bool,
}

/// Audits a plan against its parent. `ok` means the plan is structurally
/// possible (budgets respected, counts consistent); the gluing correction is
/// recorded so failures are visible without claiming the matching argument.
pub fn audit_step(plan: &CentralFiberPlan, parent: &HomogeneousSystem) -> Result<StepAudit, Error> {
    let r = parent.point_count()?;
    let v_parent = parent.virtual_dim()?;
    let v_s_part = plan.s_part.virtual_dim()?;
    let v_planar_each = planar_virtual_dim(plan.planar_degree, plan.planar_mult, plan.per_plane_points);
    let planar_expected_each = planar_expected_dim(plan.planar_degree, plan.planar_mult, plan.per_plane_points)?;
    let b = plan.b as i128;
    let gluing_budget = b * (plan.twist as i128 + 1);
    let gluing_correction = v_parent - v_s_part - b * (v_planar_each + 1);
    let placed = plan.b.checked_mul(plan.per_plane_points);
    let structural_ok = matches!(placed, Some(pl) if pl + plan.residual == r)
        && plan.s_part.n == parent.n
        && plan.s_part.d == parent.d
        && plan.planar_degree == plan.twist;
    let mut ledger_note = String::new();
    if planar_expected_each == -1 {
        ledger_note.push_str("planar parts empty (expected dim -1); tolerated, recorded. ");
    }
    ledger_note.push_str("gluing correction recorded, not asserted");
    Ok(StepAudit {
        v_parent,
        v_s_part,
        v_planar_each,
        planar_expected_each,
        gluing_budget,
        gluing_correction,
        ledger_note,
        ok: structural_ok,
    })
}

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateNode {
    pub system: HomogeneousSystem,
    pub plan: CentralFiberPlan,
    pub audit: StepAudit,
}

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateVerdict {
    ConditionalNonspecial,
    AuditFailed,
    LeafVerifiedNonspecial,
}

impl CertificateVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertificateVerdict::ConditionalNonspecial => "conditional-nonspecial",
            CertificateVerdict::AuditFailed => "audit-failed",
            CertificateVerdict::LeafVerifiedNonspecial => "leaf-verified-nonspecial",
        }
    }
}

/// The recorded reduction of a homogeneous system to its single-point leaf.
///
/// Each non-leaf node has exactly one child (the K3 part of its step), so
/// the tree is a chain ending in the leaf `L^n(d, m)`.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateTree {
    pub root: HomogeneousSystem,
    pub steps: Vec<CertificateNode>,
    /// The single-point leaf hypothesis `L^n(d, m)`.
    pub leaf: SystemClass,
    pub verdict: CertificateVerdict,
    pub leaf_report: Option<OracleReport>,
    pub note: String,
}

impl CertificateTree {
    pub fn depth(&self) -> usize {
        self.steps.len()
    }
}

/// Chains plan and audit steps until the single-point leaf.
pub fn reduce_to_leaves(root: &HomogeneousSystem) -> Result<CertificateTree, Error> {
    let mut steps = Vec::new();
    let mut current = *root;
    let mut all_ok = true;
    while !current.is_leaf() {
        let plan = plan_step(&current)?;
        let audit = audit_step(&plan, &current)?;
        all_ok &= audit.ok;
        let next = plan.s_part;
        steps.push(CertificateNode {
            system: current,
            plan,
            audit,
        });
        current = next;
    }
    let leaf = SystemClass::new(root.n, root.d, alloc::vec![root.m])?;
    Ok(CertificateTree {
        root: *root,
        steps,
        leaf,
        verdict: if all_ok {
            CertificateVerdict::ConditionalNonspecial
        } else {
            CertificateVerdict::AuditFailed
        },
        leaf_report: None,
        note: String::from("reduction order: 4-factors first, then 9-factors; twist = m"),
    })
}

/// Hook the oracle uses to certify leaves; returns `None` when no concrete
/// model exists for the leaf's polarization degree.
pub trait LeafChecker {
    fn check(&self, leaf: &SystemClass) -> Result<Option<OracleReport>, Error>;
}

impl<F> LeafChecker for F
where
    F: Fn(&SystemClass) -> Result<Option<OracleReport>, Error>,
{
    fn check(&self, leaf: &SystemClass) -> Result<Option<OracleReport>, Error> {
        self(leaf)
    }
}

/// Reduces to the leaf and, when a checker is supplied, upgrades the verdict
/// to leaf-verified if the oracle certifies the leaf at full expected rank.
pub fn theorem_deg_certify(
    root: &HomogeneousSystem,
    leaf_checker: Option<&dyn LeafChecker>,
) -> Result<CertificateTree, Error> {
    let mut tree = reduce_to_leaves(root)?;
    if tree.verdict != CertificateVerdict::ConditionalNonspecial {
        return Ok(tree);
    }
    let Some(checker) = leaf_checker else {
        return Ok(tree);
    };
    match checker.check(&tree.leaf)? {
        Some(report) => {
            if report.certified_nonspecial {
                tree.verdict = CertificateVerdict::LeafVerifiedNonspecial;
            } else {
                tree.note.push_str("; leaf oracle did not certify (rank deficiency)");
            }
            tree.leaf_report = Some(report);
        }
        None => {
            tree.note
                .push_str(&alloc::format!("; no model for n={}", root.n));
        }
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs(n: u64, d: u64, m: u64, h: u32, k9: u32) -> HomogeneousSystem {
        HomogeneousSystem::new(n, d, m, h, k9).unwrap()
    }

    fn cls(n: u64, d: u64, mults: &[u64]) -> SystemClass {
        SystemClass::new(n, d, mults.to_vec()).unwrap()
    }

    #[test]
    fn point_counts() {
        assert_eq!(hs(4, 1, 1, 0, 0).point_count().unwrap(), 1);
        assert_eq!(hs(4, 1, 1, 2, 0).point_count().unwrap(), 16);
        assert_eq!(hs(2, 1, 1, 1, 1).point_count().unwrap(), 36);
    }

    #[test]
    fn homogeneous_vdim_matches_class() {
        let h = hs(4, 5, 2, 1, 0);
        assert_eq!(h.virtual_dim().unwrap(), 39);
        assert_eq!(
            h.virtual_dim().unwrap(),
            h.to_class().unwrap().virtual_dim().unwrap()
        );
    }

    #[test]
    fn distribute_examples() {
        let d = distribute_points(16, 4, 4).unwrap();
        assert_eq!(d.residual, 0);
        let d9 = distribute_points(9, 1, 9).unwrap();
        assert_eq!(d9.residual, 0);
        assert!(matches!(
            distribute_points(1, 1, 4),
            Err(Error::PlanBudget { .. })
        ));
        assert!(matches!(
            distribute_points(10, 1, 5),
            Err(Error::UnsupportedPlaneCount(5))
        ));
    }

    #[test]
    fn restrict_examples() {
        let l = cls(4, 3, &[2, 2, 2, 2]);
        let (deg, s) = central_fiber_restrict(&l, 2, 1, 4).unwrap();
        assert_eq!(deg, 2);
        assert_eq!(s, cls(4, 3, &[2]));

        let l9 = cls(2, 5, &[1, 1, 1, 1, 1, 1, 1, 1, 1]);
        let (deg, s) = central_fiber_restrict(&l9, 3, 1, 9).unwrap();
        assert_eq!(deg, 3);
        assert_eq!(s, cls(2, 5, &[3]));

        // Zero twist: the b new multiplicities vanish and are stripped.
        let (deg, s) = central_fiber_restrict(&cls(4, 2, &[1, 1]), 0, 2, 2).unwrap();
        assert_eq!(deg, 0);
        assert_eq!(s, cls(4, 2, &[]));
    }

    #[test]
    fn planar_examples() {
        assert_eq!(planar_expected_dim(2, 1, 4).unwrap(), 1);
        assert_eq!(planar_expected_dim(0, 0, 4).unwrap(), 0);
        assert_eq!(planar_expected_dim(3, 1, 9).unwrap(), 0);
        assert_eq!(planar_expected_dim(6, 2, 9).unwrap(), 0);
        assert!(matches!(
            planar_expected_dim(2, 1, 5),
            Err(Error::UnsupportedPlaneCount(5))
        ));
    }

    #[test]
    fn plan_step_examples() {
        let plan = plan_step(&hs(4, 5, 2, 2, 0)).unwrap();
        assert_eq!(plan.b, 4);
        assert_eq!(plan.per_plane_points, 4);
        assert_eq!(plan.twist, 2);
        assert_eq!(plan.s_part, hs(4, 5, 2, 1, 0));

        let plan9 = plan_step(&hs(2, 7, 3, 0, 1)).unwrap();
        assert_eq!(plan9.b, 1);
        assert_eq!(plan9.per_plane_points, 9);
        assert_eq!(plan9.twist, 3);
        assert!(plan9.s_part.is_leaf());

        assert!(matches!(
            plan_step(&hs(4, 1, 1, 0, 0)),
            Err(Error::NotReducible)
        ));
    }

    #[test]
    fn audit_recomputes() {
        let parent = hs(4, 5, 2, 1, 0);
        let plan = plan_step(&parent).unwrap();
        let audit = audit_step(&plan, &parent).unwrap();
        assert_eq!(audit.v_parent, 39);
        assert_eq!(audit.v_s_part, plan.s_part.virtual_dim().unwrap());
        assert_eq!(
            audit.v_planar_each,
            planar_virtual_dim(plan.planar_degree, plan.planar_mult, plan.per_plane_points)
        );
        assert_eq!(audit.gluing_budget, plan.b as i128 * (plan.twist as i128 + 1));
        assert_eq!(
            audit.gluing_correction,
            audit.v_parent - audit.v_s_part - plan.b as i128 * (audit.v_planar_each + 1)
        );
        assert!(audit.ok);
        // Planar parts of positive multiplicity are empty; recorded.
        assert!(audit.ledger_note.contains("planar parts empty"));
    }

    #[test]
    fn audit_flags_structural_failure() {
        let parent = hs(4, 5, 2, 1, 0);
        let mut plan = plan_step(&parent).unwrap();
        plan.b = 7; // impossible plane count for 4 points
        let audit = audit_step(&plan, &parent).unwrap();
        assert!(!audit.ok);
    }

    #[test]
    fn reduce_examples() {
        let t0 = reduce_to_leaves(&hs(4, 3, 2, 0, 0)).unwrap();
        assert_eq!(t0.depth(), 0);
        assert_eq!(t0.verdict, CertificateVerdict::ConditionalNonspecial);
        assert_eq!(t0.leaf, cls(4, 3, &[2]));

        let t1 = reduce_to_leaves(&hs(4, 3, 1, 1, 0)).unwrap();
        assert_eq!(t1.depth(), 1);
        assert_eq!(t1.leaf, cls(4, 3, &[1]));

        let t2 = reduce_to_leaves(&hs(2, 4, 2, 1, 1)).unwrap();
        assert_eq!(t2.depth(), 2);
        assert_eq!(t2.leaf, cls(2, 4, &[2]));
        // 4-factors exhausted first.
        assert_eq!(t2.steps[0].plan.per_plane_points, 4);
        assert_eq!(t2.steps[1].plan.per_plane_points, 9);
    }

    #[test]
    fn tree_node_point_counts() {
        let tree = reduce_to_leaves(&hs(4, 2, 1, 2, 1)).unwrap();
        assert_eq!(tree.depth(), 3);
        let mut expect = [(2u32, 1u32), (1, 1), (0, 1)];
        for (node, (eh, ek)) in tree.steps.iter().zip(expect.iter_mut()) {
            assert_eq!(node.system.h, *eh);
            assert_eq!(node.system.k9, *ek);
            assert_eq!(
                node.system.point_count().unwrap(),
                4u64.pow(*eh) * 9u64.pow(*ek)
            );
        }
    }

    #[test]
    fn certificates_are_deterministic() {
        let a = reduce_to_leaves(&hs(2, 4, 2, 2, 1)).unwrap();
        let b = reduce_to_leaves(&hs(2, 4, 2, 2, 1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn certify_without_checker_stays_conditional() {
        let tree = theorem_deg_certify(&hs(4, 2, 1, 1, 0), None).unwrap();
        assert_eq!(tree.verdict, CertificateVerdict::ConditionalNonspecial);
        assert!(tree.leaf_report.is_none());
    }

    #[test]
    fn certify_with_unavailable_model_notes_it() {
        let checker = |_: &SystemClass| Ok(None);
        let tree = theorem_deg_certify(&hs(6, 2, 1, 1, 0), Some(&checker)).unwrap();
        assert_eq!(tree.verdict, CertificateVerdict::ConditionalNonspecial);
        assert!(tree.note.contains("no model for n=6"));
    }

    #[test]
    fn certify_with_oracle_leaf() {
        use crate::model::{K3ModelSpec, ModelVariant};
        use crate::oracle;
        let checker = |leaf: &SystemClass| {
            let variant = ModelVariant::for_n(leaf.n()).unwrap();
            let spec = K3ModelSpec::new(variant, oracle::DEFAULT_PRIME, 42).unwrap();
            oracle::speciality_test_with_reseed(&spec, leaf, 2).map(Some)
        };
        // Leaf (4, 2, (1)): v = 8, oracle certifies.
        let tree = theorem_deg_certify(&hs(4, 2, 1, 1, 0), Some(&checker)).unwrap();
        assert_eq!(tree.verdict, CertificateVerdict::LeafVerifiedNonspecial);
        let report = tree.leaf_report.unwrap();
        assert_eq!(report.actual_dim, 8);
        // Leaf (4, 2, (2)): v = 6, certified as well.
        let tree2 = theorem_deg_certify(&hs(4, 2, 2, 1, 0), Some(&checker)).unwrap();
        assert_eq!(tree2.verdict, CertificateVerdict::LeafVerifiedNonspecial);
        assert_eq!(tree2.leaf_report.unwrap().actual_dim, 6);
    }

    #[test]
    fn certify_special_leaf_is_not_upgraded() {
        use crate::model::{K3ModelSpec, ModelVariant};
        use crate::oracle;
        let checker = |leaf: &SystemClass| {
            let variant = ModelVariant::for_n(leaf.n()).unwrap();
            let spec = K3ModelSpec::new(variant, oracle::DEFAULT_PRIME, 42).unwrap();
            oracle::speciality_test_with_reseed(&spec, leaf, 2).map(Some)
        };
        // Leaf (4, 2, (4)) is the known special example; no upgrade.
        let tree = theorem_deg_certify(&hs(4, 2, 4, 1, 0), Some(&checker)).unwrap();
        assert_eq!(tree.verdict, CertificateVerdict::ConditionalNonspecial);
        assert!(tree.note.contains("did not certify"));
        assert!(tree.leaf_report.unwrap().special_evidence);
    }
}
