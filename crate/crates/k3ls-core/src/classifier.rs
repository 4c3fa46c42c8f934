//! Conjectural speciality classification and the Segre-style audit.
//!
//! The classifier predicts, for a normalized class with `d >= 1`, whether the
//! system is special, its dimension, and a fixed/mobile decomposition. The
//! audit mechanizes the base-locus argument: assuming every non-empty reduced
//! system is non-special, any two distinct fixed components `A, B` must have
//! `v(A) = v(B) = v(A+B) = 0` and hence `A.B = 1` by the additivity identity,
//! and the only configuration realizing `A.B = 1` is `A` the genus-2 class
//! through two points with `B` a pencil member.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::numerics::SystemClass;

/// Role a catalog curve plays in the classification.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogRole {
    SpecialFamilyGenerator,
    DoubleCurve,
    Pencil,
    FixedPlusPencilMember,
}

/// One entry of the finite curve catalog.
#[derive(Debug, Clone)]
pub struct CurveCatalogEntry {
    pub name: &'static str,
    pub cls: SystemClass,
    pub role: CatalogRole,
}

/// The complete curve catalog of the classification.
pub fn curve_catalog() -> Vec<CurveCatalogEntry> {
    let e = |name, n, d, mults: &[u64], role| CurveCatalogEntry {
        name,
        cls: SystemClass::new(n, d, mults.to_vec()).unwrap(),
        role,
    };
    alloc::vec![
        e("L^2(1,1^2)", 2, 1, &[1, 1], CatalogRole::SpecialFamilyGenerator),
        e("L^4(1,2)", 4, 1, &[2], CatalogRole::SpecialFamilyGenerator),
        e("L^4(1,1^3)", 4, 1, &[1, 1, 1], CatalogRole::DoubleCurve),
        e("L^6(1,2,1)", 6, 1, &[2, 1], CatalogRole::DoubleCurve),
        e("L^10(1,3)", 10, 1, &[3], CatalogRole::DoubleCurve),
        e("L^2(1,1)", 2, 1, &[1], CatalogRole::Pencil),
        e("L^2(1,1^2)", 2, 1, &[1, 1], CatalogRole::FixedPlusPencilMember),
    ]
}

/// Case tags of the classification, in detection priority order.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    SpecialI,
    FixedIiiA,
    FixedIiiB,
    FixedIiiC,
    ReducibleIv,
    PlainNonspecial,
    Empty,
}

impl CaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::SpecialI => "special-i",
            CaseTag::FixedIiiA => "fixed-iii-a",
            CaseTag::FixedIiiB => "fixed-iii-b",
            CaseTag::FixedIiiC => "fixed-iii-c",
            CaseTag::ReducibleIv => "reducible-iv",
            CaseTag::PlainNonspecial => "plain-nonspecial",
            CaseTag::Empty => "empty",
        }
    }
}

impl core::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Structured prediction for one system class.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub special: bool,
    pub predicted_dim: i128,
    pub case_tag: CaseTag,
    /// Fixed components with their multiplicities; multiplicities are >= 1
    /// and `sum mu_i * fixed_i + mobile_part` reconstructs the input.
    pub fixed_part: Vec<(SystemClass, u64)>,
    pub mobile_part: SystemClass,
    pub notes: String,
}

impl Verdict {
    /// Recomputes `sum mu_i * fixed_i + mobile_part`.
    pub fn reconstruct(&self) -> Result<SystemClass, Error> {
        let mut acc = SystemClass::zero(self.mobile_part.n())?;
        for (cls, mu) in &self.fixed_part {
            acc = acc.add(&cls.scale(*mu)?)?;
        }
        acc.add(&self.mobile_part)
    }
}

/// True iff the class belongs to one of the two conjecturally special
/// families: `L^4(d, 2d)` or `L^2(d, d^2)` with `d >= 2`.
pub fn is_conjecturally_special(l: &SystemClass) -> bool {
    let d = l.d();
    if d < 2 {
        return false;
    }
    let s = l.sorted_mults();
    match l.n() {
        4 => s.len() == 1 && s[0] == 2 * d,
        2 => s.len() == 2 && s[0] == d && s[1] == d,
        _ => false,
    }
}

fn note(s: &str) -> String {
    String::from(s)
}

/// Predicts speciality, dimension and fixed/mobile decomposition.
///
/// Cases are detected in a fixed priority order; overlaps resolve to the more
/// specific tag. Degree-0 classes are rejected as the trivial system.
pub fn classify(l: &SystemClass) -> Result<Verdict, Error> {
    if l.d() == 0 {
        return Err(Error::TrivialSystem);
    }
    let l = l.normalized();
    let n = l.n();
    let d = l.d();
    let pair = l.expected_dim()?;
    let s = l.sorted_mults();

    // (1) special-i: the two conjecturally special families.
    if is_conjecturally_special(&l) {
        let generator = match n {
            4 => SystemClass::new(4, 1, alloc::vec![2])?,
            2 => SystemClass::new(2, 1, alloc::vec![1, 1])?,
            _ => unreachable!(),
        };
        return Ok(Verdict {
            special: true,
            predicted_dim: 0,
            case_tag: CaseTag::SpecialI,
            fixed_part: alloc::vec![(generator, d)],
            mobile_part: SystemClass::zero(n)?,
            notes: note("conjecturally special family; fixed divisor d*C with v(C)=0, C^2=0"),
        });
    }

    // (2) fixed-iii-a: L^2(m+1, (m+1, m)) = m*C + pencil, m >= 1.
    if n == 2 && d >= 2 && s.len() == 2 && s[0] == d && s[1] == d - 1 {
        let m = d - 1;
        // Align component multiplicities with the input point labels.
        let mults = l.mults();
        let hi = mults.iter().position(|&x| x == d).unwrap();
        let c_mults = alloc::vec![1u64; mults.len()];
        let mut pencil_mults = alloc::vec![0u64; mults.len()];
        pencil_mults[hi] = 1;
        let c = SystemClass::new(2, 1, c_mults)?;
        let pencil = SystemClass::new(2, 1, pencil_mults)?;
        return Ok(Verdict {
            special: false,
            predicted_dim: 1,
            case_tag: CaseTag::FixedIiiA,
            fixed_part: alloc::vec![(c, m)],
            mobile_part: pencil,
            notes: note("fixed part m*C with C = L^2(1,1^2); mobile part a pencil"),
        });
    }

    // (3) fixed-iii-b: L = 2C for a catalog double-curve.
    if d == 2 {
        let doubled_match = match n {
            4 => s == [2, 2, 2],
            6 => s == [4, 2],
            10 => s == [6],
            _ => false,
        };
        if doubled_match {
            let c_mults: Vec<u64> = l.mults().iter().map(|&m| m / 2).collect();
            let c = SystemClass::new(n, 1, c_mults)?;
            return Ok(Verdict {
                special: false,
                predicted_dim: 0,
                case_tag: CaseTag::FixedIiiB,
                fixed_part: alloc::vec![(c, 2)],
                mobile_part: SystemClass::zero(n)?,
                notes: note("rigid double curve L = 2C with v(C)=0, C^2=1"),
            });
        }
    }

    // (4) reducible-iv: L^2(2,2), mobile but with reducible general element.
    if n == 2 && d == 2 && s == [2] {
        return Ok(Verdict {
            special: false,
            predicted_dim: 2,
            case_tag: CaseTag::ReducibleIv,
            fixed_part: Vec::new(),
            mobile_part: l.clone(),
            notes: note("general element reducible (symmetric square of the pencil)"),
        });
    }

    // (5) empty.
    if pair.e == -1 {
        return Ok(Verdict {
            special: false,
            predicted_dim: -1,
            case_tag: CaseTag::Empty,
            fixed_part: Vec::new(),
            mobile_part: l.clone(),
            notes: note("expected dimension -1; conjecturally empty"),
        });
    }

    // (6) fixed-iii-c: rigid v=0 class.
    if pair.v == 0 {
        return Ok(Verdict {
            special: false,
            predicted_dim: 0,
            case_tag: CaseTag::FixedIiiC,
            fixed_part: alloc::vec![(l.clone(), 1)],
            mobile_part: SystemClass::zero(n)?,
            notes: note("rigid; conjecturally L = C when irreducible"),
        });
    }

    // (7) plain non-special.
    Ok(Verdict {
        special: false,
        predicted_dim: pair.e,
        case_tag: CaseTag::PlainNonspecial,
        fixed_part: Vec::new(),
        mobile_part: l.clone(),
        notes: String::new(),
    })
}

/// The general divisor is predicted to have exactly the imposed
/// multiplicities; returns them so the oracle can cross-check.
pub fn predicted_general_multiplicities(l: &SystemClass) -> Result<Vec<u64>, Error> {
    if l.d() == 0 {
        return Err(Error::TrivialSystem);
    }
    // Special families are non-empty (dimension 0) despite e = -1.
    if !is_conjecturally_special(l) && l.expected_dim()?.e == -1 {
        return Err(Error::EmptySystem);
    }
    Ok(l.normalized().mults().to_vec())
}

/// One audited pair of hypothesized fixed components.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRecord {
    pub left: SystemClass,
    pub right: SystemClass,
    pub v_left: i128,
    pub v_right: i128,
    pub product: i128,
    pub v_sum: i128,
    /// Matches (up to labels) the unique `A.B = 1` configuration:
    /// `A = L^2(1,1^2)`, `B` an irreducible element of `L^2(1,1)`.
    pub allowed_unit: bool,
    /// Numerically inconsistent with the non-speciality hypothesis, which
    /// forces `v(A) = v(B) = 0` and `A.B = 1`.
    pub violation: bool,
}

/// Self-intersection check for components with multiplicity >= 2.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfRecord {
    pub cls: SystemClass,
    pub mu: u64,
    pub self_intersection: i128,
    pub violation: bool,
}

/// Audit of a hypothesized fixed-part decomposition.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AuditReport {
    pub pairs: Vec<PairRecord>,
    pub self_checks: Vec<SelfRecord>,
}

impl AuditReport {
    pub fn violations(&self) -> impl Iterator<Item = &PairRecord> {
        self.pairs.iter().filter(|p| p.violation)
    }

    pub fn allowed_unit_pairs(&self) -> impl Iterator<Item = &PairRecord> {
        self.pairs.iter().filter(|p| p.allowed_unit)
    }

    pub fn is_clean(&self) -> bool {
        self.pairs.iter().all(|p| !p.violation) && self.self_checks.iter().all(|s| !s.violation)
    }
}

fn is_unit_configuration(a: &SystemClass, b: &SystemClass) -> bool {
    let fits = |x: &SystemClass, y: &SystemClass| {
        x.n() == 2
            && x.d() == 1
            && y.d() == 1
            && x.sorted_mults() == [1, 1]
            && y.sorted_mults() == [1]
    };
    fits(a, b) || fits(b, a)
}

/// Audits every unordered pair of distinct hypothesized fixed components.
///
/// The `mobile` class only participates in the shared-lattice check.
pub fn segre_audit(
    parts: &[(SystemClass, u64)],
    mobile: &SystemClass,
) -> Result<AuditReport, Error> {
    let n = mobile.n();
    for (cls, mu) in parts {
        if cls.n() != n {
            return Err(Error::MismatchedLattice {
                left: n,
                right: cls.n(),
            });
        }
        if *mu == 0 {
            return Err(Error::InvalidClass(note("fixed-part multiplicity must be >= 1")));
        }
    }
    let mut report = AuditReport::default();
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            let (a, b) = (&parts[i].0, &parts[j].0);
            let v_left = a.virtual_dim()?;
            let v_right = b.virtual_dim()?;
            let product = a.intersect(b)?;
            let v_sum = a.add(b)?.virtual_dim()?;
            let allowed_unit = product == 1 && is_unit_configuration(a, b);
            // The unit configuration is the unique pair that may coexist in
            // a fixed part; everything else must satisfy the forced
            // v(A) = v(B) = 0 and A.B = 1.
            let violation =
                !allowed_unit && (v_left != 0 || v_right != 0 || product != 1);
            report.pairs.push(PairRecord {
                left: a.clone(),
                right: b.clone(),
                v_left,
                v_right,
                product,
                v_sum,
                allowed_unit,
                violation,
            });
        }
    }
    for (cls, mu) in parts {
        if *mu >= 2 {
            let c2 = cls.self_intersect()?;
            report.self_checks.push(SelfRecord {
                cls: cls.clone(),
                mu: *mu,
                self_intersection: c2,
                violation: c2 > 1,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::additivity_defect;
    use alloc::vec;

    fn cls(n: u64, d: u64, mults: &[u64]) -> SystemClass {
        SystemClass::new(n, d, mults.to_vec()).unwrap()
    }

    #[test]
    fn catalog_invariants() {
        for entry in curve_catalog() {
            let v = entry.cls.virtual_dim().unwrap();
            let c2 = entry.cls.self_intersect().unwrap();
            match entry.role {
                CatalogRole::SpecialFamilyGenerator => {
                    assert_eq!(v, 0, "{}", entry.name);
                    assert_eq!(c2, 0, "{}", entry.name);
                }
                CatalogRole::DoubleCurve => {
                    assert_eq!(v, 0, "{}", entry.name);
                    assert_eq!(c2, 1, "{}", entry.name);
                }
                CatalogRole::Pencil => assert_eq!(v, 1, "{}", entry.name),
                CatalogRole::FixedPlusPencilMember => assert_eq!(v, 0, "{}", entry.name),
            }
        }
    }

    #[test]
    fn special_family_detection() {
        assert!(is_conjecturally_special(&cls(4, 3, &[6])));
        assert!(is_conjecturally_special(&cls(2, 2, &[2, 2])));
        assert!(!is_conjecturally_special(&cls(4, 1, &[2])));
        assert!(!is_conjecturally_special(&cls(6, 2, &[4])));
        assert!(!is_conjecturally_special(&cls(2, 2, &[2])));
        assert!(!is_conjecturally_special(&cls(2, 2, &[2, 2, 1])));
    }

    #[test]
    fn classify_special_family() {
        let v = classify(&cls(4, 3, &[6])).unwrap();
        assert_eq!(v.case_tag, CaseTag::SpecialI);
        assert!(v.special);
        assert_eq!(v.predicted_dim, 0);
        assert_eq!(v.reconstruct().unwrap().normalized(), cls(4, 3, &[6]));
    }

    #[test]
    fn classify_fixed_iii_a() {
        let v = classify(&cls(2, 3, &[3, 2])).unwrap();
        assert_eq!(v.case_tag, CaseTag::FixedIiiA);
        assert_eq!(v.predicted_dim, 1);
        assert_eq!(v.fixed_part.len(), 1);
        assert_eq!(v.fixed_part[0].1, 2);
        assert_eq!(v.fixed_part[0].0.sorted_mults(), vec![1, 1]);
        assert_eq!(v.reconstruct().unwrap(), cls(2, 3, &[3, 2]));
        // Orientation-independent.
        let w = classify(&cls(2, 3, &[2, 3])).unwrap();
        assert_eq!(w.case_tag, CaseTag::FixedIiiA);
        assert_eq!(w.reconstruct().unwrap(), cls(2, 3, &[2, 3]));
    }

    #[test]
    fn classify_fixed_iii_b() {
        let v = classify(&cls(10, 2, &[6])).unwrap();
        assert_eq!(v.case_tag, CaseTag::FixedIiiB);
        assert_eq!(v.predicted_dim, 0);
        assert_eq!(v.fixed_part[0].0, cls(10, 1, &[3]));
        assert_eq!(v.fixed_part[0].1, 2);
        assert_eq!(v.reconstruct().unwrap().normalized(), cls(10, 2, &[6]));
        let w = classify(&cls(4, 2, &[2, 2, 2])).unwrap();
        assert_eq!(w.case_tag, CaseTag::FixedIiiB);
        let u = classify(&cls(6, 2, &[4, 2])).unwrap();
        assert_eq!(u.case_tag, CaseTag::FixedIiiB);
    }

    #[test]
    fn classify_reducible_iv() {
        let v = classify(&cls(2, 2, &[2])).unwrap();
        assert_eq!(v.case_tag, CaseTag::ReducibleIv);
        assert_eq!(v.predicted_dim, 2);
        assert!(v.notes.contains("reducible"));
    }

    #[test]
    fn classify_plain_and_empty() {
        let v = classify(&cls(4, 5, &[1, 1])).unwrap();
        assert_eq!(v.case_tag, CaseTag::PlainNonspecial);
        assert_eq!(v.predicted_dim, 49);
        let w = classify(&cls(2, 1, &[2, 1])).unwrap();
        assert_eq!(w.case_tag, CaseTag::Empty);
        assert_eq!(w.predicted_dim, -1);
    }

    #[test]
    fn classify_fixed_iii_c_beats_nothing_else() {
        // v = 0 class that is not a catalog double: falls to iii-c.
        let v = classify(&cls(6, 1, &[2, 1])).unwrap();
        assert_eq!(v.case_tag, CaseTag::FixedIiiC);
        assert_eq!(v.predicted_dim, 0);
        // A v = 0 doubled catalog curve resolves to the more specific iii-b.
        let w = classify(&cls(10, 2, &[6])).unwrap();
        assert_eq!(w.case_tag, CaseTag::FixedIiiB);
        assert_eq!(cls(10, 2, &[6]).virtual_dim().unwrap(), 0);
    }

    #[test]
    fn classify_rejects_degree_zero() {
        assert!(matches!(
            classify(&cls(2, 0, &[])),
            Err(Error::TrivialSystem)
        ));
    }

    #[test]
    fn predicted_dim_at_least_expected() {
        for (n, d, mults) in [
            (2u64, 3u64, vec![3u64, 2]),
            (4, 3, vec![6]),
            (2, 2, vec![2, 2]),
            (10, 2, vec![6]),
            (4, 5, vec![1, 1]),
            (2, 2, vec![2]),
        ] {
            let l = cls(n, d, &mults);
            let v = classify(&l).unwrap();
            let e = l.expected_dim().unwrap().e;
            assert!(v.predicted_dim >= e);
            if !v.special {
                assert_eq!(v.predicted_dim, e);
            }
        }
    }

    #[test]
    fn predicted_general_multiplicities_examples() {
        assert_eq!(
            predicted_general_multiplicities(&cls(4, 3, &[2, 1])).unwrap(),
            vec![2, 1]
        );
        assert_eq!(
            predicted_general_multiplicities(&cls(2, 1, &[])).unwrap(),
            Vec::<u64>::new()
        );
        // Special systems are non-empty even though e = -1.
        assert_eq!(
            predicted_general_multiplicities(&cls(4, 2, &[4])).unwrap(),
            vec![4]
        );
        assert!(matches!(
            predicted_general_multiplicities(&cls(4, 1, &[3])),
            Err(Error::EmptySystem)
        ));
    }

    #[test]
    fn audit_unit_pair() {
        let parts = vec![(cls(2, 1, &[1, 1]), 1), (cls(2, 1, &[1, 0]), 1)];
        let report = segre_audit(&parts, &SystemClass::zero(2).unwrap()).unwrap();
        assert_eq!(report.pairs.len(), 1);
        let p = &report.pairs[0];
        assert_eq!(p.product, 1);
        assert_eq!(p.v_left, 0);
        // The pencil member has v = 1; the pair is exempt as the unique
        // allowed unit configuration.
        assert_eq!(p.v_right, 1);
        assert!(p.allowed_unit);
        assert!(!p.violation);
        assert!(report.is_clean());
    }

    #[test]
    fn audit_flags_violation() {
        let parts = vec![(cls(4, 1, &[2, 0, 0]), 1), (cls(4, 1, &[1, 1, 1]), 1)];
        let report = segre_audit(&parts, &SystemClass::zero(4).unwrap()).unwrap();
        assert_eq!(report.pairs.len(), 1);
        assert_eq!(report.pairs[0].product, 2);
        assert!(report.pairs[0].violation);
        assert!(!report.is_clean());
    }

    #[test]
    fn audit_empty_parts_is_clean() {
        let report = segre_audit(&[], &SystemClass::zero(2).unwrap()).unwrap();
        assert!(report.is_clean());
        assert!(report.pairs.is_empty());
    }

    #[test]
    fn audit_self_intersection_check() {
        let parts = vec![(cls(2, 2, &[1]), 2)];
        let report = segre_audit(&parts, &SystemClass::zero(2).unwrap()).unwrap();
        assert_eq!(report.self_checks.len(), 1);
        assert_eq!(report.self_checks[0].self_intersection, 7);
        assert!(report.self_checks[0].violation);
    }

    #[test]
    fn audit_numbers_recompute_from_numerics() {
        let parts = vec![
            (cls(4, 1, &[2, 0, 0]), 2),
            (cls(4, 1, &[1, 1, 1]), 1),
            (cls(4, 1, &[1, 0, 0]), 1),
        ];
        let report = segre_audit(&parts, &SystemClass::zero(4).unwrap()).unwrap();
        for p in &report.pairs {
            assert_eq!(p.v_left, p.left.virtual_dim().unwrap());
            assert_eq!(p.v_right, p.right.virtual_dim().unwrap());
            assert_eq!(p.product, p.left.intersect(&p.right).unwrap());
            assert_eq!(
                p.v_sum,
                p.left.add(&p.right).unwrap().virtual_dim().unwrap()
            );
            // The additivity identity on every recorded pair: whenever
            // v(A) = v(B) = v(A+B) = 0, necessarily A.B = 1.
            assert_eq!(additivity_defect(&p.left, &p.right).unwrap(), 0);
            if p.v_left == 0 && p.v_right == 0 && p.v_sum == 0 {
                assert_eq!(p.product, 1);
            }
        }
    }
}
