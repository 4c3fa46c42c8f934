//! Certificate documents and their independent verification.
//!
//! A certificate stores every integer of a degeneration chain. The verifier
//! re-derives all of them from the root system alone and, when a leaf oracle
//! report is embedded, deterministically re-runs the oracle from the
//! recorded prime, seed, and trial count.

use anyhow::{bail, Context, Result};
use k3ls_core::degeneration::{
    reduce_to_leaves, CertificateTree, CertificateVerdict, HomogeneousSystem,
};
use k3ls_core::model::{K3ModelSpec, ModelVariant};
use k3ls_core::oracle::speciality_test;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub tool: String,
    pub version: String,
    pub tree: CertificateTree,
}

impl CertificateDocument {
    pub fn new(tree: CertificateTree) -> Self {
        Self {
            tool: String::from("k3ls"),
            version: String::from(env!("CARGO_PKG_VERSION")),
            tree,
        }
    }
}

/// Re-derives the whole chain from the root and checks the stored tree
/// against it. Returns one line per passed check.
pub fn verify_tree(tree: &CertificateTree, recheck_oracle: bool) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    let root = HomogeneousSystem::new(tree.root.n, tree.root.d, tree.root.m, tree.root.h, tree.root.k9)
        .map_err(|e| anyhow::anyhow!("invalid root system: {e}"))?;
    lines.push(format!("root {root} well formed"));

    let recomputed = reduce_to_leaves(&root).map_err(|e| anyhow::anyhow!("reduction failed: {e}"))?;
    if recomputed.steps.len() != tree.steps.len() {
        bail!(
            "step count mismatch: stored {}, recomputed {}",
            tree.steps.len(),
            recomputed.steps.len()
        );
    }
    for (i, (stored, fresh)) in tree.steps.iter().zip(&recomputed.steps).enumerate() {
        if stored != fresh {
            bail!("step {i} does not match recomputation");
        }
    }
    lines.push(format!("{} steps re-derived and matched", tree.steps.len()));

    if tree.leaf != recomputed.leaf {
        bail!("leaf mismatch: stored {}, recomputed {}", tree.leaf, recomputed.leaf);
    }
    lines.push(format!("leaf {} matched", tree.leaf));

    match tree.verdict {
        CertificateVerdict::AuditFailed => {
            if recomputed.verdict != CertificateVerdict::AuditFailed {
                bail!("stored verdict audit-failed but recomputed audits pass");
            }
            lines.push(String::from("verdict audit-failed confirmed"));
        }
        CertificateVerdict::ConditionalNonspecial => {
            if recomputed.verdict != CertificateVerdict::ConditionalNonspecial {
                bail!("stored verdict conditional-nonspecial but recomputed audits fail");
            }
            if let Some(report) = &tree.leaf_report {
                if report.certified_nonspecial {
                    bail!("leaf report certifies but verdict was not upgraded");
                }
            }
            lines.push(String::from("verdict conditional-nonspecial confirmed"));
        }
        CertificateVerdict::LeafVerifiedNonspecial => {
            if recomputed.verdict != CertificateVerdict::ConditionalNonspecial {
                bail!("leaf-verified verdict over a chain whose audits fail");
            }
            let report = tree
                .leaf_report
                .as_ref()
                .context("leaf-verified verdict without a leaf report")?;
            if !report.certified_nonspecial {
                bail!("leaf-verified verdict but the report does not certify");
            }
            lines.push(String::from("verdict leaf-verified-nonspecial consistent"));
        }
    }

    if let Some(report) = &tree.leaf_report {
        let variant = ModelVariant::for_n(tree.leaf.n())
            .with_context(|| format!("no concrete model for n = {}", tree.leaf.n()))?;
        if !recheck_oracle {
            lines.push(String::from("leaf oracle report present (re-run skipped)"));
        } else {
            let spec = K3ModelSpec::new(variant, report.prime, report.seed)
                .map_err(|e| anyhow::anyhow!("invalid model spec in report: {e}"))?;
            let rerun = speciality_test(&spec.build(), &tree.leaf, report.trials)
                .map_err(|e| anyhow::anyhow!("leaf oracle re-run failed: {e}"))?;
            if &rerun != report {
                bail!("leaf oracle re-run disagrees with the stored report");
            }
            lines.push(format!(
                "leaf oracle re-run reproduced rank {} over p = {}",
                report.effective_rank, report.prime
            ));
        }
    }
    Ok(lines)
}

/// Parses and verifies a serialized certificate document.
pub fn verify_document(json: &str, recheck_oracle: bool) -> Result<Vec<String>> {
    let doc: CertificateDocument =
        serde_json::from_str(json).context("certificate is not valid JSON")?;
    verify_tree(&doc.tree, recheck_oracle)
}
