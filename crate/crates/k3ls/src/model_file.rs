//! Plain-text model files.
//!
//! One key-value pair per line, `#` comments, and one `term` line per
//! monomial of the defining form:
//!
//! ```text
//! variant quartic
//! prime 1000003
//! seed 42
//! term 4 0 0 0 917331
//! ```

use anyhow::{bail, Context, Result};
use k3ls_core::model::{K3Model, ModelVariant};
use k3ls_core::poly::MPoly;
use std::fmt::Write as _;

pub fn render_model(model: &K3Model) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "variant {}", model.spec.variant.as_str());
    let _ = writeln!(out, "prime {}", model.spec.prime);
    let _ = writeln!(out, "seed {}", model.spec.seed);
    for (exps, coeff) in &model.form.terms {
        let mut line = String::from("term");
        for e in exps {
            let _ = write!(line, " {e}");
        }
        let _ = writeln!(out, "{line} {coeff}");
    }
    out
}

pub fn parse_model(text: &str) -> Result<K3Model> {
    let mut variant: Option<ModelVariant> = None;
    let mut prime: Option<u64> = None;
    let mut seed: Option<u64> = None;
    let mut terms: Vec<(Vec<u8>, u64)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let key = fields.next().unwrap();
        let rest: Vec<&str> = fields.collect();
        let at = || format!("line {}", lineno + 1);
        match key {
            "variant" => {
                let [v] = rest.as_slice() else {
                    bail!("variant takes one value ({})", at());
                };
                variant = Some(match *v {
                    "quartic" => ModelVariant::QuarticInP3,
                    "double-plane" => ModelVariant::DoubleSexticPlane,
                    other => bail!("unknown variant {other:?} ({})", at()),
                });
            }
            "prime" => {
                let [v] = rest.as_slice() else {
                    bail!("prime takes one value ({})", at());
                };
                prime = Some(v.parse().with_context(at)?);
            }
            "seed" => {
                let [v] = rest.as_slice() else {
                    bail!("seed takes one value ({})", at());
                };
                seed = Some(v.parse().with_context(at)?);
            }
            "term" => {
                let nvars = variant
                    .with_context(|| format!("term before variant ({})", at()))?
                    .form_nvars();
                if rest.len() != nvars + 1 {
                    bail!(
                        "term needs {} exponents and a coefficient ({})",
                        nvars,
                        at()
                    );
                }
                let exps: Vec<u8> = rest[..nvars]
                    .iter()
                    .map(|s| s.parse().with_context(at))
                    .collect::<Result<_>>()?;
                let coeff: u64 = rest[nvars].parse().with_context(at)?;
                terms.push((exps, coeff));
            }
            other => bail!("unknown key {other:?} ({})", at()),
        }
    }
    let variant = variant.context("missing variant line")?;
    let prime = prime.context("missing prime line")?;
    let seed = seed.context("missing seed line")?;
    if terms.is_empty() {
        bail!("model file has no term lines");
    }
    let form = MPoly::new(variant.form_nvars(), terms);
    K3Model::from_form(variant, prime, seed, form)
        .map_err(|e| anyhow::anyhow!("invalid model: {e}"))
}
