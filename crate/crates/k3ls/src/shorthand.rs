//! Exponent shorthand for multiplicity lists: `2^4,3` means `(2,2,2,2,3)`.

use anyhow::{bail, Context, Result};

/// Parses a comma-separated multiplicity list with `m^k` repetition
/// shorthand. The empty string denotes no points.
pub fn parse_mults(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for chunk in s.split(',') {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            bail!("empty entry in multiplicity list {s:?}");
        }
        let (value, count) = match chunk.split_once('^') {
            Some((v, k)) => {
                let count: usize = k
                    .trim()
                    .parse()
                    .with_context(|| format!("bad repetition count in {chunk:?}"))?;
                (v.trim(), count)
            }
            None => (chunk, 1),
        };
        let m: u64 = value
            .parse()
            .with_context(|| format!("bad multiplicity in {chunk:?}"))?;
        if count == 0 {
            bail!("repetition count must be >= 1 in {chunk:?}");
        }
        out.extend(std::iter::repeat(m).take(count));
    }
    Ok(out)
}
