//! A bundled table of knot diagrams: all prime knots up to ten crossings
//! (Rolfsen names, KnotInfo PD codes) plus a few named fixtures.
//!
//! Table files hold one record per line, `name<TAB>pd-code`; lines starting
//! with `#` and blank lines are ignored.

use crate::diagram::LinkDiagram;
use crate::Error;

const BUNDLED: &str = include_str!("../data/knots.tsv");

/// One named diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnotEntry {
    pub name: String,
    pub pd: String,
}

impl KnotEntry {
    pub fn diagram(&self) -> Result<LinkDiagram, Error> {
        LinkDiagram::parse_pd(&self.pd)
    }

    /// Crossing count parsed from a Rolfsen-style name (`8_19` → 8).
    pub fn crossing_number(&self) -> Option<usize> {
        self.name.split('_').next()?.parse().ok()
    }
}

/// Parses a table in the `name<TAB>pd-code` format.
pub fn parse_table(text: &str) -> Result<Vec<KnotEntry>, Error> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, pd) = line.split_once('\t').ok_or_else(|| {
            Error::Input(format!("table line {}: expected name<TAB>pd-code", k + 1))
        })?;
        out.push(KnotEntry {
            name: name.trim().to_string(),
            pd: pd.trim().to_string(),
        });
    }
    Ok(out)
}

/// The bundled table.
pub fn bundled() -> Vec<KnotEntry> {
    parse_table(BUNDLED).expect("bundled table is well formed")
}

/// Looks up a knot by name. A trailing `*` or a `m` prefix (`m9_42`) asks
/// for the mirror image.
pub fn lookup(name: &str) -> Result<LinkDiagram, Error> {
    let (base, mirror) = if let Some(b) = name.strip_suffix('*') {
        (b, true)
    } else if let Some(b) = name
        .strip_prefix('m')
        .filter(|b| b.chars().next().is_some_and(|c| c.is_ascii_digit()))
    {
        (b, true)
    } else {
        (name, false)
    };
    let entry = bundled()
        .into_iter()
        .find(|e| e.name == base)
        .ok_or_else(|| Error::Input(format!("unknown knot name '{name}'")))?;
    let d = entry.diagram()?;
    Ok(if mirror { d.mirror() } else { d })
}
