//! Plain-text key-value documents (`key = value`, `#` comments) for media
//! and run options, plus the CSV table of custom elastic symbols.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;

use crate::media::{CustomSamples, Medium, MediumKind};
use crate::{LabError, Result};

/// Parsed key-value document. Keys are consumed with `take_*`; whatever is
/// left when [`KvDoc::finish`] runs is reported as unknown.
#[derive(Debug, Clone, Default)]
pub struct KvDoc {
    entries: BTreeMap<String, (usize, String)>,
}

impl KvDoc {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| LabError::Config(format!("line {}: expected 'key = value'", no + 1)))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k.is_empty() {
                return Err(LabError::Config(format!("line {}: empty key", no + 1)));
            }
            if entries.insert(k.clone(), (no + 1, v)).is_some() {
                return Err(LabError::Config(format!("line {}: duplicate key '{k}'", no + 1)));
            }
        }
        Ok(KvDoc { entries })
    }

    pub fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key).map(|(_, v)| v)
    }

    pub fn require(&mut self, key: &str) -> Result<String> {
        self.take(key).ok_or_else(|| LabError::Config(format!("missing key '{key}'")))
    }

    pub fn take_f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| LabError::Config(format!("'{key}' must be a finite number (got '{v}')"))),
        }
    }

    pub fn require_f64(&mut self, key: &str) -> Result<f64> {
        self.take_f64(key)?.ok_or_else(|| LabError::Config(format!("missing key '{key}'")))
    }

    pub fn take_usize(&mut self, key: &str) -> Result<Option<usize>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| LabError::Config(format!("'{key}' must be a non-negative integer (got '{v}')"))),
        }
    }

    pub fn take_bool(&mut self, key: &str) -> Result<Option<bool>> {
        match self.take(key).as_deref() {
            None => Ok(None),
            Some("true") => Ok(Some(true)),
            Some("false") => Ok(Some(false)),
            Some(v) => Err(LabError::Config(format!("'{key}' must be true or false (got '{v}')"))),
        }
    }

    /// Fails on any key not consumed so far.
    pub fn finish(self) -> Result<()> {
        match self.entries.iter().min_by_key(|(_, (line, _))| *line) {
            None => Ok(()),
            Some((k, (line, _))) => Err(LabError::Config(format!("line {line}: unknown key '{k}'"))),
        }
    }
}

/// Reads a medium document; `base` resolves a relative `samples` path.
///
/// ```text
/// kind = cubic
/// params.tau = 3
/// params.mu = 1
/// params.lambda = 0
/// gamma = 1
/// kappa = 1
/// ```
pub fn parse_medium(text: &str, base: Option<&Path>) -> Result<Medium> {
    let mut doc = KvDoc::parse(text)?;
    let kind = doc.require("kind")?;
    let gamma = doc.require_f64("gamma")?;
    let kappa = doc.require_f64("kappa")?;
    let kind = match kind.as_str() {
        "isotropic" => {
            MediumKind::Isotropic { lambda: doc.require_f64("params.lambda")?, mu: doc.require_f64("params.mu")? }
        }
        "cubic" => MediumKind::Cubic {
            tau: doc.require_f64("params.tau")?,
            mu: doc.require_f64("params.mu")?,
            lambda: doc.require_f64("params.lambda")?,
        },
        "rhombic" => MediumKind::Rhombic {
            tau1: doc.require_f64("params.tau1")?,
            tau2: doc.require_f64("params.tau2")?,
            mu: doc.require_f64("params.mu")?,
            lambda: doc.require_f64("params.lambda")?,
        },
        "custom" | "custom-sampled" => {
            let rel = doc.require("samples")?;
            let path = match base {
                Some(b) => b.join(&rel),
                None => rel.into(),
            };
            let text = std::fs::read_to_string(&path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
            MediumKind::Custom(parse_custom_csv(&text)?)
        }
        other => return Err(LabError::Config(format!("unknown kind '{other}' (isotropic|cubic|rhombic|custom)"))),
    };
    doc.finish()?;
    Medium::new(kind, gamma, kappa)
}

pub fn load_medium(path: &Path) -> Result<Medium> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
    parse_medium(&text, path.parent())
}

/// CSV with columns `phi, a11_re, a12_re, a12_im, a22_re` at equispaced angles
/// `2πk/N` in order; a header row is optional.
pub fn parse_custom_csv(text: &str) -> Result<CustomSamples> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut s = CustomSamples { a11: vec![], a12: vec![], a22: vec![] };
    let mut phis = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| LabError::Config(format!("custom csv: {e}")))?;
        let vals: std::result::Result<Vec<f64>, _> = rec.iter().map(|t| t.parse::<f64>()).collect();
        let v = match vals {
            Ok(v) => v,
            Err(_) if line == 0 => continue,
            Err(_) => return Err(LabError::Config(format!("custom csv line {}: non-numeric field", line + 1))),
        };
        if v.len() != 5 || v.iter().any(|x| !x.is_finite()) {
            return Err(LabError::Config(format!("custom csv line {}: need 5 finite columns", line + 1)));
        }
        phis.push(v[0]);
        s.a11.push(v[1]);
        s.a12.push(Complex64::new(v[2], v[3]));
        s.a22.push(v[4]);
    }
    let n = phis.len();
    for (k, p) in phis.iter().enumerate() {
        let want = TAU * k as f64 / n as f64;
        if (p - want).abs() > 1e-9 {
            return Err(LabError::Config(format!("custom csv: row {k} has phi={p}, expected 2*pi*{k}/{n}")));
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_document() {
        let m = parse_medium(
            "kind = cubic # comment\nparams.tau=3\nparams.mu=1\nparams.lambda=0\ngamma=1\nkappa=1\n",
            None,
        )
        .unwrap();
        assert_eq!(m.name(), "cubic(3,1,0)");
    }

    #[test]
    fn unknown_and_duplicate_keys() {
        let base = "kind = isotropic\nparams.lambda=1\nparams.mu=1\ngamma=1\nkappa=1\n";
        assert!(
            matches!(parse_medium(&format!("{base}colour=red\n"), None), Err(LabError::Config(s)) if s.contains("colour"))
        );
        assert!(
            matches!(parse_medium(&format!("{base}gamma=2\n"), None), Err(LabError::Config(s)) if s.contains("duplicate"))
        );
    }

    #[test]
    fn constraint_violation_is_medium_error() {
        let e =
            parse_medium("kind=cubic\nparams.tau=1\nparams.mu=1\nparams.lambda=2\ngamma=1\nkappa=1", None).unwrap_err();
        assert!(matches!(e, LabError::InvalidMedium(_)));
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn custom_csv_round_trip() {
        let n = 64;
        let mut text = String::from("phi,a11_re,a12_re,a12_im,a22_re\n");
        for k in 0..n {
            let p = TAU * k as f64 / n as f64;
            let (c, s) = (p.cos(), p.sin());
            text += &format!("{p},{},{},0,{}\n", 2.0 * c * c + 1.0, 2.0 * c * s, 2.0 * s * s + 1.0);
        }
        let s = parse_custom_csv(&text).unwrap();
        let m = Medium::custom(s, 1.0, 1.0).unwrap();
        let f = m.frame(0.3);
        assert!((f.kappa[0] - 1.0).abs() < 1e-9 && (f.kappa[1] - 3.0).abs() < 1e-9);
    }
}
