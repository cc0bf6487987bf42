//! JSON manifests describing `(ω, g, ∇)` and named objects on it.
//!
//! ```json
//! {
//!   "mode": "chart",
//!   "base_dim": 2,
//!   "fiber_rank": 2,
//!   "omega": [["0", "1"], ["-1", "0"]],
//!   "g": [["1", "0"], ["0", "1"]],
//!   "gamma": [[["0", "y"], ["-y", "0"]], [["0", "0"], ["0", "0"]]],
//!   "volume_scale": "1",
//!   "sections": { "s": "x*e[1]" },
//!   "derivations": { "D": { "nabla": ["e[1]", "0"], "contraction": ["1", "0"] } },
//!   "rescale": "1 + e[1]*e[2]",
//!   "canonical_volume": "1",
//!   "densities": { "rho": { "rho0": "(x - t*y)*e[1]*e[2]", "rho1": "0" } }
//! }
//! ```
//!
//! `gamma[a][k][j]` is `Γ^k_{aj}`, so `∇_a e_j = Σ_k Γ^k_{aj} e_k`; omitted
//! means flat. Entries may be strings or integers. Everything after `gamma`
//! is optional.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use graded_core::algebra::{CoeffFn, Mode, Ring, Superfunction, MAX_RANK, Q};
use graded_core::berezin::BerezinianVolume;
use graded_core::continuity::TimeDependentSection;
use graded_core::derivations::{Connection, GradedDerivation};
use graded_core::geometry::SymplecticData;
use graded_core::linalg::CoeffMatrix;
use serde::Deserialize;

use crate::expr::{self, Context, ExprError};

#[derive(Debug)]
pub enum ManifestError {
    Io { path: String, message: String },
    Syntax { line: usize, column: usize, message: String },
    Semantic { path: String, message: String },
}

impl fmt::Display for ManifestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifestError::Io { path, message } => write!(f, "cannot read {path}: {message}"),
            ManifestError::Syntax { line, column, message } => write!(f, "line {line}, column {column}: {message}"),
            ManifestError::Semantic { path, message } => write!(f, "{path}: {message}"),
        }
    }
}

impl std::error::Error for ManifestError {}

fn semantic<T>(path: impl Into<String>, message: impl fmt::Display) -> Result<T, ManifestError> {
    Err(ManifestError::Semantic { path: path.into(), message: message.to_string() })
}

fn at(path: &str) -> impl Fn(ExprError) -> ManifestError + '_ {
    move |e| ManifestError::Semantic { path: path.to_string(), message: e.to_string() }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Entry {
    Text(String),
    Int(i64),
}

impl Entry {
    fn text(&self) -> String {
        match self {
            Entry::Text(s) => s.clone(),
            Entry::Int(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDerivation {
    nabla: Vec<Entry>,
    contraction: Vec<Entry>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawDensity {
    Plain(Entry),
    Split {
        rho0: Entry,
        #[serde(default)]
        rho1: Option<Entry>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    mode: String,
    base_dim: usize,
    fiber_rank: usize,
    omega: Vec<Vec<Entry>>,
    g: Vec<Vec<Entry>>,
    #[serde(default)]
    gamma: Option<Vec<Vec<Vec<Entry>>>>,
    #[serde(default)]
    volume_scale: Option<Entry>,
    #[serde(default)]
    sections: BTreeMap<String, Entry>,
    #[serde(default)]
    derivations: BTreeMap<String, RawDerivation>,
    #[serde(default)]
    rescale: Option<Entry>,
    #[serde(default)]
    canonical_volume: Option<Entry>,
    #[serde(default)]
    densities: BTreeMap<String, RawDensity>,
}

#[derive(Clone, Debug)]
pub struct Manifest {
    pub data: Arc<SymplecticData>,
    pub sections: BTreeMap<String, Superfunction>,
    pub derivations: BTreeMap<String, GradedDerivation>,
    pub rescale: Option<Superfunction>,
    pub canonical_volume: Option<CoeffFn>,
    pub densities: BTreeMap<String, TimeDependentSection>,
}

impl Manifest {
    pub fn ring(&self) -> Ring {
        self.data.ring()
    }

    pub fn rank(&self) -> usize {
        self.data.rank()
    }

    pub fn connection(&self) -> &Arc<Connection> {
        self.data.connection()
    }

    /// The symplectic Berezinian, rescaled when the manifest supplies one.
    pub fn volume(&self) -> BerezinianVolume {
        let v = BerezinianVolume::symplectic(&self.data);
        match &self.rescale {
            Some(s) => v.with_rescale(s.clone()).expect("validated on load"),
            None => v,
        }
    }
}

pub fn load(path: &str, mode_override: Option<Mode>) -> Result<Manifest, ManifestError> {
    let text = std::fs::read_to_string(path).map_err(|e| ManifestError::Io { path: path.to_string(), message: e.to_string() })?;
    parse(&text, mode_override)
}

pub fn parse(text: &str, mode_override: Option<Mode>) -> Result<Manifest, ManifestError> {
    let raw: RawManifest = serde_json::from_str(text).map_err(|e| ManifestError::Syntax {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    build(raw, mode_override)
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn matrix(rows: &[Vec<Entry>], n: usize, ring: Ring, path: &str) -> Result<CoeffMatrix, ManifestError> {
    if rows.len() != n {
        return semantic(path, format!("expected {n} rows, got {}", rows.len()));
    }
    let mut out = CoeffMatrix::filled(n, n, CoeffFn::zero(ring));
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return semantic(format!("{path}[{i}]"), format!("expected {n} entries, got {}", row.len()));
        }
        for (j, e) in row.iter().enumerate() {
            let p = format!("{path}[{i}][{j}]");
            out.set(i, j, expr::parse_coeff(&e.text(), ring).map_err(at(&p))?);
        }
    }
    Ok(out)
}

fn build(raw: RawManifest, mode_override: Option<Mode>) -> Result<Manifest, ManifestError> {
    let mode: Mode = match mode_override {
        Some(m) => m,
        None => match raw.mode.parse() {
            Ok(m) => m,
            Err(_) => return semantic("mode", format!("expected \"chart\" or \"torus\", got {:?}", raw.mode)),
        },
    };
    let (d, r) = (raw.base_dim, raw.fiber_rank);
    if d == 0 || d % 2 == 1 {
        return semantic("base_dim", format!("must be positive and even, got {d}"));
    }
    if r > MAX_RANK {
        return semantic("fiber_rank", format!("at most {MAX_RANK} supported, got {r}"));
    }
    let ring = match mode {
        Mode::Chart => Ring::chart(d),
        Mode::Torus => Ring::torus(d),
    };

    let omega = matrix(&raw.omega, d, ring, "omega")?;
    for i in 0..d {
        for j in i..d {
            if !(omega.get(i, j) + omega.get(j, i)).is_zero() {
                return semantic(
                    format!("omega[{j}][{i}]"),
                    format!("omega is not antisymmetric: omega[{i}][{j}] = {}, omega[{j}][{i}] = {}", omega.get(i, j), omega.get(j, i)),
                );
            }
        }
    }
    let g = matrix(&raw.g, r, ring, "g")?;
    for i in 0..r {
        for j in i + 1..r {
            if g.get(i, j) != g.get(j, i) {
                return semantic(
                    format!("g[{j}][{i}]"),
                    format!("g is not symmetric: g[{i}][{j}] = {}, g[{j}][{i}] = {}", g.get(i, j), g.get(j, i)),
                );
            }
        }
    }
    let conn = match &raw.gamma {
        None => Connection::flat(ring, r),
        Some(gs) => {
            if gs.len() != d {
                return semantic("gamma", format!("expected {d} matrices (one per coordinate), got {}", gs.len()));
            }
            let ms = gs
                .iter()
                .enumerate()
                .map(|(a, m)| matrix(m, r, ring, &format!("gamma[{a}]")))
                .collect::<Result<Vec<_>, _>>()?;
            Connection::new(ring, r, ms).or_else(|e| semantic("gamma", e))?
        }
    };
    let mut sd = SymplecticData::new(omega, g, conn).or_else(|e| semantic("omega", e))?;
    if let Some(v) = &raw.volume_scale {
        let q: Q = expr::parse_rational(&v.text()).map_err(at("volume_scale"))?;
        sd = sd.with_volume_scale(q);
    }
    let data = Arc::new(sd);
    let conn = data.connection().clone();

    let mut sections = BTreeMap::new();
    for (name, e) in &raw.sections {
        let p = format!("sections.{name}");
        sections.insert(name.clone(), expr::parse_superfunction(&e.text(), ring, r).map_err(at(&p))?);
    }

    let mut derivations = BTreeMap::new();
    for (name, rd) in &raw.derivations {
        let p = format!("derivations.{name}");
        if rd.nabla.len() != d {
            return semantic(format!("{p}.nabla"), format!("expected {d} components, got {}", rd.nabla.len()));
        }
        if rd.contraction.len() != r {
            return semantic(format!("{p}.contraction"), format!("expected {r} components, got {}", rd.contraction.len()));
        }
        let parse_all = |list: &[Entry], field: &str| -> Result<Vec<Superfunction>, ManifestError> {
            list.iter()
                .enumerate()
                .map(|(i, e)| {
                    let path = format!("{p}.{field}[{i}]");
                    expr::parse_superfunction(&e.text(), ring, r).map_err(at(&path))
                })
                .collect()
        };
        let nabla = parse_all(&rd.nabla, "nabla")?;
        let contraction = parse_all(&rd.contraction, "contraction")?;
        let der = GradedDerivation::new(conn.clone(), nabla, contraction).or_else(|e| semantic(&p, e))?;
        derivations.insert(name.clone(), der);
    }

    let rescale = match &raw.rescale {
        None => None,
        Some(e) => {
            let s = expr::parse_superfunction(&e.text(), ring, r).map_err(at("rescale"))?;
            BerezinianVolume::symplectic(&data).with_rescale(s.clone()).or_else(|e| semantic("rescale", e))?;
            Some(s)
        }
    };
    let canonical_volume = match &raw.canonical_volume {
        None => None,
        Some(e) => {
            let w = expr::parse_coeff(&e.text(), ring).map_err(at("canonical_volume"))?;
            BerezinianVolume::canonical(&data, w.clone()).or_else(|e| semantic("canonical_volume", e))?;
            Some(w)
        }
    };

    let ctx = Context { ring, rank: r, allow_time: true };
    let mut densities = BTreeMap::new();
    for (name, rd) in &raw.densities {
        let p = format!("densities.{name}");
        let (e0, e1) = match rd {
            RawDensity::Plain(e) => (e, None),
            RawDensity::Split { rho0, rho1 } => (rho0, rho1.as_ref()),
        };
        let p0 = format!("{p}.rho0");
        let rho0 = expr::parse_series(&e0.text(), &ctx).map_err(at(&p0))?.0;
        let rho1 = match e1 {
            Some(e) => {
                let p1 = format!("{p}.rho1");
                expr::parse_series(&e.text(), &ctx).map_err(at(&p1))?.0
            }
            None => Vec::new(),
        };
        let rho = TimeDependentSection::new(ring, r, rho0, rho1).or_else(|e| semantic(&p, e))?;
        densities.insert(name.clone(), rho);
    }

    Ok(Manifest { data, sections, derivations, rescale, canonical_volume, densities })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = r#"{
        "mode": "chart", "base_dim": 2, "fiber_rank": 2,
        "omega": [["0", "1"], ["-1", "0"]],
        "g": [[1, 0], [0, 1]],
        "sections": { "s": "x*e[1]" },
        "derivations": { "D": { "nabla": ["e[1]", "0"], "contraction": ["1", "0"] } },
        "densities": { "rho": "(x - t*y)*e[1]*e[2]" }
    }"#;

    #[test]
    fn flat_manifest_loads() {
        let m = parse(FLAT, None).unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(m.sections["s"].to_string(), "x1*e[1]");
        assert!(m.derivations["D"].parity().is_some());
        assert_eq!(m.densities["rho"].rho0().len(), 2);
    }

    #[test]
    fn non_antisymmetric_omega_names_the_entry() {
        let bad = FLAT.replace(r#"["-1", "0"]"#, r#"["1", "0"]"#);
        match parse(&bad, None).unwrap_err() {
            ManifestError::Semantic { path, message } => {
                assert_eq!(path, "omega[1][0]");
                assert!(message.contains("antisymmetric"), "{message}");
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn torus_rejects_polynomials() {
        let bad = FLAT.replace(r#""mode": "chart""#, r#""mode": "torus""#).replace("x*e[1]", "x^2");
        let err = parse(&bad, None).unwrap_err();
        assert!(matches!(&err, ManifestError::Semantic { path, .. } if path == "sections.s"), "{err}");
        assert!(err.to_string().contains("non-periodic"), "{err}");
    }

    #[test]
    fn syntax_errors_have_positions() {
        let bad = "{\n  \"mode\": \"chart\",\n  \"base_dim\" 2\n}";
        match parse(bad, None).unwrap_err() {
            ManifestError::Syntax { line, column, .. } => assert_eq!((line, column), (3, 14)),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn shape_errors_carry_paths() {
        let bad = FLAT.replace(r#""contraction": ["1", "0"]"#, r#""contraction": ["1"]"#);
        let err = parse(&bad, None).unwrap_err();
        assert!(err.to_string().starts_with("derivations.D.contraction"), "{err}");
        let bad = FLAT.replace(r#""fiber_rank": 2"#, r#""fiber_rank": 3"#);
        assert!(parse(&bad, None).unwrap_err().to_string().starts_with("g:"));
    }

    #[test]
    fn mode_override_reparses() {
        let err = parse(FLAT, Some(Mode::Torus)).unwrap_err();
        assert!(err.to_string().contains("non-periodic"), "{err}");
    }
}
