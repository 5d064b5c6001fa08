//! Run configuration: flat JSON, unknown keys rejected, defaults filled.

use crate::error::{Error, Result};
use crate::evolver::{InitialDataSpec, DEFAULT_DISSIPATION, DEFAULT_HYPERBOLICITY_FACTOR};
use crate::nullform::{check_null, preset, radial_reduce, NullFormTensor, RadialNullForm, DEFAULT_R_MIN};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

/// How the nonlinearity is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum NullFormSpec {
    /// A named preset such as `"p2_alpha0"`.
    Preset(String),
    /// Full `P^{αβγ}` table, entries `"n"` or `"n/d"`, indexed `[α][β][γ]`.
    Table(Vec<Vec<Vec<String>>>),
    /// Radial slots directly.
    Radial(RadialNullForm),
}

impl Serialize for NullFormSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            NullFormSpec::Preset(name) => s.serialize_str(name),
            NullFormSpec::Table(t) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("table", t)?;
                m.end()
            }
            NullFormSpec::Radial(r) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("radial", r)?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for NullFormSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(name) => Ok(NullFormSpec::Preset(name)),
            serde_json::Value::Object(map) => {
                if map.len() != 1 {
                    return Err(D::Error::custom(
                        "null_form object must have exactly one of the keys `table`, `radial`",
                    ));
                }
                let (k, v) = map.into_iter().next().expect("one entry");
                match k.as_str() {
                    "table" => {
                        let t = table_from_value(v).map_err(D::Error::custom)?;
                        Ok(NullFormSpec::Table(t))
                    }
                    "radial" => serde_json::from_value(v)
                        .map(NullFormSpec::Radial)
                        .map_err(|e| D::Error::custom(format!("radial: {e}"))),
                    other => Err(D::Error::custom(format!(
                        "unknown null_form key `{other}`, expected `table` or `radial`"
                    ))),
                }
            }
            _ => Err(D::Error::custom(
                "null_form must be a preset name or an object {\"table\": ...} / {\"radial\": ...}",
            )),
        }
    }
}

fn table_from_value(v: serde_json::Value) -> std::result::Result<Vec<Vec<Vec<String>>>, String> {
    let err = || "table must be a 4x4x4 array of numbers or \"n/d\" strings".to_string();
    let rows = v.as_array().ok_or_else(err)?;
    if rows.len() != 4 {
        return Err(err());
    }
    rows.iter()
        .map(|r| {
            let r = r.as_array().filter(|r| r.len() == 4).ok_or_else(err)?;
            r.iter()
                .map(|c| {
                    let c = c.as_array().filter(|c| c.len() == 4).ok_or_else(err)?;
                    c.iter()
                        .map(|x| match x {
                            serde_json::Value::String(s) => Ok(s.clone()),
                            serde_json::Value::Number(n) if n.is_i64() => Ok(n.to_string()),
                            _ => Err(format!("table entry {x} is not an integer or \"n/d\" string")),
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// The reduced form together with the tensor it came from (when there is one).
#[derive(Debug, Clone)]
pub struct ResolvedForm {
    pub radial: RadialNullForm,
    pub tensor: Option<NullFormTensor>,
}

impl NullFormSpec {
    pub fn resolve(&self) -> Result<ResolvedForm> {
        match self {
            NullFormSpec::Preset(name) => {
                let p = preset(name).map_err(|e| Error::config("null_form", e.to_string()))?;
                let radial = p.radial.map_err(|e| Error::config("null_form", e.to_string()))?;
                Ok(ResolvedForm {
                    radial,
                    tensor: p.tensor,
                })
            }
            NullFormSpec::Table(t) => {
                let tensor = NullFormTensor::from_table(t).map_err(|e| Error::config("null_form.table", e.to_string()))?;
                check_null(&tensor).map_err(|e| Error::config("null_form.table", e.to_string()))?;
                let radial = radial_reduce(&tensor).map_err(|e| Error::config("null_form.table", e.to_string()))?;
                Ok(ResolvedForm {
                    radial,
                    tensor: Some(tensor),
                })
            }
            NullFormSpec::Radial(r) => Ok(ResolvedForm {
                radial: *r,
                tensor: None,
            }),
        }
    }
}

/// One requested energy `E^k_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyRequest {
    pub k: usize,
    pub p: f64,
}

/// Acceptance thresholds and numerical floors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// `|c_measured − c_predicted| / max(|c_predicted|, amplitude_floor)`
    pub mismatch: f64,
    /// allowed deviation of the fitted power index from the prediction
    pub lpi: f64,
    /// |ψ| below this is masked in power-index series
    pub noise_floor: f64,
    /// maximal relative drift of `a(u)` over the fit window
    pub drift: f64,
    /// tail amplitudes below this count as zero
    pub amplitude_floor: f64,
    /// abort when `|A| < hyperbolicity·(1 − h′²)`
    pub hyperbolicity: f64,
    /// radius below which the source is evaluated by its origin limit
    pub r_min: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            mismatch: 0.05,
            lpi: 0.15,
            noise_floor: 1e-12,
            drift: 0.02,
            amplitude_floor: 1e-9,
            hyperbolicity: DEFAULT_HYPERBOLICITY_FACTOR,
            r_min: DEFAULT_R_MIN,
        }
    }
}

fn default_n() -> usize {
    512
}
fn default_cfl() -> f64 {
    0.5
}
fn default_tau_final() -> f64 {
    100.0
}
fn default_eta() -> f64 {
    1.0
}
fn default_scale() -> f64 {
    1.5
}
fn default_dissipation() -> f64 {
    DEFAULT_DISSIPATION
}
fn default_cadence() -> f64 {
    0.5
}
fn default_probes() -> Vec<f64> {
    vec![0.0, 5.0]
}
fn default_delta() -> f64 {
    0.1
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// grid intervals in σ
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_tau_final")]
    pub tau_final: f64,
    /// slice decay parameter, `1 − h′ = ⟨r⟩^{−1−η}`
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// compactification scale `S` in `ρ = Sσ/(1 − σ²)`
    #[serde(default = "default_scale")]
    pub scale: f64,
    pub null_form: NullFormSpec,
    pub data: InitialDataSpec,
    #[serde(default = "default_dissipation")]
    pub dissipation: f64,
    /// τ-interval between diagnostic rows
    #[serde(default = "default_cadence")]
    pub cadence: f64,
    #[serde(default = "default_probes")]
    pub probes: Vec<f64>,
    #[serde(default)]
    pub energies: Vec<EnergyRequest>,
    /// small loss `δ` in the proved decay rates
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// τ-window of the tail fits; the final decade when absent
    #[serde(default)]
    pub fit_window: Option<(f64, f64)>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl RunConfig {
    /// Parses JSON text; schema errors carry the key path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { String::new() } else { path }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_json(&text)
    }

    /// Minimal config with every other field at its default.
    pub fn new(null_form: NullFormSpec, data: InitialDataSpec) -> Self {
        Self {
            n: default_n(),
            cfl: default_cfl(),
            tau_final: default_tau_final(),
            eta: default_eta(),
            scale: default_scale(),
            null_form,
            data,
            dissipation: default_dissipation(),
            cadence: default_cadence(),
            probes: default_probes(),
            energies: Vec::new(),
            delta: default_delta(),
            fit_window: None,
            tolerances: Tolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 64 {
            return Err(Error::config("n", format!("grid size {} below the minimum 64", self.n)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::config("cfl", "CFL factor must lie in (0, 1]"));
        }
        if !(self.tau_final > 0.0 && self.tau_final.is_finite()) {
            return Err(Error::config("tau_final", "must be positive"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::config(
                "eta",
                format!(
                    "eta = {} outside (0, 1]: the slices must approach null infinity with 1 - h' ~ r^(-1-eta)",
                    self.eta
                ),
            ));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::config("scale", "must be positive"));
        }
        if !(self.dissipation >= 0.0 && self.dissipation.is_finite()) {
            return Err(Error::config("dissipation", "must be nonnegative"));
        }
        if !(self.cadence > 0.0 && self.cadence <= self.tau_final) {
            return Err(Error::config("cadence", "must lie in (0, tau_final]"));
        }
        for (i, &r) in self.probes.iter().enumerate() {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::config(format!("probes[{i}]"), "probe radius must be finite and >= 0"));
            }
        }
        for (i, e) in self.energies.iter().enumerate() {
            if e.k > 2 {
                return Err(Error::config(format!("energies[{i}].k"), "order k is capped at 2"));
            }
            if !(0.0..3.0).contains(&e.p) {
                return Err(Error::config(
                    format!("energies[{i}].p"),
                    "weight p must lie in [0, 3); the r^p energy of a radiating solution diverges for p >= 3",
                ));
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::config("delta", "must lie in (0, 1)"));
        }
        if let Some((a, b)) = self.fit_window {
            if !(a >= 0.0 && b > a) {
                return Err(Error::config("fit_window", "expected [start, end] with 0 <= start < end"));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("mismatch", t.mismatch),
            ("lpi", t.lpi),
            ("noise_floor", t.noise_floor),
            ("drift", t.drift),
            ("amplitude_floor", t.amplitude_floor),
            ("hyperbolicity", t.hyperbolicity),
            ("r_min", t.r_min),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("tolerances.{name}"), "must be positive"));
            }
        }
        self.data.validate()?;
        self.null_form.resolve()?;
        Ok(())
    }

    /// The tail-fit window: configured, or the final decade of the run.
    pub fn fit_window(&self) -> (f64, f64) {
        self.fit_window.unwrap_or((0.1 * self.tau_final, self.tau_final))
    }

    /// SHA-256 of the canonical (key-sorted, defaults-filled) JSON.
    pub fn hash(&self) -> String {
        let v = serde_json::to_value(self).expect("config serializes");
        let canonical = serde_json::to_string(&v).expect("value serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_is_fully_defaulted() {
        let c = RunConfig::from_json(
            r#"{"n": 512, "null_form": "semilinear_null", "data": {"family": "compact_bump", "amplitude": 0.1}}"#,
        )
        .unwrap();
        assert_eq!(c.n, 512);
        assert_eq!(c.cfl, 0.5);
        assert_eq!(c.eta, 1.0);
        assert_eq!(c.dissipation, 0.02);
        assert_eq!(c.probes, vec![0.0, 5.0]);
        assert_eq!(c.tolerances, Tolerances::default());
        assert_eq!(c.fit_window(), (10.0, 100.0));
    }

    #[test]
    fn unknown_keys_are_rejected_with_path() {
        let e = RunConfig::from_json(
            r#"{"null_form": "linear", "data": {"family": "compact_bump", "amplitude": 0.1, "centre": 2}}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("centre"), "{e}");
        let e = RunConfig::from_json(
            r#"{"null_form": "linear", "data": {"family": "compact_bump", "amplitude": 0.1}, "tolerances": {"lpi": 0.1, "mismatsh": 1}}"#,
        )
        .unwrap_err();
        match e {
            Error::Config { path, message } => {
                assert_eq!(path, "tolerances.mismatsh");
                assert!(message.contains("mismatsh"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn eta_outside_range_names_the_slicing_requirement() {
        let e = RunConfig::from_json(
            r#"{"eta": 1.5, "null_form": "linear", "data": {"family": "compact_bump", "amplitude": 0.1}}"#,
        )
        .unwrap_err();
        match e {
            Error::Config { path, message } => {
                assert_eq!(path, "eta");
                assert!(message.contains("null infinity"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_null_table_is_rejected_with_monomial() {
        let mut t = vec![vec![vec!["0".to_string(); 4]; 4]; 4];
        t[0][0][0] = "1".into();
        let json = serde_json::json!({
            "null_form": {"table": t},
            "data": {"family": "compact_bump", "amplitude": 0.1}
        });
        let e = RunConfig::from_json(&json.to_string()).unwrap_err();
        assert!(e.to_string().contains("null condition violated"), "{e}");
    }

    #[test]
    fn hash_is_independent_of_key_order() {
        let a = RunConfig::from_json(
            r#"{"n": 256, "null_form": "p1_box", "data": {"family": "compact_bump", "amplitude": 0.1}}"#,
        )
        .unwrap();
        let b = RunConfig::from_json(
            r#"{"data": {"amplitude": 0.1, "family": "compact_bump"}, "null_form": "p1_box", "n": 256}"#,
        )
        .unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig { n: 512, ..a.clone() };
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn radial_slots_and_roundtrip() {
        let c = RunConfig::from_json(
            r#"{"null_form": {"radial": {"c": [[0, 1, 0], [-1, 0, 0]]}}, "data": {"family": "noncompact_tail", "c_init": 0.3, "delta_id": 0.5}}"#,
        )
        .unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), c);
    }
}
