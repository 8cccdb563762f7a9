//! Parameter ingestion: defaults, then an optional JSON file, then flags.

use std::path::PathBuf;

use clap::Args;
use ptomech::model::{validate, validate_optics};
use ptomech::{SystemParams, ValidatedParams};
use serde_json::{Map, Value};

use crate::{Failure, Outcome};

#[derive(Args, Debug, Default, Clone)]
pub struct ParamArgs {
    /// JSON file with any subset of the parameter fields; flags override it
    #[arg(long)]
    pub params: Option<PathBuf>,

    /// Mechanical frequency, units of gamma [default: 23]
    #[arg(long, allow_negative_numbers = true)]
    pub omega_m: Option<f64>,

    /// Passive-cavity loss rate; other rates are rescaled by it [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,

    /// Gain of cavity 1, units of gamma; negative for a lossy cavity [default: 0.1]
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,

    /// Mechanical damping, units of gamma [default: 1.63e-3]
    #[arg(long, allow_negative_numbers = true)]
    pub gamma_m: Option<f64>,

    /// Single-photon optomechanical coupling, units of gamma [default: 7.4e-5]
    #[arg(long, allow_negative_numbers = true)]
    pub g: Option<f64>,

    /// Optical tunneling rate, units of gamma [default: 0.8]
    #[arg(long = "j", alias = "J", allow_negative_numbers = true)]
    pub j: Option<f64>,

    /// Drive detuning, units of gamma; must be positive except for supermodes [default: omega_m]
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,

    /// Parametric-amplifier gain, units of gamma [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub chi: Option<f64>,

    /// Parametric-amplifier pump phase, radians [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,

    /// Drive amplitude, units of sqrt(gamma) [default: 3000]
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_in: Option<f64>,

    /// Mechanical thermal occupation [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub n_th: Option<f64>,

    /// Optical input-noise occupation [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub n_a: Option<f64>,
}

fn read_json(path: &PathBuf) -> Outcome<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

impl ParamArgs {
    fn flags(&self) -> [(&'static str, Option<f64>); 12] {
        [
            ("omega_m", self.omega_m),
            ("gamma", self.gamma),
            ("kappa", self.kappa),
            ("gamma_m", self.gamma_m),
            ("g", self.g),
            ("J", self.j),
            ("delta", self.delta),
            ("chi", self.chi),
            ("theta", self.theta),
            ("alpha_in", self.alpha_in),
            ("n_th", self.n_th),
            ("n_a", self.n_a),
        ]
    }

    /// `base`, overlaid with the file's fields and then with the flags.
    ///
    /// Without an explicit detuning, `delta` follows `omega_m`.
    pub fn overlay(&self, base: SystemParams) -> Outcome<SystemParams> {
        self.overlay_on(base, Map::new(), "parameters")
    }

    /// Like [`overlay`](Self::overlay), with `fields` applied before the file.
    fn overlay_on(
        &self,
        base: SystemParams,
        fields: Map<String, Value>,
        source: &str,
    ) -> Outcome<SystemParams> {
        let mut merged = match serde_json::to_value(base) {
            Ok(Value::Object(m)) => m,
            _ => unreachable!("parameters serialize to an object"),
        };
        let mut explicit_delta = self.delta.is_some() || fields.contains_key("delta");
        let mut explicit_omega = self.omega_m.is_some() || fields.contains_key("omega_m");
        merged.extend(fields);
        let mut source = source.to_string();
        if let Some(path) = &self.params {
            let Value::Object(file) = read_json(path)? else {
                return Err(Failure::Input(format!(
                    "{}: expected a JSON object",
                    path.display()
                )));
            };
            explicit_delta |= file.contains_key("delta");
            explicit_omega |= file.contains_key("omega_m");
            merged.extend(file);
            source = path.display().to_string();
        }
        for (key, value) in self.flags() {
            if let Some(v) = value {
                merged.insert(key.into(), v.into());
            }
        }
        if explicit_omega && !explicit_delta {
            let omega = merged["omega_m"].clone();
            merged.insert("delta".into(), omega);
        }
        serde_json::from_value(Value::Object(merged))
            .map_err(|e| Failure::Input(format!("{source}: {e}")))
    }

    /// A grid specification file whose `template` may list only some
    /// parameters; the rest come from the defaults, the file and the flags.
    pub fn load_spec<T: serde::de::DeserializeOwned>(&self, path: &PathBuf) -> Outcome<T> {
        let name = path.display().to_string();
        let Value::Object(mut spec) = read_json(path)? else {
            return Err(Failure::Input(format!("{name}: expected a JSON object")));
        };
        let fields = match spec.remove("template") {
            None => Map::new(),
            Some(Value::Object(m)) => m,
            Some(_) => {
                return Err(Failure::Input(format!(
                    "{name}: template must be an object"
                )))
            }
        };
        let template = self.overlay_on(SystemParams::default(), fields, &name)?;
        spec.insert("template".into(), serde_json::to_value(template)?);
        serde_json::from_value(Value::Object(spec))
            .map_err(|e| Failure::Input(format!("{name}: {e}")))
    }

    pub fn resolve(&self) -> Outcome<ValidatedParams> {
        Ok(validate(self.overlay(SystemParams::default())?)?)
    }

    /// As [`resolve`](Self::resolve), with any finite detuning allowed.
    pub fn resolve_optics(&self) -> Outcome<SystemParams> {
        Ok(validate_optics(self.overlay(SystemParams::default())?)?)
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_none() && self.flags().iter().all(|(_, v)| v.is_none())
    }
}
