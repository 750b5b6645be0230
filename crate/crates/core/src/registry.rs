//! Crystal dispersion data: Sellmeier forms, crystal records and the registry
//! that loads them from TOML.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transparency window every record's validity range must sit inside, μm.
pub const TRANSPARENCY_WINDOW_UM: (f64, f64) = (0.35, 3.0);

const SHIPPED: &str = include_str!("../data/crystals.toml");
const SHIPPED_ALTERNATES: &str = include_str!("../data/crystals_alternates.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            _ => Err(Error::InvalidInput(format!("unknown axis {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermStyle {
    /// `num · λ² / (λ² − pole)`
    Sellmeier,
    /// `num / (λ² − pole)`
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceTerm {
    pub style: TermStyle,
    pub num: f64,
    /// μm²
    pub pole: f64,
}

/// `n²(λ) = A + Σ terms − F·λ²`, λ in μm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SellmeierForm {
    #[serde(rename = "A")]
    pub constant_term: f64,
    #[serde(rename = "terms", default)]
    pub resonance_terms: Vec<ResonanceTerm>,
    #[serde(rename = "F", default)]
    pub infrared_term: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl SellmeierForm {
    /// Dispersionless medium with refractive index `n`.
    pub fn constant(n: f64) -> Self {
        SellmeierForm {
            constant_term: n * n,
            resonance_terms: Vec::new(),
            infrared_term: 0.0,
            source: None,
        }
    }

    pub fn n_squared(&self, lambda_um: f64) -> f64 {
        let l2 = lambda_um * lambda_um;
        let mut n2 = self.constant_term - self.infrared_term * l2;
        for t in &self.resonance_terms {
            n2 += match t.style {
                TermStyle::Sellmeier => t.num * l2 / (l2 - t.pole),
                TermStyle::Inverse => t.num / (l2 - t.pole),
            };
        }
        n2
    }

    pub fn dn_squared_dlambda(&self, lambda_um: f64) -> f64 {
        let l2 = lambda_um * lambda_um;
        let mut d = -2.0 * self.infrared_term * lambda_um;
        for t in &self.resonance_terms {
            let den = l2 - t.pole;
            d += match t.style {
                TermStyle::Sellmeier => -2.0 * t.num * t.pole * lambda_um / (den * den),
                TermStyle::Inverse => -2.0 * t.num * lambda_um / (den * den),
            };
        }
        d
    }

    /// Refractive index without a range check.
    pub fn n(&self, lambda_um: f64) -> f64 {
        self.n_squared(lambda_um).sqrt()
    }

    /// dn/dλ in 1/μm without a range check.
    pub fn dn_dlambda(&self, lambda_um: f64) -> f64 {
        self.dn_squared_dlambda(lambda_um) / (2.0 * self.n(lambda_um))
    }

    /// Group index n − λ·dn/dλ without a range check.
    pub fn group_index(&self, lambda_um: f64) -> f64 {
        let n = self.n(lambda_um);
        n - lambda_um * self.dn_squared_dlambda(lambda_um) / (2.0 * n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrystalRecord {
    pub name: String,
    pub composition: String,
    /// Effective nonlinear coefficient, pm/V. Descriptive only.
    pub d_eff_pm_per_v: f64,
    /// (λ_min, λ_max) in μm.
    pub validity_um: (f64, f64),
    pub source: String,
    axes: [SellmeierForm; 3],
}

impl CrystalRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        composition: impl Into<String>,
        d_eff_pm_per_v: f64,
        validity_um: (f64, f64),
        source: impl Into<String>,
        x: SellmeierForm,
        y: SellmeierForm,
        z: SellmeierForm,
    ) -> Result<Self> {
        let record = CrystalRecord {
            name: name.into(),
            composition: composition.into(),
            d_eff_pm_per_v,
            validity_um,
            source: source.into(),
            axes: [x, y, z],
        };
        record.validate()?;
        Ok(record)
    }

    /// Isotropic, dispersionless toy crystal.
    pub fn dispersionless(name: &str, n: f64, validity_um: (f64, f64)) -> Result<Self> {
        let f = SellmeierForm::constant(n);
        Self::new(name, "", 0.0, validity_um, "", f.clone(), f.clone(), f)
    }

    pub fn axis(&self, axis: Axis) -> &SellmeierForm {
        &self.axes[axis.index()]
    }

    pub fn in_range(&self, lambda_um: f64) -> bool {
        lambda_um >= self.validity_um.0 && lambda_um <= self.validity_um.1
    }

    pub fn check_range(&self, lambda_um: f64) -> Result<()> {
        if self.in_range(lambda_um) {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                record: self.name.clone(),
                lambda_um,
                lo: self.validity_um.0,
                hi: self.validity_um.1,
            })
        }
    }

    fn invalid(&self, field: impl Into<String>, message: impl Into<String>) -> Error {
        Error::Validation {
            record: self.name.clone(),
            field: field.into(),
            message: message.into(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(self.invalid("name", "empty name"));
        }
        let (lo, hi) = self.validity_um;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(self.invalid("validity_um", format!("empty or non-finite range [{lo}, {hi}]")));
        }
        let (wlo, whi) = TRANSPARENCY_WINDOW_UM;
        if lo < wlo || hi > whi {
            return Err(self.invalid(
                "validity_um",
                format!("[{lo}, {hi}] um is not inside the transparency window [{wlo}, {whi}] um"),
            ));
        }
        for axis in Axis::ALL {
            let form = self.axis(axis);
            let fields = [form.constant_term, form.infrared_term]
                .into_iter()
                .chain(form.resonance_terms.iter().flat_map(|t| [t.num, t.pole]));
            if fields.into_iter().any(|v| !v.is_finite()) {
                return Err(self.invalid(format!("axes.{axis}"), "non-finite coefficient"));
            }
            for (k, t) in form.resonance_terms.iter().enumerate() {
                if t.pole >= lo * lo && t.pole <= hi * hi {
                    return Err(self.invalid(
                        format!("axes.{axis}.terms[{k}].pole"),
                        format!(
                            "pole at {} um^2 (lambda = {:.4} um) lies inside the validity range",
                            t.pole,
                            t.pole.sqrt()
                        ),
                    ));
                }
            }
            const SAMPLES: usize = 256;
            for s in 0..=SAMPLES {
                let l = lo + (hi - lo) * s as f64 / SAMPLES as f64;
                let n2 = form.n_squared(l);
                if !(n2 > 1.0 && n2.is_finite()) {
                    return Err(self.invalid(
                        format!("axes.{axis}"),
                        format!("n^2 = {n2} at {l:.4} um (must be finite and > 1)"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// One row of [`Registry::list_crystals`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrystalSummary {
    pub name: String,
    pub composition: String,
    pub d_eff_pm_per_v: f64,
    pub validity_um: (f64, f64),
}

/// Immutable set of crystal records keyed by case-insensitive name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Registry {
    records: BTreeMap<String, CrystalRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    #[serde(default)]
    #[allow(dead_code)]
    format_version: Option<u32>,
    crystal: Vec<RecordFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordFile {
    name: String,
    composition: String,
    #[serde(rename = "d_eff_pm_per_V")]
    d_eff_pm_per_v: f64,
    validity_um: [f64; 2],
    source: String,
    axes: AxesFile,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AxesFile {
    x: Option<SellmeierForm>,
    y: Option<SellmeierForm>,
    z: Option<SellmeierForm>,
}

impl Registry {
    /// Records from the data file bundled with the library.
    pub fn shipped() -> Self {
        Self::from_toml_str(SHIPPED, "shipped crystals.toml").expect("bundled registry is valid")
    }

    /// Alternative dispersion sources bundled with the library.
    pub fn shipped_alternates() -> Self {
        Self::from_toml_str(SHIPPED_ALTERNATES, "shipped crystals_alternates.toml")
            .expect("bundled alternates registry is valid")
    }

    pub fn shipped_toml() -> &'static str {
        SHIPPED
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let file: RegistryFile = toml::from_str(text).map_err(|e| Error::Parse {
            origin: origin.to_string(),
            message: e.to_string(),
        })?;
        let mut records = Vec::with_capacity(file.crystal.len());
        for r in file.crystal {
            let missing = |axis: &str| Error::Validation {
                record: r.name.clone(),
                field: format!("axes.{axis}"),
                message: "missing axis".into(),
            };
            let x = r.axes.x.ok_or_else(|| missing("x"))?;
            let y = r.axes.y.ok_or_else(|| missing("y"))?;
            let z = r.axes.z.ok_or_else(|| missing("z"))?;
            records.push(CrystalRecord::new(
                r.name,
                r.composition,
                r.d_eff_pm_per_v,
                (r.validity_um[0], r.validity_um[1]),
                r.source,
                x,
                y,
                z,
            )?);
        }
        Self::from_records(records)
    }

    pub fn from_records(records: impl IntoIterator<Item = CrystalRecord>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for r in records {
            let key = r.name.to_lowercase();
            if map.contains_key(&key) {
                return Err(Error::Validation {
                    record: r.name.clone(),
                    field: "name".into(),
                    message: "duplicate name (names are case-insensitive)".into(),
                });
            }
            map.insert(key, r);
        }
        Ok(Registry { records: map })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, name: &str) -> Result<&CrystalRecord> {
        self.records
            .get(&name.to_lowercase())
            .ok_or_else(|| Error::UnknownCrystal {
                name: name.to_string(),
                known: self.names(),
            })
    }

    /// Record names in alphabetical order.
    pub fn names(&self) -> Vec<String> {
        self.records.values().map(|r| r.name.clone()).collect()
    }

    pub fn records(&self) -> impl Iterator<Item = &CrystalRecord> {
        self.records.values()
    }

    pub fn list_crystals(&self) -> Vec<CrystalSummary> {
        self.records
            .values()
            .map(|r| CrystalSummary {
                name: r.name.clone(),
                composition: r.composition.clone(),
                d_eff_pm_per_v: r.d_eff_pm_per_v,
                validity_um: r.validity_um,
            })
            .collect()
    }
}
