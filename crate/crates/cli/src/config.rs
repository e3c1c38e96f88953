//! Flat key-value run configuration with section headers and unit-suffixed
//! keys. Unknown sections or keys are rejected; all missing required keys
//! are reported in one consolidated error.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use e2pa_core::optics::BeamProfile;
use e2pa_core::spectra::{spectral_overlap, CollectionChain, SpectrumKind};
use e2pa_core::{ApparatusSpec, CollectionModel, SampleSpec};

use crate::error::{CliError, Result};
use crate::io::read_spectrum;

/// One parsed `[section]` with its key-value pairs in file order.
#[derive(Debug, Clone)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<(String, String, usize)>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _, _)| k == key).map(|(_, v, _)| v.as_str())
    }
}

/// Raw parse of the config text: sections in file order.
pub fn parse_sections(text: &str, origin: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| {
                CliError::Config(format!("{origin}:{line_no}: unterminated section header '{raw}'"))
            })?;
            sections.push(Section { name: name.trim().to_string(), line: line_no, entries: Vec::new() });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("{origin}:{line_no}: expected 'key = value', got '{raw}'"))
        })?;
        let section = sections.last_mut().ok_or_else(|| {
            CliError::Config(format!("{origin}:{line_no}: key outside any [section]"))
        })?;
        let key = key.trim().to_string();
        if section.entries.iter().any(|(k, _, _)| *k == key) {
            return Err(CliError::Config(format!(
                "{origin}:{line_no}: duplicate key '{key}' in [{}]",
                section.name
            )));
        }
        section.entries.push((key, value.trim().to_string(), line_no));
    }
    Ok(sections)
}

/// Typed reader over one section: records which keys were consumed so
/// unknown keys can be rejected, and collects all missing keys.
pub struct SectionReader<'a> {
    section: &'a Section,
    origin: &'a str,
    consumed: BTreeSet<String>,
    missing: Vec<String>,
}

impl<'a> SectionReader<'a> {
    pub fn new(section: &'a Section, origin: &'a str) -> Self {
        Self { section, origin, consumed: BTreeSet::new(), missing: Vec::new() }
    }

    pub fn require_f64(&mut self, key: &str) -> f64 {
        self.consumed.insert(key.to_string());
        match self.section.get(key) {
            Some(v) => self.parse_f64(key, v).unwrap_or(f64::NAN),
            None => {
                self.missing.push(format!("[{}] {key}", self.section.name));
                f64::NAN
            }
        }
    }

    pub fn optional_f64(&mut self, key: &str) -> Option<f64> {
        self.consumed.insert(key.to_string());
        self.section.get(key).map(|v| self.parse_f64(key, v).unwrap_or(f64::NAN))
    }

    fn parse_f64(&mut self, key: &str, v: &str) -> Option<f64> {
        match v.parse::<f64>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.missing.push(format!(
                    "[{}] {key}: '{v}' is not a number",
                    self.section.name
                ));
                None
            }
        }
    }

    pub fn optional_str(&mut self, key: &str) -> Option<String> {
        self.consumed.insert(key.to_string());
        self.section.get(key).map(str::to_string)
    }

    pub fn require_str(&mut self, key: &str) -> String {
        self.consumed.insert(key.to_string());
        match self.section.get(key) {
            Some(v) => v.to_string(),
            None => {
                self.missing.push(format!("[{}] {key}", self.section.name));
                String::new()
            }
        }
    }

    /// Finishes the section: unknown keys are fatal, missing keys are
    /// accumulated into `problems`.
    pub fn finish(self, problems: &mut Vec<String>) -> Result<()> {
        for (key, _, line) in &self.section.entries {
            if !self.consumed.contains(key) {
                return Err(CliError::Config(format!(
                    "{}:{line}: unknown key '{key}' in [{}]",
                    self.origin, self.section.name
                )));
            }
        }
        problems.extend(self.missing);
        Ok(())
    }
}

/// Entanglement-scale parameters for the estimate column.
#[derive(Debug, Clone, Copy)]
pub struct EntanglementConfig {
    pub te_fs: f64,
    pub ae_um2: f64,
    pub ae_max_um2: Option<f64>,
}

/// Per-sample extras that ride along with the core `SampleSpec`.
#[derive(Debug, Clone)]
pub struct SampleEntry {
    pub spec: SampleSpec,
    /// Previously reported entangled cross-section, cm², if any.
    pub sigma_e_lit_cm2: Option<f64>,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub apparatus: ApparatusSpec,
    pub beam_laser: BeamProfile,
    pub beam_spdc: BeamProfile,
    pub entanglement: Option<EntanglementConfig>,
    pub samples: Vec<SampleEntry>,
    /// Simulation plan parameters, when a [plan] section is present.
    pub plan: Option<PlanConfig>,
}

/// The [plan] section driving the simulator.
#[derive(Debug, Clone)]
pub struct PlanConfig {
    pub sample: String,
    pub powers_uw: Vec<f64>,
    pub integration_s: f64,
    pub chopper_hz: f64,
    pub background_cps: f64,
    pub rng_seed: u64,
    pub transition_fraction: f64,
}

pub fn load(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let origin = path.display().to_string();
    let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    from_text_with_base(&text, &origin, &base)
}

/// Loads the collection chain named by a [spectra.NAME] section and
/// computes the overlap ratio ∫γΦdλ / Φ from the tabulated curves.
fn overlap_ratio_from_spectra(
    section: &Section,
    origin: &str,
    base: &Path,
    quantum_yield: f64,
    problems: &mut Vec<String>,
) -> Result<Option<f64>> {
    let mut r = SectionReader::new(section, origin);
    let emission_path = r.require_str("emission");
    let cuvette_path = r.require_str("cuvette");
    let mirror_path = r.require_str("mirror");
    let qe_path = r.require_str("qe");
    let filters_raw = r.optional_str("filters").unwrap_or_default();
    let lenses_raw = r.optional_str("lenses").unwrap_or_default();
    r.finish(problems)?;
    if !problems.is_empty() {
        return Ok(None);
    }
    let resolve = |p: &str| base.join(p);
    let list = |raw: &str, kind: SpectrumKind| -> Result<Vec<_>> {
        raw.split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| read_spectrum(&resolve(t), kind))
            .collect()
    };
    let emission = read_spectrum(&resolve(&emission_path), SpectrumKind::Emission)?
        .normalized_to(quantum_yield)
        .map_err(|e| CliError::Config(format!("{origin}: [{}] emission: {e}", section.name)))?;
    let chain = CollectionChain {
        filters: list(&filters_raw, SpectrumKind::Transmittance)?,
        lenses: list(&lenses_raw, SpectrumKind::Transmittance)?,
        cuvette: read_spectrum(&resolve(&cuvette_path), SpectrumKind::Transmittance)?,
        mirror: read_spectrum(&resolve(&mirror_path), SpectrumKind::Reflectance)?,
        detector_qe: read_spectrum(&resolve(&qe_path), SpectrumKind::QuantumEfficiency)?,
    };
    let integral = spectral_overlap(&emission, &chain)?;
    Ok(Some(integral / quantum_yield))
}

pub fn from_text_with_base(text: &str, origin: &str, base: &Path) -> Result<RunConfig> {
    let sections = parse_sections(text, origin)?;
    let mut problems: Vec<String> = Vec::new();

    let find = |name: &str| sections.iter().find(|s| s.name == name);

    // apparatus + entangled-arm beam geometry
    let mut rep_rate = f64::NAN;
    let mut hnu = f64::NAN;
    let mut cuvette = f64::NAN;
    let mut transmittance = f64::NAN;
    let mut q = None;
    let mut f_lb = f64::NAN;
    let mut collection = (f64::NAN, f64::NAN, f64::NAN);
    match find("apparatus") {
        Some(s) => {
            let mut r = SectionReader::new(s, origin);
            rep_rate = r.require_f64("rep_rate_hz");
            hnu = r.require_f64("hnu_J");
            cuvette = r.require_f64("cuvette_length_cm");
            transmittance = r.require_f64("path_transmittance");
            q = r.optional_f64("photon_rate_q_per_s");
            f_lb = r.require_f64("f_lb_cps");
            collection = (
                r.require_f64("collection_kappa_max"),
                r.require_f64("collection_alpha_per_mm"),
                r.require_f64("collection_z0_mm"),
            );
            r.finish(&mut problems)?;
        }
        None => problems.push("[apparatus] section".into()),
    }

    let mut read_beam = |name: &str| -> Option<(f64, f64, f64, f64)> {
        match find(name) {
            Some(s) => {
                let mut r = SectionReader::new(s, origin);
                let g = (
                    r.require_f64("fwhm_x0_um"),
                    r.require_f64("fwhm_y0_um"),
                    r.require_f64("rayleigh_zr_mm"),
                    r.require_f64("pulse_fwhm_fs"),
                );
                if r.finish(&mut problems).is_err() {
                    return None;
                }
                Some(g)
            }
            None => {
                problems.push(format!("[{name}] section"));
                None
            }
        }
    };
    let laser_geom = read_beam("beam.laser");
    let spdc_geom = read_beam("beam.spdc");

    let entanglement = match find("entanglement") {
        Some(s) => {
            let mut r = SectionReader::new(s, origin);
            let e = EntanglementConfig {
                te_fs: r.require_f64("te_fs"),
                ae_um2: r.require_f64("ae_um2"),
                ae_max_um2: r.optional_f64("ae_max_um2"),
            };
            r.finish(&mut problems)?;
            Some(e)
        }
        None => None,
    };

    let mut samples = Vec::new();
    for s in sections.iter().filter(|s| s.name.starts_with("sample.")) {
        let name = s.name.trim_start_matches("sample.").to_string();
        let mut r = SectionReader::new(s, origin);
        let c_umol = r.require_f64("c_umol_per_L");
        let phi = r.require_f64("quantum_yield");
        let overlap_literal = r.optional_f64("spectral_overlap_ratio");
        let sigma_c = r.optional_f64("sigma_c_gm");
        let extinction = r.optional_f64("extinction_per_M_cm");
        let sigma_e_lit = r.optional_f64("sigma_e_lit_cm2");
        r.finish(&mut problems)?;

        // The overlap ratio comes either literally or from tabulated
        // spectra in a matching [spectra.NAME] section.
        let spectra_section = sections.iter().find(|x| x.name == format!("spectra.{name}"));
        let overlap = match (overlap_literal, spectra_section) {
            (Some(_), Some(sp)) => {
                return Err(CliError::Config(format!(
                    "{origin}:{}: [sample.{name}] gives spectral_overlap_ratio and \
                     [spectra.{name}] exists; give one or the other",
                    sp.line
                )));
            }
            (Some(v), None) => Some(v),
            (None, Some(sp)) => {
                overlap_ratio_from_spectra(sp, origin, base, phi, &mut problems)?
            }
            (None, None) => {
                problems.push(format!(
                    "[sample.{name}] spectral_overlap_ratio (or a [spectra.{name}] section)"
                ));
                None
            }
        };
        if problems.is_empty() {
            let overlap = overlap.expect("present when no problems");
            let spec = SampleSpec::new(&name, c_umol * 1e-6, phi, overlap, sigma_c, extinction)
                .map_err(|e| CliError::Config(format!("{origin}: [sample.{name}]: {e}")))?;
            samples.push(SampleEntry { spec, sigma_e_lit_cm2: sigma_e_lit });
        }
    }

    let plan = match find("plan") {
        Some(s) => {
            let mut r = SectionReader::new(s, origin);
            let sample = r.require_str("sample");
            let powers_raw = r.require_str("powers_uw");
            let integration_s = r.require_f64("integration_s");
            let chopper_hz = r.require_f64("chopper_hz");
            let background_cps = r.require_f64("background_cps");
            let rng_seed = r.require_f64("rng_seed");
            let transition_fraction = r.optional_f64("transition_fraction").unwrap_or(0.05);
            r.finish(&mut problems)?;
            let powers_uw = powers_raw
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| {
                    t.trim().parse::<f64>().map_err(|_| {
                        CliError::Config(format!("{origin}: [plan] powers_uw: '{t}' is not a number"))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            Some(PlanConfig {
                sample,
                powers_uw,
                integration_s,
                chopper_hz,
                background_cps,
                rng_seed: rng_seed as u64,
                transition_fraction,
            })
        }
        None => None,
    };

    for s in &sections {
        let known = s.name == "apparatus"
            || s.name == "beam.laser"
            || s.name == "beam.spdc"
            || s.name == "entanglement"
            || s.name == "plan"
            || s.name.starts_with("sample.")
            || (s.name.starts_with("spectra.")
                && sections.iter().any(|x| x.name == format!("sample.{}", &s.name[8..])));
        if !known {
            return Err(CliError::Config(format!(
                "{origin}:{}: unknown section [{}]",
                s.line, s.name
            )));
        }
    }

    if !problems.is_empty() {
        return Err(CliError::Config(format!(
            "{origin}: missing or invalid configuration:\n  - {}",
            problems.join("\n  - ")
        )));
    }

    let (sx, sy, szr, stau) = spdc_geom.expect("validated above");
    let (lx, ly, lzr, ltau) = laser_geom.expect("validated above");

    let apparatus = ApparatusSpec::new(
        rep_rate,
        stau,
        sx,
        sy,
        szr,
        hnu,
        cuvette,
        CollectionModel::new(collection.0, collection.1, collection.2)
            .map_err(|e| CliError::Config(format!("{origin}: [apparatus] collection model: {e}")))?,
        transmittance,
        q,
        f_lb,
    )
    .map_err(|e| CliError::Config(format!("{origin}: [apparatus]: {e}")))?;

    let beam_laser = BeamProfile::new(lx, ly, lzr, ltau, rep_rate, None, None, hnu)
        .map_err(|e| CliError::Config(format!("{origin}: [beam.laser]: {e}")))?;
    let beam_spdc = BeamProfile::new(sx, sy, szr, stau, rep_rate, None, q, hnu)
        .map_err(|e| CliError::Config(format!("{origin}: [beam.spdc]: {e}")))?;

    Ok(RunConfig { apparatus, beam_laser, beam_spdc, entanglement, samples, plan })
}

impl RunConfig {
    pub fn sample(&self, name: &str) -> Result<&SampleEntry> {
        self.samples
            .iter()
            .find(|s| s.spec.name == name)
            .ok_or_else(|| CliError::Config(format!("no [sample.{name}] section in the configuration")))
    }
}
