//! Wavelength-resolved spectra and the emission/collection overlap integral
//! ∫γ(λ)Φ(λ)dλ.
//!
//! γ(λ) multiplies every component transmittance in the fluorescence path:
//! filters, lenses, the cuvette wall, the retro-reflecting spherical mirror
//! (which sends light back through the cuvette, hence the ½(1 + 𝒯²ℛ)
//! factor) and the detector quantum efficiency.

use crate::error::{Error, Result};
use crate::quad::trapezoid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    /// Differential quantum yield Φ(λ), photons·excitation⁻¹·nm⁻¹.
    Emission,
    /// Component transmittance 𝒯(λ) in [0, 1].
    Transmittance,
    /// Mirror reflectance ℛ(λ) in [0, 1].
    Reflectance,
    /// Detector quantum efficiency QE(λ) in [0, 1].
    QuantumEfficiency,
}

/// A sampled spectrum on a strictly ascending wavelength grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub wavelength_nm: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: SpectrumKind,
}

impl Spectrum {
    pub fn new(wavelength_nm: Vec<f64>, values: Vec<f64>, kind: SpectrumKind) -> Result<Self> {
        if wavelength_nm.len() != values.len() {
            return Err(Error::Grid(format!(
                "spectrum has {} wavelengths but {} values",
                wavelength_nm.len(),
                values.len()
            )));
        }
        if wavelength_nm.len() < 2 {
            return Err(Error::Grid("spectrum needs at least two points".into()));
        }
        if !wavelength_nm.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Grid("wavelength grid must be strictly ascending".into()));
        }
        let bounded = !matches!(kind, SpectrumKind::Emission);
        for (&l, &v) in wavelength_nm.iter().zip(&values) {
            if !v.is_finite() || v < 0.0 || (bounded && v > 1.0) {
                return Err(Error::Domain(format!(
                    "spectrum value {v} at {l} nm outside the allowed range"
                )));
            }
        }
        Ok(Self { wavelength_nm, values, kind })
    }

    /// Constant spectrum over a range; handy for identity chains in tests
    /// and for components with flat specified response.
    pub fn flat(lo_nm: f64, hi_nm: f64, value: f64, kind: SpectrumKind) -> Result<Self> {
        Self::new(vec![lo_nm, hi_nm], vec![value, value], kind)
    }

    /// Linear interpolation; zero outside the tabulated range. Manufacturer
    /// curves are truncated, so out-of-range response is conservatively
    /// treated as opaque (emission outside its table is simply absent).
    pub fn value_at(&self, lambda_nm: f64) -> f64 {
        let grid = &self.wavelength_nm;
        if lambda_nm < grid[0] || lambda_nm > *grid.last().unwrap() {
            return 0.0;
        }
        let idx = match grid.binary_search_by(|x| x.partial_cmp(&lambda_nm).unwrap()) {
            Ok(i) => return self.values[i],
            Err(i) => i,
        };
        let (x0, x1) = (grid[idx - 1], grid[idx]);
        let (y0, y1) = (self.values[idx - 1], self.values[idx]);
        y0 + (y1 - y0) * (lambda_nm - x0) / (x1 - x0)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.wavelength_nm[0], *self.wavelength_nm.last().unwrap())
    }

    /// ∫ of the tabulated values over wavelength (trapezoidal).
    pub fn integral(&self) -> f64 {
        trapezoid(&self.wavelength_nm, &self.values)
    }

    /// Rescales the values so that the integral equals `target`. Used to
    /// normalize an emission spectrum to the literature quantum yield.
    pub fn normalized_to(mut self, target: f64) -> Result<Self> {
        let total = self.integral();
        if !(total > 0.0) {
            return Err(Error::Domain("cannot normalize a spectrum with zero mass".into()));
        }
        for v in &mut self.values {
            *v *= target / total;
        }
        Ok(self)
    }
}

/// The spectra of every component between the excitation volume and the
/// detector, in the order they act on the fluorescence.
#[derive(Debug, Clone)]
pub struct CollectionChain {
    /// Interference/bandpass/shortpass filters.
    pub filters: Vec<Spectrum>,
    /// Collection-optic lenses.
    pub lenses: Vec<Spectrum>,
    /// One cuvette-wall pass. Appears again squared in the mirror term.
    pub cuvette: Spectrum,
    /// Spherical retro-mirror reflectance.
    pub mirror: Spectrum,
    /// Detector quantum efficiency.
    pub detector_qe: Spectrum,
}

impl CollectionChain {
    /// γ(λ): product of all component efficiencies, with the spherical
    /// mirror contributing ½(1 + 𝒯_cuvette²(λ)·ℛ(λ)).
    pub fn gamma(&self, lambda_nm: f64) -> f64 {
        let mut g = 1.0;
        for f in &self.filters {
            g *= f.value_at(lambda_nm);
        }
        for l in &self.lenses {
            g *= l.value_at(lambda_nm);
        }
        let t_cuv = self.cuvette.value_at(lambda_nm);
        let r_mirror = self.mirror.value_at(lambda_nm);
        g * t_cuv * 0.5 * (1.0 + t_cuv * t_cuv * r_mirror) * self.detector_qe.value_at(lambda_nm)
    }

    fn components(&self) -> impl Iterator<Item = (&'static str, &Spectrum)> {
        self.filters
            .iter()
            .map(|s| ("filter", s))
            .chain(self.lenses.iter().map(|s| ("lens", s)))
            .chain([("cuvette", &self.cuvette), ("mirror", &self.mirror), ("detector QE", &self.detector_qe)])
    }
}

/// ∫γ(λ)Φ(λ)dλ over the emission support, by trapezoidal integration on the
/// union of all component grids (with linear interpolation between samples).
///
/// The emission spectrum must already be normalized so that its own integral
/// equals the total quantum yield Φ. Errors if any chain component has no
/// spectral overlap at all with the emission support, naming the gap.
pub fn spectral_overlap(emission: &Spectrum, chain: &CollectionChain) -> Result<f64> {
    if emission.kind != SpectrumKind::Emission {
        return Err(Error::Domain("overlap integral needs an emission spectrum".into()));
    }
    let (lo, hi) = emission.support();
    for (what, s) in chain.components() {
        let (slo, shi) = s.support();
        if shi < lo || slo > hi {
            return Err(Error::Grid(format!(
                "{what} spectrum covers {slo}-{shi} nm but the emission spans {lo}-{hi} nm; \
                 missing interval {lo}-{hi} nm"
            )));
        }
    }

    // Union grid restricted to the emission support: every tabulated knot of
    // every spectrum is a node so no linear segment is skipped.
    let mut grid: Vec<f64> = emission.wavelength_nm.clone();
    for (_, s) in chain.components() {
        grid.extend(s.wavelength_nm.iter().copied().filter(|&l| l >= lo && l <= hi));
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-9);

    let integrand: Vec<f64> =
        grid.iter().map(|&l| chain.gamma(l) * emission.value_at(l)).collect();
    Ok(trapezoid(&grid, &integrand))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unity_chain(lo: f64, hi: f64) -> CollectionChain {
        let flat = |kind| Spectrum::flat(lo, hi, 1.0, kind).unwrap();
        CollectionChain {
            filters: vec![flat(SpectrumKind::Transmittance)],
            lenses: vec![
                flat(SpectrumKind::Transmittance),
                flat(SpectrumKind::Transmittance),
                flat(SpectrumKind::Transmittance),
            ],
            cuvette: flat(SpectrumKind::Transmittance),
            mirror: flat(SpectrumKind::Reflectance),
            detector_qe: flat(SpectrumKind::QuantumEfficiency),
        }
    }

    fn flat_emission(lo: f64, hi: f64, total: f64) -> Spectrum {
        Spectrum::flat(lo, hi, 1.0, SpectrumKind::Emission)
            .unwrap()
            .normalized_to(total)
            .unwrap()
    }

    #[test]
    fn identity_chain_returns_quantum_yield() {
        let em = flat_emission(450.0, 650.0, 0.93);
        let got = spectral_overlap(&em, &unity_chain(400.0, 700.0)).unwrap();
        assert_relative_eq!(got, 0.93, max_relative = 1e-12);
    }

    #[test]
    fn box_filter_half_coverage_gives_half_yield() {
        // Filter passes exactly the lower half of a flat emission: the
        // closed-form integral is Φ/2.
        let em = flat_emission(400.0, 600.0, 0.8);
        let mut chain = unity_chain(300.0, 700.0);
        chain.filters = vec![Spectrum::new(
            vec![300.0, 499.999_999, 500.0, 700.0],
            vec![1.0, 1.0, 0.0, 0.0],
            SpectrumKind::Transmittance,
        )
        .unwrap()];
        let got = spectral_overlap(&em, &chain).unwrap();
        assert_relative_eq!(got, 0.4, max_relative = 1e-6);
    }

    #[test]
    fn mirror_term_uses_double_cuvette_pass() {
        // 𝒯_cuv = 0.9, ℛ = 1: γ = 0.9 × ½(1 + 0.81) = 0.8145
        let em = flat_emission(450.0, 650.0, 1.0);
        let mut chain = unity_chain(400.0, 700.0);
        chain.cuvette = Spectrum::flat(400.0, 700.0, 0.9, SpectrumKind::Transmittance).unwrap();
        let got = spectral_overlap(&em, &chain).unwrap();
        assert_relative_eq!(got, 0.9 * 0.5 * (1.0 + 0.81), max_relative = 1e-12);
    }

    #[test]
    fn disjoint_component_is_reported_with_interval() {
        let em = flat_emission(450.0, 650.0, 1.0);
        let mut chain = unity_chain(400.0, 700.0);
        chain.filters = vec![Spectrum::flat(800.0, 900.0, 1.0, SpectrumKind::Transmittance).unwrap()];
        let err = spectral_overlap(&em, &chain).unwrap_err();
        assert!(err.to_string().contains("missing interval 450-650 nm"), "{err}");
    }

    #[test]
    fn overlap_monotone_under_pointwise_decrease() {
        let em = flat_emission(450.0, 650.0, 0.9);
        let chain = unity_chain(400.0, 700.0);
        let base = spectral_overlap(&em, &chain).unwrap();
        let mut dimmer = chain.clone();
        dimmer.filters =
            vec![Spectrum::flat(400.0, 700.0, 0.7, SpectrumKind::Transmittance).unwrap()];
        let lower = spectral_overlap(&em, &dimmer).unwrap();
        assert!(lower < base);
        assert_relative_eq!(lower, 0.7 * base, max_relative = 1e-12);
    }

    #[test]
    fn grid_refinement_changes_little() {
        // Triangular emission against a sloped filter; refining the grid 2x
        // must move the integral by < 1e-3 relative.
        let coarse_grid: Vec<f64> = (0..21).map(|i| 450.0 + 10.0 * i as f64).collect();
        let tri: Vec<f64> =
            coarse_grid.iter().map(|&l| 1.0 - ((l - 550.0) / 100.0_f64).abs()).collect();
        let em = Spectrum::new(coarse_grid.clone(), tri, SpectrumKind::Emission)
            .unwrap()
            .normalized_to(0.9)
            .unwrap();
        let fine_grid: Vec<f64> = (0..41).map(|i| 450.0 + 5.0 * i as f64).collect();
        let tri_fine: Vec<f64> =
            fine_grid.iter().map(|&l| 1.0 - ((l - 550.0) / 100.0_f64).abs()).collect();
        let em_fine = Spectrum::new(fine_grid, tri_fine, SpectrumKind::Emission)
            .unwrap()
            .normalized_to(0.9)
            .unwrap();

        let mut chain = unity_chain(400.0, 700.0);
        chain.filters = vec![Spectrum::new(
            vec![400.0, 700.0],
            vec![0.2, 0.9],
            SpectrumKind::Transmittance,
        )
        .unwrap()];
        let a = spectral_overlap(&em, &chain).unwrap();
        let b = spectral_overlap(&em_fine, &chain).unwrap();
        assert!((a - b).abs() / b < 1e-3, "coarse {a} vs fine {b}");
    }
}
