//! Materials featurization: perovskite composition descriptors built from
//! fraction-weighted ion properties and tolerance factors, the
//! spin-multiplicity vector, an inverse-distance pair descriptor for atomic
//! structures, and the standard-scaler / PCA reduction stages.

#[allow(unused_imports)]
use num_traits::Float;
mod ion_table;
mod mbtr;
mod reduce;

pub use ion_table::{IonProperties, IonPropertyTable, Site, PROPERTY_KEYS};
pub use mbtr::{
    element_pairs, mbtr_k2, mbtr_k2_columns, mbtr_k2_with_elements, parse_xyz, Atom, MbtrGrid,
    Structure,
};
pub use reduce::{
    pca_fit, pca_transform, standard_scale_fit, standard_scale_transform, PcaState, ScalerState,
};

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum DescriptorError {
    MissingIon { label: String, site: Site },
    InvalidFractions { site: Site, sum: f64 },
    BadIonLabel(String),
    /// r̄_A = r̄_B makes the Bartel-style factor undefined (ln → 0).
    ToleranceSingularity,
    NonPositiveRadius,
    ZeroDenominator { property: &'static str },
    InvalidMultiplicity(u32),
    Table { line: usize, message: String },
    Xyz { line: usize, message: String },
    TooFewAtoms { got: usize },
    CoincidentAtoms { first: usize, second: usize },
    InvalidGrid { reason: &'static str },
    EmptyFit,
    DimensionMismatch { expected: usize, got: usize },
    TooManyComponents { requested: usize, available: usize },
    DegenerateData,
    NonFiniteInput,
}

impl fmt::Display for DescriptorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DescriptorError::MissingIon { label, site } => {
                write!(f, "ion {label:?} has no {site:?}-site record in the property table")
            }
            DescriptorError::InvalidFractions { site, sum } => {
                write!(f, "{site:?}-site fractions must sum to 1 (got {sum})")
            }
            DescriptorError::BadIonLabel(l) => write!(f, "cannot parse oxidation state from {l:?}"),
            DescriptorError::ToleranceSingularity => {
                write!(f, "tolerance factor undefined: mean A and B radii coincide")
            }
            DescriptorError::NonPositiveRadius => write!(f, "radii must be positive"),
            DescriptorError::ZeroDenominator { property } => {
                write!(f, "B-site property `{property}` is zero in a ratio")
            }
            DescriptorError::InvalidMultiplicity(m) => {
                write!(f, "spin multiplicity must be >= 1 (got {m})")
            }
            DescriptorError::Table { line, message } => {
                write!(f, "ion table line {line}: {message}")
            }
            DescriptorError::Xyz { line, message } => write!(f, "XYZ line {line}: {message}"),
            DescriptorError::TooFewAtoms { got } => {
                write!(f, "structure needs at least 2 atoms (got {got})")
            }
            DescriptorError::CoincidentAtoms { first, second } => {
                write!(f, "atoms {first} and {second} coincide")
            }
            DescriptorError::InvalidGrid { reason } => write!(f, "invalid grid: {reason}"),
            DescriptorError::EmptyFit => write!(f, "fit requires at least one row"),
            DescriptorError::DimensionMismatch { expected, got } => {
                write!(f, "feature dimension mismatch: expected {expected}, got {got}")
            }
            DescriptorError::TooManyComponents {
                requested,
                available,
            } => write!(
                f,
                "n_components {requested} exceeds the {available} available"
            ),
            DescriptorError::DegenerateData => write!(f, "rows carry no variance"),
            DescriptorError::NonFiniteInput => write!(f, "non-finite input"),
        }
    }
}

impl core::error::Error for DescriptorError {}

/// One ion occupying a fraction of a perovskite site.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteIon {
    pub label: String,
    pub fraction: f64,
    pub oxidation_state: f64,
}

impl SiteIon {
    /// Builds a site entry, reading the oxidation state from the label
    /// suffix: `Ba2+` → +2, `O2-` → −2, `Na+` → +1.
    pub fn from_label(label: &str, fraction: f64) -> Result<SiteIon, DescriptorError> {
        let oxidation_state = parse_charge(label)?;
        Ok(SiteIon {
            label: label.to_string(),
            fraction,
            oxidation_state,
        })
    }
}

fn parse_charge(label: &str) -> Result<f64, DescriptorError> {
    let bytes = label.as_bytes();
    let sign = match bytes.last() {
        Some(b'+') => 1.0,
        Some(b'-') => -1.0,
        _ => return Err(DescriptorError::BadIonLabel(label.to_string())),
    };
    let digits: String = label[..label.len() - 1]
        .chars()
        .rev()
        .take_while(|c| c.is_ascii_digit())
        .collect::<Vec<char>>()
        .into_iter()
        .rev()
        .collect();
    let magnitude: f64 = if digits.is_empty() {
        1.0
    } else {
        digits
            .parse()
            .map_err(|_| DescriptorError::BadIonLabel(label.to_string()))?
    };
    Ok(sign * magnitude)
}

/// ABO₃ composition: fractional occupancies of the A and B sites. The oxygen
/// radius comes from the property table's anion record.
#[derive(Debug, Clone, PartialEq)]
pub struct PerovskiteComposition {
    pub site_a: Vec<SiteIon>,
    pub site_b: Vec<SiteIon>,
}

/// AA'BB'O₆ composition with four independently occupied sites.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublePerovskiteComposition {
    pub site_a: Vec<SiteIon>,
    pub site_a_prime: Vec<SiteIon>,
    pub site_b: Vec<SiteIon>,
    pub site_b_prime: Vec<SiteIon>,
}

fn validate_site(ions: &[SiteIon], site: Site) -> Result<(), DescriptorError> {
    let sum: f64 = ions.iter().map(|i| i.fraction).sum();
    if ions.is_empty()
        || (sum - 1.0).abs() > 1e-9
        || ions.iter().any(|i| !(0.0..=1.0).contains(&i.fraction))
    {
        return Err(DescriptorError::InvalidFractions { site, sum });
    }
    Ok(())
}

/// Fraction-weighted property vector P̄ = Σ x_J P_J over one site.
fn weighted_properties(
    ions: &[SiteIon],
    site: Site,
    table: &IonPropertyTable,
) -> Result<[f64; 8], DescriptorError> {
    let mut acc = [0.0f64; 8];
    for ion in ions {
        let props = table
            .get(&ion.label, site)
            .ok_or_else(|| DescriptorError::MissingIon {
                label: ion.label.clone(),
                site,
            })?
            .as_array();
        for (a, p) in acc.iter_mut().zip(props) {
            *a += ion.fraction * p;
        }
    }
    Ok(acc)
}

fn weighted_oxidation(ions: &[SiteIon]) -> f64 {
    ions.iter().map(|i| i.fraction * i.oxidation_state).sum()
}

/// Goldschmidt and Bartel-style tolerance factors:
/// t_f = (r̄_A + r_O)/(√2 (r̄_B + r_O)) and
/// t_new = (r_O/r̄_B) − Q_A·[Q_A − (r̄_A/r̄_B)/ln(r̄_A/r̄_B)].
pub fn tolerance_factors(
    r_a: f64,
    r_b: f64,
    r_o: f64,
    q_a: f64,
) -> Result<(f64, f64), DescriptorError> {
    if !(r_a > 0.0 && r_b > 0.0 && r_o > 0.0) {
        return Err(DescriptorError::NonPositiveRadius);
    }
    let t_f = (r_a + r_o) / (core::f64::consts::SQRT_2 * (r_b + r_o));
    let ratio = r_a / r_b;
    let ln = ratio.ln();
    if ln.abs() < 1e-12 {
        return Err(DescriptorError::ToleranceSingularity);
    }
    let t_new = (r_o / r_b) - q_a * (q_a - ratio / ln);
    Ok((t_f, t_new))
}

fn ratios_and_products(
    a: &[f64; 8],
    b: &[f64; 8],
) -> Result<([f64; 8], [f64; 8]), DescriptorError> {
    let mut ratios = [0.0f64; 8];
    let mut products = [0.0f64; 8];
    for p in 0..8 {
        if b[p].abs() < 1e-300 {
            return Err(DescriptorError::ZeroDenominator {
                property: PROPERTY_KEYS[p],
            });
        }
        ratios[p] = a[p] / b[p];
        products[p] = a[p] * b[p];
    }
    Ok((ratios, products))
}

/// 34-entry ABO₃ descriptor:
/// `[t_f, t_new] ++ P̄_A (8) ++ P̄_B (8) ++ P̄_A/P̄_B (8) ++ P̄_A·P̄_B (8)`.
pub fn single_perovskite_descriptor(
    comp: &PerovskiteComposition,
    table: &IonPropertyTable,
) -> Result<Vec<f64>, DescriptorError> {
    validate_site(&comp.site_a, Site::A)?;
    validate_site(&comp.site_b, Site::B)?;
    let a = weighted_properties(&comp.site_a, Site::A, table)?;
    let b = weighted_properties(&comp.site_b, Site::B, table)?;
    let r_o = table.oxygen_radius()?;
    let q_a = weighted_oxidation(&comp.site_a);
    let (t_f, t_new) = tolerance_factors(a[0], b[0], r_o, q_a)?;
    let (ratios, products) = ratios_and_products(&a, &b)?;
    let mut out = Vec::with_capacity(34);
    out.push(t_f);
    out.push(t_new);
    out.extend_from_slice(&a);
    out.extend_from_slice(&b);
    out.extend_from_slice(&ratios);
    out.extend_from_slice(&products);
    Ok(out)
}

/// Stable column names for the 34-entry descriptor.
pub fn single_perovskite_columns() -> Vec<String> {
    let mut cols = Vec::with_capacity(34);
    cols.push("tol_factor".to_string());
    cols.push("tol_factor_new".to_string());
    for prefix in ["a", "b", "ratio_ab", "product_ab"] {
        for key in PROPERTY_KEYS {
            cols.push(format!("{prefix}_{key}"));
        }
    }
    cols
}

/// 64-entry AA'BB'O₆ descriptor:
/// `P̄_A (8) ++ P̄_A' (8) ++ P̄_B (8) ++ P̄_B' (8) ++ P̄_A/P̄_B (8) ++
/// P̄_A'/P̄_B' (8) ++ P̄_A·P̄_B (8) ++ P̄_A'·P̄_B' (8)`.
pub fn double_perovskite_descriptor(
    comp: &DoublePerovskiteComposition,
    table: &IonPropertyTable,
) -> Result<Vec<f64>, DescriptorError> {
    validate_site(&comp.site_a, Site::A)?;
    validate_site(&comp.site_a_prime, Site::A)?;
    validate_site(&comp.site_b, Site::B)?;
    validate_site(&comp.site_b_prime, Site::B)?;
    let a = weighted_properties(&comp.site_a, Site::A, table)?;
    let ap = weighted_properties(&comp.site_a_prime, Site::A, table)?;
    let b = weighted_properties(&comp.site_b, Site::B, table)?;
    let bp = weighted_properties(&comp.site_b_prime, Site::B, table)?;
    let (ratio_ab, product_ab) = ratios_and_products(&a, &b)?;
    let (ratio_apbp, product_apbp) = ratios_and_products(&ap, &bp)?;
    let mut out = Vec::with_capacity(64);
    for block in [
        &a,
        &ap,
        &b,
        &bp,
        &ratio_ab,
        &ratio_apbp,
        &product_ab,
        &product_apbp,
    ] {
        out.extend_from_slice(block);
    }
    Ok(out)
}

/// Stable column names for the 64-entry descriptor.
pub fn double_perovskite_columns() -> Vec<String> {
    let mut cols = Vec::with_capacity(64);
    for prefix in [
        "a",
        "a2",
        "b",
        "b2",
        "ratio_ab",
        "ratio_a2b2",
        "product_ab",
        "product_a2b2",
    ] {
        for key in PROPERTY_KEYS {
            cols.push(format!("{prefix}_{key}"));
        }
    }
    cols
}

/// Spin-multiplicity vector [2S+1, S, 2√(S(S+1)), n_unpaired] with
/// S = (multiplicity − 1)/2.
pub fn spin_descriptor(multiplicity: u32) -> Result<[f64; 4], DescriptorError> {
    if multiplicity < 1 {
        return Err(DescriptorError::InvalidMultiplicity(multiplicity));
    }
    let s = (multiplicity as f64 - 1.0) / 2.0;
    Ok([
        multiplicity as f64,
        s,
        2.0 * (s * (s + 1.0)).sqrt(),
        multiplicity as f64 - 1.0,
    ])
}

pub fn spin_columns() -> Vec<String> {
    [
        "multiplicity",
        "total_spin",
        "spin_magnetic_moment",
        "unpaired_electrons",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pure(label: &str) -> Vec<SiteIon> {
        vec![SiteIon::from_label(label, 1.0).unwrap()]
    }

    #[test]
    fn charge_parsing() {
        assert_eq!(parse_charge("Ba2+").unwrap(), 2.0);
        assert_eq!(parse_charge("O2-").unwrap(), -2.0);
        assert_eq!(parse_charge("Na+").unwrap(), 1.0);
        assert!(parse_charge("Ba").is_err());
    }

    #[test]
    fn goldschmidt_factor_batio3() {
        // rA=1.61, rB=0.605, rO=1.40
        let (t_f, _) = tolerance_factors(1.61, 0.605, 1.40, 2.0).unwrap();
        assert!((t_f - 1.06155).abs() < 1e-5);
    }

    #[test]
    fn bartel_factor_log_unit_case() {
        // rA/rB = e, rO/rB = 2, QA = 2 → 2 − 2(2 − e)
        let rb = 1.0;
        let ra = core::f64::consts::E;
        let (_, t_new) = tolerance_factors(ra, rb, 2.0, 2.0).unwrap();
        assert!((t_new - (2.0 - 2.0 * (2.0 - core::f64::consts::E))).abs() < 1e-12);
        assert!((t_new - 3.43656).abs() < 1e-5);
    }

    #[test]
    fn equal_radii_singularity() {
        assert!(matches!(
            tolerance_factors(1.0, 1.0, 1.4, 2.0),
            Err(DescriptorError::ToleranceSingularity)
        ));
        assert!(tolerance_factors(0.0, 1.0, 1.4, 2.0).is_err());
    }

    #[test]
    fn single_descriptor_length_and_composition() {
        let table = IonPropertyTable::builtin();
        let comp = PerovskiteComposition {
            site_a: pure("Ba2+"),
            site_b: pure("Ti4+"),
        };
        let d = single_perovskite_descriptor(&comp, &table).unwrap();
        assert_eq!(d.len(), 34);
        assert_eq!(single_perovskite_columns().len(), 34);
        // pure composition: weighted slots equal the tabulated properties
        let ba = table.get("Ba2+", Site::A).unwrap().as_array();
        let ti = table.get("Ti4+", Site::B).unwrap().as_array();
        for p in 0..8 {
            assert!((d[2 + p] - ba[p]).abs() < 1e-12);
            assert!((d[10 + p] - ti[p]).abs() < 1e-12);
            assert!((d[18 + p] - ba[p] / ti[p]).abs() < 1e-12);
            assert!((d[26 + p] - ba[p] * ti[p]).abs() < 1e-12);
        }
        assert!(d.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn half_mix_is_arithmetic_mean() {
        let table = IonPropertyTable::builtin();
        let comp = PerovskiteComposition {
            site_a: vec![
                SiteIon::from_label("Ba2+", 0.5).unwrap(),
                SiteIon::from_label("Sr2+", 0.5).unwrap(),
            ],
            site_b: pure("Ti4+"),
        };
        let d = single_perovskite_descriptor(&comp, &table).unwrap();
        let ba = table.get("Ba2+", Site::A).unwrap().as_array();
        let sr = table.get("Sr2+", Site::A).unwrap().as_array();
        for p in 0..8 {
            assert!((d[2 + p] - 0.5 * (ba[p] + sr[p])).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_fractions_rejected() {
        let table = IonPropertyTable::builtin();
        let comp = PerovskiteComposition {
            site_a: vec![SiteIon::from_label("Ba2+", 0.7).unwrap()],
            site_b: pure("Ti4+"),
        };
        assert!(matches!(
            single_perovskite_descriptor(&comp, &table),
            Err(DescriptorError::InvalidFractions { .. })
        ));
    }

    #[test]
    fn missing_ion_named_in_error() {
        let table = IonPropertyTable::builtin();
        let comp = PerovskiteComposition {
            site_a: pure("Xx2+"),
            site_b: pure("Ti4+"),
        };
        match single_perovskite_descriptor(&comp, &table) {
            Err(DescriptorError::MissingIon { label, site }) => {
                assert_eq!(label, "Xx2+");
                assert_eq!(site, Site::A);
            }
            other => panic!("expected missing-ion error, got {other:?}"),
        }
    }

    #[test]
    fn double_descriptor_duplicates_when_sites_match() {
        let table = IonPropertyTable::builtin();
        let comp = DoublePerovskiteComposition {
            site_a: pure("La3+"),
            site_a_prime: pure("La3+"),
            site_b: pure("Fe3+"),
            site_b_prime: pure("Fe3+"),
        };
        let d = double_perovskite_descriptor(&comp, &table).unwrap();
        assert_eq!(d.len(), 64);
        assert_eq!(double_perovskite_columns().len(), 64);
        for p in 0..8 {
            assert_eq!(d[p], d[8 + p]); // A block == A' block
            assert_eq!(d[16 + p], d[24 + p]); // B block == B' block
            assert_eq!(d[32 + p], d[40 + p]); // ratio blocks
            assert_eq!(d[48 + p], d[56 + p]); // product blocks
        }
        assert!(d.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn spin_descriptor_pins() {
        // quartet: [4, 1.5, 3.8730, 3]
        let d = spin_descriptor(4).unwrap();
        assert_eq!(d[0], 4.0);
        assert_eq!(d[1], 1.5);
        assert!((d[2] - 3.8730).abs() < 5e-3);
        assert!((d[2] - 2.0 * (1.5f64 * 2.5).sqrt()).abs() < 1e-12);
        assert_eq!(d[3], 3.0);
        // singlet and doublet
        assert_eq!(spin_descriptor(1).unwrap(), [1.0, 0.0, 0.0, 0.0]);
        let d2 = spin_descriptor(2).unwrap();
        assert!((d2[2] - 3.0f64.sqrt()).abs() < 1e-12);
        assert_eq!(d2[3], 1.0);
        assert!(spin_descriptor(0).is_err());
    }

    #[test]
    fn spin_unpaired_matches_multiplicity() {
        for m in 1..12u32 {
            assert_eq!(spin_descriptor(m).unwrap()[3], (m - 1) as f64);
        }
    }
}
