//! Per-ion property records backing the perovskite descriptors. The crate
//! ships a versioned CSV (`data/ion_properties_v1.csv`); user tables in the
//! same format can be loaded through [`IonPropertyTable::parse_csv`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::DescriptorError;

const BUILTIN_TABLE: &str = include_str!("../../data/ion_properties_v1.csv");

/// Which perovskite site a property record describes; radii are
/// coordination-dependent, so A- and B-site entries are distinct records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Site {
    A,
    B,
    Anion,
}

impl Site {
    fn parse(s: &str) -> Option<Site> {
        match s {
            "A" => Some(Site::A),
            "B" => Some(Site::B),
            "X" => Some(Site::Anion),
            _ => None,
        }
    }
}

/// The eight per-ion properties, in descriptor slot order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IonProperties {
    pub shannon_radius: f64,
    pub bond_length: f64,
    pub electronegativity: f64,
    pub vdw_radius: f64,
    pub ionization_energy: f64,
    pub molar_volume: f64,
    pub atomic_number: f64,
    pub atomic_mass: f64,
}

pub const PROPERTY_KEYS: [&str; 8] = [
    "radius",
    "bond_length",
    "electronegativity",
    "vdw_radius",
    "ionization_energy",
    "molar_volume",
    "atomic_number",
    "atomic_mass",
];

impl IonProperties {
    pub fn as_array(&self) -> [f64; 8] {
        [
            self.shannon_radius,
            self.bond_length,
            self.electronegativity,
            self.vdw_radius,
            self.ionization_energy,
            self.molar_volume,
            self.atomic_number,
            self.atomic_mass,
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IonPropertyTable {
    entries: BTreeMap<(String, Site), IonProperties>,
}

impl IonPropertyTable {
    /// The table shipped with the crate.
    pub fn builtin() -> IonPropertyTable {
        Self::parse_csv(BUILTIN_TABLE).expect("builtin ion table is well-formed")
    }

    /// Parses a table in the shipped CSV format. `#` lines are comments; the
    /// header row is required.
    pub fn parse_csv(text: &str) -> Result<IonPropertyTable, DescriptorError> {
        let mut entries = BTreeMap::new();
        let mut saw_header = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                if !line.starts_with("label,site,") {
                    return Err(DescriptorError::Table {
                        line: lineno + 1,
                        message: "expected header starting with `label,site,`".to_string(),
                    });
                }
                saw_header = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 10 {
                return Err(DescriptorError::Table {
                    line: lineno + 1,
                    message: format!("expected 10 fields, got {}", fields.len()),
                });
            }
            let label = fields[0].to_string();
            let site = Site::parse(fields[1]).ok_or_else(|| DescriptorError::Table {
                line: lineno + 1,
                message: format!("unknown site {:?} (expected A, B or X)", fields[1]),
            })?;
            let mut nums = [0.0f64; 8];
            for (slot, field) in nums.iter_mut().zip(&fields[2..]) {
                *slot = field.parse().map_err(|_| DescriptorError::Table {
                    line: lineno + 1,
                    message: format!("bad number {field:?}"),
                })?;
                if !slot.is_finite() {
                    return Err(DescriptorError::Table {
                        line: lineno + 1,
                        message: format!("non-finite value {field:?}"),
                    });
                }
            }
            entries.insert(
                (label, site),
                IonProperties {
                    shannon_radius: nums[0],
                    bond_length: nums[1],
                    electronegativity: nums[2],
                    vdw_radius: nums[3],
                    ionization_energy: nums[4],
                    molar_volume: nums[5],
                    atomic_number: nums[6],
                    atomic_mass: nums[7],
                },
            );
        }
        if entries.is_empty() {
            return Err(DescriptorError::Table {
                line: 1,
                message: "no ion records".to_string(),
            });
        }
        Ok(IonPropertyTable { entries })
    }

    pub fn get(&self, label: &str, site: Site) -> Option<&IonProperties> {
        self.entries.get(&(label.to_string(), site))
    }

    /// Shannon radius of the oxygen anion record.
    pub fn oxygen_radius(&self) -> Result<f64, DescriptorError> {
        self.get("O2-", Site::Anion)
            .map(|p| p.shannon_radius)
            .ok_or(DescriptorError::MissingIon {
                label: String::from("O2-"),
                site: Site::Anion,
            })
    }

    pub fn labels(&self, site: Site) -> Vec<String> {
        self.entries
            .keys()
            .filter(|(_, s)| *s == site)
            .map(|(l, _)| l.clone())
            .collect()
    }
}
