//! Pairwise structure descriptor and the XYZ text format.
//!
//! Every unordered atom pair contributes a Gaussian centered at the inverse
//! distance g₂ = 1/d, accumulated on a fixed bin grid of its element-pair
//! channel. Channels concatenate in sorted element-pair order, so the vector
//! is invariant under atom permutation and rigid motion.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::DescriptorError;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub element: String,
    /// Cartesian position in Å.
    pub position: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Structure {
    pub atoms: Vec<Atom>,
    pub multiplicity: u32,
}

impl Structure {
    pub fn validate(&self) -> Result<(), DescriptorError> {
        if self.atoms.len() < 2 {
            return Err(DescriptorError::TooFewAtoms {
                got: self.atoms.len(),
            });
        }
        for atom in &self.atoms {
            if atom.position.iter().any(|c| !c.is_finite()) {
                return Err(DescriptorError::NonFiniteInput);
            }
        }
        for i in 0..self.atoms.len() {
            for j in (i + 1)..self.atoms.len() {
                if distance(&self.atoms[i], &self.atoms[j]) < 1e-6 {
                    return Err(DescriptorError::CoincidentAtoms {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        if self.multiplicity < 1 {
            return Err(DescriptorError::InvalidMultiplicity(self.multiplicity));
        }
        Ok(())
    }

    /// Sorted deduplicated element labels.
    pub fn elements(&self) -> Vec<String> {
        let mut els: Vec<String> = self.atoms.iter().map(|a| a.element.clone()).collect();
        els.sort();
        els.dedup();
        els
    }
}

fn distance(a: &Atom, b: &Atom) -> f64 {
    let dx = a.position[0] - b.position[0];
    let dy = a.position[1] - b.position[1];
    let dz = a.position[2] - b.position[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Binning grid for the pair descriptor: `n_bins` evenly spaced centers from
/// `min` to `max` inclusive, Gaussian width `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbtrGrid {
    pub min: f64,
    pub max: f64,
    pub n_bins: usize,
    pub sigma: f64,
}

impl MbtrGrid {
    pub fn validate(&self) -> Result<(), DescriptorError> {
        if self.n_bins < 2 {
            return Err(DescriptorError::InvalidGrid {
                reason: "n_bins must be >= 2",
            });
        }
        if !(self.sigma > 0.0) {
            return Err(DescriptorError::InvalidGrid {
                reason: "sigma must be > 0",
            });
        }
        if !(self.max > self.min) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(DescriptorError::InvalidGrid {
                reason: "empty grid range",
            });
        }
        Ok(())
    }

    fn centers(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.n_bins - 1) as f64;
        (0..self.n_bins)
            .map(|i| self.min + step * i as f64)
            .collect()
    }
}

/// Sorted unordered element pairs over an element set, same-element pairs
/// included.
pub fn element_pairs(elements: &[String]) -> Vec<(String, String)> {
    let mut sorted = elements.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut pairs = Vec::new();
    for i in 0..sorted.len() {
        for j in i..sorted.len() {
            pairs.push((sorted[i].clone(), sorted[j].clone()));
        }
    }
    pairs
}

/// Pair descriptor over the structure's own element set.
pub fn mbtr_k2(structure: &Structure, grid: &MbtrGrid) -> Result<Vec<f64>, DescriptorError> {
    let elements = structure.elements();
    mbtr_k2_with_elements(structure, grid, &elements)
}

/// Pair descriptor with a caller-fixed element set, so every structure of a
/// dataset maps to the same channel layout. Output length is
/// `element_pairs(elements).len() × n_bins`.
pub fn mbtr_k2_with_elements(
    structure: &Structure,
    grid: &MbtrGrid,
    elements: &[String],
) -> Result<Vec<f64>, DescriptorError> {
    structure.validate()?;
    grid.validate()?;
    let pairs = element_pairs(elements);
    for atom in &structure.atoms {
        if !elements.contains(&atom.element) {
            return Err(DescriptorError::Xyz {
                line: 0,
                message: format!("element {:?} not in the channel set", atom.element),
            });
        }
    }
    let centers = grid.centers();
    let norm = 1.0 / (grid.sigma * (2.0 * core::f64::consts::PI).sqrt());
    let mut out = vec![0.0f64; pairs.len() * grid.n_bins];
    for i in 0..structure.atoms.len() {
        for j in (i + 1)..structure.atoms.len() {
            let (ea, eb) = (
                &structure.atoms[i].element,
                &structure.atoms[j].element,
            );
            let key = if ea <= eb {
                (ea.clone(), eb.clone())
            } else {
                (eb.clone(), ea.clone())
            };
            let channel = pairs
                .iter()
                .position(|p| *p == key)
                .expect("membership checked above");
            let g2 = 1.0 / distance(&structure.atoms[i], &structure.atoms[j]);
            let base = channel * grid.n_bins;
            for (b, &t) in centers.iter().enumerate() {
                let z = (t - g2) / grid.sigma;
                out[base + b] += norm * (-0.5 * z * z).exp();
            }
        }
    }
    Ok(out)
}

/// Stable column names for a fixed element set: `mbtr_<E1>_<E2>_<bin>`.
pub fn mbtr_k2_columns(elements: &[String], n_bins: usize) -> Vec<String> {
    let mut cols = Vec::new();
    for (a, b) in element_pairs(elements) {
        for bin in 0..n_bins {
            cols.push(format!("mbtr_{a}_{b}_{bin:03}"));
        }
    }
    cols
}

/// Parses the XYZ text format: atom count, then a comment line (which may
/// carry `multiplicity=<int>`), then `El x y z` rows. Errors carry 1-based
/// line numbers.
pub fn parse_xyz(text: &str) -> Result<Structure, DescriptorError> {
    let mut lines = text.lines();
    let count_line = lines.next().ok_or_else(|| DescriptorError::Xyz {
        line: 1,
        message: "missing atom count".to_string(),
    })?;
    let count: usize = count_line.trim().parse().map_err(|_| DescriptorError::Xyz {
        line: 1,
        message: format!("bad atom count {:?}", count_line.trim()),
    })?;
    let comment = lines.next().ok_or_else(|| DescriptorError::Xyz {
        line: 2,
        message: "missing comment line".to_string(),
    })?;
    let mut multiplicity = 1u32;
    for token in comment.split_whitespace() {
        if let Some(value) = token.strip_prefix("multiplicity=") {
            multiplicity = value.parse().map_err(|_| DescriptorError::Xyz {
                line: 2,
                message: format!("bad multiplicity {value:?}"),
            })?;
        }
    }
    let mut atoms = Vec::with_capacity(count);
    for i in 0..count {
        let lineno = i + 3;
        let line = lines.next().ok_or_else(|| DescriptorError::Xyz {
            line: lineno,
            message: format!("expected {count} atom rows, file ended at {i}"),
        })?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(DescriptorError::Xyz {
                line: lineno,
                message: format!("expected `El x y z`, got {} fields", fields.len()),
            });
        }
        let mut position = [0.0f64; 3];
        for (slot, field) in position.iter_mut().zip(&fields[1..]) {
            *slot = field.parse().map_err(|_| DescriptorError::Xyz {
                line: lineno,
                message: format!("bad coordinate {field:?}"),
            })?;
        }
        atoms.push(Atom {
            element: fields[0].to_string(),
            position,
        });
    }
    for (extra, line) in lines.enumerate() {
        if !line.trim().is_empty() {
            return Err(DescriptorError::Xyz {
                line: count + 3 + extra,
                message: "trailing content after atom rows".to_string(),
            });
        }
    }
    let structure = Structure {
        atoms,
        multiplicity,
    };
    structure.validate()?;
    Ok(structure)
}
