//! TSPLIB ingestion: `.tsp` instances with `EUC_2D` weights and `.opt.tour`
//! files, dense integer distance matrices and exact tour evaluation.
//!
//! Cities are 0-based everywhere in memory. The 1-based numbering of TSPLIB
//! only appears at the file boundary and in the serialized form of [`Tour`].

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A TSPLIB `EUC_2D` instance with its distance matrix built eagerly.
#[derive(Clone, PartialEq)]
pub struct TspInstance {
    name: String,
    coords: Vec<(f64, f64)>,
    distances: Vec<u32>,
}

impl fmt::Debug for TspInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TspInstance")
            .field("name", &self.name)
            .field("dimension", &self.dimension())
            .finish()
    }
}

/// TSPLIB `nint` applied to the Euclidean distance.
pub fn euc_2d(a: (f64, f64), b: (f64, f64)) -> u32 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    ((dx * dx + dy * dy).sqrt() + 0.5).floor() as u32
}

impl TspInstance {
    pub fn from_coords(name: impl Into<String>, coords: Vec<(f64, f64)>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Config("an instance needs at least one city".into()));
        }
        let n = coords.len();
        let mut distances = vec![0u32; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = euc_2d(coords[i], coords[j]);
                distances[i * n + j] = d;
                distances[j * n + i] = d;
            }
        }
        Ok(Self {
            name: name.into(),
            coords,
            distances,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[(f64, f64)] {
        &self.coords
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> u32 {
        self.distances[i * self.coords.len() + j]
    }

    /// Row `i` of the distance matrix.
    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        let n = self.coords.len();
        &self.distances[i * n..(i + 1) * n]
    }

    /// Closed-tour length, including the edge from the last city back to the first.
    pub fn tour_length(&self, tour: &Tour) -> Result<u64> {
        if tour.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: tour.len(),
            });
        }
        Ok(self.cycle_length(tour.cities()))
    }

    /// Length of the closed cycle through `order`; no validation.
    pub fn cycle_length(&self, order: &[usize]) -> u64 {
        let Some((&first, rest)) = order.split_first() else {
            return 0;
        };
        let mut total = 0u64;
        let mut prev = first;
        for &c in rest {
            total += self.distance(prev, c) as u64;
            prev = c;
        }
        total + self.distance(prev, first) as u64
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_tsplib(&text)
    }
}

/// A closed tour: a permutation of the cities `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct Tour(Vec<usize>);

impl Tour {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        if !is_permutation(&order) {
            return Err(Error::Operator(format!(
                "tour of length {} is not a permutation of 0..{}",
                order.len(),
                order.len()
            )));
        }
        Ok(Self(order))
    }

    /// Builds a tour from TSPLIB-style 1-based city numbers.
    pub fn from_one_based(order: &[usize]) -> Result<Self> {
        if order.contains(&0) {
            return Err(Error::Operator("1-based tour contains city 0".into()));
        }
        Self::new(order.iter().map(|&c| c - 1).collect())
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|&c| c + 1).collect()
    }

    pub fn cities(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    pub(crate) fn from_vec_unchecked(order: Vec<usize>) -> Self {
        debug_assert!(is_permutation(&order));
        Self(order)
    }
}

impl From<Tour> for Vec<usize> {
    fn from(t: Tour) -> Self {
        t.to_one_based()
    }
}

impl TryFrom<Vec<usize>> for Tour {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Tour::from_one_based(&v)
    }
}

/// True when `order` holds every value of `0..order.len()` exactly once.
pub fn is_permutation(order: &[usize]) -> bool {
    let mut seen = vec![false; order.len()];
    for &c in order {
        match seen.get_mut(c) {
            Some(s) if !*s => *s = true,
            _ => return false,
        }
    }
    true
}

fn split_keyword(line: &str) -> Option<(&str, &str)> {
    let (key, value) = line.split_once(':')?;
    Some((key.trim(), value.trim()))
}

fn is_section_header(line: &str) -> bool {
    let head = line.split_whitespace().next().unwrap_or("");
    head.ends_with("_SECTION") || head == "EOF"
}

/// Parses a TSPLIB `.tsp` file. Only `EUC_2D` instances are supported.
pub fn parse_tsplib(text: &str) -> Result<TspInstance> {
    let mut name: Option<String> = None;
    let mut dimension: Option<usize> = None;
    let mut weight_type: Option<String> = None;
    let mut coords: Option<Vec<Option<(f64, f64)>>> = None;
    let mut coord_count = 0usize;

    let mut lines = text.lines().enumerate().peekable();
    while let Some((idx, raw)) = lines.next() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        if line.starts_with("NODE_COORD_SECTION") {
            let dim = dimension.ok_or_else(|| {
                Error::parse(lineno, "NODE_COORD_SECTION before DIMENSION")
            })?;
            match weight_type.as_deref() {
                Some("EUC_2D") => {}
                Some(other) => return Err(Error::UnsupportedFormat(other.to_string())),
                None => return Err(Error::parse(lineno, "missing EDGE_WEIGHT_TYPE")),
            }
            let slots = coords.insert(vec![None; dim]);
            while let Some(&(cidx, craw)) = lines.peek() {
                let cline = craw.trim();
                if cline.is_empty() {
                    lines.next();
                    continue;
                }
                if is_section_header(cline) || split_keyword(cline).is_some() {
                    break;
                }
                lines.next();
                let clineno = cidx + 1;
                let mut fields = cline.split_whitespace();
                let (Some(id), Some(x), Some(y), None) =
                    (fields.next(), fields.next(), fields.next(), fields.next())
                else {
                    return Err(Error::parse(clineno, "expected `<id> <x> <y>`"));
                };
                let id: usize = id
                    .parse()
                    .map_err(|_| Error::parse(clineno, format!("bad node id `{id}`")))?;
                let x: f64 = x
                    .parse()
                    .map_err(|_| Error::parse(clineno, format!("bad coordinate `{x}`")))?;
                let y: f64 = y
                    .parse()
                    .map_err(|_| Error::parse(clineno, format!("bad coordinate `{y}`")))?;
                if id == 0 || id > dim {
                    return Err(Error::parse(
                        clineno,
                        format!("node id {id} outside 1..={dim}"),
                    ));
                }
                let slot = &mut slots[id - 1];
                if slot.is_some() {
                    return Err(Error::parse(clineno, format!("duplicate node id {id}")));
                }
                *slot = Some((x, y));
                coord_count += 1;
            }
            continue;
        }
        if is_section_header(line) {
            return Err(Error::UnsupportedFormat(format!(
                "section `{}`",
                line.split_whitespace().next().unwrap_or(line)
            )));
        }
        let Some((key, value)) = split_keyword(line) else {
            return Err(Error::parse(lineno, format!("unrecognized line `{line}`")));
        };
        match key {
            "NAME" => name = Some(value.to_string()),
            "TYPE" => {
                if value != "TSP" {
                    return Err(Error::UnsupportedFormat(format!("TYPE {value}")));
                }
            }
            "DIMENSION" => {
                let d: usize = value
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad DIMENSION `{value}`")))?;
                if d == 0 {
                    return Err(Error::parse(lineno, "DIMENSION must be positive"));
                }
                dimension = Some(d);
            }
            "EDGE_WEIGHT_TYPE" => {
                if value != "EUC_2D" {
                    return Err(Error::UnsupportedFormat(format!("EDGE_WEIGHT_TYPE {value}")));
                }
                weight_type = Some(value.to_string());
            }
            _ => {}
        }
    }

    let dim = dimension.ok_or_else(|| Error::parse(0, "missing DIMENSION"))?;
    let slots = coords.ok_or_else(|| Error::parse(0, "missing NODE_COORD_SECTION"))?;
    if coord_count != dim {
        return Err(Error::parse(
            0,
            format!("DIMENSION is {dim} but {coord_count} coordinates were listed"),
        ));
    }
    let coords = slots.into_iter().map(|c| c.expect("all slots filled")).collect();
    TspInstance::from_coords(name.unwrap_or_default(), coords)
}

/// Parses a TSPLIB `.opt.tour` file (`TOUR_SECTION` terminated by `-1`).
pub fn parse_opt_tour(text: &str) -> Result<Tour> {
    let mut dimension: Option<usize> = None;
    let mut in_section = false;
    let mut order = Vec::new();
    'outer: for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if !in_section {
            if line.starts_with("TOUR_SECTION") {
                in_section = true;
            } else if line == "EOF" {
                break;
            } else if let Some(("DIMENSION", v)) = split_keyword(line) {
                dimension = Some(
                    v.parse()
                        .map_err(|_| Error::parse(idx + 1, format!("bad DIMENSION `{v}`")))?,
                );
            }
            continue;
        }
        for tok in line.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| Error::parse(idx + 1, format!("bad tour entry `{tok}`")))?;
            if v == -1 {
                break 'outer;
            }
            if v <= 0 {
                return Err(Error::parse(idx + 1, format!("bad city number {v}")));
            }
            order.push(v as usize);
        }
    }
    if !in_section {
        return Err(Error::parse(0, "missing TOUR_SECTION"));
    }
    if let Some(d) = dimension {
        if d != order.len() {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: order.len(),
            });
        }
    }
    Tour::from_one_based(&order)
}

pub fn read_opt_tour(path: impl AsRef<Path>) -> Result<Tour> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_opt_tour(&text)
}

pub(crate) fn coord_key((x, y): (f64, f64)) -> (u64, u64) {
    // -0.0 and 0.0 compare equal, so they must share a key.
    let norm = |v: f64| if v == 0.0 { 0.0f64 } else { v };
    (norm(x).to_bits(), norm(y).to_bits())
}

/// Percentage of cities the two instances share, by exact coordinate match,
/// over the smaller instance's dimension.
pub fn node_overlap(a: &TspInstance, b: &TspInstance) -> f64 {
    let in_b: HashSet<(u64, u64)> = b.coords.iter().map(|&c| coord_key(c)).collect();
    let shared: HashSet<(u64, u64)> = a
        .coords
        .iter()
        .map(|&c| coord_key(c))
        .filter(|k| in_b.contains(k))
        .collect();
    100.0 * shared.len() as f64 / a.dimension().min(b.dimension()) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = "NAME : tri3
TYPE : TSP
COMMENT : 3-4-5 triangle
DIMENSION : 3
EDGE_WEIGHT_TYPE : EUC_2D
NODE_COORD_SECTION
1 0 0
2 3 0
3 0 4
EOF
";

    #[test]
    fn parses_triangle() {
        let inst = parse_tsplib(TRIANGLE).unwrap();
        assert_eq!(inst.name(), "tri3");
        assert_eq!(inst.dimension(), 3);
        assert_eq!(inst.distance(0, 1), 3);
        assert_eq!(inst.distance(0, 2), 4);
        assert_eq!(inst.distance(1, 2), 5);
        assert_eq!(inst.distance(2, 1), 5);
        assert_eq!(inst.distance(1, 1), 0);
    }

    #[test]
    fn triangle_tour_length() {
        let inst = parse_tsplib(TRIANGLE).unwrap();
        let tour = Tour::from_one_based(&[1, 2, 3]).unwrap();
        assert_eq!(inst.tour_length(&tour).unwrap(), 12);
    }

    #[test]
    fn unit_square_perimeter() {
        let inst =
            TspInstance::from_coords("sq", vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
                .unwrap();
        let tour = Tour::from_one_based(&[1, 2, 3, 4]).unwrap();
        assert_eq!(inst.tour_length(&tour).unwrap(), 4);
    }

    #[test]
    fn tour_length_rejects_wrong_size() {
        let inst = parse_tsplib(TRIANGLE).unwrap();
        let tour = Tour::from_one_based(&[1, 2]).unwrap();
        assert!(matches!(
            inst.tour_length(&tour),
            Err(Error::DimensionMismatch {
                expected: 3,
                actual: 2
            })
        ));
    }

    #[test]
    fn coordinate_count_mismatch_is_parse_error() {
        let text = TRIANGLE.replace("DIMENSION : 3", "DIMENSION : 4");
        assert!(matches!(parse_tsplib(&text), Err(Error::Parse { .. })));
    }

    #[test]
    fn missing_dimension_is_parse_error() {
        let text = TRIANGLE.replace("DIMENSION : 3\n", "");
        assert!(matches!(parse_tsplib(&text), Err(Error::Parse { .. })));
    }

    #[test]
    fn non_euclidean_is_unsupported() {
        for wt in ["GEO", "ATT", "EXPLICIT", "CEIL_2D"] {
            let text = TRIANGLE.replace("EUC_2D", wt);
            assert!(
                matches!(parse_tsplib(&text), Err(Error::UnsupportedFormat(_))),
                "{wt}"
            );
        }
    }

    #[test]
    fn keyword_spacing_and_float_coords() {
        let text = "NAME: t\nDIMENSION:2\nEDGE_WEIGHT_TYPE:EUC_2D\nNODE_COORD_SECTION\n1 0.0e0 0\n2 1.5e0 2.0\n";
        let inst = parse_tsplib(text).unwrap();
        // sqrt(1.5^2 + 2^2) = 2.5, rounds half-up to 3
        assert_eq!(inst.distance(0, 1), 3);
    }

    #[test]
    fn nint_rounds_half_up() {
        assert_eq!(euc_2d((0.0, 0.0), (0.5, 0.0)), 1);
        assert_eq!(euc_2d((0.0, 0.0), (0.49, 0.0)), 0);
        assert_eq!(euc_2d((0.0, 0.0), (2.5, 0.0)), 3);
    }

    #[test]
    fn duplicate_and_out_of_range_ids() {
        let dup = TRIANGLE.replace("3 0 4", "2 0 4");
        assert!(matches!(parse_tsplib(&dup), Err(Error::Parse { .. })));
        let oob = TRIANGLE.replace("3 0 4", "9 0 4");
        assert!(matches!(parse_tsplib(&oob), Err(Error::Parse { .. })));
    }

    #[test]
    fn opt_tour_parsing() {
        let text = "NAME : tri3.opt.tour\nTYPE : TOUR\nDIMENSION : 3\nTOUR_SECTION\n1\n3 2\n-1\nEOF\n";
        let tour = parse_opt_tour(text).unwrap();
        assert_eq!(tour.to_one_based(), vec![1, 3, 2]);
        let short = text.replace("3 2\n", "3\n");
        assert!(parse_opt_tour(&short).is_err());
    }

    #[test]
    fn overlap_identity_and_disjoint() {
        let a = parse_tsplib(TRIANGLE).unwrap();
        assert_eq!(node_overlap(&a, &a), 100.0);
        let b = TspInstance::from_coords("b", vec![(10.0, 10.0), (20.0, 10.0)]).unwrap();
        assert_eq!(node_overlap(&a, &b), 0.0);
        let c = TspInstance::from_coords("c", vec![(3.0, 0.0), (7.0, 7.0)]).unwrap();
        assert_eq!(node_overlap(&a, &c), 50.0);
        assert_eq!(node_overlap(&c, &a), 50.0);
    }

    #[test]
    fn tour_rejects_non_permutations() {
        assert!(Tour::new(vec![0, 0, 1]).is_err());
        assert!(Tour::new(vec![0, 3, 1]).is_err());
        assert!(Tour::from_one_based(&[0, 1]).is_err());
        let t: Tour = serde_json::from_str("[2,1,3]").unwrap();
        assert_eq!(t.cities(), &[1, 0, 2]);
        assert_eq!(serde_json::to_string(&t).unwrap(), "[2,1,3]");
    }
}
