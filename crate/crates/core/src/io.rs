//! File formats: domain JSON and boundary-sample CSV.
//!
//! Domain JSON:
//! `{"outer":{"center":[x,y],"radius":r},"holes":[{"center":[x,y],"radius":r},...]}`
//!
//! Sample CSV: header `circle_index,theta,re,im`, one row per grid node in
//! grid order (holes first, outer circle last, angles ascending). The node
//! count per circle is inferred from the file.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryGrid, BoundarySamples, Circle, CircleDomain};

#[derive(Serialize, Deserialize)]
struct CircleSpec {
    center: [f64; 2],
    radius: f64,
}

impl From<&Circle> for CircleSpec {
    fn from(c: &Circle) -> Self {
        Self {
            center: [c.center.re, c.center.im],
            radius: c.radius,
        }
    }
}

impl From<&CircleSpec> for Circle {
    fn from(s: &CircleSpec) -> Self {
        Circle::new(Complex64::new(s.center[0], s.center[1]), s.radius)
    }
}

#[derive(Serialize, Deserialize)]
struct DomainSpec {
    outer: CircleSpec,
    holes: Vec<CircleSpec>,
}

pub fn domain_to_json(domain: &CircleDomain) -> String {
    let spec = DomainSpec {
        outer: domain.outer().into(),
        holes: domain.holes().iter().map(CircleSpec::from).collect(),
    };
    serde_json::to_string_pretty(&spec).expect("plain struct serializes")
}

pub fn domain_from_json(text: &str) -> Result<CircleDomain> {
    let spec: DomainSpec =
        serde_json::from_str(text).map_err(|e| Error::InvalidDomainFile(e.to_string()))?;
    CircleDomain::new(
        Circle::from(&spec.outer),
        spec.holes.iter().map(Circle::from).collect(),
    )
}

pub fn write_samples_csv(grid: &BoundaryGrid, samples: &BoundarySamples) -> Result<String> {
    samples.check(grid)?;
    let mut out = String::from("circle_index,theta,re,im\n");
    for i in 0..grid.node_count() {
        let v = samples.values()[i];
        out.push_str(&format!(
            "{},{},{},{}\n",
            grid.circle_of(i),
            grid.thetas()[i],
            v.re,
            v.im
        ));
    }
    Ok(out)
}

/// Reads samples written in grid order, inferring the per-circle node
/// count, and validates angles against the equispaced grid.
pub fn read_samples_csv(domain: &CircleDomain, text: &str) -> Result<(BoundaryGrid, BoundarySamples)> {
    let m = domain.circle_count();
    let mut rows: Vec<(usize, f64, Complex64)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if idx == 0 && line.starts_with("circle_index") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::InvalidSamplesFile {
                line: idx + 1,
                message: format!("expected 4 comma-separated fields, got {}", fields.len()),
            });
        }
        let parse_f = |s: &str, what: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| Error::InvalidSamplesFile {
                line: idx + 1,
                message: format!("bad {what} value `{s}`"),
            })
        };
        let k: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSamplesFile {
                line: idx + 1,
                message: format!("bad circle index `{}`", fields[0]),
            })?;
        if k >= m {
            return Err(Error::InvalidSamplesFile {
                line: idx + 1,
                message: format!("circle index {k} out of range for {m} circles"),
            });
        }
        let theta = parse_f(fields[1], "theta")?;
        let re = parse_f(fields[2], "re")?;
        let im = parse_f(fields[3], "im")?;
        rows.push((k, theta, Complex64::new(re, im)));
    }
    if rows.is_empty() || !rows.len().is_multiple_of(m) {
        return Err(Error::InvalidSamplesFile {
            line: 0,
            message: format!("row count {} is not a multiple of {m} circles", rows.len()),
        });
    }
    let n = rows.len() / m;
    let grid = BoundaryGrid::new(domain, n)?;
    let mut values = Vec::with_capacity(rows.len());
    for (i, (k, theta, v)) in rows.iter().enumerate() {
        if *k != grid.circle_of(i) {
            return Err(Error::InvalidSamplesFile {
                line: i + 2,
                message: format!(
                    "row out of grid order: circle {k}, expected {}",
                    grid.circle_of(i)
                ),
            });
        }
        if (theta - grid.thetas()[i]).abs() > 1e-9 {
            return Err(Error::InvalidSamplesFile {
                line: i + 2,
                message: format!(
                    "theta {theta} does not match the equispaced grid angle {}",
                    grid.thetas()[i]
                ),
            });
        }
        values.push(*v);
    }
    let samples = BoundarySamples::from_values(&grid, values)?;
    Ok((grid, samples))
}

/// Serde adapter rendering Complex64 as a `[re, im]` pair.
pub mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
        [v.re, v.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Complex64, D::Error> {
        let pair = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(pair[0], pair[1]))
    }
}
