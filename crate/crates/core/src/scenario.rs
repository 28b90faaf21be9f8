//! Deployment scenarios: PoI/charging-point geometry, system parameters,
//! generation of Type-A / Type-R worlds, and the on-disk deployment format.

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Side length of the square experimental area.
pub const WORLD_SIDE: f64 = 1000.0;

/// Schema version of the deployment file format.
pub const DEPLOYMENT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

/// Flight or movement time between two points at a constant speed.
pub fn travel_time(a: Point, b: Point, speed: f64) -> f64 {
    debug_assert!(speed > 0.0);
    a.dist(b) / speed
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoiSpec {
    pub position: Point,
    /// Minimum observation time below which the observation has no utility.
    pub tau_min: f64,
    /// Observation time at which utility saturates.
    pub tau_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargePointSpec {
    pub position: Point,
    pub is_depot: bool,
}

/// World-level rates and capacities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub drone_speed: f64,
    pub charger_speed: f64,
    pub energy_capacity: f64,
    /// Energy per unit time in flight.
    pub gamma_f: f64,
    /// Energy per unit time while observing.
    pub gamma_o: f64,
    /// Energy per unit time while charging.
    pub gamma_c: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            drone_speed: 25.0,
            charger_speed: 10.0,
            energy_capacity: 60.0,
            gamma_f: 1.0,
            gamma_o: 1.0,
            gamma_c: 6.0,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("drone_speed", self.drone_speed),
            ("charger_speed", self.charger_speed),
            ("energy_capacity", self.energy_capacity),
            ("gamma_f", self.gamma_f),
            ("gamma_o", self.gamma_o),
            ("gamma_c", self.gamma_c),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Schema {
                    field: format!("params.{name}"),
                    message: format!("must be finite and > 0, got {v}"),
                });
            }
        }
        if self.gamma_c <= self.gamma_f {
            return Err(Error::Schema {
                field: "params.gamma_c".into(),
                message: "charging rate must exceed flight consumption rate".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeploymentKind {
    A,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[allow(clippy::upper_case_acronyms)]
pub enum ScenarioTag {
    SA1,
    SA2,
    SA3,
    SA4,
    SR1,
    SR2,
    SR3,
    SR4,
    #[serde(rename = "custom")]
    Custom,
}

impl ScenarioTag {
    /// Deployment kind and default (n, m) pairing: SAk/SRk -> (10k, 4k).
    /// The pairing is convention, not fixed by the scenario file format.
    pub fn kind_and_size(&self) -> Option<(DeploymentKind, usize, usize)> {
        let (kind, k) = match self {
            ScenarioTag::SA1 => (DeploymentKind::A, 1),
            ScenarioTag::SA2 => (DeploymentKind::A, 2),
            ScenarioTag::SA3 => (DeploymentKind::A, 3),
            ScenarioTag::SA4 => (DeploymentKind::A, 4),
            ScenarioTag::SR1 => (DeploymentKind::R, 1),
            ScenarioTag::SR2 => (DeploymentKind::R, 2),
            ScenarioTag::SR3 => (DeploymentKind::R, 3),
            ScenarioTag::SR4 => (DeploymentKind::R, 4),
            ScenarioTag::Custom => return None,
        };
        Some((kind, 10 * k, 4 * k))
    }

    pub fn from_kind(kind: DeploymentKind, k: usize) -> ScenarioTag {
        match (kind, k) {
            (DeploymentKind::A, 1) => ScenarioTag::SA1,
            (DeploymentKind::A, 2) => ScenarioTag::SA2,
            (DeploymentKind::A, 3) => ScenarioTag::SA3,
            (DeploymentKind::A, 4) => ScenarioTag::SA4,
            (DeploymentKind::R, 1) => ScenarioTag::SR1,
            (DeploymentKind::R, 2) => ScenarioTag::SR2,
            (DeploymentKind::R, 3) => ScenarioTag::SR3,
            (DeploymentKind::R, 4) => ScenarioTag::SR4,
            _ => ScenarioTag::Custom,
        }
    }
}

impl std::fmt::Display for ScenarioTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ScenarioTag::SA1 => "SA1",
            ScenarioTag::SA2 => "SA2",
            ScenarioTag::SA3 => "SA3",
            ScenarioTag::SA4 => "SA4",
            ScenarioTag::SR1 => "SR1",
            ScenarioTag::SR2 => "SR2",
            ScenarioTag::SR3 => "SR3",
            ScenarioTag::SR4 => "SR4",
            ScenarioTag::Custom => "custom",
        };
        write!(f, "{s}")
    }
}

/// A full deployment: PoIs in visiting order, charging points (index 0 is
/// the depot), and system parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    /// PoIs in the drone's mandatory visiting order.
    pub pois: Vec<PoiSpec>,
    /// Charging points; `charge_points[0]` is the depot.
    pub charge_points: Vec<ChargePointSpec>,
    pub params: SystemParams,
    pub scenario_tag: ScenarioTag,
    pub rng_seed: u64,
}

impl Deployment {
    pub fn n(&self) -> usize {
        self.pois.len()
    }

    pub fn m(&self) -> usize {
        self.charge_points.len()
    }

    pub fn depot(&self) -> Point {
        self.charge_points[0].position
    }

    pub fn tau_max_sum(&self) -> f64 {
        self.pois.iter().map(|p| p.tau_max).sum()
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.pois.is_empty() {
            return Err(Error::Schema {
                field: "pois".into(),
                message: "at least one PoI is required".into(),
            });
        }
        if self.charge_points.is_empty() {
            return Err(Error::Schema {
                field: "charge_points".into(),
                message: "at least one charging point is required".into(),
            });
        }
        let depots = self
            .charge_points
            .iter()
            .filter(|c| c.is_depot)
            .count();
        if depots != 1 || !self.charge_points[0].is_depot {
            return Err(Error::Schema {
                field: "charge_points".into(),
                message: format!(
                    "exactly one depot at index 0 is required ({depots} depots found)"
                ),
            });
        }
        for (i, p) in self.pois.iter().enumerate() {
            if !(p.tau_min > 0.0 && p.tau_max >= p.tau_min) {
                return Err(Error::Schema {
                    field: format!("pois[{i}]"),
                    message: format!(
                        "invalid observation range [{}, {}]",
                        p.tau_min, p.tau_max
                    ),
                });
            }
            check_point(&format!("pois[{i}]"), p.position)?;
        }
        for (j, c) in self.charge_points.iter().enumerate() {
            check_point(&format!("charge_points[{j}]"), c.position)?;
        }
        Ok(())
    }
}

fn check_point(field: &str, p: Point) -> Result<()> {
    let in_square = p.x.is_finite()
        && p.y.is_finite()
        && (0.0..=WORLD_SIDE).contains(&p.x)
        && (0.0..=WORLD_SIDE).contains(&p.y);
    if !in_square {
        return Err(Error::Schema {
            field: field.into(),
            message: format!("position ({}, {}) outside the {WORLD_SIDE}-square", p.x, p.y),
        });
    }
    Ok(())
}

/// Knobs for deployment generation.
#[derive(Debug, Clone, Copy)]
pub struct GenOptions {
    /// Minimum pairwise PoI separation.
    pub d_min: f64,
    /// Type-A: maximum distance from a non-depot charging point to its PoI.
    pub r_near: f64,
    pub side: f64,
    pub max_attempts: u64,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            d_min: 100.0,
            r_near: 50.0,
            side: WORLD_SIDE,
            max_attempts: 100_000,
        }
    }
}

/// Generates a deployment of the given kind, deterministically per seed.
///
/// PoIs are placed uniformly with pairwise separation >= `d_min` and then
/// ordered clockwise starting near the depot. Type-A places every non-depot
/// charging point within `r_near` of a uniformly chosen PoI; Type-R places
/// them uniformly. The depot is placed uniformly in the square.
pub fn generate_deployment(
    kind: DeploymentKind,
    n: usize,
    m: usize,
    params: SystemParams,
    seed: u64,
) -> Result<Deployment> {
    generate_deployment_with(kind, n, m, params, seed, &GenOptions::default())
}

pub fn generate_deployment_with(
    kind: DeploymentKind,
    n: usize,
    m: usize,
    params: SystemParams,
    seed: u64,
    opts: &GenOptions,
) -> Result<Deployment> {
    if n < 1 || m < 1 {
        return Err(Error::Contract(format!(
            "generate_deployment requires n >= 1 and m >= 1 (got n={n}, m={m})"
        )));
    }
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts: u64 = 0;

    let mut pois: Vec<PoiSpec> = Vec::with_capacity(n);
    while pois.len() < n {
        attempts += 1;
        if attempts > opts.max_attempts {
            return Err(Error::Generation(format!(
                "could not place {n} PoIs with separation {} in {} attempts",
                opts.d_min, opts.max_attempts
            )));
        }
        let candidate = Point::new(
            rng.random_range(0.0..=opts.side),
            rng.random_range(0.0..=opts.side),
        );
        if pois
            .iter()
            .all(|p| p.position.dist(candidate) >= opts.d_min)
        {
            let tau_max = [6.0, 7.0, 8.0][rng.random_range(0..3)];
            pois.push(PoiSpec {
                position: candidate,
                tau_min: 4.0,
                tau_max,
            });
        }
    }

    let depot = Point::new(
        rng.random_range(0.0..=opts.side),
        rng.random_range(0.0..=opts.side),
    );
    let pois = clockwise_order(&pois, depot);

    let mut charge_points = Vec::with_capacity(m);
    charge_points.push(ChargePointSpec {
        position: depot,
        is_depot: true,
    });
    for _ in 1..m {
        let position = match kind {
            DeploymentKind::A => {
                let anchor = pois[rng.random_range(0..n)].position;
                loop {
                    attempts += 1;
                    if attempts > opts.max_attempts {
                        return Err(Error::Generation(
                            "could not place a charging point near its PoI".into(),
                        ));
                    }
                    let dx = rng.random_range(-opts.r_near..=opts.r_near);
                    let dy = rng.random_range(-opts.r_near..=opts.r_near);
                    if dx * dx + dy * dy > opts.r_near * opts.r_near {
                        continue;
                    }
                    let p = Point::new(anchor.x + dx, anchor.y + dy);
                    if (0.0..=opts.side).contains(&p.x) && (0.0..=opts.side).contains(&p.y) {
                        break p;
                    }
                }
            }
            DeploymentKind::R => Point::new(
                rng.random_range(0.0..=opts.side),
                rng.random_range(0.0..=opts.side),
            ),
        };
        charge_points.push(ChargePointSpec {
            position,
            is_depot: false,
        });
    }

    Ok(Deployment {
        pois,
        charge_points,
        params,
        scenario_tag: ScenarioTag::Custom,
        rng_seed: seed,
    })
}

/// Orders PoIs clockwise (decreasing polar angle) about their centroid,
/// starting from the PoI whose angle is nearest the depot's angle. Ties are
/// broken by original index; the output is always a permutation of the input.
pub fn clockwise_order(pois: &[PoiSpec], depot: Point) -> Vec<PoiSpec> {
    if pois.len() <= 1 {
        return pois.to_vec();
    }
    let cx = pois.iter().map(|p| p.position.x).sum::<f64>() / pois.len() as f64;
    let cy = pois.iter().map(|p| p.position.y).sum::<f64>() / pois.len() as f64;
    let angle = |p: Point| (p.y - cy).atan2(p.x - cx);
    let depot_angle = angle(depot);

    let two_pi = std::f64::consts::TAU;
    let circular = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(two_pi);
        d.min(two_pi - d)
    };
    let start = pois
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| {
            let da = circular(angle(a.position), depot_angle);
            let db = circular(angle(b.position), depot_angle);
            da.partial_cmp(&db).unwrap().then(i.cmp(j))
        })
        .map(|(i, _)| i)
        .unwrap();
    let start_angle = angle(pois[start].position);

    let mut order: Vec<usize> = (0..pois.len()).collect();
    // Clockwise offset from the start angle; the start PoI gets key 0.
    let key = |i: usize| {
        if i == start {
            0.0
        } else {
            (start_angle - angle(pois[i].position)).rem_euclid(two_pi)
        }
    };
    order.sort_by(|&a, &b| key(a).partial_cmp(&key(b)).unwrap().then(a.cmp(&b)));
    order.into_iter().map(|i| pois[i]).collect()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoiFile {
    x: f64,
    y: f64,
    tau_min: f64,
    tau_max: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChargePointFile {
    x: f64,
    y: f64,
    is_depot: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeploymentFile {
    schema_version: u32,
    scenario_tag: ScenarioTag,
    seed: u64,
    params: SystemParams,
    pois: Vec<PoiFile>,
    charge_points: Vec<ChargePointFile>,
}

pub fn deployment_to_json(spec: &Deployment) -> Result<String> {
    let file = DeploymentFile {
        schema_version: DEPLOYMENT_SCHEMA_VERSION,
        scenario_tag: spec.scenario_tag,
        seed: spec.rng_seed,
        params: spec.params,
        pois: spec
            .pois
            .iter()
            .map(|p| PoiFile {
                x: p.position.x,
                y: p.position.y,
                tau_min: p.tau_min,
                tau_max: p.tau_max,
            })
            .collect(),
        charge_points: spec
            .charge_points
            .iter()
            .map(|c| ChargePointFile {
                x: c.position.x,
                y: c.position.y,
                is_depot: c.is_depot,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).map_err(Error::from_json)
}

pub fn deployment_from_json(text: &str) -> Result<Deployment> {
    let file: DeploymentFile = serde_json::from_str(text).map_err(Error::from_json)?;
    if file.schema_version != DEPLOYMENT_SCHEMA_VERSION {
        return Err(Error::Schema {
            field: "schema_version".into(),
            message: format!(
                "unsupported version {} (expected {DEPLOYMENT_SCHEMA_VERSION})",
                file.schema_version
            ),
        });
    }
    let spec = Deployment {
        pois: file
            .pois
            .into_iter()
            .map(|p| PoiSpec {
                position: Point::new(p.x, p.y),
                tau_min: p.tau_min,
                tau_max: p.tau_max,
            })
            .collect(),
        charge_points: file
            .charge_points
            .into_iter()
            .map(|c| ChargePointSpec {
                position: Point::new(c.x, c.y),
                is_depot: c.is_depot,
            })
            .collect(),
        params: file.params,
        scenario_tag: file.scenario_tag,
        rng_seed: file.seed,
    };
    spec.validate()?;
    Ok(spec)
}

pub fn save_deployment(spec: &Deployment, path: impl AsRef<Path>) -> Result<()> {
    let text = deployment_to_json(spec)?;
    std::fs::write(path.as_ref(), text).map_err(|e| Error::io(path.as_ref(), e))
}

pub fn load_deployment(path: impl AsRef<Path>) -> Result<Deployment> {
    let text =
        std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
    deployment_from_json(&text)
}
