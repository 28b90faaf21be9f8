//! Episodic drone-charger environment: joint state, hybrid-action
//! transitions, energy/time accounting, feasibility, termination, and the
//! schedule trace consumed by rewards and reports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{travel_time, Deployment, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DroneState {
    pub position: Point,
    pub speed: f64,
    pub gamma_f: f64,
    pub gamma_o: f64,
    pub energy: f64,
    pub capacity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargerState {
    pub position: Point,
    pub speed: f64,
    pub gamma_c: f64,
    /// The charger's own elapsed time; may run ahead of the drone's clock
    /// when a commanded move outlasts the drone's stage.
    pub clock: f64,
}

/// Drone-attributed time split. Entries are nondecreasing and sum to the
/// drone's clock; waiting counts only the drone's side of a rendezvous.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeLedger {
    pub flight: f64,
    pub observing: f64,
    pub charging: f64,
    pub wait: f64,
}

impl TimeLedger {
    pub fn sum(&self) -> f64 {
        self.flight + self.observing + self.charging + self.wait
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Terminal {
    Running,
    Failed,
    Completed,
}

/// Which reward case a completed stage falls under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageCase {
    Obs,
    Chg,
    Fail,
    End,
}

impl std::fmt::Display for StageCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StageCase::Obs => "obs",
            StageCase::Chg => "chg",
            StageCase::Fail => "fail",
            StageCase::End => "end",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub from: Point,
    pub to: Point,
    pub flight_t: f64,
    pub observe_t: f64,
    pub charge_t: f64,
    pub wait_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageOutcome {
    pub case: StageCase,
    /// Filled by the reward engine; the bare transition leaves it at 0.
    pub reward: f64,
    pub stage_time: f64,
    pub energy_delta: f64,
    pub trace: TraceEntry,
}

/// Joint hybrid action: the drone half (a, tau), the charger half
/// (a_tilde, tau_tilde), the coupled discrete scalar, the normalized
/// continuous scalar, and optionally the latent vectors it was decoded from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointAction {
    /// 1 = observe the next PoI (or return to the depot once all are done),
    /// 0 = fly to a charging point.
    pub a: u8,
    /// Observation duration; meaningful iff a = 1.
    pub tau: f64,
    /// Charging-point index the charger moves to.
    pub a_tilde: usize,
    /// Charging duration; meaningful iff a = 0.
    pub tau_tilde: f64,
    pub a_dis: usize,
    pub a_con: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub z: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x: Vec<f64>,
}

impl JointAction {
    pub fn observe(tau: f64, charger_dest: usize, m: usize) -> Self {
        JointAction {
            a: 1,
            tau,
            a_tilde: charger_dest,
            tau_tilde: 0.0,
            a_dis: m + charger_dest,
            a_con: 0.0,
            z: Vec::new(),
            x: Vec::new(),
        }
    }

    pub fn charge(dest: usize, tau_tilde: f64) -> Self {
        JointAction {
            a: 0,
            tau: 0.0,
            a_tilde: dest,
            tau_tilde,
            a_dis: dest,
            a_con: 0.0,
            z: Vec::new(),
            x: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvState {
    pub drone: DroneState,
    pub charger: ChargerState,
    /// Assigned observation time per PoI; 0 while unvisited.
    pub poi_progress: Vec<f64>,
    /// Last charging duration per charging point; 0 if never used.
    pub charge_records: Vec<f64>,
    /// Number of observed PoIs; PoIs 0..next_poi have been observed.
    pub next_poi: usize,
    pub drone_clock: f64,
    pub ledger: TimeLedger,
    pub stage_count: u32,
    pub terminal: Terminal,
}

/// Fresh episode state: both agents at the depot, full battery, zero clocks.
pub fn reset(spec: &Deployment) -> EnvState {
    let depot = spec.depot();
    EnvState {
        drone: DroneState {
            position: depot,
            speed: spec.params.drone_speed,
            gamma_f: spec.params.gamma_f,
            gamma_o: spec.params.gamma_o,
            energy: spec.params.energy_capacity,
            capacity: spec.params.energy_capacity,
        },
        charger: ChargerState {
            position: depot,
            speed: spec.params.charger_speed,
            gamma_c: spec.params.gamma_c,
            clock: 0.0,
        },
        poi_progress: vec![0.0; spec.n()],
        charge_records: vec![0.0; spec.m()],
        next_poi: 0,
        drone_clock: 0.0,
        ledger: TimeLedger::default(),
        stage_count: 0,
        terminal: Terminal::Running,
    }
}

/// Piecewise observation utility: zero below `tau_min`, otherwise the
/// fraction of `tau_max` achieved, capped at 1.
pub fn utility_nu(tau: f64, tau_min: f64, tau_max: f64) -> f64 {
    if tau < tau_min {
        0.0
    } else {
        (tau / tau_max).min(1.0)
    }
}

/// Normalized PoI importance: tau_max_i over the sum of all tau_max.
pub fn importance_zeta(i: usize, spec: &Deployment) -> f64 {
    spec.pois[i].tau_max / spec.tau_max_sum()
}

/// Feature-vector length of `encode_state` for a deployment of size (n, m).
pub fn encoded_len(n: usize, m: usize) -> usize {
    10 + 5 * n + 3 * m + 1
}

impl EnvState {
    /// Charging points the drone can reach with its current energy.
    pub fn reachable_chargers(&self, spec: &Deployment) -> Vec<usize> {
        spec.charge_points
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                self.drone.gamma_f * travel_time(self.drone.position, c.position, self.drone.speed)
                    <= self.drone.energy
            })
            .map(|(j, _)| j)
            .collect()
    }

    /// Total weighted utility over observed PoIs.
    pub fn utility_sum(&self, spec: &Deployment) -> f64 {
        let total = spec.tau_max_sum();
        self.poi_progress
            .iter()
            .zip(&spec.pois)
            .filter(|(tau, _)| **tau > 0.0)
            .map(|(tau, p)| (p.tau_max / total) * utility_nu(*tau, p.tau_min, p.tau_max))
            .sum()
    }

    /// Total drone elapsed time: flight + observation + charging + waiting.
    pub fn makespan(&self) -> f64 {
        self.drone_clock
    }

    /// Observation efficiency of a completed episode.
    pub fn objective(&self, spec: &Deployment) -> Result<f64> {
        if self.terminal != Terminal::Completed {
            return Err(Error::Contract(
                "objective is defined only for completed episodes".into(),
            ));
        }
        Ok(self.utility_sum(spec) / self.makespan())
    }

    fn check_running(&self) -> Result<()> {
        if self.terminal != Terminal::Running {
            return Err(Error::Contract(format!(
                "stage applied to a terminal state ({:?})",
                self.terminal
            )));
        }
        Ok(())
    }

    /// Moves the charger toward `dest`, departing at the drone's stage
    /// start (or later if a previous move is still in progress).
    fn move_charger(&mut self, spec: &Deployment, dest: usize, stage_start: f64) {
        let target = spec.charge_points[dest].position;
        let travel = travel_time(self.charger.position, target, self.charger.speed);
        self.charger.clock = self.charger.clock.max(stage_start) + travel;
        self.charger.position = target;
    }

    /// Drone flies to the next PoI and observes it for `tau` (clamped into
    /// the PoI's legal range), while the charger departs toward
    /// `charger_dest`. With all PoIs observed, this action means "fly back
    /// to the depot" and `tau` is ignored. Depleting energy mid-flight or
    /// mid-observation fails the episode at the moment of depletion.
    pub fn apply_observe(
        &mut self,
        spec: &Deployment,
        tau: f64,
        charger_dest: usize,
    ) -> Result<StageOutcome> {
        self.check_running()?;
        if charger_dest >= spec.m() {
            return Err(Error::Contract(format!(
                "charger destination {charger_dest} out of range (m={})",
                spec.m()
            )));
        }
        let stage_start = self.drone_clock;
        let from = self.drone.position;
        let energy_before = self.drone.energy;
        self.stage_count += 1;
        self.move_charger(spec, charger_dest, stage_start);

        let returning = self.next_poi == spec.n();
        let (target, tau) = if returning {
            (spec.depot(), 0.0)
        } else {
            let poi = &spec.pois[self.next_poi];
            (poi.position, tau.clamp(poi.tau_min, poi.tau_max))
        };

        let flight = travel_time(from, target, self.drone.speed);
        let flight_energy = self.drone.gamma_f * flight;

        if flight_energy > self.drone.energy {
            // Depletes mid-flight: advance to the depletion point and fail.
            let flown = self.drone.energy / self.drone.gamma_f;
            let frac = if flight > 0.0 { flown / flight } else { 0.0 };
            self.drone.position = Point::new(
                from.x + (target.x - from.x) * frac,
                from.y + (target.y - from.y) * frac,
            );
            self.drone.energy = 0.0;
            self.drone_clock += flown;
            self.ledger.flight += flown;
            self.terminal = Terminal::Failed;
            return Ok(StageOutcome {
                case: StageCase::Fail,
                reward: 0.0,
                stage_time: flown,
                energy_delta: -energy_before,
                trace: TraceEntry {
                    from,
                    to: self.drone.position,
                    flight_t: flown,
                    observe_t: 0.0,
                    charge_t: 0.0,
                    wait_t: 0.0,
                },
            });
        }

        self.drone.position = target;
        self.drone.energy -= flight_energy;
        self.drone_clock += flight;
        self.ledger.flight += flight;

        if returning {
            self.terminal = Terminal::Completed;
            return Ok(StageOutcome {
                case: StageCase::End,
                reward: 0.0,
                stage_time: flight,
                energy_delta: self.drone.energy - energy_before,
                trace: TraceEntry {
                    from,
                    to: target,
                    flight_t: flight,
                    observe_t: 0.0,
                    charge_t: 0.0,
                    wait_t: 0.0,
                },
            });
        }

        let obs_energy = self.drone.gamma_o * tau;
        if obs_energy > self.drone.energy {
            // Depletes mid-observation; the PoI does not count as observed.
            let observed = self.drone.energy / self.drone.gamma_o;
            self.drone.energy = 0.0;
            self.drone_clock += observed;
            self.ledger.observing += observed;
            self.terminal = Terminal::Failed;
            return Ok(StageOutcome {
                case: StageCase::Fail,
                reward: 0.0,
                stage_time: flight + observed,
                energy_delta: -energy_before,
                trace: TraceEntry {
                    from,
                    to: target,
                    flight_t: flight,
                    observe_t: observed,
                    charge_t: 0.0,
                    wait_t: 0.0,
                },
            });
        }

        self.drone.energy -= obs_energy;
        self.drone_clock += tau;
        self.ledger.observing += tau;
        self.poi_progress[self.next_poi] = tau;
        self.next_poi += 1;

        Ok(StageOutcome {
            case: StageCase::Obs,
            reward: 0.0,
            stage_time: flight + tau,
            energy_delta: self.drone.energy - energy_before,
            trace: TraceEntry {
                from,
                to: target,
                flight_t: flight,
                observe_t: tau,
                charge_t: 0.0,
                wait_t: 0.0,
            },
        })
    }

    /// Drone and charger rendezvous at charging point `c_k`; whoever
    /// arrives first waits. The requested duration is clamped so charging
    /// never exceeds capacity. Waiting on the ground consumes no energy.
    pub fn apply_charge(
        &mut self,
        spec: &Deployment,
        c_k: usize,
        tau_tilde: f64,
    ) -> Result<StageOutcome> {
        self.check_running()?;
        if tau_tilde < 0.0 || !tau_tilde.is_finite() {
            return Err(Error::Contract(format!(
                "charging duration must be nonnegative, got {tau_tilde}"
            )));
        }
        if c_k >= spec.m() {
            return Err(Error::Contract(format!(
                "charging point {c_k} out of range (m={})",
                spec.m()
            )));
        }
        let target = spec.charge_points[c_k].position;
        let flight = travel_time(self.drone.position, target, self.drone.speed);
        if self.drone.gamma_f * flight > self.drone.energy {
            return Err(Error::Contract(format!(
                "charging point {c_k} unreachable with energy {}",
                self.drone.energy
            )));
        }

        let stage_start = self.drone_clock;
        let from = self.drone.position;
        let energy_before = self.drone.energy;
        self.stage_count += 1;

        let drone_arrival = stage_start + flight;
        let arrival_energy = self.drone.energy - self.drone.gamma_f * flight;
        let charger_travel = travel_time(self.charger.position, target, self.charger.speed);
        let charger_arrival = self.charger.clock.max(stage_start) + charger_travel;
        let meeting = drone_arrival.max(charger_arrival);
        let drone_wait = (meeting - drone_arrival).max(0.0);

        let headroom = (self.drone.capacity - arrival_energy) / self.charger.gamma_c;
        let tau_eff = tau_tilde.min(headroom);

        self.drone.position = target;
        self.drone.energy = arrival_energy + self.charger.gamma_c * tau_eff;
        self.drone_clock = meeting + tau_eff;
        self.ledger.flight += flight;
        self.ledger.wait += drone_wait;
        self.ledger.charging += tau_eff;
        self.charger.position = target;
        self.charger.clock = meeting + tau_eff;
        self.charge_records[c_k] = tau_eff;

        Ok(StageOutcome {
            case: StageCase::Chg,
            reward: 0.0,
            stage_time: flight + drone_wait + tau_eff,
            energy_delta: self.drone.energy - energy_before,
            trace: TraceEntry {
                from,
                to: target,
                flight_t: flight,
                observe_t: 0.0,
                charge_t: tau_eff,
                wait_t: drone_wait,
            },
        })
    }

    /// Fixed-layout normalized feature vector of the joint state.
    pub fn encode(&self, spec: &Deployment) -> Vec<f64> {
        let side = crate::scenario::WORLD_SIDE;
        let mut v = Vec::with_capacity(encoded_len(spec.n(), spec.m()));
        v.push(self.drone.position.x / side);
        v.push(self.drone.position.y / side);
        v.push(self.drone.speed / 25.0);
        v.push(self.drone.gamma_f);
        v.push(self.drone.gamma_o);
        v.push(self.drone.energy / self.drone.capacity);
        v.push(self.charger.position.x / side);
        v.push(self.charger.position.y / side);
        v.push(self.charger.speed / 10.0);
        v.push(self.charger.gamma_c);
        for (poi, tau) in spec.pois.iter().zip(&self.poi_progress) {
            v.push(poi.position.x / side);
            v.push(poi.position.y / side);
            v.push(poi.tau_min / 10.0);
            v.push(poi.tau_max / 10.0);
            v.push(tau / 10.0);
        }
        for (cp, rec) in spec.charge_points.iter().zip(&self.charge_records) {
            v.push(cp.position.x / side);
            v.push(cp.position.y / side);
            v.push(rec / 10.0);
        }
        v.push(self.next_poi as f64 / spec.n() as f64);
        v
    }
}

/// One exported row of an episode trace.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub stage: u32,
    pub case: StageCase,
    pub from_x: f64,
    pub from_y: f64,
    pub to_x: f64,
    pub to_y: f64,
    pub flight_t: f64,
    pub observe_t: f64,
    pub charge_t: f64,
    pub wait_t: f64,
    pub energy_after: f64,
    pub reward: f64,
}

impl TraceRow {
    pub fn from_outcome(stage: u32, outcome: &StageOutcome, energy_after: f64) -> Self {
        TraceRow {
            stage,
            case: outcome.case,
            from_x: outcome.trace.from.x,
            from_y: outcome.trace.from.y,
            to_x: outcome.trace.to.x,
            to_y: outcome.trace.to.y,
            flight_t: outcome.trace.flight_t,
            observe_t: outcome.trace.observe_t,
            charge_t: outcome.trace.charge_t,
            wait_t: outcome.trace.wait_t,
            energy_after,
            reward: outcome.reward,
        }
    }
}

/// Writes an episode trace as CSV.
pub fn write_trace_csv<W: std::io::Write>(writer: W, rows: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io("<trace>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{ChargePointSpec, PoiSpec, ScenarioTag, SystemParams};

    /// Hand-built world: depot at origin, PoIs and chargers as given.
    pub(crate) fn world(
        pois: &[(f64, f64, f64, f64)],
        chargers: &[(f64, f64)],
        params: SystemParams,
    ) -> Deployment {
        let mut charge_points = vec![ChargePointSpec {
            position: Point::new(0.0, 0.0),
            is_depot: true,
        }];
        charge_points.extend(chargers.iter().map(|&(x, y)| ChargePointSpec {
            position: Point::new(x, y),
            is_depot: false,
        }));
        Deployment {
            pois: pois
                .iter()
                .map(|&(x, y, tau_min, tau_max)| PoiSpec {
                    position: Point::new(x, y),
                    tau_min,
                    tau_max,
                })
                .collect(),
            charge_points,
            params,
            scenario_tag: ScenarioTag::Custom,
            rng_seed: 0,
        }
    }

    fn two_poi_world() -> Deployment {
        // p1 at (100,0), p2 at (100,300); chargers: depot + (100,100).
        world(
            &[(100.0, 0.0, 4.0, 6.0), (100.0, 300.0, 4.0, 6.0)],
            &[(100.0, 100.0)],
            SystemParams::default(),
        )
    }

    #[test]
    fn reset_state() {
        let spec = two_poi_world();
        let s = reset(&spec);
        assert_eq!(s.drone.energy, 60.0);
        assert_eq!(s.drone.position, spec.depot());
        assert_eq!(s.charger.position, spec.depot());
        assert_eq!(s.next_poi, 0);
        assert_eq!(s.drone_clock, 0.0);
        assert_eq!(s.terminal, Terminal::Running);
        assert_eq!(reset(&spec), s);
    }

    #[test]
    fn reset_is_history_independent() {
        let spec = two_poi_world();
        let mut s = reset(&spec);
        s.apply_observe(&spec, 6.0, 1).unwrap();
        assert_eq!(reset(&spec), reset(&spec));
    }

    #[test]
    fn full_battery_reaches_everything() {
        // 60 energy / (1 energy per flight-time unit) * speed 25 = 1500
        // reachable length units; the square diagonal is ~1414.
        let spec = world(
            &[(500.0, 500.0, 4.0, 6.0)],
            &[(1000.0, 1000.0), (7.0, 993.0)],
            SystemParams::default(),
        );
        let s = reset(&spec);
        assert_eq!(s.reachable_chargers(&spec), vec![0, 1, 2]);
    }

    #[test]
    fn zero_energy_reaches_only_its_own_position() {
        let spec = two_poi_world();
        let mut s = reset(&spec);
        s.drone.energy = 0.0;
        assert_eq!(s.reachable_chargers(&spec), vec![0]); // at the depot
        s.drone.position = Point::new(55.0, 55.0);
        assert!(s.reachable_chargers(&spec).is_empty());
    }

    #[test]
    fn observe_first_poi() {
        let spec = two_poi_world();
        let mut s = reset(&spec);
        let out = s.apply_observe(&spec, 6.0, 1).unwrap();
        assert_eq!(out.case, StageCase::Obs);
        assert_eq!(out.trace.flight_t, 4.0);
        assert_eq!(s.drone.energy, 50.0);
        assert_eq!(s.drone_clock, 10.0);
        assert_eq!(s.next_poi, 1);
        assert_eq!(s.poi_progress[0], 6.0);
        // Charger left toward charge point 1 at stage start.
        assert_eq!(s.charger.position, Point::new(100.0, 100.0));
        assert!((s.charger.clock - 100.0 * std::f64::consts::SQRT_2 / 10.0).abs() < 1e-12);
    }

    #[test]
    fn return_leg_completes() {
        // Single PoI 100 from the depot; after observing, the return stage
        // with 10 energy and a 4-energy flight completes at 6.
        let spec = world(&[(100.0, 0.0, 4.0, 6.0)], &[], SystemParams::default());
        let mut s = reset(&spec);
        s.apply_observe(&spec, 6.0, 0).unwrap();
        s.drone.energy = 10.0;
        let out = s.apply_observe(&spec, 0.0, 0).unwrap();
        assert_eq!(out.case, StageCase::End);
        assert_eq!(s.terminal, Terminal::Completed);
        assert_eq!(s.drone.energy, 6.0);
        assert_eq!(s.drone.position, spec.depot());
    }

    #[test]
    fn depletion_mid_flight_fails() {
        let spec = two_poi_world();
        let mut s = reset(&spec);
        s.drone.energy = 3.0; // flight to p1 needs 4
        let out = s.apply_observe(&spec, 6.0, 0).unwrap();
        assert_eq!(out.case, StageCase::Fail);
        assert_eq!(s.terminal, Terminal::Failed);
        assert_eq!(s.drone.energy, 0.0);
        assert_eq!(s.next_poi, 0);
        // Moved 3 flight-time units of 4 along the leg.
        assert!((s.drone.position.x - 75.0).abs() < 1e-12);
    }

    #[test]
    fn depletion_mid_observation_fails_without_progress() {
        let spec = two_poi_world();
        let mut s = reset(&spec);
        s.drone.energy = 8.0; // flight 4 + observation tau>=4 cannot fit
        let out = s.apply_observe(&spec, 6.0, 0).unwrap();
        assert_eq!(out.case, StageCase::Fail);
        assert_eq!(out.trace.observe_t, 4.0);
        assert_eq!(s.poi_progress[0], 0.0);
        assert_eq!(s.next_poi, 0);
        assert_eq!(s.drone.energy, 0.0);
    }

    #[test]
    fn terminal_state_rejects_stages() {
        let spec = two_poi_world();
        let mut s = reset(&spec);
        s.terminal = Terminal::Failed;
        assert!(s.apply_observe(&spec, 6.0, 0).is_err());
        assert!(s.apply_charge(&spec, 0, 1.0).is_err());
    }

    #[test]
    fn charge_clamps_to_capacity() {
        let spec = two_poi_world();
        let mut s = reset(&spec);
        s.apply_observe(&spec, 6.0, 0).unwrap(); // drone at p1, energy 50
        s.charger.position = Point::new(100.0, 100.0); // charger already at c1
        let out = s.apply_charge(&spec, 1, 2.3334).unwrap();
        assert_eq!(out.case, StageCase::Chg);
        // Arrival energy 46; headroom (60-46)/6 = 2.333...
        let tau_eff = 14.0 / 6.0;
        assert!((out.trace.charge_t - tau_eff).abs() < 1e-12);
        assert!((s.drone.energy - 60.0).abs() < 1e-12);
        assert!((out.stage_time - (4.0 + tau_eff)).abs() < 1e-9);
        assert_eq!(s.charge_records[1], out.trace.charge_t);
    }

    #[test]
    fn charge_zero_duration_is_pure_rendezvous() {
        let spec = two_poi_world();
        let mut s = reset(&spec);
        s.apply_observe(&spec, 6.0, 1).unwrap();
        let before = s.drone.energy;
        let out = s.apply_charge(&spec, 1, 0.0).unwrap();
        assert_eq!(out.trace.charge_t, 0.0);
        assert_eq!(s.drone.energy, before - 4.0);
    }

    #[test]
    fn drone_waits_for_slower_charger() {
        // Charger must travel 141.42 at speed 10 (14.142) while the drone
        // flies 100 at speed 25 (4.0): the drone waits the difference.
        let spec = world(
            &[(100.0, 0.0, 4.0, 6.0)],
            &[(100.0, 100.0)],
            SystemParams::default(),
        );
        let mut s = reset(&spec);
        s.drone.position = Point::new(100.0, 0.0);
        let out = s.apply_charge(&spec, 1, 0.0).unwrap();
        let expected_wait = 100.0 * std::f64::consts::SQRT_2 / 10.0 - 4.0;
        assert!((out.trace.wait_t - expected_wait).abs() < 1e-9);
        assert!((s.ledger.wait - expected_wait).abs() < 1e-9);
    }

    #[test]
    fn unreachable_charger_is_contract_violation() {
        let spec = two_poi_world();
        let mut s = reset(&spec);
        s.drone.energy = 1.0;
        assert!(s.apply_charge(&spec, 1, 1.0).is_err());
        assert!(s.apply_charge(&spec, 1, -1.0).is_err());
    }

    #[test]
    fn utility_nu_cases() {
        assert_eq!(utility_nu(3.0, 4.0, 8.0), 0.0);
        assert_eq!(utility_nu(6.0, 4.0, 8.0), 0.75);
        assert_eq!(utility_nu(9.0, 4.0, 8.0), 1.0);
    }

    #[test]
    fn importance_zeta_cases() {
        let spec = world(
            &[
                (100.0, 0.0, 4.0, 6.0),
                (200.0, 0.0, 4.0, 7.0),
                (300.0, 0.0, 4.0, 8.0),
            ],
            &[],
            SystemParams::default(),
        );
        assert!((importance_zeta(0, &spec) - 6.0 / 21.0).abs() < 1e-15);
        assert!((importance_zeta(1, &spec) - 7.0 / 21.0).abs() < 1e-15);
        assert!((importance_zeta(2, &spec) - 8.0 / 21.0).abs() < 1e-15);
        let total: f64 = (0..3).map(|i| importance_zeta(i, &spec)).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn utility_sum_cases() {
        let spec = two_poi_world();
        let mut s = reset(&spec);
        assert_eq!(s.utility_sum(&spec), 0.0);
        s.apply_observe(&spec, 6.0, 0).unwrap();
        assert!((s.utility_sum(&spec) - 0.5).abs() < 1e-15);
        s.apply_observe(&spec, 6.0, 0).unwrap();
        assert!((s.utility_sum(&spec) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn makespan_accounting() {
        let spec = two_poi_world();
        let mut s = reset(&spec);
        assert_eq!(s.makespan(), 0.0);
        s.apply_observe(&spec, 6.0, 1).unwrap();
        assert_eq!(s.makespan(), 10.0);
        assert!((s.ledger.sum() - s.makespan()).abs() < 1e-12);
        s.apply_charge(&spec, 1, 1.0).unwrap();
        assert!((s.ledger.sum() - s.makespan()).abs() < 1e-12);
    }

    #[test]
    fn objective_requires_completion() {
        let spec = two_poi_world();
        let s = reset(&spec);
        assert!(s.objective(&spec).is_err());
        let mut done = s;
        done.terminal = Terminal::Completed;
        done.drone_clock = 200.0;
        done.poi_progress = vec![6.0, 6.0];
        assert!((done.objective(&spec).unwrap() - 1.0 / 200.0).abs() < 1e-15);
    }

    #[test]
    fn encode_layout() {
        let spec = two_poi_world();
        let s = reset(&spec);
        let v = s.encode(&spec);
        assert_eq!(v.len(), encoded_len(2, 2));
        assert_eq!(v[5], 1.0); // full battery
        // All assigned-tau features start at zero.
        assert_eq!(v[14], 0.0);
        assert_eq!(v[19], 0.0);

        let mut s2 = reset(&spec);
        s2.apply_observe(&spec, 6.0, 0).unwrap();
        let v2 = s2.encode(&spec);
        assert_eq!(v2[14], 0.6); // tau=6 scaled by 10
    }

    #[test]
    fn encoded_len_formula() {
        assert_eq!(encoded_len(10, 4), 73);
    }

    #[test]
    fn replay_is_deterministic() {
        let spec = two_poi_world();
        let run = || {
            let mut s = reset(&spec);
            s.apply_observe(&spec, 5.5, 1).unwrap();
            s.apply_charge(&spec, 1, 2.0).unwrap();
            s.apply_observe(&spec, 4.5, 0).unwrap();
            s
        };
        assert_eq!(run(), run());
    }
}
