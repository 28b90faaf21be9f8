//! Four-case stage rewards: observation, charging, failure penalty, and
//! task completion, including the lookahead incentive terms.

use serde::{Deserialize, Serialize};

use crate::env::{EnvState, JointAction, StageCase, StageOutcome};
use crate::error::{Error, Result};
use crate::scenario::{travel_time, Deployment};

/// Division floor for degenerate geometry (PoI at the drone's position,
/// arrival with an exactly empty battery).
const EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardParams {
    /// Scale on the exploration incentive 1/dt1.
    pub xi1_scale: f64,
    /// Fraction of current energy above which a charging flight earns nothing.
    pub xi2: f64,
    /// Penalty per unit of unfinished utility (negative).
    pub xi3: f64,
    /// Completion reward scale.
    pub xi4: f64,
}

impl Default for RewardParams {
    fn default() -> Self {
        RewardParams {
            xi1_scale: 3.0,
            xi2: 0.2,
            xi3: -20.0,
            xi4: 40.0,
        }
    }
}

impl RewardParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.xi2 > 0.0 && self.xi2 < 1.0) {
            return Err(Error::Schema {
                field: "reward.xi2".into(),
                message: format!("must be in (0,1), got {}", self.xi2),
            });
        }
        if self.xi3 >= 0.0 {
            return Err(Error::Schema {
                field: "reward.xi3".into(),
                message: "must be negative".into(),
            });
        }
        if self.xi4 <= 0.0 || self.xi1_scale < 0.0 {
            return Err(Error::Schema {
                field: "reward.xi4".into(),
                message: "xi4 must be positive and xi1_scale nonnegative".into(),
            });
        }
        Ok(())
    }
}

/// The pre/post state pair of one stage plus the action that caused it.
#[derive(Debug, Clone, Copy)]
pub struct RewardContext<'a> {
    pub pre: &'a EnvState,
    pub post: &'a EnvState,
    pub action: &'a JointAction,
    pub spec: &'a Deployment,
    pub case: StageCase,
}

/// Lookahead incentive for an observe stage: rewarded when current energy
/// covers the worst-case observation plus the follow-up flight to the
/// charger's destination, and that flight stays under half the capacity.
pub fn xi1(ctx: &RewardContext, params: &RewardParams) -> f64 {
    let spec = ctx.spec;
    let drone = &ctx.pre.drone;
    let i = ctx.pre.next_poi;
    debug_assert!(i < spec.n());
    let poi = &spec.pois[i];
    let c_k = spec.charge_points[ctx.action.a_tilde].position;
    let dt1 = (travel_time(drone.position, poi.position, drone.speed)
        + travel_time(poi.position, c_k, drone.speed))
    .max(1.0);
    let de1 = drone.gamma_f * dt1;
    let de1_obs = de1 + drone.gamma_o * poi.tau_max;
    if de1_obs <= drone.energy && de1 <= drone.capacity / 2.0 {
        params.xi1_scale / dt1
    } else {
        0.0
    }
}

/// Case A: reward for observing the next PoI.
pub fn reward_observe(ctx: &RewardContext, params: &RewardParams) -> f64 {
    let i_post = ctx.post.next_poi;
    debug_assert!(i_post == ctx.pre.next_poi + 1);
    let u = ctx.post.utility_sum(ctx.spec);
    let t = ctx.post.makespan();
    let poi = &ctx.spec.pois[ctx.pre.next_poi];
    let flight =
        travel_time(ctx.pre.drone.position, poi.position, ctx.pre.drone.speed).max(EPS);
    let tau = ctx.post.poi_progress[ctx.pre.next_poi];
    (i_post as f64) * u / t * (tau / flight + xi1(ctx, params))
}

/// Case B: reward for a drone-charger rendezvous. Zero when the flight to
/// the charging point costs more than `xi2` of the current energy.
pub fn reward_charge(ctx: &RewardContext, params: &RewardParams) -> f64 {
    let spec = ctx.spec;
    let drone = &ctx.pre.drone;
    let c_k = ctx.action.a_tilde;
    let target = spec.charge_points[c_k].position;
    let flight = travel_time(drone.position, target, drone.speed);
    let de2 = drone.gamma_f * flight;
    if de2 >= params.xi2 * drone.energy {
        return 0.0;
    }
    let i = ctx.pre.next_poi;
    if i == 0 {
        return 0.0;
    }
    let arrival_energy = (drone.energy - de2).max(EPS);
    let charger_travel = travel_time(
        ctx.pre.charger.position,
        target,
        ctx.pre.charger.speed,
    );
    let next_target = if i == spec.n() {
        spec.depot()
    } else {
        spec.pois[i].position
    };
    let dt2 = flight.max(charger_travel).max(1.0)
        + travel_time(target, next_target, drone.speed);
    let tau_eff = ctx.post.charge_records[c_k];
    let u = ctx.post.utility_sum(spec);
    let t = ctx.post.makespan();
    (i as f64) * u / t * (drone.capacity / arrival_energy) * (tau_eff / dt2)
}

/// Case C: failure penalty, scaled by how much observation went unfinished.
pub fn reward_fail(ctx: &RewardContext, params: &RewardParams) -> f64 {
    let spec = ctx.spec;
    let achieved: f64 = ctx
        .post
        .poi_progress
        .iter()
        .zip(&spec.pois)
        .filter(|(tau, _)| **tau > 0.0)
        .map(|(tau, p)| crate::env::utility_nu(*tau, p.tau_min, p.tau_max))
        .sum();
    params.xi3 * (spec.n() as f64 - achieved)
}

/// Case D: completion reward over the full makespan at depot arrival.
pub fn reward_complete(ctx: &RewardContext, params: &RewardParams) -> f64 {
    let u = ctx.post.utility_sum(ctx.spec);
    params.xi4 * u / ctx.post.makespan()
}

/// Exactly one of the four cases, selected by the stage's case tag.
pub fn dispatch(ctx: &RewardContext, params: &RewardParams) -> f64 {
    match ctx.case {
        StageCase::Obs => reward_observe(ctx, params),
        StageCase::Chg => reward_charge(ctx, params),
        StageCase::Fail => reward_fail(ctx, params),
        StageCase::End => reward_complete(ctx, params),
    }
}

/// Applies a joint action to the environment and fills in the stage reward.
pub fn step_with_reward(
    env: &mut EnvState,
    spec: &Deployment,
    action: &JointAction,
    params: &RewardParams,
) -> Result<StageOutcome> {
    let pre = env.clone();
    let mut outcome = if action.a == 1 {
        env.apply_observe(spec, action.tau, action.a_tilde)?
    } else {
        env.apply_charge(spec, action.a_tilde, action.tau_tilde)?
    };
    let ctx = RewardContext {
        pre: &pre,
        post: env,
        action,
        spec,
        case: outcome.case,
    };
    outcome.reward = dispatch(&ctx, params);
    Ok(outcome)
}
