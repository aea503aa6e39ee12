use serde::{Deserialize, Serialize};

use super::filter::{kinematic_filter, KinematicLimits};
use super::st_graph::StGraph;
use crate::geometry::{fit_quartic, fit_quintic, frenet_to_cartesian, FrenetState, PolynomialProfile, ReferenceLine};
use crate::time::{waypoint_time, HORIZON, HORIZON_STEPS};
use crate::types::{CandidateSet, Maneuver, Source, Trajectory, Waypoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LatticeConfig {
    /// End speeds are `target_speed + offset`, clamped at zero.
    pub speed_offsets: Vec<f64>,
    /// Times at which cruise profiles reach their end speed, s.
    pub cruise_times: Vec<f64>,
    /// Extra stop distances ahead of the ego, m.
    pub stop_distances: Vec<f64>,
    /// Deceleration defining the automatic comfortable stop, m/s^2.
    pub comfort_decel: f64,
    /// Clearances kept behind (follow) or ahead of (overtake) a band, m.
    pub band_gaps: Vec<f64>,
    /// Lateral end offsets from the reference, m.
    pub lateral_offsets: Vec<f64>,
    /// Lateral moves complete over `max(min_lateral_length, v * time)`.
    pub lateral_times: Vec<f64>,
    pub min_lateral_length: f64,
    /// Offsets at or beyond this magnitude are tagged as lane changes.
    pub lane_change_offset: f64,
    pub limits: KinematicLimits,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            speed_offsets: vec![-4.0, -2.0, -1.0, 0.0, 1.0, 2.0],
            cruise_times: vec![2.0, 3.0, 4.0],
            stop_distances: Vec::new(),
            comfort_decel: 3.0,
            band_gaps: vec![0.0, 4.0],
            lateral_offsets: vec![0.0, 0.8, -0.8, 1.75, -1.75, 3.5, -3.5],
            lateral_times: vec![2.5, 4.0],
            min_lateral_length: 8.0,
            lane_change_offset: 3.0,
            limits: KinematicLimits::default(),
        }
    }
}

/// A longitudinal profile `s(t)` with its maneuver tag.
#[derive(Debug, Clone, PartialEq)]
pub struct Longitudinal {
    pub profile: PolynomialProfile,
    pub maneuver: Maneuver,
    /// s-t obstacle a follow or overtake profile was built against.
    pub obstacle: Option<usize>,
}

/// Stations along the horizon, `k = 0..=30`.
pub fn stations(profile: &PolynomialProfile) -> Vec<f64> {
    (0..=HORIZON_STEPS).map(|k| profile.state_at(waypoint_time(k))[0]).collect()
}

fn non_reversing(profile: &PolynomialProfile) -> bool {
    let mut prev = f64::NEG_INFINITY;
    (0..=HORIZON_STEPS).all(|k| {
        let [s, v, _] = profile.state_at(waypoint_time(k));
        let ok = v >= -1e-9 && s >= prev - 1e-9;
        prev = s;
        ok
    })
}

fn stop_time(distance: f64, v0: f64) -> f64 {
    (2.0 * distance / v0.max(0.5)).clamp(1.0, 8.0)
}

/// Cruise, stop, follow and overtake station profiles from `init`.
pub fn longitudinal_profiles(init: &FrenetState, st: &StGraph, target_speed: f64, config: &LatticeConfig) -> Vec<Longitudinal> {
    let (s0, v0, a0) = (init.s, init.s_dot.max(0.0), init.s_ddot);
    let mut out = Vec::new();
    let push = |p: crate::error::Result<PolynomialProfile>, m: Maneuver, obstacle: Option<usize>, out: &mut Vec<Longitudinal>| {
        if let Ok(p) = p {
            if non_reversing(&p) && !out.iter().any(|o: &Longitudinal| o.profile == p) {
                out.push(Longitudinal { profile: p, maneuver: m, obstacle });
            }
        }
    };
    for &dv in &config.speed_offsets {
        let v1 = (target_speed + dv).max(0.0);
        for &t1 in &config.cruise_times {
            push(fit_quartic(s0, v0, a0, v1, 0.0, t1), Maneuver::LaneKeep, None, &mut out);
        }
    }
    let mut stops: Vec<f64> = config.stop_distances.iter().copied().filter(|d| *d > 0.0).collect();
    if v0 > 0.5 {
        stops.push((v0 * v0 / (2.0 * config.comfort_decel)).max(1.0));
    }
    for d in stops {
        push(fit_quintic([s0, v0, a0], [s0 + d, 0.0, 0.0], stop_time(d, v0)), Maneuver::Stop, None, &mut out);
    }
    for (oi, ob) in st.obstacles.iter().enumerate() {
        let (Some(first), Some(last)) = (ob.first_present(), ob.last_present()) else { continue };
        let band = |k: usize| ob.bands[k].expect("present");
        if band(first).1 < s0 && first == 0 {
            continue; // entirely behind the ego
        }
        let v_ob = ob.speed().max(0.0);
        let t_last = waypoint_time(last).max(0.5);
        let lowest = (first..=last).filter_map(|k| ob.bands[k]).map(|b| b.0).fold(f64::INFINITY, f64::min);
        for &gap in &config.band_gaps {
            // match the band speed behind it, or stop short of it
            let s_follow = band(last).0 - gap;
            if s_follow > s0 {
                push(fit_quintic([s0, v0, a0], [s_follow, v_ob, 0.0], t_last), Maneuver::Follow, Some(oi), &mut out);
                push(fit_quintic([s0, v0, a0], [s_follow, v_ob, 0.0], HORIZON), Maneuver::Follow, Some(oi), &mut out);
            }
            let s_stop = lowest - gap;
            if s_stop > s0 {
                push(fit_quintic([s0, v0, a0], [s_stop, 0.0, 0.0], stop_time(s_stop - s0, v0)), Maneuver::Follow, Some(oi), &mut out);
            }
            let s_pass = band(last).1 + gap;
            if s_pass > s0 {
                for v1 in [v_ob + 2.0, target_speed.max(v_ob + 0.5)] {
                    push(fit_quintic([s0, v0, a0], [s_pass, v1, 0.0], t_last), Maneuver::Overtake, Some(oi), &mut out);
                }
            }
        }
    }
    // follow and overtake profiles must respect their own band
    out.retain(|lon| match lon.obstacle {
        Some(oi) => {
            let ss = stations(&lon.profile);
            st.obstacles[oi].bands.iter().zip(&ss).all(|(b, s)| match (b, lon.maneuver) {
                (None, _) => true,
                (Some((lo, _)), Maneuver::Follow) => s < lo,
                (Some((_, hi)), _) => s > hi,
            })
        }
        None => true,
    });
    out
}

/// Lateral quintics `l(u)` over travelled distance `u`, one per end offset
/// and move length.
pub fn lateral_profiles(init: &FrenetState, config: &LatticeConfig) -> Vec<(f64, PolynomialProfile)> {
    let mut out: Vec<(f64, PolynomialProfile)> = Vec::new();
    let v = init.s_dot.max(0.0);
    for &l1 in &config.lateral_offsets {
        for &t in &config.lateral_times {
            let length = config.min_lateral_length.max(v * t);
            if let Ok(p) = fit_quintic([init.l, init.l_prime, init.l_pprime], [l1, 0.0, 0.0], length) {
                if !out.iter().any(|(_, q)| q.coeffs == p.coeffs) {
                    out.push((l1, p));
                }
            }
        }
    }
    out
}

fn combine(
    lon: &Longitudinal,
    lat: &PolynomialProfile,
    l1: f64,
    init: &FrenetState,
    reference: &ReferenceLine,
    config: &LatticeConfig,
) -> Option<Trajectory> {
    let maneuver = if l1.abs() >= config.lane_change_offset {
        if l1 > 0.0 {
            Maneuver::LaneChangeLeft
        } else {
            Maneuver::LaneChangeRight
        }
    } else {
        lon.maneuver
    };
    let samples: Option<Vec<Waypoint>> = (0..=HORIZON_STEPS)
        .map(|k| {
            let t = waypoint_time(k);
            let [s, s_dot, s_ddot] = lon.profile.state_at(t);
            let [l, l_prime, l_pprime] = lat.state_at(s - init.s);
            let fs = FrenetState { s, s_dot, s_ddot, l, l_prime, l_pprime };
            let c = frenet_to_cartesian(&fs, reference).ok()?;
            Some(Waypoint { t, x: c.x, y: c.y, heading: c.heading, v: c.v })
        })
        .collect();
    Some(Trajectory::from_samples(samples?, maneuver, Source::Lattice))
}

/// Frenet lattice: every longitudinal profile combined with every lateral
/// profile, mapped to Cartesian and passed through the kinematic filter.
/// Combinations leaving the reference line are dropped.
pub fn lattice_sampler(
    init: &FrenetState,
    reference: &ReferenceLine,
    st: &StGraph,
    target_speed: f64,
    config: &LatticeConfig,
) -> CandidateSet {
    let lons = longitudinal_profiles(init, st, target_speed, config);
    let lats = lateral_profiles(init, config);
    let mut set = CandidateSet::new();
    for lon in &lons {
        for (l1, lat) in &lats {
            if let Some(t) = combine(lon, lat, *l1, init, reference, config) {
                set.push(t);
            }
        }
    }
    if lons.is_empty() || lats.is_empty() {
        set.warning = Some("lattice sweep is empty".into());
    }
    kinematic_filter(set, &config.limits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn init(v: f64) -> FrenetState {
        FrenetState { s: 0.0, s_dot: v, s_ddot: 0.0, l: 0.0, l_prime: 0.0, l_pprime: 0.0 }
    }

    fn line() -> ReferenceLine {
        ReferenceLine::new(vec![[0.0, 0.0], [200.0, 0.0]]).unwrap()
    }

    #[test]
    fn cruise_at_target_present() {
        let set = lattice_sampler(&init(10.0), &line(), &StGraph::default(), 10.0, &LatticeConfig::default());
        let found = set.iter().any(|t| {
            t.waypoints.iter().all(|w| (w.x - 10.0 * w.t).abs() < 1e-9 && w.y.abs() < 1e-9)
        });
        assert!(found);
    }

    #[test]
    fn stop_target_reached() {
        let cfg = LatticeConfig { stop_distances: vec![15.0], ..Default::default() };
        let lons = longitudinal_profiles(&init(10.0), &StGraph::default(), 10.0, &cfg);
        let stop = lons.iter().find(|l| l.maneuver == Maneuver::Stop && (l.profile.t_end - 3.0).abs() < 1e-12).unwrap();
        let [s, v, a] = stop.profile.state_at(3.0);
        assert!((s - 15.0).abs() < 1e-6 && v.abs() < 1e-6 && a.abs() < 1e-6);
    }

    #[test]
    fn all_start_at_origin() {
        let set = lattice_sampler(&init(8.0), &line(), &StGraph::default(), 10.0, &LatticeConfig::default());
        assert!(set.len() > 10);
        for t in set.iter() {
            assert!(t.origin.x.abs() < 1e-9 && t.origin.y.abs() < 1e-9 && t.is_valid());
        }
    }
}
