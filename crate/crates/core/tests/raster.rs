//! Bird's-eye-view rasters of the built-in scenarios.

use mapless_planner::raster::{rasterize_scene, Channel, OccupancyGrid, RasterConfig};
use mapless_planner::simulator::{builtin_scenario, scenario_suite};
use mapless_planner::types::{Frame, LightState, StopLine};
use mapless_planner::Error;

fn render(frame: &Frame) -> mapless_planner::raster::BevRaster {
    let geom = frame.geometry();
    let occ = OccupancyGrid::from_frame(frame, geom);
    rasterize_scene(frame, Some(&occ), geom, &RasterConfig::default()).unwrap()
}

#[test]
fn intensities_stay_in_unit_range() {
    for s in scenario_suite() {
        let r = render(&Frame::initial(&s));
        assert_eq!(r.shape(), (500, 500, 5));
        assert!(r.data.iter().all(|v| (0.0..=1.0).contains(v)), "{}", s.name);
    }
}

#[test]
fn channels_hold_their_objects() {
    let s = builtin_scenario("lead_brake").unwrap();
    let frame = Frame::initial(&s);
    let r = render(&frame);
    let g = r.geometry;
    let at = |ch, p| {
        let (row, col) = g.world_to_cell(p).unwrap();
        r.at(ch, row, col)
    };
    assert_eq!(at(Channel::Ego, [0.0, 0.0]), 1.0);
    assert_eq!(at(Channel::Agents, [30.0, 0.0]), 1.0);
    assert_eq!(at(Channel::Agents, [0.0, 0.0]), 0.0);
    assert_eq!(at(Channel::Route, [20.0, 0.0]), 1.0);
    assert!((at(Channel::Landmarks, [10.0, 3.5]) - 0.3).abs() < 1e-6);
    assert_eq!(at(Channel::Static, [10.0, 3.5]), 0.0);

    let s = builtin_scenario("static_obstacle").unwrap();
    let r = render(&Frame::initial(&s));
    let (row, col) = r.geometry.world_to_cell([35.0, 0.0]).unwrap();
    assert_eq!(r.at(Channel::Static, row, col), 1.0);
}

#[test]
fn red_stop_line_masks_the_route() {
    let mut s = builtin_scenario("empty_road").unwrap();
    let line = vec![[20.0, -2.0], [21.0, -2.0], [21.0, 2.0], [20.0, 2.0]];
    s.stop_lines.push(StopLine { polygon: line, state: LightState::Prohibited });
    let r = render(&Frame::initial(&s));
    let (row, col) = r.geometry.world_to_cell([20.5, 0.0]).unwrap();
    assert_eq!(r.at(Channel::Route, row, col), 0.0);
    assert_eq!(r.at(Channel::Static, row, col), 1.0);

    s.stop_lines[0].state = LightState::Yield;
    let r = render(&Frame::initial(&s));
    assert_eq!(r.at(Channel::Route, row, col), 1.0);
    assert_eq!(r.at(Channel::Static, row, col), 0.5);
}

#[test]
fn strict_mode_rejects_objects_outside_the_grid() {
    let mut s = builtin_scenario("static_obstacle").unwrap();
    s.static_obstacles.push(vec![[900.0, 0.0], [901.0, 0.0], [901.0, 1.0]]);
    let frame = Frame::initial(&s);
    let geom = frame.geometry();
    assert!(rasterize_scene(&frame, None, geom, &RasterConfig::default()).is_ok());
    let strict = RasterConfig { strict: true, ..RasterConfig::default() };
    assert!(matches!(rasterize_scene(&frame, None, geom, &strict), Err(Error::InvalidInput(_))));
}
