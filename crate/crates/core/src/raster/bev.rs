//! Multi-channel bird's-eye-view raster of a planning frame.
//!
//! Channel order:
//! 0. landmarks and road boundaries
//! 1. agents with fading history
//! 2. ego with fading history
//! 3. static obstacles, static occupancy and stop-line masks
//! 4. route

use serde::{Deserialize, Serialize};

use super::{fill_polygon, trace_polyline, CellLabel, GridGeometry, OccupancyGrid};
use crate::error::{invalid, Result};
use crate::geometry::shapes::polygon_bounds;
use crate::geometry::OrientedBox;
use crate::types::{Frame, LandmarkKind, LightState, Point2};

pub const CHANNEL_COUNT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Landmarks = 0,
    Agents = 1,
    Ego = 2,
    Static = 3,
    Route = 4,
}

impl Channel {
    pub const ALL: [Channel; CHANNEL_COUNT] =
        [Channel::Landmarks, Channel::Agents, Channel::Ego, Channel::Static, Channel::Route];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Landmarks => "landmarks",
            Channel::Agents => "agents",
            Channel::Ego => "ego",
            Channel::Static => "static",
            Channel::Route => "route",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RasterConfig {
    /// Brightness lost per frame of history age.
    pub fade_alpha: f64,
    /// Reject polygons that fall entirely outside the raster.
    pub strict: bool,
}

impl Default for RasterConfig {
    fn default() -> Self {
        Self { fade_alpha: 0.05, strict: false }
    }
}

/// Brightness of a polygon drawn `age` frames before the current one:
/// `max(0, 1 - age * alpha)`.
pub fn history_brightness(age: usize, alpha: f64) -> f64 {
    (1.0 - age as f64 * alpha).max(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BevRaster {
    pub geometry: GridGeometry,
    /// Channel-major intensities in `[0, 1]`.
    pub data: Vec<f32>,
}

impl BevRaster {
    pub fn zeros(geometry: GridGeometry) -> Self {
        Self { geometry, data: vec![0.0; CHANNEL_COUNT * geometry.len()] }
    }

    /// `(H, W, C)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.geometry.rows, self.geometry.cols, CHANNEL_COUNT)
    }

    pub fn channel(&self, ch: Channel) -> &[f32] {
        let n = self.geometry.len();
        &self.data[ch as usize * n..(ch as usize + 1) * n]
    }

    pub fn at(&self, ch: Channel, row: usize, col: usize) -> f32 {
        self.channel(ch)[self.geometry.index(row, col)]
    }

    fn channel_mut(&mut self, ch: Channel) -> &mut [f32] {
        let n = self.geometry.len();
        &mut self.data[ch as usize * n..(ch as usize + 1) * n]
    }

    fn paint_polygon(&mut self, ch: Channel, poly: &[Point2], value: f32) -> usize {
        let geom = self.geometry;
        let data = self.channel_mut(ch);
        fill_polygon(&geom, poly, |r, c| {
            let v = &mut data[geom.index(r, c)];
            *v = v.max(value);
        })
    }

    fn paint_polyline(&mut self, ch: Channel, pts: &[Point2], value: f32) {
        let geom = self.geometry;
        let data = self.channel_mut(ch);
        trace_polyline(&geom, pts, |r, c| {
            let v = &mut data[geom.index(r, c)];
            *v = v.max(value);
        });
    }
}

fn landmark_intensity(kind: LandmarkKind) -> f32 {
    match kind {
        LandmarkKind::RoadBoundary => 1.0,
        LandmarkKind::LaneDivider => 0.6,
        LandmarkKind::LaneCenter => 0.3,
    }
}

fn check_inside(geom: &GridGeometry, poly: &[Point2], what: &str, strict: bool) -> Result<()> {
    if !strict {
        return Ok(());
    }
    let (lo, hi) = polygon_bounds(poly);
    let half = 0.5 * geom.resolution;
    let x0 = geom.origin[0] - half;
    let y0 = geom.origin[1] - half;
    let x1 = x0 + geom.cols as f64 * geom.resolution;
    let y1 = y0 + geom.rows as f64 * geom.resolution;
    if hi[0] < x0 || lo[0] > x1 || hi[1] < y0 || lo[1] > y1 {
        return Err(invalid(format!("{what} lies wholly outside the raster extent")));
    }
    Ok(())
}

/// Rasterizes `frame` onto `geometry`. Agent and ego polygons from history
/// are drawn at [`history_brightness`]; overlapping paint keeps the brightest
/// value. `occupancy`, when given, contributes its static cells.
pub fn rasterize_scene(
    frame: &Frame,
    occupancy: Option<&OccupancyGrid>,
    geometry: GridGeometry,
    config: &RasterConfig,
) -> Result<BevRaster> {
    let mut raster = BevRaster::zeros(geometry);
    let alpha = config.fade_alpha;

    for lm in &frame.landmarks {
        raster.paint_polyline(Channel::Landmarks, &lm.points, landmark_intensity(lm.kind));
    }

    for agent in &frame.agents {
        let n = agent.history.len();
        for (i, s) in agent.history.iter().enumerate() {
            let age = n - 1 - i;
            let b = history_brightness(age, alpha) as f32;
            let poly = OrientedBox::new([s.x, s.y], s.heading, agent.length, agent.width).polygon();
            check_inside(&geometry, &poly, &format!("agent '{}'", agent.id), config.strict)?;
            if b > 0.0 {
                raster.paint_polygon(Channel::Agents, &poly, b);
            }
        }
    }

    let size = frame.ego_size;
    let n = frame.ego_history.len();
    for (i, p) in frame.ego_history.iter().enumerate() {
        let b = history_brightness(n - i, alpha) as f32;
        if b > 0.0 {
            let poly = OrientedBox::new([p.x, p.y], p.heading, size.length, size.width).polygon();
            raster.paint_polygon(Channel::Ego, &poly, b);
        }
    }
    let ego_poly = OrientedBox::new([frame.ego.x, frame.ego.y], frame.ego.heading, size.length, size.width).polygon();
    raster.paint_polygon(Channel::Ego, &ego_poly, 1.0);

    for (i, poly) in frame.static_obstacles.iter().enumerate() {
        check_inside(&geometry, poly, &format!("static obstacle {i}"), config.strict)?;
        raster.paint_polygon(Channel::Static, poly, 1.0);
    }
    if let Some(occ) = occupancy {
        let n = geometry.len();
        if occ.geometry.same_lattice(&geometry) {
            let ch = raster.channel_mut(Channel::Static);
            for i in 0..n {
                if occ.labels[i] == CellLabel::Static {
                    ch[i] = 1.0;
                }
            }
        } else {
            return Err(crate::error::Error::GeometryMismatch(
                "occupancy grid and raster use different lattices".into(),
            ));
        }
    }

    raster.paint_polyline(Channel::Route, &frame.route.points, 1.0);

    // Stop lines mask the route according to the light state.
    for sl in &frame.stop_lines {
        match sl.state {
            LightState::Permitted => {}
            LightState::Yield => {
                raster.paint_polygon(Channel::Static, &sl.polygon, 0.5);
            }
            LightState::Prohibited => {
                raster.paint_polygon(Channel::Static, &sl.polygon, 1.0);
                let geom = raster.geometry;
                let route = raster.channel_mut(Channel::Route);
                fill_polygon(&geom, &sl.polygon, |r, c| route[geom.index(r, c)] = 0.0);
            }
        }
    }
    Ok(raster)
}
