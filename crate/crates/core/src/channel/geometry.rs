use crate::error::{invalid, Result};

/// Half-power semi-angle of the default luminaires, degrees.
pub const DEFAULT_SEMI_ANGLE_DEG: f64 = 30.0;

/// `m = −ln 2 / ln cos(θ½)`.
pub fn lambertian_order(semi_angle: f64) -> Result<f64> {
    if !(semi_angle > 0.0 && semi_angle < std::f64::consts::FRAC_PI_2) {
        return invalid(format!(
            "semi-angle must lie in (0, π/2) rad, got {semi_angle}"
        ));
    }
    Ok(-std::f64::consts::LN_2 / semi_angle.cos().ln())
}

/// A single downward-facing LED package.
#[derive(Debug, Clone, PartialEq)]
pub struct LedLuminaire {
    /// Meters, room-centered, `z` up from the floor.
    pub position: [f64; 3],
    pub lambertian_order: f64,
    /// Total electrical watts across all color channels.
    pub electrical_power: f64,
    /// Fraction of `electrical_power` per color channel (red, amber, green, blue).
    pub channel_weights: [f64; 4],
}

impl LedLuminaire {
    pub fn channel_power(&self, channel: usize) -> f64 {
        self.electrical_power * self.channel_weights[channel]
    }
}

/// An upward-facing photodetector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverSpec {
    /// m².
    pub area: f64,
    /// Field of view half-angle, rad.
    pub fov: f64,
    /// A/W.
    pub responsivity: f64,
    /// m above the floor.
    pub height: f64,
}

impl ReceiverSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.area > 0.0) {
            return invalid("receiver area must be positive");
        }
        if !(self.fov > 0.0 && self.fov <= std::f64::consts::FRAC_PI_2) {
            return invalid("receiver field of view must lie in (0, π/2]");
        }
        if !(self.responsivity > 0.0) {
            return invalid("responsivity must be positive");
        }
        Ok(())
    }
}

impl Default for ReceiverSpec {
    fn default() -> Self {
        Self {
            area: 1e-4,
            fov: 85f64.to_radians(),
            responsivity: 0.4,
            height: 0.0,
        }
    }
}

/// Line-of-sight DC gain from `tx` to a receiver at `(x, y)` on its plane.
pub fn los_gain(tx: &LedLuminaire, rx_point: [f64; 2], rx: &ReceiverSpec) -> Result<f64> {
    let dx = rx_point[0] - tx.position[0];
    let dy = rx_point[1] - tx.position[1];
    let dz = tx.position[2] - rx.height;
    let d2 = dx * dx + dy * dy + dz * dz;
    if d2 == 0.0 {
        return invalid("receiver coincides with the transmitter");
    }
    if dz <= 0.0 {
        return Ok(0.0);
    }
    let d = d2.sqrt();
    // Both the emitter and the detector face along z, so the two angles coincide.
    let cos = dz / d;
    if cos.acos() > rx.fov {
        return Ok(0.0);
    }
    let m = tx.lambertian_order;
    Ok((m + 1.0) * rx.area / (2.0 * std::f64::consts::PI * d2) * cos.powf(m) * cos)
}

/// Room dimensions, fixtures, receiver and the sampling grid for maps.
#[derive(Debug, Clone, PartialEq)]
pub struct RoomGeometry {
    /// Length, width, height in meters.
    pub dimensions: [f64; 3],
    pub luminaires: Vec<LedLuminaire>,
    pub receiver: ReceiverSpec,
    /// Grid step in meters.
    pub resolution: f64,
}

impl RoomGeometry {
    pub fn validate(&self) -> Result<()> {
        let [lx, ly, lz] = self.dimensions;
        if !(lx > 0.0 && ly > 0.0 && lz > 0.0) {
            return invalid("room dimensions must be positive");
        }
        if !(self.resolution > 0.0 && self.resolution <= lx.min(ly)) {
            return invalid("grid resolution must be positive and fit the room");
        }
        if self.luminaires.is_empty() {
            return invalid("room has no luminaires");
        }
        for led in &self.luminaires {
            let [x, y, z] = led.position;
            if x.abs() > lx / 2.0 || y.abs() > ly / 2.0 || z < 0.0 || z > lz {
                return invalid(format!(
                    "luminaire at {:?} lies outside the room",
                    led.position
                ));
            }
            if !(led.lambertian_order >= 1.0) || !(led.electrical_power >= 0.0) {
                return invalid("luminaire needs Lambertian order >= 1 and nonnegative power");
            }
        }
        self.receiver.validate()
    }

    /// Grid coordinates along x and y, covering the floor edge to edge.
    pub fn grid(&self) -> (Vec<f64>, Vec<f64>) {
        let axis = |len: f64| {
            let cells = (len / self.resolution).round() as usize;
            (0..=cells)
                .map(|i| -len / 2.0 + len * i as f64 / cells as f64)
                .collect()
        };
        (axis(self.dimensions[0]), axis(self.dimensions[1]))
    }

    pub fn total_power(&self) -> f64 {
        self.luminaires.iter().map(|l| l.electrical_power).sum()
    }

    pub fn channel_power(&self, channel: usize) -> f64 {
        self.luminaires
            .iter()
            .map(|l| l.channel_power(channel))
            .sum()
    }
}

/// Parameters of a room lit by four ceiling luminaires, each a 3×3 grid of LEDs.
#[derive(Debug, Clone, PartialEq)]
pub struct RoomLayout {
    /// Length, width, height in meters.
    pub dimensions: [f64; 3],
    /// Luminaire centers sit at `(±offset, ±offset)` from the room center, meters.
    pub luminaire_offset: f64,
    /// Spacing of LEDs within a luminaire, meters.
    pub led_pitch: f64,
    /// LED half-power semi-angle, rad.
    pub semi_angle: f64,
    /// Electrical watts across all LEDs and channels.
    pub total_power: f64,
    pub receiver: ReceiverSpec,
    /// Map grid step, meters.
    pub resolution: f64,
}

impl Default for RoomLayout {
    fn default() -> Self {
        Self {
            dimensions: [5.0, 5.0, 3.0],
            luminaire_offset: 1.25,
            led_pitch: 0.1,
            semi_angle: DEFAULT_SEMI_ANGLE_DEG.to_radians(),
            total_power: 100.0,
            receiver: ReceiverSpec::default(),
            resolution: 0.1,
        }
    }
}

impl RoomLayout {
    /// 36 LEDs sharing the budget equally, each split equally over four channels.
    pub fn build(&self) -> Result<RoomGeometry> {
        let m = lambertian_order(self.semi_angle)?;
        if !(self.total_power >= 0.0) {
            return invalid("total power must be nonnegative");
        }
        let (o, pitch, height) = (self.luminaire_offset, self.led_pitch, self.dimensions[2]);
        let per_led = self.total_power / 36.0;
        let mut luminaires = Vec::with_capacity(36);
        for cx in [-o, o] {
            for cy in [-o, o] {
                for i in -1..=1 {
                    for j in -1..=1 {
                        luminaires.push(LedLuminaire {
                            position: [cx + pitch * i as f64, cy + pitch * j as f64, height],
                            lambertian_order: m,
                            electrical_power: per_led,
                            channel_weights: [0.25; 4],
                        });
                    }
                }
            }
        }
        let room = RoomGeometry {
            dimensions: self.dimensions,
            luminaires,
            receiver: self.receiver,
            resolution: self.resolution,
        };
        room.validate()?;
        Ok(room)
    }
}

/// A 5×5×3 m office lit by four ceiling luminaires of nine LEDs each, 100 W in
/// total shared equally across LEDs and color channels. The receiver lies on
/// the floor.
pub fn default_room() -> RoomGeometry {
    RoomLayout::default()
        .build()
        .expect("default room parameters are valid")
}
