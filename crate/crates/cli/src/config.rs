//! Experiment configuration file.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use vlcsim_core::channel::{AwgnSpec, ReceiverSpec, RoomGeometry, RoomLayout};
use vlcsim_core::modem::{OfdmConfig, QctConfig};
use vlcsim_core::photometry::{h_model_spd, HModelParams, LedChannel, SpectralDistribution};
use vlcsim_core::spectral::{AssignmentPolicy, ChannelImpulseResponse};

/// Problems reading or interpreting a config file. These map to exit code 2.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Read { path: String, message: String },
    #[error("config parse error in {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid config value `{key}`: {message}")]
    Invalid { key: &'static str, message: String },
}

fn bad(key: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub out_dir: String,
    pub qct: QctSection,
    pub ofdm: OfdmSection,
    pub channel: ChannelSection,
    pub ber: BerSection,
    pub papr: PaprSection,
    pub room: RoomSection,
    pub receiver: ReceiverSection,
    pub noise: NoiseSection,
    pub illum: IllumSection,
    pub leds: LedSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QctSection {
    pub n: usize,
    pub cp_len: usize,
    pub bias_db: f64,
    pub pam_order: usize,
    pub policy: String,
    pub clip: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OfdmSection {
    pub n: usize,
    pub cp_len: usize,
    pub bias_db: f64,
    pub qam_order: usize,
    pub clip: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    /// `flat`, `threetap`, or `custom` (uses `taps`).
    pub name: String,
    pub taps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BerSection {
    pub snr_db: Vec<f64>,
    pub min_errors: u64,
    pub max_bits: u64,
    pub csk_slots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PaprSection {
    pub frames: usize,
    pub threshold_min_db: f64,
    pub threshold_max_db: f64,
    pub threshold_step_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoomSection {
    pub length_m: f64,
    pub width_m: f64,
    pub height_m: f64,
    pub luminaire_offset_m: f64,
    pub led_pitch_m: f64,
    pub semi_angle_deg: f64,
    pub total_power_w: f64,
    pub grid_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReceiverSection {
    pub area_m2: f64,
    pub fov_deg: f64,
    pub responsivity_a_per_w: f64,
    pub height_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub n0_a2_per_hz: f64,
    pub bandwidth_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IllumSection {
    pub clip_frames: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedSpec {
    pub peak_nm: f64,
    pub width_left_nm: f64,
    pub width_right_nm: f64,
    pub k1: f64,
    pub k2: f64,
    pub band_lo_nm: f64,
    pub band_hi_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LedSection {
    pub red: LedSpec,
    pub amber: LedSpec,
    pub green: LedSpec,
    pub blue: LedSpec,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 1,
            out_dir: "results".into(),
            qct: QctSection::default(),
            ofdm: OfdmSection::default(),
            channel: ChannelSection::default(),
            ber: BerSection::default(),
            papr: PaprSection::default(),
            room: RoomSection::default(),
            receiver: ReceiverSection::default(),
            noise: NoiseSection::default(),
            illum: IllumSection::default(),
            leds: LedSection::default(),
        }
    }
}

impl Default for QctSection {
    fn default() -> Self {
        Self {
            n: 512,
            cp_len: 4,
            bias_db: 13.0,
            pam_order: 4,
            policy: AssignmentPolicy::default().name().into(),
            clip: true,
        }
    }
}

impl Default for OfdmSection {
    fn default() -> Self {
        Self {
            n: 512,
            cp_len: 4,
            bias_db: 13.0,
            qam_order: 4,
            clip: true,
        }
    }
}

impl Default for ChannelSection {
    fn default() -> Self {
        Self {
            name: "flat".into(),
            taps: Vec::new(),
        }
    }
}

impl Default for BerSection {
    fn default() -> Self {
        Self {
            snr_db: (0..=10).map(|i| 2.0 * i as f64).collect(),
            min_errors: 100,
            max_bits: 10_000_000,
            csk_slots: 256,
        }
    }
}

impl Default for PaprSection {
    fn default() -> Self {
        Self {
            frames: 10_000,
            threshold_min_db: 4.0,
            threshold_max_db: 16.0,
            threshold_step_db: 0.25,
        }
    }
}

impl Default for RoomSection {
    fn default() -> Self {
        let l = RoomLayout::default();
        Self {
            length_m: l.dimensions[0],
            width_m: l.dimensions[1],
            height_m: l.dimensions[2],
            luminaire_offset_m: l.luminaire_offset,
            led_pitch_m: l.led_pitch,
            semi_angle_deg: l.semi_angle.to_degrees().round(),
            total_power_w: l.total_power,
            grid_m: l.resolution,
        }
    }
}

impl Default for ReceiverSection {
    fn default() -> Self {
        let r = ReceiverSpec::default();
        Self {
            area_m2: r.area,
            fov_deg: r.fov.to_degrees().round(),
            responsivity_a_per_w: r.responsivity,
            height_m: r.height,
        }
    }
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            n0_a2_per_hz: 1e-22,
            bandwidth_hz: 20e6,
        }
    }
}

impl Default for IllumSection {
    fn default() -> Self {
        Self { clip_frames: 2000 }
    }
}

impl LedSpec {
    fn standard(c: LedChannel) -> Self {
        let p = c.params();
        let (band_lo_nm, band_hi_nm) = c.filter_band();
        Self {
            peak_nm: p.peak_nm,
            width_left_nm: p.width_left_nm,
            width_right_nm: p.width_right_nm,
            k1: p.k1,
            k2: p.k2,
            band_lo_nm,
            band_hi_nm,
        }
    }
}

impl Default for LedSection {
    fn default() -> Self {
        Self {
            red: LedSpec::standard(LedChannel::Red),
            amber: LedSpec::standard(LedChannel::Amber),
            green: LedSpec::standard(LedChannel::Green),
            blue: LedSpec::standard(LedChannel::Blue),
        }
    }
}

/// Every config key with its unit and meaning, in file order.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("seed", "-", "master RNG seed"),
    ("out_dir", "path", "output directory"),
    ("qct.n", "samples", "QCT frame size (power of two)"),
    ("qct.cp_len", "samples", "QCT cyclic prefix length"),
    ("qct.bias_db", "dB", "QCT electrical DC bias"),
    ("qct.pam_order", "-", "PAM order M"),
    (
        "qct.policy",
        "-",
        "column assignment: round-robin | contiguous",
    ),
    ("qct.clip", "bool", "clip negative drive samples"),
    ("ofdm.n", "samples", "DCO-OFDM frame size (power of two)"),
    ("ofdm.cp_len", "samples", "DCO-OFDM cyclic prefix length"),
    ("ofdm.bias_db", "dB", "DCO-OFDM electrical DC bias"),
    ("ofdm.qam_order", "-", "square QAM order"),
    ("ofdm.clip", "bool", "clip negative drive samples"),
    ("channel.name", "-", "BER channel: flat | threetap | custom"),
    ("channel.taps", "-", "impulse response for `custom`"),
    ("ber.snr_db", "dB", "SNR per bit sweep points"),
    (
        "ber.min_errors",
        "bits",
        "stop a point after this many errors",
    ),
    ("ber.max_bits", "bits", "stop a point after this many bits"),
    (
        "ber.csk_slots",
        "symbols",
        "CSK symbols per simulated frame",
    ),
    ("papr.frames", "frames", "frames per PAPR estimate"),
    ("papr.threshold_min_db", "dB", "lowest CCDF threshold"),
    ("papr.threshold_max_db", "dB", "highest CCDF threshold"),
    ("papr.threshold_step_db", "dB", "CCDF threshold step"),
    ("room.length_m", "m", "room extent along x"),
    ("room.width_m", "m", "room extent along y"),
    ("room.height_m", "m", "ceiling height"),
    (
        "room.luminaire_offset_m",
        "m",
        "luminaire centers at (±offset, ±offset)",
    ),
    ("room.led_pitch_m", "m", "LED spacing inside a luminaire"),
    ("room.semi_angle_deg", "deg", "LED half-power semi-angle"),
    ("room.total_power_w", "W", "electrical budget over all LEDs"),
    ("room.grid_m", "m", "map grid step"),
    ("receiver.area_m2", "m^2", "photodetector area"),
    ("receiver.fov_deg", "deg", "receiver field of view"),
    (
        "receiver.responsivity_a_per_w",
        "A/W",
        "photodetector responsivity",
    ),
    ("receiver.height_m", "m", "receiver plane height"),
    (
        "noise.n0_a2_per_hz",
        "A^2/Hz",
        "noise power spectral density",
    ),
    ("noise.bandwidth_hz", "Hz", "receiver noise bandwidth"),
    (
        "illum.clip_frames",
        "frames",
        "QCT frames counted for the clipping fraction",
    ),
    ("leds.<color>.peak_nm", "nm", "H-model peak wavelength"),
    (
        "leds.<color>.width_left_nm",
        "nm",
        "H-model width below the peak",
    ),
    (
        "leds.<color>.width_right_nm",
        "nm",
        "H-model width above the peak",
    ),
    ("leds.<color>.k1", "-", "H-model shape weight"),
    ("leds.<color>.k2", "-", "H-model shape exponent"),
    (
        "leds.<color>.band_lo_nm",
        "nm",
        "receiver filter lower edge",
    ),
    (
        "leds.<color>.band_hi_nm",
        "nm",
        "receiver filter upper edge",
    ),
];

fn lookup<'a>(v: &'a toml::Value, key: &str) -> Option<&'a toml::Value> {
    key.split('.').try_fold(v, |v, k| v.get(k))
}

fn render(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => format!("\"{s}\""),
        toml::Value::Float(f) if *f != 0.0 && f.abs() < 1e-3 => format!("{f:e}"),
        toml::Value::Array(a) if a.len() > 6 => {
            let first = a.first().map(render).unwrap_or_default();
            let last = a.last().map(render).unwrap_or_default();
            format!("[{first}, ..., {last}] ({} values)", a.len())
        }
        other => other.to_string(),
    }
}

/// Help text listing every key, its default and unit.
pub fn keys_help() -> String {
    let defaults = toml::Value::try_from(Config::default()).expect("defaults serialize");
    let mut out = String::from("Config keys (TOML):\n");
    for (key, unit, what) in KEYS {
        let default = if key.contains("<color>") {
            ["red", "amber", "green", "blue"]
                .iter()
                .map(|c| {
                    lookup(&defaults, &key.replace("<color>", c))
                        .map(render)
                        .unwrap_or_default()
                })
                .collect::<Vec<_>>()
                .join(" / ")
        } else {
            lookup(&defaults, key).map(render).unwrap_or_default()
        };
        out.push_str(&format!(
            "  {key:<30} {unit:<8} default {default:<28} {what}\n"
        ));
    }
    out.push_str("  (<color> is red, amber, green or blue; defaults listed in that order)\n");
    out
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), ConfigError> {
        self.qct_config()?;
        self.ofdm_config()?;
        self.channel()?;
        self.room()?;
        self.noise()?;
        self.spectra()?;
        if self.ber.snr_db.is_empty() || self.ber.snr_db.iter().any(|v| !v.is_finite()) {
            return Err(bad("ber.snr_db", "needs at least one finite value"));
        }
        if self.ber.min_errors == 0 || self.ber.max_bits == 0 {
            return Err(bad(
                "ber.min_errors",
                "error and bit limits must be positive",
            ));
        }
        if self.ber.csk_slots == 0 {
            return Err(bad("ber.csk_slots", "must be positive"));
        }
        let p = &self.papr;
        if p.frames == 0 {
            return Err(bad("papr.frames", "must be positive"));
        }
        if !(p.threshold_step_db > 0.0) || !(p.threshold_max_db >= p.threshold_min_db) {
            return Err(bad(
                "papr.threshold_step_db",
                "thresholds must form an increasing range",
            ));
        }
        if self.illum.clip_frames == 0 {
            return Err(bad("illum.clip_frames", "must be positive"));
        }
        Ok(())
    }

    /// Stable digest of the canonical (defaults filled, fields ordered) content.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(&Sha256::digest(&canonical)[..6])
    }

    pub fn qct_config(&self) -> Result<QctConfig, ConfigError> {
        let q = &self.qct;
        let policy = q
            .policy
            .parse::<AssignmentPolicy>()
            .map_err(|e| bad("qct.policy", e.to_string()))?;
        if q.n < 4 || !q.n.is_power_of_two() {
            return Err(bad("qct.n", "must be a power of two >= 4"));
        }
        if q.cp_len >= q.n {
            return Err(bad("qct.cp_len", "must be shorter than the frame"));
        }
        if !(q.bias_db >= 0.0) {
            return Err(bad("qct.bias_db", "must be nonnegative"));
        }
        if ![2, 4, 8, 16].contains(&q.pam_order) {
            return Err(bad("qct.pam_order", "must be 2, 4, 8 or 16"));
        }
        Ok(QctConfig {
            n: q.n,
            cp_len: q.cp_len,
            bias_db: q.bias_db,
            pam_order: q.pam_order,
            policy,
            clip: q.clip,
        })
    }

    pub fn ofdm_config(&self) -> Result<OfdmConfig, ConfigError> {
        let o = &self.ofdm;
        if o.n < 4 || !o.n.is_power_of_two() {
            return Err(bad("ofdm.n", "must be a power of two >= 4"));
        }
        if o.cp_len >= o.n {
            return Err(bad("ofdm.cp_len", "must be shorter than the frame"));
        }
        if !(o.bias_db >= 0.0) {
            return Err(bad("ofdm.bias_db", "must be nonnegative"));
        }
        if ![4, 16, 64, 256].contains(&o.qam_order) {
            return Err(bad("ofdm.qam_order", "must be 4, 16, 64 or 256"));
        }
        Ok(OfdmConfig {
            n: o.n,
            cp_len: o.cp_len,
            bias_db: o.bias_db,
            qam_order: o.qam_order,
            clip: o.clip,
        })
    }

    /// The BER channel, unit energy for the named presets.
    pub fn channel(&self) -> Result<ChannelImpulseResponse, ConfigError> {
        let h = match self.channel.name.as_str() {
            "flat" => ChannelImpulseResponse::identity(),
            "threetap" => ChannelImpulseResponse::new(vec![1.0, 0.5, 0.25])
                .expect("valid taps")
                .normalized(),
            "custom" => ChannelImpulseResponse::new(self.channel.taps.clone())
                .map_err(|e| bad("channel.taps", e.to_string()))?,
            other => return Err(bad("channel.name", format!("unknown channel `{other}`"))),
        };
        if h.len() > self.qct.cp_len + 1 || h.len() > self.ofdm.cp_len + 1 {
            return Err(bad(
                "channel.taps",
                format!("{} taps exceed the cyclic prefix", h.len()),
            ));
        }
        Ok(h)
    }

    pub fn room(&self) -> Result<RoomGeometry, ConfigError> {
        let r = &self.room;
        let rx = &self.receiver;
        let layout = RoomLayout {
            dimensions: [r.length_m, r.width_m, r.height_m],
            luminaire_offset: r.luminaire_offset_m,
            led_pitch: r.led_pitch_m,
            semi_angle: r.semi_angle_deg.to_radians(),
            total_power: r.total_power_w,
            receiver: ReceiverSpec {
                area: rx.area_m2,
                fov: rx.fov_deg.to_radians(),
                responsivity: rx.responsivity_a_per_w,
                height: rx.height_m,
            },
            resolution: r.grid_m,
        };
        layout.build().map_err(|e| bad("room", e.to_string()))
    }

    pub fn noise(&self) -> Result<AwgnSpec, ConfigError> {
        AwgnSpec::new(self.noise.n0_a2_per_hz, self.noise.bandwidth_hz)
            .map_err(|e| bad("noise", e.to_string()))
    }

    fn led_specs(&self) -> [&LedSpec; 4] {
        [
            &self.leds.red,
            &self.leds.amber,
            &self.leds.green,
            &self.leds.blue,
        ]
    }

    /// Unit-peak channel spectra in red, amber, green, blue order.
    pub fn spectra(&self) -> Result<[SpectralDistribution; 4], ConfigError> {
        let mut out: [SpectralDistribution; 4] =
            std::array::from_fn(|_| SpectralDistribution::zeros());
        for (slot, s) in out.iter_mut().zip(self.led_specs()) {
            let p = HModelParams::new(s.peak_nm, s.width_left_nm, s.width_right_nm, s.k1, s.k2)
                .map_err(|e| bad("leds", e.to_string()))?;
            *slot = h_model_spd(&p);
        }
        Ok(out)
    }

    pub fn bands(&self) -> [(f64, f64); 4] {
        self.led_specs().map(|s| (s.band_lo_nm, s.band_hi_nm))
    }

    pub fn papr_thresholds(&self) -> Vec<f64> {
        let p = &self.papr;
        let steps = ((p.threshold_max_db - p.threshold_min_db) / p.threshold_step_db + 1e-9).floor()
            as usize;
        (0..=steps)
            .map(|i| p.threshold_min_db + i as f64 * p.threshold_step_db)
            .collect()
    }
}
