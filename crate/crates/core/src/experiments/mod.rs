//! Monte Carlo BER sweeps, analytic oracles, PAPR statistics, room maps and
//! the illumination report.

mod analytic;
mod ber;
mod output;
mod papr;
mod room;

pub use analytic::{
    analytic_orthogonal_ber, analytic_pam_ber, analytic_qam_ber, db_to_linear, q_function,
};
pub use ber::{
    crossover_db, run_ber_sweep, BerCurve, BerPoint, CskLink, LinkSimulator, OfdmLink, QctLink,
    StopRule,
};
pub use output::{write_atomic, CsvTable};
pub use papr::{run_papr_ccdf, PaprCcdf, PaprSource};
pub use room::{
    average_spectrum, channel_drive, qct_clipped_fraction, run_illumination_report, run_room_maps,
    ChannelDrive, EmissionScheme, HeatMap, IlluminationReport, RoomMaps, SchemeIllumination,
};
