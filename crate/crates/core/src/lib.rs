pub mod cli;
pub mod lopsp;
pub mod lopsp_apply;
pub mod map;
pub mod oracle_suite;
pub mod plane_map_gen;
pub mod quad_gen;
pub mod rotation_audit;
